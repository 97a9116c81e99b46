//! Set partitions of `{0, .., n-1}` and the partition-lattice Möbius weights
//! used for inversion between homomorphism and injective counts.

use crate::error::{Error, Result};

/// Default cap on ground sets whose partition lattice gets enumerated;
/// Bell(10) = 115975 keeps the sums at desk scale.
pub const DEFAULT_GROUND_CAP: usize = 10;

/// A partition of `{0, .., ground-1}` in canonical form: each block sorted
/// ascending, blocks ordered by least element.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Partition {
    ground: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn from_blocks(ground: usize, blocks: Vec<Vec<usize>>) -> Result<Partition> {
        let mut seen = vec![false; ground];
        let mut total = 0;
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidInput("empty block".into()));
            }
            for &v in block {
                if v >= ground {
                    return Err(Error::VertexOutOfRange { vertex: v, n: ground });
                }
                if seen[v] {
                    return Err(Error::InvalidInput(format!("element {v} in two blocks")));
                }
                seen[v] = true;
                total += 1;
            }
        }
        if total != ground {
            return Err(Error::InvalidInput("blocks do not cover the ground set".into()));
        }
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort_by_key(|b| b[0]);
        Ok(Partition { ground, blocks })
    }

    /// Finest partition: every element a singleton.
    pub fn discrete(ground: usize) -> Partition {
        Partition {
            ground,
            blocks: (0..ground).map(|v| vec![v]).collect(),
        }
    }

    /// Coarsest partition: one block.
    pub fn indiscrete(ground: usize) -> Partition {
        Partition {
            ground,
            blocks: if ground == 0 { Vec::new() } else { vec![(0..ground).collect()] },
        }
    }

    /// Builds the partition induced by a class-index map (like a restricted
    /// growth string, but any labeling works).
    pub fn from_class_map(classes: &[usize]) -> Partition {
        let ground = classes.len();
        let mut blocks: Vec<(usize, Vec<usize>)> = Vec::new();
        for (v, &c) in classes.iter().enumerate() {
            match blocks.iter_mut().find(|(label, _)| *label == c) {
                Some((_, b)) => b.push(v),
                None => blocks.push((c, vec![v])),
            }
        }
        let mut blocks: Vec<Vec<usize>> = blocks.into_iter().map(|(_, b)| b).collect();
        blocks.sort_by_key(|b| b[0]);
        Partition { ground, blocks }
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.ground
    }

    /// Maps each element to the index of its block.
    pub fn class_map(&self) -> Vec<usize> {
        let mut map = vec![0; self.ground];
        for (i, block) in self.blocks.iter().enumerate() {
            for &v in block {
                map[v] = i;
            }
        }
        map
    }
}

/// Streams every partition of `{0, .., n-1}` in restricted-growth-string
/// lexicographic order; the discrete partition comes first... last.
/// RGS order starts at `0 0 .. 0` (one block) and ends at `0 1 2 ..`
/// (all singletons).
pub struct Partitions {
    n: usize,
    rgs: Vec<usize>,
    maxes: Vec<usize>,
    done: bool,
}

/// Enumerates partitions lazily; Bell(n) of them, so keep `n` small.
pub fn enumerate_partitions(n: usize) -> Partitions {
    Partitions {
        n,
        rgs: vec![0; n],
        maxes: vec![0; n],
        done: false,
    }
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let current = Partition::from_class_map(&self.rgs);
        if self.n <= 1 {
            self.done = true;
            return Some(current);
        }
        // Advance the restricted growth string: rightmost position that can
        // still grow is incremented, suffix resets to zero.
        let mut i = self.n - 1;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            // maxes[i] = max(rgs[0..i]); position i may hold 0..=maxes[i]+1-1.
            if self.rgs[i] <= self.maxes[i] {
                self.rgs[i] += 1;
                for j in i + 1..self.n {
                    self.rgs[j] = 0;
                    self.maxes[j] = self.maxes[i].max(self.rgs[i]);
                }
                if i + 1 < self.n {
                    // Recompute maxes for the reset suffix head.
                    self.maxes[i + 1] = self.maxes[i].max(self.rgs[i]);
                    for j in i + 2..self.n {
                        self.maxes[j] = self.maxes[j - 1];
                    }
                }
                break;
            }
            i -= 1;
        }
        Some(current)
    }
}

/// Collects all partitions, guarding against Bell-number blowup.
pub fn all_partitions(n: usize, cap: usize) -> Result<Vec<Partition>> {
    if n > cap {
        return Err(Error::GroundSetTooLarge { n, cap });
    }
    Ok(enumerate_partitions(n).collect())
}

/// Möbius function of the partition lattice from the discrete partition:
/// mu(discrete, theta) = prod over blocks B of (-1)^(|B|-1) (|B|-1)!.
pub fn mobius_weight(theta: &Partition) -> i64 {
    let mut w = 1i64;
    for block in theta.blocks() {
        let k = block.len() as i64;
        let mut f = 1i64;
        for i in 1..k {
            f *= i;
        }
        if (k - 1) % 2 == 1 {
            f = -f;
        }
        w *= f;
    }
    w
}
