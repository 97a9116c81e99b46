//! Graphs with optional loops and an optional two-sorted (bipartite) labeling.
//!
//! Vertices are dense indices `0..n`. Adjacency is kept as one bitmask row
//! per vertex, which caps graphs at 64 vertices; everything in this crate is
//! desk scale, and products of the supported inputs stay under that cap.
//! A loop is the diagonal bit `v` in row `v`.
//!
//! A *sorted* graph carries a total labeling of vertices by `Sort::L` /
//! `Sort::R` under which every edge crosses the two sorts; sorted graphs are
//! therefore bipartite and loop-free by construction. Sorted and unsorted
//! graphs are distinct objects: homomorphism counts between sorted graphs
//! are constrained to sort-preserving maps.

use crate::error::{Error, Result};
use crate::partition::Partition;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Hard cap imposed by the bitmask adjacency rows.
pub const MAX_VERTICES: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Sort {
    L,
    R,
}

impl Sort {
    pub fn flip(self) -> Sort {
        match self {
            Sort::L => Sort::R,
            Sort::R => Sort::L,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
    sorts: Option<Vec<Sort>>,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Result<Graph> {
        if n > MAX_VERTICES {
            return Err(Error::TooManyVertices { n, max: MAX_VERTICES });
        }
        Ok(Graph { n, adj: vec![0; n], sorts: None })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut g = Graph::new(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Attaches a sort labeling; every existing edge must cross the sorts.
    pub fn with_sorts(mut self, sorts: Vec<Sort>) -> Result<Graph> {
        if sorts.len() != self.n {
            return Err(Error::InvalidSorts {
                reason: format!("{} labels for {} vertices", sorts.len(), self.n),
            });
        }
        for u in 0..self.n {
            let mut m = self.adj[u];
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                if sorts[u] == sorts[v] {
                    return Err(Error::InvalidSorts {
                        reason: format!("edge ({u}, {v}) joins two {:?} vertices", sorts[u]),
                    });
                }
            }
        }
        self.sorts = Some(sorts);
        Ok(self)
    }

    pub fn strip_sorts(mut self) -> Graph {
        self.sorts = None;
        self
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::VertexOutOfRange { vertex: w, n: self.n });
            }
        }
        if let Some(sorts) = &self.sorts {
            if sorts[u] == sorts[v] {
                return Err(Error::InvalidSorts {
                    reason: format!("edge ({u}, {v}) joins two {:?} vertices", sorts[u]),
                });
            }
        }
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u] >> v & 1 == 1
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.has_edge(v, v)
    }

    pub fn has_loops(&self) -> bool {
        (0..self.n).any(|v| self.has_loop(v))
    }

    /// Neighbor bitmask of `v` (bit `v` itself set iff `v` has a loop).
    pub fn neighbors(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn neighbor_list(&self, v: usize) -> Vec<usize> {
        bits(self.adj[v]).collect()
    }

    /// Degree counting a loop once.
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn is_sorted(&self) -> bool {
        self.sorts.is_some()
    }

    pub fn sorts(&self) -> Option<&[Sort]> {
        self.sorts.as_deref()
    }

    pub fn sort_of(&self, v: usize) -> Option<Sort> {
        self.sorts.as_ref().map(|s| s[v])
    }

    /// Vertices carrying the given sort, ascending; empty for unsorted graphs.
    pub fn sort_members(&self, sort: Sort) -> Vec<usize> {
        match &self.sorts {
            None => Vec::new(),
            Some(s) => (0..self.n).filter(|&v| s[v] == sort).collect(),
        }
    }

    /// Edges as `(u, v)` with `u <= v`, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            let mut m = self.adj[u] >> u << u;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                out.push((u, v));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = 0u64;
        let mut comps = Vec::new();
        for root in 0..self.n {
            if seen >> root & 1 == 1 {
                continue;
            }
            let mut comp = 1u64 << root;
            loop {
                let mut grown = comp;
                let mut m = comp;
                while m != 0 {
                    let v = m.trailing_zeros() as usize;
                    m &= m - 1;
                    grown |= self.adj[v];
                }
                if grown == comp {
                    break;
                }
                comp = grown;
            }
            seen |= comp;
            comps.push(bits(comp).collect());
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Proper 2-coloring if one exists: per component a BFS coloring with the
    /// lowest-index vertex labeled `L`. Loops or odd cycles yield `None`.
    pub fn bipartition(&self) -> Option<Vec<Sort>> {
        let mut label = vec![None; self.n];
        for root in 0..self.n {
            if label[root].is_some() {
                continue;
            }
            label[root] = Some(Sort::L);
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                let lu = label[u].unwrap();
                for v in bits(self.adj[u]) {
                    if v == u {
                        return None;
                    }
                    match label[v] {
                        None => {
                            label[v] = Some(lu.flip());
                            queue.push_back(v);
                        }
                        Some(lv) if lv == lu => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(label.into_iter().map(|l| l.unwrap()).collect())
    }

    /// Partition of the vertices into classes of equal neighborhoods,
    /// compared as raw vertex sets (so a loop distinguishes).
    pub fn r_classes(&self) -> Partition {
        let mut blocks: Vec<(u64, Vec<usize>)> = Vec::new();
        for v in 0..self.n {
            match blocks.iter_mut().find(|(mask, _)| *mask == self.adj[v]) {
                Some((_, block)) => block.push(v),
                None => blocks.push((self.adj[v], vec![v])),
            }
        }
        Partition::from_blocks(self.n, blocks.into_iter().map(|(_, b)| b).collect())
            .expect("classes partition the vertex set")
    }

    pub fn is_r_thin(&self) -> bool {
        self.r_classes().blocks().iter().all(|b| b.len() == 1)
    }

    /// Quotient by a partition: one vertex per block (in the partition's
    /// block order), an edge between blocks iff some member pair is an edge.
    /// Sorts survive only when every block is sort-homogeneous.
    pub fn quotient(&self, theta: &Partition) -> Result<Graph> {
        if theta.ground() != self.n {
            return Err(Error::InvalidInput(format!(
                "partition of {} elements applied to graph with {} vertices",
                theta.ground(),
                self.n
            )));
        }
        let class = theta.class_map();
        let k = theta.blocks().len();
        let mut q = Graph::new(k)?;
        for u in 0..self.n {
            for v in bits(self.adj[u]) {
                q.adj[class[u]] |= 1 << class[v];
                q.adj[class[v]] |= 1 << class[u];
            }
        }
        if let Some(sorts) = &self.sorts {
            let block_sorts: Option<Vec<Sort>> = theta
                .blocks()
                .iter()
                .map(|b| {
                    let s = sorts[b[0]];
                    b.iter().all(|&v| sorts[v] == s).then_some(s)
                })
                .collect();
            if let Some(bs) = block_sorts {
                // Homogeneous blocks in a sorted graph can never be joined by
                // a same-sort edge, so relabeling cannot fail.
                q = q.with_sorts(bs)?;
            }
        }
        Ok(q)
    }

    /// Induced subgraph on `keep` (ascending, order-preserving re-index).
    pub fn induced_subgraph(&self, keep: &[usize]) -> Result<Graph> {
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &v in &sorted {
            if v >= self.n {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        let mut g = Graph::new(sorted.len())?;
        for (i, &u) in sorted.iter().enumerate() {
            for (j, &v) in sorted.iter().enumerate().skip(i) {
                if self.has_edge(u, v) {
                    g.adj[i] |= 1 << j;
                    g.adj[j] |= 1 << i;
                }
            }
        }
        if let Some(sorts) = &self.sorts {
            g.sorts = Some(sorted.iter().map(|&v| sorts[v]).collect());
        }
        Ok(g)
    }

    /// Relabels vertices by `perm` (vertex `v` becomes `perm[v]`), which must
    /// be a permutation of `0..n`. Sorts travel with their vertices.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::InvalidInput("permutation length mismatch".into()));
        }
        let mut seen = vec![false; self.n];
        for &img in perm {
            if img >= self.n || seen[img] {
                return Err(Error::InvalidInput("not a permutation".into()));
            }
            seen[img] = true;
        }
        let mut g = Graph::new(self.n)?;
        for (u, v) in self.edges() {
            g.adj[perm[u]] |= 1 << perm[v];
            g.adj[perm[v]] |= 1 << perm[u];
        }
        if let Some(sorts) = &self.sorts {
            let mut s = vec![Sort::L; self.n];
            for v in 0..self.n {
                s[perm[v]] = sorts[v];
            }
            g.sorts = Some(s);
        }
        Ok(g)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?}", self.n, self.edges())?;
        if let Some(s) = &self.sorts {
            write!(f, ", sorts={s:?}")?;
        }
        write!(f, ")")
    }
}

/// Iterates set bit positions of a mask, ascending.
pub(crate) fn bits(mask: u64) -> impl Iterator<Item = usize> {
    std::iter::successors(
        (mask != 0).then(|| mask.trailing_zeros() as usize),
        move |&v| {
            let rest = mask & !((1u64 << v) | ((1u64 << v) - 1));
            (rest != 0).then(|| rest.trailing_zeros() as usize)
        },
    )
}

/// A graph with a tuple of distinguished vertices. Pins may repeat.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PinnedGraph {
    pub graph: Graph,
    pins: Vec<usize>,
}

impl PinnedGraph {
    pub fn new(graph: Graph, pins: Vec<usize>) -> Result<PinnedGraph> {
        for &v in &pins {
            if v >= graph.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: graph.n() });
            }
        }
        Ok(PinnedGraph { graph, pins })
    }

    pub fn unpinned(graph: Graph) -> PinnedGraph {
        PinnedGraph { graph, pins: Vec::new() }
    }

    pub fn pins(&self) -> &[usize] {
        &self.pins
    }

    pub fn arity(&self) -> usize {
        self.pins.len()
    }

    /// Equality type of the pin tuple: positions grouped by coincidence,
    /// encoded as the index of the first equal earlier position.
    pub fn equality_type(&self) -> Vec<usize> {
        self.pins
            .iter()
            .enumerate()
            .map(|(i, &v)| self.pins[..i].iter().position(|&w| w == v).unwrap_or(i))
            .collect()
    }
}

/// Structural classes of a connected graph used by the classifier.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructuralClass {
    IsolatedVertex,
    ReflexiveClique,
    CompleteBipartite,
    Other,
}

/// Classifies a connected graph. Precedence: a single loopless vertex is
/// `IsolatedVertex` (not a degenerate complete bipartite graph), a single
/// looped vertex is the reflexive 1-clique.
pub fn structural_class(g: &Graph) -> Result<StructuralClass> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    if n == 1 && !g.has_loop(0) {
        return Ok(StructuralClass::IsolatedVertex);
    }
    if (0..n).all(|u| (u..n).all(|v| g.has_edge(u, v))) {
        return Ok(StructuralClass::ReflexiveClique);
    }
    if !g.has_loops() {
        if let Some(sides) = g.bipartition() {
            let complete = (0..n).all(|u| {
                (0..n).all(|v| sides[u] == sides[v] || g.has_edge(u, v))
            });
            if complete {
                return Ok(StructuralClass::CompleteBipartite);
            }
        }
    }
    Ok(StructuralClass::Other)
}

/// Small stock graphs used throughout the tests and benches.
pub mod gens {
    use super::{Graph, Sort};

    /// Path on `n` vertices, edges `(i, i+1)`.
    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    /// Path with its canonical bipartition as sorts (even indices `L`).
    pub fn path_sorted(n: usize) -> Graph {
        let g = path(n);
        let sorts = g.bipartition().unwrap();
        g.with_sorts(sorts).unwrap()
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Graph {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((n - 1, 0));
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    /// Complete graph with all loops.
    pub fn reflexive_clique(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    /// K_{a,b} with side `L` on vertices `0..a`, unsorted.
    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..a {
            for v in a..a + b {
                edges.push((u, v));
            }
        }
        Graph::from_edges(a + b, &edges).unwrap()
    }

    /// K_{a,b} carrying its sorts.
    pub fn complete_bipartite_sorted(a: usize, b: usize) -> Graph {
        let sorts = (0..a + b).map(|v| if v < a { Sort::L } else { Sort::R }).collect();
        complete_bipartite(a, b).with_sorts(sorts).unwrap()
    }

    pub fn edgeless(n: usize) -> Graph {
        Graph::new(n).unwrap()
    }

    pub fn single_loop() -> Graph {
        Graph::from_edges(1, &[(0, 0)]).unwrap()
    }
}
