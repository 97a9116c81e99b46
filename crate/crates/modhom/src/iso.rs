//! Isomorphism and automorphism search by pruned permutation backtracking.
//!
//! Candidates are restined by iterated neighborhood-color refinement (degree,
//! loop, and sort seed the colors), which keeps the exhaustive search fast at
//! desk scale. Automorphism enumeration assigns vertices in index order with
//! ascending candidates, so results come out in lexicographic order of the
//! mapping and "first found" means "lexicographically least".

use crate::error::{Error, Result};
use crate::graph::{bits, Graph};
use crate::modp::Prime;
use std::collections::BTreeMap;

/// A graph automorphism together with its order in the automorphism group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Automorphism {
    mapping: Vec<usize>,
    order: usize,
}

impl Automorphism {
    pub fn from_mapping(mapping: Vec<usize>) -> Automorphism {
        let order = permutation_order(&mapping);
        Automorphism { mapping, order }
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn apply(&self, v: usize) -> usize {
        self.mapping[v]
    }

    pub fn is_identity(&self) -> bool {
        self.order == 1
    }

    /// Fixed points, ascending.
    pub fn fixed_points(&self) -> Vec<usize> {
        self.mapping
            .iter()
            .enumerate()
            .filter(|&(v, &w)| v == w)
            .map(|(v, _)| v)
            .collect()
    }

    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.mapping.len();
        let mut seen = vec![false; n];
        let mut lens = Vec::new();
        for v in 0..n {
            if seen[v] {
                continue;
            }
            let mut len = 0;
            let mut w = v;
            while !seen[w] {
                seen[w] = true;
                w = self.mapping[w];
                len += 1;
            }
            lens.push(len);
        }
        lens.sort_unstable();
        lens
    }
}

fn permutation_order(mapping: &[usize]) -> usize {
    let mut order = 1usize;
    for len in Automorphism::from_cycle_scan(mapping) {
        order = lcm(order, len);
    }
    order
}

impl Automorphism {
    fn from_cycle_scan(mapping: &[usize]) -> Vec<usize> {
        Automorphism { mapping: mapping.to_vec(), order: 0 }.cycle_lengths()
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Canonical refinement colors for the vertices of `g` and `h` jointly:
/// equal colors are necessary for one vertex to map to the other under any
/// isomorphism. Color ids are stable under relabeling because each round
/// canonicalizes the signature set of both graphs together.
pub fn joint_refinement(g: &Graph, h: &Graph) -> (Vec<usize>, Vec<usize>) {
    let init = |g: &Graph| -> Vec<Vec<usize>> {
        (0..g.n())
            .map(|v| {
                let sort_code = match g.sort_of(v) {
                    None => 0,
                    Some(crate::graph::Sort::L) => 1,
                    Some(crate::graph::Sort::R) => 2,
                };
                vec![sort_code, g.has_loop(v) as usize, g.degree(v)]
            })
            .collect()
    };
    let mut sig_g = init(g);
    let mut sig_h = init(h);
    let mut colors_g = vec![0; g.n()];
    let mut colors_h = vec![0; h.n()];
    let mut classes = 0usize;
    loop {
        // Ids are ranks in the sorted signature set, so they are invariant
        // under relabeling; that makes the colors canonical per graph.
        let mut all: Vec<&Vec<usize>> = sig_g.iter().chain(sig_h.iter()).collect();
        all.sort();
        all.dedup();
        let table: BTreeMap<&Vec<usize>, usize> =
            all.into_iter().enumerate().map(|(i, s)| (s, i)).collect();
        let new_g: Vec<usize> = sig_g.iter().map(|s| table[s]).collect();
        let new_h: Vec<usize> = sig_h.iter().map(|s| table[s]).collect();
        let new_classes = table.len();
        colors_g = new_g;
        colors_h = new_h;
        if new_classes == classes {
            return (colors_g, colors_h);
        }
        classes = new_classes;
        let resig = |g: &Graph, colors: &[usize]| -> Vec<Vec<usize>> {
            (0..g.n())
                .map(|v| {
                    let mut s = vec![colors[v]];
                    let mut around: Vec<usize> =
                        bits(g.neighbors(v)).map(|w| colors[w]).collect();
                    around.sort_unstable();
                    s.extend(around);
                    s
                })
                .collect()
        };
        sig_g = resig(g, &colors_g);
        sig_h = resig(h, &colors_h);
    }
}

pub fn refinement_colors(g: &Graph) -> Vec<usize> {
    joint_refinement(g, g).0
}

/// Backtracking over color-compatible bijections g -> h that preserve both
/// edges and non-edges. `forced` pre-assigns pairs. The callback sees each
/// complete mapping; returning `false` stops the enumeration.
fn search_bijections(
    g: &Graph,
    h: &Graph,
    forced: &[(usize, usize)],
    order: &[usize],
    on_found: &mut dyn FnMut(&[usize]) -> bool,
) {
    let n = g.n();
    if n != h.n() || g.is_sorted() != h.is_sorted() {
        return;
    }
    let (cg, ch) = joint_refinement(g, h);
    let mut hist_g = BTreeMap::new();
    let mut hist_h = BTreeMap::new();
    for &c in &cg {
        *hist_g.entry(c).or_insert(0usize) += 1;
    }
    for &c in &ch {
        *hist_h.entry(c).or_insert(0usize) += 1;
    }
    if hist_g != hist_h {
        return;
    }
    let mut mapping = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for &(v, w) in forced {
        if cg[v] != ch[w] {
            return;
        }
        if mapping[v] == w {
            continue;
        }
        if mapping[v] != usize::MAX || used[w] {
            return;
        }
        mapping[v] = w;
        used[w] = true;
    }
    // Forced arcs must already be mutually edge-consistent.
    for &(v, _) in forced {
        for &(u, _) in forced {
            if g.has_edge(v, u) != h.has_edge(mapping[v], mapping[u]) {
                return;
            }
        }
    }
    fn rec(
        g: &Graph,
        h: &Graph,
        cg: &[usize],
        ch: &[usize],
        order: &[usize],
        depth: usize,
        mapping: &mut Vec<usize>,
        used: &mut Vec<bool>,
        on_found: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let pos = (depth..order.len()).find(|&i| mapping[order[i]] == usize::MAX);
        let Some(pos) = pos else {
            return on_found(mapping);
        };
        let v = order[pos];
        for w in 0..h.n() {
            if used[w] || cg[v] != ch[w] {
                continue;
            }
            let consistent = (0..g.n()).all(|u| {
                mapping[u] == usize::MAX || g.has_edge(v, u) == h.has_edge(w, mapping[u])
            }) && g.has_loop(v) == h.has_loop(w);
            if !consistent {
                continue;
            }
            mapping[v] = w;
            used[w] = true;
            let keep_going = rec(g, h, cg, ch, order, pos + 1, mapping, used, on_found);
            mapping[v] = usize::MAX;
            used[w] = false;
            if !keep_going {
                return false;
            }
        }
        true
    }
    rec(g, h, &cg, &ch, order, 0, &mut mapping, &mut used, on_found);
}

/// Assignment order for isomorphism search: rarest color first, then index.
/// (Automorphism enumeration uses plain index order for lexicographic output.)
fn rarity_order(colors: &[usize]) -> Vec<usize> {
    let mut hist = BTreeMap::new();
    for &c in colors {
        *hist.entry(c).or_insert(0usize) += 1;
    }
    let mut order: Vec<usize> = (0..colors.len()).collect();
    order.sort_by_key(|&v| (hist[&colors[v]], colors[v], v));
    order
}

/// First isomorphism g -> h under a fixed deterministic search strategy,
/// as a mapping of g-vertices to h-vertices. Sorted graphs must map
/// sort-preservingly (sorts seed the refinement colors).
pub fn find_isomorphism(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    if g.n() != h.n() || g.edge_count() != h.edge_count() {
        return None;
    }
    let order = rarity_order(&joint_refinement(g, h).0);
    let mut found = None;
    search_bijections(g, h, &[], &order, &mut |mapping| {
        found = Some(mapping.to_vec());
        false
    });
    found
}

pub fn is_isomorphic(g: &Graph, h: &Graph) -> bool {
    find_isomorphism(g, h).is_some()
}

/// Isomorphism where sorted graphs may also match with the two sorts
/// exchanged; unsorted graphs behave like `find_isomorphism`.
pub fn find_isomorphism_up_to_sort_swap(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    find_isomorphism(g, h).or_else(|| {
        if g.is_sorted() && h.is_sorted() {
            let flipped = h
                .clone()
                .strip_sorts()
                .with_sorts(
                    h.sorts().unwrap().iter().map(|s| s.flip()).collect(),
                )
                .expect("flipping sorts preserves validity");
            find_isomorphism(g, &flipped)
        } else {
            None
        }
    })
}

/// The full automorphism group, in lexicographic order of the mappings.
pub fn automorphisms(h: &Graph) -> Vec<Automorphism> {
    automorphisms_fixing(h, &[])
}

/// Automorphisms fixing every listed vertex pointwise, lexicographic.
pub fn automorphisms_fixing(h: &Graph, fixed: &[usize]) -> Vec<Automorphism> {
    let forced: Vec<(usize, usize)> = fixed.iter().map(|&v| (v, v)).collect();
    let order: Vec<usize> = (0..h.n()).collect();
    let mut out = Vec::new();
    search_bijections(h, h, &forced, &order, &mut |mapping| {
        out.push(Automorphism::from_mapping(mapping.to_vec()));
        true
    });
    out
}

/// First automorphism extending the given vertex assignments, if any.
pub fn find_automorphism_with(h: &Graph, pairs: &[(usize, usize)]) -> Option<Automorphism> {
    let order: Vec<usize> = (0..h.n()).collect();
    let mut found = None;
    search_bijections(h, h, pairs, &order, &mut |mapping| {
        found = Some(Automorphism::from_mapping(mapping.to_vec()));
        false
    });
    found
}

/// Lexicographically least automorphism of order exactly `p`, if one exists.
///
/// Order-p permutations for prime p are exactly those with cycle type
/// (p, .., p, 1, .., 1) and at least one p-cycle, so the search walks
/// candidates in mapping-lex order while pruning any partial permutation
/// whose chain structure can no longer close every cycle at length 1 or p.
pub fn find_p_automorphism(h: &Graph, p: Prime) -> Option<Automorphism> {
    find_p_automorphism_fixing(h, p, &[])
}

/// Lexicographically least order-p automorphism fixing every listed
/// vertex, if one exists.
pub fn find_p_automorphism_fixing(h: &Graph, p: Prime, fixed: &[usize]) -> Option<Automorphism> {
    let p = p.get() as usize;
    let n = h.n();
    if n < p {
        return None;
    }
    let colors = refinement_colors(h);
    let mut mapping = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for &v in fixed {
        mapping[v] = v;
        used[v] = true;
    }

    // Walks the partial functional graph forward from `v` while arcs exist.
    fn chain_end(mapping: &[usize], mut v: usize) -> (usize, usize) {
        let mut len = 0;
        while mapping[v] != usize::MAX {
            v = mapping[v];
            len += 1;
        }
        (v, len)
    }

    // Walks backward from `v` (which must have no out-arc, so it lies on no
    // cycle and the walk terminates).
    fn chain_len_into(mapping: &[usize], mut v: usize) -> usize {
        let mut len = 0;
        while let Some(u) = (0..mapping.len()).find(|&u| mapping[u] == v) {
            v = u;
            len += 1;
        }
        len
    }

    fn rec(
        h: &Graph,
        p: usize,
        colors: &[usize],
        v: usize,
        mapping: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> Option<Vec<usize>> {
        let n = h.n();
        if v == n {
            // All cycles closed with lengths in {1, p}; reject the identity.
            return mapping.iter().enumerate().any(|(a, &b)| a != b).then(|| mapping.clone());
        }
        if mapping[v] != usize::MAX {
            // Forced fixed point, already seeded.
            return rec(h, p, colors, v + 1, mapping, used);
        }
        for w in 0..n {
            if used[w] || colors[v] != colors[w] || h.has_loop(v) != h.has_loop(w) {
                continue;
            }
            let consistent = (0..n).all(|u| {
                mapping[u] == usize::MAX || h.has_edge(v, u) == h.has_edge(w, mapping[u])
            });
            if !consistent {
                continue;
            }
            // Cycle-type discipline: adding the arc v -> w either closes the
            // chain through w back at v (allowed at total length 1 or p), or
            // extends an open chain, which must stay short enough to close
            // at length p later.
            let (end_of_w, len_w) = chain_end(mapping, w);
            let ok = if end_of_w == v {
                let cycle_len = len_w + 1;
                cycle_len == 1 || cycle_len == p
            } else {
                // Chain into v, this arc, chain out of w: the merged open
                // path eventually closes into a cycle of > merged arcs.
                let merged = chain_len_into(mapping, v) + 1 + len_w;
                merged + 1 <= p
            };
            if !ok {
                continue;
            }
            mapping[v] = w;
            used[w] = true;
            if let Some(found) = rec(h, p, colors, v + 1, mapping, used) {
                return Some(found);
            }
            mapping[v] = usize::MAX;
            used[w] = false;
        }
        None
    }

    rec(h, p, &colors, 0, &mut mapping, &mut used).map(Automorphism::from_mapping)
}

/// Canonical form: the lexicographically least adjacency bitstring over all
/// vertex orderings compatible with the refinement colors. Equal strings
/// hold exactly for isomorphic graphs. Exponential in the size of the color
/// classes, so intended for small graphs (dedup, candidate ordering).
pub fn canonical_form(g: &Graph) -> String {
    let n = g.n();
    let colors = refinement_colors(g);
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in colors.iter().enumerate() {
        groups.entry(c).or_default().push(v);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();

    let mut best: Option<String> = None;
    let mut ordering = Vec::with_capacity(n);
    fn rec(
        g: &Graph,
        groups: &[Vec<usize>],
        gi: usize,
        taken: &mut Vec<bool>,
        ordering: &mut Vec<usize>,
        best: &mut Option<String>,
    ) {
        if gi == groups.len() {
            let mut s = String::with_capacity(g.n() * (g.n() + 1) / 2 + g.n() + 8);
            s.push_str(&format!("{}|", g.n()));
            for &v in ordering.iter() {
                s.push(match g.sort_of(v) {
                    None => 'u',
                    Some(crate::graph::Sort::L) => 'l',
                    Some(crate::graph::Sort::R) => 'r',
                });
            }
            s.push('|');
            for i in 0..ordering.len() {
                for j in i..ordering.len() {
                    s.push(if g.has_edge(ordering[i], ordering[j]) { '1' } else { '0' });
                }
            }
            if best.as_ref().map_or(true, |b| s < *b) {
                *best = Some(s);
            }
            return;
        }
        let group = &groups[gi];
        fn perms(
            g: &Graph,
            groups: &[Vec<usize>],
            gi: usize,
            group: &[usize],
            taken: &mut Vec<bool>,
            ordering: &mut Vec<usize>,
            best: &mut Option<String>,
            placed: usize,
        ) {
            if placed == group.len() {
                rec(g, groups, gi + 1, taken, ordering, best);
                return;
            }
            for &v in group {
                if taken[v] {
                    continue;
                }
                taken[v] = true;
                ordering.push(v);
                perms(g, groups, gi, group, taken, ordering, best, placed + 1);
                ordering.pop();
                taken[v] = false;
            }
        }
        perms(g, groups, gi, group, taken, ordering, best, 0);
    }
    let mut taken = vec![false; n];
    rec(g, &groups, 0, &mut taken, &mut ordering, &mut best);
    best.unwrap_or_else(|| "0|||".into())
}

/// Detects whether some permutation makes the graphs literally equal; the
/// exhaustive oracle used in tests is `canonical_form` equality instead.
pub fn isomorphic_err_if_oversized(g: &Graph, h: &Graph, max_n: usize) -> Result<bool> {
    if g.n() > max_n || h.n() > max_n {
        return Err(Error::TooManyVertices { n: g.n().max(h.n()), max: max_n });
    }
    Ok(is_isomorphic(g, h))
}
