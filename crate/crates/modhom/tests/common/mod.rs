//! Brute-force oracles and seeded generators shared by the integration
//! suites. The oracles enumerate assignments directly, without the
//! library's backtracking, masks, or inversion machinery, so each
//! comparison has two independent routes to the same number.

#![allow(dead_code)]

use itertools::Itertools;
use modhom::graph::{gens, Graph, Sort};
use modhom::hom::HomCount;
use modhom::iso;
use modhom::products;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Runs `f` on every map from V(g) to V(h), as a plain odometer.
fn for_all_maps(g: &Graph, h: &Graph, mut f: impl FnMut(&[usize])) {
    if g.n() == 0 {
        f(&[]);
        return;
    }
    if h.n() == 0 {
        return;
    }
    let mut map = vec![0usize; g.n()];
    loop {
        f(&map);
        let mut i = 0;
        loop {
            map[i] += 1;
            if map[i] < h.n() {
                break;
            }
            map[i] = 0;
            i += 1;
            if i == g.n() {
                return;
            }
        }
    }
}

fn preserves(g: &Graph, h: &Graph, map: &[usize]) -> bool {
    for (u, v) in g.edges() {
        if !h.has_edge(map[u], map[v]) {
            return false;
        }
    }
    if let (Some(sg), Some(sh)) = (g.sorts(), h.sorts()) {
        for v in 0..g.n() {
            if sg[v] != sh[map[v]] {
                return false;
            }
        }
    }
    true
}

/// hom(g, h) by full enumeration. Sorts must match in presence, like the
/// library's counter; the sorted count restricts maps to sort-preserving
/// ones.
pub fn oracle_hom(g: &Graph, h: &Graph) -> HomCount {
    assert_eq!(g.is_sorted(), h.is_sorted(), "oracle needs matching sortedness");
    let mut count = HomCount::from(0u32);
    for_all_maps(g, h, |map| {
        if preserves(g, h, map) {
            count += 1u32;
        }
    });
    count
}

/// Pinned hom count: maps sending `g_pins[i]` to `h_pins[i]`.
pub fn oracle_hom_pinned(g: &Graph, g_pins: &[usize], h: &Graph, h_pins: &[usize]) -> HomCount {
    assert_eq!(g.is_sorted(), h.is_sorted(), "oracle needs matching sortedness");
    assert_eq!(g_pins.len(), h_pins.len());
    let mut count = HomCount::from(0u32);
    for_all_maps(g, h, |map| {
        if g_pins.iter().zip(h_pins).all(|(&x, &a)| map[x] == a) && preserves(g, h, map) {
            count += 1u32;
        }
    });
    count
}

/// Injective pinned hom count by full enumeration.
pub fn oracle_inj_pinned(g: &Graph, g_pins: &[usize], h: &Graph, h_pins: &[usize]) -> HomCount {
    assert_eq!(g.is_sorted(), h.is_sorted(), "oracle needs matching sortedness");
    let mut count = HomCount::from(0u32);
    for_all_maps(g, h, |map| {
        let mut seen = 0u64;
        let injective = map.iter().all(|&w| {
            let fresh = seen >> w & 1 == 0;
            seen |= 1 << w;
            fresh
        });
        if injective
            && g_pins.iter().zip(h_pins).all(|(&x, &a)| map[x] == a)
            && preserves(g, h, map)
        {
            count += 1u32;
        }
    });
    count
}

/// |Aut(h)| by checking every permutation.
pub fn oracle_aut(h: &Graph) -> u64 {
    let n = h.n();
    if n == 0 {
        return 1;
    }
    let mut count = 0;
    for perm in (0..n).permutations(n) {
        let ok = (0..n).all(|u| {
            (u..n).all(|v| h.has_edge(u, v) == h.has_edge(perm[u], perm[v]))
        }) && h
            .sorts()
            .map_or(true, |s| (0..n).all(|v| s[v] == s[perm[v]]));
        if ok {
            count += 1;
        }
    }
    count
}

/// Number of independent sets, the empty set included. A looped vertex is
/// adjacent to itself and so never belongs to one.
pub fn oracle_independent_sets(g: &Graph) -> u64 {
    let n = g.n();
    assert!(n <= 24, "oracle enumerates subsets");
    let mut count = 0;
    for mask in 0u64..1 << n {
        if (0..n).all(|v| mask >> v & 1 == 0 || g.neighbors(v) & mask == 0) {
            count += 1;
        }
    }
    count
}

/// Whether the brute-force search finds any proper 2-coloring.
pub fn oracle_two_colorable(g: &Graph) -> bool {
    for mask in 0u64..1 << g.n() {
        let ok = g
            .edges()
            .iter()
            .all(|&(u, v)| u != v && (mask >> u & 1) != (mask >> v & 1));
        if ok {
            return true;
        }
    }
    false
}

/// Uniform random graph: each vertex pair is an edge with probability 1/2;
/// loops appear with probability 1/4 when allowed.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, loops: bool) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u..n {
            if u == v {
                if loops && rng.gen_bool(0.25) {
                    edges.push((u, v));
                }
            } else if rng.gen_bool(0.5) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// As `random_graph`, drawing the vertex count from `lo..=hi` first.
pub fn random_graph_sized(rng: &mut ChaCha8Rng, lo: usize, hi: usize, loops: bool) -> Graph {
    let n = rng.gen_range(lo..=hi);
    random_graph(rng, n, loops)
}

/// Random sorted graph: each vertex draws a side, each cross pair is an
/// edge with probability 1/2.
pub fn random_sorted(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let sorts: Vec<Sort> =
        (0..n).map(|_| if rng.gen_bool(0.5) { Sort::L } else { Sort::R }).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if sorts[u] != sorts[v] && rng.gen_bool(0.5) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap().with_sorts(sorts).unwrap()
}

/// As `random_sorted`, drawing the vertex count from `lo..=hi` first.
pub fn random_sorted_sized(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Graph {
    let n = rng.gen_range(lo..=hi);
    random_sorted(rng, n)
}

/// Keeps sampling until the predicate holds; seeded callers always get
/// the same answer, so a pass is reproducible.
pub fn sample_until(
    rng: &mut ChaCha8Rng,
    attempts: usize,
    mut gen: impl FnMut(&mut ChaCha8Rng) -> Graph,
    keep: impl Fn(&Graph) -> bool,
) -> Graph {
    for _ in 0..attempts {
        let g = gen(rng);
        if keep(&g) {
            return g;
        }
    }
    panic!("no sample satisfied the predicate in {attempts} attempts");
}

/// Representatives of every isomorphism class by vertex count, loops
/// allowed: `levels[m]` holds exactly the m-vertex classes, built by
/// extending the previous level with one vertex in every possible way and
/// deduplicating canonically.
fn iso_rep_levels(n: usize) -> Vec<Vec<Graph>> {
    let mut levels = vec![vec![Graph::new(0).unwrap()]];
    for m in 1..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for base in &levels[m - 1] {
            for ext in 0u64..1 << m {
                let mut edges = base.edges();
                for u in 0..m - 1 {
                    if ext >> u & 1 == 1 {
                        edges.push((u, m - 1));
                    }
                }
                if ext >> (m - 1) & 1 == 1 {
                    edges.push((m - 1, m - 1));
                }
                let g = Graph::from_edges(m, &edges).unwrap();
                if seen.insert(iso::canonical_form(&g)) {
                    next.push(g);
                }
            }
        }
        levels.push(next);
    }
    levels
}

/// Representatives of every isomorphism class on exactly n vertices.
pub fn iso_reps(n: usize) -> Vec<Graph> {
    iso_rep_levels(n).pop().unwrap()
}

/// Representatives of every isomorphism class with at most n vertices.
pub fn iso_reps_upto(n: usize) -> Vec<Graph> {
    iso_rep_levels(n).into_iter().flatten().collect()
}

/// A random target whose components are all tractable shapes, at most
/// `max_total` vertices.
pub fn random_tractable_target(rng: &mut ChaCha8Rng, max_total: usize) -> Graph {
    let mut h = Graph::new(0).unwrap();
    let parts = rng.gen_range(1..=3);
    for _ in 0..parts {
        let comp = match rng.gen_range(0..3) {
            0 => gens::edgeless(1),
            1 => gens::reflexive_clique(rng.gen_range(1..=3)),
            _ => gens::complete_bipartite(rng.gen_range(1..=3), rng.gen_range(1..=3)),
        };
        if h.n() + comp.n() <= max_total {
            h = products::disjoint_union(&h, &comp);
        }
    }
    h
}

/// The Cartesian-skeleton product identity for R-thin factors without
/// isolated vertices: the skeleton of the diamond product equals the
/// case-appropriate combination of factor skeletons. Panics with context
/// when it fails.
pub fn check_skeleton_identity(a: &Graph, b: &Graph) {
    let prod = products::diamond_product(a, b).unwrap();
    let lhs = products::cartesian_skeleton(&prod);
    let box_ = products::cartesian_product;
    let rhs = match (a.is_sorted(), b.is_sorted()) {
        (true, true) => {
            let (al, ar) = products::skeleton_components(a).unwrap();
            let (bl, br) = products::skeleton_components(b).unwrap();
            products::disjoint_union(&box_(&al, &bl), &box_(&ar, &br))
        }
        (true, false) => {
            let (al, ar) = products::skeleton_components(a).unwrap();
            let sb = products::cartesian_skeleton(b);
            products::disjoint_union(&box_(&al, &sb), &box_(&ar, &sb))
        }
        (false, true) => {
            let (bl, br) = products::skeleton_components(b).unwrap();
            let sa = products::cartesian_skeleton(a);
            products::disjoint_union(&box_(&sa, &bl), &box_(&sa, &br))
        }
        (false, false) => box_(
            &products::cartesian_skeleton(a),
            &products::cartesian_skeleton(b),
        ),
    };
    assert!(
        iso::is_isomorphic(&lhs.clone().strip_sorts(), &rhs.clone().strip_sorts()),
        "skeleton identity failed for factors {:?} / {:?} (sorted {} / {})",
        a.edges(),
        b.edges(),
        a.is_sorted(),
        b.is_sorted()
    );
}
