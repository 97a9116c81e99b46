//! Graph products, Boolean squares, Cartesian skeletons, and prime
//! factorization.
//!
//! Vertex orders are part of the contract. Products on all pairs place
//! `(i, j)` at index `i * n_b + j`. The two-sorted product places the
//! L-pairs first (lexicographic), then the R-pairs. Disjoint unions keep
//! the left operand's vertices, then shift the right operand's.
//!
//! The diamond product dispatches on bipartiteness: two sorted bipartite
//! graphs multiply over same-sort pairs; a bipartite and a non-bipartite
//! graph multiply over all pairs with sorts inherited from the bipartite
//! coordinate; two non-bipartite graphs multiply directly. A bipartite
//! input without sorts is rejected because the dispatch would be ambiguous
//! about its parts.
//!
//! Factorization is exhaustive search with isomorphism verification,
//! usable at desk scale only. Factors come back in a canonical order and
//! every factorization carries a witness relabeling that reassembles the
//! input exactly.

use crate::error::{Error, Result};
use crate::graph::{bits, Graph, Sort};
use crate::iso;
use crate::modp::Prime;
use serde::{Deserialize, Serialize};

/// All-pairs product core: adjacency in both coordinates.
fn all_pairs_product(a: &Graph, b: &Graph) -> (Graph, Vec<(usize, usize)>) {
    let (na, nb) = (a.n(), b.n());
    let mut labels = Vec::with_capacity(na * nb);
    for i in 0..na {
        for j in 0..nb {
            labels.push((i, j));
        }
    }
    let mut edges = Vec::new();
    for (u, &(i, j)) in labels.iter().enumerate() {
        for (v, &(k, l)) in labels.iter().enumerate().skip(u) {
            if a.has_edge(i, k) && b.has_edge(j, l) {
                edges.push((u, v));
            }
        }
    }
    let g = Graph::from_edges(na * nb, &edges).expect("product indices are in range");
    (g, labels)
}

/// Same-sort-pairs product of two sorted graphs, L-pairs first.
fn sorted_pairs_product(a: &Graph, b: &Graph) -> (Graph, Vec<(usize, usize)>) {
    let (sa, sb) = (a.sorts().unwrap(), b.sorts().unwrap());
    let mut labels = Vec::new();
    let mut sorts = Vec::new();
    for side in [Sort::L, Sort::R] {
        for i in 0..a.n() {
            if sa[i] != side {
                continue;
            }
            for j in 0..b.n() {
                if sb[j] == side {
                    labels.push((i, j));
                    sorts.push(side);
                }
            }
        }
    }
    let mut edges = Vec::new();
    for (u, &(i, j)) in labels.iter().enumerate() {
        for (v, &(k, l)) in labels.iter().enumerate().skip(u + 1) {
            if a.has_edge(i, k) && b.has_edge(j, l) {
                edges.push((u, v));
            }
        }
    }
    let g = Graph::from_edges(labels.len(), &edges)
        .and_then(|g| g.with_sorts(sorts))
        .expect("same-sort pairs only join across sorts");
    (g, labels)
}

/// Product used by pinned gadgets: all pairs when neither factor is sorted,
/// same-sort pairs when both are. Mixed inputs are rejected.
pub(crate) fn paired_product(a: &Graph, b: &Graph) -> Result<(Graph, Vec<(usize, usize)>)> {
    match (a.is_sorted(), b.is_sorted()) {
        (false, false) => Ok(all_pairs_product(a, b)),
        (true, true) => Ok(sorted_pairs_product(a, b)),
        _ => Err(Error::SortMismatch),
    }
}

/// Direct (tensor) product on all pairs. Input sorts are ignored; the
/// result is unsorted.
pub fn direct_product(a: &Graph, b: &Graph) -> Graph {
    all_pairs_product(&a.clone().strip_sorts(), &b.clone().strip_sorts()).0
}

/// Cartesian product: step in exactly one coordinate. Unsorted result.
pub fn cartesian_product(a: &Graph, b: &Graph) -> Graph {
    let (na, nb) = (a.n(), b.n());
    let idx = |i: usize, j: usize| i * nb + j;
    let mut edges = Vec::new();
    for i in 0..na {
        for j in 0..nb {
            // Step in one coordinate, keep the other. A loop in either
            // factor steps back to the same pair, giving a loop here.
            for k in bits(a.neighbors(i)) {
                if k >= i {
                    edges.push((idx(i, j), idx(k, j)));
                }
            }
            for l in bits(b.neighbors(j)) {
                if l >= j && !(l == j && a.has_loop(i)) {
                    edges.push((idx(i, j), idx(i, l)));
                }
            }
        }
    }
    Graph::from_edges(na * nb, &edges).expect("product indices are in range")
}

fn is_bipartite(g: &Graph) -> bool {
    g.bipartition().is_some()
}

/// Diamond product with the pair labeling of each result vertex.
pub fn diamond_product_labeled(a: &Graph, b: &Graph) -> Result<(Graph, Vec<(usize, usize)>)> {
    let (ba, bb) = (is_bipartite(a), is_bipartite(b));
    if (ba && !a.is_sorted()) || (bb && !b.is_sorted()) {
        return Err(Error::InvalidSorts {
            reason: "bipartite diamond factor must carry sorts".into(),
        });
    }
    match (ba, bb) {
        (true, true) => Ok(sorted_pairs_product(a, b)),
        (true, false) => {
            let (g, labels) = all_pairs_product(&a.clone().strip_sorts(), b);
            let sa = a.sorts().unwrap().to_vec();
            let sorts = labels.iter().map(|&(i, _)| sa[i]).collect();
            Ok((g.with_sorts(sorts)?, labels))
        }
        (false, true) => {
            let (g, labels) = all_pairs_product(a, &b.clone().strip_sorts());
            let sb = b.sorts().unwrap().to_vec();
            let sorts = labels.iter().map(|&(_, j)| sb[j]).collect();
            Ok((g.with_sorts(sorts)?, labels))
        }
        (false, false) => Ok(all_pairs_product(a, b)),
    }
}

pub fn diamond_product(a: &Graph, b: &Graph) -> Result<Graph> {
    Ok(diamond_product_labeled(a, b)?.0)
}

/// Side-by-side union; sorts survive only when both operands carry them.
pub fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
    let na = a.n();
    let mut edges = a.edges();
    for (u, v) in b.edges() {
        edges.push((na + u, na + v));
    }
    let g = Graph::from_edges(na + b.n(), &edges).expect("shifted indices are in range");
    match (a.sorts(), b.sorts()) {
        (Some(sa), Some(sb)) => {
            let mut sorts = sa.to_vec();
            sorts.extend_from_slice(sb);
            g.with_sorts(sorts).expect("operand sorts stay valid")
        }
        _ => g,
    }
}

/// Boolean square: vertices joined when they share a neighbor; a vertex
/// with any neighbor at all gets a loop. Sorts are dropped because the new
/// edges stay inside each part.
pub fn boolean_square(g: &Graph) -> Graph {
    let mut edges = Vec::new();
    for x in 0..g.n() {
        for y in x..g.n() {
            if g.neighbors(x) & g.neighbors(y) != 0 {
                edges.push((x, y));
            }
        }
    }
    Graph::from_edges(g.n(), &edges).expect("square keeps the vertex set")
}

/// a is a strict subset of b, as bitmasks.
fn strict_subset(a: u64, b: u64) -> bool {
    a & !b == 0 && a != b
}

/// Cartesian skeleton: the Boolean square minus loops and dispensable
/// edges. An edge xy is dispensable when some witness z simultaneously
/// dominates it from both ends, per the two clause pairs below.
pub fn cartesian_skeleton(g: &Graph) -> Graph {
    let square = boolean_square(g);
    let nbr: Vec<u64> = (0..g.n()).map(|v| g.neighbors(v)).collect();
    let dominated = |x: usize, y: usize, z: usize| {
        strict_subset(nbr[x] & nbr[y], nbr[x] & nbr[z])
            || (strict_subset(nbr[x], nbr[z]) && strict_subset(nbr[z], nbr[y]))
    };
    let mut edges = Vec::new();
    for (x, y) in square.edges() {
        if x == y {
            continue;
        }
        let dispensable = (0..g.n()).any(|z| dominated(x, y, z) && dominated(y, x, z));
        if !dispensable {
            edges.push((x, y));
        }
    }
    Graph::from_edges(g.n(), &edges).expect("skeleton keeps the vertex set")
}

/// The two skeleton components of a connected sorted graph, restricted to
/// the left and right parts respectively (they coincide with the parts).
pub fn skeleton_components(g: &Graph) -> Result<(Graph, Graph)> {
    let sorts = g.sorts().ok_or(Error::NotBipartite)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let skel = cartesian_skeleton(g);
    let left: Vec<usize> = (0..g.n()).filter(|&v| sorts[v] == Sort::L).collect();
    let right: Vec<usize> = (0..g.n()).filter(|&v| sorts[v] == Sort::R).collect();
    // The parts really are unions of skeleton components.
    for (u, v) in skel.edges() {
        if sorts[u] != sorts[v] {
            return Err(Error::InvalidSorts {
                reason: "skeleton edge crosses the bipartition".into(),
            });
        }
    }
    Ok((
        skel.induced_subgraph(&left)?.strip_sorts(),
        skel.induced_subgraph(&right)?.strip_sorts(),
    ))
}

/// Trims every equal-neighborhood class down to a residual of its size:
/// the lowest-indexed `((size - 1) mod p) + 1` vertices stay, the rest are
/// removed, so the removal count is always a multiple of p and no class
/// vanishes. When no class size is divisible by p (the case this is used
/// in) the residual is exactly `size mod p`.
pub fn local_reduce(g: &Graph, p: Prime) -> Graph {
    let p = p.get() as usize;
    let mut keep = Vec::new();
    for block in g.r_classes().blocks() {
        let residual = (block.len() - 1) % p + 1;
        keep.extend(block.iter().take(residual));
    }
    keep.sort_unstable();
    g.induced_subgraph(&keep).expect("kept vertices are in range")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductKind {
    Direct,
    Cartesian,
    Diamond,
}

/// Prime factorization plus the relabeling that reassembles the input:
/// `witness[v]` is the input vertex carrying product vertex `v`, where the
/// product folds the factors left to right.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub kind: ProductKind,
    pub factors: Vec<Graph>,
    pub witness: Vec<usize>,
}

impl Factorization {
    /// Left fold of the factors under this factorization's product.
    pub fn product(&self) -> Result<Graph> {
        let mut iter = self.factors.iter();
        let first = iter.next().ok_or_else(|| Error::InvalidDecomposition {
            reason: "factorization has no factors".into(),
        })?;
        let mut acc = first.clone();
        for f in iter {
            acc = match self.kind {
                ProductKind::Direct => direct_product(&acc, f),
                ProductKind::Cartesian => cartesian_product(&acc, f),
                ProductKind::Diamond => diamond_product(&acc, f)?,
            };
        }
        Ok(acc)
    }

    /// True when relabeling the reassembled product by the witness
    /// reproduces `g` exactly.
    pub fn reassembles(&self, g: &Graph) -> bool {
        match self.product() {
            Ok(prod) => match prod.relabel(&self.witness) {
                Ok(relabeled) => {
                    relabeled.n() == g.n()
                        && relabeled.edges() == g.edges()
                        && match (relabeled.sorts(), g.sorts()) {
                            (None, _) => true,
                            (Some(a), Some(b)) => a == b,
                            (Some(_), None) => false,
                        }
                }
                Err(_) => false,
            },
            Err(_) => false,
        }
    }
}

fn canonical_factor_order(factors: &mut Vec<Graph>) {
    factors.sort_by_cached_key(|f| (f.n(), f.edge_count(), iso::canonical_form(f)));
}

/// Subsets of `0..n` of size `k` that contain 0, as sorted vertex lists.
fn anchored_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize];
    fn rec(n: usize, k: usize, next: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in next..n {
            if n - v < k - cur.len() {
                break;
            }
            cur.push(v);
            rec(n, k, v + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 1, &mut cur, &mut out);
    out
}

fn degree_multiset(g: &Graph) -> Vec<usize> {
    let mut d: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    d.sort_unstable();
    d
}

/// One nontrivial Cartesian split g = A box B, if any. Candidate layers
/// are induced subgraphs through vertex 0, verified by isomorphism.
fn cartesian_split(g: &Graph) -> Option<(Graph, Graph)> {
    let n = g.n();
    let degs = degree_multiset(g);
    for na in 2..=n / 2 {
        if n % na != 0 {
            continue;
        }
        let nb = n / na;
        for sa in anchored_subsets(n, na) {
            let a = g.induced_subgraph(&sa).unwrap().strip_sorts();
            if !a.is_connected() || a.edge_count() * nb > g.edge_count() {
                continue;
            }
            for sb in anchored_subsets(n, nb) {
                let b = g.induced_subgraph(&sb).unwrap().strip_sorts();
                if !b.is_connected()
                    || a.edge_count() * nb + b.edge_count() * na != g.edge_count()
                {
                    continue;
                }
                let prod = cartesian_product(&a, &b);
                if degree_multiset(&prod) != degs {
                    continue;
                }
                if iso::find_isomorphism(&prod, &g.clone().strip_sorts()).is_some() {
                    return Some((a, b));
                }
            }
        }
    }
    None
}

/// Prime factorization under the Cartesian product (unit: the single
/// vertex). Connected input, at most 12 vertices.
pub fn cartesian_prime_factorization(g: &Graph) -> Result<Factorization> {
    if g.n() > 12 {
        return Err(Error::TooManyVertices { n: g.n(), max: 12 });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut factors = Vec::new();
    let mut stack = vec![g.clone().strip_sorts()];
    while let Some(cur) = stack.pop() {
        match cartesian_split(&cur) {
            Some((a, b)) => {
                stack.push(a);
                stack.push(b);
            }
            None => factors.push(cur),
        }
    }
    canonical_factor_order(&mut factors);
    let f = Factorization { kind: ProductKind::Cartesian, factors, witness: Vec::new() };
    finish_witness(f, g)
}

fn finish_witness(mut f: Factorization, g: &Graph) -> Result<Factorization> {
    let prod = f.product()?;
    let target = if f.kind == ProductKind::Cartesian { g.clone().strip_sorts() } else { g.clone() };
    let witness =
        iso::find_isomorphism(&prod, &target).ok_or_else(|| Error::InvalidDecomposition {
            reason: "verified factors no longer reassemble the input".into(),
        })?;
    f.witness = witness;
    Ok(f)
}

/// All sorted bipartite graphs with `l` left and `r` right vertices
/// (left block first), filtered to connected ones.
fn sorted_candidates(l: usize, r: usize) -> Vec<Graph> {
    let mut out = Vec::new();
    let pairs: Vec<(usize, usize)> =
        (0..l).flat_map(|i| (0..r).map(move |j| (i, l + j))).collect();
    for mask in 0u64..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|&(t, _)| mask >> t & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let sorts: Vec<Sort> =
            (0..l + r).map(|v| if v < l { Sort::L } else { Sort::R }).collect();
        let g = Graph::from_edges(l + r, &edges)
            .and_then(|g| g.with_sorts(sorts))
            .expect("cross pairs respect the sorts");
        if g.is_connected() {
            out.push(g);
        }
    }
    out
}

/// All graphs on n vertices with loops allowed, filtered by a predicate.
fn loopy_candidates(n: usize, keep: impl Fn(&Graph) -> bool) -> Vec<Graph> {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i..n {
            pairs.push((i, j));
        }
    }
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|&(t, _)| mask >> t & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = Graph::from_edges(n, &edges).expect("pair indices are in range");
        if keep(&g) {
            out.push(g);
        }
    }
    out
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Whether this graph is a diamond unit: a single sorted edge or a single
/// looped vertex.
fn is_diamond_unit(g: &Graph) -> bool {
    (g.n() == 2 && g.edge_count() == 1 && g.has_edge(0, 1))
        || (g.n() == 1 && g.has_loop(0))
}

fn try_pairs(g: &Graph, hs: &[Graph], ks: &[Graph]) -> Option<(Graph, Graph)> {
    let degs = degree_multiset(g);
    for h in hs {
        for k in ks {
            let Ok(prod) = diamond_product(h, k) else { continue };
            if prod.edge_count() != g.edge_count() || degree_multiset(&prod) != degs {
                continue;
            }
            if iso::find_isomorphism(&prod, g).is_some() {
                return Some((h.clone(), k.clone()));
            }
        }
    }
    None
}

/// One nontrivial diamond split of a connected graph, if any.
fn diamond_split(g: &Graph) -> Option<(Graph, Graph)> {
    if g.n() < 2 {
        return None;
    }
    if let Some(sorts) = g.sorts() {
        let l = sorts.iter().filter(|&&s| s == Sort::L).count();
        let r = g.n() - l;
        if l == 0 || r == 0 {
            return None;
        }
        // Two sorted factors: part sizes multiply coordinatewise.
        for &lh in &divisors(l) {
            for &rh in &divisors(r) {
                let (lk, rk) = (l / lh, r / rh);
                if (lh, rh) == (1, 1) || (lk, rk) == (1, 1) {
                    continue;
                }
                let hs = sorted_candidates(lh, rh);
                let ks = sorted_candidates(lk, rk);
                if let Some(split) = try_pairs(g, &hs, &ks) {
                    return Some(split);
                }
            }
        }
        // A non-bipartite factor against a sorted one: the non-bipartite
        // vertex count divides both part sizes.
        for &m in &divisors(l) {
            if m < 2 || r % m != 0 {
                continue;
            }
            let (lk, rk) = (l / m, r / m);
            if (lk, rk) == (1, 1) {
                continue;
            }
            let hs = loopy_candidates(m, |h| h.is_connected() && !is_bipartite(h));
            let ks = sorted_candidates(lk, rk);
            if let Some(split) = try_pairs(g, &hs, &ks) {
                return Some(split);
            }
        }
        None
    } else {
        // Non-bipartite target: both factors non-bipartite.
        for &m in &divisors(g.n()) {
            if m < 2 || m > g.n() / 2 {
                continue;
            }
            let hs = loopy_candidates(m, |h| h.is_connected() && !is_bipartite(h));
            let ks = loopy_candidates(g.n() / m, |k| k.is_connected() && !is_bipartite(k));
            if let Some(split) = try_pairs(g, &hs, &ks) {
                return Some(split);
            }
        }
        None
    }
}

/// Prime factorization under the diamond product. Units (a single sorted
/// edge, a single looped vertex) never appear as factors; a prime input
/// factors as itself. Connected input, at most 10 vertices; a bipartite
/// input must carry sorts.
pub fn diamond_prime_factorization(g: &Graph) -> Result<Factorization> {
    if g.n() > 10 {
        return Err(Error::TooManyVertices { n: g.n(), max: 10 });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if is_bipartite(g) && !g.is_sorted() {
        return Err(Error::InvalidSorts {
            reason: "bipartite factorization target must carry sorts".into(),
        });
    }
    let mut factors = Vec::new();
    let mut stack = vec![g.clone()];
    while let Some(cur) = stack.pop() {
        match diamond_split(&cur) {
            Some((a, b)) if !is_diamond_unit(&a) && !is_diamond_unit(&b) => {
                stack.push(a);
                stack.push(b);
            }
            _ => factors.push(cur),
        }
    }
    canonical_factor_order(&mut factors);
    let f = Factorization { kind: ProductKind::Diamond, factors, witness: Vec::new() };
    finish_witness(f, g)
}
