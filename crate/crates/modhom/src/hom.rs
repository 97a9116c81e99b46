//! Homomorphism counting by backtracking.
//!
//! The counter visits the vertices of `g` in BFS order from a maximum-degree
//! root per connected component, keeping for every unassigned vertex the
//! bitmask of still-feasible images; assigning `v -> w` intersects each
//! unassigned neighbor's mask with the neighborhood of `w`. Exact counts use
//! arbitrary-precision integers; modular counts reduce eagerly. Pins seed
//! the masks (a pinned vertex has a singleton mask), set-valued pins seed a
//! subset mask, and sorted pairs restrict images to equal sorts.
//!
//! Empty `g` has exactly one homomorphism anywhere, the empty map.
//!
//! With the `parallel` feature the branch set at each component root is
//! evaluated concurrently; `count_hom_sequential` always runs the fallback
//! path so the two can be compared in one build.

use crate::error::{Error, Result};
use crate::exec;
use crate::graph::{bits, Graph, PinnedGraph, Sort};
use crate::modp::{Prime, Residue};
use crate::products;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::collections::BTreeSet;

pub type HomCount = BigUint;

/// Number system the backtracking counts in.
pub(crate) trait Counting: Sync {
    type Value: Clone + Send + std::iter::Sum<Self::Value>;
    fn zero(&self) -> Self::Value;
    fn one(&self) -> Self::Value;
    fn from_u64(&self, x: u64) -> Self::Value;
    fn mul(&self, a: Self::Value, b: &Self::Value) -> Self::Value;
    /// Re-normalizes after a raw `Sum` fold.
    fn reduce(&self, a: Self::Value) -> Self::Value;
    fn is_zero(&self, a: &Self::Value) -> bool;
}

pub(crate) struct Exact;

impl Counting for Exact {
    type Value = BigUint;
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one()
    }
    fn from_u64(&self, x: u64) -> BigUint {
        BigUint::from(x)
    }
    fn mul(&self, a: BigUint, b: &BigUint) -> BigUint {
        a * b
    }
    fn reduce(&self, a: BigUint) -> BigUint {
        a
    }
    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }
}

/// Counts in Z/p as raw u64 kept below p. Branch sums stay far from
/// overflow because a branch set has at most 64 elements.
pub(crate) struct Modular(pub u64);

impl Counting for Modular {
    type Value = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_u64(&self, x: u64) -> u64 {
        x % self.0
    }
    fn mul(&self, a: u64, b: &u64) -> u64 {
        ((a as u128 * *b as u128) % self.0 as u128) as u64
    }
    fn reduce(&self, a: u64) -> u64 {
        a % self.0
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

/// Per-vertex base masks from sorts and pins; `None` marks an infeasible pin
/// combination (conflicting pins on one vertex stay representable as an
/// empty mask, which simply counts zero).
fn base_masks(
    g: &Graph,
    h: &Graph,
    g_pins: &[usize],
    h_pins: &[usize],
) -> Result<Vec<u64>> {
    if g.is_sorted() != h.is_sorted() {
        return Err(Error::SortMismatch);
    }
    if g_pins.len() != h_pins.len() {
        return Err(Error::PinArityMismatch { left: g_pins.len(), right: h_pins.len() });
    }
    let full: u64 = if h.n() == 64 { u64::MAX } else { (1u64 << h.n()) - 1 };
    let h_loops: u64 = (0..h.n()).filter(|&w| h.has_loop(w)).fold(0, |m, w| m | 1 << w);
    let mut masks = vec![full; g.n()];
    if let (Some(sg), Some(sh)) = (g.sorts(), h.sorts()) {
        let l_mask: u64 = (0..h.n()).filter(|&w| sh[w] == Sort::L).fold(0, |m, w| m | 1 << w);
        for v in 0..g.n() {
            masks[v] = if sg[v] == Sort::L { l_mask } else { full & !l_mask };
        }
    }
    for v in 0..g.n() {
        if g.has_loop(v) {
            masks[v] &= h_loops;
        }
    }
    for (&x, &a) in g_pins.iter().zip(h_pins) {
        masks[v_checked(g, x)?] &= 1 << v_checked(h, a)?;
    }
    Ok(masks)
}

fn v_checked(g: &Graph, v: usize) -> Result<usize> {
    if v < g.n() {
        Ok(v)
    } else {
        Err(Error::VertexOutOfRange { vertex: v, n: g.n() })
    }
}

/// BFS order of one component from its maximum-degree vertex (ties toward
/// the lowest index).
fn component_order(g: &Graph, comp: &[usize]) -> Vec<usize> {
    let root = *comp
        .iter()
        .max_by_key(|&&v| (g.degree(v), std::cmp::Reverse(v)))
        .expect("components are nonempty");
    let mut order = vec![root];
    let mut seen = 1u64 << root;
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for w in bits(g.neighbors(u)) {
            if seen >> w & 1 == 0 {
                seen |= 1 << w;
                order.push(w);
            }
        }
    }
    order
}

struct Search<'a, C: Counting> {
    ct: &'a C,
    g: &'a Graph,
    h: &'a Graph,
    injective: bool,
}

impl<'a, C: Counting> Search<'a, C> {
    /// Counts extensions along `order[idx..]`; `cand` holds current feasible
    /// masks, `used` the injectively taken images.
    fn descend(&self, order: &[usize], idx: usize, cand: &mut Vec<u64>, used: u64) -> C::Value {
        let v = order[idx];
        let avail = if self.injective { cand[v] & !used } else { cand[v] };
        if idx + 1 == order.len() {
            return self.ct.from_u64(avail.count_ones() as u64);
        }
        let mut total = self.ct.zero();
        for w in bits(avail) {
            let mut undo: Vec<(usize, u64)> = Vec::new();
            for u in bits(self.g.neighbors(v)) {
                if order[idx + 1..].contains(&u) {
                    undo.push((u, cand[u]));
                    cand[u] &= self.h.neighbors(w);
                }
            }
            let branch = self.descend(order, idx + 1, cand, used | 1 << w);
            total = self.ct.reduce([total, branch].into_iter().sum());
            for (u, m) in undo {
                cand[u] = m;
            }
        }
        total
    }

    /// Branches of `order[0]` fan out in parallel (feature-gated).
    fn run(&self, order: &[usize], cand: &Vec<u64>, used: u64, parallel: bool) -> C::Value {
        if order.is_empty() {
            return self.ct.one();
        }
        let v = order[0];
        let avail = if self.injective { cand[v] & !used } else { cand[v] };
        if order.len() == 1 {
            return self.ct.from_u64(avail.count_ones() as u64);
        }
        let branches: Vec<usize> = bits(avail).collect();
        let eval = |w: usize| {
            let mut local = cand.clone();
            local[v] = 1 << w;
            for u in bits(self.g.neighbors(v)) {
                if order[1..].contains(&u) {
                    local[u] &= self.h.neighbors(w);
                }
            }
            self.descend(order, 1, &mut local, used | 1 << w)
        };
        let total = if parallel {
            exec::sum_over(branches, eval)
        } else {
            exec::sum_over_seq(branches, eval)
        };
        self.ct.reduce(total)
    }
}

fn count_core<C: Counting>(
    ct: &C,
    g: &Graph,
    h: &Graph,
    base: Vec<u64>,
    injective: bool,
    parallel: bool,
) -> C::Value {
    let search = Search { ct, g, h, injective };
    if injective {
        // Components share the used-set, so injective counting runs as one
        // backtracking pass over the concatenated component orders.
        let order: Vec<usize> = g
            .connected_components()
            .iter()
            .flat_map(|c| component_order(g, c))
            .collect();
        return search.run(&order, &base, 0, parallel);
    }
    let mut total = ct.one();
    for comp in g.connected_components() {
        let order = component_order(g, &comp);
        let part = search.run(&order, &base, 0, parallel);
        if ct.is_zero(&part) {
            return ct.zero();
        }
        total = ct.mul(total, &part);
    }
    total
}

/// hom(g, h): all edge-preserving maps; sort-preserving when both carry
/// sorts, rejected when exactly one does.
pub fn count_hom(g: &Graph, h: &Graph) -> Result<HomCount> {
    let base = base_masks(g, h, &[], &[])?;
    Ok(count_core(&Exact, g, h, base, false, true))
}

/// The always-sequential twin of `count_hom` (used as the bench baseline).
pub fn count_hom_sequential(g: &Graph, h: &Graph) -> Result<HomCount> {
    let base = base_masks(g, h, &[], &[])?;
    Ok(count_core(&Exact, g, h, base, false, false))
}

/// hom(g, h) mod p with eager reduction.
pub fn count_hom_mod(g: &Graph, h: &Graph, p: Prime) -> Result<Residue> {
    let base = base_masks(g, h, &[], &[])?;
    Ok(Residue::new(count_core(&Modular(p.get()), g, h, base, false, true), p))
}

/// hom((g, x⃗), (h, a⃗)) with pins paired by position.
pub fn count_hom_pinned(g: &PinnedGraph, h: &PinnedGraph) -> Result<HomCount> {
    let base = base_masks(&g.graph, &h.graph, g.pins(), h.pins())?;
    Ok(count_core(&Exact, &g.graph, &h.graph, base, false, true))
}

pub fn count_hom_pinned_mod(g: &PinnedGraph, h: &PinnedGraph, p: Prime) -> Result<Residue> {
    let base = base_masks(&g.graph, &h.graph, g.pins(), h.pins())?;
    Ok(Residue::new(
        count_core(&Modular(p.get()), &g.graph, &h.graph, base, false, true),
        p,
    ))
}

/// hom((g, x⃗), (h, B_1..B_k)) = sum over all b⃗ with b_i in B_i. A vertex
/// pinned twice sums over the intersection, matching the tuple-sum reading.
pub fn count_hom_pinned_set(
    g: &PinnedGraph,
    h: &Graph,
    targets: &[BTreeSet<usize>],
) -> Result<HomCount> {
    let base = set_masks(g, h, targets)?;
    Ok(count_core(&Exact, &g.graph, h, base, false, true))
}

pub fn count_hom_pinned_set_mod(
    g: &PinnedGraph,
    h: &Graph,
    targets: &[BTreeSet<usize>],
    p: Prime,
) -> Result<Residue> {
    let base = set_masks(g, h, targets)?;
    Ok(Residue::new(count_core(&Modular(p.get()), &g.graph, h, base, false, true), p))
}

fn set_masks(g: &PinnedGraph, h: &Graph, targets: &[BTreeSet<usize>]) -> Result<Vec<u64>> {
    if g.arity() != targets.len() {
        return Err(Error::PinArityMismatch { left: g.arity(), right: targets.len() });
    }
    let mut base = base_masks(&g.graph, h, &[], &[])?;
    for (&x, set) in g.pins().iter().zip(targets) {
        let mut mask = 0u64;
        for &a in set {
            v_checked(h, a)?;
            mask |= 1 << a;
        }
        base[x] &= mask;
    }
    Ok(base)
}

/// inj((g, x⃗), (h, a⃗)): injective homomorphisms. Pin tuples with different
/// equality types admit none, which falls out of the image conflict.
pub fn count_inj(g: &PinnedGraph, h: &PinnedGraph) -> Result<HomCount> {
    let base = base_masks(&g.graph, &h.graph, g.pins(), h.pins())?;
    if g.graph.n() > h.graph.n() {
        return Ok(BigUint::zero());
    }
    // Distinct pinned vertices sharing an image can never extend injectively.
    for (i, &x) in g.pins().iter().enumerate() {
        for (j, &y) in g.pins().iter().enumerate().skip(i + 1) {
            if x != y && h.pins()[i] == h.pins()[j] {
                return Ok(BigUint::zero());
            }
        }
    }
    Ok(count_core(&Exact, &g.graph, &h.graph, base, true, true))
}

/// Enumerates every homomorphism g -> h, invoking the callback with the
/// image vector indexed by g-vertex. Sequential; intended for small cases
/// (endomorphism tables, verification sweeps).
pub fn for_each_hom(g: &Graph, h: &Graph, mut f: impl FnMut(&[usize])) -> Result<()> {
    let base = base_masks(g, h, &[], &[])?;
    let order: Vec<usize> = g
        .connected_components()
        .iter()
        .flat_map(|c| component_order(g, c))
        .collect();
    let mut image = vec![0usize; g.n()];
    fn rec(
        g: &Graph,
        h: &Graph,
        order: &[usize],
        idx: usize,
        cand: &mut Vec<u64>,
        image: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if idx == order.len() {
            f(image);
            return;
        }
        let v = order[idx];
        for w in bits(cand[v]) {
            let mut undo: Vec<(usize, u64)> = Vec::new();
            for u in bits(g.neighbors(v)) {
                if order[idx + 1..].contains(&u) {
                    undo.push((u, cand[u]));
                    cand[u] &= h.neighbors(w);
                }
            }
            image[v] = w;
            rec(g, h, order, idx + 1, cand, image, f);
            for (u, m) in undo {
                cand[u] = m;
            }
        }
    }
    let mut cand = base;
    rec(g, h, &order, 0, &mut cand, &mut image, &mut f);
    Ok(())
}

/// Gluing a ⊙ b: disjoint union with the pin tuples identified pointwise.
/// Requires equal equality types so the identification is well defined;
/// the result keeps a's pins.
pub fn glue_odot(a: &PinnedGraph, b: &PinnedGraph) -> Result<PinnedGraph> {
    if a.equality_type() != b.equality_type() {
        return Err(Error::EqualityTypeMismatch);
    }
    if a.graph.is_sorted() != b.graph.is_sorted() {
        return Err(Error::SortMismatch);
    }
    if let (Some(sa), Some(sb)) = (a.graph.sorts(), b.graph.sorts()) {
        for (&x, &y) in a.pins().iter().zip(b.pins()) {
            if sa[x] != sb[y] {
                return Err(Error::InvalidSorts {
                    reason: "identified pins carry different sorts".into(),
                });
            }
        }
    }
    let na = a.graph.n();
    // Map b-vertices: pinned ones onto a's pins, the rest onto fresh indices.
    let mut map_b = vec![usize::MAX; b.graph.n()];
    for (&x, &y) in a.pins().iter().zip(b.pins()) {
        map_b[y] = x;
    }
    let mut next = na;
    for v in 0..b.graph.n() {
        if map_b[v] == usize::MAX {
            map_b[v] = next;
            next += 1;
        }
    }
    let mut edges = a.graph.edges();
    for (u, v) in b.graph.edges() {
        edges.push((map_b[u], map_b[v]));
    }
    let mut g = Graph::from_edges(next, &edges)?;
    if let (Some(sa), Some(sb)) = (a.graph.sorts(), b.graph.sorts()) {
        let mut sorts = vec![Sort::L; next];
        sorts[..na].copy_from_slice(sa);
        for v in 0..b.graph.n() {
            sorts[map_b[v]] = sb[v];
        }
        g = g.with_sorts(sorts)?;
    }
    PinnedGraph::new(g, a.pins().to_vec())
}

/// Pinned direct product (a, x⃗) × (b, y⃗) with pins paired coordinatewise.
/// For sorted factors the product lives on same-sort pairs, so each pinned
/// pair must agree in sort.
pub fn product_pinned(a: &PinnedGraph, b: &PinnedGraph) -> Result<PinnedGraph> {
    if a.arity() != b.arity() {
        return Err(Error::PinArityMismatch { left: a.arity(), right: b.arity() });
    }
    if a.graph.is_sorted() != b.graph.is_sorted() {
        return Err(Error::SortMismatch);
    }
    let (prod, labels) = products::paired_product(&a.graph, &b.graph)?;
    let locate = |pair: (usize, usize)| -> Result<usize> {
        labels.iter().position(|&q| q == pair).ok_or_else(|| Error::InvalidSorts {
            reason: format!("pinned pair {pair:?} has mixed sorts"),
        })
    };
    let pins = a
        .pins()
        .iter()
        .zip(b.pins())
        .map(|(&x, &y)| locate((x, y)))
        .collect::<Result<Vec<usize>>>()?;
    PinnedGraph::new(prod, pins)
}
