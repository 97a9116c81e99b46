//! The tractability frontier for counting homomorphisms into a fixed
//! target modulo p, and the reduction from independent-set counting that
//! witnesses the hard side.
//!
//! A target is easy exactly when every component of its p-reduced form is
//! an isolated vertex, a clique with all loops, or a complete bipartite
//! graph; `count_tractable` realizes the easy side by a closed product
//! formula. Anything else contains a "thick Z": four nonempty sets
//! A, C on the left and B, D on the right where A-B, C-B, C-D are complete
//! and A-D is empty. Attaching per-vertex gadgets whose extension counts
//! vanish off A∪C (resp. B∪D) turns homomorphism counting into the
//! two-parameter independent-set sum Z_{α,β}, and `verify_reduction`
//! checks the resulting congruence by brute force.

use crate::error::{Error, Result};
use crate::graph::{bits, structural_class, Graph, PinnedGraph, Sort, StructuralClass};
use crate::hom::{self, HomCount};
use crate::iso;
use crate::json::GraphDoc;
use crate::modp::{Prime, Residue};
use crate::reduction;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Vertex budget for the exhaustive thick-Z fallback.
pub const THICK_Z_CAP: usize = 10;
/// Vertex budget for the independent-set sum.
pub const ZBIS_CAP: usize = 20;
/// Vertex budget for the bucket-level reduction check.
pub const DEBUG_CAP: usize = 5;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Tractable,
    Hard,
}

/// One component of the reduced target together with its shape.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ComponentClass {
    pub vertices: Vec<usize>,
    pub class: StructuralClass,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierWitness {
    /// Every component classified, in component order.
    Tractable { components: Vec<ComponentClass> },
    /// The first component outside the three easy shapes.
    Hard { component: ComponentClass },
}

#[derive(Clone, Debug)]
pub struct ClassifierVerdict {
    pub reduced_target: Graph,
    pub verdict: Verdict,
    pub witness: ClassifierWitness,
}

/// Classifies a target by reducing it and checking each component's
/// shape. The verdict of the raw target is defined as the verdict of its
/// reduced form, since the two have the same counts mod p against every
/// source.
pub fn classify(h: &Graph, p: Prime) -> ClassifierVerdict {
    let reduced = reduction::p_reduce(h, p);
    let mut components = Vec::new();
    for vertices in reduced.connected_components() {
        let sub = reduced.induced_subgraph(&vertices).expect("component vertices are in range");
        let class = structural_class(&sub).expect("components are connected");
        if class == StructuralClass::ReflexiveClique {
            // A reflexive clique on p or more vertices has an order-p
            // automorphism (any p-cycle), so it cannot survive reduction.
            assert!(
                (sub.n() as u64) < p.get(),
                "reduced form kept a reflexive clique on {} vertices at p = {}",
                sub.n(),
                p.get()
            );
        }
        components.push(ComponentClass { vertices, class });
    }
    match components.iter().find(|c| c.class == StructuralClass::Other) {
        Some(bad) => ClassifierVerdict {
            reduced_target: reduced,
            verdict: Verdict::Hard,
            witness: ClassifierWitness::Hard { component: bad.clone() },
        },
        None => ClassifierVerdict {
            reduced_target: reduced,
            verdict: Verdict::Tractable,
            witness: ClassifierWitness::Tractable { components },
        },
    }
}

enum Shape {
    Isolated,
    Reflexive(usize),
    Bipartite(usize, usize),
}

/// Exact homomorphism count into a target whose components are all
/// isolated vertices, reflexive cliques, or complete bipartite graphs.
/// Polynomial time: the count is a product over source components of a
/// sum over target components, where a reflexive q-clique absorbs any
/// component as q^(vertices), a complete bipartite K_{a,b} takes a
/// loop-free bipartite component with part sizes (l, r) in two
/// orientations as a^l b^r + a^r b^l, and an isolated vertex takes only a
/// single loopless vertex. Sorts are ignored; counts are over plain
/// graphs.
pub fn count_tractable(g: &Graph, h: &Graph) -> Result<HomCount> {
    let mut shapes = Vec::new();
    for comp in h.connected_components() {
        let sub = h.induced_subgraph(&comp)?;
        match structural_class(&sub)? {
            StructuralClass::IsolatedVertex => shapes.push(Shape::Isolated),
            StructuralClass::ReflexiveClique => shapes.push(Shape::Reflexive(sub.n())),
            StructuralClass::CompleteBipartite => {
                let sides = sub.bipartition().expect("shape is bipartite");
                let a = sides.iter().filter(|&&s| s == Sort::L).count();
                shapes.push(Shape::Bipartite(a, sub.n() - a));
            }
            StructuralClass::Other => {
                return Err(Error::InvalidInput(format!(
                    "target component {comp:?} is outside the tractable shapes"
                )));
            }
        }
    }
    let mut total = HomCount::from(1u32);
    for comp in g.connected_components() {
        let sub = g.induced_subgraph(&comp)?;
        let n = sub.n() as u32;
        let parts = if sub.has_loops() {
            None
        } else {
            sub.bipartition()
                .map(|sides| sides.iter().filter(|&&s| s == Sort::L).count() as u32)
        };
        let mut sum = HomCount::from(0u32);
        for shape in &shapes {
            sum += match shape {
                Shape::Isolated => {
                    HomCount::from(u32::from(n == 1 && !sub.has_loop(0)))
                }
                Shape::Reflexive(q) => HomCount::from(*q).pow(n),
                Shape::Bipartite(a, b) => match parts {
                    None => HomCount::from(0u32),
                    Some(l) => {
                        let r = n - l;
                        HomCount::from(*a).pow(l) * HomCount::from(*b).pow(r)
                            + HomCount::from(*a).pow(r) * HomCount::from(*b).pow(l)
                    }
                },
            };
        }
        total *= sum;
    }
    Ok(total)
}

/// Four nonempty disjoint vertex sets forming the Z shape: A, C on the
/// left, B, D on the right, with A-B, C-B, C-D complete and A-D empty.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ThickZ {
    pub a: BTreeSet<usize>,
    pub b: BTreeSet<usize>,
    pub c: BTreeSet<usize>,
    pub d: BTreeSet<usize>,
}

fn complete_between(h: &Graph, xs: &BTreeSet<usize>, ys: &BTreeSet<usize>) -> bool {
    xs.iter().all(|&x| ys.iter().all(|&y| h.has_edge(x, y)))
}

fn empty_between(h: &Graph, xs: &BTreeSet<usize>, ys: &BTreeSet<usize>) -> bool {
    xs.iter().all(|&x| ys.iter().all(|&y| !h.has_edge(x, y)))
}

impl ThickZ {
    /// Checks the defining shape predicates against a sorted target.
    pub fn validate(&self, h: &Graph) -> Result<()> {
        let sorts = h.sorts().ok_or(Error::NotBipartite)?;
        let fail = |reason: String| Err(Error::InvalidDecomposition { reason });
        for (name, set, side) in [
            ("A", &self.a, Sort::L),
            ("B", &self.b, Sort::R),
            ("C", &self.c, Sort::L),
            ("D", &self.d, Sort::R),
        ] {
            if set.is_empty() {
                return fail(format!("part {name} is empty"));
            }
            for &v in set.iter() {
                if v >= h.n() {
                    return Err(Error::VertexOutOfRange { vertex: v, n: h.n() });
                }
                if sorts[v] != side {
                    return fail(format!("vertex {v} of part {name} is on the wrong side"));
                }
            }
        }
        if !self.a.is_disjoint(&self.c) {
            return fail("A and C overlap".into());
        }
        if !self.b.is_disjoint(&self.d) {
            return fail("B and D overlap".into());
        }
        for (pair, xs, ys) in [
            ("A-B", &self.a, &self.b),
            ("C-B", &self.c, &self.b),
            ("C-D", &self.c, &self.d),
        ] {
            if !complete_between(h, xs, ys) {
                return fail(format!("{pair} is not complete"));
            }
        }
        if !empty_between(h, &self.a, &self.d) {
            return fail("A-D has an edge".into());
        }
        Ok(())
    }
}

fn is_complete_bipartite_sorted(h: &Graph) -> bool {
    let left = h.sort_members(Sort::L);
    let right = h.sort_members(Sort::R);
    left.iter().all(|&u| right.iter().all(|&v| h.has_edge(u, v)))
}

/// One shrink step: find v, w on the same side whose neighborhoods
/// properly straddle (∅ ≠ N(v)∩N(w) ≠ N(v)), and restrict to
/// N(v) ∪ N(N(v)). Keeps the graph connected and not complete bipartite.
/// Returns the smallest strict restriction over all such pairs.
fn descend(h: &Graph) -> Option<Vec<usize>> {
    let sorts = h.sorts().expect("descent runs on sorted graphs");
    let mut best: Option<u64> = None;
    for v in 0..h.n() {
        for w in 0..h.n() {
            if w == v || sorts[w] != sorts[v] {
                continue;
            }
            let nv = h.neighbors(v);
            let inter = nv & h.neighbors(w);
            if inter == 0 || inter == nv {
                continue;
            }
            let mut second = 0u64;
            for r in bits(nv) {
                second |= h.neighbors(r);
            }
            let keep = nv | second;
            if (keep.count_ones() as usize) < h.n()
                && best.is_none_or(|b| keep.count_ones() < b.count_ones())
            {
                best = Some(keep);
            }
        }
    }
    best.map(|mask| bits(mask).collect())
}

/// First thick Z in a fixed scan order: A and C over disjoint nonempty
/// left subsets, B and D over right subsets, ascending as bitmasks.
fn exhaustive_thick_z(h: &Graph) -> Option<ThickZ> {
    let left = h.sort_members(Sort::L);
    let right = h.sort_members(Sort::R);
    let pick = |base: &[usize], sel: u32| -> BTreeSet<usize> {
        base.iter().enumerate().filter(|(i, _)| sel >> i & 1 == 1).map(|(_, &v)| v).collect()
    };
    for a_sel in 1..1u32 << left.len() {
        let a = pick(&left, a_sel);
        for c_sel in 1..1u32 << left.len() {
            if a_sel & c_sel != 0 {
                continue;
            }
            let c = pick(&left, c_sel);
            for b_sel in 1..1u32 << right.len() {
                let b = pick(&right, b_sel);
                if !complete_between(h, &a, &b) || !complete_between(h, &c, &b) {
                    continue;
                }
                for d_sel in 1..1u32 << right.len() {
                    if b_sel & d_sel != 0 {
                        continue;
                    }
                    let d = pick(&right, d_sel);
                    if complete_between(h, &c, &d) && empty_between(h, &a, &d) {
                        return Some(ThickZ { a, b, c, d });
                    }
                }
            }
        }
    }
    None
}

/// Finds a thick Z in a connected sorted target, or reports definitively
/// that none exists (exactly the complete bipartite case). Large targets
/// are shrunk by `descend` until the exhaustive scan applies; if no shrink
/// step exists above the cap the search gives up explicitly.
pub fn find_thick_z(h: &Graph) -> Result<Option<ThickZ>> {
    if !h.is_sorted() {
        return Err(Error::NotBipartite);
    }
    if !h.is_connected() {
        return Err(Error::Disconnected);
    }
    if is_complete_bipartite_sorted(h) {
        return Ok(None);
    }
    let mut keep: Vec<usize> = (0..h.n()).collect();
    let mut cur = h.clone();
    while cur.n() > THICK_Z_CAP {
        let Some(local) = descend(&cur) else {
            return Err(Error::SearchExhausted {
                context: format!(
                    "no neighborhood-straddling shrink step on {} vertices (cap {})",
                    cur.n(),
                    THICK_Z_CAP
                ),
            });
        };
        keep = local.iter().map(|&i| keep[i]).collect();
        cur = cur.induced_subgraph(&local)?;
    }
    // A connected non-complete sorted graph always contains a singleton Z
    // along a shortest path between a nonadjacent cross pair, so the scan
    // cannot miss.
    let z = exhaustive_thick_z(&cur).expect("non-complete graphs contain a thick Z");
    let back = |set: BTreeSet<usize>| set.into_iter().map(|i| keep[i]).collect();
    Ok(Some(ThickZ { a: back(z.a), b: back(z.b), c: back(z.c), d: back(z.d) }))
}

/// A thick Z together with the per-side gadgets and their extension sums.
/// `alpha1`/`alpha2` are the left gadget's sums over A and C; `beta1`/
/// `beta2` are the right gadget's sums over D and B. The ends of the Z
/// (A and D) carry the index-1 parameters because those are the sets
/// whose joint preimages form independent sets.
#[derive(Clone, Debug)]
pub struct ZDecomposition {
    pub parts: ThickZ,
    pub gadget_l: PinnedGraph,
    pub gadget_r: PinnedGraph,
    pub alpha1: Residue,
    pub alpha2: Residue,
    pub beta1: Residue,
    pub beta2: Residue,
}

/// Pointwise extension count of a one-pin gadget at a target vertex.
fn extension_at(gadget: &PinnedGraph, h: &Graph, v: usize, p: Prime) -> Result<Residue> {
    let target = PinnedGraph::new(h.clone(), vec![v])?;
    hom::count_hom_pinned_mod(gadget, &target, p)
}

/// Checks one side's congruences: extension counts vanish at every `off`
/// vertex, and the set sums over `end` (the Z's outer part) and `mid` are
/// both units. Returns (end sum, mid sum) when the gadget qualifies.
pub fn gadget_side_sums(
    gadget: &PinnedGraph,
    h: &Graph,
    p: Prime,
    end: &BTreeSet<usize>,
    mid: &BTreeSet<usize>,
    off: &BTreeSet<usize>,
) -> Result<Option<(Residue, Residue)>> {
    if gadget.arity() != 1 {
        return Err(Error::InvalidDecomposition {
            reason: format!("gadget has {} pins, expected 1", gadget.arity()),
        });
    }
    for &v in off {
        if !extension_at(gadget, h, v, p)?.is_zero() {
            return Ok(None);
        }
    }
    // Set sums go through the mask-pinned counter, a different route than
    // the pointwise checks above.
    let end_sum = hom::count_hom_pinned_set_mod(gadget, h, &[end.clone()], p)?;
    let mid_sum = hom::count_hom_pinned_set_mod(gadget, h, &[mid.clone()], p)?;
    if end_sum.is_zero() || mid_sum.is_zero() {
        return Ok(None);
    }
    Ok(Some((end_sum, mid_sum)))
}

impl ZDecomposition {
    /// Recomputes every invariant: the Z shape, the gadget congruences,
    /// and the stored sums.
    pub fn validate(&self, h: &Graph) -> Result<()> {
        self.parts.validate(h)?;
        let p = self.alpha1.modulus();
        for (name, r) in [
            ("alpha2", self.alpha2),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
        ] {
            if r.modulus().get() != p.get() {
                return Err(Error::InvalidDecomposition {
                    reason: format!("{name} lives modulo {}, alpha1 modulo {}", r.modulus().get(), p.get()),
                });
            }
        }
        let (off_l, off_r) = off_sets(h, &self.parts);
        let left = gadget_side_sums(&self.gadget_l, h, p, &self.parts.a, &self.parts.c, &off_l)?
            .ok_or_else(|| Error::InvalidDecomposition {
                reason: "left gadget fails its congruences".into(),
            })?;
        let right = gadget_side_sums(&self.gadget_r, h, p, &self.parts.d, &self.parts.b, &off_r)?
            .ok_or_else(|| Error::InvalidDecomposition {
                reason: "right gadget fails its congruences".into(),
            })?;
        let stored = [self.alpha1, self.alpha2, self.beta1, self.beta2];
        let computed = [left.0, left.1, right.0, right.1];
        if stored.iter().zip(&computed).any(|(s, c)| s.value() != c.value()) {
            return Err(Error::InvalidDecomposition {
                reason: format!(
                    "stored parameters {:?} disagree with recomputed {:?}",
                    stored.map(|r| r.value()),
                    computed.map(|r| r.value())
                ),
            });
        }
        Ok(())
    }
}

fn off_sets(h: &Graph, z: &ThickZ) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let off_l = h
        .sort_members(Sort::L)
        .into_iter()
        .filter(|v| !z.a.contains(v) && !z.c.contains(v))
        .collect();
    let off_r = h
        .sort_members(Sort::R)
        .into_iter()
        .filter(|v| !z.b.contains(v) && !z.d.contains(v))
        .collect();
    (off_l, off_r)
}

/// Every sorted graph on at most `bound` vertices with a pin of the given
/// sort, ordered by (vertex count, edge count, canonical string, pin).
fn gadget_candidates(bound: usize, pin_sort: Sort) -> Vec<PinnedGraph> {
    let mut out = Vec::new();
    for n in 1..=bound {
        for assignment in 0..1u32 << n {
            let sorts: Vec<Sort> =
                (0..n).map(|v| if assignment >> v & 1 == 1 { Sort::R } else { Sort::L }).collect();
            let cross: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .filter(|&(u, v)| sorts[u] != sorts[v])
                .collect();
            for sel in 0..1u64 << cross.len() {
                let edges: Vec<(usize, usize)> = cross
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| sel >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                let graph = Graph::from_edges(n, &edges)
                    .and_then(|g| g.with_sorts(sorts.clone()))
                    .expect("cross edges respect the sorts");
                for pin in (0..n).filter(|&v| sorts[v] == pin_sort) {
                    out.push(PinnedGraph::new(graph.clone(), vec![pin]).expect("pin in range"));
                }
            }
        }
    }
    out.sort_by_cached_key(|pg| {
        (pg.graph.n(), pg.graph.edge_count(), iso::canonical_form(&pg.graph), pg.pins()[0])
    });
    out
}

/// Bounded search for per-side gadgets satisfying the congruences, first
/// qualifying candidate per side in the fixed enumeration order. `None`
/// means the search space up to `bound` vertices is exhausted; that is an
/// explicit outcome, not proof that no gadget exists.
pub fn find_gadgets(
    h: &Graph,
    z: &ThickZ,
    p: Prime,
    bound: usize,
) -> Result<Option<ZDecomposition>> {
    z.validate(h)?;
    let (off_l, off_r) = off_sets(h, z);
    let mut left = None;
    for cand in gadget_candidates(bound, Sort::L) {
        if let Some(sums) = gadget_side_sums(&cand, h, p, &z.a, &z.c, &off_l)? {
            left = Some((cand, sums));
            break;
        }
    }
    let Some((gadget_l, (alpha1, alpha2))) = left else {
        return Ok(None);
    };
    let mut right = None;
    for cand in gadget_candidates(bound, Sort::R) {
        if let Some(sums) = gadget_side_sums(&cand, h, p, &z.d, &z.b, &off_r)? {
            right = Some((cand, sums));
            break;
        }
    }
    let Some((gadget_r, (beta1, beta2))) = right else {
        return Ok(None);
    };
    Ok(Some(ZDecomposition {
        parts: z.clone(),
        gadget_l,
        gadget_r,
        alpha1,
        alpha2,
        beta1,
        beta2,
    }))
}

/// Z_{α,β}(g) = Σ over independent sets I of α^|I∩L| β^|I∩R|, by direct
/// enumeration.
pub fn zbis_value(g: &Graph, alpha: Residue, beta: Residue) -> Result<Residue> {
    if alpha.modulus().get() != beta.modulus().get() {
        return Err(Error::InvalidInput(
            "independent-set parameters live modulo different primes".into(),
        ));
    }
    if alpha.is_zero() {
        return Err(Error::ZeroParameter { name: "alpha" });
    }
    if beta.is_zero() {
        return Err(Error::ZeroParameter { name: "beta" });
    }
    let sorts = g.sorts().ok_or(Error::NotBipartite)?;
    let n = g.n();
    if n > ZBIS_CAP {
        return Err(Error::TooManyVertices { n, max: ZBIS_CAP });
    }
    let p = alpha.modulus();
    let mut total = Residue::new(0, p);
    for mask in 0..1u64 << n {
        if (0..n).any(|v| mask >> v & 1 == 1 && g.neighbors(v) & mask != 0) {
            continue;
        }
        let l = (0..n).filter(|&v| mask >> v & 1 == 1 && sorts[v] == Sort::L).count();
        let r = mask.count_ones() as usize - l;
        total = total.add(alpha.pow(l as u64).mul(beta.pow(r as u64)));
    }
    Ok(total)
}

/// Builds the reduction graph: one gadget copy per source vertex, glued
/// at its pin, with the pins playing the roles of the original vertices
/// and wired by the source's edges. Vertices are laid out block by block
/// in source-vertex order.
pub fn build_bis_reduction(g: &Graph, h: &Graph, z: &ZDecomposition) -> Result<Graph> {
    z.validate(h)?;
    let gs = g.sorts().ok_or(Error::NotBipartite)?;
    let mut anchors = Vec::with_capacity(g.n());
    let mut edges = Vec::new();
    let mut sorts = Vec::new();
    for v in 0..g.n() {
        let gadget = if gs[v] == Sort::L { &z.gadget_l } else { &z.gadget_r };
        let offset = sorts.len();
        anchors.push(offset + gadget.pins()[0]);
        for (x, y) in gadget.graph.edges() {
            edges.push((offset + x, offset + y));
        }
        sorts.extend_from_slice(gadget.graph.sorts().expect("gadgets are sorted"));
    }
    for (x, y) in g.edges() {
        edges.push((anchors[x], anchors[y]));
    }
    Graph::from_edges(sorts.len(), &edges)?.with_sorts(sorts)
}

/// Outcome of checking the reduction congruence on one source graph.
#[derive(Clone, Debug)]
pub struct ReductionReport {
    pub lhs: Residue,
    pub rhs: Residue,
    pub g: Graph,
    pub g_prime: Graph,
}

impl ReductionReport {
    pub fn equal(&self) -> bool {
        self.lhs.value() == self.rhs.value()
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "lhs": self.lhs.value(),
            "rhs": self.rhs.value(),
            "p": self.lhs.modulus().get(),
            "equal": self.equal(),
            "g": GraphDoc::from_graph(&self.g),
            "G_prime": GraphDoc::from_graph(&self.g_prime),
        })
        .to_string()
    }
}

/// Checks the reduction congruence by brute force on both sides:
/// hom(G', h) against α₂^|L| β₂^|R| Z_{α₁α₂⁻¹, β₁β₂⁻¹}(g), all mod p.
/// Inequality is a report, not an error; it falsifies the decomposition
/// or the implementation.
pub fn verify_reduction(
    g: &Graph,
    h: &Graph,
    z: &ZDecomposition,
    p: Prime,
) -> Result<ReductionReport> {
    if z.alpha1.modulus().get() != p.get() {
        return Err(Error::InvalidInput(format!(
            "decomposition parameters live modulo {}, verification asked modulo {}",
            z.alpha1.modulus().get(),
            p.get()
        )));
    }
    let g_prime = build_bis_reduction(g, h, z)?;
    let lhs = hom::count_hom_mod(&g_prime, h, p)?;
    let alpha = z.alpha1.mul(z.alpha2.inv()?);
    let beta = z.beta1.mul(z.beta2.inv()?);
    let zval = zbis_value(g, alpha, beta)?;
    let l_g = g.sort_members(Sort::L).len() as u64;
    let r_g = g.sort_members(Sort::R).len() as u64;
    let rhs = z.alpha2.pow(l_g).mul(z.beta2.pow(r_g)).mul(zval);
    Ok(ReductionReport { lhs, rhs, g: g.clone(), g_prime })
}

/// One homomorphism class in the bucket-level check: the independent set,
/// the exact number of maps landing in it, and the predicted product.
#[derive(Clone, Debug)]
pub struct BucketClass {
    pub independent_set: Vec<usize>,
    pub actual: HomCount,
    pub predicted: HomCount,
}

#[derive(Clone, Debug)]
pub struct DebugReport {
    pub classes: Vec<BucketClass>,
    /// Residue of the map count with some anchor outside its allowed sets.
    pub outside: Residue,
    pub all_match: bool,
}

/// Partitions Hom(G', h) by which anchors land in the Z's outer parts and
/// checks the exact class-size product formula, plus that the leftover
/// maps vanish mod p. Exhaustive enumeration, so the source is capped.
pub fn verify_reduction_debug(
    g: &Graph,
    h: &Graph,
    z: &ZDecomposition,
    p: Prime,
) -> Result<DebugReport> {
    if g.n() > DEBUG_CAP {
        return Err(Error::TooManyVertices { n: g.n(), max: DEBUG_CAP });
    }
    let g_prime = build_bis_reduction(g, h, z)?;
    let gs = g.sorts().ok_or(Error::NotBipartite)?;
    let mut anchors = Vec::with_capacity(g.n());
    let mut offset = 0;
    for v in 0..g.n() {
        let gadget = if gs[v] == Sort::L { &z.gadget_l } else { &z.gadget_r };
        anchors.push(offset + gadget.pins()[0]);
        offset += gadget.graph.n();
    }
    // Exact per-side extension sums drive the predicted class sizes.
    let a1 = hom::count_hom_pinned_set(&z.gadget_l, h, &[z.parts.a.clone()])?;
    let a2 = hom::count_hom_pinned_set(&z.gadget_l, h, &[z.parts.c.clone()])?;
    let b1 = hom::count_hom_pinned_set(&z.gadget_r, h, &[z.parts.d.clone()])?;
    let b2 = hom::count_hom_pinned_set(&z.gadget_r, h, &[z.parts.b.clone()])?;
    let mut buckets: BTreeMap<Vec<usize>, HomCount> = BTreeMap::new();
    let mut outside = Residue::new(0, p);
    hom::for_each_hom(&g_prime, h, |phi| {
        let mut inside = true;
        let mut set = Vec::new();
        for v in 0..g.n() {
            let image = phi[anchors[v]];
            let (outer, allowed) = if gs[v] == Sort::L {
                (z.parts.a.contains(&image), z.parts.c.contains(&image))
            } else {
                (z.parts.d.contains(&image), z.parts.b.contains(&image))
            };
            if outer {
                set.push(v);
            } else if !allowed {
                inside = false;
                break;
            }
        }
        if inside {
            *buckets.entry(set).or_default() += 1u32;
        } else {
            outside = outside.add(Residue::new(1, p));
        }
    })?;
    // Every independent set of g is a class, possibly empty; anything
    // else in the buckets would be a dependent set, which the A-D gap
    // makes impossible.
    let mut classes = Vec::new();
    let mut all_match = outside.is_zero();
    for mask in 0..1u64 << g.n() {
        if (0..g.n()).any(|v| mask >> v & 1 == 1 && g.neighbors(v) & mask != 0) {
            continue;
        }
        let set: Vec<usize> = (0..g.n()).filter(|&v| mask >> v & 1 == 1).collect();
        let in_l = set.iter().filter(|&&v| gs[v] == Sort::L).count() as u32;
        let in_r = set.len() as u32 - in_l;
        let l_total = gs.iter().filter(|&&s| s == Sort::L).count() as u32;
        let r_total = g.n() as u32 - l_total;
        let predicted = a1.pow(in_l) * a2.pow(l_total - in_l) * b1.pow(in_r) * b2.pow(r_total - in_r);
        let actual = buckets.remove(&set).unwrap_or_default();
        all_match &= actual == predicted;
        classes.push(BucketClass { independent_set: set, actual, predicted });
    }
    assert!(buckets.is_empty(), "a homomorphism class landed on a dependent set");
    Ok(DebugReport { classes, outside, all_match })
}
