//! Reductions that tame counting modulo p: shrinking targets along
//! order-p automorphisms, eliminating constant constraints through an
//! oracle, and normalizing pinned gadgets until every extension count is
//! exactly one.
//!
//! An automorphism of order exactly p partitions some vertices into
//! p-cycles; maps landing across a cycle come in bundles of p that cancel
//! mod p, so only the fixed substructure matters. Iterating this until no
//! order-p automorphism remains gives the reduced form, unique up to
//! isomorphism no matter which automorphism each step picks.

use crate::csp::{TableConstraint, TableCsp};
use crate::error::{Error, Result};
use crate::graph::{Graph, PinnedGraph};
use crate::hom;
use crate::iso::Automorphism;
use crate::mobius;
use crate::modp::{Prime, Residue};
use crate::partition::{all_partitions, mobius_weight, Partition};
use crate::products;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub use crate::iso::{find_p_automorphism, find_p_automorphism_fixing};

/// No automorphism of order exactly p.
pub fn is_p_rigid(h: &Graph, p: Prime) -> bool {
    find_p_automorphism(h, p).is_none()
}

fn validate_automorphism(h: &Graph, a: &Automorphism) -> Result<()> {
    let m = a.mapping();
    if m.len() != h.n() {
        return Err(Error::WitnessMismatch);
    }
    let mut seen = vec![false; h.n()];
    for &w in m {
        if w >= h.n() || seen[w] {
            return Err(Error::WitnessMismatch);
        }
        seen[w] = true;
    }
    for u in 0..h.n() {
        for v in u..h.n() {
            if h.has_edge(u, v) != h.has_edge(m[u], m[v]) {
                return Err(Error::WitnessMismatch);
            }
        }
    }
    if let Some(sorts) = h.sorts() {
        if (0..h.n()).any(|v| sorts[v] != sorts[m[v]]) {
            return Err(Error::WitnessMismatch);
        }
    }
    Ok(())
}

/// Induced subgraph on the fixed points of an automorphism of h.
pub fn fixed_point_substructure(h: &Graph, a: &Automorphism) -> Result<Graph> {
    validate_automorphism(h, a)?;
    h.induced_subgraph(&a.fixed_points())
}

/// Reduced form: repeatedly restrict to the fixed points of the
/// lexicographically least order-p automorphism until none remains.
pub fn p_reduce(h: &Graph, p: Prime) -> Graph {
    p_reduce_by(h, p, |g| find_p_automorphism(g, p)).expect("the greedy picker is validated")
}

/// Same iteration with a caller-chosen automorphism each step; the picked
/// automorphism is validated and must have order exactly p.
pub fn p_reduce_by(
    h: &Graph,
    p: Prime,
    mut pick: impl FnMut(&Graph) -> Option<Automorphism>,
) -> Result<Graph> {
    let mut cur = h.clone();
    while let Some(phi) = pick(&cur) {
        validate_automorphism(&cur, &phi)?;
        if phi.order() as u64 != p.get() {
            return Err(Error::WitnessMismatch);
        }
        cur = cur.induced_subgraph(&phi.fixed_points())?;
    }
    Ok(cur)
}

/// Pinned reduced form: only automorphisms fixing every pin are used, so
/// the pins survive into the result (reindexed).
pub fn p_reduce_pinned(g: &PinnedGraph, p: Prime) -> PinnedGraph {
    let mut cur = g.clone();
    while let Some(phi) = find_p_automorphism_fixing(&cur.graph, p, cur.pins()) {
        let fixed = phi.fixed_points();
        let graph = cur.graph.induced_subgraph(&fixed).expect("fixed points are vertices");
        let pins = cur
            .pins()
            .iter()
            .map(|&v| fixed.binary_search(&v).expect("pins are fixed"))
            .collect();
        cur = PinnedGraph::new(graph, pins).expect("reindexed pins are in range");
    }
    cur
}

/// Union-find over a fixed universe, used to eliminate equality merges.
struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, v: usize) -> usize {
        if self.0[v] != v {
            let root = self.find(self.0[v]);
            self.0[v] = root;
        }
        self.0[v]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn is_pin_constraint(c: &TableConstraint) -> bool {
    c.scope.len() == 1 && c.tuples.len() == 1
}

/// Counts the solutions of an instance whose constants appear as unary
/// single-tuple pins, modulo p, using only oracle calls on pin-free
/// instances. The pins become fresh variables tied to the endomorphism
/// image relation of the target; inversion over the partition lattice of
/// those variables recovers the pinned count, up to the automorphism
/// count of the target, which must be invertible (hence the rigidity
/// precondition). Oracle calls are sequential in partition order.
pub fn constants_reduce(
    instance: &TableCsp,
    h: &Graph,
    p: Prime,
    oracle: &mut dyn FnMut(&TableCsp) -> Residue,
    max_bell: usize,
) -> Result<Residue> {
    instance.validate()?;
    if instance.domain != h.n() {
        return Err(Error::InvalidInput(format!(
            "instance domain {} does not match target order {}",
            instance.domain,
            h.n()
        )));
    }
    if !is_p_rigid(h, p) {
        return Err(Error::NotPRigid { p: p.get() });
    }
    let n = h.n();
    let pins: Vec<(usize, usize)> = instance
        .constraints
        .iter()
        .filter(|c| is_pin_constraint(c))
        .map(|c| (c.scope[0], c.tuples[0][0]))
        .collect();
    let others: Vec<&TableConstraint> =
        instance.constraints.iter().filter(|c| !is_pin_constraint(c)).collect();

    // The endomorphism image relation: every self-map image tuple, indexed
    // by vertex, in enumeration order.
    let mut image_tuples: Vec<Vec<usize>> = Vec::new();
    hom::for_each_hom(h, h, |img| image_tuples.push(img.to_vec()))?;
    let vars = instance.vars + n;
    let var_of = |a: usize| instance.vars + a;

    let mut acc = Residue::new(0, p);
    for theta in all_partitions(n, max_bell)? {
        let mut uf = UnionFind::new(vars);
        for &(x, a) in &pins {
            uf.union(x, var_of(a));
        }
        for block in theta.blocks() {
            for &a in &block[1..] {
                uf.union(var_of(block[0]), var_of(a));
            }
        }
        // Dense renaming of representatives, in first-appearance order.
        let mut names = vec![usize::MAX; vars];
        let mut dense = vec![0; vars];
        let mut next = 0;
        for v in 0..vars {
            let r = uf.find(v);
            if names[r] == usize::MAX {
                names[r] = next;
                next += 1;
            }
            dense[v] = names[r];
        }
        let mut constraints: Vec<TableConstraint> = others
            .iter()
            .map(|c| TableConstraint {
                scope: c.scope.iter().map(|&v| dense[v]).collect(),
                tuples: c.tuples.clone(),
            })
            .collect();
        constraints.push(TableConstraint {
            scope: (0..n).map(|a| dense[var_of(a)]).collect(),
            tuples: image_tuples.clone(),
        });
        let merged = TableCsp { domain: instance.domain, vars: next, constraints };
        let m = oracle(&merged);
        acc = acc.add(m.mul(Residue::from_i64(mobius_weight(&theta), p)));
    }
    let aut = mobius::aut_order_mod(h, p, max_bell)?;
    Ok(aut.inv()?.mul(acc))
}

/// The relation a pinned gadget carves out of a target: the pin tuples
/// whose extension counts do not vanish modulo p. Strict when every such
/// count is exactly one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MppRelation {
    pub arity: usize,
    pub tuples: BTreeSet<Vec<usize>>,
    pub strict: bool,
}

pub fn mpp_eval(gadget: &PinnedGraph, h: &Graph, p: Prime) -> Result<MppRelation> {
    let k = gadget.arity();
    let mut tuples = BTreeSet::new();
    let mut strict = true;
    let mut stack = vec![Vec::with_capacity(k)];
    while let Some(tuple) = stack.pop() {
        if tuple.len() == k {
            let target = PinnedGraph::new(h.clone(), tuple.clone())?;
            let count = hom::count_hom_pinned_mod(gadget, &target, p)?;
            if count.value() != 0 {
                strict &= count.value() == 1;
                tuples.insert(tuple);
            }
            continue;
        }
        for a in (0..h.n()).rev() {
            let mut next = tuple.clone();
            next.push(a);
            stack.push(next);
        }
    }
    Ok(MppRelation { arity: k, tuples, strict })
}

/// Glues p-1 copies of the gadget along its pins. Extension counts get
/// raised to the p-1 power, so each becomes 0 or 1 mod p and the defined
/// relation is unchanged.
pub fn strictify(gadget: &PinnedGraph, p: Prime) -> Result<PinnedGraph> {
    let mut out = gadget.clone();
    for _ in 2..p.get() {
        out = hom::glue_odot(&out, gadget)?;
    }
    Ok(out)
}

fn quotient_pinned(g: &PinnedGraph, theta: &Partition) -> Option<PinnedGraph> {
    if g.graph.is_sorted() {
        let sorts = g.graph.sorts().unwrap();
        for block in theta.blocks() {
            if block.iter().any(|&v| sorts[v] != sorts[block[0]]) {
                return None;
            }
        }
    }
    let q = g.graph.quotient(theta).expect("partition matches the vertex set");
    let class = theta.class_map();
    let pins = g.pins().iter().map(|&v| class[v]).collect();
    Some(PinnedGraph::new(q, pins).expect("block indices are in range"))
}

/// Rebuilds a gadget so that every tuple of its relation has extension
/// count exactly 1 mod p. The construction raises the target to the
/// relation's cardinality with one pin per column, reduces it while
/// fixing the pins, then searches the partition lattice for a quotient
/// whose count into the reduced power survives mod p, and strictifies.
/// Desk scale: at most 4 target vertices and 2 relation tuples, with the
/// partition search capped at `max_bell` ground elements. The result is
/// verified against the relation tuple by tuple.
pub fn normalize_pp_gadget(
    gadget: &PinnedGraph,
    h: &Graph,
    p: Prime,
    max_bell: usize,
) -> Result<PinnedGraph> {
    if h.n() > 4 {
        return Err(Error::GroundSetTooLarge { n: h.n(), cap: 4 });
    }
    let relation = mpp_eval(gadget, h, p)?;
    let k = relation.arity;
    if relation.tuples.is_empty() {
        return Err(Error::InvalidInput("gadget defines the empty relation".into()));
    }
    let full = h.n().pow(k as u32);
    if !h.is_sorted() && relation.tuples.len() == full {
        // Unconstrained pins extend in exactly one way.
        return PinnedGraph::new(crate::graph::gens::edgeless(k), (0..k).collect());
    }
    if relation.tuples.len() > 2 {
        return Err(Error::InvalidInput(format!(
            "relation has {} tuples, normalization is capped at 2",
            relation.tuples.len()
        )));
    }
    let rows: Vec<&Vec<usize>> = relation.tuples.iter().collect();
    let power = if rows.len() == 1 {
        PinnedGraph::new(h.clone(), rows[0].clone())?
    } else {
        let (graph, labels) = products::paired_product(h, h)?;
        let mut pins = Vec::with_capacity(k);
        for j in 0..k {
            let want = (rows[0][j], rows[1][j]);
            let idx = labels.iter().position(|&l| l == want).ok_or(Error::InvalidSorts {
                reason: "relation mixes sorts within a column".into(),
            })?;
            pins.push(idx);
        }
        PinnedGraph::new(graph, pins)?
    };
    let reduced = p_reduce_pinned(&power, p);
    if reduced.graph.n() > max_bell {
        return Err(Error::SearchExhausted {
            context: format!(
                "partition search over {} vertices exceeds the cap {}",
                reduced.graph.n(),
                max_bell
            ),
        });
    }
    let mut found = None;
    for theta in all_partitions(reduced.graph.n(), max_bell)? {
        let Some(candidate) = quotient_pinned(&reduced, &theta) else { continue };
        let m = hom::count_hom_pinned_mod(&candidate, &reduced, p)?;
        if m.value() != 0 {
            found = Some(candidate);
            break;
        }
    }
    let Some(candidate) = found else {
        return Err(Error::SearchExhausted {
            context: "no partition quotient survives mod p".into(),
        });
    };
    let strict = strictify(&candidate, p)?;
    let check = mpp_eval(&strict, h, p)?;
    if check.tuples != relation.tuples || !check.strict {
        return Err(Error::GadgetVerificationFailed {
            context: format!(
                "normalized gadget defines {:?} (strict: {}), wanted {:?}",
                check.tuples, check.strict, relation.tuples
            ),
        });
    }
    Ok(strict)
}

/// The neighborhood of a gadget-definable vertex set, with a defining
/// gadget built by one edge step off the witness: strictify the witness,
/// attach a fresh vertex to its pin, and move the pin there. Extension
/// counts of the new gadget are neighbor counts into the set mod p, which
/// can in principle drop members, so the result is verified against the
/// true neighborhood and mismatches are reported.
pub fn subalgebra_neighborhood(
    h: &Graph,
    a_set: &BTreeSet<usize>,
    witness: &PinnedGraph,
    p: Prime,
) -> Result<(BTreeSet<usize>, PinnedGraph)> {
    for &a in a_set {
        if a >= h.n() {
            return Err(Error::VertexOutOfRange { vertex: a, n: h.n() });
        }
    }
    if witness.arity() != 1 {
        return Err(Error::WitnessMismatch);
    }
    let defined = mpp_eval(witness, h, p)?;
    let as_tuples: BTreeSet<Vec<usize>> = a_set.iter().map(|&a| vec![a]).collect();
    if defined.tuples != as_tuples {
        return Err(Error::WitnessMismatch);
    }
    let strict = strictify(witness, p)?;
    let z = strict.pins()[0];
    let n = strict.graph.n();
    let mut edges = strict.graph.edges();
    edges.push((z, n));
    let mut graph = Graph::from_edges(n + 1, &edges)?;
    if let Some(sorts) = strict.graph.sorts() {
        let mut sorts = sorts.to_vec();
        sorts.push(sorts[z].flip());
        graph = graph.with_sorts(sorts)?;
    }
    let stepped = PinnedGraph::new(graph, vec![n])?;
    let expected: BTreeSet<usize> =
        a_set.iter().flat_map(|&a| h.neighbor_list(a)).collect();
    let got = mpp_eval(&stepped, h, p)?;
    let got_set: BTreeSet<usize> = got.tuples.iter().map(|t| t[0]).collect();
    if got_set != expected {
        return Err(Error::GadgetVerificationFailed {
            context: format!(
                "edge-step gadget defines {got_set:?} but the neighborhood is {expected:?}"
            ),
        });
    }
    Ok((expected, strictify(&stepped, p)?))
}
