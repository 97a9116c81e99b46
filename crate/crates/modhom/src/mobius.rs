//! Injective counts by inversion over the partition lattice, and the
//! indistinguishability test it supports.
//!
//! Summing `mu(bottom, theta) * hom(g/theta, h)` over all partitions theta
//! of the source's vertex set counts the injective homomorphisms: each
//! homomorphism factors uniquely through the partition it induces, and the
//! Moebius weights cancel every non-discrete fiber. Pins are quotiented
//! along. With the source equal to the target this counts automorphisms,
//! which is how `aut_order` avoids explicit group enumeration.
//!
//! The lattice is Bell-sized, so a ground-set cap guards every entry
//! point.

use crate::error::{Error, Result};
use crate::graph::{Graph, PinnedGraph};
use crate::hom;
use crate::iso;
use crate::modp::{Prime, Residue};
use crate::partition::{all_partitions, mobius_weight, Partition};
use num_bigint::BigInt;
use std::collections::BTreeSet;

pub use crate::partition::DEFAULT_GROUND_CAP;

fn quotient_instance(g: &PinnedGraph, theta: &Partition) -> Option<PinnedGraph> {
    // Blocks mixing sorts admit no sort-preserving image; their terms are
    // zero and are skipped rather than quotiented into unsorted graphs.
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
    Some(PinnedGraph::new(q, pins).expect("block indices are vertices of the quotient"))
}

/// Injective count through the partition lattice. `max_bell` caps the
/// source's vertex count.
pub fn inj_via_inversion(
    g: &PinnedGraph,
    h: &PinnedGraph,
    max_bell: usize,
) -> Result<hom::HomCount> {
    let mut acc = BigInt::ZERO;
    for theta in all_partitions(g.graph.n(), max_bell)? {
        let Some(q) = quotient_instance(g, &theta) else { continue };
        let m = hom::count_hom_pinned(&q, h)?;
        acc += BigInt::from(m) * BigInt::from(mobius_weight(&theta));
    }
    match acc.to_biguint() {
        Some(v) => Ok(v),
        None => Err(Error::InvalidDecomposition {
            reason: "inversion sum came out negative".into(),
        }),
    }
}

/// Same inversion with all arithmetic modulo p.
pub fn inj_via_inversion_mod(
    g: &PinnedGraph,
    h: &PinnedGraph,
    p: Prime,
    max_bell: usize,
) -> Result<Residue> {
    let mut acc = Residue::new(0, p);
    for theta in all_partitions(g.graph.n(), max_bell)? {
        let Some(q) = quotient_instance(g, &theta) else { continue };
        let m = hom::count_hom_pinned_mod(&q, h, p)?;
        acc = acc.add(m.mul(Residue::from_i64(mobius_weight(&theta) as i64, p)));
    }
    Ok(acc)
}

/// Automorphism count of a graph: injective endomorphisms, counted by
/// inversion rather than by walking the group.
pub fn aut_order(h: &Graph, max_bell: usize) -> Result<hom::HomCount> {
    let pinned = PinnedGraph::unpinned(h.clone());
    inj_via_inversion(&pinned, &pinned, max_bell)
}

pub fn aut_order_mod(h: &Graph, p: Prime, max_bell: usize) -> Result<Residue> {
    let pinned = PinnedGraph::unpinned(h.clone());
    inj_via_inversion_mod(&pinned, &pinned, p, max_bell)
}

/// Number of automorphisms of h sending `a` into `targets`.
pub fn stabilizer_order(h: &Graph, a: usize, targets: &BTreeSet<usize>) -> Result<u64> {
    if a >= h.n() {
        return Err(Error::VertexOutOfRange { vertex: a, n: h.n() });
    }
    for &t in targets {
        if t >= h.n() {
            return Err(Error::VertexOutOfRange { vertex: t, n: h.n() });
        }
    }
    Ok(iso::automorphisms(h)
        .into_iter()
        .filter(|phi| targets.contains(&phi.mapping()[a]))
        .count() as u64)
}

/// Outcome of probing whether two target vertices support the same pinned
/// counts modulo p.
#[derive(Clone, Debug)]
pub enum IndistVerdict {
    /// An automorphism carries one vertex to the other; the counts agree
    /// for every source.
    Isomorphic { witness: Vec<usize> },
    /// A concrete pinned source whose counts at the two vertices differ.
    Distinguished { source: Graph, pin: usize, counts: (u64, u64) },
    /// All sources up to the bound agree, but no automorphism was found.
    Inconclusive { bound: usize },
}

/// Searches for an automorphism identifying the two vertices, then for a
/// pinned source distinguishing them modulo p, trying every connected
/// graph with loops on up to `bound` vertices, pinned at vertex 0.
pub fn indistinguishable(
    h: &Graph,
    a: usize,
    b: usize,
    p: Prime,
    bound: usize,
) -> Result<IndistVerdict> {
    if a >= h.n() || b >= h.n() {
        let v = a.max(b);
        return Err(Error::VertexOutOfRange { vertex: v, n: h.n() });
    }
    if let Some(phi) = iso::find_automorphism_with(h, &[(a, b)]) {
        return Ok(IndistVerdict::Isomorphic { witness: phi.mapping().to_vec() });
    }
    let ha = PinnedGraph::new(h.clone(), vec![a])?;
    let hb = PinnedGraph::new(h.clone(), vec![b])?;
    for n in 1..=bound {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i..n {
                pairs.push((i, j));
            }
        }
        for mask in 0u64..(1 << pairs.len()) {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|&(t, _)| mask >> t & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let k = Graph::from_edges(n, &edges)?;
            if !k.is_connected() {
                continue;
            }
            let pk = PinnedGraph::new(k, vec![0])?;
            let ca = hom::count_hom_pinned_mod(&pk, &ha, p)?;
            let cb = hom::count_hom_pinned_mod(&pk, &hb, p)?;
            if ca.value() != cb.value() {
                return Ok(IndistVerdict::Distinguished {
                    source: pk.graph,
                    pin: 0,
                    counts: (ca.value(), cb.value()),
                });
            }
        }
    }
    Ok(IndistVerdict::Inconclusive { bound })
}
