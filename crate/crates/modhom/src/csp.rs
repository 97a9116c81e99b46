//! Table-constraint CSP instances and solution counting.
//!
//! The wire format is `{"domain": d, "vars": n, "constraints": [{"scope":
//! [..], "tuples": [[..], ..]}, ..]}`. Variables are indices below `vars`,
//! values are indices below `domain`. Scopes may repeat a variable; a
//! tuple then matches only if its repeated positions agree.
//!
//! Counting is plain backtracking over the constrained variables with a
//! check as each constraint's last variable gets bound; variables outside
//! every scope contribute a free factor of `domain` each. That is enough
//! at desk scale, where instances come from small graphs.

use crate::error::{Error, Result};
use crate::graph::{Graph, PinnedGraph};
use crate::hom::{Counting, Exact, HomCount, Modular};
use crate::modp::{Prime, Residue};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableConstraint {
    pub scope: Vec<usize>,
    pub tuples: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCsp {
    pub domain: usize,
    pub vars: usize,
    pub constraints: Vec<TableConstraint>,
}

impl TableCsp {
    /// Checks index ranges and that every tuple matches its scope's arity.
    pub fn validate(&self) -> Result<()> {
        for c in &self.constraints {
            for &v in &c.scope {
                if v >= self.vars {
                    return Err(Error::VertexOutOfRange { vertex: v, n: self.vars });
                }
            }
            for t in &c.tuples {
                if t.len() != c.scope.len() {
                    return Err(Error::ArityMismatch { scope: c.scope.len(), tuple: t.len() });
                }
                for &val in t {
                    if val >= self.domain {
                        return Err(Error::VertexOutOfRange { vertex: val, n: self.domain });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_str_json(s: &str) -> Result<TableCsp> {
        let csp: TableCsp =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        csp.validate()?;
        Ok(csp)
    }

    pub fn to_string_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }
}

fn count_core<C: Counting>(ct: &C, csp: &TableCsp) -> Result<C::Value> {
    csp.validate()?;
    // Constraints fire once their highest variable is bound; empty scopes
    // fire immediately.
    let mut at: Vec<Vec<&TableConstraint>> = vec![Vec::new(); csp.vars];
    let mut constrained = vec![false; csp.vars];
    for c in &csp.constraints {
        match c.scope.iter().max() {
            Some(&m) => {
                at[m].push(c);
                for &v in &c.scope {
                    constrained[v] = true;
                }
            }
            None => {
                if c.tuples.is_empty() {
                    return Ok(ct.zero());
                }
            }
        }
    }
    let order: Vec<usize> = (0..csp.vars).filter(|&v| constrained[v]).collect();
    // Remap the firing points onto the search depth of their last variable.
    let mut fire: Vec<Vec<&TableConstraint>> = vec![Vec::new(); order.len()];
    for (depth, &v) in order.iter().enumerate() {
        fire[depth] = at[v].clone();
    }
    let mut assignment = vec![0usize; csp.vars];
    let count = descend(ct, csp, &order, &fire, &mut assignment, 0);

    let free = csp.vars - order.len();
    let mut factor = ct.one();
    for _ in 0..free {
        let d = ct.from_u64(csp.domain as u64);
        factor = ct.mul(factor, &d);
    }
    Ok(ct.mul(count, &factor))
}

fn descend<C: Counting>(
    ct: &C,
    csp: &TableCsp,
    order: &[usize],
    fire: &[Vec<&TableConstraint>],
    assignment: &mut Vec<usize>,
    depth: usize,
) -> C::Value {
    if depth == order.len() {
        return ct.one();
    }
    let var = order[depth];
    let mut total = ct.zero();
    'values: for val in 0..csp.domain {
        assignment[var] = val;
        for c in &fire[depth] {
            let ok = c
                .tuples
                .iter()
                .any(|t| t.iter().zip(&c.scope).all(|(&tv, &sv)| assignment[sv] == tv));
            if !ok {
                continue 'values;
            }
        }
        let below = descend(ct, csp, order, fire, assignment, depth + 1);
        total = ct.reduce(std::iter::once(total).chain(std::iter::once(below)).sum());
    }
    total
}

/// Exact number of solutions.
pub fn count_csp(csp: &TableCsp) -> Result<HomCount> {
    count_core(&Exact, csp)
}

/// Number of solutions modulo p.
pub fn count_csp_mod(csp: &TableCsp, p: Prime) -> Result<Residue> {
    let v = count_core(&Modular(p.get()), csp)?;
    Ok(Residue::new(v, p))
}

/// Encodes homomorphism counting as a table CSP: one variable per source
/// vertex, the target's edge relation on every source edge, and unary
/// sort restrictions when both graphs are sorted.
pub fn from_graph_instance(g: &Graph, h: &Graph) -> Result<TableCsp> {
    if g.is_sorted() != h.is_sorted() {
        return Err(Error::SortMismatch);
    }
    let n = h.n();
    let mut constraints = Vec::new();
    let edge_tuples: Vec<Vec<usize>> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| h.has_edge(a, b))
        .map(|(a, b)| vec![a, b])
        .collect();
    let loop_tuples: Vec<Vec<usize>> =
        (0..n).filter(|&a| h.has_loop(a)).map(|a| vec![a]).collect();
    for (u, v) in g.edges() {
        if u == v {
            constraints.push(TableConstraint { scope: vec![u], tuples: loop_tuples.clone() });
        } else {
            constraints.push(TableConstraint { scope: vec![u, v], tuples: edge_tuples.clone() });
        }
    }
    if let (Some(gs), Some(_)) = (g.sorts(), h.sorts()) {
        for v in 0..g.n() {
            let allowed: Vec<Vec<usize>> =
                h.sort_members(gs[v]).into_iter().map(|a| vec![a]).collect();
            constraints.push(TableConstraint { scope: vec![v], tuples: allowed });
        }
    }
    Ok(TableCsp { domain: n, vars: g.n(), constraints })
}

/// Like `from_graph_instance`, with the source pins becoming single-tuple
/// unary constraints on the paired target pins.
pub fn from_pinned_pair(g: &PinnedGraph, h: &PinnedGraph) -> Result<TableCsp> {
    if g.arity() != h.arity() {
        return Err(Error::PinArityMismatch { left: g.arity(), right: h.arity() });
    }
    let mut csp = from_graph_instance(&g.graph, &h.graph)?;
    for (&x, &a) in g.pins().iter().zip(h.pins().iter()) {
        csp.constraints.push(TableConstraint { scope: vec![x], tuples: vec![vec![a]] });
    }
    Ok(csp)
}
