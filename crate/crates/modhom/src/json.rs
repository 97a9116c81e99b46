//! JSON wire format for graphs and pinned graphs.
//!
//! ```json
//! {"n": 4, "edges": [[0,1],[1,2],[2,3]], "sorts": {"L":[0,2],"R":[1,3]}, "pins": [0]}
//! ```
//!
//! `sorts` and `pins` are optional; `[u,u]` encodes a loop. Readers reject
//! out-of-range indices, sort labelings that are not a partition of the
//! vertices, and same-sort edges. Writers emit a canonical form (edges and
//! sort lists ascending), so equal graphs serialize byte-identically.

use crate::error::{Error, Result};
use crate::graph::{Graph, PinnedGraph, Sort};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct GraphDoc {
    pub n: usize,
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sorts: Option<SortsDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pins: Vec<usize>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct SortsDoc {
    #[serde(rename = "L")]
    pub left: Vec<usize>,
    #[serde(rename = "R")]
    pub right: Vec<usize>,
}

impl GraphDoc {
    pub fn from_graph(g: &Graph) -> GraphDoc {
        GraphDoc {
            n: g.n(),
            edges: g.edges(),
            sorts: g.sorts().map(|_| SortsDoc {
                left: g.sort_members(Sort::L),
                right: g.sort_members(Sort::R),
            }),
            pins: Vec::new(),
        }
    }

    pub fn from_pinned(pg: &PinnedGraph) -> GraphDoc {
        let mut doc = GraphDoc::from_graph(&pg.graph);
        doc.pins = pg.pins().to_vec();
        doc
    }

    /// Decodes a plain graph; documents carrying pins are rejected.
    pub fn to_graph(&self) -> Result<Graph> {
        if !self.pins.is_empty() {
            return Err(Error::InvalidInput(
                "document carries pins; a plain graph was expected".into(),
            ));
        }
        self.decode_graph()
    }

    /// Decodes a pinned graph; a missing `pins` field means no pins.
    pub fn to_pinned(&self) -> Result<PinnedGraph> {
        PinnedGraph::new(self.decode_graph()?, self.pins.clone())
    }

    fn decode_graph(&self) -> Result<Graph> {
        let g = Graph::from_edges(self.n, &self.edges)?;
        match &self.sorts {
            None => Ok(g),
            Some(doc) => {
                let mut labels: Vec<Option<Sort>> = vec![None; self.n];
                for (side, sort) in [(&doc.left, Sort::L), (&doc.right, Sort::R)] {
                    for &v in side {
                        if v >= self.n {
                            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
                        }
                        if labels[v].is_some() {
                            return Err(Error::InvalidSorts {
                                reason: format!("vertex {v} labeled twice"),
                            });
                        }
                        labels[v] = Some(sort);
                    }
                }
                let sorts: Option<Vec<Sort>> = labels.into_iter().collect();
                let sorts = sorts.ok_or_else(|| Error::InvalidSorts {
                    reason: "sort lists do not cover every vertex".into(),
                })?;
                g.with_sorts(sorts)
            }
        }
    }
}

pub fn graph_from_str(s: &str) -> Result<Graph> {
    let doc: GraphDoc =
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
    doc.to_graph()
}

pub fn pinned_from_str(s: &str) -> Result<PinnedGraph> {
    let doc: GraphDoc =
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
    doc.to_pinned()
}

pub fn graph_to_string(g: &Graph) -> String {
    serde_json::to_string(&GraphDoc::from_graph(g)).expect("graph docs always serialize")
}

pub fn pinned_to_string(pg: &PinnedGraph) -> String {
    serde_json::to_string(&GraphDoc::from_pinned(pg)).expect("graph docs always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gens;

    #[test]
    fn round_trip_plain() {
        let g = gens::cycle(5);
        let s = graph_to_string(&g);
        assert_eq!(graph_from_str(&s).unwrap(), g);
        assert_eq!(s, r#"{"n":5,"edges":[[0,1],[0,4],[1,2],[2,3],[3,4]]}"#);
    }

    #[test]
    fn round_trip_sorted_and_pinned() {
        let g = gens::path_sorted(4);
        let s = graph_to_string(&g);
        assert_eq!(s, r#"{"n":4,"edges":[[0,1],[1,2],[2,3]],"sorts":{"L":[0,2],"R":[1,3]}}"#);
        assert_eq!(graph_from_str(&s).unwrap(), g);

        let pg = PinnedGraph::new(gens::path(3), vec![0, 0]).unwrap();
        let s = pinned_to_string(&pg);
        assert_eq!(pinned_from_str(&s).unwrap(), pg);
        assert!(graph_from_str(&s).is_err(), "pins rejected for plain graphs");
    }

    #[test]
    fn loops_round_trip() {
        let g = Graph::from_edges(2, &[(0, 0), (0, 1)]).unwrap();
        let s = graph_to_string(&g);
        assert_eq!(s, r#"{"n":2,"edges":[[0,0],[0,1]]}"#);
        assert_eq!(graph_from_str(&s).unwrap(), g);
    }

    #[test]
    fn reader_rejects_bad_documents() {
        assert!(graph_from_str(r#"{"n":2,"edges":[[0,2]]}"#).is_err());
        assert!(graph_from_str(r#"{"n":2,"edges":[[0,1]],"sorts":{"L":[0],"R":[]}}"#).is_err());
        assert!(graph_from_str(r#"{"n":2,"edges":[[0,1]],"sorts":{"L":[0,1],"R":[1]}}"#).is_err());
        assert!(graph_from_str(r#"{"n":2,"edges":[[0,1]],"sorts":{"L":[0,1],"R":[]}}"#).is_err());
        assert!(graph_from_str(r#"{"n":1,"edges":[[0,0]],"sorts":{"L":[0],"R":[]}}"#).is_err());
        assert!(pinned_from_str(r#"{"n":2,"edges":[],"pins":[5]}"#).is_err());
        assert!(graph_from_str("not json").is_err());
    }

    #[test]
    fn missing_edges_field_means_edgeless() {
        assert_eq!(graph_from_str(r#"{"n":3}"#).unwrap(), gens::edgeless(3));
        assert_eq!(graph_from_str(r#"{"n":0}"#).unwrap(), gens::edgeless(0));
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = graph_from_str(r#"{"n":2,"edges":[[0,1],[1,0],[0,1]]}"#).unwrap();
        assert_eq!(g.edge_count(), 1);
    }
}
