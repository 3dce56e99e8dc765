//! Ordered Bratteli diagrams: leveled vertex sets, edge sets between
//! consecutive levels, and a total order on the incoming edges of each
//! vertex.

use thiserror::Error;

/// An edge of level `i`, from a vertex of `V_{i-1}` to a vertex of `V_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BdEdge {
    pub source: usize,
    pub target: usize,
}

/// Vertex levels `V_0..V_M` (with `V_0` a single root) and edge levels
/// `E_1..E_M`. Edges into each vertex are totally ordered; the order is the
/// position within the per-vertex incoming list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BratteliDiagram {
    vertex_counts: Vec<usize>,
    edges: Vec<Vec<BdEdge>>,
    incoming: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("the root level must have exactly one vertex")]
    RootNotSingleton,
    #[error("edge level {level}: edge endpoints out of range")]
    EndpointOutOfRange { level: usize },
    #[error("vertex {vertex} of level {level} has no incoming edge")]
    NoIncoming { level: usize, vertex: usize },
    #[error("vertex {vertex} of level {level} has no outgoing edge")]
    NoOutgoing { level: usize, vertex: usize },
    #[error("incoming order of vertex {vertex} at level {level} is not a permutation of its incoming edges")]
    BadOrder { level: usize, vertex: usize },
    #[error("path edge at level {level} does not connect to the previous edge")]
    Disconnected { level: usize },
}

impl BratteliDiagram {
    /// Builds a diagram from per-level edge lists; the incoming order of
    /// each vertex is the edge-list order restricted to that vertex.
    pub fn new(vertex_counts: Vec<usize>, edges: Vec<Vec<BdEdge>>) -> Result<Self, DiagramError> {
        let orders = edges
            .iter()
            .zip(vertex_counts.iter().skip(1))
            .map(|(level, &count)| {
                (0..count)
                    .map(|v| {
                        level
                            .iter()
                            .enumerate()
                            .filter(|(_, e)| e.target == v)
                            .map(|(i, _)| i)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self::with_orders(vertex_counts, edges, orders)
    }

    /// Builds a diagram with explicit incoming orders
    /// (`orders[i][v]` lists the edge ids of `E_{i+1}` into vertex `v` of
    /// `V_{i+1}`, minimal first).
    pub fn with_orders(
        vertex_counts: Vec<usize>,
        edges: Vec<Vec<BdEdge>>,
        orders: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self, DiagramError> {
        if vertex_counts.first() != Some(&1) {
            return Err(DiagramError::RootNotSingleton);
        }
        assert_eq!(edges.len() + 1, vertex_counts.len());
        assert_eq!(orders.len(), edges.len());
        for (i, level) in edges.iter().enumerate() {
            let (sources, targets) = (vertex_counts[i], vertex_counts[i + 1]);
            let mut has_out = vec![false; sources];
            let mut has_in = vec![false; targets];
            for e in level {
                if e.source >= sources || e.target >= targets {
                    return Err(DiagramError::EndpointOutOfRange { level: i + 1 });
                }
                has_out[e.source] = true;
                has_in[e.target] = true;
            }
            if let Some(v) = has_out.iter().position(|&b| !b) {
                return Err(DiagramError::NoOutgoing {
                    level: i,
                    vertex: v,
                });
            }
            if let Some(v) = has_in.iter().position(|&b| !b) {
                return Err(DiagramError::NoIncoming {
                    level: i + 1,
                    vertex: v,
                });
            }
            for (v, order) in orders[i].iter().enumerate() {
                let mut expect: Vec<usize> = level
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.target == v)
                    .map(|(id, _)| id)
                    .collect();
                let mut got = order.clone();
                expect.sort_unstable();
                got.sort_unstable();
                if expect != got {
                    return Err(DiagramError::BadOrder {
                        level: i + 1,
                        vertex: v,
                    });
                }
            }
        }
        Ok(BratteliDiagram {
            vertex_counts,
            edges,
            incoming: orders,
        })
    }

    /// Number of edge levels `M` (vertex levels are `0..=M`).
    pub fn edge_levels(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self, level: usize) -> usize {
        self.vertex_counts[level]
    }

    /// Edges of level `i` (`1 <= i <= M`).
    pub fn edge_level(&self, i: usize) -> &[BdEdge] {
        &self.edges[i - 1]
    }

    pub fn edge(&self, i: usize, id: usize) -> BdEdge {
        self.edges[i - 1][id]
    }

    /// Ordered incoming edge ids of vertex `v` in `V_i`, minimal first.
    pub fn incoming(&self, i: usize, v: usize) -> &[usize] {
        &self.incoming[i - 1][v]
    }

    /// The minimal path from the root to vertex `v` of level `i`, as edge
    /// ids for levels `1..=i`.
    pub fn minimal_path_to(&self, i: usize, v: usize) -> Vec<usize> {
        let mut edges = vec![0usize; i];
        let mut vertex = v;
        for j in (1..=i).rev() {
            let e = self.incoming(j, vertex)[0];
            edges[j - 1] = e;
            vertex = self.edge(j, e).source;
        }
        edges
    }

    /// The all-minimal path through the whole diagram ending at the given
    /// deepest-level vertex.
    pub fn minimal_path(&self, terminal: usize) -> BvPath {
        let edges = self.minimal_path_to(self.edge_levels(), terminal);
        BvPath::new(self, edges).expect("minimal path is connected")
    }
}

/// A path through every level of a diagram, one edge per level, starting at
/// the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BvPath {
    edges: Vec<usize>,
}

impl BvPath {
    pub fn new(d: &BratteliDiagram, edges: Vec<usize>) -> Result<Self, DiagramError> {
        assert_eq!(edges.len(), d.edge_levels());
        for i in 1..edges.len() {
            let prev = d.edge(i, edges[i - 1]);
            let here = d.edge(i + 1, edges[i]);
            if prev.target != here.source {
                return Err(DiagramError::Disconnected { level: i + 1 });
            }
        }
        Ok(BvPath { edges })
    }

    /// Edge id at level `i` (`1 <= i <= M`).
    pub fn edge(&self, i: usize) -> usize {
        self.edges[i - 1]
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }
}

/// Enumerates every path of the diagram (product of edge choices), in
/// lexicographic edge-id order. Desk-scale only.
pub fn all_paths(d: &BratteliDiagram) -> Vec<BvPath> {
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
    while let Some((prefix, vertex)) = stack.pop() {
        let i = prefix.len() + 1;
        if i > d.edge_levels() {
            out.push(BvPath { edges: prefix });
            continue;
        }
        // Push in reverse so smaller edge ids pop first.
        let mut next: Vec<(Vec<usize>, usize)> = d
            .edge_level(i)
            .iter()
            .enumerate()
            .filter(|(_, e)| e.source == vertex)
            .map(|(id, e)| {
                let mut p = prefix.clone();
                p.push(id);
                (p, e.target)
            })
            .collect();
        next.reverse();
        stack.extend(next);
    }
    out
}
