//! Directed multigraphs with parallel arrows and self-loops.
//!
//! Arrows are identified by dense indices `0..A`; labels are display-only.
//! Every legal graph has at least one outgoing and one incoming arrow at
//! each vertex, so there are only regular vertices and branch points.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Index of a vertex within one [`DiGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

/// Index of an arrow within one [`DiGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrowId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ArrowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A directed arrow with an integer weight (>= 1) and an optional label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub source: VertexId,
    pub target: VertexId,
    pub weight: u64,
    pub label: Option<String>,
}

impl Arrow {
    pub fn new(source: VertexId, target: VertexId) -> Self {
        Arrow {
            source,
            target,
            weight: 1,
            label: None,
        }
    }

    pub fn weighted(source: VertexId, target: VertexId, weight: u64) -> Self {
        Arrow {
            source,
            target,
            weight,
            label: None,
        }
    }

    pub fn labeled(source: VertexId, target: VertexId, label: impl Into<String>) -> Self {
        Arrow {
            source,
            target,
            weight: 1,
            label: Some(label.into()),
        }
    }
}

/// A finite directed multigraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    vertex_names: Vec<String>,
    arrows: Vec<Arrow>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphBuildError {
    #[error("arrow {arrow} references vertex {vertex} out of range (graph has {count} vertices)")]
    VertexOutOfRange {
        arrow: usize,
        vertex: usize,
        count: usize,
    },
    #[error("arrow {arrow} has weight 0; weights must be >= 1")]
    ZeroWeight { arrow: usize },
}

impl DiGraph {
    /// Builds a graph from vertex names and arrows. Endpoint indices must be
    /// in range and weights positive; the in/out-degree invariant is checked
    /// separately by [`validate_graph`].
    pub fn new(vertex_names: Vec<String>, arrows: Vec<Arrow>) -> Result<Self, GraphBuildError> {
        let count = vertex_names.len();
        for (i, a) in arrows.iter().enumerate() {
            for v in [a.source, a.target] {
                if v.0 >= count {
                    return Err(GraphBuildError::VertexOutOfRange {
                        arrow: i,
                        vertex: v.0,
                        count,
                    });
                }
            }
            if a.weight == 0 {
                return Err(GraphBuildError::ZeroWeight { arrow: i });
            }
        }
        Ok(DiGraph {
            vertex_names,
            arrows,
        })
    }

    /// Single vertex carrying one unlabeled self-loop: the smallest legal graph.
    pub fn single_loop() -> Self {
        DiGraph {
            vertex_names: vec!["v".to_owned()],
            arrows: vec![Arrow::new(VertexId(0), VertexId(0))],
        }
    }

    /// Single vertex with `labels.len()` self-loops, one per label.
    pub fn loop_bouquet(labels: &[&str]) -> Self {
        DiGraph {
            vertex_names: vec!["v".to_owned()],
            arrows: labels
                .iter()
                .map(|l| Arrow::labeled(VertexId(0), VertexId(0), *l))
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_names.len()).map(VertexId)
    }

    pub fn arrow_ids(&self) -> impl Iterator<Item = ArrowId> {
        (0..self.arrows.len()).map(ArrowId)
    }

    pub fn arrow(&self, id: ArrowId) -> &Arrow {
        &self.arrows[id.0]
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn source(&self, a: ArrowId) -> VertexId {
        self.arrows[a.0].source
    }

    pub fn target(&self, a: ArrowId) -> VertexId {
        self.arrows[a.0].target
    }

    pub fn weight(&self, a: ArrowId) -> u64 {
        self.arrows[a.0].weight
    }

    /// Display label of an arrow: its `label` if set, else its index.
    pub fn arrow_label(&self, a: ArrowId) -> String {
        match &self.arrows[a.0].label {
            Some(l) => l.clone(),
            None => a.0.to_string(),
        }
    }

    pub fn outgoing(&self, v: VertexId) -> Vec<ArrowId> {
        self.arrow_ids().filter(|&a| self.source(a) == v).collect()
    }

    pub fn incoming(&self, v: VertexId) -> Vec<ArrowId> {
        self.arrow_ids().filter(|&a| self.target(a) == v).collect()
    }

    /// Looks up a vertex index by name.
    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_names
            .iter()
            .position(|n| n == name)
            .map(VertexId)
    }
}

/// A nonempty path of consecutive arrows within one graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArrowPath(Vec<ArrowId>);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathError {
    #[error("a path must contain at least one arrow")]
    Empty,
    #[error("arrows {prev} and {next} are not consecutive: target {t} != source {s}")]
    NotConsecutive {
        prev: usize,
        next: usize,
        t: usize,
        s: usize,
    },
    #[error("a loop must close up: target of the last arrow {last_target} != source of the first {first_source}")]
    NotClosed {
        last_target: usize,
        first_source: usize,
    },
}

impl ArrowPath {
    pub fn new(g: &DiGraph, arrows: Vec<ArrowId>) -> Result<Self, PathError> {
        if arrows.is_empty() {
            return Err(PathError::Empty);
        }
        for w in arrows.windows(2) {
            let (t, s) = (g.target(w[0]), g.source(w[1]));
            if t != s {
                return Err(PathError::NotConsecutive {
                    prev: w[0].0,
                    next: w[1].0,
                    t: t.0,
                    s: s.0,
                });
            }
        }
        Ok(ArrowPath(arrows))
    }

    pub fn arrows(&self) -> &[ArrowId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> ArrowId {
        self.0[0]
    }

    pub fn last(&self) -> ArrowId {
        *self.0.last().unwrap()
    }

    pub fn total_weight(&self, g: &DiGraph) -> u64 {
        self.0.iter().map(|&a| g.weight(a)).sum()
    }
}

/// A closed [`ArrowPath`]; self-intersections are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArrowLoop(ArrowPath);

impl ArrowLoop {
    pub fn new(g: &DiGraph, arrows: Vec<ArrowId>) -> Result<Self, PathError> {
        let path = ArrowPath::new(g, arrows)?;
        let (t, s) = (g.target(path.last()), g.source(path.first()));
        if t != s {
            return Err(PathError::NotClosed {
                last_target: t.0,
                first_source: s.0,
            });
        }
        Ok(ArrowLoop(path))
    }

    pub fn arrows(&self) -> &[ArrowId] {
        self.0.arrows()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn path(&self) -> &ArrowPath {
        &self.0
    }

    /// Rotates the loop so that the arrow-index sequence is lexicographically
    /// least among all rotations.
    pub fn canonical_rotation(mut self) -> Self {
        let n = self.0 .0.len();
        let mut best = 0usize;
        for start in 1..n {
            for k in 0..n {
                let a = self.0 .0[(start + k) % n];
                let b = self.0 .0[(best + k) % n];
                match a.cmp(&b) {
                    std::cmp::Ordering::Less => {
                        best = start;
                        break;
                    }
                    std::cmp::Ordering::Greater => break,
                    std::cmp::Ordering::Equal => {}
                }
            }
        }
        self.0 .0.rotate_left(best);
        self
    }
}

/// One invariant violation found by [`validate_graph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphViolation {
    NoOutgoing(VertexId),
    NoIncoming(VertexId),
    ZeroWeight(ArrowId),
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphViolation::NoOutgoing(v) => write!(f, "vertex {v} has no outgoing arrow"),
            GraphViolation::NoIncoming(v) => write!(f, "vertex {v} has no incoming arrow"),
            GraphViolation::ZeroWeight(a) => write!(f, "arrow {a} has weight 0"),
        }
    }
}

/// Checks the graph invariants; an empty report means the graph is legal.
pub fn validate_graph(g: &DiGraph) -> Vec<GraphViolation> {
    let mut out_deg = vec![0usize; g.vertex_count()];
    let mut in_deg = vec![0usize; g.vertex_count()];
    let mut report = Vec::new();
    for a in g.arrow_ids() {
        out_deg[g.source(a).0] += 1;
        in_deg[g.target(a).0] += 1;
        if g.weight(a) == 0 {
            report.push(GraphViolation::ZeroWeight(a));
        }
    }
    for v in g.vertices() {
        if out_deg[v.0] == 0 {
            report.push(GraphViolation::NoOutgoing(v));
        }
        if in_deg[v.0] == 0 {
            report.push(GraphViolation::NoIncoming(v));
        }
    }
    report
}

/// Vertex-level strong connectivity. Since every vertex of a legal graph has
/// both in- and out-arrows, this is equivalent to the arrow-to-arrow path
/// condition (a path starting with any given arrow and ending with any other).
pub fn is_strongly_connected(g: &DiGraph) -> bool {
    if g.vertex_count() == 0 {
        return false;
    }
    let reach = |forward: bool| -> usize {
        let mut seen = vec![false; g.vertex_count()];
        let mut stack = vec![VertexId(0)];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for a in g.arrow_ids() {
                let (from, to) = if forward {
                    (g.source(a), g.target(a))
                } else {
                    (g.target(a), g.source(a))
                };
                if from == v && !seen[to.0] {
                    seen[to.0] = true;
                    count += 1;
                    stack.push(to);
                }
            }
        }
        count
    };
    reach(true) == g.vertex_count() && reach(false) == g.vertex_count()
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("simple-cycle enumeration exceeded the budget of {0} cycles; raise the budget or telescope first")]
pub struct CycleBudgetExceeded(pub usize);

/// Enumerates all vertex-simple directed cycles, each in canonical rotation
/// (lexicographically least arrow-index sequence), in deterministic order.
///
/// Each cycle is reported with its minimal arrow index first, which for
/// cycles without repeated arrows is exactly the canonical rotation. Fails
/// loudly when more than `max_count` cycles exist.
pub fn enumerate_simple_cycles(
    g: &DiGraph,
    max_count: usize,
) -> Result<Vec<ArrowLoop>, CycleBudgetExceeded> {
    let mut cycles: Vec<Vec<ArrowId>> = Vec::new();
    // Cycles whose minimal arrow is `first`: DFS over arrows with larger ids,
    // never revisiting a vertex.
    for first in g.arrow_ids() {
        let home = g.source(first);
        if g.target(first) == home {
            cycles.push(vec![first]);
            if cycles.len() > max_count {
                return Err(CycleBudgetExceeded(max_count));
            }
            continue;
        }
        let mut path = vec![first];
        let mut visited: BTreeSet<VertexId> = BTreeSet::new();
        visited.insert(home);
        visited.insert(g.target(first));
        // Iterative DFS; frames hold the next arrow index to try from the
        // current endpoint.
        let mut frames: Vec<usize> = vec![0];
        while let Some(next_idx) = frames.last_mut() {
            let here = g.target(*path.last().unwrap());
            let mut advanced = false;
            while *next_idx < g.arrow_count() {
                let cand = ArrowId(*next_idx);
                *next_idx += 1;
                if cand <= first || g.source(cand) != here {
                    continue;
                }
                let to = g.target(cand);
                if to == home {
                    let mut cycle = path.clone();
                    cycle.push(cand);
                    cycles.push(cycle);
                    if cycles.len() > max_count {
                        return Err(CycleBudgetExceeded(max_count));
                    }
                } else if !visited.contains(&to) {
                    visited.insert(to);
                    path.push(cand);
                    frames.push(0);
                    advanced = true;
                    break;
                }
            }
            if !advanced && frames.last().map(|&i| i >= g.arrow_count()) == Some(true) {
                frames.pop();
                if let Some(done) = path.pop() {
                    visited.remove(&g.target(done));
                }
            }
        }
    }
    cycles.sort();
    Ok(cycles
        .into_iter()
        .map(|c| ArrowLoop::new(g, c).expect("enumerated cycles are closed"))
        .collect())
}

/// Enumerates all rooted closed arrow walks of length `1..=max_len`
/// (the starting arrow is distinguished; rotations count separately).
/// Both the walks found and the search steps spent count against the budget.
pub fn enumerate_loops(
    g: &DiGraph,
    max_len: usize,
    max_count: usize,
) -> Result<Vec<ArrowLoop>, CycleBudgetExceeded> {
    let mut out = Vec::new();
    let mut walk: Vec<ArrowId> = Vec::new();
    fn dfs(
        g: &DiGraph,
        walk: &mut Vec<ArrowId>,
        home: VertexId,
        max_len: usize,
        max_count: usize,
        steps: &mut usize,
        out: &mut Vec<Vec<ArrowId>>,
    ) -> Result<(), CycleBudgetExceeded> {
        *steps += 1;
        if *steps > max_count {
            return Err(CycleBudgetExceeded(max_count));
        }
        let here = g.target(*walk.last().unwrap());
        if here == home {
            out.push(walk.clone());
            if out.len() > max_count {
                return Err(CycleBudgetExceeded(max_count));
            }
        }
        if walk.len() == max_len {
            return Ok(());
        }
        for a in g.arrow_ids() {
            if g.source(a) == here {
                walk.push(a);
                dfs(g, walk, home, max_len, max_count, steps, out)?;
                walk.pop();
            }
        }
        Ok(())
    }
    let mut raw = Vec::new();
    let mut steps = 0usize;
    for start in g.arrow_ids() {
        walk.push(start);
        dfs(
            g,
            &mut walk,
            g.source(start),
            max_len,
            max_count,
            &mut steps,
            &mut raw,
        )?;
        walk.pop();
    }
    raw.sort();
    for w in raw {
        out.push(ArrowLoop::new(g, w).expect("closed by construction"));
    }
    Ok(out)
}
