//! The follow-the-arrow dynamics on threads of a cover, and the adic
//! successor map on Bratteli paths.
//!
//! A thread holds one arrow per level together with a unit position inside
//! that arrow's weight; positions project consistently downward through the
//! bonding maps. Stepping advances every level's position by one; levels
//! that run off the end of their arrow are re-derived from the shallowest
//! level that does not. When every level runs off the end, the successor
//! arrow at the top is taken only if it is unique; otherwise the truncation
//! is too shallow to decide and the step fails.

use thiserror::Error;

use crate::bratteli::{BratteliDiagram, BvPath};
use crate::digraph::ArrowId;
use crate::tower::CoverTower;

/// One arrow per level with a unit position inside each arrow.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Thread {
    arrows: Vec<ArrowId>,
    positions: Vec<u64>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ThreadError {
    #[error("thread has {have} levels, tower has {want}")]
    LevelMismatch { have: usize, want: usize },
    #[error("position {pos} exceeds the weight {weight} of arrow {arrow} at level {level}")]
    PositionOutOfRange {
        level: usize,
        arrow: usize,
        pos: u64,
        weight: u64,
    },
    #[error("level {level}: arrow {have} is not the projection {want} of the level above")]
    Incompatible {
        level: usize,
        have: usize,
        want: usize,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("successor is not determined at depth {0}: the truncation is too shallow to resolve the top level")]
    IndeterminateAtDepth(usize),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ItineraryError {
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("level-0 arrow {arrow} has weight {weight}; itineraries need unit weights at level 0")]
    WeightBaseNotUnit { arrow: usize, weight: u64 },
}

/// How a single step was resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepResolution {
    /// Number of levels that rolled over into a new arrow; equivalently the
    /// level whose arrow absorbed the step. Bounded by the tower depth.
    pub lookahead_depth_used: usize,
}

/// Projects `(arrow, pos)` at level `n` one level down.
fn project_down(t: &CoverTower, n: usize, arrow: ArrowId, pos: u64) -> (ArrowId, u64) {
    let image = t.bonding(n).image(arrow);
    let coarse = t.level(n - 1);
    let mut acc = 0u64;
    for &b in image.arrows() {
        let w = coarse.weight(b);
        if pos < acc + w {
            return (b, pos - acc);
        }
        acc += w;
    }
    unreachable!("position exceeds the image weight; weight conservation violated");
}

impl Thread {
    /// Builds a thread from a top-level arrow and a unit position inside it,
    /// projecting downward through the bonding maps.
    pub fn from_top(t: &CoverTower, top: ArrowId, pos: u64) -> Self {
        let depth = t.depth();
        let mut arrows = vec![ArrowId(0); depth + 1];
        let mut positions = vec![0u64; depth + 1];
        arrows[depth] = top;
        positions[depth] = pos;
        for n in (1..=depth).rev() {
            let (a, p) = project_down(t, n, arrows[n], positions[n]);
            arrows[n - 1] = a;
            positions[n - 1] = p;
        }
        Thread { arrows, positions }
    }

    /// The thread at position 0 of the given top arrow.
    pub fn minimal(t: &CoverTower, top: ArrowId) -> Self {
        Thread::from_top(t, top, 0)
    }

    pub fn arrow(&self, level: usize) -> ArrowId {
        self.arrows[level]
    }

    pub fn position(&self, level: usize) -> u64 {
        self.positions[level]
    }

    pub fn arrows(&self) -> &[ArrowId] {
        &self.arrows
    }

    /// The per-level arrows without positions.
    pub fn footprint(&self) -> Vec<ArrowId> {
        self.arrows.clone()
    }

    /// Checks positions are in range and projections are consistent.
    pub fn validate(&self, t: &CoverTower) -> Result<(), ThreadError> {
        if self.arrows.len() != t.depth() + 1 {
            return Err(ThreadError::LevelMismatch {
                have: self.arrows.len(),
                want: t.depth() + 1,
            });
        }
        for n in 0..=t.depth() {
            let w = t.level(n).weight(self.arrows[n]);
            if self.positions[n] >= w {
                return Err(ThreadError::PositionOutOfRange {
                    level: n,
                    arrow: self.arrows[n].0,
                    pos: self.positions[n],
                    weight: w,
                });
            }
        }
        for n in (1..=t.depth()).rev() {
            let (a, p) = project_down(t, n, self.arrows[n], self.positions[n]);
            if a != self.arrows[n - 1] || p != self.positions[n - 1] {
                return Err(ThreadError::Incompatible {
                    level: n - 1,
                    have: self.arrows[n - 1].0,
                    want: a.0,
                });
            }
        }
        Ok(())
    }
}

/// Advances a thread one step, reporting how it was resolved.
pub fn step_with_resolution(
    t: &CoverTower,
    x: &Thread,
) -> Result<(Thread, StepResolution), StepError> {
    let depth = t.depth();
    // Rollover propagates downward, so the non-rolling levels form a suffix.
    let resolving = (0..=depth).find(|&n| x.position(n) + 1 < t.level(n).weight(x.arrow(n)));
    match resolving {
        Some(m) => {
            let mut out = x.clone();
            for n in m..=depth {
                out.positions[n] += 1;
            }
            for n in (1..=m).rev() {
                let (a, p) = project_down(t, n, out.arrows[n], out.positions[n]);
                out.arrows[n - 1] = a;
                out.positions[n - 1] = p;
            }
            Ok((
                out,
                StepResolution {
                    lookahead_depth_used: m,
                },
            ))
        }
        None => {
            // Every level rolled over: the top arrow is exhausted and the
            // continuation is known only when it is forced.
            let g = t.level(depth);
            let candidates = g.outgoing(g.target(x.arrow(depth)));
            if candidates.len() == 1 {
                Ok((
                    Thread::minimal(t, candidates[0]),
                    StepResolution {
                        lookahead_depth_used: depth,
                    },
                ))
            } else {
                Err(StepError::IndeterminateAtDepth(depth))
            }
        }
    }
}

/// The successor thread under the follow-the-arrow map.
pub fn step(t: &CoverTower, x: &Thread) -> Result<Thread, StepError> {
    step_with_resolution(t, x).map(|(y, _)| y)
}

/// `[x, f(x), ..., f^k(x)]`; fails with the step error when the truncation
/// cannot resolve some step.
pub fn orbit(t: &CoverTower, x: &Thread, k: usize) -> Result<Vec<Thread>, StepError> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(x.clone());
    for _ in 0..k {
        let next = step(t, out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

/// The word of level-0 loop labels along the first `k` iterates.
pub fn itinerary(t: &CoverTower, x: &Thread, k: usize) -> Result<String, ItineraryError> {
    let base = t.level(0);
    for a in base.arrow_ids() {
        let w = base.weight(a);
        if w != 1 {
            return Err(ItineraryError::WeightBaseNotUnit {
                arrow: a.0,
                weight: w,
            });
        }
    }
    let mut word = String::new();
    let mut cur = x.clone();
    for j in 0..k {
        word.push_str(&base.arrow_label(cur.arrow(0)));
        if j + 1 < k {
            cur = step(t, &cur)?;
        }
    }
    Ok(word)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VershikError {
    #[error("the path is maximal at every level of the truncation")]
    MaxPath,
    #[error("path and diagram have different depths")]
    DepthMismatch,
}

/// The adic successor of a path: the shallowest non-maximal edge moves to
/// its order-successor and everything below is reset to the minimal path
/// into the successor's source.
pub fn vershik_step(d: &BratteliDiagram, p: &BvPath) -> Result<BvPath, VershikError> {
    if p.edges().len() != d.edge_levels() {
        return Err(VershikError::DepthMismatch);
    }
    for i in 1..=d.edge_levels() {
        let e = p.edge(i);
        let target = d.edge(i, e).target;
        let order = d.incoming(i, target);
        let rank = order
            .iter()
            .position(|&x| x == e)
            .expect("edge enters its target");
        if rank + 1 < order.len() {
            let successor = order[rank + 1];
            let mut edges = p.edges().to_vec();
            edges[i - 1] = successor;
            // Minimal path from the root to the successor's source.
            let mut v = d.edge(i, successor).source;
            for j in (1..i).rev() {
                let min_edge = d.incoming(j, v)[0];
                edges[j - 1] = min_edge;
                v = d.edge(j, min_edge).source;
            }
            return Ok(BvPath::new(d, edges).expect("successor path is connected"));
        }
    }
    Err(VershikError::MaxPath)
}
