//! Kakutani-Rokhlin tower data and its translation into a graph cover.
//!
//! A KR tower is ingested as combinatorial data: per level, column heights,
//! the base-transition relation (which columns a column's top can fall
//! into), and each column's decomposition along the previous level's
//! columns. The decomposition encodes the refinement map: climbing column
//! `i` walks through the listed coarser columns bottom to top.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::digraph::{Arrow, ArrowId, DiGraph, VertexId};
use crate::tower::{BondingMap, CoverTower};

/// One level of a KR tower.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KRLevel {
    /// Height of each column.
    pub heights: Vec<u64>,
    /// Per column: the columns its top can transition into.
    pub transitions: Vec<BTreeSet<usize>>,
    /// Per column: the coarser columns visited while climbing, in order.
    /// Empty at level 0.
    pub decomposition: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KRTower {
    pub levels: Vec<KRLevel>,
}

/// The named axioms checked by [`validate_kr`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KrViolation {
    /// Level 0 must be the trivial one-column, height-one partition.
    BaseNotTrivial,
    /// A column's base atom does not refine into a base atom.
    Kr1 {
        level: usize,
        column: usize,
    },
    /// Heights do not decompose along the visited columns, or consecutive
    /// visited columns are not an allowed transition.
    Kr2 {
        level: usize,
        column: usize,
        detail: String,
    },
    /// Some column never visits some coarser column.
    Kr5 {
        level: usize,
        column: usize,
        missing: usize,
    },
    /// Some base atom does not refine into column 0's base.
    Kr6 {
        level: usize,
        column: usize,
    },
    Shape {
        level: usize,
        detail: String,
    },
}

impl std::fmt::Display for KrViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KrViolation::BaseNotTrivial => write!(f, "level 0 is not the trivial partition"),
            KrViolation::Kr1 { level, column } => {
                write!(f, "KR1: level {level} column {column} base does not nest")
            }
            KrViolation::Kr2 {
                level,
                column,
                detail,
            } => {
                write!(f, "KR2: level {level} column {column}: {detail}")
            }
            KrViolation::Kr5 {
                level,
                column,
                missing,
            } => write!(
                f,
                "KR5: level {level} column {column} never visits column {missing}"
            ),
            KrViolation::Kr6 { level, column } => write!(
                f,
                "KR6: level {level} column {column} base lies outside column 0's base"
            ),
            KrViolation::Shape { level, detail } => write!(f, "level {level}: {detail}"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("KR data invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct KrInvalid(pub Vec<KrViolation>);

/// Validation report: all violations, with KR5 and KR6 kept separate since
/// translation needs only the structural axioms.
#[derive(Debug, Clone)]
pub struct KrReport {
    pub structural: Vec<KrViolation>,
    pub kr5: Vec<KrViolation>,
    pub kr6: Vec<KrViolation>,
}

impl KrReport {
    pub fn structurally_valid(&self) -> bool {
        self.structural.is_empty()
    }
    pub fn kr5_holds(&self) -> bool {
        self.kr5.is_empty()
    }
    pub fn kr6_holds(&self) -> bool {
        self.kr6.is_empty()
    }
}

/// Checks the axioms of a nested KR sequence.
pub fn validate_kr(k: &KRTower) -> KrReport {
    let mut structural = Vec::new();
    let mut kr5 = Vec::new();
    let mut kr6 = Vec::new();
    if k.levels.is_empty()
        || k.levels[0].heights != vec![1]
        || !k.levels[0].decomposition.iter().all(|d| d.is_empty())
    {
        structural.push(KrViolation::BaseNotTrivial);
    }
    for (n, level) in k.levels.iter().enumerate() {
        let cols = level.heights.len();
        if level.transitions.len() != cols || level.decomposition.len() != cols {
            structural.push(KrViolation::Shape {
                level: n,
                detail: "heights, transitions and decomposition must agree in length".into(),
            });
            continue;
        }
        if level.heights.iter().any(|&h| h == 0) {
            structural.push(KrViolation::Shape {
                level: n,
                detail: "zero column height".into(),
            });
        }
        for (i, trans) in level.transitions.iter().enumerate() {
            if trans.is_empty() {
                structural.push(KrViolation::Shape {
                    level: n,
                    detail: format!("column {i} has no transition"),
                });
            }
            if trans.iter().any(|&j| j >= cols) {
                structural.push(KrViolation::Shape {
                    level: n,
                    detail: format!("column {i} transitions out of range"),
                });
            }
        }
        if n == 0 {
            continue;
        }
        let prev = &k.levels[n - 1];
        let prev_cols = prev.heights.len();
        for (i, decomp) in level.decomposition.iter().enumerate() {
            if decomp.is_empty() || decomp.iter().any(|&c| c >= prev_cols) {
                structural.push(KrViolation::Kr1 {
                    level: n,
                    column: i,
                });
                continue;
            }
            let total: u64 = decomp.iter().map(|&c| prev.heights[c]).sum();
            if total != level.heights[i] {
                structural.push(KrViolation::Kr2 {
                    level: n,
                    column: i,
                    detail: format!(
                        "height {} != sum {} of visited column heights",
                        level.heights[i], total
                    ),
                });
            }
            for w in decomp.windows(2) {
                if !prev.transitions[w[0]].contains(&w[1]) {
                    structural.push(KrViolation::Kr2 {
                        level: n,
                        column: i,
                        detail: format!(
                            "visited columns {} -> {} are not a transition",
                            w[0], w[1]
                        ),
                    });
                }
            }
            for missing in 0..prev_cols {
                if !decomp.contains(&missing) {
                    kr5.push(KrViolation::Kr5 {
                        level: n,
                        column: i,
                        missing,
                    });
                }
            }
            if decomp[0] != 0 {
                kr6.push(KrViolation::Kr6 {
                    level: n,
                    column: i,
                });
            }
        }
        // Transitions must refine: the jump out of a column's last visited
        // coarse column must land in the first visited column of the target.
        for (i, trans) in level.transitions.iter().enumerate() {
            for &j in trans {
                let (from, to) = (
                    *level.decomposition[i].last().unwrap_or(&0),
                    *level.decomposition[j].first().unwrap_or(&0),
                );
                if !level.decomposition[i].is_empty()
                    && !level.decomposition[j].is_empty()
                    && !prev.transitions[from].contains(&to)
                {
                    structural.push(KrViolation::Kr2 {
                        level: n,
                        column: i,
                        detail: format!(
                            "transition {i} -> {j} does not refine ({from} -> {to} missing below)"
                        ),
                    });
                }
            }
        }
    }
    KrReport {
        structural,
        kr5,
        kr6,
    }
}

/// The per-level column-visit matrices: entry `(i, c)` counts how often
/// column `i` of level `n` visits column `c` of level `n-1`.
pub fn visit_matrix(k: &KRTower, n: usize) -> crate::tower::WindingMatrix {
    let level = &k.levels[n];
    let prev_cols = k.levels[n - 1].heights.len();
    let mut m = crate::tower::WindingMatrix::zero(level.heights.len(), prev_cols);
    for (i, decomp) in level.decomposition.iter().enumerate() {
        for &c in decomp {
            let v = m.get(i, c) + 1;
            m.set(i, c, v);
        }
    }
    m
}

/// Builds the graph cover of a KR tower: level-`n` vertices are the atoms
/// `(column, floor)`, arrows climb each column and jump from tops into
/// bases, and the bonding maps are the refinement inclusions.
///
/// Requires the structural axioms; KR5 and KR6 violations are allowed here
/// and only weaken the dynamical guarantees.
pub fn kr_to_cover(k: &KRTower) -> Result<CoverTower, KrInvalid> {
    let report = validate_kr(k);
    if !report.structurally_valid() {
        return Err(KrInvalid(report.structural));
    }
    // Atom indexing per level: columns in order, floors bottom-up.
    let atom_index = |level: &KRLevel, col: usize, floor: u64| -> usize {
        let mut idx = 0usize;
        for c in 0..col {
            idx += level.heights[c] as usize;
        }
        idx + floor as usize
    };
    let mut graphs: Vec<DiGraph> = Vec::new();
    // Arrow lookup: (level, from-atom) -> arrows listed in construction order.
    let mut chain_arrow: Vec<std::collections::BTreeMap<(usize, u64), ArrowId>> = Vec::new();
    let mut jump_arrow: Vec<std::collections::BTreeMap<(usize, usize), ArrowId>> = Vec::new();
    for level in &k.levels {
        let mut names = Vec::new();
        for (i, &h) in level.heights.iter().enumerate() {
            for j in 0..h {
                names.push(format!("{i}.{j}"));
            }
        }
        let mut arrows = Vec::new();
        let mut chains = std::collections::BTreeMap::new();
        let mut jumps = std::collections::BTreeMap::new();
        for (i, &h) in level.heights.iter().enumerate() {
            for j in 0..h.saturating_sub(1) {
                chains.insert((i, j), ArrowId(arrows.len()));
                arrows.push(Arrow::new(
                    VertexId(atom_index(level, i, j)),
                    VertexId(atom_index(level, i, j + 1)),
                ));
            }
            for &t in &level.transitions[i] {
                jumps.insert((i, t), ArrowId(arrows.len()));
                arrows.push(Arrow::new(
                    VertexId(atom_index(level, i, h - 1)),
                    VertexId(atom_index(level, t, 0)),
                ));
            }
        }
        graphs.push(DiGraph::new(names, arrows).expect("atom indices in range"));
        chain_arrow.push(chains);
        jump_arrow.push(jumps);
    }
    // Refinement of an atom: walk the decomposition.
    let refine = |n: usize, col: usize, floor: u64| -> (usize, u64) {
        let decomp = &k.levels[n].decomposition[col];
        let prev = &k.levels[n - 1];
        let mut acc = 0u64;
        for &c in decomp {
            let h = prev.heights[c];
            if floor < acc + h {
                return (c, floor - acc);
            }
            acc += h;
        }
        unreachable!("heights decompose (KR2)");
    };
    let mut bondings = Vec::new();
    for n in 1..k.levels.len() {
        let level = &k.levels[n];
        let prev = &k.levels[n - 1];
        let mut images: Vec<Vec<ArrowId>> = Vec::new();
        for (i, &h) in level.heights.iter().enumerate() {
            for j in 0..h.saturating_sub(1) {
                let (c1, f1) = refine(n, i, j);
                let (c2, f2) = refine(n, i, j + 1);
                let img = if c1 == c2 && f2 == f1 + 1 {
                    chain_arrow[n - 1][&(c1, f1)]
                } else {
                    // Crossing a column boundary below.
                    debug_assert_eq!(f1, prev.heights[c1] - 1);
                    debug_assert_eq!(f2, 0);
                    jump_arrow[n - 1][&(c1, c2)]
                };
                images.push(vec![img]);
            }
            for &t in &level.transitions[i] {
                let (c1, _) = refine(n, i, h - 1);
                let (c2, _) = refine(n, t, 0);
                images.push(vec![jump_arrow[n - 1][&(c1, c2)]]);
            }
        }
        bondings.push(BondingMap::new(&graphs[n - 1], images).expect("refined arrows exist"));
    }
    Ok(CoverTower::new(graphs, bondings).expect("levels and bondings agree"))
}

/// The trivial level-0 partition.
pub fn trivial_base() -> KRLevel {
    KRLevel {
        heights: vec![1],
        transitions: vec![BTreeSet::from([0])],
        decomposition: vec![vec![]],
    }
}
