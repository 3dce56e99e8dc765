//! Finite-depth graph covers: level graphs joined by bonding maps.
//!
//! A tower holds graphs `G_0..G_N` and bonding maps `pi_1..pi_N`, where
//! `pi_n` sends each arrow of `G_n` to a path in `G_{n-1}` whose weights sum
//! to the arrow's own weight. The unweighted case is the special case of
//! length-1 image paths and unit weights throughout.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::digraph::{validate_graph, Arrow, ArrowId, ArrowPath, DiGraph, VertexId};

/// Per-arrow image paths of one bonding map `pi_n : G_n -> G_{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BondingMap {
    images: Vec<ArrowPath>,
}

impl BondingMap {
    /// `images[i]` is the image path (in the coarser graph) of arrow `i` of
    /// the finer graph. Path well-formedness is validated against the coarser
    /// graph; the cover axioms are checked by [`validate_tower`].
    pub fn new(
        coarse: &DiGraph,
        images: Vec<Vec<ArrowId>>,
    ) -> Result<Self, crate::digraph::PathError> {
        let images = images
            .into_iter()
            .map(|arrows| ArrowPath::new(coarse, arrows))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BondingMap { images })
    }

    pub fn image(&self, a: ArrowId) -> &ArrowPath {
        &self.images[a.0]
    }

    pub fn arrow_count(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[ArrowPath] {
        &self.images
    }
}

/// Non-negative integer matrix counting how often each coarser arrow appears
/// in the image of each finer arrow. Rows are indexed by the finer level's
/// arrows, columns by the coarser level's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindingMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl WindingMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        WindingMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = WindingMatrix::zero(n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<u64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        WindingMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: u64) {
        self.entries[row * self.cols + col] = v;
    }

    pub fn row(&self, row: usize) -> &[u64] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column_sum(&self, col: usize) -> u64 {
        (0..self.rows).map(|r| self.get(r, col)).sum()
    }

    pub fn row_sum(&self, row: usize) -> u64 {
        self.row(row).iter().sum()
    }

    /// `self * rhs`, valid when `self` is the finer of two consecutive
    /// winding matrices: telescoped winding matrices multiply this way.
    pub fn multiply(&self, rhs: &WindingMatrix) -> WindingMatrix {
        assert_eq!(self.cols, rhs.rows, "winding matrix shape mismatch");
        let mut out = WindingMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Applies the matrix to a column vector of coarser-level values.
    pub fn apply(&self, coarse: &[u64]) -> Vec<u64> {
        assert_eq!(coarse.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(coarse)
                    .map(|(&m, &w)| m.checked_mul(w).expect("weight overflow"))
                    .sum()
            })
            .collect()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.entries.iter().all(|&e| e > 0)
    }
}

impl fmt::Display for WindingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// A finite-depth graph cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverTower {
    levels: Vec<DiGraph>,
    bondings: Vec<BondingMap>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TowerError {
    #[error("tower needs at least one level")]
    NoLevels,
    #[error("level {level}: bonding map covers {have} arrows but the graph has {want}")]
    BondingArity {
        level: usize,
        have: usize,
        want: usize,
    },
    #[error("level index {n} out of range (tower depth {depth})")]
    LevelOutOfRange { n: usize, depth: usize },
    #[error("telescoping range must satisfy m < n; got m={m}, n={n}")]
    BadTelescopeRange { m: usize, n: usize },
    #[error(
        "level-0 arrow {arrow} has weight {weight}; weight recursion requires unit base weights"
    )]
    WeightBaseNotUnit { arrow: usize, weight: u64 },
    #[error("cannot contract: image of a contracted arrow does not align with contracted arrows at the coarser level (level {level}, arrow {arrow})")]
    ContractionMisaligned { level: usize, arrow: usize },
}

impl CoverTower {
    /// Builds a tower from level graphs and bonding maps; `bondings[k]`
    /// sends arrows of `levels[k+1]` to paths in `levels[k]`.
    pub fn new(levels: Vec<DiGraph>, bondings: Vec<BondingMap>) -> Result<Self, TowerError> {
        if levels.is_empty() {
            return Err(TowerError::NoLevels);
        }
        assert_eq!(
            bondings.len(),
            levels.len() - 1,
            "need exactly one bonding map between consecutive levels"
        );
        for (k, b) in bondings.iter().enumerate() {
            let want = levels[k + 1].arrow_count();
            if b.arrow_count() != want {
                return Err(TowerError::BondingArity {
                    level: k + 1,
                    have: b.arrow_count(),
                    want,
                });
            }
        }
        Ok(CoverTower { levels, bondings })
    }

    /// Depth `N`: levels are `G_0..G_N`.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &DiGraph {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[DiGraph] {
        &self.levels
    }

    /// Bonding map `pi_n : G_n -> G_{n-1}` for `1 <= n <= depth`.
    pub fn bonding(&self, n: usize) -> &BondingMap {
        &self.bondings[n - 1]
    }

    pub fn bondings(&self) -> &[BondingMap] {
        &self.bondings
    }

    /// Winding matrix of `pi_n`: entry `(a, b)` counts appearances of the
    /// level-`(n-1)` arrow `b` in the image of the level-`n` arrow `a`.
    pub fn winding_matrix(&self, n: usize) -> Result<WindingMatrix, TowerError> {
        if n == 0 || n > self.depth() {
            return Err(TowerError::LevelOutOfRange {
                n,
                depth: self.depth(),
            });
        }
        let rows = self.levels[n].arrow_count();
        let cols = self.levels[n - 1].arrow_count();
        let mut m = WindingMatrix::zero(rows, cols);
        for a in self.levels[n].arrow_ids() {
            for &b in self.bonding(n).image(a).arrows() {
                let v = m.get(a.0, b.0) + 1;
                m.set(a.0, b.0, v);
            }
        }
        Ok(m)
    }

    /// Image of the level-`n` arrow `a` in `G_m` under `pi_{m+1} o ... o pi_n`.
    pub fn telescoped_image(&self, m: usize, n: usize, a: ArrowId) -> Vec<ArrowId> {
        assert!(m < n && n <= self.depth());
        let mut path = vec![a];
        for k in (m + 1..=n).rev() {
            let mut next = Vec::new();
            for &x in &path {
                next.extend_from_slice(self.bonding(k).image(x).arrows());
            }
            path = next;
        }
        path
    }

    /// Removes levels `m+1..n`, composing the bonding maps path-wise.
    pub fn telescope(&self, m: usize, n: usize) -> Result<CoverTower, TowerError> {
        if n > self.depth() {
            return Err(TowerError::LevelOutOfRange {
                n,
                depth: self.depth(),
            });
        }
        if m >= n {
            return Err(TowerError::BadTelescopeRange { m, n });
        }
        let mut levels: Vec<DiGraph> = self.levels[..=m].to_vec();
        levels.extend_from_slice(&self.levels[n..]);
        let mut bondings: Vec<BondingMap> = self.bondings[..m].to_vec();
        let composed = self.levels[n]
            .arrow_ids()
            .map(|a| self.telescoped_image(m, n, a))
            .collect();
        bondings.push(BondingMap::new(&self.levels[m], composed).expect("composed paths chain"));
        bondings.extend_from_slice(&self.bondings[n..]);
        CoverTower::new(levels, bondings)
    }

    /// Weight vector at level `n`, computed as `W^n * ... * W^1 * 1` from the
    /// all-ones base. Requires unit weights at level 0.
    pub fn weights_vector(&self, n: usize) -> Result<Vec<u64>, TowerError> {
        for a in self.levels[0].arrow_ids() {
            let w = self.levels[0].weight(a);
            if w != 1 {
                return Err(TowerError::WeightBaseNotUnit {
                    arrow: a.0,
                    weight: w,
                });
            }
        }
        if n > self.depth() {
            return Err(TowerError::LevelOutOfRange {
                n,
                depth: self.depth(),
            });
        }
        let mut w = vec![1u64; self.levels[0].arrow_count()];
        for k in 1..=n {
            w = self.winding_matrix(k)?.apply(&w);
        }
        Ok(w)
    }

    /// Replaces `G_0` by a single-loop graph, sending every old base arrow to
    /// the one loop. Image lengths (hence weights) are preserved when the old
    /// base arrows all have weight 1.
    pub fn collapse_base(&self) -> CoverTower {
        let mut levels = self.levels.clone();
        levels[0] = DiGraph::single_loop();
        let mut bondings = self.bondings.clone();
        if !bondings.is_empty() {
            let images = self.levels[1]
                .arrow_ids()
                .map(|a| vec![ArrowId(0); self.bonding(1).image(a).len()])
                .collect();
            bondings[0] = BondingMap::new(&levels[0], images).expect("loops chain");
        }
        CoverTower::new(levels, bondings).expect("same shape")
    }

    /// Contracts maximal chains through regular vertices (one in, one out)
    /// into single weighted arrows, per level. Vertices listed in `keep[n]`
    /// survive contraction even if regular. Bondings are re-expressed on the
    /// contracted arrows; if an image path does not decompose into whole
    /// contracted arrows the operation fails.
    pub fn contract_regular(&self, keep: &[BTreeSet<VertexId>]) -> Result<CoverTower, TowerError> {
        assert_eq!(keep.len(), self.levels.len());
        // Survivors are branch points plus kept vertices, closed downward:
        // the image vertex of a survivor must itself survive, or image paths
        // would end inside a contracted chain one level down.
        let mut survivors: Vec<BTreeSet<VertexId>> = self
            .levels
            .iter()
            .enumerate()
            .map(|(n, g)| {
                g.vertices()
                    .filter(|&v| {
                        g.outgoing(v).len() != 1 || g.incoming(v).len() != 1 || keep[n].contains(&v)
                    })
                    .collect()
            })
            .collect();
        for n in (1..=self.depth()).rev() {
            let fine = &self.levels[n];
            let coarse = &self.levels[n - 1];
            let images: Vec<VertexId> = survivors[n]
                .iter()
                .map(|&v| {
                    let out = fine.outgoing(v);
                    coarse.source(self.bonding(n).image(out[0]).first())
                })
                .collect();
            survivors[n - 1].extend(images);
        }
        // Per level: the contracted arrow list as paths of original arrows.
        let mut new_levels: Vec<DiGraph> = Vec::new();
        let mut paths_per_level: Vec<Vec<Vec<ArrowId>>> = Vec::new();
        for (n, g) in self.levels.iter().enumerate() {
            let regular: Vec<bool> = g.vertices().map(|v| !survivors[n].contains(&v)).collect();
            // Walk forward from every arrow that starts at a surviving vertex.
            let mut paths: Vec<Vec<ArrowId>> = Vec::new();
            let mut consumed = 0usize;
            for a in g.arrow_ids() {
                if regular[g.source(a).0] {
                    continue;
                }
                let mut path = vec![a];
                let mut here = g.target(a);
                while regular[here.0] {
                    let next = g.outgoing(here)[0];
                    path.push(next);
                    here = g.target(next);
                }
                consumed += path.len();
                paths.push(path);
            }
            // A cycle of regular vertices touches no survivor and cannot
            // contract to an arrow with endpoints.
            if consumed != g.arrow_count() {
                return Err(TowerError::ContractionMisaligned { level: n, arrow: 0 });
            }
            let survivors: Vec<VertexId> = g.vertices().filter(|v| !regular[v.0]).collect();
            let vertex_index = |v: VertexId| survivors.iter().position(|&s| s == v).unwrap();
            let names = survivors
                .iter()
                .map(|&v| g.vertex_name(v).to_owned())
                .collect();
            let arrows = paths
                .iter()
                .map(|p| {
                    let w: u64 = p.iter().map(|&x| g.weight(x)).sum();
                    let mut arrow = Arrow::weighted(
                        VertexId(vertex_index(g.source(p[0]))),
                        VertexId(vertex_index(g.target(*p.last().unwrap()))),
                        w,
                    );
                    arrow.label = g.arrow(p[0]).label.clone();
                    arrow
                })
                .collect();
            new_levels.push(DiGraph::new(names, arrows).expect("contracted graph well-formed"));
            paths_per_level.push(paths);
        }
        // Re-express bondings: expand contracted arrow -> original path ->
        // original image path -> decompose into coarser contracted arrows.
        let mut new_bondings = Vec::new();
        for n in 1..=self.depth() {
            let coarse_paths = &paths_per_level[n - 1];
            // Index original coarse arrows that START a contracted arrow.
            let mut starts: Vec<Option<usize>> = vec![None; self.levels[n - 1].arrow_count()];
            for (i, p) in coarse_paths.iter().enumerate() {
                starts[p[0].0] = Some(i);
            }
            let mut images: Vec<Vec<ArrowId>> = Vec::new();
            for (fi, fine_path) in paths_per_level[n].iter().enumerate() {
                let mut original: Vec<ArrowId> = Vec::new();
                for &x in fine_path {
                    original.extend_from_slice(self.bonding(n).image(x).arrows());
                }
                let mut decomposed: Vec<ArrowId> = Vec::new();
                let mut i = 0;
                while i < original.len() {
                    let Some(c) = starts[original[i].0] else {
                        return Err(TowerError::ContractionMisaligned {
                            level: n,
                            arrow: fi,
                        });
                    };
                    let chunk = &coarse_paths[c];
                    if original[i..].len() < chunk.len()
                        || &original[i..i + chunk.len()] != chunk.as_slice()
                    {
                        return Err(TowerError::ContractionMisaligned {
                            level: n,
                            arrow: fi,
                        });
                    }
                    decomposed.push(ArrowId(c));
                    i += chunk.len();
                }
                images.push(decomposed);
            }
            new_bondings.push(
                BondingMap::new(&new_levels[n - 1], images)
                    .map_err(|_| TowerError::ContractionMisaligned { level: n, arrow: 0 })?,
            );
        }
        CoverTower::new(new_levels, new_bondings)
    }
}

/// Axiom flags for one bonding map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BondingReport {
    /// Bonding index `n` (maps `G_n` to `G_{n-1}`).
    pub n: usize,
    pub edge_surjective: bool,
    pub positive_directional: bool,
    /// Informational: not required for a legal cover.
    pub negative_directional: bool,
    pub vertex_consistent: bool,
    pub weight_conserving: bool,
    pub notes: Vec<String>,
}

/// Validation report for a whole tower.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerReport {
    pub graph_violations: Vec<(usize, Vec<crate::digraph::GraphViolation>)>,
    pub base_has_single_vertex: bool,
    pub bondings: Vec<BondingReport>,
}

impl TowerReport {
    /// A tower is legal when the base is a single vertex, all level graphs
    /// are legal, and every bonding is edge surjective, positive directional,
    /// vertex-consistent and weight conserving. Negative directionality is
    /// reported but not required.
    pub fn is_legal(&self) -> bool {
        self.base_has_single_vertex
            && self.graph_violations.iter().all(|(_, v)| v.is_empty())
            && self.bondings.iter().all(|b| {
                b.edge_surjective
                    && b.positive_directional
                    && b.vertex_consistent
                    && b.weight_conserving
            })
    }

    pub fn negative_directional(&self) -> bool {
        self.bondings.iter().all(|b| b.negative_directional)
    }
}

impl fmt::Display for TowerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "base single vertex: {}",
            if self.base_has_single_vertex {
                "yes"
            } else {
                "no"
            }
        )?;
        for (n, v) in &self.graph_violations {
            if !v.is_empty() {
                for viol in v {
                    writeln!(f, "level {n}: {viol}")?;
                }
            }
        }
        for b in &self.bondings {
            writeln!(
                f,
                "bonding {}: edge-surjective={} positive-directional={} negative-directional={} vertex-consistent={} weight-conserving={}",
                b.n,
                b.edge_surjective,
                b.positive_directional,
                b.negative_directional,
                b.vertex_consistent,
                b.weight_conserving
            )?;
            for note in &b.notes {
                writeln!(f, "  {note}")?;
            }
        }
        writeln!(f, "legal: {}", if self.is_legal() { "yes" } else { "no" })
    }
}

/// Checks the cover axioms level by level and bonding by bonding.
pub fn validate_tower(t: &CoverTower) -> TowerReport {
    let graph_violations = t
        .levels()
        .iter()
        .enumerate()
        .map(|(n, g)| (n, validate_graph(g)))
        .collect();
    let base_has_single_vertex = t.level(0).vertex_count() == 1;
    let mut bondings = Vec::new();
    for n in 1..=t.depth() {
        let fine = t.level(n);
        let coarse = t.level(n - 1);
        let pi = t.bonding(n);
        let mut notes = Vec::new();

        let mut covered = vec![false; coarse.arrow_count()];
        for a in fine.arrow_ids() {
            for &b in pi.image(a).arrows() {
                covered[b.0] = true;
            }
        }
        let edge_surjective = covered.iter().all(|&c| c);
        if !edge_surjective {
            let missing: Vec<String> = covered
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| i.to_string())
                .collect();
            notes.push(format!(
                "arrows of level {} not covered by any image: {}",
                n - 1,
                missing.join(", ")
            ));
        }

        // Positive directional: equal sources imply equal final image targets.
        let mut positive_directional = true;
        // Negative directional: equal targets imply equal first image sources.
        let mut negative_directional = true;
        for a in fine.arrow_ids() {
            for b in fine.arrow_ids() {
                if a >= b {
                    continue;
                }
                if fine.source(a) == fine.source(b) {
                    let ta = coarse.target(pi.image(a).last());
                    let tb = coarse.target(pi.image(b).last());
                    if ta != tb {
                        positive_directional = false;
                        notes.push(format!(
                            "arrows {a} and {b} share a source but their images end at different vertices"
                        ));
                    }
                }
                if fine.target(a) == fine.target(b) {
                    let sa = coarse.source(pi.image(a).first());
                    let sb = coarse.source(pi.image(b).first());
                    if sa != sb {
                        negative_directional = false;
                    }
                }
            }
        }

        // Vertex consistency: consecutive arrows have consecutive images.
        let mut vertex_consistent = true;
        for a in fine.arrow_ids() {
            for b in fine.arrow_ids() {
                if fine.target(a) == fine.source(b) {
                    let ta = coarse.target(pi.image(a).last());
                    let sb = coarse.source(pi.image(b).first());
                    if ta != sb {
                        vertex_consistent = false;
                        notes.push(format!(
                            "arrow {b} follows arrow {a} but their images do not chain"
                        ));
                    }
                }
            }
        }

        let mut weight_conserving = true;
        for a in fine.arrow_ids() {
            let w = fine.weight(a);
            let img: u64 = pi.image(a).total_weight(coarse);
            if w != img {
                weight_conserving = false;
                notes.push(format!(
                    "arrow {a} has weight {w} but its image weighs {img}"
                ));
            }
        }

        bondings.push(BondingReport {
            n,
            edge_surjective,
            positive_directional,
            negative_directional,
            vertex_consistent,
            weight_conserving,
            notes,
        });
    }
    TowerReport {
        graph_violations,
        base_has_single_vertex,
        bondings,
    }
}
