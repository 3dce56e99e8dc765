//! Property tests against brute-force oracles, plus cross-representation
//! invariants that tie the modules together.

use std::collections::BTreeSet;

use proptest::prelude::*;

use coverforge::analysis::{
    check_minimal, check_transitive, linear_recurrence_constants, measure_value_bound,
    return_words, special_vertex_counts, unique_ergodicity_diameters, ContainmentMode,
};
use coverforge::bratteli::{all_paths, BratteliDiagram, BvPath};
use coverforge::digraph::{
    enumerate_loops, enumerate_simple_cycles, is_strongly_connected, validate_graph, Arrow,
    ArrowId, DiGraph, VertexId,
};
use coverforge::dynamics::{itinerary, step, vershik_step, StepError, Thread, VershikError};
use coverforge::format;
use coverforge::generate::{odometer_cover, ostrowski_cover, sturmian_word, ContinuedFraction};
use coverforge::sadic::{SAdicSystem, Substitution};
use coverforge::tower::{validate_tower, CoverTower};
use coverforge::translate::{cover_to_bv, rauzy_tower, sadic_to_cover};

// ---------------------------------------------------------------------------
// Brute-force oracles.

/// Reachability closure by repeated relaxation.
fn brute_strongly_connected(g: &DiGraph) -> bool {
    let n = g.vertex_count();
    let mut reach = vec![vec![false; n]; n];
    for v in 0..n {
        reach[v][v] = true;
    }
    for a in g.arrow_ids() {
        reach[g.source(a).0][g.target(a).0] = true;
    }
    loop {
        let mut grew = false;
        for i in 0..n {
            for j in 0..n {
                if !reach[i][j] && (0..n).any(|k| reach[i][k] && reach[k][j]) {
                    reach[i][j] = true;
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    (0..n).all(|i| (0..n).all(|j| reach[i][j]))
}

/// An arrow lies on a vertex-simple cycle iff a vertex-simple path returns
/// from its target to its source avoiding its endpoints in between.
fn brute_arrow_on_simple_cycle(g: &DiGraph, a: ArrowId) -> bool {
    let (s, t) = (g.source(a), g.target(a));
    if s == t {
        return true;
    }
    fn dfs(g: &DiGraph, here: VertexId, goal: VertexId, visited: &mut BTreeSet<VertexId>) -> bool {
        if here == goal {
            return true;
        }
        for b in g.arrow_ids() {
            if g.source(b) == here && !visited.contains(&g.target(b)) {
                visited.insert(g.target(b));
                if dfs(g, g.target(b), goal, visited) {
                    return true;
                }
                visited.remove(&g.target(b));
            }
        }
        false
    }
    let mut visited = BTreeSet::from([t]);
    dfs(g, t, s, &mut visited)
}

fn arbitrary_graph(max_vertices: usize, max_arrows: usize) -> impl Strategy<Value = DiGraph> {
    (1..=max_vertices).prop_flat_map(move |v| {
        proptest::collection::vec((0..v, 0..v), 1..=max_arrows).prop_map(move |pairs| {
            let names = (0..v).map(|i| format!("v{i}")).collect();
            let arrows = pairs
                .into_iter()
                .map(|(s, t)| Arrow::new(VertexId(s), VertexId(t)))
                .collect();
            DiGraph::new(names, arrows).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn strong_connectivity_matches_brute_force(g in arbitrary_graph(6, 10)) {
        prop_assert_eq!(is_strongly_connected(&g), brute_strongly_connected(&g));
    }

    #[test]
    fn simple_cycles_cover_exactly_the_cyclic_arrows(g in arbitrary_graph(5, 8)) {
        let cycles = enumerate_simple_cycles(&g, 100_000).unwrap();
        // No repeated vertex inside one cycle.
        for c in &cycles {
            let mut seen = BTreeSet::new();
            for &a in c.arrows() {
                prop_assert!(seen.insert(g.source(a)));
            }
        }
        // An arrow appears in some cycle exactly when a brute-force search
        // finds a simple cycle through it.
        let on_cycle: BTreeSet<ArrowId> = cycles
            .iter()
            .flat_map(|c| c.arrows().iter().copied())
            .collect();
        for a in g.arrow_ids() {
            prop_assert_eq!(on_cycle.contains(&a), brute_arrow_on_simple_cycle(&g, a));
        }
    }

    #[test]
    fn generated_towers_validate(
        quotients in proptest::collection::vec(1u64..=4, 1..=6),
        wraps in proptest::collection::vec(2u64..=4, 1..=6),
    ) {
        let cf = ContinuedFraction::new(quotients).unwrap();
        let t = ostrowski_cover(&cf, cf.len());
        prop_assert!(validate_tower(&t).is_legal());
        // Single-vertex levels make the Ostrowski tower bi-directional.
        prop_assert!(validate_tower(&t).negative_directional());
        let o = odometer_cover(&wraps, wraps.len());
        prop_assert!(validate_tower(&o).is_legal());
    }

    #[test]
    fn random_sadic_towers_validate_and_telescope(
        seed in proptest::collection::vec(
            proptest::collection::vec(proptest::collection::vec(0usize..3, 1..=3), 3),
            2..=5,
        ),
    ) {
        // Make each substitution edge-surjective by forcing letter k into
        // the image of letter k.
        let letters: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let subs: Vec<Substitution> = seed
            .into_iter()
            .map(|mut images| {
                for (k, img) in images.iter_mut().enumerate() {
                    if !img.contains(&k) {
                        img.push(k);
                    }
                }
                Substitution::new(letters.clone(), letters.clone(), images).unwrap()
            })
            .collect();
        let depth = subs.len();
        let t = sadic_to_cover(&SAdicSystem::new(subs).unwrap());
        prop_assert!(validate_tower(&t).is_legal());
        // Telescoping multiplies winding matrices and keeps the tower legal.
        if depth >= 2 {
            let product = t.winding_matrix(depth).unwrap()
                .multiply(&t.winding_matrix(depth - 1).unwrap());
            let ts = t.telescope(depth - 2, depth).unwrap();
            prop_assert_eq!(ts.winding_matrix(depth - 1).unwrap(), product);
            let report = validate_tower(&ts);
            prop_assert!(report.is_legal());
        }
    }

    #[test]
    fn tower_documents_round_trip(
        quotients in proptest::collection::vec(1u64..=3, 1..=5),
    ) {
        let cf = ContinuedFraction::new(quotients).unwrap();
        let t = ostrowski_cover(&cf, cf.len());
        let text = format::print_tower(&t);
        let back = format::parse_tower(&text).unwrap();
        prop_assert_eq!(&t, &back);
        prop_assert_eq!(format::print_tower(&back), text);
    }
}

// ---------------------------------------------------------------------------
// Cross-representation invariants.

/// The Bratteli path of a thread: at each level, pick the incoming edge
/// whose occurrence index matches the thread's position window.
fn thread_to_path(t: &CoverTower, d: &BratteliDiagram, x: &Thread) -> BvPath {
    let mut edges = Vec::with_capacity(t.depth());
    for n in 1..=t.depth() {
        let arrow = x.arrow(n);
        let image = t.bonding(n).image(arrow);
        let coarse = t.level(n - 1);
        let mut acc = 0u64;
        let mut occurrence = 0;
        for (j, &b) in image.arrows().iter().enumerate() {
            let w = coarse.weight(b);
            if x.position(n) < acc + w {
                occurrence = j;
                break;
            }
            acc += w;
        }
        edges.push(d.incoming(n, arrow.0)[occurrence]);
    }
    BvPath::new(d, edges).expect("thread windows give a connected path")
}

#[test]
fn step_and_vershik_step_intertwine() {
    let collapse = Substitution::new(
        vec!["1".into(), "2".into(), "3".into()],
        vec!["0".into()],
        vec![vec![0], vec![0], vec![0]],
    )
    .unwrap();
    let triple = Substitution::on_alphabet(
        &["1", "2", "3"],
        &[
            ("1", &["1", "2"]),
            ("2", &["1", "3"]),
            ("3", &["1", "2", "3"]),
        ],
    )
    .unwrap();
    let mut subs = vec![collapse];
    subs.extend(vec![triple; 3]);
    let t = sadic_to_cover(&SAdicSystem::new(subs).unwrap());
    let d = cover_to_bv(&t).unwrap();
    let top = t.level(t.depth());
    let mut checked = 0;
    for a in top.arrow_ids() {
        for p in 0..top.weight(a) {
            let x = Thread::from_top(&t, a, p);
            let path = thread_to_path(&t, &d, &x);
            match (step(&t, &x), vershik_step(&d, &path)) {
                (Ok(y), Ok(q)) => {
                    assert_eq!(thread_to_path(&t, &d, &y), q);
                    checked += 1;
                }
                (Err(StepError::IndeterminateAtDepth(_)), Err(VershikError::MaxPath)) => {}
                (s, v) => panic!("step {s:?} disagrees with adic successor {v:?}"),
            }
        }
    }
    // Every path of the diagram is the image of exactly one thread.
    let total: u64 = top.arrow_ids().map(|a| top.weight(a)).sum();
    assert_eq!(all_paths(&d).len() as u64, total);
    assert!(checked as u64 >= total - top.arrow_count() as u64);
}

#[test]
fn bv_vertex_in_degrees_match_winding_entries() {
    let t = ostrowski_cover(&ContinuedFraction::new(vec![2, 3, 2, 1]).unwrap(), 4);
    let d = cover_to_bv(&t).unwrap();
    for n in 2..=4 {
        let w = t.winding_matrix(n).unwrap();
        for a in t.level(n).arrow_ids() {
            for b in t.level(n - 1).arrow_ids() {
                let count = d
                    .incoming(n, a.0)
                    .iter()
                    .filter(|&&e| d.edge(n, e).source == b.0)
                    .count() as u64;
                assert_eq!(count, w.get(a.0, b.0));
            }
        }
    }
}

#[test]
fn vershik_orbit_counts_weights_on_ostrowski_diagram() {
    // Depth-3 diagram of the a = 3 tower: the adic orbit of the minimal
    // path ending at the heavy vertex visits all w(g_3) = 33 paths.
    let t = ostrowski_cover(&ContinuedFraction::new(vec![3, 3, 3]).unwrap(), 3).collapse_base();
    let d = cover_to_bv(&t).unwrap();
    let mut p = d.minimal_path(0);
    let mut count = 1u64;
    while let Ok(next) = vershik_step(&d, &p) {
        p = next;
        count += 1;
    }
    assert_eq!(count, t.weights_vector(3).unwrap()[0]);
    assert_eq!(count, 33);
}

#[test]
fn full_shift_diagram_paths_are_all_maximal() {
    let t = rauzy_tower(&coverforge::generate::full_shift_oracle(2, 4), 3).unwrap();
    let d = cover_to_bv(&t).unwrap();
    for p in all_paths(&d) {
        assert_eq!(vershik_step(&d, &p), Err(VershikError::MaxPath));
    }
}

#[test]
fn full_shift_step_is_indeterminate() {
    let t = rauzy_tower(&coverforge::generate::full_shift_oracle(2, 4), 3).unwrap();
    let x = Thread::minimal(&t, ArrowId(0));
    assert_eq!(step(&t, &x), Err(StepError::IndeterminateAtDepth(3)));
}

#[test]
fn orbit_of_zero_steps_is_the_start() {
    let t = odometer_cover(&[2, 2], 2);
    let x = Thread::minimal(&t, ArrowId(0));
    assert_eq!(coverforge::dynamics::orbit(&t, &x, 0).unwrap(), vec![x]);
}

#[test]
fn triple_substitution_itinerary_is_fixed_point_prefix() {
    let triple = Substitution::on_alphabet(
        &["1", "2", "3"],
        &[
            ("1", &["1", "2"]),
            ("2", &["1", "3"]),
            ("3", &["1", "2", "3"]),
        ],
    )
    .unwrap();
    let t = sadic_to_cover(&SAdicSystem::stationary(triple.clone(), 10));
    let x = Thread::minimal(&t, ArrowId(0));
    let word = itinerary(&t, &x, 200).unwrap();
    let fixed = coverforge::generate::substitution_fixed_point(&triple, "1", 200).unwrap();
    assert_eq!(word, fixed.join(""));
    assert!(word.starts_with("1213121231213"));
}

#[test]
fn ostrowski_letter_frequencies_approach_the_golden_gap() {
    let t = ostrowski_cover(&ContinuedFraction::constant(1, 21), 21);
    let x = Thread::minimal(&t, ArrowId(0));
    let word = itinerary(&t, &x, 10_000).unwrap();
    let ones = word.chars().filter(|&c| c == '1').count() as f64;
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    assert!((ones / 10_000.0 - 1.0 / phi).abs() < 0.01);
}

#[test]
fn sturmian_specials_and_bounds() {
    let o = coverforge::generate::sturmian_oracle(&ContinuedFraction::constant(1, 30), 13).unwrap();
    let t = rauzy_tower(&o, 12).unwrap();
    let mut seen_bispecial = false;
    for n in 1..=12 {
        let s = special_vertex_counts(t.level(n));
        assert_eq!((s.left, s.right), (1, 1), "level {n}");
        match s.bispecial {
            0 => assert_eq!(measure_value_bound(t.level(n)), 3),
            1 => {
                seen_bispecial = true;
                assert_eq!(measure_value_bound(t.level(n)), 6);
            }
            other => panic!("level {n} has {other} bi-special vertices"),
        }
    }
    assert!(seen_bispecial);
}

#[test]
fn sturmian_letter_convention() {
    // The standard word here starts 10110...: its length-2 factors are
    // 01, 10 and 11 (no 00), matching the level-6 bi-special word 101101.
    let o = coverforge::generate::sturmian_oracle(&ContinuedFraction::constant(1, 20), 2).unwrap();
    let l2: Vec<String> = o.factors(2).unwrap().iter().cloned().collect();
    assert_eq!(l2, vec!["01", "10", "11"]);
}

#[test]
fn full_shift_loops_lift_at_level_two() {
    let t = rauzy_tower(&coverforge::generate::full_shift_oracle(2, 5), 4).unwrap();
    let loops = enumerate_loops(t.level(1), 3, 100_000).unwrap();
    assert_eq!(loops.len(), 14);
    let v = check_transitive(&t, 1, 3, 100_000, ContainmentMode::ArrowSet).unwrap();
    assert_eq!(
        v.status,
        coverforge::analysis::VerdictStatus::Verified { witness_level: 2 }
    );
}

#[test]
fn uniform_column_sums_collapse_the_constants() {
    let chi = Substitution::on_alphabet(
        &["a", "b"],
        &[("a", &["a", "a", "b", "b"]), ("b", &["a", "a", "b", "b"])],
    )
    .unwrap();
    let t = sadic_to_cover(&SAdicSystem::stationary(chi, 6));
    let c = linear_recurrence_constants(&t, 500, 4).unwrap();
    assert_eq!((c.k1, c.k2), (4, 4));
    assert!(c.fully_covering);
}

#[test]
fn return_words_of_a_standard_word_factor() {
    // In the 10110... letter convention the three-letter factor 101 has
    // exactly the two return words 10 and 101.
    let word = sturmian_word(&ContinuedFraction::constant(1, 25), 10_000).unwrap();
    let words = return_words(&word[..10_000], "101").unwrap();
    let expect: BTreeSet<String> = ["10".to_string(), "101".to_string()].into();
    assert_eq!(words, expect);
}

#[test]
fn cone_diameters_never_increase() {
    for t in [
        ostrowski_cover(&ContinuedFraction::new(vec![2, 1, 3, 1, 2]).unwrap(), 5),
        sadic_to_cover(&SAdicSystem::stationary(
            Substitution::on_alphabet(&["0", "1"], &[("0", &["0", "1"]), ("1", &["0"])]).unwrap(),
            10,
        )),
    ] {
        let ds = unique_ergodicity_diameters(&t, 0).unwrap();
        for pair in ds.windows(2) {
            let le = match (&pair[1], &pair[0]) {
                (_, coverforge::analysis::ConeDiameter::Unbounded) => true,
                (coverforge::analysis::ConeDiameter::Unbounded, _) => false,
                (
                    coverforge::analysis::ConeDiameter::CrossRatio(a),
                    coverforge::analysis::ConeDiameter::CrossRatio(b),
                ) => a <= b,
            };
            assert!(le);
        }
    }
}

#[test]
fn graph_invariants_reported_for_generated_levels() {
    let t = ostrowski_cover(&ContinuedFraction::constant(2, 4), 4);
    for g in t.levels() {
        assert!(validate_graph(g).is_empty());
    }
}

#[test]
fn minimality_dominates_transitivity_on_verified_fixtures() {
    let fixtures = [
        ostrowski_cover(&ContinuedFraction::constant(3, 6), 6),
        ostrowski_cover(&ContinuedFraction::constant(1, 6), 6),
    ];
    for t in &fixtures {
        for m in 0..=1 {
            let minimal = check_minimal(t, m, 100_000).unwrap();
            if minimal.is_verified() {
                for bound in 1..=3 {
                    let trans =
                        check_transitive(t, m, bound, 100_000, ContainmentMode::ArrowSet).unwrap();
                    assert!(trans.is_verified());
                }
            }
        }
    }
}

#[test]
fn full_shift_minimality_stays_undecided() {
    // Non-stationary levels (they grow), and the all-zeros cycle never
    // covers: no refutation is claimed, no witness exists.
    let t = rauzy_tower(&coverforge::generate::full_shift_oracle(2, 4), 3).unwrap();
    let v = check_minimal(&t, 0, 100_000).unwrap();
    assert_eq!(
        v.status,
        coverforge::analysis::VerdictStatus::NotDecidedUpTo { depth: 3 }
    );
}

#[test]
fn full_shift_subpath_transitivity_at_level_one() {
    let t = rauzy_tower(&coverforge::generate::full_shift_oracle(2, 5), 4).unwrap();
    let v = check_transitive(&t, 1, 2, 100_000, ContainmentMode::Subpath).unwrap();
    assert!(v.is_verified(), "{v}");
}

#[test]
fn shallow_follower_depth_cannot_reconstruct() {
    use coverforge::translate::{bv_to_cover, TranslateError};
    let collapse = Substitution::new(
        vec!["1".into(), "2".into(), "3".into()],
        vec!["0".into()],
        vec![vec![0], vec![0], vec![0]],
    )
    .unwrap();
    let triple = Substitution::on_alphabet(
        &["1", "2", "3"],
        &[
            ("1", &["1", "2"]),
            ("2", &["1", "3"]),
            ("3", &["1", "2", "3"]),
        ],
    )
    .unwrap();
    let mut subs = vec![collapse];
    subs.extend(vec![triple; 4]);
    let t = sadic_to_cover(&SAdicSystem::new(subs).unwrap());
    let d = cover_to_bv(&t).unwrap();
    // Letter 1 only becomes a follower through a witness two levels deeper,
    // so depth 1 leaves its source unwitnessed everywhere.
    assert!(matches!(
        bv_to_cover(&d, 1),
        Err(TranslateError::DepthInsufficient { .. })
    ));
    let (_, complete) = bv_to_cover(&d, d.edge_levels()).unwrap();
    assert!(!complete, "the top levels stay unreconstructed");
}

#[test]
fn degenerate_cone_is_an_error() {
    use coverforge::analysis::{cone_diameters, AnalysisError};
    let m = coverforge::tower::WindingMatrix::from_rows(vec![vec![0, 1], vec![0, 1]]);
    assert!(matches!(
        cone_diameters(&[m]),
        Err(AnalysisError::DegenerateCone {
            level: 1,
            column: 0
        })
    ));
}

#[test]
fn itinerary_demands_unit_base_weights() {
    use coverforge::dynamics::ItineraryError;
    let g = coverforge::digraph::DiGraph::new(
        vec!["v".into()],
        vec![coverforge::digraph::Arrow::weighted(
            coverforge::digraph::VertexId(0),
            coverforge::digraph::VertexId(0),
            2,
        )],
    )
    .unwrap();
    let bond = coverforge::tower::BondingMap::new(&g, vec![vec![ArrowId(0)]]).unwrap();
    let t = CoverTower::new(vec![g.clone(), g], vec![bond]).unwrap();
    let x = Thread::minimal(&t, ArrowId(0));
    assert!(matches!(
        itinerary(&t, &x, 3),
        Err(ItineraryError::WeightBaseNotUnit { .. })
    ));
}

#[test]
fn rigidity_search_respects_the_budget() {
    use coverforge::analysis::{uniform_rigidity_check, AnalysisError};
    let t = rauzy_tower(&coverforge::generate::full_shift_oracle(2, 5), 4).unwrap();
    // Covering-walk enumeration over 32 arrows explodes; the budget stops it.
    assert!(matches!(
        uniform_rigidity_check(&t, 10_000),
        Err(AnalysisError::CycleBudget(_))
    ));
}

#[test]
fn contraction_refuses_survivor_free_cycles() {
    // A pure 3-cycle has only regular vertices; with nothing kept there is
    // no endpoint for a contracted arrow.
    let g = coverforge::digraph::DiGraph::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec![
            coverforge::digraph::Arrow::new(
                coverforge::digraph::VertexId(0),
                coverforge::digraph::VertexId(1),
            ),
            coverforge::digraph::Arrow::new(
                coverforge::digraph::VertexId(1),
                coverforge::digraph::VertexId(2),
            ),
            coverforge::digraph::Arrow::new(
                coverforge::digraph::VertexId(2),
                coverforge::digraph::VertexId(0),
            ),
        ],
    )
    .unwrap();
    let bond = coverforge::tower::BondingMap::new(
        &g,
        vec![vec![ArrowId(0)], vec![ArrowId(1)], vec![ArrowId(2)]],
    )
    .unwrap();
    let t = CoverTower::new(vec![g.clone(), g], vec![bond]).unwrap();
    let keep = vec![BTreeSet::new(), BTreeSet::new()];
    assert!(matches!(
        t.contract_regular(&keep),
        Err(coverforge::tower::TowerError::ContractionMisaligned { .. })
    ));
    // Keeping one vertex anchors the cycle into a single weighted loop.
    let keep = vec![
        BTreeSet::from([coverforge::digraph::VertexId(0)]),
        BTreeSet::from([coverforge::digraph::VertexId(0)]),
    ];
    let c = t.contract_regular(&keep).unwrap();
    assert_eq!(c.level(1).arrow_count(), 1);
    assert_eq!(c.level(1).weight(ArrowId(0)), 3);
}

#[test]
fn stepping_a_rauzy_tower_reads_the_word_until_indeterminate() {
    // The thread of the standard word (prefix windows at every level) steps
    // through the unweighted Rauzy tower, emitting the word itself, until
    // the top window reaches the right-special factor and the truncation
    // can no longer choose.
    let depth = 120;
    let cf = ContinuedFraction::constant(1, 40);
    let oracle = coverforge::generate::sturmian_oracle(&cf, depth + 1).unwrap();
    let word = sturmian_word(&cf, depth + 500).unwrap();
    let tower = rauzy_tower(&oracle, depth).unwrap();
    let top = tower.level(depth);
    let prefix: String = word.chars().take(depth + 1).collect();
    let start_arrow = top
        .arrow_ids()
        .find(|&a| top.arrow_label(a) == prefix)
        .unwrap();
    let mut x = Thread::minimal(&tower, start_arrow);
    let mut produced = String::new();
    loop {
        produced.push_str(&tower.level(0).arrow_label(x.arrow(0)));
        match step(&tower, &x) {
            Ok(y) => x = y,
            Err(StepError::IndeterminateAtDepth(d)) => {
                assert_eq!(d, depth);
                break;
            }
        }
    }
    assert!(
        produced.len() >= 20,
        "only {} symbols resolved",
        produced.len()
    );
    assert!(word.starts_with(&produced));
}
