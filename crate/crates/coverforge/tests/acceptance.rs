//! End-to-end acceptance checks, one per criterion, each printing a
//! PASS line (run with `cargo test --test acceptance -- --nocapture`).

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use coverforge::analysis::{
    check_minimal, cone_diameters, ergodic_count_bound, linear_recurrence_constants,
    measure_value_bound, return_words, uniform_rigidity_check, unique_ergodicity_diameters,
    VerdictStatus,
};
use coverforge::digraph::ArrowId;
use coverforge::dynamics::{itinerary, step, Thread};
use coverforge::generate::{
    full_shift_oracle, iet_rauzy_induction, induced_substitution_check, odometer_cover,
    ostrowski_cover, ratio, sturmian_oracle, sturmian_word, ContinuedFraction, GenerateError,
    IETConfig, RauzyStep,
};
use coverforge::sadic::{SAdicSystem, Substitution};
use coverforge::tower::{validate_tower, CoverTower, WindingMatrix};
use coverforge::translate::{
    bv_to_cover, cluster_level, cover_to_bv, cover_to_sadic, follower_relations,
    levelwise_isomorphic, rauzy_tower, sadic_to_cover,
};

const BUDGET: usize = 1_000_000;

fn pass(n: usize, name: &str) {
    println!("ACCEPTANCE {n:02} ({name}): PASS");
}

fn fibonacci_substitution() -> Substitution {
    Substitution::on_alphabet(&["0", "1"], &[("0", &["0", "1"]), ("1", &["0"])]).unwrap()
}

fn triple_substitution() -> Substitution {
    Substitution::on_alphabet(
        &["1", "2", "3"],
        &[
            ("1", &["1", "2"]),
            ("2", &["1", "3"]),
            ("3", &["1", "2", "3"]),
        ],
    )
    .unwrap()
}

fn fibonacci_tower(depth: usize) -> CoverTower {
    sadic_to_cover(&SAdicSystem::stationary(fibonacci_substitution(), depth))
}

#[test]
fn acceptance_01_sturmian_complexity() {
    let cf = ContinuedFraction::constant(1, 30);
    let oracle = sturmian_oracle(&cf, 13).unwrap();
    let t = rauzy_tower(&oracle, 12).unwrap();
    for n in 1..=12 {
        assert_eq!(t.level(n).vertex_count(), n + 1, "vertices at level {n}");
        assert_eq!(t.level(n).arrow_count(), n + 2, "arrows at level {n}");
    }
    let g6 = t.level(6);
    let bispecial = g6
        .vertex_by_name("101101")
        .expect("101101 is a level-6 word");
    assert_eq!(g6.incoming(bispecial).len(), 2);
    assert_eq!(g6.outgoing(bispecial).len(), 2);
    let arrows: BTreeSet<String> = g6.arrow_ids().map(|a| g6.arrow_label(a)).collect();
    let expected: BTreeSet<String> = [
        "0101101", "0110101", "0110110", "1010110", "1011010", "1011011", "1101011", "1101101",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    assert_eq!(arrows, expected);
    pass(1, "Sturmian complexity and the level-6 graph");
}

#[test]
fn acceptance_02_full_shift_fixture() {
    let t = rauzy_tower(&full_shift_oracle(2, 4), 3).unwrap();
    let vertices: Vec<usize> = (0..=3).map(|n| t.level(n).vertex_count()).collect();
    let arrows: Vec<usize> = (0..=3).map(|n| t.level(n).arrow_count()).collect();
    assert_eq!(vertices, vec![1, 2, 4, 8]);
    assert_eq!(arrows, vec![2, 4, 8, 16]);
    let report = validate_tower(&t);
    assert!(report.is_legal());
    assert!(report.bondings.iter().all(|b| b.positive_directional));
    // The bonding onto the root level is negative directional (everything
    // collapses to one vertex); every deeper bonding is not.
    assert!(report.bondings[0].negative_directional);
    assert!(!report.bondings[1].negative_directional);
    assert!(!report.bondings[2].negative_directional);
    pass(2, "full-shift tower shape and directionality");
}

#[test]
fn acceptance_03_ostrowski_weights() {
    let fib_cf = ContinuedFraction::constant(1, 10);
    let t = ostrowski_cover(&fib_cf, 10);
    let expected = [1u64, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89];
    let oracle = fib_cf.convergent_denominators(10);
    assert_eq!(oracle, expected.to_vec());
    for n in 0..=10 {
        let w = t.weights_vector(n).unwrap();
        assert_eq!(w[0], expected[n], "gamma weight at level {n}");
        assert_eq!(w[0], oracle[n]);
        if n >= 1 {
            assert_eq!(w[1], oracle[n - 1], "gamma' weight at level {n}");
        }
    }
    let cf3 = ContinuedFraction::new(vec![3, 3, 3]).unwrap();
    let t3 = ostrowski_cover(&cf3, 3);
    let oracle3 = cf3.convergent_denominators(3);
    assert_eq!(oracle3, vec![1, 3, 10, 33]);
    for (n, expect) in [(1usize, 3u64), (2, 10), (3, 33)] {
        assert_eq!(t3.weights_vector(n).unwrap()[0], expect);
        assert_eq!(t3.weights_vector(n).unwrap()[0], oracle3[n]);
    }
    pass(3, "Ostrowski weights equal convergent denominators");
}

#[test]
fn acceptance_04_minimality_verdicts() {
    let loop_tower = sadic_to_cover(&SAdicSystem::stationary(
        Substitution::on_alphabet(&["1", "2"], &[("1", &["1"]), ("2", &["1", "2", "2", "1"])])
            .unwrap(),
        4,
    ));
    assert!(check_minimal(&loop_tower, 0, BUDGET).unwrap().is_refuted());

    let four_tower = sadic_to_cover(&SAdicSystem::stationary(
        Substitution::on_alphabet(
            &["1", "2", "3", "4"],
            &[
                ("1", &["1"]),
                ("2", &["2", "3", "1", "4", "2"]),
                ("3", &["1", "4", "2", "3"]),
                ("4", &["2", "3", "1", "4"]),
            ],
        )
        .unwrap(),
        4,
    ));
    assert!(check_minimal(&four_tower, 0, BUDGET).unwrap().is_refuted());

    let ostrowski = ostrowski_cover(&ContinuedFraction::constant(3, 8), 8);
    for m in 0..=5 {
        let v = check_minimal(&ostrowski, m, BUDGET).unwrap();
        assert_eq!(
            v.status,
            VerdictStatus::Verified {
                witness_level: m + 2
            },
            "level {m}"
        );
    }
    pass(4, "minimality refutations and Ostrowski witnesses");
}

#[test]
fn acceptance_05_unique_ergodicity_contraction() {
    let fib = fibonacci_tower(20);
    let diam = unique_ergodicity_diameters(&fib, 0).unwrap();
    let last = diam.last().unwrap().cross_ratio().unwrap().clone();
    // log(x) < 1e-6 whenever x <= 1 + 1e-6; exact rational comparison.
    assert!(last <= BigRational::one() + ratio(1, 1_000_000));

    let wide: Vec<WindingMatrix> = (2u64..=31)
        .map(|k| WindingMatrix::from_rows(vec![vec![k * k, 1], vec![1, k * k]]))
        .collect();
    let diams = cone_diameters(&wide).unwrap();
    assert_eq!(diams.len(), 30);
    let floor = diams.last().unwrap().cross_ratio().unwrap().clone();
    // log(x) > 0.5 whenever x >= 1.649 > e^0.5.
    assert!(floor >= ratio(1649, 1000));
    pass(5, "cone contraction under the Hilbert metric");
}

#[test]
fn acceptance_06_three_gap_check() {
    let cf = ContinuedFraction::constant(1, 31);
    let word = sturmian_word(&cf, 1_000_000).unwrap();
    let prefix: Vec<char> = word.chars().take(1_000_000).collect();
    let oracle = sturmian_oracle(&cf, 13).unwrap();
    let t = rauzy_tower(&oracle, 12).unwrap();
    for n in 1..=12 {
        let mut counts: BTreeMap<&[char], usize> = BTreeMap::new();
        for w in prefix.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
        let total: usize = counts.values().sum();
        let mut values: Vec<f64> = counts.values().map(|&c| c as f64 / total as f64).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut clusters = 1;
        for pair in values.windows(2) {
            if pair[1] - pair[0] > 1e-3 {
                clusters += 1;
            }
        }
        assert!(clusters <= 3, "level {n} has {clusters} frequency clusters");
        let bound = measure_value_bound(t.level(n));
        assert!(bound >= 3, "level {n} bound {bound}");
        assert!(clusters <= bound);
    }
    // Bound on the number of ergodic measures for the two-letter tower.
    assert_eq!(ergodic_count_bound(&t).unwrap(), 2);
    pass(6, "three-gap frequencies within the special-vertex bound");
}

#[test]
fn acceptance_07_translation_round_trips() {
    // (a) S-adic <-> cover is the identity on the substitution sequence.
    let s = SAdicSystem::stationary(triple_substitution(), 3);
    let t = sadic_to_cover(&s);
    let back = cover_to_sadic(&t).unwrap();
    assert_eq!(back.substitutions(), s.substitutions());

    // (b) cover -> diagram -> cover on the Ostrowski tower and the rooted
    // substitution tower: level-wise isomorphic on the reconstructed depth.
    let ostrowski = ostrowski_cover(&ContinuedFraction::constant(3, 6), 6).collapse_base();
    let d = cover_to_bv(&ostrowski).unwrap();
    let (rebuilt, _) = bv_to_cover(&d, d.edge_levels()).unwrap();
    assert_eq!(rebuilt.depth(), 4);
    assert!(levelwise_isomorphic(&ostrowski, &rebuilt, rebuilt.depth()));

    let collapse = Substitution::new(
        vec!["1".into(), "2".into(), "3".into()],
        vec!["0".into()],
        vec![vec![0], vec![0], vec![0]],
    )
    .unwrap();
    let mut subs = vec![collapse];
    subs.extend(vec![triple_substitution(); 5]);
    let rooted = sadic_to_cover(&SAdicSystem::new(subs).unwrap());
    let d2 = cover_to_bv(&rooted).unwrap();
    let (rebuilt2, _) = bv_to_cover(&d2, d2.edge_levels()).unwrap();
    assert_eq!(rebuilt2.depth(), 4);
    assert!(levelwise_isomorphic(&rooted, &rebuilt2, rebuilt2.depth()));
    for n in 1..=rebuilt2.depth() {
        assert_eq!(rebuilt2.level(n).vertex_count(), 1, "level {n} collapses");
    }

    // The direct shared-follower relation is not transitive: letters 2 and 3
    // relate, 1 and 3 relate, but 1 and 2 only merge through the hull.
    let rels = follower_relations(&d2, d2.edge_levels());
    let clusters = cluster_level(3, &rels[2]);
    assert_eq!(clusters.class_count, 1);
    assert!(clusters.direct_source_pairs.contains(&(1, 2)));
    assert!(clusters.direct_source_pairs.contains(&(0, 2)));
    assert!(!clusters.direct_source_pairs.contains(&(0, 1)));
    pass(7, "translation round trips and the transitive hull");
}

#[test]
fn acceptance_08_dynamics_conjugacy() {
    // Itinerary of the all-ones Ostrowski tower reproduces the standard word.
    let cf = ContinuedFraction::constant(1, 17);
    let t = ostrowski_cover(&cf, 17);
    let start = Thread::minimal(&t, ArrowId(0));
    let got = itinerary(&t, &start, 1000).unwrap();
    let want = sturmian_word(&cf, 1000).unwrap();
    assert_eq!(got, want[..1000]);

    // Shifting the itinerary equals the itinerary of the stepped thread.
    let fixtures: Vec<CoverTower> = vec![
        ostrowski_cover(&ContinuedFraction::constant(1, 17), 17),
        ostrowski_cover(&ContinuedFraction::constant(3, 8), 8),
        fibonacci_tower(16),
        sadic_to_cover(&SAdicSystem::stationary(triple_substitution(), 12)),
        odometer_cover(&[2; 11], 11),
    ];
    for t in &fixtures {
        let top = t.level(t.depth());
        let heaviest = top.arrow_ids().max_by_key(|&a| top.weight(a)).unwrap();
        let x = Thread::minimal(t, heaviest);
        let k = 1000;
        let whole = itinerary(t, &x, k).unwrap();
        let shifted = itinerary(t, &step(t, &x).unwrap(), k - 1).unwrap();
        assert_eq!(whole[1..], shifted);
    }
    pass(
        8,
        "itineraries match the word generator and commute with the shift",
    );
}

#[test]
fn acceptance_09_odometer_detection() {
    let t2 = odometer_cover(&[2; 8], 8);
    let r2 = uniform_rigidity_check(&t2, BUDGET).unwrap();
    assert!(r2.verdict.is_verified());
    assert_eq!(r2.q_sequence.unwrap(), vec![2; 8]);

    let t3 = odometer_cover(&[3; 8], 8);
    let r3 = uniform_rigidity_check(&t3, BUDGET).unwrap();
    assert!(r3.verdict.is_verified());
    assert_eq!(r3.q_sequence.unwrap(), vec![3; 8]);

    let ostrowski = ostrowski_cover(&ContinuedFraction::constant(1, 8), 8);
    let ro = uniform_rigidity_check(&ostrowski, BUDGET).unwrap();
    assert_eq!(
        ro.verdict.status,
        VerdictStatus::NotDecidedUpTo { depth: 8 }
    );
    pass(9, "odometers verified with exact wraps; Sturmian undecided");
}

#[test]
fn acceptance_10_linear_recurrence() {
    let t = fibonacci_tower(24);
    let c = linear_recurrence_constants(&t, 100_000, 10).unwrap();
    assert_eq!(c.k1, 2);
    assert_eq!(c.k2, 1);

    let top = t.level(24);
    let heaviest = top.arrow_ids().max_by_key(|&a| top.weight(a)).unwrap();
    let word = itinerary(&t, &Thread::minimal(&t, heaviest), 100_000).unwrap();
    let chars: Vec<char> = word.chars().collect();
    let l = c.l.to_f64().unwrap();
    for len in 1..=20usize {
        let mut last: BTreeMap<&[char], usize> = BTreeMap::new();
        let mut max_gap = 0usize;
        for (i, w) in chars.windows(len).enumerate() {
            if let Some(prev) = last.insert(w, i) {
                max_gap = max_gap.max(i - prev);
            }
        }
        assert!(
            (max_gap as f64) <= l * len as f64,
            "length {len}: gap {max_gap} exceeds L*|u| = {}",
            l * len as f64
        );
    }
    // Return-word counts: #R_u <= L (L + 1)^2 for twenty sampled factors.
    let bound = &c.l * (&c.l + BigRational::one()) * (&c.l + BigRational::one());
    for len in 1..=20usize {
        let u: String = chars[..len].iter().collect();
        let words = return_words(&word, &u).unwrap();
        assert!(
            BigRational::from_integer((words.len() as u64).into()) <= bound,
            "factor {u} has {} return words",
            words.len()
        );
    }
    pass(10, "recurrence constants and the empirical gap bound");
}

#[test]
fn acceptance_11_rauzy_induction() {
    let cfg = IETConfig::new(vec![ratio(13, 21), ratio(8, 21)], vec![1, 0]).unwrap();
    let (run, tie) = iet_rauzy_induction(&cfg, 100).unwrap();
    // Independent oracle: subtractive gcd of (13, 8).
    let mut a = 13i64;
    let mut b = 8i64;
    let mut expect = Vec::new();
    while a != b {
        if a > b {
            expect.push(RauzyStep::Type1);
            a -= b;
        } else {
            expect.push(RauzyStep::Type0);
            b -= a;
        }
    }
    assert_eq!(run.steps, expect);
    assert_eq!(tie, Some(expect.len() + 1));

    // The emitted substitution at each of the first four steps equals the
    // exact first-return substitution to the induced window.
    for k in 0..4 {
        let before = &run.configs[k];
        let after = &run.configs[k + 1];
        let (chi, _) = induced_substitution_check(before, &ratio(0, 1), &after.total(), 6).unwrap();
        assert_eq!(&chi, run.system.substitution(k + 1), "step {}", k + 1);
    }

    let even = IETConfig::new(vec![ratio(1, 2), ratio(1, 2)], vec![1, 0]).unwrap();
    assert_eq!(
        iet_rauzy_induction(&even, 5).unwrap_err(),
        GenerateError::KeaneTie { step: 1 }
    );
    pass(
        11,
        "Rauzy induction tape, dual-route substitutions, Keane tie",
    );
}
