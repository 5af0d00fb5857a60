//! Acceptance suite. Each test covers one release criterion at its
//! stated tolerance and prints a PASS line with the measured numbers;
//! run with `cargo test --test acceptance -- --nocapture` to see them.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mfc_core::analysis::{alpha_bound, brute_force_full_mst, ratios, tight_instance};
use mfc_core::forest::{
    build_initial_forest, brute_force_kcenter, gamma_overlap, gonzalez_kcenter,
    truncated_kruskal_forest, weight_sum, InitialForest,
};
use mfc_core::metric::{MetricKind, MetricSpace, Point};
use mfc_core::reps::{
    brute_force_bestreps, build_cost_curves, cost_of, dp_allocate, enumerate_allocations,
    fixed_allocate, greedy_allocate, materialize, CostCurves,
};
use mfc_core::solver::{exact_coarsened, mfc_opt, multirep_coarsened, multirep_mfc};
use mfc_core::synth;

/// Closed-form comparisons on the worst-case grid.
const RATIO_TOL: f64 = 1e-9;
/// Headroom for division/summation rounding when comparing quantities
/// that are equal or ordered in exact arithmetic.
const FLOAT_SLACK: f64 = 1e-9;

fn cycled_space(kind: usize, n: usize, seed: u64) -> MetricSpace {
    let space = match kind % 5 {
        0 => MetricSpace::new(synth::uniform_vectors(n, 4, seed), MetricKind::Euclidean),
        1 => MetricSpace::new(
            synth::random_sequences(n, 24, b"acgt", seed),
            MetricKind::Hamming,
        ),
        2 => MetricSpace::new(
            synth::random_token_sets(n, 60, 2, 10, seed),
            MetricKind::Jaccard,
        ),
        3 => MetricSpace::new(
            synth::random_strings(n, 2, 12, b"abcdef", seed),
            MetricKind::Levenshtein,
        ),
        _ => MetricSpace::new(synth::uniform_vectors(n, 4, seed), MetricKind::ChebyshevLinf),
    };
    space.unwrap()
}

fn euclidean_space(n: usize, dim: usize, seed: u64) -> MetricSpace {
    MetricSpace::new(synth::uniform_vectors(n, dim, seed), MetricKind::Euclidean).unwrap()
}

#[test]
fn criterion_01_tight_instance_exactness() {
    let started = Instant::now();
    let mut checked = 0;
    for &p in &[2usize, 5, 10, 50] {
        for &ell in &[1usize, 3, 8] {
            for &eps in &[0.5f64, 0.125, 0.015625] {
                let inst = tight_instance(p, ell, eps).unwrap();
                let approx = multirep_mfc(&inst.space, &inst.forest, &inst.reps).unwrap();
                let opt = mfc_opt(&inst.space, &inst.forest).unwrap();
                let (ratio, _) = ratios(&approx, &opt).unwrap();
                assert!(
                    (ratio - inst.predicted_ratio).abs() <= RATIO_TOL,
                    "(p, l, eps) = ({p}, {ell}, {eps}): ratio {ratio} vs predicted {}",
                    inst.predicted_ratio
                );
                checked += 1;
            }
        }
    }

    // Reference point with the known tree weights.
    let inst = tight_instance(5, 3, 0.1).unwrap();
    let approx = multirep_mfc(&inst.space, &inst.forest, &inst.reps).unwrap();
    let opt = mfc_opt(&inst.space, &inst.forest).unwrap();
    assert!((approx.tree_weight - 10.0).abs() <= RATIO_TOL);
    assert!((opt.tree_weight - 6.4).abs() <= RATIO_TOL);
    let (ratio, _) = ratios(&approx, &opt).unwrap();
    assert!((ratio - 1.5625).abs() <= RATIO_TOL);

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!(
        "criterion 01 tight-instance exactness: PASS ({checked} grid points + reference, {:.2?})",
        elapsed
    );
}

#[test]
fn criterion_02_worst_case_two_approximation() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    let mut runs = 0usize;
    for idx in 0..200usize {
        let t = rng.gen_range(2..=12usize);
        // Keep 2t within the n - t budget capacity.
        let n = rng.gen_range((4 * t).max(30)..=150);
        let space = cycled_space(idx, n, 9_000 + idx as u64);
        let forest = build_initial_forest(&space, t, 0).unwrap();
        let opt = mfc_opt(&space, &forest).unwrap();
        for &b in &[0usize, t, 2 * t] {
            let curves = build_cost_curves(&space, &forest, b).unwrap();
            let allocations = [
                dp_allocate(&curves, b).unwrap(),
                greedy_allocate(&curves, b).unwrap(),
                fixed_allocate(&curves, b / t + 1).unwrap(),
            ];
            for alloc in &allocations {
                let reps = materialize(&curves, &alloc.counts).unwrap();
                let approx = multirep_mfc(&space, &forest, &reps).unwrap();
                let report = alpha_bound(&space, &forest, &reps).unwrap();
                let (cost_ratio, _) = ratios(&approx, &opt).unwrap();
                assert!(
                    cost_ratio <= 2.0 + FLOAT_SLACK,
                    "instance {idx} b {b}: cost ratio {cost_ratio} above 2"
                );
                assert!(
                    cost_ratio <= report.alpha + FLOAT_SLACK,
                    "instance {idx} b {b}: cost ratio {cost_ratio} above alpha {}",
                    report.alpha
                );
                assert!(cost_ratio >= 1.0 - FLOAT_SLACK);
                runs += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    println!(
        "criterion 02 worst-case 2-approximation: PASS (200 instances, {runs} runs, {:.2?})",
        elapsed
    );
}

#[test]
fn criterion_03_optimality_collapse() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);

    // All points as representatives: the restricted weight table equals
    // the exact one entry for entry, so the whole run must match the
    // optimum bit for bit.
    for idx in 0..50usize {
        let n = rng.gen_range(12..=60);
        let t = rng.gen_range(2..=8usize).min(n - 1);
        let space = cycled_space(idx, n, 11_000 + idx as u64);
        let forest = build_initial_forest(&space, t, 0).unwrap();
        let reps = mfc_core::reps::RepAssignment::from_reps(
            (0..t).map(|i| forest.partition.members(i).to_vec()).collect(),
        )
        .unwrap();
        let full = multirep_mfc(&space, &forest, &reps).unwrap();
        let opt = mfc_opt(&space, &forest).unwrap();
        assert_eq!(full.tree_weight, opt.tree_weight, "instance {idx}");
    }

    // Single component: the forest already is the whole tree. Any two
    // minimum spanning trees share one weight multiset, so the canonical
    // sums agree exactly even across Prim and Kruskal.
    for idx in 0..10usize {
        let n = rng.gen_range(10..=50);
        let space = cycled_space(idx, n, 12_000 + idx as u64);
        let forest = build_initial_forest(&space, 1, 0).unwrap();
        let result = mfc_opt(&space, &forest).unwrap();
        let (brute_weight, _) = brute_force_full_mst(&space).unwrap();
        assert_eq!(result.tree_weight, brute_weight, "instance {idx}");
    }

    let elapsed = started.elapsed();
    println!(
        "criterion 03 optimality collapse: PASS (50 all-reps + 10 single-component, {:.2?})",
        elapsed
    );
}

fn random_curves(rng: &mut ChaCha8Rng, t: usize, len: usize) -> CostCurves {
    let raw: Vec<Vec<f64>> = (0..t)
        .map(|_| {
            let mut c: Vec<f64> = (0..len).map(|_| rng.gen::<f64>() * 50.0).collect();
            c.sort_by(|a, b| b.total_cmp(a));
            c
        })
        .collect();
    CostCurves::from_parts(raw, vec![vec![0usize; len]; t], vec![len; t]).unwrap()
}

#[test]
fn criterion_04_dp_allocator_exactness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
    for trial in 0..100usize {
        let t = rng.gen_range(1..=4);
        let b = rng.gen_range(0..=6);
        let curves = random_curves(&mut rng, t, 7);

        let dp = dp_allocate(&curves, b).unwrap();
        let oracle = enumerate_allocations(&curves, b).unwrap();
        assert_eq!(dp.objective, oracle.objective, "trial {trial}");

        let greedy = greedy_allocate(&curves, b).unwrap();
        assert!(dp.objective <= greedy.objective + f64::EPSILON, "trial {trial}");
        if b % t == 0 {
            let fixed = fixed_allocate(&curves, b / t + 1).unwrap();
            assert!(dp.objective <= fixed.objective + f64::EPSILON, "trial {trial}");
        }

        let mut last = f64::INFINITY;
        for bb in 0..=6usize {
            let obj = dp_allocate(&curves, bb).unwrap().objective;
            assert!(obj <= last, "trial {trial}: objective rose at b = {bb}");
            last = obj;
        }
    }
    let elapsed = started.elapsed();
    println!("criterion 04 dp allocator exactness: PASS (100 curve sets, {:.2?})", elapsed);
}

#[test]
fn criterion_05_bestreps_two_approximation() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC5);
    let mut trials = 0;
    while trials < 60 {
        let n = rng.gen_range(6..=14);
        let t = rng.gen_range(1..=3usize).min(n / 2);
        let b = rng.gen_range(0..=4usize).min(n - t);
        let space = euclidean_space(n, 2, 13_000 + trials as u64);
        let forest = build_initial_forest(&space, t, 0).unwrap();

        let curves = build_cost_curves(&space, &forest, b).unwrap();
        let alloc = dp_allocate(&curves, b).unwrap();
        let reps = materialize(&curves, &alloc.counts).unwrap();
        let mut pipeline = 0.0;
        for i in 0..t {
            pipeline += cost_of(&space, forest.partition.members(i), &reps.reps[i]).unwrap();
        }
        let (_, optimum) = brute_force_bestreps(&space, &forest, b).unwrap();
        assert!(
            pipeline <= 2.0 * optimum + 1e-12,
            "trial {trials}: cost {pipeline} above twice the optimum {optimum}"
        );
        trials += 1;
    }
    let elapsed = started.elapsed();
    println!("criterion 05 bestreps 2-approximation: PASS ({trials} trials, {:.2?})", elapsed);
}

#[test]
fn criterion_06_kcenter_guarantee() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC6);
    for trial in 0..100usize {
        let n = rng.gen_range(3..=10);
        let k = rng.gen_range(1..=4usize).min(n);
        let space = euclidean_space(n, 2, 14_000 + trial as u64);
        let members: Vec<usize> = (0..n).collect();
        let run = gonzalez_kcenter(&space, &members, k, 0).unwrap();
        let (_, optimum) = brute_force_kcenter(&space, &members, k).unwrap();
        assert!(
            run.radii[k - 1] <= 2.0 * optimum + 1e-12,
            "trial {trial}: radius {} above twice the optimum {optimum}",
            run.radii[k - 1]
        );
    }
    let elapsed = started.elapsed();
    println!("criterion 06 k-center guarantee: PASS (100 instances, {:.2?})", elapsed);
}

#[test]
fn criterion_07_unit_gamma_forests_complete_optimally() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC7);
    for trial in 0..50usize {
        let n = rng.gen_range(20..=100);
        let t = rng.gen_range(2..=10usize).min(n - 1);
        // Continuous metrics keep the MST unique, which the exact
        // equality below relies on.
        let metric = if trial % 2 == 0 {
            MetricKind::Euclidean
        } else {
            MetricKind::ChebyshevLinf
        };
        let space =
            MetricSpace::new(synth::uniform_vectors(n, 3, 15_000 + trial as u64), metric).unwrap();
        let forest = truncated_kruskal_forest(&space, t).unwrap();

        let gamma = gamma_overlap(&space, &forest).unwrap();
        assert_eq!(gamma.value, 1.0, "trial {trial}: gamma {}", gamma.value);
        assert!(!gamma.weight_ties, "trial {trial}: unexpected tie");

        let result = mfc_opt(&space, &forest).unwrap();
        let (brute_weight, _) = brute_force_full_mst(&space).unwrap();
        // Compare through one canonical summation over the edge lists so
        // the check is exact rather than within float slack.
        let mut tree_edges = forest.edges();
        tree_edges.extend_from_slice(&result.added_edges);
        assert_eq!(weight_sum(&tree_edges), brute_weight, "trial {trial}");
        assert!((result.tree_weight - brute_weight).abs() <= 1e-12 * brute_weight.max(1.0));
    }
    let elapsed = started.elapsed();
    println!("criterion 07 unit-gamma optimal completion: PASS (50 instances, {:.2?})", elapsed);
}

#[test]
fn criterion_08_desk_scale_budget_trend() {
    let started = Instant::now();
    let n = 1_000;
    let t = 31; // floor(sqrt(1000))
    let budgets: Vec<usize> = (0..=5).map(|k| 2 * k * t).collect();
    let seeds: Vec<u64> = (0..8).collect();

    let mut eps_at_zero = Vec::new();
    let mut eps_at_two_t = Vec::new();
    for &seed in &seeds {
        let space = euclidean_space(n, 8, 16_000 + seed);
        let forest = build_initial_forest(&space, t, 0).unwrap();
        let opt = mfc_opt(&space, &forest).unwrap();
        let mut last_eps_alpha = f64::INFINITY;
        for &b in &budgets {
            let curves = build_cost_curves(&space, &forest, b).unwrap();
            let alloc = dp_allocate(&curves, b).unwrap();
            let reps = materialize(&curves, &alloc.counts).unwrap();
            let approx = multirep_mfc(&space, &forest, &reps).unwrap();
            let alpha =
                mfc_core::analysis::alpha_from_parts(alloc.objective, forest.forest_weight);
            let eps_alpha = alpha - 1.0;
            assert!(
                eps_alpha <= last_eps_alpha + 1e-12,
                "seed {seed}: eps_alpha rose from {last_eps_alpha} at b = {b}"
            );
            last_eps_alpha = eps_alpha;

            let (cost_ratio, _) = ratios(&approx, &opt).unwrap();
            if b == 0 {
                eps_at_zero.push(cost_ratio - 1.0);
            }
            if b == 2 * t {
                eps_at_two_t.push(cost_ratio - 1.0);
            }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (m0, m2) = (mean(&eps_at_zero), mean(&eps_at_two_t));
    assert!(
        m2 < m0,
        "mean epsilon did not drop: b=0 gives {m0}, b=2t gives {m2}"
    );
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(180), "took {elapsed:?}");
    println!(
        "criterion 08 desk-scale trend: PASS (mean eps {m0:.5} at b=0 -> {m2:.5} at b=2t, {:.2?})",
        elapsed
    );
}

#[test]
fn criterion_09_distance_call_accounting() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC9);
    for trial in 0..20usize {
        let n = rng.gen_range(15..=60);
        let t = rng.gen_range(2..=6usize).min(n - 1);
        let space = cycled_space(trial, n, 17_000 + trial as u64);
        let forest = if trial % 2 == 0 {
            build_initial_forest(&space, t, 0).unwrap()
        } else {
            truncated_kruskal_forest(&space, t).unwrap()
        };
        let sizes: Vec<u64> = (0..t)
            .map(|i| forest.partition.members(i).len() as u64)
            .collect();

        let expect_exact: u64 = (0..t)
            .flat_map(|i| ((i + 1)..t).map(move |j| (i, j)))
            .map(|(i, j)| sizes[i] * sizes[j])
            .sum();
        let before = space.distance_calls();
        exact_coarsened(&space, &forest).unwrap();
        assert_eq!(space.distance_calls() - before, expect_exact, "trial {trial}");

        let b = rng.gen_range(0..=(2 * t).min(n - t));
        let curves = build_cost_curves(&space, &forest, b).unwrap();
        let alloc = dp_allocate(&curves, b).unwrap();
        let reps = materialize(&curves, &alloc.counts).unwrap();
        let expect_multi: u64 = (0..t)
            .map(|i| reps.reps[i].len() as u64 * (n as u64 - sizes[i]))
            .sum();
        let before = space.distance_calls();
        multirep_coarsened(&space, &forest, &reps).unwrap();
        assert_eq!(space.distance_calls() - before, expect_multi, "trial {trial}");
    }
    let elapsed = started.elapsed();
    println!("criterion 09 distance-call accounting: PASS (20 instances, {:.2?})", elapsed);
}

/// Independent full-table edit distance, kept local to the suite.
fn levenshtein_oracle(a: &[u8], b: &[u8]) -> u64 {
    let (n, m) = (a.len(), b.len());
    let mut table = vec![vec![0u64; m + 1]; n + 1];
    for (i, row) in table.iter_mut().enumerate() {
        row[0] = i as u64;
    }
    for j in 0..=m {
        table[0][j] = j as u64;
    }
    for i in 1..=n {
        for j in 1..=m {
            let cost = u64::from(a[i - 1] != b[j - 1]);
            table[i][j] = (table[i - 1][j] + 1)
                .min(table[i][j - 1] + 1)
                .min(table[i - 1][j - 1] + cost);
        }
    }
    table[n][m]
}

#[test]
fn criterion_10_metric_axioms() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xCA);
    for kind in 0..5usize {
        // Duplicate a block of points so the identity axiom sees d = 0
        // on distinct indices.
        let space = {
            let base = cycled_space(kind, 150, 18_000 + kind as u64);
            let mut points = base.points().to_vec();
            let copies: Vec<Point> = points[..10].to_vec();
            points.extend(copies);
            MetricSpace::new(points, base.metric()).unwrap()
        };
        let n = space.len();
        for _ in 0..10_000 {
            let (x, y, z) = (
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
            );
            let d_xy = space.distance(x, y);
            assert!(d_xy >= 0.0);
            assert_eq!(d_xy, space.distance(y, x), "symmetry at ({x}, {y})");
            assert_eq!(
                d_xy == 0.0,
                space.point(x) == space.point(y),
                "identity at ({x}, {y})"
            );
            let d_yz = space.distance(y, z);
            let d_xz = space.distance(x, z);
            assert!(
                d_xz <= d_xy + d_yz + FLOAT_SLACK,
                "triangle at ({x}, {y}, {z}): {d_xz} vs {d_xy} + {d_yz}"
            );
        }
    }

    // Edit distance against the quadratic-table oracle.
    let mut checked = 0;
    for _ in 0..1_000 {
        let la = rng.gen_range(0..=20);
        let lb = rng.gen_range(0..=20);
        let a: Vec<u8> = (0..la).map(|_| rng.gen_range(b'a'..=b'e')).collect();
        let b: Vec<u8> = (0..lb).map(|_| rng.gen_range(b'a'..=b'e')).collect();
        let space = MetricSpace::new(
            vec![Point::Text(a.clone()), Point::Text(b.clone())],
            MetricKind::Levenshtein,
        )
        .unwrap();
        assert_eq!(space.distance(0, 1), levenshtein_oracle(&a, &b) as f64);
        checked += 1;
    }
    let elapsed = started.elapsed();
    println!(
        "criterion 10 metric axioms: PASS (5 x 10000 triples, {checked} edit-distance pairs, {:.2?})",
        elapsed
    );
}

/// The forest and completion serialization formats round-trip; exercised
/// here because downstream tooling reads these files back.
#[test]
fn serialization_surfaces_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let space = euclidean_space(40, 3, 19_000);
    let forest = build_initial_forest(&space, 6, 0).unwrap();

    let forest_path = dir.path().join("forest.txt");
    forest.save(&forest_path).unwrap();
    let back = InitialForest::load(&forest_path).unwrap();
    assert_eq!(back, forest);

    let curves = build_cost_curves(&space, &forest, 4).unwrap();
    let alloc = dp_allocate(&curves, 4).unwrap();
    let reps = materialize(&curves, &alloc.counts).unwrap();
    let reps_path = dir.path().join("reps.txt");
    reps.write_to(std::fs::File::create(&reps_path).unwrap()).unwrap();
    let reps_back = mfc_core::reps::RepAssignment::read_from(
        std::io::BufReader::new(std::fs::File::open(&reps_path).unwrap()),
        &reps_path,
    )
    .unwrap();
    assert_eq!(reps_back, reps);

    let result = multirep_mfc(&space, &forest, &reps).unwrap();
    let tree_path = dir.path().join("tree.txt");
    result
        .write_tree(&forest, std::fs::File::create(&tree_path).unwrap())
        .unwrap();
    let text = std::fs::read_to_string(&tree_path).unwrap();
    assert_eq!(text.lines().count(), 1 + space.len() - 1);
}
