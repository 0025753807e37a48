//! Acceptance suite: one test per release criterion, each printing a
//! `[ACCEPTANCE]` line (visible with `--nocapture`).

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reebsweep::approx::{run_experiment, ExperimentConfig, Shape, ShapeSampler};
use reebsweep::bench::{run_grid, BenchRecord, Regime};
use reebsweep::geometry::{build_inputs, AffineFunctional, IntervalLabel, Point};
use reebsweep::oracle::{check_state, compare_graphs, naive_reeb, sampled_pair_extent};
use reebsweep::reeb::{betti, component_count_check, extract};
use reebsweep::sweep::{
    sort_events, sweep, sweep_with_options, FaultInjection, PointId, Sweep, SweepOptions,
};

fn four_points() -> Vec<Point> {
    vec![
        Point::new(0, vec![0.1, 1.0]).unwrap(),
        Point::new(1, vec![1.4, -0.4]).unwrap(),
        Point::new(2, vec![1.9, 1.3]).unwrap(),
        Point::new(3, vec![0.5, 2.0]).unwrap(),
    ]
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, side: f64) -> Vec<Point> {
    (0..n)
        .map(|i| {
            Point::new(
                i as u32,
                vec![rng.gen_range(0.0..side), rng.gen_range(0.0..side)],
            )
            .unwrap()
        })
        .collect()
}

/// Golden four-point instance: event order, pair extents, the final
/// thirteen-cell partition sequence, and the extracted graph.
#[test]
fn acceptance_golden_four_point_instance() {
    let start = Instant::now();
    let pts = four_points();
    let f = AffineFunctional::axis_projection(2);
    let (balls, pairs) = build_inputs(&pts, 1.0, &f).unwrap();

    // (a) event order
    let order: Vec<IntervalLabel> = sort_events(&balls, &pairs).iter().map(|e| e.label()).collect();
    use IntervalLabel::*;
    assert_eq!(
        order,
        vec![
            Ball(1),
            Ball(0),
            Pair(0, 1),
            Ball(2),
            Pair(1, 2),
            Pair(0, 2),
            Ball(3),
            Pair(0, 3),
            Pair(2, 3),
        ]
    );

    // (b) pair extents to 1e-2, cross-validated against dense sampling
    let drawn = [
        (Pair(0, 1), 0.1, 0.5),
        (Pair(1, 2), 0.3, 0.6),
        (Pair(0, 2), 0.75, 1.55),
        (Pair(0, 3), 1.0, 2.0),
        (Pair(2, 3), 1.09, 2.21),
    ];
    for (label, lo, hi) in drawn {
        let iv = pairs.iter().find(|iv| iv.label() == label).unwrap();
        assert!((iv.lo() - lo).abs() < 1e-2, "{label:?} lo {} vs {lo}", iv.lo());
        assert!((iv.hi() - hi).abs() < 1e-2, "{label:?} hi {} vs {hi}", iv.hi());
        let Pair(p, q) = label else { unreachable!() };
        let (slo, shi) =
            sampled_pair_extent(&pts[p as usize], &pts[q as usize], 1.0, &f, 1_000_000).unwrap();
        assert!((iv.lo() - slo).abs() < 1e-3);
        assert!((iv.hi() - shi).abs() < 1e-3);
    }

    // (c) final partition sequence, verbatim as set families
    let opts = SweepOptions { check_minimality: true, ..SweepOptions::default() };
    let state = sweep_with_options(&balls, &pairs, opts).unwrap();
    let families: Vec<Vec<Vec<PointId>>> = state.cells().map(|c| c.partition()).collect();
    let expected: Vec<Vec<Vec<PointId>>> = vec![
        vec![],
        vec![vec![1]],
        vec![vec![0], vec![1]],
        vec![vec![0, 1]],
        vec![vec![0, 1, 2]],
        vec![vec![0], vec![1, 2]],
        vec![vec![0], vec![2]],
        vec![vec![0, 2]],
        vec![vec![0, 2, 3]],
        vec![vec![2, 3]],
        vec![vec![2], vec![3]],
        vec![vec![3]],
        vec![],
    ];
    assert_eq!(families, expected);
    assert_eq!(state.cell_count(), 13);
    // the last pair interval fuses exactly one redundant cell
    assert_eq!(state.counters().deletes, 1);

    // (d) graph shape
    let g = extract(&state);
    assert_eq!(g.vertex_count(), 15);
    assert_eq!(g.edge_count(), 15);
    assert_eq!(betti(&g), (1, 1));

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "[ACCEPTANCE] golden four-point instance: PASS (13 cells, 15/15 graph, {:.0} ms)",
        elapsed.as_secs_f64() * 1e3
    );
}

/// The sweep output equals the brute-force construction cell by cell on
/// 500 random instances spanning sparse to dense overlap.
#[test]
fn acceptance_oracle_equivalence() {
    let start = Instant::now();
    let mut checked = 0usize;
    for seed in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 3 + (seed % 10) as usize;
        let eps = 0.15 + (seed % 8) as f64 * 0.2;
        let pts = random_cloud(&mut rng, n, 2.0);
        let f = AffineFunctional::axis_projection(2);
        let (balls, pairs) = build_inputs(&pts, eps, &f).unwrap();
        let computed = extract(&sweep(&balls, &pairs).unwrap());
        let reference = naive_reeb(&balls, &pairs);
        if let Err(m) = compare_graphs(&computed, &reference) {
            panic!("seed {seed} (n={n}, eps={eps}): {m}");
        }
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    println!(
        "[ACCEPTANCE] oracle equivalence: PASS ({checked} instances, {:.1} s)",
        elapsed.as_secs_f64()
    );
}

/// All four state-invariant clauses hold after every event on 200 random
/// instances, and injected faults are detected.
#[test]
fn acceptance_invariant_suite_with_fault_injection() {
    let start = Instant::now();
    let mut events_checked = 0usize;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let n = 3 + (seed % 18) as usize;
        let eps = if n > 10 {
            0.2 + (seed % 2) as f64 * 0.15
        } else {
            0.2 + (seed % 6) as f64 * 0.22
        };
        let pts = random_cloud(&mut rng, n, 2.0);
        let f = AffineFunctional::axis_projection(2);
        let (balls, pairs) = build_inputs(&pts, eps, &f).unwrap();
        let opts = SweepOptions { check_minimality: true, ..SweepOptions::default() };
        let mut sw = Sweep::new(&balls, &pairs, opts).unwrap();
        while sw.step().unwrap() {
            let report = check_state(sw.state(), sw.processed());
            assert!(
                report.all_pass(),
                "seed {seed} after {} events: {}",
                sw.processed().len(),
                report.to_json()
            );
            events_checked += 1;
        }
    }

    // injected faults must each produce a detected failure
    let pts = four_points();
    let f = AffineFunctional::axis_projection(2);
    let (balls, pairs) = build_inputs(&pts, 1.0, &f).unwrap();
    let events = sort_events(&balls, &pairs);
    for fault in [FaultInjection::DropUnion { index: 0 }, FaultInjection::SkipSplit { index: 0 }] {
        let opts = SweepOptions { check_caps: false, fault: Some(fault), ..SweepOptions::default() };
        let state = sweep_with_options(&balls, &pairs, opts).unwrap();
        let report = check_state(&state, &events);
        assert!(!report.all_pass(), "{fault:?} was not detected");
    }
    println!(
        "[ACCEPTANCE] invariant suite: PASS (200 instances, {events_checked} event snapshots, 2 injected faults detected, {:.1} s)",
        start.elapsed().as_secs_f64()
    );
}

/// The structural caps (cells touched per event, link-graph edges,
/// merged neighbor-list length) hold as hard assertions on a spread of
/// instances, including degenerate layouts with many equal endpoints.
#[test]
fn acceptance_structural_caps() {
    let f = AffineFunctional::axis_projection(2);
    // random clouds
    for seed in 0..40u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + seed);
        let n = 2 + (seed % 25) as usize;
        let eps = 0.1 + (seed % 9) as f64 * 0.2;
        let pts = random_cloud(&mut rng, n, 2.0);
        let (balls, pairs) = build_inputs(&pts, eps, &f).unwrap();
        sweep(&balls, &pairs).unwrap();
    }
    // grid layout: many coinciding interval endpoints and ties
    let mut pts = Vec::new();
    for i in 0..6 {
        for j in 0..6 {
            pts.push(Point::new((i * 6 + j) as u32, vec![i as f64 * 0.5, j as f64 * 0.5]).unwrap());
        }
    }
    let (balls, pairs) = build_inputs(&pts, 0.6, &f).unwrap();
    sweep(&balls, &pairs).unwrap();
    // horizontal line: identical ball images, neighbor-only lenses
    let pts: Vec<Point> =
        (0..30).map(|i| Point::new(i, vec![i as f64 * 0.8, 0.0]).unwrap()).collect();
    let (balls, pairs) = build_inputs(&pts, 1.0, &f).unwrap();
    sweep(&balls, &pairs).unwrap();
    // vertical stack: totally ordered intervals
    let pts: Vec<Point> =
        (0..30).map(|i| Point::new(i, vec![0.0, i as f64 * 0.3]).unwrap()).collect();
    let (balls, pairs) = build_inputs(&pts, 1.0, &f).unwrap();
    sweep(&balls, &pairs).unwrap();
    println!("[ACCEPTANCE] structural caps: PASS (asserted on every instance above)");
}

/// b0 of the output equals the component count of the ball-intersection
/// graph on 1000 random instances.
#[test]
fn acceptance_component_bijection() {
    let start = Instant::now();
    let f = AffineFunctional::axis_projection(2);
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + seed);
        let n = 2 + (seed % 30) as usize;
        let eps = 0.1 + (seed % 10) as f64 * 0.15;
        let pts = random_cloud(&mut rng, n, 2.0);
        let (balls, pairs) = build_inputs(&pts, eps, &f).unwrap();
        let g = extract(&sweep(&balls, &pairs).unwrap());
        assert!(
            component_count_check(&pts, eps, &g),
            "seed {seed}: b0 {} does not match the ball-intersection components",
            betti(&g).0
        );
    }
    println!(
        "[ACCEPTANCE] component bijection: PASS (1000 instances, {:.1} s)",
        start.elapsed().as_secs_f64()
    );
}

/// Union-find operation totals stay within a stable constant of
/// n(n+t) across the scaling grid, and wall time scales like n(n+t).
#[test]
fn acceptance_complexity_scaling() {
    let start = Instant::now();
    let ns = [100usize, 200, 400, 800];
    let seeds = [1u64, 2, 3];
    let records = run_grid(&ns, &[Regime::Sparse, Regime::Dense], &seeds, 5);

    // median-of-pairwise-slopes regression; robust to load spikes that
    // inflate individual timing points
    fn slope(records: &[&BenchRecord]) -> f64 {
        let pts: Vec<(f64, f64)> = records
            .iter()
            .map(|r| (((r.n * (r.n + r.t)) as f64).ln(), r.wall_secs.ln()))
            .collect();
        reebsweep::bench::theil_sen_slope(&pts)
    }

    for regime in ["sparse", "dense"] {
        let rs: Vec<&BenchRecord> = records.iter().filter(|r| r.regime == regime).collect();
        let max = rs.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
        let min = rs.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        assert!(
            max / min <= 3.0,
            "{regime}: uf-ops/(n(n+t)) spread {:.2}x exceeds 3x (range [{min:.3}, {max:.3}])",
            max / min
        );
        let s = slope(&rs);
        assert!(
            (0.9..=1.2).contains(&s),
            "{regime}: wall-time log-log slope {s:.3} outside [0.9, 1.2]"
        );
        println!(
            "[ACCEPTANCE] complexity ({regime}): PASS (C in [{min:.3}, {max:.3}], spread {:.2}x, slope {s:.3})",
            max / min
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}");
    println!(
        "[ACCEPTANCE] complexity runtime: PASS ({:.0} s < 600 s)",
        elapsed.as_secs_f64()
    );
}

/// Shape experiments: circle, separated clusters and the figure-eight
/// under hypotheses-met configurations.
#[test]
fn acceptance_shape_experiments() {
    let mk = |shape, samples, noise, seed, eps| ExperimentConfig {
        sampler: ShapeSampler { shape, samples, noise, seed },
        eps,
        direction: vec![0.0, 1.0],
        offset: 0.0,
    };

    let circle = run_experiment(&mk(Shape::Circle { radius: 1.0 }, 60, 0.0, 1, 0.2)).unwrap();
    assert!(circle.hypotheses_met, "circle covering {}", circle.covering_radius);
    assert_eq!((circle.computed.b0, circle.computed.b1), (1, 1));
    let (lo, hi) = circle.computed.extent.unwrap();
    assert!((-1.2..=-1.0).contains(&lo), "circle min extent {lo}");
    assert!((1.0..=1.2).contains(&hi), "circle max extent {hi}");
    assert_eq!(circle.verdict, Some(true));

    let clusters =
        run_experiment(&mk(Shape::TwoClusters { separation: 2.0 }, 10, 0.02, 3, 0.2)).unwrap();
    assert!(clusters.hypotheses_met);
    assert_eq!((clusters.computed.b0, clusters.computed.b1), (2, 0));
    assert_eq!(clusters.verdict, Some(true));

    let eight = run_experiment(&mk(Shape::FigureEight, 160, 0.0, 2, 0.12)).unwrap();
    assert!(eight.hypotheses_met, "figure-eight covering {}", eight.covering_radius);
    assert_eq!(eight.computed.b1, 2, "figure-eight loop count");
    assert_eq!(eight.computed.b0, 1);
    assert_eq!(eight.verdict, Some(true));

    let annulus =
        run_experiment(&mk(Shape::Annulus { inner: 0.5, outer: 1.0 }, 300, 0.0, 4, 0.15)).unwrap();
    assert!(annulus.hypotheses_met);
    assert_eq!((annulus.computed.b0, annulus.computed.b1), (1, 1));
    assert_eq!(annulus.verdict, Some(true));

    println!(
        "[ACCEPTANCE] shape experiments: PASS (circle b=(1,1) extent [{lo:.3},{hi:.3}], clusters (2,0), figure-eight b1=2, annulus (1,1))"
    );
}
