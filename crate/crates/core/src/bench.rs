//! Scaling harness: random box instances with a controllable number of
//! overlapping ball pairs, operation-count and wall-clock measurements,
//! and CSV output.
//!
//! Each grid cell is run twice: once with per-event cap assertions off
//! for timing, once with them on to validate the counters. The reported
//! ratio is `uf_ops / (n·(n+t))`, the quantity the amortized bound says
//! is bounded by a constant.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::geometry::{build_inputs, AffineFunctional, Point};
use crate::sweep::{sweep_with_options, OpCounters, SweepOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// t ≈ 5n overlapping pairs.
    Sparse,
    /// t ≈ n²/4 overlapping pairs.
    Dense,
}

impl Regime {
    pub fn target_pairs(&self, n: usize) -> usize {
        match self {
            Regime::Sparse => 5 * n,
            Regime::Dense => n * n / 4,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::Sparse => "sparse",
            Regime::Dense => "dense",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub n: usize,
    pub regime: &'static str,
    pub target_t: usize,
    pub t: usize,
    pub seed: u64,
    pub eps: f64,
    pub cells_final: usize,
    pub counters: OpCounters,
    pub uf_ops: u64,
    /// uf_ops / (n·(n+t))
    pub ratio: f64,
    pub wall_secs: f64,
    /// wall_secs / (n·(n+t))
    pub unit_time: f64,
}

/// Thickening radius of the generated instances. The box height is 1,
/// so ball images under the y-projection are wide relative to the value
/// range and every event crosses many cells, which is the regime the
/// amortized bound is about.
pub const INSTANCE_EPS: f64 = 0.5;

/// Probability that two uniform points in a `[0,L] x [0,1]` box are
/// within distance `2·INSTANCE_EPS` of each other.
fn overlap_probability(box_len: f64) -> f64 {
    // E_v[2a/L - a^2/L^2] with a(v) = sqrt(s^2 - v^2), v ~ 2(1-v) on [0,1]
    let s = 2.0 * INSTANCE_EPS;
    let s2 = s * s;
    let int_sqrt = 0.5 * (s2 - 1.0).sqrt() + 0.5 * s2 * (1.0 / s).asin();
    let int_v_sqrt = (s2 * s - (s2 - 1.0).powf(1.5)) / 3.0;
    let i1 = 2.0 * (int_sqrt - int_v_sqrt);
    let i2 = s2 - 1.0 / 6.0;
    2.0 * i1 / box_len - i2 / (box_len * box_len)
}

/// Box length for which n uniform points in `[0,L] x [0,1]` are expected
/// to produce about `target_t` overlapping ball pairs at [`INSTANCE_EPS`].
pub fn box_len_for_target(n: usize, target_t: usize) -> f64 {
    if n < 2 {
        return 1.0;
    }
    let floor = 2.0 * INSTANCE_EPS;
    let pairs = (n * (n - 1) / 2) as f64;
    let want = (target_t as f64 / pairs).min(overlap_probability(floor));
    let (mut lo, mut hi) = (floor, 1e7f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if overlap_probability(mid) > want {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Uniform points in a `[0,L] x [0,1]` box.
pub fn random_instance(n: usize, box_len: f64, seed: u64) -> Vec<Point> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            Point::new(i as u32, vec![rng.gen_range(0.0..box_len), rng.gen_range(0.0..1.0)])
                .unwrap()
        })
        .collect()
}

struct PreparedCell {
    n: usize,
    regime: Regime,
    seed: u64,
    balls: Vec<crate::geometry::LabeledInterval>,
    pairs: Vec<crate::geometry::LabeledInterval>,
    wall: f64,
}

fn prepare(n: usize, regime: Regime, seed: u64) -> PreparedCell {
    let target_t = regime.target_pairs(n);
    let box_len = box_len_for_target(n, target_t);
    let points = random_instance(n, box_len, seed);
    let f = AffineFunctional::axis_projection(2);
    let (balls, pairs) = build_inputs(&points, INSTANCE_EPS, &f).expect("generated instance is valid");
    PreparedCell { n, regime, seed, balls, pairs, wall: f64::INFINITY }
}

fn time_once(cell: &mut PreparedCell) {
    let timing_opts = SweepOptions { check_caps: false, ..SweepOptions::default() };
    let start = Instant::now();
    let state = sweep_with_options(&cell.balls, &cell.pairs, timing_opts).expect("valid instance");
    cell.wall = cell.wall.min(start.elapsed().as_secs_f64());
    std::hint::black_box(state.cell_count());
}

fn finish(cell: PreparedCell) -> BenchRecord {
    // checked pass: per-event caps asserted, counters reported
    let checked =
        sweep_with_options(&cell.balls, &cell.pairs, SweepOptions::default()).expect("valid instance");
    let counters = checked.counters().clone();
    let uf_ops = counters.uf_ops();
    let t = cell.pairs.len();
    let unit = (cell.n as f64) * ((cell.n + t) as f64);
    BenchRecord {
        n: cell.n,
        regime: cell.regime.label(),
        target_t: cell.regime.target_pairs(cell.n),
        t,
        seed: cell.seed,
        eps: INSTANCE_EPS,
        cells_final: checked.cell_count(),
        uf_ops,
        ratio: uf_ops as f64 / unit,
        wall_secs: cell.wall,
        unit_time: cell.wall / unit,
        counters,
    }
}

/// Run one grid cell: timing pass (caps off, best of `reps`) plus a
/// checked pass (caps on) whose counters are reported.
pub fn run_one(n: usize, regime: Regime, seed: u64, reps: usize) -> BenchRecord {
    let mut cell = prepare(n, regime, seed);
    // small runs are timer-noise sensitive; take the best of more of them
    let reps = if n <= 200 { reps.max(1) * 3 } else { reps.max(1) };
    for _ in 0..reps {
        time_once(&mut cell);
    }
    finish(cell)
}

/// Run the whole grid. Timing repetitions are interleaved across the
/// grid so a transient load spike cannot inflate every measurement of
/// one cell; each cell keeps its best time.
pub fn run_grid(ns: &[usize], regimes: &[Regime], seeds: &[u64], reps: usize) -> Vec<BenchRecord> {
    let mut cells = Vec::new();
    for &regime in regimes {
        for &n in ns {
            for &seed in seeds {
                cells.push(prepare(n, regime, seed));
            }
        }
    }
    for _pass in 0..reps.max(1) {
        for cell in cells.iter_mut() {
            let inner = if cell.n <= 200 { 3 } else { 1 };
            for _ in 0..inner {
                time_once(cell);
            }
        }
    }
    cells.into_iter().map(finish).collect()
}

/// Slope estimate that is robust to a few outlier points: the median of
/// pairwise slopes (Theil-Sen). Pairs closer than half a unit apart in x
/// are skipped; with log-scale inputs such pairs compare runs of nearly
/// the same size and estimate timer noise, not scaling.
pub fn theil_sen_slope(points: &[(f64, f64)]) -> f64 {
    let mut slopes = Vec::new();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let dx = points[j].0 - points[i].0;
            if dx.abs() > 0.5 {
                slopes.push((points[j].1 - points[i].1) / dx);
            }
        }
    }
    assert!(!slopes.is_empty(), "need points spanning more than half a unit in x");
    slopes.sort_by(f64::total_cmp);
    slopes[slopes.len() / 2]
}

pub fn write_csv(records: &[BenchRecord]) -> String {
    let mut s = String::from(
        "n,regime,target_t,t,seed,eps,cells_final,events,make_set,union,find_set,splits,deletes,\
         finger_advances,link_merge_len,cells_created,max_cells_touched,uf_ops,ratio,wall_secs,unit_time\n",
    );
    for r in records {
        let c = &r.counters;
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.regime,
            r.target_t,
            r.t,
            r.seed,
            r.eps,
            r.cells_final,
            c.events,
            c.make_set,
            c.union,
            c.find_set,
            c.splits,
            c.deletes,
            c.finger_advances,
            c.link_merge_len,
            c.cells_created,
            c.max_cells_touched,
            r.uf_ops,
            r.ratio,
            r.wall_secs,
            r.unit_time
        ));
    }
    s
}

/// Least-squares slope of log(wall) against log(n·(n+t)).
pub fn loglog_slope(records: &[BenchRecord]) -> f64 {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.wall_secs > 0.0)
        .map(|r| (((r.n * (r.n + r.t)) as f64).ln(), r.wall_secs.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let var: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_instance_costs_one_make_set() {
        let r = run_one(1, Regime::Sparse, 0, 1);
        assert_eq!(r.t, 0);
        assert_eq!(r.counters.make_set, 1);
        assert_eq!(r.counters.union, 0);
    }

    #[test]
    fn eps_tuning_hits_target_within_factor_two() {
        for &(n, regime) in &[(100usize, Regime::Sparse), (100, Regime::Dense)] {
            let target = regime.target_pairs(n);
            let mut total = 0usize;
            for seed in 0..3u64 {
                let r = run_one(n, regime, seed, 1);
                total += r.t;
            }
            let avg = total as f64 / 3.0;
            assert!(
                avg > 0.5 * target as f64 && avg < 2.0 * target as f64,
                "regime {:?}: avg t {avg}, target {target}",
                regime
            );
        }
    }

    #[test]
    fn csv_has_one_row_per_record() {
        let recs = run_grid(&[20, 40], &[Regime::Sparse], &[1, 2], 1);
        let csv = write_csv(&recs);
        assert_eq!(csv.lines().count(), 1 + recs.len());
    }
}
