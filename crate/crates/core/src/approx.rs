//! Desk-scale reconstruction experiments: sample a known shape, thicken,
//! compute the output graph, and compare Betti numbers and critical
//! values against the shape's analytic ground truth.
//!
//! The comparison is a proxy: we do not compute interleaving distances.
//! Instead we check the necessary consequences of a `k(ε+δ)` match —
//! Betti numbers agree when every feature of the shape is coarser than
//! `4(ε+δ)`, and each topology-changing critical value of the computed
//! graph lies within `k(ε+δ)` of a ground-truth critical value or of the
//! computed function extent. The density hypothesis is checked
//! empirically: every probe point of the shape must lie within `ε` of a
//! sample.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::InputError;
use crate::geometry::{build_inputs, AffineFunctional, Point};
use crate::reeb::{betti, extract};
use crate::sweep::sweep;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    Circle { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    TwoClusters { separation: f64 },
    /// Fixed polyline tracing two diamond loops joined at the origin,
    /// spanning y in [-2, 2].
    FigureEight,
}

impl Shape {
    pub fn label(&self) -> String {
        match self {
            Shape::Circle { radius } => format!("circle(r={radius})"),
            Shape::Annulus { inner, outer } => format!("annulus({inner},{outer})"),
            Shape::TwoClusters { separation } => format!("two-clusters(sep={separation})"),
            Shape::FigureEight => "figure-eight".to_string(),
        }
    }

    /// Diameter of the smallest topological feature; Betti agreement is
    /// only demanded when this exceeds 4(ε+δ).
    pub fn feature_scale(&self) -> f64 {
        match self {
            Shape::Circle { radius } => 2.0 * radius,
            Shape::Annulus { inner, .. } => 2.0 * inner,
            Shape::TwoClusters { separation } => *separation,
            Shape::FigureEight => std::f64::consts::SQRT_2,
        }
    }

    /// Whether the critical-value displacement consequence is implied
    /// for this shape. A connected figure-eight has zero reach at its
    /// crossing, so no thickening radius satisfies the reconstruction
    /// hypotheses there and only the Betti comparison is meaningful.
    pub fn displacement_gated(&self) -> bool {
        !matches!(self, Shape::FigureEight)
    }
}

fn eight_segments() -> Vec<([f64; 2], [f64; 2])> {
    let v = [
        [0.0, 0.0],
        [1.0, -1.0],
        [0.0, -2.0],
        [-1.0, -1.0],
        [0.0, 0.0],
        [1.0, 1.0],
        [0.0, 2.0],
        [-1.0, 1.0],
        [0.0, 0.0],
    ];
    (0..8).map(|i| (v[i], v[i + 1])).collect()
}

fn polyline_point(segments: &[([f64; 2], [f64; 2])], s: f64) -> [f64; 2] {
    let seg_len = std::f64::consts::SQRT_2;
    let i = ((s / seg_len) as usize).min(segments.len() - 1);
    let t = (s - i as f64 * seg_len) / seg_len;
    let (a, b) = segments[i];
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Deterministic sampler for the test shapes. `noise` is the amplitude
/// δ; emitted samples always lie within δ of the shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeSampler {
    pub shape: Shape,
    pub samples: usize,
    pub noise: f64,
    pub seed: u64,
}

impl ShapeSampler {
    fn jitter(&self, rng: &mut rand_chacha::ChaCha8Rng) -> [f64; 2] {
        if self.noise == 0.0 {
            return [0.0, 0.0];
        }
        let r = 0.999 * self.noise * rng.gen_range(0.0f64..1.0).sqrt();
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        [r * a.cos(), r * a.sin()]
    }

    pub fn sample(&self) -> Vec<Point> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed);
        let mut raw: Vec<[f64; 2]> = Vec::new();
        match self.shape {
            Shape::Circle { radius } => {
                let n = self.samples;
                for i in 0..n {
                    let a = std::f64::consts::TAU * (i as f64 + 0.5) / n as f64;
                    let j = self.jitter(&mut rng);
                    raw.push([radius * a.cos() + j[0], radius * a.sin() + j[1]]);
                }
            }
            Shape::Annulus { inner, outer } => {
                // polar grid sized to the requested sample budget
                let area = std::f64::consts::PI * (outer * outer - inner * inner);
                let spacing = (area / self.samples.max(1) as f64).sqrt();
                let rings = (((outer - inner) / spacing).round() as usize).max(2);
                for ri in 0..=rings {
                    let r = inner + (outer - inner) * ri as f64 / rings as f64;
                    let count = ((std::f64::consts::TAU * r / spacing).ceil() as usize).max(3);
                    for k in 0..count {
                        let a = std::f64::consts::TAU * (k as f64 + 0.5 * (ri % 2) as f64)
                            / count as f64;
                        let j = self.jitter(&mut rng);
                        raw.push([r * a.cos() + j[0], r * a.sin() + j[1]]);
                    }
                }
            }
            Shape::TwoClusters { separation } => {
                let centers = [[-0.5 * separation, 0.0], [0.5 * separation, 0.0]];
                if self.noise == 0.0 {
                    for c in centers {
                        raw.push(c);
                    }
                } else {
                    let per = (self.samples / 2).max(1);
                    for c in centers {
                        for _ in 0..per {
                            let j = self.jitter(&mut rng);
                            raw.push([c[0] + j[0], c[1] + j[1]]);
                        }
                    }
                }
            }
            Shape::FigureEight => {
                let segments = eight_segments();
                let total = 8.0 * std::f64::consts::SQRT_2;
                let n = self.samples;
                for i in 0..n {
                    let s = total * (i as f64 + 0.5) / n as f64;
                    let p = polyline_point(&segments, s);
                    let j = self.jitter(&mut rng);
                    raw.push([p[0] + j[0], p[1] + j[1]]);
                }
            }
        }
        raw.into_iter()
            .enumerate()
            .map(|(i, c)| Point::new(i as u32, c.to_vec()).unwrap())
            .collect()
    }

    /// Dense noise-free probe points of the shape, for the covering check.
    pub fn probes(&self) -> Vec<[f64; 2]> {
        const DENSITY: usize = 4096;
        match self.shape {
            Shape::Circle { radius } => (0..DENSITY)
                .map(|i| {
                    let a = std::f64::consts::TAU * i as f64 / DENSITY as f64;
                    [radius * a.cos(), radius * a.sin()]
                })
                .collect(),
            Shape::Annulus { inner, outer } => {
                let mut out = Vec::new();
                let rings = 48;
                for ri in 0..=rings {
                    let r = inner + (outer - inner) * ri as f64 / rings as f64;
                    let count = 128;
                    for k in 0..count {
                        let a = std::f64::consts::TAU * k as f64 / count as f64;
                        out.push([r * a.cos(), r * a.sin()]);
                    }
                }
                out
            }
            Shape::TwoClusters { separation } => {
                vec![[-0.5 * separation, 0.0], [0.5 * separation, 0.0]]
            }
            Shape::FigureEight => {
                let segments = eight_segments();
                let total = 8.0 * std::f64::consts::SQRT_2;
                (0..DENSITY)
                    .map(|i| polyline_point(&segments, total * i as f64 / DENSITY as f64))
                    .collect()
            }
        }
    }
}

/// Betti numbers, critical values and function extent of a graph, either
/// analytic (ground truth) or computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopoSummary {
    pub b0: usize,
    pub b1: usize,
    pub critical_values: Vec<f64>,
    pub extent: Option<(f64, f64)>,
}

/// Analytic Reeb data of the shape under `f`. The rotationally symmetric
/// shapes accept any non-constant affine `f`; the figure-eight is only
/// tabulated for vertical gradients.
pub fn ground_truth(shape: &Shape, f: &AffineFunctional) -> Result<TopoSummary, InputError> {
    if f.dim() != 2 {
        return Err(InputError::FunctionalDimension { got: f.dim(), expected: 2 });
    }
    if f.is_constant() {
        return Err(InputError::ConstantFunctional);
    }
    let k = f.gradient_norm();
    let b = f.offset;
    Ok(match shape {
        Shape::Circle { radius } => TopoSummary {
            b0: 1,
            b1: 1,
            critical_values: vec![b - k * radius, b + k * radius],
            extent: Some((b - k * radius, b + k * radius)),
        },
        Shape::Annulus { inner, outer } => TopoSummary {
            b0: 1,
            b1: 1,
            critical_values: vec![b - k * outer, b - k * inner, b + k * inner, b + k * outer],
            extent: Some((b - k * outer, b + k * outer)),
        },
        Shape::TwoClusters { separation } => {
            let centers = [[-0.5 * separation, 0.0], [0.5 * separation, 0.0]];
            let mut vals: Vec<f64> = centers.iter().map(|c| f.eval(c)).collect();
            vals.sort_by(f64::total_cmp);
            let extent = Some((vals[0], vals[1]));
            vals.dedup();
            TopoSummary { b0: 2, b1: 0, critical_values: vals, extent }
        }
        Shape::FigureEight => {
            if f.gradient[0].abs() > 1e-12 * k {
                return Err(InputError::UnsupportedFunctional(
                    "figure-eight ground truth is tabulated for vertical gradients only".into(),
                ));
            }
            TopoSummary {
                b0: 1,
                b1: 2,
                critical_values: vec![b - 2.0 * k, b, b + 2.0 * k],
                extent: Some((b - 2.0 * k, b + 2.0 * k)),
            }
        }
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub sampler: ShapeSampler,
    pub eps: f64,
    #[serde(default = "default_direction")]
    pub direction: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
}

fn default_direction() -> Vec<f64> {
    vec![0.0, 1.0]
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub shape: String,
    pub samples: usize,
    pub noise: f64,
    pub seed: u64,
    pub eps: f64,
    pub lipschitz: f64,
    /// k(ε+δ)
    pub bound: f64,
    pub covering_radius: f64,
    pub hypotheses_met: bool,
    pub ground_truth: TopoSummary,
    pub computed: TopoSummary,
    /// Computed critical values with features shorter than 2·bound collapsed.
    pub stable_critical_values: Vec<f64>,
    pub betti_required: bool,
    pub betti_match: bool,
    pub max_critical_displacement: Option<f64>,
    pub displacement_checked: bool,
    pub displacement_ok: Option<bool>,
    /// Overall pass/fail; absent when the density hypothesis is unmet.
    pub verdict: Option<bool>,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, InputError> {
    let sampler = &config.sampler;
    let points = sampler.sample();
    let f = AffineFunctional::new(config.direction.clone(), config.offset)?;
    if f.is_constant() {
        return Err(InputError::ConstantFunctional);
    }
    let k = f.gradient_norm();
    let bound = k * (config.eps + sampler.noise);

    let covering_radius = sampler
        .probes()
        .iter()
        .map(|pr| {
            points
                .iter()
                .map(|p| {
                    ((p.coords[0] - pr[0]).powi(2) + (p.coords[1] - pr[1]).powi(2)).sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0f64, f64::max);
    let hypotheses_met = covering_radius <= config.eps;

    let (balls, pairs) = build_inputs(&points, config.eps, &f)?;
    let state = sweep(&balls, &pairs).expect("generated inputs satisfy the sweep contract");
    let g = extract(&state);
    let (b0, b1) = betti(&g);
    let computed = TopoSummary {
        b0,
        b1,
        critical_values: g.topological_critical_values(),
        extent: g.function_extent(),
    };
    let gt = ground_truth(&sampler.shape, &f)?;

    let betti_required = sampler.shape.feature_scale() > 4.0 * (config.eps + sampler.noise);
    let betti_match = (computed.b0, computed.b1) == (gt.b0, gt.b1);

    let mut targets = gt.critical_values.clone();
    if let Some((lo, hi)) = computed.extent {
        targets.push(lo);
        targets.push(hi);
    }
    // an approximation within `bound` only constrains features that
    // persist beyond 2·bound; collapse shorter ones before measuring
    let stable_critical_values = g.stable_critical_values(2.0 * bound);
    let max_critical_displacement = stable_critical_values
        .iter()
        .map(|v| targets.iter().map(|t| (v - t).abs()).fold(f64::INFINITY, f64::min))
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))));
    let displacement_checked = sampler.shape.displacement_gated();
    let displacement_ok = displacement_checked
        .then(|| max_critical_displacement.is_none_or(|d| d <= bound + 1e-9));

    let verdict = hypotheses_met.then(|| {
        (!betti_required || betti_match) && displacement_ok.unwrap_or(true)
    });

    Ok(ExperimentReport {
        shape: sampler.shape.label(),
        samples: points.len(),
        noise: sampler.noise,
        seed: sampler.seed,
        eps: config.eps,
        lipschitz: k,
        bound,
        covering_radius,
        hypotheses_met,
        ground_truth: gt,
        computed,
        stable_critical_values,
        betti_required,
        betti_match,
        max_critical_displacement,
        displacement_checked,
        displacement_ok,
        verdict,
    })
}

/// Plain-text summary, one row per report.
pub fn summary_table(reports: &[ExperimentReport]) -> String {
    let mut s = String::from(
        "shape                    n     eps   cover   bound   b0/b1 (gt)   maxdisp   verdict\n",
    );
    for r in reports {
        let disp = r
            .max_critical_displacement
            .map_or("-".to_string(), |d| format!("{d:.4}"));
        let verdict = match r.verdict {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "hypotheses unmet",
        };
        s.push_str(&format!(
            "{:<22} {:>5} {:>7.3} {:>7.4} {:>7.4}   {}/{} ({}/{})   {:>8}   {}\n",
            r.shape,
            r.samples,
            r.eps,
            r.covering_radius,
            r.bound,
            r.computed.b0,
            r.computed.b1,
            r.ground_truth.b0,
            r.ground_truth.b1,
            disp,
            verdict
        ));
    }
    s
}
