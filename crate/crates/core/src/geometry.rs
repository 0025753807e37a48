//! Interval inputs for the sweep: images of balls and of pairwise ball
//! intersections under an affine function.
//!
//! For a point `p`, radius `eps` and `f(x) = w·x + b`, the image of the
//! closed ball is `[f(p) - eps·‖w‖, f(p) + eps·‖w‖]`. For two balls whose
//! centers are at most `2·eps` apart, the image of the lens-shaped
//! intersection is computed in closed form: the extremum of `f` over the
//! lens is either a ball-boundary extremal point `p ± eps·w/‖w‖` (when
//! that point lies in the other ball) or a point of the intersection
//! sphere of the two ball boundaries, which lies in the hyperplane
//! orthogonal to `q - p` through the midpoint.

use serde::{Deserialize, Serialize};

use crate::error::InputError;

/// A point of the input cloud. Ids are dense indices `0..n-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub id: u32,
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(id: u32, coords: Vec<f64>) -> Result<Self, InputError> {
        if coords.is_empty() {
            return Err(InputError::EmptyPoint { id });
        }
        for (axis, c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(InputError::NonFiniteCoordinate { id, axis });
            }
        }
        Ok(Point { id, coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// The affine function `f(x) = w·x + b` whose level sets define the quotient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineFunctional {
    pub gradient: Vec<f64>,
    pub offset: f64,
}

impl AffineFunctional {
    pub fn new(gradient: Vec<f64>, offset: f64) -> Result<Self, InputError> {
        if !offset.is_finite() || gradient.iter().any(|g| !g.is_finite()) {
            return Err(InputError::NonFiniteFunctional);
        }
        Ok(AffineFunctional { gradient, offset })
    }

    /// Projection onto the last of `dim` coordinate axes.
    pub fn axis_projection(dim: usize) -> Self {
        let mut gradient = vec![0.0; dim];
        gradient[dim - 1] = 1.0;
        AffineFunctional { gradient, offset: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn eval(&self, coords: &[f64]) -> f64 {
        debug_assert_eq!(coords.len(), self.gradient.len());
        let mut acc = self.offset;
        for (w, x) in self.gradient.iter().zip(coords) {
            acc += w * x;
        }
        acc
    }

    pub fn gradient_norm(&self) -> f64 {
        self.gradient.iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    /// True when the gradient is identically zero, so every level set is
    /// either empty or everything.
    pub fn is_constant(&self) -> bool {
        self.gradient.iter().all(|w| *w == 0.0)
    }
}

/// Label of an event interval: a single ball or an unordered pair.
/// Pairs are stored with the smaller id first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IntervalLabel {
    Ball(u32),
    Pair(u32, u32),
}

impl IntervalLabel {
    pub fn pair(p: u32, q: u32) -> Self {
        assert_ne!(p, q, "pair label requires two distinct points");
        IntervalLabel::Pair(p.min(q), p.max(q))
    }
}

impl std::fmt::Display for IntervalLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IntervalLabel::Ball(p) => write!(f, "I_{p}"),
            IntervalLabel::Pair(p, q) => write!(f, "I_{{{p},{q}}}"),
        }
    }
}

/// A closed interval `[lo, hi]` with its label. Single-point intervals
/// are allowed; `lo <= hi` always holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledInterval {
    lo: f64,
    hi: f64,
    label: IntervalLabel,
}

fn scrub_zero(v: f64) -> f64 {
    // normalize -0.0 so endpoint comparisons are value comparisons
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

impl LabeledInterval {
    pub fn new(lo: f64, hi: f64, label: IntervalLabel) -> Result<Self, InputError> {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(InputError::BadInterval {
                label: label.to_string(),
                msg: format!("invalid endpoints [{lo},{hi}]"),
            });
        }
        Ok(LabeledInterval {
            lo: scrub_zero(lo),
            hi: scrub_zero(hi),
            label,
        })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn label(&self) -> IntervalLabel {
        self.label
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.label, IntervalLabel::Ball(_))
    }
}

fn validate_common(eps: f64, f: &AffineFunctional, dim: usize) -> Result<(), InputError> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(InputError::BadEps(eps));
    }
    if f.dim() != dim {
        return Err(InputError::FunctionalDimension { got: f.dim(), expected: dim });
    }
    Ok(())
}

/// The two endpoints of `f(B_eps(p))`. Shared by ball and pair intervals
/// so that coinciding endpoints are bitwise equal.
fn ball_extent(p: &Point, eps: f64, f: &AffineFunctional) -> (f64, f64) {
    let c = f.eval(&p.coords);
    let r = eps * f.gradient_norm();
    (c - r, c + r)
}

/// Image of the closed ball `B_eps(p)` under `f`, labeled with `p`.
/// For a constant functional this collapses to the point `[b, b]`.
pub fn ball_interval(p: &Point, eps: f64, f: &AffineFunctional) -> Result<LabeledInterval, InputError> {
    validate_common(eps, f, p.dim())?;
    let (lo, hi) = ball_extent(p, eps, f);
    LabeledInterval::new(lo, hi, IntervalLabel::Ball(p.id))
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Image of `B_eps(p) ∩ B_eps(q)` under `f`, or `None` when the balls do
/// not meet. Tangent balls (`‖p-q‖ = 2·eps` exactly) give a single-point
/// interval.
pub fn pair_interval(
    p: &Point,
    q: &Point,
    eps: f64,
    f: &AffineFunctional,
) -> Result<Option<LabeledInterval>, InputError> {
    assert_ne!(p.id, q.id, "pair_interval requires two distinct points");
    validate_common(eps, f, p.dim())?;
    if q.dim() != p.dim() {
        return Err(InputError::DimensionMismatch { id: q.id, got: q.dim(), expected: p.dim() });
    }
    // canonical order makes the computation symmetric in (p, q) bit for bit
    let (a, b) = if p.id < q.id { (p, q) } else { (q, p) };

    let d2 = dist2(&a.coords, &b.coords);
    if d2 > 4.0 * eps * eps {
        return Ok(None);
    }
    let label = IntervalLabel::pair(a.id, b.id);

    if f.is_constant() {
        return Ok(Some(LabeledInterval::new(f.offset, f.offset, label)?));
    }

    let (lo_a, hi_a) = ball_extent(a, eps, f);
    let (lo_b, hi_b) = ball_extent(b, eps, f);
    let wn = f.gradient_norm();
    let d = d2.sqrt();

    // midpoint of the segment and the radius of the boundary sphere of the lens
    let mid: Vec<f64> = a.coords.iter().zip(&b.coords).map(|(x, y)| 0.5 * (x + y)).collect();
    let f_mid = f.eval(&mid);
    let rho = (eps * eps - 0.25 * d2).max(0.0).sqrt();
    // component of w orthogonal to the center line
    let w_dot_u: f64 = f
        .gradient
        .iter()
        .zip(a.coords.iter().zip(&b.coords))
        .map(|(w, (x, y))| w * (y - x))
        .sum::<f64>()
        / d;
    let w_perp = (wn * wn - w_dot_u * w_dot_u).max(0.0).sqrt();

    // extremal point of one ball, tested for membership in the other
    let cap_feasible = |center: &Point, other: &Point, sign: f64| -> bool {
        let mut dd = 0.0;
        for i in 0..center.dim() {
            let xi = center.coords[i] + sign * eps * f.gradient[i] / wn;
            let diff = xi - other.coords[i];
            dd += diff * diff;
        }
        dd <= eps * eps
    };

    let mut hi = if cap_feasible(a, b, 1.0) {
        hi_a
    } else if cap_feasible(b, a, 1.0) {
        hi_b
    } else {
        f_mid + rho * w_perp
    };
    let mut lo = if cap_feasible(a, b, -1.0) {
        lo_a
    } else if cap_feasible(b, a, -1.0) {
        lo_b
    } else {
        f_mid - rho * w_perp
    };

    // the lens is contained in both balls; clamp away sphere-case rounding
    hi = hi.min(hi_a).min(hi_b);
    lo = lo.max(lo_a).max(lo_b);
    if lo > hi {
        let m = 0.5 * (lo + hi);
        lo = m;
        hi = m;
    }
    Ok(Some(LabeledInterval::new(lo, hi, label)?))
}

/// All event intervals for a point cloud: one ball interval per point and
/// one pair interval per unordered pair with a nonempty lens, in
/// lexicographic pair order. Runs in Θ(n²·d).
pub fn build_inputs(
    points: &[Point],
    eps: f64,
    f: &AffineFunctional,
) -> Result<(Vec<LabeledInterval>, Vec<LabeledInterval>), InputError> {
    let n = points.len();
    for (i, p) in points.iter().enumerate() {
        if p.id as usize != i {
            return Err(InputError::BadPointId { id: p.id, n });
        }
        if p.dim() != points[0].dim() {
            return Err(InputError::DimensionMismatch {
                id: p.id,
                got: p.dim(),
                expected: points[0].dim(),
            });
        }
        for (axis, c) in p.coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(InputError::NonFiniteCoordinate { id: p.id, axis });
            }
        }
    }
    if n == 0 {
        if !eps.is_finite() || eps <= 0.0 {
            return Err(InputError::BadEps(eps));
        }
        return Ok((Vec::new(), Vec::new()));
    }
    validate_common(eps, f, points[0].dim())?;

    let mut dups = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if points[i].coords == points[j].coords {
                dups.push((points[i].id, points[j].id));
            }
        }
    }
    if !dups.is_empty() {
        return Err(InputError::DuplicatePoints(dups));
    }

    let mut balls = Vec::with_capacity(n);
    for p in points {
        balls.push(ball_interval(p, eps, f)?);
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some(iv) = pair_interval(&points[i], &points[j], eps, f)? {
                pairs.push(iv);
            }
        }
    }
    Ok((balls, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{sampled_ball_extent, sampled_pair_extent};
    use proptest::prelude::*;

    fn pt(id: u32, coords: &[f64]) -> Point {
        Point::new(id, coords.to_vec()).unwrap()
    }

    fn yproj() -> AffineFunctional {
        AffineFunctional::axis_projection(2)
    }

    #[test]
    fn ball_at_origin() {
        let iv = ball_interval(&pt(0, &[0.0, 0.0]), 1.0, &yproj()).unwrap();
        assert_eq!((iv.lo(), iv.hi()), (-1.0, 1.0));
    }

    #[test]
    fn ball_from_documented_example() {
        // point (0.1, 1), eps 1, y-projection
        let iv = ball_interval(&pt(0, &[0.1, 1.0]), 1.0, &yproj()).unwrap();
        assert_eq!((iv.lo(), iv.hi()), (0.0, 2.0));
    }

    #[test]
    fn ball_with_tilted_functional_matches_sampling() {
        let p = pt(0, &[3.0, 4.0]);
        let f = AffineFunctional::new(vec![3.0 / 5.0, 4.0 / 5.0], 0.0).unwrap();
        let iv = ball_interval(&p, 0.5, &f).unwrap();
        assert!((iv.lo() - 4.5).abs() < 1e-12);
        assert!((iv.hi() - 5.5).abs() < 1e-12);
        let (slo, shi) = sampled_ball_extent(&p, 0.5, &f, 1_000_000, 7);
        assert!((iv.lo() - slo).abs() < 1e-3);
        assert!((iv.hi() - shi).abs() < 1e-3);
    }

    #[test]
    fn tangent_balls_give_single_point() {
        let p = pt(0, &[0.0, 0.0]);
        let q = pt(1, &[0.0, 2.0]);
        let iv = pair_interval(&p, &q, 1.0, &yproj()).unwrap().unwrap();
        assert_eq!((iv.lo(), iv.hi()), (1.0, 1.0));
    }

    #[test]
    fn disjoint_balls_give_nothing() {
        let p = pt(0, &[0.0, 0.0]);
        let q = pt(1, &[0.0, 2.0000001]);
        assert!(pair_interval(&p, &q, 1.0, &yproj()).unwrap().is_none());
    }

    #[test]
    fn pair_sphere_case_from_documented_example() {
        // both extremes on the intersection sphere
        let p = pt(0, &[0.1, 1.0]);
        let q = pt(1, &[1.4, -0.4]);
        let iv = pair_interval(&p, &q, 1.0, &yproj()).unwrap().unwrap();
        assert!((iv.lo() - 0.1).abs() < 1e-2);
        assert!((iv.hi() - 0.5).abs() < 1e-2);
        let (slo, shi) = sampled_pair_extent(&p, &q, 1.0, &yproj(), 1_000_000).unwrap();
        assert!((iv.lo() - slo).abs() < 1e-3);
        assert!((iv.hi() - shi).abs() < 1e-3);
    }

    #[test]
    fn pair_cap_case_from_documented_example() {
        // both extremes are ball-cap points inside the other ball
        let p = pt(0, &[1.4, -0.4]);
        let q = pt(1, &[1.9, 1.3]);
        let iv = pair_interval(&p, &q, 1.0, &yproj()).unwrap().unwrap();
        assert!((iv.lo() - 0.3).abs() < 1e-12);
        assert!((iv.hi() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn pair_sphere_case_matches_sampling_oracle() {
        let p = pt(0, &[1.9, 1.3]);
        let q = pt(1, &[0.5, 2.0]);
        let iv = pair_interval(&p, &q, 1.0, &yproj()).unwrap().unwrap();
        assert!((iv.lo() - 1.093).abs() < 1e-3);
        assert!((iv.hi() - 2.207).abs() < 1e-3);
        let (slo, shi) = sampled_pair_extent(&p, &q, 1.0, &yproj(), 1_000_000).unwrap();
        assert!((iv.lo() - slo).abs() < 1e-3);
        assert!((iv.hi() - shi).abs() < 1e-3);
    }

    #[test]
    fn cap_endpoints_bitwise_match_ball_endpoints() {
        // stacked balls: the lens minimum is the upper ball's lowest point
        let p = pt(0, &[0.0, 0.5]);
        let q = pt(1, &[0.0, 0.0]);
        let f = AffineFunctional::new(vec![0.3, 0.9], 0.1).unwrap();
        let bp = ball_interval(&p, 1.0, &f).unwrap();
        let iv = pair_interval(&p, &q, 1.0, &f).unwrap().unwrap();
        assert_eq!(iv.lo().to_bits(), bp.lo().to_bits());
    }

    #[test]
    fn build_inputs_empty() {
        let (balls, pairs) = build_inputs(&[], 1.0, &yproj()).unwrap();
        assert!(balls.is_empty() && pairs.is_empty());
    }

    #[test]
    fn build_inputs_four_point_example() {
        let pts = vec![
            pt(0, &[0.1, 1.0]),
            pt(1, &[1.4, -0.4]),
            pt(2, &[1.9, 1.3]),
            pt(3, &[0.5, 2.0]),
        ];
        let (balls, pairs) = build_inputs(&pts, 1.0, &yproj()).unwrap();
        assert_eq!(balls.len(), 4);
        let labels: Vec<_> = pairs.iter().map(|iv| iv.label()).collect();
        assert_eq!(
            labels,
            vec![
                IntervalLabel::Pair(0, 1),
                IntervalLabel::Pair(0, 2),
                IntervalLabel::Pair(0, 3),
                IntervalLabel::Pair(1, 2),
                IntervalLabel::Pair(2, 3),
            ]
        );
    }

    #[test]
    fn collinear_far_points_have_no_pairs() {
        let pts = vec![pt(0, &[0.0, 0.0]), pt(1, &[3.0, 0.0]), pt(2, &[6.0, 0.0])];
        let (balls, pairs) = build_inputs(&pts, 1.0, &yproj()).unwrap();
        assert_eq!(balls.len(), 3);
        assert!(pairs.is_empty());
    }

    #[test]
    fn duplicate_points_rejected() {
        let pts = vec![pt(0, &[1.0, 2.0]), pt(1, &[1.0, 2.0])];
        match build_inputs(&pts, 1.0, &yproj()) {
            Err(InputError::DuplicatePoints(d)) => assert_eq!(d, vec![(0, 1)]),
            other => panic!("expected duplicate error, got {other:?}"),
        }
    }

    #[test]
    fn constant_functional_collapses_intervals() {
        let f = AffineFunctional::new(vec![0.0, 0.0], 2.5).unwrap();
        let iv = ball_interval(&pt(0, &[1.0, 1.0]), 1.0, &f).unwrap();
        assert_eq!((iv.lo(), iv.hi()), (2.5, 2.5));
        let p = pt(0, &[0.0, 0.0]);
        let q = pt(1, &[0.5, 0.0]);
        let pv = pair_interval(&p, &q, 1.0, &f).unwrap().unwrap();
        assert_eq!((pv.lo(), pv.hi()), (2.5, 2.5));
    }

    fn arb_point(id: u32, d: usize) -> impl Strategy<Value = Point> {
        proptest::collection::vec(-3.0f64..3.0, d).prop_map(move |c| Point::new(id, c).unwrap())
    }

    fn arb_functional(d: usize) -> impl Strategy<Value = AffineFunctional> {
        (proptest::collection::vec(-2.0f64..2.0, d), -1.0f64..1.0).prop_filter_map(
            "nonzero gradient",
            |(g, b)| {
                let f = AffineFunctional::new(g, b).unwrap();
                if f.gradient_norm() > 1e-3 {
                    Some(f)
                } else {
                    None
                }
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(350))]

        #[test]
        fn pair_interval_symmetry_and_containment(
            (p, q, f, eps) in prop_oneof![Just(2usize), Just(3), Just(5)].prop_flat_map(|d| {
                (arb_point(0, d), arb_point(1, d), arb_functional(d), 0.05f64..1.5)
            })
        ) {
            let a = pair_interval(&p, &q, eps, &f).unwrap();
            let b = pair_interval(&q, &p, eps, &f).unwrap();
            prop_assert_eq!(a.clone(), b);
            if let Some(iv) = a {
                let bp = ball_interval(&p, eps, &f).unwrap();
                let bq = ball_interval(&q, eps, &f).unwrap();
                prop_assert!(iv.lo() >= bp.lo() && iv.hi() <= bp.hi());
                prop_assert!(iv.lo() >= bq.lo() && iv.hi() <= bq.hi());
            }
        }

        #[test]
        fn translation_equivariance(
            (p, q, f, eps, shift) in prop_oneof![Just(2usize), Just(3)].prop_flat_map(|d| {
                (
                    arb_point(0, d),
                    arb_point(1, d),
                    arb_functional(d),
                    0.1f64..1.5,
                    proptest::collection::vec(-2.0f64..2.0, d),
                )
            })
        ) {
            let sp = Point::new(0, p.coords.iter().zip(&shift).map(|(a, b)| a + b).collect()).unwrap();
            let sq = Point::new(1, q.coords.iter().zip(&shift).map(|(a, b)| a + b).collect()).unwrap();
            let delta = f.eval(&shift) - f.offset;
            let b0 = ball_interval(&p, eps, &f).unwrap();
            let b1 = ball_interval(&sp, eps, &f).unwrap();
            prop_assert!((b1.lo() - b0.lo() - delta).abs() < 1e-9);
            prop_assert!((b1.hi() - b0.hi() - delta).abs() < 1e-9);
            let pv = pair_interval(&p, &q, eps, &f).unwrap();
            let sv = pair_interval(&sp, &sq, eps, &f).unwrap();
            prop_assert_eq!(pv.is_some(), sv.is_some());
            if let (Some(x), Some(y)) = (pv, sv) {
                prop_assert!((y.lo() - x.lo() - delta).abs() < 1e-9);
                prop_assert!((y.hi() - x.hi() - delta).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn closed_forms_agree_with_sampling_in_low_and_high_dimension() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20_240_817);
        let mut tested = 0usize;
        for &d in &[2usize, 3, 5] {
            let mut count = 0usize;
            while count < 334 {
                let p = Point::new(0, (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
                let q = Point::new(1, (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
                let g: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect();
                let f = match AffineFunctional::new(g, rng.gen_range(-1.0..1.0)) {
                    Ok(f) if f.gradient_norm() > 1e-2 => f,
                    _ => continue,
                };
                let eps = rng.gen_range(0.2..1.2);
                let Some(iv) = pair_interval(&p, &q, eps, &f).unwrap() else {
                    continue;
                };
                let (slo, shi) = sampled_pair_extent(&p, &q, eps, &f, 8192).unwrap();
                assert!(
                    (iv.lo() - slo).abs() < 1e-3 && (iv.hi() - shi).abs() < 1e-3,
                    "d={d} p={:?} q={:?} eps={eps} closed=[{},{}] sampled=[{slo},{shi}]",
                    p.coords,
                    q.coords,
                    iv.lo(),
                    iv.hi()
                );
                count += 1;
                tested += 1;
            }
        }
        assert!(tested >= 1000);
    }
}
