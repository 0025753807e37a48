//! Independent brute-force reference implementations used to validate
//! the sweep and the extracted graphs on small instances.
//!
//! Everything here recomputes from first principles: level partitions by
//! a fresh union-find per level, graphs by sampling one level per
//! constant range, and interval extents by dense sampling of ball and
//! lens boundaries. None of it shares code with the sweep path.

use serde::Serialize;

use crate::geometry::{AffineFunctional, IntervalLabel, LabeledInterval, Point};
use crate::reeb::{ReebCell, ReebEdge, ReebGraph};
use crate::sweep::{Bound, PointId, SweepState};

/// The partition of the active points at one level: points whose ball
/// interval contains the level, grouped by the transitive closure of the
/// pair-interval relations there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelPartition {
    pub level: f64,
    pub classes: Vec<Vec<PointId>>,
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Level partition at `x`, computed from scratch.
pub fn partition_at(x: f64, balls: &[LabeledInterval], pairs: &[LabeledInterval]) -> LevelPartition {
    let mut active: Vec<PointId> = Vec::new();
    for iv in balls {
        if let IntervalLabel::Ball(p) = iv.label() {
            if iv.contains(x) {
                active.push(p);
            }
        }
    }
    active.sort_unstable();
    let index: std::collections::BTreeMap<PointId, usize> =
        active.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut dsu = Dsu::new(active.len());
    for iv in pairs {
        if let IntervalLabel::Pair(p, q) = iv.label() {
            if iv.contains(x) {
                if let (Some(&a), Some(&b)) = (index.get(&p), index.get(&q)) {
                    dsu.union(a, b);
                }
            }
        }
    }
    let mut by_root: std::collections::BTreeMap<usize, Vec<PointId>> = Default::default();
    for (i, &p) in active.iter().enumerate() {
        by_root.entry(dsu.find(i)).or_default().push(p);
    }
    let mut classes: Vec<Vec<PointId>> = by_root.into_values().collect();
    classes.sort_by_key(|c| c[0]);
    LevelPartition { level: x, classes }
}

fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits + 1 } else { bits - 1 })
}

fn next_down(x: f64) -> f64 {
    -next_up(-x)
}

fn bound_contains(lo: Bound, hi: Bound, x: f64) -> bool {
    (lo.value < x || (lo.value == x && lo.inclusive)) && (x < hi.value || (x == hi.value && hi.inclusive))
}

/// Witness levels inside a cell: both ends (or the nearest float inside
/// an open end) and the midpoint.
fn cell_samples(lo: Bound, hi: Bound) -> Vec<f64> {
    let mut cands = Vec::with_capacity(4);
    match (lo.is_finite(), hi.is_finite()) {
        (false, false) => cands.push(0.0),
        (false, true) => {
            cands.push(hi.value - 1.0);
            cands.push(next_down(hi.value));
            cands.push(hi.value);
        }
        (true, false) => {
            cands.push(lo.value);
            cands.push(next_up(lo.value));
            cands.push(lo.value + 1.0);
        }
        (true, true) => {
            cands.push(lo.value);
            cands.push(next_up(lo.value));
            cands.push(0.5 * (lo.value + hi.value));
            cands.push(next_down(hi.value));
            cands.push(hi.value);
        }
    }
    cands.retain(|&x| bound_contains(lo, hi, x));
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    cands
}

fn split_events(events: &[LabeledInterval]) -> (Vec<LabeledInterval>, Vec<LabeledInterval>) {
    let mut balls = Vec::new();
    let mut pairs = Vec::new();
    for ev in events {
        match ev.label() {
            IntervalLabel::Ball(_) => balls.push(ev.clone()),
            IntervalLabel::Pair(..) => pairs.push(ev.clone()),
        }
    }
    (balls, pairs)
}

/// Direct construction of the output graph from the definition: evaluate
/// the level partition at every interval endpoint and at one interior
/// point of every gap between consecutive endpoints, then fuse equal
/// consecutive levels and link consecutive ranges by set intersection.
pub fn naive_reeb(balls: &[LabeledInterval], pairs: &[LabeledInterval]) -> ReebGraph {
    let mut endpoints: Vec<f64> = balls
        .iter()
        .chain(pairs)
        .flat_map(|iv| [iv.lo(), iv.hi()])
        .collect();
    endpoints.sort_by(f64::total_cmp);
    endpoints.dedup();

    let mut samples: Vec<f64> = Vec::new();
    if endpoints.is_empty() {
        samples.push(0.0);
    } else {
        samples.push(endpoints[0] - 1.0);
        for i in 0..endpoints.len() {
            samples.push(endpoints[i]);
            if i + 1 < endpoints.len() {
                let (a, b) = (endpoints[i], endpoints[i + 1]);
                let mid = 0.5 * (a + b);
                if mid > a && mid < b {
                    samples.push(mid);
                } else if next_up(a) < b {
                    samples.push(next_up(a));
                }
            }
        }
        samples.push(endpoints[endpoints.len() - 1] + 1.0);
    }
    let is_endpoint = |x: f64| endpoints.binary_search_by(|e| e.total_cmp(&x)).is_ok();

    let parts: Vec<Vec<Vec<PointId>>> = samples
        .iter()
        .map(|&x| partition_at(x, balls, pairs).classes)
        .collect();

    // group consecutive equal partitions into runs
    let mut run_ends: Vec<usize> = Vec::new(); // inclusive sample index per run
    for i in 0..parts.len() {
        if i + 1 == parts.len() || parts[i + 1] != parts[i] {
            run_ends.push(i);
        }
    }

    let mut cells: Vec<ReebCell> = Vec::new();
    let mut critical_values: Vec<f64> = Vec::new();
    let mut lo = Bound::NEG_INF;
    for (r, &end) in run_ends.iter().enumerate() {
        let hi = if r + 1 == run_ends.len() {
            Bound::POS_INF
        } else {
            // the partition changes between samples[end] and samples[end+1];
            // the change happens at whichever of the two is an endpoint
            let a = samples[end];
            let b = samples[end + 1];
            if is_endpoint(a) && !is_endpoint(b) {
                Bound::closed(a)
            } else {
                Bound::open(b)
            }
        };
        cells.push(ReebCell { lo, hi, components: parts[run_ends[r]].clone() });
        if hi.is_finite() {
            critical_values.push(hi.value);
            lo = Bound { value: hi.value, inclusive: !hi.inclusive };
        }
    }

    let mut edges: Vec<ReebEdge> = Vec::new();
    for k in 0..cells.len().saturating_sub(1) {
        for (i, ci) in cells[k].components.iter().enumerate() {
            for (j, cj) in cells[k + 1].components.iter().enumerate() {
                if sorted_intersects(ci, cj) {
                    edges.push(ReebEdge { cell: k, left: i, right: j });
                }
            }
        }
    }
    ReebGraph { cells, edges, critical_values }
}

fn sorted_intersects(a: &[PointId], b: &[PointId]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// First structural difference between two output graphs, with a level
/// witnessing the offending cell.
#[derive(Debug, Clone, Serialize)]
pub struct GraphMismatch {
    pub cell: usize,
    pub witness: f64,
    pub detail: String,
}

impl std::fmt::Display for GraphMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "cell {} (witness level x = {}): {}", self.cell, self.witness, self.detail)
    }
}

fn witness_level(lo: Bound, hi: Bound) -> f64 {
    cell_samples(lo, hi).first().copied().unwrap_or(0.0)
}

/// Cell-by-cell comparison of two output graphs: bounds, component
/// families, link edges and critical values must all agree.
pub fn compare_graphs(computed: &ReebGraph, reference: &ReebGraph) -> Result<(), GraphMismatch> {
    let k = computed.cells.len().min(reference.cells.len());
    for i in 0..k {
        let a = &computed.cells[i];
        let b = &reference.cells[i];
        if (a.lo, a.hi) != (b.lo, b.hi) {
            return Err(GraphMismatch {
                cell: i,
                witness: witness_level(b.lo, b.hi),
                detail: format!(
                    "cell range mismatch: computed [{:?},{:?}], reference [{:?},{:?}]",
                    a.lo, a.hi, b.lo, b.hi
                ),
            });
        }
        if a.components != b.components {
            return Err(GraphMismatch {
                cell: i,
                witness: witness_level(b.lo, b.hi),
                detail: format!(
                    "partition mismatch: computed {:?}, reference {:?}",
                    a.components, b.components
                ),
            });
        }
    }
    if computed.cells.len() != reference.cells.len() {
        let i = k.saturating_sub(1);
        let longer = if computed.cells.len() > reference.cells.len() { computed } else { reference };
        return Err(GraphMismatch {
            cell: k,
            witness: witness_level(longer.cells[k].lo, longer.cells[k].hi),
            detail: format!(
                "cell count mismatch: computed {}, reference {} (diverging after cell {i})",
                computed.cells.len(),
                reference.cells.len()
            ),
        });
    }
    for cell in 0..k.saturating_sub(1) {
        let ea: Vec<(usize, usize)> = computed
            .edges
            .iter()
            .filter(|e| e.cell == cell)
            .map(|e| (e.left, e.right))
            .collect();
        let eb: Vec<(usize, usize)> = reference
            .edges
            .iter()
            .filter(|e| e.cell == cell)
            .map(|e| (e.left, e.right))
            .collect();
        let (mut sa, mut sb) = (ea.clone(), eb.clone());
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return Err(GraphMismatch {
                cell,
                witness: reference.cells[cell].hi.value,
                detail: format!("link edges mismatch: computed {sa:?}, reference {sb:?}"),
            });
        }
    }
    if computed.critical_values != reference.critical_values {
        return Err(GraphMismatch {
            cell: 0,
            witness: *computed
                .critical_values
                .iter()
                .zip(&reference.critical_values)
                .find(|(a, b)| a != b)
                .map(|(_, b)| b)
                .unwrap_or(&0.0),
            detail: "critical value lists differ".to_string(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClauseKind {
    /// The stored partition of each cell equals the level partition of
    /// the processed intervals at every sampled level of the cell.
    LevelPartitions,
    /// Consecutive cells store different partitions.
    MinimalCells,
    /// Link edges connect exactly the intersecting stored sets.
    LinkEdges,
    /// Right of the current event's left endpoint, stored sets only
    /// refine when moving right.
    RightwardRefinement,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClauseFailure {
    pub cell: usize,
    pub witness: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClauseReport {
    pub clause: ClauseKind,
    pub failures: Vec<ClauseFailure>,
}

impl ClauseReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub clauses: Vec<ClauseReport>,
}

impl CheckReport {
    pub fn all_pass(&self) -> bool {
        self.clauses.iter().all(|c| c.pass())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serialization cannot fail")
    }
}

/// Verify a (possibly mid-run) sweep state against the processed events:
/// stored partitions match freshly computed level partitions at sampled
/// levels, the cell list is minimal, link edges match set intersections,
/// and partitions refine from left to right beyond the current event's
/// left endpoint. Failures are reported, not raised.
pub fn check_state(state: &SweepState, processed: &[LabeledInterval]) -> CheckReport {
    let (balls, pairs) = split_events(processed);
    let cells: Vec<_> = state.cells().collect();

    let mut level_failures = Vec::new();
    let mut minimal_failures = Vec::new();
    let mut link_failures = Vec::new();
    let mut refine_failures = Vec::new();

    for (k, cell) in cells.iter().enumerate() {
        let stored = cell.partition();
        for x in cell_samples(cell.lo(), cell.hi()) {
            let expected = partition_at(x, &balls, &pairs).classes;
            if stored != expected {
                level_failures.push(ClauseFailure {
                    cell: k,
                    witness: Some(x),
                    detail: format!("stored {stored:?}, level partition {expected:?}"),
                });
            }
        }
        if k + 1 < cells.len() {
            let right = &cells[k + 1];
            if stored == right.partition() {
                minimal_failures.push(ClauseFailure {
                    cell: k,
                    witness: Some(cell.hi().value),
                    detail: "equal partitions in consecutive cells".to_string(),
                });
            }

            let left_classes = cell.partition_with_roots();
            let right_classes = right.partition_with_roots();
            let mut expected_edges: Vec<(PointId, PointId)> = Vec::new();
            for (rl, ml) in &left_classes {
                for (rr, mr) in &right_classes {
                    if sorted_intersects(ml, mr) {
                        expected_edges.push((*rl, *rr));
                    }
                }
            }
            expected_edges.sort_unstable();
            let stored_edges = cell.edges_to_succ().unwrap_or_default();
            if stored_edges != expected_edges {
                link_failures.push(ClauseFailure {
                    cell: k,
                    witness: Some(cell.hi().value),
                    detail: format!("stored edges {stored_edges:?}, expected {expected_edges:?}"),
                });
            }
        }
    }

    // refinement clause, restricted to cells not entirely left of the
    // last processed interval; consecutive pairs suffice because each
    // point's stored range is contiguous and containment is transitive
    if let Some(last) = processed.last() {
        let cut = last.lo();
        for k in 0..cells.len().saturating_sub(1) {
            let left = &cells[k];
            let not_left_of = left.hi().value > cut || (left.hi().value == cut && left.hi().inclusive);
            if !not_left_of {
                continue;
            }
            let right = &cells[k + 1];
            for r in right.stored_points() {
                if !left.contains_point(r) {
                    refine_failures.push(ClauseFailure {
                        cell: k,
                        witness: None,
                        detail: format!("point {r} stored right of cell {k} but not in it"),
                    });
                    continue;
                }
                let right_class: Vec<PointId> = right
                    .partition()
                    .into_iter()
                    .find(|c| c.contains(&r))
                    .unwrap();
                let left_class: Vec<PointId> = left
                    .partition()
                    .into_iter()
                    .find(|c| c.contains(&r))
                    .unwrap();
                if !right_class.iter().all(|m| left_class.contains(m)) {
                    refine_failures.push(ClauseFailure {
                        cell: k,
                        witness: None,
                        detail: format!(
                            "class of {r} grows moving right: {right_class:?} not within {left_class:?}"
                        ),
                    });
                }
            }
        }
    }

    CheckReport {
        clauses: vec![
            ClauseReport { clause: ClauseKind::LevelPartitions, failures: level_failures },
            ClauseReport { clause: ClauseKind::MinimalCells, failures: minimal_failures },
            ClauseReport { clause: ClauseKind::LinkEdges, failures: link_failures },
            ClauseReport { clause: ClauseKind::RightwardRefinement, failures: refine_failures },
        ],
    }
}

// ---------------------------------------------------------------------
// dense-sampling extent oracles for the closed-form geometry

/// Extent of `f` over the boundary sphere of `B_eps(p)` from uniformly
/// sampled boundary points.
pub fn sampled_ball_extent(
    p: &Point,
    eps: f64,
    f: &AffineFunctional,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let d = p.dim();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut v = vec![0.0f64; d];
    for _ in 0..samples {
        let mut norm2 = 0.0;
        for x in v.iter_mut() {
            *x = StandardNormal.sample(&mut rng);
            norm2 += *x * *x;
        }
        if norm2 == 0.0 {
            continue;
        }
        let scale = eps / norm2.sqrt();
        let mut val = f.offset;
        for ((w, x), vi) in f.gradient.iter().zip(&p.coords).zip(&v) {
            val += w * (x + scale * vi);
        }
        lo = lo.min(val);
        hi = hi.max(val);
    }
    (lo, hi)
}

/// Extent of `f` over the boundary of the lens `B_eps(p) ∩ B_eps(q)`,
/// sampled densely along the boundary circles inside the plane through
/// both centers spanned by the center line and the gradient. Reflection
/// across that plane fixes the lens and the function values, so the
/// extremes of `f` over the lens are attained there. Returns `None` when
/// the balls do not meet.
pub fn sampled_pair_extent(
    p: &Point,
    q: &Point,
    eps: f64,
    f: &AffineFunctional,
    resolution: usize,
) -> Option<(f64, f64)> {
    let d = p.dim();
    let d2: f64 = p
        .coords
        .iter()
        .zip(&q.coords)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    if d2 > 4.0 * eps * eps {
        return None;
    }
    let dist = d2.sqrt();
    let c: Vec<f64> = p.coords.iter().zip(&q.coords).map(|(a, b)| 0.5 * (a + b)).collect();
    let f_c = f.eval(&c);
    if f.is_constant() {
        return Some((f.offset, f.offset));
    }
    if d == 1 {
        let lo_pt = p.coords[0].max(q.coords[0]) - eps;
        let hi_pt = p.coords[0].min(q.coords[0]) + eps;
        let (a, b) = (f.eval(&[lo_pt]), f.eval(&[hi_pt]));
        return Some((a.min(b), a.max(b)));
    }

    // orthonormal plane basis: e1 along the center line, e2 the gradient
    // component orthogonal to it (or any orthogonal vector if parallel)
    let u: Vec<f64> = p.coords.iter().zip(&q.coords).map(|(a, b)| (b - a) / dist).collect();
    let w_dot_u: f64 = f.gradient.iter().zip(&u).map(|(w, ui)| w * ui).sum();
    let mut e2: Vec<f64> = f.gradient.iter().zip(&u).map(|(w, ui)| w - w_dot_u * ui).collect();
    let mut n2: f64 = e2.iter().map(|x| x * x).sum();
    if n2.sqrt() < 1e-12 * f.gradient_norm().max(1.0) {
        // gradient parallel to the center line: complete with any
        // orthogonal direction; f is constant along it
        let k = (0..d).min_by(|&i, &j| u[i].abs().partial_cmp(&u[j].abs()).unwrap()).unwrap();
        e2 = (0..d).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
        let dot: f64 = e2.iter().zip(&u).map(|(a, b)| a * b).sum();
        for i in 0..d {
            e2[i] -= dot * u[i];
        }
        n2 = e2.iter().map(|x| x * x).sum();
    }
    let n = n2.sqrt();
    for x in e2.iter_mut() {
        *x /= n;
    }
    let w_e2: f64 = f.gradient.iter().zip(&e2).map(|(w, ei)| w * ei).sum();

    let h = 0.5 * dist;
    let r2 = eps * eps * (1.0 + 1e-12);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut consider = |x1: f64, x2: f64| {
        let val = f_c + x1 * w_dot_u + x2 * w_e2;
        lo = lo.min(val);
        hi = hi.max(val);
    };
    // the two points where the boundary circles cross; the grid only
    // reaches them to first order, so take them exactly
    let rim = (eps * eps - h * h).max(0.0).sqrt();
    consider(0.0, rim);
    consider(0.0, -rim);
    for k in 0..resolution {
        let theta = 2.0 * std::f64::consts::PI * (k as f64) / (resolution as f64);
        let (sin, cos) = theta.sin_cos();
        // arc of p's boundary inside q's ball; plane coords center (-h, 0)
        let (x1, x2) = (-h + eps * cos, eps * sin);
        if (x1 - h) * (x1 - h) + x2 * x2 <= r2 {
            consider(x1, x2);
        }
        // arc of q's boundary inside p's ball
        let (y1, y2) = (h + eps * cos, eps * sin);
        if (y1 + h) * (y1 + h) + y2 * y2 <= r2 {
            consider(y1, y2);
        }
    }
    if lo > hi {
        // tangency: the lens is the single midpoint
        return Some((f_c, f_c));
    }
    Some((lo, hi))
}
