//! Sweep over sorted interval events, maintaining a partition of ℝ into
//! cells. Each cell stores a union-find forest over the point ids whose
//! ball interval covers it; consecutive cells are connected by a
//! bipartite link graph recording which stored sets intersect.
//!
//! Events are the ball and pair intervals sorted by left endpoint (ball
//! intervals first on ties). A ball event adds its point as a singleton
//! to every cell inside the interval, splitting the boundary cells. A
//! pair event unions the two sets across every cell inside the interval
//! where they still differ; the first such union can make a cell's
//! partition equal to its predecessor's, in which case the two cells
//! fuse so the cell list stays minimal.
//!
//! The cell list lives in an arena; `pred`/`succ` indices form the
//! doubly linked order and dead slots are simply abandoned. A finger
//! into the list tracks the cell containing the current event's left
//! endpoint; events are sorted, so the finger only ever moves right.

mod link_graph;
mod union_find;

pub use link_graph::LinkGraph;
pub use union_find::UnionFind;

use serde::Serialize;

use crate::error::SweepError;
use crate::geometry::{IntervalLabel, LabeledInterval};

/// Dense index of an input point.
pub type PointId = u32;

/// One end of a cell. Infinite bounds are always exclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub inclusive: bool,
}

impl Bound {
    pub const NEG_INF: Bound = Bound { value: f64::NEG_INFINITY, inclusive: false };
    pub const POS_INF: Bound = Bound { value: f64::INFINITY, inclusive: false };

    pub fn closed(value: f64) -> Self {
        Bound { value, inclusive: true }
    }

    pub fn open(value: f64) -> Self {
        Bound { value, inclusive: false }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Tallies of the primitive operations performed by a sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct OpCounters {
    pub make_set: u64,
    pub union: u64,
    pub find_set: u64,
    pub splits: u64,
    pub deletes: u64,
    pub finger_advances: u64,
    /// Total length of neighbor lists traversed during sorted merges.
    pub link_merge_len: u64,
    pub cells_created: u64,
    pub events: u64,
    pub max_cells_touched: u64,
}

impl OpCounters {
    /// Union-find operations: make-set + union + find-set.
    pub fn uf_ops(&self) -> u64 {
        self.make_set + self.union + self.find_set
    }
}

/// Deliberately corrupt one operation of the run. Only used to validate
/// that the state checker detects broken states; never enabled in
/// production paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultInjection {
    /// Skip the k-th union that would otherwise fire (0-based).
    DropUnion { index: u64 },
    /// Skip the k-th cell split requested by a pair union, applying the
    /// union to the whole cell instead (0-based).
    SkipSplit { index: u64 },
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    /// Assert the structural caps after every event: at most `2n` cells
    /// touched per event, at most `n` edges per link graph, and, for
    /// each of a pair event's two points, successor-side neighbor lists
    /// of its class summing to at most `3n - 1` over the event.
    pub check_caps: bool,
    /// Assert after every event that consecutive cells store different
    /// partitions. O(cells · n) per event; meant for tests.
    pub check_minimality: bool,
    pub fault: Option<FaultInjection>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { check_caps: true, check_minimality: false, fault: None }
    }
}

#[derive(Debug, Clone)]
struct CellNode {
    lo: Bound,
    hi: Bound,
    uf: UnionFind,
    pred: Option<usize>,
    succ: Option<usize>,
    /// Link graph shared with `pred`; empty and unused for the head cell.
    link_pred: LinkGraph,
    alive: bool,
}

impl CellNode {
    fn entirely_left_of(&self, x: f64) -> bool {
        self.hi.value < x || (self.hi.value == x && !self.hi.inclusive)
    }

    fn entirely_right_of(&self, x: f64) -> bool {
        self.lo.value > x || (self.lo.value == x && !self.lo.inclusive)
    }

    fn contains(&self, x: f64) -> bool {
        !self.entirely_left_of(x) && !self.entirely_right_of(x)
    }

    /// Containment in the closed interval [a, b].
    fn within(&self, a: f64, b: f64) -> bool {
        self.lo.value >= a && self.hi.value <= b
    }
}

/// Mutable borrow of one cell's pred-side link graph together with a
/// shared borrow of another cell's forest.
fn graph_and_forest(arena: &mut [CellNode], graph_cell: usize, forest_cell: usize) -> (&mut LinkGraph, &UnionFind) {
    debug_assert_ne!(graph_cell, forest_cell);
    if graph_cell < forest_cell {
        let (a, b) = arena.split_at_mut(forest_cell);
        (&mut a[graph_cell].link_pred, &b[0].uf)
    } else {
        let (a, b) = arena.split_at_mut(graph_cell);
        (&mut b[0].link_pred, &a[forest_cell].uf)
    }
}

/// The sweep's mutable state, and after the run its output: the ordered
/// cell list with per-cell partitions and inter-cell link graphs.
#[derive(Debug, Clone)]
pub struct SweepState {
    n: usize,
    arena: Vec<CellNode>,
    head: usize,
    finger: usize,
    counters: OpCounters,
    opts: SweepOptions,
    touched_this_event: u64,
    succ_merge_p_this_event: u64,
    succ_merge_q_this_event: u64,
    union_opportunities: u64,
    split_opportunities: u64,
}

impl SweepState {
    fn new(n: usize, opts: SweepOptions) -> Self {
        let root = CellNode {
            lo: Bound::NEG_INF,
            hi: Bound::POS_INF,
            uf: UnionFind::new(n),
            pred: None,
            succ: None,
            link_pred: LinkGraph::default(),
            alive: true,
        };
        SweepState {
            n,
            arena: vec![root],
            head: 0,
            finger: 0,
            counters: OpCounters { cells_created: 1, ..OpCounters::default() },
            opts,
            touched_this_event: 0,
            succ_merge_p_this_event: 0,
            succ_merge_q_this_event: 0,
            union_opportunities: 0,
            split_opportunities: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counters(&self) -> &OpCounters {
        &self.counters
    }

    pub fn cell_count(&self) -> usize {
        self.cells().count()
    }

    pub fn cells(&self) -> impl Iterator<Item = CellView<'_>> {
        let mut next = Some(self.head);
        std::iter::from_fn(move || {
            let id = next?;
            next = self.arena[id].succ;
            Some(CellView { state: self, id })
        })
    }

    fn alloc(&mut self, node: CellNode) -> usize {
        self.counters.cells_created += 1;
        self.arena.push(node);
        self.arena.len() - 1
    }

    fn advance_finger(&mut self, x: f64) {
        while self.arena[self.finger].entirely_left_of(x) {
            self.finger = self.arena[self.finger]
                .succ
                .expect("cell list covers the line");
            self.counters.finger_advances += 1;
        }
        debug_assert!(self.arena[self.finger].contains(x));
    }

    /// Split a cell at the endpoints of the closed interval [a, b] and
    /// return the piece equal to `cell ∩ [a, b]`. The stored forest is
    /// flattened first; every piece gets an independent copy with ranks
    /// re-seeded, adjacent pieces are linked by fully diagonal graphs,
    /// and the outer link graphs are re-attached unchanged.
    fn split_cell(&mut self, cell: usize, a: f64, b: f64) -> usize {
        debug_assert!(!self.arena[cell].within(a, b));
        debug_assert!(!self.arena[cell].entirely_left_of(a) && !self.arena[cell].entirely_right_of(b));
        self.counters.splits += 1;
        {
            let (arena, counters) = (&mut self.arena, &mut self.counters);
            arena[cell].uf.flatten(counters);
        }
        let lo = self.arena[cell].lo;
        let hi = self.arena[cell].hi;
        let pred = self.arena[cell].pred;
        let succ = self.arena[cell].succ;
        let classes = self.arena[cell].uf.class_count();

        let has_left = lo.value < a;
        let has_right = hi.value > b;
        let mut bounds: Vec<(Bound, Bound)> = Vec::with_capacity(3);
        if has_left {
            bounds.push((lo, Bound::open(a)));
        }
        bounds.push((
            if has_left { Bound::closed(a) } else { lo },
            if has_right { Bound::closed(b) } else { hi },
        ));
        if has_right {
            bounds.push((Bound::open(b), hi));
        }

        let outer_left_graph = std::mem::take(&mut self.arena[cell].link_pred);
        // every piece starts from an independent copy of the flattened
        // forest with freshly seeded ranks; the dying cell donates its
        // buffers to the first piece
        self.arena[cell].uf.reseed_ranks();
        let mut forests = Vec::with_capacity(bounds.len());
        for _ in 1..bounds.len() {
            forests.push(self.arena[cell].uf.clone());
        }
        forests.push(std::mem::replace(&mut self.arena[cell].uf, UnionFind::new(0)));
        forests.rotate_right(1);
        let ids: Vec<usize> = bounds
            .iter()
            .zip(forests)
            .map(|(&(plo, phi), uf)| {
                self.alloc(CellNode {
                    lo: plo,
                    hi: phi,
                    uf,
                    pred: None,
                    succ: None,
                    link_pred: LinkGraph::default(),
                    alive: true,
                })
            })
            .collect();

        for (k, &id) in ids.iter().enumerate() {
            if k + 1 < ids.len() {
                self.arena[ids[k + 1]].link_pred = LinkGraph::all_diagonal(classes);
                self.arena[id].succ = Some(ids[k + 1]);
                self.arena[ids[k + 1]].pred = Some(id);
            }
        }
        let first = ids[0];
        let last = *ids.last().unwrap();
        self.arena[first].pred = pred;
        self.arena[first].link_pred = outer_left_graph;
        self.arena[last].succ = succ;
        match pred {
            Some(p) => self.arena[p].succ = Some(first),
            None => self.head = first,
        }
        if let Some(s) = succ {
            self.arena[s].pred = Some(last);
        }
        self.arena[cell].alive = false;
        if self.finger == cell {
            self.finger = first;
        }
        if has_left {
            ids[1]
        } else {
            ids[0]
        }
    }

    /// Unlink a cell whose partition equals its predecessor's, composing
    /// the two adjacent link graphs.
    fn delete_cell(&mut self, cell: usize) {
        self.counters.deletes += 1;
        let pred = self.arena[cell].pred.expect("delete requires a predecessor");
        let succ = self.arena[cell].succ.expect("delete requires a successor");
        let composed = LinkGraph::compose(
            &self.arena[cell].link_pred,
            &self.arena[succ].link_pred,
            &self.arena[pred].uf,
            &self.arena[cell].uf,
            &self.arena[succ].uf,
        );
        self.arena[succ].link_pred = composed;
        self.arena[pred].succ = Some(succ);
        self.arena[succ].pred = Some(pred);
        self.arena[cell].alive = false;
        if self.finger == cell {
            self.finger = pred;
        }
    }

    fn partitions_equal(&mut self, x: usize, y: usize) -> bool {
        if self.arena[x].uf.stored_count() != self.arena[y].uf.stored_count()
            || self.arena[x].uf.class_count() != self.arena[y].uf.class_count()
        {
            return false;
        }
        let n = self.n;
        let mut map_xy: Vec<Option<PointId>> = vec![None; n];
        let mut map_yx: Vec<Option<PointId>> = vec![None; n];
        debug_assert_ne!(x, y);
        let (arena, counters) = (&mut self.arena, &mut self.counters);
        let (ufx, ufy) = if x < y {
            let (l, r) = arena.split_at_mut(y);
            (&mut l[x].uf, &mut r[0].uf)
        } else {
            let (l, r) = arena.split_at_mut(x);
            (&mut r[0].uf, &mut l[y].uf)
        };
        for p in 0..n as PointId {
            match (ufx.contains(p), ufy.contains(p)) {
                (false, false) => continue,
                (true, true) => {}
                _ => return false,
            }
            let rx = ufx.find(p, counters);
            let ry = ufy.find(p, counters);
            match map_xy[rx as usize] {
                None => map_xy[rx as usize] = Some(ry),
                Some(v) if v != ry => return false,
                _ => {}
            }
            match map_yx[ry as usize] {
                None => map_yx[ry as usize] = Some(rx),
                Some(v) if v != rx => return false,
                _ => {}
            }
        }
        true
    }

    fn process_ball(&mut self, p: PointId, a: f64, b: f64) -> Result<(), SweepError> {
        let mut cur = self.finger;
        loop {
            if self.arena[cur].entirely_right_of(b) {
                break;
            }
            self.touched_this_event += 1;
            let target = if self.arena[cur].within(a, b) {
                cur
            } else {
                self.split_cell(cur, a, b)
            };
            {
                let (arena, counters) = (&mut self.arena, &mut self.counters);
                arena[target].uf.make_set(p, counters);
            }
            if let Some(pr) = self.arena[target].pred {
                if self.arena[pr].uf.contains(p) {
                    // p is a fresh singleton root on both sides, so the
                    // new edge is the diagonal one
                    debug_assert!(self.arena[pr].uf.is_root(p));
                    self.arena[target].link_pred.note_new_common_root();
                }
            }
            match self.arena[target].succ {
                Some(s) => cur = s,
                None => break,
            }
        }
        Ok(())
    }

    fn process_pair(&mut self, p: PointId, q: PointId, a: f64, b: f64) -> Result<(), SweepError> {
        let mut first = true;
        let mut cur = self.finger;
        loop {
            if self.arena[cur].entirely_right_of(b) {
                break;
            }
            self.touched_this_event += 1;
            let (rp, rq) = {
                let (arena, counters) = (&mut self.arena, &mut self.counters);
                let uf = &mut arena[cur].uf;
                match (uf.try_find(p, counters), uf.try_find(q, counters)) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(SweepError::PairNotCovered { p, q }),
                }
            };
            let cont = if rp != rq {
                let drop = matches!(
                    self.opts.fault,
                    Some(FaultInjection::DropUnion { index }) if index == self.union_opportunities
                );
                self.union_opportunities += 1;
                if drop {
                    cur
                } else {
                    let surv = self.union_step(cur, a, b, p, q, (rp, rq), first);
                    first = false;
                    surv
                }
            } else {
                cur
            };
            match self.arena[cont].succ {
                Some(s) => cur = s,
                None => break,
            }
        }
        Ok(())
    }

    /// One union inside one cell: split the cell down to `cell ∩ [a, b]`
    /// if needed, merge the sets of `p` and `q`, fold the dead root's
    /// neighbor lists into the survivor's in both adjacent link graphs,
    /// and on the first union of the event fuse with the predecessor if
    /// the partitions became equal. Returns the surviving cell.
    #[allow(clippy::too_many_arguments)]
    fn union_step(
        &mut self,
        cell: usize,
        a: f64,
        b: f64,
        p: PointId,
        q: PointId,
        roots: (PointId, PointId),
        first: bool,
    ) -> usize {
        let cell = if self.arena[cell].within(a, b) {
            cell
        } else {
            let skip = matches!(
                self.opts.fault,
                Some(FaultInjection::SkipSplit { index }) if index == self.split_opportunities
            );
            self.split_opportunities += 1;
            if skip {
                cell
            } else {
                self.split_cell(cell, a, b)
            }
        };
        let (survivor, dead) = {
            let (arena, counters) = (&mut self.arena, &mut self.counters);
            arena[cell].uf.union(p, q, counters)
        };
        if let Some(pr) = self.arena[cell].pred {
            // graph between pred and this cell; the union happened on its right side
            let (graph, pred_forest) = graph_and_forest(&mut self.arena, cell, pr);
            let (dead_len, surv_len) = graph.merge_right_root(dead, survivor, pred_forest);
            self.counters.link_merge_len += (dead_len + surv_len) as u64;
        }
        if let Some(s) = self.arena[cell].succ {
            // graph between this cell and succ lives on succ with succ's forest
            let node = &mut self.arena[s];
            let (dead_len, surv_len) = node.link_pred.merge_left_root(dead, survivor, &node.uf);
            self.counters.link_merge_len += (dead_len + surv_len) as u64;
            // attribute each traversed list to the point whose class it was
            let (p_len, q_len) = if survivor == roots.0 {
                (surv_len, dead_len)
            } else {
                (dead_len, surv_len)
            };
            self.succ_merge_p_this_event += p_len as u64;
            self.succ_merge_q_this_event += q_len as u64;
        }
        if first {
            if let Some(pr) = self.arena[cell].pred {
                if self.partitions_equal(pr, cell) {
                    self.arena[pr].hi = self.arena[cell].hi;
                    self.delete_cell(cell);
                    return pr;
                }
            }
        }
        cell
    }

    fn process_event(&mut self, ev: &LabeledInterval) -> Result<(), SweepError> {
        self.counters.events += 1;
        self.touched_this_event = 0;
        self.succ_merge_p_this_event = 0;
        self.succ_merge_q_this_event = 0;
        self.advance_finger(ev.lo());
        match ev.label() {
            IntervalLabel::Ball(p) => self.process_ball(p, ev.lo(), ev.hi())?,
            IntervalLabel::Pair(p, q) => self.process_pair(p, q, ev.lo(), ev.hi())?,
        }
        self.counters.max_cells_touched = self.counters.max_cells_touched.max(self.touched_this_event);
        if self.opts.check_caps && self.n > 0 {
            let n = self.n as u64;
            assert!(
                self.touched_this_event <= 2 * n,
                "event {ev:?} touched {} cells, cap is 2n = {}",
                self.touched_this_event,
                2 * n
            );
            if matches!(ev.label(), IntervalLabel::Pair(..)) {
                for (point, total) in [
                    ("first", self.succ_merge_p_this_event),
                    ("second", self.succ_merge_q_this_event),
                ] {
                    assert!(
                        total < 3 * n,
                        "pair event {ev:?}: successor lists of the {point} point's class                          total {total}, cap is 3n-1 = {}",
                        3 * n - 1
                    );
                }
            }
            let mut cur = Some(self.head);
            while let Some(c) = cur {
                assert!(
                    self.arena[c].link_pred.edge_count() <= self.n,
                    "link graph with {} edges exceeds n = {}",
                    self.arena[c].link_pred.edge_count(),
                    self.n
                );
                cur = self.arena[c].succ;
            }
        }
        if self.opts.check_minimality {
            self.assert_minimal();
        }
        Ok(())
    }

    fn assert_minimal(&self) {
        let mut prev: Option<Vec<Vec<PointId>>> = None;
        for cell in self.cells() {
            let fam = cell.partition();
            if let Some(p) = &prev {
                assert_ne!(
                    p, &fam,
                    "consecutive cells store equal partitions around {}",
                    cell.lo()
                );
            }
            prev = Some(fam);
        }
    }

    /// Serializable snapshot of the full state for debugging and
    /// determinism checks.
    pub fn debug_dump(&self) -> StateDump {
        let views: Vec<CellView<'_>> = self.cells().collect();
        let cells = views
            .iter()
            .map(|v| CellDump {
                lo: v.lo().is_finite().then_some(v.lo().value),
                lo_closed: v.lo().inclusive,
                hi: v.hi().is_finite().then_some(v.hi().value),
                hi_closed: v.hi().inclusive,
                partition: v.partition(),
                links_to_succ: v.edges_to_succ().unwrap_or_default(),
            })
            .collect();
        StateDump { cells }
    }
}

/// Read-only view of one cell of a sweep state.
pub struct CellView<'a> {
    state: &'a SweepState,
    id: usize,
}

impl<'a> CellView<'a> {
    pub fn lo(&self) -> Bound {
        self.state.arena[self.id].lo
    }

    pub fn hi(&self) -> Bound {
        self.state.arena[self.id].hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.state.arena[self.id].contains(x)
    }

    pub fn stored_points(&self) -> Vec<PointId> {
        self.state.arena[self.id].uf.stored_points().collect()
    }

    pub fn contains_point(&self, p: PointId) -> bool {
        self.state.arena[self.id].uf.contains(p)
    }

    pub fn root_of(&self, p: PointId) -> Option<PointId> {
        self.state.arena[self.id].uf.root_readonly(p)
    }

    pub fn partition(&self) -> Vec<Vec<PointId>> {
        self.state.arena[self.id].uf.partition()
    }

    pub fn partition_with_roots(&self) -> Vec<(PointId, Vec<PointId>)> {
        self.state.arena[self.id].uf.partition_with_roots()
    }

    /// Link edges to the successor cell as (root here, root there), or
    /// `None` for the last cell.
    pub fn edges_to_succ(&self) -> Option<Vec<(PointId, PointId)>> {
        let succ = self.state.arena[self.id].succ?;
        Some(self.state.arena[succ].link_pred.edge_list(
            &self.state.arena[self.id].uf,
            &self.state.arena[succ].uf,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateDump {
    pub cells: Vec<CellDump>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellDump {
    pub lo: Option<f64>,
    pub lo_closed: bool,
    pub hi: Option<f64>,
    pub hi_closed: bool,
    pub partition: Vec<Vec<PointId>>,
    pub links_to_succ: Vec<(PointId, PointId)>,
}

/// Ball and pair intervals merged and sorted by increasing left endpoint,
/// ball intervals before pair intervals on ties, remaining ties by label.
pub fn sort_events(balls: &[LabeledInterval], pairs: &[LabeledInterval]) -> Vec<LabeledInterval> {
    // order-preserving integer image of a finite f64
    fn key_bits(v: f64) -> u64 {
        let b = v.to_bits();
        if b >> 63 == 0 {
            b | (1 << 63)
        } else {
            !b
        }
    }
    let mut events: Vec<(u64, u64, LabeledInterval)> = balls
        .iter()
        .chain(pairs)
        .map(|iv| {
            let label_key = match iv.label() {
                IntervalLabel::Ball(p) => (p as u64) << 32,
                IntervalLabel::Pair(p, q) => (1 << 63) | ((p as u64) << 32) | q as u64,
            };
            (key_bits(iv.lo()), label_key, iv.clone())
        })
        .collect();
    events.sort_unstable_by_key(|e| (e.0, e.1));
    events.into_iter().map(|e| e.2).collect()
}

/// Step-by-step sweep driver. [`sweep`] runs it to completion; keeping
/// the driver lets callers inspect the state after every event.
pub struct Sweep {
    state: SweepState,
    events: Vec<LabeledInterval>,
    next: usize,
}

impl Sweep {
    pub fn new(
        balls: &[LabeledInterval],
        pairs: &[LabeledInterval],
        opts: SweepOptions,
    ) -> Result<Self, SweepError> {
        let n = balls.len();
        let mut ball_by_id: Vec<Option<&LabeledInterval>> = vec![None; n];
        for iv in balls {
            let IntervalLabel::Ball(p) = iv.label() else {
                return Err(SweepError::BadBallSet { msg: format!("{} is not a ball interval", iv.label()) });
            };
            if p as usize >= n || ball_by_id[p as usize].is_some() {
                return Err(SweepError::BadBallSet { msg: format!("bad or repeated point id {p}") });
            }
            ball_by_id[p as usize] = Some(iv);
        }
        let mut seen: Vec<(PointId, PointId)> = Vec::with_capacity(pairs.len());
        for iv in pairs {
            let IntervalLabel::Pair(p, q) = iv.label() else {
                return Err(SweepError::BadBallSet { msg: format!("{} is not a pair interval", iv.label()) });
            };
            if p >= q {
                return Err(SweepError::BadBallSet {
                    msg: format!("pair label ({p},{q}) must have p < q"),
                });
            }
            if q as usize >= n {
                return Err(SweepError::PairNotContained { p, q });
            }
            seen.push((p, q));
            let bp = ball_by_id[p as usize].unwrap();
            let bq = ball_by_id[q as usize].unwrap();
            if iv.lo() < bp.lo() || iv.lo() < bq.lo() || iv.hi() > bp.hi() || iv.hi() > bq.hi() {
                return Err(SweepError::PairNotContained { p, q });
            }
        }
        let mut seen_keys: Vec<u64> = seen.iter().map(|&(p, q)| ((p as u64) << 32) | q as u64).collect();
        seen_keys.sort_unstable();
        if let Some(w) = seen_keys.windows(2).find(|w| w[0] == w[1]) {
            return Err(SweepError::DuplicatePair { p: (w[0] >> 32) as u32, q: w[0] as u32 });
        }
        Ok(Sweep {
            state: SweepState::new(n, opts),
            events: sort_events(balls, pairs),
            next: 0,
        })
    }

    pub fn state(&self) -> &SweepState {
        &self.state
    }

    pub fn events(&self) -> &[LabeledInterval] {
        &self.events
    }

    pub fn processed(&self) -> &[LabeledInterval] {
        &self.events[..self.next]
    }

    /// Process one event; `Ok(false)` when none remain.
    pub fn step(&mut self) -> Result<bool, SweepError> {
        if self.next == self.events.len() {
            return Ok(false);
        }
        let ev = self.events[self.next].clone();
        self.state.process_event(&ev)?;
        self.next += 1;
        Ok(true)
    }

    pub fn run(mut self) -> Result<SweepState, SweepError> {
        while self.step()? {}
        Ok(self.state)
    }
}

/// Run the sweep to completion with the given options.
pub fn sweep_with_options(
    balls: &[LabeledInterval],
    pairs: &[LabeledInterval],
    opts: SweepOptions,
) -> Result<SweepState, SweepError> {
    Sweep::new(balls, pairs, opts)?.run()
}

/// Run the sweep to completion with default options.
pub fn sweep(balls: &[LabeledInterval], pairs: &[LabeledInterval]) -> Result<SweepState, SweepError> {
    sweep_with_options(balls, pairs, SweepOptions::default())
}
