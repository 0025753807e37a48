//! Bipartite intersection graph between the partitions of two consecutive
//! cells. Edges connect a root of the left cell's forest to a root of the
//! right cell's forest exactly when the two stored sets intersect.
//!
//! A point that is a root in both forests witnesses the intersection of
//! its own two sets, so the diagonal edge `r <-> r` always exists for
//! such points; only the count of those edges is kept here, the edges
//! themselves are derived from the forests on demand. The explicit
//! adjacency maps store the non-diagonal exceptions, which stay rare:
//! a fresh graph between split pieces is entirely diagonal, and a union
//! displaces at most one root. Neighbor lists are sorted by point id and
//! deduplicated; map iteration order never reaches the output, because
//! [`LinkGraph::edge_list`] sorts.

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::union_find::UnionFind;
use super::PointId;

/// Explicit neighbor roots of one root.
type Nbrs = SmallVec<[PointId; 1]>;

#[derive(Clone, Debug, Default)]
pub struct LinkGraph {
    /// Non-diagonal edges keyed by the left cell's roots.
    left: FxHashMap<PointId, Nbrs>,
    /// The same edges keyed by the right cell's roots.
    right: FxHashMap<PointId, Nbrs>,
    explicit: usize,
    /// Number of points that are roots in both adjacent forests.
    implicit: usize,
}

fn sorted_insert(list: &mut Nbrs, v: PointId) -> bool {
    match list.binary_search(&v) {
        Ok(_) => false,
        Err(pos) => {
            list.insert(pos, v);
            true
        }
    }
}

fn sorted_remove(list: &mut Nbrs, v: PointId) -> bool {
    match list.binary_search(&v) {
        Ok(pos) => {
            list.remove(pos);
            true
        }
        Err(_) => false,
    }
}

fn is_root(f: &UnionFind, p: PointId) -> bool {
    f.is_root(p)
}

impl LinkGraph {
    /// Graph between two cells whose forests are identical copies: every
    /// edge is diagonal.
    pub fn all_diagonal(roots: usize) -> Self {
        LinkGraph { implicit: roots, ..LinkGraph::default() }
    }

    pub fn edge_count(&self) -> usize {
        self.explicit + self.implicit
    }

    /// Record that a point just became a root on both sides (a ball event
    /// stored it in this graph's right cell while it was already a root
    /// in the left cell).
    pub fn note_new_common_root(&mut self) {
        self.implicit += 1;
    }

    fn insert_explicit(&mut self, l: PointId, r: PointId) -> bool {
        debug_assert_ne!(l, r, "diagonal edges are implicit");
        let new_l = sorted_insert(self.left.entry(l).or_default(), r);
        let new_r = sorted_insert(self.right.entry(r).or_default(), l);
        debug_assert_eq!(new_l, new_r, "link graph sides out of sync");
        if new_l {
            self.explicit += 1;
        }
        new_l
    }

    /// All edges as (left root, right root), sorted. The adjacent
    /// forests supply the diagonal part.
    pub fn edge_list(&self, left_forest: &UnionFind, right_forest: &UnionFind) -> Vec<(PointId, PointId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (&l, list) in &self.left {
            for &r in list {
                out.push((l, r));
            }
        }
        let mut implicit_seen = 0;
        for r in left_forest.root_ids() {
            if is_root(right_forest, r) {
                out.push((r, r));
                implicit_seen += 1;
            }
        }
        assert_eq!(implicit_seen, self.implicit, "implicit edge count out of sync");
        out.sort_unstable();
        out
    }

    /// Fold the edges of a dying root into the surviving root after a
    /// union in the RIGHT cell. `left_forest` is the other side's forest,
    /// which the union did not touch. Returns the pre-merge neighbor list
    /// lengths traversed, as (dead's, survivor's).
    pub fn merge_right_root(
        &mut self,
        dead: PointId,
        survivor: PointId,
        left_forest: &UnionFind,
    ) -> (usize, usize) {
        // materialize the dying root's diagonal edge: `dead` is no longer
        // a root on the right, but remains one on the left
        let mut dead_list = self.right.remove(&dead).unwrap_or_default();
        for &l in &dead_list {
            let list = self.left.get_mut(&l).expect("mirror list missing");
            assert!(sorted_remove(list, dead));
            if list.is_empty() {
                self.left.remove(&l);
            }
        }
        self.explicit -= dead_list.len();
        if is_root(left_forest, dead) {
            self.implicit -= 1;
            sorted_insert(&mut dead_list, dead);
        }
        let surv_implicit = is_root(left_forest, survivor);
        let surv_list = self.right.get(&survivor).map(|l| l.as_slice()).unwrap_or(&[]);
        let traversed = (dead_list.len(), surv_list.len() + surv_implicit as usize);
        for l in dead_list {
            if l == survivor {
                // collapsed onto the diagonal; covered by the implicit edge
                debug_assert!(surv_implicit);
                continue;
            }
            self.insert_explicit(l, survivor);
        }
        traversed
    }

    /// Same as [`merge_right_root`] for a union in the LEFT cell.
    ///
    /// [`merge_right_root`]: LinkGraph::merge_right_root
    pub fn merge_left_root(
        &mut self,
        dead: PointId,
        survivor: PointId,
        right_forest: &UnionFind,
    ) -> (usize, usize) {
        let mut dead_list = self.left.remove(&dead).unwrap_or_default();
        for &r in &dead_list {
            let list = self.right.get_mut(&r).expect("mirror list missing");
            assert!(sorted_remove(list, dead));
            if list.is_empty() {
                self.right.remove(&r);
            }
        }
        self.explicit -= dead_list.len();
        if is_root(right_forest, dead) {
            self.implicit -= 1;
            sorted_insert(&mut dead_list, dead);
        }
        let surv_implicit = is_root(right_forest, survivor);
        let surv_list = self.left.get(&survivor).map(|l| l.as_slice()).unwrap_or(&[]);
        let traversed = (dead_list.len(), surv_list.len() + surv_implicit as usize);
        for r in dead_list {
            if r == survivor {
                debug_assert!(surv_implicit);
                continue;
            }
            self.insert_explicit(survivor, r);
        }
        traversed
    }

    /// True when the graph is a perfect matching between its two root sets.
    pub fn is_bijection(&self, left_forest: &UnionFind, right_forest: &UnionFind) -> bool {
        if self.edge_count() != left_forest.class_count()
            || self.edge_count() != right_forest.class_count()
        {
            return false;
        }
        // every explicit endpoint must carry exactly this one edge
        self.left.values().all(|l| l.len() == 1)
            && self.right.values().all(|l| l.len() == 1)
            && self.left.keys().all(|&l| !(is_root(left_forest, l) && is_root(right_forest, l)))
            && self.right.keys().all(|&r| !(is_root(left_forest, r) && is_root(right_forest, r)))
    }

    /// Composition used when a cell is removed: `left` is the graph
    /// between pred and the dying cell (a bijection on roots), `right`
    /// the graph between the dying cell and succ. The result relabels
    /// `right`'s left side through the bijection. Runs in O(n).
    pub fn compose(
        left: &LinkGraph,
        right: &LinkGraph,
        pred_forest: &UnionFind,
        mid_forest: &UnionFind,
        succ_forest: &UnionFind,
    ) -> LinkGraph {
        assert!(
            left.is_bijection(pred_forest, mid_forest),
            "compose requires a bijective left graph"
        );
        // partner of a root of the dying cell under the bijection
        let partner = |mid: PointId| -> PointId {
            match left.right.get(&mid) {
                Some(list) => list[0],
                None => mid,
            }
        };
        let mut out = LinkGraph::default();
        let mut push = |pred_root: PointId, succ_root: PointId| {
            if pred_root == succ_root {
                debug_assert!(is_root(pred_forest, pred_root) && is_root(succ_forest, succ_root));
                out.implicit += 1;
            } else {
                out.insert_explicit(pred_root, succ_root);
            }
        };
        for (&mid, list) in &right.left {
            let p = partner(mid);
            for &s in list {
                push(p, s);
            }
        }
        for mid in mid_forest.root_ids() {
            if is_root(succ_forest, mid) {
                push(partner(mid), mid);
            }
        }
        assert_eq!(out.edge_count(), right.edge_count(), "composition changed the edge count");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::OpCounters;

    /// Forest over `ground` points where each listed group is one class
    /// rooted at its first element. The first element must win every
    /// union: rank ties go to the smaller id, so a first element that is
    /// not the group minimum needs a larger second element to build rank.
    fn forest(ground: usize, groups: &[&[PointId]]) -> UnionFind {
        let mut c = OpCounters::default();
        let mut f = UnionFind::new(ground);
        for g in groups {
            for &p in *g {
                f.make_set(p, &mut c);
            }
        }
        for g in groups {
            for &p in &g[1..] {
                let root = g[0];
                let (s, _) = f.union(root, p, &mut c);
                assert_eq!(s, root, "test forest construction picked the wrong root");
            }
        }
        f
    }

    #[test]
    fn diagonal_edges_come_from_the_forests() {
        let lf = forest(6, &[&[1], &[4]]);
        let rf = forest(6, &[&[1], &[4], &[5]]);
        let mut g = LinkGraph::all_diagonal(2);
        assert_eq!(g.edge_list(&lf, &rf), vec![(1, 1), (4, 4)]);
        // a ball event stores 5 in the right cell while it is a root on the left
        let lf2 = forest(6, &[&[1], &[4], &[5]]);
        g.note_new_common_root();
        assert_eq!(g.edge_list(&lf2, &rf), vec![(1, 1), (4, 4), (5, 5)]);
        assert_eq!(g.edge_count(), 3);
        assert!(g.is_bijection(&lf2, &rf));
    }

    #[test]
    fn union_in_right_cell_materializes_the_displaced_root() {
        // left cell {1},{2}; right cell unions 2 into 1
        let lf = forest(4, &[&[1], &[2]]);
        let mut rf = forest(4, &[&[1], &[2]]);
        let mut g = LinkGraph::all_diagonal(2);
        let mut c = OpCounters::default();
        let (surv, dead) = rf.union(1, 2, &mut c);
        assert_eq!((surv, dead), (1, 2));
        let traversed = g.merge_right_root(dead, surv, &lf);
        // dead's diagonal edge plus the survivor's diagonal edge
        assert_eq!(traversed, (1, 1));
        assert_eq!(g.edge_list(&lf, &rf), vec![(1, 1), (2, 1)]);
        assert_eq!(g.edge_count(), 2);
        assert!(!g.is_bijection(&lf, &rf));
    }

    #[test]
    fn union_in_left_cell_matches_mirror_case() {
        let mut lf = forest(4, &[&[1], &[2]]);
        let rf = forest(4, &[&[1], &[2]]);
        let mut g = LinkGraph::all_diagonal(2);
        let mut c = OpCounters::default();
        let (surv, dead) = lf.union(1, 2, &mut c);
        let traversed = g.merge_left_root(dead, surv, &rf);
        assert_eq!(traversed, (1, 1));
        assert_eq!(g.edge_list(&lf, &rf), vec![(1, 1), (1, 2)]);
    }

    #[test]
    fn merge_collapsing_onto_the_diagonal_deduplicates() {
        // left {1,2} rooted at 1; right {1},{2}: edges (1,1) and (1,2).
        let lf = forest(4, &[&[1, 2]]);
        let mut rf = forest(4, &[&[1], &[2]]);
        let mut g = LinkGraph::all_diagonal(1); // (1,1)
        g.insert_explicit(1, 2);
        assert_eq!(g.edge_list(&lf, &rf), vec![(1, 1), (1, 2)]);
        // right unions 2 into 1: both edges collapse onto (1,1)
        let mut c = OpCounters::default();
        let (surv, dead) = rf.union(1, 2, &mut c);
        let traversed = g.merge_right_root(dead, surv, &lf);
        assert_eq!(traversed, (1, 1));
        assert_eq!(g.edge_list(&lf, &rf), vec![(1, 1)]);
        assert_eq!(g.edge_count(), 1);
        assert!(g.is_bijection(&lf, &rf));
    }

    #[test]
    fn compose_through_identity_is_transparent() {
        let pred = forest(8, &[&[1], &[4]]);
        let mid = forest(8, &[&[1], &[4]]);
        let succ = forest(8, &[&[1], &[4], &[7]]);
        let bij = LinkGraph::all_diagonal(2);
        let mut right = LinkGraph::all_diagonal(2);
        right.insert_explicit(4, 7);
        let composed = LinkGraph::compose(&bij, &right, &pred, &mid, &succ);
        assert_eq!(composed.edge_list(&pred, &succ), right.edge_list(&mid, &succ));
    }

    #[test]
    fn compose_relabels_through_the_bijection() {
        // pred and mid both store {3,5,7}, rooted at 5 and at 3 respectively
        let pred = forest(8, &[&[5, 7, 3]]);
        let mid = forest(8, &[&[3, 7, 5]]);
        let mut bij = LinkGraph::default();
        bij.insert_explicit(5, 3);
        assert!(bij.is_bijection(&pred, &mid));
        // succ stores the same class rooted at 3, plus a fresh {6}
        let succ = forest(8, &[&[3, 7, 5], &[6]]);
        let right = LinkGraph::all_diagonal(1); // the (3,3) edge
        let composed = LinkGraph::compose(&bij, &right, &pred, &mid, &succ);
        assert_eq!(composed.edge_list(&pred, &succ), vec![(5, 3)]);
        assert_eq!(composed.edge_count(), 1);
    }
}
