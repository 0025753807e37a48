//! Union-find forest over a subset of the point ids, with union by rank
//! and path compression. Every cell of the sweep owns one of these.
//!
//! Parents and ranks live in two flat arrays indexed by point id; absent
//! points carry a sentinel parent. Cells are copied on splits, so the
//! footprint per cell matters more than in a single global structure.

use super::{OpCounters, PointId};

const ABSENT: PointId = PointId::MAX;

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<PointId>,
    rank: Vec<u8>,
    stored: usize,
    classes: usize,
}

impl UnionFind {
    pub fn new(ground: usize) -> Self {
        UnionFind { parent: vec![ABSENT; ground], rank: vec![0; ground], stored: 0, classes: 0 }
    }

    pub fn ground_size(&self) -> usize {
        self.parent.len()
    }

    pub fn stored_count(&self) -> usize {
        self.stored
    }

    /// Number of sets in the stored partition.
    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.parent[p as usize] != ABSENT
    }

    pub fn make_set(&mut self, p: PointId, counters: &mut OpCounters) {
        counters.make_set += 1;
        assert!(
            !self.contains(p),
            "make_set: point {p} already stored in this cell"
        );
        self.parent[p as usize] = p;
        self.rank[p as usize] = 0;
        self.stored += 1;
        self.classes += 1;
    }

    pub fn find(&mut self, p: PointId, counters: &mut OpCounters) -> PointId {
        counters.find_set += 1;
        debug_assert!(self.contains(p), "find on unstored point {p}");
        let mut root = p;
        loop {
            let parent = self.parent[root as usize];
            if parent == root {
                break;
            }
            root = parent;
        }
        let mut cur = p;
        while cur != root {
            let parent = self.parent[cur as usize];
            if parent != root {
                self.parent[cur as usize] = root;
            }
            cur = parent;
        }
        root
    }

    /// `find` that reports an unstored point instead of asserting.
    pub fn try_find(&mut self, p: PointId, counters: &mut OpCounters) -> Option<PointId> {
        if !self.contains(p) {
            return None;
        }
        Some(self.find(p, counters))
    }

    /// Merge the trees containing `p` and `q`. The surviving root is the
    /// higher-rank root, ties going to the smaller point id. Returns
    /// (survivor, dead).
    pub fn union(&mut self, p: PointId, q: PointId, counters: &mut OpCounters) -> (PointId, PointId) {
        counters.union += 1;
        let rp = self.find(p, counters);
        let rq = self.find(q, counters);
        assert_ne!(rp, rq, "union of already-joined points");
        let rank_p = self.rank[rp as usize];
        let rank_q = self.rank[rq as usize];
        let (survivor, dead) = if rank_p > rank_q {
            (rp, rq)
        } else if rank_q > rank_p {
            (rq, rp)
        } else {
            let s = rp.min(rq);
            self.rank[s as usize] += 1;
            (s, rp.max(rq))
        };
        self.parent[dead as usize] = survivor;
        self.classes -= 1;
        (survivor, dead)
    }

    /// Root of `p` without path compression or operation counting; used
    /// for read-only inspection of the stored partition.
    pub fn root_readonly(&self, p: PointId) -> Option<PointId> {
        if !self.contains(p) {
            return None;
        }
        let mut cur = p;
        loop {
            let parent = self.parent[cur as usize];
            if parent == cur {
                return Some(cur);
            }
            cur = parent;
        }
    }

    pub fn stored_points(&self) -> impl Iterator<Item = PointId> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(i, &p)| (p != ABSENT).then_some(i as PointId))
    }

    /// True when `p` is stored and is the root of its tree.
    pub fn is_root(&self, p: PointId) -> bool {
        self.parent[p as usize] == p
    }

    /// Ids of all roots, ascending.
    pub fn root_ids(&self) -> impl Iterator<Item = PointId> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(i, &p)| (p == i as PointId).then_some(i as PointId))
    }

    /// Run find on every stored point, flattening all trees to height <= 1.
    pub fn flatten(&mut self, counters: &mut OpCounters) {
        for p in 0..self.parent.len() as PointId {
            if self.contains(p) {
                self.find(p, counters);
            }
        }
    }

    /// Re-seed the ranks of a flattened forest in place: roots of
    /// nontrivial trees get rank 1, everything else rank 0. A fresh cell
    /// starts from this state regardless of the history of the forest it
    /// was copied from.
    pub fn reseed_ranks(&mut self) {
        self.rank.fill(0);
        for i in 0..self.parent.len() {
            let p = self.parent[i];
            if p != ABSENT && p != i as PointId {
                debug_assert_eq!(self.parent[p as usize], p, "reseed requires a flattened forest");
                self.rank[p as usize] = 1;
            }
        }
    }

    /// Stored partition as (root, members) classes, members ascending,
    /// classes ordered by their smallest member.
    pub fn partition_with_roots(&self) -> Vec<(PointId, Vec<PointId>)> {
        let mut by_root: std::collections::BTreeMap<PointId, Vec<PointId>> = Default::default();
        for p in self.stored_points() {
            let r = self.root_readonly(p).unwrap();
            by_root.entry(r).or_default().push(p);
        }
        let mut classes: Vec<(PointId, Vec<PointId>)> = by_root.into_iter().collect();
        classes.sort_by_key(|(_, members)| members[0]);
        classes
    }

    pub fn partition(&self) -> Vec<Vec<PointId>> {
        self.partition_with_roots().into_iter().map(|(_, m)| m).collect()
    }
}
