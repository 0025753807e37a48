//! Explicit Reeb graph built from a finished sweep: one vertex per
//! connected component per cell, one edge per link-graph edge, plus the
//! finite cell boundaries as the list of critical values. Serializes to
//! a documented JSON schema and to Graphviz DOT.

use serde::{Deserialize, Serialize};

use crate::sweep::{Bound, PointId, SweepState};

/// One cell of the output: its range and the member sets of the
/// connected components living over it, each sorted by point id and
/// ordered by smallest member.
#[derive(Debug, Clone, PartialEq)]
pub struct ReebCell {
    pub lo: Bound,
    pub hi: Bound,
    pub components: Vec<Vec<PointId>>,
}

/// Edge between component `left` of `cells[cell]` and component `right`
/// of `cells[cell + 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReebEdge {
    pub cell: usize,
    pub left: usize,
    pub right: usize,
}

/// How the member set changes along an edge, read left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeRelation {
    Equal,
    Grows,
    Shrinks,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReebGraph {
    pub cells: Vec<ReebCell>,
    pub edges: Vec<ReebEdge>,
    pub critical_values: Vec<f64>,
}

/// Flat vertex view: one entry per (cell, component).
#[derive(Debug, Clone, PartialEq)]
pub struct ReebVertex {
    pub id: usize,
    pub cell: usize,
    pub comp: usize,
    pub members: Vec<PointId>,
    pub lo: Bound,
    pub hi: Bound,
}

impl ReebGraph {
    pub fn vertex_count(&self) -> usize {
        self.cells.iter().map(|c| c.components.len()).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> Vec<ReebVertex> {
        let mut out = Vec::with_capacity(self.vertex_count());
        for (k, cell) in self.cells.iter().enumerate() {
            for (i, members) in cell.components.iter().enumerate() {
                out.push(ReebVertex {
                    id: out.len(),
                    cell: k,
                    comp: i,
                    members: members.clone(),
                    lo: cell.lo,
                    hi: cell.hi,
                });
            }
        }
        out
    }

    /// Offset of each cell's first vertex in the flat vertex order.
    fn vertex_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.cells.len());
        let mut acc = 0usize;
        for cell in &self.cells {
            offsets.push(acc);
            acc += cell.components.len();
        }
        offsets
    }

    pub fn edge_relation(&self, e: &ReebEdge) -> EdgeRelation {
        let l = &self.cells[e.cell].components[e.left];
        let r = &self.cells[e.cell + 1].components[e.right];
        if l == r {
            EdgeRelation::Equal
        } else if l.len() < r.len() {
            EdgeRelation::Grows
        } else {
            EdgeRelation::Shrinks
        }
    }

    /// Cell boundaries where the topology changes: the component counts
    /// differ or the link edges do not form a perfect matching. Boundaries
    /// where every component continues into exactly one component (with
    /// points relabeled underneath) are regular and excluded.
    pub fn topological_critical_values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 0..self.cells.len().saturating_sub(1) {
            let left_n = self.cells[k].components.len();
            let right_n = self.cells[k + 1].components.len();
            let edges_k: Vec<&ReebEdge> = self.edges.iter().filter(|e| e.cell == k).collect();
            let bijective = left_n == right_n
                && edges_k.len() == left_n
                && (0..left_n).all(|i| edges_k.iter().filter(|e| e.left == i).count() == 1)
                && (0..right_n).all(|j| edges_k.iter().filter(|e| e.right == j).count() == 1);
            if !bijective {
                out.push(self.cells[k].hi.value);
            }
        }
        out
    }

    /// Topological critical values after collapsing short-lived features:
    /// side branches whose function extent is at most `min_persistence`
    /// are pruned before boundaries are classified. An approximation
    /// bound of `δ` on the graph only constrains features that persist
    /// beyond `2δ`, so displacement checks use this filtered list.
    pub fn stable_critical_values(&self, min_persistence: f64) -> Vec<f64> {
        let verts = self.vertices();
        let nv = verts.len();
        let offsets = self.vertex_offsets();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for e in &self.edges {
            let a = offsets[e.cell] + e.left;
            let b = offsets[e.cell + 1] + e.right;
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut alive = vec![true; nv];
        let degree = |alive: &[bool], v: usize| adj[v].iter().filter(|&&u| alive[u]).count();
        loop {
            let mut changed = false;
            for v in 0..nv {
                if !alive[v] || degree(&alive, v) > 1 {
                    continue;
                }
                // walk the chain from this leaf until a junction
                let mut chain = vec![v];
                let mut prev = usize::MAX;
                let mut cur = v;
                let mut attached = false;
                loop {
                    let next = adj[cur]
                        .iter()
                        .copied()
                        .find(|&u| alive[u] && u != prev);
                    let Some(next) = next else { break };
                    if degree(&alive, next) >= 3 {
                        attached = true;
                        break;
                    }
                    prev = cur;
                    cur = next;
                    chain.push(cur);
                    if chain.len() > nv {
                        break;
                    }
                }
                if !attached {
                    continue;
                }
                let lo = chain.iter().map(|&u| verts[u].lo.value).fold(f64::INFINITY, f64::min);
                let hi = chain.iter().map(|&u| verts[u].hi.value).fold(f64::NEG_INFINITY, f64::max);
                if hi - lo <= min_persistence {
                    for &u in &chain {
                        alive[u] = false;
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut out = Vec::new();
        for k in 0..self.cells.len().saturating_sub(1) {
            let left: Vec<usize> = (0..self.cells[k].components.len())
                .map(|i| offsets[k] + i)
                .filter(|&v| alive[v])
                .collect();
            let right: Vec<usize> = (0..self.cells[k + 1].components.len())
                .map(|i| offsets[k + 1] + i)
                .filter(|&v| alive[v])
                .collect();
            let edges_k: Vec<(usize, usize)> = self
                .edges
                .iter()
                .filter(|e| e.cell == k)
                .map(|e| (offsets[k] + e.left, offsets[k + 1] + e.right))
                .filter(|&(a, b)| alive[a] && alive[b])
                .collect();
            let bijective = left.len() == right.len()
                && edges_k.len() == left.len()
                && left.iter().all(|&a| edges_k.iter().filter(|e| e.0 == a).count() == 1)
                && right.iter().all(|&b| edges_k.iter().filter(|e| e.1 == b).count() == 1);
            if !bijective {
                out.push(self.cells[k].hi.value);
            }
        }
        out
    }

    /// Smallest and largest finite level covered by a nonempty cell.
    pub fn function_extent(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for cell in &self.cells {
            if cell.components.is_empty() {
                continue;
            }
            lo = lo.min(cell.lo.value);
            hi = hi.max(cell.hi.value);
        }
        (lo <= hi).then_some((lo, hi))
    }
}

/// One vertex per (cell, component) of the final state, one edge per
/// link-graph edge between consecutive cells. Empty cells contribute no
/// vertices but stay in the cell list.
pub fn extract(state: &SweepState) -> ReebGraph {
    let mut cells = Vec::new();
    let mut edges = Vec::new();
    let mut root_index_prev: std::collections::BTreeMap<PointId, usize> = Default::default();
    let mut pending_edges: Option<Vec<(PointId, PointId)>> = None;

    for (k, view) in state.cells().enumerate() {
        let classes = view.partition_with_roots();
        let root_index: std::collections::BTreeMap<PointId, usize> =
            classes.iter().enumerate().map(|(i, (r, _))| (*r, i)).collect();
        if let Some(raw) = pending_edges.take() {
            for (rl, rr) in raw {
                edges.push(ReebEdge {
                    cell: k - 1,
                    left: root_index_prev[&rl],
                    right: root_index[&rr],
                });
            }
        }
        pending_edges = view.edges_to_succ();
        root_index_prev = root_index;
        cells.push(ReebCell {
            lo: view.lo(),
            hi: view.hi(),
            components: classes.into_iter().map(|(_, m)| m).collect(),
        });
    }
    edges.sort_by_key(|e| (e.cell, e.left, e.right));
    let critical_values = cells[..cells.len().saturating_sub(1)]
        .iter()
        .map(|c| c.hi.value)
        .collect();
    ReebGraph { cells, edges, critical_values }
}

/// Betti numbers of the graph: component count and independent cycle
/// count `|E| - |V| + b0`.
pub fn betti(g: &ReebGraph) -> (usize, usize) {
    let nv = g.vertex_count();
    let offsets = g.vertex_offsets();
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in &g.edges {
        let a = find(&mut parent, offsets[e.cell] + e.left);
        let b = find(&mut parent, offsets[e.cell + 1] + e.right);
        if a != b {
            parent[a] = b;
        }
    }
    let b0 = (0..nv).filter(|&v| find(&mut parent, v) == v).count();
    let b1 = g.edges.len() + b0 - nv;
    (b0, b1)
}

/// Compare `b0` of the graph with the component count of the
/// ball-intersection graph, computed by an independent union-find over
/// all pairs within distance `2·eps`.
pub fn component_count_check(points: &[crate::geometry::Point], eps: f64, g: &ReebGraph) -> bool {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let d2: f64 = points[i]
                .coords
                .iter()
                .zip(&points[j].coords)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d2 <= 4.0 * eps * eps {
                let a = find(&mut parent, i);
                let b = find(&mut parent, j);
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let components = (0..n).filter(|&v| find(&mut parent, v) == v).count();
    betti(g).0 == components
}

#[derive(Serialize, Deserialize)]
struct CellJson {
    lo: Option<f64>,
    lo_closed: bool,
    hi: Option<f64>,
    hi_closed: bool,
    components: Vec<Vec<PointId>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    cells: Vec<CellJson>,
    edges: Vec<[usize; 4]>,
    critical_values: Vec<f64>,
}

/// Deterministic JSON serialization. Unbounded cell ends are `null`.
pub fn to_json(g: &ReebGraph) -> String {
    let doc = GraphJson {
        cells: g
            .cells
            .iter()
            .map(|c| CellJson {
                lo: c.lo.is_finite().then_some(c.lo.value),
                lo_closed: c.lo.inclusive,
                hi: c.hi.is_finite().then_some(c.hi.value),
                hi_closed: c.hi.inclusive,
                components: c.components.clone(),
            })
            .collect(),
        edges: g.edges.iter().map(|e| [e.cell, e.left, e.cell + 1, e.right]).collect(),
        critical_values: g.critical_values.clone(),
    };
    serde_json::to_string(&doc).expect("serialization cannot fail")
}

pub fn from_json(s: &str) -> Result<ReebGraph, String> {
    let doc: GraphJson = serde_json::from_str(s).map_err(|e| e.to_string())?;
    let cells: Vec<ReebCell> = doc
        .cells
        .iter()
        .map(|c| ReebCell {
            lo: match c.lo {
                Some(v) => Bound { value: v, inclusive: c.lo_closed },
                None => Bound::NEG_INF,
            },
            hi: match c.hi {
                Some(v) => Bound { value: v, inclusive: c.hi_closed },
                None => Bound::POS_INF,
            },
            components: c.components.clone(),
        })
        .collect();
    let mut edges = Vec::with_capacity(doc.edges.len());
    for e in &doc.edges {
        if e[2] != e[0] + 1 || e[0] + 1 >= cells.len() {
            return Err(format!("edge {e:?} does not connect consecutive cells"));
        }
        if e[1] >= cells[e[0]].components.len() || e[3] >= cells[e[2]].components.len() {
            return Err(format!("edge {e:?} references a missing component"));
        }
        edges.push(ReebEdge { cell: e[0], left: e[1], right: e[3] });
    }
    Ok(ReebGraph { cells, edges, critical_values: doc.critical_values })
}

fn fmt_level(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

/// Graphviz DOT text. Vertices of one cell share a rank and ranks are
/// ordered bottom-to-top by function value.
pub fn to_dot(g: &ReebGraph) -> String {
    let mut s = String::from("digraph reeb {\n");
    let vertices = g.vertices();
    if !vertices.is_empty() {
        s.push_str("  rankdir=BT;\n  node [shape=box];\n");
        for v in &vertices {
            let members = v
                .members
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join(",");
            s.push_str(&format!(
                "  v{} [label=\"{{{}}} [{}, {}]\"];\n",
                v.id,
                members,
                fmt_level(v.lo.value),
                fmt_level(v.hi.value)
            ));
        }
        let offsets = g.vertex_offsets();
        for (k, cell) in g.cells.iter().enumerate() {
            if cell.components.len() > 1 {
                let ids: Vec<String> =
                    (0..cell.components.len()).map(|i| format!("v{}", offsets[k] + i)).collect();
                s.push_str(&format!("  {{ rank=same; {}; }}\n", ids.join("; ")));
            }
        }
        for e in &g.edges {
            s.push_str(&format!(
                "  v{} -> v{};\n",
                offsets[e.cell] + e.left,
                offsets[e.cell + 1] + e.right
            ));
        }
    }
    s.push_str("}\n");
    s
}
