//! Finite metric trees with positive edge lengths.
//!
//! Points live on edges as `(edge id, offset from the edge's first
//! node)`. Trees are uniquely geodesic Busemann spaces; geodesics are
//! computed by walking the unique node path between the two carrying
//! edges.

use serde::Serialize;

use super::{GeodesicSpace, GridKey, SpaceError};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreePoint<S> {
    pub edge: usize,
    pub offset: S,
}

#[derive(Clone, Debug)]
pub struct TreeEdge<S> {
    pub a: usize,
    pub b: usize,
    pub len: S,
}

#[derive(Clone, Debug)]
pub struct Tree<S: Scalar> {
    edges: Vec<TreeEdge<S>>,
    node_dist: Vec<Vec<S>>,
    next_hop: Vec<Vec<usize>>,
    incident: Vec<Vec<usize>>,
    h: S,
    eps: S,
}

impl<S: Scalar + Serialize> Tree<S> {
    pub fn new(edges: Vec<(usize, usize, S)>, h: S, eps: S) -> Result<Self, SpaceError> {
        if edges.is_empty() {
            return Err(SpaceError::Config("tree needs at least one edge".into()));
        }
        if h.total_cmp(&S::zero()) != std::cmp::Ordering::Greater {
            return Err(SpaceError::Config("h must be positive".into()));
        }
        let node_count = edges.iter().flat_map(|&(a, b, _)| [a, b]).max().unwrap() + 1;
        if edges.len() != node_count - 1 {
            return Err(SpaceError::Config(format!(
                "{} edges on {} nodes is not a tree",
                edges.len(),
                node_count
            )));
        }
        let mut incident = vec![Vec::new(); node_count];
        let mut adj: Vec<Vec<(usize, S, usize)>> = vec![Vec::new(); node_count];
        let mut es = Vec::with_capacity(edges.len());
        for (id, &(a, b, len)) in edges.iter().enumerate() {
            if len.total_cmp(&S::zero()) != std::cmp::Ordering::Greater {
                return Err(SpaceError::Config("edge lengths must be positive".into()));
            }
            incident[a].push(id);
            incident[b].push(id);
            adj[a].push((b, len, id));
            adj[b].push((a, len, id));
            es.push(TreeEdge { a, b, len });
        }
        // Distances and routing by DFS from every node; trees are small.
        let mut node_dist = vec![vec![S::zero(); node_count]; node_count];
        let mut next_hop = vec![vec![usize::MAX; node_count]; node_count];
        for src in 0..node_count {
            let mut stack = vec![(src, usize::MAX)];
            let mut seen = vec![false; node_count];
            seen[src] = true;
            while let Some((u, _parent)) = stack.pop() {
                for &(v, len, _) in &adj[u] {
                    if seen[v] {
                        continue;
                    }
                    seen[v] = true;
                    node_dist[src][v] = node_dist[src][u] + len;
                    next_hop[src][v] = if u == src { v } else { next_hop[src][u] };
                    stack.push((v, u));
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(SpaceError::Config("tree is not connected".into()));
            }
        }
        Ok(Self {
            edges: es,
            node_dist,
            next_hop,
            incident,
            h,
            eps,
        })
    }

    /// A star with `arms` unit-direction edges of length `len` around node 0.
    pub fn star(arms: usize, len: S, h: S, eps: S) -> Result<Self, SpaceError> {
        let edges = (0..arms).map(|i| (0, i + 1, len)).collect();
        Self::new(edges, h, eps)
    }

    pub fn edge(&self, id: usize) -> &TreeEdge<S> {
        &self.edges[id]
    }

    pub fn node_point(&self, node: usize) -> TreePoint<S> {
        self.canon_vertex(node)
    }

    /// Canonical representative: vertices are pinned to their smallest
    /// incident edge so equal points compare equal.
    fn canon(&self, p: &TreePoint<S>) -> TreePoint<S> {
        let e = &self.edges[p.edge];
        if p.offset.abs() <= self.eps {
            return self.canon_vertex(e.a);
        }
        if (p.offset - e.len).abs() <= self.eps {
            return self.canon_vertex(e.b);
        }
        p.clone()
    }

    fn canon_vertex(&self, node: usize) -> TreePoint<S> {
        let id = *self.incident[node]
            .iter()
            .min()
            .expect("connected tree node has an edge");
        let e = &self.edges[id];
        if e.a == node {
            TreePoint {
                edge: id,
                offset: S::zero(),
            }
        } else {
            TreePoint {
                edge: id,
                offset: e.len,
            }
        }
    }

    fn dist_to_end(&self, p: &TreePoint<S>, node: usize) -> S {
        let e = &self.edges[p.edge];
        if node == e.a {
            p.offset
        } else {
            debug_assert_eq!(node, e.b);
            e.len - p.offset
        }
    }

    /// Exit nodes and the leg length toward each for a point on its edge.
    fn exits(&self, p: &TreePoint<S>) -> [(usize, S); 2] {
        let e = &self.edges[p.edge];
        [(e.a, p.offset), (e.b, e.len - p.offset)]
    }

    /// The point at arclength `target` from `p` along the unique geodesic
    /// toward `q`. `target` must lie in `[0, d(p, q)]`.
    fn walk(&self, p: &TreePoint<S>, q: &TreePoint<S>, target: S) -> TreePoint<S> {
        let p = self.canon(p);
        let q = self.canon(q);
        if p.edge == q.edge {
            let dir = if q.offset.total_cmp(&p.offset) == std::cmp::Ordering::Less {
                -S::one()
            } else {
                S::one()
            };
            return TreePoint {
                edge: p.edge,
                offset: p.offset + dir * target,
            };
        }
        // Choose the exit pair realizing the distance (deterministic ties).
        let mut best: Option<(S, usize, usize)> = None;
        for (u, leg_p) in self.exits(&p) {
            for (v, leg_q) in self.exits(&q) {
                let total = leg_p + self.node_dist[u][v] + leg_q;
                let better = match &best {
                    None => true,
                    Some((t, _, _)) => total.total_cmp(t) == std::cmp::Ordering::Less,
                };
                if better {
                    best = Some((total, u, v));
                }
            }
        }
        let (_, u, v) = best.expect("nonempty exits");
        let mut remaining = target;
        // Leg 1: along p's edge to u.
        let leg1 = self.dist_to_end(&p, u);
        if remaining.total_cmp(&leg1) != std::cmp::Ordering::Greater {
            let e = &self.edges[p.edge];
            let offset = if u == e.a {
                p.offset - remaining
            } else {
                p.offset + remaining
            };
            return self.canon(&TreePoint {
                edge: p.edge,
                offset,
            });
        }
        remaining -= leg1;
        // Node path u -> v.
        let mut cur = u;
        while cur != v {
            let next = self.next_hop[cur][v];
            let eid = self.incident[cur]
                .iter()
                .copied()
                .find(|&id| {
                    let e = &self.edges[id];
                    (e.a == cur && e.b == next) || (e.b == cur && e.a == next)
                })
                .expect("adjacent edge");
            let e = &self.edges[eid];
            if remaining.total_cmp(&e.len) != std::cmp::Ordering::Greater {
                let offset = if e.a == cur {
                    remaining
                } else {
                    e.len - remaining
                };
                return self.canon(&TreePoint { edge: eid, offset });
            }
            remaining -= e.len;
            cur = next;
        }
        // Leg 3: along q's edge from v toward q.
        let e = &self.edges[q.edge];
        let offset = if v == e.a {
            remaining
        } else {
            e.len - remaining
        };
        self.canon(&TreePoint {
            edge: q.edge,
            offset,
        })
    }

    /// Every grid point of the tree (offsets at multiples of `h`).
    pub fn patch(&self) -> Vec<TreePoint<S>> {
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (id, e) in self.edges.iter().enumerate() {
            let steps = (e.len / self.h).floor_int();
            for k in 0..=steps {
                let p = self.canon(&TreePoint {
                    edge: id,
                    offset: S::from_int(k) * self.h,
                });
                if seen.insert(self.point_key(&p)) {
                    out.push(p);
                }
            }
        }
        out
    }
}

impl<S: Scalar + Serialize> GeodesicSpace for Tree<S> {
    type S = S;
    type P = TreePoint<S>;

    fn contains(&self, p: &TreePoint<S>) -> Result<(), SpaceError> {
        if p.edge >= self.edges.len() {
            return Err(SpaceError::Domain(format!(
                "edge {} does not exist",
                p.edge
            )));
        }
        let len = self.edges[p.edge].len;
        if p.offset.total_cmp(&S::zero()) == std::cmp::Ordering::Less
            || p.offset.total_cmp(&len) == std::cmp::Ordering::Greater
        {
            return Err(SpaceError::Domain(format!(
                "offset {} outside [0, {}]",
                p.offset, len
            )));
        }
        Ok(())
    }

    fn dist(&self, x: &TreePoint<S>, y: &TreePoint<S>) -> S {
        let x = self.canon(x);
        let y = self.canon(y);
        if x.edge == y.edge {
            return (x.offset - y.offset).abs();
        }
        let mut best: Option<S> = None;
        for (u, leg_x) in self.exits(&x) {
            for (v, leg_y) in self.exits(&y) {
                let total = leg_x + self.node_dist[u][v] + leg_y;
                best = Some(match best {
                    None => total,
                    Some(b) => b.min_s(total),
                });
            }
        }
        best.unwrap()
    }

    fn branch_count(&self, _x: &TreePoint<S>, _y: &TreePoint<S>) -> usize {
        1
    }

    fn geodesic_point(
        &self,
        x: &TreePoint<S>,
        y: &TreePoint<S>,
        s: S,
        branch: usize,
    ) -> Result<TreePoint<S>, SpaceError> {
        if branch != 0 {
            return Err(SpaceError::BranchOutOfRange { branch, count: 1 });
        }
        let d = self.dist(x, y);
        Ok(self.walk(x, y, s * d))
    }

    fn midpoints(&self, x: &TreePoint<S>, y: &TreePoint<S>) -> Vec<TreePoint<S>> {
        let d = self.dist(x, y);
        vec![self.walk(x, y, d.half())]
    }

    fn ball_sample(&self, center: &TreePoint<S>, r: S) -> Vec<TreePoint<S>> {
        let mut out: Vec<TreePoint<S>> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let c = self.canon(center);
        for p in self.patch() {
            if self.dist(&c, &p).total_cmp(&(r + self.eps)) != std::cmp::Ordering::Greater
                && seen.insert(self.point_key(&p))
            {
                out.push(p);
            }
        }
        if seen.insert(self.point_key(&c)) {
            out.push(c);
        }
        out
    }

    fn eps_mid(&self) -> S {
        self.eps
    }

    fn resolution(&self) -> S {
        self.h
    }

    fn point_key(&self, p: &TreePoint<S>) -> String {
        let c = self.canon(p);
        format!("e{:03}@{}", c.edge, c.offset.key())
    }

    fn point_json(&self, p: &TreePoint<S>) -> serde_json::Value {
        let c = self.canon(p);
        serde_json::json!({
            "kind": "tree",
            "edge": c.edge,
            "offset": c.offset.to_f64(),
        })
    }

    fn grid_key(&self, p: &TreePoint<S>) -> Option<GridKey> {
        let c = self.canon(p);
        let k = if S::EXACT {
            let q = c.offset / self.h.half();
            if !q.is_integer() {
                return None;
            }
            q.floor_int()
        } else {
            super::quantize(c.offset.to_f64(), self.h.to_f64() / 2.0, 1e-9)?
        };
        Some(vec![c.edge as i64, k])
    }
}
