//! The two-dimensional lattice (grid) graph: the union of all integer
//! horizontal and vertical lines of the plane, with the intrinsic
//! path metric induced by the l1 length of axis-parallel segments.
//!
//! Whenever a monotone staircase joins two points the distance equals
//! `|dx1| + |dx2|`; otherwise paths must route through junctions
//! (integer points) and the distance exceeds the plain l1 value.
//! All arithmetic is exact rational, so midpoint coordinates and
//! solved values carry tolerance zero.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{GeodesicSpace, GridKey, SpaceError};
use crate::scalar::{dyadic_string, is_dyadic, is_inverse_power_of_two, Rat, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub x1: Rat,
    pub x2: Rat,
}

impl LatticePoint {
    pub fn new(x1: Rat, x2: Rat) -> Self {
        Self { x1, x2 }
    }

    pub fn of_ints(x1: i64, x2: i64) -> Self {
        Self::new(Rat::from_int(x1), Rat::from_int(x2))
    }

    pub fn of_ratios(x1: (i64, i64), x2: (i64, i64)) -> Self {
        Self::new(Rat::from_ratio(x1.0, x1.1), Rat::from_ratio(x2.0, x2.1))
    }

    /// l1 norm `|x1| + |x2|`.
    pub fn norm1(&self) -> Rat {
        self.x1.abs() + self.x2.abs()
    }

    fn on_vertical(&self) -> bool {
        self.x1.is_integer()
    }

    fn on_horizontal(&self) -> bool {
        self.x2.is_integer()
    }

    fn is_junction(&self) -> bool {
        self.on_vertical() && self.on_horizontal()
    }
}

impl Serialize for LatticePoint {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        let mut st = s.serialize_struct("LatticePoint", 2)?;
        st.serialize_field("x1", &dyadic_string(self.x1))?;
        st.serialize_field("x2", &dyadic_string(self.x2))?;
        st.end()
    }
}

fn l1(a: &LatticePoint, b: &LatticePoint) -> Rat {
    (a.x1 - b.x1).abs() + (a.x2 - b.x2).abs()
}

#[derive(Clone, Debug)]
pub struct Lattice2 {
    h: Rat,
}

impl Lattice2 {
    /// `h` must be `2^-m` so that edge-subdivision points are exact dyadics.
    pub fn new(h: Rat) -> Result<Self, SpaceError> {
        if !is_inverse_power_of_two(h) {
            return Err(SpaceError::Config(format!(
                "lattice resolution must be 2^-m, got {h}"
            )));
        }
        Ok(Self { h })
    }

    /// Nearest junctions on the line(s) through `p`; the exits every
    /// shortest path must use.
    fn junctions(&self, p: &LatticePoint) -> Vec<LatticePoint> {
        if p.is_junction() {
            return vec![p.clone()];
        }
        if p.on_vertical() {
            let lo = p.x2.floor_int();
            vec![
                LatticePoint::new(p.x1, Rat::from_int(lo)),
                LatticePoint::new(p.x1, Rat::from_int(lo + 1)),
            ]
        } else {
            let lo = p.x1.floor_int();
            vec![
                LatticePoint::new(Rat::from_int(lo), p.x2),
                LatticePoint::new(Rat::from_int(lo + 1), p.x2),
            ]
        }
    }

    fn same_line(x: &LatticePoint, y: &LatticePoint) -> bool {
        (x.x1 == y.x1 && x.x1.is_integer()) || (x.x2 == y.x2 && x.x2.is_integer())
    }

    /// Distance from `x` to a point `z` lying on the segment between the
    /// junctions `a`, `b` (unit segment of the grid), given the distances
    /// `d(x, a)` and `d(x, b)`. `s` is the offset of `z` from `a`, and
    /// `direct` is `Some(s_x)` when `x` lies on the same segment.
    fn seg_dist(dxa: Rat, dxb: Rat, seg_len: Rat, s: Rat, direct: Option<Rat>) -> Rat {
        let via = (dxa + s).min_s(dxb + (seg_len - s));
        match direct {
            Some(sx) => via.min_s((s - sx).abs()),
            None => via,
        }
    }

    /// All grid points of the box at resolution `h`, canonical order.
    pub fn patch(&self, lo1: i64, hi1: i64, lo2: i64, hi2: i64) -> Vec<LatticePoint> {
        let mut pts = std::collections::BTreeSet::new();
        let steps = |lo: i64, hi: i64| -> Vec<Rat> {
            let per_unit = (Rat::one() / self.h).floor_int();
            let mut v = Vec::new();
            for k in (lo * per_unit)..=(hi * per_unit) {
                v.push(Rat::from_int(k) * self.h);
            }
            v
        };
        for x1 in lo1..=hi1 {
            for x2 in steps(lo2, hi2) {
                pts.insert(LatticePoint::new(Rat::from_int(x1), x2));
            }
        }
        for x2 in lo2..=hi2 {
            for x1 in steps(lo1, hi1) {
                pts.insert(LatticePoint::new(x1, Rat::from_int(x2)));
            }
        }
        pts.into_iter().collect()
    }

    /// Junction hull containing every geodesic between `x` and `y`.
    fn hull(x: &LatticePoint, y: &LatticePoint) -> (i64, i64, i64, i64) {
        let lo1 = x.x1.min_s(y.x1).floor_int();
        let hi1 = x.x1.max_s(y.x1).ceil_int();
        let lo2 = x.x2.min_s(y.x2).floor_int();
        let hi2 = x.x2.max_s(y.x2).ceil_int();
        (lo1, hi1, lo2, hi2)
    }

    /// Midpoint candidates on one grid segment `[a, b]` (consecutive
    /// junctions, or clipped by the hull), pushed into `out` after exact
    /// verification.
    #[allow(clippy::too_many_arguments)]
    fn scan_segment(
        &self,
        x: &LatticePoint,
        y: &LatticePoint,
        a: &LatticePoint,
        b: &LatticePoint,
        target: Rat,
        out: &mut Vec<LatticePoint>,
    ) {
        let seg_len = l1(a, b);
        if seg_len == Rat::zero() {
            return;
        }
        let vertical = a.x1 == b.x1;
        let direct_of = |p: &LatticePoint| -> Option<Rat> {
            if vertical {
                (p.x1 == a.x1 && p.x2 >= a.x2.min_s(b.x2) && p.x2 <= a.x2.max_s(b.x2))
                    .then(|| p.x2 - a.x2.min_s(b.x2))
            } else {
                (p.x2 == a.x2 && p.x1 >= a.x1.min_s(b.x1) && p.x1 <= a.x1.max_s(b.x1))
                    .then(|| p.x1 - a.x1.min_s(b.x1))
            }
        };
        // Use the low endpoint as the parameter origin.
        let (lo, hi) = if vertical {
            if a.x2 <= b.x2 {
                (a.clone(), b.clone())
            } else {
                (b.clone(), a.clone())
            }
        } else if a.x1 <= b.x1 {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        let dxa = self.dist_raw(x, &lo);
        let dxb = self.dist_raw(x, &hi);
        let dya = self.dist_raw(y, &lo);
        let dyb = self.dist_raw(y, &hi);
        let sx = direct_of(x);
        let sy = direct_of(y);
        // Candidate offsets where either distance can equal the target.
        let mut cands = vec![
            target - dxa,
            seg_len - (target - dxb),
            target - dya,
            seg_len - (target - dyb),
            Rat::zero(),
            seg_len,
        ];
        if let Some(s) = sx {
            cands.push(s + target);
            cands.push(s - target);
        }
        if let Some(s) = sy {
            cands.push(s + target);
            cands.push(s - target);
        }
        for s in cands {
            if s < Rat::zero() || s > seg_len {
                continue;
            }
            let fx = Self::seg_dist(dxa, dxb, seg_len, s, sx);
            let fy = Self::seg_dist(dya, dyb, seg_len, s, sy);
            if fx == target && fy == target {
                let z = if vertical {
                    LatticePoint::new(lo.x1, lo.x2 + s)
                } else {
                    LatticePoint::new(lo.x1 + s, lo.x2)
                };
                if !out.contains(&z) {
                    out.push(z);
                }
            }
        }
    }

    fn dist_raw(&self, x: &LatticePoint, y: &LatticePoint) -> Rat {
        if x == y {
            return Rat::zero();
        }
        if Self::same_line(x, y) {
            return l1(x, y);
        }
        let mut best: Option<Rat> = None;
        for j1 in self.junctions(x) {
            for j2 in self.junctions(y) {
                let total = l1(x, &j1) + l1(&j1, &j2) + l1(&j2, y);
                best = Some(match best {
                    None => total,
                    Some(b) => b.min_s(total),
                });
            }
        }
        best.unwrap()
    }

    /// Canonical shortest polyline from `p` to `q`: axis moves only,
    /// exits via the distance-minimizing junction pair (lexicographic
    /// tie-break), staircase runs vertical-first.
    fn canonical_path(&self, p: &LatticePoint, q: &LatticePoint) -> Vec<LatticePoint> {
        if p == q {
            return vec![p.clone()];
        }
        if Self::same_line(p, q) {
            return vec![p.clone(), q.clone()];
        }
        let mut best: Option<(Rat, LatticePoint, LatticePoint)> = None;
        for j1 in self.junctions(p) {
            for j2 in self.junctions(q) {
                let total = l1(p, &j1) + l1(&j1, &j2) + l1(&j2, q);
                let better = match &best {
                    None => true,
                    Some((t, bj1, bj2)) => {
                        total < *t || (total == *t && (&j1, &j2) < (&(bj1.clone()), &(bj2.clone())))
                    }
                };
                if better {
                    best = Some((total, j1.clone(), j2.clone()));
                }
            }
        }
        let (_, j1, j2) = best.unwrap();
        let mut path = vec![p.clone()];
        let push = |path: &mut Vec<LatticePoint>, pt: LatticePoint| {
            if path.last() != Some(&pt) {
                path.push(pt);
            }
        };
        push(&mut path, j1.clone());
        // vertical-first staircase between junctions
        let corner = LatticePoint::new(j1.x1, j2.x2);
        push(&mut path, corner);
        push(&mut path, j2.clone());
        push(&mut path, q.clone());
        path
    }

    fn walk_path(path: &[LatticePoint], target: Rat) -> LatticePoint {
        let mut remaining = target;
        for w in path.windows(2) {
            let seg = l1(&w[0], &w[1]);
            if remaining <= seg {
                if seg == Rat::zero() {
                    return w[0].clone();
                }
                let t = remaining / seg;
                return LatticePoint::new(
                    w[0].x1 + t * (w[1].x1 - w[0].x1),
                    w[0].x2 + t * (w[1].x2 - w[0].x2),
                );
            }
            remaining -= seg;
        }
        path.last().unwrap().clone()
    }
}

impl GeodesicSpace for Lattice2 {
    type S = Rat;
    type P = LatticePoint;

    fn contains(&self, p: &LatticePoint) -> Result<(), SpaceError> {
        if !p.on_vertical() && !p.on_horizontal() {
            return Err(SpaceError::Domain(format!(
                "({}, {}) has no integer coordinate",
                p.x1, p.x2
            )));
        }
        if !is_dyadic(p.x1) || !is_dyadic(p.x2) {
            return Err(SpaceError::Domain(format!(
                "({}, {}) is not dyadic",
                p.x1, p.x2
            )));
        }
        Ok(())
    }

    fn dist(&self, x: &LatticePoint, y: &LatticePoint) -> Rat {
        self.dist_raw(x, y)
    }

    fn branch_count(&self, x: &LatticePoint, y: &LatticePoint) -> usize {
        self.midpoints(x, y).len()
    }

    /// Branch `b` is the geodesic through the `b`-th midpoint (canonical
    /// order), realized by canonical shortest polylines on each half.
    fn geodesic_point(
        &self,
        x: &LatticePoint,
        y: &LatticePoint,
        s: Rat,
        branch: usize,
    ) -> Result<LatticePoint, SpaceError> {
        let mids = self.midpoints(x, y);
        let z = mids.get(branch).ok_or(SpaceError::BranchOutOfRange {
            branch,
            count: mids.len(),
        })?;
        let mut path = self.canonical_path(x, z);
        path.extend(self.canonical_path(z, y).into_iter().skip(1));
        let d = self.dist(x, y);
        Ok(Self::walk_path(&path, s * d))
    }

    fn midpoints(&self, x: &LatticePoint, y: &LatticePoint) -> Vec<LatticePoint> {
        let d = self.dist(x, y);
        if d == Rat::zero() {
            return vec![x.clone()];
        }
        let target = d.half();
        let (lo1, hi1, lo2, hi2) = Self::hull(x, y);
        let mut out = Vec::new();
        // Vertical segments of the hull grid.
        for i in lo1..=hi1 {
            for j in lo2..hi2.max(lo2 + 1) {
                let a = LatticePoint::of_ints(i, j);
                let b = LatticePoint::of_ints(i, j + 1);
                self.scan_segment(x, y, &a, &b, target, &mut out);
            }
        }
        // Horizontal segments.
        for j in lo2..=hi2 {
            for i in lo1..hi1.max(lo1 + 1) {
                let a = LatticePoint::of_ints(i, j);
                let b = LatticePoint::of_ints(i + 1, j);
                self.scan_segment(x, y, &a, &b, target, &mut out);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn ball_sample(&self, center: &LatticePoint, r: Rat) -> Vec<LatticePoint> {
        let mut out = std::collections::BTreeSet::new();
        if r >= Rat::zero() {
            out.insert(center.clone());
        }
        let per_unit = (Rat::one() / self.h).floor_int();
        let lo1 = (center.x1 - r).floor_int();
        let hi1 = (center.x1 + r).ceil_int();
        let lo2 = (center.x2 - r).floor_int();
        let hi2 = (center.x2 + r).ceil_int();
        // Points on vertical lines.
        for i in lo1..=hi1 {
            for k in (lo2 * per_unit)..=(hi2 * per_unit) {
                let p = LatticePoint::new(Rat::from_int(i), Rat::from_int(k) * self.h);
                if self.dist(center, &p) <= r {
                    out.insert(p);
                }
            }
        }
        // Points on horizontal lines.
        for j in lo2..=hi2 {
            for k in (lo1 * per_unit)..=(hi1 * per_unit) {
                let p = LatticePoint::new(Rat::from_int(k) * self.h, Rat::from_int(j));
                if self.dist(center, &p) <= r {
                    out.insert(p);
                }
            }
        }
        out.into_iter().collect()
    }

    fn eps_mid(&self) -> Rat {
        Rat::zero()
    }

    fn resolution(&self) -> Rat {
        self.h
    }

    fn point_key(&self, p: &LatticePoint) -> String {
        format!("{},{}", dyadic_string(p.x1), dyadic_string(p.x2))
    }

    fn point_json(&self, p: &LatticePoint) -> serde_json::Value {
        serde_json::json!({
            "kind": "lattice",
            "x1": dyadic_string(p.x1),
            "x2": dyadic_string(p.x2),
        })
    }

    fn grid_key(&self, p: &LatticePoint) -> Option<GridKey> {
        let half = self.h.half();
        let q1 = p.x1 / half;
        let q2 = p.x2 / half;
        if q1.is_integer() && q2.is_integer() {
            Some(vec![q1.floor_int(), q2.floor_int()])
        } else {
            None
        }
    }

    fn approx_coords(&self, p: &LatticePoint) -> Vec<f64> {
        vec![p.x1.to_f64(), p.x2.to_f64()]
    }

    // The graph metric dominates l1, so a slightly deflated float l1
    // never prunes a true candidate.
    fn approx_dist_lower(&self, a: &[f64], b: &[f64]) -> f64 {
        let l1 = (a[0] - b[0]).abs() + (a[1] - b[1]).abs();
        l1 * (1.0 - 1e-9) - 1e-9
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat() -> Lattice2 {
        Lattice2::new(Rat::from_ratio(1, 4)).unwrap()
    }

    fn pt(x1: (i64, i64), x2: (i64, i64)) -> LatticePoint {
        LatticePoint::of_ratios(x1, x2)
    }

    #[test]
    fn staircase_pairs_use_l1() {
        let l = lat();
        // (0,0),(1,1) -> 2
        assert_eq!(
            l.dist(&LatticePoint::of_ints(0, 0), &LatticePoint::of_ints(1, 1)),
            Rat::from_int(2)
        );
        assert_eq!(
            l.dist(&pt((1, 2), (1, 1)), &pt((1, 1), (1, 2))),
            Rat::from_int(1)
        );
    }

    #[test]
    fn non_staircase_pairs_route_through_junctions() {
        let l = lat();
        // (1/2, 1) and (1/2, 0) sit on parallel horizontal lines with no
        // integer column between them.
        let d = l.dist(&pt((1, 2), (1, 1)), &pt((1, 2), (0, 1)));
        assert_eq!(d, Rat::from_int(2));
        // (0.3-like) analogue with quarters: (1/4,0) to (3/4,1)
        let d = l.dist(&pt((1, 4), (0, 1)), &pt((3, 4), (1, 1)));
        assert_eq!(d, Rat::from_int(2)); // 1/4+3/4 down-route + 1 = 2
    }

    #[test]
    fn identity_of_indiscernibles() {
        let l = lat();
        let p = pt((1, 2), (1, 1));
        assert_eq!(l.dist(&p, &p), Rat::zero());
    }

    #[test]
    fn reference_witness_midpoint_is_unique_vertical() {
        let l = lat();
        // M((0,0),(0,2k)) = {(0,k)} for k = 2
        let m = l.midpoints(&LatticePoint::of_ints(0, 0), &LatticePoint::of_ints(0, 4));
        assert_eq!(m, vec![LatticePoint::of_ints(0, 2)]);
    }

    #[test]
    fn norm_witness_midpoint() {
        let l = lat();
        // M((1/2,1),(1,1/2)) = {(1,1)}
        let m = l.midpoints(&pt((1, 2), (1, 1)), &pt((1, 1), (1, 2)));
        assert_eq!(m, vec![LatticePoint::of_ints(1, 1)]);
    }

    #[test]
    fn geodesic_point_on_unique_vertical() {
        let l = lat();
        let g = l
            .geodesic_point(
                &LatticePoint::of_ints(0, 0),
                &LatticePoint::of_ints(0, 2),
                Rat::from_ratio(1, 2),
                0,
            )
            .unwrap();
        assert_eq!(g, LatticePoint::of_ints(0, 1));
    }

    #[test]
    fn prop_6_5_midpoints() {
        let l = lat();
        // M((5,4),(4,12)) = {(4, 15/2), (9/2, 8), (5, 17/2)}
        let m = l.midpoints(&LatticePoint::of_ints(5, 4), &LatticePoint::of_ints(4, 12));
        assert_eq!(
            m,
            vec![pt((4, 1), (15, 2)), pt((9, 2), (8, 1)), pt((5, 1), (17, 2)),]
        );
    }

    #[test]
    fn midpoints_of_diagonal_junction_pair() {
        let l = lat();
        // M((1,0),(0,1)) = {(0,0), (1,1)}
        let m = l.midpoints(&LatticePoint::of_ints(1, 0), &LatticePoint::of_ints(0, 1));
        assert_eq!(
            m,
            vec![LatticePoint::of_ints(0, 0), LatticePoint::of_ints(1, 1)]
        );
    }

    #[test]
    fn ball_sample_unit_ball_at_origin() {
        let l = Lattice2::new(Rat::from_ratio(1, 2)).unwrap();
        let ball = l.ball_sample(&LatticePoint::of_ints(0, 0), Rat::one());
        // the 9 points {(0,0),(±1/2,0),(±1,0),(0,±1/2),(0,±1)}
        assert_eq!(ball.len(), 9);
        for p in &ball {
            assert!(l.dist(&LatticePoint::of_ints(0, 0), p) <= Rat::one());
            assert!(p.x1 == Rat::zero() || p.x2 == Rat::zero());
        }
    }

    #[test]
    fn zero_radius_ball() {
        let l = lat();
        let c = pt((1, 2), (1, 1));
        assert_eq!(l.ball_sample(&c, Rat::zero()), vec![c]);
    }

    #[test]
    fn membership_checks() {
        let l = lat();
        assert!(l.contains(&pt((1, 2), (1, 1))).is_ok());
        assert!(l.contains(&pt((1, 2), (1, 2))).is_err()); // (1/2, 1/2) off-graph
        assert!(l.contains(&pt((1, 3), (1, 1))).is_err()); // non-dyadic coordinate
    }

    #[test]
    fn separate_on_lattice() {
        let l = lat();
        let x = LatticePoint::of_ints(0, 0);
        assert_eq!(l.separate(&x, &x, &x), x);
    }

    #[test]
    fn graph_distance_strictly_exceeds_l1_when_no_staircase() {
        let l = lat();
        // (4, 15/2) to (0, 15/2): l1 = 4 but the graph needs 5.
        let a = pt((4, 1), (15, 2));
        let b = pt((0, 1), (15, 2));
        assert_eq!(l.dist(&a, &b), Rat::from_int(5));
        // while (4, 15/2) to (1/2, 7) is exactly 4 (staircase exists)
        let c = pt((1, 2), (7, 1));
        assert_eq!(l.dist(&a, &c), Rat::from_int(4));
    }
}
