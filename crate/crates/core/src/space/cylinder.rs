//! The flat cylinder `S^1 x R` with the intrinsic metric
//! `d((a,x3),(b,y3)) = min_n sqrt((b - a + 2 pi n)^2 + (y3 - x3)^2)`.
//!
//! Antipodal angle pairs have two geodesics (one per winding direction),
//! so midpoint sets can have two elements. Not a Busemann space, but a
//! uniform Busemann NPC space.

use serde::Serialize;

use super::{GeodesicSpace, GridKey, SpaceError};
use crate::scalar::RealScalar;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderPoint<S> {
    pub theta: S,
    pub height: S,
}

impl<S: RealScalar> CylinderPoint<S> {
    /// Normalizes the angle into `[0, 2 pi)`.
    pub fn new(theta: S, height: S) -> Self {
        let two_pi = S::pi() + S::pi();
        let mut t = theta % two_pi;
        if t < S::zero() {
            t += two_pi;
        }
        if t >= two_pi {
            t = S::zero();
        }
        Self { theta: t, height }
    }
}

#[derive(Clone, Debug)]
pub struct Cylinder<S: RealScalar> {
    /// Height resolution; also the target angular resolution.
    h: S,
    /// Angular step dividing the circle exactly: `2 pi / n_theta <= h`.
    theta_step: S,
    n_theta: i64,
    eps: S,
}

impl<S: RealScalar> Cylinder<S> {
    pub fn new(h: S, eps: S) -> Result<Self, SpaceError> {
        if h <= S::zero() {
            return Err(SpaceError::Config("h must be positive".into()));
        }
        let two_pi = S::pi() + S::pi();
        let n = (two_pi.to_f64() / h.to_f64()).ceil() as i64;
        // Multiple of 4 so antipodal midpoints (quarter turns) are exact
        // grid angles.
        let n_theta = ((n + 3) / 4 * 4).max(8);
        let theta_step = two_pi / S::from_int(n_theta);
        Ok(Self {
            h,
            theta_step,
            n_theta,
            eps,
        })
    }

    pub fn theta_step(&self) -> S {
        self.theta_step
    }

    fn two_pi(&self) -> S {
        S::pi() + S::pi()
    }

    /// Windings achieving the minimal `|dtheta + 2 pi n|`, canonical first
    /// (smallest `|n|`; at most two on antipodal pairs).
    fn windings(&self, x: &CylinderPoint<S>, y: &CylinderPoint<S>) -> Vec<i64> {
        let two_pi = self.two_pi();
        let dtheta = y.theta - x.theta;
        let base = -(dtheta.to_f64() / two_pi.to_f64()).round() as i64;
        let mut best = S::infinity();
        let mut mins: Vec<i64> = Vec::new();
        for n in [base - 1, base, base + 1] {
            let v = (dtheta + two_pi * S::from_int(n)).abs();
            if v < best - self.eps {
                best = v;
                mins.clear();
                mins.push(n);
            } else if (v - best).abs() <= self.eps {
                mins.push(n);
            }
        }
        mins.sort_by_key(|n| (n.abs(), -n));
        mins
    }

    /// Grid over `theta in S^1`, `height in [lo, hi]`, canonical order.
    pub fn patch(&self, lo: S, hi: S) -> Vec<CylinderPoint<S>> {
        let mut out = Vec::new();
        let mut j = (lo.to_f64() / self.h.to_f64()).floor() as i64 - 1;
        loop {
            let height = S::from_int(j) * self.h;
            if height > hi + self.eps {
                break;
            }
            if height >= lo - self.eps {
                for i in 0..self.n_theta {
                    out.push(CylinderPoint::new(self.theta_step * S::from_int(i), height));
                }
            }
            j += 1;
        }
        out
    }
}

impl<S: RealScalar> GeodesicSpace for Cylinder<S> {
    type S = S;
    type P = CylinderPoint<S>;

    fn contains(&self, p: &CylinderPoint<S>) -> Result<(), SpaceError> {
        if !p.theta.to_f64().is_finite() || !p.height.to_f64().is_finite() {
            return Err(SpaceError::Domain("non-finite coordinates".into()));
        }
        Ok(())
    }

    fn dist(&self, x: &CylinderPoint<S>, y: &CylinderPoint<S>) -> S {
        let n = self.windings(x, y)[0];
        let a = y.theta - x.theta + self.two_pi() * S::from_int(n);
        let b = y.height - x.height;
        (a * a + b * b).sqrt()
    }

    fn branch_count(&self, x: &CylinderPoint<S>, y: &CylinderPoint<S>) -> usize {
        self.windings(x, y).len()
    }

    fn geodesic_point(
        &self,
        x: &CylinderPoint<S>,
        y: &CylinderPoint<S>,
        s: S,
        branch: usize,
    ) -> Result<CylinderPoint<S>, SpaceError> {
        let ns = self.windings(x, y);
        let n = *ns.get(branch).ok_or(SpaceError::BranchOutOfRange {
            branch,
            count: ns.len(),
        })?;
        let dtheta = y.theta - x.theta + self.two_pi() * S::from_int(n);
        Ok(CylinderPoint::new(
            x.theta + s * dtheta,
            x.height + s * (y.height - x.height),
        ))
    }

    fn midpoints(&self, x: &CylinderPoint<S>, y: &CylinderPoint<S>) -> Vec<CylinderPoint<S>> {
        let mut out: Vec<CylinderPoint<S>> = Vec::new();
        for b in 0..self.branch_count(x, y) {
            let z = self
                .geodesic_point(x, y, S::from_ratio(1, 2), b)
                .expect("enumerated branch");
            if !out.iter().any(|w| self.dist(w, &z) <= self.eps) {
                out.push(z);
            }
        }
        out
    }

    fn ball_sample(&self, center: &CylinderPoint<S>, r: S) -> Vec<CylinderPoint<S>> {
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let theta_span = (r.to_f64() / self.theta_step.to_f64()).floor() as i64;
        let half_circle = self.n_theta / 2;
        let ti_lo = -theta_span.min(half_circle);
        let ti_hi = theta_span.min(half_circle);
        let h_span = (r.to_f64() / self.h.to_f64()).floor() as i64;
        for ti in ti_lo..=ti_hi {
            for hi in -h_span..=h_span {
                let p = CylinderPoint::new(
                    center.theta + S::from_int(ti) * self.theta_step,
                    center.height + S::from_int(hi) * self.h,
                );
                if self.dist(center, &p) <= r + self.eps {
                    if let Some(key) = self.grid_key(&p) {
                        if !seen.insert(key) {
                            continue;
                        }
                    }
                    out.push(p);
                }
            }
        }
        out
    }

    fn eps_mid(&self) -> S {
        self.eps
    }

    fn resolution(&self) -> S {
        self.h
    }

    fn point_key(&self, p: &CylinderPoint<S>) -> String {
        format!("{},{}", p.theta.key(), p.height.key())
    }

    fn point_json(&self, p: &CylinderPoint<S>) -> serde_json::Value {
        serde_json::json!({
            "kind": "cylinder",
            "theta": p.theta.to_f64(),
            "height": p.height.to_f64(),
        })
    }

    fn grid_key(&self, p: &CylinderPoint<S>) -> Option<GridKey> {
        let half_theta = self.theta_step.to_f64() / 2.0;
        let kt = super::quantize(p.theta.to_f64(), half_theta, 1e-9)?;
        let wrap = 2 * self.n_theta;
        let kt = kt.rem_euclid(wrap);
        let kh = super::quantize(p.height.to_f64(), self.h.to_f64() / 2.0, 1e-9)?;
        Some(vec![kt, kh])
    }

    fn approx_coords(&self, p: &CylinderPoint<S>) -> Vec<f64> {
        vec![p.theta.to_f64(), p.height.to_f64()]
    }

    fn approx_dist_lower(&self, a: &[f64], b: &[f64]) -> f64 {
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut dt = (a[0] - b[0]).rem_euclid(two_pi);
        if dt > std::f64::consts::PI {
            dt = two_pi - dt;
        }
        let dh = a[1] - b[1];
        (dt * dt + dh * dh).sqrt() * (1.0 - 1e-9) - 1e-9
    }
}
