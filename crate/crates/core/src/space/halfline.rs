//! The half line `[0, inf)` with the Euclidean metric.

use super::{GeodesicSpace, GridKey, SpaceError};
use crate::scalar::Scalar;
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct HalfLine<S: Scalar> {
    h: S,
    eps: S,
}

impl<S: Scalar + Serialize> HalfLine<S> {
    pub fn new(h: S, eps: S) -> Result<Self, SpaceError> {
        if h.total_cmp(&S::zero()) != std::cmp::Ordering::Greater {
            return Err(SpaceError::Config("h must be positive".into()));
        }
        Ok(Self { h, eps })
    }

    /// Grid points of `[0, hi]` at spacing `h`, in increasing order.
    /// The upper bound is compared with `eps_mid` slack so that float
    /// grids like `1000 * 0.01` still include their right endpoint.
    pub fn patch(&self, hi: S) -> Vec<S> {
        let mut out = Vec::new();
        let mut i = 0i64;
        loop {
            let x = S::from_int(i) * self.h;
            if x.total_cmp(&(hi + self.eps)) == std::cmp::Ordering::Greater {
                break;
            }
            out.push(x);
            i += 1;
        }
        out
    }
}

impl<S: Scalar + Serialize> GeodesicSpace for HalfLine<S> {
    type S = S;
    type P = S;

    fn contains(&self, p: &S) -> Result<(), SpaceError> {
        if p.total_cmp(&S::zero()) == std::cmp::Ordering::Less {
            return Err(SpaceError::Domain(format!("x = {p} < 0")));
        }
        Ok(())
    }

    fn dist(&self, x: &S, y: &S) -> S {
        (*x - *y).abs()
    }

    fn branch_count(&self, _x: &S, _y: &S) -> usize {
        1
    }

    fn geodesic_point(&self, x: &S, y: &S, s: S, branch: usize) -> Result<S, SpaceError> {
        if branch != 0 {
            return Err(SpaceError::BranchOutOfRange { branch, count: 1 });
        }
        Ok(*x + s * (*y - *x))
    }

    fn midpoints(&self, x: &S, y: &S) -> Vec<S> {
        vec![(*x + *y).half()]
    }

    fn ball_sample(&self, center: &S, r: S) -> Vec<S> {
        let mut out = Vec::new();
        let lo_steps = -(r / self.h).floor_int();
        let hi_steps = (r / self.h).floor_int();
        for i in lo_steps..=hi_steps {
            let x = *center + S::from_int(i) * self.h;
            if x.total_cmp(&S::zero()) != std::cmp::Ordering::Less {
                out.push(x);
            }
        }
        if out.is_empty() {
            out.push(*center);
        }
        out
    }

    fn eps_mid(&self) -> S {
        self.eps
    }

    fn resolution(&self) -> S {
        self.h
    }

    fn point_key(&self, p: &S) -> String {
        p.key()
    }

    fn point_json(&self, p: &S) -> serde_json::Value {
        serde_json::json!({ "kind": "halfline", "x": p.to_f64() })
    }

    fn grid_key(&self, p: &S) -> Option<GridKey> {
        if S::EXACT {
            let q = *p / self.h.half();
            if q.is_integer() {
                return Some(vec![q.floor_int()]);
            }
            return None;
        }
        let k = super::quantize(p.to_f64(), self.h.to_f64() / 2.0, 1e-9)?;
        Some(vec![k])
    }

    fn approx_coords(&self, p: &S) -> Vec<f64> {
        vec![p.to_f64()]
    }

    fn approx_dist_lower(&self, a: &[f64], b: &[f64]) -> f64 {
        (a[0] - b[0]).abs() * (1.0 - 1e-9) - 1e-9
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> HalfLine<f64> {
        HalfLine::new(0.5, 1e-9).unwrap()
    }

    #[test]
    fn ball_sample_interval_grid() {
        // center 3, r = 1, h = 0.5 -> {2, 2.5, 3, 3.5, 4}
        let s = line();
        let ball = s.ball_sample(&3.0, 1.0);
        assert_eq!(ball, vec![2.0, 2.5, 3.0, 3.5, 4.0]);
    }

    #[test]
    fn ball_sample_zero_radius() {
        let s = line();
        assert_eq!(s.ball_sample(&3.0, 0.0), vec![3.0]);
    }

    #[test]
    fn ball_clipped_at_origin() {
        let s = line();
        let ball = s.ball_sample(&0.5, 1.0);
        assert_eq!(ball, vec![0.0, 0.5, 1.0, 1.5]);
    }

    #[test]
    fn separation_point_halfline() {
        // x=0, y=1, z=3 -> w=2 with d(w,z)=1=d(x,y), d(x,w)=2=d(y,z).
        let s = line();
        let w = s.separate(&0.0, &1.0, &3.0);
        assert_eq!(w, 2.0);
        // degenerate triple
        assert_eq!(s.separate(&1.0, &1.0, &1.0), 1.0);
    }

    #[test]
    fn midpoint_and_geodesic() {
        let s = line();
        assert_eq!(s.midpoints(&1.0, &3.0), vec![2.0]);
        assert_eq!(s.geodesic_point(&1.0, &3.0, 0.25, 0).unwrap(), 1.5);
        assert!(s.geodesic_point(&1.0, &3.0, 0.5, 1).is_err());
    }

    #[test]
    fn domain_check() {
        let s = line();
        assert!(s.contains(&-0.1).is_err());
        assert!(s.contains(&0.0).is_ok());
    }
}
