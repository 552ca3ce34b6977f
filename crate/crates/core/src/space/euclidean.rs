//! `R^n` with a p-norm, `1 < p <= inf`.
//!
//! For `1 < p < inf` the norm is strictly convex, so geodesics are the
//! straight segments and midpoint sets are singletons (these are the
//! Busemann members of the catalog). For `p = inf` the segment is still
//! a geodesic but not the only one; enumeration is restricted to the
//! canonical segment.

use super::{GeodesicSpace, GridKey, SpaceError};
use crate::scalar::RealScalar;

#[derive(Clone, Debug)]
pub enum PNorm<S> {
    Finite(S),
    Infinity,
}

#[derive(Clone, Debug)]
pub struct Euclidean<S: RealScalar> {
    dim: usize,
    p: PNorm<S>,
    h: S,
    eps: S,
}

impl<S: RealScalar> Euclidean<S> {
    pub fn new(dim: usize, p: PNorm<S>, h: S, eps: S) -> Result<Self, SpaceError> {
        if dim == 0 {
            return Err(SpaceError::Config("dimension must be >= 1".into()));
        }
        if let PNorm::Finite(p) = &p {
            if p.total_cmp(&S::one()) != std::cmp::Ordering::Greater {
                return Err(SpaceError::Config("p must satisfy p > 1".into()));
            }
        }
        if h <= S::zero() {
            return Err(SpaceError::Config("h must be positive".into()));
        }
        Ok(Self { dim, p, h, eps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn norm(&self, v: &[S]) -> S {
        match &self.p {
            PNorm::Infinity => v.iter().map(|c| c.abs()).fold(S::zero(), |a, b| a.max_s(b)),
            PNorm::Finite(p) => {
                if self.dim == 1 {
                    return v[0].abs();
                }
                if *p == S::from_int(2) {
                    return v
                        .iter()
                        .map(|c| *c * *c)
                        .fold(S::zero(), |a, b| a + b)
                        .sqrt();
                }
                let sum = v
                    .iter()
                    .map(|c| c.abs().powf(*p))
                    .fold(S::zero(), |a, b| a + b);
                sum.powf(S::one() / *p)
            }
        }
    }

    /// Rectangular grid of the box at spacing `h`, canonical order.
    pub fn patch(&self, lo: &[S], hi: &[S]) -> Vec<Vec<S>> {
        assert_eq!(lo.len(), self.dim);
        assert_eq!(hi.len(), self.dim);
        let mut axes: Vec<Vec<S>> = Vec::new();
        for d in 0..self.dim {
            // Grid multiples of h covering [lo, hi].
            let mut axis = Vec::new();
            let mut i = (lo[d].to_f64() / self.h.to_f64()).floor() as i64 - 1;
            loop {
                let x = S::from_int(i) * self.h;
                if x > hi[d] + self.eps {
                    break;
                }
                if x >= lo[d] - self.eps {
                    axis.push(x);
                }
                i += 1;
            }
            axes.push(axis);
        }
        let mut out: Vec<Vec<S>> = vec![vec![]];
        for axis in &axes {
            let mut next = Vec::with_capacity(out.len() * axis.len());
            for partial in &out {
                for &x in axis {
                    let mut v = partial.clone();
                    v.push(x);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }
}

impl<S: RealScalar> GeodesicSpace for Euclidean<S> {
    type S = S;
    type P = Vec<S>;

    fn contains(&self, p: &Vec<S>) -> Result<(), SpaceError> {
        if p.len() != self.dim {
            return Err(SpaceError::Domain(format!(
                "expected {} coordinates, got {}",
                self.dim,
                p.len()
            )));
        }
        Ok(())
    }

    fn dist(&self, x: &Vec<S>, y: &Vec<S>) -> S {
        let diff: Vec<S> = x.iter().zip(y).map(|(a, b)| *a - *b).collect();
        self.norm(&diff)
    }

    fn branch_count(&self, _x: &Vec<S>, _y: &Vec<S>) -> usize {
        1
    }

    fn geodesic_point(
        &self,
        x: &Vec<S>,
        y: &Vec<S>,
        s: S,
        branch: usize,
    ) -> Result<Vec<S>, SpaceError> {
        if branch != 0 {
            return Err(SpaceError::BranchOutOfRange { branch, count: 1 });
        }
        Ok(x.iter().zip(y).map(|(a, b)| *a + s * (*b - *a)).collect())
    }

    fn midpoints(&self, x: &Vec<S>, y: &Vec<S>) -> Vec<Vec<S>> {
        vec![x.iter().zip(y).map(|(a, b)| (*a + *b).half()).collect()]
    }

    fn ball_sample(&self, center: &Vec<S>, r: S) -> Vec<Vec<S>> {
        let steps = (r / self.h).floor_int();
        let mut out = Vec::new();
        let mut idx = vec![-steps; self.dim];
        'outer: loop {
            let p: Vec<S> = center
                .iter()
                .zip(&idx)
                .map(|(c, i)| *c + S::from_int(*i) * self.h)
                .collect();
            if self.dist(center, &p) <= r + self.eps {
                out.push(p);
            }
            for slot in idx.iter_mut() {
                *slot += 1;
                if *slot <= steps {
                    continue 'outer;
                }
                *slot = -steps;
            }
            break;
        }
        out
    }

    fn eps_mid(&self) -> S {
        self.eps
    }

    fn resolution(&self) -> S {
        self.h
    }

    fn point_key(&self, p: &Vec<S>) -> String {
        p.iter().map(|c| c.key()).collect::<Vec<_>>().join(",")
    }

    fn point_json(&self, p: &Vec<S>) -> serde_json::Value {
        serde_json::json!({
            "kind": "euclidean",
            "coords": p.iter().map(|c| c.to_f64()).collect::<Vec<_>>(),
        })
    }

    fn grid_key(&self, p: &Vec<S>) -> Option<GridKey> {
        let half = self.h.to_f64() / 2.0;
        p.iter()
            .map(|c| super::quantize(c.to_f64(), half, 1e-9))
            .collect()
    }

    fn approx_coords(&self, p: &Vec<S>) -> Vec<f64> {
        p.iter().map(|c| c.to_f64()).collect()
    }

    fn approx_dist_lower(&self, a: &[f64], b: &[f64]) -> f64 {
        let d = match &self.p {
            PNorm::Infinity => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max),
            PNorm::Finite(p) => {
                let p = p.to_f64();
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x - y).abs().powf(p))
                    .sum::<f64>()
                    .powf(1.0 / p)
            }
        };
        d * (1.0 - 1e-9) - 1e-9
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::GeodesicSpace;

    fn plane(p: f64) -> Euclidean<f64> {
        Euclidean::new(2, PNorm::Finite(p), 0.25, 1e-9).unwrap()
    }

    #[test]
    fn l2_distance_and_midpoint() {
        let e = plane(2.0);
        let x = vec![0.0, 0.0];
        let y = vec![2.0, 0.0];
        assert!((e.dist(&x, &y) - 2.0).abs() < 1e-12);
        assert_eq!(e.geodesic_point(&x, &y, 0.5, 0).unwrap(), vec![1.0, 0.0]);
        assert_eq!(e.midpoints(&x, &y), vec![vec![1.0, 0.0]]);
    }

    #[test]
    fn p_norm_values() {
        let e = plane(3.0);
        let d = e.dist(&vec![0.0, 0.0], &vec![1.0, 1.0]);
        assert!((d - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
        let e15 = plane(1.5);
        let d = e15.dist(&vec![0.0, 0.0], &vec![1.0, 1.0]);
        assert!((d - 2f64.powf(1.0 / 1.5)).abs() < 1e-12);
    }

    #[test]
    fn linf_distance() {
        let e = Euclidean::new(2, PNorm::<f64>::Infinity, 0.25, 1e-9).unwrap();
        assert!((e.dist(&vec![0.0, 0.0], &vec![1.0, 3.0]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn separation_point_dim1() {
        // x=0, y=2, z=3 -> w=1 on the geodesic x..y, d(x,w)=1=d(y,z).
        let e = Euclidean::new(1, PNorm::Finite(2.0), 0.25, 1e-9).unwrap();
        let w = e.separate(&vec![0.0], &vec![2.0], &vec![3.0]);
        assert_eq!(w, vec![1.0]);
    }

    #[test]
    fn ball_sample_covers_and_contains_center() {
        let e = plane(2.0);
        let c = vec![1.0, 1.0];
        let ball = e.ball_sample(&c, 0.5);
        assert!(ball.iter().any(|p| p == &c));
        for p in &ball {
            assert!(e.dist(&c, p) <= 0.5 + 1e-9);
        }
        // axis extremes present when r is a grid multiple
        assert!(ball.iter().any(|p| p == &vec![1.5, 1.0]));
        assert!(ball.iter().any(|p| p == &vec![1.0, 0.5]));
    }

    #[test]
    fn patch_grid() {
        let e = Euclidean::new(1, PNorm::Finite(2.0), 0.5, 1e-9).unwrap();
        let pts = e.patch(&[0.0], &[2.0]);
        assert_eq!(pts.len(), 5);
        assert_eq!(pts[0], vec![0.0]);
        assert_eq!(pts[4], vec![2.0]);
    }

    #[test]
    fn rejects_bad_p() {
        assert!(Euclidean::<f64>::new(2, PNorm::Finite(1.0), 0.25, 1e-9).is_err());
        assert!(Euclidean::<f64>::new(0, PNorm::Finite(2.0), 0.25, 1e-9).is_err());
    }
}
