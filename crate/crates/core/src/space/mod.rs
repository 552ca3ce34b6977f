//! Geodesic-metric-space abstraction and the concrete catalog spaces.
//!
//! Every space exposes exact distances, geodesic interpolation with
//! branch enumeration (non-uniquely-geodesic spaces have more than one
//! branch), full midpoint enumeration, ball sampling at the space's
//! resolution, and the separation-point construction. Solvers and
//! certification checks are generic over [`GeodesicSpace`].

use serde::Serialize;
use std::fmt::Debug;
use thiserror::Error;

use crate::scalar::Scalar;

mod cylinder;
mod euclidean;
mod halfline;
mod lattice;
mod tree;

pub use cylinder::{Cylinder, CylinderPoint};
pub use euclidean::{Euclidean, PNorm};
pub use halfline::HalfLine;
pub use lattice::{Lattice2, LatticePoint};
pub use tree::{Tree, TreePoint};

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("point outside space domain: {0}")]
    Domain(String),
    #[error("geodesic branch {branch} out of range ({count} available)")]
    BranchOutOfRange { branch: usize, count: usize },
    #[error("not resolvable at resolution h={h}: {detail}")]
    Resolution { h: String, detail: String },
    #[error("invalid space configuration: {0}")]
    Config(String),
}

/// Quantized identity of an on-grid point, used for O(1) field lookup.
pub type GridKey = Vec<i64>;

/// A complete geodesic metric space sampled at resolution `h`.
///
/// All operations are pure; spaces are immutable after construction and
/// safe to share across threads.
pub trait GeodesicSpace: Send + Sync {
    type S: Scalar;
    type P: Clone + Debug + PartialEq + Send + Sync + Serialize + 'static;

    fn contains(&self, p: &Self::P) -> Result<(), SpaceError>;

    /// Geodesic distance. Symmetric, triangle inequality, zero iff equal.
    fn dist(&self, x: &Self::P, y: &Self::P) -> Self::S;

    /// Number of enumerated geodesics joining `x` and `y` (>= 1).
    fn branch_count(&self, x: &Self::P, y: &Self::P) -> usize;

    /// Point at parameter `s` on the geodesic branch, so that
    /// `d(x, gamma(s)) = s * d(x, y)`.
    fn geodesic_point(
        &self,
        x: &Self::P,
        y: &Self::P,
        s: Self::S,
        branch: usize,
    ) -> Result<Self::P, SpaceError>;

    /// All midpoints of `x, y`, deduplicated at resolution `eps_mid`.
    fn midpoints(&self, x: &Self::P, y: &Self::P) -> Vec<Self::P>;

    /// Finite sample of the closed ball `B_r(center)` at resolution `h`.
    /// Always contains `center`; every ball point is within `h` of the set.
    fn ball_sample(&self, center: &Self::P, r: Self::S) -> Vec<Self::P>;

    fn eps_mid(&self) -> Self::S;

    /// Sampling resolution `h`.
    fn resolution(&self) -> Self::S;

    /// Canonical serialized form; doubles as the deterministic sort key.
    fn point_key(&self, p: &Self::P) -> String;

    /// Tagged JSON record for the point (`kind` plus coordinate fields;
    /// lattice dyadics as "num/2^m" strings).
    fn point_json(&self, p: &Self::P) -> serde_json::Value;

    /// Quantized key when `p` lies on the sampling grid, else `None`.
    fn grid_key(&self, p: &Self::P) -> Option<GridKey>;

    /// Cheap float coordinates for conservative distance prefilters.
    /// Paired with [`GeodesicSpace::approx_dist_lower`]; spaces without a
    /// useful bound return an empty vector.
    fn approx_coords(&self, _p: &Self::P) -> Vec<f64> {
        Vec::new()
    }

    /// A lower bound on the true distance computed from `approx_coords`
    /// output. Must never exceed the exact distance (conservative).
    fn approx_dist_lower(&self, _a: &[f64], _b: &[f64]) -> f64 {
        f64::NEG_INFINITY
    }

    /// Membership test for the midpoint set, up to `eps_mid`. Equality of
    /// the two half-distances already forces `z` onto a geodesic.
    fn is_midpoint(&self, x: &Self::P, y: &Self::P, z: &Self::P) -> bool {
        let half = self.dist(x, y).half();
        let eps = self.eps_mid();
        (self.dist(x, z) - half).abs() <= eps && (self.dist(y, z) - half).abs() <= eps
    }

    /// Separation point of Prop-style triple comparison: returns `w` with
    /// `d(x, w) <= d(y, z)` and `d(w, z) <= d(x, y)`, one with equality.
    /// Constructive: a point on the geodesic `x..y` when `d(x, y) >= d(y, z)`,
    /// else on `y..z`.
    fn separate(&self, x: &Self::P, y: &Self::P, z: &Self::P) -> Self::P {
        let dxy = self.dist(x, y);
        let dyz = self.dist(y, z);
        if dxy.total_cmp(&dyz) != std::cmp::Ordering::Less {
            if dxy.total_cmp(&Self::S::zero()) == std::cmp::Ordering::Equal {
                return x.clone();
            }
            let s = dyz / dxy;
            self.geodesic_point(x, y, s, 0)
                .expect("branch 0 always exists")
        } else {
            let s = Self::S::one() - dxy / dyz;
            self.geodesic_point(y, z, s, 0)
                .expect("branch 0 always exists")
        }
    }
}

/// Sorts points into the canonical (key-lexicographic) order.
pub fn canonical_sort<Sp: GeodesicSpace>(space: &Sp, points: &mut Vec<Sp::P>) {
    points.sort_by_key(|a| space.point_key(a));
    points.dedup_by(|a, b| space.point_key(a) == space.point_key(b));
}

/// Helper for float grids: quantize `x` against step `step/2`, returning
/// `None` when `x` is farther than `tol` from the half-step grid.
pub(crate) fn quantize(x: f64, half_step: f64, tol: f64) -> Option<i64> {
    let q = x / half_step;
    let k = q.round();
    if (q - k).abs() * half_step <= tol {
        Some(k as i64)
    } else {
        None
    }
}
