//! Sampled scalar fields: finite maps from sample points to extended
//! reals. These carry both initial data `u0` and solution slices
//! `u(., t)`.

use std::collections::HashMap;

use crate::ext::Ext;
use crate::scalar::Scalar;
use crate::space::{GeodesicSpace, GridKey};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("field has no sample points")]
    Empty,
    #[error("declared Lipschitz constant {declared} violated: |f({a}) - f({b})| = {diff} over distance {dist}")]
    LipschitzViolated {
        declared: String,
        a: String,
        b: String,
        diff: String,
        dist: String,
    },
    #[error("sample point rejected: {0}")]
    BadPoint(String),
}

/// A finite sampled function on a geodesic space.
///
/// Sample points are stored in canonical (key-sorted) order so that
/// every downstream reduction is deterministic.
pub struct ScalarField<'a, Sp: GeodesicSpace> {
    pub space: &'a Sp,
    points: Vec<Sp::P>,
    values: Vec<Ext<Sp::S>>,
    lipschitz: Option<Sp::S>,
    index: HashMap<GridKey, usize>,
}

impl<'a, Sp: GeodesicSpace> ScalarField<'a, Sp> {
    /// Builds a field by evaluating `f` on `points`, sorting canonically.
    pub fn from_fn(
        space: &'a Sp,
        mut points: Vec<Sp::P>,
        f: impl Fn(&Sp::P) -> Ext<Sp::S>,
        lipschitz: Option<Sp::S>,
    ) -> Result<Self, FieldError> {
        if points.is_empty() {
            return Err(FieldError::Empty);
        }
        crate::space::canonical_sort(space, &mut points);
        let values = points.iter().map(&f).collect();
        Self::from_sorted(space, points, values, lipschitz)
    }

    /// Builds a field from parallel point/value arrays already in
    /// canonical order (used by the solver to keep order stable).
    pub fn from_sorted(
        space: &'a Sp,
        points: Vec<Sp::P>,
        values: Vec<Ext<Sp::S>>,
        lipschitz: Option<Sp::S>,
    ) -> Result<Self, FieldError> {
        assert_eq!(points.len(), values.len());
        if points.is_empty() {
            return Err(FieldError::Empty);
        }
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            space
                .contains(p)
                .map_err(|e| FieldError::BadPoint(e.to_string()))?;
            if let Some(key) = space.grid_key(p) {
                index.insert(key, i);
            }
        }
        Ok(Self {
            space,
            points,
            values,
            lipschitz,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Sp::P] {
        &self.points
    }

    pub fn values(&self) -> &[Ext<Sp::S>] {
        &self.values
    }

    pub fn point(&self, i: usize) -> &Sp::P {
        &self.points[i]
    }

    pub fn value(&self, i: usize) -> Ext<Sp::S> {
        self.values[i]
    }

    pub fn lipschitz(&self) -> Option<Sp::S> {
        self.lipschitz
    }

    pub fn with_lipschitz(mut self, k: Sp::S) -> Self {
        self.lipschitz = Some(k);
        self
    }

    /// Index of the sample exactly at `p` (on-grid lookup).
    pub fn index_of(&self, p: &Sp::P) -> Option<usize> {
        let key = self.space.grid_key(p)?;
        self.index.get(&key).copied()
    }

    /// Value at `p`, or the value at the nearest sample within `h` of `p`
    /// when `p` is off-grid. `None` if nothing is that close.
    pub fn value_near(&self, p: &Sp::P) -> Option<(usize, Ext<Sp::S>)> {
        if let Some(i) = self.index_of(p) {
            return Some((i, self.values[i]));
        }
        let h = self.space.resolution();
        let mut best: Option<(usize, Sp::S)> = None;
        for (i, q) in self.points.iter().enumerate() {
            let d = self.space.dist(p, q);
            if d.total_cmp(&h) != std::cmp::Ordering::Greater {
                let better = match &best {
                    None => true,
                    Some((_, bd)) => d.total_cmp(bd) == std::cmp::Ordering::Less,
                };
                if better {
                    best = Some((i, d));
                }
            }
        }
        best.map(|(i, _)| (i, self.values[i]))
    }

    /// Validates the declared Lipschitz constant on sampled pairs with
    /// the discretization slack `2 h K`.
    pub fn validate_lipschitz(&self, pair_budget: usize, seed: u64) -> Result<(), FieldError> {
        let Some(k) = self.lipschitz else {
            return Ok(());
        };
        let slack = self.space.resolution() * k * Sp::S::from_int(2);
        let n = self.points.len();
        let mut rng = crate::sampling::seeded(seed);
        for _ in 0..pair_budget {
            let i = crate::sampling::pick(&mut rng, n);
            let j = crate::sampling::pick(&mut rng, n);
            if i == j {
                continue;
            }
            let (Ext::Finite(vi), Ext::Finite(vj)) = (self.values[i], self.values[j]) else {
                continue;
            };
            let d = self.space.dist(&self.points[i], &self.points[j]);
            let diff = (vi - vj).abs();
            if diff.total_cmp(&(k * d + slack)) == std::cmp::Ordering::Greater {
                return Err(FieldError::LipschitzViolated {
                    declared: format!("{k}"),
                    a: self.space.point_key(&self.points[i]),
                    b: self.space.point_key(&self.points[j]),
                    diff: format!("{diff}"),
                    dist: format!("{d}"),
                });
            }
        }
        Ok(())
    }

    /// Empirical Lipschitz constant over seeded sampled pairs.
    pub fn lipschitz_estimate(&self, pair_budget: usize, seed: u64) -> Sp::S {
        let n = self.points.len();
        let mut rng = crate::sampling::seeded(seed);
        let mut best = Sp::S::zero();
        for _ in 0..pair_budget {
            let i = crate::sampling::pick(&mut rng, n);
            let j = crate::sampling::pick(&mut rng, n);
            if i == j {
                continue;
            }
            let (Ext::Finite(vi), Ext::Finite(vj)) = (self.values[i], self.values[j]) else {
                continue;
            };
            let d = self.space.dist(&self.points[i], &self.points[j]);
            if d.total_cmp(&Sp::S::zero()) == std::cmp::Ordering::Greater {
                best = best.max_s((vi - vj).abs() / d);
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::HalfLine;

    #[test]
    fn canonical_order_and_lookup() {
        let line = HalfLine::new(0.5f64, 1e-9).unwrap();
        let pts = vec![1.0, 0.0, 0.5, 1.5];
        let f = ScalarField::from_fn(&line, pts, |x| Ext::Finite(-x), Some(1.0)).unwrap();
        assert_eq!(f.len(), 4);
        let i = f.index_of(&1.0).unwrap();
        assert_eq!(f.value(i), Ext::Finite(-1.0));
        assert!(f.index_of(&0.25).is_none());
        f.validate_lipschitz(500, 7).unwrap();
    }

    #[test]
    fn value_near_falls_back_to_nearest_sample() {
        let line = HalfLine::new(0.5f64, 1e-9).unwrap();
        let pts = vec![0.0, 0.5, 1.0];
        let f = ScalarField::from_fn(&line, pts, |x| Ext::Finite(*x), None).unwrap();
        // off-grid query within h resolves to the nearest sample
        let (i, v) = f.value_near(&0.6).unwrap();
        assert_eq!(*f.point(i), 0.5);
        assert_eq!(v, Ext::Finite(0.5));
        // far outside the sampled range: nothing within h
        assert!(f.value_near(&3.0).is_none());
    }

    #[test]
    fn lipschitz_violation_detected() {
        let line = HalfLine::new(0.5f64, 1e-9).unwrap();
        let pts = vec![0.0, 0.5, 1.0];
        let f = ScalarField::from_fn(
            &line,
            pts,
            |x| Ext::Finite(if *x > 0.7 { 100.0 } else { 0.0 }),
            Some(1.0),
        )
        .unwrap();
        assert!(f.validate_lipschitz(500, 7).is_err());
    }

    #[test]
    fn lipschitz_estimate_of_norm() {
        let line = HalfLine::new(0.25f64, 1e-9).unwrap();
        let pts = line.patch(5.0);
        let f = ScalarField::from_fn(&line, pts, |x| Ext::Finite(*x), None).unwrap();
        let k = f.lipschitz_estimate(2000, 3);
        assert!((k - 1.0).abs() < 1e-12);
        let c = ScalarField::from_fn(&line, line.patch(5.0), |_| Ext::Finite(2.0), None).unwrap();
        assert_eq!(c.lipschitz_estimate(2000, 3), 0.0);
    }
}
