//! Extended-real values: finite scalars plus the two infinities.
//!
//! Infinite values carry the eikonal case through the same solver as
//! coercive Hamiltonians: a `+inf` candidate simply never wins an
//! infimum, and a `-inf` one never wins a supremum.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Ext<S> {
    NegInf,
    Finite(S),
    PosInf,
}

impl<S: Scalar> Ext<S> {
    pub fn finite(self) -> Option<S> {
        match self {
            Ext::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    pub fn expect_finite(self, what: &str) -> S {
        match self {
            Ext::Finite(v) => v,
            other => panic!("{what}: expected finite value, got {other}"),
        }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ext::NegInf, Ext::NegInf) | (Ext::PosInf, Ext::PosInf) => Ordering::Equal,
            (Ext::NegInf, _) | (_, Ext::PosInf) => Ordering::Less,
            (_, Ext::NegInf) | (Ext::PosInf, _) => Ordering::Greater,
            (Ext::Finite(a), Ext::Finite(b)) => a.total_cmp(b),
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Ext::Finite(v) => v.to_f64(),
            Ext::PosInf => f64::INFINITY,
            Ext::NegInf => f64::NEG_INFINITY,
        }
    }
}

/// Addition with the convention needed by `u0(a) + t L(...)`: any
/// infinite operand dominates (opposite infinities never meet in the
/// solver because infinite costs are filtered first).
impl<S: Scalar> std::ops::Add for Ext<S> {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a + b),
            (Ext::PosInf, _) | (_, Ext::PosInf) => Ext::PosInf,
            (Ext::NegInf, _) | (_, Ext::NegInf) => Ext::NegInf,
        }
    }
}

impl<S: Scalar> std::ops::Neg for Ext<S> {
    type Output = Self;

    fn neg(self) -> Self {
        match self {
            Ext::Finite(a) => Ext::Finite(-a),
            Ext::PosInf => Ext::NegInf,
            Ext::NegInf => Ext::PosInf,
        }
    }
}

impl<S: fmt::Display> fmt::Display for Ext<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(v) => write!(f, "{v}"),
            Ext::PosInf => write!(f, "inf"),
            Ext::NegInf => write!(f, "-inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_arithmetic() {
        let a: Ext<f64> = Ext::Finite(1.0);
        assert_eq!(a.total_cmp(&Ext::PosInf), Ordering::Less);
        assert_eq!(Ext::<f64>::NegInf.total_cmp(&a), Ordering::Less);
        assert_eq!(a + Ext::Finite(2.0), Ext::Finite(3.0));
        assert_eq!(a + Ext::PosInf, Ext::PosInf);
        assert_eq!(-Ext::<f64>::PosInf, Ext::NegInf);
    }
}
