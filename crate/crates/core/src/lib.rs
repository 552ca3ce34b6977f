//! Hopf-Lax solvers for first-order Hamilton-Jacobi equations on
//! complete geodesic metric spaces, with certification of convexity
//! notions and Busemann-type curvature conditions.
//!
//! The crate is organized around a small set of ideas:
//!
//! * [`space`]: the geodesic-space abstraction and the concrete catalog
//!   (Euclidean p-norm spaces, the half line, the flat cylinder, finite
//!   metric trees, and the 2-D lattice graph in exact rational
//!   arithmetic).
//! * [`hamiltonian`]: Hamiltonians `H`, Legendre conjugates `L`, and
//!   the finite propagation speed bound.
//! * [`solve`]: the Hopf-Lax inf/sup operators, the eikonal special
//!   case, dynamic-programming and grid-residual consistency checks,
//!   and the `p^alpha/alpha` approximation family.
//! * [`convexity`] and [`structure`]: certification of weak/strong
//!   geodesic convexity, infinity-subharmoniousness, pointwise
//!   convexity, lattice rigidity, and the Busemann 3-/4-point and
//!   uniform NPC conditions.
//! * [`experiments`]: the registered golden experiments behind the CLI.
//!
//! Core math is generic over the scalar type: continuous spaces run on
//! `f64` (or `f32`), the lattice on exact rationals ([`Rat`]).

pub mod convexity;
pub mod ext;
pub mod field;
pub mod hamiltonian;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod solve;
pub mod space;
pub mod structure;

pub mod config;
pub mod experiments;
pub mod presets;

pub use ext::Ext;
pub use scalar::{Rat, RealScalar, Scalar};

/// Default floating-point scalar.
pub type Real = f64;

/// The catalog spaces at their default scalar types.
pub type EuclideanR = space::Euclidean<Real>;
pub type HalfLineR = space::HalfLine<Real>;
pub type CylinderR = space::Cylinder<Real>;
pub type TreeR = space::Tree<Real>;
pub use space::Lattice2;
