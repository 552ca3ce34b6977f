//! Named initial-datum presets and seeded convex preset families.
//!
//! Presets are plain evaluators plus a declared Lipschitz constant, so
//! experiments, config-driven solves and tests all agree on the exact
//! same data.

use crate::ext::Ext;
use crate::scalar::{Rat, RealScalar, Scalar};
use crate::space::{CylinderPoint, GeodesicSpace, LatticePoint, Tree, TreePoint};

/// Shared evaluator type for initial data.
pub type Evaluator<P, S> = Box<dyn Fn(&P) -> Ext<S> + Send + Sync>;

/// An evaluator bundled with its Lipschitz constant.
pub struct Preset<P, S> {
    pub name: String,
    pub eval: Evaluator<P, S>,
    pub lipschitz: S,
}

impl<P, S: Scalar> Preset<P, S> {
    pub fn new(
        name: &str,
        lipschitz: S,
        eval: impl Fn(&P) -> Ext<S> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Box::new(eval),
            lipschitz,
        }
    }
}

/// `u0 = c`.
pub fn constant<P: 'static, S: Scalar>(c: S) -> Preset<P, S> {
    Preset::new("constant", S::zero(), move |_| Ext::Finite(c))
}

/// `u0(x) = -x` on the half line.
pub fn neg_x<S: Scalar>() -> Preset<S, S> {
    Preset::new("neg_x", S::one(), |x: &S| Ext::Finite(-*x))
}

/// `u0(x) = |x|_p` distance to the origin on a p-norm space (dim 1: |x|).
pub fn abs_norm<S: RealScalar>(space: &crate::space::Euclidean<S>) -> Preset<Vec<S>, S> {
    let origin = vec![S::zero(); space.dim()];
    let space = space.clone();
    Preset::new("abs", S::one(), move |x: &Vec<S>| {
        Ext::Finite(space.dist(&origin, x))
    })
}

/// `u0 = x3` on the cylinder (the height coordinate).
pub fn height<S: RealScalar>() -> Preset<CylinderPoint<S>, S> {
    Preset::new("height", S::one(), |p: &CylinderPoint<S>| {
        Ext::Finite(p.height)
    })
}

/// `u0(x) = |x1| + |x2|` on the lattice.
pub fn norm1() -> Preset<LatticePoint, Rat> {
    Preset::new("norm1", Rat::one(), |p: &LatticePoint| {
        Ext::Finite(p.norm1())
    })
}

/// The quadrant product datum `(x1 + 1) x2` on the closed first
/// quadrant, extended by its positive part (`max((x1+1) x2, 0)`), which
/// is the continuous Lipschitz extension the 1-weak convexity claim
/// needs. The Lipschitz constant is `R + 1` on the `[-R, R]^2` patch.
pub fn quadrant_product(r: i64) -> Preset<LatticePoint, Rat> {
    Preset::new(
        "quadrant_product",
        Rat::from_int(r + 1),
        |p: &LatticePoint| {
            let v = (p.x1 + Rat::one()) * p.x2;
            Ext::Finite(v.max_s(Rat::zero()))
        },
    )
}

/// `u0 = d(., node)` on a tree.
pub fn dist_to_node<S: Scalar + serde::Serialize>(
    tree: &Tree<S>,
    node: usize,
) -> Preset<TreePoint<S>, S> {
    let anchor = tree.node_point(node);
    let tree = tree.clone();
    Preset::new("dist_to_center", S::one(), move |p: &TreePoint<S>| {
        Ext::Finite(tree.dist(&anchor, p))
    })
}

/// The cross-space datum: `-d(., center)` on arm 0, zero on the other
/// arms (the center is the junction node 0 of a star tree).
pub fn cross_ramp<S: Scalar + serde::Serialize>(tree: &Tree<S>) -> Preset<TreePoint<S>, S> {
    let center = tree.node_point(0);
    let tree = tree.clone();
    Preset::new("cross_ramp", S::one(), move |p: &TreePoint<S>| {
        if p.edge == 0 {
            Ext::Finite(-tree.dist(&center, p))
        } else {
            Ext::Finite(S::zero())
        }
    })
}

/// Seeded max-affine convex datum on a p-norm space: `max_j (<g_j, x> + b_j)`
/// with `|g_j|_2 <= 1`, so `K = 1` when `p = 2`.
pub fn seeded_max_affine<S: RealScalar>(dim: usize, seed: u64) -> Preset<Vec<S>, S> {
    let mut rng = crate::sampling::seeded(seed);
    let pieces = 3 + crate::sampling::pick(&mut rng, 3);
    let mut gs: Vec<Vec<f64>> = Vec::new();
    let mut bs: Vec<f64> = Vec::new();
    for _ in 0..pieces {
        let mut g: Vec<f64> = (0..dim)
            .map(|_| crate::sampling::uniform(&mut rng, -1.0, 1.0))
            .collect();
        let norm = g.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-9);
        let scale = crate::sampling::uniform(&mut rng, 0.2, 1.0) / norm;
        for c in &mut g {
            *c *= scale;
        }
        gs.push(g);
        bs.push(crate::sampling::uniform(&mut rng, -1.0, 1.0));
    }
    Preset::new(
        &format!("max_affine(seed={seed})"),
        S::one(),
        move |x: &Vec<S>| {
            let mut best = f64::NEG_INFINITY;
            for (g, b) in gs.iter().zip(&bs) {
                let v: f64 = g
                    .iter()
                    .zip(x)
                    .map(|(gi, xi)| gi * xi.to_f64())
                    .sum::<f64>()
                    + b;
                best = best.max(v);
            }
            Ext::Finite(S::from_f64_lossy(best))
        },
    )
}

/// Seeded convex datum on the cylinder: a max-affine function of the
/// height alone (every midpoint averages heights, so convexity in the
/// height gives strong geodesic convexity).
pub fn seeded_height_convex<S: RealScalar>(seed: u64) -> Preset<CylinderPoint<S>, S> {
    let mut rng = crate::sampling::seeded(seed);
    let pieces = 2 + crate::sampling::pick(&mut rng, 3);
    let params: Vec<(f64, f64)> = (0..pieces)
        .map(|_| {
            (
                crate::sampling::uniform(&mut rng, -1.0, 1.0),
                crate::sampling::uniform(&mut rng, -1.0, 1.0),
            )
        })
        .collect();
    Preset::new(
        &format!("height_convex(seed={seed})"),
        S::one(),
        move |p: &CylinderPoint<S>| {
            let h = p.height.to_f64();
            let best = params
                .iter()
                .map(|(a, b)| a * h + b)
                .fold(f64::NEG_INFINITY, f64::max);
            Ext::Finite(S::from_f64_lossy(best))
        },
    )
}

/// Seeded convex datum on a tree: `max_j (a_j d(., q_j) + b_j)` with
/// `a_j in [0, 1]` (distance functions are geodesically convex on
/// Busemann spaces, and nonnegative maxima preserve that).
pub fn seeded_tree_convex<S: Scalar + serde::Serialize>(
    tree: &Tree<S>,
    seed: u64,
) -> Preset<TreePoint<S>, S> {
    let mut rng = crate::sampling::seeded(seed);
    let anchors = tree.patch();
    let pieces = 2 + crate::sampling::pick(&mut rng, 3);
    let params: Vec<(TreePoint<S>, f64, f64)> = (0..pieces)
        .map(|_| {
            (
                anchors[crate::sampling::pick(&mut rng, anchors.len())].clone(),
                crate::sampling::uniform(&mut rng, 0.0, 1.0),
                crate::sampling::uniform(&mut rng, -1.0, 1.0),
            )
        })
        .collect();
    let tree = tree.clone();
    Preset::new(
        &format!("tree_convex(seed={seed})"),
        S::one(),
        move |p: &TreePoint<S>| {
            let best = params
                .iter()
                .map(|(q, a, b)| a * tree.dist(p, q).to_f64() + b)
                .fold(f64::NEG_INFINITY, f64::max);
            Ext::Finite(S::from_f64_lossy(best))
        },
    )
}
