//! Property tests for the space catalog and the conjugate machinery:
//! metric axioms, the constant-speed geodesic property, midpoint/branch
//! consistency, the separation-point postcondition, and Fenchel-Young.

use proptest::prelude::*;

use hopflax::hamiltonian::{legendre, Hamiltonian, DEFAULT_N_L};
use hopflax::scalar::{Rat, Scalar};
use hopflax::space::*;

// ------------------------------------------------------------------
// point strategies
// ------------------------------------------------------------------

fn euclid2() -> Euclidean<f64> {
    Euclidean::new(2, PNorm::Finite(2.0), 0.25, 1e-9).unwrap()
}

fn euclid_p(p: f64) -> Euclidean<f64> {
    Euclidean::new(2, PNorm::Finite(p), 0.25, 1e-9).unwrap()
}

fn cylinder() -> Cylinder<f64> {
    Cylinder::new(0.125, 1e-9).unwrap()
}

fn star() -> Tree<f64> {
    Tree::star(3, 2.0, 0.25, 1e-9).unwrap()
}

fn lattice() -> Lattice2 {
    Lattice2::new(Rat::from_ratio(1, 4)).unwrap()
}

prop_compose! {
    fn euclid_point()(x in -5.0f64..5.0, y in -5.0f64..5.0) -> Vec<f64> {
        vec![x, y]
    }
}

prop_compose! {
    fn halfline_point()(x in 0.0f64..10.0) -> f64 { x }
}

prop_compose! {
    fn cylinder_point()(theta in 0.0f64..6.28, h in -3.0f64..3.0) -> CylinderPoint<f64> {
        CylinderPoint::new(theta, h)
    }
}

prop_compose! {
    fn tree_point()(edge in 0usize..3, num in 0i64..=16) -> TreePoint<f64> {
        TreePoint { edge, offset: num as f64 * 2.0 / 16.0 }
    }
}

prop_compose! {
    fn lattice_point()(vertical in any::<bool>(), int in -6i64..=6, num in -96i64..=96) -> LatticePoint {
        // one coordinate integral, the other dyadic with denominator 16
        let frac = Rat::from_ratio(num, 16);
        if vertical {
            LatticePoint::new(Rat::from_int(int), frac)
        } else {
            LatticePoint::new(frac, Rat::from_int(int))
        }
    }
}

// ------------------------------------------------------------------
// shared property bodies
// ------------------------------------------------------------------

fn metric_axioms<Sp: GeodesicSpace>(space: &Sp, x: &Sp::P, y: &Sp::P, z: &Sp::P, tol: f64) {
    let dxy = space.dist(x, y);
    let dyx = space.dist(y, x);
    assert_eq!(
        dxy.total_cmp(&dyx),
        std::cmp::Ordering::Equal,
        "symmetry must be exact"
    );
    assert!(space.dist(x, x).to_f64() == 0.0, "d(x,x) = 0");
    let dxz = space.dist(x, z);
    let dzy = space.dist(z, y);
    assert!(
        dxy.to_f64() <= dxz.to_f64() + dzy.to_f64() + tol,
        "triangle inequality: d(x,y)={} > {} + {}",
        dxy.to_f64(),
        dxz.to_f64(),
        dzy.to_f64()
    );
}

fn geodesic_speed<Sp: GeodesicSpace>(space: &Sp, x: &Sp::P, y: &Sp::P, s: f64, t: f64) {
    let d = space.dist(x, y);
    let eps = space.eps_mid().to_f64().max(1e-9);
    for branch in 0..space.branch_count(x, y) {
        let gs = space
            .geodesic_point(x, y, Sp::S::from_f64_lossy(s), branch)
            .unwrap();
        let gt = space
            .geodesic_point(x, y, Sp::S::from_f64_lossy(t), branch)
            .unwrap();
        let expect = (s - t).abs() * d.to_f64();
        let got = space.dist(&gs, &gt).to_f64();
        assert!(
            (got - expect).abs() <= eps + 1e-9 * (1.0 + expect),
            "constant speed violated: |{got} - {expect}|"
        );
    }
}

fn midpoints_consistent<Sp: GeodesicSpace>(space: &Sp, x: &Sp::P, y: &Sp::P) {
    let d = space.dist(x, y);
    let eps = space.eps_mid().to_f64().max(1e-9);
    let mids = space.midpoints(x, y);
    assert!(!mids.is_empty(), "midpoint sets are nonempty");
    let half = Sp::S::from_ratio(1, 2);
    for z in &mids {
        // defining property
        assert!((space.dist(x, z).to_f64() - d.to_f64() / 2.0).abs() <= eps);
        assert!((space.dist(y, z).to_f64() - d.to_f64() / 2.0).abs() <= eps);
        // every midpoint is hit by some geodesic branch at s = 1/2
        let hit = (0..space.branch_count(x, y)).any(|b| {
            space
                .geodesic_point(x, y, half, b)
                .map(|g| space.dist(&g, z).to_f64() <= eps)
                .unwrap_or(false)
        });
        assert!(hit, "midpoint not represented by any branch");
    }
}

fn separate_postcondition<Sp: GeodesicSpace>(space: &Sp, x: &Sp::P, y: &Sp::P, z: &Sp::P) {
    let eps = space.eps_mid().to_f64().max(1e-9);
    let w = space.separate(x, y, z);
    let dxw = space.dist(x, &w).to_f64();
    let dwz = space.dist(&w, z).to_f64();
    let dyz = space.dist(y, z).to_f64();
    let dxy = space.dist(x, y).to_f64();
    assert!(dxw <= dyz + eps, "d(x,w)={dxw} > d(y,z)={dyz}");
    assert!(dwz <= dxy + eps, "d(w,z)={dwz} > d(x,y)={dxy}");
    // one of the two holds with equality
    assert!(
        (dxw - dyz).abs() <= eps || (dwz - dxy).abs() <= eps,
        "no equality branch: {dxw} vs {dyz}, {dwz} vs {dxy}"
    );
}

// ------------------------------------------------------------------
// per-space instantiations
// ------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn euclid_metric_axioms(x in euclid_point(), y in euclid_point(), z in euclid_point()) {
        metric_axioms(&euclid2(), &x, &y, &z, 1e-12);
        metric_axioms(&euclid_p(1.5), &x, &y, &z, 1e-12);
        metric_axioms(&euclid_p(3.0), &x, &y, &z, 1e-12);
    }

    #[test]
    fn euclid_geodesics(x in euclid_point(), y in euclid_point(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        geodesic_speed(&euclid2(), &x, &y, s, t);
        midpoints_consistent(&euclid2(), &x, &y);
    }

    #[test]
    fn euclid_separation(x in euclid_point(), y in euclid_point(), z in euclid_point()) {
        separate_postcondition(&euclid2(), &x, &y, &z);
    }

    #[test]
    fn halfline_properties(x in halfline_point(), y in halfline_point(), z in halfline_point(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let line = HalfLine::new(0.25f64, 1e-9).unwrap();
        metric_axioms(&line, &x, &y, &z, 1e-12);
        geodesic_speed(&line, &x, &y, s, t);
        midpoints_consistent(&line, &x, &y);
        separate_postcondition(&line, &x, &y, &z);
    }

    #[test]
    fn cylinder_properties(x in cylinder_point(), y in cylinder_point(), z in cylinder_point(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let cyl = cylinder();
        metric_axioms(&cyl, &x, &y, &z, 1e-12);
        geodesic_speed(&cyl, &x, &y, s, t);
        midpoints_consistent(&cyl, &x, &y);
        separate_postcondition(&cyl, &x, &y, &z);
    }

    #[test]
    fn tree_properties(x in tree_point(), y in tree_point(), z in tree_point(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let tree = star();
        metric_axioms(&tree, &x, &y, &z, 1e-12);
        geodesic_speed(&tree, &x, &y, s, t);
        midpoints_consistent(&tree, &x, &y);
        separate_postcondition(&tree, &x, &y, &z);
    }

    #[test]
    fn lattice_properties(x in lattice_point(), y in lattice_point(), z in lattice_point()) {
        let lat = lattice();
        // exact arithmetic: zero tolerance
        metric_axioms(&lat, &x, &y, &z, 0.0);
        midpoints_consistent(&lat, &x, &y);
        separate_postcondition(&lat, &x, &y, &z);
    }

    #[test]
    fn lattice_geodesic_speed_dyadic(x in lattice_point(), y in lattice_point(), num_s in 0i64..=8, num_t in 0i64..=8) {
        // dyadic parameters walk the canonical polyline exactly
        let lat = lattice();
        let s = Rat::from_ratio(num_s, 8);
        let t = Rat::from_ratio(num_t, 8);
        let d = lat.dist(&x, &y);
        for b in 0..lat.branch_count(&x, &y) {
            let gs = lat.geodesic_point(&x, &y, s, b).unwrap();
            let gt = lat.geodesic_point(&x, &y, t, b).unwrap();
            prop_assert_eq!(lat.dist(&gs, &gt), (s - t).abs() * d);
        }
    }

    #[test]
    fn busemann_catalog_singleton_midpoints(x in euclid_point(), y in euclid_point()) {
        for p in [1.5, 2.0, 3.0] {
            prop_assert_eq!(euclid_p(p).midpoints(&x, &y).len(), 1);
        }
    }

    #[test]
    fn fenchel_young_on_table(p in 0.0f64..8.0, v in 0.0f64..12.0) {
        let h = Hamiltonian::power(1.5);
        let table = legendre(&h, DEFAULT_N_L, hopflax::hamiltonian::default_p_max(8.0), 12.0).unwrap();
        let l = table.eval(v).expect_finite("coercive table");
        prop_assert!(p * v <= l + h.eval(p) + 1e-8);
    }
}

#[test]
fn midpoints_of_identical_points_are_singletons() {
    let e = euclid2();
    let p = vec![0.75, -1.25];
    assert_eq!(e.midpoints(&p, &p), vec![p.clone()]);
    let line = HalfLine::new(0.25f64, 1e-9).unwrap();
    assert_eq!(line.midpoints(&1.5, &1.5), vec![1.5]);
    let cyl = cylinder();
    let c = CylinderPoint::new(1.0, 2.0);
    assert_eq!(cyl.midpoints(&c, &c).len(), 1);
    let tree = star();
    let t = TreePoint { edge: 1, offset: 0.5 };
    assert_eq!(tree.midpoints(&t, &t).len(), 1);
    let lat = lattice();
    let q = LatticePoint::of_ratios((1, 2), (1, 1));
    assert_eq!(lat.midpoints(&q, &q), vec![q.clone()]);
}

// Ball-sample covering property: every sampled ball point lies within
// the ball, and balls at grid centers cover their radius within h.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn ball_sample_is_inside_and_covers(cx in -4i64..4, cy in -4i64..4, r_num in 1i64..=8) {
        let lat = lattice();
        let center = LatticePoint::of_ints(cx, cy);
        let r = Rat::from_ratio(r_num, 2);
        let ball = lat.ball_sample(&center, r);
        prop_assert!(ball.contains(&center));
        for p in &ball {
            prop_assert!(lat.dist(&center, p) <= r);
        }
        // covering at resolution h: walk to the axis extreme in steps
        let extreme = LatticePoint::new(center.x1 + r, center.x2);
        prop_assert!(ball.iter().any(|p| lat.dist(p, &extreme) == Rat::zero()));
    }
}
