//! Registered golden experiments.
//!
//! Each experiment is a pure function of its seed: it builds a space,
//! solves, runs the relevant certification checks, and compares against
//! golden values with explicit provenance (`reference` constants from
//! the registry, independently `oracle`-derived values, and `identity`
//! facts). The executable surface is `hopflax experiment <name>`.

use std::time::Instant;

use crate::convexity::{
    check_infty_subharmonious, check_one_weak_lattice, check_pointwise, check_weak_geodesic,
    lattice_rigidity_check, CheckParams, SubharmonicMode, Variant,
};
use crate::field::ScalarField;
use crate::hamiltonian::{Hamiltonian, Lagrangian};
use crate::report::{ExperimentReport, GoldenCheck, ScalarRepr, SolveSummary, StructureReport};
use crate::scalar::{Rat, Scalar};
use crate::solve::{
    alpha_family, alpha_gap_bound, dpp_check, residual_check, solve_eikonal, widen_check,
    SolvePath, SolveReport,
};
use crate::space::{
    Cylinder, CylinderPoint, Euclidean, GeodesicSpace, HalfLine, Lattice2, LatticePoint, PNorm,
    Tree, TreePoint,
};
use crate::structure::{
    check_busemann3, check_equivalence_3_4, check_uniform_npc, StructureParams,
};

pub struct ExperimentOutput {
    pub report: ExperimentReport,
    /// `(file name, contents)` pairs for the CSV emitter.
    pub csv: Vec<(String, String)>,
}

pub const NAMES: [&str; 9] = [
    "halfline-nonpreservation",
    "lattice-nonpreservation",
    "cylinder-preservation",
    "busemann-catalog",
    "lattice-rigidity",
    "npc-preservation-tree",
    "subharmonic-preservation",
    "cross-pointwise-loss",
    "alpha-convergence",
];

pub fn run(name: &str, seed: u64) -> Result<ExperimentOutput, String> {
    match name {
        "halfline-nonpreservation" => Ok(halfline_nonpreservation(seed)),
        "lattice-nonpreservation" => Ok(lattice_nonpreservation(seed)),
        "cylinder-preservation" => Ok(cylinder_preservation(seed)),
        "busemann-catalog" => Ok(busemann_catalog(seed)),
        "lattice-rigidity" => Ok(lattice_rigidity(seed)),
        "npc-preservation-tree" => Ok(npc_preservation_tree(seed)),
        "subharmonic-preservation" => Ok(subharmonic_preservation(seed)),
        "cross-pointwise-loss" => Ok(cross_pointwise_loss(seed)),
        "alpha-convergence" => Ok(alpha_convergence(seed)),
        other => Err(format!(
            "unknown experiment {other:?}; known: {}",
            NAMES.join(", ")
        )),
    }
}

fn summary<Sp: GeodesicSpace>(path: &str, t: Sp::S, rep: &SolveReport<'_, Sp>) -> SolveSummary {
    SolveSummary {
        path: path.into(),
        t: ScalarRepr::of(t),
        radius: ScalarRepr::of(rep.radius),
        points: rep.field.len(),
        min_candidates: rep.candidate_counts.iter().copied().min().unwrap_or(0),
        max_candidates: rep.candidate_counts.iter().copied().max().unwrap_or(0),
        wall_ms: rep.wall_ms,
    }
}

/// Worst absolute error of a solved slice against a closed form.
fn max_err<Sp: GeodesicSpace>(
    rep: &SolveReport<'_, Sp>,
    expect: impl Fn(&Sp::P) -> Sp::S,
) -> Sp::S {
    let mut worst = Sp::S::zero();
    for i in 0..rep.field.len() {
        let got = rep.field.value(i).expect_finite("solved value");
        worst = worst.max_s((got - expect(rep.field.point(i))).abs());
    }
    worst
}

/// Empirical Lipschitz constant of a solved slice must not exceed
/// `K + 5h` (the Lipschitz preserving property at grid resolution).
fn lipschitz_golden<Sp: GeodesicSpace>(
    label: &str,
    rep: &SolveReport<'_, Sp>,
    k: Sp::S,
    seed: u64,
) -> GoldenCheck {
    let h = rep.field.space.resolution();
    let bound = k + h * Sp::S::from_int(5);
    let est = rep.field.lipschitz_estimate(4000, seed);
    GoldenCheck::holds(
        label,
        "oracle",
        est.total_cmp(&bound) != std::cmp::Ordering::Greater,
        format!("estimate {est} vs bound {bound}"),
    )
}

fn value_at<Sp: GeodesicSpace>(rep: &SolveReport<'_, Sp>, p: &Sp::P) -> Sp::S {
    let i = rep.field.index_of(p).expect("requested point was solved");
    rep.field.value(i).expect_finite("solved value")
}

// ---------------------------------------------------------------------
// halfline-nonpreservation
// ---------------------------------------------------------------------

/// Half line, `u0 = -x`, equation `du/dt - |grad u| = 0`: the solution
/// is `min(t - x, 0)`, which is not geodesically convex for any t > 0
/// although `u0` is.
fn halfline_nonpreservation(seed: u64) -> ExperimentOutput {
    let start = Instant::now();
    let h = 0.01;
    let space = HalfLine::new(h, 1e-9).unwrap();
    let pts = space.patch(10.0);
    let preset = crate::presets::neg_x::<f64>();
    let u0 = ScalarField::from_fn(&space, pts.clone(), |p| (preset.eval)(p), Some(1.0)).unwrap();

    let mut goldens = Vec::new();
    let mut convexity = Vec::new();
    let mut solves = Vec::new();
    let mut csv = Vec::new();

    // u0 itself is geodesically convex (linear).
    let rep0 = check_weak_geodesic(&u0, &CheckParams::new(2000, seed), Variant::Weak, &[]).unwrap();
    goldens.push(GoldenCheck::holds(
        "u0 weak-geodesic PASS at t=0",
        "reference",
        rep0.pass,
        format!("margin {}", rep0.worst_margin.approx),
    ));
    convexity.push(rep0);

    let mut slice_at_1: Option<SolveReport<'_, HalfLine<f64>>> = None;
    for t in [0.5, 1.0] {
        let rep = solve_eikonal(&space, &u0, t, SolvePath::Sup, pts.clone()).unwrap();
        let err = max_err(&rep, |x| (t - x).min(0.0));
        goldens.push(GoldenCheck::holds(
            &format!("u(.,{t}) matches min(t-x,0) within h"),
            "reference",
            err <= h,
            format!("max err {err}"),
        ));
        goldens.push(lipschitz_golden(
            &format!("Lipschitz preserved at t={t}"),
            &rep,
            1.0,
            seed,
        ));
        csv.push((
            format!("halfline_u_t{t}.csv"),
            crate::report::field_csv(&rep, &u0),
        ));
        solves.push(summary("eikonal-sup", t, &rep));
        if t == 1.0 {
            slice_at_1 = Some(rep);
        }
    }

    // Convexity is lost at t = 1: pairs straddling the kink at x = t.
    let slice = slice_at_1.unwrap();
    let adversarial: Vec<(String, f64, f64)> = [0.1, 0.2, 0.5]
        .iter()
        .map(|a| (format!("straddle(a={a})"), 1.0 - a, 1.0 + a))
        .collect();
    let rep1 = check_weak_geodesic(
        &slice.field,
        &CheckParams::new(2000, seed),
        Variant::Weak,
        &adversarial,
    )
    .unwrap();
    goldens.push(GoldenCheck::holds(
        "u(.,1) weak-geodesic FAILS",
        "reference",
        !rep1.pass && rep1.worst_margin.approx <= -h.min(0.1),
        format!("margin {}", rep1.worst_margin.approx),
    ));
    convexity.push(rep1);

    // Dynamic programming and PDE residual consistency.
    let dpp = dpp_check(
        &space,
        &u0,
        &Lagrangian::Linear { vmax: 1.0 },
        0.5,
        1.0,
        SolvePath::Sup,
        space.patch(8.0),
        2.0 * h,
    )
    .unwrap();
    goldens.push(GoldenCheck::holds(
        "DPP discrepancy <= 2h (s=0.5, t=1)",
        "oracle",
        dpp.pass,
        format!("{}", dpp.max_discrepancy),
    ));
    let dt = 0.05;
    let next = solve_eikonal(&space, &u0, 1.0 + dt, SolvePath::Sup, pts.clone()).unwrap();
    let u_now: Vec<f64> = (0..slice.field.len())
        .map(|i| slice.field.value(i).expect_finite("now"))
        .collect();
    let u_next: Vec<f64> = (0..next.field.len())
        .map(|i| next.field.value(i).expect_finite("next"))
        .collect();
    let res = residual_check(
        &u_now,
        &u_next,
        h,
        dt,
        &Hamiltonian::linear(),
        SolvePath::Sup,
        0.5,
        0,
    );
    goldens.push(GoldenCheck::holds(
        "grid residual off kinks <= 10(h/dt + dt)",
        "oracle",
        res.max_residual <= 10.0 * (h / dt + dt),
        format!("residual {} over {} points", res.max_residual, res.checked),
    ));

    ExperimentOutput {
        report: ExperimentReport {
            name: "halfline-nonpreservation".into(),
            seed,
            goldens,
            convexity,
            structure: Vec::new(),
            solves,
            notes: Vec::new(),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        csv,
    }
}

// ---------------------------------------------------------------------
// lattice-nonpreservation
// ---------------------------------------------------------------------

/// The quadrant-product datum on the lattice under the eikonal
/// equation at t = k = 4: 1-weak geodesic convexity is lost, with the
/// final inequality `u(x,k) + u(y,k) - 2 u(z,k) < -2k` at every
/// midpoint.
fn lattice_nonpreservation(seed: u64) -> ExperimentOutput {
    let start = Instant::now();
    let space = Lattice2::new(Rat::from_ratio(1, 4)).unwrap();
    let r_patch = 20i64;
    let pts = space.patch(-r_patch, r_patch, -r_patch, r_patch);
    let preset = crate::presets::quadrant_product(r_patch);
    let u0 =
        ScalarField::from_fn(&space, pts, |p| (preset.eval)(p), Some(preset.lipschitz)).unwrap();

    let k = 4i64;
    let t = Rat::from_int(k);
    let x = LatticePoint::of_ints(k + 1, k); // (5, 4)
    let y = LatticePoint::of_ints(k, 3 * k); // (4, 12)

    let mut goldens = Vec::new();
    let mut convexity = Vec::new();
    let mut notes = Vec::new();

    // Midpoint set of the counterexample pair.
    let mids = space.midpoints(&x, &y);
    let expected_mids = vec![
        LatticePoint::of_ratios((4, 1), (15, 2)),
        LatticePoint::of_ratios((9, 2), (8, 1)),
        LatticePoint::of_ratios((5, 1), (17, 2)),
    ];
    goldens.push(GoldenCheck::holds(
        "M((5,4),(4,12)) = {(4,15/2),(9/2,8),(5,17/2)}",
        "reference",
        mids == expected_mids,
        format!(
            "[{}]",
            mids.iter()
                .map(|m| space.point_key(m))
                .collect::<Vec<_>>()
                .join("; ")
        ),
    ));

    // Solve on the core patch plus the named points.
    let mut eval = space.patch(-15, 15, -15, 15);
    eval.push(x.clone());
    eval.push(y.clone());
    eval.extend(expected_mids.iter().cloned());
    let rep = solve_eikonal(&space, &u0, t, SolvePath::Inf, eval).unwrap();

    let ux = value_at(&rep, &x);
    let uy = value_at(&rep, &y);
    goldens.push(GoldenCheck::exact(
        "u(x,4) = 0",
        "reference",
        Rat::zero(),
        ux,
    ));
    goldens.push(GoldenCheck::holds(
        "u(y,4) <= 3k = 12",
        "reference",
        uy <= Rat::from_int(3 * k),
        format!("{uy}"),
    ));
    goldens.push(GoldenCheck::exact(
        "u(y,4) = 12",
        "oracle",
        Rat::from_int(12),
        uy,
    ));

    // Midpoint values. The registry carries 3k - 3/4 for the first
    // midpoint; the honest infimum over the lattice ball is 3k - 3/2,
    // attained at (1/2, 2k-1), which lies at graph distance exactly k.
    let reference_values = [Rat::from_ratio(45, 4), Rat::from_int(12), Rat::from_int(20)];
    let derived_values = [Rat::from_ratio(21, 2), Rat::from_int(12), Rat::from_int(20)];
    for (i, z) in expected_mids.iter().enumerate() {
        let uz = value_at(&rep, z);
        let mut g = GoldenCheck::exact(
            &format!("u(z{i},4) reference value at {}", space.point_key(z)),
            "reference",
            reference_values[i],
            uz,
        );
        if i == 0 {
            g = g.with_note(
                "stated 3k-3/4 corresponds to (1/2, 2k-1/2), which is not a lattice point; \
                 the lattice infimum is 3k-3/2 at (1/2, 2k-1), graph distance exactly k",
            );
        }
        goldens.push(g);
        goldens.push(GoldenCheck::exact(
            &format!("u(z{i},4) enumeration oracle at {}", space.point_key(z)),
            "oracle",
            derived_values[i],
            uz,
        ));
        let gap = ux + uy - (uz + uz);
        goldens.push(GoldenCheck::holds(
            &format!("u(x,4)+u(y,4)-2u(z{i},4) < -2k = -8"),
            "reference",
            gap < Rat::from_int(-2 * k),
            format!("{gap}"),
        ));
    }
    if !goldens.iter().all(|g| g.pass) {
        notes.push(
            "the reference value 3k-3/4 for the first midpoint is not attainable on the \
             lattice graph; the solver's exact value 3k-3/2 still satisfies the final \
             inequality"
                .into(),
        );
    }

    // 1-weak geodesic convexity of the datum, reported for the record:
    // in the intrinsic graph metric the positive claim does not survive
    // (the argument's midpoints are l1-equidistant points that are not
    // geodesic midpoints), so this is a report, not a golden.
    let params = CheckParams::new(1200, seed);
    let rep0 = check_one_weak_lattice(&u0, &params, Variant::Weak, &[]).unwrap();
    if !rep0.pass {
        notes.push(format!(
            "u0 one-weak verdict under the intrinsic graph metric: FAIL (margin {:?}); \
             the stated convexity holds only for plain-l1 midpoints",
            rep0.worst_margin.exact
        ));
    }
    convexity.push(rep0);
    let adv = vec![("counterexample-pair".to_string(), x.clone(), y.clone())];
    let rep1 = check_one_weak_lattice(&rep.field, &params, Variant::Weak, &adv).unwrap();
    goldens.push(GoldenCheck::holds(
        "u(.,4) one-weak FAILS at the named pair",
        "reference",
        !rep1.pass,
        format!("margin {:?}", rep1.worst_margin.exact),
    ));
    convexity.push(rep1);

    // Exact dynamic programming split.
    let dpp = dpp_check(
        &space,
        &u0,
        &Lagrangian::Linear { vmax: Rat::one() },
        Rat::from_int(2),
        t,
        SolvePath::Inf,
        space.patch(-5, 5, -5, 5),
        Rat::zero(),
    )
    .unwrap();
    goldens.push(GoldenCheck::holds(
        "DPP discrepancy 0 exactly (s=2, t=4)",
        "oracle",
        dpp.pass && dpp.max_discrepancy == Rat::zero(),
        format!("{}", dpp.max_discrepancy),
    ));

    // Candidate-radius doubling must not change values.
    let drift = widen_check(
        &space,
        &u0,
        &Lagrangian::Linear { vmax: Rat::one() },
        t,
        SolvePath::Inf,
        space.patch(-3, 3, -3, 3),
    )
    .unwrap();
    goldens.push(GoldenCheck::exact(
        "radius doubling drift",
        "oracle",
        Rat::zero(),
        drift,
    ));

    let csv = vec![(
        "lattice_u_t4.csv".to_string(),
        crate::report::field_csv(&rep, &u0),
    )];
    let solves = vec![summary("eikonal-inf", t, &rep)];

    ExperimentOutput {
        report: ExperimentReport {
            name: "lattice-nonpreservation".into(),
            seed,
            goldens,
            convexity,
            structure: Vec::new(),
            solves,
            notes,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        csv,
    }
}

// ---------------------------------------------------------------------
// cylinder-preservation
// ---------------------------------------------------------------------

/// Height datum on the flat cylinder under `H(p) = p`: the solution is
/// exactly `x3 - t` and stays (weakly and strongly) geodesically
/// convex.
fn cylinder_preservation(seed: u64) -> ExperimentOutput {
    let start = Instant::now();
    let h = 1.0 / 16.0;
    let space = Cylinder::new(h, 1e-9).unwrap();
    let pts = space.patch(-4.0, 4.0);
    let preset = crate::presets::height::<f64>();
    let u0 = ScalarField::from_fn(&space, pts, |p| (preset.eval)(p), Some(1.0)).unwrap();
    let eval = space.patch(-1.5, 1.5);

    let mut goldens = Vec::new();
    let mut convexity = Vec::new();
    let mut solves = Vec::new();
    let mut csv = Vec::new();

    // Midpoint enumeration of the antipodal pair.
    let a = CylinderPoint::new(0.0, 0.0);
    let b = CylinderPoint::new(std::f64::consts::PI, 0.0);
    let mids = space.midpoints(&a, &b);
    let ok = mids.len() == 2
        && (mids[0].theta - std::f64::consts::FRAC_PI_2).abs() <= 1e-9
        && (mids[1].theta - 3.0 * std::f64::consts::FRAC_PI_2).abs() <= 1e-9
        && mids[0].height == 0.0
        && mids[1].height == 0.0;
    goldens.push(GoldenCheck::holds(
        "M((0,0),(pi,0)) = {(pi/2,0), (3pi/2,0)}",
        "reference",
        ok,
        format!(
            "[{}]",
            mids.iter()
                .map(|m| space.point_key(m))
                .collect::<Vec<_>>()
                .join("; ")
        ),
    ));

    let adversarial: Vec<(String, CylinderPoint<f64>, CylinderPoint<f64>)> = vec![
        (
            "antipodal".into(),
            CylinderPoint::new(0.0, 0.0),
            CylinderPoint::new(std::f64::consts::PI, 0.0),
        ),
        (
            "antipodal-shifted".into(),
            CylinderPoint::new(0.0, 0.5),
            CylinderPoint::new(std::f64::consts::PI, -0.5),
        ),
    ];
    for t in [0.5, 1.0, 2.0] {
        let rep = solve_eikonal(&space, &u0, t, SolvePath::Inf, eval.clone()).unwrap();
        let err = max_err(&rep, |p| p.height - t);
        goldens.push(GoldenCheck::holds(
            &format!("u(.,{t}) = x3 - t within 1e-9"),
            "reference",
            err <= 1e-9,
            format!("max err {err:e}"),
        ));
        let conv = check_weak_geodesic(
            &rep.field,
            &CheckParams::new(2500, seed),
            Variant::Weak,
            &adversarial,
        )
        .unwrap();
        goldens.push(GoldenCheck::holds(
            &format!("u(.,{t}) weak-geodesic PASS"),
            "reference",
            conv.pass,
            format!("margin {:e}", conv.worst_margin.approx),
        ));
        goldens.push(lipschitz_golden(
            &format!("Lipschitz preserved at t={t}"),
            &rep,
            1.0,
            seed,
        ));
        convexity.push(conv);
        if t == 1.0 {
            csv.push((
                "cylinder_u_t1.csv".to_string(),
                crate::report::field_csv(&rep, &u0),
            ));
        }
        solves.push(summary("eikonal-inf", t, &rep));
    }

    let dpp = dpp_check(
        &space,
        &u0,
        &Lagrangian::Linear { vmax: 1.0 },
        0.5,
        1.0,
        SolvePath::Inf,
        space.patch(-1.0, 1.0),
        2.0 * h,
    )
    .unwrap();
    goldens.push(GoldenCheck::holds(
        "DPP discrepancy <= 2h (s=0.5, t=1)",
        "oracle",
        dpp.pass,
        format!("{}", dpp.max_discrepancy),
    ));

    ExperimentOutput {
        report: ExperimentReport {
            name: "cylinder-preservation".into(),
            seed,
            goldens,
            convexity,
            structure: Vec::new(),
            solves,
            notes: Vec::new(),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        csv,
    }
}

// ---------------------------------------------------------------------
// busemann-catalog
// ---------------------------------------------------------------------

/// Certifies the Busemann and uniform NPC structure across the space
/// catalog, including the exact lattice witness margin and the
/// zero-margin equality on the cylinder.
fn busemann_catalog(seed: u64) -> ExperimentOutput {
    let start = Instant::now();
    let mut goldens = Vec::new();
    let mut structure: Vec<StructureReport> = Vec::new();

    // Euclidean p-norm planes: Busemann for every finite p > 1.
    for p in [1.5, 2.0, 3.0] {
        let e = Euclidean::new(2, PNorm::Finite(p), 0.5, 1e-9).unwrap();
        let pts = e.patch(&[-2.0, -2.0], &[2.0, 2.0]);
        let rep = check_busemann3(&e, &pts, &StructureParams::new(600, seed), &[]);
        goldens.push(GoldenCheck::holds(
            &format!("busemann3 PASS on l^{p} plane"),
            "reference",
            rep.pass,
            format!("margin {:e}", rep.worst_margin.approx),
        ));
        // Busemann spaces have singleton midpoints everywhere.
        let mut rng = crate::sampling::seeded(seed);
        let singleton = (0..300).all(|_| {
            let a = &pts[crate::sampling::pick(&mut rng, pts.len())];
            let b = &pts[crate::sampling::pick(&mut rng, pts.len())];
            e.midpoints(a, b).len() == 1
        });
        goldens.push(GoldenCheck::holds(
            &format!("singleton midpoints on l^{p} plane"),
            "oracle",
            singleton,
            "sampled pairs".into(),
        ));
        let (r3, r4, agree) = check_equivalence_3_4(&e, &pts, &StructureParams::new(400, seed));
        goldens.push(GoldenCheck::holds(
            &format!("3-point and 4-point verdicts agree on l^{p} plane"),
            "reference",
            agree && r3.pass && r4.pass,
            format!("{} / {}", r3.verdict(), r4.verdict()),
        ));
        structure.push(rep);
    }

    // Half line.
    let line = HalfLine::new(0.25f64, 1e-9).unwrap();
    let lpts = line.patch(5.0);
    let (r3, r4, agree) = check_equivalence_3_4(&line, &lpts, &StructureParams::new(500, seed));
    goldens.push(GoldenCheck::holds(
        "busemann3 PASS on the half line (and 4-point agrees)",
        "identity",
        r3.pass && r4.pass && agree,
        format!("{} / {}", r3.verdict(), r4.verdict()),
    ));
    structure.push(r3);

    // 3-star tree.
    let tree = Tree::star(3, 1.0f64, 0.125, 1e-9).unwrap();
    let tpts = tree.patch();
    let rep = check_busemann3(&tree, &tpts, &StructureParams::new(800, seed), &[]);
    goldens.push(GoldenCheck::holds(
        "busemann3 PASS on the 3-star tree",
        "reference",
        rep.pass,
        format!("margin {:e}", rep.worst_margin.approx),
    ));
    structure.push(rep);

    // Lattice: fails with the exact witness margin 2k at k = 2.
    let lat = Lattice2::new(Rat::from_ratio(1, 2)).unwrap();
    let latpts = lat.patch(-3, 3, -3, 3);
    let witness = (
        "reference-witness(k=2)".to_string(),
        LatticePoint::of_ints(0, 0),
        LatticePoint::of_ints(0, 4),
        LatticePoint::of_ints(2, 4),
    );
    let rep = check_busemann3(&lat, &latpts, &StructureParams::new(500, seed), &[witness]);
    goldens.push(GoldenCheck::holds(
        "busemann3 FAILS on the lattice",
        "reference",
        !rep.pass,
        format!("worst margin {:?}", rep.worst_margin.exact),
    ));
    goldens.push(GoldenCheck::holds(
        "lattice witness margin exactly -2k = -4 at k=2",
        "reference",
        rep.named[0].margin.exact.as_deref() == Some("-4"),
        format!("{:?}", rep.named[0].margin.exact),
    ));
    goldens.push(
        GoldenCheck::holds(
            "witness midpoint of ((0,0),(0,4)) is (0,2)",
            "oracle",
            lat.midpoints(&LatticePoint::of_ints(0, 0), &LatticePoint::of_ints(0, 4))
                == vec![LatticePoint::of_ints(0, 2)],
            "M((0,0),(0,2k)) computed honestly".into(),
        )
        .with_note("the stated midpoint (0,1) only matches k=1; for general k it is (0,k)"),
    );
    let (r3l, r4l, agree) = check_equivalence_3_4(&lat, &latpts, &StructureParams::new(400, seed));
    goldens.push(GoldenCheck::holds(
        "3-point and 4-point verdicts agree on the lattice (both FAIL)",
        "oracle",
        agree && !r3l.pass && !r4l.pass,
        format!("{} / {}", r3l.verdict(), r4l.verdict()),
    ));
    structure.push(rep);

    // Cylinder: fails globally, passes uniform NPC at delta = pi/4 with
    // zero margin.
    let cyl = Cylinder::new(0.125f64, 1e-9).unwrap();
    let cpts = cyl.patch(-1.0, 1.0);
    let cw = (
        "antipodal".to_string(),
        CylinderPoint::new(0.0, 0.0),
        CylinderPoint::new(std::f64::consts::PI, 0.0),
        CylinderPoint::new(std::f64::consts::PI, 0.0),
    );
    let rep = check_busemann3(&cyl, &cpts, &StructureParams::new(400, seed), &[cw]);
    goldens.push(GoldenCheck::holds(
        "busemann3 FAILS on the cylinder",
        "reference",
        !rep.pass,
        format!("margin {}", rep.worst_margin.approx),
    ));
    structure.push(rep);
    let rep = check_uniform_npc(
        &cyl,
        &cpts,
        std::f64::consts::FRAC_PI_4,
        &StructureParams::new(600, seed),
        &[],
    );
    goldens.push(GoldenCheck::holds(
        "uniform NPC PASS on the cylinder at delta=pi/4 with margin 0",
        "reference",
        rep.pass && rep.worst_margin.approx.abs() <= 1e-12,
        format!("margin {:e}", rep.worst_margin.approx),
    ));
    structure.push(rep);

    // Lattice uniform NPC: passes at delta = 1/3, fails at delta = 3.
    let lat4 = Lattice2::new(Rat::from_ratio(1, 4)).unwrap();
    let centers = lat4.patch(-2, 2, -2, 2);
    let rep = check_uniform_npc(
        &lat4,
        &centers,
        Rat::from_ratio(1, 3),
        &StructureParams::new(600, seed),
        &[],
    );
    goldens.push(GoldenCheck::holds(
        "uniform NPC PASS on the lattice at delta=1/3",
        "reference",
        rep.pass,
        format!("margin {:?}", rep.worst_margin.exact),
    ));
    structure.push(rep);
    let scaled = (
        "scaled-witness(k=1)".to_string(),
        LatticePoint::of_ints(0, 0),
        LatticePoint::of_ints(0, 2),
        LatticePoint::of_ints(1, 2),
    );
    let rep = check_uniform_npc(
        &lat4,
        &centers,
        Rat::from_int(3),
        &StructureParams::new(300, seed),
        &[scaled],
    );
    goldens.push(GoldenCheck::holds(
        "uniform NPC FAILS on the lattice at delta=3",
        "oracle",
        !rep.pass,
        format!("witness margin {:?}", rep.named[0].margin.exact),
    ));
    structure.push(rep);

    ExperimentOutput {
        report: ExperimentReport {
            name: "busemann-catalog".into(),
            seed,
            goldens,
            convexity: Vec::new(),
            structure,
            solves: Vec::new(),
            notes: Vec::new(),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        csv: Vec::new(),
    }
}

// ---------------------------------------------------------------------
// lattice-rigidity
// ---------------------------------------------------------------------

/// The only weakly geodesically convex functions on the lattice are
/// constants: exact inequality elimination on one cell plus a seeded
/// randomized search for nonconstant counterexamples.
fn lattice_rigidity(seed: u64) -> ExperimentOutput {
    let start = Instant::now();
    let mut goldens = Vec::new();
    let rigidity = lattice_rigidity_check(Rat::from_ratio(1, 1_000_000_000), 100_000, seed);
    goldens.push(GoldenCheck::holds(
        "cell inequalities force u(1,0)=u(0,1)=u(1,1)=0",
        "reference",
        rigidity.unique_zero,
        format!(
            "bounds {:?}",
            rigidity
                .bounds
                .iter()
                .map(|(lo, hi)| format!("[{lo}, {hi}]"))
                .collect::<Vec<_>>()
        ),
    ));
    goldens.push(GoldenCheck::holds(
        "no nonconstant field passes weak convexity in 1e5 seeded trials",
        "reference",
        rigidity.nonconstant_passing == 0,
        format!(
            "{} passing fields, {} nonconstant",
            rigidity.passing_fields, rigidity.nonconstant_passing
        ),
    ));
    goldens.push(GoldenCheck::holds(
        "constant fields do pass",
        "identity",
        rigidity.passing_fields > 0,
        format!("{}", rigidity.passing_fields),
    ));
    // An epsilon bump at u(1,0) violates the first cell inequality by 2 eps.
    let eps = Rat::from_ratio(1, 16);
    let slack = Rat::zero() - (eps + eps); // u(1,1) - 2 u(1,0) with the bump
    goldens.push(GoldenCheck::holds(
        "epsilon bump violates a cell inequality by >= eps",
        "oracle",
        slack <= -eps,
        format!("slack {slack}"),
    ));

    ExperimentOutput {
        report: ExperimentReport {
            name: "lattice-rigidity".into(),
            seed,
            goldens,
            convexity: Vec::new(),
            structure: Vec::new(),
            solves: Vec::new(),
            notes: Vec::new(),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        csv: Vec::new(),
    }
}

// ---------------------------------------------------------------------
// npc-preservation-tree
// ---------------------------------------------------------------------

/// Geodesic convexity preservation on a 3-star tree (a Busemann, hence
/// uniform NPC, space) with the quadratic Hamiltonian.
fn npc_preservation_tree(seed: u64) -> ExperimentOutput {
    let start = Instant::now();
    let h = 0.125;
    let tree = Tree::star(3, 1.0f64, h, 1e-9).unwrap();
    let pts = tree.patch();
    let preset = crate::presets::dist_to_node(&tree, 0);
    let u0 = ScalarField::from_fn(&tree, pts.clone(), |p| (preset.eval)(p), Some(1.0)).unwrap();

    let mut goldens = Vec::new();
    let mut convexity = Vec::new();
    let mut solves = Vec::new();

    let rep0 = check_weak_geodesic(&u0, &CheckParams::new(2000, seed), Variant::Weak, &[]).unwrap();
    goldens.push(GoldenCheck::holds(
        "u0 = d(., center) weak-geodesic PASS",
        "identity",
        rep0.pass,
        format!("margin {:e}", rep0.worst_margin.approx),
    ));
    convexity.push(rep0);

    let k = 1.0;
    for t in [0.25, 0.5, 1.0] {
        let rep =
            crate::solve::solve_inf(&tree, &u0, &Lagrangian::Quadratic, t, pts.clone()).unwrap();
        let conv = check_weak_geodesic(
            &rep.field,
            &CheckParams::new(2000, seed).with_tau(5.0 * k * h),
            Variant::Weak,
            &[],
        )
        .unwrap();
        goldens.push(GoldenCheck::holds(
            &format!("u(.,{t}) weak-geodesic PASS within 5Kh"),
            "oracle",
            conv.pass,
            format!("margin {:e}", conv.worst_margin.approx),
        ));
        goldens.push(lipschitz_golden(
            &format!("Lipschitz preserved at t={t}"),
            &rep,
            k,
            seed,
        ));
        convexity.push(conv);
        solves.push(summary("inf", t, &rep));
    }

    let dpp = dpp_check(
        &tree,
        &u0,
        &Lagrangian::Quadratic,
        0.25,
        0.5,
        SolvePath::Inf,
        pts,
        2.0 * h,
    )
    .unwrap();
    goldens.push(GoldenCheck::holds(
        "DPP discrepancy <= 2h (s=0.25, t=0.5)",
        "oracle",
        dpp.pass,
        format!("{}", dpp.max_discrepancy),
    ));

    ExperimentOutput {
        report: ExperimentReport {
            name: "npc-preservation-tree".into(),
            seed,
            goldens,
            convexity,
            structure: Vec::new(),
            solves,
            notes: Vec::new(),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        csv: Vec::new(),
    }
}

// ---------------------------------------------------------------------
// subharmonic-preservation
// ---------------------------------------------------------------------

/// `u0 = |x|_1` on the lattice under (HJ2) with `H(p) = p`: the
/// solution `|x|_1 + t` stays uniformly infinity-subharmonious with
/// exact zero margin.
fn subharmonic_preservation(seed: u64) -> ExperimentOutput {
    let start = Instant::now();
    let space = Lattice2::new(Rat::from_ratio(1, 4)).unwrap();
    let pts = space.patch(-12, 12, -12, 12);
    let preset = crate::presets::norm1();
    let u0 = ScalarField::from_fn(&space, pts, |p| (preset.eval)(p), Some(Rat::one())).unwrap();
    let eval = space.patch(-8, 8, -8, 8);
    let centers = space.patch(-7, 7, -7, 7);
    let r_grid = [Rat::from_ratio(1, 4), Rat::from_ratio(1, 2), Rat::one()];

    let mut goldens = Vec::new();
    let mut convexity = Vec::new();
    let mut solves = Vec::new();

    let rep0 = check_infty_subharmonious(
        &u0,
        &centers,
        Rat::one(),
        &r_grid,
        Rat::zero(),
        SubharmonicMode::Uniform,
    )
    .unwrap();
    goldens.push(GoldenCheck::holds(
        "u0 = |x|_1 uniformly infty-subharmonious (delta=1)",
        "reference",
        rep0.pass && rep0.worst_margin.exact.as_deref() == Some("0"),
        format!("margin {:?}", rep0.worst_margin.exact),
    ));
    convexity.push(rep0);

    for t in [Rat::one(), Rat::from_int(2)] {
        let rep = solve_eikonal(&space, &u0, t, SolvePath::Sup, eval.clone()).unwrap();
        let err = max_err(&rep, |p| p.norm1() + t);
        goldens.push(GoldenCheck::exact(
            &format!("u(.,{t}) = |x|_1 + t exactly"),
            "oracle",
            Rat::zero(),
            err,
        ));
        let sub = check_infty_subharmonious(
            &rep.field,
            &centers,
            Rat::one(),
            &r_grid,
            Rat::zero(),
            SubharmonicMode::Uniform,
        )
        .unwrap();
        goldens.push(GoldenCheck::holds(
            &format!("u(.,{t}) uniformly infty-subharmonious with margin >= 0 exactly"),
            "reference",
            sub.pass && sub.worst_margin.exact.as_deref() == Some("0"),
            format!("margin {:?}", sub.worst_margin.exact),
        ));
        convexity.push(sub);
        solves.push(summary("eikonal-sup", t, &rep));
    }

    let dpp = dpp_check(
        &space,
        &u0,
        &Lagrangian::Linear { vmax: Rat::one() },
        Rat::one(),
        Rat::from_int(2),
        SolvePath::Sup,
        space.patch(-4, 4, -4, 4),
        Rat::zero(),
    )
    .unwrap();
    goldens.push(GoldenCheck::holds(
        "DPP discrepancy 0 exactly (s=1, t=2)",
        "oracle",
        dpp.pass && dpp.max_discrepancy == Rat::zero(),
        format!("{}", dpp.max_discrepancy),
    ));

    ExperimentOutput {
        report: ExperimentReport {
            name: "subharmonic-preservation".into(),
            seed,
            goldens,
            convexity,
            structure: Vec::new(),
            solves,
            notes: Vec::new(),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        csv: Vec::new(),
    }
}

// ---------------------------------------------------------------------
// cross-pointwise-loss
// ---------------------------------------------------------------------

/// The cross space (vertical line plus horizontal ray, modeled as a
/// 3-star tree): the datum is pointwise convex but not
/// infinity-subharmonious, and the eikonal flow destroys pointwise
/// convexity at (t, 0).
fn cross_pointwise_loss(seed: u64) -> ExperimentOutput {
    let start = Instant::now();
    let h = 0.125;
    // edge 0: the horizontal ray; edges 1, 2: the vertical half-lines.
    let tree = Tree::star(3, 10.0f64, h, 1e-9).unwrap();
    let pts = tree.patch();
    let preset = crate::presets::cross_ramp(&tree);
    let u0 = ScalarField::from_fn(&tree, pts.clone(), |p| (preset.eval)(p), Some(1.0)).unwrap();
    let t = 0.5;
    let r_grid = [h, 2.0 * h];

    let mut goldens = Vec::new();
    let mut convexity = Vec::new();

    // Pointwise convexity of u0 holds (checked over interior centers).
    let rep0 = check_pointwise(&u0, &pts, &r_grid, 1e-9).unwrap();
    goldens.push(GoldenCheck::holds(
        "u0 pointwise convex",
        "reference",
        rep0.pass,
        format!("margin {:e}", rep0.worst_margin.approx),
    ));
    convexity.push(rep0);

    // ... but u0 is not infinity-subharmonious at the junction.
    let center = tree.node_point(0);
    let sub = check_infty_subharmonious(
        &u0,
        std::slice::from_ref(&center),
        0.25,
        &r_grid,
        0.0,
        SubharmonicMode::Plain,
    )
    .unwrap();
    goldens.push(GoldenCheck::holds(
        "u0 fails infty-subharmoniousness at the junction",
        "reference",
        !sub.pass,
        format!("margin {:e}", sub.worst_margin.approx),
    ));
    convexity.push(sub);

    let rep = solve_eikonal(&tree, &u0, t, SolvePath::Sup, pts.clone()).unwrap();
    let err = max_err(&rep, |p: &TreePoint<f64>| {
        if p.edge == 0 {
            (t - tree.dist(p, &center)).min(0.0)
        } else {
            0.0
        }
    });
    goldens.push(GoldenCheck::holds(
        "u(.,t) = min(t - x1, 0) on the ray, 0 elsewhere",
        "reference",
        err <= 1e-12,
        format!("max err {err:e}"),
    ));

    let pw = check_pointwise(&rep.field, &pts, &r_grid, 1e-9).unwrap();
    let kink = TreePoint { edge: 0, offset: t };
    goldens.push(GoldenCheck::holds(
        "u(.,t) fails pointwise convexity at (t, 0)",
        "reference",
        !pw.pass && pw.witness.first() == Some(&tree.point_key(&kink)),
        format!("witness {:?}", pw.witness),
    ));
    convexity.push(pw);

    ExperimentOutput {
        report: ExperimentReport {
            name: "cross-pointwise-loss".into(),
            seed,
            goldens,
            convexity,
            structure: Vec::new(),
            solves: vec![summary("eikonal-sup", t, &rep)],
            notes: Vec::new(),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        csv: Vec::new(),
    }
}

// ---------------------------------------------------------------------
// alpha-convergence
// ---------------------------------------------------------------------

/// The `H(p) = p^alpha/alpha` family approaches the eikonal solution as
/// `alpha -> 1`, within the two-sided bound
/// `max((alpha-1)t/alpha, K(V_alpha - 1)t)`.
fn alpha_convergence(seed: u64) -> ExperimentOutput {
    let start = Instant::now();
    let h = 0.01;
    let space = HalfLine::new(h, 1e-9).unwrap();
    let pts = space.patch(10.0);
    let preset = crate::presets::neg_x::<f64>();
    let u0 = ScalarField::from_fn(&space, pts.clone(), |p| (preset.eval)(p), Some(1.0)).unwrap();
    let t = 1.0;

    let mut goldens = Vec::new();
    let mut solves = Vec::new();

    let eik = solve_eikonal(&space, &u0, t, SolvePath::Inf, pts.clone()).unwrap();
    let mut gaps = Vec::new();
    for alpha in [2.0, 1.5, 1.2, 1.05] {
        let rep = alpha_family(&space, &u0, alpha, t, pts.clone()).unwrap();
        let mut gap = 0.0f64;
        for i in 0..rep.field.len() {
            gap = gap.max(
                (rep.field.value(i).expect_finite("alpha")
                    - eik.field.value(i).expect_finite("eik"))
                .abs(),
            );
        }
        let bound = alpha_gap_bound(alpha, 1.0, t) + 2.0 * h;
        goldens.push(GoldenCheck::holds(
            &format!("sup gap within the two-sided bound at alpha={alpha}"),
            "reference",
            gap <= bound,
            format!("gap {gap:.6} vs bound {bound:.6}"),
        ));
        solves.push(summary(&format!("alpha={alpha}"), t, &rep));
        gaps.push(gap);
    }
    goldens.push(GoldenCheck::holds(
        "gap sequence decreases as alpha -> 1",
        "oracle",
        gaps.windows(2).all(|w| w[1] < w[0]),
        format!("{gaps:?}"),
    ));
    goldens.push(GoldenCheck::holds(
        "final gap at alpha=1.05 <= 0.06 + 2h",
        "reference",
        gaps[3] <= 0.06 + 2.0 * h,
        format!("{:.6}", gaps[3]),
    ));
    let _ = seed;

    ExperimentOutput {
        report: ExperimentReport {
            name: "alpha-convergence".into(),
            seed,
            goldens,
            convexity: Vec::new(),
            structure: Vec::new(),
            solves,
            notes: Vec::new(),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        csv: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_rejects_unknown_names() {
        let err = match run("no-such-experiment", 0) {
            Err(e) => e,
            Ok(_) => panic!("expected dispatch error"),
        };
        assert!(err.contains("unknown experiment"));
        assert!(err.contains(NAMES[0]));
    }

    #[test]
    fn lattice_rigidity_fast() {
        let out = run("lattice-rigidity", 7).unwrap();
        assert!(out.report.all_pass(), "{}", out.report.diff_table());
    }

    #[test]
    fn halfline_experiment_passes() {
        let out = run("halfline-nonpreservation", 7).unwrap();
        assert!(out.report.all_pass(), "{}", out.report.diff_table());
        assert_eq!(out.csv.len(), 2);
    }

    #[test]
    fn cross_experiment_passes() {
        let out = run("cross-pointwise-loss", 7).unwrap();
        assert!(out.report.all_pass(), "{}", out.report.diff_table());
    }
}
