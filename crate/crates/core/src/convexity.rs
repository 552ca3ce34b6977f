//! Certification of convexity notions on sampled fields: weak/strong
//! geodesic convexity, infinity-subharmoniousness (plain and uniform),
//! pointwise convexity, the lattice-specific 1-weak relaxation, the
//! lattice rigidity argument, and the midpoint-map perturbation and
//! growth-envelope bounds used by the solver validation suites.
//!
//! Checks sample seeded-random pairs plus a deterministic adversarial
//! set supplied by the caller, so named counterexamples are always hit
//! and reports reproduce exactly under the same seed.

use crate::ext::Ext;
use crate::field::ScalarField;
use crate::report::{ConvexityReport, NamedMargin, ScalarRepr};
use crate::scalar::{Rat, Scalar};
use crate::space::{GeodesicSpace, Lattice2, LatticePoint, SpaceError};

/// Weak takes the best midpoint, strong the worst.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Weak,
    Strong,
}

/// Caller-facing knobs; `delta` and `r_grid` are explicit because the
/// corresponding constants in the definitions are existential.
pub struct CheckParams<S> {
    pub pair_budget: usize,
    pub seed: u64,
    pub tau: S,
}

impl<S: Scalar> CheckParams<S> {
    pub fn new(pair_budget: usize, seed: u64) -> Self {
        Self {
            pair_budget,
            seed,
            // tau default: 0 exact / 1e-9 floating.
            tau: if S::EXACT {
                S::zero()
            } else {
                S::from_ratio(1, 1_000_000_000)
            },
        }
    }

    pub fn with_tau(mut self, tau: S) -> Self {
        self.tau = tau;
        self
    }
}

/// Sample indices within distance `r` of sample `i`, via the
/// conservative float prefilter first.
fn neighbors_within<Sp: GeodesicSpace>(
    field: &ScalarField<'_, Sp>,
    coords: &[Vec<f64>],
    i: usize,
    r: Sp::S,
) -> Vec<usize> {
    let space = field.space;
    let r_f64 = r.to_f64();
    let mut out = Vec::new();
    for j in 0..field.len() {
        if space.approx_dist_lower(&coords[j], &coords[i]) > r_f64 {
            continue;
        }
        if space.dist(field.point(j), field.point(i)).total_cmp(&r) != std::cmp::Ordering::Greater {
            out.push(j);
        }
    }
    out
}

fn sample_coords<Sp: GeodesicSpace>(field: &ScalarField<'_, Sp>) -> Vec<Vec<f64>> {
    field
        .points()
        .iter()
        .map(|p| field.space.approx_coords(p))
        .collect()
}

/// Midpoint-based convexity inequality on one pair; returns the slack
/// `f(x) + f(y) - extremum_z 2 f(z)` and the extremal midpoint, or
/// `None` when some midpoint value is not resolvable at the field's
/// resolution.
fn pair_slack<Sp: GeodesicSpace>(
    field: &ScalarField<'_, Sp>,
    x: &Sp::P,
    y: &Sp::P,
    variant: Variant,
) -> Option<(Sp::S, Sp::P)> {
    let space = field.space;
    let (Some(ix), Some(iy)) = (field.index_of(x), field.index_of(y)) else {
        return None;
    };
    let (Ext::Finite(fx), Ext::Finite(fy)) = (field.value(ix), field.value(iy)) else {
        return None;
    };
    let mids = space.midpoints(x, y);
    let mut extremal: Option<(Sp::S, Sp::P)> = None;
    for z in mids {
        // Exact sample lookup only: off-grid midpoints make the pair
        // unresolvable rather than silently interpolated.
        let iz = field.index_of(&z)?;
        let fz = field.value(iz).finite()?;
        let better = match &extremal {
            None => true,
            Some((b, _)) => match variant {
                Variant::Weak => fz.total_cmp(b) == std::cmp::Ordering::Less,
                Variant::Strong => fz.total_cmp(b) == std::cmp::Ordering::Greater,
            },
        };
        if better {
            extremal = Some((fz, z));
        }
    }
    let (fz, z) = extremal?;
    Some((fx + fy - (fz + fz), z))
}

struct PairScan<S, P> {
    worst: Option<(S, P, P, P)>,
    tested: usize,
    skipped: usize,
    named: Vec<NamedMargin>,
}

impl<S: Scalar, P: Clone> PairScan<S, P> {
    fn new() -> Self {
        Self {
            worst: None,
            tested: 0,
            skipped: 0,
            named: Vec::new(),
        }
    }

    fn absorb(&mut self, slack: S, x: P, y: P, z: P) {
        self.tested += 1;
        let worse = match &self.worst {
            None => true,
            Some((w, _, _, _)) => slack.total_cmp(w) == std::cmp::Ordering::Less,
        };
        if worse {
            self.worst = Some((slack, x, y, z));
        }
    }
}

/// Weak (or strong, via `variant`) geodesic convexity over sampled plus
/// adversarial pairs, with an optional pair filter.
#[allow(clippy::too_many_arguments)]
fn check_geodesic_with_filter<Sp: GeodesicSpace>(
    field: &ScalarField<'_, Sp>,
    params: &CheckParams<Sp::S>,
    variant: Variant,
    adversarial: &[(String, Sp::P, Sp::P)],
    max_pair_dist: Option<Sp::S>,
    pair_ok: impl Fn(&Sp::P, &Sp::P) -> bool,
    notion: &str,
) -> Result<ConvexityReport, SpaceError> {
    let space = field.space;
    let mut scan = PairScan::new();
    // Deterministic adversarial pairs first: these must resolve.
    for (label, x, y) in adversarial {
        if !pair_ok(x, y) {
            continue;
        }
        match pair_slack(field, x, y, variant) {
            Some((slack, z)) => {
                scan.named.push(NamedMargin {
                    label: label.clone(),
                    margin: ScalarRepr::of(slack),
                    witness: vec![space.point_key(x), space.point_key(y), space.point_key(&z)],
                });
                scan.absorb(slack, x.clone(), y.clone(), z);
            }
            None => {
                return Err(SpaceError::Resolution {
                    h: format!("{}", space.resolution()),
                    detail: format!(
                        "midpoint of adversarial pair ({}, {}) has no sample",
                        space.point_key(x),
                        space.point_key(y)
                    ),
                })
            }
        }
    }
    // Bulk pairs: exhaustive for small fields (pair budget covers all
    // pairs), else seeded-random.
    let n = field.len();
    let run_pair = |scan: &mut PairScan<Sp::S, Sp::P>, i: usize, j: usize| {
        if i == j {
            return;
        }
        let (x, y) = (field.point(i).clone(), field.point(j).clone());
        if !pair_ok(&x, &y) {
            return;
        }
        if let Some(dmax) = max_pair_dist {
            if space.dist(&x, &y).total_cmp(&dmax) == std::cmp::Ordering::Greater {
                return;
            }
        }
        match pair_slack(field, &x, &y, variant) {
            Some((slack, z)) => scan.absorb(slack, x, y, z),
            None => scan.skipped += 1,
        }
    };
    if n * (n - 1) / 2 <= params.pair_budget {
        for i in 0..n {
            for j in (i + 1)..n {
                run_pair(&mut scan, i, j);
            }
        }
    } else {
        let mut rng = crate::sampling::seeded(params.seed);
        for _ in 0..params.pair_budget {
            let i = crate::sampling::pick(&mut rng, n);
            let j = crate::sampling::pick(&mut rng, n);
            run_pair(&mut scan, i, j);
        }
    }
    let (pass, worst_margin, witness, witness_points) = match &scan.worst {
        None => (true, Sp::S::zero(), Vec::new(), Vec::new()),
        Some((w, x, y, z)) => {
            // Fail verdicts must reproduce at the witness.
            if w.total_cmp(&(-params.tau)) == std::cmp::Ordering::Less {
                let (re, _) = pair_slack(field, x, y, variant).expect("witness resolves");
                let drift = (re - *w).abs();
                assert!(
                    drift.to_f64() <= 1e-12,
                    "witness slack does not reproduce: {re} vs {w}"
                );
            }
            (
                w.total_cmp(&(-params.tau)) != std::cmp::Ordering::Less,
                *w,
                vec![space.point_key(x), space.point_key(y), space.point_key(z)],
                vec![
                    space.point_json(x),
                    space.point_json(y),
                    space.point_json(z),
                ],
            )
        }
    };
    Ok(ConvexityReport {
        notion: notion.into(),
        pass,
        worst_margin: ScalarRepr::of(worst_margin),
        witness,
        witness_points,
        pairs_tested: scan.tested,
        skipped: scan.skipped,
        tau: ScalarRepr::of(params.tau),
        delta: None,
        r_grid: Vec::new(),
        named: scan.named,
        notes: Vec::new(),
    })
}

/// Weak/strong geodesic convexity:
/// `extremum over z in M(x, y) of 2 f(z) <= f(x) + f(y) + tau`.
pub fn check_weak_geodesic<Sp: GeodesicSpace>(
    field: &ScalarField<'_, Sp>,
    params: &CheckParams<Sp::S>,
    variant: Variant,
    adversarial: &[(String, Sp::P, Sp::P)],
) -> Result<ConvexityReport, SpaceError> {
    let notion = match variant {
        Variant::Weak => "weak-geodesic",
        Variant::Strong => "strong-geodesic",
    };
    check_geodesic_with_filter(
        field,
        params,
        variant,
        adversarial,
        None,
        |_, _| true,
        notion,
    )
}

/// One doubling step of the local-to-global argument: a field passing
/// on pairs with `d <= delta` must pass on pairs with `d <= 2 delta`
/// within `2 tau`.
pub fn check_local_to_global<Sp: GeodesicSpace>(
    field: &ScalarField<'_, Sp>,
    params: &CheckParams<Sp::S>,
    delta: Sp::S,
) -> Result<(ConvexityReport, ConvexityReport), SpaceError> {
    let local = check_geodesic_with_filter(
        field,
        params,
        Variant::Weak,
        &[],
        Some(delta),
        |_, _| true,
        "weak-geodesic(local)",
    )?;
    let doubled_params = CheckParams {
        pair_budget: params.pair_budget,
        seed: params.seed,
        tau: params.tau + params.tau,
    };
    let mut doubled = check_geodesic_with_filter(
        field,
        &doubled_params,
        Variant::Weak,
        &[],
        Some(delta + delta),
        |_, _| true,
        "weak-geodesic(doubled)",
    )?;
    doubled.delta = Some(ScalarRepr::of(delta));
    Ok((local, doubled))
}

/// How the infinity-subharmonious radii are quantified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubharmonicMode {
    /// All centers must pass at every radius of the grid (`r <= delta`).
    Uniform,
    /// Each center needs some prefix of the radius grid to pass.
    Plain,
}

/// `2 f(z) <= max over B_r(z) of f + min over B_r(z) of f + tau` over the
/// given centers and radius grid.
pub fn check_infty_subharmonious<Sp: GeodesicSpace>(
    field: &ScalarField<'_, Sp>,
    centers: &[Sp::P],
    delta: Sp::S,
    r_grid: &[Sp::S],
    tau: Sp::S,
    mode: SubharmonicMode,
) -> Result<ConvexityReport, SpaceError> {
    let space = field.space;
    let coords = sample_coords(field);
    let mut r_grid: Vec<Sp::S> = r_grid
        .iter()
        .copied()
        .filter(|r| {
            r.total_cmp(&Sp::S::zero()) == std::cmp::Ordering::Greater
                && r.total_cmp(&delta) != std::cmp::Ordering::Greater
        })
        .collect();
    r_grid.sort_by(|a, b| a.total_cmp(b));
    if r_grid.is_empty() {
        return Err(SpaceError::Resolution {
            h: format!("{}", space.resolution()),
            detail: "empty radius grid".into(),
        });
    }
    let mut worst: Option<(Sp::S, Sp::P, Sp::S)> = None;
    let mut tested = 0usize;
    let mut fails = 0usize;
    for z in centers {
        let Some(iz) = field.index_of(z) else {
            continue;
        };
        let Ext::Finite(fz) = field.value(iz) else {
            continue;
        };
        let mut passing_prefix = 0usize;
        let mut prefix_alive = true;
        for &r in &r_grid {
            let ball = neighbors_within(field, &coords, iz, r);
            let mut lo: Option<Sp::S> = None;
            let mut hi: Option<Sp::S> = None;
            for j in ball {
                if let Ext::Finite(v) = field.value(j) {
                    lo = Some(match lo {
                        None => v,
                        Some(b) => b.min_s(v),
                    });
                    hi = Some(match hi {
                        None => v,
                        Some(b) => b.max_s(v),
                    });
                }
            }
            let (Some(lo), Some(hi)) = (lo, hi) else {
                continue;
            };
            tested += 1;
            let slack = hi + lo - (fz + fz);
            let ok = slack.total_cmp(&(-tau)) != std::cmp::Ordering::Less;
            if ok && prefix_alive {
                passing_prefix += 1;
            } else {
                prefix_alive = false;
            }
            let record = match mode {
                SubharmonicMode::Uniform => true,
                // Plain mode only blames a center whose smallest radius
                // already fails (no admissible delta_z exists).
                SubharmonicMode::Plain => passing_prefix == 0,
            };
            if record {
                let worse = match &worst {
                    None => true,
                    Some((w, _, _)) => slack.total_cmp(w) == std::cmp::Ordering::Less,
                };
                if worse {
                    worst = Some((slack, z.clone(), r));
                }
            }
        }
        if passing_prefix == 0 {
            fails += 1;
        }
    }
    let (pass, margin, witness, witness_points) = match &worst {
        None => (true, Sp::S::zero(), Vec::new(), Vec::new()),
        Some((w, z, r)) => {
            let pass = match mode {
                SubharmonicMode::Uniform => w.total_cmp(&(-tau)) != std::cmp::Ordering::Less,
                SubharmonicMode::Plain => fails == 0,
            };
            (
                pass,
                *w,
                vec![space.point_key(z), format!("r={}", r)],
                vec![space.point_json(z)],
            )
        }
    };
    Ok(ConvexityReport {
        notion: match mode {
            SubharmonicMode::Uniform => "infty-subharmonious(uniform)".into(),
            SubharmonicMode::Plain => "infty-subharmonious".into(),
        },
        pass,
        worst_margin: ScalarRepr::of(margin),
        witness,
        witness_points,
        pairs_tested: tested,
        skipped: 0,
        tau: ScalarRepr::of(tau),
        delta: Some(ScalarRepr::of(delta)),
        r_grid: r_grid.iter().map(|r| ScalarRepr::of(*r)).collect(),
        named: Vec::new(),
        notes: Vec::new(),
    })
}

/// True iff every `x` in each sampled ball around `z` has a mirror `y`
/// in the same ball with `z` a midpoint of `(x, y)`.
pub fn geodesic_interior<Sp: GeodesicSpace>(space: &Sp, z: &Sp::P, r_grid: &[Sp::S]) -> bool {
    for &r in r_grid {
        let ball = space.ball_sample(z, r);
        for x in &ball {
            let mirrored = ball.iter().any(|y| space.is_midpoint(x, y, z));
            if !mirrored {
                return false;
            }
        }
    }
    true
}

/// Pointwise convexity: at every geodesically interior center, some
/// midpoint pair within each small ball satisfies the convexity
/// inequality.
pub fn check_pointwise<Sp: GeodesicSpace>(
    field: &ScalarField<'_, Sp>,
    centers: &[Sp::P],
    r_grid: &[Sp::S],
    tau: Sp::S,
) -> Result<ConvexityReport, SpaceError> {
    let space = field.space;
    let coords = sample_coords(field);
    let mut worst: Option<(Sp::S, Sp::P, Sp::S)> = None;
    let mut tested = 0usize;
    let mut pass = true;
    let mut skipped = 0usize;
    for z in centers {
        if !geodesic_interior(space, z, r_grid) {
            skipped += 1;
            continue;
        }
        let Some(iz) = field.index_of(z) else {
            skipped += 1;
            continue;
        };
        let Ext::Finite(fz) = field.value(iz) else {
            skipped += 1;
            continue;
        };
        for &r in r_grid {
            let ball: Vec<usize> = neighbors_within(field, &coords, iz, r)
                .into_iter()
                .filter(|&j| j != iz)
                .collect();
            // Best achievable slack over midpoint pairs in the ball.
            let mut best: Option<Sp::S> = None;
            for (ai, &a) in ball.iter().enumerate() {
                for &b in ball.iter().skip(ai) {
                    if !space.is_midpoint(field.point(a), field.point(b), z) {
                        continue;
                    }
                    let (Ext::Finite(fa), Ext::Finite(fb)) = (field.value(a), field.value(b))
                    else {
                        continue;
                    };
                    let slack = fa + fb - (fz + fz);
                    best = Some(match best {
                        None => slack,
                        Some(cur) => cur.max_s(slack),
                    });
                }
            }
            let Some(slack) = best else {
                // No midpoint pair among the samples (field truncation,
                // e.g. near a patch boundary): not resolvable here.
                skipped += 1;
                continue;
            };
            tested += 1;
            if slack.total_cmp(&(-tau)) == std::cmp::Ordering::Less {
                pass = false;
                let worse = match &worst {
                    None => true,
                    Some((w, _, _)) => slack.total_cmp(w) == std::cmp::Ordering::Less,
                };
                if worse {
                    worst = Some((slack, z.clone(), r));
                }
            }
        }
    }
    let (margin, witness, witness_points) = match &worst {
        None => (Sp::S::zero(), Vec::new(), Vec::new()),
        Some((w, z, r)) => (
            *w,
            vec![space.point_key(z), format!("r={}", r)],
            vec![space.point_json(z)],
        ),
    };
    Ok(ConvexityReport {
        notion: "pointwise".into(),
        pass,
        worst_margin: ScalarRepr::of(margin),
        witness,
        witness_points,
        pairs_tested: tested,
        skipped,
        tau: ScalarRepr::of(tau),
        delta: None,
        r_grid: r_grid.iter().map(|r| ScalarRepr::of(*r)).collect(),
        named: Vec::new(),
        notes: Vec::new(),
    })
}

/// The 1-weak lattice constraint: coordinate gaps `min(|dx1|, |dx2|)`
/// either zero or at least one.
pub fn one_weak_pair(x: &LatticePoint, y: &LatticePoint) -> bool {
    let g1 = (x.x1 - y.x1).abs();
    let g2 = (x.x2 - y.x2).abs();
    let gap = g1.min_s(g2);
    gap == Rat::zero() || gap.total_cmp(&Rat::one()) != std::cmp::Ordering::Less
}

/// Weak geodesic convexity restricted to the 1-weak pair set on the
/// lattice.
pub fn check_one_weak_lattice(
    field: &ScalarField<'_, Lattice2>,
    params: &CheckParams<Rat>,
    variant: Variant,
    adversarial: &[(String, LatticePoint, LatticePoint)],
) -> Result<ConvexityReport, SpaceError> {
    let notion = match variant {
        Variant::Weak => "one-weak",
        Variant::Strong => "one-strong",
    };
    check_geodesic_with_filter(
        field,
        params,
        variant,
        adversarial,
        None,
        one_weak_pair,
        notion,
    )
}

/// Explicit midpoint candidate from the 1-weak convexity argument for
/// the case `min(|dx1|, |dx2|) >= 1` (assuming the symmetric normal
/// form `x1 + y1 >= 0`, `x2 + y2 >= x1 + y1 >= 0`).
///
/// The construction is equidistant in the plain l1 metric; on the
/// intrinsic graph metric it lands in the true midpoint set only when a
/// monotone staircase realizes both halves (see the unit tests for a
/// pair where it does not, which is also why the norm is not 1-weakly
/// geodesically convex in the intrinsic metric).
pub fn one_weak_explicit_midpoint(x: &LatticePoint, y: &LatticePoint) -> LatticePoint {
    let m1 = (x.x1 + y.x1).half();
    let m2 = (x.x2 + y.x2).half();
    let e1 = m1 - Rat::from_int(m1.floor_int());
    let e2 = m2 - Rat::from_int(m2.floor_int());
    let floor1 = Rat::from_int(m1.floor_int());
    let floor2 = Rat::from_int(m2.floor_int());
    let half = Rat::from_ratio(1, 2);
    if (x.x1 - y.x1) * (x.x2 - y.x2) >= Rat::zero() {
        if e1.total_cmp(&half) != std::cmp::Ordering::Greater {
            LatticePoint::new(floor1, m2 + e1)
        } else {
            LatticePoint::new(floor1 + Rat::one(), m2 - Rat::one() + e1)
        }
    } else if e1.total_cmp(&e2) != std::cmp::Ordering::Greater {
        LatticePoint::new(floor1, m2 - e1)
    } else {
        LatticePoint::new(m1 - e2, floor2)
    }
}

/// Result of the lattice rigidity analysis.
pub struct RigidityReport {
    /// Bounds pinned by exact linear-inequality elimination, per corner
    /// value `u(1,0), u(0,1), u(1,1)` (must all be `[0, 0]`).
    pub bounds: Vec<(Rat, Rat)>,
    pub unique_zero: bool,
    /// Randomized search outcome: number of fields that passed weak
    /// convexity, all of which were constant.
    pub passing_fields: usize,
    pub nonconstant_passing: usize,
    pub trials: usize,
}

/// Exact Fourier-Motzkin elimination of the limit inequalities forced
/// by weak geodesic convexity on one closed lattice cell (corner values
/// normalized by `u(0,0) = 0`):
///
/// 1. `u(1,1) >= 2 u(1,0)`   (pairs `(e,0),(1,1-e)`, `e -> 0`)
/// 2. `u(1,1) >= 2 u(0,1)`   (pairs `(0,e),(1-e,1)`)
/// 3. `u(1,0) + u(0,1) >= 2 u(1,1)`  (pairs `(e,1),(1,e)`)
/// 4. `u(1,0) + u(0,1) >= 0` (pairs `(a,0),(0,a)`, `a -> 1`, whose
///    unique midpoint is the origin)
///
/// The first three alone admit nonzero solutions (e.g. `(-1,-1,-3/2)`);
/// the fourth limit pair closes the system to the origin only.
pub fn lattice_rigidity_elimination() -> (Vec<(Rat, Rat)>, bool) {
    // Rows encode c0*a + c1*b + c2*c + c3 >= 0 over (a, b, c).
    let r = Rat::from_int;
    let rows: Vec<[Rat; 4]> = vec![
        [r(-2), r(0), r(1), r(0)],
        [r(0), r(-2), r(1), r(0)],
        [r(1), r(1), r(-2), r(0)],
        [r(1), r(1), r(0), r(0)],
    ];
    let mut bounds = Vec::new();
    let mut unique = true;
    for var in 0..3 {
        let (lo, hi) = fm_variable_bounds(&rows, var);
        unique &= lo == Some(Rat::zero()) && hi == Some(Rat::zero());
        bounds.push((
            lo.unwrap_or(Rat::from_int(i64::MIN / 2)),
            hi.unwrap_or(Rat::from_int(i64::MAX / 2)),
        ));
    }
    (bounds, unique)
}

/// Fourier-Motzkin: eliminate all variables except `keep` and read off
/// the interval for it.
fn fm_variable_bounds(rows: &[[Rat; 4]], keep: usize) -> (Option<Rat>, Option<Rat>) {
    let mut rows: Vec<Vec<Rat>> = rows.iter().map(|r| r.to_vec()).collect();
    let nvars = 3;
    for var in 0..nvars {
        if var == keep {
            continue;
        }
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut rest = Vec::new();
        for row in rows {
            match row[var].total_cmp(&Rat::zero()) {
                std::cmp::Ordering::Greater => pos.push(row),
                std::cmp::Ordering::Less => neg.push(row),
                std::cmp::Ordering::Equal => rest.push(row),
            }
        }
        let mut next = rest;
        for p in &pos {
            for q in &neg {
                // p[var] > 0 >= ... combine p * (-q[var]) + q * p[var].
                let a = -q[var];
                let b = p[var];
                let mut combined = vec![Rat::zero(); 4];
                for k in 0..4 {
                    combined[k] = p[k] * a + q[k] * b;
                }
                next.push(combined);
            }
        }
        rows = next;
    }
    // Remaining rows: c * x_keep + d >= 0.
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    for row in &rows {
        let c = row[keep];
        let d = row[3];
        match c.total_cmp(&Rat::zero()) {
            std::cmp::Ordering::Greater => {
                let bound = -d / c;
                lo = Some(match lo {
                    None => bound,
                    Some(b) => b.max_s(bound),
                });
            }
            std::cmp::Ordering::Less => {
                let bound = -d / c;
                hi = Some(match hi {
                    None => bound,
                    Some(b) => b.min_s(bound),
                });
            }
            std::cmp::Ordering::Equal => {}
        }
    }
    (lo, hi)
}

/// Rigidity via elimination plus a randomized search for nonconstant
/// weakly-geodesically-convex fields on a 3x3 lattice patch.
pub fn lattice_rigidity_check(tau: Rat, trials: usize, seed: u64) -> RigidityReport {
    let (bounds, unique_zero) = lattice_rigidity_elimination();
    let lat = Lattice2::new(Rat::from_ratio(1, 2)).expect("valid resolution");
    let pts = lat.patch(0, 2, 0, 2);
    // Precompute every pair's midpoint sample indices once; trials then
    // evaluate pure value inequalities.
    let index_of = |p: &LatticePoint| pts.binary_search(p).ok();
    let mut pair_mids: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let mids = lat.midpoints(&pts[i], &pts[j]);
            let ids: Option<Vec<usize>> = mids.iter().map(&index_of).collect();
            if let Some(ids) = ids {
                if !ids.is_empty() {
                    pair_mids.push((i, j, ids));
                }
            }
        }
    }
    let mut rng = crate::sampling::seeded(seed);
    let tau_f = tau.to_f64();
    let mut passing = 0usize;
    let mut nonconstant_passing = 0usize;
    for trial in 0..trials {
        // Mix of raw-random fields and perturbed constants, so the
        // near-constant cone boundary is probed as well.
        let base = crate::sampling::uniform(&mut rng, -1.0, 1.0);
        let amp = match trial % 4 {
            0 => 1.0,
            1 => 1e-2,
            2 => 1e-6,
            _ => 0.0,
        };
        let values: Vec<f64> = (0..pts.len())
            .map(|_| base + amp * crate::sampling::uniform(&mut rng, -1.0, 1.0))
            .collect();
        let mut ok = true;
        for (i, j, mids) in &pair_mids {
            let best = mids
                .iter()
                .map(|&k| values[k])
                .fold(f64::INFINITY, f64::min);
            if 2.0 * best > values[*i] + values[*j] + tau_f {
                ok = false;
                break;
            }
        }
        if ok {
            passing += 1;
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if hi - lo > tau_f {
                nonconstant_passing += 1;
            }
        }
    }
    RigidityReport {
        bounds,
        unique_zero,
        passing_fields: passing,
        nonconstant_passing,
        trials,
    }
}

/// Midpoint-map perturbation bound on uniquely geodesic spaces:
/// `|d(z, m(x', y)) - d(z, m(x, y))| <= d(x, x') / 2 + eps` over seeded
/// quadruples from `points`. Returns the worst violation (positive =
/// bound exceeded).
pub fn midpoint_perturbation_worst<Sp: GeodesicSpace>(
    space: &Sp,
    points: &[Sp::P],
    quadruples: usize,
    seed: u64,
) -> Sp::S {
    let mut rng = crate::sampling::seeded(seed);
    let n = points.len();
    let mut worst = Sp::S::zero();
    for _ in 0..quadruples {
        let x = &points[crate::sampling::pick(&mut rng, n)];
        let xp = &points[crate::sampling::pick(&mut rng, n)];
        let y = &points[crate::sampling::pick(&mut rng, n)];
        let z = &points[crate::sampling::pick(&mut rng, n)];
        let m = &space.midpoints(x, y)[0];
        let mp = &space.midpoints(xp, y)[0];
        let lhs = (space.dist(z, mp) - space.dist(z, m)).abs();
        let rhs = space.dist(x, xp).half() + space.eps_mid();
        worst = worst.max_s(lhs - rhs);
    }
    worst
}

/// Growth-envelope bound for solved slices on uniquely geodesic spaces:
/// `2 u(z) - u(x) - u(y) <= C (d(z, m(x,y)) + 3 t)` with
/// `C = max(2 K, C_H)`. Returns `(worst violation, fitted C)`.
pub fn growth_envelope_worst<Sp: GeodesicSpace>(
    field: &ScalarField<'_, Sp>,
    c: Sp::S,
    t: Sp::S,
    triples: usize,
    seed: u64,
    tau: Sp::S,
) -> (Sp::S, f64) {
    let space = field.space;
    let mut rng = crate::sampling::seeded(seed);
    let n = field.len();
    let mut worst = Sp::S::zero();
    let mut fitted = 0.0f64;
    let three_t = t + t + t;
    for _ in 0..triples {
        let ix = crate::sampling::pick(&mut rng, n);
        let iy = crate::sampling::pick(&mut rng, n);
        let iz = crate::sampling::pick(&mut rng, n);
        let (Ext::Finite(ux), Ext::Finite(uy), Ext::Finite(uz)) =
            (field.value(ix), field.value(iy), field.value(iz))
        else {
            continue;
        };
        let m = &space.midpoints(field.point(ix), field.point(iy))[0];
        let lhs = uz + uz - ux - uy;
        let scale = space.dist(field.point(iz), m) + three_t;
        let rhs = c * scale + tau;
        worst = worst.max_s(lhs - rhs);
        if scale.to_f64() > 0.0 {
            fitted = fitted.max(lhs.to_f64() / scale.to_f64());
        }
    }
    (worst, fitted)
}
