//! Hopf-Lax solution operators on sampled geodesic spaces.
//!
//! `solve_inf` evaluates `u(x,t) = min_a { u0(a) + t L(d(a,x)/t) }` over
//! the candidates within the finite propagation radius `V t`;
//! `solve_sup` the mirrored supremum form, and `solve_eikonal` the
//! running-extremum special case for linear-growth Hamiltonians.
//! Candidates are the sample points of `u0`, so discretization error is
//! `O(K h + Lip(L) h)` and is the solver's to report, never to hide.
//!
//! Per-point evaluations run in parallel; each point reduces over
//! candidates in canonical order (strict improvement only), so values
//! and witnesses are identical for any thread count.

use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::ext::Ext;
use crate::field::ScalarField;
use crate::hamiltonian::{Hamiltonian, HamiltonianError, Lagrangian};
use crate::scalar::Scalar;
use crate::space::GeodesicSpace;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("cannot bound the candidate set: u0 has no Lipschitz constant and L is coercive")]
    UnboundedCandidates,
    #[error("all candidates at sample {index} have infinite cost")]
    AllInfinite { index: usize },
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error("field error: {0}")]
    Field(String),
}

/// Which extremum the operator takes: `Inf` solves (HJ)
/// `du/dt + H(|grad u|) = 0`, `Sup` solves (HJ2) `du/dt - H(|grad u|) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolvePath {
    Inf,
    Sup,
}

pub struct SolveOptions<S> {
    /// Multiplier on the candidate radius (used by the widening check).
    pub widen: S,
    /// Value tolerance treated as "unchanged" by validation passes.
    pub tol: S,
}

impl<S: Scalar> Default for SolveOptions<S> {
    fn default() -> Self {
        Self {
            widen: S::one(),
            // tol_solve: 0 for exact scalars, 1e-9 for floats.
            tol: if S::EXACT {
                S::zero()
            } else {
                S::from_ratio(1, 1_000_000_000)
            },
        }
    }
}

/// Result of one Hopf-Lax evaluation: the solved slice plus, per sample
/// point, the extremizing candidate and the candidate-set size.
pub struct SolveReport<'a, Sp: GeodesicSpace> {
    pub field: ScalarField<'a, Sp>,
    /// Index into `u0`'s samples of the extremizer per solved point.
    pub witnesses: Vec<usize>,
    pub candidate_counts: Vec<usize>,
    /// Candidate radius actually used (`V t`, after widening).
    pub radius: Sp::S,
    pub wall_ms: f64,
}

fn candidate_radius<Sp: GeodesicSpace>(
    u0: &ScalarField<'_, Sp>,
    lag: &Lagrangian<Sp::S>,
    t: Sp::S,
) -> Result<Sp::S, SolveError> {
    let v = match (u0.lipschitz(), lag.is_coercive()) {
        (Some(k), _) => lag.speed_bound(k)?,
        (None, false) => lag.speed_bound(Sp::S::zero())?,
        (None, true) => return Err(SolveError::UnboundedCandidates),
    };
    Ok(v * t)
}

/// Values, witness indices and candidate counts of one evaluation pass.
type PassOutput<S> = (Vec<Ext<S>>, Vec<usize>, Vec<usize>);

fn extremize<Sp: GeodesicSpace>(
    u0: &ScalarField<'_, Sp>,
    eval: &[Sp::P],
    radius: Sp::S,
    path: SolvePath,
    value_of: impl Fn(usize, Sp::S) -> Ext<Sp::S> + Sync,
) -> Result<PassOutput<Sp::S>, SolveError> {
    let space = u0.space;
    let slack = space.eps_mid();
    let r = radius + slack;
    let r_f64 = r.to_f64();
    let cand_coords: Vec<Vec<f64>> = u0.points().iter().map(|p| space.approx_coords(p)).collect();
    type OnePoint<S> = Result<(Ext<S>, usize, usize), SolveError>;
    let results: Vec<OnePoint<Sp::S>> = eval
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let xc = space.approx_coords(x);
            let mut best: Option<(Sp::S, usize)> = None;
            let mut count = 0usize;
            for (j, a) in u0.points().iter().enumerate() {
                if space.approx_dist_lower(&cand_coords[j], &xc) > r_f64 {
                    continue;
                }
                let d = space.dist(a, x);
                if d.total_cmp(&r) == std::cmp::Ordering::Greater {
                    continue;
                }
                count += 1;
                let val = match value_of(j, d) {
                    Ext::Finite(v) => v,
                    // Infinite costs never win their extremum.
                    _ => continue,
                };
                let improves = match &best {
                    None => true,
                    Some((b, _)) => match path {
                        SolvePath::Inf => val.total_cmp(b) == std::cmp::Ordering::Less,
                        SolvePath::Sup => val.total_cmp(b) == std::cmp::Ordering::Greater,
                    },
                };
                if improves {
                    best = Some((val, j));
                }
            }
            match best {
                Some((v, j)) => Ok((Ext::Finite(v), j, count)),
                None => Err(SolveError::AllInfinite { index: i }),
            }
        })
        .collect();
    let mut values = Vec::with_capacity(eval.len());
    let mut witnesses = Vec::with_capacity(eval.len());
    let mut counts = Vec::with_capacity(eval.len());
    for r in results {
        let (v, w, c) = r?;
        values.push(v);
        witnesses.push(w);
        counts.push(c);
    }
    Ok((values, witnesses, counts))
}

fn run_solve<'a, Sp: GeodesicSpace>(
    space: &'a Sp,
    u0: &ScalarField<'a, Sp>,
    lag: &Lagrangian<Sp::S>,
    t: Sp::S,
    eval: Vec<Sp::P>,
    path: SolvePath,
    opts: &SolveOptions<Sp::S>,
) -> Result<SolveReport<'a, Sp>, SolveError> {
    let start = Instant::now();
    let mut eval = eval;
    crate::space::canonical_sort(space, &mut eval);
    let radius = candidate_radius(u0, lag, t)? * opts.widen;
    // Same inclusion slack as the candidate-ball filter, so boundary
    // candidates cannot pass the filter yet draw infinite cost.
    let slack = space.eps_mid();
    let (values, witnesses, counts) = extremize(u0, &eval, radius, path, |j, d| {
        let cost = lag.cost_slack(d, t, slack);
        match path {
            SolvePath::Inf => u0.value(j) + cost,
            SolvePath::Sup => u0.value(j) + (-cost),
        }
    })?;
    let field = ScalarField::from_sorted(space, eval, values, u0.lipschitz())
        .map_err(|e| SolveError::Field(e.to_string()))?;
    Ok(SolveReport {
        field,
        witnesses,
        candidate_counts: counts,
        radius,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// `u(x,t) = min over a in B_{Vt}(x) of u0(a) + t L(d(a,x)/t)`.
pub fn solve_inf<'a, Sp: GeodesicSpace>(
    space: &'a Sp,
    u0: &ScalarField<'a, Sp>,
    lag: &Lagrangian<Sp::S>,
    t: Sp::S,
    eval: Vec<Sp::P>,
) -> Result<SolveReport<'a, Sp>, SolveError> {
    run_solve(
        space,
        u0,
        lag,
        t,
        eval,
        SolvePath::Inf,
        &SolveOptions::default(),
    )
}

/// `u(x,t) = max over a in B_{Vt}(x) of u0(a) - t L(d(a,x)/t)`.
pub fn solve_sup<'a, Sp: GeodesicSpace>(
    space: &'a Sp,
    u0: &ScalarField<'a, Sp>,
    lag: &Lagrangian<Sp::S>,
    t: Sp::S,
    eval: Vec<Sp::P>,
) -> Result<SolveReport<'a, Sp>, SolveError> {
    run_solve(
        space,
        u0,
        lag,
        t,
        eval,
        SolvePath::Sup,
        &SolveOptions::default(),
    )
}

/// Like [`solve_inf`]/[`solve_sup`] but with explicit options (used by
/// the widening validation).
pub fn solve_with<'a, Sp: GeodesicSpace>(
    space: &'a Sp,
    u0: &ScalarField<'a, Sp>,
    lag: &Lagrangian<Sp::S>,
    t: Sp::S,
    eval: Vec<Sp::P>,
    path: SolvePath,
    opts: &SolveOptions<Sp::S>,
) -> Result<SolveReport<'a, Sp>, SolveError> {
    run_solve(space, u0, lag, t, eval, path, opts)
}

/// Time-dependent eikonal solution: the running extremum of `u0` over
/// the ball `B_t(x)`. Equals the Hopf-Lax operator with the linear
/// Lagrangian under the extended-real convention.
pub fn solve_eikonal<'a, Sp: GeodesicSpace>(
    space: &'a Sp,
    u0: &ScalarField<'a, Sp>,
    t: Sp::S,
    path: SolvePath,
    eval: Vec<Sp::P>,
) -> Result<SolveReport<'a, Sp>, SolveError> {
    let lag = Lagrangian::Linear { vmax: Sp::S::one() };
    run_solve(space, u0, &lag, t, eval, path, &SolveOptions::default())
}

/// Outcome of the dynamic-programming consistency check: compares
/// `u(., t)` solved directly against re-solving from the slice at `s`.
pub struct DppReport<S> {
    pub max_discrepancy: S,
    pub witness_index: usize,
    pub tolerance: S,
    pub pass: bool,
}

/// Verifies `u(x,t) = extremum_a { u(a,s) + (t-s) L(d(a,x)/(t-s)) }`
/// within `tol` at every sample point of `eval`.
#[allow(clippy::too_many_arguments)]
pub fn dpp_check<'a, Sp: GeodesicSpace>(
    space: &'a Sp,
    u0: &ScalarField<'a, Sp>,
    lag: &Lagrangian<Sp::S>,
    s: Sp::S,
    t: Sp::S,
    path: SolvePath,
    eval: Vec<Sp::P>,
    tol: Sp::S,
) -> Result<DppReport<Sp::S>, SolveError> {
    assert!(
        Sp::S::zero().total_cmp(&s) == std::cmp::Ordering::Less
            && s.total_cmp(&t) == std::cmp::Ordering::Less,
        "need 0 < s < t"
    );
    let opts = SolveOptions::default();
    let direct = run_solve(space, u0, lag, t, eval.clone(), path, &opts)?;
    // Intermediate slice on the candidate set that can feed the second hop.
    let mid = run_solve(space, u0, lag, s, u0.points().to_vec(), path, &opts)?;
    let composed = run_solve(space, &mid.field, lag, t - s, eval, path, &opts)?;
    let mut max_disc = Sp::S::zero();
    let mut witness = 0usize;
    for i in 0..direct.field.len() {
        let a = direct.field.value(i).expect_finite("direct solve");
        let b = composed.field.value(i).expect_finite("composed solve");
        let d = (a - b).abs();
        if d.total_cmp(&max_disc) == std::cmp::Ordering::Greater {
            max_disc = d;
            witness = i;
        }
    }
    let pass = max_disc.total_cmp(&tol) != std::cmp::Ordering::Greater;
    Ok(DppReport {
        max_discrepancy: max_disc,
        witness_index: witness,
        tolerance: tol,
        pass,
    })
}

/// Grid residual of the PDE on a uniform 1-D grid: at interior points
/// whose one-sided difference quotients agree within `tol_kink`
/// (differentiability proxy), checks
/// `|(u(x,t+dt)-u(x,t))/dt +- H(|grad u|)| <= tol`; kink points are
/// skipped and reported.
pub struct ResidualReport {
    pub max_residual: f64,
    pub worst_index: Option<usize>,
    pub kink_indices: Vec<usize>,
    pub checked: usize,
}

#[allow(clippy::too_many_arguments)]
pub fn residual_check(
    u_now: &[f64],
    u_next: &[f64],
    grid_h: f64,
    dt: f64,
    hamiltonian: &Hamiltonian,
    path: SolvePath,
    tol_kink: f64,
    halo_cells: usize,
) -> ResidualReport {
    assert_eq!(u_now.len(), u_next.len());
    let n = u_now.len();
    // First pass: locate kinks of the current slice. A kink travels up
    // to (front speed) * dt during the step, so callers widen the
    // skipped zone by `halo_cells` on each side.
    let mut is_kink = vec![false; n];
    for i in 1..n.saturating_sub(1) {
        let dplus = (u_now[i + 1] - u_now[i]) / grid_h;
        let dminus = (u_now[i] - u_now[i - 1]) / grid_h;
        if (dplus - dminus).abs() > tol_kink {
            is_kink[i] = true;
        }
    }
    let mut skip = vec![false; n];
    for (i, &kink) in is_kink.iter().enumerate() {
        if kink {
            let lo = i.saturating_sub(halo_cells);
            let hi = (i + halo_cells).min(n - 1);
            for s in skip.iter_mut().take(hi + 1).skip(lo) {
                *s = true;
            }
        }
    }
    let mut max_residual = 0.0f64;
    let mut worst = None;
    let mut kinks = Vec::new();
    let mut checked = 0usize;
    for i in 1..n.saturating_sub(1) {
        if skip[i] {
            kinks.push(i);
            continue;
        }
        let dplus = (u_now[i + 1] - u_now[i]) / grid_h;
        let dminus = (u_now[i] - u_now[i - 1]) / grid_h;
        let grad = dplus.abs().max(dminus.abs());
        let dudt = (u_next[i] - u_now[i]) / dt;
        let residual = match path {
            SolvePath::Inf => (dudt + hamiltonian.eval(grad)).abs(),
            SolvePath::Sup => (dudt - hamiltonian.eval(grad)).abs(),
        };
        checked += 1;
        if residual > max_residual {
            max_residual = residual;
            worst = Some(i);
        }
    }
    ResidualReport {
        max_residual,
        worst_index: worst,
        kink_indices: kinks,
        checked,
    }
}

/// One member of the `H(p) = p^alpha / alpha` approximation family for
/// the eikonal equation, solved through the closed-form conjugate
/// `L(v) = v^beta / beta`, `beta = alpha/(alpha-1)`.
pub fn alpha_family<'a, Sp: GeodesicSpace>(
    space: &'a Sp,
    u0: &ScalarField<'a, Sp>,
    alpha: f64,
    t: Sp::S,
    eval: Vec<Sp::P>,
) -> Result<SolveReport<'a, Sp>, SolveError> {
    assert!(alpha > 1.0, "alpha family needs alpha > 1");
    let beta = alpha / (alpha - 1.0);
    let lag = Lagrangian::Power { beta };
    run_solve(
        space,
        u0,
        &lag,
        t,
        eval,
        SolvePath::Inf,
        &SolveOptions::default(),
    )
}

/// Two-sided bound on `sup |u^alpha - u|` for `K`-Lipschitz data:
/// `max((alpha-1) t / alpha, K (V_alpha - 1) t)` with
/// `V_alpha = (beta K)^(1/(beta-1))`.
pub fn alpha_gap_bound(alpha: f64, k: f64, t: f64) -> f64 {
    let beta = alpha / (alpha - 1.0);
    let v_alpha = (beta * k).powf(1.0 / (beta - 1.0));
    let upper = (alpha - 1.0) * t / alpha;
    let lower = k * (v_alpha - 1.0).abs() * t;
    upper.max(lower)
}

/// Max absolute widening drift: re-solves on a subsample with the
/// candidate radius doubled and reports the largest value change
/// (validates the finite-propagation bound).
pub fn widen_check<'a, Sp: GeodesicSpace>(
    space: &'a Sp,
    u0: &ScalarField<'a, Sp>,
    lag: &Lagrangian<Sp::S>,
    t: Sp::S,
    path: SolvePath,
    eval: Vec<Sp::P>,
) -> Result<Sp::S, SolveError> {
    let base = solve_with(
        space,
        u0,
        lag,
        t,
        eval.clone(),
        path,
        &SolveOptions::default(),
    )?;
    let wide = solve_with(
        space,
        u0,
        lag,
        t,
        eval,
        path,
        &SolveOptions {
            widen: Sp::S::from_int(2),
            ..SolveOptions::default()
        },
    )?;
    let mut max_change = Sp::S::zero();
    for i in 0..base.field.len() {
        let a = base.field.value(i).expect_finite("base");
        let b = wide.field.value(i).expect_finite("wide");
        max_change = max_change.max_s((a - b).abs());
    }
    Ok(max_change)
}
