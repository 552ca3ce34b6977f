//! Hamiltonians `H : R+ -> R` and their Legendre conjugates
//! `L(v) = sup_{p >= 0} (p v - H(p))`.
//!
//! Closed forms are registered for the families the experiments use
//! (`p^alpha / alpha`, linear, quadratic); everything else goes through
//! a sampled convex table refined by golden-section search. The
//! conjugate drives the Hopf-Lax solvers via the cost `t L(d / t)` and
//! the finite propagation speed `V = sup { v : L(v)/v <= K }`.

use thiserror::Error;

use crate::ext::Ext;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum HamiltonianError {
    #[error("conjugate sup attained at p_max = {p_max} for v = {v}; raise p_max")]
    Truncated { v: f64, p_max: f64 },
    #[error("Lagrangian is not coercive; propagation speed is unbounded (use the eikonal path)")]
    UnboundedSpeed,
    #[error("assumption violated: {0}")]
    Assumption(String),
}

/// Structural flags (H1)-(H3): continuity with `H(0) = 0`, nondecreasing
/// convexity, and coercivity `H(p)/p -> inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HFlags {
    pub h1: bool,
    pub h2: bool,
    pub h3: bool,
}

/// A Hamiltonian given by an evaluator plus structural flags and an
/// optional closed-form conjugate tag.
pub struct Hamiltonian {
    eval: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub flags: HFlags,
    pub tag: Option<ConjugateTag>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConjugateTag {
    /// `H(p) = p^alpha / alpha`, conjugate `L(v) = v^beta / beta`.
    Power { alpha: f64 },
    /// `H(p) = p`: `L = 0` on `[0, 1]`, `+inf` beyond (eikonal).
    Linear,
    /// `H(p) = p^2 / 2`: `L(v) = v^2 / 2`.
    Quadratic,
}

impl Hamiltonian {
    pub fn power(alpha: f64) -> Self {
        assert!(alpha > 1.0, "power Hamiltonian needs alpha > 1");
        Self {
            eval: Box::new(move |p| p.powf(alpha) / alpha),
            flags: HFlags {
                h1: true,
                h2: true,
                h3: true,
            },
            tag: Some(if alpha == 2.0 {
                ConjugateTag::Quadratic
            } else {
                ConjugateTag::Power { alpha }
            }),
        }
    }

    pub fn linear() -> Self {
        Self {
            eval: Box::new(|p| p),
            flags: HFlags {
                h1: true,
                h2: true,
                h3: false,
            },
            tag: Some(ConjugateTag::Linear),
        }
    }

    pub fn quadratic() -> Self {
        Self::power(2.0)
    }

    /// Piecewise-linear Hamiltonian through `(p, H(p))` sample points.
    pub fn table(points: Vec<(f64, f64)>, flags: HFlags) -> Result<Self, HamiltonianError> {
        if points.len() < 2 {
            return Err(HamiltonianError::Assumption(
                "table Hamiltonian needs at least two points".into(),
            ));
        }
        let mut pts = points;
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pts[0].0 != 0.0 {
            return Err(HamiltonianError::Assumption(
                "table must start at p = 0".into(),
            ));
        }
        Ok(Self {
            eval: Box::new(move |p| {
                if p <= pts[0].0 {
                    return pts[0].1;
                }
                for w in pts.windows(2) {
                    if p <= w[1].0 {
                        let t = (p - w[0].0) / (w[1].0 - w[0].0);
                        return w[0].1 + t * (w[1].1 - w[0].1);
                    }
                }
                // extrapolate with the last slope
                let n = pts.len();
                let slope = (pts[n - 1].1 - pts[n - 2].1) / (pts[n - 1].0 - pts[n - 2].0);
                pts[n - 1].1 + slope * (p - pts[n - 1].0)
            }),
            flags,
            tag: None,
        })
    }

    pub fn eval(&self, p: f64) -> f64 {
        (self.eval)(p)
    }

    /// The registered closed-form conjugate, when this Hamiltonian
    /// carries a tag; the numeric [`legendre`] table is the fallback.
    /// Power conjugates are floating-point only.
    pub fn closed_form_conjugate<S: Scalar>(&self) -> Option<Lagrangian<S>> {
        match self.tag? {
            ConjugateTag::Linear => Some(Lagrangian::Linear { vmax: S::one() }),
            ConjugateTag::Quadratic => Some(Lagrangian::Quadratic),
            ConjugateTag::Power { alpha } => {
                if S::EXACT {
                    None
                } else {
                    Some(Lagrangian::Power {
                        beta: alpha / (alpha - 1.0),
                    })
                }
            }
        }
    }

    /// Checks (H1) at zero and monotonicity on a sample grid when (H2)
    /// is declared.
    pub fn validate(&self, p_max: f64) -> Result<(), HamiltonianError> {
        if self.flags.h1 && self.eval(0.0).abs() > 1e-12 {
            return Err(HamiltonianError::Assumption(format!(
                "(H1) requires H(0) = 0, got {}",
                self.eval(0.0)
            )));
        }
        if self.flags.h2 {
            let n = 512;
            let mut prev = self.eval(0.0);
            for i in 1..=n {
                let p = p_max * i as f64 / n as f64;
                let cur = self.eval(p);
                if cur < prev - 1e-12 {
                    return Err(HamiltonianError::Assumption(format!(
                        "(H2) requires H nondecreasing, violated near p = {p}"
                    )));
                }
                prev = cur;
            }
        }
        Ok(())
    }
}

/// The Legendre conjugate as an evaluator over any scalar type.
///
/// The closed forms `Linear` and `Quadratic` are exact over rationals;
/// `Power` and `Table` require floating point.
pub enum Lagrangian<S: Scalar> {
    /// `L = 0` on `[0, vmax]`, `+inf` beyond: conjugate of `H(p) = vmax * p`.
    Linear { vmax: S },
    /// `L(v) = v^2 / 2`.
    Quadratic,
    /// `L(v) = v^beta / beta` (floating point only).
    Power { beta: f64 },
    /// Sampled convex table on `[0, v_max]` with grid `v_grid`.
    Table(LagrangianTable),
}

/// Piecewise-linear convex interpolant of a numerically conjugated `H`.
#[derive(Debug)]
pub struct LagrangianTable {
    pub v_grid: Vec<f64>,
    pub l_values: Vec<f64>,
    pub p_max: f64,
    /// Coercive tables extrapolate by the last slope; non-coercive ones
    /// return `+inf` beyond `v_max`.
    pub coercive: bool,
}

impl LagrangianTable {
    pub fn eval(&self, v: f64) -> Ext<f64> {
        if v < 0.0 {
            return Ext::PosInf;
        }
        let n = self.v_grid.len();
        let v_max = self.v_grid[n - 1];
        if v > v_max {
            if !self.coercive {
                return Ext::PosInf;
            }
            let slope = (self.l_values[n - 1] - self.l_values[n - 2])
                / (self.v_grid[n - 1] - self.v_grid[n - 2]);
            return Ext::Finite(self.l_values[n - 1] + slope * (v - v_max));
        }
        let step = self.v_grid[1] - self.v_grid[0];
        let i = ((v / step).floor() as usize).min(n - 2);
        let t = (v - self.v_grid[i]) / step;
        Ext::Finite(self.l_values[i] * (1.0 - t) + self.l_values[i + 1] * t)
    }

    pub fn cell(&self) -> f64 {
        self.v_grid[1] - self.v_grid[0]
    }
}

impl<S: Scalar> Lagrangian<S> {
    /// `L(v)` as an extended real.
    pub fn eval(&self, v: S) -> Ext<S> {
        if v.total_cmp(&S::zero()) == std::cmp::Ordering::Less {
            return Ext::PosInf;
        }
        match self {
            Lagrangian::Linear { vmax } => {
                if v.total_cmp(vmax) == std::cmp::Ordering::Greater {
                    Ext::PosInf
                } else {
                    Ext::Finite(S::zero())
                }
            }
            Lagrangian::Quadratic => Ext::Finite(v * v * S::from_ratio(1, 2)),
            Lagrangian::Power { beta } => {
                Ext::Finite(S::from_f64_lossy(v.to_f64().powf(*beta) / *beta))
            }
            Lagrangian::Table(t) => match t.eval(v.to_f64()) {
                Ext::Finite(x) => Ext::Finite(S::from_f64_lossy(x)),
                Ext::PosInf => Ext::PosInf,
                Ext::NegInf => Ext::NegInf,
            },
        }
    }

    /// The Hopf-Lax running cost `t L(d / t)`, exact where `L` is exact.
    pub fn cost(&self, d: S, t: S) -> Ext<S> {
        self.cost_slack(d, t, S::zero())
    }

    /// Running cost with a boundary slack on the linear (eikonal) domain
    /// threshold, so float rounding at `d = vmax t` cannot flip a valid
    /// candidate to infinite cost. Exact scalars pass slack zero.
    pub fn cost_slack(&self, d: S, t: S, slack: S) -> Ext<S> {
        match self {
            Lagrangian::Linear { vmax } => {
                // d/t <= vmax  <=>  d <= vmax * t, no division needed.
                if d.total_cmp(&(*vmax * t + slack)) == std::cmp::Ordering::Greater {
                    Ext::PosInf
                } else {
                    Ext::Finite(S::zero())
                }
            }
            Lagrangian::Quadratic => Ext::Finite(d * d / (t + t)),
            _ => match self.eval(d / t) {
                Ext::Finite(l) => Ext::Finite(t * l),
                inf => inf,
            },
        }
    }

    pub fn is_coercive(&self) -> bool {
        match self {
            Lagrangian::Linear { .. } => false,
            Lagrangian::Quadratic | Lagrangian::Power { .. } => true,
            Lagrangian::Table(t) => t.coercive,
        }
    }

    /// Candidate-ball radius factor: minimizers of the Hopf-Lax formula
    /// for `K`-Lipschitz data lie in `B_{V t}`.
    pub fn speed_bound(&self, k: S) -> Result<S, HamiltonianError> {
        if k.total_cmp(&S::zero()) == std::cmp::Ordering::Less {
            return Err(HamiltonianError::Assumption("K must be >= 0".into()));
        }
        match self {
            // Not coercive: candidates are bounded by the slope limit
            // instead (cost jumps to +inf past vmax), so the natural
            // radius factor is vmax itself.
            Lagrangian::Linear { vmax } => Ok(*vmax),
            // L(v)/v = v/2 <= K  <=>  v <= 2K.
            Lagrangian::Quadratic => {
                let v = k + k;
                Ok(v + v * S::from_ratio(1, 1_000_000) + S::from_ratio(1, 1_000_000))
            }
            // L(v)/v = v^{beta-1}/beta <= K  <=>  v <= (beta K)^{1/(beta-1)}.
            Lagrangian::Power { beta } => {
                let v = (beta * k.to_f64()).powf(1.0 / (beta - 1.0));
                let v = v * (1.0 + 1e-6) + 1e-6;
                Ok(S::from_f64_lossy(v))
            }
            Lagrangian::Table(t) => {
                if !t.coercive {
                    return Err(HamiltonianError::UnboundedSpeed);
                }
                let kf = k.to_f64();
                // Binary search for sup { v : L(v)/v <= K } on the table
                // range, then one-cell safety margin.
                let mut lo = 0.0f64;
                let mut hi = *t.v_grid.last().unwrap();
                let ratio = |v: f64| -> f64 {
                    if v <= 0.0 {
                        return 0.0;
                    }
                    t.eval(v).expect_finite("coercive table") / v
                };
                if ratio(hi) <= kf {
                    // Extrapolated region: solve on the last slope.
                    let n = t.v_grid.len();
                    let slope = (t.l_values[n - 1] - t.l_values[n - 2]) / t.cell();
                    if slope <= kf {
                        return Err(HamiltonianError::Truncated {
                            v: hi,
                            p_max: t.p_max,
                        });
                    }
                    let b = t.l_values[n - 1] - slope * t.v_grid[n - 1];
                    // (slope v + b)/v = K  =>  v = b / (K - slope)
                    hi = b / (kf - slope);
                    return Ok(S::from_f64_lossy(hi + 10.0 * t.cell()));
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if ratio(mid) <= kf {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(S::from_f64_lossy(lo + 10.0 * t.cell()))
            }
        }
    }
}

/// Numerically conjugates `H` on a `p`-grid of size `n_grid` over
/// `[0, p_max]`, refining each maximum by golden-section search.
///
/// Errors when the supremum for some tabulated `v` is attained at the
/// boundary `p_max` while `H` is declared coercive (the table would be
/// silently wrong); for non-coercive `H` the table is marked so that
/// evaluation beyond the last reliable `v` returns `+inf`.
pub fn legendre(
    h: &Hamiltonian,
    n_grid: usize,
    p_max: f64,
    v_max: f64,
) -> Result<LagrangianTable, HamiltonianError> {
    if !h.flags.h1 {
        return Err(HamiltonianError::Assumption(
            "legendre requires (H1)".into(),
        ));
    }
    h.validate(p_max)?;
    let n = n_grid.max(16);
    let mut v_grid = Vec::with_capacity(n + 1);
    let mut l_values = Vec::with_capacity(n + 1);
    let p_grid: Vec<f64> = (0..=n).map(|i| p_max * i as f64 / n as f64).collect();
    let h_vals: Vec<f64> = p_grid.iter().map(|&p| h.eval(p)).collect();
    let mut boundary_v: Option<f64> = None;
    for i in 0..=n {
        let v = v_max * i as f64 / n as f64;
        let mut best = f64::NEG_INFINITY;
        let mut best_j = 0;
        for (j, (&p, &hp)) in p_grid.iter().zip(&h_vals).enumerate() {
            let val = p * v - hp;
            if val > best {
                best = val;
                best_j = j;
            }
        }
        if best_j == n && boundary_v.is_none() {
            boundary_v = Some(v);
        }
        // Golden-section refinement around the discrete argmax.
        let lo = p_grid[best_j.saturating_sub(1)];
        let hi = p_grid[(best_j + 1).min(n)];
        let refined = golden_max(|p| p * v - h.eval(p), lo, hi, 1e-10);
        v_grid.push(v);
        l_values.push(refined.max(best).max(0.0));
    }
    if let Some(v) = boundary_v {
        if h.flags.h3 {
            return Err(HamiltonianError::Truncated { v, p_max });
        }
        // Non-coercive: values at and beyond the first boundary-attained
        // v are unreliable; truncate the table there and mark it.
        let cut = v_grid.iter().position(|&g| g >= v).unwrap_or(v_grid.len());
        if cut >= 2 {
            v_grid.truncate(cut);
            l_values.truncate(cut);
        }
    }
    Ok(LagrangianTable {
        v_grid,
        l_values,
        p_max,
        coercive: h.flags.h3,
    })
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// Default conjugation grid size.
pub const DEFAULT_N_L: usize = 4096;

/// Default `p_max` given a Lipschitz scale `K`.
pub fn default_p_max(k: f64) -> f64 {
    100.0 * (1.0 + k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_conjugate_matches_closed_form() {
        // H(p) = p^2/2  =>  L(v) = v^2/2, max abs error <= 1e-8 at the
        // conjugation nodes over [0, 10]
        let h = Hamiltonian::power(2.0);
        let table = legendre(&h, DEFAULT_N_L, default_p_max(10.0), 10.0).unwrap();
        for (v, l) in table.v_grid.iter().zip(&table.l_values) {
            assert!(
                (l - v * v / 2.0).abs() <= 1e-8,
                "v = {v}: {l} vs {}",
                v * v / 2.0
            );
        }
        // between nodes: piecewise-linear interpolation error <= cell^2/8 * sup L''
        let cell = table.cell();
        for i in 0..=100 {
            let v = 10.0 * i as f64 / 100.0;
            let l = table.eval(v).expect_finite("coercive");
            assert!((l - v * v / 2.0).abs() <= cell * cell / 8.0 + 1e-8);
        }
    }

    #[test]
    fn linear_conjugate_is_zero_then_infinite() {
        // closed form
        let lag: Lagrangian<f64> = Lagrangian::Linear { vmax: 1.0 };
        assert_eq!(lag.eval(0.5), Ext::Finite(0.0));
        assert_eq!(lag.eval(1.0), Ext::Finite(0.0));
        assert_eq!(lag.eval(1.5), Ext::PosInf);
        // numeric path: H(p) = p is (H1)-(H2) but not (H3)
        let h = Hamiltonian::linear();
        let table = legendre(&h, 1024, 50.0, 10.0).unwrap();
        assert!(!table.coercive);
        let inside = table.eval(0.5).expect_finite("v < 1 is reliable");
        assert!(inside.abs() <= 1e-8);
        assert_eq!(table.eval(9.0), Ext::PosInf);
    }

    #[test]
    fn degenerate_flat_hamiltonian_truncates() {
        // H = 0 with (H3) wrongly declared: sup p*v at the boundary
        let h = Hamiltonian {
            eval: Box::new(|_| 0.0),
            flags: HFlags {
                h1: true,
                h2: true,
                h3: true,
            },
            tag: None,
        };
        match legendre(&h, 256, 8.0, 4.0) {
            Err(HamiltonianError::Truncated { p_max, .. }) => assert_eq!(p_max, 8.0),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn speed_bounds() {
        // L = v^2/2, K = 1 -> V = 2 (analytic root of L(v)/v = K)
        let lag: Lagrangian<f64> = Lagrangian::Quadratic;
        let v = lag.speed_bound(1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-3 && v >= 2.0);
        // power conjugate: V = (beta K)^{1/(beta-1)}
        let lag: Lagrangian<f64> = Lagrangian::Power { beta: 3.0 };
        let v = lag.speed_bound(2.0).unwrap();
        let expect = 6f64.powf(0.5);
        assert!((v - expect).abs() < 1e-3 && v >= expect);
        // K = 0 -> margin only
        let lag: Lagrangian<f64> = Lagrangian::Quadratic;
        let v = lag.speed_bound(0.0).unwrap();
        assert!((0.0..1e-3).contains(&v));
        // table speed bound close to analytic for the quadratic
        let h = Hamiltonian::quadratic();
        let table = legendre(&h, DEFAULT_N_L, default_p_max(1.0), 10.0).unwrap();
        let lag: Lagrangian<f64> = Lagrangian::Table(table);
        let v = lag.speed_bound(1.0).unwrap();
        assert!((v - 2.0).abs() < 0.1, "table V = {v}");
    }

    #[test]
    fn exact_costs_over_rationals() {
        use crate::scalar::Rat;
        let lag: Lagrangian<Rat> = Lagrangian::Linear {
            vmax: Rat::from_int(1),
        };
        let t = Rat::from_int(4);
        assert_eq!(lag.cost(Rat::from_int(4), t), Ext::Finite(Rat::zero()));
        assert_eq!(lag.cost(Rat::from_ratio(17, 4), t), Ext::PosInf);
        let q: Lagrangian<Rat> = Lagrangian::Quadratic;
        // t L(d/t) = d^2 / (2 t), exact
        assert_eq!(
            q.cost(Rat::from_int(3), Rat::from_int(2)),
            Ext::Finite(Rat::from_ratio(9, 4))
        );
    }

    #[test]
    fn closed_form_registry_agrees_with_numeric_fallback() {
        // the tagged fast path and the conjugation table agree within
        // table resolution
        let h = Hamiltonian::power(1.5);
        let closed: Lagrangian<f64> = h.closed_form_conjugate().expect("tagged");
        let table = legendre(&h, DEFAULT_N_L, default_p_max(6.0), 12.0).unwrap();
        for (v, l) in table.v_grid.iter().zip(&table.l_values) {
            let fast = closed.eval(*v).expect_finite("coercive");
            assert!((fast - l).abs() <= 1e-7, "v = {v}: {fast} vs {l}");
        }
        // quadratic and linear tags resolve, power is float-only
        assert!(Hamiltonian::quadratic()
            .closed_form_conjugate::<crate::scalar::Rat>()
            .is_some());
        assert!(Hamiltonian::linear()
            .closed_form_conjugate::<crate::scalar::Rat>()
            .is_some());
        assert!(Hamiltonian::power(1.5)
            .closed_form_conjugate::<crate::scalar::Rat>()
            .is_none());
        assert!(Hamiltonian::power(1.5)
            .closed_form_conjugate::<f64>()
            .is_some());
    }

    #[test]
    fn fenchel_young_on_samples() {
        // p v <= L(v) + H(p) within 1e-8 over 1000 seeded pairs
        let h = Hamiltonian::power(2.0);
        let table = legendre(&h, DEFAULT_N_L, default_p_max(10.0), 20.0).unwrap();
        let mut rng = crate::sampling::seeded(11);
        for _ in 0..1000 {
            let p = crate::sampling::uniform(&mut rng, 0.0, 10.0);
            let v = crate::sampling::uniform(&mut rng, 0.0, 20.0);
            let l = table.eval(v).expect_finite("coercive");
            assert!(p * v <= l + h.eval(p) + 1e-8);
        }
    }

    #[test]
    fn double_conjugation_recovers_h() {
        // sup_v (p v - L(v)) = H(p) for convex H, within table resolution
        let h = Hamiltonian::power(2.0);
        let table = legendre(&h, DEFAULT_N_L, default_p_max(4.0), 20.0).unwrap();
        for i in 0..=40 {
            let p = 4.0 * i as f64 / 40.0;
            let mut best = f64::NEG_INFINITY;
            for (v, l) in table.v_grid.iter().zip(&table.l_values) {
                best = best.max(p * v - l);
            }
            assert!(
                (best - h.eval(p)).abs() <= 2.0 * table.cell() * 4.0 + 1e-8,
                "p = {p}"
            );
        }
    }

    #[test]
    fn table_convexity_second_differences() {
        let h = Hamiltonian::power(1.5);
        let table = legendre(&h, 2048, default_p_max(5.0), 10.0).unwrap();
        for w in table.l_values.windows(3) {
            assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-10);
        }
        // L(0) = 0 and nondecreasing
        assert!(table.l_values[0].abs() <= 1e-10);
        for w in table.l_values.windows(2) {
            assert!(w[1] >= w[0] - 1e-10);
        }
    }

    #[test]
    fn table_hamiltonian_monotonicity_validation() {
        let bad = Hamiltonian::table(
            vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)],
            HFlags {
                h1: true,
                h2: true,
                h3: false,
            },
        )
        .unwrap();
        assert!(bad.validate(2.0).is_err());
    }
}
