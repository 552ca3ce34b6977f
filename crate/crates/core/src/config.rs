//! Structured text configuration (TOML tables `[space]`,
//! `[hamiltonian]`, `[initial]`, `[times]`, `[checks]`) and the
//! config-driven solve/check drivers backing the CLI.

use serde::Deserialize;
use thiserror::Error;

use crate::convexity::{
    check_infty_subharmonious, check_one_weak_lattice, check_pointwise, check_weak_geodesic,
    CheckParams, SubharmonicMode, Variant,
};
use crate::field::ScalarField;
use crate::hamiltonian::{legendre, HFlags, Hamiltonian, Lagrangian, DEFAULT_N_L};
use crate::presets::Preset;
use crate::report::{ConvexityReport, SolveSummary, StructureReport};
use crate::scalar::{parse_scalar, Rat, Scalar};
use crate::solve::{solve_eikonal, solve_inf, solve_sup, SolvePath};
use crate::space::{Cylinder, Euclidean, GeodesicSpace, HalfLine, Lattice2, PNorm, Tree};
use crate::structure::{
    check_busemann3, check_busemann4, check_equivalence_3_4, check_uniform_npc, StructureParams,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config validation error: {0}")]
    Validation(String),
    #[error("solve failed: {0}")]
    Solve(String),
}

/// Number-or-string scalar: TOML `0.25`, `2`, or `"45/4"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    pub fn to_scalar<S: Scalar>(&self) -> Result<S, ConfigError> {
        match self {
            Num::Int(n) => Ok(S::from_int(*n)),
            Num::Float(x) => Ok(S::from_f64_lossy(*x)),
            Num::Text(t) => parse_scalar(t).map_err(ConfigError::Validation),
        }
    }

    pub fn to_f64(&self) -> Result<f64, ConfigError> {
        self.to_scalar::<f64>()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub space: SpaceCfg,
    pub hamiltonian: Option<HamiltonianCfg>,
    pub initial: Option<InitialCfg>,
    pub times: Option<TimesCfg>,
    pub checks: Option<ChecksCfg>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceCfg {
    pub kind: String,
    pub dim: Option<usize>,
    pub p: Option<Num>,
    pub h: Option<Num>,
    pub eps_mid: Option<Num>,
    /// Per-dimension `[lo, hi]` rows (half line: one row; cylinder:
    /// height bounds; lattice: integer box).
    pub patch: Option<Vec<Vec<Num>>>,
    /// Optional separate evaluation box (defaults to `patch`).
    pub eval: Option<Vec<Vec<Num>>>,
    pub arms: Option<usize>,
    pub edge_len: Option<Num>,
    pub edges: Option<Vec<(usize, usize, Num)>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianCfg {
    pub kind: String,
    pub alpha: Option<f64>,
    pub points: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCfg {
    /// Named preset; mutually exclusive with `table`.
    pub preset: Option<String>,
    /// Explicit sampled datum: rows of coordinates followed by the
    /// value (the field is sampled exactly at these points).
    pub table: Option<Vec<Vec<Num>>>,
    pub constant: Option<Num>,
    pub lipschitz: Option<Num>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimesCfg {
    pub values: Vec<Num>,
    /// "inf" | "sup" | "eikonal-inf" | "eikonal-sup"
    pub path: Option<String>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ChecksCfg {
    pub pair_budget: Option<usize>,
    pub sample_budget: Option<usize>,
    pub tau: Option<Num>,
    pub delta: Option<Num>,
    pub r_grid: Option<Vec<Num>>,
}

pub fn parse(text: &str) -> Result<Config, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
}

/// Everything a command run produces: a JSON report, CSV slices, and
/// the overall verdict for the exit code.
pub struct RunArtifacts {
    pub json: serde_json::Value,
    pub csv: Vec<(String, String)>,
    pub pass: bool,
}

#[derive(Clone, Debug)]
enum HamSpec {
    Linear,
    Quadratic,
    Power(f64),
    Table(Vec<(f64, f64)>),
}

impl HamSpec {
    fn from_cfg(cfg: Option<&HamiltonianCfg>) -> Result<Self, ConfigError> {
        let Some(cfg) = cfg else {
            return Err(ConfigError::Validation(
                "missing [hamiltonian] table".into(),
            ));
        };
        match cfg.kind.as_str() {
            "linear" => Ok(HamSpec::Linear),
            "quadratic" => Ok(HamSpec::Quadratic),
            "power" => {
                let alpha = cfg.alpha.ok_or_else(|| {
                    ConfigError::Validation("power Hamiltonian needs `alpha`".into())
                })?;
                if alpha <= 1.0 {
                    return Err(ConfigError::Validation("alpha must exceed 1".into()));
                }
                if alpha == 2.0 {
                    Ok(HamSpec::Quadratic)
                } else {
                    Ok(HamSpec::Power(alpha))
                }
            }
            "table" => {
                let points = cfg.points.clone().ok_or_else(|| {
                    ConfigError::Validation("table Hamiltonian needs `points`".into())
                })?;
                Ok(HamSpec::Table(points))
            }
            other => Err(ConfigError::Validation(format!(
                "unknown hamiltonian kind {other:?}"
            ))),
        }
    }

    fn lagrangian<S: Scalar>(&self, k: f64) -> Result<Lagrangian<S>, ConfigError> {
        match self {
            HamSpec::Linear => Ok(Lagrangian::Linear { vmax: S::one() }),
            HamSpec::Quadratic => Ok(Lagrangian::Quadratic),
            HamSpec::Power(alpha) => {
                if S::EXACT {
                    return Err(ConfigError::Validation(
                        "power Hamiltonians are floating-point only; the exact lattice supports \
                         linear and quadratic"
                            .into(),
                    ));
                }
                Ok(Lagrangian::Power {
                    beta: alpha / (alpha - 1.0),
                })
            }
            HamSpec::Table(points) => {
                if S::EXACT {
                    return Err(ConfigError::Validation(
                        "table Hamiltonians are floating-point only".into(),
                    ));
                }
                let h = Hamiltonian::table(
                    points.clone(),
                    HFlags {
                        h1: true,
                        h2: true,
                        h3: true,
                    },
                )
                .map_err(|e| ConfigError::Validation(e.to_string()))?;
                let p_max = crate::hamiltonian::default_p_max(k);
                let v_max = 8.0 * (1.0 + k);
                let table = legendre(&h, DEFAULT_N_L, p_max, v_max)
                    .map_err(|e| ConfigError::Validation(e.to_string()))?;
                Ok(Lagrangian::Table(table))
            }
        }
    }

    /// Is this the linear-growth (eikonal) case?
    fn is_eikonal(&self) -> bool {
        matches!(self, HamSpec::Linear)
    }
}

fn parse_path(times: &TimesCfg) -> Result<(SolvePath, bool), ConfigError> {
    match times.path.as_deref().unwrap_or("inf") {
        "inf" => Ok((SolvePath::Inf, false)),
        "sup" => Ok((SolvePath::Sup, false)),
        "eikonal-inf" => Ok((SolvePath::Inf, true)),
        "eikonal-sup" => Ok((SolvePath::Sup, true)),
        other => Err(ConfigError::Validation(format!(
            "unknown path {other:?} (inf | sup | eikonal-inf | eikonal-sup)"
        ))),
    }
}

/// Sample patch plus evaluation patch of one space.
type Patches<P> = (Vec<P>, Vec<P>);

/// Summaries plus named CSV slices from one config-driven solve.
type SolveOutputs = (Vec<SolveSummary>, Vec<(String, String)>);

/// Field sample points together with their evaluator.
type FieldSource<P, S> = (Vec<P>, Preset<P, S>);

/// A space with its sample patch and optional separate eval patch.
enum Workspace {
    Euclidean(Euclidean<f64>, Patches<Vec<f64>>),
    HalfLine(HalfLine<f64>, Patches<f64>),
    Cylinder(Cylinder<f64>, Patches<crate::space::CylinderPoint<f64>>),
    Lattice(Lattice2, Patches<crate::space::LatticePoint>),
    Tree(Tree<f64>, Patches<crate::space::TreePoint<f64>>),
}

fn box_rows(
    rows: &Option<Vec<Vec<Num>>>,
    dims: usize,
    what: &str,
) -> Result<Vec<(f64, f64)>, ConfigError> {
    let rows = rows
        .as_ref()
        .ok_or_else(|| ConfigError::Validation(format!("missing `{what}` box")))?;
    if rows.len() != dims {
        return Err(ConfigError::Validation(format!(
            "`{what}` needs {dims} [lo, hi] rows, got {}",
            rows.len()
        )));
    }
    rows.iter()
        .map(|row| {
            if row.len() != 2 {
                return Err(ConfigError::Validation(format!(
                    "each `{what}` row is [lo, hi]"
                )));
            }
            let lo = row[0].to_f64()?;
            let hi = row[1].to_f64()?;
            if lo > hi {
                return Err(ConfigError::Validation(format!("`{what}` row has lo > hi")));
            }
            Ok((lo, hi))
        })
        .collect()
}

fn build_workspace(cfg: &SpaceCfg) -> Result<Workspace, ConfigError> {
    let bad = |m: String| ConfigError::Validation(m);
    let h_num = cfg
        .h
        .as_ref()
        .ok_or_else(|| bad("missing space resolution `h`".into()))?;
    match cfg.kind.as_str() {
        "euclidean" => {
            let dim = cfg.dim.unwrap_or(1);
            let p = match &cfg.p {
                None => PNorm::Finite(2.0),
                Some(Num::Text(t)) if t == "inf" => PNorm::Infinity,
                Some(n) => PNorm::Finite(n.to_f64()?),
            };
            let h = h_num.to_f64()?;
            let eps = cfg
                .eps_mid
                .as_ref()
                .map(|e| e.to_f64())
                .transpose()?
                .unwrap_or(1e-9);
            let space = Euclidean::new(dim, p, h, eps).map_err(|e| bad(e.to_string()))?;
            let rows = box_rows(&cfg.patch, dim, "patch")?;
            let lo: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let hi: Vec<f64> = rows.iter().map(|r| r.1).collect();
            let patch = space.patch(&lo, &hi);
            let eval = match &cfg.eval {
                None => patch.clone(),
                Some(_) => {
                    let rows = box_rows(&cfg.eval, dim, "eval")?;
                    let lo: Vec<f64> = rows.iter().map(|r| r.0).collect();
                    let hi: Vec<f64> = rows.iter().map(|r| r.1).collect();
                    space.patch(&lo, &hi)
                }
            };
            Ok(Workspace::Euclidean(space, (patch, eval)))
        }
        "halfline" => {
            let h = h_num.to_f64()?;
            let eps = cfg
                .eps_mid
                .as_ref()
                .map(|e| e.to_f64())
                .transpose()?
                .unwrap_or(1e-9);
            let space = HalfLine::new(h, eps).map_err(|e| bad(e.to_string()))?;
            let rows = box_rows(&cfg.patch, 1, "patch")?;
            if rows[0].0 != 0.0 {
                return Err(bad("half-line patch starts at 0".into()));
            }
            let patch = space.patch(rows[0].1);
            let eval = match &cfg.eval {
                None => patch.clone(),
                Some(_) => {
                    let rows = box_rows(&cfg.eval, 1, "eval")?;
                    space.patch(rows[0].1)
                }
            };
            Ok(Workspace::HalfLine(space, (patch, eval)))
        }
        "cylinder" => {
            let h = h_num.to_f64()?;
            let eps = cfg
                .eps_mid
                .as_ref()
                .map(|e| e.to_f64())
                .transpose()?
                .unwrap_or(1e-9);
            let space = Cylinder::new(h, eps).map_err(|e| bad(e.to_string()))?;
            let rows = box_rows(&cfg.patch, 1, "patch")?;
            let patch = space.patch(rows[0].0, rows[0].1);
            let eval = match &cfg.eval {
                None => patch.clone(),
                Some(_) => {
                    let rows = box_rows(&cfg.eval, 1, "eval")?;
                    space.patch(rows[0].0, rows[0].1)
                }
            };
            Ok(Workspace::Cylinder(space, (patch, eval)))
        }
        "lattice" => {
            let h: Rat = h_num.to_scalar()?;
            let space = Lattice2::new(h).map_err(|e| bad(e.to_string()))?;
            let rows = box_rows(&cfg.patch, 2, "patch")?;
            let ibox = |r: &(f64, f64)| -> Result<(i64, i64), ConfigError> {
                if r.0.fract() != 0.0 || r.1.fract() != 0.0 {
                    return Err(bad("lattice patch bounds must be integers".into()));
                }
                Ok((r.0 as i64, r.1 as i64))
            };
            let (l1, u1) = ibox(&rows[0])?;
            let (l2, u2) = ibox(&rows[1])?;
            let patch = space.patch(l1, u1, l2, u2);
            let eval = match &cfg.eval {
                None => patch.clone(),
                Some(_) => {
                    let rows = box_rows(&cfg.eval, 2, "eval")?;
                    let (l1, u1) = ibox(&rows[0])?;
                    let (l2, u2) = ibox(&rows[1])?;
                    space.patch(l1, u1, l2, u2)
                }
            };
            Ok(Workspace::Lattice(space, (patch, eval)))
        }
        "tree" | "star-tree" => {
            let h = h_num.to_f64()?;
            let eps = cfg
                .eps_mid
                .as_ref()
                .map(|e| e.to_f64())
                .transpose()?
                .unwrap_or(1e-9);
            let space = if cfg.kind == "star-tree" {
                let arms = cfg.arms.unwrap_or(3);
                let len = cfg
                    .edge_len
                    .as_ref()
                    .ok_or_else(|| bad("star-tree needs `edge_len`".into()))?
                    .to_f64()?;
                Tree::star(arms, len, h, eps).map_err(|e| bad(e.to_string()))?
            } else {
                let edges = cfg
                    .edges
                    .as_ref()
                    .ok_or_else(|| bad("tree needs `edges`".into()))?;
                let mut parsed = Vec::new();
                for (a, b, len) in edges {
                    parsed.push((*a, *b, len.to_f64()?));
                }
                Tree::new(parsed, h, eps).map_err(|e| bad(e.to_string()))?
            };
            let patch = space.patch();
            Ok(Workspace::Tree(space, (patch.clone(), patch)))
        }
        other => Err(bad(format!("unknown space kind {other:?}"))),
    }
}

fn resolve_preset<Sp, F>(
    name: &str,
    cfg: &InitialCfg,
    builder: F,
) -> Result<Preset<Sp::P, Sp::S>, ConfigError>
where
    Sp: GeodesicSpace,
    F: FnOnce(&str, &InitialCfg) -> Option<Preset<Sp::P, Sp::S>>,
{
    if name == "constant" {
        let c = cfg
            .constant
            .as_ref()
            .map(|c| c.to_scalar())
            .transpose()?
            .unwrap_or_else(Sp::S::zero);
        return Ok(crate::presets::constant(c));
    }
    builder(name, cfg).ok_or_else(|| {
        ConfigError::Validation(format!("preset {name:?} is not defined on this space"))
    })
}

/// Resolves `[initial]` to sample points plus an evaluator: either the
/// named preset over the patch, or an explicit table sampled exactly at
/// its own points. Table rows hold `arity` coordinates then the value.
fn initial_source<Sp, F, R>(
    space: &Sp,
    init: &InitialCfg,
    patch: &[Sp::P],
    arity: usize,
    row_point: R,
    builder: F,
) -> Result<FieldSource<Sp::P, Sp::S>, ConfigError>
where
    Sp: GeodesicSpace + Clone + 'static,
    F: FnOnce(&str, &InitialCfg) -> Option<Preset<Sp::P, Sp::S>>,
    R: Fn(&[Num]) -> Result<Sp::P, ConfigError>,
{
    match (&init.preset, &init.table) {
        (Some(_), Some(_)) => Err(ConfigError::Validation(
            "give either `preset` or `table` in [initial], not both".into(),
        )),
        (None, None) => Err(ConfigError::Validation(
            "[initial] needs a `preset` name or a `table`".into(),
        )),
        (Some(name), None) => {
            let preset = resolve_preset::<Sp, F>(name, init, builder)?;
            Ok((patch.to_vec(), preset))
        }
        (None, Some(rows)) => {
            if init.lipschitz.is_none() {
                return Err(ConfigError::Validation(
                    "table initial data needs an explicit `lipschitz`".into(),
                ));
            }
            let mut points = Vec::with_capacity(rows.len());
            let mut values: std::collections::HashMap<
                crate::space::GridKey,
                crate::ext::Ext<Sp::S>,
            > = std::collections::HashMap::new();
            for row in rows {
                if row.len() != arity + 1 {
                    return Err(ConfigError::Validation(format!(
                        "table rows need {arity} coordinates plus a value"
                    )));
                }
                let p = row_point(&row[..arity])?;
                space
                    .contains(&p)
                    .map_err(|e| ConfigError::Validation(e.to_string()))?;
                let key = space.grid_key(&p).ok_or_else(|| {
                    ConfigError::Validation(format!(
                        "table point {} is off the sampling grid",
                        space.point_key(&p)
                    ))
                })?;
                let v: Sp::S = row[arity].to_scalar()?;
                values.insert(key, crate::ext::Ext::Finite(v));
                points.push(p);
            }
            let keyed_space = space.clone();
            let preset = Preset::new("table", Sp::S::zero(), move |p: &Sp::P| {
                keyed_space
                    .grid_key(p)
                    .and_then(|k| values.get(&k).copied())
                    .expect("table fields are evaluated at their own sample points")
            });
            Ok((points, preset))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn drive_solve<Sp: GeodesicSpace>(
    space: &Sp,
    sample_points: Vec<Sp::P>,
    eval_points: Vec<Sp::P>,
    preset: &Preset<Sp::P, Sp::S>,
    lip_override: Option<Sp::S>,
    ham: &HamSpec,
    times: &[Sp::S],
    path: SolvePath,
    eikonal: bool,
) -> Result<SolveOutputs, ConfigError> {
    let k = lip_override.unwrap_or(preset.lipschitz);
    let u0 = ScalarField::from_fn(space, sample_points, |p| (preset.eval)(p), Some(k))
        .map_err(|e| ConfigError::Validation(e.to_string()))?;
    u0.validate_lipschitz(2000, 1)
        .map_err(|e| ConfigError::Validation(e.to_string()))?;
    let mut summaries = Vec::new();
    let mut csv = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        let rep = if eikonal {
            solve_eikonal(space, &u0, t, path, eval_points.clone())
        } else {
            let lag = ham.lagrangian::<Sp::S>(k.to_f64())?;
            match path {
                SolvePath::Inf => solve_inf(space, &u0, &lag, t, eval_points.clone()),
                SolvePath::Sup => solve_sup(space, &u0, &lag, t, eval_points.clone()),
            }
        }
        .map_err(|e| ConfigError::Solve(e.to_string()))?;
        summaries.push(SolveSummary {
            path: format!(
                "{}{}",
                if eikonal { "eikonal-" } else { "" },
                match path {
                    SolvePath::Inf => "inf",
                    SolvePath::Sup => "sup",
                }
            ),
            t: crate::report::ScalarRepr::of(t),
            radius: crate::report::ScalarRepr::of(rep.radius),
            points: rep.field.len(),
            min_candidates: rep.candidate_counts.iter().copied().min().unwrap_or(0),
            max_candidates: rep.candidate_counts.iter().copied().max().unwrap_or(0),
            wall_ms: rep.wall_ms,
        });
        csv.push((
            format!("slice_{i}.csv"),
            crate::report::field_csv(&rep, &u0),
        ));
    }
    Ok((summaries, csv))
}

fn preset_for_euclidean(
    space: &Euclidean<f64>,
    name: &str,
    cfg: &InitialCfg,
) -> Option<Preset<Vec<f64>, f64>> {
    match name {
        "abs" => Some(crate::presets::abs_norm(space)),
        "max_affine" => Some(crate::presets::seeded_max_affine(
            space.dim(),
            cfg.seed.unwrap_or(0),
        )),
        _ => None,
    }
}

/// Runs the `[times]`-driven solve described by the config.
pub fn run_solve_config(cfg: &Config, _seed: u64) -> Result<RunArtifacts, ConfigError> {
    let times_cfg = cfg
        .times
        .as_ref()
        .ok_or_else(|| ConfigError::Validation("missing [times] table".into()))?;
    let (path, mut eikonal) = parse_path(times_cfg)?;
    let ham = HamSpec::from_cfg(cfg.hamiltonian.as_ref())?;
    if ham.is_eikonal() {
        eikonal = true;
    }
    let init = cfg
        .initial
        .as_ref()
        .ok_or_else(|| ConfigError::Validation("missing [initial] table".into()))?;
    let ws = build_workspace(&cfg.space)?;
    let (summaries, csv) = match &ws {
        Workspace::Euclidean(space, (patch, eval)) => {
            let dim = space.dim();
            let (points, preset) = initial_source(
                space,
                init,
                patch,
                dim,
                |row| row.iter().map(|n| n.to_f64()).collect(),
                |n, c| preset_for_euclidean(space, n, c),
            )?;
            let lip = init.lipschitz.as_ref().map(|l| l.to_f64()).transpose()?;
            let times: Vec<f64> = times_cfg
                .values
                .iter()
                .map(|v| v.to_f64())
                .collect::<Result<_, _>>()?;
            drive_solve(
                space,
                points,
                eval.clone(),
                &preset,
                lip,
                &ham,
                &times,
                path,
                eikonal,
            )?
        }
        Workspace::HalfLine(space, (patch, eval)) => {
            let (points, preset) = initial_source(
                space,
                init,
                patch,
                1,
                |row| row[0].to_f64(),
                |n, _| match n {
                    "neg_x" => Some(crate::presets::neg_x()),
                    _ => None,
                },
            )?;
            let lip = init.lipschitz.as_ref().map(|l| l.to_f64()).transpose()?;
            let times: Vec<f64> = times_cfg
                .values
                .iter()
                .map(|v| v.to_f64())
                .collect::<Result<_, _>>()?;
            drive_solve(
                space,
                points,
                eval.clone(),
                &preset,
                lip,
                &ham,
                &times,
                path,
                eikonal,
            )?
        }
        Workspace::Cylinder(space, (patch, eval)) => {
            let (points, preset) = initial_source(
                space,
                init,
                patch,
                2,
                |row| {
                    Ok(crate::space::CylinderPoint::new(
                        row[0].to_f64()?,
                        row[1].to_f64()?,
                    ))
                },
                |n, c| match n {
                    "height" => Some(crate::presets::height()),
                    "height_convex" => {
                        Some(crate::presets::seeded_height_convex(c.seed.unwrap_or(0)))
                    }
                    _ => None,
                },
            )?;
            let lip = init.lipschitz.as_ref().map(|l| l.to_f64()).transpose()?;
            let times: Vec<f64> = times_cfg
                .values
                .iter()
                .map(|v| v.to_f64())
                .collect::<Result<_, _>>()?;
            drive_solve(
                space,
                points,
                eval.clone(),
                &preset,
                lip,
                &ham,
                &times,
                path,
                eikonal,
            )?
        }
        Workspace::Lattice(space, (patch, eval)) => {
            let (points, preset) = initial_source(
                space,
                init,
                patch,
                2,
                |row| {
                    Ok(crate::space::LatticePoint::new(
                        row[0].to_scalar()?,
                        row[1].to_scalar()?,
                    ))
                },
                |n, _| match n {
                    "norm1" => Some(crate::presets::norm1()),
                    "quadrant_product" => {
                        // Lipschitz scale from the patch box.
                        Some(crate::presets::quadrant_product(20))
                    }
                    _ => None,
                },
            )?;
            let lip = init
                .lipschitz
                .as_ref()
                .map(|l| l.to_scalar::<Rat>())
                .transpose()?;
            let times: Vec<Rat> = times_cfg
                .values
                .iter()
                .map(|v| v.to_scalar())
                .collect::<Result<_, _>>()?;
            drive_solve(
                space,
                points,
                eval.clone(),
                &preset,
                lip,
                &ham,
                &times,
                path,
                eikonal,
            )?
        }
        Workspace::Tree(space, (patch, eval)) => {
            let (points, preset) = initial_source(
                space,
                init,
                patch,
                2,
                |row| {
                    let edge = match row[0] {
                        Num::Int(e) if e >= 0 => e as usize,
                        _ => {
                            return Err(ConfigError::Validation(
                                "tree table rows start with an edge index".into(),
                            ))
                        }
                    };
                    Ok(crate::space::TreePoint {
                        edge,
                        offset: row[1].to_f64()?,
                    })
                },
                |n, c| match n {
                    "dist_to_center" => Some(crate::presets::dist_to_node(space, 0)),
                    "cross_ramp" => Some(crate::presets::cross_ramp(space)),
                    "tree_convex" => Some(crate::presets::seeded_tree_convex(
                        space,
                        c.seed.unwrap_or(0),
                    )),
                    _ => None,
                },
            )?;
            let lip = init.lipschitz.as_ref().map(|l| l.to_f64()).transpose()?;
            let times: Vec<f64> = times_cfg
                .values
                .iter()
                .map(|v| v.to_f64())
                .collect::<Result<_, _>>()?;
            drive_solve(
                space,
                points,
                eval.clone(),
                &preset,
                lip,
                &ham,
                &times,
                path,
                eikonal,
            )?
        }
    };
    let json = serde_json::json!({
        "command": "solve",
        "solves": summaries,
    });
    Ok(RunArtifacts {
        json,
        csv,
        pass: true,
    })
}

enum NotionKind {
    WeakGeodesic(Variant),
    OneWeak(Variant),
    InftySubharmonious(SubharmonicMode),
    Pointwise,
    Busemann3,
    Busemann4,
    Equivalence34,
    UniformNpc,
}

fn parse_notion(notion: &str) -> Result<NotionKind, ConfigError> {
    Ok(match notion {
        "weak-geodesic" => NotionKind::WeakGeodesic(Variant::Weak),
        "strong-geodesic" => NotionKind::WeakGeodesic(Variant::Strong),
        "one-weak" => NotionKind::OneWeak(Variant::Weak),
        "one-strong" => NotionKind::OneWeak(Variant::Strong),
        "infty-subharmonious" => NotionKind::InftySubharmonious(SubharmonicMode::Plain),
        "uniform-infty-subharmonious" => NotionKind::InftySubharmonious(SubharmonicMode::Uniform),
        "pointwise" => NotionKind::Pointwise,
        "busemann3" => NotionKind::Busemann3,
        "busemann4" => NotionKind::Busemann4,
        "equivalence-3-4" => NotionKind::Equivalence34,
        "uniform-npc" => NotionKind::UniformNpc,
        other => return Err(ConfigError::Validation(format!("unknown notion {other:?}"))),
    })
}

#[allow(clippy::too_many_arguments)]
fn drive_check<Sp: GeodesicSpace>(
    space: &Sp,
    patch: &[Sp::P],
    notion: &NotionKind,
    source: Option<&FieldSource<Sp::P, Sp::S>>,
    checks: &ChecksCfg,
    seed: u64,
) -> Result<(Vec<ConvexityReport>, Vec<StructureReport>, bool), ConfigError> {
    let pair_budget = checks.pair_budget.unwrap_or(2000);
    let sample_budget = checks.sample_budget.unwrap_or(500);
    let h = space.resolution();
    let tau: Sp::S = match &checks.tau {
        Some(t) => t.to_scalar()?,
        None => CheckParams::<Sp::S>::new(0, 0).tau,
    };
    // delta and r_grid defaults: 4h and {h, 2h, 4h}.
    let delta: Sp::S = match &checks.delta {
        Some(d) => d.to_scalar()?,
        None => h * Sp::S::from_int(4),
    };
    let r_grid: Vec<Sp::S> = match &checks.r_grid {
        Some(rs) => rs.iter().map(|r| r.to_scalar()).collect::<Result<_, _>>()?,
        None => vec![h, h + h, h * Sp::S::from_int(4)],
    };
    let need_field = matches!(
        notion,
        NotionKind::WeakGeodesic(_)
            | NotionKind::OneWeak(_)
            | NotionKind::InftySubharmonious(_)
            | NotionKind::Pointwise
    );
    let field_and_centers = if need_field {
        let (points, preset) = source.ok_or_else(|| {
            ConfigError::Validation("this notion needs an [initial] field".into())
        })?;
        let field = ScalarField::from_fn(
            space,
            points.clone(),
            |p| (preset.eval)(p),
            Some(preset.lipschitz),
        )
        .map_err(|e| ConfigError::Validation(e.to_string()))?;
        // Ball-based notions can only be certified where the whole ball
        // is sampled; centers whose largest ball leaves the sampled
        // window are excluded rather than spuriously failed.
        let centers: Vec<Sp::P> = if matches!(
            notion,
            NotionKind::InftySubharmonious(_) | NotionKind::Pointwise
        ) {
            let r_max = r_grid
                .iter()
                .copied()
                .fold(Sp::S::zero(), |a, b| a.max_s(b));
            points
                .iter()
                .filter(|z| {
                    space
                        .ball_sample(z, r_max)
                        .iter()
                        .all(|q| field.index_of(q).is_some())
                })
                .cloned()
                .collect()
        } else {
            points.clone()
        };
        Some((field, centers))
    } else {
        None
    };
    let params = CheckParams::new(pair_budget, seed).with_tau(tau);
    let sparams = StructureParams::new(sample_budget, seed).with_tau(tau);
    let mut convexity = Vec::new();
    let mut structure = Vec::new();
    let pass = match notion {
        NotionKind::WeakGeodesic(v) => {
            let (field, _) = field_and_centers.as_ref().unwrap();
            let rep = check_weak_geodesic(field, &params, *v, &[])
                .map_err(|e| ConfigError::Solve(e.to_string()))?;
            let pass = rep.pass;
            convexity.push(rep);
            pass
        }
        NotionKind::InftySubharmonious(mode) => {
            let (field, centers) = field_and_centers.as_ref().unwrap();
            let rep = check_infty_subharmonious(field, centers, delta, &r_grid, tau, *mode)
                .map_err(|e| ConfigError::Solve(e.to_string()))?;
            let pass = rep.pass;
            convexity.push(rep);
            pass
        }
        NotionKind::Pointwise => {
            let (field, centers) = field_and_centers.as_ref().unwrap();
            let rep = check_pointwise(field, centers, &r_grid, tau)
                .map_err(|e| ConfigError::Solve(e.to_string()))?;
            let pass = rep.pass;
            convexity.push(rep);
            pass
        }
        NotionKind::OneWeak(_) => {
            return Err(ConfigError::Validation(
                "the one-weak notion is lattice-specific; use a lattice space".into(),
            ))
        }
        NotionKind::Busemann3 => {
            let rep = check_busemann3(space, patch, &sparams, &[]);
            let pass = rep.pass;
            structure.push(rep);
            pass
        }
        NotionKind::Busemann4 => {
            let rep = check_busemann4(space, patch, &sparams, &[]);
            let pass = rep.pass;
            structure.push(rep);
            pass
        }
        NotionKind::Equivalence34 => {
            let (r3, r4, agree) = check_equivalence_3_4(space, patch, &sparams);
            let pass = agree;
            structure.push(r3);
            structure.push(r4);
            pass
        }
        NotionKind::UniformNpc => {
            let rep = check_uniform_npc(space, patch, delta, &sparams, &[]);
            let pass = rep.pass;
            structure.push(rep);
            pass
        }
    };
    Ok((convexity, structure, pass))
}

/// Runs one certification notion against the configured space/field.
pub fn run_check_config(
    cfg: &Config,
    notion: &str,
    seed: u64,
) -> Result<RunArtifacts, ConfigError> {
    let kind = parse_notion(notion)?;
    let checks = cfg
        .checks
        .as_ref()
        .map_or_else(ChecksCfg::default, |c| ChecksCfg {
            pair_budget: c.pair_budget,
            sample_budget: c.sample_budget,
            tau: c.tau.clone(),
            delta: c.delta.clone(),
            r_grid: c.r_grid.clone(),
        });
    let ws = build_workspace(&cfg.space)?;
    let (convexity, structure, pass) = match &ws {
        Workspace::Euclidean(space, (patch, _)) => {
            let dim = space.dim();
            let source = match cfg.initial.as_ref() {
                Some(init) => Some(initial_source(
                    space,
                    init,
                    patch,
                    dim,
                    |row| row.iter().map(|n| n.to_f64()).collect(),
                    |n, c| preset_for_euclidean(space, n, c),
                )?),
                None => None,
            };
            drive_check(space, patch, &kind, source.as_ref(), &checks, seed)?
        }
        Workspace::HalfLine(space, (patch, _)) => {
            let source = match cfg.initial.as_ref() {
                Some(init) => Some(initial_source(
                    space,
                    init,
                    patch,
                    1,
                    |row| row[0].to_f64(),
                    |n, _| match n {
                        "neg_x" => Some(crate::presets::neg_x()),
                        _ => None,
                    },
                )?),
                None => None,
            };
            drive_check(space, patch, &kind, source.as_ref(), &checks, seed)?
        }
        Workspace::Cylinder(space, (patch, _)) => {
            let source = match cfg.initial.as_ref() {
                Some(init) => Some(initial_source(
                    space,
                    init,
                    patch,
                    2,
                    |row| {
                        Ok(crate::space::CylinderPoint::new(
                            row[0].to_f64()?,
                            row[1].to_f64()?,
                        ))
                    },
                    |n, c| match n {
                        "height" => Some(crate::presets::height()),
                        "height_convex" => {
                            Some(crate::presets::seeded_height_convex(c.seed.unwrap_or(0)))
                        }
                        _ => None,
                    },
                )?),
                None => None,
            };
            drive_check(space, patch, &kind, source.as_ref(), &checks, seed)?
        }
        Workspace::Lattice(space, (patch, _)) => {
            let source = match cfg.initial.as_ref() {
                Some(init) => Some(initial_source(
                    space,
                    init,
                    patch,
                    2,
                    |row| {
                        Ok(crate::space::LatticePoint::new(
                            row[0].to_scalar()?,
                            row[1].to_scalar()?,
                        ))
                    },
                    |n, _| match n {
                        "norm1" => Some(crate::presets::norm1()),
                        "quadrant_product" => Some(crate::presets::quadrant_product(20)),
                        _ => None,
                    },
                )?),
                None => None,
            };
            // the one-weak notions dispatch specially on the lattice
            if let NotionKind::OneWeak(v) = &kind {
                let (points, preset) = source.as_ref().ok_or_else(|| {
                    ConfigError::Validation("one-weak needs an [initial] field".into())
                })?;
                let field = ScalarField::from_fn(
                    space,
                    points.clone(),
                    |p| (preset.eval)(p),
                    Some(preset.lipschitz),
                )
                .map_err(|e| ConfigError::Validation(e.to_string()))?;
                let params = CheckParams::new(checks.pair_budget.unwrap_or(2000), seed);
                let rep = check_one_weak_lattice(&field, &params, *v, &[])
                    .map_err(|e| ConfigError::Solve(e.to_string()))?;
                let pass = rep.pass;
                (vec![rep], Vec::new(), pass)
            } else {
                drive_check(space, patch, &kind, source.as_ref(), &checks, seed)?
            }
        }
        Workspace::Tree(space, (patch, _)) => {
            let source = match cfg.initial.as_ref() {
                Some(init) => Some(initial_source(
                    space,
                    init,
                    patch,
                    2,
                    |row| {
                        let edge = match row[0] {
                            Num::Int(e) if e >= 0 => e as usize,
                            _ => {
                                return Err(ConfigError::Validation(
                                    "tree table rows start with an edge index".into(),
                                ))
                            }
                        };
                        Ok(crate::space::TreePoint {
                            edge,
                            offset: row[1].to_f64()?,
                        })
                    },
                    |n, c| match n {
                        "dist_to_center" => Some(crate::presets::dist_to_node(space, 0)),
                        "cross_ramp" => Some(crate::presets::cross_ramp(space)),
                        "tree_convex" => Some(crate::presets::seeded_tree_convex(
                            space,
                            c.seed.unwrap_or(0),
                        )),
                        _ => None,
                    },
                )?),
                None => None,
            };
            drive_check(space, patch, &kind, source.as_ref(), &checks, seed)?
        }
    };
    let json = serde_json::json!({
        "command": "check",
        "notion": notion,
        "pass": pass,
        "convexity": convexity,
        "structure": structure,
    });
    Ok(RunArtifacts {
        json,
        csv: Vec::new(),
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_solve_config() {
        let cfg = parse(
            r#"
            [space]
            kind = "halfline"
            h = 0.01
            patch = [[0, 10]]

            [hamiltonian]
            kind = "linear"

            [initial]
            preset = "neg_x"

            [times]
            values = [0.5, 1.0]
            path = "eikonal-sup"
            "#,
        )
        .unwrap();
        let out = run_solve_config(&cfg, 0).unwrap();
        assert!(out.pass);
        assert_eq!(out.csv.len(), 2);
        assert!(out.csv[0].1.starts_with("point,value,witness"));
    }

    #[test]
    fn missing_hamiltonian_is_a_validation_error() {
        let cfg = parse(
            r#"
            [space]
            kind = "halfline"
            h = 0.01
            patch = [[0, 10]]

            [initial]
            preset = "neg_x"

            [times]
            values = [1.0]
            "#,
        )
        .unwrap();
        match run_solve_config(&cfg, 0) {
            Err(ConfigError::Validation(msg)) => assert!(msg.contains("hamiltonian")),
            other => panic!("expected validation error, got {:?}", other.is_ok()),
        }
    }

    #[test]
    fn bad_toml_is_a_parse_error() {
        assert!(matches!(parse("[space"), Err(ConfigError::Parse(_))));
        // unknown keys are rejected
        assert!(matches!(
            parse("[space]\nkind = \"halfline\"\nh = 0.1\nwhatever = 3\npatch = [[0,1]]"),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn check_dispatch_busemann() {
        let cfg = parse(
            r#"
            [space]
            kind = "euclidean"
            dim = 2
            p = 2.0
            h = 0.5
            patch = [[-2, 2], [-2, 2]]
            "#,
        )
        .unwrap();
        let out = run_check_config(&cfg, "busemann3", 3).unwrap();
        assert!(out.pass);
        let out = run_check_config(&cfg, "no-such-notion", 3);
        assert!(out.is_err());
    }

    #[test]
    fn check_weak_geodesic_on_lattice_norm_fails() {
        let cfg = parse(
            r#"
            [space]
            kind = "lattice"
            h = "1/4"
            patch = [[-3, 3], [-3, 3]]

            [initial]
            preset = "norm1"

            [checks]
            pair_budget = 1500
            "#,
        )
        .unwrap();
        let out = run_check_config(&cfg, "weak-geodesic", 5).unwrap();
        assert!(!out.pass);
        // the 1-weak relaxation also fails in the intrinsic graph
        // metric (the plain-l1 midpoint construction does not transfer)
        let out = run_check_config(&cfg, "one-weak", 5).unwrap();
        assert!(!out.pass);
    }

    #[test]
    fn ball_checks_exclude_truncated_window_centers() {
        // |x|_1 on a bounded window: corners cannot see their full
        // balls and must be excluded, not failed.
        let cfg = parse(
            r#"
            [space]
            kind = "lattice"
            h = "1/4"
            patch = [[-4, 4], [-4, 4]]

            [initial]
            preset = "norm1"

            [checks]
            delta = "1"
            r_grid = ["1/4", "1/2", "1"]
            "#,
        )
        .unwrap();
        let out = run_check_config(&cfg, "uniform-infty-subharmonious", 3).unwrap();
        assert!(out.pass, "{}", out.json);
        let margin = &out.json["convexity"][0]["worst_margin"]["exact"];
        assert_eq!(margin, "0");
    }

    #[test]
    fn table_initial_data_solves_and_checks() {
        // explicit sampled datum on the half line
        let cfg = parse(
            r#"
            [space]
            kind = "halfline"
            h = 0.5
            patch = [[0, 2]]

            [hamiltonian]
            kind = "linear"

            [initial]
            table = [[0, 0.0], [0.5, 0.5], [1, 1.0], [1.5, 1.5], [2, 2.0]]
            lipschitz = 1.0

            [times]
            values = [0.5]
            path = "eikonal-inf"
            "#,
        )
        .unwrap();
        let out = run_solve_config(&cfg, 0).unwrap();
        assert!(out.pass);
        // inf over the ball of radius 1/2 of the identity datum: x - 1/2
        assert!(out.csv[0].1.contains("\"1.5\",1.0"));

        // exact lattice table drives a convexity check
        let cfg = parse(
            r#"
            [space]
            kind = "lattice"
            h = "1/2"
            patch = [[-1, 1], [-1, 1]]

            [initial]
            table = [
                ["0", "0", "0"], ["1", "0", "1"], ["0", "1", "1"], ["1", "1", "2"],
                ["1/2", "0", "1/2"], ["0", "1/2", "1/2"], ["1", "1/2", "3/2"],
                ["1/2", "1", "3/2"],
            ]
            lipschitz = "1"
            "#,
        )
        .unwrap();
        let out = run_check_config(&cfg, "weak-geodesic", 3).unwrap();
        // the sampled |x|_1 patch hits the witness pair ((1/2,1),(1,1/2))
        assert!(!out.pass);

        // off-grid table points are rejected
        let cfg = parse(
            r#"
            [space]
            kind = "halfline"
            h = 0.5
            patch = [[0, 2]]

            [hamiltonian]
            kind = "linear"

            [initial]
            table = [[0.3, 1.0]]
            lipschitz = 1.0

            [times]
            values = [0.5]
            "#,
        )
        .unwrap();
        assert!(matches!(
            run_solve_config(&cfg, 0),
            Err(ConfigError::Validation(_))
        ));

        // table without lipschitz is rejected
        let cfg = parse(
            r#"
            [space]
            kind = "halfline"
            h = 0.5
            patch = [[0, 2]]

            [hamiltonian]
            kind = "linear"

            [initial]
            table = [[0.5, 1.0]]

            [times]
            values = [0.5]
            "#,
        )
        .unwrap();
        assert!(matches!(
            run_solve_config(&cfg, 0),
            Err(ConfigError::Validation(_))
        ));
    }

    #[test]
    fn power_hamiltonian_rejected_on_lattice() {
        let cfg = parse(
            r#"
            [space]
            kind = "lattice"
            h = "1/4"
            patch = [[-2, 2], [-2, 2]]

            [hamiltonian]
            kind = "power"
            alpha = 1.5

            [initial]
            preset = "norm1"

            [times]
            values = [1]
            path = "inf"
            "#,
        )
        .unwrap();
        assert!(matches!(
            run_solve_config(&cfg, 0),
            Err(ConfigError::Validation(_))
        ));
    }
}
