//! Serializable verdict objects shared by the convexity and structure
//! checks and by the CLI. Reports are type-erased: margins carry an
//! f64 approximation plus the exact rational string when the underlying
//! scalar is exact.

use serde::Serialize;

use crate::scalar::Scalar;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ScalarRepr {
    pub approx: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

impl ScalarRepr {
    pub fn of<S: Scalar>(v: S) -> Self {
        Self {
            approx: v.to_f64(),
            exact: if S::EXACT { Some(v.key()) } else { None },
        }
    }
}

/// A labelled margin from the deterministic (adversarial) part of the
/// sample set; lets callers pin named witnesses exactly.
#[derive(Clone, Debug, Serialize)]
pub struct NamedMargin {
    pub label: String,
    pub margin: ScalarRepr,
    pub witness: Vec<String>,
}

/// Verdict for one convexity notion on one field.
#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    pub notion: String,
    pub pass: bool,
    /// Most negative slack of the tested inequality (negative = violated).
    pub worst_margin: ScalarRepr,
    /// Offending tuple as canonical point keys (x, y, z / z, r ...).
    pub witness: Vec<String>,
    /// The same witness as tagged point records.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witness_points: Vec<serde_json::Value>,
    pub pairs_tested: usize,
    /// Pairs skipped because a midpoint was not resolvable at `h`.
    pub skipped: usize,
    pub tau: ScalarRepr,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<ScalarRepr>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub r_grid: Vec<ScalarRepr>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub named: Vec<NamedMargin>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ConvexityReport {
    pub fn verdict(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

/// Verdict for a metric-structure condition on one space.
#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    /// `busemann3`, `busemann4`, or `uniform_npc`.
    pub condition: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<ScalarRepr>,
    pub worst_margin: ScalarRepr,
    /// Offending tuple with its midpoints, as canonical point keys.
    pub witness: Vec<String>,
    /// The same witness as tagged point records.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witness_points: Vec<serde_json::Value>,
    pub tuples_tested: usize,
    pub tau: ScalarRepr,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub named: Vec<NamedMargin>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl StructureReport {
    pub fn verdict(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

/// Serialized solve outcome (values live in the CSV; this is metadata
/// plus small field slices when requested).
#[derive(Clone, Debug, Serialize)]
pub struct SolveSummary {
    pub path: String,
    pub t: ScalarRepr,
    pub radius: ScalarRepr,
    pub points: usize,
    pub min_candidates: usize,
    pub max_candidates: usize,
    pub wall_ms: f64,
}

/// One golden comparison inside an experiment.
#[derive(Clone, Debug, Serialize)]
pub struct GoldenCheck {
    pub name: String,
    /// Provenance of the expected value: a registered `reference`
    /// constant, an independently derived `oracle` value, or a plain
    /// `identity`.
    pub provenance: String,
    pub expected: String,
    pub actual: String,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl GoldenCheck {
    pub fn exact<S: Scalar>(name: &str, provenance: &str, expected: S, actual: S) -> Self {
        Self {
            name: name.into(),
            provenance: provenance.into(),
            expected: expected.key(),
            actual: actual.key(),
            tolerance: 0.0,
            pass: expected == actual,
            note: None,
        }
    }

    pub fn close(name: &str, provenance: &str, expected: f64, actual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            provenance: provenance.into(),
            expected: format!("{expected}"),
            actual: format!("{actual}"),
            tolerance: tol,
            pass: (expected - actual).abs() <= tol,
            note: None,
        }
    }

    pub fn holds(name: &str, provenance: &str, condition: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            provenance: provenance.into(),
            expected: "true".into(),
            actual: detail,
            tolerance: 0.0,
            pass: condition,
            note: None,
        }
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A whole experiment run: golden table plus attached artifacts.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub seed: u64,
    pub goldens: Vec<GoldenCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub convexity: Vec<ConvexityReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub structure: Vec<StructureReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub solves: Vec<SolveSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub wall_ms: f64,
}

impl ExperimentReport {
    pub fn all_pass(&self) -> bool {
        self.goldens.iter().all(|g| g.pass)
    }

    /// Plain-text diff table for failed goldens.
    pub fn diff_table(&self) -> String {
        let mut out = String::new();
        for g in &self.goldens {
            if !g.pass {
                out.push_str(&format!(
                    "MISMATCH {}: expected {} got {} (tol {}){}\n",
                    g.name,
                    g.expected,
                    g.actual,
                    g.tolerance,
                    g.note
                        .as_deref()
                        .map(|n| format!(" [{n}]"))
                        .unwrap_or_default()
                ));
            }
        }
        out
    }
}

/// CSV rows for a solved slice: `point,value,witness` with canonical
/// point ordering (lexicographic on the serialized coordinates).
pub fn field_csv<Sp: crate::space::GeodesicSpace>(
    report: &crate::solve::SolveReport<'_, Sp>,
    u0: &crate::field::ScalarField<'_, Sp>,
) -> String {
    let space = report.field.space;
    let mut rows: Vec<(String, String, String)> = (0..report.field.len())
        .map(|i| {
            (
                space.point_key(report.field.point(i)),
                match report.field.value(i) {
                    crate::ext::Ext::Finite(v) => v.key(),
                    other => format!("{other}"),
                },
                space.point_key(u0.point(report.witnesses[i])),
            )
        })
        .collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = String::from("point,value,witness\n");
    for (p, v, w) in rows {
        out.push_str(&format!("\"{p}\",{v},\"{w}\"\n"));
    }
    out
}
