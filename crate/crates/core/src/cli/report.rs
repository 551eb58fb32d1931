use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    best_lower_bound, weighted_inequality_check, BoundName, BoundOptions, BoundResult, Condition,
    Diagnostic, Fault, WeightedForm,
};
use crate::error::Error;
use crate::sip::{sip, Enclosure, SipQuery, Which};
use crate::space::{NormSpec, Vector};
use crate::witness::{slack_curve, SlackTable, WitnessKind, DEFAULT_WITNESS_COUNT};

use super::input::{Dataset, Overrides};
use super::{InputError, EXIT_OK, EXIT_VIOLATION};

pub const REPORT_SCHEMA: &str = "normsip.report/v1";
pub const WITNESS_SCHEMA: &str = "normsip.witness/v1";

/// One weighted aggregate inequality evaluated at one anchor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: WeightedForm,
    pub anchor: usize,
    pub applicable: bool,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub holds: Option<bool>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Both semi-inner products of one input vector against one anchor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SipEntry {
    pub vector: usize,
    pub anchor: usize,
    pub inferior: Enclosure,
    pub superior: Enclosure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub norm: String,
    pub dim: usize,
    pub count: usize,
    pub weights: Vec<f64>,
    pub tol: f64,
    pub ratio: f64,
    pub anchors: Vec<Vector>,
    pub bounds: Vec<BoundResult>,
    pub best_lower: Option<BoundResult>,
    pub upper_refinement: Option<BoundResult>,
    pub checks: Vec<CheckEntry>,
    pub sip_enclosures: Vec<SipEntry>,
    pub witness: Vec<SlackTable>,
    pub warnings: Vec<String>,
    pub violations: Vec<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            EXIT_OK
        } else {
            EXIT_VIOLATION
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReportOptions {
    pub overrides: Overrides,
    pub bounds: Vec<BoundName>,
    pub rho: Option<f64>,
    /// Witness tables to attach, measured at the first anchor.
    pub witness: Vec<WitnessKind>,
    pub eps: Vec<f64>,
    pub fault: Option<Fault>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            overrides: Overrides::default(),
            bounds: BoundName::ALL.to_vec(),
            rho: None,
            witness: Vec::new(),
            eps: vec![0.5, 0.1, 0.01, 0.001],
            fault: None,
        }
    }
}

/// Loads a dataset (`.csv` by extension, JSON otherwise) and builds its report.
pub fn run_report(path: &Path, options: &ReportOptions) -> Result<Report, InputError> {
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let dataset = if is_csv {
        Dataset::from_csv(&text, &options.overrides)?
    } else {
        Dataset::from_json(&text, &options.overrides)?
    };
    build_report(&dataset, options)
}

pub fn build_report(data: &Dataset, options: &ReportOptions) -> Result<Report, InputError> {
    if let Some(rho) = options.rho {
        if !(rho.is_finite() && rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidRho(rho).into());
        }
    }
    let bound_options = BoundOptions {
        tol: data.tol,
        bounds: options.bounds.clone(),
        rho: options.rho,
        fault: options.fault,
    };
    let xs = &data.vectors;
    let ps = &data.weights;
    let n = &data.norm;
    let bounds = best_lower_bound(xs, ps, n, &data.anchor, &bound_options)?;

    let mut checks = Vec::new();
    let mut sip_enclosures = Vec::new();
    for (k, a) in bounds.anchors.iter().enumerate() {
        for form in [WeightedForm::Quadratic, WeightedForm::Product] {
            checks.push(check_entry(xs, ps, a, n, form, k)?);
        }
        for (j, x) in xs.iter().enumerate() {
            let query = |which| SipQuery::new(x, a, n, which).with_tol(data.tol);
            sip_enclosures.push(SipEntry {
                vector: j,
                anchor: k,
                inferior: sip(&query(Which::Inferior))?,
                superior: sip(&query(Which::Superior))?,
            });
        }
    }

    let mut warnings = data.warnings.clone();
    let mut witness = Vec::new();
    if !options.witness.is_empty() {
        match bounds.anchors.first().filter(|a| !a.is_zero()) {
            Some(a) => {
                for &kind in &options.witness {
                    witness.push(slack_curve(
                        kind,
                        a,
                        n,
                        &options.eps,
                        DEFAULT_WITNESS_COUNT,
                    )?);
                }
            }
            None => warnings.push("witness tables skipped: the anchor is zero".into()),
        }
    }

    let mut violations = bounds.soundness_violations();
    for c in &checks {
        if c.holds == Some(false) {
            violations.push(format!(
                "{} at anchor {}: lhs {} < rhs {}",
                c.name.tag(),
                c.anchor,
                c.lhs.unwrap_or(f64::NAN),
                c.rhs.unwrap_or(f64::NAN)
            ));
        }
    }
    for t in &witness {
        violations.extend(
            t.violations()
                .into_iter()
                .map(|v| format!("{}: {v}", t.kind)),
        );
    }

    Ok(Report {
        schema: REPORT_SCHEMA.into(),
        norm: n.to_string(),
        dim: xs[0].dim(),
        count: xs.len(),
        weights: ps.as_slice().to_vec(),
        tol: data.tol,
        ratio: bounds.ratio,
        anchors: bounds.anchors,
        bounds: bounds.results,
        best_lower: bounds.best_lower,
        upper_refinement: bounds.upper_refinement,
        checks,
        sip_enclosures,
        witness,
        warnings,
        violations,
    })
}

fn check_entry(
    xs: &[Vector],
    ps: &crate::bounds::WeightVector,
    a: &Vector,
    n: &NormSpec,
    form: WeightedForm,
    anchor: usize,
) -> Result<CheckEntry, InputError> {
    let mut entry = CheckEntry {
        name: form,
        anchor,
        applicable: false,
        lhs: None,
        rhs: None,
        holds: None,
        diagnostics: Vec::new(),
    };
    match weighted_inequality_check(xs, ps, a, n, form) {
        Ok(c) => {
            entry.applicable = true;
            entry.lhs = Some(c.lhs);
            entry.rhs = Some(c.rhs);
            entry.holds = Some(c.holds);
        }
        Err(Error::Precondition(diags)) => entry.diagnostics = diags,
        Err(Error::ZeroVector(_)) => entry.diagnostics.push(Diagnostic {
            index: None,
            condition: Condition::ZeroAnchor,
            detail: "anchor is zero".into(),
        }),
        Err(e) => return Err(e.into()),
    }
    Ok(entry)
}

#[derive(Clone, Debug)]
pub struct WitnessOptions {
    pub norm: NormSpec,
    pub anchor: Vector,
    pub count: usize,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            norm: NormSpec::lp(2.0).expect("2 is a valid exponent"),
            anchor: Vector::new(vec![1.0, 0.0]).expect("finite and nonempty"),
            count: DEFAULT_WITNESS_COUNT,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub schema: String,
    pub table: SlackTable,
    pub violations: Vec<String>,
}

impl WitnessReport {
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            EXIT_OK
        } else {
            EXIT_VIOLATION
        }
    }
}

pub fn run_witness(
    kind: WitnessKind,
    eps_list: &[f64],
    options: &WitnessOptions,
) -> Result<WitnessReport, InputError> {
    let table = slack_curve(
        kind,
        &options.anchor,
        &options.norm,
        eps_list,
        options.count,
    )?;
    Ok(WitnessReport {
        schema: WITNESS_SCHEMA.into(),
        violations: table.violations(),
        table,
    })
}

/// Pretty JSON with a trailing newline. Floats use the shortest
/// representation that parses back to the same value.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:?}"))
}

pub fn render_report_text(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "schema   {}", r.schema);
    let _ = writeln!(
        s,
        "norm     {}  (dim {}, {} vectors)",
        r.norm, r.dim, r.count
    );
    let _ = writeln!(s, "ratio    {:?}", r.ratio);
    for (k, a) in r.anchors.iter().enumerate() {
        let _ = writeln!(s, "anchor   #{k} {:?}", a.coords());
    }
    let _ = writeln!(s, "\nbounds");
    for b in &r.bounds {
        let anchor = b.anchor.map_or_else(String::new, |k| format!(" @#{k}"));
        let state = if b.applicable { "ok " } else { "n/a" };
        let _ = writeln!(
            s,
            "  {:<6}{:<5} {state} {:?} {}",
            b.name.tag(),
            anchor,
            b.certificate_side,
            opt(b.value)
        );
        for d in &b.diagnostics {
            let _ = writeln!(s, "      - {d}");
        }
    }
    if let Some(b) = &r.best_lower {
        let _ = writeln!(s, "best lower        {} ({})", opt(b.value), b.name.tag());
    }
    if let Some(b) = &r.upper_refinement {
        let _ = writeln!(s, "upper refinement  {} ({})", opt(b.value), b.name.tag());
    }
    let _ = writeln!(s, "\nchecks");
    for c in &r.checks {
        let _ = writeln!(
            s,
            "  {:<6}@#{} lhs {} rhs {} holds {}",
            c.name.tag(),
            c.anchor,
            opt(c.lhs),
            opt(c.rhs),
            c.holds.map_or("-", |h| if h { "yes" } else { "NO" })
        );
        for d in &c.diagnostics {
            let _ = writeln!(s, "      - {d}");
        }
    }
    let _ = writeln!(s, "\nsemi-inner products");
    for e in &r.sip_enclosures {
        let _ = writeln!(
            s,
            "  x{} @#{}  inf [{:?}, {:?}]  sup [{:?}, {:?}]",
            e.vector, e.anchor, e.inferior.lo, e.inferior.hi, e.superior.lo, e.superior.hi
        );
    }
    for t in &r.witness {
        s.push('\n');
        s.push_str(&render_table(t));
    }
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    for v in &r.violations {
        let _ = writeln!(s, "VIOLATION: {v}");
    }
    s
}

fn render_table(t: &SlackTable) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "witness {} ({}, n = {})", t.kind, t.norm, t.count);
    let _ = writeln!(s, "  eps  admissible  measured  quotient  slack");
    for row in &t.rows {
        let _ = writeln!(
            s,
            "  {:?}  {:?}  {}  {:?}  {:?}",
            row.eps,
            row.admissible_constant,
            opt(row.measured_constant),
            row.bound_quotient,
            row.measured_slack
        );
    }
    s
}

pub fn render_witness_text(w: &WitnessReport) -> String {
    let mut s = render_table(&w.table);
    for v in &w.violations {
        let _ = writeln!(s, "VIOLATION: {v}");
    }
    s
}
