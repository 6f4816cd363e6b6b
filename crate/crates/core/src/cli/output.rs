//! Text formats: pattern and analysis CSV, counts CSV, report JSON.
//!
//! Every float is written with 15 significant digits, so parsing a file and
//! writing it again reproduces it byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use crate::context::{Context, EnsembleCounts, OutcomeSpace};
use crate::format_sig;
use crate::round_sig;
use crate::twoslit::{two_slit_density, EmpiricalAnalysis, ExperimentReport, TwoSlitScenario};

use super::scenario_file::ScenarioFile;
use super::CliError;

pub const PATTERN_HEADER: &str = "x,p1,p2,theta,p_classical,p_interference";
pub const ANALYSIS_HEADER: &str = "bin,p_hat_S,p_hat_1,p_hat_2,delta,lambda,kind,theta,stderr_lambda";
pub const COUNTS_HEADER: &str = "bin,count";

/// One row per bin: envelopes, phase shift, total-probability value and
/// the full interference value (unnormalized).
pub fn pattern_csv(scenario: &TwoSlitScenario) -> String {
    let mut out = String::from(PATTERN_HEADER);
    out.push('\n');
    let coeffs = scenario.coefficients();
    for (i, &x) in scenario.positions().iter().enumerate() {
        let (p1, p2, theta) = (scenario.envelope1()[i], scenario.envelope2()[i], scenario.theta()[i]);
        let classical = crate::interference::total_probability(&coeffs, p1, p2);
        let full = two_slit_density(p1, p2, theta);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_sig(x),
            format_sig(p1),
            format_sig(p2),
            format_sig(theta),
            format_sig(classical),
            format_sig(full)
        );
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map(format_sig).unwrap_or_default()
}

pub fn analysis_csv(analysis: &EmpiricalAnalysis) -> String {
    let mut out = String::from(ANALYSIS_HEADER);
    out.push('\n');
    for b in &analysis.bins {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            b.bin,
            format_sig(b.p_hat_s),
            format_sig(b.p_hat_1),
            format_sig(b.p_hat_2),
            format_sig(b.delta),
            opt(b.lambda),
            b.kind.name(),
            opt(b.theta),
            opt(b.stderr_lambda)
        );
    }
    let c = &analysis.coefficients;
    let _ = writeln!(out, "# c_hat_1,{}", format_sig(c.c1));
    let _ = writeln!(out, "# c_hat_2,{}", format_sig(c.c2));
    let _ = writeln!(
        out,
        "# alternative_deviation,{}",
        format_sig(analysis.alternative_deviation)
    );
    let _ = writeln!(
        out,
        "# violation_statistic,{}",
        format_sig(analysis.violation_statistic)
    );
    out
}

pub fn counts_csv(space: &OutcomeSpace, counts: &EnsembleCounts) -> String {
    let mut out = String::from(COUNTS_HEADER);
    out.push('\n');
    for (label, k) in space.labels().iter().zip(&counts.counts) {
        let _ = writeln!(out, "{label},{k}");
    }
    out
}

/// Bin labels and counts of one `bin,count` file, in file order.
pub type CountsTable = (Vec<String>, Vec<u64>);

/// Read a `bin,count` file into ordered labels and counts.
pub fn read_counts(path: &Path) -> Result<CountsTable, CliError> {
    let shown = path.display();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Input(format!("{shown}: {e}")))?;
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Input(format!("{shown}: {e}")))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["bin", "count"] {
        return Err(CliError::Input(format!(
            "{shown}: header must be `{COUNTS_HEADER}`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut labels = Vec::new();
    let mut counts = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| CliError::Input(format!("{shown}: {e}")))?;
        let label = rec[0].to_string();
        let count: u64 = rec[1].parse().map_err(|_| {
            CliError::Input(format!(
                "{shown}:{line}: count `{}` is not a non-negative integer",
                &rec[1]
            ))
        })?;
        labels.push(label);
        counts.push(count);
    }
    if labels.is_empty() {
        return Err(CliError::Input(format!("{shown}: no bins")));
    }
    Ok((labels, counts))
}

/// Align three counts files on the bin labels of the first.
pub fn align_counts(files: [(&Path, CountsTable); 3]) -> Result<(OutcomeSpace, [EnsembleCounts; 3]), CliError> {
    let [(path_s, (labels, counts_s)), (path_1, f1), (path_2, f2)] = files;
    let space = OutcomeSpace::from_labels(labels).map_err(|e| CliError::Input(format!("{}: {e}", path_s.display())))?;
    let align = |path: &Path, (labels, counts): CountsTable| -> Result<Vec<u64>, CliError> {
        if labels.len() != space.len() {
            return Err(CliError::Input(format!(
                "{}: {} bins, expected {} as in {}",
                path.display(),
                labels.len(),
                space.len(),
                path_s.display()
            )));
        }
        let mut aligned = vec![None; space.len()];
        for (label, k) in labels.iter().zip(counts) {
            let idx = space.index_of(label).ok_or_else(|| {
                CliError::Input(format!(
                    "{}: bin `{label}` not present in {}",
                    path.display(),
                    path_s.display()
                ))
            })?;
            if aligned[idx].replace(k).is_some() {
                return Err(CliError::Input(format!("{}: duplicate bin `{label}`", path.display())));
            }
        }
        Ok(aligned.into_iter().map(|k| k.expect("bijective labels")).collect())
    };
    let c1 = align(path_1, f1)?;
    let c2 = align(path_2, f2)?;
    Ok((
        space,
        [
            EnsembleCounts::detected_only(Context::S, counts_s),
            EnsembleCounts::detected_only(Context::S1, c1),
            EnsembleCounts::detected_only(Context::S2, c2),
        ],
    ))
}

/// Written by `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub scenario: ScenarioFile,
    pub report: ExperimentReport,
}

impl ReportDocument {
    pub fn new(scenario: ScenarioFile, report: ExperimentReport) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            scenario,
            report,
        }
    }

    pub fn parse(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        canonical_json(self)
    }
}

fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig(n.as_f64().expect("f64 number"));
            *n = Number::from_f64(r).expect("finite float");
        }
        Value::Array(a) => a.iter_mut().for_each(round_numbers),
        Value::Object(m) => m.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// Pretty JSON with floats rounded to 15 significant digits.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report serializes");
    round_numbers(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}
