//! Structured records for bound evaluations and verification campaigns.
//!
//! A [`BoundReport`] describes one bound evaluation: the inputs, the bound
//! value, the measured left-hand side when one exists, and the slack
//! `bound - lhs`. A violation is recorded when the slack drops below
//! [`tol::VIOLATION_SLACK`] on a row that is not estimate-only.
//!
//! Emission is deterministic: fixed field order, shortest-round-trip float
//! formatting, no timestamps. Rerunning a campaign with the same seed must
//! produce byte-identical files.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::Variant;
use crate::{tol, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundFamily {
    EntropyEnergy,
    EofRank,
    EofEnergy,
    Equivocation,
    GenericLaa,
}

impl fmt::Display for BoundFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BoundFamily::EntropyEnergy => "entropy-energy",
            BoundFamily::EofRank => "eof-rank",
            BoundFamily::EofEnergy => "eof-energy",
            BoundFamily::Equivocation => "equivocation",
            BoundFamily::GenericLaa => "generic-laa",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidConfig {
                reason: format!("unknown report format {other:?} (expected json or csv)"),
            }),
        }
    }
}

/// Inputs of one bound evaluation. `eps` is the distance the bound was
/// evaluated at (the measured one in campaigns); `eps_target` is the
/// requested grid value when they differ.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ReportInputs {
    pub eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<String>,
    pub dims: Vec<usize>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub use_offset: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
}

/// One bound evaluation or one campaign trial.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub bound_family: BoundFamily,
    pub inputs: ReportInputs,
    pub bound_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    pub monotone_envelope_applied: bool,
    /// Set when the lhs is only an estimate (differences of one-sided
    /// bounds); such rows never count as violations.
    pub estimate_only: bool,
    pub violations: u64,
}

impl BoundReport {
    /// A bound evaluation without a measured left-hand side.
    pub fn evaluation(family: BoundFamily, inputs: ReportInputs, bound_value: f64) -> Self {
        Self {
            bound_family: family,
            inputs,
            bound_value,
            lhs_value: None,
            slack: None,
            monotone_envelope_applied: false,
            estimate_only: false,
            violations: 0,
        }
    }

    /// A campaign trial with measured lhs; computes slack and the violation
    /// flag.
    pub fn with_lhs(
        family: BoundFamily,
        inputs: ReportInputs,
        bound_value: f64,
        lhs_value: f64,
    ) -> Self {
        let slack = bound_value - lhs_value;
        let violations = u64::from(slack < tol::VIOLATION_SLACK);
        Self {
            bound_family: family,
            inputs,
            bound_value,
            lhs_value: Some(lhs_value),
            slack: Some(slack),
            monotone_envelope_applied: false,
            estimate_only: false,
            violations,
        }
    }

    /// Mark the lhs as estimate-only (never a violation witness).
    pub fn estimate_only(mut self) -> Self {
        self.estimate_only = true;
        self.violations = 0;
        self
    }

    /// Tightness ratio `lhs / bound` when both sides are meaningful.
    pub fn lhs_bound_ratio(&self) -> Option<f64> {
        let lhs = self.lhs_value?;
        (self.bound_value > 1e-15).then(|| lhs / self.bound_value)
    }
}

/// Campaign roll-up: total violations and the largest tightness ratio.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CampaignSummary {
    pub reports: u64,
    pub violations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_lhs_bound_ratio: Option<f64>,
}

pub fn summarize(reports: &[BoundReport]) -> CampaignSummary {
    let violations = reports.iter().map(|r| r.violations).sum();
    let max_ratio = reports
        .iter()
        .filter(|r| !r.estimate_only)
        .filter_map(BoundReport::lhs_bound_ratio)
        .fold(None, |acc: Option<f64>, x| {
            Some(acc.map_or(x, |a| a.max(x)))
        });
    CampaignSummary {
        reports: reports.len() as u64,
        violations,
        max_lhs_bound_ratio: max_ratio,
    }
}

const CSV_HEADER: &str = "family,trial,seed,dims,spectrum,variant,offset,eps_target,eps,energy,rank,lhs,bound,slack,ratio,monotone_envelope,estimate_only,violation";

fn csv_opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or(String::new(), T::to_string)
}

fn csv_row(r: &BoundReport) -> String {
    let dims = r
        .inputs
        .dims
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join("x");
    let spectrum = r.inputs.spectrum.clone().unwrap_or_default();
    let variant = r.inputs.variant.map_or(String::new(), |v| v.to_string());
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.bound_family,
        csv_opt(&r.inputs.trial),
        r.inputs.seed,
        dims,
        spectrum,
        variant,
        csv_opt(&r.inputs.use_offset),
        csv_opt(&r.inputs.eps_target),
        r.inputs.eps,
        csv_opt(&r.inputs.energy),
        csv_opt(&r.inputs.rank),
        csv_opt(&r.lhs_value),
        r.bound_value,
        csv_opt(&r.slack),
        csv_opt(&r.lhs_bound_ratio()),
        r.monotone_envelope_applied,
        r.estimate_only,
        r.violations,
    )
}

/// Render rows plus a summary footer row. An empty stream renders the
/// header only.
pub fn render_csv(reports: &[BoundReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    if !reports.is_empty() {
        let s = summarize(reports);
        out.push_str(&format!(
            "summary,{},,,,,,,,,,,,,{},,,{}\n",
            s.reports,
            s.max_lhs_bound_ratio
                .map_or(String::new(), |r| r.to_string()),
            s.violations,
        ));
    }
    out
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    reports: &'a [BoundReport],
    summary: CampaignSummary,
}

pub fn render_json(reports: &[BoundReport]) -> String {
    let doc = JsonDocument {
        reports,
        summary: summarize(reports),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("reports serialize");
    text.push('\n');
    text
}

pub fn render(reports: &[BoundReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => render_csv(reports),
        ReportFormat::Json => render_json(reports),
    }
}

/// Write a report file; reruns with identical reports produce byte-identical
/// output.
pub fn emit_report(
    reports: &[BoundReport],
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render(reports, format)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report(trial: u64, lhs: f64, bound: f64) -> BoundReport {
        BoundReport::with_lhs(
            BoundFamily::EntropyEnergy,
            ReportInputs {
                eps: 0.1,
                eps_target: Some(0.1),
                energy: Some(1.0),
                spectrum: Some("list[0,1]".into()),
                dims: vec![2],
                seed: 7,
                trial: Some(trial),
                variant: Some(Variant::New),
                use_offset: Some(false),
                rank: None,
            },
            bound,
            lhs,
        )
    }

    #[test]
    fn empty_stream_renders_header_only() {
        let text = render_csv(&[]);
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("family,"));
    }

    #[test]
    fn single_report_renders_one_data_row() {
        let text = render_csv(&[sample_report(0, 0.2, 0.5)]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3); // header + row + summary
        assert!(lines[1].starts_with("entropy-energy,0,7,2,list[0,1],new,false,0.1,0.1,1,"));
        assert!(lines[2].starts_with("summary,1,"));
    }

    #[test]
    fn summary_counts_violations_and_ratio() {
        let reports = vec![
            sample_report(0, 0.2, 0.5),
            sample_report(1, 0.6, 0.5), // violation
            sample_report(2, 0.25, 0.5),
        ];
        let s = summarize(&reports);
        assert_eq!(s.reports, 3);
        assert_eq!(s.violations, 1);
        assert!((s.max_lhs_bound_ratio.unwrap() - 1.2).abs() < 1e-12);
    }

    #[test]
    fn tiny_negative_slack_is_not_a_violation() {
        let r = sample_report(0, 0.5 + 1e-10, 0.5);
        assert_eq!(r.violations, 0);
        let r = sample_report(0, 0.5 + 1e-8, 0.5);
        assert_eq!(r.violations, 1);
    }

    #[test]
    fn estimate_only_rows_never_violate() {
        let r = sample_report(0, 99.0, 0.5).estimate_only();
        assert_eq!(r.violations, 0);
        let s = summarize(&[r]);
        assert!(s.max_lhs_bound_ratio.is_none());
    }

    #[test]
    fn renders_are_deterministic() {
        let reports = vec![sample_report(0, 0.2, 0.5), sample_report(1, 0.3, 0.6)];
        assert_eq!(render_csv(&reports), render_csv(&reports));
        assert_eq!(render_json(&reports), render_json(&reports));
        let json = render_json(&reports);
        assert!(json.contains("\"summary\""));
    }

    #[test]
    fn emit_writes_files_with_path_context_on_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        emit_report(&[sample_report(0, 0.1, 0.4)], ReportFormat::Csv, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("family,"));

        let bad = dir.path().join("missing").join("out.csv");
        let err = emit_report(&[], ReportFormat::Csv, &bad).unwrap_err();
        assert!(err.to_string().contains("missing"));
    }
}
