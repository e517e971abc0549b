//! `sembound`: evaluate and verify semicontinuity bounds for entropy-type
//! functions.
//!
//! Exit codes: 0 on success (and zero violations), 2 when a verification
//! campaign found violations, 1 for usage, configuration, or I/O errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use sembound_core::bounds::{
    compare_corrections, entropy_bound, eof_energy_bound, eof_rank_bound, equivocation_bound,
    Variant,
};
use sembound_core::campaign::{verify_entropy, verify_eof, verify_equivocation, CampaignConfig};
use sembound_core::operator::{DensityMatrix, MatrixJson};
use sembound_core::report::{emit_report, render, summarize, BoundReport, ReportFormat};
use sembound_core::HamiltonianSpectrum;

const LN_2: f64 = std::f64::consts::LN_2;

#[derive(Parser)]
#[command(
    name = "sembound",
    version,
    about = "Semicontinuity bounds for entropy-type functions: evaluation, comparison, and Monte-Carlo verification"
)]
struct Cli {
    /// Master seed for campaigns (overrides the config file when set).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output format for evaluations and reports.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Display entropic quantities in bits (default: nats).
    #[arg(long, global = true, conflicts_with = "nats")]
    bits: bool,

    /// Display entropic quantities in nats (the default).
    #[arg(long, global = true)]
    nats: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve the Gibbs state for a spectrum at a given mean energy.
    Gibbs {
        /// Spectrum: path to a JSON file or inline JSON
        /// ({"kind":"list","levels":[...]} or {"kind":"linear","omega":w,"N":n}).
        #[arg(long)]
        spec: String,
        /// Energy constraint E > 0.
        #[arg(long)]
        energy: f64,
    },
    /// Evaluate one semicontinuity bound.
    Bound {
        #[command(subcommand)]
        family: BoundCommand,
    },
    /// Run a Monte-Carlo bound-violation campaign from a config file.
    Verify {
        /// Bound family: entropy, eof, or equivocation.
        #[arg(value_parser = ["entropy", "eof", "equivocation"])]
        family: String,
        /// Campaign configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Report destination (overrides the config's output path).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Tabulate the old correction term g against the new capped binary
    /// entropy on a grid.
    Compare {
        /// Grid as start:end:step, e.g. 0.05:1:0.05 (values in (0, 1]).
        #[arg(long)]
        grid: String,
    },
}

#[derive(Subcommand)]
enum BoundCommand {
    /// Entropy under an energy constraint:
    /// eps F_H((E - E_off)/eps) + correction(eps).
    Entropy(EntropyArgs),
    /// EoF under a marginal-rank constraint:
    /// delta ln(rank) + correction(delta).
    EofRank {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value = "new")]
        variant: VariantArg,
    },
    /// EoF under a marginal-energy constraint:
    /// delta F_H(E/delta) + correction(delta).
    EofEnergy {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        energy: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value = "new")]
        variant: VariantArg,
    },
    /// Equivocation of discrete pairs: eps g(E/eps) + h2_tilde(eps).
    Equivocation {
        #[arg(long)]
        energy: f64,
        #[arg(long)]
        eps: f64,
    },
}

#[derive(Args)]
struct EntropyArgs {
    #[arg(long)]
    spec: String,
    #[arg(long)]
    energy: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long, value_enum, default_value = "new")]
    variant: VariantArg,
    /// State file ({dim, re, im} JSON) enabling the tighter offset form.
    #[arg(long)]
    offset_state: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum VariantArg {
    Old,
    New,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Old => Variant::Old,
            VariantArg::New => Variant::New,
        }
    }
}

/// Presentation scaling: nats by default, bits on request.
struct Units {
    bits: bool,
}

impl Units {
    fn scale(&self, nats: f64) -> f64 {
        if self.bits {
            nats / LN_2
        } else {
            nats
        }
    }

    fn label(&self) -> &'static str {
        if self.bits {
            "bits"
        } else {
            "nats"
        }
    }
}

fn load_spectrum(arg: &str) -> Result<HamiltonianSpectrum> {
    if Path::new(arg).exists() {
        let text =
            std::fs::read_to_string(arg).with_context(|| format!("reading spectrum file {arg}"))?;
        return HamiltonianSpectrum::from_json_str(&text)
            .with_context(|| format!("parsing spectrum file {arg}"));
    }
    HamiltonianSpectrum::from_json_str(arg)
        .with_context(|| format!("parsing inline spectrum {arg:?} (not an existing file)"))
}

fn load_state(path: &Path) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading state file {}", path.display()))?;
    let json: MatrixJson = serde_json::from_str(&text)
        .with_context(|| format!("parsing state file {}", path.display()))?;
    Ok(DensityMatrix::from_json(&json)?)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!("grid must be start:end:step, got {spec:?}");
    }
    let start: f64 = parts[0].parse().context("grid start")?;
    let end: f64 = parts[1].parse().context("grid end")?;
    let step: f64 = parts[2].parse().context("grid step")?;
    if !(start > 0.0 && step > 0.0 && end >= start) {
        bail!("grid needs 0 < start <= end and step > 0");
    }
    let mut grid = Vec::new();
    let mut k = 0u64;
    loop {
        let x = start + step * k as f64;
        if x > end + 1e-12 {
            break;
        }
        grid.push(x.min(end));
        k += 1;
    }
    Ok(grid)
}

/// One key/value output block, rendered as a JSON object or CSV pair rows.
struct Output {
    fields: Vec<(&'static str, serde_json::Value)>,
}

impl Output {
    fn new() -> Self {
        Self { fields: Vec::new() }
    }

    fn push(mut self, key: &'static str, value: impl Into<serde_json::Value>) -> Self {
        self.fields.push((key, value.into()));
        self
    }

    fn print(self, format: ReportFormat) {
        match format {
            ReportFormat::Json => {
                let map: serde_json::Map<String, serde_json::Value> = self
                    .fields
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), v))
                    .collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::Value::Object(map))
                        .expect("serializable output")
                );
            }
            ReportFormat::Csv => {
                let header: Vec<&str> = self.fields.iter().map(|(k, _)| *k).collect();
                let row: Vec<String> = self
                    .fields
                    .iter()
                    .map(|(_, v)| match v {
                        serde_json::Value::String(s) => s.clone(),
                        serde_json::Value::Array(a) => a
                            .iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(";"),
                        other => other.to_string(),
                    })
                    .collect();
                println!("{}", header.join(","));
                println!("{}", row.join(","));
            }
        }
    }
}

fn run_gibbs(spec_arg: &str, energy: f64, units: &Units, format: ReportFormat) -> Result<()> {
    let spec = load_spectrum(spec_arg)?;
    let beta = spec.solve_beta(energy)?;
    let fh = spec.f_h_detail(energy)?;
    let state = spec.gibbs_state(energy)?;
    Output::new()
        .push("spectrum", spec.describe())
        .push("energy", energy)
        .push("beta", beta)
        .push("f_h", units.scale(fh.value))
        .push("f_h_capped", fh.capped)
        .push("unit", units.label())
        .push("state", state)
        .print(format);
    Ok(())
}

fn run_bound(cmd: &BoundCommand, units: &Units, format: ReportFormat) -> Result<()> {
    match cmd {
        BoundCommand::Entropy(args) => {
            let spec = load_spectrum(&args.spec)?;
            let offset_state = args.offset_state.as_deref().map(load_state).transpose()?;
            let variant: Variant = args.variant.into();
            let b = entropy_bound(&spec, args.energy, args.eps, variant, offset_state.as_ref())?;
            if b.offset_clamped {
                eprintln!("warning: energy offset exceeded the budget; F-term clamped to 0");
            }
            Output::new()
                .push("family", "entropy-energy")
                .push("variant", variant.to_string())
                .push("eps", args.eps)
                .push("energy", args.energy)
                .push("spectrum", spec.describe())
                .push("bound", units.scale(b.value))
                .push("f_term", units.scale(b.f_term))
                .push("correction", units.scale(b.correction))
                .push("effective_energy", b.effective_energy)
                .push(
                    "offset",
                    b.offset.map_or(serde_json::Value::Null, |x| x.into()),
                )
                .push("offset_clamped", b.offset_clamped)
                .push("f_capped", b.f_capped)
                .push("unit", units.label())
                .print(format);
        }
        BoundCommand::EofRank { rank, eps, variant } => {
            let variant: Variant = (*variant).into();
            let value = eof_rank_bound(*rank, *eps, variant)?;
            Output::new()
                .push("family", "eof-rank")
                .push("variant", variant.to_string())
                .push("eps", *eps)
                .push("rank", *rank)
                .push("bound", units.scale(value))
                .push("unit", units.label())
                .print(format);
        }
        BoundCommand::EofEnergy {
            spec,
            energy,
            eps,
            variant,
        } => {
            let spectrum = load_spectrum(spec)?;
            let variant: Variant = (*variant).into();
            let value = eof_energy_bound(&spectrum, *energy, *eps, variant)?;
            Output::new()
                .push("family", "eof-energy")
                .push("variant", variant.to_string())
                .push("eps", *eps)
                .push("energy", *energy)
                .push("spectrum", spectrum.describe())
                .push("bound", units.scale(value))
                .push("unit", units.label())
                .print(format);
        }
        BoundCommand::Equivocation { energy, eps } => {
            let value = equivocation_bound(*energy, *eps)?;
            Output::new()
                .push("family", "equivocation")
                .push("eps", *eps)
                .push("energy", *energy)
                .push("bound", units.scale(value))
                .push("unit", units.label())
                .print(format);
        }
    }
    Ok(())
}

fn run_verify(
    family: &str,
    config_path: &Path,
    output: Option<&Path>,
    seed: Option<u64>,
    format: Option<ReportFormat>,
) -> Result<Vec<BoundReport>> {
    let mut cfg = CampaignConfig::from_json_file(config_path)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(format) = format {
        cfg.format = format;
    }
    if let Some(path) = output {
        cfg.output = Some(path.to_path_buf());
    }
    let reports = match family {
        "entropy" => verify_entropy(&cfg)?,
        "eof" => verify_eof(&cfg)?,
        "equivocation" => verify_equivocation(&cfg)?,
        other => bail!("unknown verification family {other:?}"),
    };
    let summary = summarize(&reports);
    match &cfg.output {
        Some(path) => {
            emit_report(&reports, cfg.format, path)?;
            eprintln!(
                "{} reports written to {} ({} violations, max lhs/bound {})",
                summary.reports,
                path.display(),
                summary.violations,
                summary
                    .max_lhs_bound_ratio
                    .map_or("n/a".to_string(), |r| format!("{r:.4}")),
            );
        }
        None => print!("{}", render(&reports, cfg.format)),
    }
    Ok(reports)
}

fn run_compare(grid_arg: &str, units: &Units, format: ReportFormat) -> Result<()> {
    let grid = parse_grid(grid_arg)?;
    let rows = compare_corrections(&grid)?;
    match format {
        ReportFormat::Csv => {
            println!("eps,g,h2_tilde,abs_gap,rel_gap,unit");
            for r in rows {
                println!(
                    "{},{},{},{},{},{}",
                    r.eps,
                    units.scale(r.g),
                    units.scale(r.h2_tilde),
                    units.scale(r.abs_gap),
                    r.rel_gap,
                    units.label()
                );
            }
        }
        ReportFormat::Json => {
            let scaled: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "eps": r.eps,
                        "g": units.scale(r.g),
                        "h2_tilde": units.scale(r.h2_tilde),
                        "abs_gap": units.scale(r.abs_gap),
                        "rel_gap": r.rel_gap,
                        "unit": units.label(),
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::Value::Array(scaled))
                    .expect("serializable rows")
            );
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    let units = Units { bits: cli.bits };
    let format: ReportFormat = cli.format.map_or(ReportFormat::Json, ReportFormat::from);
    match &cli.command {
        Command::Gibbs { spec, energy } => {
            run_gibbs(spec, *energy, &units, format)?;
            Ok(0)
        }
        Command::Bound { family } => {
            run_bound(family, &units, format)?;
            Ok(0)
        }
        Command::Verify {
            family,
            config,
            output,
        } => {
            let reports = run_verify(
                family,
                config,
                output.as_deref(),
                cli.seed,
                cli.format.map(ReportFormat::from),
            )?;
            let violations = summarize(&reports).violations;
            Ok(if violations > 0 { 2 } else { 0 })
        }
        Command::Compare { grid } => {
            run_compare(grid, &units, format)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0.25:1:0.25").unwrap();
        assert_eq!(g.len(), 4);
        assert!((g[3] - 1.0).abs() < 1e-12);
        assert!(parse_grid("0:1:0.1").is_err());
        assert!(parse_grid("0.5:0.1:0.1").is_err());
        assert!(parse_grid("nonsense").is_err());
    }

    #[test]
    fn spectrum_loading_inline() {
        let s = load_spectrum(r#"{"kind":"list","levels":[0,1]}"#).unwrap();
        assert_eq!(s.levels(), &[0.0, 1.0]);
        assert!(load_spectrum("not json and not a file").is_err());
    }
}
