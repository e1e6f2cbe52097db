//! The `simulate`, `compare` and `analytic` subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use hopspin_core::analysis::{compare_exact_effective, conservation_monitor, DeviationReport};
use hopspin_core::dynamics::{run_trajectory, AnalyticSolution};
use hopspin_core::{EffectiveVariant, ModelSpec};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{parse_config, ConfigError, ScenarioConfig};
use crate::table::{format_value, observable_table, write_csv, Column, Table};

/// Drift allowed in conserved quantities before a run is rejected.
pub const CONSERVATION_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical invariant violated: {0}")]
    Invariant(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<hopspin_core::Error> for CliError {
    fn from(e: hopspin_core::Error) -> Self {
        match e {
            hopspin_core::Error::Model(m) => CliError::Config(ConfigError::Field {
                field: "model",
                message: m.to_string(),
            }),
            other => CliError::Invariant(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Compare,
    Analytic,
}

/// CSV text plus human-readable summary lines.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub csv: String,
    pub summary: Vec<String>,
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

pub fn run(command: Command, config: &ScenarioConfig) -> Result<CommandOutput, CliError> {
    match command {
        Command::Simulate => cmd_simulate(config),
        Command::Compare => cmd_compare(config),
        Command::Analytic => cmd_analytic(config),
    }
}

pub fn cmd_simulate(config: &ScenarioConfig) -> Result<CommandOutput, CliError> {
    let records = run_trajectory(
        &config.spec,
        config.hamiltonian,
        &config.initial_state(),
        &config.grid,
    )?;
    let report = conservation_monitor(&records).map_err(hopspin_core::Error::from)?;
    let e0 = records[0].energy.unwrap_or(0.0).abs().max(1.0);
    let drifts = [
        ("norm", report.norm_drift, CONSERVATION_TOL),
        ("Sz", report.sz_drift, CONSERVATION_TOL),
        (
            "energy",
            report.energy_drift.unwrap_or(0.0),
            CONSERVATION_TOL * e0,
        ),
    ];
    for (name, drift, tol) in drifts {
        if drift.is_nan() || drift > tol {
            return Err(CliError::Invariant(format!("{name} drifted by {drift:e}")));
        }
    }

    let table =
        observable_table(&records, &config.layout(), &config.output.columns).map_err(|e| {
            CliError::Invariant(format!(
                "{} = {:e} at t = {} is not a probability",
                e.column, e.value, e.t
            ))
        })?;
    Ok(CommandOutput {
        csv: table.to_csv(),
        summary: summarize(&table),
    })
}

/// One `name min=… max=…` line per non-time column, printed exactly as in the CSV.
pub fn summarize(table: &Table) -> Vec<String> {
    table
        .header
        .iter()
        .enumerate()
        .filter(|(_, name)| *name != "t")
        .map(|(c, name)| {
            let (lo, hi) = table.extrema(c);
            format!("{name} min={} max={}", format_value(lo), format_value(hi))
        })
        .collect()
}

fn deviation_header(n_sites: usize) -> Vec<String> {
    let mut header = vec![
        "eta_over_j".to_string(),
        "variant".into(),
        "max_infidelity".into(),
    ];
    header.extend(
        Column::all(n_sites)
            .iter()
            .filter(|c| c.is_probability() || **c == Column::LogNeg)
            .map(|c| format!("gap_{}", c.name())),
    );
    header
}

fn deviation_row(report: &DeviationReport, spec: &ModelSpec) -> Vec<String> {
    let layout = spec.layout().expect("validated spec");
    let g = &report.gaps;
    let mut row = vec![
        format_value(report.eta_over_j),
        report.variant.label().to_string(),
        format_value(report.max_state_infidelity),
    ];
    for c in Column::all(spec.n_sites) {
        let v = match c {
            Column::Population(label) => {
                g.site_populations[layout.site_from_label(label).expect("label")]
            }
            Column::PUp => g.p_up,
            Column::FPlus => g.f_plus,
            Column::FMinus => g.f_minus,
            Column::LogNeg => g.log_negativity,
            Column::F2 => g.f2,
            _ => continue,
        };
        row.push(format_value(v));
    }
    row
}

/// Runs the exact-vs-effective comparison at every configured η/J.
pub fn deviation_sweep(
    config: &ScenarioConfig,
    variant: EffectiveVariant,
) -> Result<Vec<(ModelSpec, DeviationReport)>, CliError> {
    let unit = config.spec.coupling_unit();
    if unit == 0.0 {
        return Err(ConfigError::Field {
            field: "model",
            message: "compare needs a non-zero coupling".into(),
        }
        .into());
    }
    let initial = config.initial_state();
    config
        .ratios
        .par_iter()
        .map(|&ratio| {
            let spec = ModelSpec {
                eta: ratio * unit,
                ..config.spec.clone()
            };
            let report = compare_exact_effective(&spec, variant, &initial, &config.grid)?;
            Ok((spec, report))
        })
        .collect()
}

pub fn cmd_compare(config: &ScenarioConfig) -> Result<CommandOutput, CliError> {
    let variant = config.comparison_variant();
    let reports = deviation_sweep(config, variant)?;
    let csv = write_csv(
        &deviation_header(config.spec.n_sites),
        reports.iter().map(|(spec, r)| deviation_row(r, spec)),
    );
    let summary = reports
        .iter()
        .map(|(_, r)| {
            format!(
                "eta/J={} variant={} max_infidelity={}",
                r.eta_over_j,
                r.variant,
                format_value(r.max_state_infidelity)
            )
        })
        .collect();
    Ok(CommandOutput { csv, summary })
}

pub fn cmd_analytic(config: &ScenarioConfig) -> Result<CommandOutput, CliError> {
    let sol = AnalyticSolution::new(
        config.analytic_model()?,
        config.analytic_lattice(),
        config.spec.coupling_unit(),
    );
    let header = ["t", "alpha_up_sq", "alpha_down_sq"].map(String::from);
    let csv = write_csv(
        &header,
        config.grid.times().map(|t| {
            let s = sol.populations(t);
            vec![format_value(t), format_value(s.up), format_value(s.down)]
        }),
    );
    let summary = vec![
        format!("period={}", format_value(sol.period())),
        format!("max_alpha_down_sq={}", format_value(sol.max_transfer())),
    ];
    Ok(CommandOutput { csv, summary })
}

/// Loads `config_path`, runs `command` and writes the CSV to `out`, the
/// config's output path, or stdout. Summary lines go to stdout unless the CSV
/// does.
pub fn execute(command: Command, config_path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let config = load_config(config_path)?;
    let output = run(command, &config)?;
    match out.or(config.output.path.as_deref()) {
        Some(path) => {
            fs::write(path, &output.csv).map_err(|source| CliError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            for line in &output.summary {
                println!("{line}");
            }
        }
        None => {
            print!("{}", output.csv);
            for line in &output.summary {
                eprintln!("{line}");
            }
        }
    }
    Ok(())
}
