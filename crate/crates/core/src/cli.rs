//! Batch commands behind the `dicke-herald` binary.
//!
//! Output files (all under the configured output directory):
//!
//! | command      | files                                  |
//! |--------------|----------------------------------------|
//! | `simulate`   | `state.csv`, `simulate.json`           |
//! | `montecarlo` | `montecarlo.json`                      |
//! | `scan`       | `scan.csv`, `scan.json`                |
//! | any, failed  | `error.json`                           |
//!
//! `state.csv` columns: `basis,real,imag`. `scan.csv` columns are listed in
//! [`SCAN_COLUMNS`]. Floating-point values in CSV files use 17 significant
//! digits. Exit codes: 0 success, 2 config error, 3 geometry infeasible,
//! 4 destructive interference, 5 I/O.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::{monte_carlo_fidelity, scan_parameter, witness_check, MonteCarloReport, ScanAxis, WitnessVerdict};
use crate::config::{Overrides, RunConfig};
use crate::detection::{run_protocol, Interpretation, ProtocolResult};
use crate::error::{Error, Result};
use crate::geometry::phase_matrix;
use crate::state::{fidelity, DickeTarget, EmitterState};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    MonteCarlo,
    Scan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::MonteCarlo => "montecarlo",
            Command::Scan => "scan",
        }
    }
}

pub const SCAN_COLUMNS: [&str; 15] = [
    "axis",
    "value",
    "seed",
    "status",
    "num_samples",
    "accepted_samples",
    "heralding_failures",
    "mean_fidelity",
    "fidelity_stddev",
    "fidelity_stderr",
    "p05",
    "p50",
    "p95",
    "mean_relative_rate",
    "error",
];

/// 17 significant digits, enough to round-trip an `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Serialize)]
pub struct SimulateSummary {
    pub command: &'static str,
    pub target: DickeTarget,
    pub target_label: String,
    pub fidelity: f64,
    pub relative_rate: f64,
    pub unnormalized_norm_sqr: f64,
    pub interpretation: Interpretation,
    pub site_label: &'static str,
    pub num_terms: usize,
    pub far_field: bool,
    pub config: RunConfig,
}

#[derive(Debug, Serialize)]
pub struct MonteCarloSummary {
    pub command: &'static str,
    pub report: MonteCarloReport,
    pub witness: WitnessVerdict,
    pub config: RunConfig,
}

#[derive(Debug, Serialize)]
pub struct ScanPointRecord {
    pub value: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<MonteCarloReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
}

#[derive(Debug, Serialize)]
pub struct ScanSummary {
    pub command: &'static str,
    pub axis: ScanAxis,
    pub points: Vec<ScanPointRecord>,
    pub config: RunConfig,
}

#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub status: &'static str,
    pub exit_code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl From<&Error> for ErrorRecord {
    fn from(e: &Error) -> Self {
        ErrorRecord { status: "error", exit_code: e.exit_code(), kind: e.kind(), message: e.to_string() }
    }
}

/// Run the ideal-geometry protocol described by `config`.
pub fn simulate(config: &RunConfig) -> Result<(ProtocolResult, SimulateSummary)> {
    let mc = config.monte_carlo_config()?;
    let phases = phase_matrix(&mc.geometry, &mc.detectors)?;
    let result = run_protocol(&phases, &mc.outcomes(), &mc.emission, config.interpretation, mc.engine)?;
    let target_state = EmitterState::dicke(mc.target);
    let summary = SimulateSummary {
        command: Command::Simulate.name(),
        target: mc.target,
        target_label: mc.target.to_string(),
        fidelity: fidelity(&result.final_state, &target_state)?,
        relative_rate: result.relative_rate,
        unnormalized_norm_sqr: result.unnormalized_norm_sqr,
        interpretation: result.interpretation,
        site_label: result.interpretation.site_label(),
        num_terms: result.final_state.len(),
        far_field: mc.geometry.is_far_field(),
        config: config.clone(),
    };
    Ok((result, summary))
}

pub fn montecarlo(config: &RunConfig) -> Result<MonteCarloSummary> {
    let report = monte_carlo_fidelity(&config.monte_carlo_config()?)?;
    let witness = witness_check(report.mean_fidelity, config.witness_threshold)?;
    Ok(MonteCarloSummary { command: Command::MonteCarlo.name(), report, witness, config: config.clone() })
}

/// Scan along the configured axis. Fails only when no point succeeds.
pub fn scan(config: &RunConfig) -> Result<ScanSummary> {
    let scan = config.scan.as_ref().ok_or_else(|| Error::Config("missing [scan] section".into()))?;
    let base = config.monte_carlo_config()?;
    let points = scan_parameter(scan.axis, &scan.values, &base)?;
    if let Some(first_err) = points.iter().find_map(|p| p.outcome.as_ref().err()) {
        if points.iter().all(|p| p.outcome.is_err()) {
            return Err(Error::InvalidScan(format!("every scan point failed; first error: {first_err}")));
        }
    }
    let points = points
        .into_iter()
        .map(|p| {
            let (report, error) = match p.outcome {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(ErrorRecord::from(&e))),
            };
            ScanPointRecord { value: p.value, seed: p.seed, report, error }
        })
        .collect();
    Ok(ScanSummary { command: Command::Scan.name(), axis: scan.axis, points, config: config.clone() })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

pub fn write_state_csv(path: &Path, state: &EmitterState) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(["basis", "real", "imag"]).map_err(csv_error)?;
    for (basis, amp) in state.iter() {
        w.write_record([basis.to_string(), format_float(amp.re), format_float(amp.im)]).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_scan_csv(path: &Path, summary: &ScanSummary) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(SCAN_COLUMNS).map_err(csv_error)?;
    for p in &summary.points {
        let mut row = vec![summary.axis.name().to_string(), format_float(p.value), p.seed.to_string()];
        match (&p.report, &p.error) {
            (Some(r), _) => {
                row.push("ok".into());
                row.extend([r.num_samples, r.accepted_samples, r.heralding_failures].map(|x| x.to_string()));
                row.extend(
                    [
                        r.mean_fidelity,
                        r.fidelity_stddev,
                        r.fidelity_stderr,
                        r.quantiles.p05,
                        r.quantiles.p50,
                        r.quantiles.p95,
                        r.mean_relative_rate,
                    ]
                    .map(format_float),
                );
                row.push(String::new());
            }
            (None, Some(e)) => {
                row.push("error".into());
                row.extend(std::iter::repeat_n(String::new(), 10));
                row.push(e.message.clone());
            }
            (None, None) => unreachable!("scan point without report or error"),
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Execute `command` on an already loaded config, writing its output files.
pub fn run(command: Command, config: &RunConfig) -> Result<()> {
    let dir = &config.output.dir;
    match command {
        Command::Simulate => {
            let (result, summary) = simulate(config)?;
            fs::create_dir_all(dir)?;
            write_state_csv(&dir.join("state.csv"), &result.final_state)?;
            write_json(&dir.join("simulate.json"), &summary)
        }
        Command::MonteCarlo => {
            let summary = montecarlo(config)?;
            fs::create_dir_all(dir)?;
            write_json(&dir.join("montecarlo.json"), &summary)
        }
        Command::Scan => {
            let summary = scan(config)?;
            fs::create_dir_all(dir)?;
            write_scan_csv(&dir.join("scan.csv"), &summary)?;
            write_json(&dir.join("scan.json"), &summary)
        }
    }
}

/// Load, override, run. Returns the process exit code; on failure an
/// `error.json` record is written to the output directory when possible.
pub fn execute(command: Command, config_path: &Path, overrides: &Overrides) -> i32 {
    let mut out_dir: PathBuf = overrides.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let result = RunConfig::load(config_path).and_then(|mut config| {
        config.apply(overrides);
        out_dir = config.output.dir.clone();
        run(command, &config)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}: {e}", command.name());
            let record = ErrorRecord::from(&e);
            if fs::create_dir_all(&out_dir).is_ok() {
                let _ = write_json(&out_dir.join("error.json"), &record);
            }
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.5773502691896258, -1e-300, 1.0, 0.1 + 0.2] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn error_records_carry_exit_codes() {
        let e = Error::GeometryInfeasible { requested: 2, available: 1 };
        let r = ErrorRecord::from(&e);
        assert_eq!(r.exit_code, 3);
        assert_eq!(r.kind, "geometry_infeasible");
        assert_eq!(Error::DestructiveInterference(0.0).exit_code(), 4);
        assert_eq!(Error::Config("x".into()).exit_code(), 2);
        assert_eq!(Error::Io(std::io::Error::other("x")).exit_code(), 5);
    }
}
