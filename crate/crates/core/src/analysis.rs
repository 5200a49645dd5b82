//! Monte Carlo propagation of geometric imperfections into the heralded
//! state fidelity, the entanglement-witness verdict and parameter scans.
//!
//! Every sample draws its own perturbed phase matrix from a ChaCha stream
//! selected by the sample index. Samples are evaluated in parallel and
//! collected in index order; all reductions then run sequentially over that
//! order, so a report depends only on its configuration and seed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{relative_rate, unnormalized_final_state, Engine, HERALD_FAILURE_NORM_SQR};
use crate::error::{Error, Result};
use crate::geometry::{first_order_phase_std, sample_perturbed_phase_matrix, ChainGeometry, DetectorSpec, PerturbationSpec};
use crate::state::{fidelity, DickeTarget, EmissionModel, EmitterState, GroundLevel};

/// Fidelity above which the four-qubit `|2, 0>` witness certifies
/// genuine multipartite entanglement.
pub const DEFAULT_WITNESS_THRESHOLD: f64 = 2.0 / 3.0;

/// Everything a Monte Carlo run depends on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub geometry: ChainGeometry,
    pub detectors: Vec<DetectorSpec>,
    #[serde(default)]
    pub emission: EmissionModel,
    pub perturbation: PerturbationSpec,
    pub target: DickeTarget,
    pub num_samples: u64,
    #[serde(default)]
    pub engine: Engine,
}

impl MonteCarloConfig {
    pub fn outcomes(&self) -> Vec<GroundLevel> {
        self.detectors.iter().map(|d| d.polarizer().heralded_level()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.geometry.num_emitters();
        if self.detectors.len() != n {
            return Err(Error::SizeMismatch { expected: n, found: self.detectors.len() });
        }
        if self.num_samples == 0 {
            return Err(Error::Config("num_samples must be at least 1".into()));
        }
        let heralded = DickeTarget::from_levels(&self.outcomes())?;
        if heralded != self.target {
            return Err(Error::Config(format!(
                "target {} does not match the polarizer settings, which herald {}",
                self.target, heralded
            )));
        }
        self.perturbation.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub p05: f64,
    pub p50: f64,
    pub p95: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub num_samples: u64,
    pub accepted_samples: u64,
    /// Samples whose heralded state had squared norm below
    /// [`HERALD_FAILURE_NORM_SQR`]; excluded from the fidelity statistics.
    pub heralding_failures: u64,
    pub mean_fidelity: f64,
    pub fidelity_stddev: f64,
    /// `fidelity_stddev / sqrt(accepted_samples)`.
    pub fidelity_stderr: f64,
    /// Averaged over all samples, failures included.
    pub mean_relative_rate: f64,
    pub quantiles: Quantiles,
    pub seed: u64,
    /// Largest first-order phase standard deviation over the phase matrix.
    pub first_order_phase_std_max: f64,
    pub config_echo: MonteCarloConfig,
}

struct Sample {
    fidelity: Option<f64>,
    rate: f64,
}

/// Linear interpolation between order statistics of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Mean heralded-state fidelity against the Dicke target over
/// `config.num_samples` perturbed geometries.
pub fn monte_carlo_fidelity(config: &MonteCarloConfig) -> Result<MonteCarloReport> {
    config.validate()?;
    let outcomes = config.outcomes();
    let target = EmitterState::dicke(config.target);

    let run_sample = |index: u64| -> Result<Sample> {
        let phases = sample_perturbed_phase_matrix(&config.geometry, &config.detectors, &config.perturbation, index)?;
        let raw = unnormalized_final_state(&phases, &outcomes, config.engine)?;
        let norm_sqr = raw.norm_sqr();
        let rate = relative_rate(norm_sqr, &outcomes, &config.emission);
        if norm_sqr < HERALD_FAILURE_NORM_SQR {
            return Ok(Sample { fidelity: None, rate });
        }
        let (state, _) = raw.normalize()?;
        Ok(Sample { fidelity: Some(fidelity(&state, &target)?), rate })
    };

    let samples: Vec<Sample> = (0..config.num_samples).into_par_iter().map(run_sample).collect::<Result<_>>()?;

    let mut fidelities: Vec<f64> = samples.iter().filter_map(|s| s.fidelity).collect();
    let accepted = fidelities.len() as u64;
    if accepted == 0 {
        return Err(Error::DestructiveInterference(0.0));
    }
    let mean = fidelities.iter().sum::<f64>() / accepted as f64;
    let stddev = if accepted > 1 {
        (fidelities.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (accepted - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mean_rate = samples.iter().map(|s| s.rate).sum::<f64>() / config.num_samples as f64;
    fidelities.sort_by(f64::total_cmp);
    let phase_std = first_order_phase_std(&config.geometry, &config.detectors, &config.perturbation)?;
    let phase_std_max = (0..phase_std.rows())
        .flat_map(|r| phase_std.row(r).to_vec())
        .fold(0.0, f64::max);

    Ok(MonteCarloReport {
        num_samples: config.num_samples,
        accepted_samples: accepted,
        heralding_failures: config.num_samples - accepted,
        mean_fidelity: mean,
        fidelity_stddev: stddev,
        fidelity_stderr: stddev / (accepted as f64).sqrt(),
        mean_relative_rate: mean_rate,
        quantiles: Quantiles {
            p05: quantile(&fidelities, 0.05),
            p50: quantile(&fidelities, 0.50),
            p95: quantile(&fidelities, 0.95),
        },
        seed: config.perturbation.seed,
        first_order_phase_std_max: phase_std_max,
        config_echo: config.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessVerdict {
    pub fidelity: f64,
    pub threshold: f64,
    pub entangled_certified: bool,
}

/// Certify entanglement when `fidelity > threshold` (strictly).
pub fn witness_check(fidelity: f64, threshold: f64) -> Result<WitnessVerdict> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::FidelityOutOfRange(fidelity));
    }
    Ok(WitnessVerdict { fidelity, threshold, entangled_certified: fidelity > threshold })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanAxis {
    /// Transverse emitter jitter width (m).
    LateralSigma,
    /// Detector angle window half-width (rad).
    AngularHalfwidth,
    /// Axial emitter jitter width (m), i.e. random error of the spacing.
    SpacingError,
    /// Optical wavelength (m). Detector directions stay where the base
    /// configuration put them.
    Wavelength,
}

impl ScanAxis {
    pub fn name(self) -> &'static str {
        match self {
            ScanAxis::LateralSigma => "lateral_sigma",
            ScanAxis::AngularHalfwidth => "angular_halfwidth",
            ScanAxis::SpacingError => "spacing_error",
            ScanAxis::Wavelength => "wavelength",
        }
    }

    /// Copy of `base` with this axis set to `value`.
    pub fn apply(self, base: &MonteCarloConfig, value: f64) -> Result<MonteCarloConfig> {
        let mut config = base.clone();
        match self {
            ScanAxis::LateralSigma => config.perturbation.lateral_sigma = value,
            ScanAxis::AngularHalfwidth => config.perturbation.angular_halfwidth = value,
            ScanAxis::SpacingError => config.perturbation.axial_sigma = value,
            ScanAxis::Wavelength => config.geometry = config.geometry.with_wavelength(value)?,
        }
        Ok(config)
    }
}

#[derive(Debug)]
pub struct ScanPoint {
    pub value: f64,
    pub seed: u64,
    pub outcome: Result<MonteCarloReport>,
}

/// Seed for point `index` of a scan. Point 0 reuses the base seed, so a
/// one-point scan reproduces the plain Monte Carlo run.
pub fn scan_point_seed(base_seed: u64, index: usize) -> u64 {
    base_seed.wrapping_add(index as u64)
}

/// One Monte Carlo run per value. Failures are kept per point.
pub fn scan_parameter(axis: ScanAxis, values: &[f64], base: &MonteCarloConfig) -> Result<Vec<ScanPoint>> {
    if values.is_empty() {
        return Err(Error::InvalidScan("no scan values".into()));
    }
    let increasing = values.windows(2).all(|w| w[0] <= w[1]);
    let decreasing = values.windows(2).all(|w| w[0] >= w[1]);
    if !(increasing || decreasing) {
        return Err(Error::InvalidScan("scan values must be monotone".into()));
    }
    Ok(values
        .iter()
        .enumerate()
        .map(|(i, &value)| {
            let seed = scan_point_seed(base.perturbation.seed, i);
            let outcome = axis.apply(base, value).and_then(|mut config| {
                config.perturbation.seed = seed;
                monte_carlo_fidelity(&config)
            });
            ScanPoint { value, seed, outcome }
        })
        .collect())
}
