//! TOML run configuration shared by the `simulate`, `montecarlo` and `scan`
//! commands.
//!
//! ```toml
//! num_samples = 100000          # optional, default 10000
//! interpretation = "atomic"     # or "photonic"
//! engine = "sequential"         # or "permanent"
//! witness_threshold = 0.6666666666666666   # optional
//!
//! [geometry]
//! num_emitters = 4
//! spacing = 5e-6                # m
//! wavelength = 500e-9           # m
//! detector_distance = 0.05      # m, optional
//!
//! [detectors]
//! mode = "dicke"                # angles with delta = 0 mod 2pi
//! polarizers = ["sigma_plus", "sigma_plus", "sigma_minus", "sigma_minus"]
//! # mode = "explicit"
//! # [[detectors.list]]
//! # angle = 0.1                 # rad
//! # polarizer = "sigma_plus"
//! # exact_phase = 6.283185307179586   # optional, fiber mode
//!
//! [emission]                    # optional, default c0 = c1 = 1/sqrt(2)
//! c0 = [0.7071067811865476, 0.0]
//! c1 = [0.7071067811865476, 0.0]
//!
//! [perturbation]                # optional, default: no perturbation
//! lateral_sigma = 5e-9          # m
//! axial_sigma = 0.0             # m
//! angular_halfwidth = 0.005235987755982988   # rad
//! lateral_kind = "gaussian"     # gaussian | uniform
//! axial_kind = "gaussian"
//! angular_kind = "uniform"
//! seed = 1
//!
//! [target]                      # optional, default: heralded by the polarizers
//! num_qubits = 4
//! two_m = 0
//!
//! [scan]                        # scan command only
//! axis = "angular_halfwidth"    # lateral_sigma | angular_halfwidth | spacing_error | wavelength
//! values = [0.0, 0.005235987755982988]
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Unknown keys anywhere are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{MonteCarloConfig, ScanAxis, DEFAULT_WITNESS_THRESHOLD};
use crate::detection::{Engine, Interpretation};
use crate::error::{Error, Result};
use crate::geometry::{dicke_detectors, ChainGeometry, DetectorSpec, PerturbationSpec, Polarizer};
use crate::state::{DickeTarget, EmissionModel};

pub const DEFAULT_NUM_SAMPLES: u64 = 10_000;

fn default_num_samples() -> u64 {
    DEFAULT_NUM_SAMPLES
}

fn default_witness_threshold() -> f64 {
    DEFAULT_WITNESS_THRESHOLD
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_num_samples")]
    pub num_samples: u64,
    #[serde(default)]
    pub interpretation: Interpretation,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default = "default_witness_threshold")]
    pub witness_threshold: f64,
    pub geometry: ChainGeometry,
    pub detectors: DetectorConfig,
    #[serde(default)]
    pub emission: EmissionModel,
    #[serde(default)]
    pub perturbation: PerturbationSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<DickeTarget>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum DetectorConfig {
    /// One detector per polarizer at the angles of
    /// [`dicke_detector_angles`](crate::geometry::dicke_detector_angles).
    Dicke { polarizers: Vec<Polarizer> },
    Explicit { list: Vec<DetectorSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub axis: ScanAxis,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_out_dir() }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub engine: Option<Engine>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        RunConfig::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(seed) = overrides.seed {
            self.perturbation.seed = seed;
        }
        if let Some(samples) = overrides.samples {
            self.num_samples = samples;
        }
        if let Some(engine) = overrides.engine {
            self.engine = engine;
        }
        if let Some(out) = &overrides.out {
            self.output.dir = out.clone();
        }
    }

    pub fn detectors(&self) -> Result<Vec<DetectorSpec>> {
        let detectors = match &self.detectors {
            DetectorConfig::Dicke { polarizers } => dicke_detectors(&self.geometry, polarizers)?,
            DetectorConfig::Explicit { list } => list.clone(),
        };
        let n = self.geometry.num_emitters();
        if detectors.len() != n {
            return Err(Error::Config(format!("{} detectors configured for {n} emitters", detectors.len())));
        }
        Ok(detectors)
    }

    /// Resolve detectors and the target into a Monte Carlo configuration.
    pub fn monte_carlo_config(&self) -> Result<MonteCarloConfig> {
        let detectors = self.detectors()?;
        let outcomes: Vec<_> = detectors.iter().map(|d| d.polarizer().heralded_level()).collect();
        let target = match self.target {
            Some(t) => t,
            None => DickeTarget::from_levels(&outcomes)?,
        };
        if target.num_qubits() != self.geometry.num_emitters() {
            return Err(Error::Config(format!(
                "target has {} qubits but the chain has {} emitters",
                target.num_qubits(),
                self.geometry.num_emitters()
            )));
        }
        if !(self.witness_threshold > 0.0 && self.witness_threshold < 1.0) {
            return Err(Error::Config(format!("witness_threshold {} outside (0, 1)", self.witness_threshold)));
        }
        self.perturbation.validate()?;
        Ok(MonteCarloConfig {
            geometry: self.geometry,
            detectors,
            emission: self.emission,
            perturbation: self.perturbation,
            target,
            num_samples: self.num_samples,
            engine: self.engine,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [geometry]
        num_emitters = 3
        spacing = 5e-6
        wavelength = 500e-9

        [detectors]
        mode = "dicke"
        polarizers = ["sigma_minus", "sigma_plus", "sigma_plus"]
    "#;

    #[test]
    fn minimal_config_defaults() {
        let cfg = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.num_samples, DEFAULT_NUM_SAMPLES);
        assert_eq!(cfg.engine, Engine::Sequential);
        assert_eq!(cfg.interpretation, Interpretation::AtomicQubits);
        assert_eq!(cfg.perturbation, PerturbationSpec::none(0));
        let mc = cfg.monte_carlo_config().unwrap();
        assert_eq!(mc.target, DickeTarget::new(3, -1).unwrap());
        assert_eq!(mc.detectors.len(), 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let extra_top = format!("colour = 3\n{MINIMAL}");
        assert!(matches!(RunConfig::from_toml(&extra_top), Err(Error::Config(_))));
        let extra_nested = MINIMAL.replace("spacing = 5e-6", "spacing = 5e-6\nspcing = 1");
        assert!(RunConfig::from_toml(&extra_nested).is_err());
        let extra_detector = MINIMAL.replace("mode = \"dicke\"", "mode = \"dicke\"\nangles = [0.0]");
        assert!(RunConfig::from_toml(&extra_detector).is_err());
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let bad = MINIMAL.replace("spacing = 5e-6", "spacing = -5e-6");
        assert!(matches!(RunConfig::from_toml(&bad), Err(Error::Config(_))));
        let bad_target = format!("{MINIMAL}\n[target]\nnum_qubits = 3\ntwo_m = 0\n");
        assert!(RunConfig::from_toml(&bad_target).is_err());
    }

    #[test]
    fn explicit_and_fiber_detectors() {
        let text = r#"
            [geometry]
            num_emitters = 2
            spacing = 1.0
            wavelength = 500e-9

            [detectors]
            mode = "explicit"
            [[detectors.list]]
            polarizer = "sigma_plus"
            exact_phase = 6.283185307179586
            [[detectors.list]]
            angle = 0.0
            polarizer = "sigma_minus"
        "#;
        let cfg = RunConfig::from_toml(text).unwrap();
        let dets = cfg.detectors().unwrap();
        assert!(matches!(dets[0].mode(), crate::geometry::PhaseMode::Exact(_)));
        let echo = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&echo).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn infeasible_geometry_surfaces_on_resolution() {
        let text = MINIMAL.replace("spacing = 5e-6", "spacing = 250e-9");
        let cfg = RunConfig::from_toml(&text).unwrap();
        assert!(matches!(cfg.monte_carlo_config(), Err(Error::GeometryInfeasible { .. })));
    }

    #[test]
    fn overrides_take_precedence() {
        let mut cfg = RunConfig::from_toml(MINIMAL).unwrap();
        cfg.apply(&Overrides { seed: Some(9), samples: Some(3), engine: Some(Engine::Permanent), out: Some("x".into()) });
        assert_eq!(cfg.perturbation.seed, 9);
        assert_eq!(cfg.num_samples, 3);
        assert_eq!(cfg.engine, Engine::Permanent);
        assert_eq!(cfg.output.dir, PathBuf::from("x"));
    }

    #[test]
    fn detector_count_must_match_chain() {
        let text = MINIMAL.replace("\"sigma_minus\", ", "");
        let cfg = RunConfig::from_toml(&text).unwrap();
        assert!(matches!(cfg.monte_carlo_config(), Err(Error::Config(_))));
    }
}
