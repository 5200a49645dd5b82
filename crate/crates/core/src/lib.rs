//! Heralded symmetric Dicke states of remote emitters.
//!
//! `N` three-level emitters in a row start fully excited. Each emits one
//! photon, and `N` far-field detectors behind polarizers each register
//! exactly one. Because no detector can tell which emitter a photon came
//! from, every assignment of photons to emitters contributes coherently,
//! weighted by the geometric phases. When all those phases are multiples of
//! `2 pi` the heralded register is a symmetric Dicke state whose excitation
//! number is set by the polarizer pattern.
//!
//! Modules:
//! * [`state`]: the sparse register, Dicke states, collective spin, fidelity.
//! * [`geometry`]: chain and detector phases, perturbed sampling.
//! * [`detection`]: detection operators, the `N!`-path oracle and the
//!   permanent evaluator.
//! * [`analysis`]: Monte Carlo fidelity, witness verdicts, scans.
//! * [`config`] and [`cli`]: the TOML-driven batch front end.
//!
//! Run `cargo run --example` to list the runnable examples.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod detection;
pub mod error;
pub mod geometry;
pub mod permanent;
pub mod state;

pub use analysis::{
    monte_carlo_fidelity, scan_parameter, witness_check, MonteCarloConfig, MonteCarloReport, ScanAxis, WitnessVerdict,
    DEFAULT_WITNESS_THRESHOLD,
};
pub use detection::{
    amplitude_oracle_bruteforce, amplitude_via_permanents, apply_detection, run_protocol, DetectionEvent, Engine,
    Interpretation, ProtocolResult,
};
pub use error::{Error, Result};
pub use geometry::{
    dicke_detector_angles, dicke_detectors, nominal_phase, phase_matrix, sample_perturbed_phase_matrix, ChainGeometry,
    DetectorSpec, PerturbationSpec, PhaseMatrix, Polarizer, Spread,
};
pub use state::{fidelity, Basis, DickeTarget, EmissionModel, EmitterState, GroundLevel, Level};
