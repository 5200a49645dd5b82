//! Heralding by far-field photodetection.
//!
//! A click at detector `n` with its polarizer heralding ground level `x_n`
//! acts on the register as the unnormalized operator
//! `D_n = sum_j exp(i phi[n][j]) |x_n>_j <e|`: any still-excited emitter may
//! have produced the photon, and the paths are summed coherently.
//!
//! Three independent routes compute the heralded state:
//! * [`apply_detection`] applied once per detector (the default engine),
//! * [`amplitude_oracle_bruteforce`], which enumerates all `N!`
//!   detector-to-emitter assignments,
//! * [`amplitude_via_permanents`], which factorizes that sum into the
//!   permanents of the sigma+ and sigma- blocks.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PhaseMatrix;
use crate::permanent::permanent;
use crate::state::{factorial, Basis, EmissionModel, EmitterState, GroundLevel, Level};

/// Amplitudes smaller than this are dropped after each detection.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Heralded states with a smaller squared norm count as failed heralds.
pub const HERALD_FAILURE_NORM_SQR: f64 = 1e-15;

/// Brute-force path enumeration is limited to `N <= ORACLE_MAX_EMITTERS`.
pub const ORACLE_MAX_EMITTERS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpretation {
    /// Qubits are the ground levels of the emitters; position `j` is emitter `j`.
    #[default]
    #[serde(alias = "atomic")]
    AtomicQubits,
    /// Qubits are photon polarizations; position `n` is the spatial mode of
    /// detector `n` and the polarizers sit in front of the emitters.
    #[serde(alias = "photonic")]
    PhotonicPolarizationQubits,
}

impl Interpretation {
    pub fn site_label(self) -> &'static str {
        match self {
            Interpretation::AtomicQubits => "emitter",
            Interpretation::PhotonicPolarizationQubits => "spatial mode",
        }
    }

    pub fn level_label(self, level: GroundLevel) -> &'static str {
        match (self, level) {
            (Interpretation::AtomicQubits, GroundLevel::Zero) => "|g0, m=-1>",
            (Interpretation::AtomicQubits, GroundLevel::One) => "|g1, m=+1>",
            (Interpretation::PhotonicPolarizationQubits, GroundLevel::Zero) => "|sigma+>",
            (Interpretation::PhotonicPolarizationQubits, GroundLevel::One) => "|sigma->",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Apply the detection operators one after another.
    #[default]
    Sequential,
    /// Evaluate every consistent basis string from block permanents.
    Permanent,
}

/// One photodetection: which phases the `N` paths carry and which ground
/// level the polarizer heralds.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionEvent {
    pub detector_index: usize,
    pub phase_row: Vec<f64>,
    pub outcome: GroundLevel,
}

impl DetectionEvent {
    /// Event for row `detector` of a phase matrix.
    pub fn from_matrix(phases: &PhaseMatrix, detector: usize, outcome: GroundLevel) -> Self {
        DetectionEvent { detector_index: detector, phase_row: phases.row(detector).to_vec(), outcome }
    }
}

/// Apply one detection operator. The output is not normalized.
pub fn apply_detection(state: &EmitterState, event: &DetectionEvent) -> Result<EmitterState> {
    let n = state.num_emitters();
    if event.phase_row.len() != n {
        return Err(Error::SizeMismatch { expected: n, found: event.phase_row.len() });
    }
    if state.excitations() == Some(0) {
        return Err(Error::ProtocolOverrun);
    }
    let factors: Vec<Complex64> = event.phase_row.iter().map(|&p| Complex64::cis(p)).collect();
    let level = Level::from(event.outcome);
    let mut out = EmitterState::zero(n);
    for (basis, amp) in state.iter() {
        for (j, &l) in basis.levels().iter().enumerate() {
            if l == Level::Excited {
                out.add_term(basis.with_level(j, level), amp * factors[j]);
            }
        }
    }
    out.prune(PRUNE_THRESHOLD);
    Ok(out)
}

fn check_shape(phases: &PhaseMatrix, outcomes: &[GroundLevel]) -> Result<usize> {
    let n = phases.cols();
    if phases.rows() != n {
        return Err(Error::SizeMismatch { expected: n, found: phases.rows() });
    }
    if outcomes.len() != n {
        return Err(Error::SizeMismatch { expected: n, found: outcomes.len() });
    }
    Ok(n)
}

/// Apply the detections of `phases`/`outcomes` to the fully excited register
/// in the given detector order.
pub fn detect_in_order(phases: &PhaseMatrix, outcomes: &[GroundLevel], order: &[usize]) -> Result<EmitterState> {
    let n = check_shape(phases, outcomes)?;
    if order.len() != n {
        return Err(Error::SizeMismatch { expected: n, found: order.len() });
    }
    order.iter().try_fold(EmitterState::initial(n)?, |state, &d| {
        apply_detection(&state, &DetectionEvent::from_matrix(phases, d, outcomes[d]))
    })
}

/// The heralded register before normalization.
pub fn unnormalized_final_state(phases: &PhaseMatrix, outcomes: &[GroundLevel], engine: Engine) -> Result<EmitterState> {
    let n = check_shape(phases, outcomes)?;
    match engine {
        Engine::Sequential => detect_in_order(phases, outcomes, &(0..n).collect::<Vec<_>>()),
        Engine::Permanent => {
            EmitterState::initial(n)?;
            let ones = outcomes.iter().filter(|&&o| o == GroundLevel::One).count();
            let mut state = EmitterState::zero(n);
            for positions in (0..n).combinations(ones) {
                let mut levels = vec![Level::Ground0; n];
                for p in positions {
                    levels[p] = Level::Ground1;
                }
                let basis = Basis::new(levels);
                let amp = amplitude_via_permanents(phases, outcomes, &basis)?;
                state.add_term(basis, amp);
            }
            state.prune(PRUNE_THRESHOLD);
            Ok(state)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolResult {
    /// Normalized heralded state.
    pub final_state: EmitterState,
    /// `||psi||^2 * prod_n |c_{x_n}|^2 / N!`: equals `prod |c|^2` times the
    /// Dicke multiplicity `n0! n1!` in the ideal symmetric geometry.
    pub relative_rate: f64,
    pub unnormalized_norm_sqr: f64,
    pub interpretation: Interpretation,
}

/// Squared norm of the unnormalized heralded state mapped to a relative
/// coincidence rate.
pub fn relative_rate(norm_sqr: f64, outcomes: &[GroundLevel], emission: &EmissionModel) -> f64 {
    let branching: f64 = outcomes.iter().map(|&o| emission.weight(o)).product();
    norm_sqr * branching / factorial(outcomes.len()) as f64
}

/// Run the full protocol: excite all `N` emitters, apply all `N`
/// detections, normalize.
pub fn run_protocol(
    phases: &PhaseMatrix,
    outcomes: &[GroundLevel],
    emission: &EmissionModel,
    interpretation: Interpretation,
    engine: Engine,
) -> Result<ProtocolResult> {
    let raw = unnormalized_final_state(phases, outcomes, engine)?;
    let norm_sqr = raw.norm_sqr();
    if norm_sqr < HERALD_FAILURE_NORM_SQR {
        return Err(Error::DestructiveInterference(norm_sqr));
    }
    let (final_state, _) = raw.normalize()?;
    Ok(ProtocolResult {
        final_state,
        relative_rate: relative_rate(norm_sqr, outcomes, emission),
        unnormalized_norm_sqr: norm_sqr,
        interpretation,
    })
}

/// Sum over all `N!` assignments `sigma` of detectors to emitters: each
/// contributes `prod_n exp(i phi[n][sigma(n)])` to the string in which
/// emitter `sigma(n)` holds `x_n`.
pub fn amplitude_oracle_bruteforce(phases: &PhaseMatrix, outcomes: &[GroundLevel]) -> Result<EmitterState> {
    let n = check_shape(phases, outcomes)?;
    if n > ORACLE_MAX_EMITTERS {
        return Err(Error::OracleTooLarge { size: n, max: ORACLE_MAX_EMITTERS });
    }
    let mut terms: BTreeMap<Basis, Complex64> = BTreeMap::new();
    for sigma in (0..n).permutations(n) {
        let mut levels = vec![Level::Excited; n];
        let mut phase = 0.0;
        for (det, &emitter) in sigma.iter().enumerate() {
            levels[emitter] = outcomes[det].into();
            phase += phases.get(det, emitter);
        }
        *terms.entry(Basis::new(levels)).or_default() += Complex64::cis(phase);
    }
    EmitterState::from_terms(n, terms)
}

/// Amplitude of one fully de-excited basis string as
/// `perm(A0) * perm(A1)`, where `A0` collects `exp(i phi)` over sigma+
/// detectors and emitters in `0`, `A1` over sigma- detectors and emitters
/// in `1`. Strings whose counts disagree with the outcomes give zero.
pub fn amplitude_via_permanents(phases: &PhaseMatrix, outcomes: &[GroundLevel], basis: &Basis) -> Result<Complex64> {
    let n = check_shape(phases, outcomes)?;
    if basis.len() != n {
        return Err(Error::SizeMismatch { expected: n, found: basis.len() });
    }
    let block = |outcome: GroundLevel| -> Option<Complex64> {
        let level = Level::from(outcome);
        let dets: Vec<usize> = (0..n).filter(|&d| outcomes[d] == outcome).collect();
        let emitters: Vec<usize> = (0..n).filter(|&j| basis.level(j) == level).collect();
        if dets.len() != emitters.len() {
            return None;
        }
        let entries: Vec<Complex64> = dets
            .iter()
            .flat_map(|&d| emitters.iter().map(move |&j| Complex64::cis(phases.get(d, j))))
            .collect();
        Some(permanent(dets.len(), &entries))
    };
    if basis.excitations() != 0 {
        return Ok(Complex64::default());
    }
    Ok(match (block(GroundLevel::Zero), block(GroundLevel::One)) {
        (Some(a), Some(b)) => a * b,
        _ => Complex64::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{fidelity, DickeTarget};
    use std::f64::consts::{PI, TAU};

    use GroundLevel::{One, Zero};

    fn zero_phases(n: usize) -> PhaseMatrix {
        PhaseMatrix::from_rows(vec![vec![0.0; n]; n]).unwrap()
    }

    #[test]
    fn first_detection_on_three_emitters() {
        let delta = 0.37;
        let event = DetectionEvent { detector_index: 0, phase_row: vec![delta, 2.0 * delta, 3.0 * delta], outcome: One };
        let out = apply_detection(&EmitterState::initial(3).unwrap(), &event).unwrap();
        assert_eq!(out.len(), 3);
        for (key, k) in [("1ee", 1.0), ("e1e", 2.0), ("ee1", 3.0)] {
            let a = out.amplitude(&key.parse().unwrap());
            assert!((a - Complex64::cis(k * delta)).norm() < 1e-15, "{key}");
        }
        assert_eq!(out.excitations(), Some(2));
    }

    #[test]
    fn single_emitter_projects_to_ground() {
        let event = DetectionEvent { detector_index: 0, phase_row: vec![0.0], outcome: Zero };
        let out = apply_detection(&EmitterState::initial(1).unwrap(), &event).unwrap();
        assert_eq!(out.amplitude(&"0".parse().unwrap()), Complex64::new(1.0, 0.0));
        assert!(matches!(apply_detection(&out, &event), Err(Error::ProtocolOverrun)));
    }

    #[test]
    fn detection_is_linear() {
        let a = EmitterState::from_strs(2, &[("0e", Complex64::new(0.6, 0.0))]).unwrap();
        let b = EmitterState::from_strs(2, &[("e1", Complex64::new(0.0, 0.8))]).unwrap();
        let sum = EmitterState::from_strs(2, &[("0e", Complex64::new(0.6, 0.0)), ("e1", Complex64::new(0.0, 0.8))]).unwrap();
        let event = DetectionEvent { detector_index: 0, phase_row: vec![0.4, 1.1], outcome: One };
        let da = apply_detection(&a, &event).unwrap();
        let db = apply_detection(&b, &event).unwrap();
        let dsum = apply_detection(&sum, &event).unwrap();
        for (basis, amp) in dsum.iter() {
            assert!((amp - da.amplitude(basis) - db.amplitude(basis)).norm() < 1e-15);
        }
        assert_eq!(dsum.len(), 2);
    }

    #[test]
    fn three_emitter_dicke_from_ideal_geometry() {
        let phases = zero_phases(3);
        let r = run_protocol(&phases, &[One, Zero, Zero], &EmissionModel::default(), Interpretation::AtomicQubits, Engine::Sequential)
            .unwrap();
        let target = EmitterState::dicke(DickeTarget::new(3, -1).unwrap());
        assert!((fidelity(&r.final_state, &target).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn four_emitter_balanced_dicke() {
        let r = run_protocol(&zero_phases(4), &[Zero, Zero, One, One], &EmissionModel::default(), Interpretation::AtomicQubits, Engine::Sequential)
            .unwrap();
        assert_eq!(r.final_state.len(), 6);
        for (_, a) in r.final_state.iter() {
            assert!((a - Complex64::new(6f64.sqrt().recip(), 0.0)).norm() < 1e-12);
        }
        // Four unit-weight paths per string: ||psi||^2 = 6 * 16; rate = 96 / 16 / 24.
        assert!((r.unnormalized_norm_sqr - 96.0).abs() < 1e-9);
        assert!((r.relative_rate - 0.25).abs() < 1e-12);
    }

    #[test]
    fn all_sigma_plus_is_product_state() {
        let rows = vec![vec![0.3, 1.2, -0.4], vec![2.0, 0.1, 0.9], vec![-1.0, 0.5, 0.25]];
        let phases = PhaseMatrix::from_rows(rows).unwrap();
        let r = run_protocol(&phases, &[Zero; 3], &EmissionModel::default(), Interpretation::AtomicQubits, Engine::Sequential)
            .unwrap();
        assert_eq!(r.final_state.len(), 1);
        assert!((r.final_state.amplitude(&"000".parse().unwrap()).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_emitter_pi_phase_heralds_singlet() {
        // Paths: detector 1 -> emitter 1, detector 2 -> emitter 2 gives |01>
        // with phase phi11 + phi22 = pi; the swapped path gives |10> with
        // phase phi12 + phi21 = 0.
        let phases = PhaseMatrix::from_rows(vec![vec![0.0, 0.0], vec![0.0, PI]]).unwrap();
        let raw = unnormalized_final_state(&phases, &[Zero, One], Engine::Sequential).unwrap();
        assert!((raw.amplitude(&"01".parse().unwrap()) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((raw.amplitude(&"10".parse().unwrap()) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let oracle = amplitude_oracle_bruteforce(&phases, &[Zero, One]).unwrap();
        for (b, a) in oracle.iter() {
            assert!((raw.amplitude(b) - a).norm() < 1e-15);
        }
        let r = run_protocol(&phases, &[Zero, One], &EmissionModel::default(), Interpretation::AtomicQubits, Engine::Sequential).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = EmitterState::from_strs(2, &[("01", Complex64::new(h, 0.0)), ("10", Complex64::new(-h, 0.0))]).unwrap();
        assert!((fidelity(&r.final_state, &singlet).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn destructive_interference_is_reported() {
        // Both paths to |00> cancel when the phase sums differ by pi.
        let phases = PhaseMatrix::from_rows(vec![vec![0.0, 0.0], vec![0.0, PI]]).unwrap();
        let err = run_protocol(&phases, &[Zero, Zero], &EmissionModel::default(), Interpretation::AtomicQubits, Engine::Sequential);
        // Same-level outcomes collapse onto one string: amplitude e^{i pi} + 1 = 0.
        assert!(matches!(err, Err(Error::DestructiveInterference(_))));
    }

    #[test]
    fn oracle_matches_three_emitter_closed_form() {
        let d = [0.41, -1.3, 2.2];
        let rows = d.iter().map(|&x| vec![x, 2.0 * x, 3.0 * x]).collect();
        let phases = PhaseMatrix::from_rows(rows).unwrap();
        let oracle = amplitude_oracle_bruteforce(&phases, &[Zero, One, Zero]).unwrap();
        assert_eq!(oracle.len(), 3);
        assert!(amplitude_oracle_bruteforce(&zero_phases(1), &[One]).unwrap().len() == 1);
        let big = zero_phases(9);
        assert!(matches!(amplitude_oracle_bruteforce(&big, &[Zero; 9]), Err(Error::OracleTooLarge { .. })));
    }

    #[test]
    fn permanent_amplitude_with_zero_phases_counts_paths() {
        let phases = zero_phases(5);
        let outcomes = [Zero, One, One, Zero, One];
        let a = amplitude_via_permanents(&phases, &outcomes, &"10101".parse().unwrap()).unwrap();
        assert!((a - Complex64::new(12.0, 0.0)).norm() < 1e-12); // 2! * 3!
        let inconsistent = amplitude_via_permanents(&phases, &outcomes, &"11111".parse().unwrap()).unwrap();
        assert_eq!(inconsistent, Complex64::default());
    }

    #[test]
    fn permanent_amplitude_single_blocks() {
        let phases = PhaseMatrix::from_rows(vec![vec![0.3, 0.9], vec![1.7, -0.2]]).unwrap();
        let a = amplitude_via_permanents(&phases, &[Zero, One], &"01".parse().unwrap()).unwrap();
        assert!((a - Complex64::cis(0.3) * Complex64::cis(-0.2)).norm() < 1e-15);
    }

    #[test]
    fn engines_agree_on_fiber_geometry() {
        let rows = (0..4).map(|_| (1..=4).map(|j| j as f64 * TAU).collect()).collect();
        let phases = PhaseMatrix::from_rows(rows).unwrap();
        let outcomes = [One, Zero, One, Zero];
        let a = unnormalized_final_state(&phases, &outcomes, Engine::Sequential).unwrap();
        let b = unnormalized_final_state(&phases, &outcomes, Engine::Permanent).unwrap();
        assert_eq!(a.len(), b.len());
        for (basis, amp) in a.iter() {
            assert!((amp - b.amplitude(basis)).norm() < 1e-10);
        }
    }

    #[test]
    fn shape_errors() {
        let phases = zero_phases(3);
        assert!(matches!(
            run_protocol(&phases, &[Zero, One], &EmissionModel::default(), Interpretation::AtomicQubits, Engine::Sequential),
            Err(Error::SizeMismatch { .. })
        ));
        let event = DetectionEvent { detector_index: 0, phase_row: vec![0.0; 2], outcome: One };
        assert!(apply_detection(&EmitterState::initial(3).unwrap(), &event).is_err());
    }
}
