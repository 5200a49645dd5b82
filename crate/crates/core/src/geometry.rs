//! Emitter chain and detector geometry.
//!
//! Emitter `j` (1-based) sits at `x_j = j d` on the chain axis. A detector
//! at angle `theta` from the chain normal, in the plane containing the axis,
//! looks along `e = (sin theta, cos theta)` (axial, transverse). In the far
//! field the phase picked up by a photon from emitter `j` is
//! `k (e . R_j)`, which for the ideal chain is `j delta` with
//! `delta = k d sin theta`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{GroundLevel, MAX_EMITTERS};

/// Detector distance must exceed the chain's Fraunhofer distance by this
/// factor to count as far field.
pub const FAR_FIELD_MARGIN: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGeometry", into = "RawGeometry")]
pub struct ChainGeometry {
    num_emitters: usize,
    spacing: f64,
    wavelength: f64,
    detector_distance: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    num_emitters: usize,
    spacing: f64,
    wavelength: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    detector_distance: Option<f64>,
}

impl TryFrom<RawGeometry> for ChainGeometry {
    type Error = Error;

    fn try_from(raw: RawGeometry) -> Result<Self> {
        let geom = ChainGeometry::new(raw.num_emitters, raw.spacing, raw.wavelength)?;
        match raw.detector_distance {
            Some(r) => geom.with_detector_distance(r),
            None => Ok(geom),
        }
    }
}

impl From<ChainGeometry> for RawGeometry {
    fn from(g: ChainGeometry) -> Self {
        RawGeometry {
            num_emitters: g.num_emitters,
            spacing: g.spacing,
            wavelength: g.wavelength,
            detector_distance: g.detector_distance,
        }
    }
}

impl ChainGeometry {
    pub fn new(num_emitters: usize, spacing: f64, wavelength: f64) -> Result<Self> {
        if num_emitters == 0 || num_emitters > MAX_EMITTERS {
            return Err(Error::InvalidSize { size: num_emitters, max: MAX_EMITTERS });
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidGeometry(format!("spacing must be positive, got {spacing}")));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::InvalidGeometry(format!("wavelength must be positive, got {wavelength}")));
        }
        Ok(ChainGeometry { num_emitters, spacing, wavelength, detector_distance: None })
    }

    /// Record the detector distance so the far-field assumption can be checked.
    pub fn with_detector_distance(mut self, distance: f64) -> Result<Self> {
        if !(distance > 0.0 && distance.is_finite()) {
            return Err(Error::InvalidGeometry(format!("detector distance must be positive, got {distance}")));
        }
        self.detector_distance = Some(distance);
        Ok(self)
    }

    pub fn with_wavelength(self, wavelength: f64) -> Result<Self> {
        let g = ChainGeometry::new(self.num_emitters, self.spacing, wavelength)?;
        Ok(ChainGeometry { detector_distance: self.detector_distance, ..g })
    }

    pub fn num_emitters(&self) -> usize {
        self.num_emitters
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength
    }

    pub fn detector_distance(&self) -> Option<f64> {
        self.detector_distance
    }

    /// Whether the recorded detector distance is far beyond both the chain
    /// length and its Fraunhofer distance. Unrecorded distances are assumed
    /// to be far field.
    pub fn is_far_field(&self) -> bool {
        let length = self.num_emitters as f64 * self.spacing;
        let fraunhofer = length.max(length * length / self.wavelength);
        self.detector_distance.is_none_or(|r| r >= FAR_FIELD_MARGIN * fraunhofer)
    }

    /// Nominal axial coordinate of emitter `j` (1-based).
    pub fn position(&self, j: usize) -> f64 {
        j as f64 * self.spacing
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarizer {
    SigmaPlus,
    SigmaMinus,
}

impl Polarizer {
    /// Ground level the emitting atom is left in when this polarizer passes
    /// the photon: sigma+ pairs with `|0>`, sigma- with `|1>`.
    pub fn heralded_level(self) -> GroundLevel {
        match self {
            Polarizer::SigmaPlus => GroundLevel::Zero,
            Polarizer::SigmaMinus => GroundLevel::One,
        }
    }

    pub fn for_level(level: GroundLevel) -> Polarizer {
        match level {
            GroundLevel::Zero => Polarizer::SigmaPlus,
            GroundLevel::One => Polarizer::SigmaMinus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseMode {
    FromAngle,
    /// Fixed adjacent-emitter phase, e.g. equal-length fibers.
    Exact(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDetector", into = "RawDetector")]
pub struct DetectorSpec {
    angle: f64,
    polarizer: Polarizer,
    mode: PhaseMode,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    #[serde(default)]
    angle: f64,
    polarizer: Polarizer,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact_phase: Option<f64>,
}

impl TryFrom<RawDetector> for DetectorSpec {
    type Error = Error;

    fn try_from(raw: RawDetector) -> Result<Self> {
        match raw.exact_phase {
            Some(phase) => DetectorSpec::exact(phase, raw.polarizer),
            None => DetectorSpec::at_angle(raw.angle, raw.polarizer),
        }
    }
}

impl From<DetectorSpec> for RawDetector {
    fn from(d: DetectorSpec) -> Self {
        let exact_phase = match d.mode {
            PhaseMode::Exact(p) => Some(p),
            PhaseMode::FromAngle => None,
        };
        RawDetector { angle: d.angle, polarizer: d.polarizer, exact_phase }
    }
}

impl DetectorSpec {
    pub fn at_angle(angle: f64, polarizer: Polarizer) -> Result<Self> {
        if angle.is_nan() || angle.abs() >= FRAC_PI_2 {
            return Err(Error::InvalidGeometry(format!("detector angle {angle} outside (-pi/2, pi/2)")));
        }
        Ok(DetectorSpec { angle, polarizer, mode: PhaseMode::FromAngle })
    }

    pub fn exact(phase: f64, polarizer: Polarizer) -> Result<Self> {
        if !phase.is_finite() {
            return Err(Error::InvalidGeometry(format!("exact phase {phase} is not finite")));
        }
        Ok(DetectorSpec { angle: 0.0, polarizer, mode: PhaseMode::Exact(phase) })
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn polarizer(&self) -> Polarizer {
        self.polarizer
    }

    pub fn mode(&self) -> PhaseMode {
        self.mode
    }

    pub fn with_polarizer(self, polarizer: Polarizer) -> Self {
        DetectorSpec { polarizer, ..self }
    }
}

/// `delta = k d sin(theta)` for a detector in angle mode.
pub fn nominal_phase(geom: &ChainGeometry, det: &DetectorSpec) -> Result<f64> {
    match det.mode {
        PhaseMode::FromAngle => Ok(geom.wavenumber() * geom.spacing * det.angle.sin()),
        PhaseMode::Exact(_) => Err(Error::ModeMismatch),
    }
}

/// `n_detectors` distinct directions with `delta = 0 mod 2 pi`, i.e.
/// `sin(theta) = q lambda / d` for integer orders `q`, taken in the order
/// `0, 1, -1, 2, -2, ...`.
pub fn dicke_detector_angles(geom: &ChainGeometry, n_detectors: usize) -> Result<Vec<f64>> {
    let step = geom.wavelength / geom.spacing;
    let mut angles = Vec::with_capacity(n_detectors);
    if n_detectors > 0 {
        angles.push(0.0);
    }
    let mut q = 1u32;
    while angles.len() < n_detectors {
        let s = q as f64 * step;
        if s >= 1.0 {
            return Err(Error::GeometryInfeasible { requested: n_detectors, available: angles.len() });
        }
        angles.push(s.asin());
        if angles.len() < n_detectors {
            angles.push(-s.asin());
        }
        q += 1;
    }
    Ok(angles)
}

/// Detectors at [`dicke_detector_angles`], one per polarizer setting.
pub fn dicke_detectors(geom: &ChainGeometry, polarizers: &[Polarizer]) -> Result<Vec<DetectorSpec>> {
    dicke_detector_angles(geom, polarizers.len())?
        .into_iter()
        .zip(polarizers)
        .map(|(angle, &p)| DetectorSpec::at_angle(angle, p))
        .collect()
}

/// Map a phase into `(-pi, pi]`.
pub fn wrap_phase(phase: f64) -> f64 {
    let r = phase.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Phases `phi[n][j]` (radians) for detector `n` and emitter `j`, both
/// 0-based in storage.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl PhaseMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(Error::InvalidGeometry("phase matrix must be nonempty".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::SizeMismatch { expected: cols, found: bad.len() });
        }
        Ok(PhaseMatrix { rows: rows.len(), cols, data: rows.concat() })
    }

    /// Detectors.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Emitters.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, detector: usize, emitter: usize) -> f64 {
        self.data[detector * self.cols + emitter]
    }

    pub fn row(&self, detector: usize) -> &[f64] {
        &self.data[detector * self.cols..(detector + 1) * self.cols]
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &PhaseMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Emitter displacements and detector angle offsets for one sample.
struct Offsets {
    axial: Vec<f64>,
    transverse: Vec<f64>,
    angle: Vec<f64>,
}

fn build_matrix(geom: &ChainGeometry, detectors: &[DetectorSpec], offsets: &Offsets) -> Result<PhaseMatrix> {
    if detectors.is_empty() {
        return Err(Error::InvalidGeometry("no detectors".into()));
    }
    let k = geom.wavenumber();
    let n = geom.num_emitters;
    let mut data = Vec::with_capacity(detectors.len() * n);
    for (det, dtheta) in detectors.iter().zip(&offsets.angle) {
        match det.mode {
            PhaseMode::FromAngle => {
                let (s, c) = (det.angle + dtheta).sin_cos();
                for j in 0..n {
                    let x = geom.position(j + 1) + offsets.axial[j];
                    data.push(k * (s * x + c * offsets.transverse[j]));
                }
            }
            PhaseMode::Exact(delta) => {
                for j in 0..n {
                    data.push((j + 1) as f64 * delta + k * offsets.axial[j]);
                }
            }
        }
    }
    Ok(PhaseMatrix { rows: detectors.len(), cols: n, data })
}

/// Nominal phases: `j delta_n` per entry, or `j * exact` for fiber detectors.
pub fn phase_matrix(geom: &ChainGeometry, detectors: &[DetectorSpec]) -> Result<PhaseMatrix> {
    let n = geom.num_emitters;
    let offsets = Offsets { axial: vec![0.0; n], transverse: vec![0.0; n], angle: vec![0.0; detectors.len()] };
    build_matrix(geom, detectors, &offsets)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spread {
    #[default]
    Gaussian,
    Uniform,
}

impl Spread {
    /// Draw with the given width: standard deviation for `Gaussian`,
    /// half-width for `Uniform`.
    fn draw<R: Rng>(self, width: f64, rng: &mut R) -> f64 {
        match self {
            Spread::Gaussian => width * rng.sample::<f64, _>(StandardNormal),
            Spread::Uniform => width * rng.random_range(-1.0..=1.0),
        }
    }

    pub fn variance(self, width: f64) -> f64 {
        match self {
            Spread::Gaussian => width * width,
            Spread::Uniform => width * width / 3.0,
        }
    }
}

fn uniform_spread() -> Spread {
    Spread::Uniform
}

/// Random geometric imperfections applied per Monte Carlo sample.
///
/// `lateral_sigma` displaces each emitter transversely (in the detection
/// plane), `axial_sigma` along the chain, and `angular_halfwidth` offsets
/// each detector direction. Widths are meters or radians; see [`Spread`]
/// for how a width maps to a distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    #[serde(default)]
    pub lateral_sigma: f64,
    #[serde(default)]
    pub axial_sigma: f64,
    #[serde(default)]
    pub angular_halfwidth: f64,
    #[serde(default)]
    pub lateral_kind: Spread,
    #[serde(default)]
    pub axial_kind: Spread,
    #[serde(default = "uniform_spread")]
    pub angular_kind: Spread,
    #[serde(default)]
    pub seed: u64,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        PerturbationSpec::none(0)
    }
}

impl PerturbationSpec {
    pub fn none(seed: u64) -> Self {
        PerturbationSpec {
            lateral_sigma: 0.0,
            axial_sigma: 0.0,
            angular_halfwidth: 0.0,
            lateral_kind: Spread::Gaussian,
            axial_kind: Spread::Gaussian,
            angular_kind: Spread::Uniform,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("lateral_sigma", self.lateral_sigma),
            ("axial_sigma", self.axial_sigma),
            ("angular_halfwidth", self.angular_halfwidth),
        ] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidPerturbation(format!("{name} must be finite and >= 0, got {w}")));
            }
        }
        Ok(())
    }

    /// Independent generator for one sample: the ChaCha stream is selected
    /// by the sample index, so samples can be drawn in any order.
    pub fn rng_for_sample(&self, sample_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(sample_index);
        rng
    }
}

/// One perturbed phase matrix, a pure function of `(pert.seed, sample_index)`.
pub fn sample_perturbed_phase_matrix(
    geom: &ChainGeometry,
    detectors: &[DetectorSpec],
    pert: &PerturbationSpec,
    sample_index: u64,
) -> Result<PhaseMatrix> {
    pert.validate()?;
    let mut rng = pert.rng_for_sample(sample_index);
    let n = geom.num_emitters;
    let mut offsets = Offsets { axial: Vec::with_capacity(n), transverse: Vec::with_capacity(n), angle: Vec::new() };
    for _ in 0..n {
        offsets.transverse.push(pert.lateral_kind.draw(pert.lateral_sigma, &mut rng));
        offsets.axial.push(pert.axial_kind.draw(pert.axial_sigma, &mut rng));
    }
    offsets.angle = detectors
        .iter()
        .map(|d| match d.mode {
            PhaseMode::FromAngle => pert.angular_kind.draw(pert.angular_halfwidth, &mut rng),
            PhaseMode::Exact(_) => 0.0,
        })
        .collect();
    build_matrix(geom, detectors, &offsets)
}

/// First-order standard deviation of every phase entry under `pert`:
/// `var = k^2 (cos^2 theta var_lat + sin^2 theta var_ax) + (k x_j cos theta)^2 var_theta`.
pub fn first_order_phase_std(
    geom: &ChainGeometry,
    detectors: &[DetectorSpec],
    pert: &PerturbationSpec,
) -> Result<PhaseMatrix> {
    pert.validate()?;
    let k = geom.wavenumber();
    let var_lat = pert.lateral_kind.variance(pert.lateral_sigma);
    let var_ax = pert.axial_kind.variance(pert.axial_sigma);
    let var_ang = pert.angular_kind.variance(pert.angular_halfwidth);
    let rows = detectors
        .iter()
        .map(|d| {
            (1..=geom.num_emitters)
                .map(|j| match d.mode {
                    PhaseMode::FromAngle => {
                        let (s, c) = d.angle.sin_cos();
                        let slope = k * geom.position(j) * c;
                        (k * k * (c * c * var_lat + s * s * var_ax) + slope * slope * var_ang).sqrt()
                    }
                    PhaseMode::Exact(_) => k * var_ax.sqrt(),
                })
                .collect()
        })
        .collect();
    PhaseMatrix::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trap_chain(n: usize) -> ChainGeometry {
        ChainGeometry::new(n, 5e-6, 500e-9).unwrap()
    }

    fn det(angle: f64) -> DetectorSpec {
        DetectorSpec::at_angle(angle, Polarizer::SigmaPlus).unwrap()
    }

    #[test]
    fn nominal_phase_examples() {
        let g = trap_chain(4);
        assert_eq!(nominal_phase(&g, &det(0.0)).unwrap(), 0.0);
        let theta = 0.1f64.asin();
        assert!((theta - 0.100167).abs() < 1e-6);
        let delta = nominal_phase(&g, &det(theta)).unwrap();
        assert!((delta - TAU).abs() < 1e-12);
        assert_eq!(nominal_phase(&g, &det(-theta)).unwrap(), -delta);
        let fiber = DetectorSpec::exact(TAU, Polarizer::SigmaMinus).unwrap();
        assert!(matches!(nominal_phase(&g, &fiber), Err(Error::ModeMismatch)));
    }

    #[test]
    fn dicke_angles_for_trap_chain() {
        let g = trap_chain(4);
        let angles = dicke_detector_angles(&g, 4).unwrap();
        let sines: Vec<f64> = angles.iter().map(|a| a.sin()).collect();
        for (s, expected) in sines.iter().zip([0.0, 0.1, -0.1, 0.2]) {
            assert!((s - expected).abs() < 1e-15, "{sines:?}");
        }
        for a in &angles {
            let delta = nominal_phase(&g, &det(*a)).unwrap();
            assert!(wrap_phase(delta).abs() < 1e-12);
        }
    }

    #[test]
    fn dicke_angles_infeasible_for_dense_chain() {
        let g = ChainGeometry::new(2, 250e-9, 500e-9).unwrap();
        assert!(matches!(
            dicke_detector_angles(&g, 2),
            Err(Error::GeometryInfeasible { requested: 2, available: 1 })
        ));
        // Exactly lambda/d = 1 is not admissible (sin theta must stay below 1).
        let g = ChainGeometry::new(3, 500e-9, 500e-9).unwrap();
        assert!(dicke_detector_angles(&g, 2).is_err());
    }

    #[test]
    fn phase_matrix_examples() {
        let g = trap_chain(3);
        let zero = phase_matrix(&g, &[det(0.0), det(0.0)]).unwrap();
        assert!(zero.data.iter().all(|&p| p == 0.0));

        let m = phase_matrix(&g, &[det(0.1f64.asin())]).unwrap();
        for (j, expected) in [TAU, 2.0 * TAU, 3.0 * TAU].iter().enumerate() {
            assert!((m.get(0, j) - expected).abs() < 1e-12);
        }

        let fiber = DetectorSpec::exact(TAU, Polarizer::SigmaPlus).unwrap();
        let m = phase_matrix(&trap_chain(4), &[fiber]).unwrap();
        assert_eq!(m.row(0), &[TAU, 2.0 * TAU, 3.0 * TAU, 4.0 * TAU]);
        assert!(phase_matrix(&g, &[]).is_err());
    }

    #[test]
    fn unperturbed_rows_are_arithmetic() {
        let g = trap_chain(5);
        let dets: Vec<_> = [-0.3, 0.05, 0.2, 0.7].iter().map(|&a| det(a)).collect();
        let m = phase_matrix(&g, &dets).unwrap();
        for (n, d) in dets.iter().enumerate() {
            let delta = nominal_phase(&g, d).unwrap();
            for j in 0..5 {
                assert!((m.get(n, j) - (j + 1) as f64 * delta).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_width_perturbation_is_identity() {
        let g = trap_chain(4);
        let dets = dicke_detectors(&g, &[Polarizer::SigmaPlus; 4]).unwrap();
        let nominal = phase_matrix(&g, &dets).unwrap();
        for idx in [0, 1, 99] {
            let sampled = sample_perturbed_phase_matrix(&g, &dets, &PerturbationSpec::none(42), idx).unwrap();
            assert_eq!(sampled.max_abs_diff(&nominal), 0.0);
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let g = trap_chain(4);
        let dets = dicke_detectors(&g, &[Polarizer::SigmaMinus; 4]).unwrap();
        let pert = PerturbationSpec { lateral_sigma: 5e-9, angular_halfwidth: 0.3f64.to_radians(), ..PerturbationSpec::none(7) };
        let a = sample_perturbed_phase_matrix(&g, &dets, &pert, 12).unwrap();
        let b = sample_perturbed_phase_matrix(&g, &dets, &pert, 12).unwrap();
        assert_eq!(a, b);
        let c = sample_perturbed_phase_matrix(&g, &dets, &pert, 13).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn shrinking_widths_converge_to_nominal() {
        let g = trap_chain(4);
        let dets = dicke_detectors(&g, &[Polarizer::SigmaPlus; 4]).unwrap();
        let nominal = phase_matrix(&g, &dets).unwrap();
        let mut last = f64::INFINITY;
        for scale in [1.0, 1e-2, 1e-4, 1e-6] {
            let pert = PerturbationSpec {
                lateral_sigma: 5e-9 * scale,
                axial_sigma: 5e-9 * scale,
                angular_halfwidth: 0.01 * scale,
                ..PerturbationSpec::none(3)
            };
            let diff = sample_perturbed_phase_matrix(&g, &dets, &pert, 0).unwrap().max_abs_diff(&nominal);
            assert!(diff < last);
            last = diff;
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn lateral_jitter_statistics_match_first_order_propagation() {
        let g = trap_chain(4);
        let dets = dicke_detectors(&g, &[Polarizer::SigmaPlus; 4]).unwrap();
        let nominal = phase_matrix(&g, &dets).unwrap();
        let pert = PerturbationSpec { lateral_sigma: 5e-9, ..PerturbationSpec::none(11) };
        let predicted = first_order_phase_std(&g, &dets, &pert).unwrap();
        let samples = 100_000u64;
        let mut sum_sq = [0.0; 16];
        for idx in 0..samples {
            let m = sample_perturbed_phase_matrix(&g, &dets, &pert, idx).unwrap();
            for (acc, (a, b)) in sum_sq.iter_mut().zip(m.data.iter().zip(&nominal.data)) {
                *acc += (a - b).powi(2);
            }
        }
        let bound = TAU * 5.0 / 500.0;
        for (i, acc) in sum_sq.iter().enumerate() {
            let observed = (acc / samples as f64).sqrt();
            let expected = predicted.data[i];
            // k sigma cos(theta), the projection of the transverse jitter.
            let (n, j) = (i / 4, i % 4);
            assert!((expected - bound * dets[n].angle.cos()).abs() < 1e-12, "entry ({n},{j})");
            assert!(expected <= bound + 1e-15);
            assert!((observed / expected - 1.0).abs() < 0.01, "entry ({n},{j}): {observed} vs {expected}");
        }
    }

    #[test]
    fn fiber_mode_ignores_angles_and_lateral_jitter() {
        let g = trap_chain(3);
        let dets = vec![DetectorSpec::exact(TAU, Polarizer::SigmaPlus).unwrap(); 3];
        let pert = PerturbationSpec { lateral_sigma: 1e-6, angular_halfwidth: 0.1, ..PerturbationSpec::none(5) };
        let m = sample_perturbed_phase_matrix(&g, &dets, &pert, 4).unwrap();
        assert_eq!(m, phase_matrix(&g, &dets).unwrap());
    }

    #[test]
    fn validation() {
        assert!(ChainGeometry::new(3, 0.0, 5e-7).is_err());
        assert!(ChainGeometry::new(3, 1e-6, -1.0).is_err());
        assert!(DetectorSpec::at_angle(FRAC_PI_2, Polarizer::SigmaPlus).is_err());
        let bad = PerturbationSpec { lateral_sigma: -1.0, ..PerturbationSpec::none(0) };
        assert!(bad.validate().is_err());
        let g = trap_chain(4).with_detector_distance(0.1).unwrap();
        assert!(g.is_far_field());
        let g = trap_chain(4).with_detector_distance(1e-4).unwrap();
        assert!(!g.is_far_field());
    }

    #[test]
    fn wrap_phase_range() {
        assert!(wrap_phase(4.0 * PI).abs() < 1e-15);
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(-0.5) + 0.5).abs() < 1e-15);
    }
}
