//! Fidelity of |2, 0> against the detector window, the transverse jitter,
//! random spacing errors and a wavelength mismatch, each scanned alone
//! around the ideal four-emitter geometry.
//!
//! cargo run --release --example sensitivity_scan

use dicke_herald::{
    dicke_detectors, scan_parameter, ChainGeometry, DickeTarget, EmissionModel, Engine, MonteCarloConfig,
    PerturbationSpec, Polarizer, ScanAxis,
};

fn main() -> dicke_herald::Result<()> {
    let geometry = ChainGeometry::new(4, 5e-6, 500e-9)?;
    let polarizers = [Polarizer::SigmaPlus, Polarizer::SigmaPlus, Polarizer::SigmaMinus, Polarizer::SigmaMinus];
    let base = MonteCarloConfig {
        geometry,
        detectors: dicke_detectors(&geometry, &polarizers)?,
        emission: EmissionModel::default(),
        perturbation: PerturbationSpec::none(7),
        target: DickeTarget::new(4, 0)?,
        num_samples: 10_000,
        engine: Engine::Sequential,
    };

    let axes: [(ScanAxis, Vec<f64>, &str, f64); 4] = [
        (ScanAxis::AngularHalfwidth, vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5], "deg", 1f64.to_radians()),
        (ScanAxis::LateralSigma, vec![0.0, 10.0, 50.0, 100.0, 200.0], "nm", 1e-9),
        (ScanAxis::SpacingError, vec![0.0, 20.0, 50.0, 100.0, 200.0], "nm", 1e-9),
        (ScanAxis::Wavelength, vec![470.0, 490.0, 500.0, 510.0, 530.0], "nm", 1e-9),
    ];
    for (axis, values, unit, scale) in axes {
        println!("{} ({unit})", axis.name());
        let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
        for (value, point) in values.iter().zip(scan_parameter(axis, &scaled, &base)?) {
            match point.outcome {
                Ok(r) => println!("  {value:>8.2}  F = {:.4} +/- {:.4}", r.mean_fidelity, r.fidelity_stderr),
                Err(e) => println!("  {value:>8.2}  error: {e}"),
            }
        }
    }
    Ok(())
}
