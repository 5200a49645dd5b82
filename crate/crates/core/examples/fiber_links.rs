//! Remote emitters linked to every detector by equal-length fibers: the
//! phases are fixed at 2 pi regardless of where the emitters are. The same
//! heralded amplitudes also describe photon polarization qubits when the
//! polarizers sit in front of the emitters instead of the detectors.
//!
//! cargo run --example fiber_links

use std::f64::consts::TAU;

use dicke_herald::{
    fidelity, phase_matrix, run_protocol, ChainGeometry, DetectorSpec, DickeTarget, EmissionModel, EmitterState, Engine,
    GroundLevel, Interpretation, Polarizer,
};

fn main() -> dicke_herald::Result<()> {
    // One meter between emitters: hopeless for free-space far-field optics.
    let geom = ChainGeometry::new(4, 1.0, 500e-9)?;
    let polarizers = [Polarizer::SigmaMinus, Polarizer::SigmaPlus, Polarizer::SigmaMinus, Polarizer::SigmaMinus];
    let detectors: Vec<DetectorSpec> =
        polarizers.iter().map(|&p| DetectorSpec::exact(TAU, p)).collect::<dicke_herald::Result<_>>()?;
    let phases = phase_matrix(&geom, &detectors)?;
    let outcomes: Vec<_> = polarizers.iter().map(|p| p.heralded_level()).collect();
    let target = DickeTarget::from_levels(&outcomes)?;

    for interpretation in [Interpretation::AtomicQubits, Interpretation::PhotonicPolarizationQubits] {
        let r = run_protocol(&phases, &outcomes, &EmissionModel::default(), interpretation, Engine::Permanent)?;
        println!("{interpretation:?}: qubit position = {}", interpretation.site_label());
        println!(
            "  0 = {}, 1 = {}",
            interpretation.level_label(GroundLevel::Zero),
            interpretation.level_label(GroundLevel::One)
        );
        println!("  fidelity with {target}: {:.12}", fidelity(&r.final_state, &EmitterState::dicke(target))?);
        for (basis, amp) in r.final_state.iter() {
            println!("    |{basis}>  {:+.6} {:+.6}i", amp.re, amp.im);
        }
    }
    Ok(())
}
