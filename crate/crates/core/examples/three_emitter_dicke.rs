//! All four symmetric states of three emitters, heralded by choosing the
//! polarizer pattern in front of three detectors placed at angles where
//! every path phase is a multiple of 2 pi.
//!
//! cargo run --example three_emitter_dicke

use dicke_herald::{
    dicke_detectors, fidelity, nominal_phase, phase_matrix, run_protocol, ChainGeometry, DickeTarget, EmissionModel,
    EmitterState, Engine, Interpretation, Polarizer,
};

fn main() -> dicke_herald::Result<()> {
    let geom = ChainGeometry::new(3, 5e-6, 500e-9)?;

    for ones in (0..=3).rev() {
        let polarizers: Vec<Polarizer> =
            (0..3).map(|i| if i < ones { Polarizer::SigmaMinus } else { Polarizer::SigmaPlus }).collect();
        let detectors = dicke_detectors(&geom, &polarizers)?;
        let phases = phase_matrix(&geom, &detectors)?;
        let outcomes: Vec<_> = polarizers.iter().map(|p| p.heralded_level()).collect();
        let result =
            run_protocol(&phases, &outcomes, &EmissionModel::default(), Interpretation::AtomicQubits, Engine::Sequential)?;

        let target = DickeTarget::from_levels(&outcomes)?;
        let f = fidelity(&result.final_state, &EmitterState::dicke(target))?;
        println!("polarizers {polarizers:?}");
        for d in &detectors {
            println!("  theta = {:+.6} rad, delta = {:.3} * 2pi", d.angle(), nominal_phase(&geom, d)? / std::f64::consts::TAU);
        }
        println!("  heralded {target}: fidelity {f:.12}, relative rate {:.4}", result.relative_rate);
        // Strip the global phase of the first term for display.
        let phase = result.final_state.iter().next().map(|(_, a)| a.arg()).unwrap_or(0.0);
        for (basis, amp) in result.final_state.iter() {
            let a = amp * num_complex::Complex64::cis(-phase);
            println!("    |{basis}>  {:+.6} {:+.6}i", a.re, a.im);
        }
    }
    Ok(())
}
