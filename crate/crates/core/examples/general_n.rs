//! Every symmetric Dicke state for two to eight emitters, with the
//! relative coincidence rate of each polarizer pattern.
//!
//! cargo run --release --example general_n

use dicke_herald::{
    dicke_detectors, fidelity, phase_matrix, run_protocol, ChainGeometry, DickeTarget, EmissionModel, EmitterState, Engine,
    Interpretation, Polarizer,
};

fn main() -> dicke_herald::Result<()> {
    // 10 um spacing leaves room for eight orders with sin(theta) < 1.
    let emission = EmissionModel::default();
    println!("{:>2} {:>10} {:>6} {:>14} {:>12}", "N", "state", "terms", "1 - fidelity", "rate");
    for n in 2..=8 {
        let geom = ChainGeometry::new(n, 10e-6, 500e-9)?;
        for target in DickeTarget::all(n)? {
            let polarizers: Vec<Polarizer> = (0..n)
                .map(|i| if i < target.num_ones() { Polarizer::SigmaMinus } else { Polarizer::SigmaPlus })
                .collect();
            let detectors = dicke_detectors(&geom, &polarizers)?;
            let phases = phase_matrix(&geom, &detectors)?;
            let outcomes: Vec<_> = polarizers.iter().map(|p| p.heralded_level()).collect();
            let r = run_protocol(&phases, &outcomes, &emission, Interpretation::AtomicQubits, Engine::Sequential)?;
            let f = fidelity(&r.final_state, &EmitterState::dicke(target))?;
            println!("{n:>2} {:>10} {:>6} {:>14.2e} {:>12.6}", target.to_string(), r.final_state.len(), 1.0 - f, r.relative_rate);
        }
    }
    Ok(())
}
