//! Total spin and its projection for the symmetric Dicke states, and for
//! a singlet for contrast.
//!
//! cargo run --example collective_spin

use dicke_herald::{DickeTarget, EmitterState};
use num_complex::Complex64;

fn main() -> dicke_herald::Result<()> {
    println!("{:>12} {:>8} {:>8} {:>10}", "state", "<S_z>", "<S^2>", "S(S+1)");
    for n in 1..=6 {
        for t in DickeTarget::all(n)? {
            let s = EmitterState::dicke(t);
            let half = t.total_spin();
            println!(
                "{:>12} {:>8.3} {:>8.3} {:>10.3}",
                t.to_string(),
                s.total_spin_z()?,
                s.total_spin_squared()?,
                half * (half + 1.0)
            );
        }
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let singlet = EmitterState::from_strs(2, &[("10", Complex64::new(h, 0.0)), ("01", Complex64::new(-h, 0.0))])?;
    println!("{:>12} {:>8.3} {:>8.3}", "singlet", singlet.total_spin_z()?, singlet.total_spin_squared()?);
    Ok(())
}
