//! Three routes to the same heralded amplitudes for random phase matrices:
//! sequential detection operators, explicit enumeration of all N! photon
//! paths, and products of block permanents.
//!
//! cargo run --release --example path_sums

use std::time::Instant;

use dicke_herald::detection::unnormalized_final_state;
use dicke_herald::{amplitude_oracle_bruteforce, Engine, GroundLevel, PhaseMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> dicke_herald::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!("{:>2} {:>8} {:>12} {:>12} {:>12} {:>12}", "N", "terms", "seq (us)", "oracle (us)", "perm (us)", "max diff");
    for n in 2..=8 {
        let rows = (0..n).map(|_| (0..n).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let phases = PhaseMatrix::from_rows(rows)?;
        let outcomes: Vec<_> = (0..n).map(|i| if i % 2 == 0 { GroundLevel::Zero } else { GroundLevel::One }).collect();

        let t = Instant::now();
        let seq = unnormalized_final_state(&phases, &outcomes, Engine::Sequential)?;
        let t_seq = t.elapsed();
        let t = Instant::now();
        let oracle = amplitude_oracle_bruteforce(&phases, &outcomes)?;
        let t_oracle = t.elapsed();
        let t = Instant::now();
        let perm = unnormalized_final_state(&phases, &outcomes, Engine::Permanent)?;
        let t_perm = t.elapsed();

        let diff = oracle
            .iter()
            .map(|(b, a)| (seq.amplitude(b) - a).norm().max((perm.amplitude(b) - a).norm()))
            .fold(0.0, f64::max);
        println!(
            "{n:>2} {:>8} {:>12.1} {:>12.1} {:>12.1} {:>12.2e}",
            oracle.len(),
            t_seq.as_secs_f64() * 1e6,
            t_oracle.as_secs_f64() * 1e6,
            t_perm.as_secs_f64() * 1e6,
            diff
        );
    }
    Ok(())
}
