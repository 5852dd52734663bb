//! Two solutions driven by the same noise forget their initial values.
//!
//! ```text
//! cargo run --release --example attractivity
//! ```

use logistic_sde::builtin_example;
use logistic_sde::montecarlo::{attractivity_experiment, EnsembleConfig};
use logistic_sde::sde::{coupled_pair, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = builtin_example(1)?;

    let cfg = SimConfig::new(0.2, 1e-3, 60.0, 11).with_stride(10_000);
    let (x, y) = coupled_pair(&spec, &cfg, 0.2, 2.0)?;
    println!("{:>5} {:>10} {:>10} {:>10}", "t", "x", "y", "|x - y|");
    for ((t, a), b) in x.times.iter().zip(&x.states).zip(&y.states) {
        println!("{t:>5} {a:>10.5} {b:>10.5} {:>10.2e}", (a - b).abs());
    }

    let cfg = EnsembleConfig::new(SimConfig::new(0.2, 1e-3, 200.0, 0), 100, 31, vec![]);
    let res = attractivity_experiment(&spec, &cfg, 0.2, 2.0)?;
    println!(
        "{} pairs to t=200: {:.0}% below 1e-2, largest gap {:.2e}",
        res.n_pairs,
        100.0 * res.fraction_below(1e-2),
        res.max_gap()
    );
    Ok(())
}
