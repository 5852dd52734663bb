//! Stochastic permanence of example 1: thresholds from a pilot ensemble,
//! tail probabilities from a fresh one.
//!
//! ```text
//! cargo run --release --example permanence
//! ```

use logistic_sde::builtin_example;
use logistic_sde::montecarlo::{run_ensemble, EnsembleConfig};
use logistic_sde::sde::SimConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = builtin_example(1)?;

    let pilot = EnsembleConfig::new(SimConfig::new(0.5, 1e-3, 100.0, 0), 200, 1, vec![100.0]);
    let pilot = run_ensemble(&spec, &pilot, &[])?;
    let q = &pilot.probes[0].quantiles;
    let (m, big_m) = (q.q01, q.q99);
    println!("pilot at t=100: m = {m:.3e} (1%), M = {big_m:.4} (99%)");

    // The coefficients are 2π-periodic, so the law of x(t) depends on the
    // phase of t. Probing one full period shows how much.
    let t0 = 400.0;
    let probes: Vec<f64> = (0..=8).map(|k| t0 + k as f64 * 0.8).collect();
    let cfg = EnsembleConfig::new(SimConfig::new(0.5, 1e-3, 407.0, 0), 200, 2, probes);
    let stats = run_ensemble(&spec, &cfg, &[1.0])?;
    println!("{:>7} {:>7} {:>9} {:>9} {:>9} {:>9}", "t", "phase", "E[x]", "q99", "P(x>=m)", "P(x<=M)");
    for p in &stats.probes {
        println!(
            "{:>7.1} {:>7.3} {:>9.4} {:>9.4} {:>9.3} {:>9.3}",
            p.time,
            p.time % std::f64::consts::TAU,
            p.mean_xp[0],
            p.quantiles.q99,
            p.tail_above(m),
            p.tail_below(big_m)
        );
    }
    Ok(())
}
