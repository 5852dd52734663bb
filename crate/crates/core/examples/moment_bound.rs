//! Ensemble moments against the comparison-equation bound.
//!
//! ```text
//! cargo run --release --example moment_bound
//! ```

use logistic_sde::builtin_example;
use logistic_sde::hypotheses::ScanParams;
use logistic_sde::montecarlo::{verify_moment_bound, EnsembleConfig};
use logistic_sde::sde::{solve_moment_ode, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = builtin_example(1)?;
    let base = SimConfig::new(0.5, 1e-3, 200.0, 0);

    for p in [0.5, 1.0, 2.0, 3.0] {
        let z = solve_moment_ode(&spec, p, &base)?;
        println!("p = {p}: max z = {:.4}, bound = {:.4}", z.running_max, z.bound());
    }

    let cfg = EnsembleConfig::new(base, 300, 7, vec![50.0, 100.0, 200.0]);
    for p in [1.0, 2.0] {
        let report = verify_moment_bound(&spec, &cfg, p, 0.10, &ScanParams::default())?;
        println!("p = {p}: {:?} (H1 {:?})", report.outcome, report.h1);
        for probe in &report.probes {
            println!("  t={:>5}: E[x^p] = {:.4} <= {:.4}? {}", probe.time, probe.mean_xp, probe.limit, probe.within);
        }
    }
    Ok(())
}
