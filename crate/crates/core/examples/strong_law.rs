//! The noise integral M(t) = ∫σ dB grows slower than t.
//!
//! ```text
//! cargo run --release --example strong_law
//! ```

use logistic_sde::montecarlo::{lln_check, EnsembleConfig};
use logistic_sde::sde::SimConfig;
use logistic_sde::{builtin_example, SystemSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let systems = [
        ("example 1", builtin_example(1)?),
        ("unit noise", SystemSpec::constant(1.0, 1.0, 1.0)?),
    ];
    for t_end in [100.0, 1000.0] {
        for (name, spec) in &systems {
            let cfg = EnsembleConfig::new(SimConfig::new(0.5, 1e-3, t_end, 0), 100, 5, vec![]);
            let rep = lln_check(spec, &cfg)?;
            println!(
                "{name:<10} T={t_end:>6}: max |M(T)/T| = {:.4}, bound 4σ/√T = {:.4}, {:.0}% within -> {:?}",
                rep.max_ratio,
                rep.bound,
                100.0 * rep.fraction_within,
                rep.outcome
            );
        }
    }
    Ok(())
}
