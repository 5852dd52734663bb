//! One sample path with each integrator, written as CSV.
//!
//! ```text
//! cargo run --example simulate_path -- [out_dir]
//! ```

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use logistic_sde::builtin_example;
use logistic_sde::sde::{simulate, solve_deterministic, Scheme, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let spec = builtin_example(2)?;
    let cfg = SimConfig::new(0.5, 1e-3, 500.0, 42).with_stride(100);

    let log_em = simulate(&spec, &cfg)?;
    let direct = simulate(&spec, &cfg.with_scheme(Scheme::DirectEm))?;
    let ode = solve_deterministic(&spec, &cfg)?;

    for (name, tr) in [("log_em", &log_em), ("direct_em", &direct), ("rk4", &ode)] {
        let path = out_dir.join(format!("example2_{name}.csv"));
        tr.write_csv(BufWriter::new(File::create(&path)?))?;
        println!("{:<10} {} points, x(500) = {:.3e} -> {}", name, tr.len(), tr.final_state(), path.display());
    }
    if let Some(t) = direct.absorbed_at {
        println!("direct EM hit zero at t = {t}");
    }
    println!(
        "noise integral M(500) = {:.4}, M(500)/500 = {:.5}",
        log_em.noise_integral.last().unwrap(),
        log_em.noise_integral.last().unwrap() / 500.0
    );
    Ok(())
}
