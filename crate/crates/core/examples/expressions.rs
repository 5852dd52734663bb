//! Parsing, evaluating and integrating coefficient expressions.
//!
//! ```text
//! cargo run --example expressions
//! ```

use std::f64::consts::TAU;

use logistic_sde::coeff::{long_run_average, parse_expr, window_integral, QuadratureParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = parse_expr("sin(t) + 2/3")?;
    let sigma = parse_expr("sqrt(cos(t) + 1)")?;
    println!("r(t)     = {r}");
    println!("sigma(t) = {sigma}");
    for t in [0.0, 1.0, 2.5] {
        println!("  r({t}) = {:.6}, sigma({t}) = {:.6}", r.eval(t)?, sigma.eval(t)?);
    }

    // Expressions compose with ordinary operators.
    let margin = r.clone() - sigma.clone() * sigma.clone() / 2.0;
    println!("r - sigma^2/2 = {margin}");

    let q = QuadratureParams::default();
    let one_period = window_integral(&margin, 3.0, TAU, &q)?;
    println!("integral over one period: {one_period:.10} (pi/3 = {:.10})", TAU / 6.0);
    println!("long-run average: {:.6}", long_run_average(&margin, 1e4, &q)?);

    // Errors carry the byte offset of the problem.
    for bad in ["sin(", "2 * * t", "foo(t)", "sin(t, 2)"] {
        match parse_expr(bad) {
            Ok(e) => println!("{bad:?} parsed as {e}"),
            Err(e) => println!("{bad:?}: {e}"),
        }
    }

    // Evaluation never yields NaN silently.
    let e = parse_expr("sqrt(t - 1)")?;
    println!("sqrt(t - 1) at t = 0: {}", e.eval(0.0).unwrap_err());
    Ok(())
}
