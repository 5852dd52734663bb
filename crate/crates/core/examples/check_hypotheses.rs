//! Window hypotheses, long-run averages and classification.
//!
//! ```text
//! cargo run --example check_hypotheses
//! ```

use std::f64::consts::TAU;

use logistic_sde::cli::{default_route, EXPECTED};
use logistic_sde::hypotheses::{classify, classify_route, HypothesisReport, ScanParams};
use logistic_sde::{builtin_example, SystemSpec};

fn show(name: &str, report: &HypothesisReport) {
    println!("{name}");
    for (label, h) in [("H1", &report.h1), ("H2", &report.h2), ("H3", &report.h3)] {
        println!(
            "  {label}: inf {:>12.6} sup {:>12.6}  {:?}",
            h.inf_estimate, h.sup_estimate, h.verdict
        );
    }
    println!("  averages: r - sigma^2/2 = {:.4}, a = {:.4}", report.avg_rs, report.avg_a);
    println!("  => {:?} (by {:?})", report.classification, report.decided_by);
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scan = ScanParams {
        scan_end: 200.0,
        ..ScanParams::with_window(TAU)
    };

    for id in 1..=4 {
        let spec = builtin_example(id)?;
        let report = classify_route(&spec, &scan, 1e4, default_route(id))?;
        show(&format!("example {id} (expected {:?})", EXPECTED[id as usize - 1]), &report);
    }

    // A system of your own. Constant noise strong enough to beat the growth
    // rate drives the population to zero.
    let spec = SystemSpec::parse("1 + 0.5*sin(2*t)", "1", "1.6", "noisy")?;
    show("noisy constant-rate system", &classify(&spec, &scan, 1e4)?);

    // Example 3 is not periodic; with a 2π window H2 fails somewhere on
    // the scan, a window of 50 smooths the oscillation out.
    let spec = builtin_example(3)?;
    let wide = ScanParams { window: 50.0, ..scan };
    show("example 3, window 50", &classify(&spec, &wide, 1e4)?);
    Ok(())
}
