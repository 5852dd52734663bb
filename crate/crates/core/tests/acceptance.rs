//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runtime limits are part of each criterion.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use logistic_sde::builtin_example;
use logistic_sde::cli;
use logistic_sde::coeff::{window_integral, QuadratureParams, SystemSpec};
use logistic_sde::hypotheses::{check_avg_criteria, check_h2, ScanParams};
use logistic_sde::montecarlo::{
    attractivity_experiment, lln_check, run_ensemble, verify_moment_bound, EnsembleConfig,
};
use logistic_sde::sde::{simulate_log_em, solve_deterministic, SimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn criterion<F>(id: u32, name: &str, limit: Option<Duration>, f: F) -> bool
where
    F: FnOnce() -> Result<Outcome, String>,
{
    let start = Instant::now();
    let res = f();
    let elapsed = start.elapsed();
    let (mut ok, mut detail) = match res {
        Ok(o) => (o.ok, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let timing = match limit {
        Some(l) => {
            if elapsed > l {
                ok = false;
                detail += "; runtime limit exceeded";
            }
            format!("{:.2}s / limit {:.0}s", elapsed.as_secs_f64(), l.as_secs_f64())
        }
        None => format!("{:.2}s", elapsed.as_secs_f64()),
    };
    println!(
        "criterion {id:>2} [{}] {name}: {detail} ({timing})",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn example(id: u32) -> Result<SystemSpec, String> {
    builtin_example(id).map_err(|e| e.to_string())
}

fn quadrature_oracle() -> Result<Outcome, String> {
    let spec = example(1)?;
    let q = QuadratureParams::default();
    let rs = spec.growth_margin();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_a = 0.0f64;
    let mut worst_rs = 0.0f64;
    for _ in 0..100 {
        let t: f64 = rng.random_range(0.0..100.0);
        let va = window_integral(spec.a(), t, TAU, &q).map_err(|e| e.to_string())?;
        let vr = window_integral(&rs, t, TAU, &q).map_err(|e| e.to_string())?;
        worst_a = worst_a.max((va - TAU).abs());
        worst_rs = worst_rs.max((vr - PI / 3.0).abs());
    }
    Ok(outcome(
        worst_a < 1e-8 && worst_rs < 1e-8,
        format!("max |∫a - 2π| = {worst_a:.2e}, max |∫(r-σ²/2) - π/3| = {worst_rs:.2e}"),
    ))
}

fn example_two_window() -> Result<Outcome, String> {
    let spec = example(2)?;
    let scan = ScanParams::default();
    let h2 = check_h2(&spec, &scan).map_err(|e| e.to_string())?;
    let worst = h2.inf_estimate.abs().max(h2.sup_estimate.abs());
    Ok(outcome(
        worst < 1e-8,
        format!(
            "max |∫(r-σ²/2)| over t in [{}, {}] step {} = {worst:.2e}",
            scan.scan_start, scan.scan_end, scan.scan_step
        ),
    ))
}

fn average_criteria() -> Result<Outcome, String> {
    let q = QuadratureParams::default();
    let (rs3, a3) = check_avg_criteria(&example(3)?, 1e4, &q).map_err(|e| e.to_string())?;
    let (rs4, a4) = check_avg_criteria(&example(4)?, 1e4, &q).map_err(|e| e.to_string())?;
    let ok = (rs3 - 1.0 / 6.0).abs() <= 0.01
        && (a3 - 2.0).abs() <= 0.01
        && (rs4 + 1.0 / 6.0).abs() <= 0.01
        && (a4 - 2.0).abs() <= 0.01;
    Ok(outcome(
        ok,
        format!("example 3 ({rs3:.5}, {a3:.5}), example 4 ({rs4:.5}, {a4:.5})"),
    ))
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("logistic-sde").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned() + &String::from_utf8_lossy(&err))
}

fn classification_table() -> Result<Outcome, String> {
    let (code, text) = run_cli(&["examples-verify", "--json"]);
    let rows: serde_json::Value = serde_json::from_str(&text).map_err(|e| format!("{e}: {text}"))?;
    let got: Vec<String> = rows
        .as_array()
        .ok_or("expected a JSON array")?
        .iter()
        .map(|r| r["report"]["classification"].as_str().unwrap_or("?").to_string())
        .collect();
    let want = ["Permanent", "Extinct", "Permanent", "Extinct"];
    Ok(outcome(
        code == 0 && got == want,
        format!("exit {code}, table {got:?}"),
    ))
}

fn positivity() -> Result<Outcome, String> {
    let cfg = SimConfig::new(0.5, 1e-3, 200.0, 0).with_stride(1);
    let specs: Vec<SystemSpec> = (1..=4).map(example).collect::<Result<_, _>>()?;
    let bad: Result<Vec<usize>, String> = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let spec = &specs[(i % 4) as usize];
            let tr = simulate_log_em(spec, &cfg.with_seed(1000 + i)).map_err(|e| e.to_string())?;
            Ok(tr.states.iter().filter(|&&x| x <= 0.0 || x.is_nan()).count())
        })
        .collect();
    let total: usize = bad?.iter().sum();
    Ok(outcome(
        total == 0,
        format!("1000 paths x 200001 states, {total} non-positive"),
    ))
}

fn deterministic_equivalence() -> Result<Outcome, String> {
    let spec = SystemSpec::constant(2.0, 1.0, 0.0).map_err(|e| e.to_string())?;
    let x0 = 0.5;
    let closed = |t: f64| 2.0 * x0 * (2.0 * t).exp() / (2.0 + x0 * ((2.0 * t).exp() - 1.0));
    let sup_err = |cfg: &SimConfig, log_em: bool| -> Result<f64, String> {
        let tr = if log_em {
            simulate_log_em(&spec, cfg)
        } else {
            solve_deterministic(&spec, cfg)
        }
        .map_err(|e| e.to_string())?;
        Ok(tr
            .times
            .iter()
            .zip(&tr.states)
            .map(|(&t, &x)| (x - closed(t)).abs())
            .fold(0.0, f64::max))
    };
    let em = sup_err(&SimConfig::new(x0, 1e-4, 10.0, 0).with_stride(1), true)?;
    let rk = sup_err(&SimConfig::new(x0, 1e-3, 10.0, 0).with_stride(1), false)?;
    Ok(outcome(
        em < 1e-3 && rk < 1e-8,
        format!("LogEM dt=1e-4 sup error {em:.2e}, RK4 dt=1e-3 sup error {rk:.2e}"),
    ))
}

fn moment_bound() -> Result<Outcome, String> {
    let spec = example(1)?;
    let cfg = EnsembleConfig::new(SimConfig::new(0.5, 1e-3, 200.0, 0), 500, 7, vec![50.0, 100.0, 200.0]);
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [1.0, 2.0] {
        let rep = verify_moment_bound(&spec, &cfg, p, 0.10, &ScanParams::default()).map_err(|e| e.to_string())?;
        ok &= rep.outcome.passed();
        let means: Vec<String> = rep.probes.iter().map(|pr| format!("{:.4}", pr.mean_xp)).collect();
        parts.push(format!(
            "p={p}: E[x^p] at 50/100/200 = [{}] vs limit {:.4}",
            means.join(", "),
            rep.bound * 1.10
        ));
    }
    Ok(outcome(ok, parts.join("; ")))
}

fn extinction() -> Result<Outcome, String> {
    let mut ok = true;
    let mut parts = Vec::new();
    for id in [2, 4] {
        let cfg = EnsembleConfig::new(SimConfig::new(0.5, 1e-3, 500.0, 0), 200, 11, vec![500.0]);
        let stats = run_ensemble(&example(id)?, &cfg, &[]).map_err(|e| e.to_string())?;
        let f = stats.probes[0].extinct_fraction(1e-3);
        ok &= f >= 0.95 && !stats.too_many_failures();
        parts.push(format!(
            "example {id}: extinct fraction {f:.3} ({} failed paths)",
            stats.failed_paths
        ));
    }
    Ok(outcome(ok, parts.join("; ")))
}

fn permanence() -> Result<Outcome, String> {
    let spec = example(1)?;
    let pilot_cfg = EnsembleConfig::new(SimConfig::new(0.5, 1e-3, 100.0, 0), 200, 21, vec![100.0]);
    let pilot = run_ensemble(&spec, &pilot_cfg, &[]).map_err(|e| e.to_string())?;
    let m = pilot.probes[0].quantiles.q01;
    let big_m = pilot.probes[0].quantiles.q99;
    let cfg = EnsembleConfig::new(SimConfig::new(0.5, 1e-3, 500.0, 0), 200, 22, vec![500.0]);
    let fresh = run_ensemble(&spec, &cfg, &[]).map_err(|e| e.to_string())?;
    let above = fresh.probes[0].tail_above(m);
    let below = fresh.probes[0].tail_below(big_m);
    Ok(outcome(
        above >= 0.9 && below >= 0.9 && !fresh.too_many_failures() && !pilot.too_many_failures(),
        format!("m={m:.3e}, M={big_m:.4}; at T=500 P(x>=m)={above:.3}, P(x<=M)={below:.3}"),
    ))
}

fn attractivity() -> Result<Outcome, String> {
    let cfg = EnsembleConfig::new(SimConfig::new(0.2, 1e-3, 200.0, 0), 100, 31, vec![]);
    let res = attractivity_experiment(&example(1)?, &cfg, 0.2, 2.0).map_err(|e| e.to_string())?;
    let f = res.fraction_below(1e-2);
    Ok(outcome(
        f >= 0.95 && res.failed_pairs == 0,
        format!("fraction below 1e-2: {f:.3}, max gap {:.2e}", res.max_gap()),
    ))
}

fn strong_law() -> Result<Outcome, String> {
    let cfg = EnsembleConfig::new(SimConfig::new(0.5, 1e-3, 1000.0, 0), 200, 41, vec![]);
    let rep = lln_check(&example(1)?, &cfg).map_err(|e| e.to_string())?;
    Ok(outcome(
        rep.outcome.passed(),
        format!(
            "fraction within {:.3} (bound {:.4}, max |M(T)/T| {:.4})",
            rep.fraction_within, rep.bound, rep.max_ratio
        ),
    ))
}

fn reproducibility() -> Result<Outcome, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [(&str, Vec<&str>); 7] = [
        ("check", vec!["check", "--example", "1", "--scan-end", "100", "--avg-horizon", "1000"]),
        ("simulate", vec!["simulate", "--example", "2", "--x0", "0.5", "--t-end", "50", "--seed", "42"]),
        (
            "ensemble",
            vec!["ensemble", "--example", "1", "--t-end", "20", "--paths", "50", "--probe", "10,20", "--seed", "3"],
        ),
        (
            "moment-bound",
            vec![
                "moment-bound", "--example", "1", "--t-end", "40", "--paths", "40", "--probe", "20,40",
                "--p", "2", "--seed", "4", "--scan-end", "50",
            ],
        ),
        ("attract", vec!["attract", "--example", "1", "--t-end", "30", "--paths", "30", "--seed", "5"]),
        ("lln", vec!["lln", "--example", "1", "--t-end", "100", "--paths", "30", "--seed", "6"]),
        ("examples-verify", vec!["examples-verify", "--scan-end", "100", "--avg-horizon", "1000"]),
    ];
    let mut mismatched = Vec::new();
    for (name, args) in &runs {
        let mut files = Vec::new();
        for rep in 0..2 {
            let path = dir.path().join(format!("{name}-{rep}.out"));
            let p = path.to_str().ok_or("non-UTF-8 temp path")?.to_string();
            let mut full: Vec<&str> = args.clone();
            full.extend(["--json", "--out", &p]);
            let (code, text) = run_cli(&full);
            if code != 0 && code != 4 {
                return Err(format!("{name} exited with {code}: {text}"));
            }
            files.push(fs::read(&path).map_err(|e| format!("{name}: {e}"))?);
        }
        if files[0] != files[1] || files[0].is_empty() {
            mismatched.push(*name);
        }
    }

    let spec = example(1)?;
    let cfg = EnsembleConfig::new(SimConfig::new(0.5, 1e-3, 50.0, 0), 64, 9, vec![10.0, 25.0, 50.0]);
    let par = run_ensemble(&spec, &cfg, &[1.0, 2.0]).map_err(|e| e.to_string())?;
    let ser = run_ensemble(&spec, &cfg.clone().serial(), &[1.0, 2.0]).map_err(|e| e.to_string())?;
    let same = serde_json::to_string(&par).ok() == serde_json::to_string(&ser).ok() && par == ser;
    Ok(outcome(
        mismatched.is_empty() && same,
        format!(
            "{} subcommands byte-identical{}, serial == parallel stats: {same}",
            runs.len() - mismatched.len(),
            if mismatched.is_empty() {
                String::new()
            } else {
                format!(" (differing: {mismatched:?})")
            }
        ),
    ))
}

fn log_identity() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst_ratio = 0.0f64;
    let mut ok = true;
    for i in 0..20u32 {
        let id = i % 4 + 1;
        let spec = example(id)?;
        let x0 = rng.random_range(0.05..3.0);
        let cfg = SimConfig::new(x0, 1e-3, 50.0, rng.random()).with_stride(1);
        let tr = simulate_log_em(&spec, &cfg).map_err(|e| e.to_string())?;
        let mut acc = 0.0;
        for k in 0..tr.len() - 1 {
            let t = tr.times[k];
            let ev = |e: &logistic_sde::coeff::CoeffExpr| e.eval(t).map_err(|e| e.to_string());
            let (r, a, s) = (ev(spec.r())?, ev(spec.a())?, ev(spec.sigma())?);
            let lhs = tr.states[k + 1].ln() - tr.states[k].ln();
            let rhs = (r - 0.5 * s * s - a * tr.states[k]) * cfg.dt + (tr.noise_integral[k + 1] - tr.noise_integral[k]);
            acc += (lhs - rhs).abs();
        }
        let steps = (tr.len() - 1) as f64;
        ok &= acc < 1e-9 * steps;
        worst_ratio = worst_ratio.max(acc / steps);
    }
    Ok(outcome(
        ok,
        format!("worst accumulated error per step {worst_ratio:.2e} (limit 1e-9)"),
    ))
}

fn main() -> ExitCode {
    // libtest-style flags from `cargo test` are ignored.
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |id: u32| filter.is_empty() || filter.contains(&id);

    type Check = fn() -> Result<Outcome, String>;
    let all: [(u32, &str, Option<Duration>, Check); 13] = [
        (1, "quadrature oracle", secs(1), quadrature_oracle),
        (2, "example 2 window integral", secs(1), example_two_window),
        (3, "average criteria", secs(10), average_criteria),
        (4, "classification table", secs(30), classification_table),
        (5, "positivity", secs(120), positivity),
        (6, "deterministic equivalence", None, deterministic_equivalence),
        (7, "moment bound", secs(300), moment_bound),
        (8, "extinction", secs(300), extinction),
        (9, "permanence probes", secs(300), permanence),
        (10, "attractivity", secs(180), attractivity),
        (11, "strong law", secs(180), strong_law),
        (12, "reproducibility", None, reproducibility),
        (13, "log identity", None, log_identity),
    ];
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, limit, f) in all {
        if wanted(id) {
            ran += 1;
            if !criterion(id, name, limit, f) {
                failed += 1;
            }
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
