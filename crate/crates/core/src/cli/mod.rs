//! Command-line front end: built-in systems, config files, subcommand
//! dispatch and result serialization.
//!
//! Exit codes: 0 success, 1 usage error, 2 config or parse error,
//! 3 validation or simulation failure, 4 a verification subcommand
//! returned Fail.

mod builtin;
mod config;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::coeff::CoeffError;
use crate::hypotheses::{self, Classification, HypothesisReport, Route, Verdict, WindowCheckResult};
use crate::montecarlo::{self, EnsembleStats, DEFAULT_EXTINCTION_THRESHOLD};
use crate::sde::{self, SimError};

pub use builtin::{builtin_example, default_route, EXAMPLES, EXPECTED};
pub use config::{load_config, parse_config, ConfigError, RunConfig, DEFAULT_AVG_HORIZON};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_FAIL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "logistic-sde",
    version,
    about = "Hypothesis checks and Monte Carlo experiments for the stochastic logistic equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the window hypotheses and long-run averages, then classify.
    Check(CheckArgs),
    /// Write one sample path as CSV (t,x,M).
    Simulate(SimulateArgs),
    /// Ensemble statistics at probe times.
    Ensemble(EnsembleArgs),
    /// Compare ensemble moments with the comparison-equation bound.
    MomentBound(MomentArgs),
    /// Coupled pairs from two initial values.
    Attract(AttractArgs),
    /// Strong-law check for M(t)/t.
    Lln(LlnArgs),
    /// Classify the four built-in systems and compare with the expected table.
    ExamplesVerify(VerifyArgs),
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// Run configuration file.
    #[arg(long, group = "source")]
    config: Option<PathBuf>,
    /// Built-in system 1-4.
    #[arg(long, group = "source", value_parser = clap::value_parser!(u32).range(1..=4))]
    example: Option<u32>,
}

#[derive(Debug, Args)]
struct Common {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RouteArg {
    Auto,
    Windows,
    Averages,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Auto => Route::Auto,
            RouteArg::Windows => Route::Windows,
            RouteArg::Averages => Route::Averages,
        }
    }
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Window length for the H1/H2/H3 integrals.
    #[arg(long)]
    window: Option<f64>,
    #[arg(long)]
    scan_start: Option<f64>,
    #[arg(long)]
    scan_end: Option<f64>,
    #[arg(long)]
    scan_step: Option<f64>,
    #[arg(long)]
    margin: Option<f64>,
    /// Simpson panel width.
    #[arg(long)]
    quad_step: Option<f64>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    scan: ScanArgs,
    /// Horizon of the long-run averages.
    #[arg(long)]
    avg_horizon: Option<f64>,
    #[arg(long, value_enum)]
    route: Option<RouteArg>,
}

#[derive(Debug, Args)]
struct SimArgs {
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    LogEm,
    DirectEm,
    Rk4,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    sim: SimArgs,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Store every k-th step.
    #[arg(long)]
    stride: Option<usize>,
}

#[derive(Debug, Args)]
struct PathsArgs {
    /// Number of paths.
    #[arg(long)]
    paths: Option<usize>,
    /// Comma-separated probe times.
    #[arg(long, value_delimiter = ',')]
    probe: Option<Vec<f64>>,
    /// Run paths one after another instead of in parallel.
    #[arg(long)]
    serial: bool,
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    sim: SimArgs,
    #[command(flatten)]
    paths: PathsArgs,
    /// Comma-separated moment orders.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    p: Vec<f64>,
    /// Lower permanence threshold m.
    #[arg(long)]
    lower: Option<f64>,
    /// Upper permanence threshold M.
    #[arg(long)]
    upper: Option<f64>,
    /// Extinction threshold.
    #[arg(long, default_value_t = DEFAULT_EXTINCTION_THRESHOLD)]
    eps_ext: f64,
    /// Also dump per-path probe states to this CSV file.
    #[arg(long)]
    paths_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MomentArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    sim: SimArgs,
    #[command(flatten)]
    paths: PathsArgs,
    #[command(flatten)]
    scan: ScanArgs,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 0.10)]
    slack: f64,
}

#[derive(Debug, Args)]
struct AttractArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    paths: PathsArgs,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Initial value of the first path.
    #[arg(long, default_value_t = 0.2)]
    x0: f64,
    /// Initial value of the second path.
    #[arg(long, default_value_t = 2.0)]
    y0: f64,
    /// Gap tolerance.
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,
    /// Required share of pairs below the tolerance.
    #[arg(long, default_value_t = 0.95)]
    min_fraction: f64,
}

#[derive(Debug, Args)]
struct LlnArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    sim: SimArgs,
    #[command(flatten)]
    paths: PathsArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    scan: ScanArgs,
    #[arg(long)]
    avg_horizon: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Config(String),
    Validation(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Validation(_) | Failure::Io(_) => EXIT_VALIDATION,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Validation(m) | Failure::Io(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        if e.is_parse_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<CoeffError> for Failure {
    fn from(e: CoeffError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Check(a) => cmd_check(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Ensemble(a) => cmd_ensemble(a, out),
        Command::MomentBound(a) => cmd_moment(a, out),
        Command::Attract(a) => cmd_attract(a, out),
        Command::Lln(a) => cmd_lln(a, out),
        Command::ExamplesVerify(a) => cmd_verify(a, out),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAIL,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn load(source: &Source) -> Result<RunConfig, Failure> {
    match (&source.config, source.example) {
        (Some(path), _) => Ok(load_config(path)?),
        (None, Some(id)) => Ok(RunConfig::for_example(id)?),
        (None, None) => unreachable!("clap requires one source"),
    }
}

fn apply_scan(cfg: &mut RunConfig, s: &ScanArgs) {
    let scan = &mut cfg.scan;
    scan.window = s.window.unwrap_or(scan.window);
    scan.scan_start = s.scan_start.unwrap_or(scan.scan_start);
    scan.scan_end = s.scan_end.unwrap_or(scan.scan_end);
    scan.scan_step = s.scan_step.unwrap_or(scan.scan_step);
    scan.margin = s.margin.unwrap_or(scan.margin);
    scan.quad.step = s.quad_step.unwrap_or(scan.quad.step);
}

/// Applies sim flags; a changed `dt` or `t_end` recomputes the stride.
fn apply_sim(cfg: &mut RunConfig, s: &SimArgs, seed: Option<u64>) {
    let old = cfg.sim;
    let x0 = s.x0.unwrap_or(old.x0);
    let dt = s.dt.unwrap_or(old.dt);
    let t_end = s.t_end.unwrap_or(old.t_end);
    let mut sim = if s.dt.is_some() || s.t_end.is_some() {
        sde::SimConfig::new(x0, dt, t_end, old.seed).with_scheme(old.scheme)
    } else {
        sde::SimConfig { x0, ..old }
    };
    if let Some(seed) = seed {
        sim.seed = seed;
        cfg.ensemble.master_seed = seed;
    }
    cfg.sim = sim;
    cfg.ensemble.base = sim;
    if s.t_end.is_some() {
        cfg.ensemble.probe_times.retain(|&t| t <= t_end);
        if cfg.ensemble.probe_times.is_empty() {
            cfg.ensemble.probe_times.push(t_end);
        }
    }
}

fn apply_paths(cfg: &mut RunConfig, p: &PathsArgs) {
    if let Some(n) = p.paths {
        cfg.ensemble.n_paths = n;
    }
    if let Some(probe) = &p.probe {
        cfg.ensemble.probe_times = probe.clone();
    }
    if p.serial {
        cfg.ensemble.parallel = false;
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, json: bool, text: String, doc: &impl Serialize) -> Result<(), Failure> {
    let rendered = serde_json::to_string_pretty(doc).expect("report serializes") + "\n";
    if let Some(path) = path {
        fs::write(path, &rendered).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    if json {
        out.write_all(rendered.as_bytes())?;
    } else {
        out.write_all(text.as_bytes())?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct CheckJson {
    inf: f64,
    sup: f64,
    verdict: Verdict,
}

impl From<&WindowCheckResult> for CheckJson {
    fn from(r: &WindowCheckResult) -> Self {
        Self {
            inf: r.inf_estimate,
            sup: r.sup_estimate,
            verdict: r.verdict,
        }
    }
}

/// Flat JSON form of a [`HypothesisReport`].
#[derive(Debug, Serialize)]
pub struct ReportJson {
    h1: CheckJson,
    h2: CheckJson,
    h3: CheckJson,
    avg_rs: f64,
    avg_a: f64,
    classification: Classification,
}

impl From<&HypothesisReport> for ReportJson {
    fn from(r: &HypothesisReport) -> Self {
        Self {
            h1: (&r.h1).into(),
            h2: (&r.h2).into(),
            h3: (&r.h3).into(),
            avg_rs: r.avg_rs,
            avg_a: r.avg_a,
            classification: r.classification,
        }
    }
}

/// JSON text of a hypothesis report.
pub fn report_json(report: &HypothesisReport) -> String {
    serde_json::to_string_pretty(&ReportJson::from(report)).expect("report serializes")
}

fn report_text(label: &str, window: f64, horizon: f64, r: &HypothesisReport) -> String {
    let line = |name: &str, c: &WindowCheckResult| {
        format!(
            "{name}  inf={:.10}  sup={:.10}  {:?}\n",
            c.inf_estimate, c.sup_estimate, c.verdict
        )
    };
    let mut s = format!("system: {label}\nwindow: {window}\n");
    s += &line("H1", &r.h1);
    s += &line("H2", &r.h2);
    s += &line("H3", &r.h3);
    s += &format!("avg(r - sigma^2/2) over [0, {horizon}] = {:.6}\n", r.avg_rs);
    s += &format!("avg(a) over [0, {horizon}] = {:.6}\n", r.avg_a);
    let by = match r.decided_by {
        Route::Averages => "averages",
        _ => "windows",
    };
    s += &format!("classification: {:?} (by {by})\n", r.classification);
    s
}

fn cmd_check(a: CheckArgs, out: &mut dyn Write) -> Outcome {
    let mut cfg = load(&a.common.source)?;
    apply_scan(&mut cfg, &a.scan);
    cfg.avg_horizon = a.avg_horizon.unwrap_or(cfg.avg_horizon);
    if let Some(route) = a.route {
        cfg.route = route.into();
    }
    cfg.validate()?;
    let report = hypotheses::classify_route(&cfg.spec, &cfg.scan, cfg.avg_horizon, cfg.route)?;
    let text = report_text(cfg.spec.label(), cfg.scan.window, cfg.avg_horizon, &report);
    emit(out, a.common.out.as_deref(), a.common.json, text, &ReportJson::from(&report))?;
    Ok(true)
}

#[derive(Debug, Serialize)]
struct TrajectoryJson<'a> {
    method: sde::Method,
    seed: u64,
    absorbed_at: Option<f64>,
    t: &'a [f64],
    x: &'a [f64],
    #[serde(rename = "M")]
    m: &'a [f64],
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> Outcome {
    let mut cfg = load(&a.common.source)?;
    apply_sim(&mut cfg, &a.sim, a.common.seed);
    if let Some(stride) = a.stride {
        cfg.sim.record_stride = stride;
    }
    let tr = match a.scheme {
        Some(SchemeArg::Rk4) => sde::solve_deterministic(&cfg.spec, &cfg.sim)?,
        Some(SchemeArg::DirectEm) => sde::simulate(&cfg.spec, &cfg.sim.with_scheme(sde::Scheme::DirectEm))?,
        Some(SchemeArg::LogEm) => sde::simulate(&cfg.spec, &cfg.sim.with_scheme(sde::Scheme::LogEm))?,
        None => sde::simulate(&cfg.spec, &cfg.sim)?,
    };
    let mut csv = Vec::new();
    tr.write_csv(&mut csv)?;
    if let Some(path) = &a.common.out {
        fs::write(path, &csv).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    if a.common.json {
        let doc = TrajectoryJson {
            method: tr.method,
            seed: tr.seed,
            absorbed_at: tr.absorbed_at,
            t: &tr.times,
            x: &tr.states,
            m: &tr.noise_integral,
        };
        out.write_all((serde_json::to_string(&doc).expect("serializes") + "\n").as_bytes())?;
    } else if a.common.out.is_none() {
        out.write_all(&csv)?;
    } else {
        writeln!(
            out,
            "wrote {} points to {}, x(T)={}",
            tr.len(),
            a.common.out.as_ref().expect("checked").display(),
            tr.final_state()
        )?;
    }
    Ok(true)
}

#[derive(Debug, Serialize)]
struct ProbeJson {
    time: f64,
    mean_xp: Vec<f64>,
    quantiles: montecarlo::Quantiles,
    lower: f64,
    upper: f64,
    tail_above_lower: f64,
    tail_below_upper: f64,
    extinction_threshold: f64,
    extinct_fraction: f64,
}

#[derive(Debug, Serialize)]
struct EnsembleJson {
    label: String,
    n_paths: usize,
    failed_paths: usize,
    master_seed: u64,
    p_values: Vec<f64>,
    lln_stat: f64,
    probes: Vec<ProbeJson>,
}

fn ensemble_json(label: &str, seed: u64, stats: &EnsembleStats, lower: Option<f64>, upper: Option<f64>, eps: f64) -> EnsembleJson {
    EnsembleJson {
        label: label.to_string(),
        n_paths: stats.n_paths,
        failed_paths: stats.failed_paths,
        master_seed: seed,
        p_values: stats.p_values.clone(),
        lln_stat: stats.lln_stat,
        probes: stats
            .probes
            .iter()
            .map(|p| {
                // without explicit thresholds, use the 1% / 99% quantiles
                let m = lower.unwrap_or(p.quantiles.q01);
                let big_m = upper.unwrap_or(p.quantiles.q99);
                ProbeJson {
                    time: p.time,
                    mean_xp: p.mean_xp.clone(),
                    quantiles: p.quantiles,
                    lower: m,
                    upper: big_m,
                    tail_above_lower: p.tail_above(m),
                    tail_below_upper: p.tail_below(big_m),
                    extinction_threshold: eps,
                    extinct_fraction: p.extinct_fraction(eps),
                }
            })
            .collect(),
    }
}

fn cmd_ensemble(a: EnsembleArgs, out: &mut dyn Write) -> Outcome {
    let mut cfg = load(&a.common.source)?;
    apply_sim(&mut cfg, &a.sim, a.common.seed);
    apply_paths(&mut cfg, &a.paths);
    cfg.validate()?;
    let records = montecarlo::run_paths(&cfg.spec, &cfg.ensemble)?;
    if let Some(path) = &a.paths_csv {
        let file = fs::File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        montecarlo::write_paths_csv(&records, &cfg.ensemble.probe_times, std::io::BufWriter::new(file))?;
    }
    let stats = montecarlo::summarize(&records, &cfg.ensemble, &a.p);
    let doc = ensemble_json(cfg.spec.label(), cfg.ensemble.master_seed, &stats, a.lower, a.upper, a.eps_ext);
    let mut text = format!(
        "system: {}\npaths: {} ({} failed)\nmax |M(T)/T| = {:.6}\n",
        doc.label, doc.n_paths, doc.failed_paths, doc.lln_stat
    );
    for p in &doc.probes {
        let q = p.quantiles;
        text += &format!(
            "t={}: q01={:.6} q50={:.6} q99={:.6} E[x^p]={:?} P(x>={:.4})={:.3} P(x<={:.4})={:.3} P(x<{})={:.3}\n",
            p.time, q.q01, q.q50, q.q99, p.mean_xp, p.lower, p.tail_above_lower, p.upper,
            p.tail_below_upper, p.extinction_threshold, p.extinct_fraction
        );
    }
    emit(out, a.common.out.as_deref(), a.common.json, text, &doc)?;
    Ok(!stats.too_many_failures())
}

fn cmd_moment(a: MomentArgs, out: &mut dyn Write) -> Outcome {
    let mut cfg = load(&a.common.source)?;
    apply_scan(&mut cfg, &a.scan);
    apply_sim(&mut cfg, &a.sim, a.common.seed);
    apply_paths(&mut cfg, &a.paths);
    cfg.validate()?;
    let rep = montecarlo::verify_moment_bound(&cfg.spec, &cfg.ensemble, a.p, a.slack, &cfg.scan)?;
    let mut text = format!(
        "system: {}\np={}  z_max={:.6}  bound z_max^p={:.6}  slack={}\nH1: {:?}{}\n",
        cfg.spec.label(),
        rep.p,
        rep.z_max,
        rep.bound,
        rep.slack,
        rep.h1,
        if rep.advisory { " (result is advisory)" } else { "" }
    );
    for p in &rep.probes {
        text += &format!("t={}: E[x^p]={:.6} <= {:.6}: {}\n", p.time, p.mean_xp, p.limit, p.within);
    }
    text += &format!("{:?}\n", rep.outcome);
    emit(out, a.common.out.as_deref(), a.common.json, text, &rep)?;
    Ok(rep.outcome.passed())
}

#[derive(Debug, Serialize)]
struct AttractJson {
    n_pairs: usize,
    failed_pairs: usize,
    x0: f64,
    y0: f64,
    t_end: f64,
    tol: f64,
    fraction_below: f64,
    max_gap: f64,
    final_gaps: Vec<f64>,
}

fn cmd_attract(a: AttractArgs, out: &mut dyn Write) -> Outcome {
    let mut cfg = load(&a.common.source)?;
    let sim = SimArgs {
        x0: None,
        dt: a.dt,
        t_end: a.t_end,
    };
    apply_sim(&mut cfg, &sim, a.common.seed);
    apply_paths(&mut cfg, &a.paths);
    cfg.ensemble.probe_times.clear();
    cfg.validate()?;
    let res = montecarlo::attractivity_experiment(&cfg.spec, &cfg.ensemble, a.x0, a.y0)?;
    let frac = res.fraction_below(a.tol);
    let doc = AttractJson {
        n_pairs: res.n_pairs,
        failed_pairs: res.failed_pairs,
        x0: a.x0,
        y0: a.y0,
        t_end: cfg.sim.t_end,
        tol: a.tol,
        fraction_below: frac,
        max_gap: res.max_gap(),
        final_gaps: res.final_gaps.clone(),
    };
    let ok = frac >= a.min_fraction && res.failed_pairs as f64 <= montecarlo::MAX_FAILURE_RATE * res.n_pairs as f64;
    let text = format!(
        "system: {}\npairs: {} ({} failed) from ({}, {}) to T={}\nfraction with gap < {}: {:.4} (need {})\nmax gap: {:.3e}\n{}\n",
        cfg.spec.label(),
        doc.n_pairs,
        doc.failed_pairs,
        doc.x0,
        doc.y0,
        doc.t_end,
        doc.tol,
        frac,
        a.min_fraction,
        doc.max_gap,
        if ok { "Pass" } else { "Fail" }
    );
    emit(out, a.common.out.as_deref(), a.common.json, text, &doc)?;
    Ok(ok)
}

fn cmd_lln(a: LlnArgs, out: &mut dyn Write) -> Outcome {
    let mut cfg = load(&a.common.source)?;
    apply_sim(&mut cfg, &a.sim, a.common.seed);
    apply_paths(&mut cfg, &a.paths);
    cfg.ensemble.probe_times.clear();
    cfg.validate()?;
    let rep = montecarlo::lln_check(&cfg.spec, &cfg.ensemble)?;
    let text = format!(
        "system: {}\nT={}  sup|sigma|={:.6}  bound 4*sup|sigma|/sqrt(T)={:.6}\nmax |M(T)/T| = {:.6}\nwithin bound: {:.4}\n{:?}\n",
        cfg.spec.label(),
        cfg.sim.t_end,
        rep.sigma_sup,
        rep.bound,
        rep.max_ratio,
        rep.fraction_within,
        rep.outcome
    );
    emit(out, a.common.out.as_deref(), a.common.json, text, &rep)?;
    Ok(rep.outcome.passed())
}

#[derive(Debug, Serialize)]
struct VerifyRow {
    example: u32,
    expected: Classification,
    report: ReportJson,
    decided_by: Route,
    matches: bool,
}

/// Classifies built-in example `id` with its default route.
pub fn classify_builtin(
    id: u32,
    scan: &hypotheses::ScanParams,
    horizon: f64,
) -> Result<HypothesisReport, CoeffError> {
    let spec = builtin_example(id)?;
    hypotheses::classify_route(&spec, scan, horizon, default_route(id))
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Outcome {
    let mut cfg = RunConfig::for_example(1)?;
    apply_scan(&mut cfg, &a.scan);
    let horizon = a.avg_horizon.unwrap_or(DEFAULT_AVG_HORIZON);
    cfg.avg_horizon = horizon;
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut text = String::new();
    for id in 1..=4u32 {
        let report = classify_builtin(id, &cfg.scan, horizon)?;
        let expected = EXPECTED[id as usize - 1];
        let matches = report.classification == expected;
        text += &format!(
            "example {id}: {:?} (expected {:?}, by {}) {}\n",
            report.classification,
            expected,
            if report.decided_by == Route::Averages { "averages" } else { "windows" },
            if matches { "ok" } else { "MISMATCH" }
        );
        rows.push(VerifyRow {
            example: id,
            expected,
            report: ReportJson::from(&report),
            decided_by: report.decided_by,
            matches,
        });
    }
    let ok = rows.iter().all(|r| r.matches);
    emit(out, a.out.as_deref(), a.json, text, &rows)?;
    Ok(ok)
}
