//! Path ensembles and the statistics used to probe moment bounds,
//! permanence, extinction, attractivity and the strong law for `M(t)/t`.
//!
//! Path `i` is driven by the seed `mix_seed(master_seed, i)`; `base.seed` is
//! not used. Paths may run in parallel, but results are always reduced in
//! path-index order, so serial and parallel runs are bit-identical.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff::{self, SystemSpec};
use crate::hypotheses::{self, ScanParams, Verdict};
use crate::sde::{self, log_em_path, mix_seed, CoeffTable, PathOutcome, SimConfig, SimError};

/// Quantile levels reported at every probe time.
pub const QUANTILE_LEVELS: [f64; 5] = [0.01, 0.05, 0.5, 0.95, 0.99];

/// Largest tolerated share of failed paths.
pub const MAX_FAILURE_RATE: f64 = 0.01;

/// Probe times before this are ignored by [`verify_moment_bound`].
pub const MOMENT_BURN_IN: f64 = 20.0;

pub const DEFAULT_EXTINCTION_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleConfig {
    pub base: SimConfig,
    pub n_paths: usize,
    pub master_seed: u64,
    pub probe_times: Vec<f64>,
    /// Run paths on the rayon pool. Does not change any result.
    pub parallel: bool,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            base: SimConfig::default(),
            n_paths: 200,
            master_seed: 0,
            probe_times: vec![100.0, 500.0],
            parallel: true,
        }
    }
}

impl EnsembleConfig {
    pub fn new(base: SimConfig, n_paths: usize, master_seed: u64, probe_times: Vec<f64>) -> Self {
        Self {
            base,
            n_paths,
            master_seed,
            probe_times,
            parallel: true,
        }
    }

    pub fn serial(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.base.validate()?;
        if self.n_paths == 0 {
            return Err(SimError::InvalidConfig("n_paths must be at least 1".into()));
        }
        for &t in &self.probe_times {
            if !(0.0..=self.base.t_end).contains(&t) {
                return Err(SimError::InvalidConfig(format!(
                    "probe time {t} outside [0, {}]",
                    self.base.t_end
                )));
            }
            self.base.step_index(t)?;
        }
        Ok(())
    }

    fn probe_steps(&self) -> Result<Vec<usize>, SimError> {
        self.probe_times.iter().map(|&t| self.base.step_index(t)).collect()
    }
}

/// One ensemble member as kept for per-path output.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub index: usize,
    pub seed: u64,
    pub outcome: Result<PathSummary, SimError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSummary {
    pub probes: Vec<f64>,
    pub final_state: f64,
    /// `M(T)` at `T = t_end`.
    pub final_noise: f64,
}

impl From<PathOutcome> for PathSummary {
    fn from(o: PathOutcome) -> Self {
        Self {
            probes: o.probes,
            final_state: o.final_state,
            final_noise: o.final_noise,
        }
    }
}

fn map_paths<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

/// Simulates every path and keeps its probe states, in path-index order.
pub fn run_paths(spec: &SystemSpec, cfg: &EnsembleConfig) -> Result<Vec<PathRecord>, SimError> {
    cfg.validate()?;
    let table = CoeffTable::for_config(spec, &cfg.base)?;
    let steps = cfg.probe_steps()?;
    Ok(map_paths(cfg.n_paths, cfg.parallel, |i| {
        let seed = mix_seed(cfg.master_seed, i as u64);
        PathRecord {
            index: i,
            seed,
            outcome: log_em_path(&table, cfg.base.x0, seed, &steps).map(PathSummary::from),
        }
    }))
}

/// `path,seed,t,x` rows for every probe time of every successful path.
pub fn write_paths_csv<W: Write>(records: &[PathRecord], probe_times: &[f64], mut out: W) -> io::Result<()> {
    writeln!(out, "path,seed,t,x")?;
    for rec in records {
        if let Ok(summary) = &rec.outcome {
            for (t, x) in probe_times.iter().zip(&summary.probes) {
                writeln!(out, "{},{},{t},{x}", rec.index, rec.seed)?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub q01: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    pub q99: f64,
}

impl Quantiles {
    pub fn as_array(&self) -> [f64; 5] {
        [self.q01, self.q05, self.q50, self.q95, self.q99]
    }
}

/// Linear-interpolation quantile of sorted data (the "type 7" rule).
pub fn quantile_sorted(sorted: &[f64], level: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let pos = level.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + w * (sorted[hi] - sorted[lo])
    }
}

/// Distribution of `x(t)` across the ensemble at one probe time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeStats {
    pub time: f64,
    /// Estimates of `E[x^p(t)]`, aligned with [`EnsembleStats::p_values`].
    pub mean_xp: Vec<f64>,
    pub quantiles: Quantiles,
    #[serde(skip)]
    sorted: Vec<f64>,
}

impl ProbeStats {
    fn from_samples(time: f64, samples: Vec<f64>, p_values: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean_xp = p_values
            .iter()
            .map(|&p| samples.iter().map(|x| x.powf(p)).sum::<f64>() / n)
            .collect();
        let mut sorted = samples;
        sorted.sort_by(f64::total_cmp);
        let q = |l| quantile_sorted(&sorted, l);
        let quantiles = Quantiles {
            q01: q(QUANTILE_LEVELS[0]),
            q05: q(QUANTILE_LEVELS[1]),
            q50: q(QUANTILE_LEVELS[2]),
            q95: q(QUANTILE_LEVELS[3]),
            q99: q(QUANTILE_LEVELS[4]),
        };
        Self {
            time,
            mean_xp,
            quantiles,
            sorted,
        }
    }

    fn fraction(&self, pred: impl Fn(f64) -> bool) -> f64 {
        self.sorted.iter().filter(|&&x| pred(x)).count() as f64 / self.sorted.len() as f64
    }

    /// Share of paths with `x(t) ≤ upper`.
    pub fn tail_below(&self, upper: f64) -> f64 {
        self.fraction(|x| x <= upper)
    }

    /// Share of paths with `x(t) > upper`.
    pub fn fraction_above(&self, upper: f64) -> f64 {
        self.fraction(|x| x > upper)
    }

    /// Share of paths with `x(t) ≥ lower`.
    pub fn tail_above(&self, lower: f64) -> f64 {
        self.fraction(|x| x >= lower)
    }

    /// Share of paths with `x(t) < threshold`.
    pub fn extinct_fraction(&self, threshold: f64) -> f64 {
        self.fraction(|x| x < threshold)
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub p_values: Vec<f64>,
    pub probes: Vec<ProbeStats>,
    pub n_paths: usize,
    pub failed_paths: usize,
    /// `max |M(T)/T|` over successful paths, `T = t_end`.
    pub lln_stat: f64,
    /// `|M(T)/T|` for each successful path, in path order.
    #[serde(skip)]
    pub lln_ratios: Vec<f64>,
}

impl EnsembleStats {
    pub fn failure_rate(&self) -> f64 {
        self.failed_paths as f64 / self.n_paths as f64
    }

    pub fn too_many_failures(&self) -> bool {
        self.failure_rate() > MAX_FAILURE_RATE
    }

    pub fn probe(&self, time: f64) -> Option<&ProbeStats> {
        self.probes.iter().find(|p| p.time == time)
    }
}

/// Runs `cfg.n_paths` log-domain paths and summarizes them at each probe
/// time. Failed paths are excluded and counted.
pub fn run_ensemble(spec: &SystemSpec, cfg: &EnsembleConfig, p_list: &[f64]) -> Result<EnsembleStats, SimError> {
    let records = run_paths(spec, cfg)?;
    Ok(summarize(&records, cfg, p_list))
}

pub fn summarize(records: &[PathRecord], cfg: &EnsembleConfig, p_list: &[f64]) -> EnsembleStats {
    let ok: Vec<&PathSummary> = records.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
    let failed_paths = records.len() - ok.len();
    let probes = if ok.is_empty() {
        Vec::new()
    } else {
        cfg.probe_times
            .iter()
            .enumerate()
            .map(|(j, &t)| ProbeStats::from_samples(t, ok.iter().map(|s| s.probes[j]).collect(), p_list))
            .collect()
    };
    let t_end = cfg.base.t_end;
    let lln_ratios: Vec<f64> = ok.iter().map(|s| (s.final_noise / t_end).abs()).collect();
    let lln_stat = lln_ratios.iter().copied().fold(0.0, f64::max);
    EnsembleStats {
        p_values: p_list.to_vec(),
        probes,
        n_paths: records.len(),
        failed_paths,
        lln_stat,
        lln_ratios,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CheckOutcome {
    Pass,
    Fail,
}

impl CheckOutcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == CheckOutcome::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentProbe {
    pub time: f64,
    pub mean_xp: f64,
    pub limit: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentBoundReport {
    pub outcome: CheckOutcome,
    pub p: f64,
    pub slack: f64,
    /// Running maximum of the comparison solution.
    pub z_max: f64,
    /// `z_max^p`.
    pub bound: f64,
    /// H1 verdict; the bound is only guaranteed when it holds.
    pub h1: Verdict,
    pub advisory: bool,
    pub probes: Vec<MomentProbe>,
    pub n_paths: usize,
    pub failed_paths: usize,
}

/// Compares the ensemble estimate of `E[x^p(t)]` with `z_max^p (1 + slack)`
/// at every probe time from [`MOMENT_BURN_IN`] on, where `z` solves the
/// moment comparison equation from the same initial value.
///
/// When H1 does not hold on `scan` the verdict is still computed but marked
/// advisory.
pub fn verify_moment_bound(
    spec: &SystemSpec,
    cfg: &EnsembleConfig,
    p: f64,
    slack: f64,
    scan: &ScanParams,
) -> Result<MomentBoundReport, SimError> {
    let h1 = hypotheses::check_h1(spec, scan)?.verdict;
    let z = sde::solve_moment_ode(spec, p, &cfg.base)?;
    let stats = run_ensemble(spec, cfg, &[p])?;
    let bound = z.bound();
    let limit = bound * (1.0 + slack);
    let probes: Vec<MomentProbe> = stats
        .probes
        .iter()
        .filter(|pr| pr.time >= MOMENT_BURN_IN)
        .map(|pr| MomentProbe {
            time: pr.time,
            mean_xp: pr.mean_xp[0],
            limit,
            within: pr.mean_xp[0] <= limit,
        })
        .collect();
    let ok = !probes.is_empty() && probes.iter().all(|pr| pr.within) && !stats.too_many_failures();
    Ok(MomentBoundReport {
        outcome: CheckOutcome::from_bool(ok),
        p,
        slack,
        z_max: z.running_max,
        bound,
        h1,
        advisory: h1 != Verdict::Holds,
        probes,
        n_paths: stats.n_paths,
        failed_paths: stats.failed_paths,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractivityResult {
    pub n_pairs: usize,
    /// `|x(T) - y(T)|` per successful pair, in pair order.
    pub final_gaps: Vec<f64>,
    pub failed_pairs: usize,
}

impl AttractivityResult {
    /// Share of successful pairs whose final gap is below `tol`.
    pub fn fraction_below(&self, tol: f64) -> f64 {
        if self.final_gaps.is_empty() {
            return 0.0;
        }
        self.final_gaps.iter().filter(|&&g| g < tol).count() as f64 / self.final_gaps.len() as f64
    }

    pub fn max_gap(&self) -> f64 {
        self.final_gaps.iter().copied().fold(0.0, f64::max)
    }
}

/// `cfg.n_paths` coupled pairs started from `x0` and `y0`, each pair
/// sharing one Brownian path.
pub fn attractivity_experiment(
    spec: &SystemSpec,
    cfg: &EnsembleConfig,
    x0: f64,
    y0: f64,
) -> Result<AttractivityResult, SimError> {
    cfg.validate()?;
    for v in [x0, y0] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(SimError::InvalidConfig(format!("initial values must be positive, got {v}")));
        }
    }
    let table = CoeffTable::for_config(spec, &cfg.base)?;
    let gaps = map_paths(cfg.n_paths, cfg.parallel, |i| {
        sde::coupled_gap(&table, x0, y0, mix_seed(cfg.master_seed, i as u64))
    });
    let final_gaps: Vec<f64> = gaps.iter().filter_map(|g| g.as_ref().ok().copied()).collect();
    Ok(AttractivityResult {
        n_pairs: cfg.n_paths,
        failed_pairs: cfg.n_paths - final_gaps.len(),
        final_gaps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlnReport {
    pub outcome: CheckOutcome,
    pub max_ratio: f64,
    /// `4 σ_u / sqrt(T)`.
    pub bound: f64,
    pub sigma_sup: f64,
    pub fraction_within: f64,
    pub n_paths: usize,
    pub failed_paths: usize,
}

/// Required share of paths inside the strong-law bound.
pub const LLN_REQUIRED_FRACTION: f64 = 0.99;

/// Checks `|M(T)/T| ≤ 4 σ_u / sqrt(T)` on at least 99% of paths, with
/// `σ_u` the sup of `|σ|` on `[0, T]` and `T = t_end ≥ 100`.
pub fn lln_check(spec: &SystemSpec, cfg: &EnsembleConfig) -> Result<LlnReport, SimError> {
    let t_end = cfg.base.t_end;
    if t_end < 100.0 {
        return Err(SimError::InvalidConfig(format!("strong-law check needs t_end >= 100, got {t_end}")));
    }
    let sigma_sup = coeff::sup_abs_on_grid(spec.sigma(), 0.0, t_end, cfg.base.dt)?;
    let bound = 4.0 * sigma_sup / t_end.sqrt();
    let stats = run_ensemble(spec, cfg, &[])?;
    let within = stats.lln_ratios.iter().filter(|&&r| r <= bound).count();
    let fraction_within = if stats.lln_ratios.is_empty() {
        0.0
    } else {
        within as f64 / stats.lln_ratios.len() as f64
    };
    let ok = fraction_within >= LLN_REQUIRED_FRACTION && !stats.too_many_failures();
    Ok(LlnReport {
        outcome: CheckOutcome::from_bool(ok),
        max_ratio: stats.lln_stat,
        bound,
        sigma_sup,
        fraction_within,
        n_paths: stats.n_paths,
        failed_paths: stats.failed_paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin_example;

    fn small(base: SimConfig, n: usize, probes: Vec<f64>) -> EnsembleConfig {
        EnsembleConfig::new(base, n, 1234, probes)
    }

    #[test]
    fn quantile_interpolation() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&s, 0.0), 1.0);
        assert_eq!(quantile_sorted(&s, 0.5), 3.0);
        assert_eq!(quantile_sorted(&s, 1.0), 5.0);
        assert!((quantile_sorted(&s, 0.1) - 1.4).abs() < 1e-12);
        assert_eq!(quantile_sorted(&[7.0], 0.99), 7.0);
    }

    #[test]
    fn noise_free_ensemble_is_degenerate() {
        let spec = SystemSpec::constant(1.0, 1.0, 0.0).unwrap();
        let base = SimConfig::new(0.5, 1e-2, 10.0, 0);
        let cfg = small(base, 20, vec![0.0, 5.0, 10.0]);
        let stats = run_ensemble(&spec, &cfg, &[1.0, 2.0]).unwrap();
        let det = sde::simulate_log_em(&spec, &base).unwrap();
        let last = stats.probe(10.0).unwrap();
        for q in last.quantiles.as_array() {
            assert_eq!(q, det.final_state());
        }
        assert_eq!(stats.probe(0.0).unwrap().quantiles.q50, 0.5);
        assert_eq!(stats.lln_stat, 0.0);
        assert_eq!(stats.failed_paths, 0);
    }

    #[test]
    fn fractions_partition() {
        let spec = builtin_example(1).unwrap();
        let cfg = small(SimConfig::new(0.5, 1e-2, 30.0, 0), 64, vec![10.0, 30.0]);
        let stats = run_ensemble(&spec, &cfg, &[1.0]).unwrap();
        for pr in &stats.probes {
            let q = pr.quantiles.as_array();
            assert!(q.windows(2).all(|w| w[0] <= w[1]));
            for m in [0.0, q[0], q[2], q[4], 10.0] {
                assert_eq!(pr.tail_below(m) + pr.fraction_above(m), 1.0);
                for f in [pr.tail_below(m), pr.tail_above(m), pr.extinct_fraction(m)] {
                    assert!((0.0..=1.0).contains(&f));
                }
            }
        }
    }

    #[test]
    fn serial_and_parallel_agree() {
        let spec = builtin_example(2).unwrap();
        let cfg = small(SimConfig::new(0.5, 1e-2, 20.0, 0), 40, vec![5.0, 20.0]);
        let par = run_ensemble(&spec, &cfg, &[1.0, 2.0]).unwrap();
        let ser = run_ensemble(&spec, &cfg.clone().serial(), &[1.0, 2.0]).unwrap();
        assert_eq!(par, ser);
        assert_eq!(par.lln_ratios, ser.lln_ratios);
    }

    #[test]
    fn invalid_ensemble_configs() {
        let spec = builtin_example(1).unwrap();
        let base = SimConfig::new(0.5, 1e-2, 10.0, 0);
        assert!(run_ensemble(&spec, &small(base, 0, vec![]), &[]).is_err());
        assert!(run_ensemble(&spec, &small(base, 4, vec![11.0]), &[]).is_err());
        assert!(run_ensemble(&spec, &small(base, 4, vec![1.005]), &[]).is_err());
        assert!(lln_check(&spec, &small(base, 4, vec![])).is_err());
        assert!(attractivity_experiment(&spec, &small(base, 4, vec![]), 0.0, 1.0).is_err());
    }

    #[test]
    fn failed_paths_are_counted() {
        // growth so fast that every path overflows
        let spec = SystemSpec::constant(900.0, 0.0, 0.1).unwrap();
        let cfg = small(SimConfig::new(1.0, 1e-2, 2.0, 0), 10, vec![1.0]);
        let stats = run_ensemble(&spec, &cfg, &[1.0]).unwrap();
        assert_eq!(stats.failed_paths, 10);
        assert!(stats.too_many_failures());
        assert!(stats.probes.is_empty());
    }

    #[test]
    fn noise_free_moment_bound() {
        let spec = SystemSpec::constant(1.0, 1.0, 0.0).unwrap();
        let cfg = small(SimConfig::new(0.5, 1e-2, 50.0, 0), 8, vec![25.0, 50.0]);
        let scan = ScanParams {
            window: 1.0,
            scan_end: 10.0,
            ..ScanParams::default()
        };
        let rep = verify_moment_bound(&spec, &cfg, 1.0, 0.10, &scan).unwrap();
        assert_eq!(rep.outcome, CheckOutcome::Pass);
        assert!(!rep.advisory);
        assert!((rep.z_max - 1.0).abs() < 1e-9);
        assert!(rep.probes.iter().all(|p| p.mean_xp <= 1.0 + 1e-9));
    }

    #[test]
    fn moment_bound_needs_post_burn_in_probe() {
        let spec = SystemSpec::constant(1.0, 1.0, 0.0).unwrap();
        let cfg = small(SimConfig::new(0.5, 1e-2, 50.0, 0), 4, vec![10.0]);
        let rep = verify_moment_bound(&spec, &cfg, 1.0, 0.10, &ScanParams::with_window(1.0)).unwrap();
        assert_eq!(rep.outcome, CheckOutcome::Fail);
    }

    #[test]
    fn equal_starts_have_zero_gap() {
        let spec = builtin_example(1).unwrap();
        let cfg = small(SimConfig::new(0.5, 1e-2, 20.0, 0), 10, vec![]);
        let res = attractivity_experiment(&spec, &cfg, 0.8, 0.8).unwrap();
        assert!(res.final_gaps.iter().all(|&g| g == 0.0));
        assert_eq!(res.fraction_below(1e-12), 1.0);
    }

    #[test]
    fn noise_free_lln() {
        let spec = SystemSpec::constant(1.0, 1.0, 0.0).unwrap();
        let cfg = small(SimConfig::new(0.5, 1e-2, 100.0, 0), 5, vec![]);
        let rep = lln_check(&spec, &cfg).unwrap();
        assert_eq!(rep.max_ratio, 0.0);
        assert_eq!(rep.outcome, CheckOutcome::Pass);
    }

    #[test]
    fn unit_noise_lln() {
        let spec = SystemSpec::constant(0.5, 1.0, 1.0).unwrap();
        let cfg = small(SimConfig::new(0.5, 1e-2, 10_000.0, 0), 200, vec![]);
        let rep = lln_check(&spec, &cfg).unwrap();
        assert_eq!(rep.sigma_sup, 1.0);
        assert!((rep.bound - 0.04).abs() < 1e-15);
        assert!(rep.max_ratio <= 0.04, "{}", rep.max_ratio);
        assert_eq!(rep.outcome, CheckOutcome::Pass);
    }

    #[test]
    fn per_path_csv() {
        let spec = builtin_example(1).unwrap();
        let cfg = small(SimConfig::new(0.5, 1e-2, 2.0, 0), 3, vec![1.0, 2.0]);
        let recs = run_paths(&spec, &cfg).unwrap();
        let mut buf = Vec::new();
        write_paths_csv(&recs, &cfg.probe_times, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 3 * 2);
        assert!(text.starts_with("path,seed,t,x\n0,"));
    }
}
