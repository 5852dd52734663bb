use crate::coeff::SystemSpec;

use super::noise::{BrownianSource, NoiseStream};
use super::{Method, Scheme, SimConfig, SimError, Trajectory};

/// Coefficient values at the left end of every step, `t_k = k * dt`.
///
/// Built once and shared by every path of an ensemble.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    dt: f64,
    r: Vec<f64>,
    a: Vec<f64>,
    sigma: Vec<f64>,
}

impl CoeffTable {
    pub fn new(spec: &SystemSpec, dt: f64, n_steps: usize) -> Result<Self, SimError> {
        let eval_all = |e: &crate::coeff::CoeffExpr| {
            (0..n_steps)
                .map(|k| e.eval(k as f64 * dt))
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|err| SimError::Coeff(err.into()))
        };
        Ok(Self {
            dt,
            r: eval_all(spec.r())?,
            a: eval_all(spec.a())?,
            sigma: eval_all(spec.sigma())?,
        })
    }

    pub fn for_config(spec: &SystemSpec, cfg: &SimConfig) -> Result<Self, SimError> {
        cfg.validate()?;
        Self::new(spec, cfg.dt, cfg.n_steps()?)
    }

    pub fn n_steps(&self) -> usize {
        self.r.len()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
}

/// Runs the log-domain scheme, calling `visit(k, x_k, M_k)` for every step
/// index `k = 0..=n`.
fn log_em_core<I, V>(table: &CoeffTable, x0: f64, mut noise: I, mut visit: V) -> Result<(), SimError>
where
    I: Iterator<Item = f64>,
    V: FnMut(usize, f64, f64),
{
    let dt = table.dt;
    let mut y = x0.ln();
    let mut x = x0;
    let mut m = 0.0;
    visit(0, x, m);
    for k in 0..table.n_steps() {
        let db = noise.next().ok_or_else(short_noise)?;
        let (r, a, s) = (table.r[k], table.a[k], table.sigma[k]);
        let dm = s * db;
        y += (r - 0.5 * s * s - a * x) * dt + dm;
        m += dm;
        x = y.exp();
        let t = (k + 1) as f64 * dt;
        if !x.is_finite() {
            return Err(SimError::BlowUp { t });
        }
        if x == 0.0 {
            return Err(SimError::Underflow { t });
        }
        visit(k + 1, x, m);
    }
    Ok(())
}

fn direct_em_core<I, V>(
    table: &CoeffTable,
    x0: f64,
    mut noise: I,
    mut visit: V,
) -> Result<Option<f64>, SimError>
where
    I: Iterator<Item = f64>,
    V: FnMut(usize, f64, f64),
{
    let dt = table.dt;
    let mut x = x0;
    let mut m = 0.0;
    let mut absorbed_at = None;
    visit(0, x, m);
    for k in 0..table.n_steps() {
        let db = noise.next().ok_or_else(short_noise)?;
        let (r, a, s) = (table.r[k], table.a[k], table.sigma[k]);
        m += s * db;
        let t = (k + 1) as f64 * dt;
        if absorbed_at.is_none() {
            x += x * (r - a * x) * dt + x * s * db;
            if !x.is_finite() {
                return Err(SimError::BlowUp { t });
            }
            if x <= 0.0 {
                x = 0.0;
                absorbed_at = Some(t);
            }
        }
        visit(k + 1, x, m);
    }
    Ok(absorbed_at)
}

fn short_noise() -> SimError {
    SimError::InvalidConfig("noise stream shorter than the number of steps".into())
}

fn check_noise(cfg: &SimConfig, noise: &NoiseStream) -> Result<(), SimError> {
    if (noise.dt - cfg.dt).abs() > 1e-12 * cfg.dt {
        return Err(SimError::InvalidConfig(format!(
            "noise stream dt={} does not match config dt={}",
            noise.dt, cfg.dt
        )));
    }
    Ok(())
}

fn recorder<'a>(cfg: &'a SimConfig, n: usize, tr: &'a mut Trajectory) -> impl FnMut(usize, f64, f64) + 'a {
    move |k, x, m| {
        if cfg.records(k, n) {
            tr.push(k as f64 * cfg.dt, x, m);
        }
    }
}

fn log_em_impl<I: Iterator<Item = f64>>(
    spec: &SystemSpec,
    cfg: &SimConfig,
    noise: I,
) -> Result<Trajectory, SimError> {
    let table = CoeffTable::for_config(spec, cfg)?;
    let n = table.n_steps();
    let mut tr = Trajectory::with_capacity(n / cfg.record_stride + 2, Method::LogEm, cfg.seed);
    log_em_core(&table, cfg.x0, noise, recorder(cfg, n, &mut tr))?;
    Ok(tr)
}

fn direct_em_impl<I: Iterator<Item = f64>>(
    spec: &SystemSpec,
    cfg: &SimConfig,
    noise: I,
) -> Result<Trajectory, SimError> {
    let table = CoeffTable::for_config(spec, cfg)?;
    let n = table.n_steps();
    let mut tr = Trajectory::with_capacity(n / cfg.record_stride + 2, Method::DirectEm, cfg.seed);
    let absorbed = direct_em_core(&table, cfg.x0, noise, recorder(cfg, n, &mut tr))?;
    tr.absorbed_at = absorbed;
    Ok(tr)
}

/// Euler–Maruyama on `y = ln x`:
///
/// ```text
/// y_{k+1} = y_k + (r_k - σ_k²/2 - a_k e^{y_k}) dt + σ_k ΔB_k
/// ```
///
/// States are `e^{y_k}` and therefore strictly positive; overflow or
/// underflow of the exponential is reported with the time it happened.
pub fn simulate_log_em(spec: &SystemSpec, cfg: &SimConfig) -> Result<Trajectory, SimError> {
    if cfg.scheme != Scheme::LogEm {
        return Err(SimError::InvalidConfig("simulate_log_em needs scheme log-em".into()));
    }
    log_em_impl(spec, cfg, BrownianSource::new(cfg.seed, cfg.dt))
}

/// [`simulate_log_em`] driven by an explicit increment sequence.
pub fn simulate_log_em_with_noise(
    spec: &SystemSpec,
    cfg: &SimConfig,
    noise: &NoiseStream,
) -> Result<Trajectory, SimError> {
    check_noise(cfg, noise)?;
    let mut tr = log_em_impl(spec, cfg, noise.increments.iter().copied())?;
    tr.seed = noise.seed;
    Ok(tr)
}

/// Euler–Maruyama on `x` itself. A step that lands at or below zero
/// absorbs the path: later states are 0 and `absorbed_at` is set.
pub fn simulate_direct_em(spec: &SystemSpec, cfg: &SimConfig) -> Result<Trajectory, SimError> {
    if cfg.scheme != Scheme::DirectEm {
        return Err(SimError::InvalidConfig("simulate_direct_em needs scheme direct-em".into()));
    }
    direct_em_impl(spec, cfg, BrownianSource::new(cfg.seed, cfg.dt))
}

pub fn simulate_direct_em_with_noise(
    spec: &SystemSpec,
    cfg: &SimConfig,
    noise: &NoiseStream,
) -> Result<Trajectory, SimError> {
    check_noise(cfg, noise)?;
    let mut tr = direct_em_impl(spec, cfg, noise.increments.iter().copied())?;
    tr.seed = noise.seed;
    Ok(tr)
}

/// Runs whichever scheme `cfg.scheme` names.
pub fn simulate(spec: &SystemSpec, cfg: &SimConfig) -> Result<Trajectory, SimError> {
    match cfg.scheme {
        Scheme::LogEm => simulate_log_em(spec, cfg),
        Scheme::DirectEm => simulate_direct_em(spec, cfg),
    }
}

/// Two log-domain paths from `x0` and `y0` driven by the same Brownian
/// increments (both seeded with `cfg.seed`).
pub fn coupled_pair(
    spec: &SystemSpec,
    cfg: &SimConfig,
    x0: f64,
    y0: f64,
) -> Result<(Trajectory, Trajectory), SimError> {
    let cfg = cfg.with_scheme(Scheme::LogEm);
    let table = CoeffTable::for_config(spec, &cfg)?;
    let run = |start: f64| {
        let c = SimConfig { x0: start, ..cfg };
        c.validate()?;
        let n = table.n_steps();
        let mut tr = Trajectory::with_capacity(n / c.record_stride + 2, Method::LogEm, c.seed);
        log_em_core(&table, start, BrownianSource::new(c.seed, c.dt), recorder(&c, n, &mut tr))?;
        Ok::<_, SimError>(tr)
    };
    Ok((run(x0)?, run(y0)?))
}

/// What an ensemble keeps from one log-domain path.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PathOutcome {
    /// State at each requested probe step, in the order requested.
    pub probes: Vec<f64>,
    pub final_state: f64,
    pub final_noise: f64,
}

/// One log-domain path that only keeps the states at `probe_steps`.
pub(crate) fn log_em_path(
    table: &CoeffTable,
    x0: f64,
    seed: u64,
    probe_steps: &[usize],
) -> Result<PathOutcome, SimError> {
    let mut probes = vec![f64::NAN; probe_steps.len()];
    let mut final_state = x0;
    let mut final_noise = 0.0;
    log_em_core(table, x0, BrownianSource::new(seed, table.dt), |k, x, m| {
        for (slot, &p) in probes.iter_mut().zip(probe_steps) {
            if p == k {
                *slot = x;
            }
        }
        final_state = x;
        final_noise = m;
    })?;
    Ok(PathOutcome {
        probes,
        final_state,
        final_noise,
    })
}

/// Final gap `|x(T) - y(T)|` of a coupled pair without storing either path.
pub(crate) fn coupled_gap(table: &CoeffTable, x0: f64, y0: f64, seed: u64) -> Result<f64, SimError> {
    let x = log_em_path(table, x0, seed, &[])?.final_state;
    let y = log_em_path(table, y0, seed, &[])?.final_state;
    Ok((x - y).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sde::brownian_increments;

    #[test]
    fn equilibrium_is_preserved() {
        let spec = SystemSpec::constant(1.0, 1.0, 0.0).unwrap();
        let cfg = SimConfig::new(1.0, 1e-3, 10.0, 0).with_stride(1);
        let tr = simulate_log_em(&spec, &cfg).unwrap();
        assert_eq!(tr.len(), 10_001);
        for x in &tr.states {
            assert!((x - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn exponential_growth_without_competition() {
        let spec = SystemSpec::constant(1.0, 0.0, 0.0).unwrap();
        let cfg = SimConfig::new(1.0, 1e-4, 1.0, 0);
        let tr = simulate_log_em(&spec, &cfg).unwrap();
        assert!((tr.final_state() - std::f64::consts::E).abs() < 1e-3);
        assert_eq!(tr.final_time(), 1.0);
    }

    #[test]
    fn times_and_noise_start_at_zero() {
        let spec = crate::builtin_example(1).unwrap();
        let cfg = SimConfig::new(0.5, 1e-3, 5.0, 9).with_stride(7);
        let tr = simulate_log_em(&spec, &cfg).unwrap();
        assert_eq!(tr.times[0], 0.0);
        assert_eq!(tr.noise_integral[0], 0.0);
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(tr.final_time(), 5.0);
        assert_eq!(tr.len(), 5000 / 7 + 2);
        assert!(tr.states.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn explicit_noise_matches_seeded_run() {
        let spec = crate::builtin_example(2).unwrap();
        let cfg = SimConfig::new(0.5, 1e-2, 20.0, 77).with_stride(1);
        let noise = brownian_increments(77, 2000, 1e-2).unwrap();
        let a = simulate_log_em(&spec, &cfg).unwrap();
        let b = simulate_log_em_with_noise(&spec, &cfg, &noise).unwrap();
        assert_eq!(a, b);

        let short = brownian_increments(77, 10, 1e-2).unwrap();
        assert!(simulate_log_em_with_noise(&spec, &cfg, &short).is_err());
        let wrong_dt = brownian_increments(77, 4000, 5e-3).unwrap();
        assert!(simulate_log_em_with_noise(&spec, &cfg, &wrong_dt).is_err());
    }

    #[test]
    fn scheme_mismatch_rejected() {
        let spec = SystemSpec::constant(1.0, 1.0, 0.1).unwrap();
        let cfg = SimConfig::new(1.0, 0.01, 1.0, 0);
        assert!(simulate_direct_em(&spec, &cfg).is_err());
        assert!(simulate_log_em(&spec, &cfg.with_scheme(Scheme::DirectEm)).is_err());
        assert!(simulate(&spec, &cfg.with_scheme(Scheme::DirectEm)).is_ok());
    }

    #[test]
    fn direct_scheme_absorbs_at_zero() {
        // huge noise on a coarse grid drives the direct scheme negative
        let spec = SystemSpec::constant(0.0, 0.0, 5.0).unwrap();
        let cfg = SimConfig::new(1.0, 0.1, 50.0, 3)
            .with_scheme(Scheme::DirectEm)
            .with_stride(1);
        let tr = simulate_direct_em(&spec, &cfg).unwrap();
        let t_abs = tr.absorbed_at.expect("path should be absorbed");
        for (t, x) in tr.times.iter().zip(&tr.states) {
            if *t >= t_abs {
                assert_eq!(*x, 0.0);
            } else {
                assert!(*x > 0.0);
            }
        }
    }

    #[test]
    fn log_scheme_overflow_is_reported() {
        let spec = SystemSpec::constant(800.0, 0.0, 0.0).unwrap();
        let cfg = SimConfig::new(1.0, 0.01, 2.0, 0);
        match simulate_log_em(&spec, &cfg) {
            Err(SimError::BlowUp { t }) => assert!(t > 0.8 && t < 0.9, "{t}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coupled_pair_equal_starts_identical() {
        let spec = crate::builtin_example(1).unwrap();
        let cfg = SimConfig::new(0.5, 1e-3, 10.0, 5);
        let (x, y) = coupled_pair(&spec, &cfg, 0.7, 0.7).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn coupled_pair_replays_one_stream() {
        let spec = crate::builtin_example(1).unwrap();
        let cfg = SimConfig::new(0.5, 1e-2, 10.0, 11).with_stride(1);
        let (x, y) = coupled_pair(&spec, &cfg, 0.2, 2.0).unwrap();
        let noise = brownian_increments(11, 1000, 1e-2).unwrap();
        let replay_x = simulate_log_em_with_noise(&spec, &SimConfig { x0: 0.2, ..cfg }, &noise).unwrap();
        let replay_y = simulate_log_em_with_noise(&spec, &SimConfig { x0: 2.0, ..cfg }, &noise).unwrap();
        assert_eq!(x, replay_x);
        assert_eq!(y, replay_y);
        // the noise integral does not depend on the state
        assert_eq!(x.noise_integral, y.noise_integral);
    }

    #[test]
    fn deterministic_pair_converges() {
        let spec = SystemSpec::constant(1.0, 1.0, 0.0).unwrap();
        let cfg = SimConfig::new(0.5, 1e-3, 50.0, 0);
        let (x, y) = coupled_pair(&spec, &cfg, 0.5, 2.0).unwrap();
        assert!((x.final_state() - y.final_state()).abs() < 1e-6);
        assert!((x.final_state() - 1.0).abs() < 1e-6);
    }
}
