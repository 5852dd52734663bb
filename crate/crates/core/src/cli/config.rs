//! Run configuration files.
//!
//! A config is a small TOML document with four sections:
//!
//! ```toml
//! output_dir = "out"
//!
//! [coefficients]
//! r = "sin(t)+2/3"
//! a = "cos(t)+1"
//! sigma = "sqrt(cos(t)+1)"
//! # or: example = 1
//!
//! [scan]
//! window = 6.283185307179586
//! scan_end = 200
//!
//! [sim]
//! x0 = 0.5
//! seed = 42
//!
//! [ensemble]
//! n_paths = 200
//! probe_times = [100, 500]
//! ```
//!
//! Every key except the coefficients has a default.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::{CoeffError, CoeffExpr, Coefficient, QuadratureParams, SystemSpec, TimeGrid};
use crate::hypotheses::{Route, ScanParams};
use crate::montecarlo::EnsembleConfig;
use crate::sde::{Scheme, SimConfig, SimError};

use super::builtin::{builtin_example, default_route};

/// Horizon for long-run averages unless configured otherwise.
pub const DEFAULT_AVG_HORIZON: f64 = 10_000.0;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },
    #[error(transparent)]
    Spec(#[from] CoeffError),
}

impl ConfigError {
    fn invalid(field: &str, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// True for syntax problems (file or expression), false for values that
    /// parse but are out of range.
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            ConfigError::Io { .. } | ConfigError::Parse { .. } | ConfigError::Spec(CoeffError::Parse { .. })
        )
    }
}

/// Everything a subcommand needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: SystemSpec,
    pub scan: ScanParams,
    pub avg_horizon: f64,
    pub route: Route,
    pub sim: SimConfig,
    pub ensemble: EnsembleConfig,
    pub output_dir: PathBuf,
}

impl RunConfig {
    /// Defaults for built-in example `id`.
    pub fn for_example(id: u32) -> Result<Self, ConfigError> {
        let spec = builtin_example(id)?;
        Ok(Self::with_spec(spec, default_route(id)))
    }

    pub fn with_spec(spec: SystemSpec, route: Route) -> Self {
        let sim = SimConfig::default();
        Self {
            spec,
            scan: ScanParams::default(),
            avg_horizon: DEFAULT_AVG_HORIZON,
            route,
            sim,
            ensemble: EnsembleConfig {
                base: sim,
                ..EnsembleConfig::default()
            },
            output_dir: PathBuf::from("."),
        }
    }

    /// Checks every sub-config, naming the first offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.scan;
        positive("scan.window", s.window)?;
        positive("scan.scan_step", s.scan_step)?;
        positive("scan.quad_step", s.quad.step)?;
        if s.scan_start >= s.scan_end || s.scan_start.is_nan() || s.scan_end.is_nan() {
            return Err(ConfigError::invalid("scan.scan_end", "must exceed scan_start"));
        }
        if !(s.margin >= 0.0 && s.margin.is_finite()) {
            return Err(ConfigError::invalid("scan.margin", "must be nonnegative"));
        }
        positive("scan.avg_horizon", self.avg_horizon)?;

        let sim = &self.sim;
        positive("sim.x0", sim.x0)?;
        positive("sim.dt", sim.dt)?;
        positive("sim.t_end", sim.t_end)?;
        if sim.dt > sim.t_end {
            return Err(ConfigError::invalid("sim.dt", "must not exceed t_end"));
        }
        if sim.record_stride == 0 {
            return Err(ConfigError::invalid("sim.record_stride", "must be at least 1"));
        }
        sim.validate().map_err(|e| sim_invalid("sim.t_end", e))?;

        if self.ensemble.n_paths == 0 {
            return Err(ConfigError::invalid("ensemble.n_paths", "must be at least 1"));
        }
        self.ensemble
            .validate()
            .map_err(|e| sim_invalid("ensemble.probe_times", e))?;
        Ok(())
    }

    /// Text form accepted by [`parse_config`].
    pub fn to_toml_string(&self) -> String {
        let spec = &self.spec;
        let grid = spec.validation_grid();
        let raw = RawConfig {
            output_dir: Some(self.output_dir.display().to_string()),
            coefficients: Some(RawCoefficients {
                example: None,
                r: Some(spec.r().to_string()),
                a: Some(spec.a().to_string()),
                sigma: Some(spec.sigma().to_string()),
                label: Some(spec.label().to_string()),
                validation_start: Some(grid.start),
                validation_end: Some(grid.end),
                validation_step: Some(grid.step),
            }),
            scan: RawScan {
                window: Some(self.scan.window),
                scan_start: Some(self.scan.scan_start),
                scan_end: Some(self.scan.scan_end),
                scan_step: Some(self.scan.scan_step),
                quad_step: Some(self.scan.quad.step),
                margin: Some(self.scan.margin),
                avg_horizon: Some(self.avg_horizon),
                route: Some(self.route),
            },
            sim: RawSim {
                x0: Some(self.sim.x0),
                dt: Some(self.sim.dt),
                t_end: Some(self.sim.t_end),
                seed: Some(self.sim.seed),
                scheme: Some(self.sim.scheme),
                record_stride: Some(self.sim.record_stride),
            },
            ensemble: RawEnsemble {
                n_paths: Some(self.ensemble.n_paths),
                master_seed: Some(self.ensemble.master_seed),
                probe_times: Some(self.ensemble.probe_times.clone()),
                parallel: Some(self.ensemble.parallel),
            },
        };
        toml::to_string(&raw).expect("config serializes")
    }
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::invalid(field, format!("must be positive, got {v}")))
    }
}

fn sim_invalid(field: &str, e: SimError) -> ConfigError {
    ConfigError::invalid(field, e.to_string())
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    output_dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<RawCoefficients>,
    #[serde(default)]
    scan: RawScan,
    #[serde(default)]
    sim: RawSim,
    #[serde(default)]
    ensemble: RawEnsemble,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoefficients {
    #[serde(skip_serializing_if = "Option::is_none")]
    example: Option<u32>,
    r: Option<String>,
    a: Option<String>,
    sigma: Option<String>,
    label: Option<String>,
    validation_start: Option<f64>,
    validation_end: Option<f64>,
    validation_step: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScan {
    window: Option<f64>,
    scan_start: Option<f64>,
    scan_end: Option<f64>,
    scan_step: Option<f64>,
    quad_step: Option<f64>,
    margin: Option<f64>,
    avg_horizon: Option<f64>,
    route: Option<Route>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    x0: Option<f64>,
    dt: Option<f64>,
    t_end: Option<f64>,
    seed: Option<u64>,
    scheme: Option<Scheme>,
    record_stride: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnsemble {
    n_paths: Option<usize>,
    master_seed: Option<u64>,
    probe_times: Option<Vec<f64>>,
    parallel: Option<bool>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn build_spec(c: RawCoefficients) -> Result<(SystemSpec, Route), ConfigError> {
    if let Some(id) = c.example {
        if c.r.is_some() || c.a.is_some() || c.sigma.is_some() {
            return Err(ConfigError::invalid(
                "coefficients.example",
                "cannot be combined with r, a, sigma",
            ));
        }
        let spec = builtin_example(id)
            .map_err(|e| ConfigError::invalid("coefficients.example", e.to_string()))?;
        let spec = match c.label {
            Some(label) => spec.with_label(label),
            None => spec,
        };
        return Ok((spec, default_route(id)));
    }
    let field = |which: Coefficient, v: Option<String>| {
        v.ok_or_else(|| ConfigError::Parse {
            line: 1,
            message: format!("[coefficients] is missing `{which}`"),
        })
    };
    let parse = |which, text: String| {
        text.parse::<CoeffExpr>()
            .map_err(|source| ConfigError::Spec(CoeffError::Parse { which, source }))
    };
    let r = parse(Coefficient::R, field(Coefficient::R, c.r)?)?;
    let a = parse(Coefficient::A, field(Coefficient::A, c.a)?)?;
    let sigma = parse(Coefficient::Sigma, field(Coefficient::Sigma, c.sigma)?)?;
    let d = SystemSpec::DEFAULT_VALIDATION_GRID;
    let grid = TimeGrid {
        start: c.validation_start.unwrap_or(d.start),
        end: c.validation_end.unwrap_or(d.end),
        step: c.validation_step.unwrap_or(d.step),
    };
    grid.validate()
        .map_err(|e| ConfigError::invalid("coefficients.validation_step", e.to_string()))?;
    let label = c.label.unwrap_or_else(|| "custom".to_string());
    Ok((SystemSpec::new(r, a, sigma, grid, label)?, Route::Auto))
}

/// Parses and validates a config document, filling defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    if text.trim().is_empty() {
        return Err(ConfigError::Parse {
            line: 1,
            message: "empty config".into(),
        });
    }
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    let coefficients = raw.coefficients.ok_or_else(|| ConfigError::Parse {
        line: 1,
        message: "missing [coefficients] section".into(),
    })?;
    let (spec, default_route) = build_spec(coefficients)?;

    let mut cfg = RunConfig::with_spec(spec, default_route);
    if let Some(dir) = raw.output_dir {
        cfg.output_dir = PathBuf::from(dir);
    }

    let s = raw.scan;
    let scan = &mut cfg.scan;
    scan.window = s.window.unwrap_or(scan.window);
    scan.scan_start = s.scan_start.unwrap_or(scan.scan_start);
    scan.scan_end = s.scan_end.unwrap_or(scan.scan_end);
    scan.scan_step = s.scan_step.unwrap_or(scan.scan_step);
    scan.margin = s.margin.unwrap_or(scan.margin);
    scan.quad = QuadratureParams {
        step: s.quad_step.unwrap_or(scan.quad.step),
    };
    cfg.avg_horizon = s.avg_horizon.unwrap_or(cfg.avg_horizon);
    cfg.route = s.route.unwrap_or(cfg.route);

    let m = raw.sim;
    let d = SimConfig::default();
    let x0 = m.x0.unwrap_or(d.x0);
    let dt = m.dt.unwrap_or(d.dt);
    let t_end = m.t_end.unwrap_or(d.t_end);
    let mut sim = SimConfig::new(x0, dt, t_end, m.seed.unwrap_or(d.seed));
    sim.scheme = m.scheme.unwrap_or(d.scheme);
    if let Some(stride) = m.record_stride {
        sim.record_stride = stride;
    }
    cfg.sim = sim;

    let e = raw.ensemble;
    let d = EnsembleConfig::default();
    cfg.ensemble = EnsembleConfig {
        base: sim,
        n_paths: e.n_paths.unwrap_or(d.n_paths),
        master_seed: e.master_seed.unwrap_or(d.master_seed),
        probe_times: e
            .probe_times
            .unwrap_or_else(|| d.probe_times.iter().copied().filter(|&t| t <= t_end).collect()),
        parallel: e.parallel.unwrap_or(d.parallel),
    };

    cfg.validate()?;
    Ok(cfg)
}

/// Reads and validates a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig, ConfigError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
