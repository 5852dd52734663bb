//! Numerical checks of the sliding-window hypotheses and the resulting
//! long-run classification.
//!
//! Three window conditions are checked, for a window length `w`:
//!
//! ```text
//! H1:  liminf_t ∫_t^{t+w} a(s) ds                > 0
//! H2:  liminf_t ∫_t^{t+w} (r(s) - σ²(s)/2) ds    > 0
//! H3:  limsup_t ∫_t^{t+w} (r(s) - σ²(s)/2) ds    ≤ 0
//! ```
//!
//! H1 ∧ H2 gives stochastic permanence, H1 ∧ H3 gives almost-sure
//! extinction. The liminf/limsup over `t → ∞` is approximated by the
//! min/max over a finite scan grid. For almost periodic coefficients the
//! long-run averages of the same integrands decide the same question; they
//! are reported alongside and used when the window checks are too close to
//! zero to decide.

use serde::{Deserialize, Serialize};

use crate::coeff::{self, CoeffError, CoeffExpr, QuadratureParams, SystemSpec, TimeGrid};

/// Window length and scan range for the liminf/limsup estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanParams {
    pub window: f64,
    pub scan_start: f64,
    pub scan_end: f64,
    pub scan_step: f64,
    pub quad: QuadratureParams,
    /// Estimates within `±margin` of zero do not decide a strict inequality.
    pub margin: f64,
}

impl Default for ScanParams {
    fn default() -> Self {
        Self {
            window: std::f64::consts::TAU,
            scan_start: 0.0,
            scan_end: 500.0,
            scan_step: 0.1,
            quad: QuadratureParams::default(),
            margin: 1e-6,
        }
    }
}

impl ScanParams {
    pub fn with_window(window: f64) -> Self {
        Self {
            window,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), CoeffError> {
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(CoeffError::InvalidParameter(format!(
                "window must be positive, got {}",
                self.window
            )));
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return Err(CoeffError::InvalidParameter(format!(
                "margin must be nonnegative, got {}",
                self.margin
            )));
        }
        self.quad.validate()?;
        self.grid().map(|_| ())
    }

    fn grid(&self) -> Result<TimeGrid, CoeffError> {
        TimeGrid::new(self.scan_start, self.scan_end, self.scan_step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Fails,
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowCheckResult {
    pub inf_estimate: f64,
    pub sup_estimate: f64,
    pub argmin_t: f64,
    pub argmax_t: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    Permanent,
    Extinct,
    Indeterminate,
}

/// How a classification was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Route {
    /// Window checks, falling back to the averages when H1 or H2 is
    /// marginal and the window checks alone are inconclusive.
    Auto,
    /// Window checks only.
    Windows,
    /// Long-run averages only.
    Averages,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub h1: WindowCheckResult,
    pub h2: WindowCheckResult,
    pub h3: WindowCheckResult,
    pub avg_rs: f64,
    pub avg_a: f64,
    pub classification: Classification,
    /// `Windows` or `Averages`: the criterion that decided `classification`.
    pub decided_by: Route,
}

struct Scan {
    inf: f64,
    sup: f64,
    argmin: f64,
    argmax: f64,
}

fn scan(expr: &CoeffExpr, p: &ScanParams) -> Result<Scan, CoeffError> {
    p.validate()?;
    let grid = p.grid()?;
    let values = coeff::sliding_window_integrals(expr, &grid, p.window, &p.quad)?;
    let mut out = Scan {
        inf: f64::INFINITY,
        sup: f64::NEG_INFINITY,
        argmin: p.scan_start,
        argmax: p.scan_start,
    };
    for (t, v) in grid.points().zip(values) {
        if v < out.inf {
            out.inf = v;
            out.argmin = t;
        }
        if v > out.sup {
            out.sup = v;
            out.argmax = t;
        }
    }
    Ok(out)
}

fn strict_positive(s: &Scan, margin: f64) -> WindowCheckResult {
    let verdict = if s.inf > margin {
        Verdict::Holds
    } else if s.inf >= -margin {
        Verdict::Marginal
    } else {
        Verdict::Fails
    };
    result(s, verdict)
}

fn nonpositive(s: &Scan, margin: f64) -> WindowCheckResult {
    // non-strict: an estimate inside the margin band satisfies it
    let verdict = if s.sup <= margin {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    result(s, verdict)
}

fn result(s: &Scan, verdict: Verdict) -> WindowCheckResult {
    WindowCheckResult {
        inf_estimate: s.inf,
        sup_estimate: s.sup,
        argmin_t: s.argmin,
        argmax_t: s.argmax,
        verdict,
    }
}

/// H1: the windowed integral of `a` stays bounded away from zero.
pub fn check_h1(spec: &SystemSpec, p: &ScanParams) -> Result<WindowCheckResult, CoeffError> {
    Ok(strict_positive(&scan(spec.a(), p)?, p.margin))
}

/// H2: the windowed integral of `r - σ²/2` stays bounded away from zero.
pub fn check_h2(spec: &SystemSpec, p: &ScanParams) -> Result<WindowCheckResult, CoeffError> {
    Ok(strict_positive(&scan(&spec.growth_margin(), p)?, p.margin))
}

/// H3: the windowed integral of `r - σ²/2` is eventually nonpositive.
pub fn check_h3(spec: &SystemSpec, p: &ScanParams) -> Result<WindowCheckResult, CoeffError> {
    Ok(nonpositive(&scan(&spec.growth_margin(), p)?, p.margin))
}

/// Long-run averages of `r - σ²/2` and `a` over `[0, horizon]`.
pub fn check_avg_criteria(
    spec: &SystemSpec,
    horizon: f64,
    q: &QuadratureParams,
) -> Result<(f64, f64), CoeffError> {
    let avg_rs = coeff::long_run_average(&spec.growth_margin(), horizon, q)?;
    let avg_a = coeff::long_run_average(spec.a(), horizon, q)?;
    Ok((avg_rs, avg_a))
}

/// Classification from the window checks alone.
pub fn classify_windows(
    h1: &WindowCheckResult,
    h2: &WindowCheckResult,
    h3: &WindowCheckResult,
) -> Classification {
    match (h1.verdict, h2.verdict, h3.verdict) {
        (Verdict::Holds, Verdict::Holds, _) => Classification::Permanent,
        (Verdict::Holds, _, Verdict::Holds) => Classification::Extinct,
        _ => Classification::Indeterminate,
    }
}

/// Classification from the long-run averages.
///
/// Positive average of `a` is required either way. A positive average of
/// `r - σ²/2` means permanence, a negative one extinction; an average inside
/// the margin band still counts as extinction when H3 holds.
pub fn classify_averages(
    avg_rs: f64,
    avg_a: f64,
    h3: &WindowCheckResult,
    margin: f64,
) -> Classification {
    if avg_a <= margin {
        return Classification::Indeterminate;
    }
    if avg_rs > margin {
        Classification::Permanent
    } else if avg_rs < -margin || h3.verdict == Verdict::Holds {
        Classification::Extinct
    } else {
        Classification::Indeterminate
    }
}

/// Window checks with the averages as tie-breaker. See [`Route::Auto`].
pub fn classify(
    spec: &SystemSpec,
    p: &ScanParams,
    horizon: f64,
) -> Result<HypothesisReport, CoeffError> {
    classify_route(spec, p, horizon, Route::Auto)
}

pub fn classify_route(
    spec: &SystemSpec,
    p: &ScanParams,
    horizon: f64,
    route: Route,
) -> Result<HypothesisReport, CoeffError> {
    p.validate()?;
    let h1 = strict_positive(&scan(spec.a(), p)?, p.margin);
    let rs = scan(&spec.growth_margin(), p)?;
    let h2 = strict_positive(&rs, p.margin);
    let h3 = nonpositive(&rs, p.margin);
    let (avg_rs, avg_a) = check_avg_criteria(spec, horizon, &p.quad)?;

    let by_windows = classify_windows(&h1, &h2, &h3);
    let by_averages = || classify_averages(avg_rs, avg_a, &h3, p.margin);
    let (classification, decided_by) = match route {
        Route::Windows => (by_windows, Route::Windows),
        Route::Averages => (by_averages(), Route::Averages),
        Route::Auto => {
            let marginal = h1.verdict == Verdict::Marginal || h2.verdict == Verdict::Marginal;
            if by_windows == Classification::Indeterminate && marginal {
                (by_averages(), Route::Averages)
            } else {
                (by_windows, Route::Windows)
            }
        }
    };
    Ok(HypothesisReport {
        h1,
        h2,
        h3,
        avg_rs,
        avg_a,
        classification,
        decided_by,
    })
}
