//! Composite Simpson quadrature and grid scans over coefficient expressions.

use serde::{Deserialize, Serialize};

use super::expr::{CoeffExpr, EvalError};
use super::CoeffError;

/// Panel width used by every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureParams {
    pub step: f64,
}

impl Default for QuadratureParams {
    fn default() -> Self {
        Self { step: 1e-3 }
    }
}

impl QuadratureParams {
    pub fn new(step: f64) -> Result<Self, CoeffError> {
        let q = Self { step };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), CoeffError> {
        if self.step > 0.0 && self.step.is_finite() {
            Ok(())
        } else {
            Err(CoeffError::InvalidParameter(format!(
                "quadrature step must be positive, got {}",
                self.step
            )))
        }
    }

    /// Even number of panels covering `width` with panels no wider than `step`.
    fn panels(&self, width: f64) -> usize {
        let n = (width / self.step).ceil().max(2.0) as usize;
        n + n % 2
    }
}

/// Evenly spaced points `start, start + step, ...` up to and including `end`.
///
/// Points are computed as `start + k * step` rather than accumulated. When
/// `end` is not a multiple of `step` away from `start` it is appended as a
/// final point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self, CoeffError> {
        let g = Self { start, end, step };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), CoeffError> {
        if !(self.start.is_finite() && self.end.is_finite()) || self.start >= self.end {
            return Err(CoeffError::InvalidParameter(format!(
                "grid requires start < end, got [{}, {}]",
                self.start, self.end
            )));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(CoeffError::InvalidParameter(format!(
                "grid step must be positive, got {}",
                self.step
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        let span = self.end - self.start;
        let full = (span / self.step * (1.0 + 1e-12)).floor() as usize;
        let last = self.start + full as f64 * self.step;
        if (self.end - last).abs() <= 1e-9 * self.step {
            full + 1
        } else {
            full + 2
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, k: usize) -> f64 {
        (self.start + k as f64 * self.step).min(self.end)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.len();
        (0..n).map(move |k| if k + 1 == n { self.end } else { self.point(k) })
    }
}

/// Composite Simpson approximation of the integral of `expr` over
/// `[t, t + width]`.
pub fn window_integral(
    expr: &CoeffExpr,
    t: f64,
    width: f64,
    q: &QuadratureParams,
) -> Result<f64, CoeffError> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(CoeffError::InvalidParameter(format!(
            "window width must be positive, got {width}"
        )));
    }
    q.validate()?;
    Ok(simpson(|s| expr.eval(s), t, width, q)?)
}

fn simpson<F>(f: F, t: f64, width: f64, q: &QuadratureParams) -> Result<f64, EvalError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    let n = q.panels(width);
    let h = width / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let v = f(t + i as f64 * h)?;
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    let ends = f(t)? + f(t + width)?;
    Ok((ends + 4.0 * odd + 2.0 * even) * h / 3.0)
}

/// Window integrals `∫_t^{t+width} expr` at every point `t` of `grid`.
///
/// When the grid step is shorter than the window, each value is obtained
/// from its predecessor by adding the integral over the newly covered piece
/// and subtracting the one that left the window, so every point of the
/// integrand is evaluated about twice instead of once per window. Values
/// agree with [`window_integral`] to within quadrature and rounding error.
pub fn sliding_window_integrals(
    expr: &CoeffExpr,
    grid: &TimeGrid,
    width: f64,
    q: &QuadratureParams,
) -> Result<Vec<f64>, CoeffError> {
    grid.validate()?;
    let points: Vec<f64> = grid.points().collect();
    if grid.step >= width {
        return points.iter().map(|&t| window_integral(expr, t, width, q)).collect();
    }
    let f = |s: f64| expr.eval(s);
    let mut values = Vec::with_capacity(points.len());
    let mut current = window_integral(expr, points[0], width, q)?;
    values.push(current);
    for pair in points.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let entering = simpson(f, lo + width, hi - lo, q)?;
        let leaving = simpson(f, lo, hi - lo, q)?;
        current += entering - leaving;
        values.push(current);
    }
    Ok(values)
}

/// Time average `(1/horizon) ∫_0^horizon expr(s) ds`.
pub fn long_run_average(
    expr: &CoeffExpr,
    horizon: f64,
    q: &QuadratureParams,
) -> Result<f64, CoeffError> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(CoeffError::InvalidParameter(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    Ok(window_integral(expr, 0.0, horizon, q)? / horizon)
}

/// Largest `|expr(t)|` over the grid `[t_start, t_end]` with spacing `step`.
pub fn sup_abs_on_grid(
    expr: &CoeffExpr,
    t_start: f64,
    t_end: f64,
    step: f64,
) -> Result<f64, CoeffError> {
    let grid = TimeGrid::new(t_start, t_end, step)?;
    let mut best = 0.0f64;
    for t in grid.points() {
        best = best.max(expr.eval(t)?.abs());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::parse_expr;
    use std::f64::consts::{PI, TAU};

    fn q() -> QuadratureParams {
        QuadratureParams::default()
    }

    #[test]
    fn full_period_of_shifted_cosine() {
        let a = parse_expr("cos(t)+1").unwrap();
        let v = window_integral(&a, 0.0, TAU, &q()).unwrap();
        assert!((v - TAU).abs() < 1e-10, "{v}");
    }

    #[test]
    fn full_period_of_growth_margin() {
        let e = parse_expr("sin(t)+2/3-(cos(t)+1)/2").unwrap();
        for t in [0.0, 1.3, 17.0, 93.5] {
            let v = window_integral(&e, t, TAU, &q()).unwrap();
            assert!((v - PI / 3.0).abs() < 1e-10, "t={t}: {v}");
        }
    }

    #[test]
    fn zero_integrand() {
        let e = CoeffExpr::constant(0.0);
        for (t, w) in [(0.0, 1.0), (5.0, 0.1), (-3.0, 40.0)] {
            assert_eq!(window_integral(&e, t, w, &q()).unwrap(), 0.0);
        }
    }

    #[test]
    fn invalid_arguments() {
        let e = CoeffExpr::constant(1.0);
        assert!(window_integral(&e, 0.0, 0.0, &q()).is_err());
        assert!(window_integral(&e, 0.0, 1.0, &QuadratureParams { step: 0.0 }).is_err());
        assert!(long_run_average(&e, -1.0, &q()).is_err());
        assert!(sup_abs_on_grid(&e, 1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn evaluation_error_propagates() {
        let e = parse_expr("sqrt(t - 1)").unwrap();
        let err = window_integral(&e, 0.0, 2.0, &q()).unwrap_err();
        assert!(matches!(err, CoeffError::Eval(ev) if ev.t < 1.0));
    }

    #[test]
    fn constant_average() {
        let e = CoeffExpr::constant(-2.5);
        for h in [0.5, 3.0, 1000.0] {
            assert!((long_run_average(&e, h, &q()).unwrap() + 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn sup_on_grid() {
        let s = parse_expr("sin(t)").unwrap();
        assert!((sup_abs_on_grid(&s, 0.0, TAU, 1e-3).unwrap() - 1.0).abs() < 1e-6);
        let five = CoeffExpr::constant(5.0);
        assert_eq!(sup_abs_on_grid(&five, 0.0, 1.0, 0.1).unwrap(), 5.0);
    }

    #[test]
    fn sup_of_shifted_cosine_matches_dense_scan() {
        // dense independent scan with a finer step
        let mut oracle = 0.0f64;
        let n = 2_000_000;
        for k in 0..=n {
            let t = TAU * k as f64 / n as f64;
            oracle = oracle.max((t.cos() + 1.0).abs());
        }
        let e = parse_expr("cos(t)+1").unwrap();
        let v = sup_abs_on_grid(&e, 0.0, TAU, 1e-3).unwrap();
        assert!((v - oracle).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-6);
    }

    #[test]
    fn sliding_matches_direct() {
        let e = parse_expr("sin(sqrt(2)*t)+cos(sqrt(3)*t)+2/3-(cos(t)+1)/2").unwrap();
        let grid = TimeGrid::new(3.0, 200.0, 0.7).unwrap();
        let slid = sliding_window_integrals(&e, &grid, 50.0, &q()).unwrap();
        let pts: Vec<f64> = grid.points().collect();
        assert_eq!(slid.len(), pts.len());
        for (t, v) in pts.iter().zip(&slid) {
            let direct = window_integral(&e, *t, 50.0, &q()).unwrap();
            assert!((v - direct).abs() < 1e-10, "t={t}: {v} vs {direct}");
        }
    }

    #[test]
    fn sliding_with_wide_step_is_direct() {
        let e = parse_expr("t^2").unwrap();
        let grid = TimeGrid::new(0.0, 10.0, 2.5).unwrap();
        let slid = sliding_window_integrals(&e, &grid, 1.0, &q()).unwrap();
        for (t, v) in grid.points().zip(&slid) {
            let exact = ((t + 1.0).powi(3) - t.powi(3)) / 3.0;
            assert!((v - exact).abs() < 1e-12 * exact.max(1.0));
        }
    }

    #[test]
    fn grid_points_include_end() {
        let g = TimeGrid::new(0.0, 1.0, 0.3).unwrap();
        let pts: Vec<f64> = g.points().collect();
        assert_eq!(pts.len(), 5);
        assert_eq!(*pts.last().unwrap(), 1.0);

        let g = TimeGrid::new(0.0, 500.0, 0.1).unwrap();
        assert_eq!(g.len(), 5001);
        assert_eq!(g.points().last().unwrap(), 500.0);
    }
}
