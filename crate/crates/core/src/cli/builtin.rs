use crate::coeff::{CoeffError, SystemSpec};
use crate::hypotheses::{Classification, Route};

const SIGMA: &str = "sqrt(cos(t)+1)";

/// Coefficient strings `(r, a, sigma)` of the four reference systems.
pub const EXAMPLES: [(&str, &str, &str); 4] = [
    ("sin(t)+2/3", "cos(t)+1", SIGMA),
    ("sin(t)+1/2", "cos(t)+1", SIGMA),
    (
        "sin(sqrt(2)*t)+cos(sqrt(3)*t)+2/3",
        "sin(sqrt(6)*t)+cos(sqrt(2)*t)+2",
        SIGMA,
    ),
    (
        "sin(sqrt(2)*t)+cos(sqrt(3)*t)+1/3",
        "sin(sqrt(6)*t)+cos(sqrt(2)*t)+2",
        SIGMA,
    ),
];

/// Expected long-run behaviour of each reference system.
pub const EXPECTED: [Classification; 4] = [
    Classification::Permanent,
    Classification::Extinct,
    Classification::Permanent,
    Classification::Extinct,
];

/// Reference system `id` (1 to 4).
///
/// 1 and 2 have 2π-periodic coefficients; with a 2π window the integral of
/// `a` is 2π and that of `r - σ²/2` is π/3 and 0 respectively. 3 and 4 are
/// quasi-periodic with long-run averages `r - σ²/2 → ±1/6` and `a → 2`.
pub fn builtin_example(id: u32) -> Result<SystemSpec, CoeffError> {
    let idx = id
        .checked_sub(1)
        .filter(|&i| (i as usize) < EXAMPLES.len())
        .ok_or_else(|| CoeffError::InvalidParameter(format!("no built-in example {id}; choose 1-4")))?;
    let (r, a, sigma) = EXAMPLES[idx as usize];
    SystemSpec::parse(r, a, sigma, format!("example {id}"))
}

/// How the classifier should treat example `id` by default: window checks
/// for the periodic systems, averages for the quasi-periodic ones where no
/// convenient window is known.
pub fn default_route(id: u32) -> Route {
    if id >= 3 {
        Route::Averages
    } else {
        Route::Auto
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::parse_expr;

    #[test]
    fn example_one_coefficients() {
        let s = builtin_example(1).unwrap();
        assert_eq!(s.r(), &parse_expr("sin(t) + 2/3").unwrap());
        assert_eq!(s.a(), &parse_expr("cos(t) + 1").unwrap());
        assert_eq!(s.sigma(), &parse_expr("sqrt(cos(t) + 1)").unwrap());
    }

    #[test]
    fn example_three_coefficients() {
        let s = builtin_example(3).unwrap();
        let t: f64 = 0.37;
        let r = (2f64.sqrt() * t).sin() + (3f64.sqrt() * t).cos() + 2.0 / 3.0;
        let a = (6f64.sqrt() * t).sin() + (2f64.sqrt() * t).cos() + 2.0;
        assert!((s.r().eval(t).unwrap() - r).abs() < 1e-15);
        assert!((s.a().eval(t).unwrap() - a).abs() < 1e-15);
        assert!((s.sigma().eval(t).unwrap() - (t.cos() + 1.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn invalid_ids() {
        assert!(builtin_example(0).is_err());
        assert!(builtin_example(5).is_err());
        for id in 1..=4 {
            assert!(builtin_example(id).is_ok());
        }
    }
}
