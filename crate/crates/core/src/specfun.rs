//! Log-gamma and Beta functions for real positive arguments.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecfunError {
    #[error("{func}: argument {arg} outside the domain (must be > 0)")]
    Domain { func: &'static str, arg: f64 },
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64, SpecfunError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecfunError::Domain {
            func: "ln_gamma",
            arg: x,
        });
    }
    Ok(libm::lgamma(x))
}

/// `ln B(a, b) = ln Γ(a) + ln Γ(b) - ln Γ(a + b)`.
pub fn ln_beta(a: f64, b: f64) -> Result<f64, SpecfunError> {
    if !(a > 0.0) {
        return Err(SpecfunError::Domain {
            func: "beta",
            arg: a,
        });
    }
    if !(b > 0.0) {
        return Err(SpecfunError::Domain {
            func: "beta",
            arg: b,
        });
    }
    Ok(ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?)
}

/// Euler Beta function, evaluated in log space so that large parameters do
/// not overflow the intermediate gammas.
pub fn beta(a: f64, b: f64) -> Result<f64, SpecfunError> {
    ln_beta(a, b).map(f64::exp)
}

/// `B(a, b)` for parameters that are known to be positive at the call site.
///
/// Panics on a domain error; reserved for internal formulas whose arguments
/// are validated upstream (e.g. `α + 1` with `α > -1`).
pub(crate) fn beta_unchecked(a: f64, b: f64) -> f64 {
    beta(a, b).expect("beta arguments validated by caller")
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn ln_gamma_known_values() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert_relative_eq!(ln_gamma(5.0).unwrap(), 24f64.ln(), max_relative = 1e-15);
        // ln sqrt(pi), 40-digit reference
        assert_relative_eq!(
            ln_gamma(0.5).unwrap(),
            0.572_364_942_924_700_087_071_713_675_676_5,
            max_relative = 1e-15
        );
    }

    #[test]
    fn ln_gamma_rejects_nonpositive() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-2.5).is_err());
        assert!(ln_gamma(f64::NAN).is_err());
        assert!(beta(0.0, 1.0).is_err());
        assert!(beta(1.0, -1.0).is_err());
    }

    #[test]
    fn beta_known_values() {
        assert_relative_eq!(beta(1.0, 1.0).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(beta(0.5, 2.0).unwrap(), 4.0 / 3.0, max_relative = 1e-14);
        // B(1 - μ, 3 - μ) with μ = 1/3; value from 40-digit quadrature of
        // ∫ t^{-1/3} (1 - t)^{5/3} dt.
        assert_relative_eq!(
            beta(2.0 / 3.0, 8.0 / 3.0).unwrap(),
            0.733_353_649_263_991_850_369_011_048_785,
            max_relative = 1e-13
        );
    }

    #[test]
    fn beta_large_parameters_do_not_overflow() {
        let b = beta(300.0, 2.0).unwrap();
        assert_relative_eq!(b, 1.0 / (300.0 * 301.0), max_relative = 1e-12);
    }

    #[test]
    fn ln_gamma_accuracy_over_range() {
        // Γ(n) = (n-1)! for integers, checked on a log scale across the range.
        let mut ln_fact = 0.0f64;
        for n in 1..170u32 {
            let x = n as f64;
            let lg = ln_gamma(x).unwrap();
            let tol = 1e-13 * ln_fact.abs().max(1.0);
            assert!((lg - ln_fact).abs() <= tol, "n={n}: {lg} vs {ln_fact}");
            ln_fact += x.ln();
        }
        // Γ(x) ~ 1/x - γ near zero
        let x: f64 = 1e-3;
        let expected = -(x.ln()) - 0.577_215_664_901_532_9 * x;
        assert_relative_eq!(ln_gamma(x).unwrap(), expected, max_relative = 1e-6);
    }

    proptest! {
        #[test]
        fn beta_is_symmetric(a in 0.1f64..10.0, b in 0.1f64..10.0) {
            let ab = beta(a, b).unwrap();
            let ba = beta(b, a).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-14 * ab);
        }

        #[test]
        fn beta_recurrence(a in 0.1f64..10.0, b in 0.1f64..10.0) {
            let lhs = beta(a + 1.0, b).unwrap();
            let rhs = beta(a, b).unwrap() * a / (a + b);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }

        #[test]
        fn ln_gamma_recurrence(x in 0.5f64..100.0) {
            let lhs = ln_gamma(x + 1.0).unwrap();
            let rhs = ln_gamma(x).unwrap() + x.ln();
            prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0));
        }
    }
}
