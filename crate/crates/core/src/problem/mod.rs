//! Problem definitions: the raw equation on `[0, T]`, its rescaled form on
//! `[0, 1]`, manufactured forcing terms, and the built-in examples.

mod examples;
pub mod oracle;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::quadrature::QuadratureError;
use oracle::{SingularQuadrature, ADAPTIVE_TOL, ORACLE_POINTS, ROUTE_AGREEMENT};

pub use examples::{build_example, register_examples, ExampleId, ExampleOptions, DEFAULT_EPS};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

pub fn scalar<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> ScalarFn {
    Arc::new(f)
}

pub fn kernel<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(f: F) -> KernelFn {
    Arc::new(f)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("singular-integral oracle routes disagree at t = {t}: {gauss_jacobi} vs {adaptive}")]
    OracleDisagreement {
        t: f64,
        gauss_jacobi: f64,
        adaptive: f64,
    },
    #[error("adaptive quadrature exhausted its interval budget at t = {0}")]
    AdaptiveBudget(f64),
    #[error("problem has no exact solution")]
    NoExactSolution,
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Exact solution `y` and its derivative `y'` on `[0, T]`.
#[derive(Clone)]
pub struct ExactSolution {
    pub y: ScalarFn,
    pub dy: ScalarFn,
}

/// `y'(t) = a1 y(t) + b1 y(εt) + f1 + ∫_0^t (t-s)^{-μ} K1(t,s) y(s) ds
///        + ∫_0^{εt} (εt-τ)^{-μ} K2(t,τ) y(τ) dτ`, `y(0) = y0`, on `[0, T]`.
#[derive(Clone)]
pub struct VideProblem {
    pub name: String,
    pub a1: ScalarFn,
    pub b1: ScalarFn,
    pub f1: ScalarFn,
    pub k1: KernelFn,
    pub k2: KernelFn,
    pub mu: f64,
    pub eps: f64,
    pub horizon: f64,
    pub y0: f64,
    pub exact: Option<ExactSolution>,
    /// Forcing as printed alongside the example, when it differs from the
    /// manufactured one.
    pub printed_f1: Option<ScalarFn>,
}

impl fmt::Debug for VideProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VideProblem")
            .field("name", &self.name)
            .field("mu", &self.mu)
            .field("eps", &self.eps)
            .field("horizon", &self.horizon)
            .field("y0", &self.y0)
            .field("exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

impl VideProblem {
    /// Problem with all coefficients, kernels and forcing identically zero.
    pub fn zero(mu: f64, eps: f64, horizon: f64, y0: f64) -> Self {
        Self {
            name: "zero".into(),
            a1: scalar(|_| 0.0),
            b1: scalar(|_| 0.0),
            f1: scalar(|_| 0.0),
            k1: kernel(|_, _| 0.0),
            k2: kernel(|_, _| 0.0),
            mu,
            eps,
            horizon,
            y0,
            exact: None,
            printed_f1: None,
        }
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        let bad = |name, value, reason| {
            Err(ProblemError::InvalidParameter {
                name,
                value,
                reason,
            })
        };
        if !(0.0..1.0).contains(&self.mu) {
            return bad("mu", self.mu, "must satisfy 0 <= mu < 1");
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad("eps", self.eps, "must satisfy 0 < eps < 1");
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad("T", self.horizon, "must be positive");
        }
        if !self.y0.is_finite() {
            return bad("y0", self.y0, "must be finite");
        }
        Ok(())
    }

    /// Swaps in the printed forcing term, if the problem carries one.
    pub fn with_printed_forcing(mut self) -> Self {
        if let Some(p) = self.printed_f1.clone() {
            self.f1 = p;
        }
        self
    }

    /// `(𝒦1 y)(t)` and `(𝒦2 y)(t)` for a given function `y`, by the checked
    /// two-route oracle.
    pub fn kernel_terms(
        &self,
        y: &dyn Fn(f64) -> f64,
        t: f64,
        quad: &SingularQuadrature,
    ) -> Result<(f64, f64), ProblemError> {
        let g1 = |s: f64| (self.k1)(t, s) * y(s);
        let g2 = |tau: f64| (self.k2)(t, tau) * y(tau);
        let i1 = checked_integral(quad, t, &g1, t)?;
        let i2 = checked_integral(quad, self.eps * t, &g2, t)?;
        Ok((i1, i2))
    }
}

fn checked_integral(
    quad: &SingularQuadrature,
    x: f64,
    g: &dyn Fn(f64) -> f64,
    t_report: f64,
) -> Result<f64, ProblemError> {
    let a = quad.integrate(x, g);
    let b = oracle::adaptive_singular(quad.mu, x, g, ADAPTIVE_TOL)
        .ok_or(ProblemError::AdaptiveBudget(t_report))?;
    if (a - b).abs() > ROUTE_AGREEMENT {
        return Err(ProblemError::OracleDisagreement {
            t: t_report,
            gauss_jacobi: a,
            adaptive: b,
        });
    }
    Ok(a)
}

/// Default fractional exponent: `λ = 1/q` for `μ = p/q` in lowest terms
/// (denominators up to 24), `λ = 1` otherwise.
pub fn recommended_lambda(mu: f64) -> f64 {
    if mu == 0.0 {
        return 1.0;
    }
    for q in 1..=24u32 {
        let p = mu * q as f64;
        if (p - p.round()).abs() < 1e-8 * q as f64 {
            return 1.0 / q as f64;
        }
    }
    1.0
}

/// The problem rescaled to `θ = t/T ∈ [0, 1]`:
///
/// `φ'(θ) = ã φ(θ) + b̃ φ(εθ) + f̃ + ∫_0^θ (θ-η)^{-μ} K̄1(θ,η) φ(η) dη
///        + ∫_0^θ (θ-η)^{-μ} K̄2(θ,εη) φ(εη) dη`
///
/// with `ã = T a1(Tθ)`, `b̃ = T b1(Tθ)`, `f̃ = T f1(Tθ)`,
/// `K̄1(θ,η) = T^{2-μ} K1(Tθ,Tη)`, `K̄2(θ,σ) = ε^{1-μ} T^{2-μ} K2(Tθ,Tσ)`.
#[derive(Clone, Debug)]
pub struct ScaledProblem {
    pub problem: VideProblem,
    pub mu: f64,
    pub eps: f64,
    pub phi0: f64,
    k1_scale: f64,
    k2_scale: f64,
}

pub fn scale_to_unit(p: &VideProblem) -> Result<ScaledProblem, ProblemError> {
    p.validate()?;
    let t = p.horizon;
    let k1_scale = t.powf(2.0 - p.mu);
    Ok(ScaledProblem {
        problem: p.clone(),
        mu: p.mu,
        eps: p.eps,
        phi0: p.y0,
        k1_scale,
        k2_scale: p.eps.powf(1.0 - p.mu) * k1_scale,
    })
}

impl ScaledProblem {
    pub fn horizon(&self) -> f64 {
        self.problem.horizon
    }

    pub fn a_t(&self, theta: f64) -> f64 {
        let t = self.horizon();
        t * (self.problem.a1)(t * theta)
    }

    pub fn b_t(&self, theta: f64) -> f64 {
        let t = self.horizon();
        t * (self.problem.b1)(t * theta)
    }

    pub fn f_t(&self, theta: f64) -> f64 {
        let t = self.horizon();
        t * (self.problem.f1)(t * theta)
    }

    /// `K̄1(θ, η)`.
    pub fn kbar1(&self, theta: f64, eta: f64) -> f64 {
        let t = self.horizon();
        self.k1_scale * (self.problem.k1)(t * theta, t * eta)
    }

    /// `K̄2(θ, σ)` where `σ = εη` is the delayed point.
    pub fn kbar2(&self, theta: f64, sigma: f64) -> f64 {
        let t = self.horizon();
        self.k2_scale * (self.problem.k2)(t * theta, t * sigma)
    }

    /// `φ(θ) = y(Tθ)`, when an exact solution is known.
    pub fn exact_phi(&self, theta: f64) -> Option<f64> {
        let t = self.horizon();
        self.problem.exact.as_ref().map(|e| (e.y)(t * theta))
    }

    /// `φ'(θ) = T y'(Tθ)`, when an exact solution is known.
    pub fn exact_dphi(&self, theta: f64) -> Option<f64> {
        let t = self.horizon();
        self.problem.exact.as_ref().map(|e| t * (e.dy)(t * theta))
    }

    /// Residual of the rescaled equation at `θ` for the exact solution, with
    /// both memory integrals evaluated by the checked oracle.
    pub fn residual(&self, theta: f64) -> Result<f64, ProblemError> {
        if self.problem.exact.is_none() {
            return Err(ProblemError::NoExactSolution);
        }
        let quad = SingularQuadrature::new(self.mu, recommended_lambda(self.mu), ORACLE_POINTS)?;
        let phi = |th: f64| self.exact_phi(th).expect("exact solution present");
        let eps = self.eps;
        let g1 = |eta: f64| self.kbar1(theta, eta) * phi(eta);
        let g2 = |eta: f64| self.kbar2(theta, eps * eta) * phi(eps * eta);
        let i1 = checked_integral(&quad, theta, &g1, theta)?;
        let i2 = checked_integral(&quad, theta, &g2, theta)?;
        let lhs = self.exact_dphi(theta).expect("exact solution present");
        let rhs = self.a_t(theta) * phi(theta)
            + self.b_t(theta) * phi(eps * theta)
            + self.f_t(theta)
            + i1
            + i2;
        Ok(lhs - rhs)
    }
}

/// Forcing term that makes a prescribed `y` solve the equation:
/// `f1(t) = y'(t) - a1 y(t) - b1 y(εt) - (𝒦1 y)(t) - (𝒦2 y)(t)`.
#[derive(Clone)]
pub struct ManufacturedForcing {
    skeleton: VideProblem,
    exact: ExactSolution,
    quad: Arc<SingularQuadrature>,
}

/// Builds the manufactured forcing for `skeleton` (whose own `f1` is
/// ignored) and the exact pair `(y, y')`.
pub fn manufactured_forcing(
    y: ScalarFn,
    y_prime: ScalarFn,
    skeleton: &VideProblem,
) -> Result<ManufacturedForcing, ProblemError> {
    skeleton.validate()?;
    let quad =
        SingularQuadrature::new(skeleton.mu, recommended_lambda(skeleton.mu), ORACLE_POINTS)?;
    Ok(ManufacturedForcing {
        skeleton: skeleton.clone(),
        exact: ExactSolution { y, dy: y_prime },
        quad: Arc::new(quad),
    })
}

impl ManufacturedForcing {
    fn local_terms(&self, t: f64) -> f64 {
        let p = &self.skeleton;
        let y = &self.exact.y;
        (self.exact.dy)(t) - (p.a1)(t) * y(t) - (p.b1)(t) * y(p.eps * t)
    }

    /// `f1(t)` with both oracle routes evaluated and compared.
    pub fn eval(&self, t: f64) -> Result<f64, ProblemError> {
        let y = self.exact.y.clone();
        let (i1, i2) = self.skeleton.kernel_terms(&move |s| y(s), t, &self.quad)?;
        Ok(self.local_terms(t) - i1 - i2)
    }

    /// `f1(t)` by the Gauss–Jacobi route only.
    pub fn eval_fast(&self, t: f64) -> f64 {
        let p = &self.skeleton;
        let y = &self.exact.y;
        let i1 = self.quad.integrate(t, |s| (p.k1)(t, s) * y(s));
        let i2 = self
            .quad
            .integrate(p.eps * t, |tau| (p.k2)(t, tau) * y(tau));
        self.local_terms(t) - i1 - i2
    }

    /// Cross-checks both routes at `samples` points spread over `(0, T]`.
    pub fn verify(&self, samples: usize) -> Result<(), ProblemError> {
        let t_max = self.skeleton.horizon;
        for i in 1..=samples {
            let t = t_max * i as f64 / samples as f64;
            let checked = self.eval(t)?;
            let fast = self.eval_fast(t);
            if (checked - fast).abs() > ROUTE_AGREEMENT {
                return Err(ProblemError::OracleDisagreement {
                    t,
                    gauss_jacobi: fast,
                    adaptive: checked,
                });
            }
        }
        Ok(())
    }

    pub fn into_fn(self) -> ScalarFn {
        Arc::new(move |t| self.eval_fast(t))
    }

    /// The skeleton with this forcing and the exact solution installed.
    pub fn install(self) -> VideProblem {
        let mut p = self.skeleton.clone();
        p.exact = Some(self.exact.clone());
        p.f1 = self.into_fn();
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::beta;

    #[test]
    fn validate_ranges() {
        assert!(VideProblem::zero(0.5, 0.5, 1.0, 0.0).validate().is_ok());
        assert!(VideProblem::zero(0.0, 0.5, 1.0, 0.0).validate().is_ok());
        assert!(VideProblem::zero(1.0, 0.5, 1.0, 0.0).validate().is_err());
        assert!(VideProblem::zero(0.5, 1.0, 1.0, 0.0).validate().is_err());
        assert!(VideProblem::zero(0.5, 0.0, 1.0, 0.0).validate().is_err());
        assert!(VideProblem::zero(0.5, 0.5, -1.0, 0.0).validate().is_err());
    }

    #[test]
    fn recommended_lambda_heuristic() {
        assert_eq!(recommended_lambda(0.5), 0.5);
        assert_eq!(recommended_lambda(1.0 / 3.0), 1.0 / 3.0);
        assert_eq!(recommended_lambda(0.0), 1.0);
        assert_eq!(recommended_lambda(0.75), 0.25);
        assert_eq!(recommended_lambda(0.2), 0.2);
        assert_eq!(
            recommended_lambda(std::f64::consts::FRAC_1_SQRT_2 - 0.5),
            1.0
        );
    }

    #[test]
    fn unit_horizon_is_identity_scaling() {
        let mut p = VideProblem::zero(0.5, 0.3, 1.0, 2.0);
        p.a1 = scalar(|t| t.cos());
        p.f1 = scalar(|t| 1.0 + t);
        p.k1 = kernel(|t, s| t * s + 1.0);
        p.k2 = kernel(|t, s| t - s);
        let s = scale_to_unit(&p).unwrap();
        for th in [0.0, 0.2, 0.9] {
            assert_eq!(s.a_t(th), th.cos());
            assert_eq!(s.f_t(th), 1.0 + th);
            assert_eq!(s.kbar1(th, 0.1), th * 0.1 + 1.0);
            let k2 = 0.3f64.powf(0.5) * (th - 0.1);
            assert!((s.kbar2(th, 0.1) - k2).abs() < 1e-15);
        }
        assert_eq!(s.phi0, 2.0);
    }

    #[test]
    fn half_horizon_scaling() {
        let mut p = VideProblem::zero(1.0 / 3.0, 0.6, 0.5, 0.0);
        p.a1 = scalar(|t| t.cos());
        p.k2 = kernel(|_, tau| tau.exp());
        let s = scale_to_unit(&p).unwrap();
        for th in [0.0, 0.13, 0.5, 0.77, 1.0] {
            assert!((s.a_t(th) - 0.5 * (0.5 * th).cos()).abs() < 1e-15);
            // ε^{2/3} (1/2)^{5/3} e^{Tσ}
            let sigma = 0.6 * th * 0.4;
            let expected = 0.6f64.powf(2.0 / 3.0) * 0.5f64.powf(5.0 / 3.0) * (0.5 * sigma).exp();
            assert!((s.kbar2(th, sigma) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn scaled_fields_compose_raw_fields() {
        let p = build_example(ExampleId::Ex54, &ExampleOptions::default()).unwrap();
        let s = scale_to_unit(&p).unwrap();
        let t = p.horizon;
        for i in 0..10 {
            let th = (i as f64 * 0.618_033_988_7).fract();
            assert!((s.a_t(th) - t * (p.a1)(t * th)).abs() <= 1e-14);
            assert!((s.b_t(th) - t * (p.b1)(t * th)).abs() <= 1e-14);
            assert!((s.f_t(th) - t * (p.f1)(t * th)).abs() <= 1e-14);
            let eta = 0.5 * th;
            let k1 = t.powf(2.0 - p.mu) * (p.k1)(t * th, t * eta);
            assert!((s.kbar1(th, eta) - k1).abs() <= 1e-14);
        }
    }

    #[test]
    fn manufactured_forcing_reproduces_corrected_closed_form() {
        let mu = 0.5;
        let eps = 0.5;
        let p = build_example(
            ExampleId::Ex51,
            &ExampleOptions {
                eps: Some(eps),
                ..Default::default()
            },
        )
        .unwrap();
        let b = beta(1.0 - mu, 2.0).unwrap();
        let closed = |t: f64| {
            (1.0 - (1.0 - mu) * t.powf(1.0 - mu) + t) * (-t.powf(1.0 - mu)).exp()
                + b * t.powf(2.0 - mu) * (1.0 - eps.powf(2.0 - mu))
                - eps * t * (-(eps * t).powf(1.0 - mu)).exp()
        };
        let skeleton = p.clone();
        let exact = p.exact.clone().unwrap();
        let mf = manufactured_forcing(exact.y, exact.dy, &skeleton).unwrap();
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            let f = mf.eval(t).unwrap();
            assert!((f - closed(t)).abs() < 1e-10, "t={t}: {f} vs {}", closed(t));
            assert!(((p.f1)(t) - closed(t)).abs() < 1e-10);
        }
    }

    #[test]
    fn trivial_manufactured_solutions() {
        let skeleton = VideProblem::zero(0.5, 0.5, 1.0, 0.0);
        let mf = manufactured_forcing(scalar(|_| 0.0), scalar(|_| 0.0), &skeleton).unwrap();
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(mf.eval(t).unwrap(), 0.0);
        }
        let skeleton = VideProblem::zero(0.5, 0.5, 1.0, 4.0);
        let mf = manufactured_forcing(scalar(|_| 4.0), scalar(|_| 0.0), &skeleton).unwrap();
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(mf.eval(t).unwrap(), 0.0);
        }
    }

    #[test]
    fn manufactured_forcing_verifies_on_all_examples() {
        for id in [ExampleId::Ex51, ExampleId::Ex52, ExampleId::Ex53] {
            let p = build_example(id, &ExampleOptions::default()).unwrap();
            let e = p.exact.clone().unwrap();
            let mf = manufactured_forcing(e.y, e.dy, &p).unwrap();
            mf.verify(16).unwrap();
        }
    }

    #[test]
    fn residual_small_for_corrected_forcing() {
        for id in [ExampleId::Ex51, ExampleId::Ex52, ExampleId::Ex53] {
            let p = build_example(id, &ExampleOptions::default()).unwrap();
            let s = scale_to_unit(&p).unwrap();
            for i in 1..=20 {
                let th = i as f64 / 20.0;
                let r = s.residual(th).unwrap();
                assert!(r.abs() <= 1e-9, "{id:?} θ={th}: residual {r}");
            }
        }
    }

    #[test]
    fn residual_requires_exact_solution() {
        let p = build_example(ExampleId::Ex54, &ExampleOptions::default()).unwrap();
        let s = scale_to_unit(&p).unwrap();
        assert_eq!(s.residual(0.5), Err(ProblemError::NoExactSolution));
    }
}
