//! Built-in test problems with known (or reference) solutions.

use std::fmt;
use std::str::FromStr;

use super::{kernel, manufactured_forcing, scalar, ExactSolution, ProblemError, VideProblem};
use crate::specfun::beta_unchecked as beta;

/// Points at which the two forcing-oracle routes are compared when an
/// example is built.
const VERIFY_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExampleId {
    /// `y = t e^{-t^{1-μ}}`, kernels `∓e^{s^{1-μ}}`, `T = 1`, `μ = 1/2`.
    Ex51,
    /// `y = t^{2-μ} e^{-t}`, kernels `∓e^s`, `ε = 0.6`, `T = 1/2`, `μ = 1/3`.
    Ex52,
    /// `y = (t^{1+w1} + t^{1+w2}) e^{-t}` with `w1 = 1/2`, `w2 = √2`.
    Ex53,
    /// No closed form; `y0 = 3`, `T = 1/2`, `ε = 0.5`, `μ = 1/2`.
    Ex54,
}

impl ExampleId {
    pub const ALL: [ExampleId; 4] = [
        ExampleId::Ex51,
        ExampleId::Ex52,
        ExampleId::Ex53,
        ExampleId::Ex54,
    ];

    pub fn key(self) -> &'static str {
        match self {
            ExampleId::Ex51 => "5.1",
            ExampleId::Ex52 => "5.2",
            ExampleId::Ex53 => "5.3",
            ExampleId::Ex54 => "5.4",
        }
    }

    pub fn has_exact_solution(self) -> bool {
        self != ExampleId::Ex54
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for ExampleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExampleId::ALL
            .into_iter()
            .find(|id| id.key() == s.trim())
            .ok_or_else(|| format!("unknown example '{s}' (expected one of 5.1, 5.2, 5.3, 5.4)"))
    }
}

/// Overrides for the example parameters. `None` keeps the example default.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExampleOptions {
    pub mu: Option<f64>,
    pub eps: Option<f64>,
    pub horizon: Option<f64>,
    /// Only allowed for problems without an exact solution.
    pub y0: Option<f64>,
}

/// Default delay factor for the examples that do not fix one.
pub const DEFAULT_EPS: f64 = 0.5;

/// All four examples with default parameters, keyed by id.
pub fn register_examples() -> Result<Vec<(ExampleId, VideProblem)>, ProblemError> {
    ExampleId::ALL
        .into_iter()
        .map(|id| build_example(id, &ExampleOptions::default()).map(|p| (id, p)))
        .collect()
}

pub fn build_example(id: ExampleId, opts: &ExampleOptions) -> Result<VideProblem, ProblemError> {
    if opts.y0.is_some() && id.has_exact_solution() {
        return Err(ProblemError::InvalidParameter {
            name: "y0",
            value: opts.y0.unwrap_or(f64::NAN),
            reason: "the initial value is fixed by the exact solution",
        });
    }
    match id {
        ExampleId::Ex51 => ex51(opts),
        ExampleId::Ex52 => ex52(opts),
        ExampleId::Ex53 => ex53(opts),
        ExampleId::Ex54 => ex54(opts),
    }
}

/// Installs the manufactured forcing and checks both oracle routes.
fn finish(skeleton: VideProblem, exact: ExactSolution) -> Result<VideProblem, ProblemError> {
    let mf = manufactured_forcing(exact.y, exact.dy, &skeleton)?;
    mf.verify(VERIFY_SAMPLES)?;
    let mut p = mf.install();
    p.printed_f1 = skeleton.printed_f1;
    p.validate()?;
    Ok(p)
}

fn ex51(opts: &ExampleOptions) -> Result<VideProblem, ProblemError> {
    let mu = opts.mu.unwrap_or(0.5);
    let eps = opts.eps.unwrap_or(DEFAULT_EPS);
    let c = 1.0 - mu;
    let e = std::f64::consts::E;
    let b = beta(c, 2.0);
    let printed = scalar(move |t: f64| {
        (1.0 - c * t.powf(c) + t) * (-t.powf(c)).exp()
            + (1.0 + e.powf(2.0 - mu)) * b * t.powf(2.0 - mu)
            - eps * t * (-(eps * t).powf(c)).exp()
    });
    let skeleton = VideProblem {
        name: "5.1".into(),
        a1: scalar(|_| -1.0),
        b1: scalar(|_| 1.0),
        f1: scalar(|_| 0.0),
        k1: kernel(move |_, s: f64| -(s.powf(c)).exp()),
        k2: kernel(move |_, tau: f64| (tau.powf(c)).exp()),
        mu,
        eps,
        horizon: opts.horizon.unwrap_or(1.0),
        y0: 0.0,
        exact: None,
        printed_f1: Some(printed),
    };
    let exact = ExactSolution {
        y: scalar(move |t: f64| t * (-t.powf(c)).exp()),
        dy: scalar(move |t: f64| (1.0 - c * t.powf(c)) * (-t.powf(c)).exp()),
    };
    finish(skeleton, exact)
}

fn ex52(opts: &ExampleOptions) -> Result<VideProblem, ProblemError> {
    let mu = opts.mu.unwrap_or(1.0 / 3.0);
    let eps = opts.eps.unwrap_or(0.6);
    let e = std::f64::consts::E;
    let b = beta(1.0 - mu, 3.0 - mu);
    let printed = scalar(move |t: f64| {
        (2.0 - mu) * t.powf(1.0 - mu) * (-t).exp()
            + b * t.powf(3.0 - 2.0 * mu) * (1.0 + e.powf(3.0 - 2.0 * mu))
            - (eps * t).powf(2.0 - mu) * (-eps * t).exp()
    });
    let skeleton = VideProblem {
        name: "5.2".into(),
        printed_f1: Some(printed),
        horizon: opts.horizon.unwrap_or(0.5),
        ..exponential_kernel_skeleton(mu, eps)
    };
    let exact = ExactSolution {
        y: scalar(move |t: f64| t.powf(2.0 - mu) * (-t).exp()),
        dy: scalar(move |t: f64| ((2.0 - mu) * t.powf(1.0 - mu) - t.powf(2.0 - mu)) * (-t).exp()),
    };
    finish(skeleton, exact)
}

fn ex53(opts: &ExampleOptions) -> Result<VideProblem, ProblemError> {
    let mu = opts.mu.unwrap_or(0.5);
    // same equation as 5.2, including its delay factor
    let eps = opts.eps.unwrap_or(0.6);
    let w1 = 0.5;
    let w2 = std::f64::consts::SQRT_2;
    let e = std::f64::consts::E;
    let (b1, b2) = (beta(1.0 - mu, w1 + 2.0), beta(1.0 - mu, w2 + 2.0));
    let printed = scalar(move |t: f64| {
        (-t).exp() * (t.powf(w1) * (1.0 + w1 - t) + t.powf(w2) * (1.0 + w2 - t))
            + (t.powf(1.0 + w1) + t.powf(1.0 + w2)) * (-t).exp()
            - ((eps * t).powf(1.0 + w1) + (eps * t).powf(1.0 + w2)) * (-eps * t).exp()
            - b1 * t.powf(2.0 - mu + w1) * (e.powf(2.0 - mu + w1) + 1.0)
            - b2 * t.powf(2.0 - mu + w2) * (e.powf(2.0 - mu + w2) + 1.0)
    });
    let skeleton = VideProblem {
        name: "5.3".into(),
        printed_f1: Some(printed),
        horizon: opts.horizon.unwrap_or(1.0),
        ..exponential_kernel_skeleton(mu, eps)
    };
    let exact = ExactSolution {
        y: scalar(move |t: f64| (t.powf(1.0 + w1) + t.powf(1.0 + w2)) * (-t).exp()),
        dy: scalar(move |t: f64| {
            (-t).exp() * (t.powf(w1) * (1.0 + w1 - t) + t.powf(w2) * (1.0 + w2 - t))
        }),
    };
    finish(skeleton, exact)
}

/// `y' = -y + y(εt) + f1 - ∫ (t-s)^{-μ} e^s y ds + ∫ (εt-τ)^{-μ} e^τ y dτ`, `y(0) = 0`.
fn exponential_kernel_skeleton(mu: f64, eps: f64) -> VideProblem {
    VideProblem {
        name: String::new(),
        a1: scalar(|_| -1.0),
        b1: scalar(|_| 1.0),
        f1: scalar(|_| 0.0),
        k1: kernel(|_, s: f64| -s.exp()),
        k2: kernel(|_, tau: f64| tau.exp()),
        mu,
        eps,
        horizon: 1.0,
        y0: 0.0,
        exact: None,
        printed_f1: None,
    }
}

fn ex54(opts: &ExampleOptions) -> Result<VideProblem, ProblemError> {
    let p = VideProblem {
        name: "5.4".into(),
        a1: scalar(f64::cos),
        b1: scalar(|t: f64| (-t).exp()),
        f1: scalar(|t: f64| (2.0 * t).sin()),
        k1: kernel(|t: f64, s: f64| -(1.0 + (t * s).sin())),
        k2: kernel(|t: f64, tau: f64| -(1.0 + (t * tau).cos())),
        mu: opts.mu.unwrap_or(0.5),
        eps: opts.eps.unwrap_or(0.5),
        horizon: opts.horizon.unwrap_or(0.5),
        y0: opts.y0.unwrap_or(3.0),
        exact: None,
        printed_f1: None,
    };
    p.validate()?;
    Ok(p)
}
