//! Classical Jacobi polynomials, Gauss–Jacobi rules on `[-1, 1]`, and their
//! fractional images on `[0, 1]`.
//!
//! A Gauss–Jacobi rule integrates `(1 - x)^α (1 + x)^β p(x)` exactly for
//! polynomials `p` of degree `≤ 2n - 1`. Mapping its nodes through
//! `θ = ((t + 1) / 2)^{1/λ}` gives a rule on `[0, 1]` that is exact for
//! Müntz polynomials in `θ^λ` against the weight
//! `ω^{α,β,λ}(θ) = λ (1 - θ^λ)^α θ^{(β+1)λ - 1}`.

use thiserror::Error;

use crate::specfun;

/// Convergence tolerance of the implicit QL sweeps (relative to the local
/// diagonal magnitude).
const QL_TOL: f64 = 1e-14;
/// Maximum number of QL sweeps spent on a single eigenvalue.
const QL_MAX_SWEEPS: usize = 50;
/// Newton steps applied to each eigenvalue estimate.
const NEWTON_STEPS: usize = 6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("Jacobi exponents must exceed -1 (alpha = {alpha}, beta = {beta})")]
    BadExponents { alpha: f64, beta: f64 },
    #[error("a quadrature rule needs at least one point")]
    NoPoints,
    #[error("fractional exponent lambda = {0} is outside (0, 1]")]
    BadLambda(f64),
    #[error("tridiagonal eigensolver did not converge after {sweeps} sweeps (n = {n}, alpha = {alpha}, beta = {beta})")]
    NoConvergence {
        n: usize,
        alpha: f64,
        beta: f64,
        sweeps: usize,
    },
}

fn check_exponents(alpha: f64, beta: f64) -> Result<(), QuadratureError> {
    if alpha > -1.0 && beta > -1.0 && alpha.is_finite() && beta.is_finite() {
        Ok(())
    } else {
        Err(QuadratureError::BadExponents { alpha, beta })
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<(), QuadratureError> {
    if lambda > 0.0 && lambda <= 1.0 {
        Ok(())
    } else {
        Err(QuadratureError::BadLambda(lambda))
    }
}

/// Gauss–Jacobi rule on `[-1, 1]` for the weight `(1 - x)^α (1 + x)^β`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub alpha: f64,
    pub beta: f64,
    /// Strictly increasing, inside `(-1, 1)`.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_j f(t_j)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// A Gauss–Jacobi rule mapped to `[0, 1]` through `θ = ((t + 1)/2)^{1/λ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalRule {
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Mapped nodes `θ_j`, increasing in `(0, 1)`.
    pub nodes: Vec<f64>,
    /// Affine images `ξ_j = (t_j + 1) / 2 = θ_j^λ` of the parent nodes.
    pub unit_nodes: Vec<f64>,
    /// `ω_j = 2^{-(α+β+1)} w_j`.
    pub weights: Vec<f64>,
}

impl FractionalRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ ω_j f(θ_j)`, which approximates `∫_0^1 ω^{α,β,λ}(θ) f(θ) dθ`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&th, &w)| w * f(th))
            .sum()
    }

    /// `Σ ω_j f(ξ_j)`, which approximates `∫_0^1 (1 - ξ)^α ξ^β f(ξ) dξ`.
    pub fn integrate_unit<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.unit_nodes
            .iter()
            .zip(&self.weights)
            .map(|(&xi, &w)| w * f(xi))
            .sum()
    }
}

/// Jacobi polynomial `P_n^{(α,β)}(x)` by the three-term recurrence.
pub fn jacobi_eval(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    jacobi_pair(n, alpha, beta, x).0
}

/// Returns `(P_n(x), P_{n-1}(x))`; for `n = 0` the second entry is 0.
fn jacobi_pair(n: usize, alpha: f64, beta: f64, x: f64) -> (f64, f64) {
    let mut p_prev = 0.0;
    let mut p = 1.0;
    if n == 0 {
        return (p, p_prev);
    }
    let ab = alpha + beta;
    p_prev = p;
    p = 0.5 * ((alpha - beta) + (ab + 2.0) * x);
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + ab;
        let a1 = 2.0 * k * (k + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta);
        let a3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c;
        let next = (a2 * p - a3 * p_prev) / a1;
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// `d/dx P_n^{(α,β)}(x) = (n + α + β + 1)/2 · P_{n-1}^{(α+1,β+1)}(x)`.
pub fn jacobi_deriv(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    0.5 * (n as f64 + alpha + beta + 1.0) * jacobi_eval(n - 1, alpha + 1.0, beta + 1.0, x)
}

/// Total mass `∫_{-1}^{1} (1 - x)^α (1 + x)^β dx = 2^{α+β+1} B(α+1, β+1)`.
pub fn jacobi_mass(alpha: f64, beta: f64) -> f64 {
    let ln_mass = (alpha + beta + 1.0) * std::f64::consts::LN_2
        + specfun::ln_beta(alpha + 1.0, beta + 1.0).expect("exponents > -1");
    ln_mass.exp()
}

/// Diagonal and squared off-diagonal of the symmetric Jacobi matrix of the
/// monic Jacobi recurrence.
fn recurrence_coefficients(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let diag = (0..n)
        .map(|k| {
            let c = 2.0 * k as f64 + ab;
            if k == 0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                (beta * beta - alpha * alpha) / (c * (c + 2.0))
            }
        })
        .collect();
    let off_sq = (1..n)
        .map(|k| {
            let kf = k as f64;
            let c = 2.0 * kf + ab;
            if k == 1 {
                // (k + α + β) cancels against (2k + α + β - 1) at k = 1
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))
            } else {
                4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (c * c * (c + 1.0) * (c - 1.0))
            }
        })
        .collect();
    (diag, off_sq)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix. On return `d` holds
/// the eigenvalues and `z` the first components of the normalized
/// eigenvectors (when started from `e_0`).
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<(), usize> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    // e[i] couples rows i and i + 1
    e.rotate_left(1);
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= QL_TOL * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(sweeps - 1);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Nodes and eigenvector weights from the Golub–Welsch eigenproblem, sorted
/// by node, without any polishing.
pub(crate) fn golub_welsch(
    npts: usize,
    alpha: f64,
    beta: f64,
) -> Result<(Vec<f64>, Vec<f64>), QuadratureError> {
    check_exponents(alpha, beta)?;
    if npts == 0 {
        return Err(QuadratureError::NoPoints);
    }
    let (mut d, off_sq) = recurrence_coefficients(npts, alpha, beta);
    let mut e = vec![0.0; npts];
    for (k, b) in off_sq.iter().enumerate() {
        e[k + 1] = b.sqrt();
    }
    let mut z = vec![0.0; npts];
    z[0] = 1.0;
    tridiagonal_ql(&mut d, &mut e, &mut z).map_err(|sweeps| QuadratureError::NoConvergence {
        n: npts,
        alpha,
        beta,
        sweeps,
    })?;
    let mass = jacobi_mass(alpha, beta);
    let mut pairs: Vec<(f64, f64)> = d
        .into_iter()
        .zip(z)
        .map(|(x, v)| (x, mass * v * v))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// `npts`-point Gauss–Jacobi rule for `(1 - x)^α (1 + x)^β` on `[-1, 1]`.
///
/// Nodes come from the Golub–Welsch eigenproblem and are then polished by
/// Newton's method on `P_n`; weights use the closed form
/// `w_j = 2^{α+β+1} Γ(n+α+1) Γ(n+β+1) / (Γ(n+α+β+1) n! (1 - t_j²) P_n'(t_j)²)`,
/// which keeps full relative accuracy for the tiny weights near `±1`.
pub fn gauss_jacobi(npts: usize, alpha: f64, beta: f64) -> Result<QuadratureRule, QuadratureError> {
    let (mut nodes, eig_weights) = golub_welsch(npts, alpha, beta)?;
    let n = npts;
    let nf = n as f64;
    let ln_const = (alpha + beta + 1.0) * std::f64::consts::LN_2
        + libm::lgamma(nf + alpha + 1.0)
        + libm::lgamma(nf + beta + 1.0)
        - libm::lgamma(nf + alpha + beta + 1.0)
        - libm::lgamma(nf + 1.0);
    let scale = ln_const.exp();
    let mut weights = Vec::with_capacity(n);
    for (j, x) in nodes.iter_mut().enumerate() {
        let x0 = *x;
        let mut xn = x0;
        for _ in 0..NEWTON_STEPS {
            let dx = jacobi_eval(n, alpha, beta, xn) / jacobi_deriv(n, alpha, beta, xn);
            if !dx.is_finite() {
                break;
            }
            xn -= dx;
            if dx.abs() <= 4.0 * f64::EPSILON * xn.abs().max(1e-3) {
                break;
            }
        }
        // keep the eigenvalue if Newton wandered towards a neighbouring root
        if (xn - x0).abs() < 1e-8 && xn > -1.0 && xn < 1.0 {
            *x = xn;
        }
        let dp = jacobi_deriv(n, alpha, beta, *x);
        let w = scale / ((1.0 - *x) * (1.0 + *x) * dp * dp);
        weights.push(if w.is_finite() && w > 0.0 {
            w
        } else {
            eig_weights[j]
        });
    }
    Ok(QuadratureRule {
        alpha,
        beta,
        nodes,
        weights,
    })
}

/// Maps a Gauss–Jacobi rule to `[0, 1]` through `θ = ((t + 1)/2)^{1/λ}`,
/// `ω = 2^{-(α+β+1)} w`.
pub fn to_fractional(
    rule: &QuadratureRule,
    lambda: f64,
) -> Result<FractionalRule, QuadratureError> {
    check_lambda(lambda)?;
    let scale = (-(rule.alpha + rule.beta + 1.0) * std::f64::consts::LN_2).exp();
    let unit_nodes: Vec<f64> = rule.nodes.iter().map(|&t| 0.5 * (1.0 + t)).collect();
    let nodes = unit_nodes
        .iter()
        .map(|&xi| {
            if lambda == 1.0 {
                xi
            } else {
                xi.powf(1.0 / lambda)
            }
        })
        .collect();
    Ok(FractionalRule {
        lambda,
        alpha: rule.alpha,
        beta: rule.beta,
        nodes,
        unit_nodes,
        weights: rule.weights.iter().map(|w| w * scale).collect(),
    })
}

/// Convenience: the `npts`-point fractional rule for `(α, β, λ)`.
pub fn fractional_gauss_jacobi(
    npts: usize,
    alpha: f64,
    beta: f64,
    lambda: f64,
) -> Result<FractionalRule, QuadratureError> {
    check_lambda(lambda)?;
    to_fractional(&gauss_jacobi(npts, alpha, beta)?, lambda)
}

/// Müntz–Jacobi weight `ω^{α,β,λ}(θ) = λ (1 - θ^λ)^α θ^{(β+1)λ - 1}`.
pub fn muntz_weight(theta: f64, alpha: f64, beta: f64, lambda: f64) -> f64 {
    lambda * (1.0 - theta.powf(lambda)).powf(alpha) * theta.powf((beta + 1.0) * lambda - 1.0)
}
