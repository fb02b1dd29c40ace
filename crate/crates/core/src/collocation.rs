//! Discrete collocation system and its solution.
//!
//! At every grid point `θ_i` the scheme imposes
//!
//! ```text
//! U* = (A + C + D) U + B V + F
//! U  = U0 + E U*
//! V  = U0 + H U*
//! ```
//!
//! where `U*`, `U`, `V` approximate `φ'(θ_i)`, `φ(θ_i)` and `φ(εθ_i)`. The
//! memory integrals are mapped to `[0, 1]` by `η = θ_i ξ^{1/λ}` and
//! discretized with Gauss–Jacobi rules for the weights
//! `(1-ξ)^{-μ} ξ^{1/λ-1}` (kernel terms `C`, `D`) and `ξ^{1/λ-1}` (the
//! integration matrices `E`, `H`).

use std::sync::Arc;

use thiserror::Error;

use crate::muntz_basis::CollocationGrid;
use crate::problem::{scale_to_unit, ProblemError, ScaledProblem, VideProblem};
use crate::quadrature::{self, FractionalRule, QuadratureError};

/// Beyond this `ξ` the kernel ratio switches to its series expansion.
const RATIO_SERIES_FROM: f64 = 1.0 - 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CollocationError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("quadrature parameters do not match the problem: {0}")]
    RuleMismatch(String),
    #[error("collocation system is singular (pivot ratio {pivot_ratio:.3e})")]
    Singular { pivot_ratio: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// Which memory term a kernel evaluation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelTerm {
    /// `∫_0^θ (θ-η)^{-μ} K̄1(θ,η) φ(η) dη`
    Current,
    /// `∫_0^θ (θ-η)^{-μ} K̄2(θ,εη) φ(εη) dη`
    Delayed,
}

/// Square dense matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// LU factorization with partial pivoting; solves `m x = rhs` in place.
fn lu_solve(mut m: Matrix, mut rhs: Vec<f64>) -> Result<Vec<f64>, CollocationError> {
    let n = m.dim();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let mut max_pivot: f64 = 0.0;
    let mut min_pivot = f64::INFINITY;
    for k in 0..n {
        let (p, pv) = (k..n)
            .map(|i| (i, m[(i, k)].abs()))
            .fold(
                (k, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        max_pivot = max_pivot.max(pv);
        min_pivot = min_pivot.min(pv);
        if pv <= 1e3 * f64::EPSILON * scale * n as f64 * f64::EPSILON.sqrt() || !pv.is_finite() {
            return Err(CollocationError::Singular {
                pivot_ratio: if pv > 0.0 {
                    max_pivot / pv
                } else {
                    f64::INFINITY
                },
            });
        }
        if p != k {
            for j in 0..n {
                m.data.swap(k * n + j, p * n + j);
            }
            rhs.swap(k, p);
        }
        let pivot = m[(k, k)];
        for i in (k + 1)..n {
            let l = m[(i, k)] / pivot;
            if l == 0.0 {
                continue;
            }
            m[(i, k)] = l;
            for j in (k + 1)..n {
                let mkj = m[(k, j)];
                m[(i, j)] -= l * mkj;
            }
            rhs[i] -= l * rhs[k];
        }
    }
    for i in (0..n).rev() {
        let row = m.row(i);
        let s: f64 = row[i + 1..]
            .iter()
            .zip(&rhs[i + 1..])
            .map(|(a, b)| a * b)
            .sum();
        rhs[i] = (rhs[i] - s) / row[i];
    }
    Ok(rhs)
}

/// `((1 - ξ^{1/λ}) / (1 - ξ))^{-μ}` without cancellation near `ξ = 1`,
/// where it tends to `λ^μ`.
pub fn kernel_ratio(xi: f64, lambda: f64, mu: f64) -> f64 {
    if lambda == 1.0 || mu == 0.0 {
        return 1.0;
    }
    let m = 1.0 / lambda;
    let log_ratio = if xi > RATIO_SERIES_FROM {
        // 1 - (1-δ)^m = mδ (1 - (m-1)δ/2 + (m-1)(m-2)δ²/6 - ...)
        let delta = 1.0 - xi;
        let c1 = -(m - 1.0) * delta / 2.0;
        let c2 = (m - 1.0) * (m - 2.0) * delta * delta / 6.0;
        m.ln() + c1 + c2 - 0.5 * c1 * c1
    } else {
        (-libm::expm1(m * xi.ln())).ln() - (1.0 - xi).ln()
    };
    (-mu * log_ratio).exp()
}

/// `K̃(θ_i, ξ) = (1/λ) θ_i^{1-μ} ((1-ξ^{1/λ})/(1-ξ))^{-μ} K̄(θ_i, ·)`,
/// with `K̄1` evaluated at `η_i(ξ) = θ_i ξ^{1/λ}` and `K̄2` at `ε η_i(ξ)`.
pub fn kernel_tilde(
    scaled: &ScaledProblem,
    theta_i: f64,
    xi: f64,
    which: KernelTerm,
    lambda: f64,
) -> f64 {
    let eta = theta_i * xi.powf(1.0 / lambda);
    let kbar = match which {
        KernelTerm::Current => scaled.kbar1(theta_i, eta),
        KernelTerm::Delayed => scaled.kbar2(theta_i, scaled.eps * eta),
    };
    theta_i.powf(1.0 - scaled.mu) / lambda * kernel_ratio(xi, lambda, scaled.mu) * kbar
}

/// The assembled collocation system of dimension `N + 1`.
#[derive(Debug, Clone)]
pub struct SystemMatrices {
    pub a_diag: Vec<f64>,
    pub b_diag: Vec<f64>,
    pub c: Matrix,
    pub d: Matrix,
    pub e: Matrix,
    pub h: Matrix,
    pub f_vec: Vec<f64>,
    pub u0: Vec<f64>,
}

impl SystemMatrices {
    pub fn dim(&self) -> usize {
        self.f_vec.len()
    }
}

fn check_rule(
    rule: &FractionalRule,
    alpha: f64,
    beta: f64,
    what: &str,
) -> Result<(), CollocationError> {
    if (rule.alpha - alpha).abs() > 1e-12 || (rule.beta - beta).abs() > 1e-12 {
        return Err(CollocationError::RuleMismatch(format!(
            "{what} rule has (alpha, beta) = ({}, {}), expected ({alpha}, {beta})",
            rule.alpha, rule.beta
        )));
    }
    Ok(())
}

/// Builds `A, B, C, D, E, H, F, U0` for the rescaled problem on `grid`.
///
/// `quad_mu` must carry `(α, β) = (-μ, 1/λ - 1)` and `quad_hat`
/// `(0, 1/λ - 1)`; both are used through their unit nodes `ξ_k = (t_k+1)/2`.
pub fn assemble(
    scaled: &ScaledProblem,
    grid: &CollocationGrid,
    quad_mu: &FractionalRule,
    quad_hat: &FractionalRule,
) -> Result<SystemMatrices, CollocationError> {
    let lambda = grid.lambda;
    let mu = scaled.mu;
    let eps = scaled.eps;
    check_rule(quad_mu, -mu, 1.0 / lambda - 1.0, "kernel")?;
    check_rule(quad_hat, 0.0, 1.0 / lambda - 1.0, "integration")?;
    let n = grid.len();
    if n < 2 {
        return Err(CollocationError::Dimension(format!(
            "grid has {n} points, need at least 2"
        )));
    }
    if quad_mu.is_empty() || quad_hat.is_empty() {
        return Err(CollocationError::Dimension("empty quadrature rule".into()));
    }

    let eps_z = eps.powf(lambda);
    let ratios: Vec<f64> = quad_mu
        .unit_nodes
        .iter()
        .map(|&xi| kernel_ratio(xi, lambda, mu))
        .collect();
    let mut c = Matrix::zeros(n);
    let mut d = Matrix::zeros(n);
    let mut e = Matrix::zeros(n);
    let mut h = Matrix::zeros(n);
    let mut basis = vec![0.0; n];

    for (i, (&theta, &z_i)) in grid.points.iter().zip(&grid.z_points).enumerate() {
        let pre = theta.powf(1.0 - mu) / lambda;
        for ((&xi, &w), &ratio) in quad_mu.unit_nodes.iter().zip(&quad_mu.weights).zip(&ratios) {
            let eta = theta * xi.powf(1.0 / lambda);
            let z = z_i * xi;
            let k1 = pre * ratio * scaled.kbar1(theta, eta) * w;
            if k1 != 0.0 {
                grid.basis_eval_z_into(z, &mut basis);
                for (cij, fj) in c.row_mut(i).iter_mut().zip(&basis) {
                    *cij += k1 * fj;
                }
            }
            let k2 = pre * ratio * scaled.kbar2(theta, eps * eta) * w;
            if k2 != 0.0 {
                grid.basis_eval_z_into(eps_z * z, &mut basis);
                for (dij, fj) in d.row_mut(i).iter_mut().zip(&basis) {
                    *dij += k2 * fj;
                }
            }
        }
        let pre_e = theta / lambda;
        for (&xi, &w) in quad_hat.unit_nodes.iter().zip(&quad_hat.weights) {
            let z = z_i * xi;
            grid.basis_eval_z_into(z, &mut basis);
            for (eij, fj) in e.row_mut(i).iter_mut().zip(&basis) {
                *eij += pre_e * w * fj;
            }
            grid.basis_eval_z_into(eps_z * z, &mut basis);
            for (hij, fj) in h.row_mut(i).iter_mut().zip(&basis) {
                *hij += eps * pre_e * w * fj;
            }
        }
    }

    Ok(SystemMatrices {
        a_diag: grid.points.iter().map(|&t| scaled.a_t(t)).collect(),
        b_diag: grid.points.iter().map(|&t| scaled.b_t(t)).collect(),
        c,
        d,
        e,
        h,
        f_vec: grid.points.iter().map(|&t| scaled.f_t(t)).collect(),
        u0: vec![scaled.phi0; n],
    })
}

/// Nodal approximations of `φ'(θ_i)`, `φ(θ_i)` and `φ(εθ_i)`.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    pub u_star: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub grid: Arc<CollocationGrid>,
}

/// Solves the reduced system
/// `[I - (A+C+D)E - BH] U* = (A+C+D+B) U0 + F`, then recovers
/// `U = U0 + E U*` and `V = U0 + H U*`.
pub fn solve(
    sys: &SystemMatrices,
    grid: Arc<CollocationGrid>,
) -> Result<DiscreteSolution, CollocationError> {
    let n = sys.dim();
    if grid.len() != n {
        return Err(CollocationError::Dimension(format!(
            "system has dimension {n}, grid has {} points",
            grid.len()
        )));
    }
    // G = A + C + D
    let mut g = sys.c.clone();
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] += sys.d[(i, j)];
        }
        g[(i, i)] += sys.a_diag[i];
    }
    let mut m = Matrix::identity(n);
    for i in 0..n {
        let gi = g.row(i);
        for (k, &gik) in gi.iter().enumerate() {
            if gik == 0.0 {
                continue;
            }
            let ek = sys.e.row(k);
            for j in 0..n {
                m[(i, j)] -= gik * ek[j];
            }
        }
        let bi = sys.b_diag[i];
        if bi != 0.0 {
            let hi = sys.h.row(i).to_vec();
            for j in 0..n {
                m[(i, j)] -= bi * hi[j];
            }
        }
    }
    let gu0 = g.mul_vec(&sys.u0);
    let rhs: Vec<f64> = (0..n)
        .map(|i| gu0[i] + sys.b_diag[i] * sys.u0[i] + sys.f_vec[i])
        .collect();
    let u_star = lu_solve(m, rhs)?;
    let eu = sys.e.mul_vec(&u_star);
    let hu = sys.h.mul_vec(&u_star);
    Ok(DiscreteSolution {
        u: sys.u0.iter().zip(eu).map(|(a, b)| a + b).collect(),
        v: sys.u0.iter().zip(hu).map(|(a, b)| a + b).collect(),
        u_star,
        grid,
    })
}

impl DiscreteSolution {
    /// `(φ_N(θ), φ*_N(θ))`.
    pub fn eval(&self, theta: f64) -> (f64, f64) {
        eval_solution(&self.grid, self, theta)
    }

    /// Max-norm residuals of the three block equations, each divided by
    /// `1 + ‖U*‖_∞`.
    pub fn residuals(&self, sys: &SystemMatrices) -> [f64; 3] {
        let n = self.u.len();
        let scale = 1.0 + self.u_star.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let cu = sys.c.mul_vec(&self.u);
        let du = sys.d.mul_vec(&self.u);
        let eu = sys.e.mul_vec(&self.u_star);
        let hu = sys.h.mul_vec(&self.u_star);
        let mut r = [0.0f64; 3];
        for i in 0..n {
            let first = self.u_star[i]
                - (sys.a_diag[i] * self.u[i]
                    + cu[i]
                    + du[i]
                    + sys.b_diag[i] * self.v[i]
                    + sys.f_vec[i]);
            r[0] = r[0].max(first.abs());
            r[1] = r[1].max((self.u[i] - sys.u0[i] - eu[i]).abs());
            r[2] = r[2].max((self.v[i] - sys.u0[i] - hu[i]).abs());
        }
        r.map(|x| x / scale)
    }
}

/// Evaluates the Müntz expansions `φ_N(θ) = Σ φ_j F_j(θ)` and
/// `φ*_N(θ) = Σ φ*_j F_j(θ)`.
pub fn eval_solution(grid: &CollocationGrid, sol: &DiscreteSolution, theta: f64) -> (f64, f64) {
    (
        grid.interpolate(&sol.u, theta),
        grid.interpolate(&sol.u_star, theta),
    )
}

/// Discretization parameters of one solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Fractional exponent of the Müntz basis, in `(0, 1]`.
    pub lambda: f64,
    /// Jacobi parameters of the collocation grid.
    pub alpha: f64,
    pub beta: f64,
    /// Points in the kernel and integration rules; `None` means `N + 1`.
    pub quad_points: Option<usize>,
}

impl SolverConfig {
    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            alpha: -0.5,
            beta: -0.5,
            quad_points: None,
        }
    }

    /// Grid exponents `(-1/2, -1/2)` and `λ` from the problem's singularity
    /// exponent.
    pub fn recommended(problem: &VideProblem) -> Self {
        Self::new(crate::problem::recommended_lambda(problem.mu))
    }
}

/// Everything produced by one end-to-end solve.
#[derive(Debug, Clone)]
pub struct Solve {
    pub scaled: ScaledProblem,
    pub system: SystemMatrices,
    pub solution: DiscreteSolution,
}

/// Rescales, builds grid and rules, assembles and solves for a given `N`.
pub fn solve_problem(
    problem: &VideProblem,
    n: usize,
    cfg: &SolverConfig,
) -> Result<Solve, CollocationError> {
    quadrature::check_lambda(cfg.lambda)?;
    let scaled = scale_to_unit(problem)?;
    let grid = Arc::new(CollocationGrid::new(n, cfg.alpha, cfg.beta, cfg.lambda)?);
    let q = cfg.quad_points.unwrap_or(n + 1);
    let beta_hat = 1.0 / cfg.lambda - 1.0;
    let quad_mu = quadrature::fractional_gauss_jacobi(q, -scaled.mu, beta_hat, 1.0)?;
    let quad_hat = quadrature::fractional_gauss_jacobi(q, 0.0, beta_hat, 1.0)?;
    let system = assemble(&scaled, &grid, &quad_mu, &quad_hat)?;
    let solution = solve(&system, grid)?;
    Ok(Solve {
        scaled,
        system,
        solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::oracle::{adaptive_singular, SingularQuadrature};
    use crate::problem::{build_example, kernel, scalar, ExampleId, ExampleOptions};

    fn rules(n: usize, mu: f64, lambda: f64) -> (FractionalRule, FractionalRule) {
        let b = 1.0 / lambda - 1.0;
        (
            quadrature::fractional_gauss_jacobi(n, -mu, b, 1.0).unwrap(),
            quadrature::fractional_gauss_jacobi(n, 0.0, b, 1.0).unwrap(),
        )
    }

    fn setup(
        p: &VideProblem,
        n: usize,
        lambda: f64,
    ) -> (ScaledProblem, Arc<CollocationGrid>, SystemMatrices) {
        let s = scale_to_unit(p).unwrap();
        let g = Arc::new(CollocationGrid::new(n, -0.5, -0.5, lambda).unwrap());
        let (qm, qh) = rules(n + 1, p.mu, lambda);
        let sys = assemble(&s, &g, &qm, &qh).unwrap();
        (s, g, sys)
    }

    #[test]
    fn ratio_is_one_for_unit_lambda() {
        let mut p = VideProblem::zero(0.5, 0.5, 1.0, 0.0);
        p.k1 = kernel(|t, s| 2.0 + t * s);
        let s = scale_to_unit(&p).unwrap();
        for &xi in &[0.01, 0.5, 0.999] {
            let th = 0.7;
            let k = kernel_tilde(&s, th, xi, KernelTerm::Current, 1.0);
            let expected = th.powf(0.5) * s.kbar1(th, th * xi);
            assert!((k - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn ratio_limit_at_unit_xi() {
        for &(lambda, mu) in &[(0.5, 0.5), (1.0 / 3.0, 1.0 / 3.0), (0.25, 0.75)] {
            let limit = f64::powf(lambda, mu);
            let a = kernel_ratio(1.0 - 1e-12, lambda, mu);
            let b = kernel_ratio(1.0 - 1e-6, lambda, mu);
            assert!((a - limit).abs() < 1e-11, "{a} vs {limit}");
            // first-order deviation: μ (m-1)/2 · δ · λ^μ
            let m = 1.0 / lambda;
            assert!((b - limit * (1.0 + mu * (m - 1.0) * 1e-6 / 2.0)).abs() < 1e-11);
        }
    }

    #[test]
    fn ratio_is_monotone_and_finite_towards_one() {
        let (lambda, mu) = (0.5, 0.5);
        let limit = f64::powf(lambda, mu);
        let mut prev = f64::INFINITY;
        for k in 4..=14 {
            let r = kernel_ratio(1.0 - 10f64.powi(-k), lambda, mu);
            assert!(r.is_finite());
            assert!(r <= prev + 1e-16, "k={k}");
            assert!(r >= limit - 1e-15);
            prev = r;
        }
        assert!((prev - limit).abs() < 1e-13);
    }

    #[test]
    fn kernel_tilde_hand_value() {
        let mut p = VideProblem::zero(0.5, 0.5, 1.0, 0.0);
        p.k1 = kernel(|_, _| 1.0);
        let s = scale_to_unit(&p).unwrap();
        let k = kernel_tilde(&s, 0.25, 0.36, KernelTerm::Current, 0.5);
        // 2 · 0.25^{1/2} · ((1 - 0.36²)/(1 - 0.36))^{-1/2} = (0.8704/0.64)^{-1/2}
        let expected = (1.36f64).powf(-0.5);
        assert!((k - expected).abs() < 1e-14, "{k} vs {expected}");
    }

    #[test]
    fn zero_coefficients_give_zero_kernel_blocks() {
        let p = VideProblem::zero(0.5, 0.3, 1.0, 0.0);
        let (_, g, sys) = setup(&p, 8, 0.5);
        assert!(sys.a_diag.iter().chain(&sys.b_diag).all(|&x| x == 0.0));
        assert_eq!(sys.c.max_abs(), 0.0);
        assert_eq!(sys.d.max_abs(), 0.0);
        for (i, &th) in g.points.iter().enumerate() {
            let re = sys.e.row_sums()[i];
            let rh = sys.h.row_sums()[i];
            assert!((re - th).abs() <= 1e-12 * th);
            assert!((rh - 0.3 * th).abs() <= 1e-12 * th);
        }
    }

    #[test]
    fn integration_matrix_is_exact_on_muntz_polynomials() {
        use proptest::strategy::{Strategy, ValueTree};
        use proptest::test_runner::TestRunner;
        let mut runner = TestRunner::deterministic();
        for &lambda in &[1.0, 0.5, 1.0 / 3.0] {
            let n = 10;
            let p = VideProblem::zero(0.5, 0.4, 1.0, 0.0);
            let (_, g, sys) = setup(&p, n, lambda);
            for _ in 0..20 {
                let coeffs = proptest::collection::vec(-1.0f64..1.0, n + 1)
                    .new_tree(&mut runner)
                    .unwrap()
                    .current();
                let poly = |th: f64| -> f64 {
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, c)| c * th.powf(k as f64 * lambda))
                        .sum()
                };
                // term-by-term antiderivative of θ^{kλ}
                let integral = |th: f64| -> f64 {
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, c)| {
                            c * th.powf(k as f64 * lambda + 1.0) / (k as f64 * lambda + 1.0)
                        })
                        .sum()
                };
                let vals: Vec<f64> = g.points.iter().map(|&t| poly(t)).collect();
                let ev = sys.e.mul_vec(&vals);
                let hv = sys.h.mul_vec(&vals);
                for (i, &th) in g.points.iter().enumerate() {
                    assert!((ev[i] - integral(th)).abs() <= 1e-12, "λ={lambda} i={i}");
                    // ∫_0^{εθ} p = ε ∫_0^θ p(εη) dη
                    assert!(
                        (hv[i] - integral(0.4 * th)).abs() <= 1e-12,
                        "λ={lambda} i={i}"
                    );
                }
            }
        }
    }

    #[test]
    fn constant_kernel_row_sums() {
        for &(mu, lambda) in &[(0.5, 0.5), (1.0 / 3.0, 1.0 / 3.0), (0.5, 1.0), (0.25, 0.25)] {
            let mut p = VideProblem::zero(mu, 0.5, 1.0, 0.0);
            p.k1 = kernel(|_, _| 1.0);
            let (_, g, sys) = setup(&p, 12, lambda);
            for (i, &th) in g.points.iter().enumerate() {
                let expected = th.powf(1.0 - mu) / (1.0 - mu);
                let got = sys.c.row_sums()[i];
                assert!(
                    (got - expected).abs() <= 1e-10 * expected,
                    "μ={mu} λ={lambda} i={i}"
                );
            }
        }
    }

    #[test]
    fn kernel_row_sums_match_oracle_for_smooth_kernel() {
        let p = build_example(ExampleId::Ex54, &ExampleOptions::default()).unwrap();
        for n in [10, 14] {
            let (s, g, sys) = setup(&p, n, 0.5);
            let quad = SingularQuadrature::new(s.mu, 0.5, 200).unwrap();
            for (i, &th) in g.points.iter().enumerate() {
                let oracle = quad.integrate(th, |eta| s.kbar1(th, eta));
                let got = sys.c.row_sums()[i];
                assert!(
                    (got - oracle).abs() <= 1e-8 * oracle.abs(),
                    "N={n} i={i}: {got} vs {oracle}"
                );
                let oracle_d = quad.integrate(th, |eta| s.kbar2(th, s.eps * eta));
                let got_d = sys.d.row_sums()[i];
                assert!((got_d - oracle_d).abs() <= 1e-8 * oracle_d.abs());
            }
        }
    }

    #[test]
    fn kernel_entries_match_adaptive_integration() {
        let p = build_example(ExampleId::Ex54, &ExampleOptions::default()).unwrap();
        let s = scale_to_unit(&p).unwrap();
        let (n, lambda) = (3, 0.5);
        let g = Arc::new(CollocationGrid::new(n, -0.5, -0.5, lambda).unwrap());
        let (qm, qh) = rules(40, p.mu, lambda);
        let sys = assemble(&s, &g, &qm, &qh).unwrap();
        for (i, &th) in g.points.iter().enumerate() {
            for j in 0..=n {
                // ∫_0^1 (1-ξ)^{-μ} ξ^{1/λ-1} K̃1 F_j dξ
                let integrand = |xi: f64| {
                    xi.powf(1.0 / lambda - 1.0)
                        * kernel_tilde(&s, th, xi, KernelTerm::Current, lambda)
                        * g.basis_eval(j, th * xi.powf(1.0 / lambda))
                };
                // adaptive_singular integrates ∫_0^1 (1-ξ)^{-μ} q(ξ) dξ with x = 1
                let brute = adaptive_singular(p.mu, 1.0, integrand, 1e-14).unwrap();
                let got = sys.c[(i, j)];
                assert!(
                    (got - brute).abs() <= 1e-10 * brute.abs().max(1e-3),
                    "i={i} j={j}: {got} vs {brute}"
                );
            }
        }
    }

    #[test]
    fn rejects_mismatched_rules() {
        let p = VideProblem::zero(0.5, 0.5, 1.0, 0.0);
        let s = scale_to_unit(&p).unwrap();
        let g = CollocationGrid::new(4, -0.5, -0.5, 0.5).unwrap();
        let (qm, qh) = rules(5, 0.25, 0.5);
        assert!(matches!(
            assemble(&s, &g, &qm, &qh),
            Err(CollocationError::RuleMismatch(_))
        ));
        let (qm, qh) = rules(5, 0.5, 1.0);
        assert!(matches!(
            assemble(&s, &g, &qm, &qh),
            Err(CollocationError::RuleMismatch(_))
        ));
        let (qm, qh) = rules(5, 0.5, 0.5);
        let sys = assemble(&s, &g, &qm, &qh).unwrap();
        let g2 = Arc::new(CollocationGrid::new(6, -0.5, -0.5, 0.5).unwrap());
        assert!(matches!(
            solve(&sys, g2),
            Err(CollocationError::Dimension(_))
        ));
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let mut p = build_example(ExampleId::Ex54, &ExampleOptions::default()).unwrap();
        p.f1 = scalar(|_| 0.0);
        p.y0 = 0.0;
        let r = solve_problem(&p, 10, &SolverConfig::new(0.5)).unwrap();
        let sol = &r.solution;
        assert!(sol
            .u_star
            .iter()
            .chain(&sol.u)
            .chain(&sol.v)
            .all(|x| x.abs() <= 1e-14));
    }

    #[test]
    fn constant_solution() {
        let p = VideProblem::zero(0.5, 0.5, 0.7, 2.5);
        let r = solve_problem(&p, 9, &SolverConfig::new(0.5)).unwrap();
        let sol = &r.solution;
        for i in 0..sol.u.len() {
            assert!(sol.u_star[i].abs() <= 1e-13);
            assert!((sol.u[i] - 2.5).abs() <= 1e-13);
            assert!((sol.v[i] - 2.5).abs() <= 1e-13);
        }
        for th in [0.0, 0.33, 1.0] {
            let (phi, dphi) = sol.eval(th);
            assert!((phi - 2.5).abs() < 1e-13 && dphi.abs() < 1e-13);
        }
    }

    #[test]
    fn block_equations_hold_after_solve() {
        for id in ExampleId::ALL {
            let p = build_example(id, &ExampleOptions::default()).unwrap();
            let r = solve_problem(&p, 12, &SolverConfig::recommended(&p)).unwrap();
            let res = r.solution.residuals(&r.system);
            assert!(res.iter().all(|&x| x <= 1e-11), "{id}: {res:?}");
        }
    }

    #[test]
    fn nodal_values_and_interpolant() {
        let p = build_example(ExampleId::Ex51, &ExampleOptions::default()).unwrap();
        let r = solve_problem(&p, 12, &SolverConfig::new(0.5)).unwrap();
        let sol = &r.solution;
        for (i, &th) in sol.grid.points.iter().enumerate() {
            assert_eq!(sol.eval(th), (sol.u[i], sol.u_star[i]));
            let exact = r.scaled.exact_phi(th).unwrap();
            assert!((sol.u[i] - exact).abs() < 1e-9);
        }
        // θ = 0 is not a collocation point, so φ_N(0) only approximates y0
        let (phi0, _) = sol.eval(0.0);
        assert!(phi0.abs() < 1e-9);
    }

    #[test]
    fn singular_system_is_reported() {
        let mut m = Matrix::identity(3);
        m[(2, 2)] = 0.0;
        assert!(matches!(
            lu_solve(m, vec![1.0; 3]),
            Err(CollocationError::Singular { .. })
        ));
        let mut m = Matrix::identity(3);
        m[(0, 1)] = 2.0;
        m[(2, 0)] = -1.0;
        let x = lu_solve(m.clone(), vec![1.0, 2.0, 3.0]).unwrap();
        let back = m.mul_vec(&x);
        for (a, b) in back.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
