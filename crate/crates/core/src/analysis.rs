//! Error norms, convergence sweeps and rate fitting.

use std::fmt;

use thiserror::Error;

use crate::collocation::{solve_problem, CollocationError, DiscreteSolution, Solve, SolverConfig};
use crate::problem::{scale_to_unit, ProblemError, ScaledProblem, VideProblem};
use crate::quadrature::{fractional_gauss_jacobi, QuadratureError};

/// Left end of the L∞ sampling grid; keeps `θ = 0` out, where exact
/// derivatives may be singular.
pub const LINF_DELTA: f64 = 1e-12;
pub const DEFAULT_LINF_GRID: usize = 2001;
pub const MIN_L2_POINTS: usize = 200;

/// Errors are floored at this value before taking logarithms.
const LOG_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("N list must be nonempty and strictly increasing, got {0:?}")]
    BadNList(Vec<usize>),
    #[error("problem '{0}' has no exact solution and no reference was supplied")]
    NoReference(String),
    #[error("rate fit needs at least 3 successful rows, got {0}")]
    InsufficientData(usize),
    #[error("reference N = {n_ref} must exceed every compared N (max {max_n})")]
    ReferenceTooCoarse { n_ref: usize, max_n: usize },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Collocation(#[from] CollocationError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// `(Σ_k err(θ_k)² w_k)^{1/2}` with the `m`-point Gauss–Jacobi rule for
/// `(1-θ)^α θ^β` on `[0, 1]`.
pub fn weighted_l2_error<F: Fn(f64) -> f64>(
    err: F,
    alpha: f64,
    beta: f64,
    m: usize,
) -> Result<f64, QuadratureError> {
    let rule = fractional_gauss_jacobi(m, alpha, beta, 1.0)?;
    Ok(rule.integrate(|t| err(t).powi(2)).sqrt())
}

/// `max |err|` over `grid_size` uniform points on `[LINF_DELTA, 1]` together
/// with `extra` (typically the collocation points).
pub fn linf_error<F: Fn(f64) -> f64>(err: F, grid_size: usize, extra: &[f64]) -> f64 {
    assert!(grid_size >= 2, "L-infinity grid needs at least 2 points");
    let h = (1.0 - LINF_DELTA) / (grid_size - 1) as f64;
    (0..grid_size)
        .map(|i| {
            if i + 1 == grid_size {
                1.0
            } else {
                LINF_DELTA + i as f64 * h
            }
        })
        .chain(extra.iter().copied())
        .fold(0.0, |m: f64, t| {
            let e = err(t).abs();
            // NaN must not vanish in max()
            if e.is_nan() {
                f64::NAN
            } else {
                m.max(e)
            }
        })
}

/// Norm settings for error evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormConfig {
    pub linf_grid: usize,
    /// `None` means `max(4N, 200)`.
    pub l2_points: Option<usize>,
    /// Weight exponents of the L² norm; `None` follows the collocation grid.
    pub l2_alpha: Option<f64>,
    pub l2_beta: Option<f64>,
}

impl Default for NormConfig {
    fn default() -> Self {
        Self {
            linf_grid: DEFAULT_LINF_GRID,
            l2_points: None,
            l2_alpha: None,
            l2_beta: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timing {
    /// Wall-clock milliseconds per row.
    Wall,
    /// Report 0; makes tables reproducible byte for byte.
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub solver: SolverConfig,
    pub norms: NormConfig,
    pub timing: Timing,
}

impl SweepConfig {
    pub fn new(solver: SolverConfig) -> Self {
        Self {
            solver,
            norms: NormConfig::default(),
            timing: Timing::Wall,
        }
    }
}

/// High-resolution numerical solution used in place of a closed form.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub n: usize,
    pub solution: DiscreteSolution,
}

impl ReferenceSolution {
    /// `(φ(θ), φ'(θ))` of the reference.
    pub fn eval(&self, theta: f64) -> (f64, f64) {
        self.solution.eval(theta)
    }
}

/// Solves at `n_ref` to obtain a stand-in for the exact solution.
pub fn reference_solution(
    problem: &VideProblem,
    cfg: &SolverConfig,
    n_ref: usize,
) -> Result<ReferenceSolution, CollocationError> {
    let s = solve_problem(problem, n_ref, cfg)?;
    Ok(ReferenceSolution {
        n: n_ref,
        solution: s.solution,
    })
}

/// What errors are measured against.
#[derive(Debug, Clone, Copy)]
pub enum Truth<'a> {
    Exact(&'a ScaledProblem),
    Reference(&'a ReferenceSolution),
}

impl Truth<'_> {
    fn eval(&self, theta: f64) -> (f64, f64) {
        match self {
            // exact_* only return None without a closed form, which the
            // caller has ruled out
            Truth::Exact(s) => (
                s.exact_phi(theta).unwrap_or(f64::NAN),
                s.exact_dphi(theta).unwrap_or(f64::NAN),
            ),
            Truth::Reference(r) => r.eval(theta),
        }
    }
}

/// The four error norms of one solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2_e: f64,
    pub linf_e: f64,
    pub l2_estar: f64,
    pub linf_estar: f64,
}

impl ErrorNorms {
    pub const FAILED: ErrorNorms = ErrorNorms {
        l2_e: f64::NAN,
        linf_e: f64::NAN,
        l2_estar: f64::NAN,
        linf_estar: f64::NAN,
    };
}

/// Norms of `e = φ - φ_N` and `e* = φ' - φ*_N`.
pub fn error_norms(
    sol: &DiscreteSolution,
    truth: Truth<'_>,
    norms: &NormConfig,
) -> Result<ErrorNorms, QuadratureError> {
    let grid = &sol.grid;
    let m = norms
        .l2_points
        .unwrap_or_else(|| (4 * grid.n).max(MIN_L2_POINTS));
    let alpha = norms.l2_alpha.unwrap_or(grid.alpha);
    let beta = norms.l2_beta.unwrap_or(grid.beta);
    let e = |t: f64| truth.eval(t).0 - sol.eval(t).0;
    let estar = |t: f64| truth.eval(t).1 - sol.eval(t).1;
    Ok(ErrorNorms {
        l2_e: weighted_l2_error(e, alpha, beta, m)?,
        linf_e: linf_error(e, norms.linf_grid, &grid.points),
        l2_estar: weighted_l2_error(estar, alpha, beta, m)?,
        linf_estar: linf_error(estar, norms.linf_grid, &grid.points),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub norms: ErrorNorms,
    pub runtime_ms: f64,
    /// Solver or norm failure; the norms are NaN when set.
    pub failure: Option<String>,
}

impl ConvergenceRow {
    pub fn is_ok(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableMeta {
    pub problem: String,
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub eps: f64,
    pub mu: f64,
    pub horizon: f64,
}

impl TableMeta {
    pub fn new(problem: &VideProblem, solver: &SolverConfig) -> Self {
        Self {
            problem: problem.name.clone(),
            lambda: solver.lambda,
            alpha: solver.alpha,
            beta: solver.beta,
            eps: problem.eps,
            mu: problem.mu,
            horizon: problem.horizon,
        }
    }
}

/// Rows sorted by strictly increasing `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub meta: TableMeta,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(ConvergenceRow::is_ok)
    }

    pub fn row(&self, n: usize) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

fn elapsed_ms(start: Option<Instant>) -> f64 {
    start.map_or(0.0, |s| s.elapsed().as_secs_f64() * 1e3)
}

#[cfg(not(target_arch = "wasm32"))]
use std::time::Instant;

// std::time::Instant panics on wasm32-unknown-unknown; timing is reported
// as zero there.
#[cfg(target_arch = "wasm32")]
#[derive(Clone, Copy)]
struct Instant;

#[cfg(target_arch = "wasm32")]
impl Instant {
    fn now() -> Self {
        Instant
    }
    fn elapsed(&self) -> std::time::Duration {
        std::time::Duration::ZERO
    }
}

/// Solves at `n` and measures the errors against `truth`. A failure is
/// recorded in the row rather than returned.
pub fn measure_row(
    problem: &VideProblem,
    n: usize,
    cfg: &SweepConfig,
    truth: Truth<'_>,
) -> (ConvergenceRow, Option<DiscreteSolution>) {
    let start = (cfg.timing == Timing::Wall).then(Instant::now);
    let result = solve_problem(problem, n, &cfg.solver)
        .map_err(|e| e.to_string())
        .and_then(|Solve { solution, .. }| {
            let norms = error_norms(&solution, truth, &cfg.norms).map_err(|e| e.to_string())?;
            Ok((norms, solution))
        });
    let runtime_ms = elapsed_ms(start);
    match result {
        Ok((norms, solution)) => (
            ConvergenceRow {
                n,
                norms,
                runtime_ms,
                failure: None,
            },
            Some(solution),
        ),
        Err(msg) => (
            ConvergenceRow {
                n,
                norms: ErrorNorms::FAILED,
                runtime_ms,
                failure: Some(msg),
            },
            None,
        ),
    }
}

/// One solve per `N`, measured against the closed form or, when given, the
/// reference. Per-row failures are recorded in the row; the sweep continues.
pub fn convergence_sweep(
    problem: &VideProblem,
    cfg: &SweepConfig,
    n_list: &[usize],
    reference: Option<&ReferenceSolution>,
) -> Result<ConvergenceTable, AnalysisError> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalysisError::BadNList(n_list.to_vec()));
    }
    if reference.is_none() && problem.exact.is_none() {
        return Err(AnalysisError::NoReference(problem.name.clone()));
    }
    if let Some(r) = reference {
        let max_n = *n_list.last().expect("nonempty");
        if r.n <= max_n {
            return Err(AnalysisError::ReferenceTooCoarse { n_ref: r.n, max_n });
        }
    }
    let scaled = scale_to_unit(problem)?;
    let truth = match reference {
        Some(r) => Truth::Reference(r),
        None => Truth::Exact(&scaled),
    };
    let rows = n_list
        .iter()
        .map(|&n| measure_row(problem, n, cfg, truth).0)
        .collect();
    Ok(ConvergenceTable {
        meta: TableMeta::new(problem, &cfg.solver),
        rows,
    })
}

/// Which error column a rate fit uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    L2E,
    LinfE,
    L2EStar,
    LinfEStar,
}

impl Channel {
    pub fn pick(self, n: &ErrorNorms) -> f64 {
        match self {
            Channel::L2E => n.l2_e,
            Channel::LinfE => n.linf_e,
            Channel::L2EStar => n.l2_estar,
            Channel::LinfEStar => n.linf_estar,
        }
    }
}

/// Least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination.
    pub r_squared: f64,
    /// Root-mean-square residual.
    pub rms_residual: f64,
}

fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 0.0 };
    LineFit {
        slope,
        intercept,
        r_squared,
        rms_residual: (ss_res / n).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Exponential,
    Algebraic,
    Stagnant,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Exponential => "exponential",
            Regime::Algebraic => "algebraic",
            Regime::Stagnant => "stagnant",
        })
    }
}

pub const EXPONENTIAL_MIN_R2: f64 = 0.95;
pub const EXPONENTIAL_MAX_SLOPE: f64 = -0.5;
/// Log-log slope below which a non-exponential series counts as decaying.
pub const ALGEBRAIC_MAX_SLOPE: f64 = -0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub channel: Channel,
    /// `log10(err)` against `N`.
    pub exponential: LineFit,
    /// `log10(err)` against `log10(N)`.
    pub algebraic: LineFit,
    pub regime: Regime,
    pub rows_used: usize,
}

/// Rate fit of `points = [(N, err)]`.
pub fn fit_series(points: &[(usize, f64)], channel: Channel) -> Result<RateReport, AnalysisError> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| e.is_finite())
        .map(|&(n, e)| (n as f64, e.max(LOG_FLOOR).log10()))
        .collect();
    if usable.len() < 3 {
        return Err(AnalysisError::InsufficientData(usable.len()));
    }
    let ns: Vec<f64> = usable.iter().map(|p| p.0).collect();
    let log_ns: Vec<f64> = ns.iter().map(|n| n.log10()).collect();
    let log_e: Vec<f64> = usable.iter().map(|p| p.1).collect();
    let exponential = fit_line(&ns, &log_e);
    let algebraic = fit_line(&log_ns, &log_e);
    let regime = if exponential.r_squared >= EXPONENTIAL_MIN_R2
        && exponential.slope <= EXPONENTIAL_MAX_SLOPE
    {
        Regime::Exponential
    } else if algebraic.slope <= ALGEBRAIC_MAX_SLOPE {
        Regime::Algebraic
    } else {
        Regime::Stagnant
    };
    Ok(RateReport {
        channel,
        exponential,
        algebraic,
        regime,
        rows_used: usable.len(),
    })
}

/// Rate fit of the L∞ error of `e` over the successful rows.
pub fn fit_rates(table: &ConvergenceTable) -> Result<RateReport, AnalysisError> {
    fit_rates_channel(table, Channel::LinfE)
}

pub fn fit_rates_channel(
    table: &ConvergenceTable,
    channel: Channel,
) -> Result<RateReport, AnalysisError> {
    let pts: Vec<(usize, f64)> = table
        .rows
        .iter()
        .filter(|r| r.is_ok())
        .map(|r| (r.n, channel.pick(&r.norms)))
        .collect();
    fit_series(&pts, channel)
}
