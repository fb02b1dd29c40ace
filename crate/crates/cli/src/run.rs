use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use muntz_vide::analysis::{
    convergence_sweep, fit_rates, measure_row, reference_solution, AnalysisError, ConvergenceTable,
    NormConfig, RateReport, ReferenceSolution, SweepConfig, TableMeta, Truth,
};
use muntz_vide::collocation::CollocationError;
use muntz_vide::problem::{recommended_lambda, scale_to_unit, ProblemError, VideProblem};
use muntz_vide::{build_example, ExampleOptions, SolverConfig};
use thiserror::Error;

use crate::config::{Forcing, Mode, ProblemSel, RunSpec};
use crate::output;
use crate::selector;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("problem setup: {0}")]
    Problem(#[from] ProblemError),
    #[error("custom coefficient '{key}': {msg}")]
    Selector { key: &'static str, msg: String },
    #[error("reference solve at N = {n}: {source}")]
    Reference { n: usize, source: CollocationError },
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Outcome of a run; `table.all_ok()` decides the exit status.
#[derive(Debug)]
pub struct RunReport {
    pub table: ConvergenceTable,
    pub rates: Option<RateReport>,
    pub written: Vec<PathBuf>,
}

pub fn build_problem(spec: &RunSpec) -> Result<VideProblem, RunError> {
    match spec.problem {
        ProblemSel::Example(id) => {
            let opts = ExampleOptions {
                mu: spec.mu,
                eps: spec.eps,
                horizon: spec.horizon,
                y0: spec.y0,
            };
            let p = build_example(id, &opts)?;
            Ok(match spec.forcing {
                Forcing::Corrected => p,
                Forcing::Printed => p.with_printed_forcing(),
            })
        }
        ProblemSel::Custom => {
            let c = &spec.coefficients;
            let mut p = VideProblem::zero(
                spec.mu.expect("validated"),
                spec.eps.unwrap_or(muntz_vide::problem::DEFAULT_EPS),
                spec.horizon.unwrap_or(1.0),
                spec.y0.unwrap_or(0.0),
            );
            p.name = "custom".into();
            let scalar = |key: &'static str, text: &Option<String>| match text {
                Some(t) => selector::build_scalar(t)
                    .map(Some)
                    .map_err(|msg| RunError::Selector { key, msg }),
                None => Ok(None),
            };
            let kernel = |key: &'static str, text: &Option<String>| match text {
                Some(t) => selector::build_kernel(t)
                    .map(Some)
                    .map_err(|msg| RunError::Selector { key, msg }),
                None => Ok(None),
            };
            if let Some(f) = scalar("a1", &c.a1)? {
                p.a1 = f;
            }
            if let Some(f) = scalar("b1", &c.b1)? {
                p.b1 = f;
            }
            if let Some(f) = scalar("f1", &c.f1)? {
                p.f1 = f;
            }
            if let Some(k) = kernel("k1", &c.k1)? {
                p.k1 = k;
            }
            if let Some(k) = kernel("k2", &c.k2)? {
                p.k2 = k;
            }
            p.validate()?;
            Ok(p)
        }
    }
}

pub fn sweep_config(spec: &RunSpec, problem: &VideProblem) -> SweepConfig {
    SweepConfig {
        solver: SolverConfig {
            lambda: spec
                .lambda
                .unwrap_or_else(|| recommended_lambda(problem.mu)),
            alpha: spec.alpha,
            beta: spec.beta,
            quad_points: spec.quad_points,
        },
        norms: NormConfig {
            linf_grid: spec.linf_grid,
            l2_points: spec.l2_points,
            l2_alpha: spec.l2_alpha,
            l2_beta: spec.l2_beta,
        },
        timing: spec.timing,
    }
}

/// Runs the spec, writes the CSV, plot data and (in solve mode) the nodal
/// dump, and prints one summary line per row to `log`.
pub fn run(spec: &RunSpec, log: &mut dyn Write) -> Result<RunReport, RunError> {
    let problem = build_problem(spec)?;
    let cfg = sweep_config(spec, &problem);
    let ns = spec.n.values();

    let reference: Option<ReferenceSolution> =
        if spec.mode == Mode::Compare || problem.exact.is_none() {
            let r = reference_solution(&problem, &cfg.solver, spec.ref_n).map_err(|source| {
                RunError::Reference {
                    n: spec.ref_n,
                    source,
                }
            })?;
            Some(r)
        } else {
            None
        };

    let _ = writeln!(
        log,
        "problem {} (mu = {}, eps = {}, T = {}), lambda = {}, mode {}{}",
        problem.name,
        problem.mu,
        problem.eps,
        problem.horizon,
        cfg.solver.lambda,
        spec.mode,
        reference
            .as_ref()
            .map(|r| format!(", reference N = {}", r.n))
            .unwrap_or_default()
    );

    let mut written = Vec::new();
    let table = if spec.mode == Mode::Solve {
        let scaled = scale_to_unit(&problem)?;
        let truth = match &reference {
            Some(r) => Truth::Reference(r),
            None => Truth::Exact(&scaled),
        };
        let (row, solution) = measure_row(&problem, ns[0], &cfg, truth);
        if let (Some(sol), Some(path)) = (solution, spec.nodal_path()) {
            ensure_parent(&path)?;
            fs::write(&path, output::nodal_string(&sol)).map_err(io_err(&path))?;
            written.push(path);
        }
        ConvergenceTable {
            meta: TableMeta::new(&problem, &cfg.solver),
            rows: vec![row],
        }
    } else {
        convergence_sweep(&problem, &cfg, &ns, reference.as_ref())?
    };

    for row in &table.rows {
        let _ = writeln!(log, "{}", output::summary_line(row));
    }
    let rates = fit_rates(&table).ok();
    if let Some(r) = &rates {
        let _ = writeln!(
            log,
            "rate: {} (log10 err vs N slope {:.3}, R^2 {:.3}; log-log slope {:.3})",
            r.regime, r.exponential.slope, r.exponential.r_squared, r.algebraic.slope
        );
    }

    ensure_parent(&spec.output)?;
    output::write_csv(&table, &spec.output).map_err(io_err(&spec.output))?;
    written.push(spec.output.clone());
    if table.rows.iter().any(|r| r.is_ok()) {
        let plot = spec.plot_path();
        ensure_parent(&plot)?;
        output::emit_plot_data(&table, &plot).map_err(io_err(&plot))?;
        written.push(plot);
    }
    Ok(RunReport {
        table,
        rates,
        written,
    })
}

fn ensure_parent(path: &Path) -> Result<(), RunError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(io_err(dir)),
        _ => Ok(()),
    }
}
