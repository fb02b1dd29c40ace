//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Three operations are exposed: solving one of the built-in examples,
//! running a convergence sweep, and sampling the Müntz Lagrange basis.
//! Arrays cross the boundary as `Float64Array`s.

use muntz_vide::analysis::{convergence_sweep, fit_rates, reference_solution, SweepConfig, Timing};
use muntz_vide::{
    build_example, solve_problem, CollocationGrid, ExampleId, ExampleOptions, SolverConfig,
    VideProblem,
};
use wasm_bindgen::prelude::*;

/// Reference degree used when an example has no closed form.
const REFERENCE_N: usize = 24;

fn example(id: &str, eps: Option<f64>) -> Result<VideProblem, String> {
    let id: ExampleId = id.parse()?;
    let opts = ExampleOptions {
        eps,
        ..Default::default()
    };
    build_example(id, &opts).map_err(|e| e.to_string())
}

fn check_lambda(lambda: f64) -> Result<(), String> {
    if lambda > 0.0 && lambda <= 1.0 {
        Ok(())
    } else {
        Err(format!("lambda = {lambda} is outside (0, 1]"))
    }
}

/// A solve sampled on a uniform grid in `t`.
#[wasm_bindgen]
pub struct SolveView {
    t: Vec<f64>,
    y: Vec<f64>,
    /// Exact or reference values.
    truth: Vec<f64>,
    nodes_t: Vec<f64>,
    nodes_y: Vec<f64>,
    has_exact: bool,
}

#[wasm_bindgen]
impl SolveView {
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn y(&self) -> Vec<f64> {
        self.y.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn truth(&self) -> Vec<f64> {
        self.truth.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn nodes_t(&self) -> Vec<f64> {
        self.nodes_t.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn nodes_y(&self) -> Vec<f64> {
        self.nodes_y.clone()
    }
    /// `false` when `truth` is a high-degree reference solve.
    #[wasm_bindgen(getter)]
    pub fn has_exact(&self) -> bool {
        self.has_exact
    }
    /// `|y - truth|` at the sample points.
    pub fn error(&self) -> Vec<f64> {
        self.y
            .iter()
            .zip(&self.truth)
            .map(|(a, b)| (a - b).abs())
            .collect()
    }
}

pub fn solve_view(
    id: &str,
    n: usize,
    lambda: f64,
    eps: Option<f64>,
    samples: usize,
) -> Result<SolveView, String> {
    check_lambda(lambda)?;
    let p = example(id, eps)?;
    let cfg = SolverConfig::new(lambda);
    let s = solve_problem(&p, n, &cfg).map_err(|e| e.to_string())?;
    let horizon = p.horizon;
    let reference = match &p.exact {
        Some(_) => None,
        None => {
            Some(reference_solution(&p, &cfg, REFERENCE_N.max(n + 6)).map_err(|e| e.to_string())?)
        }
    };
    let samples = samples.max(2);
    let mut view = SolveView {
        t: Vec::with_capacity(samples),
        y: Vec::with_capacity(samples),
        truth: Vec::with_capacity(samples),
        nodes_t: s
            .solution
            .grid
            .points
            .iter()
            .map(|th| th * horizon)
            .collect(),
        nodes_y: s.solution.u.clone(),
        has_exact: p.exact.is_some(),
    };
    for i in 0..samples {
        let theta = i as f64 / (samples - 1) as f64;
        view.t.push(theta * horizon);
        view.y.push(s.solution.eval(theta).0);
        view.truth.push(match &reference {
            Some(r) => r.eval(theta).0,
            None => s.scaled.exact_phi(theta).unwrap_or(f64::NAN),
        });
    }
    Ok(view)
}

/// Solves an example (`"5.1"`..`"5.4"`) at degree `n`. A nonpositive `eps`
/// keeps the example's own delay factor.
#[wasm_bindgen]
pub fn solve_example(
    id: &str,
    n: usize,
    lambda: f64,
    eps: f64,
    samples: usize,
) -> Result<SolveView, JsError> {
    let eps = (eps > 0.0).then_some(eps);
    solve_view(id, n, lambda, eps, samples).map_err(|e| JsError::new(&e))
}

/// Sweep rows flattened as `[N, l2_e, linf_e, l2_estar, linf_estar, ...]`,
/// followed by the fitted regime as a code (0 exponential, 1 algebraic,
/// 2 stagnant, -1 not enough rows) and the semilog slope.
pub fn sweep_rows(
    id: &str,
    lambda: f64,
    n_min: usize,
    n_max: usize,
    step: usize,
) -> Result<Vec<f64>, String> {
    check_lambda(lambda)?;
    if n_min < 2 || n_min > n_max || step == 0 {
        return Err(format!("bad range {n_min}..={n_max} step {step}"));
    }
    let p = example(id, None)?;
    let ns: Vec<usize> = (n_min..=n_max).step_by(step).collect();
    let mut cfg = SweepConfig::new(SolverConfig::new(lambda));
    cfg.timing = Timing::Off;
    let reference = match &p.exact {
        Some(_) => None,
        None => Some(
            reference_solution(&p, &cfg.solver, REFERENCE_N.max(n_max + 6))
                .map_err(|e| e.to_string())?,
        ),
    };
    let table = convergence_sweep(&p, &cfg, &ns, reference.as_ref()).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(5 * ns.len() + 2);
    for r in &table.rows {
        let e = &r.norms;
        out.extend([r.n as f64, e.l2_e, e.linf_e, e.l2_estar, e.linf_estar]);
    }
    match fit_rates(&table) {
        Ok(rate) => {
            let code = match rate.regime {
                muntz_vide::Regime::Exponential => 0.0,
                muntz_vide::Regime::Algebraic => 1.0,
                muntz_vide::Regime::Stagnant => 2.0,
            };
            out.extend([code, rate.exponential.slope]);
        }
        Err(_) => out.extend([-1.0, f64::NAN]),
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn convergence(
    id: &str,
    lambda: f64,
    n_min: usize,
    n_max: usize,
    step: usize,
) -> Result<Vec<f64>, JsError> {
    sweep_rows(id, lambda, n_min, n_max, step).map_err(|e| JsError::new(&e))
}

/// Row-major `(N + 2) × samples`: the `N + 1` Lagrange basis functions on a
/// uniform `θ` grid, then the Lebesgue function.
pub fn basis_samples(n: usize, lambda: f64, samples: usize) -> Result<Vec<f64>, String> {
    check_lambda(lambda)?;
    let g = CollocationGrid::new(n, -0.5, -0.5, lambda).map_err(|e| e.to_string())?;
    let samples = samples.max(2);
    let mut out = vec![0.0; (n + 2) * samples];
    let mut row = vec![0.0; n + 1];
    for i in 0..samples {
        let theta = i as f64 / (samples - 1) as f64;
        g.basis_eval_into(theta, &mut row);
        let mut leb = 0.0;
        for (j, v) in row.iter().enumerate() {
            out[j * samples + i] = *v;
            leb += v.abs();
        }
        out[(n + 1) * samples + i] = leb;
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn basis(n: usize, lambda: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    basis_samples(n, lambda, samples).map_err(|e| JsError::new(&e))
}

/// Collocation points `θ_j` of the grid.
#[wasm_bindgen]
pub fn collocation_points(n: usize, lambda: f64) -> Result<Vec<f64>, JsError> {
    check_lambda(lambda).map_err(|e| JsError::new(&e))?;
    CollocationGrid::new(n, -0.5, -0.5, lambda)
        .map(|g| g.points)
        .map_err(|e| JsError::new(&e.to_string()))
}
