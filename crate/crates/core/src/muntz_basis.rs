//! Collocation grid and generalized Lagrange basis in the Müntz variable.
//!
//! The basis functions `F_j(θ) = ∏_{i≠j} (θ^λ - θ_i^λ) / (θ_j^λ - θ_i^λ)` are
//! ordinary Lagrange polynomials in `z = θ^λ`, so every evaluation maps to
//! `z` first and then uses the barycentric form with weights precomputed on
//! the `z` nodes.

use crate::quadrature::{self, QuadratureError};

/// Points closer than this (in `θ`) to a node evaluate to the exact
/// Kronecker value.
const NODE_SNAP: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct CollocationGrid {
    /// Highest basis index; the grid has `n + 1` points.
    pub n: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `θ_0 < ... < θ_N`, the zeros of `J_{N+1}^{α,β,λ}`.
    pub points: Vec<f64>,
    /// `z_j = θ_j^λ`.
    pub z_points: Vec<f64>,
    /// `1 / ∏_{i≠j} (z_j - z_i)`.
    pub barycentric_weights: Vec<f64>,
}

impl CollocationGrid {
    /// Builds the `N + 1` point grid for parameters `(α, β, λ)`.
    pub fn new(n: usize, alpha: f64, beta: f64, lambda: f64) -> Result<Self, QuadratureError> {
        if n == 0 {
            return Err(QuadratureError::NoPoints);
        }
        let rule = quadrature::fractional_gauss_jacobi(n + 1, alpha, beta, lambda)?;
        let z_points = rule.unit_nodes;
        let barycentric_weights = z_points
            .iter()
            .enumerate()
            .map(|(j, &zj)| {
                let prod: f64 = z_points
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .map(|(_, &zi)| zj - zi)
                    .product();
                1.0 / prod
            })
            .collect();
        Ok(Self {
            n,
            lambda,
            alpha,
            beta,
            points: rule.nodes,
            z_points,
            barycentric_weights,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn to_z(&self, theta: f64) -> f64 {
        if self.lambda == 1.0 {
            theta
        } else {
            theta.powf(self.lambda)
        }
    }

    /// Index of the node `theta` coincides with, if any.
    fn node_hit(&self, theta: f64, z: f64) -> Option<usize> {
        self.points
            .iter()
            .zip(&self.z_points)
            .position(|(&p, &zp)| (theta - p).abs() <= NODE_SNAP || z == zp)
    }

    /// `F_{j,λ}(θ)`.
    pub fn basis_eval(&self, j: usize, theta: f64) -> f64 {
        assert!(j <= self.n, "basis index {j} out of range 0..={}", self.n);
        let z = self.to_z(theta);
        if let Some(k) = self.node_hit(theta, z) {
            return if k == j { 1.0 } else { 0.0 };
        }
        let mut denom = 0.0;
        let mut numer = 0.0;
        for (k, (&zk, &wk)) in self
            .z_points
            .iter()
            .zip(&self.barycentric_weights)
            .enumerate()
        {
            let t = wk / (z - zk);
            denom += t;
            if k == j {
                numer = t;
            }
        }
        numer / denom
    }

    /// All basis values `[F_0(θ), ..., F_N(θ)]`.
    pub fn basis_eval_all(&self, theta: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.basis_eval_into(theta, &mut out);
        out
    }

    /// Writes the basis values at `θ` into `out` (length `N + 1`).
    pub fn basis_eval_into(&self, theta: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        let z = self.to_z(theta);
        if let Some(k) = self.node_hit(theta, z) {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[k] = 1.0;
            return;
        }
        self.basis_eval_z_into(z, out);
    }

    /// Basis values at a point given directly by its Müntz coordinate
    /// `z = θ^λ`.
    pub fn basis_eval_z_into(&self, z: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        if let Some(k) = self.z_points.iter().position(|&zk| zk == z) {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[k] = 1.0;
            return;
        }
        let mut denom = 0.0;
        for ((o, &zk), &wk) in out
            .iter_mut()
            .zip(&self.z_points)
            .zip(&self.barycentric_weights)
        {
            *o = wk / (z - zk);
            denom += *o;
        }
        out.iter_mut().for_each(|v| *v /= denom);
    }

    /// `I_{N,λ} v(θ) = Σ_j v_j F_{j,λ}(θ)` for nodal values `v_j = v(θ_j)`.
    pub fn interpolate(&self, values: &[f64], theta: f64) -> f64 {
        assert_eq!(values.len(), self.len(), "one value per grid point");
        let z = self.to_z(theta);
        if let Some(k) = self.node_hit(theta, z) {
            return values[k];
        }
        let mut numer = 0.0;
        let mut denom = 0.0;
        for ((&zk, &wk), &vk) in self
            .z_points
            .iter()
            .zip(&self.barycentric_weights)
            .zip(values)
        {
            let t = wk / (z - zk);
            numer += t * vk;
            denom += t;
        }
        numer / denom
    }

    /// Direct product form of `F_{j,λ}(θ)`; kept as a cross-check of the
    /// barycentric path for small grids.
    pub fn basis_eval_product(&self, j: usize, theta: f64) -> f64 {
        let z = self.to_z(theta);
        let zj = self.z_points[j];
        self.z_points
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, &zi)| (z - zi) / (zj - zi))
            .product()
    }

    /// Lebesgue function `Σ_j |F_{j,λ}(θ)|`.
    pub fn lebesgue_function(&self, theta: f64) -> f64 {
        self.basis_eval_all(theta).iter().map(|v| v.abs()).sum()
    }
}
