//! Reference quadrature for `∫_0^x (x - s)^{-μ} g(s) ds`.
//!
//! Two independent routes:
//!
//! * a Gauss–Jacobi rule after `s = x ξ^{1/λ}`, which absorbs both the
//!   `(1 - ξ)^{-μ}` endpoint singularity and the `ξ^{1/λ - 1}` Jacobian;
//! * adaptive Gauss–Kronrod bisection after `x - s = x v^{1/(1-μ)}`, which
//!   turns the kernel singularity into a constant factor.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::quadrature::{self, FractionalRule, QuadratureError};

/// Points in the Gauss–Jacobi route.
pub const ORACLE_POINTS: usize = 200;
/// Absolute tolerance of the adaptive route.
pub const ADAPTIVE_TOL: f64 = 1e-12;
/// Largest admissible gap between the two routes.
pub const ROUTE_AGREEMENT: f64 = 1e-9;

const MAX_INTERVALS: usize = 4000;

// Kronrod 15-point abscissae and weights, with the embedded 7-point Gauss
// weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive Gauss–Kronrod (7/15) on `[a, b]`, bisecting the segment with the
/// largest error estimate until the summed estimate drops below `abs_tol`.
/// Returns `(value, error_estimate)`; `None` if the interval budget runs out.
pub fn adaptive_gk<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Option<(f64, f64)> {
    let (value, error) = kronrod15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total_err = error;
    while total_err > abs_tol {
        if heap.len() >= MAX_INTERVALS {
            return None;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine resolution
            heap.push(worst);
            break;
        }
        let (v1, e1) = kronrod15(&f, worst.a, mid);
        let (v2, e2) = kronrod15(&f, mid, worst.b);
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        // re-sum occasionally to shed accumulated rounding in the running estimate
        if heap.len() % 64 == 0 {
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Some((value, error))
}

/// `∫_0^x (x - s)^{-μ} g(s) ds` by adaptive Gauss–Kronrod after the
/// substitution `x - s = x v^{1/(1-μ)}`.
pub fn adaptive_singular<G: Fn(f64) -> f64>(mu: f64, x: f64, g: G, abs_tol: f64) -> Option<f64> {
    if x == 0.0 {
        return Some(0.0);
    }
    let p = 1.0 / (1.0 - mu);
    let scale = x.powf(1.0 - mu) / (1.0 - mu);
    let h = |v: f64| g(x * (1.0 - v.powf(p)));
    adaptive_gk(h, 0.0, 1.0, abs_tol / scale.max(1e-300)).map(|(v, _)| v * scale)
}

/// Gauss–Jacobi route: `s = x ξ^{1/λ}` with the weight `(1-ξ)^{-μ} ξ^{1/λ-1}`.
#[derive(Debug, Clone)]
pub struct SingularQuadrature {
    pub mu: f64,
    pub lambda: f64,
    rule: FractionalRule,
    /// `(1/λ) ((1 - ξ_k^{1/λ}) / (1 - ξ_k))^{-μ}` at each node.
    factors: Vec<f64>,
}

impl SingularQuadrature {
    pub fn new(mu: f64, lambda: f64, npts: usize) -> Result<Self, QuadratureError> {
        quadrature::check_lambda(lambda)?;
        let rule = quadrature::fractional_gauss_jacobi(npts, -mu, 1.0 / lambda - 1.0, 1.0)?;
        let factors = rule
            .unit_nodes
            .iter()
            .map(|&xi| {
                // 1 - ξ^{1/λ} = -expm1(ln ξ / λ) keeps relative accuracy as ξ → 1
                let num = -libm::expm1(xi.ln() / lambda);
                let den = 1.0 - xi;
                (-mu * (num.ln() - den.ln())).exp() / lambda
            })
            .collect();
        Ok(Self {
            mu,
            lambda,
            rule,
            factors,
        })
    }

    pub fn integrate<G: Fn(f64) -> f64>(&self, x: f64, g: G) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let inv = 1.0 / self.lambda;
        let sum: f64 = self
            .rule
            .unit_nodes
            .iter()
            .zip(&self.rule.weights)
            .zip(&self.factors)
            .map(|((&xi, &w), &c)| w * c * g(x * xi.powf(inv)))
            .sum();
        x.powf(1.0 - self.mu) * sum
    }
}
