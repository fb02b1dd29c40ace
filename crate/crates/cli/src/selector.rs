//! Coefficient selectors for `problem = custom`.
//!
//! A selector is a `+`-separated sum of terms. Each term is a number or
//! `[c*]name[:k]`:
//!
//! | scalar (`a1`, `b1`, `f1`) | meaning     |
//! |---------------------------|-------------|
//! | `exp:k`                   | `e^{k t}`   |
//! | `sin:k`                   | `sin(k t)`  |
//! | `cos:k`                   | `cos(k t)`  |
//! | `pow:p`                   | `t^p`       |
//!
//! | kernel (`k1`, `k2`)       | meaning        |
//! |---------------------------|----------------|
//! | `exp_s:k`                 | `e^{k s}`      |
//! | `exp_t:k`                 | `e^{k t}`      |
//! | `sin_ts:k`                | `sin(k t s)`   |
//! | `cos_ts:k`                | `cos(k t s)`   |
//! | `pow_s:p`                 | `s^p`          |
//!
//! `k` defaults to 1. Example: `k1 = -1 + -1*sin_ts` is `-(1 + sin(ts))`.

use muntz_vide::problem::{kernel, scalar, KernelFn, ScalarFn};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Atom {
    Const,
    Exp,
    Sin,
    Cos,
    Pow,
    ExpS,
    ExpT,
    SinTs,
    CosTs,
    PowS,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    coeff: f64,
    atom: Atom,
    k: f64,
}

const SCALAR_ATOMS: [(&str, Atom); 4] = [
    ("exp", Atom::Exp),
    ("sin", Atom::Sin),
    ("cos", Atom::Cos),
    ("pow", Atom::Pow),
];
const KERNEL_ATOMS: [(&str, Atom); 5] = [
    ("exp_s", Atom::ExpS),
    ("exp_t", Atom::ExpT),
    ("sin_ts", Atom::SinTs),
    ("cos_ts", Atom::CosTs),
    ("pow_s", Atom::PowS),
];

fn parse_num(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("'{}' is not a finite number", s.trim()))
}

fn parse_terms(text: &str, atoms: &[(&str, Atom)]) -> Result<Vec<Term>, String> {
    if text.trim().is_empty() {
        return Err("empty selector".into());
    }
    text.split('+')
        .map(|raw| {
            let raw = raw.trim();
            if let Ok(c) = parse_num(raw) {
                return Ok(Term {
                    coeff: c,
                    atom: Atom::Const,
                    k: 0.0,
                });
            }
            let (coeff, rest) = match raw.split_once('*') {
                Some((c, r)) => (parse_num(c)?, r.trim()),
                None => (1.0, raw),
            };
            let (name, k) = match rest.split_once(':') {
                Some((n, k)) => (n.trim(), parse_num(k)?),
                None => (rest, 1.0),
            };
            let atom = atoms
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, a)| *a)
                .ok_or_else(|| {
                    let names: Vec<&str> = atoms.iter().map(|(n, _)| *n).collect();
                    format!(
                        "unknown term '{name}' (expected a number or one of {})",
                        names.join(", ")
                    )
                })?;
            Ok(Term { coeff, atom, k })
        })
        .collect()
}

fn eval_term(term: &Term, t: f64, s: f64) -> f64 {
    let k = term.k;
    term.coeff
        * match term.atom {
            Atom::Const => 1.0,
            Atom::Exp => (k * t).exp(),
            Atom::Sin => (k * t).sin(),
            Atom::Cos => (k * t).cos(),
            Atom::Pow => t.powf(k),
            Atom::ExpS => (k * s).exp(),
            Atom::ExpT => (k * t).exp(),
            Atom::SinTs => (k * t * s).sin(),
            Atom::CosTs => (k * t * s).cos(),
            Atom::PowS => s.powf(k),
        }
}

/// Checks a scalar selector without building it.
pub fn check_scalar(text: &str) -> Result<(), String> {
    parse_terms(text, &SCALAR_ATOMS).map(drop)
}

pub fn check_kernel(text: &str) -> Result<(), String> {
    parse_terms(text, &KERNEL_ATOMS).map(drop)
}

pub fn build_scalar(text: &str) -> Result<ScalarFn, String> {
    let terms = parse_terms(text, &SCALAR_ATOMS)?;
    Ok(scalar(move |t| {
        terms.iter().map(|x| eval_term(x, t, 0.0)).sum()
    }))
}

pub fn build_kernel(text: &str) -> Result<KernelFn, String> {
    let terms = parse_terms(text, &KERNEL_ATOMS)?;
    Ok(kernel(move |t, s| {
        terms.iter().map(|x| eval_term(x, t, s)).sum()
    }))
}
