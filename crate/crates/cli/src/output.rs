//! Results CSV, plot data and nodal dumps.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use muntz_vide::analysis::{ConvergenceRow, ConvergenceTable};
use muntz_vide::DiscreteSolution;

pub const CSV_HEADER: &str = "N,l2_e,linf_e,l2_estar,linf_estar,runtime_ms";
pub const NODAL_HEADER: &str = "theta,phi,phi_star";

/// Six significant digits with a signed two-digit exponent, e.g.
/// `5.72413e-03`.
pub fn sci(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{v:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn csv_row(r: &ConvergenceRow) -> String {
    let n = &r.norms;
    format!(
        "{},{},{},{},{},{}\n",
        r.n,
        sci(n.l2_e),
        sci(n.linf_e),
        sci(n.l2_estar),
        sci(n.linf_estar),
        sci(r.runtime_ms)
    )
}

pub fn csv_string(table: &ConvergenceTable) -> String {
    let mut s = String::with_capacity(64 * (table.rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in &table.rows {
        s.push_str(&csv_row(r));
    }
    s
}

pub fn write_csv(table: &ConvergenceTable, path: &Path) -> io::Result<()> {
    fs::write(path, csv_string(table))
}

/// One line per successful row: `N` and `log10` of the four error norms.
pub fn plot_string(table: &ConvergenceTable) -> io::Result<String> {
    let ok: Vec<&ConvergenceRow> = table.rows.iter().filter(|r| r.is_ok()).collect();
    if ok.is_empty() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "no successful rows to plot",
        ));
    }
    let mut s = String::new();
    for r in ok {
        let n = &r.norms;
        let _ = write!(s, "{:>4}", r.n);
        for e in [n.l2_e, n.linf_e, n.l2_estar, n.linf_estar] {
            let _ = write!(s, " {:>12.6}", e.max(f64::MIN_POSITIVE).log10());
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn emit_plot_data(table: &ConvergenceTable, path: &Path) -> io::Result<()> {
    fs::write(path, plot_string(table)?)
}

/// `theta,phi,phi_star` at the collocation points.
pub fn nodal_string(sol: &DiscreteSolution) -> String {
    let mut s = String::from(NODAL_HEADER);
    s.push('\n');
    for ((t, u), us) in sol.grid.points.iter().zip(&sol.u).zip(&sol.u_star) {
        let _ = writeln!(s, "{},{},{}", sci(*t), sci(*u), sci(*us));
    }
    s
}

/// One human-readable line per row.
pub fn summary_line(r: &ConvergenceRow) -> String {
    match &r.failure {
        Some(msg) => format!("N={:<3} FAILED: {msg}", r.n),
        None => {
            let n = &r.norms;
            format!(
                "N={:<3} l2_e={} linf_e={} l2_estar={} linf_estar={} ({:.1} ms)",
                r.n,
                sci(n.l2_e),
                sci(n.linf_e),
                sci(n.l2_estar),
                sci(n.linf_estar),
                r.runtime_ms
            )
        }
    }
}
