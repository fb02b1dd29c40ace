//! Flat `key = value` run configuration.
//!
//! ```text
//! # Example 5.2, convergence sweep
//! problem = 5.2
//! lambda  = 0.333333333333
//! N       = 5:13:2
//! mode    = sweep
//! ```
//!
//! | key           | default                         | meaning                                        |
//! |---------------|---------------------------------|------------------------------------------------|
//! | `problem`     | required                        | `5.1`..`5.4` or `custom`                       |
//! | `N`           | required                        | degree, or inclusive range `start:stop[:step]` |
//! | `mode`        | required (set by the subcommand)| `solve`, `sweep` or `compare`                  |
//! | `lambda`      | `1/q` for `mu = p/q`            | Müntz exponent in `(0, 1]`                     |
//! | `alpha`,`beta`| `-0.5`                          | collocation grid Jacobi parameters             |
//! | `forcing`     | `corrected`                     | `corrected` or `printed` (examples only)       |
//! | `mu`,`eps`,`T`| example values; custom: `eps = 0.5`, `T = 1`, `mu` required | equation parameters |
//! | `y0`          | example value; custom: `0`      | initial value                                  |
//! | `a1`,`b1`,`f1`,`k1`,`k2` | `0`                  | coefficient selectors, custom problems only    |
//! | `quad_points` | `N + 1`                         | points of the kernel/integration rules         |
//! | `linf_grid`   | `2001`                          | uniform points of the L∞ norm                  |
//! | `l2_points`   | `max(4N, 200)`                  | Gauss–Jacobi points of the L² norm             |
//! | `l2_alpha`,`l2_beta` | grid `alpha`,`beta`      | weight of the L² norm                          |
//! | `ref_N`       | `18`                            | reference degree when no closed form is used   |
//! | `output`      | `results.csv`                   | results table                                  |
//! | `plot`        | `<output stem>.dat`             | plot data file                                 |
//! | `nodal`       | `<output stem>_nodal.csv` in solve mode | nodal values dump                      |
//! | `timing`      | `wall`                          | `wall` or `off` (report 0 ms)                  |

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use muntz_vide::analysis::Timing;
use muntz_vide::ExampleId;
use thiserror::Error;

use crate::selector;

pub const REQUIRED_KEYS: [&str; 3] = ["problem", "N", "mode"];
pub const DEFAULT_REF_N: usize = 18;
pub const DEFAULT_OUTPUT: &str = "results.csv";

const KNOWN_KEYS: [&str; 26] = [
    "problem",
    "N",
    "mode",
    "lambda",
    "alpha",
    "beta",
    "forcing",
    "mu",
    "eps",
    "T",
    "y0",
    "a1",
    "b1",
    "f1",
    "k1",
    "k2",
    "quad_points",
    "linf_grid",
    "l2_points",
    "l2_alpha",
    "l2_beta",
    "ref_N",
    "output",
    "plot",
    "nodal",
    "timing",
];
const SELECTOR_KEYS: [&str; 5] = ["a1", "b1", "f1", "k1", "k2"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing required key(s): {}", .0.join(", "))]
    Missing(Vec<&'static str>),
    #[error("invalid value for '{key}': {msg}")]
    Invalid { key: String, msg: String },
}

fn invalid(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Solve,
    Sweep,
    Compare,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "solve" => Ok(Mode::Solve),
            "sweep" => Ok(Mode::Sweep),
            "compare" => Ok(Mode::Compare),
            _ => Err(format!(
                "unknown mode '{s}' (expected solve, sweep or compare)"
            )),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Solve => "solve",
            Mode::Sweep => "sweep",
            Mode::Compare => "compare",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Forcing {
    Corrected,
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemSel {
    Example(ExampleId),
    Custom,
}

/// A single degree or an inclusive range `start:stop:step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NSpec {
    Single(usize),
    Range {
        start: usize,
        stop: usize,
        step: usize,
    },
}

impl NSpec {
    pub fn values(&self) -> Vec<usize> {
        match *self {
            NSpec::Single(n) => vec![n],
            NSpec::Range { start, stop, step } => (start..=stop).step_by(step).collect(),
        }
    }
}

impl FromStr for NSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let int = |p: &str| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| format!("'{}' is not a nonnegative integer", p.trim()))
        };
        let parts: Vec<&str> = s.split(':').collect();
        let spec = match parts.as_slice() {
            [n] => NSpec::Single(int(n)?),
            [a, b] => NSpec::Range {
                start: int(a)?,
                stop: int(b)?,
                step: 1,
            },
            [a, b, c] => NSpec::Range {
                start: int(a)?,
                stop: int(b)?,
                step: int(c)?,
            },
            _ => return Err(format!("'{s}' is neither N nor start:stop:step")),
        };
        if let NSpec::Range { start, stop, step } = spec {
            if step == 0 {
                return Err("range step must be at least 1".into());
            }
            if start > stop {
                return Err(format!("empty range {start}:{stop}"));
            }
        }
        if spec.values().iter().any(|&n| n < 2) {
            return Err("every N must be at least 2".into());
        }
        Ok(spec)
    }
}

impl fmt::Display for NSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NSpec::Single(n) => write!(f, "{n}"),
            NSpec::Range { start, stop, step } => write!(f, "{start}:{stop}:{step}"),
        }
    }
}

/// Selectors of a custom problem; `None` means identically zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Coefficients {
    pub a1: Option<String>,
    pub b1: Option<String>,
    pub f1: Option<String>,
    pub k1: Option<String>,
    pub k2: Option<String>,
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub problem: ProblemSel,
    pub n: NSpec,
    pub mode: Mode,
    /// `None` resolves to the default for the problem's `μ`.
    pub lambda: Option<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub forcing: Forcing,
    pub mu: Option<f64>,
    pub eps: Option<f64>,
    pub horizon: Option<f64>,
    pub y0: Option<f64>,
    pub coefficients: Coefficients,
    pub quad_points: Option<usize>,
    pub linf_grid: usize,
    pub l2_points: Option<usize>,
    pub l2_alpha: Option<f64>,
    pub l2_beta: Option<f64>,
    pub ref_n: usize,
    pub output: PathBuf,
    pub plot: Option<PathBuf>,
    pub nodal: Option<PathBuf>,
    pub timing: Timing,
}

impl RunSpec {
    /// Plot file, defaulting to the output path with extension `.dat`.
    pub fn plot_path(&self) -> PathBuf {
        self.plot
            .clone()
            .unwrap_or_else(|| self.output.with_extension("dat"))
    }

    /// Nodal dump path; only solve mode writes one by default.
    pub fn nodal_path(&self) -> Option<PathBuf> {
        match (&self.nodal, self.mode) {
            (Some(p), _) => Some(p.clone()),
            (None, Mode::Solve) => {
                let stem = self
                    .output
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                Some(self.output.with_file_name(format!("{stem}_nodal.csv")))
            }
            (None, _) => None,
        }
    }
}

/// Raw entries with the line they came from (0 for command-line overrides).
type Entries = BTreeMap<String, (String, usize)>;

fn read_entries(text: &str) -> Result<Entries, ConfigError> {
    let mut entries = Entries::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
            line,
            msg: format!("expected 'key = value', got '{content}'"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError::Parse {
                line,
                msg: format!("unknown key '{key}'"),
            });
        }
        if value.is_empty() {
            return Err(ConfigError::Parse {
                line,
                msg: format!("empty value for '{key}'"),
            });
        }
        if let Some((_, first)) = entries.insert(key.to_string(), (value.to_string(), line)) {
            return Err(ConfigError::Parse {
                line,
                msg: format!("duplicate key '{key}' (first set on line {first})"),
            });
        }
    }
    Ok(entries)
}

/// Splits a `key=value` command-line override.
pub fn parse_override(s: &str) -> Result<(String, String), ConfigError> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| invalid(s, "override must look like key=value"))?;
    let (k, v) = (k.trim(), v.trim());
    if !KNOWN_KEYS.contains(&k) {
        return Err(invalid(k, "unknown key"));
    }
    Ok((k.to_string(), v.to_string()))
}

pub fn parse_config(text: &str) -> Result<RunSpec, ConfigError> {
    parse_config_with(text, &[])
}

/// Parses `text`, then applies `overrides` in order (later wins).
pub fn parse_config_with(
    text: &str,
    overrides: &[(String, String)],
) -> Result<RunSpec, ConfigError> {
    let mut entries = read_entries(text)?;
    for (k, v) in overrides {
        if !KNOWN_KEYS.contains(&k.as_str()) {
            return Err(invalid(k, "unknown key"));
        }
        entries.insert(k.clone(), (v.clone(), 0));
    }
    build(entries)
}

struct Reader {
    entries: Entries,
}

impl Reader {
    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn get<T, F>(&self, key: &str, parse: F) -> Result<Option<T>, ConfigError>
    where
        F: Fn(&str) -> Result<T, String>,
    {
        self.raw(key)
            .map(|v| parse(v).map_err(|msg| invalid(key, msg)))
            .transpose()
    }

    fn float(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(key, |v| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("'{v}' is not a finite number"))
        })
    }

    fn count(&self, key: &str, min: usize) -> Result<Option<usize>, ConfigError> {
        self.get(key, |v| {
            let n = v
                .parse::<usize>()
                .map_err(|_| format!("'{v}' is not a nonnegative integer"))?;
            if n < min {
                return Err(format!("must be at least {min}"));
            }
            Ok(n)
        })
    }
}

fn build(entries: Entries) -> Result<RunSpec, ConfigError> {
    let missing: Vec<&'static str> = REQUIRED_KEYS
        .into_iter()
        .filter(|k| !entries.contains_key(*k))
        .collect();
    if !missing.is_empty() {
        return Err(ConfigError::Missing(missing));
    }
    let r = Reader { entries };

    let problem = r
        .get("problem", |v| {
            if v == "custom" {
                Ok(ProblemSel::Custom)
            } else {
                v.parse::<ExampleId>().map(ProblemSel::Example)
            }
        })?
        .expect("required");
    let n: NSpec = r.get("N", str::parse)?.expect("required");
    let mode: Mode = r.get("mode", str::parse)?.expect("required");

    let lambda = r.float("lambda")?;
    if let Some(l) = lambda {
        if !(l > 0.0 && l <= 1.0) {
            return Err(invalid("lambda", format!("{l} is outside (0, 1]")));
        }
    }
    let jacobi = |key: &str| -> Result<Option<f64>, ConfigError> {
        let v = r.float(key)?;
        if let Some(x) = v {
            if x <= -1.0 {
                return Err(invalid(key, format!("{x} must exceed -1")));
            }
        }
        Ok(v)
    };
    let alpha = jacobi("alpha")?.unwrap_or(-0.5);
    let beta = jacobi("beta")?.unwrap_or(-0.5);
    let l2_alpha = jacobi("l2_alpha")?;
    let l2_beta = jacobi("l2_beta")?;

    let forcing = r
        .get("forcing", |v| match v {
            "corrected" => Ok(Forcing::Corrected),
            "printed" => Ok(Forcing::Printed),
            _ => Err(format!(
                "unknown forcing '{v}' (expected corrected or printed)"
            )),
        })?
        .unwrap_or(Forcing::Corrected);

    let mu = r.float("mu")?;
    if let Some(m) = mu {
        if !(0.0..1.0).contains(&m) {
            return Err(invalid("mu", format!("{m} is outside [0, 1)")));
        }
    }
    let eps = r.float("eps")?;
    if let Some(e) = eps {
        if !(e > 0.0 && e < 1.0) {
            return Err(invalid("eps", format!("{e} is outside (0, 1)")));
        }
    }
    let horizon = r.float("T")?;
    if let Some(t) = horizon {
        if t <= 0.0 {
            return Err(invalid("T", format!("{t} must be positive")));
        }
    }
    let y0 = r.float("y0")?;

    let mut coefficients = Coefficients::default();
    for key in SELECTOR_KEYS {
        let Some(text) = r.raw(key) else { continue };
        if problem != ProblemSel::Custom {
            return Err(invalid(
                key,
                "coefficient selectors are only allowed with problem = custom",
            ));
        }
        let check = if key.starts_with('k') {
            selector::check_kernel
        } else {
            selector::check_scalar
        };
        check(text).map_err(|msg| invalid(key, msg))?;
        let slot = match key {
            "a1" => &mut coefficients.a1,
            "b1" => &mut coefficients.b1,
            "f1" => &mut coefficients.f1,
            "k1" => &mut coefficients.k1,
            _ => &mut coefficients.k2,
        };
        *slot = Some(text.to_string());
    }
    match problem {
        ProblemSel::Custom => {
            if mu.is_none() {
                return Err(invalid("mu", "required for problem = custom"));
            }
            if forcing == Forcing::Printed {
                return Err(invalid(
                    "forcing",
                    "printed forcing exists only for the built-in examples",
                ));
            }
        }
        ProblemSel::Example(id) => {
            if y0.is_some() && id.has_exact_solution() {
                return Err(invalid(
                    "y0",
                    format!("example {id} fixes y0 through its exact solution"),
                ));
            }
        }
    }

    let ns = n.values();
    if mode == Mode::Solve && ns.len() != 1 {
        return Err(invalid("N", "solve mode takes a single N"));
    }
    let ref_n = r.count("ref_N", 2)?.unwrap_or(DEFAULT_REF_N);
    let max_n = *ns.last().expect("nonempty");
    let needs_reference = mode == Mode::Compare
        || matches!(
            problem,
            ProblemSel::Custom | ProblemSel::Example(ExampleId::Ex54)
        );
    if needs_reference && ref_n <= max_n {
        return Err(invalid(
            "ref_N",
            format!("{ref_n} must exceed the largest N ({max_n})"),
        ));
    }

    let path = |key: &str| r.raw(key).map(PathBuf::from);
    Ok(RunSpec {
        problem,
        n,
        mode,
        lambda,
        alpha,
        beta,
        forcing,
        mu,
        eps,
        horizon,
        y0,
        coefficients,
        quad_points: r.count("quad_points", 1)?,
        linf_grid: r
            .count("linf_grid", 2)?
            .unwrap_or(muntz_vide::analysis::DEFAULT_LINF_GRID),
        l2_points: r.count("l2_points", 1)?,
        l2_alpha,
        l2_beta,
        ref_n,
        output: path("output").unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT)),
        plot: path("plot"),
        nodal: path("nodal"),
        timing: r
            .get("timing", |v| match v {
                "wall" => Ok(Timing::Wall),
                "off" => Ok(Timing::Off),
                _ => Err(format!("unknown timing '{v}' (expected wall or off)")),
            })?
            .unwrap_or(Timing::Wall),
    })
}

/// Renders a spec in the config format; `parse_config` reads it back to an
/// equal spec.
pub fn render(spec: &RunSpec) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    put(
        "problem",
        match spec.problem {
            ProblemSel::Example(id) => id.key().to_string(),
            ProblemSel::Custom => "custom".into(),
        },
    );
    put("N", spec.n.to_string());
    put("mode", spec.mode.to_string());
    if let Some(l) = spec.lambda {
        put("lambda", l.to_string());
    }
    put("alpha", spec.alpha.to_string());
    put("beta", spec.beta.to_string());
    put(
        "forcing",
        match spec.forcing {
            Forcing::Corrected => "corrected",
            Forcing::Printed => "printed",
        }
        .into(),
    );
    let floats = [
        ("mu", spec.mu),
        ("eps", spec.eps),
        ("T", spec.horizon),
        ("y0", spec.y0),
        ("l2_alpha", spec.l2_alpha),
        ("l2_beta", spec.l2_beta),
    ];
    for (k, v) in floats {
        if let Some(v) = v {
            put(k, v.to_string());
        }
    }
    let c = &spec.coefficients;
    for (k, v) in [
        ("a1", &c.a1),
        ("b1", &c.b1),
        ("f1", &c.f1),
        ("k1", &c.k1),
        ("k2", &c.k2),
    ] {
        if let Some(v) = v {
            put(k, v.clone());
        }
    }
    if let Some(q) = spec.quad_points {
        put("quad_points", q.to_string());
    }
    put("linf_grid", spec.linf_grid.to_string());
    if let Some(m) = spec.l2_points {
        put("l2_points", m.to_string());
    }
    put("ref_N", spec.ref_n.to_string());
    put("output", spec.output.display().to_string());
    if let Some(p) = &spec.plot {
        put("plot", p.display().to_string());
    }
    if let Some(p) = &spec.nodal {
        put("nodal", p.display().to_string());
    }
    put(
        "timing",
        match spec.timing {
            Timing::Wall => "wall",
            Timing::Off => "off",
        }
        .into(),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn example_52_sweep() {
        let spec = parse_config("problem = 5.2\nlambda = 0.333333333333\nN = 5:13:2\nmode = sweep")
            .unwrap();
        assert_eq!(spec.problem, ProblemSel::Example(ExampleId::Ex52));
        assert_eq!(spec.mode, Mode::Sweep);
        assert_eq!(spec.n.values(), vec![5, 7, 9, 11, 13]);
        assert_eq!(spec.lambda, Some(0.333333333333));
        assert_eq!((spec.alpha, spec.beta), (-0.5, -0.5));
        assert_eq!(spec.forcing, Forcing::Corrected);
        assert_eq!(spec.output, PathBuf::from("results.csv"));
        assert_eq!(spec.plot_path(), PathBuf::from("results.dat"));
        assert_eq!(spec.nodal_path(), None);
    }

    #[test]
    fn empty_text_lists_required_keys() {
        let err = parse_config("").unwrap_err();
        assert_eq!(err, ConfigError::Missing(vec!["problem", "N", "mode"]));
        assert_eq!(err.to_string(), "missing required key(s): problem, N, mode");
        let err = parse_config("# just a comment\nmode = solve").unwrap_err();
        assert_eq!(err, ConfigError::Missing(vec!["problem", "N"]));
    }

    #[test]
    fn lambda_above_one_is_rejected() {
        let err = parse_config("problem = 5.1\nN = 8\nmode = solve\nlambda = 1.5").unwrap_err();
        assert!(
            matches!(&err, ConfigError::Invalid { key, .. } if key == "lambda"),
            "{err}"
        );
        assert!(parse_config("problem = 5.1\nN = 8\nmode = solve\nlambda = 0").is_err());
        assert!(parse_config("problem = 5.1\nN = 8\nmode = solve\nlambda = 1").is_ok());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_config("problem = 5.1\n\nbogus = 3\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::Parse {
                line: 3,
                msg: "unknown key 'bogus'".into()
            }
        );
        let err = parse_config("problem = 5.1\nno equals sign").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }));
        let err = parse_config("N = 4\nN = 5").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }));
    }

    #[test]
    fn comments_and_overrides() {
        let text = "problem = 5.1 # inline\n# full line\nN = 4:12:2\nmode = sweep\n";
        let spec = parse_config_with(
            text,
            &[("N".into(), "12".into()), ("mode".into(), "solve".into())],
        )
        .unwrap();
        assert_eq!(spec.n, NSpec::Single(12));
        assert_eq!(spec.mode, Mode::Solve);
        assert_eq!(spec.nodal_path(), Some(PathBuf::from("results_nodal.csv")));
        assert!(parse_override("eps=0.25").is_ok());
        assert!(parse_override("eps").is_err());
        assert!(parse_override("nope=1").is_err());
    }

    #[test]
    fn validation_names_offending_key() {
        let base = "problem = 5.1\nN = 8\nmode = sweep\n";
        let key_of = |extra: &str| match parse_config(&format!("{base}{extra}")).unwrap_err() {
            ConfigError::Invalid { key, .. } => key,
            other => panic!("{other:?}"),
        };
        assert_eq!(key_of("eps = 1.2"), "eps");
        assert_eq!(key_of("mu = 1"), "mu");
        assert_eq!(key_of("T = -1"), "T");
        assert_eq!(key_of("alpha = -1"), "alpha");
        assert_eq!(key_of("y0 = 2"), "y0");
        assert_eq!(key_of("k1 = exp_s"), "k1");
        assert_eq!(key_of("linf_grid = 1"), "linf_grid");
        assert_eq!(key_of("timing = sometimes"), "timing");
        assert_eq!(key_of("forcing = typo"), "forcing");
        assert!(matches!(
            parse_config("problem = 5.9\nN = 8\nmode = sweep"),
            Err(ConfigError::Invalid { .. })
        ));
        assert!(matches!(
            parse_config("problem = 5.1\nN = 9:4\nmode = sweep"),
            Err(ConfigError::Invalid { .. })
        ));
        assert!(matches!(
            parse_config("problem = 5.1\nN = 1\nmode = sweep"),
            Err(ConfigError::Invalid { .. })
        ));
        assert!(matches!(
            parse_config("problem = 5.1\nN = 4:8\nmode = solve"),
            Err(ConfigError::Invalid { .. })
        ));
    }

    #[test]
    fn reference_degree_must_exceed_compared_degrees() {
        let err = parse_config("problem = 5.4\nN = 6:20:2\nmode = sweep").unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { key, .. } if key == "ref_N"));
        assert!(parse_config("problem = 5.4\nN = 6:20:2\nmode = sweep\nref_N = 24").is_ok());
        assert!(parse_config("problem = 5.1\nN = 6:20:2\nmode = sweep").is_ok());
        assert!(parse_config("problem = 5.1\nN = 6:20:2\nmode = compare").is_err());
    }

    #[test]
    fn custom_problems() {
        let text = "problem = custom\nmu = 0.5\nN = 6\nmode = solve\na1 = cos\nk1 = -1 + -1*sin_ts\ny0 = 3";
        let spec = parse_config(text).unwrap();
        assert_eq!(spec.coefficients.k1.as_deref(), Some("-1 + -1*sin_ts"));
        assert!(parse_config("problem = custom\nN = 6\nmode = solve").is_err());
        assert!(
            parse_config("problem = custom\nmu = 0.5\nN = 6\nmode = solve\nforcing = printed")
                .is_err()
        );
    }

    fn arb_spec() -> impl Strategy<Value = RunSpec> {
        let problem = prop_oneof![
            Just(ProblemSel::Example(ExampleId::Ex51)),
            Just(ProblemSel::Example(ExampleId::Ex52)),
            Just(ProblemSel::Example(ExampleId::Ex53)),
        ];
        let n = prop_oneof![
            (2usize..30).prop_map(NSpec::Single),
            (2usize..10, 0usize..10, 1usize..4).prop_map(|(a, d, s)| NSpec::Range {
                start: a,
                stop: a + d,
                step: s
            }),
        ];
        (
            problem,
            n,
            prop::option::of(0.01f64..=1.0),
            -0.99f64..3.0,
            -0.99f64..3.0,
            prop::option::of(0.0f64..0.99),
            prop::option::of(0.01f64..0.99),
            prop::option::of(0.1f64..5.0),
            prop::option::of(1usize..60),
            any::<bool>(),
            any::<bool>(),
        )
            .prop_map(
                |(
                    problem,
                    n,
                    lambda,
                    alpha,
                    beta,
                    mu,
                    eps,
                    horizon,
                    quad_points,
                    printed,
                    timing,
                )| RunSpec {
                    problem,
                    mode: if matches!(n, NSpec::Single(_)) {
                        Mode::Solve
                    } else {
                        Mode::Sweep
                    },
                    n,
                    lambda,
                    alpha,
                    beta,
                    forcing: if printed {
                        Forcing::Printed
                    } else {
                        Forcing::Corrected
                    },
                    mu,
                    eps,
                    horizon,
                    y0: None,
                    coefficients: Coefficients::default(),
                    quad_points,
                    linf_grid: 2001,
                    l2_points: quad_points.map(|q| q * 7),
                    l2_alpha: lambda.map(|l| l - 0.5),
                    l2_beta: None,
                    ref_n: 40,
                    output: PathBuf::from("out/table.csv"),
                    plot: horizon.map(|_| PathBuf::from("plot.txt")),
                    nodal: None,
                    timing: if timing { Timing::Wall } else { Timing::Off },
                },
            )
    }

    proptest! {
        #[test]
        fn render_round_trips(spec in arb_spec()) {
            let text = render(&spec);
            prop_assert_eq!(parse_config(&text).unwrap(), spec);
        }
    }

    #[test]
    fn custom_round_trip() {
        let text = "problem = custom\nmu = 0.25\nN = 4:8:2\nmode = compare\nf1 = sin:2\nk2 = 0.5*exp_s:-1\ny0 = 1\nref_N = 12";
        let spec = parse_config(text).unwrap();
        assert_eq!(parse_config(&render(&spec)).unwrap(), spec);
    }
}
