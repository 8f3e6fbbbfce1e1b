//! Problem descriptions: flux and viscosity coefficients, initial data and
//! discretization parameters, loaded from a flat `key = value` model file.
//!
//! ```text
//! # standard viscous Burgers
//! name      = burgers
//! a         = u
//! b         = 1
//! c         = 0
//! F         = 1/(1+x^2)
//! branch_lo = 0
//! branch_hi = 20
//! x_min     = -20
//! x_max     = 20
//! nx        = 8000
//! tau       = 1e-4
//! eps       = 0.01, 0.1
//! t_end     = 1.8
//! ```
//!
//! `a`, `b` and `c` are expressions in `u`; `F` is an expression in `x`.
//! Only `a`, `F`, `branch_lo` and `branch_hi` are required.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::expr::{ExprError, Expression, Jet};
use crate::numerics::{find_root, Bracket};

/// Number of intervals used to verify monotonicity of the initial data.
pub const MONOTONE_CHECK_INTERVALS: usize = 2000;
/// Number of samples used to check `a'(u) != 0` over the solution range.
const FLUX_CHECK_SAMPLES: usize = 201;

pub const KEYS: [&str; 13] = [
    "name",
    "a",
    "b",
    "c",
    "F",
    "branch_lo",
    "branch_hi",
    "x_min",
    "x_max",
    "nx",
    "tau",
    "eps",
    "t_end",
];

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot read model file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("missing required key '{0}'")]
    MissingKey(&'static str),
    #[error("key '{key}': {source}")]
    Expression {
        key: String,
        #[source]
        source: ExprError,
    },
    #[error("key '{key}': {message}")]
    InvalidValue { key: String, message: String },
    #[error("initial data is not strictly monotone on the branch: fails at x = {x}")]
    NotMonotone { x: f64 },
    #[error("value {v} is outside the range [{lo}, {hi}] of the initial data on its branch")]
    OutOfRange { v: f64, lo: f64, hi: f64 },
    #[error("inverse of the initial data failed: {0}")]
    Inverse(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;

/// Coefficients of `u_t + a(u) u_x = eps [b(u) u_xx + c(u) u_x^2]`.
#[derive(Debug, Clone)]
pub struct FluxModel {
    pub a: Expression,
    pub b: Expression,
    pub c: Expression,
}

/// Initial profile together with the interval on which it is inverted.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub profile: Expression,
    pub branch: (f64, f64),
}

impl InitialData {
    pub fn new(profile: Expression, branch: (f64, f64)) -> Result<Self> {
        let data = InitialData { profile, branch };
        data.check_monotone()?;
        Ok(data)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.profile.eval(x)
    }

    /// Values of the profile at the branch ends, ordered.
    pub fn range(&self) -> (f64, f64) {
        let (a, b) = (self.eval(self.branch.0), self.eval(self.branch.1));
        (a.min(b), a.max(b))
    }

    /// +1 if the profile increases along the branch, -1 if it decreases.
    pub fn direction(&self) -> f64 {
        (self.eval(self.branch.1) - self.eval(self.branch.0)).signum()
    }

    fn check_monotone(&self) -> Result<()> {
        let (lo, hi) = self.branch;
        if !(lo < hi) {
            return Err(ModelError::InvalidValue {
                key: "branch_lo".into(),
                message: format!("branch_lo ({lo}) must be below branch_hi ({hi})"),
            });
        }
        let n = MONOTONE_CHECK_INTERVALS;
        let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let mut values = Vec::with_capacity(n + 1);
        for &x in &xs {
            let v = self
                .profile
                .try_eval(x)
                .map_err(|source| ModelError::Expression {
                    key: "F".into(),
                    source,
                })?;
            values.push(v);
        }
        let mut direction = 0.0;
        for i in 0..n {
            let d = values[i + 1] - values[i];
            if direction == 0.0 {
                if d == 0.0 {
                    return Err(ModelError::NotMonotone { x: xs[i] });
                }
                direction = d.signum();
            } else if d * direction <= 0.0 {
                return Err(ModelError::NotMonotone { x: xs[i] });
            }
        }
        Ok(())
    }

    /// Inverse of the profile on the branch: the foot `x` with `F(x) = v`.
    pub fn foot(&self, v: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(v >= lo && v <= hi) {
            return Err(ModelError::OutOfRange { v, lo, hi });
        }
        let bracket = Bracket::new(self.branch.0, self.branch.1)
            .map_err(|e| ModelError::Inverse(e.to_string()))?;
        find_root(|x| self.eval(x) - v, bracket, 1e-15)
            .map_err(|e| ModelError::Inverse(e.to_string()))
    }

    /// Jet of the inverse function `f = F^{-1}` (order 3) given the foot
    /// `x`, from the inverse-function derivative identities.
    pub fn inverse_jet_at_foot(&self, x: f64) -> Result<Jet> {
        let jet = self
            .profile
            .eval_jet(x, 3)
            .map_err(|source| ModelError::Expression {
                key: "F".into(),
                source,
            })?;
        let (d1, d2, d3) = (jet.derivative(1), jet.derivative(2), jet.derivative(3));
        if d1 == 0.0 {
            return Err(ModelError::Inverse(format!(
                "F'({x}) = 0, the inverse is not differentiable"
            )));
        }
        Ok(Jet::from_derivatives(&[
            x,
            1.0 / d1,
            -d2 / d1.powi(3),
            (3.0 * d2 * d2 - d1 * d3) / d1.powi(5),
        ]))
    }
}

/// Jet (order 3) of the inverse of the initial data at `v`.
pub fn inverse_initial_jet(init: &InitialData, v: f64) -> Result<Jet> {
    let x = init.foot(v)?;
    init.inverse_jet_at_foot(x)
}

/// A validated problem description.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub flux: FluxModel,
    pub init: InitialData,
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub tau: f64,
    pub eps: Vec<f64>,
    pub t_end: f64,
}

/// Raw `key -> value` entries of a model file.
pub type ModelEntries = BTreeMap<String, String>;

/// Parses model-file text into entries. Blank lines and `#` comments are
/// ignored; later keys override earlier ones.
pub fn parse_model_text(text: &str) -> Result<ModelEntries> {
    let mut entries = ModelEntries::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ModelError::Format {
            line: idx + 1,
            message: format!("expected 'key = value', found '{line}'"),
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(ModelError::UnknownKey(key.to_string()));
        }
        entries.insert(key.to_string(), value.trim().to_string());
    }
    Ok(entries)
}

/// Loads and validates a model file.
pub fn load_problem(path: impl AsRef<Path>) -> Result<ProblemSpec> {
    load_problem_with(path, &ModelEntries::new())
}

/// Loads a model file, then applies `overrides` (same keys as the file)
/// before validation.
pub fn load_problem_with(path: impl AsRef<Path>, overrides: &ModelEntries) -> Result<ProblemSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut entries = parse_model_text(&text)?;
    for (k, v) in overrides {
        if !KEYS.contains(&k.as_str()) {
            return Err(ModelError::UnknownKey(k.clone()));
        }
        entries.insert(k.clone(), v.clone());
    }
    if !entries.contains_key("name") {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "model".into());
        entries.insert("name".into(), stem);
    }
    ProblemSpec::from_entries(&entries)
}

fn parse_number(entries: &ModelEntries, key: &str, default: Option<f64>) -> Result<f64> {
    match entries.get(key) {
        Some(s) => s.parse::<f64>().map_err(|_| ModelError::InvalidValue {
            key: key.into(),
            message: format!("'{s}' is not a number"),
        }),
        None => default.ok_or(ModelError::MissingKey(static_key(key))),
    }
}

fn static_key(key: &str) -> &'static str {
    KEYS.iter().copied().find(|k| *k == key).unwrap_or("?")
}

fn parse_expr(entries: &ModelEntries, key: &str, var: &str, default: Option<&str>) -> Result<Expression> {
    let src = match entries.get(key) {
        Some(s) => s.as_str(),
        None => default.ok_or(ModelError::MissingKey(static_key(key)))?,
    };
    Expression::parse_in(src, var).map_err(|source| ModelError::Expression {
        key: key.into(),
        source,
    })
}

/// Parses a comma- or whitespace-separated list of numbers.
pub fn parse_list(key: &str, s: &str) -> Result<Vec<f64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>().map_err(|_| ModelError::InvalidValue {
                key: key.into(),
                message: format!("'{t}' is not a number"),
            })
        })
        .collect()
}

impl ProblemSpec {
    pub fn from_entries(entries: &ModelEntries) -> Result<Self> {
        let invalid = |key: &str, message: String| ModelError::InvalidValue {
            key: key.into(),
            message,
        };
        let flux = FluxModel {
            a: parse_expr(entries, "a", "u", None)?,
            b: parse_expr(entries, "b", "u", Some("1"))?,
            c: parse_expr(entries, "c", "u", Some("0"))?,
        };
        let profile = parse_expr(entries, "F", "x", None)?;
        let branch = (
            parse_number(entries, "branch_lo", None)?,
            parse_number(entries, "branch_hi", None)?,
        );
        let x_min = parse_number(entries, "x_min", Some(-20.0))?;
        let x_max = parse_number(entries, "x_max", Some(20.0))?;
        let nx_raw = parse_number(entries, "nx", Some(8000.0))?;
        let tau = parse_number(entries, "tau", Some(1e-4))?;
        let t_end = parse_number(entries, "t_end", Some(1.8))?;
        let eps = match entries.get("eps") {
            Some(s) => parse_list("eps", s)?,
            None => vec![0.01],
        };

        if !(x_min < x_max) {
            return Err(invalid("x_min", format!("x_min ({x_min}) must be below x_max ({x_max})")));
        }
        if !(nx_raw >= 16.0) || nx_raw.fract() != 0.0 {
            return Err(invalid("nx", format!("nx must be an integer >= 16, got {nx_raw}")));
        }
        if !(tau > 0.0) {
            return Err(invalid("tau", format!("tau must be positive, got {tau}")));
        }
        if !(t_end > 0.0) {
            return Err(invalid("t_end", format!("t_end must be positive, got {t_end}")));
        }
        if eps.is_empty() {
            return Err(invalid("eps", "at least one value is required".into()));
        }
        if let Some(e) = eps.iter().find(|e| !(**e > 0.0)) {
            return Err(invalid("eps", format!("all values must be positive, got {e}")));
        }

        let init = InitialData::new(profile, branch)?;
        let spec = ProblemSpec {
            name: entries.get("name").cloned().unwrap_or_else(|| "model".into()),
            flux,
            init,
            x_min,
            x_max,
            nx: nx_raw as usize,
            tau,
            eps,
            t_end,
        };
        spec.check_flux()?;
        Ok(spec)
    }

    /// Range of the initial data over the computational domain and the
    /// branch, sampled.
    pub fn solution_range(&self) -> (f64, f64) {
        let lo = self.x_min.min(self.init.branch.0);
        let hi = self.x_max.max(self.init.branch.1);
        let n = MONOTONE_CHECK_INTERVALS;
        let mut range = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..=n {
            let v = self.init.eval(lo + (hi - lo) * i as f64 / n as f64);
            if v.is_finite() {
                range = (range.0.min(v), range.1.max(v));
            }
        }
        range
    }

    fn check_flux(&self) -> Result<()> {
        let (lo, hi) = self.solution_range();
        for i in 0..FLUX_CHECK_SAMPLES {
            let u = if hi > lo {
                lo + (hi - lo) * i as f64 / (FLUX_CHECK_SAMPLES - 1) as f64
            } else {
                lo
            };
            let a = self.flux.a.eval_jet(u, 1).map_err(|source| ModelError::Expression {
                key: "a".into(),
                source,
            })?;
            if a.derivative(1).abs() < 1e-12 {
                return Err(ModelError::InvalidValue {
                    key: "a".into(),
                    message: format!("a'(u) vanishes at u = {u}"),
                });
            }
            for (key, e) in [("b", &self.flux.b), ("c", &self.flux.c)] {
                e.eval_jet(u, 1).map_err(|source| ModelError::Expression {
                    key: key.into(),
                    source,
                })?;
            }
        }
        Ok(())
    }

    /// Grid spacing of the viscous discretization.
    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    /// Standard viscous Burgers with `F = 1/(1+x^2)`.
    pub fn standard_burgers() -> Self {
        Self::from_entries(&parse_model_text(STANDARD_BURGERS).expect("builtin model"))
            .expect("builtin model is valid")
    }

    /// `u_t + u u_x = eps (u u_x)_x` with `F = 1/(1+x^2)`.
    pub fn generalized_burgers() -> Self {
        Self::from_entries(&parse_model_text(GENERALIZED_BURGERS).expect("builtin model"))
            .expect("builtin model is valid")
    }
}

pub const STANDARD_BURGERS: &str = "\
name = burgers
a = u
b = 1
c = 0
F = 1/(1+x^2)
branch_lo = 0
branch_hi = 20
x_min = -20
x_max = 20
nx = 8000
tau = 1e-4
eps = 0.0025, 0.005, 0.0075, 0.01, 0.025, 0.05, 0.075, 0.1
t_end = 1.8
";

pub const GENERALIZED_BURGERS: &str = "\
name = generalized
a = u
b = u
c = 1
F = 1/(1+x^2)
branch_lo = 0
branch_hi = 20
x_min = -20
x_max = 20
nx = 8000
tau = 1e-4
eps = 0.01, 0.025, 0.05, 0.075, 0.1
t_end = 1.8
";

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn entries(extra: &[(&str, &str)]) -> ModelEntries {
        let mut e = parse_model_text(STANDARD_BURGERS).unwrap();
        for (k, v) in extra {
            e.insert(k.to_string(), v.to_string());
        }
        e
    }

    #[test]
    fn builtin_models_validate() {
        let s = ProblemSpec::standard_burgers();
        assert_eq!(s.nx, 8000);
        assert_eq!(s.eps.len(), 8);
        let g = ProblemSpec::generalized_burgers();
        assert_eq!(g.flux.b.eval(0.5), 0.5);
        assert_eq!(g.flux.c.eval(0.5), 1.0);
    }

    #[test]
    fn parabola_not_monotone_through_zero() {
        let e = entries(&[("F", "x^2"), ("branch_lo", "-1"), ("branch_hi", "1")]);
        match ProblemSpec::from_entries(&e).unwrap_err() {
            ModelError::NotMonotone { x } => assert!(x.abs() < 1e-12, "x = {x}"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn invariant_violations_name_the_field() {
        let cases = [
            ("nx", "8", "nx"),
            ("tau", "0", "tau"),
            ("eps", "0.1, -0.2", "eps"),
            ("x_min", "30", "x_min"),
        ];
        for (key, value, field) in cases {
            match ProblemSpec::from_entries(&entries(&[(key, value)])).unwrap_err() {
                ModelError::InvalidValue { key, .. } => assert_eq!(key, field),
                other => panic!("{key}: unexpected {other}"),
            }
        }
        match ProblemSpec::from_entries(&entries(&[("a", "1")])).unwrap_err() {
            ModelError::InvalidValue { key, .. } => assert_eq!(key, "a"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn expression_errors_carry_key() {
        match ProblemSpec::from_entries(&entries(&[("F", "1/(1+x^2")])).unwrap_err() {
            ModelError::Expression { key, source } => {
                assert_eq!(key, "F");
                assert_eq!(source.offset(), Some(8));
            }
            other => panic!("unexpected {other}"),
        }
        // a, b, c are functions of u.
        assert!(matches!(
            ProblemSpec::from_entries(&entries(&[("b", "x")])).unwrap_err(),
            ModelError::Expression { .. }
        ));
    }

    #[test]
    fn file_format_errors() {
        assert!(matches!(
            parse_model_text("a = u\nnonsense\n").unwrap_err(),
            ModelError::Format { line: 2, .. }
        ));
        assert!(matches!(
            parse_model_text("speed = 3").unwrap_err(),
            ModelError::UnknownKey(_)
        ));
        let mut e = entries(&[]);
        e.remove("F");
        assert!(matches!(
            ProblemSpec::from_entries(&e).unwrap_err(),
            ModelError::MissingKey("F")
        ));
    }

    #[test]
    fn inverse_jet_at_inflection() {
        let s = ProblemSpec::standard_burgers();
        let s3 = 3f64.sqrt();
        let j = inverse_initial_jet(&s.init, 0.75).unwrap();
        assert_relative_eq!(j.value(), 1.0 / s3, epsilon = 1e-13);
        assert_relative_eq!(j.derivative(1), -8.0 / (3.0 * s3), epsilon = 1e-12);
        assert!(j.derivative(2).abs() < 1e-10);
        assert_relative_eq!(j.derivative(3), -256.0 * s3 / 27.0, epsilon = 1e-9);
    }

    #[test]
    fn inverse_of_identity() {
        let init = InitialData::new(Expression::parse("x").unwrap(), (-5.0, 5.0)).unwrap();
        let j = inverse_initial_jet(&init, 1.25).unwrap();
        assert_relative_eq!(j.value(), 1.25, epsilon = 1e-14);
        assert_eq!(j.derivative(1), 1.0);
        assert_eq!(j.derivative(2), 0.0);
        assert_eq!(j.derivative(3), 0.0);
    }

    #[test]
    fn inverse_at_half() {
        let s = ProblemSpec::standard_burgers();
        let j = inverse_initial_jet(&s.init, 0.5).unwrap();
        assert_relative_eq!(j.value(), 1.0, epsilon = 1e-13);
        assert_relative_eq!(j.derivative(1), -2.0, epsilon = 1e-12);
        assert!(matches!(
            inverse_initial_jet(&s.init, 1.5),
            Err(ModelError::OutOfRange { .. })
        ));
    }

    #[test]
    fn loads_from_file_with_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gen.model");
        std::fs::write(&path, GENERALIZED_BURGERS.replace("name = generalized\n", "")).unwrap();
        let mut over = ModelEntries::new();
        over.insert("nx".into(), "400".into());
        let s = load_problem_with(&path, &over).unwrap();
        assert_eq!(s.name, "gen");
        assert_eq!(s.nx, 400);
        let missing = load_problem(dir.path().join("nope.model")).unwrap_err();
        assert!(missing.to_string().contains("nope.model"));
    }
}
