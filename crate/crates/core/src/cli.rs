//! Experiment drivers behind the `burgers-crit` binary.
//!
//! Each `cmd_*` function takes an already validated [`ProblemSpec`] and
//! returns a report; the `write_*` functions turn reports into CSV. Runs
//! over several `eps` values are independent and execute in parallel when
//! the `parallel` feature is on. Results always come back in input order,
//! so the output files do not depend on scheduling.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::asymptotic::{ilin_u, scaling_constants, AsymptoticError, ScalingConstants};
use crate::inviscid::{find_catastrophe, CatastrophePoint, InviscidError};
use crate::model::{ModelError, ProblemSpec};
use crate::numerics::{fit_slope, NumericsError, SlopeFit};
use crate::pearcey::{profile_u, ProfileQuery};
use crate::shockfront::{self, ShockError, ShockTrace};
use crate::viscous::{Grid1D, Snapshot, ViscousError, ViscousSolver};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Inviscid(#[from] InviscidError),
    #[error(transparent)]
    Asymptotic(#[from] AsymptoticError),
    #[error(transparent)]
    Viscous(#[from] ViscousError),
    #[error(transparent)]
    Shock(#[from] ShockError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

impl CliError {
    /// Short stable tag for the machine-readable error line.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } | CliError::Csv(_) => "io",
            CliError::Model(_) => "model",
            CliError::Inviscid(_) => "inviscid",
            CliError::Asymptotic(_) => "asymptotic",
            CliError::Viscous(_) => "viscous",
            CliError::Shock(_) => "shockfront",
            CliError::Numerics(_) => "numerics",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Maps `f` over the `eps` values, in parallel when enabled.
fn per_eps<T, F>(eps: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        eps.par_iter().map(|&e| f(e)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        eps.iter().map(|&e| f(e)).collect()
    }
}

fn check_eps(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(usage("the eps list is empty"));
    }
    if let Some(bad) = eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(usage(format!("eps values must be positive, got {bad}")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct CatastropheReport {
    pub name: String,
    pub point: CatastrophePoint,
    pub scaling: ScalingConstants,
}

pub fn cmd_catastrophe(spec: &ProblemSpec) -> Result<CatastropheReport> {
    let point = find_catastrophe(spec)?;
    let scaling = scaling_constants(&point, &spec.flux)?;
    Ok(CatastropheReport {
        name: spec.name.clone(),
        point,
        scaling,
    })
}

impl fmt::Display for CatastropheReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.point;
        let s = &self.scaling;
        writeln!(f, "model     {}", self.name)?;
        writeln!(f, "x0        {:.12}", p.x0)?;
        writeln!(f, "t0        {:.12}", p.t0)?;
        writeln!(f, "v0        {:.12}", p.v0)?;
        writeln!(f, "foot      {:.12}", p.x_foot)?;
        writeln!(f, "a0 a0' a0'' a0'''   {:.10} {:.10} {:.10} {:.10}", p.a0, p.a0p, p.a0pp, p.a0ppp)?;
        writeln!(f, "f0' f0'' f0'''      {:.10} {:.10} {:.10}", p.f0p, p.f0pp, p.f0ppp)?;
        writeln!(f, "kappa     {:.12}", p.kappa)?;
        let r = p.residuals();
        writeln!(f, "residuals a0'*t0 + f0' = {:.3e}, a0''*t0 + f0'' = {:.3e}, x0 - a0*t0 - f0 = {:.3e}", r[0], r[1], r[2])?;
        writeln!(f, "b0        {:.12}", s.b0)?;
        writeln!(f, "alpha     {:.12}", s.alpha)?;
        writeln!(f, "beta      {:.12}", s.beta)?;
        writeln!(f, "gamma     {:.12}", s.gamma)?;
        for (name, err) in s.identity_errors(p.a0p, p.kappa) {
            writeln!(f, "identity  {name}: {err:.3e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitMode {
    /// One point per `eps`: the mean `|diff|` over the x-list.
    #[default]
    Mean,
    /// Every `(x, eps)` pair is its own point.
    PerPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub x: f64,
    pub t: f64,
    pub eps: f64,
    pub u_numeric: f64,
    pub u_asymptotic: f64,
    pub abs_diff: f64,
}

/// Numerical and profile values on a window of grid nodes, for one `eps`.
#[derive(Debug, Clone)]
pub struct Overlay {
    pub eps: f64,
    pub t: f64,
    pub points: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub mode: FitMode,
    /// `None` when fewer than two distinct `eps` values were given.
    pub fit: Option<SlopeFit>,
    pub overlays: Vec<Overlay>,
}

#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub t_star: f64,
    pub xs: Vec<f64>,
    pub eps: Vec<f64>,
    pub tol: f64,
    pub mode: FitMode,
    /// Half width of the overlay window around the middle of the x-list;
    /// zero disables overlays.
    pub overlay_half_width: f64,
}

/// `(eps, |diff|)` points for the slope fit, which works in log space.
pub fn fit_points(rows: &[CompareRow], mode: FitMode) -> Vec<(f64, f64)> {
    match mode {
        FitMode::PerPoint => rows.iter().map(|r| (r.eps, r.abs_diff)).collect(),
        FitMode::Mean => {
            let mut eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
            eps.sort_by(f64::total_cmp);
            eps.dedup();
            eps.into_iter()
                .map(|e| {
                    let d: Vec<f64> = rows.iter().filter(|r| r.eps == e).map(|r| r.abs_diff).collect();
                    (e, d.iter().sum::<f64>() / d.len() as f64)
                })
                .collect()
        }
    }
}

pub fn cmd_compare(spec: &ProblemSpec, opts: &CompareOptions) -> Result<CompareReport> {
    check_eps(&opts.eps)?;
    if opts.xs.is_empty() {
        return Err(usage("the x list is empty"));
    }
    if !(opts.t_star > 0.0 && opts.t_star.is_finite()) {
        return Err(usage(format!("t must be positive, got {}", opts.t_star)));
    }
    let cat = find_catastrophe(spec)?;
    let sc = scaling_constants(&cat, &spec.flux)?;
    let x_mid = 0.5 * (opts.xs.iter().copied().fold(f64::INFINITY, f64::min)
        + opts.xs.iter().copied().fold(f64::NEG_INFINITY, f64::max));

    let runs = per_eps(&opts.eps, |eps| {
        let mut solver = ViscousSolver::new(spec)?;
        let mut state = solver.init_state(eps)?;
        solver.run_to(&mut state, opts.t_star, spec.tau, &[])?;
        let grid = *solver.grid();
        let mut rows = Vec::with_capacity(opts.xs.len());
        for &x in &opts.xs {
            let u_numeric = grid.interpolate(&state.u, x);
            let u_asymptotic = ilin_u(&cat, &sc, x, opts.t_star, eps, opts.tol)?;
            rows.push(CompareRow {
                x,
                t: opts.t_star,
                eps,
                u_numeric,
                u_asymptotic,
                abs_diff: (u_numeric - u_asymptotic).abs(),
            });
        }
        let mut points = Vec::new();
        if opts.overlay_half_width > 0.0 {
            for (i, x) in grid.nodes().into_iter().enumerate() {
                if (x - x_mid).abs() <= opts.overlay_half_width {
                    points.push((x, state.u[i], ilin_u(&cat, &sc, x, opts.t_star, eps, opts.tol)?));
                }
            }
        }
        Ok((rows, Overlay { eps, t: opts.t_star, points }))
    })?;

    let mut rows = Vec::new();
    let mut overlays = Vec::new();
    for (r, o) in runs {
        rows.extend(r);
        if !o.points.is_empty() {
            overlays.push(o);
        }
    }
    let mut distinct = opts.eps.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let fit = if distinct.len() >= 2 {
        Some(fit_slope(&fit_points(&rows, opts.mode))?)
    } else {
        None
    };
    Ok(CompareReport {
        rows,
        mode: opts.mode,
        fit,
        overlays,
    })
}

#[derive(Debug, Clone)]
pub struct MassSeries {
    pub eps: f64,
    /// `(t, mass, relative_drift)` after every step, starting at `t = 0`.
    pub rows: Vec<(f64, f64, f64)>,
    pub max_relative_drift: f64,
}

#[derive(Debug, Clone)]
pub struct MassReport {
    pub series: Vec<MassSeries>,
}

impl MassReport {
    pub fn max_relative_drift(&self) -> f64 {
        self.series.iter().map(|s| s.max_relative_drift).fold(0.0, f64::max)
    }
}

pub fn cmd_mass(spec: &ProblemSpec, eps: &[f64], t_end: f64) -> Result<MassReport> {
    check_eps(eps)?;
    if !(t_end > 0.0) {
        return Err(usage(format!("t_end must be positive, got {t_end}")));
    }
    let series = per_eps(eps, |e| {
        let mut solver = ViscousSolver::new(spec)?;
        let mut state = solver.init_state(e)?;
        solver.run_to(&mut state, t_end, spec.tau, &[])?;
        let m0 = state.initial_mass();
        let rows = state
            .mass_history
            .iter()
            .map(|&(t, m)| (t, m, (m - m0) / m0.abs()))
            .collect();
        Ok(MassSeries {
            eps: e,
            rows,
            max_relative_drift: state.max_relative_drift(),
        })
    })?;
    Ok(MassReport { series })
}

#[derive(Debug, Clone)]
pub struct ProfileGrid {
    pub x_range: (f64, f64),
    pub t_range: (f64, f64),
    pub nx: usize,
    pub nt: usize,
    pub tol: f64,
}

/// Rows `(X, T, U)`, T-major.
pub fn cmd_profile(grid: &ProfileGrid) -> Result<Vec<(f64, f64, f64)>> {
    if grid.nx < 1 || grid.nt < 1 {
        return Err(usage("profile grid sizes must be at least 1"));
    }
    let axis = |(lo, hi): (f64, f64), n: usize| -> Vec<f64> {
        if n == 1 {
            vec![lo]
        } else {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        }
    };
    let xs = axis(grid.x_range, grid.nx);
    let mut rows = Vec::with_capacity(grid.nx * grid.nt);
    for t in axis(grid.t_range, grid.nt) {
        for &x in &xs {
            rows.push((x, t, profile_u(ProfileQuery::new(x, t), grid.tol)?));
        }
    }
    Ok(rows)
}

pub fn cmd_shockfront(spec: &ProblemSpec, t_end: f64, dt: f64) -> Result<ShockTrace> {
    let cat = find_catastrophe(spec)?;
    if !(t_end > cat.t0) {
        return Err(usage(format!(
            "t_end = {t_end} must be after the catastrophe time {}",
            cat.t0
        )));
    }
    Ok(shockfront::trace(spec, cat.x_foot, t_end, dt)?)
}

#[derive(Debug, Clone)]
pub struct SolveRun {
    pub eps: f64,
    pub grid: Grid1D,
    pub snapshots: Vec<Snapshot>,
}

/// Runs each `eps` to the latest requested time and keeps the snapshots.
pub fn cmd_solve(spec: &ProblemSpec, eps: &[f64], times: &[f64]) -> Result<Vec<SolveRun>> {
    check_eps(eps)?;
    if times.is_empty() {
        return Err(usage("no snapshot times given"));
    }
    if let Some(bad) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(usage(format!("snapshot times must be non-negative, got {bad}")));
    }
    let t_last = times.iter().copied().fold(0.0, f64::max);
    per_eps(eps, |e| {
        let mut solver = ViscousSolver::new(spec)?;
        let mut state = solver.init_state(e)?;
        let snapshots = solver.run_to(&mut state, t_last, spec.tau, times)?;
        Ok(SolveRun {
            eps: e,
            grid: *solver.grid(),
            snapshots,
        })
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn finish<W: Write>(w: csv::Writer<W>, path: &Path) -> Result<()> {
    w.into_inner()
        .map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: io::Error::other(e.to_string()),
        })?
        .flush()
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

pub fn snapshot_path(out: &Path, name: &str, eps: f64, t: f64) -> PathBuf {
    out.join(format!("{name}_snapshot_eps{eps}_t{t}.csv"))
}

pub fn mass_path(out: &Path, name: &str, eps: f64) -> PathBuf {
    out.join(format!("{name}_mass_eps{eps}.csv"))
}

pub fn shock_path(out: &Path, name: &str) -> PathBuf {
    out.join(format!("{name}_shock.csv"))
}

pub fn compare_path(out: &Path, name: &str) -> PathBuf {
    out.join(format!("{name}_compare.csv"))
}

pub fn overlay_path(out: &Path, name: &str, eps: f64) -> PathBuf {
    out.join(format!("{name}_overlay_eps{eps}.csv"))
}

pub fn profile_path(out: &Path) -> PathBuf {
    out.join("profile.csv")
}

/// `x,u` after a comment line naming the run.
pub fn write_snapshot(path: &Path, spec: &ProblemSpec, eps: f64, grid: &Grid1D, snap: &Snapshot) -> Result<()> {
    let mut file = create(path)?;
    writeln!(
        file,
        "# model={} eps={} t={} nx={} tau={}",
        spec.name, eps, snap.t, grid.nx, spec.tau
    )
    .map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["x", "u"])?;
    for (i, u) in snap.u.iter().enumerate() {
        w.serialize((grid.node(i), u))?;
    }
    finish(w, path)
}

pub fn write_mass(path: &Path, series: &MassSeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["t", "mass", "relative_drift"])?;
    for row in &series.rows {
        w.serialize(row)?;
    }
    finish(w, path)
}

pub fn write_shock(path: &Path, spec: &ProblemSpec, trace: &ShockTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["t", "x", "a1", "a2", "u_left", "u_right", "equal_area_residual"])?;
    for r in &trace.records {
        let s = &r.state;
        w.serialize((s.t, s.x, s.a1, s.a2, s.u_left(spec), s.u_right(spec), r.equal_area_residual))?;
    }
    finish(w, path)
}

pub fn write_compare(path: &Path, report: &CompareReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["x", "t", "eps", "u_numeric", "u_asymptotic", "abs_diff"])?;
    for r in &report.rows {
        w.serialize((r.x, r.t, r.eps, r.u_numeric, r.u_asymptotic, r.abs_diff))?;
    }
    finish(w, path)
}

pub fn write_overlay(path: &Path, overlay: &Overlay) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["x", "u_numeric", "u_asymptotic"])?;
    for p in &overlay.points {
        w.serialize(p)?;
    }
    finish(w, path)
}

pub fn write_profile(path: &Path, rows: &[(f64, f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["X", "T", "U"])?;
    for r in rows {
        w.serialize(r)?;
    }
    finish(w, path)
}
