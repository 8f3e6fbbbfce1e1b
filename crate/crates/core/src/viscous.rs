//! Finite-difference solver for `u_t + a(u) u_x = eps [b(u) u_xx + c(u) u_x^2]`
//! on a bounded interval, and a Cole-Hopf quadrature reference for the
//! plain viscous Burgers equation.
//!
//! Each step freezes the coefficients at the old level and solves one
//! tridiagonal system for the new level:
//!
//! ```text
//! (u' - u)/tau + q(u) D u' = eps D(b(u) D u'),   q = a - eps (c - b') D u
//! ```
//!
//! `D(b D u)` is the conservative three-point form with `b` averaged to
//! the half nodes. It already carries the `b'(u) u_x^2` part of
//! `b u_xx + c u_x^2`, so only `(c - b') u_x^2` remains and is folded into
//! the advection speed. End nodes keep their initial values.

use thiserror::Error;

use crate::expr::ExprError;
use crate::model::ProblemSpec;
use crate::numerics::{find_root, thomas_solve_into, Bracket, NumericsError};

#[derive(Debug, Error)]
pub enum ViscousError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("zero pivot in row {row} at t = {t}; try a smaller time step (e.g. tau = {suggested_tau:e})")]
    ZeroPivot { row: usize, t: f64, suggested_tau: f64 },
    #[error("non-finite value at node {node}, t = {t}")]
    NonFinite { node: usize, t: f64 },
    #[error("Cole-Hopf reference needs a(u) = u, b(u) = 1, c(u) = 0; {0}")]
    NotBurgers(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, ViscousError>;

/// Uniform grid with `nx` cells and `nx + 1` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub h: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, nx: usize) -> Result<Self> {
        if nx < 16 || !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(ViscousError::InvalidInput(format!(
                "grid needs finite x_min < x_max and nx >= 16 (got [{x_min}, {x_max}], nx = {nx})"
            )));
        }
        Ok(Grid1D {
            x_min,
            x_max,
            nx,
            h: (x_max - x_min) / nx as f64,
        })
    }

    pub fn from_spec(spec: &ProblemSpec) -> Result<Self> {
        Self::new(spec.x_min, spec.x_max, spec.nx)
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.nx {
            self.x_max
        } else {
            self.x_min + self.h * i as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.nx).map(|i| self.node(i)).collect()
    }

    /// Linear interpolation of nodal values at `x` (clamped to the grid).
    pub fn interpolate(&self, u: &[f64], x: f64) -> f64 {
        let s = ((x - self.x_min) / self.h).clamp(0.0, self.nx as f64);
        let i = (s.floor() as usize).min(self.nx - 1);
        let w = s - i as f64;
        (1.0 - w) * u[i] + w * u[i + 1]
    }
}

/// Trapezoidal integral of nodal values with spacing `h`.
pub fn trapezoid(u: &[f64], h: f64) -> f64 {
    match u {
        [] | [_] => 0.0,
        [first, inner @ .., last] => h * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub t: f64,
    pub u: Vec<f64>,
    /// `(t, ∫u dx)` after initialisation and after every step.
    pub mass_history: Vec<(f64, f64)>,
    pub eps: f64,
}

impl SolverState {
    pub fn initial_mass(&self) -> f64 {
        self.mass_history[0].1
    }

    pub fn mass(&self) -> f64 {
        self.mass_history[self.mass_history.len() - 1].1
    }

    /// `(m(t) - m(0)) / m(0)` for the latest record.
    pub fn relative_drift(&self) -> f64 {
        let m0 = self.initial_mass();
        (self.mass() - m0) / m0.abs()
    }

    /// Largest `|m(t) - m(0)| / |m(0)|` over the history.
    pub fn max_relative_drift(&self) -> f64 {
        let m0 = self.initial_mass();
        self.mass_history
            .iter()
            .map(|&(_, m)| ((m - m0) / m0.abs()).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
}

/// Reusable solver: grid, coefficient buffers and the tridiagonal system.
#[derive(Debug, Clone)]
pub struct ViscousSolver<'a> {
    spec: &'a ProblemSpec,
    grid: Grid1D,
    b_constant: Option<f64>,
    c_is_zero: bool,
    a: Vec<f64>,
    b: Vec<f64>,
    extra: Vec<f64>,
    sub: Vec<f64>,
    main: Vec<f64>,
    sup: Vec<f64>,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
    next: Vec<f64>,
}

impl<'a> ViscousSolver<'a> {
    pub fn new(spec: &'a ProblemSpec) -> Result<Self> {
        let grid = Grid1D::from_spec(spec)?;
        let n = grid.nx + 1;
        let b_constant = spec.flux.b.is_constant().then(|| spec.flux.b.eval(0.0));
        let c_is_zero = spec.flux.c.is_constant() && spec.flux.c.eval(0.0) == 0.0;
        Ok(ViscousSolver {
            spec,
            grid,
            b_constant,
            c_is_zero,
            a: vec![0.0; n],
            b: vec![0.0; n],
            extra: vec![0.0; n],
            sub: vec![0.0; n - 1],
            main: vec![0.0; n],
            sup: vec![0.0; n - 1],
            rhs: vec![0.0; n],
            scratch: vec![0.0; n],
            next: vec![0.0; n],
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn spec(&self) -> &ProblemSpec {
        self.spec
    }

    /// `u_i = F(x_i)` at `t = 0`.
    pub fn init_state(&self, eps: f64) -> Result<SolverState> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(ViscousError::InvalidInput(format!("eps must be positive, got {eps}")));
        }
        let u = self
            .grid
            .nodes()
            .into_iter()
            .map(|x| self.spec.init.profile.try_eval(x))
            .collect::<std::result::Result<Vec<f64>, ExprError>>()?;
        let mass = trapezoid(&u, self.grid.h);
        Ok(SolverState {
            t: 0.0,
            u,
            mass_history: vec![(0.0, mass)],
            eps,
        })
    }

    fn coefficients(&mut self, u: &[f64]) -> Result<()> {
        let flux = &self.spec.flux;
        let two_h = 2.0 * self.grid.h;
        let n = u.len();
        for i in 0..n {
            self.a[i] = flux.a.try_eval(u[i])?;
            self.b[i] = match self.b_constant {
                Some(b) => b,
                None => flux.b.try_eval(u[i])?,
            };
        }
        // (c - b') at each interior node times the old central slope.
        self.extra.fill(0.0);
        if !(self.c_is_zero && self.b_constant.is_some()) {
            for i in 1..n - 1 {
                let c = if self.c_is_zero { 0.0 } else { flux.c.try_eval(u[i])? };
                let bp = match self.b_constant {
                    Some(_) => 0.0,
                    None => flux.b.eval_jet(u[i], 1)?.derivative(1),
                };
                self.extra[i] = (c - bp) * (u[i + 1] - u[i - 1]) / two_h;
            }
        }
        Ok(())
    }

    /// Advances `state` by `tau`.
    pub fn step(&mut self, state: &mut SolverState, tau: f64) -> Result<()> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(ViscousError::InvalidInput(format!("tau must be positive, got {tau}")));
        }
        self.advance(state, tau, state.t + tau)
    }

    fn advance(&mut self, state: &mut SolverState, tau: f64, t_new: f64) -> Result<()> {
        let eps = state.eps;
        let n = state.u.len();
        if n != self.grid.nx + 1 {
            return Err(ViscousError::InvalidInput(format!(
                "state has {} nodes, grid has {}",
                n,
                self.grid.nx + 1
            )));
        }
        self.coefficients(&state.u)?;
        let h = self.grid.h;
        let inv_tau = 1.0 / tau;
        let d = eps / (h * h);
        let two_h = 2.0 * h;

        self.main[0] = 1.0;
        self.sup[0] = 0.0;
        self.rhs[0] = state.u[0];
        self.main[n - 1] = 1.0;
        self.sub[n - 2] = 0.0;
        self.rhs[n - 1] = state.u[n - 1];
        for i in 1..n - 1 {
            let q = self.a[i] - eps * self.extra[i];
            let b_left = 0.5 * (self.b[i - 1] + self.b[i]);
            let b_right = 0.5 * (self.b[i] + self.b[i + 1]);
            self.sub[i - 1] = -q / two_h - d * b_left;
            self.main[i] = inv_tau + d * (b_left + b_right);
            self.sup[i] = q / two_h - d * b_right;
            self.rhs[i] = state.u[i] * inv_tau;
        }
        thomas_solve_into(
            &self.sub,
            &self.main,
            &self.sup,
            &self.rhs,
            &mut self.scratch,
            &mut self.next,
        )
        .map_err(|e| match e {
            NumericsError::ZeroPivot { row } => ViscousError::ZeroPivot {
                row,
                t: state.t,
                suggested_tau: 0.5 * tau,
            },
            other => other.into(),
        })?;
        if let Some(node) = self.next.iter().position(|v| !v.is_finite()) {
            return Err(ViscousError::NonFinite { node, t: t_new });
        }
        std::mem::swap(&mut state.u, &mut self.next);
        state.t = t_new;
        state.mass_history.push((t_new, trapezoid(&state.u, h)));
        Ok(())
    }

    /// Steps with `tau` until `t_target`, shortening the last step.
    /// Snapshots at the requested times are interpolated linearly between
    /// the bracketing steps and returned in ascending time order.
    pub fn run_to(
        &mut self,
        state: &mut SolverState,
        t_target: f64,
        tau: f64,
        snapshot_times: &[f64],
    ) -> Result<Vec<Snapshot>> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(ViscousError::InvalidInput(format!("tau must be positive, got {tau}")));
        }
        if !(t_target >= state.t) {
            return Err(ViscousError::InvalidInput(format!(
                "target time {t_target} is before the current time {}",
                state.t
            )));
        }
        let mut pending: Vec<f64> = snapshot_times.to_vec();
        if let Some(bad) = pending.iter().find(|&&s| !(s >= state.t && s <= t_target)) {
            return Err(ViscousError::InvalidInput(format!(
                "snapshot time {bad} lies outside [{}, {t_target}]",
                state.t
            )));
        }
        pending.sort_by(f64::total_cmp);
        let mut pending = pending.into_iter().peekable();
        let mut snapshots = Vec::with_capacity(snapshot_times.len());
        while let Some(&s) = pending.peek() {
            if s > state.t {
                break;
            }
            snapshots.push(Snapshot { t: s, u: state.u.clone() });
            pending.next();
        }

        let t_start = state.t;
        // Times from the step count, so long runs do not accumulate drift.
        let steps = ((t_target - t_start) / tau * (1.0 - 1e-12)).ceil() as u64;
        let mut prev = state.u.clone();
        for k in 1..=steps {
            let t_old = state.t;
            let t_new = if k == steps { t_target } else { t_start + k as f64 * tau };
            prev.copy_from_slice(&state.u);
            self.advance(state, t_new - t_old, t_new)?;
            while let Some(&s) = pending.peek() {
                if s > t_new {
                    break;
                }
                let w = if t_new > t_old { (s - t_old) / (t_new - t_old) } else { 1.0 };
                let u = prev
                    .iter()
                    .zip(&state.u)
                    .map(|(p, n)| (1.0 - w) * p + w * n)
                    .collect();
                snapshots.push(Snapshot { t: s, u });
                pending.next();
            }
        }
        Ok(snapshots)
    }
}

/// Solver state at `t = 0` for the given `eps`.
pub fn init_state(spec: &ProblemSpec, eps: f64) -> Result<SolverState> {
    ViscousSolver::new(spec)?.init_state(eps)
}

/// One step of length `tau`; for repeated steps keep a [`ViscousSolver`].
pub fn step(spec: &ProblemSpec, state: &mut SolverState, tau: f64) -> Result<()> {
    ViscousSolver::new(spec)?.step(state, tau)
}

/// Runs to `t_target` with the spec's time step.
pub fn run_to(
    spec: &ProblemSpec,
    state: &mut SolverState,
    t_target: f64,
    snapshot_times: &[f64],
) -> Result<Vec<Snapshot>> {
    ViscousSolver::new(spec)?.run_to(state, t_target, spec.tau, snapshot_times)
}

// Five-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Weight cut-off used for the Cole-Hopf integrals, as for the profile.
const CH_TRUNCATION: f64 = 40.0;
const CH_SCAN: usize = 4000;

/// Cole-Hopf solution of `u_t + u u_x = eps u_xx`, `u(x, 0) = F(x)`:
///
/// ```text
/// u(x, t) = ∫ ((x - y)/t) e^{-G/(2 eps)} dy / ∫ e^{-G/(2 eps)} dy,
/// G(y) = Φ(y) + (x - y)^2 / (2t),   Φ' = F.
/// ```
///
/// `Φ` is tabulated once on a uniform grid and completed by a short
/// Gauss-Legendre panel from the nearest node.
#[derive(Debug, Clone)]
pub struct ColeHopf<'a> {
    spec: &'a ProblemSpec,
    y_lo: f64,
    dy: f64,
    phi: Vec<f64>,
    f_min: f64,
    f_max: f64,
}

impl<'a> ColeHopf<'a> {
    /// Tabulates `Φ` on `[y_lo, y_hi]` with spacing at most `0.01`.
    pub fn new(spec: &'a ProblemSpec, y_lo: f64, y_hi: f64) -> Result<Self> {
        check_burgers(spec)?;
        if !(y_hi > y_lo) || !y_lo.is_finite() || !y_hi.is_finite() {
            return Err(ViscousError::InvalidInput(format!(
                "bad tabulation range [{y_lo}, {y_hi}]"
            )));
        }
        let cells = ((y_hi - y_lo) / 0.01).ceil() as usize;
        let dy = (y_hi - y_lo) / cells as f64;
        let f = &spec.init.profile;
        let mut phi = Vec::with_capacity(cells + 1);
        phi.push(0.0);
        let mut acc = 0.0;
        let (mut f_min, mut f_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for j in 0..cells {
            let a = y_lo + dy * j as f64;
            acc += gauss_legendre(|y| f.eval(y), a, a + dy);
            phi.push(acc);
            for k in 0..4 {
                let v = f.try_eval(a + 0.25 * dy * k as f64)?;
                f_min = f_min.min(v);
                f_max = f_max.max(v);
            }
        }
        if !acc.is_finite() {
            return Err(ViscousError::InvalidInput(
                "initial data is not finite on the tabulation range".into(),
            ));
        }
        Ok(ColeHopf {
            spec,
            y_lo,
            dy,
            phi,
            f_min,
            f_max,
        })
    }

    /// Tabulation covering the spec's domain with a generous margin for
    /// times up to `t_end`.
    pub fn for_spec(spec: &'a ProblemSpec) -> Result<Self> {
        let reach = 20.0;
        Self::new(spec, spec.x_min - reach, spec.x_max + reach)
    }

    fn y_hi(&self) -> f64 {
        self.y_lo + self.dy * (self.phi.len() - 1) as f64
    }

    /// Primitive of `F`, up to an additive constant.
    pub fn primitive(&self, y: f64) -> f64 {
        let s = ((y - self.y_lo) / self.dy).round().clamp(0.0, (self.phi.len() - 1) as f64);
        let j = s as usize;
        let yj = self.y_lo + self.dy * j as f64;
        let f = &self.spec.init.profile;
        self.phi[j] + gauss_legendre(|z| f.eval(z), yj, y)
    }

    /// `u(x, t)` for the given `eps`, quadrature tolerance `tol`.
    pub fn reference(&self, x: f64, t: f64, eps: f64, tol: f64) -> Result<f64> {
        if !(t > 0.0) || !(eps > 0.0) || !x.is_finite() {
            return Err(ViscousError::InvalidInput(format!(
                "reference needs t > 0, eps > 0 and finite x (x={x}, t={t}, eps={eps})"
            )));
        }
        let g = |y: f64| self.primitive(y) + (x - y) * (x - y) / (2.0 * t);
        let scale = 1.0 / (2.0 * eps);

        // Minimizers satisfy F(y) = (x - y)/t, so they lie in this range.
        let lo = x - t * self.f_max;
        let hi = x - t * self.f_min;
        let mut minima = Vec::new();
        if hi - lo <= 1e-14 * (1.0 + x.abs()) {
            minima.push(0.5 * (lo + hi));
        } else {
            let ys: Vec<f64> = (0..=CH_SCAN)
                .map(|k| lo + (hi - lo) * k as f64 / CH_SCAN as f64)
                .collect();
            let gs: Vec<f64> = ys.iter().map(|&y| g(y)).collect();
            let slope = |y: f64| self.spec.init.profile.eval(y) - (x - y) / t;
            for k in 0..=CH_SCAN {
                let left_ok = k == 0 || gs[k] <= gs[k - 1];
                let right_ok = k == CH_SCAN || gs[k] <= gs[k + 1];
                if !(left_ok && right_ok) {
                    continue;
                }
                let a = ys[k.saturating_sub(1)];
                let b = ys[(k + 1).min(CH_SCAN)];
                let y = if slope(a) * slope(b) < 0.0 {
                    find_root(slope, Bracket::new(a, b)?, 1e-14 * (1.0 + x.abs()))?
                } else {
                    ys[k]
                };
                if minima.last().is_none_or(|&m: &f64| (y - m).abs() > 1e-12) {
                    minima.push(y);
                }
            }
        }
        let g_min = minima.iter().map(|&y| g(y)).fold(f64::INFINITY, f64::min);
        let excess = |y: f64| (g(y) - g_min) * scale - CH_TRUNCATION;
        let width = (2.0 * eps * t).sqrt();
        let edge = |start: f64, dir: f64| -> Result<f64> {
            let mut near = start;
            let mut step = width;
            let mut far = start + dir * step;
            while excess(far) < 0.0 {
                near = far;
                step *= 2.0;
                far = start + dir * step;
            }
            let (a, b) = if dir < 0.0 { (far, near) } else { (near, far) };
            Ok(find_root(excess, Bracket::new(a, b)?, 1e-12 * width)?)
        };
        let left = edge(minima[0], -1.0)?;
        let right = edge(minima[minima.len() - 1], 1.0)?;
        if left < self.y_lo || right > self.y_hi() {
            return Err(ViscousError::InvalidInput(format!(
                "integration window [{left}, {right}] leaves the tabulated range [{}, {}]",
                self.y_lo,
                self.y_hi()
            )));
        }
        let mut points = vec![left];
        points.extend(minima.iter().copied().filter(|&m| m > left && m < right));
        points.push(right);

        let y_star = minima
            .iter()
            .copied()
            .min_by(|a, b| g(*a).total_cmp(&g(*b)))
            .expect("at least one minimum");
        let weight = |y: f64| (-(g(y) - g_min) * scale).exp();
        let mass = crate::numerics::adaptive_quad_pieces(weight, &points, tol * width)?;
        let moment =
            crate::numerics::adaptive_quad_pieces(|y| (y - y_star) * weight(y), &points, tol * width)?;
        let mean_y = y_star + moment / mass;
        Ok((x - mean_y) / t)
    }
}

fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * GL_NODES
        .iter()
        .zip(GL_WEIGHTS)
        .map(|(&z, w)| w * f(mid + half * z))
        .sum::<f64>()
}

fn check_burgers(spec: &ProblemSpec) -> Result<()> {
    let flux = &spec.flux;
    for u in [-3.0, -1.0, -0.25, 0.0, 0.5, 1.0, 2.0, 7.0] {
        let (a, b, c) = (flux.a.eval(u), flux.b.eval(u), flux.c.eval(u));
        if (a - u).abs() > 1e-12 * (1.0 + u.abs()) {
            return Err(ViscousError::NotBurgers(format!("a({u}) = {a}")));
        }
        if (b - 1.0).abs() > 1e-12 {
            return Err(ViscousError::NotBurgers(format!("b({u}) = {b}")));
        }
        if c.abs() > 1e-12 {
            return Err(ViscousError::NotBurgers(format!("c({u}) = {c}")));
        }
    }
    Ok(())
}

/// One-off Cole-Hopf evaluation; see [`ColeHopf::reference`].
pub fn cole_hopf_reference(spec: &ProblemSpec, x: f64, t: f64, eps: f64, tol: f64) -> Result<f64> {
    ColeHopf::for_spec(spec)?.reference(x, t, eps, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expression;
    use crate::model::{parse_model_text, InitialData, STANDARD_BURGERS};

    /// Spec with initial data `profile`, bypassing the branch check that
    /// only the characteristic machinery needs.
    fn with_profile(base: ProblemSpec, profile: &str) -> ProblemSpec {
        ProblemSpec {
            init: InitialData {
                profile: Expression::parse_in(profile, "x").unwrap(),
                branch: (0.0, 1.0),
            },
            ..base
        }
    }

    fn burgers_with(extra: &[(&str, &str)]) -> ProblemSpec {
        let mut e = parse_model_text(STANDARD_BURGERS).unwrap();
        for (k, v) in extra {
            e.insert(k.to_string(), v.to_string());
        }
        ProblemSpec::from_entries(&e).unwrap()
    }

    #[test]
    fn initial_state() {
        let spec = ProblemSpec::standard_burgers();
        let s = init_state(&spec, 0.1).unwrap();
        assert_eq!(s.u.len(), 8001);
        assert!((s.initial_mass() - 2.0 * 20f64.atan()).abs() < 1e-5);

        let flat = with_profile(burgers_with(&[("nx", "16")]), "5");
        let s = init_state(&flat, 0.1).unwrap();
        assert_eq!(s.u.len(), 17);
        assert!(s.u.iter().all(|&v| v == 5.0));
        assert!((s.initial_mass() - 200.0).abs() < 1e-12);
    }

    #[test]
    fn constant_state_is_stationary() {
        let flat = with_profile(burgers_with(&[("nx", "64"), ("b", "1 + u^2"), ("c", "u")]), "0.3");
        let mut solver = ViscousSolver::new(&flat).unwrap();
        let mut s = solver.init_state(0.05).unwrap();
        for _ in 0..10 {
            solver.step(&mut s, 0.01).unwrap();
        }
        assert!(s.u.iter().all(|&v| (v - 0.3).abs() < 1e-14));
        assert!((s.t - 0.1).abs() < 1e-15);
        assert_eq!(s.mass_history.len(), 11);
    }

    #[test]
    fn run_to_and_snapshots() {
        let spec = burgers_with(&[("nx", "400")]);
        let mut solver = ViscousSolver::new(&spec).unwrap();
        let mut s = solver.init_state(0.1).unwrap();
        assert!(solver.run_to(&mut s, 0.0, 0.01, &[]).unwrap().is_empty());
        assert_eq!(s.mass_history.len(), 1);

        let snaps = solver.run_to(&mut s, 0.105, 0.01, &[0.105, 0.0, 0.025]).unwrap();
        assert_eq!(s.t, 0.105);
        assert_eq!(s.mass_history.len(), 12);
        let times: Vec<f64> = snaps.iter().map(|p| p.t).collect();
        assert_eq!(times, vec![0.0, 0.025, 0.105]);
        assert_eq!(snaps[2].u, s.u);
        assert!(s.mass_history.windows(2).all(|w| w[1].0 > w[0].0));
        assert!(solver.run_to(&mut s, 0.2, 0.01, &[0.05]).is_err());
    }

    #[test]
    fn cole_hopf_limits() {
        let spec = ProblemSpec::standard_burgers();
        let ch = ColeHopf::for_spec(&spec).unwrap();
        for x in [-1.0, 0.0, 0.5, 2.0] {
            let u = ch.reference(x, 1e-6, 0.1, 1e-10).unwrap();
            assert!((u - 1.0 / (1.0 + x * x)).abs() < 1e-3, "{x}: {u}");
        }
        let zero = with_profile(ProblemSpec::standard_burgers(), "0");
        let ch0 = ColeHopf::for_spec(&zero).unwrap();
        for (x, t) in [(0.0, 1.0), (3.0, 0.2)] {
            assert!(ch0.reference(x, t, 0.05, 1e-10).unwrap().abs() < 1e-12);
        }
        let gen = ProblemSpec::generalized_burgers();
        assert!(matches!(ColeHopf::for_spec(&gen), Err(ViscousError::NotBurgers(_))));
    }

    #[test]
    fn primitive_matches_arctan() {
        let spec = ProblemSpec::standard_burgers();
        let ch = ColeHopf::for_spec(&spec).unwrap();
        let base = ch.primitive(0.0);
        for y in [-7.3, -1.0, 0.004, 1.0, 3.33, 19.99] {
            assert!((ch.primitive(y) - base - f64::atan(y)).abs() < 1e-13, "{y}");
        }
    }

    #[test]
    fn smooth_solution_matches_cole_hopf() {
        let spec = burgers_with(&[("nx", "2000")]);
        let mut solver = ViscousSolver::new(&spec).unwrap();
        let mut s = solver.init_state(0.1).unwrap();
        solver.run_to(&mut s, 1.0, 1e-3, &[]).unwrap();
        let ch = ColeHopf::for_spec(&spec).unwrap();
        let grid = *solver.grid();
        let mut worst: f64 = 0.0;
        for i in (0..=grid.nx).step_by(10) {
            let x = grid.node(i);
            worst = worst.max((s.u[i] - ch.reference(x, 1.0, 0.1, 1e-10).unwrap()).abs());
        }
        assert!(worst < 5e-3, "{worst}");
    }
}
