//! Shock front of the inviscid limit for `a(u) = u`.
//!
//! The front `x(t)` moves with the Rankine-Hugoniot speed
//! `(F(a1) + F(a2)) / 2`, where `a1 < a2` are the feet of the two
//! characteristics meeting it: `x = a_i + F(a_i) t`. Differentiating the
//! meeting conditions gives
//!
//! ```text
//! da1/dt = (F(a2) - F(a1)) / (2 (1 + F'(a1) t))
//! da2/dt = (F(a1) - F(a2)) / (2 (1 + F'(a2) t))
//! ```
//!
//! which is singular (0/0) at the catastrophe. The trace starts from the
//! square-root expansion a short time after it and integrates in
//! `sigma = sqrt(t - t0)`, in which the system is regular.

use thiserror::Error;

use crate::expr::ExprError;
use crate::model::ProblemSpec;
use crate::numerics::{adaptive_quad, ode_integrate, NumericsError};

/// Default seed offset `t - t0`.
pub const DEFAULT_SEED_DT: f64 = 1e-6;
/// `(a - a0)^2 = SEED_COEFFICIENT * F'(a0)^2 / F'''(a0) * (t - t0)` to
/// leading order for the equal-area pair.
pub const SEED_COEFFICIENT: f64 = 6.0;
const AREA_TOL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum ShockError {
    #[error("shock tracing supports a(u) = u only; {0}")]
    UnsupportedFlux(String),
    #[error("F'''(a0) = {0} must be positive for the square-root seed")]
    BadCurvature(f64),
    #[error("F'(a0) = {0} must be negative at the catastrophe foot")]
    NotSteepening(f64),
    #[error("characteristic {which} refocuses at t = {t}: 1 + F'(a) t = {value:e}")]
    Refocusing { which: usize, t: f64, value: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, ShockError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockState {
    pub t: f64,
    pub x: f64,
    pub a1: f64,
    pub a2: f64,
}

impl ShockState {
    pub fn u_left(&self, spec: &ProblemSpec) -> f64 {
        spec.init.eval(self.a1)
    }

    pub fn u_right(&self, spec: &ProblemSpec) -> f64 {
        spec.init.eval(self.a2)
    }

    /// `(x - a1 - F(a1) t, x - a2 - F(a2) t)`.
    pub fn crossing_residuals(&self, spec: &ProblemSpec) -> (f64, f64) {
        (
            self.x - self.a1 - spec.init.eval(self.a1) * self.t,
            self.x - self.a2 - spec.init.eval(self.a2) * self.t,
        )
    }

    /// Rankine-Hugoniot speed.
    pub fn speed(&self, spec: &ProblemSpec) -> f64 {
        0.5 * (self.u_left(spec) + self.u_right(spec))
    }
}

/// `|(F(a1) + F(a2)) (a1 - a2) / 2 - ∫_{a2}^{a1} F da|`.
pub fn equal_area_residual(spec: &ProblemSpec, a1: f64, a2: f64) -> Result<f64> {
    let f = &spec.init.profile;
    let area = adaptive_quad(|a| f.eval(a), a2, a1, AREA_TOL)?;
    Ok((0.5 * (f.eval(a1) + f.eval(a2)) * (a1 - a2) - area).abs())
}

fn check_flux(spec: &ProblemSpec) -> Result<()> {
    for u in [-2.0, -0.5, 0.0, 0.3, 1.0, 4.0] {
        let a = spec.flux.a.eval(u);
        if (a - u).abs() > 1e-12 * (1.0 + u.abs()) {
            return Err(ShockError::UnsupportedFlux(format!("a({u}) = {a}")));
        }
    }
    Ok(())
}

/// Catastrophe time and position for the characteristic from `foot`.
fn catastrophe_of(spec: &ProblemSpec, foot: f64) -> Result<(f64, f64, [f64; 4])> {
    let jet = spec.init.profile.eval_jet(foot, 3)?;
    let d = [jet.value(), jet.derivative(1), jet.derivative(2), jet.derivative(3)];
    if !(d[1] < 0.0) {
        return Err(ShockError::NotSteepening(d[1]));
    }
    let t0 = -1.0 / d[1];
    Ok((t0, foot + d[0] * t0, d))
}

/// Shock state `dt` after the catastrophe whose characteristic starts at
/// `cat_foot`.
pub fn seed(cat_foot: f64, spec: &ProblemSpec, dt: f64) -> Result<ShockState> {
    check_flux(spec)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(ShockError::InvalidInput(format!("seed offset must be positive, got {dt}")));
    }
    let (t0, x0, d) = catastrophe_of(spec, cat_foot)?;
    if !(d[3] > 0.0) {
        return Err(ShockError::BadCurvature(d[3]));
    }
    let offset = (SEED_COEFFICIENT * d[1] * d[1] / d[3] * dt).sqrt();
    Ok(ShockState {
        t: t0 + dt,
        x: x0 + d[0] * dt,
        a1: cat_foot - offset,
        a2: cat_foot + offset,
    })
}

/// One recorded point of the trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockRecord {
    pub state: ShockState,
    pub equal_area_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShockTrace {
    pub t0: f64,
    pub x0: f64,
    pub records: Vec<ShockRecord>,
}

impl ShockTrace {
    pub fn last(&self) -> &ShockRecord {
        &self.records[self.records.len() - 1]
    }

    pub fn max_equal_area_residual(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.equal_area_residual)
            .fold(0.0, f64::max)
    }

    /// Front position at `t`, linear between records.
    pub fn position_at(&self, t: f64) -> Option<f64> {
        let i = self.records.partition_point(|r| r.state.t < t);
        if i == self.records.len() {
            return None;
        }
        if i == 0 {
            return (self.records[0].state.t == t).then(|| self.records[0].state.x);
        }
        let (p, q) = (&self.records[i - 1].state, &self.records[i].state);
        let w = (t - p.t) / (q.t - p.t);
        Some((1.0 - w) * p.x + w * q.x)
    }
}

/// Traces the front from the catastrophe of `spec` to `t_end`, with steps
/// of roughly `dt` in time and the default seed.
pub fn trace(spec: &ProblemSpec, cat_foot: f64, t_end: f64, dt: f64) -> Result<ShockTrace> {
    trace_with_seed(spec, cat_foot, t_end, dt, DEFAULT_SEED_DT)
}

/// As [`trace`] with an explicit seed offset.
pub fn trace_with_seed(
    spec: &ProblemSpec,
    cat_foot: f64,
    t_end: f64,
    dt: f64,
    seed_dt: f64,
) -> Result<ShockTrace> {
    let start = seed(cat_foot, spec, seed_dt)?;
    let (t0, x0, _) = catastrophe_of(spec, cat_foot)?;
    if !(t_end > start.t) {
        return Err(ShockError::InvalidInput(format!(
            "t_end = {t_end} must exceed the seed time {}",
            start.t
        )));
    }
    if !(dt > 0.0) {
        return Err(ShockError::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    let f = &spec.init.profile;
    let s0 = seed_dt.sqrt();
    let s1 = (t_end - t0).sqrt();
    let steps = ((t_end - start.t) / dt).ceil().max(1.0);
    let ds = (s1 - s0) / steps;

    let rhs = |s: f64, y: &[f64; 3]| -> [f64; 3] {
        let t = t0 + s * s;
        let (f1, f2) = (f.eval(y[1]), f.eval(y[2]));
        let d1 = 1.0 + f.eval_jet(y[1], 1).map_or(f64::NAN, |j| j.derivative(1)) * t;
        let d2 = 1.0 + f.eval_jet(y[2], 1).map_or(f64::NAN, |j| j.derivative(1)) * t;
        // dt/ds = 2s
        [s * (f1 + f2), s * (f2 - f1) / d1, s * (f1 - f2) / d2]
    };
    let path = ode_integrate(rhs, [start.x, start.a1, start.a2], s0, s1, ds)?;

    let mut records = Vec::with_capacity(path.len());
    for (s, y) in path {
        let t = if s == s1 { t_end } else { t0 + s * s };
        for (which, a) in [(1, y[1]), (2, y[2])] {
            let value = 1.0 + f.eval_jet(a, 1)?.derivative(1) * t;
            if !(value > 0.0) {
                return Err(ShockError::Refocusing { which, t, value });
            }
        }
        let state = ShockState {
            t,
            x: y[0],
            a1: y[1],
            a2: y[2],
        };
        records.push(ShockRecord {
            state,
            equal_area_residual: equal_area_residual(spec, state.a1, state.a2)?,
        });
    }
    Ok(ShockTrace { t0, x0, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inviscid::find_catastrophe;
    use crate::model::{parse_model_text, STANDARD_BURGERS};

    fn foot() -> f64 {
        1.0 / 3f64.sqrt()
    }

    #[test]
    fn seed_values() {
        let spec = ProblemSpec::standard_burgers();
        let s = seed(foot(), &spec, 1e-6).unwrap();
        let s3 = 3f64.sqrt();
        // F' = -3 sqrt3 / 8, F''' = 27 sqrt3 / 16 at the foot.
        let offset = (6.0 * (27.0 / 64.0) / (27.0 * s3 / 16.0) * 1e-6).sqrt();
        assert!((s.a1 - (foot() - offset)).abs() < 1e-12);
        assert!((s.a2 - (foot() + offset)).abs() < 1e-12);
        assert!((s.x - (s3 + 0.75e-6)).abs() < 1e-12);
        assert!((s.t - (8.0 * s3 / 9.0 + 1e-6)).abs() < 1e-12);
        let still = ShockState { a1: foot(), a2: foot(), ..s };
        assert!((still.speed(&spec) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn seeded_characteristics_meet() {
        // The equal-area pair meets at one point to O(dt^2); the smaller
        // offset with coefficient 2 misses by O(dt^(3/2)).
        let spec = ProblemSpec::standard_burgers();
        let dt = 1e-4;
        let s = seed(foot(), &spec, dt).unwrap();
        let (r1, r2) = s.crossing_residuals(&spec);
        let gap = (r1 - r2).abs();
        let shrink = (2.0 / SEED_COEFFICIENT).sqrt();
        let wrong = ShockState {
            a1: foot() - (foot() - s.a1) * shrink,
            a2: foot() + (s.a2 - foot()) * shrink,
            ..s
        };
        let (w1, w2) = wrong.crossing_residuals(&spec);
        assert!(gap < 1e-7 && (w1 - w2).abs() > 10.0 * gap, "{gap:e} {:e}", (w1 - w2).abs());
    }

    #[test]
    fn trace_keeps_identities() {
        let spec = ProblemSpec::standard_burgers();
        let cat = find_catastrophe(&spec).unwrap();
        let tr = trace(&spec, cat.x_foot, 1.8, 1e-4).unwrap();
        assert!((tr.last().state.t - 1.8).abs() < 1e-14);
        assert!(tr.max_equal_area_residual() <= 1e-6, "{:e}", tr.max_equal_area_residual());
        let mut prev: Option<ShockState> = None;
        for r in &tr.records {
            let s = r.state;
            let (c1, c2) = s.crossing_residuals(&spec);
            assert!(c1.abs() <= 1e-6 && c2.abs() <= 1e-6, "t={} {c1:e} {c2:e}", s.t);
            let v = s.speed(&spec);
            assert!(v < s.u_left(&spec) && v > s.u_right(&spec));
            if let Some(p) = prev {
                assert!(s.a1 < p.a1 && s.a2 > p.a2);
            }
            prev = Some(s);
        }
    }

    #[test]
    fn seed_offset_does_not_matter() {
        let spec = ProblemSpec::standard_burgers();
        let cat = find_catastrophe(&spec).unwrap();
        let t = cat.t0 + 0.01;
        let a = trace_with_seed(&spec, cat.x_foot, t, 1e-5, 1e-6).unwrap();
        let b = trace_with_seed(&spec, cat.x_foot, t, 1e-5, 2.5e-7).unwrap();
        let (sa, sb) = (a.last().state, b.last().state);
        let diff = (sa.x - sb.x).abs().max((sa.a1 - sb.a1).abs()).max((sa.a2 - sb.a2).abs());
        assert!(diff <= 1e-6, "{diff:e}");
    }

    #[test]
    fn rejects_other_fluxes() {
        let mut e = parse_model_text(STANDARD_BURGERS).unwrap();
        e.insert("a".into(), "u + u^3".into());
        let spec = ProblemSpec::from_entries(&e).unwrap();
        assert!(matches!(
            seed(foot(), &spec, 1e-6),
            Err(ShockError::UnsupportedFlux(_))
        ));
    }
}
