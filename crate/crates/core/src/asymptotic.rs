//! Asymptotics of the viscous solution at small `eps`.
//!
//! Near the catastrophe the solution is approximated by the Pearcey
//! profile in stretched variables (`ilin_u`); before it, by the inviscid
//! solution plus the first quasitriviality correction
//! (`quasitriviality_correct`).

use thiserror::Error;

use crate::expr::ExprError;
use crate::inviscid::{CatastrophePoint, Characteristics, InviscidError};
use crate::model::{FluxModel, ModelError, ProblemSpec};
use crate::numerics::NumericsError;
use crate::pearcey::{profile_u, ProfileQuery};

/// Tolerance on the identities tying the scaling constants together.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;
/// `|a' t + f'|` below this means the point is effectively at the fold.
pub const FOLD_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum AsymptoticError {
    #[error("viscosity b(v0) = {0} must be positive")]
    NonPositiveViscosity(f64),
    #[error("a0' * kappa = {0:e} must be positive")]
    WrongOrientation(f64),
    #[error("scaling identity '{name}' off by {error:e}")]
    Identity { name: &'static str, error: f64 },
    #[error("t = {t} is not before the catastrophe time {t0}")]
    AfterCatastrophe { t: f64, t0: f64 },
    #[error("|a' t + f'| = {0:e} is too small at this point; use the profile formula near the catastrophe")]
    NearFold(f64),
    #[error("v_x vanishes at ({x}, {t}); the correction is singular there")]
    FlatGradient { x: f64, t: f64 },
    #[error("problem has no gradient catastrophe")]
    NoCatastrophe,
    #[error(transparent)]
    Inviscid(#[from] InviscidError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, AsymptoticError>;

/// Stretching constants of the profile variables.
///
/// `alpha` and `beta` are positive. `gamma` carries the sign of `a0'`, so
/// that `a0' beta gamma / alpha = 1` and `alpha / gamma^3 = kappa` both
/// hold when `a0'` and `kappa` are negative; it is positive otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingConstants {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub b0: f64,
}

impl ScalingConstants {
    pub fn from_parts(a0p: f64, b0: f64, kappa: f64) -> Result<Self> {
        if !(b0 > 0.0) {
            return Err(AsymptoticError::NonPositiveViscosity(b0));
        }
        if !(a0p * kappa > 0.0) {
            return Err(AsymptoticError::WrongOrientation(a0p * kappa));
        }
        let sc = ScalingConstants {
            alpha: (kappa * b0.powi(3) / a0p.powi(3)).powf(0.25),
            beta: (kappa * b0 / a0p.powi(3)).sqrt(),
            gamma: a0p.signum() * (b0 / (kappa * a0p)).powf(0.25),
            b0,
        };
        for (name, error) in sc.identity_errors(a0p, kappa) {
            if !(error <= IDENTITY_TOLERANCE) {
                return Err(AsymptoticError::Identity { name, error });
            }
        }
        Ok(sc)
    }

    /// Relative errors of the three identities.
    pub fn identity_errors(&self, a0p: f64, kappa: f64) -> [(&'static str, f64); 3] {
        [
            ("a0' beta gamma / alpha = 1", (a0p * self.beta * self.gamma / self.alpha - 1.0).abs()),
            ("b0 beta / alpha^2 = 1", (self.b0 * self.beta / (self.alpha * self.alpha) - 1.0).abs()),
            ("alpha / gamma^3 = kappa", (self.alpha / self.gamma.powi(3) / kappa - 1.0).abs()),
        ]
    }

    /// Profile coordinates `(X, T)` of the physical point `(x, t)`.
    pub fn profile_query(&self, cat: &CatastrophePoint, x: f64, t: f64, eps: f64) -> ProfileQuery {
        ProfileQuery::new(
            (x - cat.x0 - cat.a0 * (t - cat.t0)) / (self.alpha * eps.powf(0.75)),
            (t - cat.t0) / (self.beta * eps.sqrt()),
        )
    }
}

pub fn scaling_constants(cat: &CatastrophePoint, flux: &FluxModel) -> Result<ScalingConstants> {
    let b0 = flux.b.try_eval(cat.v0)?;
    ScalingConstants::from_parts(cat.a0p, b0, cat.kappa)
}

/// `v0 + gamma eps^(1/4) U(X, T)` with the stretched profile variables.
pub fn ilin_u(
    cat: &CatastrophePoint,
    sc: &ScalingConstants,
    x: f64,
    t: f64,
    eps: f64,
    tol: f64,
) -> Result<f64> {
    let q = sc.profile_query(cat, x, t, eps);
    Ok(cat.v0 + sc.gamma * eps.powf(0.25) * profile_u(q, tol)?)
}

/// Inviscid value `v`, its x-derivatives and the correction terms at a
/// pre-catastrophe point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiTerms {
    pub v: f64,
    pub v_x: f64,
    pub v_xx: f64,
    /// Coefficient of `eps` in `u = v - eps * correction`.
    pub correction: f64,
}

impl QuasiTerms {
    pub fn corrected(&self, eps: f64) -> f64 {
        self.v - eps * self.correction
    }
}

/// First-order quasitriviality terms at `(x, t)` with `t` before the
/// catastrophe. Derivatives of `v` come from implicit differentiation of
/// the characteristic relation.
pub fn quasi_terms(ch: &Characteristics, spec: &ProblemSpec, x: f64, t: f64) -> Result<QuasiTerms> {
    let cat = ch.catastrophe().ok_or(AsymptoticError::NoCatastrophe)?;
    if t >= cat.t0 {
        return Err(AsymptoticError::AfterCatastrophe { t, t0: cat.t0 });
    }
    let foot = ch.solve_foot(x, t, true)?;
    let v = spec.init.eval(foot);
    let slope = spec.init.profile.eval_jet(foot, 1)?.derivative(1);
    if slope.abs() < 1e-12 {
        return Err(AsymptoticError::FlatGradient { x, t });
    }
    let a = spec.flux.a.eval_jet(v, 2)?;
    let f = spec.init.inverse_jet_at_foot(foot)?;
    let (a1, a2) = (a.derivative(1), a.derivative(2));
    let denom = a1 * t + f.derivative(1);
    if !(denom.abs() >= FOLD_TOLERANCE) {
        return Err(AsymptoticError::NearFold(denom.abs()));
    }
    let v_x = 1.0 / denom;
    let v_xx = -(a2 * t + f.derivative(2)) * v_x.powi(3);
    let b = spec.flux.b.try_eval(v)?;
    let c = spec.flux.c.try_eval(v)?;
    let correction = b / a1 * v_xx / v_x + (c * a1 - b * a2) / (a1 * a1) * v_x * v_x.abs().ln();
    Ok(QuasiTerms {
        v,
        v_x,
        v_xx,
        correction,
    })
}

/// `u = v - eps [ (b/a') v_xx / v_x + ((c a' - b a'') / a'^2) v_x log|v_x| ]`.
pub fn quasitriviality_correct(spec: &ProblemSpec, x: f64, t: f64, eps: f64) -> Result<f64> {
    let ch = Characteristics::new(spec);
    Ok(quasi_terms(&ch, spec, x, t)?.corrected(eps))
}
