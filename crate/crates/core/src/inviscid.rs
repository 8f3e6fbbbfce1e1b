//! The inviscid problem `v_t + a(v) v_x = 0`, `v(x, 0) = F(x)`.
//!
//! Solutions are built from characteristics `x = a(v) t + f(v)` with `f`
//! the inverse of the initial data on its declared monotone branch. This
//! module finds the gradient catastrophe `(x0, t0, v0)`, the genericity
//! constant `kappa`, the local cubic model near the catastrophe and the
//! cusp region where the characteristic solution becomes multivalued.

use thiserror::Error;

use crate::expr::{ExprError, Jet};
use crate::model::{ModelError, ProblemSpec};
use crate::numerics::{find_root, solve_cubic_real, Bracket, NumericsError};

/// Grid density of the catastrophe and characteristic scans.
pub const SCAN_INTERVALS: usize = 2000;
/// `|kappa|` below this is treated as a degenerate (non-generic) catastrophe.
pub const KAPPA_TOLERANCE: f64 = 1e-10;
const ROOT_TOL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum InviscidError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("no steepening region: a(F(x)) is non-decreasing on the branch")]
    NoSteepening,
    #[error("non-generic catastrophe: kappa = {kappa:e}")]
    NonGeneric { kappa: f64 },
    #[error("steepest point lies on the branch boundary x = {x}; widen the branch")]
    BoundaryMinimizer { x: f64 },
    #[error("a'(v0) vanishes at the catastrophe")]
    DegenerateFlux,
    #[error("a'(v0) * kappa = {0:e} is not positive")]
    WrongOrientation(f64),
    #[error("no characteristic from the branch reaches (x, t) = ({x}, {t})")]
    NoRoot { x: f64, t: f64 },
    #[error("{count} characteristics reach (x, t) = ({x}, {t})")]
    MultipleRoots { x: f64, t: f64, count: usize },
    #[error("(x, t) = ({x}, {t}) lies inside the cusp region")]
    InsideCusp { x: f64, t: f64 },
    #[error("local cubic has three real roots at (xbar, tbar) = ({xbar}, {tbar})")]
    ThreeRealRoots { xbar: f64, tbar: f64 },
}

pub type Result<T> = std::result::Result<T, InviscidError>;

/// The point of gradient catastrophe with the derivative data at it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatastrophePoint {
    pub x0: f64,
    pub t0: f64,
    pub v0: f64,
    /// Foot of the catastrophe characteristic, `f(v0)`.
    pub x_foot: f64,
    pub a0: f64,
    pub a0p: f64,
    pub a0pp: f64,
    pub a0ppp: f64,
    pub f0p: f64,
    pub f0pp: f64,
    pub f0ppp: f64,
    pub kappa: f64,
}

impl CatastrophePoint {
    /// Residuals of `x0 = a0 t0 + f0`, `a0' t0 + f0' = 0`, `a0'' t0 + f0'' = 0`.
    pub fn residuals(&self) -> [f64; 3] {
        [
            self.x0 - (self.a0 * self.t0 + self.x_foot),
            self.a0p * self.t0 + self.f0p,
            self.a0pp * self.t0 + self.f0pp,
        ]
    }

    /// Rescaled coordinates around the catastrophe for scale parameter `k`.
    pub fn local_coords(&self, x: f64, t: f64, k: f64) -> LocalCoords {
        LocalCoords {
            xbar: (x - self.x0 - self.a0 * (t - self.t0)) / k,
            tbar: (t - self.t0) / k.powf(2.0 / 3.0),
            k,
        }
    }

    /// Right-hand side of the cusp inequality: `(2/(3 sqrt 3)) (a0'^3/kappa)^(1/2)`.
    pub fn cusp_constant(&self) -> f64 {
        2.0 / (3.0 * 3f64.sqrt()) * (self.a0p.powi(3) / self.kappa).sqrt()
    }
}

/// `xbar = (x - x0 - a0 (t - t0)) / k`, `tbar = (t - t0) / k^(2/3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCoords {
    pub xbar: f64,
    pub tbar: f64,
    pub k: f64,
}

impl LocalCoords {
    /// Leading-order value `v0 + k^(1/3) vbar` from the local cubic.
    pub fn approximate_v(&self, cat: &CatastrophePoint) -> Result<f64> {
        Ok(cat.v0 + self.k.cbrt() * local_cubic(cat, self.xbar, self.tbar)?)
    }
}

fn composite_jet(spec: &ProblemSpec, x: f64, order: usize) -> Result<Jet> {
    let inner = spec.init.profile.eval_jet(x, order)?;
    Ok(spec.flux.a.compose_jet(&inner)?)
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| lo + (hi - lo) * i as f64 / n as f64)
}

/// Locates the gradient catastrophe: the steepest point of `a(F(x))` on
/// the branch, where `(a∘F)'' = 0`, followed by the catastrophe time,
/// position, value and `kappa`.
pub fn find_catastrophe(spec: &ProblemSpec) -> Result<CatastrophePoint> {
    let (lo, hi) = spec.init.branch;
    let xs: Vec<f64> = grid(lo, hi, SCAN_INTERVALS).collect();
    let slopes = xs
        .iter()
        .map(|&x| composite_jet(spec, x, 1).map(|j| j.derivative(1)))
        .collect::<Result<Vec<f64>>>()?;

    let min = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min < 0.0) {
        return Err(InviscidError::NoSteepening);
    }
    // Median of (near-)tied minimizers, so flat profiles land in the interior.
    let tied: Vec<usize> = (0..slopes.len())
        .filter(|&i| slopes[i] <= min + 1e-12 * (1.0 + min.abs()))
        .collect();
    let i = tied[tied.len() / 2];
    if i == 0 || i == xs.len() - 1 {
        return Err(InviscidError::BoundaryMinimizer { x: xs[i] });
    }

    let curvature = |x: f64| composite_jet(spec, x, 2).map(|j| j.derivative(2));
    let (cl, cr) = (curvature(xs[i - 1])?, curvature(xs[i + 1])?);
    let x_foot = if cl * cr <= 0.0 {
        find_root(
            |x| curvature(x).unwrap_or(f64::NAN),
            Bracket::new(xs[i - 1], xs[i + 1])?,
            ROOT_TOL,
        )?
    } else {
        xs[i]
    };

    let v0 = spec.init.eval(x_foot);
    let a = spec.flux.a.eval_jet(v0, 3)?;
    let f = spec.init.inverse_jet_at_foot(x_foot)?;
    let (a0, a0p, a0pp, a0ppp) = (a.value(), a.derivative(1), a.derivative(2), a.derivative(3));
    if a0p == 0.0 {
        return Err(InviscidError::DegenerateFlux);
    }
    let (f0p, f0pp, f0ppp) = (f.derivative(1), f.derivative(2), f.derivative(3));
    let t0 = -f0p / a0p;
    let kappa = -(a0ppp * t0 + f0ppp) / 6.0;
    if kappa.abs() < KAPPA_TOLERANCE {
        return Err(InviscidError::NonGeneric { kappa });
    }
    if a0p * kappa <= 0.0 {
        return Err(InviscidError::WrongOrientation(a0p * kappa));
    }
    Ok(CatastrophePoint {
        x0: x_foot + a0 * t0,
        t0,
        v0,
        x_foot,
        a0,
        a0p,
        a0pp,
        a0ppp,
        f0p,
        f0pp,
        f0ppp,
        kappa,
    })
}

/// Root of the local cubic `xbar = a0' vbar tbar - kappa vbar^3`, valid
/// where it is unique (`tbar < 0`, or outside the cusp for `tbar > 0`).
pub fn local_cubic(cat: &CatastrophePoint, xbar: f64, tbar: f64) -> Result<f64> {
    let roots = solve_cubic_real(cat.kappa, 0.0, -cat.a0p * tbar, xbar);
    match roots.as_slice() {
        [v] => Ok(*v),
        // A double root sits exactly on the cusp boundary; it has no
        // unique continuation either.
        _ => Err(InviscidError::ThreeRealRoots { xbar, tbar }),
    }
}

/// True when `(x, t)`, `t > t0`, lies in the cusp region
/// `|x - x0 - a0 (t - t0)| / (t - t0)^(3/2) < safety * C`.
pub fn in_cusp(cat: &CatastrophePoint, x: f64, t: f64, safety: f64) -> bool {
    let dt = t - cat.t0;
    if dt <= 0.0 {
        return false;
    }
    let offset = (x - cat.x0 - cat.a0 * dt).abs();
    offset / dt.powf(1.5) < safety * cat.cusp_constant()
}

/// Characteristic solver for a problem, with the catastrophe cached for
/// the cusp guard.
#[derive(Debug, Clone)]
pub struct Characteristics<'a> {
    spec: &'a ProblemSpec,
    catastrophe: Option<CatastrophePoint>,
}

impl<'a> Characteristics<'a> {
    pub fn new(spec: &'a ProblemSpec) -> Self {
        Characteristics {
            spec,
            catastrophe: find_catastrophe(spec).ok(),
        }
    }

    pub fn with_catastrophe(spec: &'a ProblemSpec, catastrophe: CatastrophePoint) -> Self {
        Characteristics {
            spec,
            catastrophe: Some(catastrophe),
        }
    }

    pub fn catastrophe(&self) -> Option<&CatastrophePoint> {
        self.catastrophe.as_ref()
    }

    fn residual(&self, foot: f64, x: f64, t: f64) -> f64 {
        foot + self.spec.flux.a.eval(self.spec.init.eval(foot)) * t - x
    }

    /// Interval searched for characteristic feet: the branch together with
    /// the computational domain. The catastrophe lives on the branch, but
    /// before it every point is reached from somewhere on the line.
    pub fn foot_range(&self) -> (f64, f64) {
        let (lo, hi) = self.spec.init.branch;
        (lo.min(self.spec.x_min), hi.max(self.spec.x_max))
    }

    /// Feet `xi` with `xi + a(F(xi)) t = x`, ascending.
    pub fn feet(&self, x: f64, t: f64) -> Result<Vec<f64>> {
        let (lo, hi) = self.foot_range();
        let xs: Vec<f64> = grid(lo, hi, SCAN_INTERVALS).collect();
        let g: Vec<f64> = xs.iter().map(|&xi| self.residual(xi, x, t)).collect();
        let mut feet = Vec::new();
        for i in 0..xs.len() - 1 {
            if g[i] == 0.0 {
                feet.push(xs[i]);
            } else if g[i] * g[i + 1] < 0.0 {
                let r = find_root(
                    |xi| self.residual(xi, x, t),
                    Bracket::new(xs[i], xs[i + 1])?,
                    ROOT_TOL,
                )?;
                feet.push(r);
            }
        }
        if g[xs.len() - 1] == 0.0 {
            feet.push(xs[xs.len() - 1]);
        }
        Ok(feet)
    }

    /// The inviscid solution `v(x, t)`, guarded against the cusp region.
    /// Past the catastrophe and outside the cusp, when several
    /// characteristics arrive the one continuous with the pre-catastrophe
    /// branch on the same side of `x0 + a0 (t - t0)` is taken.
    pub fn solve(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.spec.init.eval(self.solve_foot(x, t, true)?))
    }

    /// As [`Characteristics::solve`] but without the cusp guard; several
    /// arriving characteristics are an error.
    pub fn solve_unguarded(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.spec.init.eval(self.solve_foot(x, t, false)?))
    }

    /// Foot of the characteristic through `(x, t)`.
    pub fn solve_foot(&self, x: f64, t: f64, guard: bool) -> Result<f64> {
        if let (true, Some(cat)) = (guard, &self.catastrophe) {
            if t > cat.t0 && in_cusp(cat, x, t, 1.0) {
                return Err(InviscidError::InsideCusp { x, t });
            }
        }
        let feet = self.feet(x, t)?;
        match feet.as_slice() {
            [] => Err(InviscidError::NoRoot { x, t }),
            [only] => Ok(*only),
            many => match (guard, &self.catastrophe) {
                (true, Some(cat)) if t > cat.t0 => {
                    let xbar = x - cat.x0 - cat.a0 * (t - cat.t0);
                    Ok(if xbar > 0.0 { many[many.len() - 1] } else { many[0] })
                }
                _ => Err(InviscidError::MultipleRoots {
                    x,
                    t,
                    count: many.len(),
                }),
            },
        }
    }
}

/// One-off characteristic solve; see [`Characteristics::solve`].
pub fn solve_characteristic(spec: &ProblemSpec, x: f64, t: f64) -> Result<f64> {
    Characteristics::new(spec).solve(x, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_model_text, ProblemSpec, STANDARD_BURGERS};
    use approx::assert_relative_eq;

    fn with(extra: &[(&str, &str)]) -> ProblemSpec {
        let mut e = parse_model_text(STANDARD_BURGERS).unwrap();
        for (k, v) in extra {
            e.insert(k.to_string(), v.to_string());
        }
        ProblemSpec::from_entries(&e).unwrap()
    }

    #[test]
    fn catastrophe_of_standard_model() {
        let spec = ProblemSpec::standard_burgers();
        let cat = find_catastrophe(&spec).unwrap();
        let s3 = 3f64.sqrt();
        assert!((cat.x0 - s3).abs() < 1e-8);
        assert!((cat.t0 - 8.0 * s3 / 9.0).abs() < 1e-8);
        assert!((cat.v0 - 0.75).abs() < 1e-8);
        assert!((cat.kappa - 128.0 * s3 / 81.0).abs() < 1e-8);
        for r in cat.residuals() {
            assert!(r.abs() <= 1e-8, "{:?}", cat.residuals());
        }
        assert!(cat.a0p * cat.kappa > 0.0);
    }

    #[test]
    fn linear_profile_is_non_generic() {
        let spec = with(&[("F", "-x"), ("branch_lo", "-5"), ("branch_hi", "5")]);
        assert!(matches!(
            find_catastrophe(&spec),
            Err(InviscidError::NonGeneric { .. })
        ));
    }

    #[test]
    fn increasing_profile_has_no_steepening() {
        let spec = with(&[("F", "x"), ("branch_lo", "-5"), ("branch_hi", "5")]);
        assert!(matches!(find_catastrophe(&spec), Err(InviscidError::NoSteepening)));
    }

    #[test]
    fn steepest_point_on_boundary() {
        let spec = with(&[("branch_lo", "1"), ("branch_hi", "20")]);
        assert!(matches!(
            find_catastrophe(&spec),
            Err(InviscidError::BoundaryMinimizer { .. })
        ));
    }

    #[test]
    fn characteristic_examples() {
        let spec = ProblemSpec::standard_burgers();
        let ch = Characteristics::new(&spec);
        for x in [0.0, 0.3, 2.0, 7.5] {
            assert_relative_eq!(ch.solve(x, 0.0).unwrap(), spec.init.eval(x), epsilon = 1e-10);
        }
        let s3 = 3f64.sqrt();
        assert_relative_eq!(ch.solve(0.75 + 1.0 / s3, 1.0).unwrap(), 0.75, epsilon = 1e-10);
        let cat = *ch.catastrophe().unwrap();
        // v - v0 ~ (x - x0)^(1/3) here, so round-off in x0 is amplified.
        assert_relative_eq!(ch.solve(cat.x0, cat.t0).unwrap(), 0.75, epsilon = 5e-5);
        // Rising side of the bump, off the monotone branch.
        let v = ch.solve(0.5, 1.0).unwrap();
        let foot = ch.solve_foot(0.5, 1.0, true).unwrap();
        assert!(foot < 0.0 && (foot + v - 0.5).abs() < 1e-12);
        assert!(matches!(
            ch.solve(-40.0, 0.5),
            Err(InviscidError::NoRoot { .. })
        ));
    }

    #[test]
    fn no_fold_before_catastrophe() {
        let spec = ProblemSpec::standard_burgers();
        let cat = find_catastrophe(&spec).unwrap();
        let (lo, hi) = spec.init.branch;
        for t in [0.2 * cat.t0, 0.6 * cat.t0, 0.99 * cat.t0] {
            for xi in grid(lo, hi, 500) {
                let v = spec.init.eval(xi);
                let a = spec.flux.a.eval_jet(v, 1).unwrap();
                let dxdxi = 1.0 + a.derivative(1) * spec.init.profile.eval_jet(xi, 1).unwrap().derivative(1) * t;
                assert!(dxdxi > 0.0, "fold at xi = {xi}, t = {t}");
            }
        }
    }

    #[test]
    fn guarded_solve_beyond_catastrophe() {
        let spec = ProblemSpec::standard_burgers();
        let ch = Characteristics::new(&spec);
        let cat = *ch.catastrophe().unwrap();
        let t = 1.8;
        let centre = cat.x0 + cat.a0 * (t - cat.t0);
        assert!(matches!(ch.solve(centre, t), Err(InviscidError::InsideCusp { .. })));
        // Inside the fold but outside the (local) cusp estimate, the side
        // of the centre line picks the branch.
        let width = cat.cusp_constant() * (t - cat.t0).powf(1.5);
        let right = centre + 1.2 * width;
        let left = centre - 1.2 * width;
        let feet_r = ch.feet(right, t).unwrap();
        let feet_l = ch.feet(left, t).unwrap();
        let vr = ch.solve(right, t).unwrap();
        let vl = ch.solve(left, t).unwrap();
        assert!(vr < cat.v0 && vl > cat.v0, "vr = {vr}, vl = {vl}");
        if feet_r.len() > 1 {
            assert!(matches!(
                ch.solve_unguarded(right, t),
                Err(InviscidError::MultipleRoots { .. })
            ));
        }
        let _ = feet_l;
    }

    #[test]
    fn local_cubic_examples() {
        let spec = ProblemSpec::standard_burgers();
        let cat = find_catastrophe(&spec).unwrap();
        assert_eq!(local_cubic(&cat, 0.0, -1.0).unwrap(), 0.0);
        let unit = CatastrophePoint {
            a0p: 1.0,
            kappa: 1.0,
            ..cat
        };
        assert_relative_eq!(local_cubic(&unit, 2.0, -1.0).unwrap(), -1.0, epsilon = 1e-14);
        assert!(matches!(
            local_cubic(&unit, 0.0, 1.0),
            Err(InviscidError::ThreeRealRoots { .. })
        ));
    }

    #[test]
    fn local_cubic_matches_characteristics() {
        let spec = ProblemSpec::standard_burgers();
        let ch = Characteristics::new(&spec);
        let cat = *ch.catastrophe().unwrap();
        let k: f64 = 1e-3;
        let (xbar, tbar) = (0.1, -0.5);
        let t = cat.t0 + tbar * k.powf(2.0 / 3.0);
        let x = cat.x0 + cat.a0 * (t - cat.t0) + k * xbar;
        let v = ch.solve(x, t).unwrap();
        let local = cat.local_coords(x, t, k);
        assert_relative_eq!(local.xbar, xbar, epsilon = 1e-9);
        assert_relative_eq!(local.tbar, tbar, epsilon = 1e-9);
        let approx = local.approximate_v(&cat).unwrap();
        assert!((v - approx).abs() < 2.0 * k.powf(2.0 / 3.0), "{v} vs {approx}");
    }

    #[test]
    fn cusp_membership() {
        let spec = ProblemSpec::standard_burgers();
        let cat = find_catastrophe(&spec).unwrap();
        let t = cat.t0 + 0.05;
        assert!(in_cusp(&cat, cat.x0 + cat.a0 * 0.05, t, 1.0));
        let far = 10.0 * 0.05f64.powf(1.5) * cat.cusp_constant();
        assert!(!in_cusp(&cat, cat.x0 + cat.a0 * 0.05 + far, t, 1.0));
        assert!(!in_cusp(&cat, cat.x0 + cat.a0 * 0.05 - far, t, 1.0));
        assert!(!in_cusp(&cat, cat.x0, cat.t0 - 0.1, 1.0));
        // t = 1.54 is 4e-4 past t0; x = 1.78 is far outside that tiny cusp.
        assert!(!in_cusp(&cat, 1.78, 1.54, 1.0));
    }

    #[test]
    fn local_cubic_remainder_shrinks() {
        let spec = ProblemSpec::standard_burgers();
        let ch = Characteristics::new(&spec);
        let cat = *ch.catastrophe().unwrap();
        let worst = |k: f64| {
            let tbar = -1.0;
            (0..=20)
                .map(|i| {
                    let xbar = -1.0 + 0.1 * i as f64;
                    let t = cat.t0 + tbar * k.powf(2.0 / 3.0);
                    let x = cat.x0 + cat.a0 * (t - cat.t0) + k * xbar;
                    let v = ch.solve(x, t).unwrap();
                    ((v - cat.v0) / k.cbrt() - local_cubic(&cat, xbar, tbar).unwrap()).abs()
                })
                .fold(0.0, f64::max)
        };
        let errs: Vec<f64> = [1e-3, 5e-4, 2.5e-4, 1.25e-4].iter().map(|&k| worst(k)).collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!(ratio > 1.15 && ratio < 1.7, "{errs:?}");
        }
    }
}
