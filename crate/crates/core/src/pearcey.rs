//! The Pearcey integral `W(X, T) = ∫ exp(-S(z)) dz` with phase
//! `S(z) = (z^4 - 2 z^2 T + 4 z X) / 8`, and the profile
//! `U = -2 ∂_X log W`, which equals the weighted mean `<z>`.
//!
//! Every integral is taken of `exp(-(S - S*))` with `S*` the global
//! minimum of the phase, over the window where `S - S* < 40`, so large
//! rescaled arguments neither overflow nor underflow.

use crate::numerics::{adaptive_quad_pieces, find_root, solve_cubic_real, Bracket, NumericsError};

/// Weight cut-off: outside the window the integrand is below `e^-40`.
pub const TRUNCATION: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileQuery {
    pub x: f64,
    pub t: f64,
}

impl ProfileQuery {
    pub fn new(x: f64, t: f64) -> Self {
        ProfileQuery { x, t }
    }

    pub fn phase(&self, z: f64) -> f64 {
        let z2 = z * z;
        (z2 * z2 - 2.0 * z2 * self.t + 4.0 * z * self.x) / 8.0
    }

    /// Real critical points of the phase, ascending.
    pub fn critical_points(&self) -> Vec<f64> {
        solve_cubic_real(1.0, 0.0, -self.t, self.x)
    }

    /// Global minimizer of the phase; the exact tie at `X = 0` resolves to 0.
    pub fn minimizer(&self) -> f64 {
        if self.x == 0.0 {
            return 0.0;
        }
        self.critical_points()
            .into_iter()
            .min_by(|a, b| self.phase(*a).total_cmp(&self.phase(*b)))
            .expect("a real cubic has a real root")
    }
}

/// Integration window and the split points inside it.
struct Window {
    s_min: f64,
    z_min: f64,
    /// Taylor coefficients of `S` about `z_min`, orders 1 to 3 (order 4 is 1/8).
    taylor: [f64; 3],
    points: Vec<f64>,
}

impl Window {
    /// `S(z) - S*`, expanded about the minimizer so that no large
    /// cancelling terms appear.
    fn excess(&self, z: f64) -> f64 {
        let w = z - self.z_min;
        let [c1, c2, c3] = self.taylor;
        w * (c1 + w * (c2 + w * (c3 + w / 8.0)))
    }

    fn weight(&self, z: f64) -> f64 {
        (-self.excess(z)).exp()
    }
}

fn window(q: &ProfileQuery) -> Result<Window, NumericsError> {
    if !(q.x.is_finite() && q.t.is_finite()) {
        return Err(NumericsError::InvalidInput("X and T must be finite".into()));
    }
    let crit = q.critical_points();
    let z_min = crit
        .iter()
        .copied()
        .min_by(|a, b| q.phase(*a).total_cmp(&q.phase(*b)))
        .expect("a real cubic has a real root");
    let mut win = Window {
        s_min: q.phase(z_min),
        z_min,
        taylor: [
            (z_min.powi(3) - q.t * z_min + q.x) / 2.0,
            (3.0 * z_min * z_min - q.t) / 4.0,
            z_min / 2.0,
        ],
        points: Vec::new(),
    };
    let excess = |z: f64| win.excess(z) - TRUNCATION;

    // March outwards from the extreme critical points until the phase has
    // climbed TRUNCATION above its minimum. The phase is monotone there.
    let edge = |start: f64, dir: f64| -> Result<f64, NumericsError> {
        if excess(start) >= 0.0 {
            // A shallow well: everything beyond it is already negligible.
            return Ok(start);
        }
        let mut near = start;
        let mut step = 1.0;
        let mut far = start + dir * step;
        while excess(far) < 0.0 {
            near = far;
            step *= 2.0;
            far = start + dir * step;
        }
        let (lo, hi) = if dir < 0.0 { (far, near) } else { (near, far) };
        find_root(excess, Bracket::new(lo, hi)?, 1e-12 * (1.0 + start.abs()))
    };
    let first = crit[0];
    let last = crit[crit.len() - 1];
    let mut points = vec![edge(first, -1.0)?];
    points.extend(crit.iter().copied());
    points.push(edge(last, 1.0)?);
    points.dedup_by(|b, a| (*b - *a).abs() <= 1e-12 * (1.0 + a.abs()));
    win.points = points;
    Ok(win)
}

/// `log W(X, T)`, computed as `log ∫ exp(-(S - S*)) dz - S*`.
pub fn log_pearcey_w(q: ProfileQuery, tol: f64) -> Result<f64, NumericsError> {
    let w = window(&q)?;
    let integral = adaptive_quad_pieces(|z| w.weight(z), &w.points, tol)?;
    Ok(integral.ln() - w.s_min)
}

/// `U(X, T) = <z>` under the weight `exp(-S)`.
pub fn profile_u(q: ProfileQuery, tol: f64) -> Result<f64, NumericsError> {
    if q.x == 0.0 && q.t.is_finite() {
        // U is odd in X.
        return Ok(0.0);
    }
    let w = window(&q)?;
    let mass = adaptive_quad_pieces(|z| w.weight(z), &w.points, tol)?;
    // Centre on the minimizer; the shifted moment is small and well scaled.
    let moment = adaptive_quad_pieces(|z| (z - w.z_min) * w.weight(z), &w.points, tol)?;
    Ok(w.z_min + moment / mass)
}

/// Leading-order Laplace value of `U`: the minimizer of the phase.
pub fn saddle_u(q: ProfileQuery) -> f64 {
    q.minimizer()
}
