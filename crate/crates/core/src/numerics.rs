//! Numerical kernels shared by the solvers: bracketed root finding, real
//! cubic roots, adaptive Simpson quadrature, fixed-step RK4, the Thomas
//! tridiagonal solve and log-log slope fitting.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("root finder did not converge in {0} iterations")]
    MaxIterations(usize),
    #[error("adaptive quadrature on [{a}, {b}] hit the subdivision limit (error estimate {estimate:e})")]
    SubdivisionLimit { a: f64, b: f64, estimate: f64 },
    #[error("non-finite value encountered at t = {t}")]
    NonFinite { t: f64 },
    #[error("zero pivot in tridiagonal elimination at row {row}")]
    ZeroPivot { row: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// An interval expected to contain a sign change of the target function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(NumericsError::InvalidInput(format!(
                "bracket requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Bracket { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

const ROOT_MAX_ITER: usize = 200;

/// Brent's method: inverse quadratic interpolation and secant steps,
/// safeguarded by bisection. The returned root always lies in the bracket.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, bracket: Bracket, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(NumericsError::NoSignChange {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..ROOT_MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(NumericsError::MaxIterations(ROOT_MAX_ITER))
}

/// Real roots of `c3 z^3 + c2 z^2 + c1 z + c0`, ascending, repeated roots
/// listed with multiplicity. Uses the trigonometric form when there are
/// three real roots and a cancellation-free Cardano form otherwise, then
/// polishes each root with one Newton step.
pub fn solve_cubic_real(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    assert!(c3 != 0.0, "leading cubic coefficient must be non-zero");
    let (b, c, d) = (c2 / c3, c1 / c3, c0 / c3);
    // z = y - b/3 gives y^3 + p y + q = 0.
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);

    let mut roots: Vec<f64> = if p == 0.0 && q == 0.0 {
        vec![0.0; 3]
    } else if disc > 0.0 {
        let sq = disc.sqrt();
        let big = -(q.signum()) * (q.abs() / 2.0 + sq).cbrt();
        let other = if big != 0.0 { -p / (3.0 * big) } else { 0.0 };
        vec![big + other]
    } else {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q) / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| r * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect()
    };

    for y in roots.iter_mut() {
        *y -= shift;
        let z = *y;
        let value = ((c3 * z + c2) * z + c1) * z + c0;
        let slope = (3.0 * c3 * z + 2.0 * c2) * z + c1;
        if slope != 0.0 {
            let polished = z - value / slope;
            if polished.is_finite() {
                let new_value = ((c3 * polished + c2) * polished + c1) * polished + c0;
                if new_value.abs() <= value.abs() {
                    *y = polished;
                }
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

/// Default quadrature tolerance.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
const QUAD_MAX_DEPTH: u32 = 48;
const QUAD_INITIAL_PANELS: usize = 8;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

/// Adaptive Simpson quadrature with Richardson correction. The absolute
/// error target `tol` is shared between subintervals in proportion to
/// their length.
pub fn adaptive_quad<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(tol > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::InvalidInput(format!(
            "quadrature needs finite limits and tol > 0 (a={a}, b={b}, tol={tol})"
        )));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let width = (hi - lo) / QUAD_INITIAL_PANELS as f64;
    let mut stack = Vec::with_capacity(64);
    let mut f_prev = f(lo);
    for k in 0..QUAD_INITIAL_PANELS {
        let pa = lo + width * k as f64;
        let pb = if k + 1 == QUAD_INITIAL_PANELS {
            hi
        } else {
            lo + width * (k + 1) as f64
        };
        let fm = f(0.5 * (pa + pb));
        let fb = f(pb);
        stack.push(Panel {
            a: pa,
            b: pb,
            fa: f_prev,
            fm,
            fb,
            whole: (pb - pa) / 6.0 * (f_prev + 4.0 * fm + fb),
            tol: tol / QUAD_INITIAL_PANELS as f64,
            depth: 0,
        });
        f_prev = fb;
    }

    let mut total = 0.0;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = f(lm);
        let frm = f(rm);
        // Actual half widths: a rounded midpoint must not make a child's
        // stored estimate disagree with its own panel.
        let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        let delta = left + right - p.whole;
        if !delta.is_finite() {
            return Err(NumericsError::NonFinite { t: m });
        }
        // Accept at the round-off floor too; tiny panels cannot do better.
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if delta.abs() <= (15.0 * p.tol).max(floor) {
            total += left + right + delta / 15.0;
        } else if lm <= p.a || rm >= p.b {
            // Panel is a few ulps wide; its whole contribution is below
            // round-off of the abscissae.
            total += left + right;
        } else if p.depth >= QUAD_MAX_DEPTH {
            return Err(NumericsError::SubdivisionLimit {
                a: p.a,
                b: p.b,
                estimate: delta.abs() / 15.0,
            });
        } else {
            stack.push(Panel {
                a: p.a,
                b: m,
                fa: p.fa,
                fm: flm,
                fb: p.fm,
                whole: left,
                tol: 0.5 * p.tol,
                depth: p.depth + 1,
            });
            stack.push(Panel {
                a: m,
                b: p.b,
                fa: p.fm,
                fm: frm,
                fb: p.fb,
                whole: right,
                tol: 0.5 * p.tol,
                depth: p.depth + 1,
            });
        }
    }
    Ok(sign * total)
}

/// Integrates over consecutive breakpoints `points[0] < points[1] < ...`,
/// splitting `tol` by subinterval length.
pub fn adaptive_quad_pieces<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    tol: f64,
) -> Result<f64> {
    if points.len() < 2 {
        return Ok(0.0);
    }
    let span = points[points.len() - 1] - points[0];
    let mut sum = 0.0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            let share = if span > 0.0 { tol * (w[1] - w[0]) / span } else { tol };
            sum += adaptive_quad(&mut f, w[0], w[1], share)?;
        }
    }
    Ok(sum)
}

/// Classical fourth-order Runge-Kutta with a fixed step. Returns every
/// sample `(t, y)` including the initial one; the final step is shortened
/// so the trajectory lands exactly on `t1`.
pub fn ode_integrate<const N: usize, F>(
    mut rhs: F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Vec<(f64, [f64; N])>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    if !(dt > 0.0) || !(t1 > t0) {
        return Err(NumericsError::InvalidInput(format!(
            "ode_integrate needs dt > 0 and t1 > t0 (dt={dt}, t0={t0}, t1={t1})"
        )));
    }
    let axpy = |y: &[f64; N], k: &[f64; N], h: f64| -> [f64; N] {
        let mut out = *y;
        for i in 0..N {
            out[i] += h * k[i];
        }
        out
    };
    let steps = ((t1 - t0) / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let mut traj = Vec::with_capacity(steps + 1);
    let mut y = y0;
    let mut t = t0;
    traj.push((t, y));
    for n in 1..=steps {
        let t_next = if n == steps { t1 } else { t0 + n as f64 * dt };
        let h = t_next - t;
        let k1 = rhs(t, &y);
        let k2 = rhs(t + 0.5 * h, &axpy(&y, &k1, 0.5 * h));
        let k3 = rhs(t + 0.5 * h, &axpy(&y, &k2, 0.5 * h));
        let k4 = rhs(t + h, &axpy(&y, &k3, h));
        for i in 0..N {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t = t_next;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(NumericsError::NonFinite { t });
        }
        traj.push((t, y));
    }
    Ok(traj)
}

/// `A x = rhs` for tridiagonal `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    /// Sub-diagonal, length `n - 1`; `sub[i]` multiplies `x[i]` in row `i + 1`.
    pub sub: Vec<f64>,
    pub main: Vec<f64>,
    /// Super-diagonal, length `n - 1`; `sup[i]` multiplies `x[i + 1]` in row `i`.
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(sub: Vec<f64>, main: Vec<f64>, sup: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        let n = main.len();
        if n == 0 || sub.len() + 1 != n || sup.len() + 1 != n || rhs.len() != n {
            return Err(NumericsError::InvalidInput(format!(
                "tridiagonal lengths must be (n-1, n, n-1, n); got ({}, {}, {}, {})",
                sub.len(),
                n,
                sup.len(),
                rhs.len()
            )));
        }
        Ok(TridiagonalSystem { sub, main, sup, rhs })
    }

    pub fn len(&self) -> usize {
        self.main.len()
    }

    pub fn is_empty(&self) -> bool {
        self.main.is_empty()
    }
}

pub fn thomas_solve(sys: &TridiagonalSystem) -> Result<Vec<f64>> {
    let mut scratch = vec![0.0; sys.len()];
    let mut out = vec![0.0; sys.len()];
    thomas_solve_into(&sys.sub, &sys.main, &sys.sup, &sys.rhs, &mut scratch, &mut out)?;
    Ok(out)
}

/// Allocation-free Thomas elimination. `scratch` and `out` must have the
/// same length as `main`.
pub fn thomas_solve_into(
    sub: &[f64],
    main: &[f64],
    sup: &[f64],
    rhs: &[f64],
    scratch: &mut [f64],
    out: &mut [f64],
) -> Result<()> {
    let n = main.len();
    debug_assert!(sub.len() + 1 == n && sup.len() + 1 == n && rhs.len() == n);
    let mut pivot = main[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(NumericsError::ZeroPivot { row: 0 });
    }
    out[0] = rhs[0] / pivot;
    for i in 1..n {
        scratch[i] = sup[i - 1] / pivot;
        pivot = main[i] - sub[i - 1] * scratch[i];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(NumericsError::ZeroPivot { row: i });
        }
        out[i] = (rhs[i] - sub[i - 1] * out[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        out[i] -= scratch[i + 1] * out[i + 1];
    }
    Ok(())
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 2 {
        return Err(NumericsError::InvalidInput(format!(
            "slope fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(NumericsError::InvalidInput(format!(
            "slope fit needs positive coordinates, got ({x}, {y})"
        )));
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(NumericsError::InvalidInput(
            "slope fit needs at least two distinct x values".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (logs
        .iter()
        .map(|(lx, ly)| (ly - intercept - slope * lx).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        residual,
    })
}
