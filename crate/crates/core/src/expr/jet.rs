//! Truncated Taylor arithmetic.
//!
//! A [`Jet`] carries a value and its derivatives up to [`MAX_ORDER`] at a
//! single expansion point. Internally the coefficients are stored as
//! normalized Taylor coefficients `f^(k)(p) / k!`, which keeps the
//! product, quotient and elementary-function recurrences free of binomial
//! factors. [`Jet::derivative`] converts back.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Highest derivative order a jet can carry.
pub const MAX_ORDER: usize = 4;

const N: usize = MAX_ORDER + 1;
const FACTORIAL: [f64; N] = [1.0, 1.0, 2.0, 6.0, 24.0];

#[derive(Clone, Copy, PartialEq)]
pub struct Jet {
    order: usize,
    taylor: [f64; N],
}

impl Jet {
    /// A constant: all derivatives vanish.
    pub fn constant(value: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut taylor = [0.0; N];
        taylor[0] = value;
        Jet { order, taylor }
    }

    /// The identity function expanded at `point`.
    pub fn variable(point: f64, order: usize) -> Self {
        let mut jet = Jet::constant(point, order);
        if order >= 1 {
            jet.taylor[1] = 1.0;
        }
        jet
    }

    /// Builds a jet from derivative values `f, f', f'', ...`.
    pub fn from_derivatives(derivs: &[f64]) -> Self {
        assert!(
            !derivs.is_empty() && derivs.len() <= N,
            "a jet needs between 1 and {N} derivatives"
        );
        let mut taylor = [0.0; N];
        for (k, d) in derivs.iter().enumerate() {
            taylor[k] = d / FACTORIAL[k];
        }
        Jet {
            order: derivs.len() - 1,
            taylor,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.taylor[0]
    }

    /// The `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        assert!(k <= self.order, "derivative {k} beyond jet order {}", self.order);
        self.taylor[k] * FACTORIAL[k]
    }

    /// All derivatives `f, f', ..., f^(order)`.
    pub fn derivatives(&self) -> Vec<f64> {
        (0..=self.order).map(|k| self.derivative(k)).collect()
    }

    /// Normalized Taylor coefficient `f^(k)/k!`.
    pub fn taylor_coefficient(&self, k: usize) -> f64 {
        self.taylor[k]
    }

    /// Restricts the jet to a lower order.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let mut taylor = [0.0; N];
        taylor[..=order].copy_from_slice(&self.taylor[..=order]);
        Jet { order, taylor }
    }

    fn zeros(order: usize) -> Self {
        Jet {
            order,
            taylor: [0.0; N],
        }
    }

    fn common_order(&self, other: &Jet) -> usize {
        self.order.min(other.order)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for c in out.taylor.iter_mut() {
            *c *= s;
        }
        out
    }

    /// `1/self`; `None` when the value vanishes.
    pub fn recip(&self) -> Option<Self> {
        Jet::constant(1.0, self.order).checked_div(self)
    }

    /// Quotient; `None` when the divisor's value is zero.
    pub fn checked_div(&self, rhs: &Jet) -> Option<Self> {
        let b0 = rhs.taylor[0];
        if b0 == 0.0 {
            return None;
        }
        let order = self.common_order(rhs);
        let mut q = Jet::zeros(order);
        for k in 0..=order {
            let mut acc = self.taylor[k];
            for j in 1..=k {
                acc -= rhs.taylor[j] * q.taylor[k - j];
            }
            q.taylor[k] = acc / b0;
        }
        Some(q)
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, exponent: u32) -> Self {
        let mut result = Jet::constant(1.0, self.order);
        let mut base = *self;
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        result
    }

    pub fn exp(&self) -> Self {
        let a = &self.taylor;
        let mut e = Jet::zeros(self.order);
        e.taylor[0] = a[0].exp();
        for k in 1..=self.order {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * a[j] * e.taylor[k - j];
            }
            e.taylor[k] = acc / k as f64;
        }
        e
    }

    /// Natural logarithm; `None` unless the value is positive.
    pub fn ln(&self) -> Option<Self> {
        let a = &self.taylor;
        if !(a[0] > 0.0) {
            return None;
        }
        let mut l = Jet::zeros(self.order);
        l.taylor[0] = a[0].ln();
        for k in 1..=self.order {
            let mut acc = 0.0;
            for j in 1..k {
                acc += j as f64 * l.taylor[j] * a[k - j];
            }
            l.taylor[k] = (a[k] - acc / k as f64) / a[0];
        }
        Some(l)
    }

    /// Sine and cosine computed together (their recurrences are coupled).
    pub fn sin_cos(&self) -> (Self, Self) {
        let a = &self.taylor;
        let mut s = Jet::zeros(self.order);
        let mut c = Jet::zeros(self.order);
        s.taylor[0] = a[0].sin();
        c.taylor[0] = a[0].cos();
        for k in 1..=self.order {
            let mut sa = 0.0;
            let mut ca = 0.0;
            for j in 1..=k {
                let w = j as f64 * a[j];
                sa += w * c.taylor[k - j];
                ca += w * s.taylor[k - j];
            }
            s.taylor[k] = sa / k as f64;
            c.taylor[k] = -ca / k as f64;
        }
        (s, c)
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    /// Square root; `None` for negative values, or for zero when any
    /// derivative is requested.
    pub fn sqrt(&self) -> Option<Self> {
        let a = &self.taylor;
        if a[0] < 0.0 || (a[0] == 0.0 && self.order > 0) || a[0].is_nan() {
            return None;
        }
        let mut r = Jet::zeros(self.order);
        r.taylor[0] = a[0].sqrt();
        for k in 1..=self.order {
            let mut acc = a[k];
            for j in 1..k {
                acc -= r.taylor[j] * r.taylor[k - j];
            }
            r.taylor[k] = acc / (2.0 * r.taylor[0]);
        }
        Some(r)
    }

    pub fn atan(&self) -> Self {
        let a = &self.taylor;
        // atan' = 1/(1 + u^2), which never vanishes.
        let denom = Jet::constant(1.0, self.order) + *self * *self;
        let g = denom.recip().expect("1 + u^2 is positive");
        let mut t = Jet::zeros(self.order);
        t.taylor[0] = a[0].atan();
        for k in 1..=self.order {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * a[j] * g.taylor[k - j];
            }
            t.taylor[k] = acc / k as f64;
        }
        t
    }

    /// Composition `outer ∘ self`, where `outer` is the jet of the outer
    /// function expanded at `self.value()` (Faà di Bruno through Taylor
    /// series substitution).
    pub fn compose(outer: &Jet, inner: &Jet) -> Jet {
        let order = outer.order.min(inner.order);
        let mut delta = inner.truncate(order);
        delta.taylor[0] = 0.0;
        // Horner on the truncated series: sum_k outer_k * delta^k.
        let mut acc = Jet::constant(outer.taylor[order], order);
        for k in (0..order).rev() {
            acc = acc * delta + Jet::constant(outer.taylor[k], order);
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.taylor[..=self.order].iter().all(|c| c.is_finite())
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Jet").field(&self.derivatives()).finish()
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut out = Jet::zeros(self.common_order(&rhs));
        for k in 0..=out.order {
            out.taylor[k] = self.taylor[k] + rhs.taylor[k];
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let mut out = Jet::zeros(self.common_order(&rhs));
        for k in 0..=out.order {
            out.taylor[k] = self.taylor[k] - rhs.taylor[k];
        }
        out
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = Jet::zeros(self.common_order(&rhs));
        for k in 0..=out.order {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += self.taylor[j] * rhs.taylor[k - j];
            }
            out.taylor[k] = acc;
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    /// Panics on a zero divisor; use [`Jet::checked_div`] otherwise.
    fn div(self, rhs: Jet) -> Jet {
        self.checked_div(&rhs).expect("jet division by zero")
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sine_series_at_zero() {
        let s = Jet::variable(0.0, 4).sin();
        assert_eq!(s.derivatives(), vec![0.0, 1.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn exp_log_roundtrip() {
        let x = Jet::variable(0.7, 4);
        let back = x.exp().ln().unwrap();
        for k in 0..=4 {
            assert_relative_eq!(back.derivative(k), x.derivative(k), epsilon = 1e-13);
        }
    }

    #[test]
    fn sqrt_squared_is_identity() {
        let x = Jet::variable(2.5, 4);
        let r = x.sqrt().unwrap();
        let sq = r * r;
        for k in 0..=4 {
            assert_relative_eq!(sq.derivative(k), x.derivative(k), epsilon = 1e-13);
        }
        assert!(Jet::variable(0.0, 1).sqrt().is_none());
        assert!(Jet::variable(-1.0, 0).sqrt().is_none());
        assert_eq!(Jet::constant(0.0, 0).sqrt().unwrap().value(), 0.0);
    }

    #[test]
    fn atan_derivatives() {
        // d/dx atan x = 1/(1+x^2), d2 = -2x/(1+x^2)^2
        let x = 0.3_f64;
        let j = Jet::variable(x, 2).atan();
        let d = 1.0 + x * x;
        assert_relative_eq!(j.derivative(1), 1.0 / d, epsilon = 1e-15);
        assert_relative_eq!(j.derivative(2), -2.0 * x / (d * d), epsilon = 1e-15);
    }

    #[test]
    fn compose_matches_direct() {
        let inner = Jet::variable(0.4, 4).sin();
        let outer = Jet::variable(inner.value(), 4).exp();
        let direct = inner.exp();
        let composed = Jet::compose(&outer, &inner);
        for k in 0..=4 {
            assert_relative_eq!(composed.derivative(k), direct.derivative(k), epsilon = 1e-13);
        }
    }

    #[test]
    fn powi_matches_products() {
        let x = Jet::variable(1.3, 4);
        let p = x.powi(3);
        let q = x * x * x;
        assert_eq!(p.derivatives(), q.derivatives());
        assert_eq!(x.powi(0).derivatives(), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn division_by_zero_value() {
        let x = Jet::variable(0.0, 2);
        assert!(Jet::constant(1.0, 2).checked_div(&x).is_none());
    }
}
