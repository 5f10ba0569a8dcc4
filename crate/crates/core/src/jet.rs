//! Truncated Taylor values ("jets") along a single curve parameter.
//!
//! A [`Jet`] holds a value together with its derivatives up to order
//! [`MAX_ORDER`] along one direction, stored as raw derivatives (d^k/ds^k,
//! *not* divided by k!). All arithmetic propagates derivatives exactly, so
//! any quantity assembled from jets is differentiated to machine precision.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Highest derivative order carried by a jet.
pub const MAX_ORDER: usize = 3;

/// Scalar value plus raw derivatives along one curve parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    coeffs: [f64; MAX_ORDER + 1],
    order: usize,
}

impl Jet {
    /// A constant: all derivatives vanish.
    pub fn constant(value: f64, order: usize) -> Jet {
        assert!(order <= MAX_ORDER);
        let mut coeffs = [0.0; MAX_ORDER + 1];
        coeffs[0] = value;
        Jet { coeffs, order }
    }

    /// A linear seed `value + slope*s`, the starting point of every ray evaluation.
    pub fn seeded(value: f64, slope: f64, order: usize) -> Jet {
        assert!(order <= MAX_ORDER);
        let mut coeffs = [0.0; MAX_ORDER + 1];
        coeffs[0] = value;
        if order >= 1 {
            coeffs[1] = slope;
        }
        Jet { coeffs, order }
    }

    /// Build a jet from raw derivatives `[f, f', f'', ...]`; order = len - 1.
    pub fn from_derivs(derivs: &[f64]) -> Jet {
        assert!(!derivs.is_empty() && derivs.len() <= MAX_ORDER + 1);
        let mut coeffs = [0.0; MAX_ORDER + 1];
        coeffs[..derivs.len()].copy_from_slice(derivs);
        Jet { coeffs, order: derivs.len() - 1 }
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Raw k-th derivative (not divided by k!). Zero beyond the jet's order.
    pub fn deriv(&self, k: usize) -> f64 {
        if k <= self.order {
            self.coeffs[k]
        } else {
            0.0
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs[..=self.order].iter().all(|c| c.is_finite())
    }

    fn joint_order(&self, other: &Jet) -> usize {
        self.order.min(other.order)
    }

    /// Chain rule (Faà di Bruno) for `phi(self)` given the raw derivatives of
    /// `phi` at `self.value()`: `d = [phi, phi', phi'', phi''']`.
    pub fn compose(&self, d: [f64; MAX_ORDER + 1]) -> Jet {
        let u = &self.coeffs;
        let mut out = [0.0; MAX_ORDER + 1];
        out[0] = d[0];
        if self.order >= 1 {
            out[1] = d[1] * u[1];
        }
        if self.order >= 2 {
            out[2] = d[2] * u[1] * u[1] + d[1] * u[2];
        }
        if self.order >= 3 {
            out[3] = d[3] * u[1] * u[1] * u[1] + 3.0 * d[2] * u[1] * u[2] + d[1] * u[3];
        }
        Jet { coeffs: out, order: self.order }
    }

    /// Reciprocal. The caller is responsible for `value() != 0`.
    pub fn recip(&self) -> Jet {
        let v = self.coeffs[0];
        let v2 = v * v;
        self.compose([1.0 / v, -1.0 / v2, 2.0 / (v2 * v), -6.0 / (v2 * v2)])
    }

    pub fn exp(&self) -> Jet {
        let e = self.coeffs[0].exp();
        self.compose([e, e, e, e])
    }

    /// Natural logarithm; requires `value() > 0`.
    pub fn ln(&self) -> Jet {
        let v = self.coeffs[0];
        self.compose([v.ln(), 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)])
    }

    /// Square root; requires `value() > 0`.
    pub fn sqrt(&self) -> Jet {
        let r = self.coeffs[0].sqrt();
        let v = self.coeffs[0];
        self.compose([r, 0.5 / r, -0.25 / (r * v), 0.375 / (r * v * v)])
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.coeffs[0].sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.coeffs[0].sin_cos();
        self.compose([c, -s, -c, s])
    }

    /// Tangent; requires `cos(value()) != 0`.
    pub fn tan(&self) -> Jet {
        let t = self.coeffs[0].tan();
        let sec2 = 1.0 + t * t;
        self.compose([t, sec2, 2.0 * t * sec2, sec2 * (2.0 + 6.0 * t * t)])
    }

    pub fn sinh(&self) -> Jet {
        let s = self.coeffs[0].sinh();
        let c = self.coeffs[0].cosh();
        self.compose([s, c, s, c])
    }

    pub fn cosh(&self) -> Jet {
        let s = self.coeffs[0].sinh();
        let c = self.coeffs[0].cosh();
        self.compose([c, s, c, s])
    }

    /// Integer power by repeated multiplication, exact at zero base.
    pub fn powi(&self, n: i32) -> Jet {
        if n == 0 {
            return Jet::constant(1.0, self.order);
        }
        let m = n.unsigned_abs();
        let mut acc = *self;
        for _ in 1..m {
            acc = acc * *self;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    /// General power via exp/log; requires `value() > 0`.
    pub fn powf(&self, rhs: &Jet) -> Jet {
        (*rhs * self.ln()).exp()
    }

    pub fn scale(&self, k: f64) -> Jet {
        let mut out = *self;
        for c in out.coeffs.iter_mut() {
            *c *= k;
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let order = self.joint_order(&rhs);
        let mut coeffs = [0.0; MAX_ORDER + 1];
        for k in 0..=order {
            coeffs[k] = self.coeffs[k] + rhs.coeffs[k];
        }
        Jet { coeffs, order }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let order = self.joint_order(&rhs);
        let mut coeffs = [0.0; MAX_ORDER + 1];
        for k in 0..=order {
            coeffs[k] = self.coeffs[k] - rhs.coeffs[k];
        }
        Jet { coeffs, order }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let order = self.joint_order(&rhs);
        let f = &self.coeffs;
        let g = &rhs.coeffs;
        let mut coeffs = [0.0; MAX_ORDER + 1];
        coeffs[0] = f[0] * g[0];
        if order >= 1 {
            coeffs[1] = f[1] * g[0] + f[0] * g[1];
        }
        if order >= 2 {
            coeffs[2] = f[2] * g[0] + 2.0 * f[1] * g[1] + f[0] * g[2];
        }
        if order >= 3 {
            coeffs[3] = f[3] * g[0] + 3.0 * f[2] * g[1] + 3.0 * f[1] * g[2] + f[0] * g[3];
        }
        Jet { coeffs, order }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
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

    fn fd3(f: impl Fn(f64) -> f64, x: f64) -> [f64; 4] {
        let h1 = 1e-5;
        let h2 = 1e-4;
        let h3 = 1e-3;
        [
            f(x),
            (f(x + h1) - f(x - h1)) / (2.0 * h1),
            (f(x + h2) - 2.0 * f(x) + f(x - h2)) / (h2 * h2),
            (f(x + 2.0 * h3) - 2.0 * f(x + h3) + 2.0 * f(x - h3) - f(x - 2.0 * h3)) / (2.0 * h3 * h3 * h3),
        ]
    }

    fn check_against_fd(jet: Jet, f: impl Fn(f64) -> f64, x: f64, tol: [f64; 4]) {
        let fd = fd3(&f, x);
        for k in 0..4 {
            assert_relative_eq!(jet.deriv(k), fd[k], max_relative = tol[k], epsilon = tol[k]);
        }
    }

    #[test]
    fn product_rule() {
        let x = Jet::seeded(2.0, 1.0, 3);
        let y = x * x * x;
        assert_eq!(y.value(), 8.0);
        assert_eq!(y.deriv(1), 12.0);
        assert_eq!(y.deriv(2), 12.0);
        assert_eq!(y.deriv(3), 6.0);
    }

    #[test]
    fn exp_series_at_zero() {
        let x = Jet::seeded(0.0, 1.0, 2);
        let y = x.exp();
        assert_eq!(y.value(), 1.0);
        assert_eq!(y.deriv(1), 1.0);
        assert_eq!(y.deriv(2), 1.0);
    }

    #[test]
    fn transcendentals_match_finite_differences() {
        let tol = [1e-12, 1e-8, 1e-5, 1e-3];
        for &x in &[0.3, 0.9, 1.7] {
            let j = Jet::seeded(x, 1.0, 3);
            check_against_fd(j.sin(), |t| t.sin(), x, tol);
            check_against_fd(j.cos(), |t| t.cos(), x, tol);
            check_against_fd(j.tan(), |t| t.tan(), x, tol);
            check_against_fd(j.exp(), |t| t.exp(), x, tol);
            check_against_fd(j.ln(), |t| t.ln(), x, tol);
            check_against_fd(j.sqrt(), |t| t.sqrt(), x, tol);
            check_against_fd(j.sinh(), |t| t.sinh(), x, tol);
            check_against_fd(j.cosh(), |t| t.cosh(), x, tol);
            check_against_fd(j.recip(), |t| 1.0 / t, x, tol);
        }
    }

    #[test]
    fn composite_expression_derivatives() {
        // f(s) = sin(s^2) / (1 + cosh(s))
        let f = |s: f64| (s * s).sin() / (1.0 + s.cosh());
        let x = 0.7;
        let j = Jet::seeded(x, 1.0, 3);
        let y = (j * j).sin() / (Jet::constant(1.0, 3) + j.cosh());
        check_against_fd(y, f, x, [1e-12, 1e-7, 1e-4, 1e-2]);
    }

    #[test]
    fn integer_power_at_zero_base() {
        let x = Jet::seeded(0.0, 1.0, 3);
        let y = x.powi(3);
        assert_eq!(y.value(), 0.0);
        assert_eq!(y.deriv(1), 0.0);
        assert_eq!(y.deriv(2), 0.0);
        assert_eq!(y.deriv(3), 6.0);
    }

    #[test]
    fn negative_power() {
        let x = Jet::seeded(2.0, 1.0, 2);
        let y = x.powi(-2);
        assert_relative_eq!(y.value(), 0.25);
        assert_relative_eq!(y.deriv(1), -2.0 / 8.0);
    }
}
