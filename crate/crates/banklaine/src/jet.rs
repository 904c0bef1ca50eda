//! Degree-3 jet arithmetic.
//!
//! A [`Jet3`] carries a function value together with its first three
//! derivatives at a point. Propagating jets through products, quotients,
//! `exp`, `sin` and `cos` gives exact derivatives (up to rounding) for
//! every closed-form family in this crate, which is what the Schwarzian
//! and coefficient formulas consume. No finite differences are involved;
//! those appear only in tests as an independent cross-check.

use crate::num::{Cx, Real};
use num_complex::Complex;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value and first three derivatives of a holomorphic function at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet3<R: Real> {
    pub f: Cx<R>,
    pub d1: Cx<R>,
    pub d2: Cx<R>,
    pub d3: Cx<R>,
}

impl<R: Real> Jet3<R> {
    pub fn new(f: Cx<R>, d1: Cx<R>, d2: Cx<R>, d3: Cx<R>) -> Self {
        Jet3 { f, d1, d2, d3 }
    }

    /// Jet of the identity map at `z`.
    pub fn variable(z: Cx<R>) -> Self {
        Jet3::new(z, Complex::new(R::one(), R::zero()), Complex::new(R::zero(), R::zero()), Complex::new(R::zero(), R::zero()))
    }

    pub fn constant(c: Cx<R>) -> Self {
        let zero = Complex::new(R::zero(), R::zero());
        Jet3::new(c, zero, zero, zero)
    }

    pub fn exp(self) -> Self {
        let h = self.f.exp();
        let d1 = self.d1 * h;
        let d2 = self.d2 * h + self.d1 * d1;
        let d3 = self.d3 * h + self.d2 * d1 * R::of(2.0) + self.d1 * d2;
        Jet3::new(h, d1, d2, d3)
    }

    pub fn sin(self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }

    /// sin and cos share every intermediate, so compute them together.
    pub fn sin_cos(self) -> (Self, Self) {
        let (s, c) = (self.f.sin(), self.f.cos());
        let (g1, g2, g3) = (self.d1, self.d2, self.d3);
        let s1 = g1 * c;
        let c1 = -g1 * s;
        let s2 = g2 * c - g1 * g1 * s;
        let c2 = -g2 * s - g1 * g1 * c;
        let s3 = g3 * c - g1 * g2 * s * R::of(3.0) - g1 * g1 * g1 * c;
        let c3 = -g3 * s - g1 * g2 * c * R::of(3.0) + g1 * g1 * g1 * s;
        (Jet3::new(s, s1, s2, s3), Jet3::new(c, c1, c2, c3))
    }

    /// Evaluate a polynomial with real coefficients, `coeffs[k]` for `z^k`.
    pub fn poly(z: Cx<R>, coeffs: &[R]) -> Self {
        let mut acc = Jet3::constant(Complex::new(R::zero(), R::zero()));
        let var = Jet3::variable(z);
        for &c in coeffs.iter().rev() {
            acc = acc * var + Jet3::constant(Complex::new(c, R::zero()));
        }
        acc
    }
}

impl<R: Real> Add for Jet3<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Jet3::new(self.f + o.f, self.d1 + o.d1, self.d2 + o.d2, self.d3 + o.d3)
    }
}

impl<R: Real> Sub for Jet3<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Jet3::new(self.f - o.f, self.d1 - o.d1, self.d2 - o.d2, self.d3 - o.d3)
    }
}

impl<R: Real> Neg for Jet3<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet3::new(-self.f, -self.d1, -self.d2, -self.d3)
    }
}

impl<R: Real> Mul for Jet3<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let three = R::of(3.0);
        let two = R::of(2.0);
        Jet3::new(
            self.f * o.f,
            self.d1 * o.f + self.f * o.d1,
            self.d2 * o.f + self.d1 * o.d1 * two + self.f * o.d2,
            self.d3 * o.f + self.d2 * o.d1 * three + self.d1 * o.d2 * three + self.f * o.d3,
        )
    }
}

impl<R: Real> Mul<R> for Jet3<R> {
    type Output = Self;
    fn mul(self, s: R) -> Self {
        Jet3::new(self.f * s, self.d1 * s, self.d2 * s, self.d3 * s)
    }
}

impl<R: Real> Mul<Cx<R>> for Jet3<R> {
    type Output = Self;
    fn mul(self, s: Cx<R>) -> Self {
        Jet3::new(self.f * s, self.d1 * s, self.d2 * s, self.d3 * s)
    }
}

impl<R: Real> Div for Jet3<R> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let three = R::of(3.0);
        let two = R::of(2.0);
        let q0 = self.f / o.f;
        let q1 = (self.d1 - q0 * o.d1) / o.f;
        let q2 = (self.d2 - q1 * o.d1 * two - q0 * o.d2) / o.f;
        let q3 = (self.d3 - q2 * o.d1 * three - q1 * o.d2 * three - q0 * o.d3) / o.f;
        Jet3::new(q0, q1, q2, q3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::cx;

    type J = Jet3<f64>;

    fn fd3(f: impl Fn(Cx<f64>) -> Cx<f64>, z: Cx<f64>) -> (Cx<f64>, Cx<f64>, Cx<f64>) {
        // central differences, step tuned per order
        let h1 = 1e-6;
        let h = cx(h1, 0.0);
        let d1 = (f(z + h) - f(z - h)) / (2.0 * h1);
        let h2 = 1e-4;
        let h = cx(h2, 0.0);
        let d2 = (f(z + h) - 2.0 * f(z) + f(z - h)) / (h2 * h2);
        let h3 = 1e-3;
        let h = cx(h3, 0.0);
        let d3 = (f(z + 2.0 * h) - 2.0 * f(z + h) + 2.0 * f(z - h) - f(z - 2.0 * h)) / (2.0 * h3.powi(3));
        (d1, d2, d3)
    }

    #[test]
    fn tan_jet_matches_finite_differences() {
        let z = cx(0.7, 0.3);
        let var = J::variable(z);
        let (s, c) = var.sin_cos();
        let t = s / c;
        let (d1, d2, d3) = fd3(|w| w.sin() / w.cos(), z);
        assert!((t.f - z.tan()).norm() < 1e-14);
        assert!((t.d1 - d1).norm() < 1e-8);
        assert!((t.d2 - d2).norm() < 1e-6);
        assert!((t.d3 - d3).norm() < 1e-4);
    }

    #[test]
    fn exp_of_poly_jet() {
        // g = exp(z^2), g' = 2z g, g'' = (2 + 4z^2) g, g''' = (12z + 8z^3) g
        let z = cx(0.4, -0.2);
        let p = J::poly(z, &[0.0, 0.0, 1.0]);
        let g = p.exp();
        let e = (z * z).exp();
        assert!((g.f - e).norm() < 1e-14);
        assert!((g.d1 - 2.0 * z * e).norm() < 1e-13);
        assert!((g.d2 - (cx(2.0, 0.0) + 4.0 * z * z) * e).norm() < 1e-13);
        assert!((g.d3 - (12.0 * z + 8.0 * z * z * z) * e).norm() < 1e-12);
    }

    #[test]
    fn quotient_reconstructs_numerator() {
        let z = cx(1.1, 0.6);
        let a = J::variable(z).sin();
        let b = J::variable(z).exp() + J::constant(cx(2.0, 0.0));
        let q = a / b;
        let back = q * b;
        assert!((back.f - a.f).norm() < 1e-14);
        assert!((back.d1 - a.d1).norm() < 1e-13);
        assert!((back.d2 - a.d2).norm() < 1e-13);
        assert!((back.d3 - a.d3).norm() < 1e-12);
    }
}
