//! Scalar abstraction for the numeric kernels.
//!
//! Everything that does real arithmetic is generic over [`Real`], so the
//! library can be instantiated with `f32` or `f64`. The concrete aliases
//! most callers want live at the crate root ([`crate::C64`], [`crate::R64`]).

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar usable by every kernel in this crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Shorthand for `from_f64(x).unwrap()`; all literals used internally
    /// are exactly representable in f32 and up.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal must convert")
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + std::fmt::Debug
        + std::fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Complex number over a [`Real`] scalar.
pub type Cx<R> = Complex<R>;

/// `a + b i` without the `Complex::new` noise.
#[inline]
pub fn cx<R: Real>(re: R, im: R) -> Cx<R> {
    Complex::new(re, im)
}

/// Stable `log|sin w|` that does not overflow for large `|Im w|`.
///
/// For `|Im w| > 20` uses `log|sin w| = |Im w| - log 2 + log|1 - e^{-2i w sgn}|`.
pub fn log_abs_sin<R: Real>(w: Cx<R>) -> R {
    let im = w.im.abs();
    if im <= R::of(20.0) {
        return w.sin().norm().ln();
    }
    // sin w = (e^{iw} - e^{-iw}) / 2i; the dominant term has modulus e^{|Im w|}/2.
    let sgn = if w.im > R::zero() { R::one() } else { -R::one() };
    let corr = (Cx::<R>::i() * w * R::of(2.0) * sgn).exp();
    im - R::of(2.0).ln() + (Cx::new(R::one(), R::zero()) - corr).norm().ln()
}

/// Stable `log|cos w|`, same convention as [`log_abs_sin`].
pub fn log_abs_cos<R: Real>(w: Cx<R>) -> R {
    let half_pi = R::FRAC_PI_2();
    log_abs_sin(w + Cx::new(half_pi, R::zero()))
}

/// Polynomial with real coefficients (ascending powers) at a complex point.
pub fn horner<R: Real>(coeffs: &[R], z: Cx<R>) -> Cx<R> {
    let mut acc = Cx::new(R::zero(), R::zero());
    for &c in coeffs.iter().rev() {
        acc = acc * z + Cx::new(c, R::zero());
    }
    acc
}

/// `e^s - 1` without cancellation for small `|s|`.
pub fn expm1_cx<R: Real>(s: Cx<R>) -> Cx<R> {
    if s.norm() >= R::of(0.5) {
        return s.exp() - Cx::new(R::one(), R::zero());
    }
    let mut term = s;
    let mut sum = s;
    let mut n = R::one();
    loop {
        n = n + R::one();
        term = term * s / Cx::new(n, R::zero());
        sum = sum + term;
        if term.norm() <= sum.norm().max(R::one()) * R::epsilon() {
            return sum;
        }
    }
}
