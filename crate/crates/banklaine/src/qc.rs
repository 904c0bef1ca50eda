//! Quasiconformal interpolation toolkit: the boundary stretch q_a and its
//! odd extension Q_a, the vertical-strip interpolation phi_a, the modified
//! tangent T_a, the horizontal interpolation tau, Beltrami coefficients by
//! finite differences, logarithmic area of the model regions, and the
//! boundary-matching identity that glues sector maps together.
//!
//! The maps are diffeomorphisms of half-planes that are conformal off a
//! unit-width interpolation strip; their dilatation is what the gluing
//! argument budgets, so everything here is checkable against closed forms.

#![allow(non_snake_case)] // operation names follow the mathematical notation

use crate::num::{cx, Cx, Real};
use crate::quad::{integrate_along, PathSpec, QuadError};
use thiserror::Error;

/// Asymptotic value together with the approach direction of the model
/// boundary parametrization.
#[derive(Debug, Clone, Copy)]
pub struct OrientedAsymptoticValue<R: Real> {
    pub a: Cx<R>,
    /// One of 0, +-pi/2, pi.
    pub theta: R,
}

impl<R: Real> OrientedAsymptoticValue<R> {
    pub fn try_new(a: Cx<R>, theta: R) -> Result<Self, QcError> {
        let tol = R::of(1e-12);
        let allowed = [R::zero(), R::FRAC_PI_2(), -R::FRAC_PI_2(), R::PI()];
        if allowed.iter().any(|&t| (theta - t).abs() <= tol) {
            Ok(OrientedAsymptoticValue { a, theta })
        } else {
            Err(QcError::InvalidTheta {
                theta: lossy(theta),
            })
        }
    }
}

/// Beltrami coefficient of a map at a point.
#[derive(Debug, Clone, Copy)]
pub struct BeltramiSample<R: Real> {
    pub z: Cx<R>,
    pub mu: Cx<R>,
    /// Pointwise dilatation (1 + |mu|) / (1 - |mu|).
    pub K: R,
}

/// Region whose logarithmic area can be measured.
#[derive(Debug, Clone, Copy)]
pub enum RegionSpec<R: Real> {
    /// r1 < |z| < r2, theta1 < arg z < theta2.
    AnnularSector { r1: R, r2: R, theta1: R, theta2: R },
    /// x >= 1, k pi <= y <= (k+1) pi.
    HalfStrip { k: i32 },
    /// x >= 1, |y - (k+1/2) pi| <= lambda e^{-x}.
    PinchedStrip { k: i32, lambda: R },
    /// theta1 < arg z < theta2, r1 < |z| < truncation.
    TruncatedSector { r1: R, theta1: R, theta2: R },
    /// x >= 1, |Re e^z| <= bound: the union of all pinched strips.
    ExpPreimageBand { bound: R },
}

#[derive(Debug, Error)]
pub enum QcError {
    #[error("q_a is defined for y >= {y_min}, got y = {y}")]
    DomainError { y: f64, y_min: f64 },
    #[error("the stretch map needs Im a != 0")]
    RealAsymptoticValue,
    #[error("tan pole at phi_a(z) = {re} + {im}i")]
    PoleAt { re: f64, im: f64 },
    #[error("boundary map h is not increasing near x = {x}")]
    NotDiffeo { x: f64 },
    #[error("|f_zbar| >= |f_z| at {re} + {im}i: the map is degenerate there")]
    DegenerateJacobian { re: f64, im: f64 },
    #[error("oriented value does not satisfy the matching clause: {what}")]
    PreconditionMismatch { what: &'static str },
    #[error("tail bound holds for k >= 1 or k <= -2, got {k}")]
    InvalidK { k: i64 },
    #[error("theta must be one of 0, +-pi/2, pi, got {theta}")]
    InvalidTheta { theta: f64 },
    #[error("invalid region: {what}")]
    InvalidRegion { what: &'static str },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

fn lossy<R: Real>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Left endpoint of the exact-stretch range: y_a = max(1, -log|Im a|).
pub fn y_a<R: Real>(a: Cx<R>) -> R {
    R::one().max(-a.im.abs().ln())
}

/// Boundary stretch q_a(y) = log(2 |Im a| e^y - 1) for y >= y_a.
/// Grows like y + log(2 |Im a|) and reaches 0 at y_a exactly when
/// |Im a| <= 1/e.
pub fn boundary_stretch_q<R: Real>(a: Cx<R>, y: R) -> Result<R, QcError> {
    let im = a.im.abs();
    if im == R::zero() {
        return Err(QcError::RealAsymptoticValue);
    }
    let ya = y_a(a);
    if y < ya {
        return Err(QcError::DomainError {
            y: lossy(y),
            y_min: lossy(ya),
        });
    }
    Ok((R::of(2.0) * im * y.exp() - R::one()).ln())
}

fn q_raw<R: Real>(im: R, y: R) -> R {
    (R::of(2.0) * im * y.exp() - R::one()).ln()
}

/// d/dy of q_a, which is 1 + e^{-q_a(y)}.
fn q_d1_from_q<R: Real>(q: R) -> R {
    R::one() + (-q).exp()
}

enum QInterp<R: Real> {
    /// alpha y + beta y^3.
    Cubic { alpha: R, beta: R },
    /// Antiderivative of the even c0 + (s - c0)(|y|/Y)^k.
    Monomial { c0: R, k: i32 },
}

/// Odd increasing C^1 extension of the boundary stretch across [-Y, Y].
///
/// The knot Y is y_a when q_a(y_a) is safely positive. When |Im a| is at or
/// below 1/e the stretch vanishes at y_a, and no odd strictly increasing
/// extension through (y_a, 0) exists at all, so the knot is promoted to
/// 1 - log|Im a| where q_a is comfortably positive. Below the knot the
/// extension is the odd monotone cubic matching value and slope whenever
/// that cubic is increasing, and otherwise the integral of a positive even
/// monomial profile with the same endpoint data.
pub struct QExtension<R: Real> {
    im: R,
    knot: R,
    s_knot: R,
    interp: QInterp<R>,
}

impl<R: Real> QExtension<R> {
    pub fn new(a: Cx<R>) -> Result<Self, QcError> {
        let im = a.im.abs();
        if im == R::zero() || !im.is_finite() {
            return Err(QcError::RealAsymptoticValue);
        }
        let ya = y_a(a);
        let knot = if q_raw(im, ya) > R::of(0.1) {
            ya
        } else {
            R::one() - im.ln()
        };
        let q_knot = q_raw(im, knot);
        let s_knot = q_d1_from_q(q_knot);
        let three_q = R::of(3.0) * q_knot;
        let sy = s_knot * knot;
        let interp = if three_q > sy {
            QInterp::Cubic {
                alpha: (three_q - sy) / (R::of(2.0) * knot),
                beta: (sy - q_knot) / (R::of(2.0) * knot.powi(3)),
            }
        } else {
            let k = (sy / q_knot)
                .ceil()
                .to_f64()
                .map(|v| v as i32)
                .unwrap_or(i32::MAX)
                .max(1);
            let kp1 = R::of((k + 1) as f64);
            let c0 = (kp1 * q_knot - sy) / (R::of(k as f64) * knot);
            QInterp::Monomial { c0, k }
        };
        Ok(QExtension {
            im,
            knot,
            s_knot,
            interp,
        })
    }

    /// Height above which the extension coincides with q_a.
    pub fn knot(&self) -> R {
        self.knot
    }

    pub fn eval(&self, y: R) -> R {
        let s = y.signum();
        let t = y.abs();
        if t >= self.knot {
            return s * q_raw(self.im, t);
        }
        let v = match self.interp {
            QInterp::Cubic { alpha, beta } => alpha * t + beta * t.powi(3),
            QInterp::Monomial { c0, k } => {
                let kp1 = R::of((k + 1) as f64);
                c0 * t + (self.s_knot - c0) * self.knot / kp1 * (t / self.knot).powi(k + 1)
            }
        };
        s * v
    }

    pub fn eval_d1(&self, y: R) -> R {
        let t = y.abs();
        if t >= self.knot {
            return q_d1_from_q(q_raw(self.im, t));
        }
        match self.interp {
            QInterp::Cubic { alpha, beta } => alpha + R::of(3.0) * beta * t * t,
            QInterp::Monomial { c0, k } => c0 + (self.s_knot - c0) * (t / self.knot).powi(k),
        }
    }
}

/// Odd diffeomorphic extension Q_a of the boundary stretch, as a value.
pub fn extend_Q<R: Real>(a: Cx<R>, y: R) -> Result<R, QcError> {
    Ok(QExtension::new(a)?.eval(y))
}

/// Vertical-strip interpolation of the right half-plane:
/// identity for Re z > 1, boundary law i Q_a(y) at Re z = 0, affine blend
/// in the strip 0 <= Re z <= 1.
pub fn strip_interpolation_phi<R: Real>(a: Cx<R>, z: Cx<R>) -> Result<Cx<R>, QcError> {
    assert!(
        z.re >= -R::of(1e-12),
        "phi_a lives on the closed right half-plane"
    );
    if z.re > R::one() {
        return Ok(z);
    }
    let q = QExtension::new(a)?;
    let shift = (R::one() - z.re) * (q.eval(z.im) - z.im);
    Ok(z + cx(R::zero(), shift))
}

/// Modified tangent T_a = v_a(phi_a(z)) with v_a(w) = tan(w/2) Im a + Re a.
/// On the positive imaginary axis above the knot,
/// T_a(it) - a = -i sign(Im a) e^{-t} exactly.
pub fn modified_tangent_T<R: Real>(a: Cx<R>, z: Cx<R>) -> Result<Cx<R>, QcError> {
    if a.im == R::zero() {
        return Err(QcError::RealAsymptoticValue);
    }
    let w = strip_interpolation_phi(a, z)?;
    let t = (w / R::of(2.0)).tan();
    if !t.re.is_finite() || !t.im.is_finite() {
        return Err(QcError::PoleAt {
            re: lossy(w.re),
            im: lossy(w.im),
        });
    }
    Ok(t * a.im + cx(a.re, R::zero()))
}

/// Horizontal interpolation of the closed upper half-plane from a boundary
/// diffeomorphism h: identity above height 1, h on the real axis, affine
/// blend in the strip 0 <= y <= 1. Monotonicity of h is spot-checked at
/// the evaluation abscissa.
pub fn horizontal_interpolation_tau<R: Real, H>(h: &H, z: Cx<R>) -> Result<Cx<R>, QcError>
where
    H: Fn(R) -> R,
{
    assert!(
        z.im >= -R::of(1e-12),
        "tau lives on the closed upper half-plane"
    );
    if z.im > R::one() {
        return Ok(z);
    }
    let delta = R::of(1e-4) * (R::one() + z.re.abs());
    if h(z.re + delta) <= h(z.re - delta) {
        return Err(QcError::NotDiffeo { x: lossy(z.re) });
    }
    let shift = (R::one() - z.im) * (h(z.re) - z.re);
    Ok(z + cx(shift, R::zero()))
}

/// Beltrami coefficient by central finite differences:
/// mu = f_zbar / f_z with f_z = (f_x - i f_y)/2, f_zbar = (f_x + i f_y)/2.
/// The step is fd_step scaled by 1 + |z|.
pub fn beltrami<R: Real, F>(f: F, z: Cx<R>, fd_step: R) -> Result<BeltramiSample<R>, QcError>
where
    F: Fn(Cx<R>) -> Cx<R>,
{
    let h = fd_step * (R::one() + z.norm());
    let two_h = R::of(2.0) * h;
    let fx = (f(z + cx(h, R::zero())) - f(z - cx(h, R::zero()))) / two_h;
    let fy = (f(z + cx(R::zero(), h)) - f(z - cx(R::zero(), h))) / two_h;
    let i = Cx::<R>::i();
    let fz = (fx - i * fy) / R::of(2.0);
    let fzbar = (fx + i * fy) / R::of(2.0);
    if fzbar.norm() >= fz.norm() * (R::one() - R::of(1e-9)) {
        return Err(QcError::DegenerateJacobian {
            re: lossy(z.re),
            im: lossy(z.im),
        });
    }
    let mu = fzbar / fz;
    let m = mu.norm();
    Ok(BeltramiSample {
        z,
        mu,
        K: (R::one() + m) / (R::one() - m),
    })
}

/// Adaptive integral of a smooth real function on [a, b], reusing the
/// complex segment quadrature.
fn real_integral<R: Real, F>(f: F, a: R, b: R, tol: R) -> Result<R, QuadError>
where
    F: Fn(R) -> R,
{
    if b <= a {
        return Ok(R::zero());
    }
    let path = PathSpec::segment(cx(a, R::zero()), cx(b, R::zero()));
    let g = |z: Cx<R>| cx(f(z.re), R::zero());
    Ok(integrate_along(g, &path, tol)?.value.re)
}

/// Logarithmic area of a model region, truncated at |z| <= truncation for
/// sectors and at x <= truncation for the strips. The integrand dx dy/|z|^2
/// is positive, so the value is monotone in the truncation.
pub fn logarea<R: Real>(region: &RegionSpec<R>, truncation: R) -> Result<R, QcError> {
    let tol = R::of(1e-10);
    match *region {
        RegionSpec::AnnularSector {
            r1,
            r2,
            theta1,
            theta2,
        } => {
            if !(r2 > r1 && r1 > R::zero()) {
                return Err(QcError::InvalidRegion {
                    what: "need r2 > r1 > 0",
                });
            }
            if !(theta2 > theta1) {
                return Err(QcError::InvalidRegion {
                    what: "need theta2 > theta1",
                });
            }
            let hi = r2.min(truncation);
            let radial = real_integral(|r| r.recip(), r1, hi, tol)?;
            Ok((theta2 - theta1) * radial)
        }
        RegionSpec::TruncatedSector { r1, theta1, theta2 } => logarea(
            &RegionSpec::AnnularSector {
                r1,
                r2: truncation,
                theta1,
                theta2,
            },
            truncation,
        ),
        RegionSpec::HalfStrip { k } => {
            let lo = R::of(k as f64) * R::PI();
            let hi = R::of((k + 1) as f64) * R::PI();
            let inner = move |x: R| ((hi / x).atan() - (lo / x).atan()) / x;
            Ok(real_integral(inner, R::one(), truncation, tol)?)
        }
        RegionSpec::PinchedStrip { k, lambda } => {
            if !(lambda > R::zero()) {
                return Err(QcError::InvalidRegion {
                    what: "pinched strip needs a positive width parameter",
                });
            }
            let c = (R::of(k as f64) + R::of(0.5)) * R::PI();
            let inner = move |x: R| {
                let w = lambda * (-x).exp();
                (((c + w) / x).atan() - ((c - w) / x).atan()) / x
            };
            Ok(real_integral(inner, R::one(), truncation, tol)?)
        }
        RegionSpec::ExpPreimageBand { bound } => {
            if !(bound > R::zero()) {
                return Err(QcError::InvalidRegion {
                    what: "band needs a positive bound",
                });
            }
            // For fixed x the slice is a band of half-width
            // w = asin(min(1, bound e^{-x})) around every (k + 1/2) pi, and
            // summing 1/(x^2 + y^2) over all bands has the closed form
            // (2/x) atan(tanh x tan w); w = pi/2 gives the full line pi/x.
            let inner = move |x: R| {
                let c = bound * (-x).exp();
                if c >= R::one() {
                    R::PI() / x
                } else {
                    let tan_w = c / (R::one() - c * c).sqrt();
                    R::of(2.0) / x * (x.tanh() * tan_w).atan()
                }
            };
            // Kink where bound e^{-x} crosses 1; split the integral there.
            let split = bound.ln().max(R::one()).min(truncation);
            let head = real_integral(inner, R::one(), split, tol)?;
            let tail = real_integral(inner, split, truncation, tol)?;
            Ok(head + tail)
        }
    }
}

/// Closed-form tail bound for the pinched strips: 2/(e k^2) for k >= 1 and
/// 2/(e (k+1)^2) for k <= -2. The strips at k = 0, -1 straddle the real
/// axis and are covered by the central-band term instead.
pub fn strip_tail_bound<R: Real>(k: i64) -> Result<R, QcError> {
    let e = R::E();
    if k >= 1 {
        Ok(R::of(2.0) / (e * R::of((k * k) as f64)))
    } else if k <= -2 {
        let kp1 = k + 1;
        Ok(R::of(2.0) / (e * R::of((kp1 * kp1) as f64)))
    } else {
        Err(QcError::InvalidK { k })
    }
}

/// Sup over a t-grid of |T_a(it) - a - e^{i theta_+} e^{-t}|, the mismatch
/// between the modified tangent and the model boundary law. The identity
/// is exact for t at or above the extension knot, so the sup is pure
/// floating-point noise when the preconditions hold.
pub fn boundary_match_check<R: Real>(
    a: Cx<R>,
    d_plus: &OrientedAsymptoticValue<R>,
    t_range: (R, R),
) -> Result<R, QcError> {
    if a.im == R::zero() {
        return Err(QcError::RealAsymptoticValue);
    }
    let tol = R::of(1e-9);
    if (d_plus.a - a).norm() > tol * (R::one() + a.norm()) {
        return Err(QcError::PreconditionMismatch {
            what: "oriented value carries a different asymptotic value",
        });
    }
    let want_theta = -a.im.signum() * R::FRAC_PI_2();
    if (d_plus.theta - want_theta).abs() > tol {
        return Err(QcError::PreconditionMismatch {
            what: "theta_+ must be -sign(Im a) pi/2",
        });
    }
    let t1 = R::one().max(QExtension::new(a)?.knot());
    let (lo, hi) = t_range;
    if lo < t1 - R::of(1e-12) || hi <= lo {
        return Err(QcError::PreconditionMismatch {
            what: "t range must start at or above t1 = max(t0, knot)",
        });
    }

    let n = 512;
    let phase = cx(d_plus.theta.cos(), d_plus.theta.sin());
    let mut sup = R::zero();
    for j in 0..=n {
        let t = lo + (hi - lo) * R::of(j as f64) / R::of(n as f64);
        let T = modified_tangent_T(a, cx(R::zero(), t))?;
        let mismatch = (T - a - phase * (-t).exp()).norm();
        if mismatch > sup {
            sup = mismatch;
        }
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stretch_matches_closed_form_and_asymptotics() {
        let a = cx(0.0, 1.0);
        let q1 = boundary_stretch_q(a, 1.0).unwrap();
        assert!((q1 - (2.0 * std::f64::consts::E - 1.0).ln()).abs() < 1e-15);

        let q30 = boundary_stretch_q(a, 30.0).unwrap();
        assert!((q30 - 30.0 - 2.0f64.ln()).abs() < 1e-10);

        // |Im a| <= 1/e makes the stretch vanish at its left endpoint.
        let a4 = cx(0.0, 0.25);
        let ya = y_a(a4);
        assert!((ya - 4.0f64.ln()).abs() < 1e-15);
        assert!(boundary_stretch_q(a4, ya).unwrap().abs() < 1e-12);

        let err = boundary_stretch_q(a, 0.5).unwrap_err();
        assert!(matches!(err, QcError::DomainError { .. }));
    }

    #[test]
    fn extension_agrees_with_stretch_above_the_knot() {
        let a = cx(0.0, 1.0);
        let q = QExtension::new(a).unwrap();
        assert_eq!(q.knot(), 1.0);
        let y = q.knot() + 1.0;
        assert_eq!(q.eval(y), boundary_stretch_q(a, y).unwrap());
    }

    #[test]
    fn extension_is_odd_and_strictly_increasing() {
        for a in [cx(0.0, 1.0), cx(2.0, -3.0), cx(0.0, 0.25), cx(0.0, 0.4)] {
            let q = QExtension::new(a).unwrap();
            assert_eq!(q.eval(0.0), 0.0);
            let mut prev = f64::NEG_INFINITY;
            for j in 0..=1000 {
                let y = -3.0 + 6.0 * j as f64 / 1000.0;
                let v = q.eval(y);
                assert!((q.eval(-y) + v).abs() < 1e-14, "odd symmetry at {y}");
                assert!(v > prev, "not increasing at {y} for a = {a}");
                prev = v;
            }
        }
    }

    #[test]
    fn extension_slope_is_continuous_at_the_knot() {
        for a in [cx(0.0f64, 1.0), cx(0.0, 0.25), cx(0.0, 0.4)] {
            let q = QExtension::new(a).unwrap();
            let y = q.knot();
            let eps = 1e-7;
            let inner = (q.eval(y) - q.eval(y - eps)) / eps;
            let outer = (q.eval(y + eps) - q.eval(y)) / eps;
            assert!((inner - outer).abs() < 1e-5, "kink at knot for a = {a}");
            assert!((q.eval_d1(y) - outer).abs() < 1e-5);
        }
    }

    #[test]
    fn phi_is_identity_right_of_the_strip_and_stretch_on_the_boundary() {
        let a = cx(0.0, 1.0);
        assert_eq!(
            strip_interpolation_phi(a, cx(2.0, 3.0)).unwrap(),
            cx(2.0, 3.0)
        );
        let q = QExtension::new(a).unwrap();
        for j in 0..40 {
            let y = -4.0 + 8.0 * j as f64 / 39.0;
            let img = strip_interpolation_phi(a, cx(0.0, y)).unwrap();
            assert!(img.re.abs() < 1e-15);
            assert!((img.im - q.eval(y)).abs() < 1e-14);
        }
    }

    #[test]
    fn phi_has_no_collisions_on_a_point_cloud() {
        let a = cx(0.0, 1.0);
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let pts: Vec<Cx<f64>> = (0..2000)
            .map(|_| cx(3.0 * next(), -3.0 + 6.0 * next()))
            .collect();
        let imgs: Vec<Cx<f64>> = pts
            .iter()
            .map(|&z| strip_interpolation_phi(a, z).unwrap())
            .collect();
        for i in 0..pts.len() {
            for j in 0..i {
                if (pts[i] - pts[j]).norm() >= 1e-6 {
                    assert!(
                        (imgs[i] - imgs[j]).norm() > 1e-12,
                        "collision {} {}",
                        pts[i],
                        pts[j]
                    );
                }
            }
        }
    }

    #[test]
    fn modified_tangent_matches_the_exact_chain() {
        // T_i(2i) - i = -2i/(e^Q + 1) = -i e^{-2} since e^Q = 2e^2 - 1.
        let a = cx(0.0, 1.0);
        let t = modified_tangent_T(a, cx(0.0, 2.0)).unwrap();
        let target = cx(0.0, 1.0 - (-2.0f64).exp());
        assert!((t - target).norm() < 1e-14, "T = {t}");
    }

    #[test]
    fn tangent_vanishes_at_zero_and_blows_up_at_real_poles() {
        let a = cx(0.0, 1.0);
        assert!(modified_tangent_T(a, cx(0.0, 0.0)).unwrap().norm() < 1e-15);
        // phi_a fixes the real axis, so the tan pole at pi stays there.
        match modified_tangent_T(a, cx(std::f64::consts::PI, 0.0)) {
            Err(QcError::PoleAt { .. }) => {}
            Ok(t) => assert!(t.norm() > 1e12, "pole should dominate, got {t}"),
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn tau_interpolates_between_h_and_identity() {
        let id = |x: f64| x;
        let z = cx(0.7, 0.3);
        assert_eq!(horizontal_interpolation_tau(&id, z).unwrap(), z);

        let shift = |x: f64| x + 1.0;
        let img = horizontal_interpolation_tau(&shift, cx(0.25, 0.5)).unwrap();
        assert!((img - cx(0.75, 0.5)).norm() < 1e-15);

        let above = horizontal_interpolation_tau(&shift, cx(0.25, 2.0)).unwrap();
        assert_eq!(above, cx(0.25, 2.0));

        let flip = |x: f64| -x;
        let err = horizontal_interpolation_tau(&flip, cx(0.0, 0.5)).unwrap_err();
        assert!(matches!(err, QcError::NotDiffeo { .. }));
    }

    #[test]
    fn beltrami_vanishes_for_holomorphic_maps() {
        let s = beltrami(|z: Cx<f64>| z.exp(), cx(0.3, -0.2), 1e-5).unwrap();
        assert!(s.mu.norm() < 1e-8);
        assert!((s.K - 1.0) < 1e-8);
    }

    #[test]
    fn beltrami_of_the_shifted_tau_is_the_known_constant() {
        let shift = |x: f64| x + 1.0;
        let f = move |z: Cx<f64>| horizontal_interpolation_tau(&shift, z).unwrap();
        for x in [-1.0, 0.0, 2.5] {
            let s = beltrami(&f, cx(x, 0.5), 1e-5).unwrap();
            let want = cx(0.0, -1.0) / cx(2.0, 1.0);
            assert!((s.mu - want).norm() < 1e-6, "mu = {}", s.mu);
            assert!((s.mu.norm() - 1.0 / 5.0f64.sqrt()).abs() < 1e-6);
            assert!((s.K - (3.0 + 5.0f64.sqrt()) / 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn beltrami_flags_orientation_reversal() {
        let err = beltrami(|z: Cx<f64>| z.conj(), cx(1.0, 1.0), 1e-5).unwrap_err();
        assert!(matches!(err, QcError::DegenerateJacobian { .. }));
    }

    #[test]
    fn beltrami_matches_the_closed_forms_on_a_grid() {
        // tau from a nonlinear boundary map, against the quotient formula.
        let h = |x: f64| x + 0.5 * (-x * x).exp();
        let hp = |x: f64| 1.0 - x * (-x * x).exp();
        let f = move |z: Cx<f64>| horizontal_interpolation_tau(&h, z).unwrap();
        let mut sup: f64 = 0.0;
        for i in 0..50 {
            for j in 0..50 {
                let x = -2.0 + 4.0 * i as f64 / 49.0;
                let y = 0.04 + 0.9 * j as f64 / 49.0;
                let s = beltrami(&f, cx(x, y), 1e-5).unwrap();
                let p = (1.0 - y) * (hp(x) - 1.0);
                let r = h(x) - x;
                let want = cx(p, -r) / (cx(2.0 + p, r));
                sup = sup.max((s.mu - want).norm());
            }
        }
        assert!(sup < 1e-6, "sup mismatch {sup}");

        // phi_a in its strip, against the mirrored quotient formula.
        let a = cx(0.0, 1.0);
        let q = QExtension::new(a).unwrap();
        let g = move |z: Cx<f64>| strip_interpolation_phi(a, z).unwrap();
        let mut sup: f64 = 0.0;
        for i in 0..50 {
            for j in 0..50 {
                let x = 0.04 + 0.9 * i as f64 / 49.0;
                let y = -2.0 + 4.0 * j as f64 / 49.0;
                let s = beltrami(&g, cx(x, y), 1e-5).unwrap();
                let p = (1.0 - x) * (q.eval_d1(y) - 1.0);
                let r = q.eval(y) - y;
                let want = -cx(p, r) / cx(2.0 + p, -r);
                sup = sup.max((s.mu - want).norm());
            }
        }
        assert!(sup < 1e-6, "sup mismatch {sup}");
    }

    #[test]
    fn beltrami_vanishes_outside_the_interpolation_strips() {
        // The maps are the identity there; central differences of the
        // identity still carry cancellation noise of order eps |z| / h.
        let shift = |x: f64| x + 1.0;
        let f = move |z: Cx<f64>| horizontal_interpolation_tau(&shift, z).unwrap();
        let s = beltrami(&f, cx(0.3, 1.7), 1e-5).unwrap();
        assert!(s.mu.norm() < 1e-9);

        let a = cx(0.0, 1.0);
        let g = move |z: Cx<f64>| strip_interpolation_phi(a, z).unwrap();
        let s = beltrami(&g, cx(1.8, -0.4), 1e-5).unwrap();
        assert!(s.mu.norm() < 1e-9);
    }

    #[test]
    fn logarea_of_the_reference_sector_is_pi_over_four() {
        let region = RegionSpec::AnnularSector {
            r1: 1.0,
            r2: std::f64::consts::E,
            theta1: 0.0,
            theta2: std::f64::consts::FRAC_PI_4,
        };
        let v = logarea(&region, 10.0).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
    }

    #[test]
    fn logarea_obeys_the_alpha_square_law() {
        let base = (1.0, std::f64::consts::E, 0.1, 0.9);
        let v0 = logarea(
            &RegionSpec::AnnularSector {
                r1: base.0,
                r2: base.1,
                theta1: base.2,
                theta2: base.3,
            },
            1e9,
        )
        .unwrap();
        for alpha in [0.5, 2.0, 3.0] {
            let v = logarea(
                &RegionSpec::AnnularSector {
                    r1: base.0.powf(alpha),
                    r2: base.1.powf(alpha),
                    theta1: base.2 * alpha,
                    theta2: base.3 * alpha,
                },
                1e9,
            )
            .unwrap();
            assert!(
                (v - alpha * alpha * v0).abs() < 1e-6 * v.max(1.0),
                "alpha {alpha}: {v} vs {}",
                alpha * alpha * v0
            );
        }
    }

    #[test]
    fn pinched_strips_stay_under_their_tail_bounds() {
        for k in [1i64, 2, 3, 5, -2, -3, -6] {
            let bound = strip_tail_bound::<f64>(k).unwrap();
            let v = logarea(
                &RegionSpec::PinchedStrip {
                    k: k as i32,
                    lambda: 1.0,
                },
                80.0,
            )
            .unwrap();
            assert!(v <= bound, "k = {k}: {v} > {bound}");
        }
        assert!((strip_tail_bound::<f64>(1).unwrap() - 2.0 / std::f64::consts::E).abs() < 1e-15);
        assert!((strip_tail_bound::<f64>(-2).unwrap() - 2.0 / std::f64::consts::E).abs() < 1e-15);
        assert!(matches!(
            strip_tail_bound::<f64>(0),
            Err(QcError::InvalidK { k: 0 })
        ));
        assert!(matches!(
            strip_tail_bound::<f64>(-1),
            Err(QcError::InvalidK { k: -1 })
        ));
    }

    #[test]
    fn tail_bound_sum_stays_under_the_series_budget() {
        let total: f64 = (1..=100)
            .map(|k| strip_tail_bound::<f64>(k).unwrap())
            .sum();
        let budget = 4.0 / std::f64::consts::E * std::f64::consts::PI.powi(2) / 6.0;
        assert!(total < budget);
    }

    #[test]
    fn exp_band_logarea_fits_the_budget() {
        // Budget: (4/e) sum 1/k^2 plus the central band {x >= 1, |y| <= pi}.
        let central = logarea(&RegionSpec::HalfStrip { k: 0 }, 1e4).unwrap()
            + logarea(&RegionSpec::HalfStrip { k: -1 }, 1e4).unwrap();
        let budget = 4.0 / std::f64::consts::E * std::f64::consts::PI.powi(2) / 6.0 + central;
        for bound in [1.0, 10.0] {
            let v = logarea(&RegionSpec::ExpPreimageBand { bound }, 40.0).unwrap();
            assert!(v < budget, "K = {bound}: {v} vs budget {budget}");
            // The x > 40 contribution is ~e^{-40}, below quadrature noise.
            let v_more = logarea(&RegionSpec::ExpPreimageBand { bound }, 60.0).unwrap();
            assert!(v_more >= v - 1e-9, "monotone in truncation");
        }
    }

    #[test]
    fn boundary_match_is_exact_for_matching_orientations() {
        let a = cx(0.0, 1.0);
        let d = OrientedAsymptoticValue::try_new(a, -std::f64::consts::FRAC_PI_2).unwrap();
        let sup = boundary_match_check(a, &d, (1.0, 20.0)).unwrap();
        assert!(sup < 1e-12, "sup {sup}");

        let a2 = cx(2.0, -3.0);
        let d2 = OrientedAsymptoticValue::try_new(a2, std::f64::consts::FRAC_PI_2).unwrap();
        let sup2 = boundary_match_check(a2, &d2, (1.0, 20.0)).unwrap();
        assert!(sup2 < 1e-9, "sup {sup2}");

        let wrong = OrientedAsymptoticValue::try_new(a, 0.0).unwrap();
        let err = boundary_match_check(a, &wrong, (1.0, 20.0)).unwrap_err();
        assert!(matches!(err, QcError::PreconditionMismatch { .. }));
    }

    #[test]
    fn oriented_values_reject_off_grid_angles() {
        let err = OrientedAsymptoticValue::try_new(cx(0.0, 1.0), 0.3).unwrap_err();
        assert!(matches!(err, QcError::InvalidTheta { .. }));
    }
}
