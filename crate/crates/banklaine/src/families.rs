//! Explicit integral-defined families of locally injective functions.
//!
//! Four families are evaluable here, each an exponential of a path
//! integral from a fixed base point:
//!
//! * `F_m(z) = exp(∫₀^z e^{ζ^m} dζ)`, a local homeomorphism with `m`
//!   finite asymptotic values,
//! * `G_m(z) = z · exp(∫₀^z (e^{−t^m} − 1)/t dt)`, one zero at the origin,
//!   bounded on the real axis for even `m`,
//! * `f₂(z) = (i / c_{2(m−1)}) G_{2(m−1)}(−i z)` mapping the imaginary
//!   axis into the segment between `−i` and `i`, where the constant
//!   `c_{2(m−1)} = lim_{x→∞} G_{2(m−1)}(x)`,
//! * `F₀(z) = exp(∫_ξ^z R₀(t) e^{−t²} dt + c₀)` with a rational `R₀`
//!   whose only possible pole sits at the origin.
//!
//! [`FamilyInstance`] is the shared parameter record for these and for the
//! families evaluated elsewhere (elementary Bank–Laine pairs and the
//! constant-Schwarzian quotients in [`crate::ode`], the boundary models in
//! [`crate::qc`]).

// operation names follow the mathematical notation
#![allow(non_snake_case)]

use crate::num::{cx, expm1_cx, horner, Cx, Real};
use crate::quad::{integrate_along, PathSpec, QuadError};
use thiserror::Error;

/// Parameters of `F₀`: `R₀ = r0_num / r0_den` (real coefficients,
/// ascending powers), base point `ξ`, additive constant `c₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct F0Spec<R: Real> {
    pub r0_num: Vec<R>,
    pub r0_den: Vec<R>,
    pub xi: R,
    pub c0: R,
}

/// Parameters of the exceptional quotients `F = L(u)` with
/// `u = (1 − e^{i(a₁ z − b₁)}) / (1 − e^{i(a₂ z − b₂)})` and a real
/// linear-fractional `L(w) = (l₀ w + l₁)/(l₂ w + l₃)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem4Spec<R: Real> {
    pub l: [R; 4],
    pub a1: R,
    pub b1: R,
    pub a2: R,
    pub b2: R,
}

/// Parameter record naming one concrete function from the families this
/// library knows how to evaluate.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyInstance<R: Real> {
    Fm { m: u32 },
    Gm { m: u32 },
    F2 { m: u32 },
    F0(F0Spec<R>),
    /// Half-plane boundary model `v_a(z) = tan(z/2) Im a + Re a`.
    Va { a: Cx<R> },
    /// Composite boundary model `T_a = v_a ∘ φ_a`.
    Ta { a: Cx<R> },
    /// `E = (1/2) e^{−2p}` for a polynomial `p` (ascending coefficients).
    ElementaryE { p: Vec<R> },
    /// Coefficient `A = p″ − (p′)² − e^{4p}` of the same pair.
    ElementaryA { p: Vec<R> },
    /// The Bank–Laine function `sin z · cos z`.
    SinCos,
    /// The quotient `tan z`, Schwarzian 2.
    TanRatio,
    Theorem4F(Theorem4Spec<R>),
    /// Extension point for caller-supplied integrands; has no built-in
    /// evaluator.
    Custom,
}

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("invalid family instance: {0}")]
    InvalidInstance(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

impl<R: Real> FamilyInstance<R> {
    /// Check the parameter invariants of this instance.
    pub fn validate(&self) -> Result<(), FamilyError> {
        let bad = |msg: &str| Err(FamilyError::InvalidInstance(msg.to_string()));
        match self {
            FamilyInstance::Fm { m } | FamilyInstance::Gm { m } if *m < 1 => bad("m must be >= 1"),
            FamilyInstance::F2 { m } if *m < 2 => bad("f2 requires m >= 2"),
            FamilyInstance::F0(spec) => {
                if spec.r0_den.iter().filter(|c| **c != R::zero()).count() > 1 {
                    return bad("R0 may have at most one pole, at 0");
                }
                if spec.r0_den.iter().all(|c| *c == R::zero()) {
                    return bad("R0 denominator must be nonzero");
                }
                Ok(())
            }
            FamilyInstance::Va { a } | FamilyInstance::Ta { a } if a.im == R::zero() => {
                bad("v_a and T_a require Im a != 0")
            }
            FamilyInstance::Theorem4F(spec) => {
                if spec.l[0] * spec.l[3] - spec.l[1] * spec.l[2] == R::zero() {
                    return bad("L must be invertible");
                }
                if spec.a1 == R::zero() && spec.a2 == R::zero() {
                    return bad("a1 and a2 must not both vanish");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Integrand `(e^{−t^m} − 1)/t` with the removable singularity at 0
/// filled in. Power series below `|t| = 1e−2`, `expm1` form elsewhere.
fn gm_integrand<R: Real>(m: u32, t: Cx<R>) -> Cx<R> {
    if t.norm() < R::of(1e-2) {
        // sum_{n>=1} (−1)^n t^{nm−1} / n!
        let tm = -t.powu(m);
        let mut term = t.powu(m - 1) * (-R::one());
        let mut sum = term;
        let mut n = R::one();
        loop {
            n = n + R::one();
            term = term * tm / cx(n, R::zero());
            let next = sum + term;
            if next == sum {
                return sum;
            }
            sum = next;
        }
    } else {
        expm1_cx(-t.powu(m)) / t
    }
}

/// `F_m(z) = exp(∫₀^z e^{ζ^m} dζ)`.
pub fn eval_Fm<R: Real>(m: u32, z: Cx<R>, tol: R) -> Result<Cx<R>, FamilyError> {
    FamilyInstance::<R>::Fm { m }.validate()?;
    let path = PathSpec::segment(cx(R::zero(), R::zero()), z);
    let r = integrate_along(|zeta: Cx<R>| zeta.powu(m).exp(), &path, tol)?;
    Ok(r.value.exp())
}

/// `G_m(z) = z · exp(∫₀^z (e^{−t^m} − 1)/t dt)`.
pub fn eval_Gm<R: Real>(m: u32, z: Cx<R>, tol: R) -> Result<Cx<R>, FamilyError> {
    FamilyInstance::<R>::Gm { m }.validate()?;
    let path = PathSpec::segment(cx(R::zero(), R::zero()), z);
    let r = integrate_along(|t| gm_integrand(m, t), &path, tol)?;
    Ok(z * r.value.exp())
}

/// The limit `c_{2(m−1)} = lim_{x→+∞} G_{2(m−1)}(x)`, computed as
/// `exp(∫₀¹ (e^{−t^k} − 1)/t dt + ∫₁^∞ e^{−t^k}/t dt)` with `k = 2(m−1)`.
pub fn asympt_constant<R: Real>(m: u32, tol: R) -> Result<R, FamilyError> {
    if m < 2 {
        return Err(FamilyError::InvalidInstance("asympt_constant requires m >= 2".into()));
    }
    let k = 2 * (m - 1);
    let head = integrate_along(
        |t| gm_integrand(k, t),
        &PathSpec::segment(cx(R::zero(), R::zero()), cx(R::one(), R::zero())),
        tol * R::of(0.5),
    )?;
    let tail = integrate_along(
        |t: Cx<R>| (-t.powu(k)).exp() / t,
        &PathSpec::Ray {
            start: cx(R::one(), R::zero()),
            angle: R::zero(),
            r_trunc: None,
        },
        tol * R::of(0.5),
    )?;
    Ok((head.value.re + tail.value.re).exp())
}

/// `f₂(z) = (i / c_{2(m−1)}) G_{2(m−1)}(−i z)`.
pub fn eval_f2<R: Real>(m: u32, z: Cx<R>, tol: R) -> Result<Cx<R>, FamilyError> {
    FamilyInstance::<R>::F2 { m }.validate()?;
    let c = asympt_constant(m, tol)?;
    let g = eval_Gm(2 * (m - 1), -Cx::<R>::i() * z, tol)?;
    Ok(Cx::<R>::i() * g / cx(c, R::zero()))
}

/// `F₀(z) = exp(∫_ξ^z R₀(t) e^{−t²} dt + c₀)`.
///
/// The path runs from `ξ` along the real axis to `Re z`, then vertically
/// to `z`; when that path crosses the pole of `R₀` the quadrature reports
/// it and rerouting is the caller's responsibility.
pub fn eval_F0<R: Real>(spec: &F0Spec<R>, z: Cx<R>, tol: R) -> Result<Cx<R>, FamilyError> {
    FamilyInstance::F0(spec.clone()).validate()?;
    let integrand = |t: Cx<R>| {
        horner(&spec.r0_num, t) / horner(&spec.r0_den, t) * (-(t * t)).exp()
    };
    let xi = cx(spec.xi, R::zero());
    let path = if z.im == R::zero() {
        PathSpec::Segments(vec![xi, z])
    } else {
        PathSpec::Segments(vec![xi, cx(z.re, R::zero()), z])
    };
    let r = integrate_along(integrand, &path, tol)?;
    Ok((r.value + cx(spec.c0, R::zero())).exp())
}
