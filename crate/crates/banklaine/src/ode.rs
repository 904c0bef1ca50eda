//! Solution pairs of `w″ + A w = 0` and the objects built from them.
//!
//! The central identities:
//!
//! * a normalized pair has Wronskian `w₁w₂′ − w₁′w₂ = 1`,
//! * the product `E = w₁w₂` is a Bank–Laine function: `E′ = ±1` wherever
//!   `E = 0`,
//! * the ratio `F = w₂/w₁` is locally injective with `F′ = W/w₁²` and
//!   Schwarzian `S(F) = F‴/F′ − (3/2)(F″/F′)² = 2A`,
//! * the coefficient is recoverable from `E` alone through
//!   `4A = −2E″/E + (E′/E)² − 1/E²`.
//!
//! Integration runs an embedded Dormand–Prince 5(4) pair on the first
//! order system for `(w₁, w₁′, w₂, w₂′)` along a polyline path; derivative
//! jets come from the ODE structure (`w″ = −Aw`, differentiated once for
//! `w‴`), never from finite differences.

// operation names follow the mathematical notation
#![allow(non_snake_case)]

use crate::families::Theorem4Spec;
use crate::jet::Jet3;
use crate::num::{cx, horner, Cx, Real};
use crate::quad::{integrate_along, PathSpec, QuadError};
use std::sync::Arc;
use thiserror::Error;

/// Coefficient `A` of `w″ + A w = 0`.
#[derive(Clone)]
pub enum CoefficientModel<R: Real> {
    Constant(Cx<R>),
    /// Real coefficients, ascending powers.
    Polynomial(Vec<R>),
    /// `A = p″ − (p′)² − e^{4p}` for a real polynomial `p`.
    Elementary { p: Vec<R> },
    Custom(Arc<dyn Fn(Cx<R>) -> Cx<R> + Send + Sync>),
}

impl<R: Real> std::fmt::Debug for CoefficientModel<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoefficientModel::Constant(c) => write!(f, "Constant({c})"),
            CoefficientModel::Polynomial(p) => write!(f, "Polynomial({p:?})"),
            CoefficientModel::Elementary { p } => write!(f, "Elementary({p:?})"),
            CoefficientModel::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Ascending-power coefficients of the derivative polynomial.
fn poly_derivative<R: Real>(coeffs: &[R]) -> Vec<R> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * R::of(k as f64))
        .collect()
}

impl<R: Real> CoefficientModel<R> {
    pub fn eval(&self, z: Cx<R>) -> Cx<R> {
        match self {
            CoefficientModel::Constant(c) => *c,
            CoefficientModel::Polynomial(coeffs) => horner(coeffs, z),
            CoefficientModel::Elementary { p } => {
                let d1 = poly_derivative(p);
                let d2 = poly_derivative(&d1);
                let pd1 = horner(&d1, z);
                horner(&d2, z) - pd1 * pd1 - (horner(p, z) * R::of(4.0)).exp()
            }
            CoefficientModel::Custom(f) => f(z),
        }
    }

    /// `A′(z)`; finite differences only for the custom variant.
    pub fn eval_d1(&self, z: Cx<R>) -> Cx<R> {
        match self {
            CoefficientModel::Constant(_) => cx(R::zero(), R::zero()),
            CoefficientModel::Polynomial(coeffs) => horner(&poly_derivative(coeffs), z),
            CoefficientModel::Elementary { p } => {
                let d1 = poly_derivative(p);
                let d2 = poly_derivative(&d1);
                let d3 = poly_derivative(&d2);
                let pd1 = horner(&d1, z);
                let pd2 = horner(&d2, z);
                horner(&d3, z) - pd1 * pd2 * R::of(2.0)
                    - pd1 * R::of(4.0) * (horner(p, z) * R::of(4.0)).exp()
            }
            CoefficientModel::Custom(f) => {
                let h = R::of(1e-5) * (R::one() + z.norm());
                let hc = cx(h, R::zero());
                (f(z + hc) - f(z - hc)) / (hc * R::of(2.0))
            }
        }
    }
}

/// Function value with its first three derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JetSample<R: Real> {
    pub z: Cx<R>,
    pub value: Cx<R>,
    pub d1: Cx<R>,
    pub d2: Cx<R>,
    pub d3: Cx<R>,
}

impl<R: Real> JetSample<R> {
    pub fn from_jet(z: Cx<R>, jet: Jet3<R>) -> Self {
        JetSample { z, value: jet.f, d1: jet.d1, d2: jet.d2, d3: jet.d3 }
    }
}

/// One accepted integration step: path parameter, point, and the four
/// state components.
#[derive(Clone, Copy, Debug)]
pub struct PairSample<R: Real> {
    pub t: R,
    pub z: Cx<R>,
    pub w1: Cx<R>,
    pub w1_d: Cx<R>,
    pub w2: Cx<R>,
    pub w2_d: Cx<R>,
}

impl<R: Real> PairSample<R> {
    pub fn wronskian(&self) -> Cx<R> {
        self.w1 * self.w2_d - self.w1_d * self.w2
    }
}

/// Two solutions of the same equation integrated along one path.
#[derive(Clone, Debug)]
pub struct SolutionPair<R: Real> {
    pub path: PathSpec<R>,
    pub samples: Vec<PairSample<R>>,
    /// Wronskian at the anchor after normalization.
    pub wronskian: Cx<R>,
    coefficient: CoefficientModel<R>,
    tol: R,
}

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("adaptive step collapsed at path parameter {t}")]
    StepUnderflow { t: f64 },
    #[error("pair is not normalized: |W - 1| = {defect:e}")]
    NotNormalized { defect: f64 },
    #[error("w1 vanishes near z = {re}+{im}i")]
    PoleAt { re: f64, im: f64 },
    #[error("F' = 0 (critical point)")]
    CriticalPoint,
    #[error("E = 0 at the sample point")]
    ZeroOfE,
    #[error("initial conditions have zero Wronskian")]
    DegenerateInit,
    #[error("path must have finite length")]
    UnboundedPath,
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Initial values `(w, w′)` for the two solutions at the path start.
#[derive(Clone, Copy, Debug)]
pub struct InitPair<R: Real> {
    pub w1: (Cx<R>, Cx<R>),
    pub w2: (Cx<R>, Cx<R>),
}

impl<R: Real> InitPair<R> {
    /// `w₁ = cos`-like, `w₂ = sin`-like seed: (1,0) and (0,1).
    pub fn standard() -> Self {
        let one = cx(R::one(), R::zero());
        let zero = cx(R::zero(), R::zero());
        InitPair { w1: (one, zero), w2: (zero, one) }
    }
}

type State<R> = [Cx<R>; 4];

fn rhs<R: Real>(a: Cx<R>, dir: Cx<R>, y: &State<R>) -> State<R> {
    [y[1] * dir, -a * y[0] * dir, y[3] * dir, -a * y[2] * dir]
}

// Dormand–Prince 5(4) tableau
const DP_C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// difference between 5th and embedded 4th order weights
const DP_E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Largest parameter step between stored samples; keeps the sample grid
/// dense enough for sign-change scans downstream.
const MAX_STEP: f64 = 0.25;

struct Integrator<'a, R: Real> {
    coefficient: &'a CoefficientModel<R>,
    tol: R,
}

impl<'a, R: Real> Integrator<'a, R> {
    /// March the state from `za` to `zb` along the straight segment,
    /// appending accepted steps to `out` (parameter offset `t0`).
    fn segment(
        &self,
        mut y: State<R>,
        za: Cx<R>,
        zb: Cx<R>,
        t0: R,
        out: &mut Vec<PairSample<R>>,
    ) -> Result<(State<R>, R), OdeError> {
        let seg_len = (zb - za).norm();
        if seg_len == R::zero() {
            return Ok((y, t0));
        }
        let dir = (zb - za) / cx(seg_len, R::zero());
        let mut s = R::zero();
        let mut h = R::of(MAX_STEP).min(seg_len);
        let mut k1 = {
            let a = self.coefficient.eval(za);
            rhs(a, dir, &y)
        };
        let underflow = R::of(1e-14) * seg_len.max(R::one());
        loop {
            if s >= seg_len {
                return Ok((y, t0 + seg_len));
            }
            if h < underflow {
                return Err(OdeError::StepUnderflow {
                    t: (t0 + s).to_f64().unwrap_or(f64::NAN),
                });
            }
            h = h.min(seg_len - s);
            let mut k = [[cx(R::zero(), R::zero()); 4]; 7];
            k[0] = k1;
            for stage in 0..6 {
                let mut ys = y;
                for (j, row) in DP_A[stage].iter().enumerate().take(stage + 1) {
                    let w = R::of(*row) * h;
                    for c in 0..4 {
                        ys[c] = ys[c] + k[j][c] * w;
                    }
                }
                let zs = za + dir * (s + R::of(DP_C[stage]) * h);
                let a = self.coefficient.eval(zs);
                k[stage + 1] = rhs(a, dir, &ys);
            }
            // 5th order solution is stage row 6 (FSAL: k[6] evaluated there)
            let mut ynew = y;
            for (j, row) in DP_A[5].iter().enumerate().take(6) {
                let w = R::of(*row) * h;
                for c in 0..4 {
                    ynew[c] = ynew[c] + k[j][c] * w;
                }
            }
            let mut err = R::zero();
            for c in 0..4 {
                let mut e = cx(R::zero(), R::zero());
                for (j, de) in DP_E.iter().enumerate() {
                    e = e + k[j][c] * (R::of(*de) * h);
                }
                let scale = self.tol * (R::one() + y[c].norm().max(ynew[c].norm()));
                err = err.max(e.norm() / scale);
            }
            if err <= R::one() {
                s = s + h;
                y = ynew;
                k1 = k[6];
                let z = za + dir * s;
                out.push(PairSample {
                    t: t0 + s,
                    z,
                    w1: y[0],
                    w1_d: y[1],
                    w2: y[2],
                    w2_d: y[3],
                });
            }
            let bump = if err == R::zero() {
                R::of(5.0)
            } else {
                (R::of(0.9) * err.powf(R::of(-0.2))).min(R::of(5.0)).max(R::of(0.2))
            };
            h = (h * bump).min(R::of(MAX_STEP));
        }
    }
}

/// Integrate `w″ + A w = 0` for both initial conditions along `path`.
///
/// The returned pair is rescaled so its Wronskian is exactly 1 at the
/// anchor (the path start); initial conditions with `W = 0` are rejected.
pub fn integrate_equation<R: Real>(
    coefficient: &CoefficientModel<R>,
    path: &PathSpec<R>,
    init: InitPair<R>,
    tol: R,
) -> Result<SolutionPair<R>, OdeError> {
    let anchors = path.as_polyline().ok_or(OdeError::UnboundedPath)?;
    if anchors.len() < 2 {
        return Err(OdeError::Quad(QuadError::EmptyPath));
    }
    let w0 = init.w1.0 * init.w2.1 - init.w1.1 * init.w2.0;
    if w0.norm() == R::zero() {
        return Err(OdeError::DegenerateInit);
    }
    let scale = w0.inv();
    let mut y: State<R> = [init.w1.0, init.w1.1, init.w2.0 * scale, init.w2.1 * scale];

    let integrator = Integrator { coefficient, tol };
    let mut samples = vec![PairSample {
        t: R::zero(),
        z: anchors[0],
        w1: y[0],
        w1_d: y[1],
        w2: y[2],
        w2_d: y[3],
    }];
    let mut t = R::zero();
    for w in anchors.windows(2) {
        let (ynew, tnew) = integrator.segment(y, w[0], w[1], t, &mut samples)?;
        y = ynew;
        t = tnew;
    }
    let wronskian = samples[0].wronskian();
    Ok(SolutionPair {
        path: path.clone(),
        samples,
        wronskian,
        coefficient: coefficient.clone(),
        tol,
    })
}

impl<R: Real> SolutionPair<R> {
    pub fn coefficient(&self) -> &CoefficientModel<R> {
        &self.coefficient
    }

    pub fn tol(&self) -> R {
        self.tol
    }

    /// Total parameter length of the path.
    pub fn param_len(&self) -> R {
        self.samples.last().map(|s| s.t).unwrap_or(R::zero())
    }

    /// Point on the path at parameter `t`.
    pub fn z_at(&self, t: R) -> Cx<R> {
        let anchors = self.path.as_polyline().expect("pair paths are finite");
        let mut rest = t;
        for w in anchors.windows(2) {
            let len = (w[1] - w[0]).norm();
            if rest <= len {
                let dir = if len == R::zero() {
                    cx(R::zero(), R::zero())
                } else {
                    (w[1] - w[0]) / cx(len, R::zero())
                };
                return w[0] + dir * rest;
            }
            rest = rest - len;
        }
        *anchors.last().unwrap()
    }

    /// Exact state at parameter `t`, by re-integration from the nearest
    /// stored sample at a tighter tolerance.
    pub fn eval_param(&self, t: R) -> Result<PairSample<R>, OdeError> {
        let t = t.max(R::zero()).min(self.param_len());
        // nearest stored sample at or before t
        let idx = match self
            .samples
            .binary_search_by(|s| s.t.partial_cmp(&t).expect("ordered parameters"))
        {
            Ok(i) => return Ok(self.samples[i]),
            Err(i) => i.saturating_sub(1),
        };
        let base = self.samples[idx];
        let anchors = self.path.as_polyline().expect("pair paths are finite");
        let integrator = Integrator {
            coefficient: &self.coefficient,
            tol: self.tol * R::of(0.1),
        };
        // walk the remaining anchors from the base sample to t
        let mut y: State<R> = [base.w1, base.w1_d, base.w2, base.w2_d];
        let mut done = R::zero();
        let mut cur = base.t;
        let mut scratch = Vec::new();
        for w in anchors.windows(2) {
            let len = (w[1] - w[0]).norm();
            let seg_start = done;
            let seg_end = done + len;
            done = seg_end;
            if seg_end <= cur || len == R::zero() {
                continue;
            }
            let dir = (w[1] - w[0]) / cx(len, R::zero());
            let from = w[0] + dir * (cur - seg_start);
            let to = if t <= seg_end { w[0] + dir * (t - seg_start) } else { w[1] };
            let (ynew, _) = integrator.segment(y, from, to, cur, &mut scratch)?;
            y = ynew;
            cur = if t <= seg_end { t } else { seg_end };
            if cur >= t {
                break;
            }
        }
        Ok(PairSample {
            t,
            z: self.z_at(t),
            w1: y[0],
            w1_d: y[1],
            w2: y[2],
            w2_d: y[3],
        })
    }

    /// Largest Wronskian deviation from the anchor value over all samples.
    pub fn wronskian_drift(&self) -> R {
        let w0 = self.wronskian;
        self.samples
            .iter()
            .map(|s| (s.wronskian() - w0).norm())
            .fold(R::zero(), |a, b| a.max(b))
    }
}

/// Jets of `E = w₁w₂` at one integrated state.
///
/// `E″ = 2w₁′w₂′ − 2AE` and `E‴ = −4AE′ − 2A′E` follow from the ODE.
pub fn e_jet_at<R: Real>(coefficient: &CoefficientModel<R>, s: &PairSample<R>) -> JetSample<R> {
    let e = s.w1 * s.w2;
    let e1 = s.w1 * s.w2_d + s.w1_d * s.w2;
    let a = coefficient.eval(s.z);
    let a1 = coefficient.eval_d1(s.z);
    let e2 = s.w1_d * s.w2_d * R::of(2.0) - a * e * R::of(2.0);
    let e3 = -a * e1 * R::of(4.0) - a1 * e * R::of(2.0);
    JetSample { z: s.z, value: e, d1: e1, d2: e2, d3: e3 }
}

/// `E = w₁w₂` with jets at every stored sample.
///
/// The pair must be normalized; the defect tolerance is `100 ·` the pair's
/// integration tolerance.
pub fn product_E<R: Real>(pair: &SolutionPair<R>) -> Result<Vec<JetSample<R>>, OdeError> {
    let defect = (pair.wronskian - cx(R::one(), R::zero())).norm();
    if defect > R::of(100.0) * pair.tol {
        return Err(OdeError::NotNormalized {
            defect: defect.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(pair
        .samples
        .iter()
        .map(|s| e_jet_at(&pair.coefficient, s))
        .collect())
}

/// Jets of `F = w₂/w₁` at one integrated state.
///
/// `F′ = W/w₁²`, `F″ = −2Ww₁′/w₁³`, `F‴ = 2WA/w₁² + 6Ww₁′²/w₁⁴`.
pub fn f_jet_at<R: Real>(
    coefficient: &CoefficientModel<R>,
    s: &PairSample<R>,
) -> Result<JetSample<R>, OdeError> {
    // refuse inside the Newton basin of a zero of w1
    let newton = s.w1.norm() / s.w1_d.norm().max(R::one());
    if s.w1.norm() == R::zero() || newton < R::of(1e-8) {
        return Err(OdeError::PoleAt {
            re: s.z.re.to_f64().unwrap_or(f64::NAN),
            im: s.z.im.to_f64().unwrap_or(f64::NAN),
        });
    }
    let w = s.wronskian();
    let w1sq = s.w1 * s.w1;
    let a = coefficient.eval(s.z);
    let f = s.w2 / s.w1;
    let f1 = w / w1sq;
    let f2 = -w * s.w1_d * R::of(2.0) / (w1sq * s.w1);
    let f3 = w * a * R::of(2.0) / w1sq + w * s.w1_d * s.w1_d * R::of(6.0) / (w1sq * w1sq);
    Ok(JetSample { z: s.z, value: f, d1: f1, d2: f2, d3: f3 })
}

/// Jets of `F = w₂/w₁` at the requested path parameters.
pub fn ratio_F<R: Real>(
    pair: &SolutionPair<R>,
    params: &[R],
) -> Result<Vec<JetSample<R>>, OdeError> {
    params
        .iter()
        .map(|&t| {
            let s = pair.eval_param(t)?;
            f_jet_at(&pair.coefficient, &s)
        })
        .collect()
}

/// `E = F/F′` from the jets of a locally injective `F`.
pub fn bank_laine_E_from_F<R: Real>(f: &JetSample<R>) -> Result<Cx<R>, OdeError> {
    if f.d1.norm() == R::zero() {
        return Err(OdeError::CriticalPoint);
    }
    Ok(f.value / f.d1)
}

/// `A = (−2E″/E + (E′/E)² − 1/E²) / 4` from the jets of `E`.
pub fn coefficient_from_E<R: Real>(e: &JetSample<R>) -> Result<Cx<R>, OdeError> {
    if e.value.norm() == R::zero() {
        return Err(OdeError::ZeroOfE);
    }
    let le = e.d1 / e.value;
    let quarter = R::of(0.25);
    Ok((le * le - e.d2 / e.value * R::of(2.0) - (e.value * e.value).inv()) * quarter)
}

/// Schwarzian derivative `S(F) = F‴/F′ − (3/2)(F″/F′)²`.
pub fn schwarzian<R: Real>(f: &JetSample<R>) -> Result<Cx<R>, OdeError> {
    if f.d1.norm() == R::zero() {
        return Err(OdeError::CriticalPoint);
    }
    let ratio = f.d2 / f.d1;
    Ok(f.d3 / f.d1 - ratio * ratio * R::of(1.5))
}

/// The elementary Bank–Laine family attached to a real polynomial `p`:
/// coefficient `A = p″ − (p′)² − e^{4p}`, solutions
/// `w₁,₂ = (1/√2) exp(−p ∓ ∫₀^z e^{2p})`, product `E = (1/2) e^{−2p}`.
#[derive(Clone, Debug)]
pub struct ElementaryFamily<R: Real> {
    pub p: Vec<R>,
}

/// Build the elementary family for `p` (ascending real coefficients).
pub fn elementary_family<R: Real>(p: &[R]) -> ElementaryFamily<R> {
    ElementaryFamily { p: p.to_vec() }
}

impl<R: Real> ElementaryFamily<R> {
    pub fn coefficient(&self) -> CoefficientModel<R> {
        CoefficientModel::Elementary { p: self.p.clone() }
    }

    /// Jet of `p` at `z`.
    fn p_jet(&self, z: Cx<R>) -> Jet3<R> {
        Jet3::poly(z, &self.p)
    }

    /// `E(z) = (1/2) e^{−2p(z)}` with jets.
    pub fn E_jet(&self, z: Cx<R>) -> JetSample<R> {
        let jet = (self.p_jet(z) * R::of(-2.0)).exp() * R::of(0.5);
        JetSample::from_jet(z, jet)
    }

    /// `log|E(z)| = −2 Re p(z) − log 2`, safe where `e^{−2p}` overflows.
    pub fn log_abs_E(&self, z: Cx<R>) -> R {
        -R::of(2.0) * horner(&self.p, z).re - R::of(2.0).ln()
    }

    /// Closed-form solution values at `z`: quadrature of `e^{2p}` from 0.
    pub fn solutions_at(&self, z: Cx<R>, tol: R) -> Result<PairSample<R>, OdeError> {
        let path = PathSpec::segment(cx(R::zero(), R::zero()), z);
        let int = integrate_along(
            |t: Cx<R>| (horner(&self.p, t) * R::of(2.0)).exp(),
            &path,
            tol,
        )?;
        let pj = self.p_jet(z);
        let e2p = (pj.f * R::of(2.0)).exp();
        let half_sqrt = cx(R::of(0.5).sqrt(), R::zero());
        let w1 = half_sqrt * (-pj.f - int.value).exp();
        let w2 = half_sqrt * (-pj.f + int.value).exp();
        let w1_d = (-pj.d1 - e2p) * w1;
        let w2_d = (-pj.d1 + e2p) * w2;
        Ok(PairSample { t: R::zero(), z, w1, w1_d, w2, w2_d })
    }
}

/// Exceptional constant-Schwarzian quotients
/// `F = L((1 − e^{i(a₁z−b₁)}) / (1 − e^{i(a₂z−b₂)}))`.
#[derive(Clone, Debug)]
pub struct Theorem4Family<R: Real> {
    spec: Theorem4Spec<R>,
}

/// Build the family; parameters are validated once here.
pub fn theorem4_family<R: Real>(
    spec: &Theorem4Spec<R>,
) -> Result<Theorem4Family<R>, crate::families::FamilyError> {
    crate::families::FamilyInstance::Theorem4F(spec.clone()).validate()?;
    Ok(Theorem4Family { spec: spec.clone() })
}

impl<R: Real> Theorem4Family<R> {
    /// Jets of `F` at `z`; fails on zeros of the denominator or of `L`'s.
    pub fn jet(&self, z: Cx<R>) -> Result<JetSample<R>, OdeError> {
        let s = &self.spec;
        let one = Jet3::constant(cx(R::one(), R::zero()));
        let exp_term = |a: R, b: R| {
            // jet of exp(i(az - b)) at z
            let ia = Cx::<R>::i() * a;
            Jet3::new(Cx::<R>::i() * (z * a - cx(b, R::zero())), ia, cx(R::zero(), R::zero()), cx(R::zero(), R::zero()))
                .exp()
        };
        let num = one - exp_term(s.a1, s.b1);
        let den = one - exp_term(s.a2, s.b2);
        let pole = |w: Cx<R>| OdeError::PoleAt {
            re: w.re.to_f64().unwrap_or(f64::NAN),
            im: w.im.to_f64().unwrap_or(f64::NAN),
        };
        if den.f.norm() < R::of(1e-12) {
            return Err(pole(z));
        }
        let u = num / den;
        let l_num = u * s.l[0] + Jet3::constant(cx(s.l[1], R::zero()));
        let l_den = u * s.l[2] + Jet3::constant(cx(s.l[3], R::zero()));
        if l_den.f.norm() < R::of(1e-12) {
            return Err(pole(z));
        }
        Ok(JetSample::from_jet(z, l_num / l_den))
    }
}

/// Jets of `tan z`, the ratio of the normalized pair `(cos, sin)`.
pub fn tan_jets<R: Real>(z: Cx<R>) -> JetSample<R> {
    let v = Jet3::variable(z);
    JetSample::from_jet(z, v.sin() / v.cos())
}

/// Jets of `E = sin z cos z = (1/2) sin 2z`, the Bank–Laine function of
/// the pair `(cos, sin)`.
pub fn sincos_E_jets<R: Real>(z: Cx<R>) -> JetSample<R> {
    let two_z = Jet3::variable(z) * R::of(2.0);
    JetSample::from_jet(z, two_z.sin() * R::of(0.5))
}
