//! Growth measurements for entire functions: real zeros with the Bank-Laine
//! derivative check, argument-principle zero counts, the order rho, the
//! exponent of convergence lambda, indicator diagrams, and the table tying
//! the singularity count m to the predicted (rho, lambda).
//!
//! Estimators work at desk scale from finitely many samples and are judged
//! against families with known closed forms. Moduli are consumed in log
//! scale throughout, so a function of order two stays usable at radius 50
//! where its modulus would overflow by thousands of binary orders.

#![allow(non_snake_case)] // operation names follow the mathematical notation

use crate::num::{cx, Cx, Real};
use crate::quad::{integrate_along, PathSpec, QuadError};
use thiserror::Error;

/// Real zeros found in an interval, with the Bank-Laine derivative check.
#[derive(Debug, Clone)]
pub struct ZeroList<R: Real> {
    /// Zero locations, strictly increasing.
    pub zeros: Vec<R>,
    /// Signed derivative at each zero.
    pub e_prime: Vec<R>,
    /// `| |E'| - 1 |` at each zero; small iff the Bank-Laine property holds.
    pub residuals: Vec<R>,
    /// Interval that was searched.
    pub interval: (R, R),
    /// Declared minimum separation between reported zeros.
    pub sep_floor: R,
}

impl<R: Real> ZeroList<R> {
    /// List with prescribed locations and no derivative data, for feeding
    /// the lambda estimator with zero sets that come from a formula rather
    /// than a search.
    pub fn synthetic(zeros: Vec<R>) -> Self {
        let n = zeros.len();
        let lo = zeros.first().copied().unwrap_or(R::zero());
        let hi = zeros.last().copied().unwrap_or(R::zero());
        ZeroList {
            zeros,
            e_prime: vec![R::zero(); n],
            residuals: vec![R::zero(); n],
            interval: (lo, hi),
            sep_floor: R::zero(),
        }
    }
}

/// Result of a log-log regression for the order or the convergence exponent.
#[derive(Debug, Clone, Copy)]
pub struct GrowthEstimate<R: Real> {
    pub rho_hat: R,
    /// Root-mean-square deviation of the fitted line.
    pub residual: R,
    /// Radii actually used by the fit.
    pub r_range: (R, R),
}

/// Indicator templates from the classification theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndicatorTemplate {
    /// `c cos(rho theta)`: no real zeros.
    CosRho,
    /// `c sin(rho |theta|)`: zeros on the positive real axis.
    SinRhoAbs,
    /// `c sin(rho (pi - |theta|))`: zeros on the negative real axis.
    SinRhoAbsFromPi,
}

impl IndicatorTemplate {
    /// Template value with unit amplitude.
    pub fn eval<R: Real>(self, rho: R, theta: R) -> R {
        match self {
            IndicatorTemplate::CosRho => (rho * theta).cos(),
            IndicatorTemplate::SinRhoAbs => (rho * theta.abs()).sin(),
            IndicatorTemplate::SinRhoAbsFromPi => (rho * (R::PI() - theta.abs())).sin(),
        }
    }

    /// Stable name used in reports and CSV headers.
    pub fn tag(self) -> &'static str {
        match self {
            IndicatorTemplate::CosRho => "cos_rho_theta",
            IndicatorTemplate::SinRhoAbs => "sin_rho_abs_theta",
            IndicatorTemplate::SinRhoAbsFromPi => "sin_rho_abs_theta_from_pi",
        }
    }
}

/// Sampled indicator function h(theta) = lim sup log|f(r e^{i theta})| / r^rho.
#[derive(Debug, Clone)]
pub struct IndicatorSample<R: Real> {
    /// Sorted grid in [-pi, pi].
    pub thetas: Vec<R>,
    /// Indicator values; finite at every grid point.
    pub h: Vec<R>,
    /// Order used to normalize.
    pub rho: R,
    /// Fitted amplitude of the best template.
    pub c: R,
    pub template: IndicatorTemplate,
    /// Sup deviation of h from the fitted template.
    pub sup_residual: R,
    /// Raised when the top ladder rungs disagree by more than 0.1, meaning
    /// the radii are too small for the limit to have set in.
    pub low_confidence: bool,
}

/// Which of the three cases of the classification theorem a function is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    I,
    II,
    III,
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Case::I => write!(f, "i"),
            Case::II => write!(f, "ii"),
            Case::III => write!(f, "iii"),
        }
    }
}

/// Predicted growth data for a case of the classification theorem.
#[derive(Debug, Clone, Copy)]
pub struct ClassificationResult<R: Real> {
    pub case: Case,
    /// Number of singular values over C*.
    pub m: u32,
    pub rho: R,
    /// Exponent of convergence of the zeros; none when there are no zeros.
    pub lambda: Option<R>,
    pub template: IndicatorTemplate,
}

/// Direction of a real-axis ray.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayDirection {
    Positive,
    Negative,
}

/// Diagnostic for `|E(x)| = O(x)` along a real ray.
#[derive(Debug, Clone)]
pub struct BoundedRatioReport<R: Real> {
    /// `|E(x)/x|` at each ladder point.
    pub ratios: Vec<R>,
    pub max_ratio: R,
    /// The top half of the ladder exceeds the bottom half, so the finite
    /// ladder gives no evidence of boundedness.
    pub tail_growing: bool,
}

#[derive(Debug, Error)]
pub enum GrowthError {
    #[error("zero candidates {x0} and {x1} are closer than the separation floor")]
    ClusteringDetected { x0: f64, x1: f64 },
    #[error("rectangle boundary passes within {min_mod:e} of a zero; shift it")]
    BoundaryZero { min_mod: f64 },
    #[error("log-modulus is not finite at radius {r:e}; shrink the ladder")]
    Overflow { r: f64 },
    #[error("need at least 30 zeros for a stable fit, got {found}")]
    TooFewZeros { found: usize },
    #[error("case {case} does not admit m = {m}")]
    InvalidM { case: Case, m: u32 },
    #[error("hypothesis ({clause}) fails on the samples")]
    HypothesisViolated { clause: char },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

fn lossy<R: Real>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Slope, intercept and rms residual of a least-squares line through `pts`.
fn ls_line<R: Real>(pts: &[(R, R)]) -> (R, R, R) {
    let n = R::of(pts.len() as f64);
    let mut sx = R::zero();
    let mut sy = R::zero();
    for &(x, y) in pts {
        sx = sx + x;
        sy = sy + y;
    }
    let mx = sx / n;
    let my = sy / n;
    let mut sxx = R::zero();
    let mut sxy = R::zero();
    for &(x, y) in pts {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
    }
    let slope = if sxx > R::zero() { sxy / sxx } else { R::zero() };
    let icpt = my - slope * mx;
    let mut ss = R::zero();
    for &(x, y) in pts {
        let d = y - (slope * x + icpt);
        ss = ss + d * d;
    }
    (slope, icpt, (ss / n).sqrt())
}

/// Locate the real zeros of E in an interval and report the Bank-Laine
/// derivative residuals. The callable returns `(E(x), E'(x))`.
///
/// The interval is scanned on a uniform grid of step `sep_floor / 2`; each
/// sign change is polished by Newton iteration guarded by the bracket, so a
/// simple zero cannot escape. Two candidates closer than `sep_floor` abort
/// with `ClusteringDetected` rather than silently merging.
pub fn find_real_zeros<R: Real, F>(
    e: F,
    interval: (R, R),
    sep_floor: R,
) -> Result<ZeroList<R>, GrowthError>
where
    F: Fn(R) -> (R, R),
{
    let (a, b) = interval;
    assert!(b > a, "interval must be nonempty");
    assert!(sep_floor > R::zero(), "separation floor must be positive");

    let cells = ((b - a) / (sep_floor / R::of(2.0)))
        .ceil()
        .to_f64()
        .unwrap_or(2.0)
        .max(2.0) as usize;
    let step = (b - a) / R::of(cells as f64);

    let mut roots: Vec<R> = Vec::new();
    let mut prev_x = a;
    let mut prev_v = e(a).0;
    for k in 1..=cells {
        let x = if k == cells { b } else { a + step * R::of(k as f64) };
        let v = e(x).0;
        if prev_v == R::zero() {
            roots.push(prev_x);
        } else if v != R::zero() && prev_v * v < R::zero() {
            roots.push(refine_zero(&e, prev_x, x, prev_v));
        }
        prev_x = x;
        prev_v = v;
    }
    if prev_v == R::zero() {
        roots.push(prev_x);
    }

    // The same root can surface twice when it sits on a grid node; anything
    // separated by a few ulps is one zero.
    roots.sort_by(|p, q| p.partial_cmp(q).unwrap());
    roots.dedup_by(|p, q| (*p - *q).abs() <= R::epsilon() * R::of(64.0) * (R::one() + p.abs()));

    for w in roots.windows(2) {
        if w[1] - w[0] < sep_floor {
            return Err(GrowthError::ClusteringDetected {
                x0: lossy(w[0]),
                x1: lossy(w[1]),
            });
        }
    }

    let mut e_prime = Vec::with_capacity(roots.len());
    let mut residuals = Vec::with_capacity(roots.len());
    for &x in &roots {
        let (_, d) = e(x);
        e_prime.push(d);
        residuals.push((d.abs() - R::one()).abs());
    }
    Ok(ZeroList {
        zeros: roots,
        e_prime,
        residuals,
        interval,
        sep_floor,
    })
}

/// Newton polish inside a bracket with a bisection fallback.
fn refine_zero<R: Real, F>(e: &F, mut lo: R, mut hi: R, v_lo: R) -> R
where
    F: Fn(R) -> (R, R),
{
    let sign_lo = v_lo > R::zero();
    let mut x = (lo + hi) / R::of(2.0);
    for _ in 0..80 {
        let (v, d) = e(x);
        if v == R::zero() {
            return x;
        }
        if (v > R::zero()) == sign_lo {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = if d != R::zero() { x - v / d } else { x };
        if !(next > lo && next < hi) {
            next = (lo + hi) / R::of(2.0);
        }
        if (next - x).abs() <= R::epsilon() * (R::one() + x.abs()) {
            return next;
        }
        x = next;
    }
    x
}

/// Count zeros of an analytic function inside an axis-parallel rectangle by
/// the total phase change of f along the boundary.
///
/// Consecutive boundary samples are refined until each phase increment is
/// below pi/2, which pins the winding number; `tol` scales the minimum
/// boundary modulus below which the count is refused as unreliable.
pub fn count_zeros_argument_principle<R: Real, F>(
    f: F,
    corners: (Cx<R>, Cx<R>),
    tol: R,
) -> Result<i64, GrowthError>
where
    F: Fn(Cx<R>) -> Cx<R>,
{
    let x0 = corners.0.re.min(corners.1.re);
    let x1 = corners.0.re.max(corners.1.re);
    let y0 = corners.0.im.min(corners.1.im);
    let y1 = corners.0.im.max(corners.1.im);
    assert!(x1 > x0 && y1 > y0, "rectangle must have positive area");

    let verts = [
        cx(x0, y0),
        cx(x1, y0),
        cx(x1, y1),
        cx(x0, y1),
        cx(x0, y0),
    ];

    let mut total = R::zero();
    let mut min_mod = R::infinity();
    let mut max_mod = R::zero();
    for w in verts.windows(2) {
        let (za, zb) = (w[0], w[1]);
        let n0 = 16;
        let mut prev_z = za;
        let mut prev_f = f(za);
        observe(prev_f, &mut min_mod, &mut max_mod)?;
        for k in 1..=n0 {
            let t = R::of(k as f64) / R::of(n0 as f64);
            let z = za + (zb - za) * t;
            let fz = f(z);
            observe(fz, &mut min_mod, &mut max_mod)?;
            total = total
                + phase_walk(&f, prev_z, z, prev_f, fz, 48, &mut min_mod, &mut max_mod)?;
            prev_z = z;
            prev_f = fz;
        }
    }

    if min_mod < tol * max_mod {
        return Err(GrowthError::BoundaryZero {
            min_mod: lossy(min_mod),
        });
    }

    let turns = total / (R::of(2.0) * R::PI());
    let count = turns.round();
    if (turns - count).abs() > R::of(0.25) {
        // Phase bookkeeping failed to close up; a zero must be hugging the
        // boundary below the sampling resolution.
        return Err(GrowthError::BoundaryZero {
            min_mod: lossy(min_mod),
        });
    }
    Ok(count.to_f64().unwrap_or(0.0) as i64)
}

fn observe<R: Real>(fz: Cx<R>, min_mod: &mut R, max_mod: &mut R) -> Result<(), GrowthError> {
    let m = fz.norm();
    if !m.is_finite() {
        return Err(GrowthError::Overflow { r: f64::NAN });
    }
    if m < *min_mod {
        *min_mod = m;
    }
    if m > *max_mod {
        *max_mod = m;
    }
    Ok(())
}

/// Phase increment of f from za to zb, subdividing until below pi/2.
#[allow(clippy::too_many_arguments)]
fn phase_walk<R: Real, F>(
    f: &F,
    za: Cx<R>,
    zb: Cx<R>,
    fa: Cx<R>,
    fb: Cx<R>,
    depth: u32,
    min_mod: &mut R,
    max_mod: &mut R,
) -> Result<R, GrowthError>
where
    F: Fn(Cx<R>) -> Cx<R>,
{
    let d = (fb * fa.conj()).arg();
    if d.abs() < R::FRAC_PI_2() {
        return Ok(d);
    }
    if depth == 0 {
        return Err(GrowthError::BoundaryZero {
            min_mod: lossy(*min_mod),
        });
    }
    let zm = (za + zb) / R::of(2.0);
    let fm = f(zm);
    observe(fm, min_mod, max_mod)?;
    let left = phase_walk(f, za, zm, fa, fm, depth - 1, min_mod, max_mod)?;
    let right = phase_walk(f, zm, zb, fm, fb, depth - 1, min_mod, max_mod)?;
    Ok(left + right)
}

/// Maximum of `log_abs_f` on the circle of radius r: 256 equi-angular
/// samples, then golden-section refinement around the three best.
fn circle_log_max<R: Real, F>(log_abs_f: &F, r: R) -> R
where
    F: Fn(Cx<R>) -> R,
{
    const N: usize = 256;
    let two_pi = R::PI() * R::of(2.0);
    let at = |theta: R| log_abs_f(Cx::from_polar(r, theta));

    let mut vals = [R::neg_infinity(); N];
    for (k, v) in vals.iter_mut().enumerate() {
        let theta = -R::PI() + two_pi * R::of(k as f64) / R::of(N as f64);
        *v = at(theta);
    }

    let mut top = [(R::neg_infinity(), 0usize); 3];
    for (k, &v) in vals.iter().enumerate() {
        if v > top[0].0 {
            top = [(v, k), top[0], top[1]];
        } else if v > top[1].0 {
            top = [top[0], (v, k), top[1]];
        } else if v > top[2].0 {
            top[2] = (v, k);
        }
    }

    let dtheta = two_pi / R::of(N as f64);
    let mut best = top[0].0;
    for &(v, k) in &top {
        if !v.is_finite() && v < R::zero() {
            continue;
        }
        let center = -R::PI() + dtheta * R::of(k as f64);
        let refined = golden_max(&at, center - dtheta, center + dtheta);
        if refined > best {
            best = refined;
        }
    }
    best
}

/// Golden-section maximization of a unimodal-enough function on [lo, hi].
fn golden_max<R: Real, G>(g: &G, mut lo: R, mut hi: R) -> R
where
    G: Fn(R) -> R,
{
    let phi = (R::of(5.0).sqrt() - R::one()) / R::of(2.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    for _ in 0..48 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = g(x1);
        }
    }
    f1.max(f2)
}

/// Estimate the order of an entire function from its log-modulus.
///
/// `log_abs_f` must return `log|f(z)|`; callers with closed-form moduli
/// (exponentials of polynomials, products of sines) supply the stable
/// expression directly, which is what keeps radius-50 fits in range.
/// The slope is fitted on `log log M(r)` vs `log r` over the top half of
/// the ladder only, suppressing low-r transients.
pub fn estimate_order<R: Real, F>(
    log_abs_f: F,
    r_ladder: &[R],
) -> Result<GrowthEstimate<R>, GrowthError>
where
    F: Fn(Cx<R>) -> R,
{
    assert!(r_ladder.len() >= 8, "need at least 8 ladder rungs");
    assert!(
        r_ladder.windows(2).all(|w| w[1] > w[0]),
        "ladder must increase"
    );

    let mut log_max = Vec::with_capacity(r_ladder.len());
    for &r in r_ladder {
        let m = circle_log_max(&log_abs_f, r);
        // -inf only says f is tiny on the whole circle; +inf or NaN means
        // the modulus left the representable range.
        if m.is_nan() || (m.is_infinite() && m > R::zero()) {
            return Err(GrowthError::Overflow { r: lossy(r) });
        }
        log_max.push(m);
    }

    let half = r_ladder.len() / 2;
    let pts: Vec<(R, R)> = r_ladder[half..]
        .iter()
        .zip(&log_max[half..])
        .filter(|(_, &m)| m > R::zero())
        .map(|(&r, &m)| (r.ln(), m.ln()))
        .collect();
    let r_range = (r_ladder[half], r_ladder[r_ladder.len() - 1]);
    if pts.len() < 2 {
        // log M never exceeds 1 on the fitted rungs: bounded on these
        // circles, indistinguishable from order zero.
        return Ok(GrowthEstimate {
            rho_hat: R::zero(),
            residual: R::zero(),
            r_range,
        });
    }
    let (slope, _, residual) = ls_line(&pts);
    Ok(GrowthEstimate {
        rho_hat: slope.max(R::zero()),
        residual,
        r_range,
    })
}

/// Estimate the exponent of convergence of a zero set from the counting
/// function: the slope of `log n(r)` vs `log r` over the top half of the
/// zeros by modulus.
pub fn estimate_lambda<R: Real>(zeros: &ZeroList<R>) -> Result<GrowthEstimate<R>, GrowthError> {
    let mut radii: Vec<R> = zeros.zeros.iter().map(|x| x.abs()).collect();
    radii.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let n = radii.len();
    if n == 0 {
        return Ok(GrowthEstimate {
            rho_hat: R::zero(),
            residual: R::zero(),
            r_range: (R::zero(), R::zero()),
        });
    }
    if n < 30 {
        return Err(GrowthError::TooFewZeros { found: n });
    }
    let half = n / 2;
    let pts: Vec<(R, R)> = (half..n)
        .filter(|&k| radii[k] > R::zero())
        .map(|k| (radii[k].ln(), R::of((k + 1) as f64).ln()))
        .collect();
    let (slope, _, residual) = ls_line(&pts);
    Ok(GrowthEstimate {
        rho_hat: slope.max(R::zero()),
        residual,
        r_range: (radii[half], radii[n - 1]),
    })
}

fn median3<R: Real>(a: R, b: R, c: R) -> R {
    a.max(b).min(a.min(b).max(c))
}

/// Sample the indicator function `h(theta) = log|f(r e^{i theta})| / r^rho`
/// on a theta grid, taking the median over the top three ladder rungs.
///
/// Samples falling inside the exceptional window `|f| < exp(-r^rho)` sit in
/// a zero's shadow rather than on the growth envelope; each is replaced by
/// the maximum over the two neighbouring grid angles on either side at the
/// same radius. A fitted template amplitude c is reported together with the
/// sup deviation, and the low-confidence flag is raised when the three rungs
/// disagree by more than 0.1 anywhere.
pub fn estimate_indicator<R: Real, F>(
    log_abs_f: F,
    rho: R,
    thetas: &[R],
    r_ladder: &[R],
) -> IndicatorSample<R>
where
    F: Fn(Cx<R>) -> R,
{
    assert!(rho > R::zero(), "rho must be positive");
    assert!(r_ladder.len() >= 3, "need at least 3 ladder rungs");
    assert!(
        thetas.windows(2).all(|w| w[1] > w[0]),
        "theta grid must increase"
    );
    let slack = R::PI() + R::of(1e-9);
    assert!(
        thetas.iter().all(|t| t.abs() <= slack),
        "theta grid must lie in [-pi, pi]"
    );

    let nt = thetas.len();
    let top = &r_ladder[r_ladder.len() - 3..];
    let mut rows: Vec<Vec<R>> = Vec::with_capacity(3);
    for &r in top {
        let scale = r.powf(rho);
        let raw: Vec<R> = thetas
            .iter()
            .map(|&t| log_abs_f(Cx::from_polar(r, t)) / scale)
            .collect();
        let mut row = raw.clone();
        for i in 0..nt {
            if !(raw[i] >= -R::one()) {
                let lo = i.saturating_sub(2);
                let hi = (i + 2).min(nt - 1);
                let mut best = raw[i];
                for &v in &raw[lo..=hi] {
                    if v > best {
                        best = v;
                    }
                }
                // A zero's shadow is an isolated outlier, many log-units
                // below its neighbours; smooth decay varies only by
                // O(rho grid-step) across the window. Replace outliers by
                // the neighbourhood maximum, keep honest decay samples.
                row[i] = if best.is_finite() && best >= raw[i] + R::one() {
                    best
                } else if raw[i].is_finite() {
                    raw[i]
                } else {
                    -R::one()
                };
            }
        }
        rows.push(row);
    }

    let mut h = Vec::with_capacity(nt);
    let mut spread = R::zero();
    for i in 0..nt {
        let (a, b, c) = (rows[0][i], rows[1][i], rows[2][i]);
        h.push(median3(a, b, c));
        let s = a.max(b).max(c) - a.min(b).min(c);
        if s > spread {
            spread = s;
        }
    }

    let mut best = (IndicatorTemplate::CosRho, R::zero(), R::infinity());
    for template in [
        IndicatorTemplate::CosRho,
        IndicatorTemplate::SinRhoAbs,
        IndicatorTemplate::SinRhoAbsFromPi,
    ] {
        let t: Vec<R> = thetas.iter().map(|&th| template.eval(rho, th)).collect();
        let mut num = R::zero();
        let mut den = R::zero();
        for (hi, ti) in h.iter().zip(&t) {
            num = num + *hi * *ti;
            den = den + *ti * *ti;
        }
        let c = if den > R::zero() { num / den } else { R::zero() };
        let mut sup = R::zero();
        for (hi, ti) in h.iter().zip(&t) {
            let d = (*hi - c * *ti).abs();
            if d > sup {
                sup = d;
            }
        }
        if sup < best.2 {
            best = (template, c, sup);
        }
    }

    IndicatorSample {
        thetas: thetas.to_vec(),
        h,
        rho,
        c: best.1,
        template: best.0,
        sup_residual: best.2,
        low_confidence: spread > R::of(0.1),
    }
}

/// Indicator of the coefficient A from the indicator of E:
/// `h_A = 2 max(-h_E, 0)` pointwise, with the template refitted.
pub fn indicator_of_A_from_E<R: Real>(h_e: &IndicatorSample<R>) -> IndicatorSample<R> {
    let h: Vec<R> = h_e
        .h
        .iter()
        .map(|&v| R::of(2.0) * (-v).max(R::zero()))
        .collect();

    let mut best = (IndicatorTemplate::CosRho, R::zero(), R::infinity());
    for template in [
        IndicatorTemplate::CosRho,
        IndicatorTemplate::SinRhoAbs,
        IndicatorTemplate::SinRhoAbsFromPi,
    ] {
        let t: Vec<R> = h_e
            .thetas
            .iter()
            .map(|&th| template.eval(h_e.rho, th))
            .collect();
        let mut num = R::zero();
        let mut den = R::zero();
        for (hi, ti) in h.iter().zip(&t) {
            num = num + *hi * *ti;
            den = den + *ti * *ti;
        }
        let c = if den > R::zero() { num / den } else { R::zero() };
        let mut sup = R::zero();
        for (hi, ti) in h.iter().zip(&t) {
            let d = (*hi - c * *ti).abs();
            if d > sup {
                sup = d;
            }
        }
        if sup < best.2 {
            best = (template, c, sup);
        }
    }

    IndicatorSample {
        thetas: h_e.thetas.clone(),
        h,
        rho: h_e.rho,
        c: best.1,
        template: best.0,
        sup_residual: best.2,
        low_confidence: h_e.low_confidence,
    }
}

/// Diagnostic for `limsup |E(x)| / |x| < infinity` along a real ray.
/// Not falsifiable from a finite ladder, so no pass/fail: the report gives
/// the observed maximum and whether the tail is still growing.
pub fn check_bounded_ratio<R: Real, F>(
    e: F,
    direction: RayDirection,
    ladder: &[R],
) -> BoundedRatioReport<R>
where
    F: Fn(R) -> R,
{
    assert!(!ladder.is_empty(), "ladder must be nonempty");
    let sign = match direction {
        RayDirection::Positive => R::one(),
        RayDirection::Negative => -R::one(),
    };
    let ratios: Vec<R> = ladder
        .iter()
        .map(|&x| (e(sign * x) / x).abs())
        .collect();
    let max_ratio = ratios.iter().copied().fold(R::zero(), R::max);
    let half = ratios.len() / 2;
    let lo_max = ratios[..half.max(1)].iter().copied().fold(R::zero(), R::max);
    let hi_max = ratios[half..].iter().copied().fold(R::zero(), R::max);
    BoundedRatioReport {
        ratios,
        max_ratio,
        tail_growing: hi_max > lo_max,
    }
}

/// Endpoint derivative from a parabola through three samples.
fn parabola_d1<R: Real>(x: [R; 3], f: [R; 3], at: R) -> R {
    let two = R::of(2.0);
    f[0] * (two * at - x[1] - x[2]) / ((x[0] - x[1]) * (x[0] - x[2]))
        + f[1] * (two * at - x[0] - x[2]) / ((x[1] - x[0]) * (x[1] - x[2]))
        + f[2] * (two * at - x[0] - x[1]) / ((x[2] - x[0]) * (x[2] - x[1]))
}

/// Verify the sampled hypotheses of the chord lemma and test its bound
/// `|f(x)| > min(x - a, b - x) / 20` at every interior sample.
///
/// The clauses are checked in order on the samples: (a) f vanishes at both
/// ends, (b) the endpoint slopes have equal modulus at least 1, (c) f' has
/// exactly one interior sign change, (d) f'' changes sign at most once on
/// each side of the critical point, (e) f'' has no non-negative local
/// minimum and no non-positive local maximum. The first failure aborts with
/// `HypothesisViolated` naming the clause.
pub fn c2_lemma_check<R: Real>(xs: &[R], fs: &[R]) -> Result<bool, GrowthError> {
    let n = xs.len();
    assert!(n >= 16, "need at least 16 samples");
    assert_eq!(n, fs.len(), "sample arrays must align");
    assert!(
        xs.windows(2).all(|w| w[1] > w[0]),
        "abscissae must increase"
    );

    let scale = fs.iter().fold(R::zero(), |m, v| m.max(v.abs()));
    if scale == R::zero() {
        return Err(GrowthError::HypothesisViolated { clause: 'b' });
    }
    if fs[0].abs() > R::of(1e-8) * scale || fs[n - 1].abs() > R::of(1e-8) * scale {
        return Err(GrowthError::HypothesisViolated { clause: 'a' });
    }

    let d_a = parabola_d1([xs[0], xs[1], xs[2]], [fs[0], fs[1], fs[2]], xs[0]);
    let d_b = parabola_d1(
        [xs[n - 3], xs[n - 2], xs[n - 1]],
        [fs[n - 3], fs[n - 2], fs[n - 1]],
        xs[n - 1],
    );
    let slope_tol = R::of(1e-4);
    if d_a.abs() < R::one() - slope_tol || d_b.abs() < R::one() - slope_tol {
        return Err(GrowthError::HypothesisViolated { clause: 'b' });
    }
    if (d_a.abs() - d_b.abs()).abs() > R::of(1e-3) * d_a.abs().max(d_b.abs()) {
        return Err(GrowthError::HypothesisViolated { clause: 'b' });
    }

    // First differences stand in for f'; count strict sign changes.
    let diffs: Vec<R> = fs.windows(2).map(|w| w[1] - w[0]).collect();
    let mut crit_idx = None;
    let mut changes = 0usize;
    let mut last_sign = R::zero();
    for (k, &d) in diffs.iter().enumerate() {
        if d == R::zero() {
            continue;
        }
        let s = d.signum();
        if last_sign != R::zero() && s != last_sign {
            changes += 1;
            crit_idx = Some(k);
        }
        last_sign = s;
    }
    if changes != 1 {
        return Err(GrowthError::HypothesisViolated { clause: 'c' });
    }
    let crit = crit_idx.unwrap();

    // Central second differences on the interior nodes stand in for f''.
    let mut g = Vec::with_capacity(n - 2);
    for k in 1..n - 1 {
        let hl = xs[k] - xs[k - 1];
        let hr = xs[k + 1] - xs[k];
        let v = R::of(2.0) * (fs[k - 1] * hr - fs[k] * (hl + hr) + fs[k + 1] * hl)
            / (hl * hr * (hl + hr));
        g.push(v);
    }
    let g_scale = g.iter().fold(R::zero(), |m, v| m.max(v.abs()));
    let dead = R::of(1e-9) * g_scale;
    let sign_changes_in = |range: std::ops::Range<usize>| -> usize {
        let mut last = R::zero();
        let mut count = 0;
        for k in range {
            let v = g[k];
            if v.abs() <= dead {
                continue;
            }
            let s = v.signum();
            if last != R::zero() && s != last {
                count += 1;
            }
            last = s;
        }
        count
    };
    // g[k] sits at node k+1; the critical point is near node `crit`.
    let crit_g = crit.saturating_sub(1).min(g.len());
    if sign_changes_in(0..crit_g) > 1 || sign_changes_in(crit_g..g.len()) > 1 {
        return Err(GrowthError::HypothesisViolated { clause: 'd' });
    }

    for k in 1..g.len().saturating_sub(1) {
        let (l, m, r) = (g[k - 1], g[k], g[k + 1]);
        if m + dead < l && m + dead < r && m >= -dead {
            return Err(GrowthError::HypothesisViolated { clause: 'e' });
        }
        if m > l + dead && m > r + dead && m <= dead {
            return Err(GrowthError::HypothesisViolated { clause: 'e' });
        }
    }

    let (a, b) = (xs[0], xs[n - 1]);
    let twenty = R::of(20.0);
    for k in 1..n - 1 {
        let bound = (xs[k] - a).min(b - xs[k]) / twenty;
        if fs[k].abs() <= bound {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Distortion bound for a conformal map of the right half-plane:
/// `|phi'(z)| >= |phi'(z0)| (1 + |z - z0| / Re z0)^{-4}`.
/// Pass the derivative of phi; returns whether the bound holds at z.
pub fn koebe_bound_check<R: Real, F>(phi_d1: F, z0: Cx<R>, z: Cx<R>) -> bool
where
    F: Fn(Cx<R>) -> Cx<R>,
{
    assert!(z0.re > R::zero(), "base point must have positive real part");
    assert!(z.re >= z0.re, "target must not cross left of the base point");
    let lhs = phi_d1(z).norm();
    let factor = R::one() + (z - z0).norm() / z0.re;
    let rhs = phi_d1(z0).norm() * factor.powi(-4);
    lhs >= rhs
}

/// Finite asymptotic values of F_m: the limits along the m rays
/// `arg z = (2k+1) pi / m`, where `exp(z^m)` decays and the defining
/// integral converges. Each value is `exp` of a ray integral.
pub fn asymptotic_values_Fm<R: Real>(m: u32, tol: R) -> Result<Vec<Cx<R>>, GrowthError> {
    assert!(m >= 1, "m must be at least 1");
    let mut values = Vec::with_capacity(m as usize);
    for k in 0..m {
        let angle = R::PI() * R::of((2 * k + 1) as f64) / R::of(m as f64);
        let path = PathSpec::Ray {
            start: cx(R::zero(), R::zero()),
            angle,
            r_trunc: None,
        };
        let integral = integrate_along(|z: Cx<R>| z.powu(m).exp(), &path, tol)?;
        values.push(integral.value.exp());
    }
    Ok(values)
}

/// Predicted order, convergence exponent and indicator template for each
/// case of the classification theorem, rejecting m outside the stated range.
pub fn classify_orders<R: Real>(
    case: Case,
    m: u32,
) -> Result<ClassificationResult<R>, GrowthError> {
    let err = || GrowthError::InvalidM { case, m };
    match case {
        Case::I => {
            if m < 1 {
                return Err(err());
            }
            Ok(ClassificationResult {
                case,
                m,
                rho: R::of(m as f64),
                lambda: None,
                template: IndicatorTemplate::CosRho,
            })
        }
        Case::II => {
            if m < 2 {
                return Err(err());
            }
            let rho = R::of(m as f64) - R::of(0.5);
            Ok(ClassificationResult {
                case,
                m,
                rho,
                lambda: Some(rho),
                template: IndicatorTemplate::SinRhoAbs,
            })
        }
        Case::III => {
            if m < 4 || m % 2 != 0 {
                return Err(err());
            }
            let rho = R::of((m - 1) as f64);
            Ok(ClassificationResult {
                case,
                m,
                rho,
                lambda: Some(rho),
                template: IndicatorTemplate::SinRhoAbs,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{eval_Fm, eval_Gm};
    use crate::num::{horner, log_abs_sin};

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    #[test]
    fn real_zeros_of_sin_cos_sit_on_the_half_period_lattice() {
        let e = |x: f64| (x.sin() * x.cos(), (2.0 * x).cos());
        let list = find_real_zeros(e, (0.1, 10.0), 1e-3).unwrap();
        let expected: Vec<f64> = (1..=6).map(|k| k as f64 * TAU / 4.0).collect();
        assert_eq!(list.zeros.len(), expected.len());
        for (z, want) in list.zeros.iter().zip(&expected) {
            assert!((z - want).abs() < 1e-9, "zero {z} vs {want}");
        }
        for r in &list.residuals {
            assert!(*r < 1e-9, "residual {r}");
        }
    }

    #[test]
    fn constant_has_no_zeros() {
        let list = find_real_zeros(|_| (0.5, 0.0), (-5.0, 5.0), 1e-3).unwrap();
        assert!(list.zeros.is_empty());
    }

    #[test]
    fn quadratic_zeros_carry_signed_derivatives() {
        let e = |x: f64| (x * (1.0 - x), 1.0 - 2.0 * x);
        let list = find_real_zeros(e, (-1.0, 2.0), 1e-3).unwrap();
        assert_eq!(list.zeros.len(), 2);
        assert!(list.zeros[0].abs() < 1e-12);
        assert!((list.zeros[1] - 1.0).abs() < 1e-12);
        assert!((list.e_prime[0] - 1.0).abs() < 1e-9);
        assert!((list.e_prime[1] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn nearby_zeros_trigger_clustering() {
        let (r0, r1) = (0.50002, 0.50052);
        let e = move |x: f64| ((x - r0) * (x - r1), 2.0 * x - r0 - r1);
        let err = find_real_zeros(e, (0.0, 1.0), 1e-3).unwrap_err();
        assert!(matches!(err, GrowthError::ClusteringDetected { .. }));
    }

    #[test]
    fn argument_principle_counts_G2_and_F2_zeros() {
        let corners = (cx(-1.0, -1.0), cx(1.0, 1.0));
        let g = |z| eval_Gm(2, z, 1e-10).unwrap();
        assert_eq!(count_zeros_argument_principle(g, corners, 1e-9).unwrap(), 1);
        let f = |z| eval_Fm(2, z, 1e-10).unwrap();
        assert_eq!(count_zeros_argument_principle(f, corners, 1e-9).unwrap(), 0);
    }

    #[test]
    fn argument_principle_counts_sine_zeros() {
        let f = |z: Cx<f64>| (z * 2.0).sin() / 2.0;
        let corners = (cx(0.1, -1.0), cx(7.0, 1.0));
        assert_eq!(count_zeros_argument_principle(f, corners, 1e-9).unwrap(), 4);
    }

    #[test]
    fn boundary_zero_is_refused() {
        let f = |z: Cx<f64>| (z * 2.0).sin() / 2.0;
        let corners = (cx(0.1, -1.0), cx(std::f64::consts::FRAC_PI_2, 1.0));
        let err = count_zeros_argument_principle(f, corners, 1e-9).unwrap_err();
        assert!(matches!(err, GrowthError::BoundaryZero { .. }));
    }

    fn geometric_ladder(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn order_of_gaussian_exponential_is_two() {
        let log_abs = |z: Cx<f64>| -2.0 * (z * z).re;
        let ladder = geometric_ladder(2.0, 30.0, 8);
        let est = estimate_order(log_abs, &ladder).unwrap();
        assert!((est.rho_hat - 2.0).abs() < 0.05, "rho {}", est.rho_hat);
    }

    #[test]
    fn order_of_sin_cos_is_one() {
        let log_abs = |z: Cx<f64>| log_abs_sin(z * 2.0) - 2.0f64.ln();
        let ladder = geometric_ladder(5.0, 50.0, 8);
        let est = estimate_order(log_abs, &ladder).unwrap();
        assert!((est.rho_hat - 1.0).abs() < 0.05, "rho {}", est.rho_hat);
    }

    #[test]
    fn order_of_a_polynomial_is_zero() {
        let log_abs = |z: Cx<f64>| horner(&[1.0, -2.0, 0.0, 1.0], z).norm().ln();
        let ladder = geometric_ladder(1e3, 1e12, 8);
        let est = estimate_order(log_abs, &ladder).unwrap();
        assert!(est.rho_hat < 0.05, "rho {}", est.rho_hat);
    }

    #[test]
    fn order_estimation_flags_overflow() {
        let log_abs = |z: Cx<f64>| z.norm() * z.norm();
        let ladder = geometric_ladder(1e180, 1e200, 8);
        let err = estimate_order(log_abs, &ladder).unwrap_err();
        assert!(matches!(err, GrowthError::Overflow { .. }));
    }

    #[test]
    fn lambda_of_arithmetic_zeros_is_one() {
        let zeros: Vec<f64> = (1..=200).map(|k| k as f64 * TAU / 4.0).collect();
        let est = estimate_lambda(&ZeroList::synthetic(zeros)).unwrap();
        assert!((est.rho_hat - 1.0).abs() < 0.05, "lambda {}", est.rho_hat);
    }

    #[test]
    fn lambda_of_square_zeros_is_a_half() {
        let zeros: Vec<f64> = (1..=60).map(|k| (k * k) as f64).collect();
        let est = estimate_lambda(&ZeroList::synthetic(zeros)).unwrap();
        assert!((est.rho_hat - 0.5).abs() < 0.05, "lambda {}", est.rho_hat);
    }

    #[test]
    fn lambda_needs_enough_zeros() {
        let est = estimate_lambda(&ZeroList::<f64>::synthetic(vec![])).unwrap();
        assert_eq!(est.rho_hat, 0.0);
        let few: Vec<f64> = (1..=10).map(|k| k as f64).collect();
        let err = estimate_lambda(&ZeroList::synthetic(few)).unwrap_err();
        assert!(matches!(err, GrowthError::TooFewZeros { found: 10 }));
    }

    fn theta_grid(n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| -std::f64::consts::PI + TAU * k as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn indicator_of_sin_cos_matches_two_abs_sin() {
        let log_abs = |z: Cx<f64>| log_abs_sin(z * 2.0) - 2.0f64.ln();
        let thetas = theta_grid(181);
        let ladder = geometric_ladder(10.0, 50.0, 6);
        let ind = estimate_indicator(log_abs, 1.0, &thetas, &ladder);
        for (t, h) in ind.thetas.iter().zip(&ind.h) {
            let want = 2.0 * t.sin().abs();
            assert!((h - want).abs() < 0.05, "theta {t}: h {h} vs {want}");
        }
        assert_eq!(ind.template, IndicatorTemplate::SinRhoAbs);
        assert!((ind.c - 2.0).abs() < 0.1, "c {}", ind.c);
        assert!(ind.sup_residual < 0.05, "sup {}", ind.sup_residual);
    }

    #[test]
    fn indicator_of_exp_is_cos_theta() {
        let log_abs = |z: Cx<f64>| z.re;
        let thetas = theta_grid(181);
        let ladder = geometric_ladder(10.0, 50.0, 6);
        let ind = estimate_indicator(log_abs, 1.0, &thetas, &ladder);
        for (t, h) in ind.thetas.iter().zip(&ind.h) {
            assert!((h - t.cos()).abs() < 1e-9, "theta {t}: h {h}");
        }
        assert_eq!(ind.template, IndicatorTemplate::CosRho);
        assert!((ind.c - 1.0).abs() < 1e-9);
        assert!(!ind.low_confidence);
    }

    #[test]
    fn indicator_of_gaussian_exponential_is_minus_two_cos() {
        let log_abs = |z: Cx<f64>| -2.0 * (z * z).re;
        let thetas = theta_grid(181);
        let ladder = geometric_ladder(5.0, 30.0, 6);
        let ind = estimate_indicator(log_abs, 2.0, &thetas, &ladder);
        for (t, h) in ind.thetas.iter().zip(&ind.h) {
            let want = -2.0 * (2.0 * t).cos();
            assert!((h - want).abs() < 1e-9, "theta {t}: h {h} vs {want}");
        }
        assert_eq!(ind.template, IndicatorTemplate::CosRho);
        assert!((ind.c + 2.0).abs() < 1e-9);
    }

    #[test]
    fn coefficient_indicator_follows_the_max_formula() {
        let thetas = theta_grid(181);
        let rho = 1.5;
        let c = 0.7;
        let h: Vec<f64> = thetas.iter().map(|&t| c * (rho * t.abs()).sin()).collect();
        let sample = IndicatorSample {
            thetas: thetas.clone(),
            h: h.clone(),
            rho,
            c,
            template: IndicatorTemplate::SinRhoAbs,
            sup_residual: 0.0,
            low_confidence: false,
        };
        let h_a = indicator_of_A_from_E(&sample);
        for ((t, he), ha) in thetas.iter().zip(&h).zip(&h_a.h) {
            let want = 2.0 * (-he).max(0.0);
            assert!((ha - want).abs() < 1e-15, "theta {t}");
            if t.abs() <= 2.0 * std::f64::consts::PI / 3.0 {
                assert_eq!(*ha, 0.0, "theta {t} should be outside the support");
            }
        }
    }

    #[test]
    fn nonnegative_indicator_gives_vanishing_coefficient_indicator() {
        let thetas = theta_grid(61);
        let h: Vec<f64> = thetas.iter().map(|&t| t.abs().sin()).collect();
        let sample = IndicatorSample {
            thetas,
            h,
            rho: 1.0,
            c: 1.0,
            template: IndicatorTemplate::SinRhoAbs,
            sup_residual: 0.0,
            low_confidence: false,
        };
        let h_a = indicator_of_A_from_E(&sample);
        assert!(h_a.h.iter().all(|&v| v == 0.0));
        assert_eq!(h_a.c, 0.0);
    }

    #[test]
    fn cosine_indicator_folds_to_two_abs_cos_on_the_left() {
        let thetas = theta_grid(181);
        let h: Vec<f64> = thetas.iter().map(|&t| t.cos()).collect();
        let sample = IndicatorSample {
            thetas: thetas.clone(),
            h,
            rho: 1.0,
            c: 1.0,
            template: IndicatorTemplate::CosRho,
            sup_residual: 0.0,
            low_confidence: false,
        };
        let h_a = indicator_of_A_from_E(&sample);
        for (t, ha) in thetas.iter().zip(&h_a.h) {
            let want = if t.abs() > std::f64::consts::FRAC_PI_2 {
                2.0 * t.cos().abs()
            } else {
                0.0
            };
            assert!((ha - want).abs() < 1e-15, "theta {t}");
        }
    }

    #[test]
    fn bounded_ratio_shrinks_for_sin_cos_and_grows_for_exp() {
        let ladder: Vec<f64> = (1..=40).map(|k| k as f64 * 2.5).collect();
        let rep = check_bounded_ratio(|x: f64| x.sin() * x.cos(), RayDirection::Positive, &ladder);
        assert!(rep.max_ratio <= 0.5 / ladder[0] + 1e-12);
        assert!(!rep.tail_growing);

        let one = check_bounded_ratio(|x: f64| x, RayDirection::Positive, &ladder);
        assert!(one.ratios.iter().all(|&r| (r - 1.0).abs() < 1e-12));
        assert!(!one.tail_growing);

        let grow = check_bounded_ratio(|x: f64| x.exp(), RayDirection::Positive, &ladder);
        assert!(grow.tail_growing);
    }

    fn uniform_samples(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
        let xs: Vec<f64> = (0..n)
            .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
            .collect();
        let fs = xs.iter().map(|&x| f(x)).collect();
        (xs, fs)
    }

    #[test]
    fn chord_bound_holds_for_sine_arch() {
        let (xs, fs) = uniform_samples(0.0, std::f64::consts::PI, 513, f64::sin);
        assert!(c2_lemma_check(&xs, &fs).unwrap());
    }

    #[test]
    fn chord_bound_holds_for_steep_parabola() {
        let (xs, fs) = uniform_samples(0.0, 1.0, 257, |x| 4.0 * x * (1.0 - x));
        assert!(c2_lemma_check(&xs, &fs).unwrap());
    }

    #[test]
    fn chord_lemma_rejects_two_critical_points() {
        let (xs, fs) = uniform_samples(0.0, std::f64::consts::PI, 513, |x| (2.0 * x).sin());
        let err = c2_lemma_check(&xs, &fs).unwrap_err();
        assert!(matches!(err, GrowthError::HypothesisViolated { clause: 'c' }));
    }

    #[test]
    fn chord_lemma_rejects_shallow_slopes_and_loose_ends() {
        let (xs, fs) = uniform_samples(0.0, 1.0, 257, |x| 0.5 * x * (1.0 - x));
        let err = c2_lemma_check(&xs, &fs).unwrap_err();
        assert!(matches!(err, GrowthError::HypothesisViolated { clause: 'b' }));

        let (xs, fs) = uniform_samples(0.0, 3.0, 257, f64::sin);
        let err = c2_lemma_check(&xs, &fs).unwrap_err();
        assert!(matches!(err, GrowthError::HypothesisViolated { clause: 'a' }));
    }

    #[test]
    fn koebe_bound_for_identity_square_and_log() {
        assert!(koebe_bound_check(|_| cx(1.0, 0.0), cx(1.0, 0.0), cx(5.0, 3.0)));
        assert!(koebe_bound_check(
            |z: Cx<f64>| z * 2.0,
            cx(1.0, 0.0),
            cx(2.0, 0.0)
        ));
        // log(1 + z) on the right half-plane, pseudo-random sweep.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let z0 = cx(0.1 + 3.0 * next(), -2.0 + 4.0 * next());
            let z = cx(z0.re + 5.0 * next(), -4.0 + 8.0 * next());
            assert!(koebe_bound_check(
                |w: Cx<f64>| (cx(1.0, 0.0) + w).inv(),
                z0,
                z
            ));
        }
    }

    #[test]
    fn asymptotic_value_for_m_one_is_inverse_e() {
        let vals = asymptotic_values_Fm::<f64>(1, 1e-10).unwrap();
        assert_eq!(vals.len(), 1);
        assert!((vals[0] - cx((-1.0f64).exp(), 0.0)).norm() < 1e-8);
    }

    #[test]
    fn asymptotic_values_for_m_two_are_a_conjugate_pair() {
        // Oracle for the ray integral: fine trapezoid of exp(-t^2) on [0, 40].
        let n = 400_000;
        let h = 40.0 / n as f64;
        let mut s = 0.5 * (0.0f64).exp();
        for k in 1..n {
            let t = k as f64 * h;
            s += (-t * t).exp();
        }
        let gamma_half = s * h;

        let vals = asymptotic_values_Fm::<f64>(2, 1e-10).unwrap();
        assert_eq!(vals.len(), 2);
        let want0 = cx(0.0, gamma_half).exp();
        assert!((vals[0] - want0).norm() < 1e-8, "got {}", vals[0]);
        assert!((vals[1] - vals[0].conj()).norm() < 1e-8);
    }

    #[test]
    fn asymptotic_values_are_distinct_and_conjugation_closed() {
        let vals = asymptotic_values_Fm::<f64>(3, 1e-10).unwrap();
        assert_eq!(vals.len(), 3);
        for i in 0..3 {
            for j in 0..i {
                assert!((vals[i] - vals[j]).norm() > 1e-3);
            }
            let partner = vals.iter().any(|v| (v - vals[i].conj()).norm() < 1e-6);
            assert!(partner, "value {} lacks a conjugate", vals[i]);
        }
    }

    #[test]
    fn classification_table_matches_the_theorem() {
        let r = classify_orders::<f64>(Case::I, 1).unwrap();
        assert_eq!(r.rho, 1.0);
        assert!(r.lambda.is_none());
        assert_eq!(r.template, IndicatorTemplate::CosRho);

        let r = classify_orders::<f64>(Case::II, 2).unwrap();
        assert_eq!(r.rho, 1.5);
        assert_eq!(r.lambda, Some(1.5));

        let r = classify_orders::<f64>(Case::III, 4).unwrap();
        assert_eq!(r.rho, 3.0);
        assert_eq!(r.lambda, Some(3.0));

        for (case, m) in [
            (Case::I, 0),
            (Case::II, 1),
            (Case::III, 2),
            (Case::III, 5),
        ] {
            let err = classify_orders::<f64>(case, m).unwrap_err();
            assert!(matches!(err, GrowthError::InvalidM { .. }));
        }
    }

    #[test]
    fn order_of_degree_one_elementary_product_is_one() {
        // log|E| for E = exp(-2z)/2.
        let log_abs = |z: Cx<f64>| -2.0 * z.re - 2.0f64.ln();
        let ladder = geometric_ladder(3.0, 30.0, 8);
        let est = estimate_order(log_abs, &ladder).unwrap();
        assert!((est.rho_hat - 1.0).abs() < 0.05, "rho {}", est.rho_hat);
    }
}
