//! The kernel `q_a(z) = 3 / (3 + (a-3)z - a z^2)` and every closed-form
//! quantity attached to it: Taylor coefficients, starlike orders, the
//! admissibility check behind the `Re(f/z)` theorem, boundary curves, and
//! loop detection.
//!
//! The kernel factors as `3 / ((1-z)(3+az))`, which is also the one-parameter
//! family `p_b` with `b = -a/3`.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

use crate::report::BoundReport;
use crate::series::TruncatedSeries;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("alpha = {0} outside the admissible range (-3, 1]")]
    InvalidAlpha(f64),
    #[error("b = {0} outside the admissible range [-1, 1]")]
    InvalidB(f64),
    #[error("radius {0} outside the open interval (0, 1)")]
    InvalidRadius(f64),
    #[error("evaluation too close to a pole: |denominator| = {denom_abs:.3e} at z = {z}")]
    PoleProximity { z: Complex64, denom_abs: f64 },
    #[error("alpha = {alpha} outside the theorem range [{lo}, {hi}]")]
    OutOfTheoremRange { alpha: f64, lo: f64, hi: f64 },
    #[error("tangent-ratio denominator is nonpositive ({value:.6}) at r = {r}; the bound degenerates")]
    DenominatorNonpositive { r: f64, value: f64 },
}

/// Guard below which a kernel denominator counts as a pole hit.
const POLE_EPS: f64 = 1e-12;

/// Validated parameter of the class SK(alpha): `-3 < alpha <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct AlphaParam(f64);

impl AlphaParam {
    pub fn new(alpha: f64) -> Result<Self, KernelError> {
        if !alpha.is_finite() || alpha <= -3.0 || alpha > 1.0 {
            return Err(KernelError::InvalidAlpha(alpha));
        }
        Ok(AlphaParam(alpha))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// The kernel is `p_b` with `b = -alpha/3`.
    pub fn to_b(self) -> BParam {
        BParam(-self.0 / 3.0)
    }
}

/// Parameter of the family `p_b(z) = 1/(1 - (1+b)z + b z^2)`, `-1 <= b <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct BParam(f64);

impl BParam {
    pub fn new(b: f64) -> Result<Self, KernelError> {
        if !b.is_finite() || !(-1.0..=1.0).contains(&b) {
            return Err(KernelError::InvalidB(b));
        }
        Ok(BParam(b))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `|b| < 1`: the regime where the real-part lower bound holds.
    pub fn has_re_lower_bound(self) -> bool {
        self.0.abs() < 1.0
    }

    /// `-1/3 <= b < 1`: the regime where the boundary curve has no loops.
    pub fn is_loop_free_range(self) -> bool {
        (-1.0 / 3.0..1.0).contains(&self.0)
    }

    /// `-1/3 <= b <= 1`: the regime where `p_b` is univalent.
    pub fn is_univalent_range(self) -> bool {
        (-1.0 / 3.0..=1.0).contains(&self.0)
    }
}

/// Exact rational evaluation of `p_b(z) = 1/(1-(1+b)z+bz^2)`.
pub fn p_b_eval(b: BParam, z: Complex64) -> Result<Complex64, KernelError> {
    let b = b.get();
    let denom = Complex64::ONE - (1.0 + b) * z + b * z * z;
    if denom.norm() < POLE_EPS {
        return Err(KernelError::PoleProximity { z, denom_abs: denom.norm() });
    }
    Ok(denom.finv())
}

/// The lower bound `(1-3b) / (2(1-b)^2)` on `Re p_b` for `|b| < 1`.
pub fn p_b_re_lower(b: BParam) -> f64 {
    let b = b.get();
    (1.0 - 3.0 * b) / (2.0 * (1.0 - b) * (1.0 - b))
}

/// Exact rational evaluation of the kernel `q_a(z) = 3/(3+(a-3)z-az^2)`.
pub fn q_alpha_eval(alpha: AlphaParam, z: Complex64) -> Result<Complex64, KernelError> {
    let a = alpha.get();
    let denom = 3.0 + (a - 3.0) * z - a * z * z;
    if denom.norm() < POLE_EPS {
        return Err(KernelError::PoleProximity { z, denom_abs: denom.norm() });
    }
    Ok(3.0 * denom.finv())
}

/// Closed-form Taylor coefficient `B_n = 3/(3+a) * [1 + (-1)^n (a/3)^{n+1}]`
/// of the kernel, valid for `n >= 1` (and consistent with `B_0 = 1`).
pub fn q_alpha_coeff(alpha: AlphaParam, n: usize) -> f64 {
    let a = alpha.get();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    3.0 / (3.0 + a) * (1.0 + sign * (a / 3.0).powi(n as i32 + 1))
}

/// Kernel Taylor series built from the closed-form coefficients.
pub fn q_alpha_series(alpha: AlphaParam, order: usize) -> TruncatedSeries {
    let coeffs: Vec<f64> = (0..=order)
        .map(|n| if n == 0 { 1.0 } else { q_alpha_coeff(alpha, n) })
        .collect();
    TruncatedSeries::from_real(&coeffs)
}

/// Kernel Taylor series built from the linear recurrence
/// `3 c_n + (a-3) c_{n-1} - a c_{n-2} = 0`, seeded with `c_0 = 1`.
/// Independent oracle for [`q_alpha_coeff`].
pub fn q_alpha_series_recurrence(alpha: AlphaParam, order: usize) -> TruncatedSeries {
    let a = alpha.get();
    let mut c = vec![0.0f64; order + 1];
    c[0] = 1.0;
    for n in 1..=order {
        let prev2 = if n >= 2 { c[n - 2] } else { 0.0 };
        c[n] = ((3.0 - a) * c[n - 1] + a * prev2) / 3.0;
    }
    TruncatedSeries::from_real(&c)
}

/// The starlike order of SK(alpha): `9(1+a) / (2(3+a)^2)`.
pub fn starlike_order(alpha: AlphaParam) -> f64 {
    let a = alpha.get();
    9.0 * (1.0 + a) / (2.0 * (3.0 + a) * (3.0 + a))
}

/// The order `gamma(a) = (2a^2+3a+9) / (3(a^2+3a+6))` such that
/// `SK(alpha)` is contained in `Q(gamma(a))`; stated for `0 <= a <= 1`.
pub fn q_order(alpha: AlphaParam) -> Result<f64, KernelError> {
    let a = alpha.get();
    if !(0.0..=1.0).contains(&a) {
        return Err(KernelError::OutOfTheoremRange { alpha: a, lo: 0.0, hi: 1.0 });
    }
    Ok((2.0 * a * a + 3.0 * a + 9.0) / (3.0 * (a * a + 3.0 * a + 6.0)))
}

/// Numeric admissibility check for the differential-subordination step behind
/// the `Re(f/z) > gamma(a)` theorem.
///
/// With `gamma = q_order(alpha)` the test function is
/// `psi(a, b) = 1 + (1-gamma) b / ((1-gamma) a + gamma)`; on the critical line
/// `a = i rho` with the binding slack `sigma = -(1+rho^2)/2` its real part
/// must stay at or below `alpha' = (2-3 gamma)/(2(1-gamma))`, which equals the
/// starlike order of the class. The auxiliary ratio
/// `h(rho) = (1+rho^2) / ((1-gamma)^2 rho^2 + gamma^2)` must stay within
/// `(1/(1-gamma)^2, 1/gamma^2]`; at `gamma = 1/2` both endpoints collapse to 4
/// and equality holds throughout, so the range check carries the tolerance.
pub fn admissibility_check(
    alpha: AlphaParam,
    rho_grid: &[f64],
    tol: f64,
) -> Result<BoundReport, KernelError> {
    let gamma = q_order(alpha)?;
    let alpha_prime = (2.0 - 3.0 * gamma) / (2.0 * (1.0 - gamma));
    let h_lo = 1.0 / ((1.0 - gamma) * (1.0 - gamma));
    let h_hi = 1.0 / (gamma * gamma);

    let mut worst_margin = f64::INFINITY;
    let mut max_re_psi = f64::NEG_INFINITY;
    let mut worst_rho = 0.0;
    let mut h_in_range = true;
    for &rho in rho_grid {
        let sigma = -0.5 * (1.0 + rho * rho);
        let denom = (1.0 - gamma) * (1.0 - gamma) * rho * rho + gamma * gamma;
        let re_psi = 1.0 + gamma * (1.0 - gamma) * sigma / denom;
        let h = (1.0 + rho * rho) / denom;
        if h < h_lo - tol || h > h_hi + tol {
            h_in_range = false;
        }
        let margin = alpha_prime - re_psi;
        if margin < worst_margin {
            worst_margin = margin;
            worst_rho = rho;
        }
        max_re_psi = max_re_psi.max(re_psi);
    }

    let pass = worst_margin >= -tol && h_in_range;
    let witness = serde_json::json!({
        "rho": worst_rho,
        "gamma": gamma,
        "alpha_prime": alpha_prime,
        "h_range": [h_lo, h_hi],
        "h_in_range": h_in_range,
    });
    Ok(BoundReport::new(alpha_prime, max_re_psi, worst_margin, witness, pass, tol))
}

/// The tangent ratio `phi(r) = (3(3-a) r + |a| r^2) / (9 - 3(3-a) r - 3|a| r^2)`
/// bounding `|Im q_a / Re q_a|` on the circle of radius `r`.
pub fn tangent_ratio(alpha: AlphaParam, r: f64) -> Result<f64, KernelError> {
    if !(0.0..1.0).contains(&r) || r == 0.0 {
        return Err(KernelError::InvalidRadius(r));
    }
    let a = alpha.get();
    let num = 3.0 * (3.0 - a) * r + a.abs() * r * r;
    let den = 9.0 - 3.0 * (3.0 - a) * r - 3.0 * a.abs() * r * r;
    if den <= 0.0 {
        return Err(KernelError::DenominatorNonpositive { r, value: den });
    }
    Ok(num / den)
}

/// Strongly starlike order of SK(alpha) for `-1 <= alpha <= 1`.
///
/// The closed-form denominator `9 - 3(3-a) - 3|a|` simplifies to `3a - 3|a|`:
/// zero for `a >= 0` and negative for `a < 0`. In both cases the tangent
/// ratio's supremum as `r -> 1` is unbounded, so the arctangent limit is
/// `pi/2` and the order clamps to 1. The positive-denominator branch is kept
/// for completeness but is never reached on the admissible range.
pub fn strongly_starlike_order(alpha: AlphaParam) -> Result<f64, KernelError> {
    let a = alpha.get();
    if a < -1.0 {
        return Err(KernelError::OutOfTheoremRange { alpha: a, lo: -1.0, hi: 1.0 });
    }
    let num = 3.0 * (3.0 - a) + a.abs();
    let den = 9.0 - 3.0 * (3.0 - a) - 3.0 * a.abs();
    if den > 0.0 {
        Ok(2.0 / PI * (num / den).atan())
    } else {
        Ok(1.0)
    }
}

/// Numeric oracle for the strongly starlike order at radius `r`:
/// `(2/pi) * max_theta |arg q_a(r e^{i theta})|`, computed on a uniform grid
/// with one golden-section refinement pass around the grid argmax.
pub fn numeric_strong_order(alpha: AlphaParam, r: f64, samples: usize) -> f64 {
    let arg_abs = |theta: f64| -> f64 {
        let z = Complex64::from_polar(r, theta);
        kernel_value(alpha, z).arg().abs()
    };
    let mut best = 0.0f64;
    let mut best_theta = 0.0f64;
    for j in 0..samples {
        let theta = 2.0 * PI * j as f64 / samples as f64;
        let v = arg_abs(theta);
        if v > best {
            best = v;
            best_theta = theta;
        }
    }
    let step = 2.0 * PI / samples as f64;
    let refined = golden_max(&arg_abs, best_theta - step, best_theta + step);
    2.0 / PI * best.max(refined)
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = 0.618_033_988_749_894_9;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

/// Kernel evaluation that is total on `|z| < 1`: for a valid alpha both
/// denominator factors `(1-z)` and `(3+az)` are bounded away from zero
/// strictly inside the disk.
pub(crate) fn kernel_value(alpha: AlphaParam, z: Complex64) -> Complex64 {
    let a = alpha.get();
    let denom = 3.0 + (a - 3.0) * z - a * z * z;
    3.0 * denom.finv()
}

/// One boundary sample of the kernel image curve.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CurveSample {
    pub theta: f64,
    pub value: Complex64,
    pub radius: f64,
}

/// Uniform samples of the closed curve `q_a(r e^{i theta})`, `theta in [0, 2pi)`.
pub fn boundary_curve(alpha: AlphaParam, r: f64, samples: usize) -> Result<Vec<CurveSample>, KernelError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(KernelError::InvalidRadius(r));
    }
    Ok((0..samples)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / samples as f64;
            CurveSample {
                theta,
                value: kernel_value(alpha, Complex64::from_polar(r, theta)),
                radius: r,
            }
        })
        .collect())
}

/// True iff any two non-adjacent segments of the closed polyline intersect.
pub fn curve_self_intersects(curve: &[CurveSample]) -> bool {
    let pts: Vec<Complex64> = curve.iter().map(|s| s.value).collect();
    polyline_self_intersects(&pts)
}

/// Quadratic segment-pair scan with orientation predicates; adjacency (shared
/// polyline vertex, including the wraparound pair) is excluded.
pub fn polyline_self_intersects(pts: &[Complex64]) -> bool {
    let n = pts.len();
    if n < 4 {
        return false;
    }
    for i in 0..n {
        let (a1, a2) = (pts[i], pts[(i + 1) % n]);
        for j in (i + 2)..n {
            // skip the wraparound neighbor of segment 0
            if i == 0 && j == n - 1 {
                continue;
            }
            let (b1, b2) = (pts[j], pts[(j + 1) % n]);
            if segments_intersect(a1, a2, b1, b2) {
                return true;
            }
        }
    }
    false
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    (b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re)
}

fn on_segment(a: Complex64, b: Complex64, p: Complex64) -> bool {
    p.re >= a.re.min(b.re)
        && p.re <= a.re.max(b.re)
        && p.im >= a.im.min(b.im)
        && p.im <= a.im.max(b.im)
}

fn segments_intersect(p1: Complex64, p2: Complex64, p3: Complex64, p4: Complex64) -> bool {
    let d1 = orient(p3, p4, p1);
    let d2 = orient(p3, p4, p2);
    let d3 = orient(p1, p2, p3);
    let d4 = orient(p1, p2, p4);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(p3, p4, p1))
        || (d2 == 0.0 && on_segment(p3, p4, p2))
        || (d3 == 0.0 && on_segment(p1, p2, p3))
        || (d4 == 0.0 && on_segment(p1, p2, p4))
}

/// Suggested truncation order for series evaluations on the circle of
/// radius `r`: geometric tails like `r^N` must drop below ~1e-10.
pub fn order_for_radius(r: f64) -> usize {
    if r <= 0.6 {
        256
    } else if r <= 0.92 {
        1024
    } else {
        crate::series::MAX_ORDER
    }
}
