//! Numerical membership and subordination testing: is a normalized series in
//! SK(alpha), in Q(gamma), and does `f` subordinate to `g` on sampled
//! sub-disks.
//!
//! Containment of `z f'/f` values in the kernel image `q_a(D_r)` is decided by
//! the winding number of the sampled boundary curve, with adaptive bisection
//! of the argument increments. Values that land on the boundary itself (the
//! extremal function does this at every radius) count as contained: the
//! region test is against the closure, with a small relative slack.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

use crate::kernel::{self, AlphaParam};
use crate::report::BoundReport;
use crate::series::{NormalizedSeries, SeriesError, TruncatedSeries};

#[derive(Debug, Error)]
pub enum MembershipError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Kernel(#[from] kernel::KernelError),
    #[error("radius {0} outside the open interval (0, 1)")]
    BadRadius(f64),
    #[error("truncation tail estimate {estimate:.3e} at radius {radius} exceeds {budget:.1e}; raise the series order")]
    TailTooLarge { radius: f64, estimate: f64, budget: f64 },
    #[error("boundary curve is degenerate (self-intersecting or unresolvable winding)")]
    DegenerateCurve,
}

/// Tail budget for evaluating truncated series on a circle.
pub const TAIL_TOL: f64 = 1e-8;
/// Adaptive winding refinement cap (total samples).
const MAX_WINDING_SAMPLES: usize = 1 << 16;
/// Relative slack for the on-boundary (closure) test.
const BOUNDARY_EPS: f64 = 1e-6;

/// Worst sample of a membership run.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Witness {
    pub radius: f64,
    pub theta: f64,
    pub value: Complex64,
}

/// Per-radius containment outcome.
#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub radii_tested: Vec<f64>,
    pub contained: Vec<bool>,
    pub worst_witness: Option<Witness>,
    pub pass: bool,
    /// Present only for subordination checks: per-radius max-modulus
    /// necessary condition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_modulus_ok: Option<Vec<bool>>,
}

/// Geometric tail estimate for `sum_{n>N} |c_n| r^n` from the empirical decay
/// of the trailing coefficients. Rejects when the extrapolated ratio times
/// `r` reaches 1 (the extrapolation would diverge at this radius).
pub fn tail_estimate(series: &TruncatedSeries, r: f64) -> Result<f64, MembershipError> {
    let coeffs = series.coeffs();
    let nonzero: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| (i, c.norm()))
        .filter(|(_, m)| *m > 0.0)
        .collect();
    let Some(&(last_idx, last_mag)) = nonzero.last() else {
        return Ok(0.0); // identically zero
    };
    // A series whose support ends well before the truncation order is a
    // polynomial; it has no tail.
    if last_idx + 8 < coeffs.len() {
        return Ok(0.0);
    }
    let window: Vec<(usize, f64)> = nonzero.iter().rev().take(8).rev().copied().collect();
    let mut rho = 0.0f64;
    for pair in window.windows(2) {
        let (i, mi) = pair[0];
        let (j, mj) = pair[1];
        let step = (mj / mi).powf(1.0 / (j - i) as f64);
        rho = rho.max(step);
    }
    let q = rho * r;
    if !(q < 1.0) {
        return Err(MembershipError::TailTooLarge {
            radius: r,
            estimate: f64::INFINITY,
            budget: TAIL_TOL,
        });
    }
    Ok(last_mag * r.powi(last_idx as i32) * q / (1.0 - q))
}

fn check_tail(series: &TruncatedSeries, r: f64) -> Result<(), MembershipError> {
    let estimate = tail_estimate(series, r)?;
    if estimate > TAIL_TOL {
        return Err(MembershipError::TailTooLarge { radius: r, estimate, budget: TAIL_TOL });
    }
    Ok(())
}

/// Winding number of the closed curve `theta -> gen(theta)` around `q`. The
/// argument increments are summed over the precomputed uniform samples in
/// `base` (with `base[j] = gen(2 pi j / base.len())`); any interval whose
/// increment exceeds pi/2 is bisected through `gen`, up to
/// [`MAX_WINDING_SAMPLES`] extra evaluations.
fn winding_number<F>(gen: &F, base: &[Complex64], q: Complex64) -> Result<i32, MembershipError>
where
    F: Fn(f64) -> Complex64,
{
    let n = base.len();
    let mut total = 0.0f64;
    let mut budget = MAX_WINDING_SAMPLES as isize - n as isize;
    for j in 0..n {
        let t0 = 2.0 * PI * j as f64 / n as f64;
        let t1 = 2.0 * PI * (j + 1) as f64 / n as f64;
        let v0 = base[j] - q;
        let v1 = base[(j + 1) % n] - q;
        total += arc_increment(gen, t0, t1, v0, v1, q, 0, &mut budget)?;
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.25 {
        return Err(MembershipError::DegenerateCurve);
    }
    Ok(rounded as i32)
}

fn arc_increment<F>(
    gen: &F,
    t0: f64,
    t1: f64,
    v0: Complex64,
    v1: Complex64,
    q: Complex64,
    depth: u32,
    budget: &mut isize,
) -> Result<f64, MembershipError>
where
    F: Fn(f64) -> Complex64,
{
    if v0.norm() == 0.0 || v1.norm() == 0.0 {
        return Err(MembershipError::DegenerateCurve);
    }
    let delta = (v1 / v0).arg();
    if delta.abs() <= PI / 2.0 {
        return Ok(delta);
    }
    if depth >= 32 || *budget <= 0 {
        return Err(MembershipError::DegenerateCurve);
    }
    *budget -= 1;
    let tm = 0.5 * (t0 + t1);
    let vm = gen(tm) - q;
    Ok(arc_increment(gen, t0, tm, v0, vm, q, depth + 1, budget)?
        + arc_increment(gen, tm, t1, vm, v1, q, depth + 1, budget)?)
}

/// Distance from `q` to the closed polyline through `pts`.
fn polyline_distance(pts: &[Complex64], q: Complex64) -> f64 {
    let n = pts.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let ab = b - a;
        let len_sq = ab.norm_sqr();
        let t = if len_sq == 0.0 {
            0.0
        } else {
            (((q - a).re * ab.re + (q - a).im * ab.im) / len_sq).clamp(0.0, 1.0)
        };
        best = best.min((q - (a + t * ab)).norm());
    }
    best
}

struct RegionTest<'a, F>
where
    F: Fn(f64) -> Complex64,
{
    gen: F,
    polyline: &'a [Complex64],
}

impl<F> RegionTest<'_, F>
where
    F: Fn(f64) -> Complex64,
{
    /// Containment in the closed region bounded by the curve: either within
    /// the boundary slack of the polyline, or winding number +-1.
    fn contains(&self, q: Complex64) -> Result<(bool, f64), MembershipError> {
        let dist = polyline_distance(self.polyline, q);
        if dist <= BOUNDARY_EPS * (1.0 + q.norm()) {
            return Ok((true, dist));
        }
        let w = winding_number(&self.gen, self.polyline, q)?;
        Ok((w.abs() == 1, dist))
    }
}

fn validate_radii(radii: &[f64]) -> Result<Vec<f64>, MembershipError> {
    if radii.is_empty() {
        return Err(MembershipError::BadRadius(f64::NAN));
    }
    let mut sorted = radii.to_vec();
    for &r in &sorted {
        if !(r > 0.0 && r < 1.0) {
            return Err(MembershipError::BadRadius(r));
        }
    }
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(sorted)
}

/// Is `f` in SK(alpha), tested on the circles `|z| = r`?
///
/// For each radius the values of `z f'/f` must lie in the closed region
/// bounded by the kernel curve `q_a(|z| = r)`. The kernel boundary is exact
/// (rational evaluation); only the `z f'/f` side is truncated, so the tail
/// precondition applies to that series.
pub fn membership_sk(
    f: &NormalizedSeries,
    alpha: AlphaParam,
    radii: &[f64],
    samples: usize,
) -> Result<MembershipReport, MembershipError> {
    let radii = validate_radii(radii)?;
    let w = f.z_log_derivative()?;
    let samples = samples.max(64);
    let curve_samples = 4 * samples;

    let mut contained = Vec::with_capacity(radii.len());
    let mut worst: Option<(bool, f64, Witness)> = None;
    for &r in &radii {
        check_tail(&w, r)?;
        let gen = |theta: f64| kernel::kernel_value(alpha, Complex64::from_polar(r, theta));
        let polyline: Vec<Complex64> = (0..curve_samples)
            .map(|j| gen(2.0 * PI * j as f64 / curve_samples as f64))
            .collect();
        if kernel::polyline_self_intersects(&polyline) {
            return Err(MembershipError::DegenerateCurve);
        }
        let region = RegionTest { gen, polyline: &polyline };

        let mut all_in = true;
        for j in 0..samples {
            let theta = 2.0 * PI * j as f64 / samples as f64;
            let v = w.eval(Complex64::from_polar(r, theta));
            let (inside, dist) = region.contains(v)?;
            all_in &= inside;
            let witness = Witness { radius: r, theta, value: v };
            worst = Some(match worst {
                None => (inside, dist, witness),
                Some(prev) => pick_worse(prev, (inside, dist, witness)),
            });
        }
        contained.push(all_in);
    }
    let pass = contained.iter().all(|&c| c);
    Ok(MembershipReport {
        radii_tested: radii,
        contained,
        worst_witness: worst.map(|(_, _, w)| w),
        pass,
        max_modulus_ok: None,
    })
}

/// Worse = outside beats inside; among outside points larger distance, among
/// inside points smaller distance (closest approach to the boundary).
fn pick_worse(
    a: (bool, f64, Witness),
    b: (bool, f64, Witness),
) -> (bool, f64, Witness) {
    match (a.0, b.0) {
        (false, true) => a,
        (true, false) => b,
        (false, false) => if b.1 > a.1 { b } else { a },
        (true, true) => if b.1 < a.1 { b } else { a },
    }
}

/// Is `Re(f/z) > gamma` on the sampled circles?
pub fn membership_q(
    f: &NormalizedSeries,
    gamma: f64,
    radii: &[f64],
    samples: usize,
    tol: f64,
) -> Result<MembershipReport, MembershipError> {
    let radii = validate_radii(radii)?;
    let u = f.series().shift_down()?;
    let samples = samples.max(64);
    let mut contained = Vec::with_capacity(radii.len());
    let mut worst: Option<Witness> = None;
    let mut min_re = f64::INFINITY;
    for &r in &radii {
        check_tail(&u, r)?;
        let mut radius_ok = true;
        for j in 0..samples {
            let theta = 2.0 * PI * j as f64 / samples as f64;
            let v = u.eval(Complex64::from_polar(r, theta));
            if v.re < min_re {
                min_re = v.re;
                worst = Some(Witness { radius: r, theta, value: v });
            }
            if v.re <= gamma - tol {
                radius_ok = false;
            }
        }
        contained.push(radius_ok);
    }
    let pass = contained.iter().all(|&c| c);
    Ok(MembershipReport { radii_tested: radii, contained, worst_witness: worst, pass, max_modulus_ok: None })
}

/// Subordination test `f < g` on sampled sub-disks: requires `f(0) = g(0)`,
/// then per radius checks image containment in the region bounded by the
/// sampled `g`-curve plus the max-modulus necessary condition
/// `max |f| <= max |g|`.
pub fn subordination_check(
    f: &TruncatedSeries,
    g: &TruncatedSeries,
    radii: &[f64],
    samples: usize,
) -> Result<MembershipReport, MembershipError> {
    let radii = validate_radii(radii)?;
    let samples = samples.max(64);
    let curve_samples = 4 * samples;

    if (f.coeff(0) - g.coeff(0)).norm() > 1e-12 {
        // subordination requires matching values at the origin
        return Ok(MembershipReport {
            radii_tested: radii.clone(),
            contained: vec![false; radii.len()],
            worst_witness: Some(Witness { radius: 0.0, theta: 0.0, value: f.coeff(0) }),
            pass: false,
            max_modulus_ok: Some(vec![false; radii.len()]),
        });
    }

    let mut contained = Vec::new();
    let mut max_mod_ok = Vec::new();
    let mut worst: Option<(bool, f64, Witness)> = None;
    for &r in &radii {
        check_tail(f, r)?;
        check_tail(g, r)?;
        let gen = |theta: f64| g.eval(Complex64::from_polar(r, theta));
        let polyline: Vec<Complex64> = (0..curve_samples)
            .map(|j| gen(2.0 * PI * j as f64 / curve_samples as f64))
            .collect();
        if kernel::polyline_self_intersects(&polyline) {
            return Err(MembershipError::DegenerateCurve);
        }
        let region = RegionTest { gen, polyline: &polyline };

        let mut all_in = true;
        let mut max_f = 0.0f64;
        let mut max_g = 0.0f64;
        for j in 0..samples {
            let theta = 2.0 * PI * j as f64 / samples as f64;
            let v = f.eval(Complex64::from_polar(r, theta));
            max_f = max_f.max(v.norm());
            let (inside, dist) = region.contains(v)?;
            all_in &= inside;
            let witness = Witness { radius: r, theta, value: v };
            worst = Some(match worst {
                None => (inside, dist, witness),
                Some(prev) => pick_worse(prev, (inside, dist, witness)),
            });
        }
        for p in &polyline {
            max_g = max_g.max(p.norm());
        }
        contained.push(all_in);
        max_mod_ok.push(max_f <= max_g + 1e-9);
    }
    let pass = contained.iter().all(|&c| c) && max_mod_ok.iter().all(|&c| c);
    Ok(MembershipReport {
        radii_tested: radii,
        contained,
        worst_witness: worst.map(|(_, _, w)| w),
        pass,
        max_modulus_ok: Some(max_mod_ok),
    })
}

/// Consequence check for the containment `SK(alpha) c Q(gamma(alpha))`:
/// runs the Q-membership of the extremal candidate at `gamma = q_order(alpha)`
/// and reports the measured margin.
pub fn theorem1_consequence_check(
    alpha: AlphaParam,
    radii: &[f64],
    samples: usize,
) -> Result<BoundReport, MembershipError> {
    let gamma = kernel::q_order(alpha)?;
    let max_r = radii.iter().copied().fold(0.0, f64::max);
    let order = kernel::order_for_radius(max_r);
    let phi = crate::extremal::extremal_series(alpha, order);
    let rep = membership_q(&phi, gamma, radii, samples, 1e-12)?;
    let measured = rep.worst_witness.map(|w| w.value.re).unwrap_or(f64::INFINITY);
    let margin = measured - gamma;
    let witness = serde_json::to_value(&rep.worst_witness).unwrap_or(serde_json::Value::Null);
    Ok(BoundReport::new(gamma, measured, margin, witness, rep.pass, 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::extremal_series;
    use approx::assert_abs_diff_eq;

    fn alpha(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }

    fn sample_curve<F: Fn(f64) -> Complex64>(gen: &F, n: usize) -> Vec<Complex64> {
        (0..n).map(|j| gen(2.0 * PI * j as f64 / n as f64)).collect()
    }

    #[test]
    fn winding_validates_on_circles() {
        let circle = |theta: f64| Complex64::from_polar(2.0, theta);
        let base = sample_curve(&circle, 64);
        for q in [
            Complex64::ZERO,
            Complex64::new(0.5, 0.3),
            Complex64::new(-1.2, 0.9),
        ] {
            assert_eq!(winding_number(&circle, &base, q).unwrap(), 1);
        }
        for q in [Complex64::new(3.0, 0.0), Complex64::new(0.0, -2.5)] {
            assert_eq!(winding_number(&circle, &base, q).unwrap(), 0);
        }
        // clockwise circle winds -1
        let cw = |theta: f64| Complex64::from_polar(1.0, -theta);
        let base = sample_curve(&cw, 64);
        assert_eq!(winding_number(&cw, &base, Complex64::ZERO).unwrap(), -1);
    }

    #[test]
    fn winding_refines_coarse_grids() {
        // 8 base samples force adaptive bisection near the query point.
        let circle = |theta: f64| Complex64::from_polar(1.0, theta);
        let base = sample_curve(&circle, 8);
        assert_eq!(
            winding_number(&circle, &base, Complex64::new(0.9, 0.0)).unwrap(),
            1
        );
    }

    #[test]
    fn tail_estimate_behavior() {
        // polynomial: no tail
        let p = TruncatedSeries::from_real(&[1.0, 2.0, 3.0]).truncated(64);
        assert_eq!(tail_estimate(&p, 0.99).unwrap(), 0.0);
        // geometric coefficients at r = 0.5: small tail
        let g = TruncatedSeries::from_real(&vec![1.0; 65]);
        let t = tail_estimate(&g, 0.5).unwrap();
        assert!(t > 0.0 && t < 1e-18);
        // growing coefficients at large r: rejected
        let bad = TruncatedSeries::from_real(&(0..=64).map(|n| 2.0f64.powi(n)).collect::<Vec<_>>());
        assert!(tail_estimate(&bad, 0.9).is_err());
    }

    #[test]
    fn extremal_passes_sk_membership() {
        for a in [-1.0, 0.0, 1.0] {
            let ap = alpha(a);
            let phi = extremal_series(ap, 1024);
            let rep = membership_sk(&phi, ap, &[0.5, 0.9], 256).unwrap();
            assert!(rep.pass, "phi_{a} rejected: {:?}", rep.contained);
        }
    }

    #[test]
    fn identity_passes_sk_membership_everywhere() {
        let id = NormalizedSeries::identity(64);
        for a in [-2.9, -1.0, 0.0, 1.0] {
            let rep = membership_sk(&id, alpha(a), &[0.5, 0.9], 128).unwrap();
            assert!(rep.pass);
        }
    }

    #[test]
    fn koebe_fails_sk_membership_at_alpha_one() {
        let k = NormalizedSeries::koebe(1024);
        let rep = membership_sk(&k, alpha(1.0), &[0.5, 0.9], 256).unwrap();
        assert!(!rep.pass);
        let w = rep.worst_witness.unwrap();
        // Re z f'/f dips toward 0 near theta = pi, far below the kernel region.
        assert!((w.theta - PI).abs() < 1.0, "witness theta {}", w.theta);
        assert!(w.value.re < 0.5);
    }

    #[test]
    fn membership_failure_is_monotone_in_radius() {
        let k = NormalizedSeries::koebe(1024);
        let rep = membership_sk(&k, alpha(1.0), &[0.3, 0.5, 0.7, 0.9], 128).unwrap();
        let mut seen_failure = false;
        for &c in &rep.contained {
            if seen_failure {
                assert!(!c, "containment regained at a larger radius");
            }
            seen_failure |= !c;
        }
        assert!(seen_failure);
    }

    #[test]
    fn membership_q_examples() {
        // phi_0 = z/(1-z) vs gamma = 1/2: sharp but passing.
        let phi0 = extremal_series(alpha(0.0), 1024);
        let rep = membership_q(&phi0, 0.5, &[0.5, 0.9], 256, 1e-12).unwrap();
        assert!(rep.pass);
        let w = rep.worst_witness.unwrap();
        assert_abs_diff_eq!(w.value.re, 1.0 / 1.9, epsilon = 1e-9);

        // Koebe fails: inf Re f/z -> 1/4.
        let k = NormalizedSeries::koebe(1024);
        let rep = membership_q(&k, 0.5, &[0.9], 256, 1e-12).unwrap();
        assert!(!rep.pass);

        // f = z passes any gamma < 1.
        let id = NormalizedSeries::identity(8);
        let rep = membership_q(&id, 0.99, &[0.5, 0.9], 64, 1e-12).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn subordination_definitional_cases() {
        let ap = alpha(0.5);
        let g = kernel::q_alpha_series(ap, 512);
        // f = g o (z/2)
        let half = TruncatedSeries::from_real(&[0.0, 0.5]).truncated(512);
        let f = g.compose(&half).unwrap();
        let rep = subordination_check(&f, &g, &[0.5, 0.9], 128).unwrap();
        assert!(rep.pass, "{rep:?}");

        // f = g (identity Schwarz function)
        let rep = subordination_check(&g, &g, &[0.5, 0.9], 128).unwrap();
        assert!(rep.pass);

        // mismatched origin values fail immediately
        let shifted = g.add(&TruncatedSeries::constant(Complex64::new(0.25, 0.0), 512));
        let rep = subordination_check(&shifted, &g, &[0.5], 128).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn subordination_never_passes_containment_while_failing_max_modulus() {
        let ap = alpha(1.0);
        let g = kernel::q_alpha_series(ap, 512);
        let ws = [
            TruncatedSeries::from_real(&[0.0, 0.5]).truncated(512),
            TruncatedSeries::from_real(&[0.0, 0.3, 0.3, 0.2]).truncated(512),
        ];
        for w in ws {
            let f = g.compose(&w).unwrap();
            let rep = subordination_check(&f, &g, &[0.4, 0.8], 128).unwrap();
            let mm = rep.max_modulus_ok.unwrap();
            for (i, &c) in rep.contained.iter().enumerate() {
                assert!(!c || mm[i], "containment passed but max-modulus failed at {i}");
            }
        }
    }

    #[test]
    fn theorem1_consequence_examples() {
        let rep = theorem1_consequence_check(alpha(0.0), &[0.5, 0.9, 0.99], 256).unwrap();
        assert!(rep.pass);
        // sharp case: margin shrinks toward 0 as r -> 1 (1/(1+r) - 1/2)
        assert!(rep.margin > 0.0 && rep.margin < 0.01, "margin {}", rep.margin);

        let rep = theorem1_consequence_check(alpha(1.0), &[0.5, 0.9], 256).unwrap();
        assert!(rep.pass);
        assert_abs_diff_eq!(rep.claim, 7.0 / 15.0, epsilon = 1e-15);

        let rep = theorem1_consequence_check(alpha(0.5), &[0.5, 0.9], 256).unwrap();
        assert!(rep.pass);
        assert_abs_diff_eq!(rep.claim, 44.0 / 93.0, epsilon = 1e-15);
    }
}
