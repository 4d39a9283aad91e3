//! The extremal function `phi_a`, logarithmic coefficients, the dilogarithm,
//! and the logarithmic-coefficient inequalities for SK(alpha).
//!
//! `phi_a(z) = z exp int_0^z (q_a(t) - 1)/t dt` is the sharpness witness: its
//! logarithmic coefficients are exactly `B_n / (2n)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::kernel::{q_alpha_coeff, q_alpha_series, AlphaParam};
use crate::report::BoundReport;
use crate::series::{NormalizedSeries, SeriesError, TruncatedSeries};

#[derive(Debug, Error)]
pub enum ExtremalError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("series order {order} provides only {available} logarithmic coefficients, {requested} requested")]
    OrderTooSmall { order: usize, available: usize, requested: usize },
    #[error("tail bound {tail:.3e} exceeds tol/2 = {budget:.3e}; increase the number of terms")]
    InsufficientTerms { tail: f64, budget: f64 },
}

/// Coefficients of `phi_a` to the given order, built through the series
/// pipeline: termwise integration of `q_a - 1` against `dt/t`, exponential,
/// then a shift by `z`.
pub fn extremal_series(alpha: AlphaParam, order: usize) -> NormalizedSeries {
    let order = order.max(1);
    let mut g = q_alpha_series(alpha, order - 1);
    g = g.sub(&TruncatedSeries::one(order - 1));
    let integrated = g.integrate_dt_over_t().expect("q_a - 1 has zero constant term");
    let u = integrated.exp_zero().expect("integral has zero constant term");
    NormalizedSeries::new(u.shift_up()).expect("z * exp(...) is normalized")
}

/// Logarithmic coefficients `gamma_1..gamma_n` of a normalized function,
/// defined by `log(f/z) = sum 2 gamma_n z^n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LogCoeffs {
    pub gammas: Vec<Complex64>,
}

impl LogCoeffs {
    /// `gamma_n`, 1-indexed.
    pub fn gamma(&self, n: usize) -> Complex64 {
        self.gammas[n - 1]
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }
}

/// Extracts `gamma_1..gamma_n` from a normalized series; requires the series
/// to carry at least `n + 1` coefficients.
pub fn log_coeffs(f: &NormalizedSeries, n: usize) -> Result<LogCoeffs, ExtremalError> {
    let available = f.order().saturating_sub(1);
    if n > available {
        return Err(ExtremalError::OrderTooSmall {
            order: f.order(),
            available,
            requested: n,
        });
    }
    let u = f.series().shift_down()?;
    let log = u.truncated(n).log_unit()?;
    let gammas = (1..=n).map(|k| 0.5 * log.coeff(k)).collect();
    Ok(LogCoeffs { gammas })
}

/// Dilogarithm value with an explicit error certificate.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DilogResult {
    pub value: f64,
    pub terms_used: usize,
    /// Rigorous bound on `|true value - value|`: geometric for `|x| < 1`,
    /// the first omitted term for the alternating case `x = -1`, zero for
    /// the exact constant at `x = 1`.
    pub tail_bound: f64,
}

/// Stop once the certified tail drops below this target.
const DILOG_TAIL_TARGET: f64 = 1e-12;
const DILOG_MAX_TERMS: usize = 4_000_000;

/// `Li_2(x) = sum_{n>=1} x^n / n^2` for `|x| <= 1` by direct summation.
/// `x = 1` returns the exact constant `pi^2/6`.
pub fn dilog(x: f64) -> DilogResult {
    assert!(x.abs() <= 1.0, "dilog requires |x| <= 1, got {x}");
    if x == 1.0 {
        return DilogResult { value: PI * PI / 6.0, terms_used: 0, tail_bound: 0.0 };
    }
    let mut value = 0.0f64;
    let mut power = 1.0f64;
    let mut n = 0usize;
    loop {
        n += 1;
        power *= x;
        value += power / (n * n) as f64;
        let tail = dilog_tail_bound(x, n);
        if tail <= DILOG_TAIL_TARGET || n >= DILOG_MAX_TERMS {
            return DilogResult { value, terms_used: n, tail_bound: tail };
        }
    }
}

/// Fixed-term partial sum with the same tail certificate; used as the
/// recomputation oracle.
pub fn dilog_terms(x: f64, terms: usize) -> DilogResult {
    assert!(x.abs() <= 1.0, "dilog requires |x| <= 1, got {x}");
    if x == 1.0 {
        return DilogResult { value: PI * PI / 6.0, terms_used: 0, tail_bound: 0.0 };
    }
    let mut value = 0.0f64;
    let mut power = 1.0f64;
    for n in 1..=terms {
        power *= x;
        value += power / (n * n) as f64;
    }
    DilogResult { value, terms_used: terms, tail_bound: dilog_tail_bound(x, terms) }
}

fn dilog_tail_bound(x: f64, n: usize) -> f64 {
    let ax = x.abs();
    let np1 = (n + 1) as f64;
    if ax < 1.0 {
        ax.powi(n as i32 + 1) / (np1 * np1 * (1.0 - ax))
    } else {
        // alternating series at x = -1: first omitted term
        1.0 / (np1 * np1)
    }
}

/// Closed-form right-hand side of the logarithmic-coefficient energy bound:
/// `[3 pi^2/2 + 6 a Li2(-a/3) + a^2 Li2(a^2/9)] / (4 (3+a)^2)`.
pub fn log_energy_rhs(alpha: AlphaParam) -> f64 {
    let a = alpha.get();
    let li_neg = dilog(-a / 3.0).value;
    let li_sq = dilog(a * a / 9.0).value;
    (1.5 * PI * PI + 6.0 * a * li_neg + a * a * li_sq) / (4.0 * (3.0 + a) * (3.0 + a))
}

/// Rigorous enclosure of the energy tail `sum_{m>n} B_m^2 / (4 m^2)` from the
/// coefficient majorant/minorant `B_m = (3/(3+a)) (1 ± t^{m+1})`, `t = |a|/3`,
/// with the zeta tail bracketed by `1/(n+1) <= sum_{m>n} 1/m^2 <= 1/n`.
pub fn energy_tail_interval(alpha: AlphaParam, n: usize) -> (f64, f64) {
    let a = alpha.get();
    let t = a.abs() / 3.0;
    let base = 9.0 / (4.0 * (3.0 + a) * (3.0 + a));
    let np1 = (n + 1) as f64;
    let zeta_hi = 1.0 / n as f64;
    let zeta_lo = 1.0 / np1;
    let geo1 = t.powi(n as i32 + 1) / (np1 * np1 * (1.0 - t));
    let geo2 = (t * t).powi(n as i32 + 1) / (np1 * np1 * (1.0 - t * t));
    let hi = base * (zeta_hi + 2.0 * t * geo1 + t * t * geo2);
    let minorant = 1.0 - t.powi(n as i32 + 2);
    let lo = base * minorant * minorant * zeta_lo;
    (lo.max(0.0), hi)
}

/// Compensated (Kahan) sum of `|gamma_n|^2`; deterministic and immune to the
/// summation-order noise a plain fold would pick up at 10^4 terms.
pub fn log_energy_partial(gammas: &LogCoeffs) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for g in &gammas.gammas {
        let term = g.norm_sqr() - carry;
        let next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    sum
}

/// Sharpness check of the energy bound at the extremal function: the partial
/// sum of `|gamma_n(phi_a)|^2` plus the certified tail must meet
/// [`log_energy_rhs`] within `tol`.
pub fn verify_log_energy(alpha: AlphaParam, terms: usize, tol: f64) -> Result<BoundReport, ExtremalError> {
    let phi = extremal_series(alpha, terms + 1);
    verify_log_energy_impl(&phi, alpha, terms, tol, true)
}

/// Inequality check of the energy bound for an arbitrary member function:
/// partial sum plus tail interval must stay at or below [`log_energy_rhs`].
pub fn verify_log_energy_of(
    f: &NormalizedSeries,
    alpha: AlphaParam,
    terms: usize,
    tol: f64,
) -> Result<BoundReport, ExtremalError> {
    verify_log_energy_impl(f, alpha, terms, tol, false)
}

fn verify_log_energy_impl(
    f: &NormalizedSeries,
    alpha: AlphaParam,
    terms: usize,
    tol: f64,
    require_equality: bool,
) -> Result<BoundReport, ExtremalError> {
    let (tail_lo, tail_hi) = energy_tail_interval(alpha, terms);
    if tail_hi > tol / 2.0 {
        return Err(ExtremalError::InsufficientTerms { tail: tail_hi, budget: tol / 2.0 });
    }
    let gammas = log_coeffs(f, terms)?;
    let partial = log_energy_partial(&gammas);
    let tail_mid = 0.5 * (tail_lo + tail_hi);
    let claim = log_energy_rhs(alpha);
    let measured = partial + tail_mid;
    let margin = claim - measured;
    let pass = if require_equality { margin.abs() <= tol } else { margin >= -tol };
    let witness = serde_json::json!({
        "partial": partial,
        "tail_lo": tail_lo,
        "tail_hi": tail_hi,
        "terms": terms,
    });
    Ok(BoundReport::new(claim, measured, margin, witness, pass, tol))
}

/// Per-coefficient bound `2n |gamma_n| <= 1 - a/3`: reports the worst
/// `2n |gamma_n|` over `n <= limit`.
///
/// At `n = 2` the witness also records what the extremal function would give
/// under each reading of the second kernel coefficient (`B_2` vs `B_2/2`);
/// the measurement side never corrects either way.
pub fn per_coeff_bound_check(
    f: &NormalizedSeries,
    alpha: AlphaParam,
    limit: usize,
    tol: f64,
) -> Result<BoundReport, ExtremalError> {
    let gammas = log_coeffs(f, limit)?;
    let claim = 1.0 - alpha.get() / 3.0;
    let mut measured = 0.0f64;
    let mut worst_n = 1usize;
    for n in 1..=limit {
        let v = 2.0 * n as f64 * gammas.gamma(n).norm();
        if v > measured {
            measured = v;
            worst_n = n;
        }
    }
    let margin = claim - measured;
    let b2 = q_alpha_coeff(alpha, 2);
    let witness = serde_json::json!({
        "n": worst_n,
        "value": measured,
        "extremal_prediction_b2": b2,
        "extremal_prediction_b2_halved": 0.5 * b2,
    });
    let pass = margin >= -tol;
    Ok(BoundReport::new(claim, measured, margin, witness, pass, tol))
}

/// Weighted partial-sum inequality on logarithmic coefficients:
/// `sum_{n<=k} (k-n+1) n |gamma_n|^2 <= sum_{n<=k} (k+1-n)/n`,
/// with equality exactly at Koebe rotations.
pub fn de_branges_partial_check(gammas: &LogCoeffs, k: usize, tol: f64) -> BoundReport {
    let k = k.min(gammas.len());
    let mut lhs = 0.0f64;
    let mut rhs = 0.0f64;
    for n in 1..=k {
        let w = (k - n + 1) as f64;
        lhs += w * n as f64 * gammas.gamma(n).norm_sqr();
        rhs += w / n as f64;
    }
    let margin = rhs - lhs;
    let witness = serde_json::json!({ "k": k });
    BoundReport::new(rhs, lhs, margin, witness, margin >= -tol, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn alpha(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }

    #[test]
    fn extremal_alpha_zero_is_geometric() {
        // phi_0 = z/(1-z): every coefficient 1.
        let phi = extremal_series(alpha(0.0), 64);
        for n in 1..=64 {
            assert_abs_diff_eq!(phi.series().coeff(n).re, 1.0, epsilon = 1e-11);
            assert_abs_diff_eq!(phi.series().coeff(n).im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn extremal_second_coefficient_is_b1() {
        for a in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0] {
            let phi = extremal_series(alpha(a), 16);
            assert_abs_diff_eq!(phi.series().coeff(2).re, (3.0 - a) / 3.0, epsilon = 1e-12);
            assert_eq!(phi.series().coeff(1), Complex64::ONE);
        }
    }

    #[test]
    fn log_coeffs_koebe_are_reciprocals() {
        let k = NormalizedSeries::koebe(64);
        let g = log_coeffs(&k, 32).unwrap();
        for n in 1..=32 {
            assert_abs_diff_eq!(g.gamma(n).re, 1.0 / n as f64, epsilon = 1e-12);
            assert_abs_diff_eq!(g.gamma(n).im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn log_coeffs_identity_vanish() {
        let id = NormalizedSeries::identity(16);
        let g = log_coeffs(&id, 8).unwrap();
        for n in 1..=8 {
            assert_eq!(g.gamma(n), Complex64::ZERO);
        }
    }

    #[test]
    fn log_coeffs_of_extremal_match_kernel_coefficients() {
        // gamma_n(phi_a) = B_n / (2n): ties extremal_series, log_coeffs and
        // q_alpha_coeff together.
        for a in [-2.9, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0] {
            let ap = alpha(a);
            let phi = extremal_series(ap, 65);
            let g = log_coeffs(&phi, 64).unwrap();
            for n in 1..=64 {
                let expect = q_alpha_coeff(ap, n) / (2.0 * n as f64);
                assert!(
                    (g.gamma(n).re - expect).abs() < 1e-10 && g.gamma(n).im.abs() < 1e-12,
                    "alpha={a} n={n}: gamma={} expect={expect}",
                    g.gamma(n).re
                );
            }
        }
    }

    #[test]
    fn log_coeffs_requires_enough_order() {
        let id = NormalizedSeries::identity(4);
        assert!(matches!(
            log_coeffs(&id, 10),
            Err(ExtremalError::OrderTooSmall { .. })
        ));
    }

    #[test]
    fn dilog_basics() {
        assert_eq!(dilog(0.0).value, 0.0);
        assert_abs_diff_eq!(dilog(1.0).value, PI * PI / 6.0, epsilon = 1e-16);
        assert_abs_diff_eq!(dilog(-1.0).value, -PI * PI / 12.0, epsilon = 1e-9);
        // frozen from a 40-digit independent evaluation
        assert_abs_diff_eq!(dilog(1.0 / 9.0).value, 0.114360206978510030, epsilon = 1e-12);
        assert_abs_diff_eq!(dilog(-1.0 / 3.0).value, -0.309033126487808472, epsilon = 1e-12);
        assert_abs_diff_eq!(dilog(1.0 / 3.0).value, 0.366213229977063488, epsilon = 1e-12);
    }

    #[test]
    fn dilog_oracle_recomputation_stays_within_tail() {
        let d = dilog(1.0 / 9.0);
        let oracle = dilog_terms(1.0 / 9.0, 200);
        assert!((d.value - oracle.value).abs() <= d.tail_bound);
        let d = dilog(-1.0 / 3.0);
        let oracle = dilog_terms(-1.0 / 3.0, 10 * d.terms_used);
        assert!((d.value - oracle.value).abs() <= d.tail_bound);
    }

    #[test]
    fn dilog_tail_brackets_refined_value() {
        for x in [-0.9, -0.5, -1.0 / 3.0, 0.1, 1.0 / 9.0, 0.5, 0.9] {
            let d = dilog(x);
            let refined = dilog_terms(x, 10 * d.terms_used.max(4));
            assert!(
                (d.value - refined.value).abs() <= d.tail_bound + 1e-15,
                "x={x}: diff {} > tail {}",
                (d.value - refined.value).abs(),
                d.tail_bound
            );
        }
    }

    #[test]
    fn log_energy_rhs_alpha_zero_is_pi2_over_24() {
        assert_abs_diff_eq!(log_energy_rhs(alpha(0.0)), PI * PI / 24.0, epsilon = 1e-14);
    }

    #[test]
    fn log_energy_rhs_pinned_values() {
        // frozen from a 40-digit independent evaluation of the closed form
        assert_abs_diff_eq!(log_energy_rhs(alpha(-1.0)), 0.795092964296885440, epsilon = 1e-11);
        assert_abs_diff_eq!(log_energy_rhs(alpha(0.5)), 0.292465731338764868, epsilon = 1e-11);
        assert_abs_diff_eq!(log_energy_rhs(alpha(1.0)), 0.204133875776339018, epsilon = 1e-11);
    }

    #[test]
    fn log_energy_alpha_zero_closed_form_cross_check() {
        // phi_0 = z/(1-z) has gamma_n = 1/(2n): the energy is exactly pi^2/24.
        let mut sum = 0.0;
        for n in 1..=200_000u64 {
            sum += 1.0 / (4.0 * (n * n) as f64);
        }
        assert!((log_energy_rhs(alpha(0.0)) - sum).abs() < 2e-6);
    }

    #[test]
    fn verify_log_energy_sharp_at_extremal() {
        let rep = verify_log_energy(alpha(0.0), 2000, 1e-3).unwrap();
        assert!(rep.pass, "margin {}", rep.margin);
        let rep = verify_log_energy(alpha(1.0), 2000, 1e-3).unwrap();
        assert!(rep.pass, "margin {}", rep.margin);
    }

    #[test]
    fn verify_log_energy_rejects_short_sums() {
        assert!(matches!(
            verify_log_energy(alpha(0.5), 50, 1e-9),
            Err(ExtremalError::InsufficientTerms { .. })
        ));
    }

    #[test]
    fn log_energy_strict_for_proper_subordination() {
        // f with z f'/f = q_a(z/2): gamma_n = B_n 2^{-n} / (2n), well inside
        // the bound.
        let ap = alpha(0.5);
        let order = 600;
        let q = q_alpha_series(ap, order);
        let half_z = TruncatedSeries::from_real(&[0.0, 0.5]).truncated(order);
        let g = q.compose(&half_z).unwrap().sub(&TruncatedSeries::one(order));
        let f = NormalizedSeries::new(
            g.integrate_dt_over_t().unwrap().exp_zero().unwrap().shift_up(),
        )
        .unwrap();
        let rep = verify_log_energy_of(&f, ap, 500, 1e-3).unwrap();
        assert!(rep.pass);
        assert!(rep.margin > 0.05, "expected a wide margin, got {}", rep.margin);
    }

    #[test]
    fn energy_partial_sums_are_monotone_and_bounded() {
        let ap = alpha(1.0);
        let phi = extremal_series(ap, 513);
        let g = log_coeffs(&phi, 512).unwrap();
        let mut prev = 0.0;
        let mut sum = 0.0;
        for n in 1..=512 {
            sum += g.gamma(n).norm_sqr();
            assert!(sum >= prev);
            prev = sum;
        }
        let (_, tail_hi) = energy_tail_interval(ap, 512);
        assert!(sum <= log_energy_rhs(ap) + tail_hi);
    }

    #[test]
    fn per_coeff_bound_attained_at_n_equals_one() {
        for a in [-1.0, 0.0, 0.5] {
            let ap = alpha(a);
            let phi = extremal_series(ap, 16);
            let rep = per_coeff_bound_check(&phi, ap, 1, 1e-10).unwrap();
            assert!(rep.pass);
            assert!(rep.margin.abs() < 1e-10, "bound should be attained at n=1");
        }
    }

    #[test]
    fn per_coeff_bound_violated_at_n_two_for_alpha_one() {
        // The measured 2n|gamma_n| at n = 2 for the extremal function equals
        // the true second kernel coefficient 7/9, which exceeds the claimed
        // bound 2/3; the halved reading (7/18) would not. The check records
        // the violation instead of correcting either side.
        let ap = alpha(1.0);
        let phi = extremal_series(ap, 16);
        let rep = per_coeff_bound_check(&phi, ap, 8, 1e-10).unwrap();
        assert!(!rep.pass);
        assert_abs_diff_eq!(rep.measured, 7.0 / 9.0, epsilon = 1e-10);
        assert_abs_diff_eq!(rep.claim, 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(rep.witness["n"], 2);
    }

    #[test]
    fn per_coeff_bound_trivial_for_identity() {
        let ap = alpha(0.5);
        let id = NormalizedSeries::identity(16);
        let rep = per_coeff_bound_check(&id, ap, 8, 1e-10).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.measured, 0.0);
    }

    #[test]
    fn de_branges_equality_for_koebe() {
        let k = NormalizedSeries::koebe(64);
        let g = log_coeffs(&k, 32).unwrap();
        for kk in [1usize, 5, 10] {
            let rep = de_branges_partial_check(&g, kk, 1e-9);
            assert!(rep.pass);
            assert!(rep.margin.abs() <= 1e-9, "k={kk}: margin {}", rep.margin);
        }
    }

    #[test]
    fn de_branges_trivial_for_identity() {
        let id = NormalizedSeries::identity(16);
        let g = log_coeffs(&id, 8).unwrap();
        let rep = de_branges_partial_check(&g, 5, 1e-12);
        assert!(rep.pass);
        assert_eq!(rep.measured, 0.0);
    }

    #[test]
    fn de_branges_strict_for_extremal_alpha_one() {
        let phi = extremal_series(alpha(1.0), 32);
        let g = log_coeffs(&phi, 16).unwrap();
        let rep = de_branges_partial_check(&g, 10, 1e-12);
        assert!(rep.pass);
        assert!(rep.margin > 0.1, "margin {}", rep.margin);
    }
}
