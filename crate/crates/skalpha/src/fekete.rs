//! Fekete-Szego functionals for kth-root transforms and inverse functions,
//! with a brute-force oracle over the Caratheodory coefficient body.
//!
//! Every sharp bound here reduces to the elementary estimate
//! `|c_2 - mu c_1^2| <= 2 max{1, |2 mu - 1|}` on the class P. The oracle
//! sweeps two-point convex combinations of the extreme kernels
//! `(1 + x z)/(1 - x z)`, `|x| = 1`, which realize every pair `(p_1, p_2)`
//! that can maximize a functional affine in `p_2`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

use crate::kernel::{q_alpha_coeff, AlphaParam};
use crate::report::BoundReport;

#[derive(Debug, Error)]
pub enum FeketeError {
    #[error("grid too coarse: refinement moved the maximum by {delta:.3e} (> {tol:.3e})")]
    GridTooCoarse { delta: f64, tol: f64 },
}

/// Which value of the second kernel coefficient a bound is computed with.
///
/// `Derived` uses the Taylor coefficient `B_2 = (a^2 - 3a + 9)/9` confirmed by
/// the recurrence oracle. `Printed` is the closed-form bound as commonly
/// stated, which is algebraically equivalent to halving `B_2`; the brute-force
/// oracle measures which variant each configuration actually attains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundVariant {
    Derived,
    Printed,
}

/// Second kernel coefficient under the given reading.
pub fn b2_value(alpha: AlphaParam, variant: BoundVariant) -> f64 {
    let a = alpha.get();
    let b2 = (a * a - 3.0 * a + 9.0) / 9.0;
    match variant {
        BoundVariant::Derived => b2,
        BoundVariant::Printed => 0.5 * b2,
    }
}

/// A realizable pair of leading Caratheodory coefficients together with the
/// generating parameters `p = t k_{x1} + (1-t) k_{x2}`, `x_j = e^{i theta_j}`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CaratheodoryPoint {
    pub p1: Complex64,
    pub p2: Complex64,
    pub witness: (f64, f64, f64),
}

impl CaratheodoryPoint {
    pub fn from_witness(t: f64, theta1: f64, theta2: f64) -> Self {
        let x1 = Complex64::from_polar(1.0, theta1);
        let x2 = Complex64::from_polar(1.0, theta2);
        CaratheodoryPoint {
            p1: 2.0 * (t * x1 + (1.0 - t) * x2),
            p2: 2.0 * (t * x1 * x1 + (1.0 - t) * x2 * x2),
            witness: (t, theta1, theta2),
        }
    }

    /// Coefficient-body membership: `|p1| <= 2` and
    /// `|p2 - p1^2/2| <= 2 - |p1|^2/2`, up to `tol`.
    pub fn in_coefficient_body(&self, tol: f64) -> bool {
        let p1n = self.p1.norm();
        p1n <= 2.0 + tol
            && (self.p2 - 0.5 * self.p1 * self.p1).norm() <= 2.0 - 0.5 * p1n * p1n + tol
    }
}

/// Leading coefficients of `f` in SK(alpha) realized by a Caratheodory point:
/// `a_2 = B_1 p_1 / 2`,
/// `a_3 = (B_1^2 + B_2) p_1^2 / 8 + B_1 (p_2 - p_1^2/2) / 4`.
pub fn coeffs_from_p(alpha: AlphaParam, point: &CaratheodoryPoint) -> (Complex64, Complex64) {
    let b1 = q_alpha_coeff(alpha, 1);
    let b2 = q_alpha_coeff(alpha, 2);
    let p1sq = point.p1 * point.p1;
    let a2 = 0.5 * b1 * point.p1;
    let a3 = (b1 * b1 + b2) / 8.0 * p1sq + 0.25 * b1 * (point.p2 - 0.5 * p1sq);
    (a2, a3)
}

/// Coefficients of the kth root transform:
/// `b_{k+1} = a_2/k`, `b_{2k+1} = a_3/k - (k-1) a_2^2 / (2k^2)`.
pub fn root_transform_coeffs(a2: Complex64, a3: Complex64, k: u32) -> (Complex64, Complex64) {
    let kf = k as f64;
    let bk1 = a2 / kf;
    let b2k1 = a3 / kf - (kf - 1.0) / (2.0 * kf * kf) * a2 * a2;
    (bk1, b2k1)
}

/// The reduced parameter `mu' = ((2mu-1)/k * B_1 - B_2/B_1 + 1) / 2` that maps
/// the transform functional onto the class-P estimate.
pub fn mu_prime(alpha: AlphaParam, k: u32, mu: Complex64) -> Complex64 {
    mu_prime_with(alpha, k, mu, BoundVariant::Derived)
}

pub fn mu_prime_with(alpha: AlphaParam, k: u32, mu: Complex64, variant: BoundVariant) -> Complex64 {
    let b1 = q_alpha_coeff(alpha, 1);
    let b2 = b2_value(alpha, variant);
    0.5 * ((2.0 * mu - Complex64::ONE) / (k as f64) * b1 - b2 / b1 + Complex64::ONE)
}

/// Sharp bound for `|b_{2k+1} - mu b_{k+1}^2|` under the selected reading.
///
/// Both variants have the form `(B_1 / 2k) max{1, |2 mu' - 1|}`; the printed
/// closed form `(3-a)/(6k) max{1, |(2mu-1)/k (1-a/3) - (a^2-3a+9)/(6(3-a))|}`
/// is exactly the `Printed` reading of `B_2`.
pub fn fs_bound(alpha: AlphaParam, k: u32, mu: Complex64, variant: BoundVariant) -> f64 {
    let b1 = q_alpha_coeff(alpha, 1);
    let two_mu_prime_minus_one = 2.0 * mu_prime_with(alpha, k, mu, variant) - Complex64::ONE;
    b1 / (2.0 * k as f64) * two_mu_prime_minus_one.norm().max(1.0)
}

/// `|b_{2k+1} - mu b_{k+1}^2|` evaluated through the coefficient chain; this
/// is the quantity the oracle maximizes and is independent of the bound
/// derivation above.
pub fn functional_value(alpha: AlphaParam, k: u32, mu: Complex64, point: &CaratheodoryPoint) -> f64 {
    let (a2, a3) = coeffs_from_p(alpha, point);
    let (bk1, b2k1) = root_transform_coeffs(a2, a3, k);
    (b2k1 - mu * bk1 * bk1).norm()
}

/// Witness-grid resolution for the brute-force searches.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    pub t_steps: usize,
    pub theta_steps: usize,
    /// Reject the run when the local refinement pass moves the maximum by
    /// more than this.
    pub refine_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { t_steps: 101, theta_steps: 360, refine_tol: 1e-3 }
    }
}

impl GridSpec {
    pub fn samples(&self) -> usize {
        self.t_steps * self.theta_steps * self.theta_steps
    }
}

/// Outcome of a brute-force sharpness search.
#[derive(Clone, Debug, Serialize)]
pub struct SharpnessResult {
    pub bound_derived: f64,
    pub bound_printed: f64,
    pub oracle_max: f64,
    pub argmax_witness: CaratheodoryPoint,
    pub samples: usize,
}

impl SharpnessResult {
    /// The oracle exceeds the derived bound: a genuine failure.
    pub fn exceeds_derived(&self, tol: f64) -> bool {
        self.oracle_max > self.bound_derived + tol
    }

    /// The oracle exceeds the printed bound while staying below the derived
    /// one: refutation evidence against the printed constant.
    pub fn refutes_printed(&self, tol: f64) -> bool {
        !self.exceeds_derived(tol) && self.oracle_max > self.bound_printed + tol
    }

    /// The derived bound is attained by some witness (sharpness).
    pub fn attains_derived(&self, slack: f64) -> bool {
        self.oracle_max >= self.bound_derived - slack
    }
}

fn grid_max<F>(value: &F, grid: &GridSpec) -> (f64, (f64, f64, f64))
where
    F: Fn(&CaratheodoryPoint) -> f64 + Sync,
{
    let nt = grid.t_steps.max(2);
    let na = grid.theta_steps.max(4);
    let thetas: Vec<f64> = (0..na).map(|j| 2.0 * PI * j as f64 / na as f64).collect();
    let best = (0..nt)
        .into_par_iter()
        .map(|it| {
            let t = it as f64 / (nt - 1) as f64;
            let mut local = (f64::NEG_INFINITY, (t, 0.0, 0.0));
            for &th1 in &thetas {
                for &th2 in &thetas {
                    let v = value(&CaratheodoryPoint::from_witness(t, th1, th2));
                    if v > local.0 {
                        local = (v, (t, th1, th2));
                    }
                }
            }
            local
        })
        .reduce(
            || (f64::NEG_INFINITY, (f64::INFINITY, f64::INFINITY, f64::INFINITY)),
            |a, b| {
                // deterministic: larger value wins, lexicographic witness breaks ties
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    best
}

fn refine_max<F>(value: &F, grid: &GridSpec, seed: (f64, f64, f64)) -> (f64, (f64, f64, f64))
where
    F: Fn(&CaratheodoryPoint) -> f64 + Sync,
{
    let (t0, th1_0, th2_0) = seed;
    let dt = 1.0 / (grid.t_steps.max(2) - 1) as f64;
    let dth = 2.0 * PI / grid.theta_steps.max(4) as f64;
    let steps = 10i32;
    let mut best = (value(&CaratheodoryPoint::from_witness(t0, th1_0, th2_0)), seed);
    for it in -steps..=steps {
        let t = (t0 + it as f64 * dt / steps as f64).clamp(0.0, 1.0);
        for i1 in -steps..=steps {
            let th1 = th1_0 + i1 as f64 * dth / steps as f64;
            for i2 in -steps..=steps {
                let th2 = th2_0 + i2 as f64 * dth / steps as f64;
                let v = value(&CaratheodoryPoint::from_witness(t, th1, th2));
                if v > best.0 {
                    best = (v, (t, th1, th2));
                }
            }
        }
    }
    best
}

/// Maximizes the transform functional over the witness grid, with one local
/// refinement pass, and compares against both bound variants.
pub fn brute_force_max(
    alpha: AlphaParam,
    k: u32,
    mu: Complex64,
    grid: &GridSpec,
) -> Result<SharpnessResult, FeketeError> {
    let value = |p: &CaratheodoryPoint| functional_value(alpha, k, mu, p);
    let (coarse, seed) = grid_max(&value, grid);
    let (refined, witness) = refine_max(&value, grid, seed);
    if refined - coarse > grid.refine_tol {
        return Err(FeketeError::GridTooCoarse { delta: refined - coarse, tol: grid.refine_tol });
    }
    let (t, th1, th2) = witness;
    Ok(SharpnessResult {
        bound_derived: fs_bound(alpha, k, mu, BoundVariant::Derived),
        bound_printed: fs_bound(alpha, k, mu, BoundVariant::Printed),
        oracle_max: refined.max(coarse),
        argmax_witness: CaratheodoryPoint::from_witness(t, th1, th2),
        samples: grid.samples(),
    })
}

/// Brute-force check of the class-P estimate
/// `|p_2 - mu p_1^2| <= 2 max{1, |2 mu - 1|}`; the maximum must land within
/// `tol` of the bound (attainment and no excess).
pub fn fek_lemma_check(mu: Complex64, grid: &GridSpec, tol: f64) -> BoundReport {
    let value = |p: &CaratheodoryPoint| (p.p2 - mu * p.p1 * p.p1).norm();
    let (coarse, seed) = grid_max(&value, grid);
    let (refined, witness) = refine_max(&value, grid, seed);
    let measured = refined.max(coarse);
    let claim = 2.0 * (2.0 * mu - Complex64::ONE).norm().max(1.0);
    let margin = claim - measured;
    let (t, th1, th2) = witness;
    let report_witness = serde_json::json!({
        "t": t, "theta1": th1, "theta2": th2,
        "samples": grid.samples(),
    });
    BoundReport::new(claim, measured, margin, report_witness, margin.abs() <= tol, tol)
}

/// Leading coefficients of the inverse function
/// `f^{-1}(w) = w - a_2 w^2 + (2a_2^2 - a_3) w^3 - (5a_2^3 - 5a_2 a_3 + a_4) w^4 + ...`.
pub fn inverse_coeffs(
    a2: Complex64,
    a3: Complex64,
    a4: Complex64,
) -> (Complex64, Complex64, Complex64) {
    let b2 = -a2;
    let b3 = 2.0 * a2 * a2 - a3;
    let b4 = -(5.0 * a2 * a2 * a2 - 5.0 * a2 * a3 + a4);
    (b2, b3, b4)
}

/// Printed bound on the third inverse coefficient:
/// `|b_3| <= (3-a)/6 max{1, |(5a^2 - 33a + 45)/(6(3-a))|}`. Coincides with
/// `fs_bound(alpha, 1, 2, Printed)` because `b_3 = -(a_3 - 2 a_2^2)`.
pub fn inverse_b3_bound(alpha: AlphaParam) -> f64 {
    let a = alpha.get();
    (3.0 - a) / 6.0 * ((5.0 * a * a - 33.0 * a + 45.0) / (6.0 * (3.0 - a))).abs().max(1.0)
}
