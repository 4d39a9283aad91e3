//! Truncated complex power-series algebra.
//!
//! [`TruncatedSeries`] is the computational substrate for every analytic
//! function handled by this crate: a Taylor polynomial `c_0 + c_1 z + ... + c_N z^N`
//! stored as a dense coefficient vector. All binary operations truncate to the
//! shared order `min(N_a, N_b)`; nothing is ever silently extended.
//!
//! The exponential and logarithm use the standard convolution recurrences
//! derived from `f' = f * g'`, which are O(N^2) and numerically stable for the
//! coefficient growth encountered here (geometric decay or polynomial growth).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default truncation order for series-valued computations.
pub const DEFAULT_ORDER: usize = 64;
/// Hard cap on the truncation order.
pub const MAX_ORDER: usize = 4096;
/// Default absolute tolerance for coefficient comparisons.
pub const COEFF_TOL: f64 = 1e-10;

/// Tolerance used by structural preconditions on constant terms
/// (`c_0 = 0` for `exp_zero`, `c_0 = 1` for `log_unit`, ...).
const CONST_TERM_EPS: f64 = 1e-12;
/// Relative threshold below which a constant term counts as zero in `reciprocal`.
const RECIP_REL_EPS: f64 = 1e-14;
/// Absolute underflow guard for `reciprocal`.
const RECIP_ABS_FLOOR: f64 = 1e-300;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("series must have at least one coefficient")]
    Empty,
    #[error("order {0} exceeds the supported maximum {MAX_ORDER}")]
    OrderTooLarge(usize),
    #[error("constant term is numerically zero (|c0| = {0:.3e}); cannot invert")]
    ZeroConstantTerm(f64),
    #[error("operation requires constant term {expected}, found {found}")]
    BadConstantTerm { expected: f64, found: Complex64 },
    #[error("composition requires the inner series to have zero constant term")]
    CompositionRequiresZeroConstant,
    #[error("integrand must have zero constant term (found {0})")]
    NonzeroConstantTerm(Complex64),
    #[error("series is not normalized: requires c0 = 0 and c1 = 1 exactly")]
    NotNormalized,
    #[error("coefficient list of length {len} does not match order {order} (need order + 1 entries)")]
    LengthMismatch { order: usize, len: usize },
}

/// JSON wire format: `{"order": N, "coeffs": [[re, im], ...]}` with
/// `coeffs.len() == N + 1` and index = power of `z`.
#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    order: usize,
    coeffs: Vec<[f64; 2]>,
}

/// A complex Taylor polynomial truncated at a fixed order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr", into = "SeriesRepr")]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl TryFrom<SeriesRepr> for TruncatedSeries {
    type Error = SeriesError;

    fn try_from(repr: SeriesRepr) -> Result<Self, SeriesError> {
        if repr.coeffs.len() != repr.order + 1 {
            return Err(SeriesError::LengthMismatch {
                order: repr.order,
                len: repr.coeffs.len(),
            });
        }
        if repr.order > MAX_ORDER {
            return Err(SeriesError::OrderTooLarge(repr.order));
        }
        Ok(TruncatedSeries {
            coeffs: repr
                .coeffs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        })
    }
}

impl From<TruncatedSeries> for SeriesRepr {
    fn from(s: TruncatedSeries) -> SeriesRepr {
        SeriesRepr {
            order: s.order(),
            coeffs: s.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl TruncatedSeries {
    /// Builds a series from coefficients `c_0..c_N`; the order is `len - 1`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(TruncatedSeries { coeffs })
    }

    /// Builds a series from real coefficients.
    pub fn from_real(coeffs: &[f64]) -> Self {
        TruncatedSeries {
            coeffs: coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn zero(order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![Complex64::ZERO; order + 1],
        }
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Complex64::ONE, order)
    }

    /// The monomial `z` at the given order (order must be >= 1).
    pub fn identity_z(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[1] = Complex64::ONE;
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^n`; zero beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or(Complex64::ZERO)
    }

    /// Copy truncated (or zero-padded) to the given order.
    pub fn truncated(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Complex64::ZERO);
        TruncatedSeries { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order).map(|n| self.coeffs[n] + other.coeffs[n]).collect();
        TruncatedSeries { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order).map(|n| self.coeffs[n] - other.coeffs[n]).collect();
        TruncatedSeries { coeffs }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Cauchy product truncated to the shared order `min(N_a, N_b)`.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut coeffs = vec![Complex64::ZERO; order + 1];
        for (i, &a) in self.coeffs.iter().take(order + 1).enumerate() {
            if a == Complex64::ZERO {
                continue;
            }
            for (j, &b) in other.coeffs.iter().take(order + 1 - i).enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        TruncatedSeries { coeffs }
    }

    /// Multiplicative inverse: `b` with `a * b = 1` to the order of `a`.
    ///
    /// Fails when `|c_0|` is below the underflow floor or small relative to the
    /// largest coefficient magnitude.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let c0 = self.coeffs[0];
        let max_mag = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if c0.norm() < RECIP_ABS_FLOOR || c0.norm() < RECIP_REL_EPS * max_mag {
            return Err(SeriesError::ZeroConstantTerm(c0.norm()));
        }
        let n = self.order();
        let mut inv = vec![Complex64::ZERO; n + 1];
        let inv_c0 = c0.finv();
        inv[0] = inv_c0;
        for m in 1..=n {
            let mut acc = Complex64::ZERO;
            for k in 1..=m {
                acc += self.coeffs[k] * inv[m - k];
            }
            inv[m] = -inv_c0 * acc;
        }
        Ok(TruncatedSeries { coeffs: inv })
    }

    /// Logarithm of a series with constant term 1. The result has zero
    /// constant term and satisfies `exp_zero(log_unit(a)) = a` to order N.
    pub fn log_unit(&self) -> Result<Self, SeriesError> {
        if (self.coeffs[0] - Complex64::ONE).norm() > CONST_TERM_EPS {
            return Err(SeriesError::BadConstantTerm {
                expected: 1.0,
                found: self.coeffs[0],
            });
        }
        // From a' = a * L': n a_n = sum_{k=1..n} k L_k a_{n-k}.
        let n = self.order();
        let mut log = vec![Complex64::ZERO; n + 1];
        for m in 1..=n {
            let mut acc = Complex64::ZERO;
            for k in 1..m {
                acc += (k as f64) * log[k] * self.coeffs[m - k];
            }
            log[m] = self.coeffs[m] - acc / (m as f64);
        }
        Ok(TruncatedSeries { coeffs: log })
    }

    /// Exponential of a series with zero constant term; the result has
    /// constant term exactly 1.
    pub fn exp_zero(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0].norm() > CONST_TERM_EPS {
            return Err(SeriesError::BadConstantTerm {
                expected: 0.0,
                found: self.coeffs[0],
            });
        }
        // From b' = b * g': n b_n = sum_{k=1..n} k g_k b_{n-k}.
        let n = self.order();
        let mut exp = vec![Complex64::ZERO; n + 1];
        exp[0] = Complex64::ONE;
        let weighted: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &g)| (k as f64) * g)
            .collect();
        for m in 1..=n {
            let mut acc = Complex64::ZERO;
            for k in 1..=m {
                acc += weighted[k] * exp[m - k];
            }
            exp[m] = acc / (m as f64);
        }
        Ok(TruncatedSeries { coeffs: exp })
    }

    /// Composition `f(w(z))` truncated to the shared order. The inner series
    /// must have zero constant term.
    pub fn compose(&self, w: &Self) -> Result<Self, SeriesError> {
        if w.coeffs[0].norm() > CONST_TERM_EPS {
            return Err(SeriesError::CompositionRequiresZeroConstant);
        }
        let order = self.order().min(w.order());
        let w = w.truncated(order);
        // Horner: acc <- acc * w + f_n, from the top coefficient down.
        let mut acc = TruncatedSeries::constant(self.coeff(order), order);
        for n in (0..order).rev() {
            acc = acc.mul(&w);
            acc.coeffs[0] += self.coeffs[n];
        }
        Ok(acc)
    }

    /// Substitutes `z -> z^k`, spreading coefficient `c_n` to index `k*n`.
    /// The result has order `k * N`.
    pub fn dilate(&self, k: usize) -> Self {
        assert!(k >= 1, "dilation factor must be positive");
        let mut coeffs = vec![Complex64::ZERO; k * self.order() + 1];
        for (n, &c) in self.coeffs.iter().enumerate() {
            coeffs[k * n] = c;
        }
        TruncatedSeries { coeffs }
    }

    /// Termwise antiderivative of `g(t)/t`: the result `h` has `h_n = g_n / n`
    /// for `n >= 1` and `h_0 = 0`. Requires zero constant term.
    pub fn integrate_dt_over_t(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0].norm() > CONST_TERM_EPS {
            return Err(SeriesError::NonzeroConstantTerm(self.coeffs[0]));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, &c)| {
                if n == 0 {
                    Complex64::ZERO
                } else {
                    c / (n as f64)
                }
            })
            .collect();
        Ok(TruncatedSeries { coeffs })
    }

    /// Formal derivative; order drops by one (a constant differentiates to the
    /// zero series of order 0).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return TruncatedSeries::zero(0);
        }
        let coeffs = (1..=self.order())
            .map(|n| (n as f64) * self.coeffs[n])
            .collect();
        TruncatedSeries { coeffs }
    }

    /// Multiplies by `z`; every known coefficient is kept, so the order grows
    /// by one. The product is exact, no truncation is introduced.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::ZERO);
        coeffs.extend_from_slice(&self.coeffs);
        TruncatedSeries { coeffs }
    }

    /// Divides by `z`; requires zero constant term, order drops by one.
    pub fn shift_down(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0].norm() > CONST_TERM_EPS {
            return Err(SeriesError::NonzeroConstantTerm(self.coeffs[0]));
        }
        if self.order() == 0 {
            return Ok(TruncatedSeries::zero(0));
        }
        Ok(TruncatedSeries {
            coeffs: self.coeffs[1..].to_vec(),
        })
    }

    /// Horner evaluation of the truncated polynomial at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Largest absolute coefficient difference up to the shared order.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let order = self.order().min(other.order());
        (0..=order)
            .map(|n| (self.coeffs[n] - other.coeffs[n]).norm())
            .fold(0.0, f64::max)
    }
}

/// A series with class-A normalization: `c_0 = 0` and `c_1 = 1`, both exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TruncatedSeries", into = "TruncatedSeries")]
pub struct NormalizedSeries(TruncatedSeries);

impl TryFrom<TruncatedSeries> for NormalizedSeries {
    type Error = SeriesError;

    fn try_from(s: TruncatedSeries) -> Result<Self, SeriesError> {
        NormalizedSeries::new(s)
    }
}

impl From<NormalizedSeries> for TruncatedSeries {
    fn from(s: NormalizedSeries) -> TruncatedSeries {
        s.0
    }
}

impl NormalizedSeries {
    /// Wraps a series, requiring `c_0 = 0` and `c_1 = 1` exactly.
    pub fn new(series: TruncatedSeries) -> Result<Self, SeriesError> {
        let ok = series.order() >= 1
            && series.coeff(0) == Complex64::ZERO
            && series.coeff(1) == Complex64::ONE;
        if !ok {
            return Err(SeriesError::NotNormalized);
        }
        Ok(NormalizedSeries(series))
    }

    /// The identity `f(z) = z` at the given order.
    pub fn identity(order: usize) -> Self {
        NormalizedSeries(TruncatedSeries::identity_z(order.max(1)))
    }

    /// The Koebe function `z/(1-z)^2 = sum n z^n`.
    pub fn koebe(order: usize) -> Self {
        let order = order.max(1);
        let coeffs = (0..=order).map(|n| Complex64::new(n as f64, 0.0)).collect();
        NormalizedSeries(TruncatedSeries { coeffs })
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.order()
    }

    /// The series of `z f'(z) / f(z)`, computed as `f' * (f/z)^{-1}`.
    /// Constant term 1; the order drops by one.
    pub fn z_log_derivative(&self) -> Result<TruncatedSeries, SeriesError> {
        let u = self.0.shift_down()?;
        Ok(self.0.derivative().mul(&u.reciprocal()?))
    }

    /// kth root transform `F(z) = [f(z^k)]^{1/k}`, computed through
    /// `z * exp(log(f(z^k)/z^k) / k)`. Only indices congruent to 1 mod `k`
    /// carry nonzero coefficients; the result order is `k*(N-1) + 1`.
    pub fn kth_root_transform(&self, k: usize) -> Result<TruncatedSeries, SeriesError> {
        assert!(k >= 1, "k must be a positive integer");
        if k == 1 {
            return Ok(self.0.clone());
        }
        let u = self.0.shift_down()?;
        let log_u = u.log_unit()?;
        let scaled = log_u.dilate(k).scale(Complex64::new(1.0 / (k as f64), 0.0));
        Ok(scaled.exp_zero()?.shift_up())
    }
}
