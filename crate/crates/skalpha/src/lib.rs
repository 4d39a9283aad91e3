//! Computation and numerical verification for the starlike subclass SK(alpha).
//!
//! The class SK(alpha), `-3 < alpha <= 1`, collects normalized analytic
//! functions on the unit disk whose logarithmic derivative `z f'/f` is
//! subordinate to the kernel `q_a(z) = 3/(3 + (a-3)z - a z^2)`. This crate
//! computes every explicit quantity attached to the class — kernel
//! coefficients, sharp order bounds, the extremal function, logarithmic
//! coefficient inequalities, Fekete-Szego functionals — and pairs each sharp
//! claim with an independent numerical oracle (coefficient recurrences,
//! brute-force maximization over the Caratheodory body, boundary-grid
//! maximization, winding-number containment).
//!
//! Modules:
//! - [`series`]: truncated complex power-series arithmetic, the substrate.
//! - [`kernel`]: the kernel `q_a` / family `p_b` and their closed forms.
//! - [`extremal`]: the extremal function, logarithmic coefficients, dilogarithm.
//! - [`fekete`]: Fekete-Szego bounds and the brute-force sharpness oracle.
//! - [`membership`]: numerical class-membership and subordination tests.
//! - [`report`]: serializable verification outcome records.

pub mod extremal;
pub mod fekete;
pub mod kernel;
pub mod membership;
pub mod report;
pub mod series;

pub use extremal::{
    de_branges_partial_check, dilog, dilog_terms, extremal_series, log_coeffs, log_energy_partial,
    log_energy_rhs, per_coeff_bound_check, verify_log_energy, verify_log_energy_of, DilogResult,
    ExtremalError, LogCoeffs,
};
pub use fekete::{
    b2_value, brute_force_max, coeffs_from_p, fek_lemma_check, fs_bound, functional_value,
    inverse_b3_bound, inverse_coeffs, mu_prime, mu_prime_with, root_transform_coeffs, BoundVariant,
    CaratheodoryPoint, FeketeError, GridSpec, SharpnessResult,
};
pub use kernel::{
    admissibility_check, boundary_curve, curve_self_intersects, numeric_strong_order, p_b_eval,
    p_b_re_lower, q_alpha_coeff, q_alpha_eval, q_alpha_series, q_alpha_series_recurrence, q_order,
    starlike_order, strongly_starlike_order, tangent_ratio, AlphaParam, BParam, CurveSample,
    KernelError,
};
pub use membership::{
    membership_q, membership_sk, subordination_check, theorem1_consequence_check, MembershipError,
    MembershipReport, Witness,
};
pub use report::BoundReport;
pub use series::{NormalizedSeries, SeriesError, TruncatedSeries, DEFAULT_ORDER, MAX_ORDER};
