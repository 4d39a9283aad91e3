//! Outcome records for verification runs.

use serde::{Deserialize, Serialize};

/// Outcome of a single bound verification: the claimed bound, what was
/// measured, the signed margin, a check-specific witness, and pass/fail at
/// the recorded tolerance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub claim: f64,
    pub measured: f64,
    pub margin: f64,
    pub witness: serde_json::Value,
    pub pass: bool,
    pub tol: f64,
}

impl BoundReport {
    pub fn new(claim: f64, measured: f64, margin: f64, witness: serde_json::Value, pass: bool, tol: f64) -> Self {
        BoundReport { claim, measured, margin, witness, pass, tol }
    }
}
