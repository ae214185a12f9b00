use alloc::vec::Vec;

use crate::oracle::{dp_best_response, dp_evaluate, GridSpec};
use crate::params::GameParams;
use crate::Result;

use super::thresholds::{classify, Regime};

/// Largest value gain from deviating that still counts as an equilibrium.
pub const DEFAULT_DEVIATION_TOL: f64 = 5e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MpeVerification {
    pub regime: Regime,
    pub max_deviation_gain: f64,
    /// Belief at which the best deviation gains the most.
    pub deviation_belief: f64,
    pub pass: bool,
}

/// Checks a symmetric profile given as per-agent efforts on the grid of
/// `grid`: one agent best-responds while the others keep playing it.
pub fn verify_mpe(params: &GameParams, profile: &[f64], grid: &GridSpec, tol: f64) -> Result<MpeVerification> {
    let regime = classify(params)?.regime;
    let others: Vec<f64> = profile.iter().map(|&k| k * (params.n() - 1.0)).collect();
    let conform = dp_evaluate(params, profile, &others, grid)?;
    let deviate = dp_best_response(params, &others, grid)?;
    let (mut gain, mut at) = (f64::NEG_INFINITY, 0.0);
    for ((&p, &dev), &conf) in conform.beliefs.iter().zip(&deviate.values).zip(&conform.values) {
        if dev - conf > gain {
            gain = dev - conf;
            at = p;
        }
    }
    Ok(MpeVerification { regime, max_deviation_gain: gain, deviation_belief: at, pass: gain <= tol })
}
