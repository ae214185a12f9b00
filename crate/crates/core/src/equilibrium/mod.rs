//! Noncooperative thresholds and symmetric Markov perfect equilibria.
//!
//! The sign of the loser externality `s = (π_s − π_l)/r − R_l` decides the
//! regime. At `s = 0` the first-best cutoff is the unique equilibrium; for
//! `s < 0` losers gain from breakthroughs and agents free ride, tapering
//! effort down to `p_I`; for `s > 0` losers are hurt and a continuum of
//! cutoff equilibria stops anywhere in `[p_×, p_I]`.

mod overcompetitive;
mod thresholds;
mod undercompetitive;
mod verify;

pub use overcompetitive::{overcomp_family, payoff_dominant, solve_overcompetitive, OvercompEq};
pub use thresholds::{
    best_response_region, classify, level_curve, p_cross, p_indiv, BestResponse, Cutoff, Degeneracy, Regime,
    ThresholdSet,
};
pub use undercompetitive::{solve_undercompetitive, InteriorSign, UndercompEq};
pub use verify::{verify_mpe, MpeVerification, DEFAULT_DEVIATION_TOL};

use crate::params::GameParams;
use crate::planner::FirstBest;
use crate::{Error, Result};

/// A constructed symmetric equilibrium of any regime.
#[derive(Debug, Clone, PartialEq)]
pub enum Equilibrium {
    Efficient(FirstBest),
    Undercompetitive(UndercompEq),
    Overcompetitive(OvercompEq),
}

impl Equilibrium {
    /// Builds the equilibrium for `params`. Overcompetitive games need the
    /// stopping belief `p_t`; the other regimes ignore it.
    pub fn solve(params: &GameParams, p_t: Option<f64>) -> Result<Self> {
        let thresholds = classify(params)?;
        match thresholds.regime {
            Regime::Efficient => Ok(Equilibrium::Efficient(FirstBest::new(params)?)),
            Regime::Undercompetitive => Ok(Equilibrium::Undercompetitive(solve_undercompetitive(params)?)),
            Regime::Overcompetitive => {
                let p_t = p_t.ok_or_else(|| {
                    Error::Precondition("overcompetitive games need a stopping belief p_t".into())
                })?;
                Ok(Equilibrium::Overcompetitive(solve_overcompetitive(params, p_t)?))
            }
        }
    }

    pub fn regime(&self) -> Regime {
        match self {
            Equilibrium::Efficient(_) => Regime::Efficient,
            Equilibrium::Undercompetitive(_) => Regime::Undercompetitive,
            Equilibrium::Overcompetitive(_) => Regime::Overcompetitive,
        }
    }

    /// Per-agent equilibrium flow value.
    pub fn value(&self, p: f64) -> f64 {
        match self {
            Equilibrium::Efficient(fb) => fb.value(p),
            Equilibrium::Undercompetitive(eq) => eq.value(p),
            Equilibrium::Overcompetitive(eq) => eq.value(p),
        }
    }

    /// Symmetric per-agent effort.
    pub fn effort(&self, p: f64) -> f64 {
        match self {
            Equilibrium::Efficient(fb) => {
                if p > fb.p_fb {
                    1.0
                } else {
                    0.0
                }
            }
            Equilibrium::Undercompetitive(eq) => eq.effort(p),
            Equilibrium::Overcompetitive(eq) => eq.effort(p),
        }
    }
}

/// Per-agent equilibrium value at `p`; `p_t` selects the overcompetitive
/// cutoff equilibrium.
pub fn equilibrium_value(params: &GameParams, p: f64, p_t: Option<f64>) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain("belief", p));
    }
    Ok(Equilibrium::solve(params, p_t)?.value(p))
}
