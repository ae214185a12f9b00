use crate::params::GameParams;
use crate::planner::{p_fb, FullEffortBranch};
use crate::{Error, Result};

use super::thresholds::{require_regime, Regime};

/// Slack allowed when checking that a cutoff lies in the family interval.
const FAMILY_TOL: f64 = 1e-12;

/// A symmetric cutoff equilibrium when losers are hurt by breakthroughs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OvercompEq {
    pub p_t: f64,
    pub kink_right_derivative: f64,
    pi_s: f64,
    branch: FullEffortBranch,
}

/// Closed interval `[p_×, p_I]` of equilibrium stopping beliefs.
pub fn overcomp_family(params: &GameParams) -> Result<(f64, f64)> {
    let set = require_regime(params, Regime::Overcompetitive)?;
    Ok((set.p_cross.value, set.p_indiv.value))
}

pub fn solve_overcompetitive(params: &GameParams, p_t: f64) -> Result<OvercompEq> {
    let (lo, hi) = overcomp_family(params)?;
    if !(p_t >= lo - FAMILY_TOL && p_t <= hi + FAMILY_TOL) || !(p_t > 0.0 && p_t < 1.0) {
        return Err(Error::Precondition(alloc::format!(
            "stopping belief {p_t} lies outside the equilibrium interval [{lo}, {hi}]"
        )));
    }
    let branch = FullEffortBranch::through(
        FullEffortBranch::symmetric_slope(params),
        params.n(),
        params.lambda,
        params.discount,
        p_t,
        params.pi_s,
    )?;
    let kink = params.discount / (params.n() * p_t * (1.0 - p_t) * params.lambda)
        * (p_t * params.pi_s / p_fb(params) - params.pi_s);
    Ok(OvercompEq { p_t, kink_right_derivative: kink, pi_s: params.pi_s, branch })
}

/// The cutoff equilibrium stopping at `p_I`, which every agent prefers to
/// the rest of the family.
pub fn payoff_dominant(params: &GameParams) -> Result<OvercompEq> {
    let (_, p_indiv) = overcomp_family(params)?;
    solve_overcompetitive(params, p_indiv)
}

impl OvercompEq {
    pub fn value(&self, p: f64) -> f64 {
        if p <= self.p_t {
            self.pi_s
        } else {
            self.branch.value(p)
        }
    }

    pub fn effort(&self, p: f64) -> f64 {
        if p > self.p_t {
            1.0
        } else {
            0.0
        }
    }

    pub fn branch(&self) -> &FullEffortBranch {
        &self.branch
    }
}
