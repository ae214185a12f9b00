use crate::math::{bisect, ln};
use crate::params::GameParams;
use crate::planner::FullEffortBranch;
use crate::{Error, Result};

use super::thresholds::{level_curve, level_slope_term, require_regime, Regime};

/// Sign of the logarithmic term in the interior value `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum InteriorSign {
    Plus,
    Minus,
}

impl InteriorSign {
    fn factor(self) -> f64 {
        match self {
            InteriorSign::Plus => 1.0,
            InteriorSign::Minus => -1.0,
        }
    }
}

/// `(1−p)·ln((1−p)/p)`.
fn phi_log(p: f64) -> f64 {
    (1.0 - p) * ln((1.0 - p) / p)
}

fn phi_log_derivative(p: f64) -> f64 {
    -ln((1.0 - p) / p) - 1.0 / p
}

/// Interior value `W(p) = A + s·B·φ_log(p) + C·(1−p)` on which agents are
/// indifferent between safe and risky effort.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Interior {
    a: f64,
    b: f64,
    c: f64,
    sign: f64,
}

impl Interior {
    fn pinned(params: &GameParams, p_stop: f64, sign: InteriorSign) -> Self {
        let r_over_l = params.discount / params.lambda;
        let a = params.discount * params.r_w + params.pi_w - r_over_l * params.pi_s;
        let b = r_over_l * params.pi_s;
        let sign = sign.factor();
        let c = (params.pi_s - a - sign * b * phi_log(p_stop)) / (1.0 - p_stop);
        Interior { a, b, c, sign }
    }

    fn value(&self, p: f64) -> f64 {
        self.a + self.sign * self.b * phi_log(p) + self.c * (1.0 - p)
    }

    fn derivative(&self, p: f64) -> f64 {
        self.sign * self.b * phi_log_derivative(p) - self.c
    }
}

/// Residual of `p·u + p(1−p)·u' = p(rR_w + π_w) − rπ_s/λ`.
fn ode_residual(params: &GameParams, p: f64, u: f64, du: f64) -> f64 {
    let rhs = p * (params.discount * params.r_w + params.pi_w) - params.discount * params.pi_s / params.lambda;
    p * u + p * (1.0 - p) * du - rhs
}

/// The unique symmetric equilibrium when losers benefit from breakthroughs.
///
/// All agents exert full effort above `p_dagger`, taper effort on
/// `[p_stop, p_dagger]` so that each is indifferent, and stop at `p_stop`.
#[derive(Debug, Clone, PartialEq)]
pub struct UndercompEq {
    pub p_stop: f64,
    pub c_star: f64,
    pub p_dagger: f64,
    pub sign: InteriorSign,
    interior: Interior,
    upper: FullEffortBranch,
    params: GameParams,
}

const ODE_CHECK_TOL: f64 = 1e-9;
const PASTING_TOL: f64 = 1e-8;
const ROOT_TOL: f64 = 1e-10;

pub fn solve_undercompetitive(params: &GameParams) -> Result<UndercompEq> {
    let set = require_regime(params, Regime::Undercompetitive)?;
    let p_stop = set.p_indiv.value;
    if !(p_stop > 0.0 && p_stop < 1.0) {
        return Err(Error::Precondition(alloc::format!("p_I = {p_stop} is not an interior belief")));
    }

    let (sign, interior) = select_interior(params, p_stop)?;

    let upper_end = set.p_cross.value.min(1.0 - 1e-9);
    let gap = |p: f64| interior.value(p) - level_curve(params, p, params.n() - 1.0);
    let p_dagger = bisect(gap, p_stop, upper_end, ROOT_TOL)?;

    let upper = FullEffortBranch::through(
        FullEffortBranch::symmetric_slope(params),
        params.n(),
        params.lambda,
        params.discount,
        p_dagger,
        interior.value(p_dagger),
    )?;

    Ok(UndercompEq { p_stop, c_star: interior.c, p_dagger, sign, interior, upper, params: *params })
}

/// Tries both signs and keeps the one that solves the interior ODE and
/// pastes smoothly at `p_stop`.
fn select_interior(params: &GameParams, p_stop: f64) -> Result<(InteriorSign, Interior)> {
    let mut best_residual = f64::INFINITY;
    for sign in [InteriorSign::Plus, InteriorSign::Minus] {
        let w = Interior::pinned(params, p_stop, sign);
        let mut worst = w.derivative(p_stop).abs() / PASTING_TOL * ODE_CHECK_TOL;
        for i in 0..=16 {
            let p = p_stop + (1.0 - p_stop) * (i as f64 / 17.0);
            worst = worst.max(ode_residual(params, p, w.value(p), w.derivative(p)).abs());
        }
        if worst <= ODE_CHECK_TOL {
            return Ok((sign, w));
        }
        best_residual = best_residual.min(worst);
    }
    Err(Error::NonConvergence { what: "interior value construction", residual: best_residual })
}

impl UndercompEq {
    /// Per-agent flow value.
    pub fn value(&self, p: f64) -> f64 {
        if p <= self.p_stop {
            self.params.pi_s
        } else if p <= self.p_dagger {
            self.interior.value(p)
        } else {
            self.upper.value(p)
        }
    }

    /// Value on the tapering branch, extended to the whole open interval.
    pub fn w_value(&self, p: f64) -> f64 {
        self.interior.value(p)
    }

    pub fn w_derivative(&self, p: f64) -> f64 {
        self.interior.derivative(p)
    }

    /// Value on the full-effort branch, extended below `p_dagger`.
    pub fn upper_value(&self, p: f64) -> f64 {
        self.upper.value(p)
    }

    pub fn upper_derivative(&self, p: f64) -> f64 {
        self.upper.derivative(p)
    }

    /// Symmetric per-agent effort.
    pub fn effort(&self, p: f64) -> f64 {
        if p <= self.p_stop {
            0.0
        } else if p >= self.p_dagger {
            1.0
        } else {
            self.interior_effort(p).clamp(0.0, 1.0)
        }
    }

    /// Unclamped indifference effort `(W − π_s)/((N−1)·(π_s − …))`.
    pub fn interior_effort(&self, p: f64) -> f64 {
        let params = &self.params;
        (self.interior.value(p) - params.pi_s) / ((params.n() - 1.0) * level_slope_term(params, p))
    }

    /// Residual of the interior indifference ODE for `W` at `p`.
    pub fn ode_residual(&self, p: f64) -> f64 {
        ode_residual(&self.params, p, self.interior.value(p), self.interior.derivative(p))
    }

    /// `|W'(p†) − V_upper'(p†)|`.
    pub fn derivative_mismatch(&self) -> f64 {
        (self.interior.derivative(self.p_dagger) - self.upper.derivative(self.p_dagger)).abs()
    }
}
