use crate::params::GameParams;
use crate::planner::p_fb;
use crate::{Error, Result, GEOMETRY_TOL, KNIFE_EDGE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Regime {
    Efficient,
    Undercompetitive,
    Overcompetitive,
}

/// Why a threshold formula was replaced by `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Degeneracy {
    /// `R_w = R_l` and `π_w = π_l`: all level curves are parallel.
    ParallelLevelCurves,
    /// The denominator of the formula is not positive.
    NonPositiveDenominator,
}

/// A threshold belief that may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub value: f64,
    pub degeneracy: Option<Degeneracy>,
}

impl Cutoff {
    pub(crate) fn finite(value: f64) -> Self {
        Cutoff { value, degeneracy: None }
    }

    pub(crate) fn infinite(why: Degeneracy) -> Self {
        Cutoff { value: f64::INFINITY, degeneracy: Some(why) }
    }

    pub(crate) fn from_ratio(num: f64, denom: f64) -> Self {
        if denom > 0.0 {
            Cutoff::finite(num / denom)
        } else {
            Cutoff::infinite(Degeneracy::NonPositiveDenominator)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Belief `p_×` where every level curve `D_K` meets `u = π_s`.
pub fn p_cross(params: &GameParams) -> Cutoff {
    if params.r_w == params.r_l && params.pi_w == params.pi_l {
        return Cutoff::infinite(Degeneracy::ParallelLevelCurves);
    }
    let lambda = params.lambda;
    let denom = lambda * (params.r_w - params.r_l) + lambda / params.discount * (params.pi_w - params.pi_l);
    Cutoff::from_ratio(params.pi_s, denom)
}

/// Cutoff `p_I` of an agent experimenting alone.
pub fn p_indiv(params: &GameParams) -> Cutoff {
    let lambda = params.lambda;
    let denom = lambda * params.r_w + lambda / params.discount * (params.pi_w - params.pi_s);
    Cutoff::from_ratio(params.pi_s, denom)
}

/// The three thresholds and the regime they imply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSet {
    pub p_fb: f64,
    pub p_indiv: Cutoff,
    pub p_cross: Cutoff,
    /// `(π_s − π_l)/r − R_l`.
    pub externality: f64,
    pub regime: Regime,
}

impl ThresholdSet {
    /// Checks the ordering implied by the regime (`+∞` exceeds every belief).
    pub fn ordering_holds(&self) -> bool {
        let (fb, ind, cross) = (self.p_fb, self.p_indiv.value, self.p_cross.value);
        match self.regime {
            Regime::Efficient => (fb - ind).abs() <= 1e-12 && (fb - cross).abs() <= 1e-12,
            Regime::Undercompetitive => fb <= ind && ind <= cross,
            Regime::Overcompetitive => cross <= ind && ind <= fb,
        }
    }
}

pub fn classify(params: &GameParams) -> Result<ThresholdSet> {
    params.checked_game()?;
    let externality = params.loser_externality();
    let regime = if externality.abs() <= KNIFE_EDGE_TOL {
        Regime::Efficient
    } else if externality < 0.0 {
        Regime::Undercompetitive
    } else {
        Regime::Overcompetitive
    };
    Ok(ThresholdSet {
        p_fb: p_fb(params),
        p_indiv: p_indiv(params),
        p_cross: p_cross(params),
        externality,
        regime,
    })
}

/// Level curve `D_K(p) = π_s + K·(π_s − pλ(R_w − R_l) − (pλ/r)(π_w − π_l))`
/// for opponents' total effort `K`.
pub fn level_curve(params: &GameParams, p: f64, k_others: f64) -> f64 {
    params.pi_s + k_others * level_slope_term(params, p)
}

pub(crate) fn level_slope_term(params: &GameParams, p: f64) -> f64 {
    let pl = p * params.lambda;
    params.pi_s - pl * (params.r_w - params.r_l) - pl / params.discount * (params.pi_w - params.pi_l)
}

/// Best-response effort class at `(p, u)` against opponents' total effort.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BestResponse {
    Zero,
    Indifferent,
    Full,
}

pub fn best_response_region(params: &GameParams, p: f64, u: f64, k_others: f64) -> BestResponse {
    let curve = level_curve(params, p, k_others);
    if (u - curve).abs() <= GEOMETRY_TOL {
        BestResponse::Indifferent
    } else if u < curve {
        BestResponse::Zero
    } else {
        BestResponse::Full
    }
}

pub(crate) fn require_regime(params: &GameParams, expected: Regime) -> Result<ThresholdSet> {
    let set = classify(params)?;
    if set.regime != expected {
        return Err(Error::RegimeMismatch { expected, found: set.regime });
    }
    Ok(set)
}
