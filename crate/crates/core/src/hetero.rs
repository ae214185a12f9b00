//! Agents with different effort capacities `μ_i`.
//!
//! Agent `i` exerts effort in `[0, μ_i]`; total capacity is `M = Σμ_i`.
//! Winner payoffs are derived from the totals so that the prize does not
//! depend on who wins. Efficiency now requires every agent's loser payoff to
//! exactly offset its own safe flow: `δ_i = (μ_iπ_s − π_{l,i})/r − R_{l,i} = 0`.

use alloc::vec::Vec;

use crate::contracts::{
    design_warnings, solve_shares, split, terminal_shares, Allocation, ContractFamily, Design, FixedShare,
    Observability, SharingContract, Terminal,
};
use crate::equilibrium::Cutoff;
use crate::params::{GameParams, ParamIssue, ValidationReport};
use crate::planner::{phi, FullEffortBranch};
use crate::{Error, Result, KNIFE_EDGE_TOL};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct HeteroParams {
    pub mu: Vec<f64>,
    pub lambda: f64,
    pub discount: f64,
    pub pi_s: f64,
    pub r_l: Vec<f64>,
    pub pi_l: Vec<f64>,
    pub r_total: f64,
    pub pi_total: f64,
}

impl HeteroParams {
    /// Embeds a symmetric game with unit capacities.
    pub fn from_homogeneous(params: &GameParams) -> Self {
        let n = params.n_agents;
        HeteroParams {
            mu: alloc::vec![1.0; n],
            lambda: params.lambda,
            discount: params.discount,
            pi_s: params.pi_s,
            r_l: alloc::vec![params.r_l; n],
            pi_l: alloc::vec![params.pi_l; n],
            r_total: params.r_total(),
            pi_total: params.pi_total(),
        }
    }

    pub fn n_agents(&self) -> usize {
        self.mu.len()
    }

    /// Total capacity `M`.
    pub fn capacity(&self) -> f64 {
        self.mu.iter().sum()
    }

    /// `π_{w,i} = Π − Σ_{j≠i} π_{l,j}`.
    pub fn pi_w(&self, agent: usize) -> f64 {
        self.pi_total - (self.pi_l.iter().sum::<f64>() - self.pi_l[agent])
    }

    /// `R_{w,i} = R − Σ_{j≠i} R_{l,j}`.
    pub fn r_w(&self, agent: usize) -> f64 {
        self.r_total - (self.r_l.iter().sum::<f64>() - self.r_l[agent])
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.mu.len();
        if n == 0 {
            report.errors.push(ParamIssue::NoAgents);
            return report;
        }
        if self.r_l.len() != n || self.pi_l.len() != n {
            report.errors.push(ParamIssue::LengthMismatch);
            return report;
        }
        let scalars = [
            ("lambda", self.lambda),
            ("discount", self.discount),
            ("pi_s", self.pi_s),
            ("r_total", self.r_total),
            ("pi_total", self.pi_total),
        ];
        for (name, v) in scalars {
            if !v.is_finite() {
                report.errors.push(ParamIssue::NonFinite(name));
            }
        }
        let arrays = [("mu", &self.mu), ("r_l", &self.r_l), ("pi_l", &self.pi_l)];
        for (name, xs) in arrays {
            if xs.iter().any(|x| !x.is_finite()) {
                report.errors.push(ParamIssue::NonFinite(name));
            }
        }
        if !(self.lambda > 0.0) {
            report.errors.push(ParamIssue::NonPositiveRate("lambda"));
        }
        if !(self.discount > 0.0) {
            report.errors.push(ParamIssue::NonPositiveRate("discount"));
        }
        if self.pi_s < 0.0 {
            report.errors.push(ParamIssue::NegativeSafeFlow);
        }
        for (i, &m) in self.mu.iter().enumerate() {
            if !(m > 0.0) {
                report.errors.push(ParamIssue::NonPositiveCapacity(i));
            }
        }
        if !report.errors.is_empty() {
            return report;
        }
        let safe_total = self.capacity() * self.pi_s;
        if !(self.pi_total > safe_total) {
            report
                .errors
                .push(ParamIssue::BreakthroughNotImproving { pi_total: self.pi_total, safe_total });
        }
        for i in 0..n {
            if !(self.pi_w(i) > self.mu[i] * self.pi_s) {
                report.errors.push(ParamIssue::WinningNotWorthwhile(i));
            }
        }
        if n == 1 {
            report.warnings.push(ParamIssue::SingleAgent);
        }
        report
    }

    pub fn checked(&self) -> Result<&Self> {
        let report = self.validate();
        if report.is_ok() {
            Ok(self)
        } else {
            Err(Error::InvalidParams(report))
        }
    }

    /// `R + (Π − Mπ_s)/r`, the welfare gain of a breakthrough in lump-sum units.
    fn surplus(&self) -> f64 {
        self.r_total + (self.pi_total - self.capacity() * self.pi_s) / self.discount
    }
}

/// First-best threshold `π_s / (λR + (λ/r)(Π − Mπ_s))`.
pub fn p_fb_h(hp: &HeteroParams) -> Result<f64> {
    hp.checked()?;
    if hp.pi_s == 0.0 {
        return Ok(0.0);
    }
    Ok(hp.pi_s / (hp.lambda * hp.surplus()))
}

/// Per-agent externalities `δ_i = (μ_iπ_s − π_{l,i})/r − R_{l,i}`.
pub fn delta(hp: &HeteroParams) -> Result<Vec<f64>> {
    hp.checked()?;
    Ok(deltas(hp))
}

fn deltas(hp: &HeteroParams) -> Vec<f64> {
    hp.mu
        .iter()
        .zip(&hp.pi_l)
        .zip(&hp.r_l)
        .map(|((&m, &pl), &rl)| (m * hp.pi_s - pl) / hp.discount - rl)
        .collect()
}

fn threshold_with(hp: &HeteroParams, delta_sum: f64) -> Cutoff {
    Cutoff::from_ratio(hp.pi_s / hp.lambda, hp.surplus() + delta_sum)
}

/// Belief at which all level curves cross; the same for every agent.
pub fn p_cross_h(hp: &HeteroParams) -> Result<Cutoff> {
    let d = delta(hp)?;
    Ok(threshold_with(hp, d.iter().sum()))
}

/// Agent `i`'s individual experimentation threshold.
pub fn p_indiv_h(hp: &HeteroParams, agent: usize) -> Result<Cutoff> {
    let d = delta(hp)?;
    if agent >= d.len() {
        return Err(Error::Precondition(alloc::format!("agent {agent} out of range")));
    }
    Ok(threshold_with(hp, d.iter().sum::<f64>() - d[agent]))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HeteroClassification {
    pub efficient: bool,
    pub deltas: Vec<f64>,
    /// Agents whose `δ_i` is not zero.
    pub violating: Vec<usize>,
    pub delta_sum: f64,
    pub p_fb: f64,
    pub p_cross: f64,
    pub p_indiv: Vec<f64>,
}

/// Efficient iff every `δ_i` vanishes; a zero sum is not enough.
pub fn classify_h(hp: &HeteroParams) -> Result<HeteroClassification> {
    hp.checked()?;
    if hp.n_agents() < 2 {
        return Err(Error::Precondition("classification needs at least two agents".into()));
    }
    let d = deltas(hp);
    let violating: Vec<usize> = d.iter().enumerate().filter(|(_, x)| x.abs() > KNIFE_EDGE_TOL).map(|(i, _)| i).collect();
    let delta_sum: f64 = d.iter().sum();
    let p_indiv = (0..d.len()).map(|i| threshold_with(hp, delta_sum - d[i]).value).collect();
    Ok(HeteroClassification {
        efficient: violating.is_empty(),
        p_fb: p_fb_h(hp)?,
        p_cross: threshold_with(hp, delta_sum).value,
        p_indiv,
        violating,
        delta_sum,
        deltas: d,
    })
}

/// Total first-best flow value of all agents.
pub fn v_fb_h(hp: &HeteroParams, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain("belief", p));
    }
    let p_fb = p_fb_h(hp)?;
    let m = hp.capacity();
    let stopped = m * hp.pi_s;
    if p <= p_fb || p_fb >= 1.0 {
        return Ok(stopped);
    }
    let ml = m * hp.lambda / hp.discount;
    let slope = m * hp.lambda * (hp.pi_total / hp.discount + hp.r_total) / (1.0 + ml);
    let c = if p_fb > 0.0 {
        stopped * (1.0 - p_fb) * ml / ((1.0 + ml) * phi(p_fb, m, hp.lambda, hp.discount)?)
    } else {
        0.0
    };
    Ok(FullEffortBranch::new(slope, c, m, hp.lambda, hp.discount).value(p))
}

/// Agent `i`'s equilibrium value `(μ_i/M)·V`, defined on the efficient
/// knife-edge only.
pub fn agent_value(hp: &HeteroParams, agent: usize, p: f64) -> Result<f64> {
    let class = classify_h(hp)?;
    if !class.efficient {
        return Err(Error::Precondition(alloc::format!(
            "agent values are only available when every δ_i is zero; agents {:?} violate it",
            class.violating
        )));
    }
    if agent >= hp.n_agents() {
        return Err(Error::Precondition(alloc::format!("agent {agent} out of range")));
    }
    Ok(hp.mu[agent] / hp.capacity() * v_fb_h(hp, p)?)
}

/// Guarantee per unit of capacity, `g = (rR(1−α_I) + Π(1−α_C))/M`.
pub fn normalized_guarantee(contract: &SharingContract, hp: &HeteroParams) -> Result<f64> {
    hp.checked()?;
    Ok(crate::contracts::raw_guarantee(contract, hp.discount, hp.r_total, hp.pi_total, hp.capacity()))
}

/// Per-agent guarantees `μ_i·g`.
pub fn guarantee_h(contract: &SharingContract, hp: &HeteroParams) -> Result<Vec<f64>> {
    let g = normalized_guarantee(contract, hp)?;
    Ok(hp.mu.iter().map(|m| m * g).collect())
}

/// Solves `g = π_s` for the free share.
pub fn design_efficient_h(
    hp: &HeteroParams,
    family: ContractFamily,
    fixed: FixedShare,
    observability: Observability,
) -> Result<Design> {
    hp.checked()?;
    let target = hp.capacity() * hp.pi_s;
    let contract = solve_shares(family, fixed, hp.discount * hp.r_total, hp.pi_total, target)?;
    Ok(Design { contract, warnings: design_warnings(&contract), observability })
}

/// Loser payoffs under a capacity-proportional contract.
pub fn induced_h(contract: &SharingContract, hp: &HeteroParams) -> Result<HeteroParams> {
    hp.checked()?;
    let m = hp.capacity();
    let loser_r = (1.0 - contract.alpha_i) * hp.r_total / m;
    let loser_pi = (1.0 - contract.alpha_c) * hp.pi_total / m;
    Ok(HeteroParams {
        r_l: hp.mu.iter().map(|mu| loser_r * mu).collect(),
        pi_l: hp.mu.iter().map(|mu| loser_pi * mu).collect(),
        ..hp.clone()
    })
}

/// Splits `(R, Π)`; the non-contingent part is shared in proportion to `μ_i`.
pub fn allocate_h(contract: &SharingContract, hp: &HeteroParams, terminal: Terminal<'_>) -> Result<Allocation> {
    hp.checked()?;
    let shares = terminal_shares(contract.family, terminal, &hp.mu)?;
    let m = hp.capacity();
    let base: Vec<f64> = hp.mu.iter().map(|mu| mu / m).collect();
    Ok(split(contract, hp.r_total, hp.pi_total, &shares, &base))
}

/// Named heterogeneous parameter sets.
pub mod fixtures {
    use super::HeteroParams;

    /// Two agents with capacities 1 and 2 on the efficient knife-edge.
    pub fn p_het() -> HeteroParams {
        HeteroParams {
            mu: alloc::vec![1.0, 2.0],
            lambda: 1.0,
            discount: 1.0,
            pi_s: 1.0,
            r_l: alloc::vec![0.0, 0.0],
            pi_l: alloc::vec![1.0, 2.0],
            r_total: 0.0,
            pi_total: 6.0,
        }
    }
}
