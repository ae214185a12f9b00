//! Sharing contracts over the total prize `(R, Π)`.
//!
//! A contract pays a share `α_I` of the lump sum and `α_C` of the
//! continuation flow to the winner (or, for effort-based contracts, in
//! proportion to terminal efforts) and splits the rest equally. What matters
//! for incentives is the guarantee, the flow value every agent receives when
//! someone else breaks through.

use alloc::vec::Vec;

use crate::params::GameParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ContractFamily {
    /// Shares depend on who broke through.
    WinnerBased,
    /// Shares depend on efforts at the breakthrough.
    EffortBased,
}

/// Shares are unconstrained reals; values outside `[0, 1]` mean ex-post
/// payments between agents.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SharingContract {
    pub family: ContractFamily,
    pub alpha_i: f64,
    pub alpha_c: f64,
}

impl SharingContract {
    pub fn winner_based(alpha_i: f64, alpha_c: f64) -> Self {
        SharingContract { family: ContractFamily::WinnerBased, alpha_i, alpha_c }
    }

    pub fn effort_based(alpha_i: f64, alpha_c: f64) -> Self {
        SharingContract { family: ContractFamily::EffortBased, alpha_i, alpha_c }
    }

    /// Everything split equally regardless of outcome.
    pub fn equal_split() -> Self {
        SharingContract::winner_based(0.0, 0.0)
    }
}

/// The environment a contract divides: totals and primitives, but no split.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Economy {
    pub n_agents: usize,
    pub lambda: f64,
    pub discount: f64,
    pub pi_s: f64,
    pub r_total: f64,
    pub pi_total: f64,
}

impl Economy {
    pub fn of(params: &GameParams) -> Self {
        Economy {
            n_agents: params.n_agents,
            lambda: params.lambda,
            discount: params.discount,
            pi_s: params.pi_s,
            r_total: params.r_total(),
            pi_total: params.pi_total(),
        }
    }

    fn n(&self) -> f64 {
        self.n_agents as f64
    }

    fn check(&self) -> Result<()> {
        if self.n_agents < 2 {
            return Err(Error::Precondition("contracts need at least two agents".into()));
        }
        Ok(())
    }
}

/// Flow value `rR(1−α_I)/N + Π(1−α_C)/N` each agent gets when another
/// agent breaks through.
pub fn guarantee(contract: &SharingContract, base: &Economy) -> Result<f64> {
    base.check()?;
    Ok(raw_guarantee(contract, base.discount, base.r_total, base.pi_total, base.n()))
}

/// Evaluated in the same order as `r·R̃_l + π̃_l` of the induced game.
pub(crate) fn raw_guarantee(contract: &SharingContract, discount: f64, r_total: f64, pi_total: f64, divisor: f64) -> f64 {
    discount * ((1.0 - contract.alpha_i) * r_total / divisor) + (1.0 - contract.alpha_c) * pi_total / divisor
}

/// The share held fixed when designing a contract.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FixedShare {
    AlphaI(f64),
    AlphaC(f64),
}

/// Whether efforts are observed; only changes how a design is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Observability {
    #[default]
    Observable,
    Unobservable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DesignWarning {
    /// A share lies outside `[0, 1]`, so agents make ex-post payments.
    ShareOutsideUnitInterval,
    /// An effort-based contract with `α_C ≤ 0` cannot reward effort at all
    /// continuation dates and does not implement the first best.
    NoContinuationReward,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Design {
    pub contract: SharingContract,
    pub warnings: Vec<DesignWarning>,
    pub observability: Observability,
}

impl Design {
    /// Whether the design is checked along the time axis (simulation) rather
    /// than on the belief grid.
    pub fn checked_in_time(&self) -> bool {
        self.observability == Observability::Unobservable
    }
}

/// Solves `guarantee = π_s` for the free share.
pub fn design_efficient(
    base: &Economy,
    family: ContractFamily,
    fixed: FixedShare,
    observability: Observability,
) -> Result<Design> {
    base.check()?;
    let contract = solve_shares(family, fixed, base.discount * base.r_total, base.pi_total, base.n() * base.pi_s)?;
    Ok(Design { contract, warnings: design_warnings(&contract), observability })
}

/// Solves `lump_flow·(1−α_I) + pi_total·(1−α_C) = target`.
pub(crate) fn solve_shares(
    family: ContractFamily,
    fixed: FixedShare,
    lump_flow: f64,
    pi_total: f64,
    target: f64,
) -> Result<SharingContract> {
    let (alpha_i, alpha_c) = match fixed {
        FixedShare::AlphaI(a) => {
            if pi_total == 0.0 {
                return Err(Error::Unsolvable("continuation share has no effect when Π = 0".into()));
            }
            (a, 1.0 - (target - lump_flow * (1.0 - a)) / pi_total)
        }
        FixedShare::AlphaC(a) => {
            if lump_flow == 0.0 {
                return Err(Error::Unsolvable("instantaneous share has no effect when rR = 0".into()));
            }
            (1.0 - (target - pi_total * (1.0 - a)) / lump_flow, a)
        }
    };
    if !(alpha_i.is_finite() && alpha_c.is_finite()) {
        return Err(Error::Unsolvable("shares are not finite".into()));
    }
    Ok(SharingContract { family, alpha_i, alpha_c })
}

pub(crate) fn design_warnings(contract: &SharingContract) -> Vec<DesignWarning> {
    let mut warnings = Vec::new();
    let unit = 0.0..=1.0;
    if !unit.contains(&contract.alpha_i) || !unit.contains(&contract.alpha_c) {
        warnings.push(DesignWarning::ShareOutsideUnitInterval);
    }
    if contract.family == ContractFamily::EffortBased && contract.alpha_c <= 0.0 {
        warnings.push(DesignWarning::NoContinuationReward);
    }
    warnings
}

/// The symmetric game agents play under `contract`.
pub fn induced_game(contract: &SharingContract, base: &Economy) -> Result<GameParams> {
    base.check()?;
    let n = base.n();
    let (r, pi) = (base.r_total, base.pi_total);
    Ok(GameParams {
        n_agents: base.n_agents,
        lambda: base.lambda,
        discount: base.discount,
        pi_s: base.pi_s,
        r_w: contract.alpha_i * r + (1.0 - contract.alpha_i) * r / n,
        r_l: (1.0 - contract.alpha_i) * r / n,
        pi_w: contract.alpha_c * pi + (1.0 - contract.alpha_c) * pi / n,
        pi_l: (1.0 - contract.alpha_c) * pi / n,
    })
}

/// What a contract conditions on at the breakthrough.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Terminal<'a> {
    Winner(usize),
    Efforts(&'a [f64]),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Allocation {
    pub instantaneous: Vec<f64>,
    pub continuation: Vec<f64>,
}

/// Splits `(R, Π)` after a breakthrough.
pub fn allocate(contract: &SharingContract, base: &Economy, terminal: Terminal<'_>) -> Result<Allocation> {
    base.check()?;
    let n = base.n_agents;
    let caps = alloc::vec![1.0; n];
    let shares = terminal_shares(contract.family, terminal, &caps)?;
    let equal: Vec<f64> = alloc::vec![1.0 / n as f64; n];
    Ok(split(contract, base.r_total, base.pi_total, &shares, &equal))
}

/// Per-agent winning weights: an indicator or normalized efforts.
/// Efforts are bounded by `caps`.
pub(crate) fn terminal_shares(family: ContractFamily, terminal: Terminal<'_>, caps: &[f64]) -> Result<Vec<f64>> {
    let n = caps.len();
    match (family, terminal) {
        (ContractFamily::WinnerBased, Terminal::Winner(w)) => {
            if w >= n {
                return Err(Error::Precondition(alloc::format!("winner {w} out of range for {n} agents")));
            }
            Ok((0..n).map(|i| if i == w { 1.0 } else { 0.0 }).collect())
        }
        (ContractFamily::EffortBased, Terminal::Efforts(k)) => {
            if k.len() != n {
                return Err(Error::Precondition(alloc::format!("{} efforts given for {n} agents", k.len())));
            }
            if let Some((&bad, _)) = k.iter().zip(caps).find(|&(&x, &cap)| !(0.0..=cap).contains(&x)) {
                return Err(Error::domain("effort", bad));
            }
            let total: f64 = k.iter().sum();
            if total <= 0.0 {
                return Err(Error::UndefinedShare);
            }
            Ok(k.iter().map(|&x| x / total).collect())
        }
        (ContractFamily::WinnerBased, Terminal::Efforts(_)) => {
            Err(Error::Precondition("winner-based contracts need the winner".into()))
        }
        (ContractFamily::EffortBased, Terminal::Winner(_)) => {
            Err(Error::Precondition("effort-based contracts need terminal efforts".into()))
        }
    }
}

/// `α·total·win_i + (1−α)·total·base_i` for both prizes.
pub(crate) fn split(contract: &SharingContract, r: f64, pi: f64, win: &[f64], base: &[f64]) -> Allocation {
    let part = |alpha: f64, total: f64| -> Vec<f64> {
        win.iter().zip(base).map(|(w, b)| alpha * total * w + (1.0 - alpha) * total * b).collect()
    };
    Allocation { instantaneous: part(contract.alpha_i, r), continuation: part(contract.alpha_c, pi) }
}

/// Lump-sum transfers that put the game on the efficiency knife-edge.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Transfers {
    /// Paid to each loser on top of `R_l`.
    pub to_loser: f64,
    /// Paid to the winner; restores budget balance.
    pub to_winner: f64,
}

/// `T_l = (π_s − π_l)/r − R_l` per loser, `T_w = −(N−1)·T_l`.
pub fn loser_transfer(params: &GameParams) -> Result<Transfers> {
    params.checked_game()?;
    let to_loser = params.loser_externality();
    Ok(Transfers { to_loser, to_winner: -(params.n() - 1.0) * to_loser })
}
