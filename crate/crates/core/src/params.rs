//! Game primitives.

use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Symmetric game primitives. Totals `R` and `Π` are derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct GameParams {
    pub n_agents: usize,
    /// Breakthrough rate per unit of effort when the project is good.
    pub lambda: f64,
    pub discount: f64,
    /// Safe flow payoff per unit of effort.
    pub pi_s: f64,
    /// Lump sum paid to the winner.
    pub r_w: f64,
    /// Lump sum paid to each loser.
    pub r_l: f64,
    /// Winner's continuation flow.
    pub pi_w: f64,
    /// Each loser's continuation flow.
    pub pi_l: f64,
}

impl GameParams {
    pub fn n(&self) -> f64 {
        self.n_agents as f64
    }

    /// Total lump sum `R = R_w + (N−1)·R_l`.
    pub fn r_total(&self) -> f64 {
        self.r_w + (self.n() - 1.0) * self.r_l
    }

    /// Total continuation flow `Π = π_w + (N−1)·π_l`.
    pub fn pi_total(&self) -> f64 {
        self.pi_w + (self.n() - 1.0) * self.pi_l
    }

    /// Flow value of a loser at the breakthrough, `r·R_l + π_l`.
    pub fn loser_flow(&self) -> f64 {
        self.discount * self.r_l + self.pi_l
    }

    /// Flow value of the winner at the breakthrough, `r·R_w + π_w`.
    pub fn winner_flow(&self) -> f64 {
        self.discount * self.r_w + self.pi_w
    }

    /// Signed loser externality `(π_s − π_l)/r − R_l`. Zero is the efficiency
    /// knife-edge.
    pub fn loser_externality(&self) -> f64 {
        (self.pi_s - self.pi_l) / self.discount - self.r_l
    }

    /// Validates and returns `self`, or the failing report as an error.
    pub fn checked(&self) -> Result<&Self> {
        let report = validate(self);
        if report.is_ok() {
            Ok(self)
        } else {
            Err(Error::InvalidParams(report))
        }
    }

    /// Like [`checked`](Self::checked) but additionally requires `N ≥ 2`.
    pub fn checked_game(&self) -> Result<&Self> {
        self.checked()?;
        if self.n_agents < 2 {
            return Err(Error::Precondition("equilibrium analysis needs at least two agents".into()));
        }
        Ok(self)
    }
}

/// A probability that the project is good.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "f64", into = "f64"))]
pub struct Belief(f64);

impl Belief {
    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Belief(p))
        } else {
            Err(Error::domain("belief", p))
        }
    }

    /// Requires `0 < p < 1`.
    pub fn interior(p: f64) -> Result<Self> {
        if p > 0.0 && p < 1.0 {
            Ok(Belief(p))
        } else {
            Err(Error::domain("belief", p))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Belief {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Belief::new(p)
    }
}

impl From<Belief> for f64 {
    fn from(b: Belief) -> f64 {
        b.0
    }
}

/// One violated assumption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamIssue {
    NoAgents,
    NonFinite(&'static str),
    NonPositiveRate(&'static str),
    NegativeSafeFlow,
    /// `Π ≤ N·π_s`: a breakthrough does not improve total welfare.
    BreakthroughNotImproving { pi_total: f64, safe_total: f64 },
    /// `π_w < π_l`: losing pays a higher flow than winning.
    WinnerBelowLoser,
    SingleAgent,
    /// Per-agent arrays of different lengths.
    LengthMismatch,
    /// Agent `0` has a nonpositive effort capacity.
    NonPositiveCapacity(usize),
    /// Agent `0` gains no more from winning than from playing safe.
    WinningNotWorthwhile(usize),
}

impl fmt::Display for ParamIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamIssue::NoAgents => write!(f, "n_agents must be at least 1"),
            ParamIssue::NonFinite(name) => write!(f, "{name} is not finite"),
            ParamIssue::NonPositiveRate(name) => write!(f, "{name} must be positive"),
            ParamIssue::NegativeSafeFlow => write!(f, "pi_s must be nonnegative"),
            ParamIssue::BreakthroughNotImproving { pi_total, safe_total } => {
                write!(f, "Π ≤ Nπ_s ({pi_total} ≤ {safe_total})")
            }
            ParamIssue::WinnerBelowLoser => write!(f, "π_w < π_l"),
            ParamIssue::SingleAgent => write!(f, "N = 1: no strategic interaction"),
            ParamIssue::LengthMismatch => write!(f, "per-agent arrays differ in length"),
            ParamIssue::NonPositiveCapacity(i) => write!(f, "capacity of agent {i} must be positive"),
            ParamIssue::WinningNotWorthwhile(i) => write!(f, "agent {i}: π_w ≤ μπ_s"),
        }
    }
}

/// Hard failures in `errors`, soft assumption violations in `warnings`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub errors: Vec<ParamIssue>,
    pub warnings: Vec<ParamIssue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.errors.is_empty() {
            return write!(f, "ok");
        }
        for (i, e) in self.errors.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

pub fn validate(params: &GameParams) -> ValidationReport {
    let mut report = ValidationReport::default();
    let fields = [
        ("lambda", params.lambda),
        ("discount", params.discount),
        ("pi_s", params.pi_s),
        ("r_w", params.r_w),
        ("r_l", params.r_l),
        ("pi_w", params.pi_w),
        ("pi_l", params.pi_l),
    ];
    for (name, v) in fields {
        if !v.is_finite() {
            report.errors.push(ParamIssue::NonFinite(name));
        }
    }
    if params.n_agents == 0 {
        report.errors.push(ParamIssue::NoAgents);
    }
    if !(params.lambda > 0.0) {
        report.errors.push(ParamIssue::NonPositiveRate("lambda"));
    }
    if !(params.discount > 0.0) {
        report.errors.push(ParamIssue::NonPositiveRate("discount"));
    }
    if params.pi_s < 0.0 {
        report.errors.push(ParamIssue::NegativeSafeFlow);
    }
    if !report.errors.is_empty() {
        return report;
    }

    let pi_total = params.pi_total();
    let safe_total = params.n() * params.pi_s;
    if !(pi_total > safe_total) {
        report
            .errors
            .push(ParamIssue::BreakthroughNotImproving { pi_total, safe_total });
    }
    if params.pi_w < params.pi_l {
        report.warnings.push(ParamIssue::WinnerBelowLoser);
    }
    if params.n_agents == 1 {
        report.warnings.push(ParamIssue::SingleAgent);
    }
    report
}

/// Named parameter sets used throughout the tests and documentation.
pub mod fixtures {
    use super::GameParams;

    const fn base(r_w: f64, r_l: f64, pi_w: f64, pi_l: f64) -> GameParams {
        GameParams {
            n_agents: 2,
            lambda: 1.0,
            discount: 1.0,
            pi_s: 1.0,
            r_w,
            r_l,
            pi_w,
            pi_l,
        }
    }

    /// Losers are exactly compensated: the efficient knife-edge.
    pub const P_EFF: GameParams = base(0.0, 0.0, 3.0, 1.0);
    /// The classic two-armed bandit game (`R_w = h`, `π_w = π_l = λh` with `h = 2`).
    pub const P_KRC: GameParams = base(2.0, 0.0, 2.0, 2.0);
    /// Losers benefit from breakthroughs (free riding).
    pub const P_UNDER: GameParams = base(0.0, 0.0, 3.0, 2.0);
    /// Losers are harmed by breakthroughs (preemption).
    pub const P_OVER: GameParams = base(0.0, 0.0, 4.0, 0.0);
}
