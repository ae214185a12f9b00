//! Belief evolution and realized payoffs.
//!
//! Absent a breakthrough the public belief drifts down as
//! `dp = −K·λ·p(1−p)·dt`. In odds-ratio coordinates `Ω = (1−p)/p` this is
//! exponential growth, `Ω(t) = Ω(0)·e^{Kλt}`, which gives every closed form
//! in this module.

use alloc::vec::Vec;

use crate::math::{exp, ln};
use crate::params::GameParams;
use crate::planner;
use crate::{Error, Result};

/// `Ω(p) = (1−p)/p` for `0 < p < 1`.
pub fn odds_ratio(p: f64) -> Result<f64> {
    if p > 0.0 && p < 1.0 {
        Ok((1.0 - p) / p)
    } else {
        Err(Error::domain("belief", p))
    }
}

/// Belief after `t` units of time at constant total effort `K`.
///
/// Total on `[0, 1]`: the degenerate beliefs 0 and 1 never move.
pub fn belief_path(p0: f64, total_effort: f64, lambda: f64, t: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p0));
    if p0 <= 0.0 || p0 >= 1.0 || total_effort * t == 0.0 {
        return p0;
    }
    let decay = exp(-total_effort * lambda * t);
    let omega = (1.0 - p0) / p0;
    decay / (omega + decay)
}

/// Time at which full effort by all agents drives the belief from `p0` down
/// to the first-best threshold. Zero if `p0` is already at or below it.
pub fn t_fb(params: &GameParams, p0: f64) -> Result<f64> {
    params.checked()?;
    let omega0 = odds_ratio(p0)?;
    let p_fb = planner::p_fb(params);
    let omega_fb = odds_ratio(p_fb).map_err(|_| Error::domain("first-best threshold", p_fb))?;
    if p0 <= p_fb {
        return Ok(0.0);
    }
    let t = ln(omega_fb / omega0) / (params.n() * params.lambda);
    Ok(t.max(0.0))
}

/// Piecewise-constant per-agent effort over time. Piece `i` covers
/// `[starts[i], starts[i+1])`; the last piece extends to infinity. An empty
/// path means zero effort throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct EffortPath {
    n_agents: usize,
    starts: Vec<f64>,
    efforts: Vec<Vec<f64>>,
}

impl EffortPath {
    pub fn new(n_agents: usize, pieces: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        let mut starts = Vec::with_capacity(pieces.len());
        let mut efforts = Vec::with_capacity(pieces.len());
        for (t, k) in pieces {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::domain("piece start", t));
            }
            if let Some(&prev) = starts.last() {
                if t <= prev {
                    return Err(Error::Precondition("effort path pieces must start at strictly increasing times".into()));
                }
            } else if t != 0.0 {
                return Err(Error::Precondition("effort path must start at t = 0".into()));
            }
            if k.len() != n_agents {
                return Err(Error::Precondition("effort row length differs from the number of agents".into()));
            }
            if let Some(&bad) = k.iter().find(|k| !(0.0..=1.0).contains(*k)) {
                return Err(Error::domain("effort", bad));
            }
            starts.push(t);
            efforts.push(k);
        }
        Ok(EffortPath { n_agents, starts, efforts })
    }

    /// Every agent at full effort on `[0, t_stop)`, then zero.
    pub fn cutoff_at(n_agents: usize, t_stop: f64) -> Result<Self> {
        let mut pieces = Vec::new();
        if t_stop > 0.0 {
            pieces.push((0.0, alloc::vec![1.0; n_agents]));
            if t_stop.is_finite() {
                pieces.push((t_stop, alloc::vec![0.0; n_agents]));
            }
        } else {
            pieces.push((0.0, alloc::vec![0.0; n_agents]));
        }
        EffortPath::new(n_agents, pieces)
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.starts.iter().copied().zip(self.efforts.iter().map(Vec::as_slice))
    }

    fn piece_index(&self, t: f64) -> Option<usize> {
        match self.starts.partition_point(|&s| s <= t) {
            0 => None,
            i => Some(i - 1),
        }
    }

    pub fn effort(&self, agent: usize, t: f64) -> f64 {
        self.piece_index(t).map_or(0.0, |i| self.efforts[i][agent])
    }

    /// Start of the first piece strictly after `t`, or `+∞`.
    pub fn next_switch(&self, t: f64) -> f64 {
        let i = self.starts.partition_point(|&s| s <= t);
        self.starts.get(i).copied().unwrap_or(f64::INFINITY)
    }

    /// Whether every agent's effort is zero from `t` onwards.
    pub fn idle_from(&self, t: f64) -> bool {
        let first = self.piece_index(t).unwrap_or(0);
        self.efforts[first..].iter().all(|row| row.iter().all(|&k| k == 0.0))
    }

    /// `∫₀^τ r e^{−rt} π_s (1 − k_i(t)) dt`, integrated exactly per piece.
    pub fn discounted_safe_flow(&self, agent: usize, tau: f64, discount: f64, pi_s: f64) -> f64 {
        if self.starts.is_empty() {
            return pi_s * (1.0 - exp(-discount * tau));
        }
        let mut total = 0.0;
        for (i, &start) in self.starts.iter().enumerate() {
            if start >= tau {
                break;
            }
            let end = self.starts.get(i + 1).copied().unwrap_or(f64::INFINITY).min(tau);
            let k = self.efforts[i][agent];
            total += pi_s * (1.0 - k) * (exp(-discount * start) - exp(-discount * end));
        }
        total
    }
}

/// Which payoff functional applies to an agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Role {
    Winner,
    Loser,
    NoBreakthrough,
}

/// Realized flow-equivalent payoff of `agent` along `path`.
pub fn realized_payoff(
    role: Role,
    tau: f64,
    path: &EffortPath,
    agent: usize,
    params: &GameParams,
) -> Result<f64> {
    if agent >= path.n_agents() {
        return Err(Error::Precondition("agent index out of range".into()));
    }
    if !(tau >= 0.0) {
        return Err(Error::domain("tau", tau));
    }
    let r = params.discount;
    let safe = path.discounted_safe_flow(agent, tau, r, params.pi_s);
    let terminal = match role {
        Role::Winner => params.winner_flow(),
        Role::Loser => params.loser_flow(),
        Role::NoBreakthrough => {
            if tau.is_finite() {
                return Err(Error::Precondition("no-breakthrough payoff needs tau = ∞".into()));
            }
            return Ok(safe);
        }
    };
    if !tau.is_finite() {
        return Ok(safe);
    }
    Ok(safe + exp(-r * tau) * terminal)
}

/// A realized play of the game.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Breakthrough time, `+∞` if none.
    pub tau: f64,
    pub winner: Option<usize>,
    pub terminal_efforts: Vec<f64>,
    pub discounted_payoffs: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::fixtures::{P_EFF, P_KRC};
    use core::f64::consts::LN_2;

    #[test]
    fn odds_ratio_values() {
        assert_eq!(odds_ratio(0.5).unwrap(), 1.0);
        assert!((odds_ratio(0.8).unwrap() - 0.25).abs() < 1e-15);
        assert!((odds_ratio(0.25).unwrap() - 3.0).abs() < 1e-15);
        assert!(odds_ratio(0.0).is_err());
        assert!(odds_ratio(1.0).is_err());
    }

    #[test]
    fn belief_path_values() {
        assert_eq!(belief_path(0.5, 0.0, 1.0, 7.0), 0.5);
        assert_eq!(belief_path(0.5, 1.0, 1.0, 0.0), 0.5);
        assert!((belief_path(0.5, 1.0, 1.0, LN_2) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(belief_path(1.0, 2.0, 1.0, 3.0), 1.0);
        assert_eq!(belief_path(0.0, 2.0, 1.0, 3.0), 0.0);
    }

    #[test]
    fn t_fb_values() {
        assert!((t_fb(&P_EFF, 0.8).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(t_fb(&P_EFF, 0.5).unwrap(), 0.0);
        assert_eq!(t_fb(&P_EFF, 0.3).unwrap(), 0.0);
        assert!(t_fb(&P_EFF, 1.0).is_err());
    }

    #[test]
    fn t_fb_rejects_threshold_outside_unit_interval() {
        // π_s large enough that the formula exceeds one
        let p = GameParams { pi_s: 1.9, pi_w: 4.0, pi_l: 0.0, ..P_EFF };
        assert!(crate::planner::p_fb(&p) > 1.0);
        assert!(matches!(t_fb(&p, 0.5), Err(Error::Domain { .. })));
    }

    #[test]
    fn realized_payoff_examples() {
        let never = EffortPath::new(2, alloc::vec![]).unwrap();
        let v = realized_payoff(Role::Loser, f64::INFINITY, &never, 0, &P_EFF).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let v = realized_payoff(Role::Winner, 0.0, &never, 0, &P_KRC).unwrap();
        assert!((v - 4.0).abs() < 1e-15);
        let full = EffortPath::cutoff_at(2, LN_2).unwrap();
        let v = realized_payoff(Role::Winner, LN_2, &full, 0, &P_KRC).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
        let v = realized_payoff(Role::NoBreakthrough, f64::INFINITY, &never, 1, &P_KRC).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!(realized_payoff(Role::NoBreakthrough, 2.0, &never, 0, &P_KRC).is_err());
    }

    #[test]
    fn safe_flow_over_several_pieces() {
        let path = EffortPath::new(
            1,
            alloc::vec![(0.0, alloc::vec![1.0]), (1.0, alloc::vec![0.5]), (2.0, alloc::vec![0.0])],
        )
        .unwrap();
        let got = path.discounted_safe_flow(0, 3.0, 0.5, 2.0);
        let e = |t: f64| (-0.5 * t).exp();
        let want = 2.0 * 0.5 * (e(1.0) - e(2.0)) + 2.0 * (e(2.0) - e(3.0));
        assert!((got - want).abs() < 1e-15);
        assert_eq!(path.next_switch(0.5), 1.0);
        assert_eq!(path.next_switch(2.5), f64::INFINITY);
        assert!(path.idle_from(2.0));
        assert!(!path.idle_from(1.5));
        assert_eq!(path.effort(0, 1.0), 0.5);
    }

    #[test]
    fn effort_path_validation() {
        assert!(EffortPath::new(1, alloc::vec![(0.5, alloc::vec![1.0])]).is_err());
        assert!(EffortPath::new(1, alloc::vec![(0.0, alloc::vec![1.5])]).is_err());
        assert!(EffortPath::new(2, alloc::vec![(0.0, alloc::vec![1.0])]).is_err());
        assert!(EffortPath::new(1, alloc::vec![(0.0, alloc::vec![1.0]), (0.0, alloc::vec![0.0])]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn odds_grow_exponentially(p0 in 0.01..0.99f64, k in 0.0..4.0f64, lambda in 0.1..3.0f64, t in 0.0..2.0f64) {
            let p = belief_path(p0, k, lambda, t);
            let lhs = odds_ratio(p).unwrap();
            let rhs = odds_ratio(p0).unwrap() * (k * lambda * t).exp();
            proptest::prop_assert!(((lhs - rhs) / rhs).abs() <= 1e-12);
        }

        #[test]
        fn paths_compose(p0 in 0.01..0.99f64, k in 0.0..4.0f64, lambda in 0.1..3.0f64,
                         s in 0.0..2.0f64, t in 0.0..2.0f64) {
            let two_step = belief_path(belief_path(p0, k, lambda, s), k, lambda, t);
            let one_step = belief_path(p0, k, lambda, s + t);
            proptest::prop_assert!((two_step - one_step).abs() <= 1e-12);
        }

        #[test]
        fn paths_decrease_under_effort(p0 in 0.01..0.99f64, k in 0.1..4.0f64, t in 0.0..2.0f64, dt in 1e-3..1.0f64) {
            proptest::prop_assert!(belief_path(p0, k, 1.0, t + dt) < belief_path(p0, k, 1.0, t));
            proptest::prop_assert_eq!(belief_path(p0, 0.0, 1.0, t + dt), p0);
        }

        #[test]
        fn compensated_idle_loser_gets_safe_flow(tau in 0.0..20.0f64, pi_l in -3.0..3.0f64, r in 0.1..2.0f64) {
            let params = GameParams { discount: r, pi_l, r_l: (1.0 - pi_l) / r, pi_w: 10.0, ..P_EFF };
            let idle = EffortPath::new(2, alloc::vec![(0.0, alloc::vec![0.0, 0.0])]).unwrap();
            let v = realized_payoff(Role::Loser, tau, &idle, 1, &params).unwrap();
            proptest::prop_assert!((v - 1.0).abs() <= 1e-12);
        }
    }
}
