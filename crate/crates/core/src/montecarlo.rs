//! Forward simulation of the research game.
//!
//! Without a breakthrough the public belief, and hence every effort level,
//! evolves deterministically. The no-breakthrough path is therefore built once
//! per run as a sequence of constant-effort segments (of length `dt` for
//! belief-indexed profiles, or the pieces of an [`EffortPath`]). Each
//! replication draws the state, then samples the breakthrough time exactly
//! by inverting the cumulative hazard along that path; the winner is drawn in
//! proportion to efforts. Replication `i` uses ChaCha stream `i` under the
//! run seed, so results do not depend on evaluation order.

use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contracts::{allocate, induced_game, ContractFamily, Economy, SharingContract, Terminal};
use crate::dynamics::{belief_path, EffortPath, Outcome};
use crate::math::{exp, ln, sqrt};
use crate::params::GameParams;
use crate::{Error, Result};

/// Effort choices along the no-breakthrough path.
pub trait Strategy {
    /// Writes every agent's effort at time `t` and belief `p` into `out`.
    fn efforts(&self, t: f64, p: f64, out: &mut [f64]);

    /// Whether efforts depend on time only through the belief. Such a
    /// profile is absorbed as soon as total effort is zero.
    fn belief_indexed(&self) -> bool;

    /// Next time after `t` at which time-indexed efforts change.
    fn next_switch(&self, _t: f64) -> f64 {
        f64::INFINITY
    }

    /// Whether nobody exerts effort from `t` onwards.
    fn idle_from(&self, _t: f64) -> bool {
        false
    }
}

/// Every agent plays the same belief-indexed effort `k(p)`.
pub struct Symmetric<F>(pub F);

impl<F: Fn(f64) -> f64> Strategy for Symmetric<F> {
    fn efforts(&self, _t: f64, p: f64, out: &mut [f64]) {
        out.fill((self.0)(p).clamp(0.0, 1.0));
    }

    fn belief_indexed(&self) -> bool {
        true
    }
}

/// Full effort strictly above `threshold`, none at or below it.
pub fn cutoff(threshold: f64) -> Symmetric<impl Fn(f64) -> f64> {
    Symmetric(move |p: f64| if p > threshold { 1.0 } else { 0.0 })
}

/// Per-agent belief-indexed efforts.
pub struct Markov(pub Vec<Box<dyn Fn(f64) -> f64>>);

impl Strategy for Markov {
    fn efforts(&self, _t: f64, p: f64, out: &mut [f64]) {
        for (k, f) in out.iter_mut().zip(&self.0) {
            *k = f(p).clamp(0.0, 1.0);
        }
    }

    fn belief_indexed(&self) -> bool {
        true
    }
}

impl Strategy for EffortPath {
    fn efforts(&self, t: f64, _p: f64, out: &mut [f64]) {
        for (i, k) in out.iter_mut().enumerate() {
            *k = self.effort(i, t);
        }
    }

    fn belief_indexed(&self) -> bool {
        false
    }

    fn next_switch(&self, t: f64) -> f64 {
        EffortPath::next_switch(self, t)
    }

    fn idle_from(&self, t: f64) -> bool {
        EffortPath::idle_from(self, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SimConfig {
    pub p0: f64,
    pub dt: f64,
    pub t_max: f64,
    pub reps: u64,
    pub seed: u64,
}

impl SimConfig {
    /// Step `dt = 1e-3`, horizon `40/r`.
    pub fn new(params: &GameParams, p0: f64, reps: u64, seed: u64) -> Self {
        SimConfig { p0, dt: 1e-3, t_max: 40.0 / params.discount, reps, seed }
    }

    pub fn validate(&self, params: &GameParams) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p0) {
            return Err(Error::domain("p0", self.p0));
        }
        let max_dt = 0.05 / (params.n() * params.lambda);
        if !(self.dt > 0.0 && self.dt <= max_dt) {
            return Err(Error::Precondition(alloc::format!("time step {} must lie in (0, {max_dt}]", self.dt)));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::domain("t_max", self.t_max));
        }
        if self.reps == 0 {
            return Err(Error::Precondition("at least one replication is needed".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PayoffStats {
    pub reps: u64,
    /// Per-agent mean discounted flow-equivalent payoff.
    pub mean: Vec<f64>,
    /// Per-agent sample standard deviation over `√reps`.
    pub std_err: Vec<f64>,
    pub breakthrough_freq: f64,
    /// Mean breakthrough time among runs with a breakthrough; `None` if none.
    pub mean_tau: Option<f64>,
}

/// Constant-effort stretch `[start, end)` of the no-breakthrough path.
#[derive(Debug, Clone)]
struct Segment {
    start: f64,
    end: f64,
    /// Total hazard `λ·K` in the good state.
    rate: f64,
    /// Cumulative good-state hazard at `start`.
    hazard_before: f64,
}

/// The deterministic no-breakthrough path of one run.
struct Path {
    n: usize,
    segments: Vec<Segment>,
    /// Row-major per-segment efforts.
    efforts: Vec<f64>,
    /// Row-major `∫ r e^{−rt} π_s (1−k_i) dt` before each segment.
    safe_before: Vec<f64>,
    /// Time from which everyone plays safe forever, if reached.
    absorbed_at: Option<f64>,
    end: f64,
    end_safe: Vec<f64>,
}

impl Path {
    fn build(params: &GameParams, strategy: &dyn Strategy, cfg: &SimConfig) -> Self {
        let n = params.n_agents;
        let (r, pi_s, lambda) = (params.discount, params.pi_s, params.lambda);
        let mut k = alloc::vec![0.0; n];
        let mut safe = alloc::vec![0.0; n];
        let mut path = Path {
            n,
            segments: Vec::new(),
            efforts: Vec::new(),
            safe_before: Vec::new(),
            absorbed_at: None,
            end: cfg.t_max,
            end_safe: Vec::new(),
        };
        let (mut t, mut p, mut hazard) = (0.0, cfg.p0, 0.0);
        while t < cfg.t_max {
            strategy.efforts(t, p, &mut k);
            let total: f64 = k.iter().sum();
            let idle = total == 0.0 && (strategy.belief_indexed() || strategy.idle_from(t));
            if idle || (strategy.belief_indexed() && p == 0.0) {
                path.absorbed_at = Some(t);
                path.end = t;
                break;
            }
            let end = if strategy.belief_indexed() {
                t + cfg.dt
            } else {
                strategy.next_switch(t)
            }
            .min(cfg.t_max);
            path.segments.push(Segment { start: t, end, rate: lambda * total, hazard_before: hazard });
            path.efforts.extend_from_slice(&k);
            path.safe_before.extend_from_slice(&safe);
            let decay = exp(-r * t) - exp(-r * end);
            for (s, &ki) in safe.iter_mut().zip(&k) {
                *s += pi_s * (1.0 - ki) * decay;
            }
            hazard += lambda * total * (end - t);
            p = belief_path(p, total, lambda, end - t);
            t = end;
        }
        path.end_safe = safe;
        path
    }

    fn row(&self, seg: usize) -> &[f64] {
        &self.efforts[seg * self.n..(seg + 1) * self.n]
    }

    /// Segment in which cumulative hazard first exceeds `e`.
    fn locate(&self, e: f64) -> Option<usize> {
        let i = self.segments.partition_point(|s| s.hazard_before + s.rate * (s.end - s.start) <= e);
        (i < self.segments.len()).then_some(i)
    }

    /// Safe payoff of `agent` accumulated by `tau` inside segment `seg`.
    fn safe_until(&self, seg: usize, agent: usize, tau: f64, params: &GameParams) -> f64 {
        let s = &self.segments[seg];
        let k = self.row(seg)[agent];
        let r = params.discount;
        self.safe_before[seg * self.n + agent] + params.pi_s * (1.0 - k) * (exp(-r * s.start) - exp(-r * tau))
    }
}

/// Payoffs at a breakthrough, in flow-equivalent units.
type Prize<'a> = dyn Fn(usize, &[f64], &mut [f64]) -> Result<()> + 'a;

/// A prepared run that can be replayed replication by replication.
pub struct Simulation<'a> {
    params: GameParams,
    cfg: SimConfig,
    path: Path,
    prize: Box<Prize<'a>>,
}

impl<'a> Simulation<'a> {
    /// A run where the winner gets `r·R_w + π_w` and losers `r·R_l + π_l`.
    pub fn new(params: &GameParams, strategy: &dyn Strategy, cfg: &SimConfig) -> Result<Self> {
        let p = *params.checked()?;
        let prize = move |winner: usize, _k: &[f64], out: &mut [f64]| {
            for (i, v) in out.iter_mut().enumerate() {
                *v = if i == winner { p.winner_flow() } else { p.loser_flow() };
            }
            Ok(())
        };
        Simulation::with_prize(params, strategy, cfg, Box::new(prize))
    }

    fn with_prize(params: &GameParams, strategy: &dyn Strategy, cfg: &SimConfig, prize: Box<Prize<'a>>) -> Result<Self> {
        params.checked()?;
        cfg.validate(params)?;
        let path = Path::build(params, strategy, cfg);
        Ok(Simulation { params: *params, cfg: *cfg, path, prize })
    }

    /// Plays replication `rep`. `good` forces the state of the project.
    pub fn replicate(&self, rep: u64, good: Option<bool>) -> Result<Outcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(rep);
        let state_draw: f64 = rng.random();
        let good = good.unwrap_or(state_draw < self.cfg.p0);
        let arrival = if good {
            let u: f64 = rng.random();
            let e = -ln(1.0 - u);
            self.path.locate(e).map(|seg| (seg, e))
        } else {
            None
        };
        let (n, r) = (self.path.n, self.params.discount);
        let mut payoffs = alloc::vec![0.0; n];
        let Some((seg, e)) = arrival else {
            let tail = exp(-r * self.path.end) * self.params.pi_s;
            for (v, s) in payoffs.iter_mut().zip(&self.path.end_safe) {
                *v = s + tail;
            }
            let terminal = if self.path.absorbed_at.is_some() || self.path.segments.is_empty() {
                alloc::vec![0.0; n]
            } else {
                self.path.row(self.path.segments.len() - 1).to_vec()
            };
            return Ok(Outcome { tau: f64::INFINITY, winner: None, terminal_efforts: terminal, discounted_payoffs: payoffs });
        };
        let s = &self.path.segments[seg];
        let tau = (s.start + (e - s.hazard_before) / s.rate).min(s.end);
        let k = self.path.row(seg);
        let pick: f64 = rng.random::<f64>() * k.iter().sum::<f64>();
        let mut acc = 0.0;
        let mut winner = n - 1;
        for (i, &ki) in k.iter().enumerate() {
            acc += ki;
            if pick < acc && ki > 0.0 {
                winner = i;
                break;
            }
        }
        while k[winner] == 0.0 {
            winner -= 1;
        }
        let mut prize = alloc::vec![0.0; n];
        (self.prize)(winner, k, &mut prize)?;
        let discount = exp(-r * tau);
        for (i, v) in payoffs.iter_mut().enumerate() {
            *v = self.path.safe_until(seg, i, tau, &self.params) + discount * prize[i];
        }
        Ok(Outcome { tau, winner: Some(winner), terminal_efforts: k.to_vec(), discounted_payoffs: payoffs })
    }

    /// Runs every replication and reduces in replication order.
    pub fn run(&self) -> Result<PayoffStats> {
        let n = self.path.n;
        let mut mean = alloc::vec![0.0; n];
        let mut m2 = alloc::vec![0.0; n];
        let (mut hits, mut tau_sum) = (0u64, 0.0);
        for rep in 0..self.cfg.reps {
            let out = self.replicate(rep, None)?;
            let count = (rep + 1) as f64;
            for i in 0..n {
                let x = out.discounted_payoffs[i];
                let d = x - mean[i];
                mean[i] += d / count;
                m2[i] += d * (x - mean[i]);
            }
            if out.winner.is_some() {
                hits += 1;
                tau_sum += out.tau;
            }
        }
        let reps = self.cfg.reps as f64;
        let std_err = m2
            .iter()
            .map(|&s| if self.cfg.reps > 1 { sqrt(s / (reps - 1.0) / reps) } else { 0.0 })
            .collect();
        Ok(PayoffStats {
            reps: self.cfg.reps,
            mean,
            std_err,
            breakthrough_freq: hits as f64 / reps,
            mean_tau: (hits > 0).then(|| tau_sum / hits as f64),
        })
    }
}

pub fn simulate(params: &GameParams, strategy: &dyn Strategy, cfg: &SimConfig) -> Result<PayoffStats> {
    Simulation::new(params, strategy, cfg)?.run()
}

/// Simulates the game a contract induces on `base`. Effort-based contracts
/// split the prize by efforts at the breakthrough.
pub fn simulate_with_contract(
    base: &Economy,
    contract: &SharingContract,
    strategy: &dyn Strategy,
    cfg: &SimConfig,
) -> Result<PayoffStats> {
    Simulation::with_contract(base, contract, strategy, cfg)?.run()
}

impl Simulation<'static> {
    /// A run of the game `contract` induces on `base`.
    pub fn with_contract(
        base: &Economy,
        contract: &SharingContract,
        strategy: &dyn Strategy,
        cfg: &SimConfig,
    ) -> Result<Self> {
        let params = induced_game(contract, base)?;
    let (c, b) = (*contract, *base);
    let prize = move |winner: usize, k: &[f64], out: &mut [f64]| {
        let terminal = match c.family {
            ContractFamily::WinnerBased => Terminal::Winner(winner),
            ContractFamily::EffortBased => Terminal::Efforts(k),
        };
        let a = allocate(&c, &b, terminal)?;
        for ((v, lump), flow) in out.iter_mut().zip(&a.instantaneous).zip(&a.continuation) {
            *v = b.discount * lump + flow;
        }
        Ok(())
    };
    Simulation::with_prize(&params, strategy, cfg, Box::new(prize))
    }
}
