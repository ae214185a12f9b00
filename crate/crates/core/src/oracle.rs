//! Discrete-time dynamic programming on a belief grid.
//!
//! Time advances in steps of `dt`. Within a step the breakthrough time, the
//! discounting and the belief drift are integrated exactly for constant
//! efforts, and the continuation value is linearly interpolated between grid
//! points. Without a breakthrough beliefs only drift down, so ascending
//! Gauss–Seidel sweeps reach the fixed point almost immediately; sweeps
//! continue until two successive ones agree within `tol`.

use alloc::vec::Vec;

use crate::dynamics::belief_path;
use crate::math::{exp, one_minus_exp_neg};
use crate::params::GameParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub n_points: usize,
    pub dt: f64,
    pub max_sweeps: usize,
    pub tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n_points: 2001, dt: 1e-3, max_sweeps: 1000, tol: 1e-8 }
    }
}

impl GridSpec {
    pub fn validate(&self, params: &GameParams) -> Result<()> {
        if self.n_points < 101 {
            return Err(Error::Precondition(alloc::format!("grid needs at least 101 points, got {}", self.n_points)));
        }
        let max_dt = 0.1 / (params.n() * params.lambda);
        if !(self.dt > 0.0 && self.dt <= max_dt) {
            return Err(Error::Precondition(alloc::format!("time step {} must lie in (0, {max_dt}]", self.dt)));
        }
        if !(self.tol > 0.0) || self.max_sweeps == 0 {
            return Err(Error::Precondition("tolerance and sweep cap must be positive".into()));
        }
        Ok(())
    }

    pub fn beliefs(&self) -> Vec<f64> {
        let last = (self.n_points - 1) as f64;
        (0..self.n_points).map(|j| j as f64 / last).collect()
    }
}

/// Values and chosen per-agent efforts on a belief grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValueTable {
    pub beliefs: Vec<f64>,
    pub values: Vec<f64>,
    pub policy: Vec<f64>,
    pub sweeps: usize,
    pub residual: f64,
}

impl ValueTable {
    /// Linear interpolation of the value.
    pub fn value_at(&self, p: f64) -> f64 {
        let (i, theta) = locate(p, self.beliefs.len());
        (1.0 - theta) * self.values[i] + theta * self.values[i + 1]
    }

    /// Smallest belief at which the policy exerts positive effort, if any.
    pub fn switch_belief(&self) -> Option<f64> {
        self.policy.iter().position(|&k| k > 0.0).map(|j| self.beliefs[j])
    }
}

/// Lower grid index and weight on the upper neighbour for `p`.
fn locate(p: f64, n_points: usize) -> (usize, f64) {
    let x = p.clamp(0.0, 1.0) * (n_points - 1) as f64;
    let i = (x as usize).min(n_points - 2);
    (i, x - i as f64)
}

/// One candidate action in one cell, as `value = flow + weight·V(next)`.
struct Step {
    flow: f64,
    weight: f64,
    next: f64,
}

struct Kernel {
    lambda: f64,
    discount: f64,
    pi_s: f64,
    dt: f64,
}

impl Kernel {
    fn new(params: &GameParams, grid: &GridSpec) -> Self {
        Kernel { lambda: params.lambda, discount: params.discount, pi_s: params.pi_s, dt: grid.dt }
    }

    /// `own`: the agent's effort; `total`: all agents' effort; `prize`: the
    /// agent's flow-equivalent payoff given a breakthrough.
    fn step(&self, p: f64, own: f64, total: f64, prize: f64) -> Step {
        let (r, dt) = (self.discount, self.dt);
        let hazard = total * self.lambda;
        let joint = one_minus_exp_neg((r + hazard) * dt) / (r + hazard);
        let safe_weight = (1.0 - p) * one_minus_exp_neg(r * dt) + p * r * joint;
        let bt_weight = p * hazard * joint;
        let survive = 1.0 - p + p * exp(-hazard * dt);
        Step {
            flow: safe_weight * self.pi_s * (1.0 - own) + bt_weight * prize,
            weight: exp(-r * dt) * survive,
            next: belief_path(p, total, self.lambda, dt),
        }
    }
}

/// Value of `step` at cell `j` given current values; self-references are
/// solved exactly.
fn evaluate(step: &Step, j: usize, values: &[f64]) -> f64 {
    let (i, theta) = locate(step.next, values.len());
    let (mut flow, mut self_weight) = (step.flow, 0.0);
    for (idx, w) in [(i, 1.0 - theta), (i + 1, theta)] {
        if w == 0.0 {
            continue;
        }
        if idx == j {
            self_weight += step.weight * w;
        } else {
            flow += step.weight * w * values[idx];
        }
    }
    flow / (1.0 - self_weight)
}

/// Runs sweeps where `actions(j, p)` yields `(own_effort, step)` candidates.
fn solve<F>(params: &GameParams, grid: &GridSpec, mut actions: F) -> Result<ValueTable>
where
    F: FnMut(usize, f64, &mut Vec<(f64, Step)>),
{
    grid.validate(params)?;
    let beliefs = grid.beliefs();
    let mut values = alloc::vec![params.pi_s; grid.n_points];
    let mut policy = alloc::vec![0.0; grid.n_points];
    let mut buf = Vec::with_capacity(2);
    let mut residual = f64::INFINITY;
    for sweep in 1..=grid.max_sweeps {
        residual = 0.0;
        for (j, &p) in beliefs.iter().enumerate() {
            buf.clear();
            actions(j, p, &mut buf);
            let mut best = (f64::NEG_INFINITY, 0.0);
            for (own, step) in &buf {
                let v = evaluate(step, j, &values);
                if v > best.0 {
                    best = (v, *own);
                }
            }
            residual = f64::max(residual, (best.0 - values[j]).abs());
            values[j] = best.0;
            policy[j] = best.1;
        }
        if residual <= grid.tol {
            return Ok(ValueTable { beliefs, values, policy, sweeps: sweep, residual });
        }
    }
    Err(Error::NonConvergence { what: "belief-grid value iteration", residual })
}

/// Planner's per-agent value with all agents either idle or at full effort.
pub fn dp_first_best(params: &GameParams, grid: &GridSpec) -> Result<ValueTable> {
    params.checked()?;
    let kernel = Kernel::new(params, grid);
    let n = params.n();
    let prize = (params.discount * params.r_total() + params.pi_total()) / n;
    solve(params, grid, |_, p, out| {
        out.push((0.0, kernel.step(p, 0.0, 0.0, 0.0)));
        out.push((1.0, kernel.step(p, 1.0, n, prize)));
    })
}

fn check_table(table: &[f64], grid: &GridSpec, max: f64) -> Result<()> {
    if table.len() != grid.n_points {
        return Err(Error::Precondition(alloc::format!(
            "effort table has {} entries, grid has {}",
            table.len(),
            grid.n_points
        )));
    }
    if let Some(&bad) = table.iter().find(|&&k| !(0.0..=max).contains(&k)) {
        return Err(Error::domain("effort", bad));
    }
    Ok(())
}

fn role_step(kernel: &Kernel, params: &GameParams, p: f64, own: f64, others: f64) -> Step {
    let total = own + others;
    let prize = if total > 0.0 {
        let r = params.discount;
        (own * (r * params.r_w + params.pi_w) + others * (r * params.r_l + params.pi_l)) / total
    } else {
        0.0
    };
    kernel.step(p, own, total, prize)
}

/// One agent's optimal value against opponents whose total effort at grid
/// point `j` is `opponents[j]`.
pub fn dp_best_response(params: &GameParams, opponents: &[f64], grid: &GridSpec) -> Result<ValueTable> {
    params.checked_game()?;
    check_table(opponents, grid, params.n() - 1.0)?;
    let kernel = Kernel::new(params, grid);
    solve(params, grid, |j, p, out| {
        for own in [0.0, 1.0] {
            out.push((own, role_step(&kernel, params, p, own, opponents[j])));
        }
    })
}

/// One agent's value when it plays `own[j]` and opponents play `opponents[j]`.
pub fn dp_evaluate(params: &GameParams, own: &[f64], opponents: &[f64], grid: &GridSpec) -> Result<ValueTable> {
    params.checked_game()?;
    check_table(own, grid, 1.0)?;
    check_table(opponents, grid, params.n() - 1.0)?;
    let kernel = Kernel::new(params, grid);
    solve(params, grid, |j, p, out| {
        out.push((own[j], role_step(&kernel, params, p, own[j], opponents[j])));
    })
}
