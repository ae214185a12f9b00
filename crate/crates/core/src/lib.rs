//! Strategic experimentation with breakthrough payoff externalities.
//!
//! `N` agents split a unit of effort between a safe status-quo technology and
//! a risky research project. If the project is good, each agent's effort
//! produces a conclusive breakthrough at rate `λ·k_i`; the first agent to
//! break through is the winner and every other agent is a loser. Lump sums and
//! continuation flows paid to winners and losers create the externality this
//! crate studies.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure numerics:
//!
//! * [`params`]: game primitives and validation.
//! * [`dynamics`]: belief paths, first-best stopping time, realized payoffs.
//! * [`planner`]: the cooperative (first-best) value function and threshold.
//! * [`equilibrium`]: thresholds, regimes and symmetric Markov equilibria.
//! * [`contracts`]: winner- and effort-based sharing contracts.
//! * [`hetero`]: heterogeneous effort capacities.
//! * [`oracle`]: a belief-grid dynamic-programming oracle.
//! * [`montecarlo`]: forward simulation of the game.
//!
//! All payoffs use flow-equivalent units: lump sums enter multiplied by the
//! discount rate, and an agent who plays safe forever is worth `π_s`.

#![cfg_attr(not(test), no_std)]
// Negated comparisons deliberately treat NaN as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod contracts;
pub mod dynamics;
pub mod equilibrium;
mod error;
pub mod hetero;
mod math;
pub mod montecarlo;
pub mod oracle;
pub mod params;
pub mod planner;

pub use error::{Error, Result};
pub use params::{validate, Belief, GameParams, ParamIssue, ValidationReport};

/// Absolute tolerance on `(π_s − π_l)/r − R_l` below which the game is treated
/// as sitting on the efficiency knife-edge.
pub const KNIFE_EDGE_TOL: f64 = 1e-12;

/// Absolute tolerance for comparing a value against a best-response level curve.
pub const GEOMETRY_TOL: f64 = 1e-10;
