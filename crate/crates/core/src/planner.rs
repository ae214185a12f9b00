//! The cooperative benchmark.
//!
//! A planner maximizing the agents' total payoff puts everybody at full
//! effort while the belief exceeds `p_FB` and stops below it. On the effort
//! region the per-agent value solves
//! `(1 + Npλ/r)·V + (Nλ/r)·p(1−p)·V' = pλ(Π/r + R)`, whose solutions are
//! `a·p + C·φ(p)` with `φ(p) = (1−p)·Ω(p)^{r/(Nλ)}`.

use crate::math::powf;
use crate::params::GameParams;
use crate::{Error, Result};

/// First-best threshold `π_s / (λR + (λ/r)(Π − Nπ_s))`.
///
/// Returns the raw formula; callers that need a belief in `(0, 1)` check it.
pub fn p_fb(params: &GameParams) -> f64 {
    if params.pi_s == 0.0 {
        return 0.0;
    }
    let lambda = params.lambda;
    let denom = lambda * params.r_total()
        + lambda / params.discount * (params.pi_total() - params.n() * params.pi_s);
    params.pi_s / denom
}

/// `φ(p) = (1−p)·Ω(p)^{r/(capacity·λ)}` on the open interval.
pub fn phi(p: f64, capacity: f64, lambda: f64, discount: f64) -> Result<f64> {
    if p > 0.0 && p < 1.0 {
        Ok(phi_unchecked(p, capacity, lambda, discount))
    } else {
        Err(Error::domain("belief", p))
    }
}

/// [`phi`] extended by its limit `φ(1) = 0`.
pub fn phi_total(p: f64, capacity: f64, lambda: f64, discount: f64) -> Result<f64> {
    if p == 1.0 {
        Ok(0.0)
    } else {
        phi(p, capacity, lambda, discount)
    }
}

fn phi_unchecked(p: f64, capacity: f64, lambda: f64, discount: f64) -> f64 {
    (1.0 - p) * powf((1.0 - p) / p, discount / (capacity * lambda))
}

fn phi_derivative(p: f64, capacity: f64, lambda: f64, discount: f64) -> f64 {
    let nu = discount / (capacity * lambda);
    -powf((1.0 - p) / p, nu) * (1.0 + nu / p)
}

/// A solution `slope·p + c·φ(p)` of the full-effort ODE with total
/// capacity `capacity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullEffortBranch {
    pub slope: f64,
    pub c: f64,
    capacity: f64,
    lambda: f64,
    discount: f64,
}

impl FullEffortBranch {
    pub fn new(slope: f64, c: f64, capacity: f64, lambda: f64, discount: f64) -> Self {
        FullEffortBranch { slope, c, capacity, lambda, discount }
    }

    /// The branch passing through `(p0, v0)`.
    pub fn through(slope: f64, capacity: f64, lambda: f64, discount: f64, p0: f64, v0: f64) -> Result<Self> {
        let phi0 = phi(p0, capacity, lambda, discount)?;
        Ok(FullEffortBranch::new(slope, (v0 - slope * p0) / phi0, capacity, lambda, discount))
    }

    /// Per-agent slope `λ(Π/r + R)/(1 + Nλ/r)` for a symmetric game.
    pub fn symmetric_slope(params: &GameParams) -> f64 {
        let lr = params.lambda / params.discount;
        params.lambda * (params.pi_total() / params.discount + params.r_total()) / (1.0 + params.n() * lr)
    }

    pub fn value(&self, p: f64) -> f64 {
        if p >= 1.0 || self.c == 0.0 {
            return self.slope * p;
        }
        self.slope * p + self.c * phi_unchecked(p, self.capacity, self.lambda, self.discount)
    }

    pub fn derivative(&self, p: f64) -> f64 {
        if self.c == 0.0 {
            return self.slope;
        }
        self.slope + self.c * phi_derivative(p, self.capacity, self.lambda, self.discount)
    }
}

/// The cooperative solution: threshold, option-value constant and value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstBest {
    pub p_fb: f64,
    pub coefficient_c: f64,
    pi_s: f64,
    branch: FullEffortBranch,
}

impl FirstBest {
    pub fn new(params: &GameParams) -> Result<Self> {
        params.checked()?;
        let p_fb = p_fb(params);
        let n = params.n();
        let lr = params.lambda / params.discount;
        let slope = FullEffortBranch::symmetric_slope(params);
        let c = if p_fb > 0.0 && p_fb < 1.0 {
            let phi_fb = phi_unchecked(p_fb, n, params.lambda, params.discount);
            params.pi_s * (1.0 - p_fb) * (n * lr) / ((1.0 + n * lr) * phi_fb)
        } else {
            0.0
        };
        let branch = FullEffortBranch::new(slope, c, n, params.lambda, params.discount);
        Ok(FirstBest { p_fb, coefficient_c: c, pi_s: params.pi_s, branch })
    }

    /// Whether the planner experiments at all for some belief below one.
    fn experiments(&self) -> bool {
        self.p_fb < 1.0
    }

    /// Per-agent flow value.
    pub fn value(&self, p: f64) -> f64 {
        if p <= self.p_fb || !self.experiments() {
            self.pi_s
        } else {
            self.branch.value(p)
        }
    }

    /// Derivative of [`value`](Self::value); the right derivative at `p_fb`.
    pub fn derivative(&self, p: f64) -> f64 {
        if p < self.p_fb || !self.experiments() {
            0.0
        } else {
            self.branch.derivative(p)
        }
    }

    pub fn branch(&self) -> &FullEffortBranch {
        &self.branch
    }
}

pub fn v_fb(params: &GameParams, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain("belief", p));
    }
    Ok(FirstBest::new(params)?.value(p))
}

/// Per-agent effort of the first-best policy: 1 strictly above `p_FB`, else 0.
pub fn fb_policy(params: &GameParams, p: f64) -> f64 {
    if p > p_fb(params) {
        1.0
    } else {
        0.0
    }
}

/// Residual of the cooperative HJB at `(p, v, v')`.
///
/// `v − π_s − max_{K∈{0,N}} K·(p(λ/r)(Π/N − v − (1−p)v') − c(p)/N)` with
/// `c(p) = π_s − pλR`. The objective is linear in `K`, so the endpoints
/// suffice.
pub fn hjb_residual_coop(params: &GameParams, p: f64, v: f64, dv: f64) -> f64 {
    let n = params.n();
    let lr = params.lambda / params.discount;
    let cost = params.pi_s - p * params.lambda * params.r_total();
    let gain = p * lr * (params.pi_total() / n - v - (1.0 - p) * dv) - cost / n;
    v - params.pi_s - (n * gain).max(0.0)
}
