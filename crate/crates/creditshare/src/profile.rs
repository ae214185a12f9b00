//! Strategy profiles named on the command line.

use std::path::PathBuf;
use std::str::FromStr;

use creditshare_core::equilibrium::Equilibrium;
use creditshare_core::montecarlo::{Strategy, Symmetric};
use creditshare_core::planner::{p_fb, FirstBest};
use creditshare_core::GameParams;

use crate::error::{CliError, CliResult};
use crate::io;

/// `equilibrium`, `first-best`, `cutoff=P`, `path=FILE` or `table=FILE`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Equilibrium,
    FirstBest,
    Cutoff(f64),
    Path(PathBuf),
    Table(PathBuf),
}

impl FromStr for ProfileSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "equilibrium" => return Ok(ProfileSpec::Equilibrium),
            "first-best" => return Ok(ProfileSpec::FirstBest),
            _ => {}
        }
        match s.split_once('=') {
            Some(("cutoff", x)) => x.parse().map(ProfileSpec::Cutoff).map_err(|e| format!("cutoff: {e}")),
            Some(("path", f)) => Ok(ProfileSpec::Path(f.into())),
            Some(("table", f)) => Ok(ProfileSpec::Table(f.into())),
            _ => Err(format!("unknown profile `{s}`; use equilibrium, first-best, cutoff=P, path=FILE or table=FILE")),
        }
    }
}

/// A belief-indexed symmetric effort rule with its analytic per-agent value,
/// when one is known.
pub struct Resolved {
    pub effort: Box<dyn Fn(f64) -> f64>,
    pub value: Option<Box<dyn Fn(f64) -> f64>>,
}

pub fn resolve(spec: &ProfileSpec, params: &GameParams, p_t: Option<f64>) -> CliResult<Resolved> {
    match spec {
        ProfileSpec::Equilibrium => {
            let eq = Equilibrium::solve(params, p_t)?;
            let eq2 = eq.clone();
            Ok(Resolved { effort: Box::new(move |p| eq.effort(p)), value: Some(Box::new(move |p| eq2.value(p))) })
        }
        ProfileSpec::FirstBest => {
            let threshold = p_fb(params);
            let fb = FirstBest::new(params)?;
            Ok(Resolved {
                effort: Box::new(move |p| if p > threshold { 1.0 } else { 0.0 }),
                value: Some(Box::new(move |p| fb.value(p))),
            })
        }
        ProfileSpec::Cutoff(x) => {
            let x = *x;
            Ok(Resolved { effort: Box::new(move |p| if p > x { 1.0 } else { 0.0 }), value: None })
        }
        ProfileSpec::Path(_) | ProfileSpec::Table(_) => {
            Err(CliError::usage("this profile is not belief-indexed; use equilibrium, first-best or cutoff=P"))
        }
    }
}

/// Per-agent efforts on the belief grid `beliefs`.
pub fn grid_table(spec: &ProfileSpec, params: &GameParams, p_t: Option<f64>, beliefs: &[f64]) -> CliResult<Vec<f64>> {
    if let ProfileSpec::Table(path) = spec {
        let table = io::read_effort_table(path)?;
        if table.len() != beliefs.len() {
            return Err(CliError::usage(format!(
                "effort table has {} rows but the grid has {} points",
                table.len(),
                beliefs.len()
            )));
        }
        return Ok(table);
    }
    let r = resolve(spec, params, p_t)?;
    Ok(beliefs.iter().map(|&p| (r.effort)(p)).collect())
}

type ValueFn = Box<dyn Fn(f64) -> f64>;

/// A strategy for simulation, with the analytic per-agent value if known.
pub fn strategy(spec: &ProfileSpec, params: &GameParams, p_t: Option<f64>) -> CliResult<(Box<dyn Strategy>, Option<ValueFn>)> {
    if let ProfileSpec::Path(path) = spec {
        return Ok((Box::new(io::read_effort_path(path, params.n_agents)?), None));
    }
    let r = resolve(spec, params, p_t)?;
    Ok((Box::new(Symmetric(r.effort)), r.value))
}
