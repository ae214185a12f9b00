use std::fmt::Write as _;
use std::path::Path;

use creditshare_core::contracts::{
    allocate, design_efficient, guarantee, induced_game, loser_transfer, Design, DesignWarning, Economy, FixedShare,
    Observability, Terminal,
};
use creditshare_core::dynamics::t_fb;
use creditshare_core::equilibrium::{
    classify, level_curve, overcomp_family, payoff_dominant, solve_overcompetitive, verify_mpe, Degeneracy,
    Equilibrium, InteriorSign, MpeVerification, Regime,
};
use creditshare_core::hetero::{
    agent_value, allocate_h, classify_h, design_efficient_h, guarantee_h, induced_h, normalized_guarantee, v_fb_h,
    HeteroParams,
};
use creditshare_core::montecarlo::{SimConfig, Simulation};
use creditshare_core::oracle::{dp_best_response, dp_first_best, GridSpec, ValueTable};
use creditshare_core::planner::{v_fb, FirstBest};
use creditshare_core::{validate, GameParams};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::io::{self, to_json, Table};
use crate::profile;
use crate::{
    Command, ContractCommand, CurveKind, DesignArgs, EconomyArgs, GridArgs, HeteroCommand, OracleCommand, ParamArgs,
    SimulateArgs, TerminalArgs,
};

pub(crate) struct Output {
    pub code: i32,
    pub stdout: String,
}

impl Output {
    fn json<T: Serialize>(value: &T) -> Self {
        Output { code: 0, stdout: to_json(value) }
    }
}

pub(crate) fn dispatch(command: Command) -> CliResult<Output> {
    match command {
        Command::Validate(p) => validate_cmd(&p),
        Command::Thresholds(p) => thresholds(&p),
        Command::Classify(p) => classify_cmd(&p),
        Command::FirstBest { params, p } => first_best(&params, p),
        Command::Equilibrium { params, p_t, p, verify, grid } => equilibrium(&params, p_t, p, verify, &grid),
        Command::Contract(c) => contract(c),
        Command::Hetero(h) => hetero(h),
        Command::Oracle(o) => oracle(o),
        Command::Simulate(s) => simulate(&s),
        Command::Curves { kind, params, points, lo, hi, p_t, out } => {
            curves(kind, &params, points, lo, hi, &p_t, out.as_deref())
        }
    }
}

fn load(args: &ParamArgs) -> CliResult<GameParams> {
    io::read_params(&args.params, &args.overrides)
}

fn load_valid(args: &ParamArgs) -> CliResult<GameParams> {
    let params = load(args)?;
    params.checked()?;
    Ok(params)
}

#[derive(Serialize)]
struct ValidateOut {
    ok: bool,
    errors: Vec<String>,
    warnings: Vec<String>,
}

fn validate_cmd(args: &ParamArgs) -> CliResult<Output> {
    let report = validate(&load(args)?);
    let out = ValidateOut {
        ok: report.is_ok(),
        errors: report.errors.iter().map(ToString::to_string).collect(),
        warnings: report.warnings.iter().map(ToString::to_string).collect(),
    };
    Ok(Output { code: if out.ok { 0 } else { 2 }, stdout: to_json(&out) })
}

#[derive(Serialize)]
struct ThresholdsOut {
    p_fb: f64,
    p_indiv: f64,
    p_cross: f64,
    regime: Regime,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_indiv_degeneracy: Option<Degeneracy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_cross_degeneracy: Option<Degeneracy>,
}

fn thresholds(args: &ParamArgs) -> CliResult<Output> {
    let t = classify(&load(args)?)?;
    Ok(Output::json(&ThresholdsOut {
        p_fb: t.p_fb,
        p_indiv: t.p_indiv.value,
        p_cross: t.p_cross.value,
        regime: t.regime,
        p_indiv_degeneracy: t.p_indiv.degeneracy,
        p_cross_degeneracy: t.p_cross.degeneracy,
    }))
}

#[derive(Serialize)]
struct ClassifyOut {
    regime: Regime,
    externality: f64,
    p_fb: f64,
    p_indiv: f64,
    p_cross: f64,
    ordering_holds: bool,
}

fn classify_cmd(args: &ParamArgs) -> CliResult<Output> {
    let t = classify(&load(args)?)?;
    Ok(Output::json(&ClassifyOut {
        regime: t.regime,
        externality: t.externality,
        p_fb: t.p_fb,
        p_indiv: t.p_indiv.value,
        p_cross: t.p_cross.value,
        ordering_holds: t.ordering_holds(),
    }))
}

#[derive(Serialize)]
struct FirstBestOut {
    p_fb: f64,
    coefficient_c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_fb: Option<f64>,
}

fn first_best(args: &ParamArgs, p: Option<f64>) -> CliResult<Output> {
    let params = load(args)?;
    let fb = FirstBest::new(&params)?;
    let (value, stop) = match p {
        Some(p) => {
            let stop = if p > 0.0 && p < 1.0 && fb.p_fb > 0.0 && fb.p_fb < 1.0 { Some(t_fb(&params, p)?) } else { None };
            (Some(v_fb(&params, p)?), stop)
        }
        None => (None, None),
    };
    Ok(Output::json(&FirstBestOut { p_fb: fb.p_fb, coefficient_c: fb.coefficient_c, p, value, t_fb: stop }))
}

fn grid_spec(g: &GridArgs) -> GridSpec {
    GridSpec { n_points: g.grid, dt: g.dt, tol: g.tol, ..GridSpec::default() }
}

#[derive(Serialize, Default)]
struct EquilibriumOut {
    regime: Option<Regime>,
    p_fb: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_dagger: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    interior_sign: Option<InteriorSign>,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    payoff_dominant_p_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kink_right_derivative: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    effort: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<MpeVerification>,
}

fn equilibrium(args: &ParamArgs, p_t: Option<f64>, p: Option<f64>, verify: bool, grid: &GridArgs) -> CliResult<Output> {
    let params = load(args)?;
    let t = classify(&params)?;
    let mut out = EquilibriumOut { regime: Some(t.regime), p_fb: t.p_fb, ..Default::default() };
    if t.regime == Regime::Overcompetitive {
        let (lo, hi) = overcomp_family(&params)?;
        out.family = Some([lo, hi]);
        out.payoff_dominant_p_t = Some(payoff_dominant(&params)?.p_t);
        if p_t.is_none() {
            if p.is_some() || verify {
                return Err(CliError::Core(creditshare_core::Error::Precondition(
                    "overcompetitive games need --p-t to pick an equilibrium".into(),
                )));
            }
            return Ok(Output::json(&out));
        }
    }
    let eq = Equilibrium::solve(&params, p_t)?;
    match &eq {
        Equilibrium::Efficient(_) => {}
        Equilibrium::Undercompetitive(u) => {
            out.p_stop = Some(u.p_stop);
            out.c_star = Some(u.c_star);
            out.p_dagger = Some(u.p_dagger);
            out.interior_sign = Some(u.sign);
        }
        Equilibrium::Overcompetitive(o) => {
            out.p_t = Some(o.p_t);
            out.kink_right_derivative = Some(o.kink_right_derivative);
        }
    }
    if let Some(p) = p {
        if !(0.0..=1.0).contains(&p) {
            return Err(creditshare_core::Error::Domain { what: "belief", value: p }.into());
        }
        out.p = Some(p);
        out.value = Some(eq.value(p));
        out.effort = Some(eq.effort(p));
    }
    if verify {
        let spec = grid_spec(grid);
        let profile: Vec<f64> = spec.beliefs().iter().map(|&b| eq.effort(b)).collect();
        out.verification = Some(verify_mpe(&params, &profile, &spec, creditshare_core::equilibrium::DEFAULT_DEVIATION_TOL)?);
    }
    Ok(Output::json(&out))
}

fn economy(args: &EconomyArgs) -> CliResult<Economy> {
    if let Some(path) = &args.params {
        let params = io::read_params(path, &[])?;
        return Ok(Economy::of(&params));
    }
    let missing = |name: &str| CliError::usage(format!("--{name} is required without --params"));
    Ok(Economy {
        n_agents: args.n.ok_or_else(|| missing("n"))?,
        lambda: args.lambda,
        discount: args.discount,
        pi_s: args.pi_s.ok_or_else(|| missing("pi-s"))?,
        r_total: args.r.ok_or_else(|| missing("r"))?,
        pi_total: args.pi.ok_or_else(|| missing("pi"))?,
    })
}

fn fixed_share(spec: &str) -> CliResult<FixedShare> {
    let bad = || CliError::usage(format!("--fix expects alpha-i=X or alpha-c=X, got `{spec}`"));
    let (key, value) = spec.split_once('=').ok_or_else(bad)?;
    let value: f64 = value.parse().map_err(|_| bad())?;
    match key {
        "alpha-i" | "alpha_i" => Ok(FixedShare::AlphaI(value)),
        "alpha-c" | "alpha_c" => Ok(FixedShare::AlphaC(value)),
        _ => Err(bad()),
    }
}

fn observability(d: &DesignArgs) -> Observability {
    if d.unobservable {
        Observability::Unobservable
    } else {
        Observability::Observable
    }
}

#[derive(Serialize)]
struct DesignOut {
    family: creditshare_core::contracts::ContractFamily,
    alpha_i: f64,
    alpha_c: f64,
    guarantee: f64,
    warnings: Vec<DesignWarning>,
    /// `belief-grid` or `time-simulation`.
    check: &'static str,
}

fn design_out(d: &Design, g: f64) -> DesignOut {
    DesignOut {
        family: d.contract.family,
        alpha_i: d.contract.alpha_i,
        alpha_c: d.contract.alpha_c,
        guarantee: g,
        warnings: d.warnings.clone(),
        check: if d.checked_in_time() { "time-simulation" } else { "belief-grid" },
    }
}

fn terminal(args: &TerminalArgs) -> CliResult<Terminal<'_>> {
    match (args.winner, args.efforts.is_empty()) {
        (Some(w), true) => Ok(Terminal::Winner(w)),
        (None, false) => Ok(Terminal::Efforts(&args.efforts)),
        _ => Err(CliError::usage("give exactly one of --winner or --efforts")),
    }
}

#[derive(Serialize)]
struct Scalar {
    guarantee: f64,
}

fn contract(cmd: ContractCommand) -> CliResult<Output> {
    match cmd {
        ContractCommand::Design { economy: e, design } => {
            let base = economy(&e)?;
            let d = design_efficient(&base, design.family.into(), fixed_share(&design.fix)?, observability(&design))?;
            let g = guarantee(&d.contract, &base)?;
            Ok(Output::json(&design_out(&d, g)))
        }
        ContractCommand::Guarantee { contract, economy: e } => {
            let c = io::read_contract(&contract)?;
            Ok(Output::json(&Scalar { guarantee: guarantee(&c, &economy(&e)?)? }))
        }
        ContractCommand::Induce { contract, economy: e } => {
            let c = io::read_contract(&contract)?;
            Ok(Output::json(&induced_game(&c, &economy(&e)?)?))
        }
        ContractCommand::Allocate { contract, economy: e, terminal: t } => {
            let c = io::read_contract(&contract)?;
            Ok(Output::json(&allocate(&c, &economy(&e)?, terminal(&t)?)?))
        }
        ContractCommand::Transfer(p) => Ok(Output::json(&loser_transfer(&load(&p)?)?)),
    }
}

fn load_hetero(args: &ParamArgs) -> CliResult<HeteroParams> {
    let hp = io::read_hetero(&args.params, &args.overrides)?;
    hp.checked()?;
    Ok(hp)
}

#[derive(Serialize)]
struct HeteroValueOut {
    p: f64,
    total: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    agents: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct HeteroGuaranteeOut {
    normalized: f64,
    per_agent: Vec<f64>,
}

fn hetero(cmd: HeteroCommand) -> CliResult<Output> {
    match cmd {
        HeteroCommand::Classify(p) => Ok(Output::json(&classify_h(&load_hetero(&p)?)?)),
        HeteroCommand::Value { params, p } => {
            let hp = load_hetero(&params)?;
            let total = v_fb_h(&hp, p)?;
            let agents = if classify_h(&hp)?.efficient {
                Some((0..hp.n_agents()).map(|i| agent_value(&hp, i, p)).collect::<Result<Vec<_>, _>>()?)
            } else {
                None
            };
            Ok(Output::json(&HeteroValueOut { p, total, agents }))
        }
        HeteroCommand::Design { params, design } => {
            let hp = load_hetero(&params)?;
            let d = design_efficient_h(&hp, design.family.into(), fixed_share(&design.fix)?, observability(&design))?;
            let g = normalized_guarantee(&d.contract, &hp)?;
            Ok(Output::json(&design_out(&d, g)))
        }
        HeteroCommand::Guarantee { params, contract } => {
            let hp = load_hetero(&params)?;
            let c = io::read_contract(&contract)?;
            Ok(Output::json(&HeteroGuaranteeOut {
                normalized: normalized_guarantee(&c, &hp)?,
                per_agent: guarantee_h(&c, &hp)?,
            }))
        }
        HeteroCommand::Induce { params, contract } => {
            let hp = load_hetero(&params)?;
            Ok(Output::json(&induced_h(&io::read_contract(&contract)?, &hp)?))
        }
        HeteroCommand::Allocate { params, contract, terminal: t } => {
            let hp = load_hetero(&params)?;
            Ok(Output::json(&allocate_h(&io::read_contract(&contract)?, &hp, terminal(&t)?)?))
        }
    }
}

#[derive(Serialize)]
struct OracleOut {
    sweeps: usize,
    residual: f64,
    switch_belief: Option<f64>,
    value_at_zero: f64,
    value_at_one: f64,
}

fn table_out(t: &ValueTable, out: Option<&Path>) -> CliResult<Output> {
    if let Some(path) = out {
        let mut csv = Table::new(["p", "value", "policy"]);
        for ((&p, &v), &k) in t.beliefs.iter().zip(&t.values).zip(&t.policy) {
            csv.push(vec![p, v, k]);
        }
        io::write_file(path, &csv.to_csv())?;
    }
    Ok(Output::json(&OracleOut {
        sweeps: t.sweeps,
        residual: t.residual,
        switch_belief: t.switch_belief(),
        value_at_zero: t.values[0],
        value_at_one: *t.values.last().expect("grid is nonempty"),
    }))
}

fn oracle(cmd: OracleCommand) -> CliResult<Output> {
    match cmd {
        OracleCommand::FirstBest { params, grid, out } => {
            let params = load_valid(&params)?;
            table_out(&dp_first_best(&params, &grid_spec(&grid))?, out.as_deref())
        }
        OracleCommand::BestResponse { params, opponents, p_t, grid, out } => {
            let params = load_valid(&params)?;
            let spec = grid_spec(&grid);
            spec.validate(&params)?;
            let per_agent = profile::grid_table(&opponents, &params, p_t, &spec.beliefs())?;
            let others: Vec<f64> = per_agent.iter().map(|k| k * (params.n() - 1.0)).collect();
            table_out(&dp_best_response(&params, &others, &spec)?, out.as_deref())
        }
        OracleCommand::Verify { params, profile: prof, p_t, max_gain, grid } => {
            let params = load_valid(&params)?;
            let spec = grid_spec(&grid);
            spec.validate(&params)?;
            let table = profile::grid_table(&prof, &params, p_t, &spec.beliefs())?;
            Ok(Output::json(&verify_mpe(&params, &table, &spec, max_gain)?))
        }
    }
}

#[derive(Serialize)]
struct SimulateOut {
    reps: u64,
    mean: Vec<f64>,
    std_err: Vec<f64>,
    breakthrough_freq: f64,
    mean_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic: Option<f64>,
}

fn simulate(args: &SimulateArgs) -> CliResult<Output> {
    let params = load_valid(&args.params)?;
    let contract = args.contract.as_deref().map(io::read_contract).transpose()?;
    let base = Economy::of(&params);
    let game = match &contract {
        Some(c) => induced_game(c, &base)?,
        None => params,
    };
    let (strategy, value) = profile::strategy(&args.profile, &game, args.p_t)?;
    let mut cfg = SimConfig::new(&game, args.p0, args.reps, args.seed);
    cfg.dt = args.dt;
    if let Some(t) = args.t_max {
        cfg.t_max = t;
    }
    let sim = match &contract {
        Some(c) => Simulation::with_contract(&base, c, strategy.as_ref(), &cfg)?,
        None => Simulation::new(&game, strategy.as_ref(), &cfg)?,
    };
    if let Some(path) = &args.dump {
        let mut header = vec!["rep".to_string(), "tau".into(), "winner".into()];
        header.extend((1..=game.n_agents).map(|i| format!("payoff_{i}")));
        let mut table = Table::new(header);
        for rep in 0..cfg.reps {
            let o = sim.replicate(rep, None)?;
            let mut row = vec![rep as f64, o.tau, o.winner.map_or(-1.0, |w| w as f64)];
            row.extend(&o.discounted_payoffs);
            table.push(row);
        }
        io::write_file(path, &table.to_csv())?;
    }
    let stats = sim.run()?;
    Ok(Output::json(&SimulateOut {
        reps: stats.reps,
        mean: stats.mean,
        std_err: stats.std_err,
        breakthrough_freq: stats.breakthrough_freq,
        mean_tau: stats.mean_tau,
        analytic: value.map(|f| f(args.p0)),
    }))
}

fn curves(
    kind: CurveKind,
    args: &ParamArgs,
    points: usize,
    lo: f64,
    hi: f64,
    p_t: &[f64],
    out: Option<&Path>,
) -> CliResult<Output> {
    if points < 2 || !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
        return Err(CliError::usage("curves need at least 2 points on a subinterval of [0, 1]"));
    }
    let params = load(args)?;
    let grid: Vec<f64> = (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect();
    let table = match kind {
        CurveKind::Level => {
            params.checked_game()?;
            let mut header = vec!["p".to_string()];
            header.extend((0..params.n_agents).map(|k| format!("level_{k}")));
            header.push("v_fb".into());
            let fb = FirstBest::new(&params)?;
            let mut t = Table::new(header);
            for &p in &grid {
                let mut row = vec![p];
                row.extend((0..params.n_agents).map(|k| level_curve(&params, p, k as f64)));
                row.push(fb.value(p));
                t.push(row);
            }
            t
        }
        CurveKind::Under => {
            let eq = Equilibrium::Undercompetitive(creditshare_core::equilibrium::solve_undercompetitive(&params)?);
            let fb = FirstBest::new(&params)?;
            let mut t = Table::new(["p", "value", "effort", "v_fb"]);
            for &p in &grid {
                t.push(vec![p, eq.value(p), eq.effort(p), fb.value(p)]);
            }
            t
        }
        CurveKind::Over => {
            let (a, b) = overcomp_family(&params)?;
            let cutoffs = if p_t.is_empty() { vec![a, 0.5 * (a + b), b] } else { p_t.to_vec() };
            let eqs = cutoffs
                .iter()
                .map(|&x| solve_overcompetitive(&params, x))
                .collect::<Result<Vec<_>, _>>()?;
            let mut header = vec!["p".to_string()];
            header.extend(cutoffs.iter().map(|x| format!("value_{x}")));
            let mut t = Table::new(header);
            for &p in &grid {
                let mut row = vec![p];
                row.extend(eqs.iter().map(|e| e.value(p)));
                t.push(row);
            }
            t
        }
    };
    let csv = table.to_csv();
    match out {
        Some(path) => {
            io::write_file(path, &csv)?;
            let mut s = String::new();
            let _ = writeln!(s, "{{\"rows\":{points},\"out\":{}}}", serde_json::to_string(&path.display().to_string()).unwrap());
            Ok(Output { code: 0, stdout: s })
        }
        None => Ok(Output { code: 0, stdout: csv }),
    }
}
