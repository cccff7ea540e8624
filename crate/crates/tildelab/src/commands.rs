//! Subcommand implementations. Each returns a finished [`RunReport`]; files
//! named in the arguments are written as a side effect.

use std::path::Path;

use serde_json::{json, Value};
use tildelab_core::correlation::{
    conservation_combination, conservation_terms, distributed_concurrence_routes,
    mixed_equality_from_ledger, monogamy_report, subsystem_propagator, tau,
};
use tildelab_core::inversion::{
    bloch_decompose, invert_bloch, invert_generators, invert_product, invert_subsets,
    tilde_trace_factor,
};
use tildelab_core::monotone::{
    builtin_counterexample, monotone_deficit_cd, monotone_deficit_cd2, MonotoneVerdict,
};
use tildelab_core::search::{SearchConfig, Target};
use tildelab_core::{default_tolerance, subsets, DensityOperator, SubsetMask};

use crate::io::{self, FileError, OperatorFile, StateFile};
use crate::parallel;
use crate::report::RunReport;

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    File(#[from] FileError),

    #[error(transparent)]
    Core(#[from] tildelab_core::Error),

    #[error("{0}")]
    Usage(String),
}

pub type CommandResult = Result<RunReport, CommandError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Product,
    Subsets,
    Generators,
    Bloch,
    All,
}

fn load(path: &Path) -> Result<(StateFile, RunReport), CommandError> {
    let (state, text) = io::read_state(path)?;
    let report = RunReport::new("", 0.0).with_input(text.as_bytes());
    Ok((state, report))
}

fn start(
    command: &str,
    path: &Path,
    tol: Option<f64>,
) -> Result<(StateFile, RunReport), CommandError> {
    let (state, mut report) = load(path)?;
    report.command = command.into();
    report.tolerance = tol.unwrap_or_else(|| default_tolerance(state.dims().total()));
    report.set("dims", state.dims().as_slice().to_vec());
    report.set("kind", state.kind());
    Ok((state, report))
}

pub fn invert(input: &Path, method: Method, out: Option<&Path>, tol: Option<f64>) -> CommandResult {
    let (state, mut report) = start("invert", input, tol)?;
    let rho = state.to_density();
    let dims = rho.dims().clone();
    let bloch =
        || -> Result<DensityOperator, CommandError> { Ok(invert_bloch(&bloch_decompose(&rho))?) };
    let tilde = match method {
        Method::Product | Method::All => invert_product(&rho),
        Method::Subsets => invert_subsets(&rho),
        Method::Generators => invert_generators(&rho),
        Method::Bloch => bloch()?,
    };
    if method == Method::All {
        report.check_residual(
            "subsets vs product",
            invert_subsets(&rho).max_abs_diff(&tilde),
        );
        report.check_residual(
            "generators vs product",
            invert_generators(&rho).max_abs_diff(&tilde),
        );
        if dims.common_dim().is_some() {
            report.check_residual("bloch vs product", bloch()?.max_abs_diff(&tilde));
        } else {
            report.set("bloch", "skipped: unequal local dimensions");
        }
    }
    report.check_eq(
        "trace of inverted state",
        tilde.trace().re,
        tilde_trace_factor(&dims),
    );
    report.check_ge("minimum eigenvalue", tilde.min_eigenvalue(), 0.0);
    if let Some(out) = out {
        let op = OperatorFile {
            dims,
            matrix: tilde.into_matrix(),
        };
        io::write_text(out, &io::format_operator(&op))?;
        report.set("output", out.display().to_string());
    }
    Ok(report.finish())
}

fn ledger_json(ledger: &tildelab_core::correlation::EntropyLedger, n: usize) -> Value {
    ledger
        .by_size()
        .into_iter()
        .map(|(m, t)| json!({"subset": m.labels(n), "size": m.len(), "tau": t}))
        .collect()
}

pub fn entropies(input: &Path, workers: usize, tol: Option<f64>) -> CommandResult {
    let (state, mut report) = start("entropies", input, tol)?;
    let rho = state.to_density();
    let ledger = parallel::entropy_ledger(&rho, workers)?;
    let n = rho.dims().parties();
    report.workers = Some(workers);
    report.set("entropies", ledger_json(&ledger, n));
    report.set("tr_rho_rhotilde", ledger.tr_rho_rhotilde());
    let eq = mixed_equality_from_ledger(&ledger);
    report.check_eq("2 Tr(rho rho~) vs alternating sum", eq.lhs, eq.rhs);
    Ok(report.finish())
}

pub fn cd(input: &Path, tol: Option<f64>) -> CommandResult {
    let (state, mut report) = start("cd", input, tol)?;
    let psi = state
        .as_pure()
        .ok_or(tildelab_core::Error::PureStateRequired)?;
    let (trace_form, generator_form) = distributed_concurrence_routes(psi);
    report.set("cd", generator_form);
    report.set("cd_squared", generator_form * generator_form);
    report.check_eq(
        "trace form vs generator form (squared)",
        trace_form * trace_form,
        generator_form * generator_form,
    );
    Ok(report.finish())
}

pub fn verify_monogamy(input: &Path, workers: usize, tol: Option<f64>) -> CommandResult {
    let (state, mut report) = start("verify-monogamy", input, tol)?;
    let rho = state.to_density();
    let ledger = parallel::entropy_ledger(&rho, workers)?;
    report.workers = Some(workers);
    let eq = mixed_equality_from_ledger(&ledger);
    report.check_eq("mixed-state equality", eq.lhs, eq.rhs);
    if let Some(psi) = state.as_pure() {
        let m = monogamy_report(psi)?;
        let n = psi.dims().parties();
        report.set("cd", m.cd());
        report.set("cd_squared", m.cd_squared);
        let terms: Vec<Value> = m
            .terms
            .iter()
            .map(|t| json!({"subset": t.mask.labels(n), "size": t.size, "tau": t.tau, "sign": t.sign}))
            .collect();
        report.set("terms", terms);
        report.check_eq("pure-state monogamy", 2.0 * m.cd_squared, m.alternating_sum);
        report.check_eq(
            "trace form vs generator form",
            m.cd_squared,
            m.cd_squared_generators,
        );
    }
    Ok(report.finish())
}

pub struct EvolveArgs<'a> {
    pub input: &'a Path,
    pub subset: &'a [usize],
    pub hamiltonian: &'a Path,
    pub steps: usize,
    pub dt: f64,
    pub track_conservation: bool,
    pub tol: Option<f64>,
}

/// Changes above this mark a `τ_A` series as varying.
pub const VARYING_THRESHOLD: f64 = 1e-9;

pub fn evolve(args: EvolveArgs<'_>) -> CommandResult {
    let (state, mut report) = start("evolve", args.input, Some(args.tol.unwrap_or(1e-9)))?;
    let mut rho = state.to_density();
    let dims = rho.dims().clone();
    let n = dims.parties();
    let s = SubsetMask::from_labels(args.subset)?;
    if s.is_empty() {
        return Err(CommandError::Usage(
            "--subset must name at least one party".into(),
        ));
    }
    let h = io::read_operator(args.hamiltonian)?;
    let local = dims.restrict(s)?;
    if h.dims != local {
        return Err(CommandError::Usage(format!(
            "hamiltonian acts on dims {} but subset {s} has dims {local}",
            h.dims
        )));
    }
    let u = subsystem_propagator(&dims, s, &h.matrix, args.dt)?;
    let masks = subsets(n)?;
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(args.steps + 1); masks.len()];
    let mut conserved = Vec::new();
    for step in 0..=args.steps {
        if step > 0 {
            rho = rho.conjugate_by(&u)?;
        }
        for (i, &m) in masks.iter().enumerate() {
            series[i].push(tau(&rho, m)?);
        }
        if args.track_conservation {
            conserved.push(conservation_combination(&rho, s)?);
        }
    }
    let spread = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max((x - v[0]).abs()));
    let taus: Vec<Value> = masks
        .iter()
        .zip(&series)
        .map(|(m, v)| {
            let change = spread(v);
            json!({
                "subset": m.labels(n),
                "max_change": change,
                "status": if change > VARYING_THRESHOLD { "varying" } else { "constant" },
                "series": v,
            })
        })
        .collect();
    report.set("subset", s.labels(n));
    report.set("steps", args.steps);
    report.set("dt", args.dt);
    report.set("tau", taus);
    if args.track_conservation {
        let terms: Vec<Value> = conservation_terms(n, s)?
            .into_iter()
            .map(|(a, sign)| json!({"subset": a.labels(n), "sign": sign}))
            .collect();
        report.set("conserved_terms", terms);
        report.check_residual("conserved combination drift", spread(&conserved));
        report.set("conserved", conserved);
    }
    report.check_eq("trace preserved", rho.trace().re, 1.0);
    Ok(report.finish())
}

pub struct SearchArgs<'a> {
    pub d1: usize,
    pub target: Target,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub out: Option<&'a Path>,
    pub tol: Option<f64>,
}

fn verdict_json(v: &MonotoneVerdict) -> Value {
    json!({
        "lhs": v.lhs, "rhs": v.rhs, "deficit": v.deficit, "violated": v.violated,
        "p1": v.p1, "p2": v.p2, "branch_cd": v.branch_cd,
        "f_route_deficit": v.f_route_deficit,
    })
}

pub fn search_violation(args: SearchArgs<'_>) -> CommandResult {
    let mut report = RunReport::new("search-violation", args.tol.unwrap_or(1e-9));
    report.seed = Some(args.seed);
    report.workers = Some(args.workers);
    let cfg = SearchConfig::new(args.d1, args.target, args.trials, args.seed)?;
    let out = parallel::search(&cfg, args.workers)?;
    let best = &out.best;
    report.set("d1", args.d1);
    report.set("target", args.target.name());
    report.set("trials", args.trials);
    report.set("environment", cfg.env.as_slice().to_vec());
    report.set("margin", best.margin);
    report.set("trial", best.trial);
    report.set("violation_found", out.violation_found());
    report.set("lambdas", best.lambdas.clone());
    report.set("diag", best.diag.clone());
    let psi = best.state();
    let verdict = match args.target {
        Target::Cd => monotone_deficit_cd(&psi, &best.channel())?,
        Target::Cd2 => monotone_deficit_cd2(&psi, &best.channel())?,
    };
    report.set("replay", verdict_json(&verdict));
    report.check_eq(
        "replay deficit vs pair-weight route",
        verdict.deficit,
        verdict.f_route_deficit,
    );
    report.check_eq(
        "replay agrees on violation",
        f64::from(u8::from(verdict.violated)),
        f64::from(u8::from(out.violation_found())),
    );
    if let Some(path) = args.out {
        io::write_state(path, &StateFile::Pure(psi))?;
        report.set("state_file", path.display().to_string());
    }
    Ok(report.finish())
}

pub fn counterexample(out: Option<&Path>, tol: Option<f64>) -> CommandResult {
    let mut report = RunReport::new("counterexample", tol.unwrap_or(1e-9));
    let (psi, ch) = builtin_counterexample();
    let m = monogamy_report(&psi)?;
    let cd_ledger = (m.alternating_sum / 2.0).max(0.0).sqrt();
    let v1 = monotone_deficit_cd(&psi, &ch)?;
    let v2 = monotone_deficit_cd2(&psi, &ch)?;
    report.set("dims", psi.dims().as_slice().to_vec());
    report.set("channel_diag", ch.diag().to_vec());
    report.set("cd", verdict_json(&v1));
    report.set("cd2", verdict_json(&v2));
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    report.check_eq("C_D from entropy ledger", cd_ledger, inv_sqrt2);
    report.check_eq("C_D direct vs ledger", v1.lhs, cd_ledger);
    report.check_eq("C_D branch sum", v1.rhs, 1.0);
    report.check_eq("C_D deficit", v1.deficit, inv_sqrt2 - 1.0);
    report.check_eq(
        "C_D violation flagged",
        f64::from(u8::from(v1.violated)),
        1.0,
    );
    report.check_eq("C_D^2 before channel", v2.lhs, 0.5);
    report.check_eq("C_D^2 branch average", v2.rhs, 1.0);
    report.check_eq(
        "C_D^2 violation flagged",
        f64::from(u8::from(v2.violated)),
        1.0,
    );
    report.check_residual(
        "pair-weight route",
        v1.route_residual.max(v2.route_residual),
    );
    if let Some(path) = out {
        io::write_state(path, &StateFile::Pure(psi))?;
        report.set("state_file", path.display().to_string());
    }
    Ok(report.finish())
}
