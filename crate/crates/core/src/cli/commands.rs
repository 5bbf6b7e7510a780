use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::io::{self, RunRecord, SolutionDocument};
use super::plot::{line_plot, Series};
use super::{
    frame_file, BoostArgs, CheckWArgs, CmdResult, Failure, ModelArgs, PlotArgs, RunConfig, SolveArgs, SweepArgs,
    ValidateArgs,
};
use crate::electrodynamics::{
    self, boost as boost_frame, maxwell_residuals, refinement_study, CartesianGrid, MaxwellReport, RefinementReport,
    RESIDUAL_NAMES,
};
use crate::error::Error;
use crate::minimizer::{minimize, CheckStatus, SolverConfig, VerificationReport};
use crate::nonlinearity::{check_assumptions, default_report, frequency_window, NonlinearityModel};

const MIN_ORDER: f64 = 1.8;

fn usage(e: Error) -> Failure {
    match e {
        Error::InvalidArgument(m) | Error::InvalidGrid(m) => Failure::Usage(m),
        other => Failure::Lib(other),
    }
}

fn load_config(path: Option<&Path>, model_args: &ModelArgs) -> Result<RunConfig, Failure> {
    let mut config = RunConfig::load_or_default(path)?;
    model_args.apply(&mut config.model);
    Ok(config)
}

fn build_model(config: &RunConfig) -> Result<NonlinearityModel, Failure> {
    config.model.build().map_err(|e| match e {
        Error::InvalidArgument(m) => Failure::Usage(m),
        other => Failure::Lib(other),
    })
}

fn sibling(path: &Path, extension: &str) -> PathBuf {
    path.with_extension(extension)
}

fn print_checks(report: &VerificationReport) {
    println!("{:<32} {:<6} {:>24} {:>12}", "check", "status", "value", "threshold");
    for (name, c) in &report.checks {
        let status = match c.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Info => "info",
        };
        let threshold = c.threshold.map_or_else(|| "-".to_string(), |t| format!("{t:.1e}"));
        println!("{name:<32} {status:<6} {:>24.16e} {threshold:>12}", c.value);
    }
}

fn checks_outcome(report: &VerificationReport) -> CmdResult {
    let failures = report.failures();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Checks(failures.into_iter().map(String::from).collect()))
    }
}

pub(super) fn solve(args: &SolveArgs) -> CmdResult {
    let mut config = load_config(args.config.as_deref(), &args.model)?;
    let s = &mut config.solver;
    s.q = args.q;
    s.sigma2 = args.sigma2;
    if let Some(n) = args.n_points {
        s.n_points = n;
    }
    if let Some(r) = args.r_max {
        s.r_max = r;
    }
    if let Some(m) = args.max_iters {
        s.max_iters = m;
    }
    if let Some(t) = args.tol {
        s.tol_residual = t;
    }
    config.solver.validate().map_err(usage)?;
    let model = build_model(&config)?;

    let report = default_report(&model)?;
    if !report.w1_to_w5() && !args.skip_w_check {
        return Err(Failure::Assumption(report.render()));
    }

    let sol = minimize(&config.solver, &model)?;
    let doc = SolutionDocument::new(&sol, &model, &config.solver);
    let csv = sibling(&args.out, "csv");
    let record_path = sibling(&args.out, "run.json");
    doc.save(&args.out)?;
    io::write_profile_csv(&csv, &sol, &model)?;
    let mut record = RunRecord::new(&config.solver, &model).with_solution(&sol);
    record.artifact_paths = vec![args.out.clone(), csv, record_path.clone()];
    io::write_json(&record_path, &record)?;

    println!("q          {:.16e}", sol.q);
    println!("sigma2     {:.16e}", sol.sigma2);
    println!("omega2     {:.16e}", sol.omega2);
    println!("J          {:.16e}", sol.j_value);
    println!("energy     {:.16e}", sol.energy);
    println!("residual   {:.16e}", sol.residual);
    println!("iterations {}", sol.iterations);
    print_checks(&sol.diagnostics);
    checks_outcome(&sol.diagnostics)
}

pub(super) fn validate(args: &ValidateArgs) -> CmdResult {
    let doc = SolutionDocument::load(&args.input)?;
    let (sol, _) = doc.verify()?;
    print_checks(&sol.diagnostics);
    checks_outcome(&sol.diagnostics)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostReport {
    pub velocity: f64,
    pub time: f64,
    pub grid: CartesianGrid,
    pub maxwell: MaxwellReport,
    pub min_energy_density: f64,
    pub total_energy: f64,
    pub warnings: Vec<String>,
    pub refinement: Option<RefinementReport>,
    pub tool_version: String,
}

pub(super) fn boost(args: &BoostArgs) -> CmdResult {
    if !(args.v.is_finite() && args.v.abs() < 1.0) {
        return Err(Failure::Usage(format!("--v {} must satisfy |v| < 1", args.v)));
    }
    if !args.t.is_finite() {
        return Err(Failure::Usage(format!("--t {} must be finite", args.t)));
    }
    let grid = CartesianGrid::new(args.grid, args.halfwidth).map_err(usage)?;
    let doc = SolutionDocument::load(&args.input)?;
    let model = doc.model()?;
    let sol = doc.solution()?;

    let frame = boost_frame(&sol, args.v, args.t, grid)?;
    let later = boost_frame(&sol, args.v, args.t + grid.spacing / 4.0, grid)?;
    let maxwell = maxwell_residuals(&frame, &later)?;
    drop(later);
    let density = electrodynamics::energy_density(&frame, &model)?;
    let min_energy_density = density.iter().copied().fold(f64::INFINITY, f64::min);
    let total_energy = density.iter().sum::<f64>() * grid.spacing.powi(3);
    frame_file::write_frame(&args.out, &frame)?;
    let warnings = frame.warnings.clone();
    drop(frame);

    let refinement = if args.refine {
        Some(refinement_study(&sol, args.v, args.t, args.halfwidth, args.grid, 2 * args.grid)?)
    } else {
        None
    };
    let report = BoostReport {
        velocity: args.v,
        time: args.t,
        grid,
        maxwell,
        min_energy_density,
        total_energy,
        warnings,
        refinement,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    io::write_json(&sibling(&args.out, "residuals.json"), &report)?;

    println!("velocity {:.6} gamma {:.6} spacing {:.6e}", args.v, 1.0 / (1.0 - args.v * args.v).sqrt(), grid.spacing);
    println!("{:<12} {:>24} {:>24}", "residual", "L2", "term scale");
    for (i, name) in RESIDUAL_NAMES.iter().enumerate() {
        println!("{name:<12} {:>24.16e} {:>24.16e}", maxwell.residuals[i], maxwell.scales[i]);
    }
    println!("min energy density {min_energy_density:.16e}");
    println!("total energy       {total_energy:.16e}");
    for w in &report.warnings {
        println!("warning: {w}");
    }
    if let Some(r) = &report.refinement {
        println!("{:<12} {:>24} {:>24} {:>8}", "order", "coarse", "fine", "p");
        for o in &r.orders {
            let p = o.order.map_or_else(|| "exact".to_string(), |p| format!("{p:.3}"));
            println!("{:<12} {:>24.16e} {:>24.16e} {p:>8}", o.name, o.coarse, o.fine);
        }
        if !r.all_pass(MIN_ORDER) {
            let low = r.orders.iter().filter(|o| !o.passes(MIN_ORDER)).map(|o| o.name.clone()).collect();
            return Err(Failure::Checks(low));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub q: f64,
    pub omega2: f64,
    pub j: f64,
    pub residual: f64,
    pub converged: bool,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub config_echo: SolverConfig,
    pub model_echo: crate::nonlinearity::ModelSpec,
    pub rows: Vec<SweepRow>,
    pub largest_converged_q: Option<f64>,
    pub artifact_paths: Vec<PathBuf>,
    pub tool_version: String,
}

fn sweep_values(qmin: f64, qmax: f64, steps: usize) -> Result<Vec<f64>, Failure> {
    if !(qmin.is_finite() && qmax.is_finite() && qmin >= 0.0) {
        return Err(Failure::Usage(format!("q range [{qmin}, {qmax}] must be finite and nonnegative")));
    }
    if steps == 0 || qmax < qmin || (steps > 1 && qmax == qmin) {
        return Err(Failure::Usage(format!("empty range: {steps} steps over [{qmin}, {qmax}]")));
    }
    if steps == 1 {
        return Ok(vec![qmin]);
    }
    Ok((0..steps).map(|k| qmin + (qmax - qmin) * k as f64 / (steps - 1) as f64).collect())
}

fn sweep_point(base: &SolverConfig, model: &NonlinearityModel, q: f64) -> SweepRow {
    let config = SolverConfig { q, ..base.clone() };
    match minimize(&config, model) {
        Ok(sol) => SweepRow {
            q,
            omega2: sol.omega2,
            j: sol.j_value,
            residual: sol.residual,
            converged: sol.diagnostics.all_pass(),
            status: if sol.diagnostics.all_pass() {
                "converged".into()
            } else {
                format!("failed checks: {}", sol.diagnostics.failures().join(" "))
            },
        },
        Err(Error::NoBoundState(r)) => SweepRow {
            q,
            omega2: r.last_omega2,
            j: f64::NAN,
            residual: f64::NAN,
            converged: false,
            status: format!("no bound state: {}", r.reason),
        },
        Err(e) => SweepRow { q, omega2: f64::NAN, j: f64::NAN, residual: f64::NAN, converged: false, status: e.to_string() },
    }
}

pub(super) fn sweep(args: &SweepArgs) -> CmdResult {
    let qs = sweep_values(args.qmin, args.qmax, args.steps)?;
    let mut config = load_config(args.config.as_deref(), &args.model)?;
    config.solver.sigma2 = args.sigma2;
    config.solver.q = qs[0];
    if let Some(n) = args.n_points {
        config.solver.n_points = n;
    }
    if let Some(r) = args.r_max {
        config.solver.r_max = r;
    }
    config.solver.validate().map_err(usage)?;
    let model = build_model(&config)?;

    let rows: Vec<SweepRow> = qs.par_iter().map(|&q| sweep_point(&config.solver, &model, q)).collect();

    let svg = sibling(&args.out, "svg");
    let record_path = sibling(&args.out, "run.json");
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&args.out)
        .map_err(io::csv_error)?;
    w.write_record(["q", "omega2", "J", "residual", "converged"]).map_err(io::csv_error)?;
    for r in &rows {
        w.write_record(&[
            format!("{:.16e}", r.q),
            format!("{:.16e}", r.omega2),
            format!("{:.16e}", r.j),
            format!("{:.16e}", r.residual),
            r.converged.to_string(),
        ])
        .map_err(io::csv_error)?;
    }
    w.flush().map_err(Error::from)?;
    let points = rows.iter().filter(|r| r.converged).map(|r| (r.q, r.omega2)).collect();
    std::fs::write(&svg, line_plot("omega^2 against q", "q", "omega^2", &[Series { label: "omega^2", points }]))
        .map_err(Error::from)?;

    let largest_converged_q = rows.iter().filter(|r| r.converged).map(|r| r.q).fold(None, |m: Option<f64>, q| {
        Some(m.map_or(q, |m| m.max(q)))
    });
    let record = SweepRecord {
        config_echo: config.solver.clone(),
        model_echo: model.spec().clone(),
        rows: rows.clone(),
        largest_converged_q,
        artifact_paths: vec![args.out.clone(), svg, record_path.clone()],
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    io::write_json(&record_path, &record)?;

    println!("{:>24} {:>24} {:>24} {:>24}  status", "q", "omega2", "J", "residual");
    for r in &rows {
        println!("{:>24.16e} {:>24.16e} {:>24.16e} {:>24.16e}  {}", r.q, r.omega2, r.j, r.residual, r.status);
    }
    match largest_converged_q {
        Some(q) => println!("largest converged q {q:.16e}"),
        None => println!("no q converged"),
    }
    Ok(())
}

pub(super) fn check_w(args: &CheckWArgs) -> CmdResult {
    let mut config = RunConfig::default();
    args.model.apply(&mut config.model);
    let model = build_model(&config)?;
    let s_max = args.s_max.unwrap_or(1e3 * model.amplitude_scale());
    let report = check_assumptions(&model, s_max, 4000, args.omega0).map_err(usage)?;
    let rendered = report.render();
    let window = match frequency_window(&model) {
        Ok((m1, m0)) => format!("frequency window ({m1:.9}, {m0:.9})"),
        Err(e) => format!("frequency window unavailable: {e}"),
    };
    if report.w1_to_w5() && report.bl_conditions.all() {
        print!("family {}\n{rendered}{window}\n", model.family_name());
        Ok(())
    } else {
        Err(Failure::Assumption(format!("family {}\n{rendered}{window}", model.family_name())))
    }
}

fn read_sweep_csv(path: &Path) -> Result<Vec<(f64, f64, bool)>, Failure> {
    let mut reader = csv::Reader::from_path(path).map_err(io::csv_error)?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(io::csv_error)?;
        let field = |i: usize| record.get(i).ok_or_else(|| Error::Parse(format!("{}: short row", path.display())));
        let num = |i: usize| -> Result<f64, Error> {
            field(i)?.parse::<f64>().map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        };
        out.push((num(0)?, num(1)?, field(4)? == "true"));
    }
    Ok(out)
}

pub(super) fn plot(args: &PlotArgs) -> CmdResult {
    let is_csv = args.input.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let svg = if is_csv {
        let rows = read_sweep_csv(&args.input)?;
        let points = rows.iter().filter(|r| r.2).map(|r| (r.0, r.1)).collect();
        line_plot("omega^2 against q", "q", "omega^2", &[Series { label: "omega^2", points }])
    } else {
        let doc = SolutionDocument::load(&args.input)?;
        let grid = crate::radial::RadialGrid::new(doc.grid.n_points, doc.grid.r_max)?;
        let nodes = grid.nodes();
        let pair = |v: &[f64]| nodes.iter().copied().zip(v.iter().copied()).collect::<Vec<_>>();
        let title = format!("q = {}, sigma^2 = {}, omega^2 = {:.6}", doc.q, doc.sigma2, doc.omega2);
        line_plot(
            &title,
            "r",
            "amplitude",
            &[Series { label: "u", points: pair(&doc.u) }, Series { label: "Phi", points: pair(&doc.phi) }],
        )
    };
    std::fs::write(&args.out, svg).map_err(Error::from)?;
    println!("wrote {}", args.out.display());
    Ok(())
}
