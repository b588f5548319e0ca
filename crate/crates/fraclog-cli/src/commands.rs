//! The five subcommand runners. Sweep solves run in parallel; all files are
//! written by the calling thread in a fixed order so identical configs give
//! byte-identical outputs.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use fraclog_core::models::{existence_condition, existence_condition_mu1, LogisticModel};
use fraclog_core::operators::{linear_solution, FractionalOrder, OperatorError};
use fraclog_core::scheme::{
    build_weight_table, solve_explicit_with_table, solve_pece_with_table, SchemeKind, SolverConfig,
    TableKind, Trajectory, WeightTable,
};
use fraclog_core::special::{ml_general, MlSpec, SeriesControl};

use crate::config::{parse_sweep, RawConfig};
use crate::output::{self, fmt_f64, RunSummary};
use crate::CliError;

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn solve_with_shared_table(
    model: LogisticModel,
    x0: f64,
    cfg: &SolverConfig,
    kind: SchemeKind,
    table: &WeightTable,
) -> Result<Trajectory, CliError> {
    let rhs = move |_: f64, x: f64| model.rhs(x);
    let mut traj = match kind {
        SchemeKind::Explicit => solve_explicit_with_table(rhs, x0, cfg, table),
        SchemeKind::Pece => solve_pece_with_table(rhs, x0, cfg, table),
    }
    .map_err(|e| CliError::config("solver", e.to_string()))?;
    traj.meta.model = model.label();
    Ok(traj)
}

fn build_table(ord: FractionalOrder, cfg: &SolverConfig, kind: SchemeKind) -> Result<WeightTable, CliError> {
    let table_kind = match kind {
        SchemeKind::Explicit => TableKind::Explicit,
        SchemeKind::Pece if cfg.corrector_iterations == 0 => TableKind::Explicit,
        SchemeKind::Pece => TableKind::Both,
    };
    build_weight_table(ord, cfg, table_kind).map_err(|e| CliError::config("solver", e.to_string()))
}

fn summarize(model: &LogisticModel, traj: &Trajectory, x0: f64, csv: &Path) -> RunSummary {
    let final_value = traj.final_value();
    let nearest = model
        .equilibria()
        .into_iter()
        .min_by(|a, b| (a - final_value).abs().partial_cmp(&(b - final_value).abs()).unwrap());
    RunSummary {
        model: model.label(),
        scheme: traj.meta.scheme.to_string(),
        x0,
        final_time: traj.time_at(traj.values.len() - 1),
        final_value,
        nearest_equilibrium: nearest,
        distance_to_equilibrium: nearest.map(|e| (final_value - e).abs()),
        status: output::status_string(&traj.status),
        k_cut: traj.meta.k_cut,
        table_converged: traj.meta.table_converged,
        correction_sweeps: traj.meta.correction_sweeps,
        // file name only: identical configs must give byte-identical output
        // regardless of where the output directory lives
        csv: csv.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
    }
}

/// `fraclog simulate`: one trajectory CSV per starting value plus
/// `summary.json`. Partial CSVs are still written (and flagged) when a solve
/// hits a non-finite state; the process then exits with code 3.
pub fn simulate(config_path: &Path, out_flag: Option<&Path>) -> Result<(), CliError> {
    let raw = RawConfig::load(config_path)?;
    let model = raw.model()?;
    let ord = raw.order()?;
    let x0s = raw.x0_list()?;
    let cfg = raw.solver_config()?;
    let kind = raw.scheme_kind()?;
    let out = raw.out_dir(out_flag);
    ensure_dir(&out)?;

    let table = build_table(ord, &cfg, kind)?;
    let trajectories: Vec<Result<Trajectory, CliError>> = x0s
        .par_iter()
        .map(|&x0| solve_with_shared_table(model, x0, &cfg, kind, &table))
        .collect();

    let mut summaries = Vec::new();
    let mut failure: Option<String> = None;
    for (&x0, result) in x0s.iter().zip(trajectories) {
        let traj = result?;
        let csv = if x0s.len() == 1 {
            out.join("trajectory.csv")
        } else {
            out.join(format!("trajectory_x0_{x0}.csv"))
        };
        output::write_trajectory_csv(&csv, &traj)?;
        let summary = summarize(&model, &traj, x0, &csv);
        println!(
            "x0 = {x0}: x({}) = {} ({}), nearest equilibrium {:?} at distance {:?}",
            summary.final_time,
            fmt_f64(summary.final_value),
            summary.status,
            summary.nearest_equilibrium,
            summary.distance_to_equilibrium,
        );
        if !traj.is_complete() {
            failure.get_or_insert_with(|| format!("x0 = {x0}: {}", summary.status));
        }
        summaries.push(summary);
    }
    output::write_json(&out.join("summary.json"), &summaries)?;

    match failure {
        Some(detail) => Err(CliError::NonFinite { detail }),
        None => Ok(()),
    }
}

#[derive(Debug, Serialize)]
struct SweepRow {
    parameter: String,
    value: f64,
    final_x: f64,
    target_equilibrium: Option<f64>,
    time_to_epsilon: Option<f64>,
    status: String,
}

/// `fraclog sweep`: one trajectory per swept value plus a comparison table of
/// settle times (first grid time after which the trajectory stays within
/// epsilon of the nearest stable equilibrium).
pub fn sweep(
    config_path: &Path,
    sweep_arg: &str,
    epsilon: f64,
    out_flag: Option<&Path>,
) -> Result<(), CliError> {
    if !(epsilon > 0.0) {
        return Err(CliError::config("epsilon", "must be positive"));
    }
    let raw = RawConfig::load(config_path)?;
    let (param, values) = parse_sweep(sweep_arg)?;
    let model = raw.model()?;
    let cfg = raw.solver_config()?;
    let kind = raw.scheme_kind()?;
    let out = raw.out_dir(out_flag);
    ensure_dir(&out)?;

    // an x0 sweep reuses one weight table; order sweeps need one per value
    let results: Vec<Result<Trajectory, CliError>> = if param == "x0" {
        let ord = raw.order()?;
        let table = build_table(ord, &cfg, kind)?;
        values
            .par_iter()
            .map(|&x0| solve_with_shared_table(model, x0, &cfg, kind, &table))
            .collect()
    } else {
        // validate every order up front so config errors beat solver work
        let orders: Result<Vec<FractionalOrder>, CliError> =
            values.iter().map(|&v| raw.order_with(&param, v)).collect();
        let orders = orders?;
        let x0 = raw.x0_list()?[0];
        orders
            .into_par_iter()
            .map(|ord| {
                let table = build_table(ord, &cfg, kind)?;
                solve_with_shared_table(model, x0, &cfg, kind, &table)
            })
            .collect()
    };

    let mut rows = Vec::new();
    let mut failure: Option<String> = None;
    for (&value, result) in values.iter().zip(results) {
        let traj = result?;
        let csv = out.join(format!("sweep_{param}_{value}.csv"));
        output::write_trajectory_csv(&csv, &traj)?;
        let final_x = traj.final_value();
        let target = model.nearest_stable_equilibrium(final_x);
        let settle = target.and_then(|x_star| traj.time_to_epsilon(x_star, epsilon));
        if !traj.is_complete() {
            failure.get_or_insert_with(|| format!("{param} = {value}: {}", output::status_string(&traj.status)));
        }
        rows.push(SweepRow {
            parameter: param.clone(),
            value,
            final_x,
            target_equilibrium: target,
            time_to_epsilon: settle,
            status: output::status_string(&traj.status),
        });
    }

    let table_path = out.join("sweep_summary.csv");
    {
        use std::io::Write;
        let mut w = std::io::BufWriter::new(fs::File::create(&table_path)?);
        writeln!(w, "parameter,value,final_x,target_equilibrium,time_to_epsilon,status")?;
        for row in &rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                row.parameter,
                row.value,
                fmt_f64(row.final_x),
                row.target_equilibrium.map(fmt_f64).unwrap_or_default(),
                row.time_to_epsilon.map(fmt_f64).unwrap_or_default(),
                row.status,
            )?;
        }
    }

    println!("sweep over {param} (epsilon = {epsilon}):");
    for row in &rows {
        println!(
            "  {param} = {}: final x = {:.6}, time-to-epsilon = {}",
            row.value,
            row.final_x,
            row.time_to_epsilon.map(|t| format!("{t}")).unwrap_or_else(|| "not reached".to_string()),
        );
    }

    match failure {
        Some(detail) => Err(CliError::NonFinite { detail }),
        None => Ok(()),
    }
}

#[derive(Debug, Serialize)]
struct AlphaSample {
    t: f64,
    alpha: f64,
    truncated: bool,
}

#[derive(Debug, Serialize)]
struct StabilityLine {
    equilibrium: f64,
    derivative: f64,
    classification: String,
    perturbation_rho: f64,
    perturbation_alpha0: f64,
    alpha_samples: Vec<AlphaSample>,
}

#[derive(Debug, Serialize)]
struct StabilityOutput {
    model: String,
    theta: f64,
    mu: f64,
    gamma: f64,
    x0: f64,
    entries: Vec<StabilityLine>,
}

/// `fraclog stability`: per-equilibrium classification plus the sampled
/// magnitude of the linearized perturbation at elapsed times 5, 10, 20, 40.
pub fn stability(config_path: &Path, out_flag: Option<&Path>) -> Result<(), CliError> {
    let raw = RawConfig::load(config_path)?;
    let model = raw.model()?;
    let ord = raw.order()?;
    let x0 = raw.x0_list()?[0];
    let out = raw.out_dir(out_flag);
    ensure_dir(&out)?;

    let report = model.classify_stability();
    let ctrl = SeriesControl::default();
    let mut entries = Vec::new();
    println!("stability of {}:", model.label());
    for entry in &report.entries {
        let p = model
            .perturbed_system(entry.equilibrium, x0)
            .expect("classification iterates over the model's own equilibria");
        let mut samples = Vec::new();
        for &t in &[5.0, 10.0, 20.0, 40.0] {
            let (alpha, truncated) = match linear_solution(p.rho, p.alpha0, ord, t, &ctrl) {
                Ok(v) => (v, false),
                Err(OperatorError::Truncation { value, .. }) => (value, true),
                Err(e) => return Err(CliError::config("stability", e.to_string())),
            };
            samples.push(AlphaSample { t, alpha, truncated });
        }
        println!(
            "  {}: {} (f' = {}); |alpha| at t=5,10,20,40: {}",
            entry.equilibrium,
            entry.classification,
            entry.derivative,
            samples
                .iter()
                .map(|s| format!("{:.6e}", s.alpha.abs()))
                .collect::<Vec<_>>()
                .join(", "),
        );
        entries.push(StabilityLine {
            equilibrium: entry.equilibrium,
            derivative: entry.derivative,
            classification: entry.classification.to_string(),
            perturbation_rho: p.rho,
            perturbation_alpha0: p.alpha0,
            alpha_samples: samples,
        });
    }

    let json = StabilityOutput {
        model: model.label(),
        theta: ord.theta(),
        mu: ord.mu(),
        gamma: ord.gamma(),
        x0,
        entries,
    };
    output::write_json(&out.join("stability.json"), &json)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct ExistenceOutput {
    model: String,
    bound_l: f64,
    lipschitz_a: f64,
    horizon_t: f64,
    condition_value: f64,
    satisfied: bool,
    branch: String,
    converged: bool,
    nonpositive_lipschitz: bool,
    mu1_condition_value: Option<f64>,
    mu1_satisfied: Option<bool>,
}

/// `fraclog existence`: evaluate the contraction condition for the configured
/// model with the Lipschitz constant taken on `|x| <= L`.
pub fn existence(
    config_path: &Path,
    radius: f64,
    with_mu1: bool,
    out_flag: Option<&Path>,
) -> Result<(), CliError> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(CliError::config("L", "domain radius must be positive"));
    }
    let raw = RawConfig::load(config_path)?;
    let model = raw.model()?;
    let ord = raw.order()?;
    let t0 = raw.t0.unwrap_or(0.0);
    let t_end = raw.t_end.ok_or_else(|| CliError::config("t_end", "missing"))?;
    let out = raw.out_dir(out_flag);
    ensure_dir(&out)?;

    let ctrl = SeriesControl::default();
    let a = model.lipschitz_bound(radius);
    let mut report = existence_condition(ord, t0, t_end, a, &ctrl)
        .map_err(|e| CliError::config("t_end", e.to_string()))?;
    report.bound_l = radius;

    let mu1 = if with_mu1 {
        Some(
            existence_condition_mu1(ord.theta(), ord.gamma(), ord.b_theta(), t0, t_end, a, &ctrl)
                .map_err(|e| CliError::config("t_end", e.to_string()))?,
        )
    } else {
        None
    };

    println!("existence condition for {} on [{t0}, {t_end}]:", model.label());
    println!("  L = {radius}, A = {}", fmt_f64(a));
    println!("  C1 = {}", fmt_f64(report.condition_value));
    println!("  satisfied: {}", report.satisfied);
    if report.nonpositive_lipschitz() {
        println!("  warning: Lipschitz constant A <= 0; the condition is trivially satisfied but uninformative");
    }
    if !report.converged {
        println!("  warning: series truncated before tolerance");
    }
    if let Some(ref m1) = mu1 {
        println!("  C2 (mu = 1 branch, reporting only; the solver rejects mu = 1) = {}", fmt_f64(m1.condition_value));
        println!("  C2 satisfied: {}", m1.satisfied);
    }

    let json = ExistenceOutput {
        model: model.label(),
        bound_l: radius,
        lipschitz_a: a,
        horizon_t: t_end,
        condition_value: report.condition_value,
        satisfied: report.satisfied,
        branch: "mu_ne_1".to_string(),
        converged: report.converged,
        nonpositive_lipschitz: report.nonpositive_lipschitz(),
        mu1_condition_value: mu1.as_ref().map(|m| m.condition_value),
        mu1_satisfied: mu1.as_ref().map(|m| m.satisfied),
    };
    output::write_json(&out.join("existence.json"), &json)?;
    Ok(())
}

/// `fraclog ml-eval`: print the kernel value and its truncation diagnostics.
pub fn ml_eval(
    theta: f64,
    beta: f64,
    rho: f64,
    lambda: f64,
    z: f64,
    rel_tol: f64,
    max_terms: usize,
) -> Result<(), CliError> {
    let spec = MlSpec::new(theta, beta, rho, lambda).map_err(|e| CliError::config("theta", e.to_string()))?;
    let ctrl = SeriesControl { rel_tol, abs_tol: 1e-300, max_terms };
    let eval = ml_general(&spec, z, &ctrl).map_err(|e| CliError::config("z", e.to_string()))?;
    println!("value = {}", fmt_f64(eval.value));
    println!("terms = {}, converged = {}", eval.terms_used, eval.converged);
    println!("error_estimate = {:.3e}", eval.error_estimate);
    println!("cancellation_estimate = {:.3e}", eval.cancellation_estimate);
    if eval.cancellation_estimate > 1e-6 {
        println!("advisory: alternating-series cancellation exceeds 1e-6 of the result; digits beyond that are noise");
    }
    if !eval.converged {
        println!("warning: series truncated at max_terms before meeting tolerance");
    }
    Ok(())
}
