//! The explicit and predictor-corrector marches over a prebuilt weight table.

use super::table::{build_weight_table, TableKind, WeightTable};
use super::{SchemeError, SchemeKind, SolveMeta, SolveStatus, SolverConfig, Trajectory};
use crate::operators::FractionalOrder;

/// March the explicit scheme `x_m = x0 + sum_{j<m} c^m_j f_j`.
pub fn solve_explicit<F>(
    rhs: F,
    x0: f64,
    ord: FractionalOrder,
    cfg: &SolverConfig,
) -> Result<Trajectory, SchemeError>
where
    F: Fn(f64, f64) -> f64,
{
    let table = build_weight_table(ord, cfg, TableKind::Explicit)?;
    solve_explicit_with_table(rhs, x0, cfg, &table)
}

/// Explicit march over a shared, prebuilt table.
pub fn solve_explicit_with_table<F>(
    rhs: F,
    x0: f64,
    cfg: &SolverConfig,
    table: &WeightTable,
) -> Result<Trajectory, SchemeError>
where
    F: Fn(f64, f64) -> f64,
{
    if !table.has_explicit() {
        return Err(SchemeError::MissingTable { needed: "explicit" });
    }
    run(rhs, x0, cfg, table, SchemeKind::Explicit)
}

/// Predict with the explicit formula, then apply the implicit corrector
/// `cfg.corrector_iterations` times (early exit once successive iterates agree
/// to `cfg.corrector_tol`), and evaluate the right-hand side at the accepted
/// state. Zero corrector iterations reproduce [`solve_explicit`] bit for bit.
pub fn solve_pece<F>(
    rhs: F,
    x0: f64,
    ord: FractionalOrder,
    cfg: &SolverConfig,
) -> Result<Trajectory, SchemeError>
where
    F: Fn(f64, f64) -> f64,
{
    let kind = if cfg.corrector_iterations == 0 { TableKind::Explicit } else { TableKind::Both };
    let table = build_weight_table(ord, cfg, kind)?;
    solve_pece_with_table(rhs, x0, cfg, &table)
}

/// Predictor-corrector march over a shared, prebuilt table (explicit and,
/// unless corrections are disabled, implicit arrays required).
pub fn solve_pece_with_table<F>(
    rhs: F,
    x0: f64,
    cfg: &SolverConfig,
    table: &WeightTable,
) -> Result<Trajectory, SchemeError>
where
    F: Fn(f64, f64) -> f64,
{
    if !table.has_explicit() {
        return Err(SchemeError::MissingTable { needed: "explicit" });
    }
    if cfg.corrector_iterations > 0 && !table.has_implicit() {
        return Err(SchemeError::MissingTable { needed: "implicit" });
    }
    run(rhs, x0, cfg, table, SchemeKind::Pece)
}

fn dot(weights: &[f64], values: &[f64]) -> f64 {
    weights.iter().zip(values).map(|(w, f)| w * f).sum()
}

fn run<F>(
    rhs: F,
    x0: f64,
    cfg: &SolverConfig,
    table: &WeightTable,
    scheme: SchemeKind,
) -> Result<Trajectory, SchemeError>
where
    F: Fn(f64, f64) -> f64,
{
    cfg.validate()?;
    if table.n_steps() != cfg.steps {
        return Err(SchemeError::Config {
            field: "steps",
            message: format!(
                "table was built for {} steps, config asks for {}",
                table.n_steps(),
                cfg.steps
            ),
        });
    }
    let n = cfg.steps;
    let h = cfg.step_size();
    let correct = scheme == SchemeKind::Pece && cfg.corrector_iterations > 0;

    let mut values = Vec::with_capacity(n + 1);
    let mut f_hist = Vec::with_capacity(n + 1);
    let mut status = SolveStatus::Completed;
    let mut sweeps = 0usize;
    values.push(x0);

    let f0 = rhs(cfg.t0, x0);
    if !x0.is_finite() || !f0.is_finite() {
        status = SolveStatus::NonFinite { step: 0 };
    } else {
        f_hist.push(f0);
        for m in 1..=n {
            let tm = cfg.t0 + m as f64 * h;
            let mut xm = x0 + dot(table.explicit_row(m), &f_hist);
            if correct && xm.is_finite() {
                let row = table.implicit_row(m);
                let history = x0 + dot(&row[..m], &f_hist);
                let diag = row[m];
                for _ in 0..cfg.corrector_iterations {
                    let fm = rhs(tm, xm);
                    if !fm.is_finite() {
                        xm = f64::NAN;
                        break;
                    }
                    let next = history + diag * fm;
                    sweeps += 1;
                    let settled = (next - xm).abs() < cfg.corrector_tol;
                    xm = next;
                    if settled {
                        break;
                    }
                }
            }
            if !xm.is_finite() {
                status = SolveStatus::NonFinite { step: m };
                break;
            }
            let fm = rhs(tm, xm);
            if !fm.is_finite() {
                values.push(xm);
                status = SolveStatus::NonFinite { step: m };
                break;
            }
            values.push(xm);
            f_hist.push(fm);
        }
    }

    Ok(Trajectory {
        t0: cfg.t0,
        h,
        values,
        status,
        meta: SolveMeta {
            scheme,
            corrector_iterations: cfg.corrector_iterations,
            correction_sweeps: sweeps,
            k_cut: table.k_cut(),
            table_converged: table.converged(),
            model: String::new(),
        },
    })
}
