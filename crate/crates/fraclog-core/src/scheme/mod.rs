//! Predictor-corrector time stepping for the fractional initial value problem
//! `D^{theta,mu,gamma} x = f(t, x)`, `x(t0) = x0`.
//!
//! The solution is expanded as `x(t) = x0 + sum_k A_k I_k(x)(t)` where each
//! `I_k` is a power-law Volterra integral with kernel `(t-s)^{theta k - mu}`.
//! On a uniform grid the integrals are approximated by product integration of
//! a piecewise-linear interpolant of `f`, giving an explicit scheme
//! `x_m = x0 + sum_{j<m} c^m_j f_j` (backward-looking interpolation nodes) and
//! an implicit scheme `x_m = x0 + sum_{j<=m} ct^m_j f_j` (forward-looking).
//! The two are combined predict-evaluate-correct-evaluate; zero corrections
//! reduce to the pure explicit scheme.
//!
//! Weight tables are O(N^2) in memory and built once per (order, grid) pair;
//! they are immutable afterwards and safe to share across concurrent solves.

mod solver;
mod table;
pub(crate) mod weights;

pub use solver::{solve_explicit, solve_explicit_with_table, solve_pece, solve_pece_with_table};
pub use table::{build_weight_table, TableKind, WeightTable};
pub use weights::{coefficient_a, weight_w, weight_xi};

use std::fmt;

use crate::special::SeriesControl;

/// Grid and corrector settings for one solve.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub t0: f64,
    pub t_end: f64,
    /// Number of steps N; the step size is `(t_end - t0) / N`.
    pub steps: usize,
    /// Corrector sweeps per step. 1 is the usual PECE mode, 0 is pure explicit.
    pub corrector_iterations: usize,
    /// Early-exit threshold on successive corrector iterates.
    pub corrector_tol: f64,
    /// Truncation policy for the k-series in the weight table.
    pub series: SeriesControl,
    /// Hard cap on the k-series for non-integer gamma.
    pub k_max: usize,
}

impl SolverConfig {
    pub fn new(t0: f64, t_end: f64, steps: usize) -> Result<Self, SchemeError> {
        let cfg = Self {
            t0,
            t_end,
            steps,
            corrector_iterations: 1,
            corrector_tol: 1e-12,
            series: SeriesControl::default(),
            k_max: 64,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SchemeError> {
        if !self.t0.is_finite() || !self.t_end.is_finite() || self.t_end <= self.t0 {
            return Err(SchemeError::Config {
                field: "t_end",
                message: format!("t_end ({}) must exceed t0 ({})", self.t_end, self.t0),
            });
        }
        if self.steps < 1 {
            return Err(SchemeError::Config {
                field: "steps",
                message: "steps must be at least 1".to_string(),
            });
        }
        if self.k_max == 0 {
            return Err(SchemeError::Config {
                field: "k_max",
                message: "k_max must be at least 1".to_string(),
            });
        }
        Ok(())
    }

    pub fn step_size(&self) -> f64 {
        (self.t_end - self.t0) / self.steps as f64
    }
}

/// Which stepping formula produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Explicit,
    Pece,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Explicit => write!(f, "explicit"),
            Self::Pece => write!(f, "pece"),
        }
    }
}

/// Outcome of a solve. A non-finite state aborts the march; the values
/// computed so far are kept and flagged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Completed,
    /// The state or right-hand side became non-finite at this step index.
    NonFinite { step: usize },
}

/// Solver metadata attached to a trajectory.
#[derive(Debug, Clone)]
pub struct SolveMeta {
    pub scheme: SchemeKind,
    /// Configured corrector sweeps per step.
    pub corrector_iterations: usize,
    /// Total corrector sweeps actually performed.
    pub correction_sweeps: usize,
    /// Where the k-series of the weight table was cut.
    pub k_cut: usize,
    /// False when the k-series cut was forced by the cap rather than the
    /// tolerance (non-integer gamma with slowly decaying binomials).
    pub table_converged: bool,
    /// Free-form description of the right-hand side, filled by callers.
    pub model: String,
}

/// Time grid plus solution values with solver metadata.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t0: f64,
    pub h: f64,
    pub values: Vec<f64>,
    pub status: SolveStatus,
    pub meta: SolveMeta,
}

impl Trajectory {
    pub fn is_complete(&self) -> bool {
        self.status == SolveStatus::Completed
    }

    /// Grid time of sample m, computed directly as `t0 + m h`.
    pub fn time_at(&self, m: usize) -> f64 {
        self.t0 + m as f64 * self.h
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|m| self.time_at(m))
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("trajectory holds at least x0")
    }

    /// First grid time at which the trajectory enters the band
    /// `|x - x_star| <= eps` and stays there for the rest of the grid.
    /// `None` when it never settles within the computed horizon.
    pub fn time_to_epsilon(&self, x_star: f64, eps: f64) -> Option<f64> {
        let mut entered = None;
        for (j, &x) in self.values.iter().enumerate() {
            if (x - x_star).abs() <= eps {
                entered.get_or_insert(j);
            } else {
                entered = None;
            }
        }
        entered.map(|j| self.time_at(j))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SchemeError {
    /// A solver-configuration invariant failed; names the offending field.
    Config { field: &'static str, message: String },
    /// Grid-index precondition violated.
    Index { message: String },
    /// The k-series hit the cap without meeting the tolerance.
    Truncation { k_reached: usize },
    /// The supplied table does not carry the arrays this solve needs.
    MissingTable { needed: &'static str },
}

impl fmt::Display for SchemeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config { field, message } => write!(f, "invalid config field `{field}`: {message}"),
            Self::Index { message } => write!(f, "index error: {message}"),
            Self::Truncation { k_reached } => {
                write!(f, "k-series failed to meet tolerance within {k_reached} terms")
            }
            Self::MissingTable { needed } => {
                write!(f, "weight table lacks the {needed} array required by this solver")
            }
        }
    }
}

impl std::error::Error for SchemeError {}
