//! Logistic right-hand sides, equilibrium stability, Lipschitz bounds, and
//! the contraction condition guaranteeing a unique solution.

use std::fmt;

use crate::operators::FractionalOrder;
use crate::special::{generalized_binomial, recip_gamma, SeriesControl, SeriesSum};

/// The three model right-hand sides. Rates and capacities are strictly
/// positive; the cubic threshold must sit below its capacity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogisticModel {
    /// `f(x) = r x (1 - x)`
    Quadratic { r: f64 },
    /// `f(x) = r x (1 - x/capacity)`
    QuadraticCapacity { r: f64, capacity: f64 },
    /// `f(x) = r x (1 - x/capacity)(x - threshold)`
    Cubic { r: f64, capacity: f64, threshold: f64 },
}

impl LogisticModel {
    pub fn quadratic(r: f64) -> Result<Self, ModelError> {
        require_positive("r", r)?;
        Ok(Self::Quadratic { r })
    }

    pub fn quadratic_capacity(r: f64, capacity: f64) -> Result<Self, ModelError> {
        require_positive("r", r)?;
        require_positive("K", capacity)?;
        Ok(Self::QuadraticCapacity { r, capacity })
    }

    pub fn cubic(r: f64, capacity: f64, threshold: f64) -> Result<Self, ModelError> {
        require_positive("r", r)?;
        require_positive("k", capacity)?;
        require_positive("m", threshold)?;
        if threshold >= capacity {
            return Err(ModelError::ThresholdAboveCapacity { threshold, capacity });
        }
        Ok(Self::Cubic { r, capacity, threshold })
    }

    /// The algebraic right-hand side value.
    pub fn rhs(&self, x: f64) -> f64 {
        match *self {
            Self::Quadratic { r } => r * x * (1.0 - x),
            Self::QuadraticCapacity { r, capacity } => r * x * (1.0 - x / capacity),
            Self::Cubic { r, capacity, threshold } => r * x * (1.0 - x / capacity) * (x - threshold),
        }
    }

    /// Exact analytic derivative of the right-hand side.
    pub fn rhs_derivative(&self, x: f64) -> f64 {
        match *self {
            Self::Quadratic { r } => r * (1.0 - 2.0 * x),
            Self::QuadraticCapacity { r, capacity } => r * (1.0 - 2.0 * x / capacity),
            Self::Cubic { r, capacity, threshold } => {
                r * (2.0 * x - threshold - (3.0 * x * x - 2.0 * threshold * x) / capacity)
            }
        }
    }

    /// Roots of the right-hand side, ascending.
    pub fn equilibria(&self) -> Vec<f64> {
        match *self {
            Self::Quadratic { .. } => vec![0.0, 1.0],
            Self::QuadraticCapacity { capacity, .. } => vec![0.0, capacity],
            Self::Cubic { capacity, threshold, .. } => vec![0.0, threshold, capacity],
        }
    }

    /// Sign classification of `f'` at every equilibrium.
    pub fn classify_stability(&self) -> StabilityReport {
        let entries = self
            .equilibria()
            .into_iter()
            .map(|e| {
                let d = self.rhs_derivative(e);
                let classification = if d < 0.0 {
                    Stability::AsymptoticallyStable
                } else if d > 0.0 {
                    Stability::Unstable
                } else {
                    Stability::Inconclusive
                };
                StabilityEntry { equilibrium: e, derivative: d, classification }
            })
            .collect();
        StabilityReport { entries }
    }

    /// Equilibria classified asymptotically stable.
    pub fn stable_equilibria(&self) -> Vec<f64> {
        self.classify_stability()
            .entries
            .iter()
            .filter(|e| e.classification == Stability::AsymptoticallyStable)
            .map(|e| e.equilibrium)
            .collect()
    }

    /// The stable equilibrium closest to x, if any exist.
    pub fn nearest_stable_equilibrium(&self, x: f64) -> Option<f64> {
        self.stable_equilibria()
            .into_iter()
            .min_by(|a, b| (a - x).abs().partial_cmp(&(b - x).abs()).unwrap())
    }

    /// Linearization about an equilibrium: the perturbation
    /// `alpha(t) = x(t) - y0` obeys the linear problem with rate `f'(y0)` and
    /// initial value `x0 - y0`, solvable by
    /// [`crate::operators::linear_solution`].
    pub fn perturbed_system(&self, y0: f64, x0: f64) -> Result<Perturbation, ModelError> {
        if !self.equilibria().contains(&y0) {
            return Err(ModelError::NotAnEquilibrium { y0 });
        }
        Ok(Perturbation { rho: self.rhs_derivative(y0), alpha0: x0 - y0 })
    }

    /// Lipschitz constant of the right-hand side on `|x| <= radius`.
    ///
    /// Quadratic: `r (1 + 2L)`; with a capacity the same algebra gives
    /// `r (1 + 2L/K)`. Cubic: `r (-m + (1 + m/k) 2L + L^2/k)` — the cubic
    /// expression can be nonpositive for small radii and is returned verbatim;
    /// consumers should treat `A <= 0` as a reporting warning.
    pub fn lipschitz_bound(&self, radius: f64) -> f64 {
        match *self {
            Self::Quadratic { r } => r * (1.0 + 2.0 * radius),
            Self::QuadraticCapacity { r, capacity } => r * (1.0 + 2.0 * radius / capacity),
            Self::Cubic { r, capacity, threshold } => {
                r * (-threshold
                    + (1.0 + threshold / capacity) * 2.0 * radius
                    + radius * radius / capacity)
            }
        }
    }

    /// Short human-readable descriptor for trajectory metadata.
    pub fn label(&self) -> String {
        match *self {
            Self::Quadratic { r } => format!("quadratic(r={r})"),
            Self::QuadraticCapacity { r, capacity } => format!("quadratic_capacity(r={r}, K={capacity})"),
            Self::Cubic { r, capacity, threshold } => format!("cubic(r={r}, k={capacity}, m={threshold})"),
        }
    }
}

fn require_positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(ModelError::NonPositiveParameter { name, value });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    NonPositiveParameter { name: &'static str, value: f64 },
    ThresholdAboveCapacity { threshold: f64, capacity: f64 },
    NotAnEquilibrium { y0: f64 },
    InvalidHorizon { t0: f64, t_end: f64 },
    NonPositiveRadius { radius: f64 },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveParameter { name, value } => {
                write!(f, "model parameter `{name}` must be positive, got {value}")
            }
            Self::ThresholdAboveCapacity { threshold, capacity } => {
                write!(f, "cubic threshold m = {threshold} must lie below capacity k = {capacity}")
            }
            Self::NotAnEquilibrium { y0 } => write!(f, "{y0} is not an equilibrium of the model"),
            Self::InvalidHorizon { t0, t_end } => {
                write!(f, "horizon T = {t_end} must exceed t0 = {t0}")
            }
            Self::NonPositiveRadius { radius } => {
                write!(f, "domain radius L must be positive, got {radius}")
            }
        }
    }
}

impl std::error::Error for ModelError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    AsymptoticallyStable,
    Unstable,
    /// `f'` vanishes at the equilibrium; the linearized perturbation is
    /// constant and the sign test says nothing.
    Inconclusive,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AsymptoticallyStable => write!(f, "asymptotically stable"),
            Self::Unstable => write!(f, "unstable"),
            Self::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityEntry {
    pub equilibrium: f64,
    pub derivative: f64,
    pub classification: Stability,
}

/// Per-equilibrium classification, ordered by equilibrium value.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub entries: Vec<StabilityEntry>,
}

/// Rate and initial value of the linearized perturbation problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub rho: f64,
    pub alpha0: f64,
}

/// Which contraction constant a report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExistenceBranch {
    /// The generic branch (mu != 1) used by everything in this crate.
    MuNe1,
    /// The mu = 1 constant, computable for reporting although the solver
    /// rejects mu = 1.
    MuEq1,
}

/// Evaluation of the contraction condition `C < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceReport {
    /// The contraction constant C.
    pub condition_value: f64,
    pub lipschitz_a: f64,
    /// Domain radius L behind `lipschitz_a`; NaN when A was supplied directly.
    pub bound_l: f64,
    pub horizon_t: f64,
    pub satisfied: bool,
    pub branch: ExistenceBranch,
    pub converged: bool,
    pub terms_used: usize,
}

impl ExistenceReport {
    /// A nonpositive Lipschitz constant makes the condition trivially
    /// satisfied but meaningless; flag it for reporting.
    pub fn nonpositive_lipschitz(&self) -> bool {
        self.lipschitz_a <= 0.0
    }
}

/// Contraction constant for `mu != 1`:
///
/// ```text
/// C1(T, A) = A/B sum_i binom(gamma, i) theta^i (T-t0)^{i theta - mu + 1} / ((1-theta)^{i-1} Gamma(i theta + 2 - mu))
/// ```
///
/// The series is cut exactly at integer gamma, otherwise truncated by `ctrl`.
/// The problem has a unique solution on `[t0, T]` when the value is below one.
pub fn existence_condition(
    ord: FractionalOrder,
    t0: f64,
    t_end: f64,
    lipschitz_a: f64,
    ctrl: &SeriesControl,
) -> Result<ExistenceReport, ModelError> {
    if !(t_end > t0) {
        return Err(ModelError::InvalidHorizon { t0, t_end });
    }
    let span = t_end - t0;
    let theta = ord.theta();
    let mu = ord.mu();
    let integer_cut = if ord.gamma().fract() == 0.0 { Some(ord.gamma() as usize) } else { None };

    let mut acc = SeriesSum::new(ctrl);
    let mut base = 1.0 - theta; // theta^i (1-theta)^{1-i} binom(gamma, i)
    let mut converged = false;
    let mut terms_used = 0;
    for i in 0..ctrl.max_terms {
        let fi = i as f64;
        let term = base * span.powf(fi * theta - mu + 1.0) * recip_gamma(fi * theta + 2.0 - mu);
        terms_used = i + 1;
        let stop = acc.add(term);
        if integer_cut == Some(i) || stop {
            converged = true;
            break;
        }
        base *= theta / (1.0 - theta) * (ord.gamma() - fi) / (fi + 1.0);
    }

    let condition_value = lipschitz_a / ord.b_theta() * acc.value();
    Ok(ExistenceReport {
        condition_value,
        lipschitz_a,
        bound_l: f64::NAN,
        horizon_t: t_end,
        satisfied: condition_value < 1.0,
        branch: ExistenceBranch::MuNe1,
        converged,
        terms_used,
    })
}

/// Contraction constant for the `mu = 1` branch,
/// `C2 = A/B [(1-theta) + sum_{i>=1} binom(gamma, i) theta^i (T-t0)^{i theta} / ((1-theta)^{i-1} Gamma(i theta + 1))]`.
///
/// Kept for full reporting coverage even though the operators and solver
/// reject `mu = 1`; hence it takes raw parameters instead of a
/// [`FractionalOrder`].
pub fn existence_condition_mu1(
    theta: f64,
    gamma: f64,
    b_theta: f64,
    t0: f64,
    t_end: f64,
    lipschitz_a: f64,
    ctrl: &SeriesControl,
) -> Result<ExistenceReport, ModelError> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(ModelError::NonPositiveParameter { name: "theta", value: theta });
    }
    if !(gamma > 0.0) {
        return Err(ModelError::NonPositiveParameter { name: "gamma", value: gamma });
    }
    if !(b_theta > 0.0) {
        return Err(ModelError::NonPositiveParameter { name: "b_theta", value: b_theta });
    }
    if !(t_end > t0) {
        return Err(ModelError::InvalidHorizon { t0, t_end });
    }
    let span = t_end - t0;
    let integer_cut = if gamma.fract() == 0.0 { Some(gamma as usize) } else { None };

    let mut acc = SeriesSum::new(ctrl);
    acc.add(1.0 - theta);
    let mut terms_used = 1;
    let mut converged = integer_cut == Some(0);
    if !converged {
        let mut base = generalized_binomial(gamma, 1) * theta; // binom * theta^i (1-theta)^{1-i}
        for i in 1..ctrl.max_terms {
            let fi = i as f64;
            let term = base * span.powf(fi * theta) * recip_gamma(fi * theta + 1.0);
            terms_used = i + 1;
            let stop = acc.add(term);
            if integer_cut == Some(i) || stop {
                converged = true;
                break;
            }
            base *= theta / (1.0 - theta) * (gamma - fi) / (fi + 1.0);
        }
    }

    let condition_value = lipschitz_a / b_theta * acc.value();
    Ok(ExistenceReport {
        condition_value,
        lipschitz_a,
        bound_l: f64::NAN,
        horizon_t: t_end,
        satisfied: condition_value < 1.0,
        branch: ExistenceBranch::MuEq1,
        converged,
        terms_used,
    })
}

/// Convenience wrapper: derive the Lipschitz constant from the model on
/// `|x| <= radius`, then evaluate the contraction condition.
pub fn existence_report_for_model(
    model: &LogisticModel,
    radius: f64,
    ord: FractionalOrder,
    t0: f64,
    t_end: f64,
    ctrl: &SeriesControl,
) -> Result<ExistenceReport, ModelError> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(ModelError::NonPositiveRadius { radius });
    }
    let a = model.lipschitz_bound(radius);
    let mut report = existence_condition(ord, t0, t_end, a, ctrl)?;
    report.bound_l = radius;
    Ok(report)
}
