//! Special functions: the generalized Mittag-Leffler function, Pochhammer
//! symbols, generalized binomial coefficients, and reciprocal gamma.
//!
//! The central object is the three-parameter Mittag-Leffler function
//!
//! ```text
//! E^rho_{theta,beta}(lambda, z) = sum_{k>=0} lambda^k z^{k*theta + beta - 1} (rho)_k / (Gamma(theta*k + beta) k!)
//! ```
//!
//! which reduces to `exp(lambda * z)` at `theta = beta = rho = 1` and serves as
//! the convolution kernel of the fractional operators in [`crate::operators`].
//! Series are truncated by a two-consecutive-small-terms rule and summed with
//! Neumaier compensation, since the kernel rate `lambda = -theta/(1-theta)` is
//! negative and the series alternates.

use std::f64::consts::PI;
use std::fmt;

/// Arguments of the generalized Mittag-Leffler function
/// `E^rho_{theta,beta}(lambda, .)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlSpec {
    /// Series order; must be positive for convergence.
    pub theta: f64,
    /// Offset parameter. The k = 0 term carries `z^(beta-1)`, so `beta < 1`
    /// makes the function singular at `z = 0`.
    pub beta: f64,
    /// Pochhammer weight parameter.
    pub rho: f64,
    /// Rate multiplying `z^theta` from term to term.
    pub lambda: f64,
}

impl MlSpec {
    pub fn new(theta: f64, beta: f64, rho: f64, lambda: f64) -> Result<Self, SpecialError> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(SpecialError::InvalidOrder { theta });
        }
        Ok(Self { theta, beta, rho, lambda })
    }
}

/// Truncation policy shared by every infinite series in the crate.
#[derive(Debug, Clone, Copy)]
pub struct SeriesControl {
    /// Relative tolerance against the running sum.
    pub rel_tol: f64,
    /// Absolute floor so sums that are exactly zero can still terminate.
    pub abs_tol: f64,
    /// Hard cap on the number of terms.
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { rel_tol: 1e-14, abs_tol: 1e-300, max_terms: 512 }
    }
}

impl SeriesControl {
    pub(crate) fn validate(&self) -> Result<(), SpecialError> {
        if !(self.rel_tol > 0.0) || self.max_terms == 0 {
            return Err(SpecialError::InvalidControl {
                rel_tol: self.rel_tol,
                max_terms: self.max_terms,
            });
        }
        Ok(())
    }
}

/// Value of a truncated series together with its truncation diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct MlEval {
    pub value: f64,
    /// Number of terms actually summed.
    pub terms_used: usize,
    /// False when the term cap was reached before the tolerance was met; the
    /// value is still usable, with `error_estimate` as a guide.
    pub converged: bool,
    /// Magnitude of the last term added.
    pub error_estimate: f64,
    /// Estimated cancellation error: max term magnitude times machine epsilon
    /// over the result magnitude. Values above ~1e-6 mean the alternating
    /// series has cancelled away most of the working precision; see the
    /// accuracy advisory on [`ml_general`].
    pub cancellation_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpecialError {
    /// `theta <= 0` (or non-finite): the defining series does not converge.
    InvalidOrder { theta: f64 },
    /// `z = 0` with `beta < 1`: the k = 0 term `z^(beta-1)` is singular.
    SingularArgument { beta: f64 },
    /// Evaluation argument outside the supported real domain.
    NegativeArgument { z: f64 },
    /// Unusable truncation policy.
    InvalidControl { rel_tol: f64, max_terms: usize },
}

impl fmt::Display for SpecialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidOrder { theta } => {
                write!(f, "series order theta must be positive, got {theta}")
            }
            Self::SingularArgument { beta } => {
                write!(f, "argument z = 0 is singular for beta = {beta} < 1")
            }
            Self::NegativeArgument { z } => {
                write!(f, "argument z must be nonnegative, got {z}")
            }
            Self::InvalidControl { rel_tol, max_terms } => {
                write!(f, "invalid series control: rel_tol = {rel_tol}, max_terms = {max_terms}")
            }
        }
    }
}

impl std::error::Error for SpecialError {}

// ---------------------------------------------------------------------------
// Gamma machinery (Lanczos, g = 7, n = 9)
// ---------------------------------------------------------------------------

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    let mut s = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (z + i as f64);
    }
    s
}

/// `(x-1)!` by exact multiplication for integer `x >= 1`. Exact through 22!,
/// correctly-rounded growth beyond, infinity past the f64 range.
fn factorial_gamma(x: f64) -> f64 {
    let mut p = 1.0;
    let mut i = 2.0;
    while i < x {
        p *= i;
        i += 1.0;
    }
    p
}

/// Gamma function. Poles at zero and the negative integers return infinities.
/// Positive integer arguments take an exact factorial path, so identities such
/// as `Gamma(1) = 1` hold bit for bit. Non-integer arguments above 2 are
/// range-reduced into [0.5, 2), where the Lanczos fit is tightest, and climbed
/// back up by the recurrence.
pub fn gamma(x: f64) -> f64 {
    if x >= 1.0 && x == x.floor() && x <= 180.0 {
        return factorial_gamma(x);
    }
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else if x < 2.0 {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
    } else if x <= 60.0 {
        let mut y = x;
        let mut shift = 0u32;
        while y >= 2.0 {
            y -= 1.0;
            shift += 1;
        }
        let mut g = gamma(y);
        for i in 0..shift {
            g *= y + i as f64;
        }
        g
    } else {
        // large arguments: climbing costs more than it buys
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
    }
}

/// Natural log of Gamma(x) for x > 0, stable for large arguments.
pub fn ln_gamma(x: f64) -> f64 {
    if x >= 1.0 && x == x.floor() && x <= 180.0 {
        return factorial_gamma(x).ln();
    }
    if x < 0.5 {
        // ln Gamma(x) = ln pi - ln sin(pi x) - ln Gamma(1 - x), valid on (0, 0.5)
        PI.ln() - (PI * x).sin().ln() - ln_gamma(1.0 - x)
    } else {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
    }
}

/// Reciprocal gamma `1/Gamma(x)`, defined as exactly zero at the poles
/// (`x = 0, -1, -2, ...`). The zero convention is what makes degenerate
/// scheme coefficients vanish cleanly instead of producing infinities.
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    1.0 / gamma(x)
}

/// `ln|1/Gamma(x)|` and its sign, for any real x. Poles map to
/// `(-inf, 1.0)` so that `sign * exp(ln_mag)` is an exact zero.
fn ln_recip_gamma_signed(x: f64) -> (f64, f64) {
    if x <= 0.0 && x == x.floor() {
        return (f64::NEG_INFINITY, 1.0);
    }
    if x > 0.0 {
        (-ln_gamma(x), 1.0)
    } else {
        // 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi
        let s = (PI * x).sin();
        (s.abs().ln() + ln_gamma(1.0 - x) - PI.ln(), s.signum())
    }
}

// ---------------------------------------------------------------------------
// Pochhammer and generalized binomial
// ---------------------------------------------------------------------------

/// Rising factorial `(rho)_k = rho (rho+1) ... (rho+k-1)`, with the empty
/// product `(rho)_0 = 1`. Overflow yields infinity.
pub fn pochhammer(rho: f64, k: usize) -> f64 {
    let mut p = 1.0;
    for i in 0..k {
        p *= rho + i as f64;
    }
    p
}

/// Generalized binomial coefficient `gamma (gamma-1) ... (gamma-i+1) / i!`.
///
/// For nonnegative integer `gamma` and `i > gamma` the result is exactly zero:
/// one factor of the product is an exact floating-point zero.
pub fn generalized_binomial(gamma_val: f64, i: usize) -> f64 {
    let mut b = 1.0;
    for j in 1..=i {
        b *= gamma_val - j as f64 + 1.0;
        b /= j as f64;
    }
    b
}

// ---------------------------------------------------------------------------
// Compensated series accumulation
// ---------------------------------------------------------------------------

/// Neumaier-compensated sum with the two-consecutive-small-terms stopping
/// rule. A single accidentally tiny term must not stop an alternating series,
/// so the rule requires two in a row.
pub(crate) struct SeriesSum {
    sum: f64,
    comp: f64,
    max_term: f64,
    small_streak: u32,
    rel_tol: f64,
    abs_tol: f64,
}

impl SeriesSum {
    pub(crate) fn new(ctrl: &SeriesControl) -> Self {
        Self {
            sum: 0.0,
            comp: 0.0,
            max_term: 0.0,
            small_streak: 0,
            rel_tol: ctrl.rel_tol,
            abs_tol: ctrl.abs_tol,
        }
    }

    /// Add a term; returns true once the stopping rule fires.
    pub(crate) fn add(&mut self, term: f64) -> bool {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.comp += (self.sum - t) + term;
        } else {
            self.comp += (term - t) + self.sum;
        }
        self.sum = t;
        self.max_term = self.max_term.max(term.abs());
        if term.abs() <= self.rel_tol * self.value().abs() + self.abs_tol {
            self.small_streak += 1;
        } else {
            self.small_streak = 0;
        }
        self.small_streak >= 2
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub(crate) fn cancellation_estimate(&self) -> f64 {
        let v = self.value().abs();
        if self.max_term == 0.0 {
            0.0
        } else if v == 0.0 {
            f64::INFINITY
        } else {
            self.max_term * f64::EPSILON / v
        }
    }
}

// ---------------------------------------------------------------------------
// Generalized Mittag-Leffler function
// ---------------------------------------------------------------------------

/// Gamma(a)/Gamma(b) for positive arguments; direct quotient while both
/// gammas are representable, log-space difference beyond.
fn gamma_ratio(a: f64, b: f64) -> f64 {
    if a < 170.0 && b < 170.0 {
        gamma(a) / gamma(b)
    } else {
        (ln_gamma(a) - ln_gamma(b)).exp()
    }
}

/// Term k of the defining series computed from logarithms, robust at gamma
/// poles and for arguments where separate factors would overflow.
fn direct_term(spec: &MlSpec, ln_z: f64, k: usize) -> f64 {
    let mut sign = 1.0;
    let mut ln_mag = 0.0;
    if k > 0 {
        if spec.lambda == 0.0 {
            return 0.0;
        }
        if spec.lambda < 0.0 && k % 2 == 1 {
            sign = -sign;
        }
        ln_mag += k as f64 * spec.lambda.abs().ln();
        for i in 0..k {
            let f = spec.rho + i as f64;
            if f == 0.0 {
                return 0.0;
            }
            if f < 0.0 {
                sign = -sign;
            }
            ln_mag += f.abs().ln();
        }
        ln_mag -= ln_gamma(k as f64 + 1.0);
    }
    let kf = k as f64;
    ln_mag += (kf * spec.theta + spec.beta - 1.0) * ln_z;
    let (ln_rg, sign_rg) = ln_recip_gamma_signed(kf * spec.theta + spec.beta);
    sign * sign_rg * (ln_mag + ln_rg).exp()
}

/// Evaluate `E^rho_{theta,beta}(lambda, z)` for `z >= 0`.
///
/// Terms are generated by the ratio recurrence
/// `t_{k+1} = t_k * lambda * z^theta * (rho + k) / ((k+1) * Gamma-ratio)`
/// once the gamma argument `theta*k + beta` has cleared the pole region;
/// earlier terms are computed directly in log space. Summation is
/// Neumaier-compensated and stops after two consecutive terms fall below
/// `rel_tol * |sum| + abs_tol`.
///
/// Accuracy advisory: for `lambda < 0` the series alternates and the result is
/// reliable only while `cancellation_estimate` stays small. Once the estimate
/// exceeds ~1e-6 (roughly `|lambda| z^theta` beyond a few tens), the returned
/// digits are dominated by cancellation noise.
pub fn ml_general(spec: &MlSpec, z: f64, ctrl: &SeriesControl) -> Result<MlEval, SpecialError> {
    ctrl.validate()?;
    if !(spec.theta > 0.0) || !spec.theta.is_finite() {
        return Err(SpecialError::InvalidOrder { theta: spec.theta });
    }
    if z < 0.0 || z.is_nan() {
        return Err(SpecialError::NegativeArgument { z });
    }
    if z == 0.0 {
        if spec.beta < 1.0 {
            return Err(SpecialError::SingularArgument { beta: spec.beta });
        }
        // only z^(beta-1) at k = 0 can survive: 0^0 = 1 when beta = 1
        let value = if spec.beta == 1.0 { 1.0 } else { 0.0 };
        return Ok(MlEval {
            value,
            terms_used: 1,
            converged: true,
            error_estimate: 0.0,
            cancellation_estimate: 0.0,
        });
    }

    // first k with theta*k + beta safely past the gamma poles
    let switch_k = if spec.beta >= 1.0 {
        0
    } else {
        ((1.0 - spec.beta) / spec.theta).ceil().max(0.0) as usize
    };

    let ln_z = z.ln();
    let z_theta = z.powf(spec.theta);
    let mut acc = SeriesSum::new(ctrl);
    let mut term = 0.0;
    let mut terms_used = 0;
    let mut converged = false;
    for k in 0..ctrl.max_terms {
        if k <= switch_k {
            term = direct_term(spec, ln_z, k);
        } else {
            let kf = (k - 1) as f64;
            let a = spec.theta * kf + spec.beta;
            let ratio = spec.lambda * z_theta * (spec.rho + kf) / (kf + 1.0) * gamma_ratio(a, a + spec.theta);
            term *= ratio;
        }
        terms_used = k + 1;
        if acc.add(term) {
            converged = true;
            break;
        }
    }

    Ok(MlEval {
        value: acc.value(),
        terms_used,
        converged,
        error_estimate: term.abs(),
        cancellation_estimate: acc.cancellation_estimate(),
    })
}
