//! Product-integration weights: exact integrals of the power-law kernel
//! `(t_m - s)^p` against linear Lagrange basis functions on one grid cell.
//!
//! In normalized coordinates (`s = t_j + tau h`, `n = m - j`) every such
//! integral reduces to
//!
//! ```text
//! w(n, i, p) = (n+i) * (n^{p+1} - (n-1)^{p+1})/(p+1) + ((n-1)^{p+2} - n^{p+2})/(p+2)
//! ```
//!
//! with `i = 1` for the backward-node basis, `i = 0` for the shared node and
//! `i = -1` (negated) for the forward-node basis, plus the first-interval
//! weight `xi(m, p) = (m^{p+1} - (m-1)^{p+1})/(p+1)` for a constant kernel
//! panel. The scheme uses kernel exponent `p = theta k - mu`; the fractional
//! derivative reuses the same machinery with `p = theta k + mu - 1`.

use super::SchemeError;
use crate::operators::FractionalOrder;
use crate::special::{generalized_binomial, recip_gamma};

/// `w(n, i, p)` in normalized cell coordinates; valid for `n >= 1`, `p > -1`.
pub(crate) fn cell_weight(n: f64, i: f64, p: f64) -> f64 {
    let np1 = n.powf(p + 1.0);
    let mp1 = (n - 1.0).powf(p + 1.0);
    let np2 = n.powf(p + 2.0);
    let mp2 = (n - 1.0).powf(p + 2.0);
    (n + i) * (np1 - mp1) / (p + 1.0) + (mp2 - np2) / (p + 2.0)
}

/// Same weight evaluated from precomputed `n^{p+1}` / `n^{p+2}` tables.
pub(crate) fn cell_weight_tab(pow1: &[f64], pow2: &[f64], n: usize, i: f64, p: f64) -> f64 {
    (n as f64 + i) * (pow1[n] - pow1[n - 1]) / (p + 1.0) + (pow2[n - 1] - pow2[n]) / (p + 2.0)
}

/// `xi(m, p)` from a precomputed `n^{p+1}` table.
pub(crate) fn xi_tab(pow1: &[f64], m: usize, p: f64) -> f64 {
    (pow1[m] - pow1[m - 1]) / (p + 1.0)
}

/// Fill `pow1[n] = n^{p+1}` and `pow2[n] = n^{p+2}` for `n = 0..=n_max`.
pub(crate) fn fill_powers(p: f64, n_max: usize, pow1: &mut Vec<f64>, pow2: &mut Vec<f64>) {
    pow1.clear();
    pow2.clear();
    pow1.reserve(n_max + 1);
    pow2.reserve(n_max + 1);
    for n in 0..=n_max {
        let nf = n as f64;
        pow1.push(nf.powf(p + 1.0));
        pow2.push(nf.powf(p + 2.0));
    }
}

/// Series coefficient
/// `A_k = binom(gamma, k) theta^k / (B(theta) (1-theta)^{k-1} Gamma(theta k - mu + 1))`.
///
/// Through [`recip_gamma`] the coefficient is zero whenever the gamma argument
/// sits on a pole, and `binom(gamma, k)` cuts the series exactly at integer
/// gamma.
pub fn coefficient_a(ord: FractionalOrder, k: usize) -> f64 {
    let theta = ord.theta();
    generalized_binomial(ord.gamma(), k) * theta.powi(k as i32)
        * (1.0 - theta).powi(1 - k as i32)
        / ord.b_theta()
        * recip_gamma(theta * k as f64 - ord.mu() + 1.0)
}

/// Lagrange interpolation weight `w^{m,i}_{k,j}`, `i` in `{-1, 0, 1}`.
pub fn weight_w(m: usize, i: i32, k: usize, j: usize, ord: FractionalOrder) -> Result<f64, SchemeError> {
    if m < 1 {
        return Err(SchemeError::Index { message: format!("weight_w requires m >= 1, got m = {m}") });
    }
    if j > m - 1 {
        return Err(SchemeError::Index {
            message: format!("weight_w requires j <= m - 1, got j = {j}, m = {m}"),
        });
    }
    if !(-1..=1).contains(&i) {
        return Err(SchemeError::Index { message: format!("weight_w index i must be -1, 0 or 1, got {i}") });
    }
    let p = ord.theta() * k as f64 - ord.mu();
    Ok(cell_weight((m - j) as f64, i as f64, p))
}

/// First-interval weight `xi^m_k = (m^{p+1} - (m-1)^{p+1}) / (p+1)`.
pub fn weight_xi(m: usize, k: usize, ord: FractionalOrder) -> Result<f64, SchemeError> {
    if m < 1 {
        return Err(SchemeError::Index { message: format!("weight_xi requires m >= 1, got m = {m}") });
    }
    let p = ord.theta() * k as f64 - ord.mu();
    let mf = m as f64;
    Ok((mf.powf(p + 1.0) - (mf - 1.0).powf(p + 1.0)) / (p + 1.0))
}
