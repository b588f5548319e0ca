//! Assembly of the per-grid weight tables `c^m_j` and `ct^m_j`.

use super::weights::{cell_weight_tab, coefficient_a, fill_powers, xi_tab};
use super::{SchemeError, SolverConfig};
use crate::operators::FractionalOrder;

/// Which triangular arrays to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    /// Only the explicit (predictor) array `c^m_j`.
    Explicit,
    /// Only the implicit (corrector) array `ct^m_j`.
    Implicit,
    /// Both, as needed by the predictor-corrector coupling.
    Both,
}

/// Precomputed quadrature weights for one (order, grid) pair.
///
/// `c^m_j` (rows m = 1..=N, entries j = 0..m-1) drives the explicit scheme and
/// `ct^m_j` (entries j = 0..=m) the implicit one. Rows are stored packed in
/// triangular layout. Memory is O(N^2); this is the scaling bottleneck of the
/// solver and is accepted for desk-scale N.
#[derive(Debug, Clone)]
pub struct WeightTable {
    a_coeffs: Vec<f64>,
    k_cut: usize,
    converged: bool,
    n_steps: usize,
    c: Vec<f64>,
    c_tilde: Vec<f64>,
}

impl WeightTable {
    /// Series coefficients `A_0 ..= A_{k_cut}`.
    pub fn a_coeffs(&self) -> &[f64] {
        &self.a_coeffs
    }

    /// Index where the k-series was cut (inclusive).
    pub fn k_cut(&self) -> usize {
        self.k_cut
    }

    /// False when the cut was forced by `k_max` instead of the tolerance.
    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn has_explicit(&self) -> bool {
        !self.c.is_empty()
    }

    pub fn has_implicit(&self) -> bool {
        !self.c_tilde.is_empty()
    }

    /// Explicit row `c^m_0 ..= c^m_{m-1}`.
    pub fn explicit_row(&self, m: usize) -> &[f64] {
        debug_assert!(m >= 1 && m <= self.n_steps);
        let off = m * (m - 1) / 2;
        &self.c[off..off + m]
    }

    /// Implicit row `ct^m_0 ..= ct^m_m`.
    pub fn implicit_row(&self, m: usize) -> &[f64] {
        debug_assert!(m >= 1 && m <= self.n_steps);
        let off = (m - 1) * (m + 2) / 2;
        &self.c_tilde[off..off + m + 1]
    }
}

/// Decide where to cut the k-series. Integer gamma cuts exactly at gamma;
/// otherwise the summand bound `|A_k| h^{p+1} max(1, N^p)` (uniform over all
/// rows, `p = theta k - mu`) is accumulated until two consecutive bounds drop
/// below the relative tolerance, capped at `k_max`.
fn k_cut_for(ord: FractionalOrder, cfg: &SolverConfig) -> Result<(usize, bool), SchemeError> {
    if ord.gamma().fract() == 0.0 {
        return Ok((ord.gamma() as usize, true));
    }
    let h = cfg.step_size();
    let n = cfg.steps as f64;
    let mut total = 0.0;
    let mut streak = 0u32;
    let mut k = 0usize;
    loop {
        let p = ord.theta() * k as f64 - ord.mu();
        let bound = coefficient_a(ord, k).abs() * h.powf(p + 1.0) * n.powf(p).max(1.0);
        total += bound;
        if bound <= cfg.series.rel_tol * total + cfg.series.abs_tol {
            streak += 1;
            if streak >= 2 {
                return Ok((k, true));
            }
        } else {
            streak = 0;
        }
        if k == cfg.k_max {
            return Err(SchemeError::Truncation { k_reached: cfg.k_max });
        }
        k += 1;
    }
}

/// Build the weight table for `cfg.steps` steps of size `cfg.step_size()`.
pub fn build_weight_table(
    ord: FractionalOrder,
    cfg: &SolverConfig,
    kind: TableKind,
) -> Result<WeightTable, SchemeError> {
    cfg.validate()?;
    let (k_cut, converged) = k_cut_for(ord, cfg)?;
    let n = cfg.steps;
    let h = cfg.step_size();
    let a_coeffs: Vec<f64> = (0..=k_cut).map(|k| coefficient_a(ord, k)).collect();

    let want_expl = matches!(kind, TableKind::Explicit | TableKind::Both);
    let want_impl = matches!(kind, TableKind::Implicit | TableKind::Both);
    let mut c = if want_expl { vec![0.0; n * (n + 1) / 2] } else { Vec::new() };
    let mut c_tilde = if want_impl { vec![0.0; n * (n + 3) / 2] } else { Vec::new() };

    let mut pow1 = Vec::new();
    let mut pow2 = Vec::new();
    for (k, &ak) in a_coeffs.iter().enumerate() {
        let p = ord.theta() * k as f64 - ord.mu();
        let scale = ak * h.powf(p + 1.0);
        if scale == 0.0 {
            continue;
        }
        fill_powers(p, n, &mut pow1, &mut pow2);
        let w = |nn: usize, i: f64| cell_weight_tab(&pow1, &pow2, nn, i, p);
        if want_expl {
            for m in 1..=n {
                let row = &mut c[m * (m - 1) / 2..m * (m - 1) / 2 + m];
                let xi = xi_tab(&pow1, m, p);
                if m == 1 {
                    row[0] += scale * xi;
                } else {
                    row[0] += scale * (xi - w(m - 1, 0.0));
                    for j in 1..m - 1 {
                        row[j] += scale * (w(m - j, 1.0) - w(m - j - 1, 0.0));
                    }
                    row[m - 1] += scale * w(1, 1.0);
                }
            }
        }
        if want_impl {
            for m in 1..=n {
                let off = (m - 1) * (m + 2) / 2;
                let row = &mut c_tilde[off..off + m + 1];
                row[0] += scale * (-w(m, -1.0));
                for j in 1..m {
                    row[j] += scale * (w(m - j + 1, 0.0) - w(m - j, -1.0));
                }
                row[m] += scale * w(1, 0.0);
            }
        }
    }

    Ok(WeightTable { a_coeffs, k_cut, converged, n_steps: n, c, c_tilde })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::weights::{weight_w, weight_xi};

    fn ord(theta: f64, mu: f64, gamma: f64) -> FractionalOrder {
        FractionalOrder::new(theta, mu, gamma).unwrap()
    }

    #[test]
    fn integer_gamma_stores_exactly_k_plus_one_coefficients() {
        let o = ord(0.5, 0.5, 1.0);
        let cfg = SolverConfig::new(0.0, 1.0, 16).unwrap();
        let table = build_weight_table(o, &cfg, TableKind::Both).unwrap();
        assert_eq!(table.k_cut(), 1);
        assert_eq!(table.a_coeffs().len(), 2);
        assert!(table.converged());

        let o3 = ord(0.5, 0.5, 3.0);
        let table3 = build_weight_table(o3, &cfg, TableKind::Explicit).unwrap();
        assert_eq!(table3.k_cut(), 3);
        assert_eq!(table3.a_coeffs().len(), 4);
    }

    #[test]
    fn first_row_is_the_xi_branch() {
        // c^1_0 = sum_k h^{p+1} A_k xi^1_k: at m = 1 only the constant-panel
        // weight exists
        let o = ord(0.5, 0.5, 1.0);
        let cfg = SolverConfig::new(0.0, 1.0, 8).unwrap();
        let h = cfg.step_size();
        let table = build_weight_table(o, &cfg, TableKind::Explicit).unwrap();
        let mut expected = 0.0;
        for k in 0..=table.k_cut() {
            let p = 0.5 * k as f64 - 0.5;
            expected += h.powf(p + 1.0) * coefficient_a(o, k) * weight_xi(1, k, o).unwrap();
        }
        let row = table.explicit_row(1);
        assert_eq!(row.len(), 1);
        assert!((row[0] - expected).abs() <= 1e-15 * expected.abs());
    }

    #[test]
    fn rows_match_standalone_weight_ops() {
        // table assembly must agree with the r / rt combinations built from
        // the public weight operations
        let o = ord(0.6, 0.3, 2.0);
        let cfg = SolverConfig::new(0.0, 2.0, 12).unwrap();
        let h = cfg.step_size();
        let table = build_weight_table(o, &cfg, TableKind::Both).unwrap();
        for m in [1usize, 2, 5, 12] {
            let mut c_row = vec![0.0; m];
            let mut ct_row = vec![0.0; m + 1];
            for k in 0..=table.k_cut() {
                let p = 0.6 * k as f64 - 0.3;
                let scale = coefficient_a(o, k) * h.powf(p + 1.0);
                let xi = weight_xi(m, k, o).unwrap();
                if m == 1 {
                    c_row[0] += scale * xi;
                } else {
                    c_row[0] += scale * (xi - weight_w(m, 0, k, 1, o).unwrap());
                    for j in 1..m - 1 {
                        c_row[j] += scale
                            * (weight_w(m, 1, k, j, o).unwrap() - weight_w(m, 0, k, j + 1, o).unwrap());
                    }
                    c_row[m - 1] += scale * weight_w(m, 1, k, m - 1, o).unwrap();
                }
                ct_row[0] += scale * (-weight_w(m, -1, k, 0, o).unwrap());
                for j in 1..m {
                    ct_row[j] += scale
                        * (weight_w(m, 0, k, j - 1, o).unwrap() - weight_w(m, -1, k, j, o).unwrap());
                }
                ct_row[m] += scale * weight_w(m, 0, k, m - 1, o).unwrap();
            }
            for (a, b) in table.explicit_row(m).iter().zip(&c_row) {
                assert!((a - b).abs() <= 1e-13 * b.abs().max(1.0), "m = {m}");
            }
            for (a, b) in table.implicit_row(m).iter().zip(&ct_row) {
                assert!((a - b).abs() <= 1e-13 * b.abs().max(1.0), "m = {m}");
            }
        }
    }

    #[test]
    fn non_integer_gamma_converges_within_cap() {
        let o = ord(0.5, 0.5, 1.7);
        let cfg = SolverConfig::new(0.0, 1.0, 10).unwrap();
        let table = build_weight_table(o, &cfg, TableKind::Explicit).unwrap();
        assert!(table.converged());
        assert!(table.k_cut() < 64);
    }

    #[test]
    fn kind_controls_which_arrays_exist() {
        let o = ord(0.5, 0.5, 1.0);
        let cfg = SolverConfig::new(0.0, 1.0, 4).unwrap();
        let e = build_weight_table(o, &cfg, TableKind::Explicit).unwrap();
        assert!(e.has_explicit() && !e.has_implicit());
        let i = build_weight_table(o, &cfg, TableKind::Implicit).unwrap();
        assert!(!i.has_explicit() && i.has_implicit());
        let b = build_weight_table(o, &cfg, TableKind::Both).unwrap();
        assert!(b.has_explicit() && b.has_implicit());
    }
}
