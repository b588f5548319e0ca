//! Shared oracles for the integration tests: a double-exponential quadrature
//! that tolerates the weak endpoint singularities of the kernel integrals,
//! independent of every code path it checks.

/// Integrate `f(tau, 1 - tau)` over (0, 1) by tanh-sinh quadrature with level
/// doubling. The integrand receives `1 - tau` separately so endpoint
/// singularities like `(1-tau)^p`, `p > -1`, can be evaluated without
/// cancellation.
pub fn integrate_01<F>(f: F, tol: f64) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let t_span = 4.7;
    let mut prev = f64::NAN;
    let mut result = f64::NAN;
    for level in 0..=11 {
        let h = 1.0 / (1 << level) as f64;
        let kmax = (t_span / h).ceil() as i64;
        let mut sum = 0.0;
        for k in -kmax..=kmax {
            let t = k as f64 * h;
            let u = 0.5 * std::f64::consts::PI * t.sinh();
            // tau = (1 + tanh(u))/2 without saturation at either endpoint
            let e2u = (2.0 * u).exp();
            let tau = e2u / (1.0 + e2u);
            let omt = 1.0 / (1.0 + e2u);
            let ch = u.cosh();
            let weight = 0.5 * std::f64::consts::PI * t.cosh() / (2.0 * ch * ch);
            if weight == 0.0 || !tau.is_finite() || tau <= 0.0 || omt <= 0.0 {
                continue;
            }
            let v = f(tau, omt) * weight;
            if v.is_finite() {
                sum += v;
            }
        }
        result = sum * h;
        if level >= 3 && (result - prev).abs() <= tol * result.abs().max(1e-300) {
            break;
        }
        prev = result;
    }
    result
}

/// `int_0^1 (1 - tau)^p b(tau) dtau` for `p > -1` via the exact
/// desingularizing substitution `u = (1 - tau)^{p+1}`: the transformed
/// integrand `b(1 - u^{1/(p+1)}) / (p+1)` is bounded, so the quadrature
/// converges even as p approaches -1 where the direct integrand blows up
/// faster than f64 node placement can follow.
fn singular_cell<B>(p: f64, b: B) -> f64
where
    B: Fn(f64) -> f64,
{
    let q = 1.0 / (p + 1.0);
    integrate_01(|u, _| b(1.0 - u.powf(q)), 1e-13) / (p + 1.0)
}

/// Quadrature value of the Lagrange-basis/kernel cell integral behind
/// `w^{m,i}_{k,j}`: `int_0^1 (n - tau)^p basis_i(tau) dtau` in normalized
/// coordinates, `n = m - j`.
pub fn weight_oracle(n: usize, i: i32, p: f64) -> f64 {
    let basis = move |tau: f64| -> f64 {
        match i {
            1 => 1.0 + tau,
            0 => tau,
            -1 => -(1.0 - tau),
            _ => panic!("weight oracle index must be -1, 0 or 1"),
        }
    };
    if n == 1 {
        // kernel singular at the cell's right endpoint
        singular_cell(p, basis)
    } else {
        let nf = n as f64;
        integrate_01(|tau, _| (nf - tau).powf(p) * basis(tau), 1e-13)
    }
}

/// Quadrature value behind `xi^m_k`: `int_0^1 (m - tau)^p dtau`.
pub fn xi_oracle(m: usize, p: f64) -> f64 {
    if m == 1 {
        singular_cell(p, |_| 1.0)
    } else {
        let mf = m as f64;
        integrate_01(|tau, _| (mf - tau).powf(p), 1e-13)
    }
}
