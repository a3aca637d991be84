//! The smooth cutoff χ: ≡ 1 on [0,1], 0 on [2,∞), with an exponential transition in between.

use crate::quadrature::integrate;

fn psi(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

pub fn chi(s: f64) -> f64 {
    if s <= 1.0 {
        1.0
    } else if s >= 2.0 {
        0.0
    } else {
        let a = psi(2.0 - s);
        a / (a + psi(s - 1.0))
    }
}

/// c_χ(e) = ∫_τ^{2τ} χ(t/τ)/(t+e) dt, so that ∫_0^{2τ} χ(t/τ)/(t+e) dt = ln(1+τ/e) + c_χ(e).
pub fn chi_tail_integral(tau: f64, e: f64) -> f64 {
    integrate(|t| chi(t / tau) / (t + e), tau, 2.0 * tau, &[], 1e-15, 1e-14).value
}
