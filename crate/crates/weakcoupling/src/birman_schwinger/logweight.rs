use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonic::KineticSymbol;
use crate::quadrature::integrate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogWeightIntegrals {
    pub e: f64,
    pub p: f64,
    /// ∫_{1/2}^{3/2} k^{d(1/p−1/p')−1}/(T(k)+e) dk
    pub g: f64,
    /// ∫_{1/2}^{3/2} 1/(T(k)+e) dk
    pub g_mt: f64,
}

/// Breakpoints clustering geometrically at k₀ so the adaptive rule sees the 1/(|k−k₀|+e) peak.
fn peak_breaks(k0: f64, e: f64) -> Vec<f64> {
    let mut b = vec![k0];
    let mut d = e.max(1e-300);
    while d < 0.5 {
        b.push(k0 - d);
        b.push(k0 + d);
        d *= 4.0;
    }
    b.retain(|x| *x > 0.5 && *x < 1.5);
    b.sort_by(f64::total_cmp);
    b
}

pub fn log_weight_integrals(symbol: &KineticSymbol, e: f64, p: f64) -> Result<LogWeightIntegrals> {
    if !(e > 0.0) {
        return Err(Error::NonPositiveShift(e));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidExponents(format!("p = {p} < 1")));
    }
    let d = symbol.dim as f64;
    let pp = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
    let expo = d * (1.0 / p - 1.0 / pp) - 1.0;
    let breaks = peak_breaks(symbol.fermi_radius(), e);
    let g = integrate(|k| k.powf(expo) / (symbol.t(k) + e), 0.5, 1.5, &breaks, 0.0, 1e-12).value;
    let g_mt = integrate(|k| 1.0 / (symbol.t(k) + e), 0.5, 1.5, &breaks, 0.0, 1e-12).value;
    Ok(LogWeightIntegrals { e, p, g, g_mt })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bcs_closed_form() {
        // ∫ dk/(|k²−1|+e) split at 1 has elementary antiderivatives
        let s = KineticSymbol::bcs(3, 0.4).unwrap();
        let e = 1e-4;
        let r = log_weight_integrals(&s, e, 2.0).unwrap();
        let a = (1.0 - e).sqrt();
        let upper = ((1.5 - a) / (1.5 + a)).ln() - ((1.0 - a) / (1.0 + a)).ln();
        let b = (1.0 + e).sqrt();
        let lower = ((b + 1.0) / (b - 1.0)).ln() - ((b + 0.5) / (b - 0.5)).ln();
        let want = upper / (2.0 * a) + lower / (2.0 * b);
        assert!((r.g_mt - want).abs() < 1e-10 * want, "{} vs {want}", r.g_mt);
    }
}
