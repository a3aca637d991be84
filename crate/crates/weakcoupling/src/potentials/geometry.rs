//! Exact volume of a box intersected with a centred ball (d = 2, 3).

use crate::quadrature::integrate;

fn seg(v: f64, rho: f64) -> f64 {
    // ∫_0^v √(ρ²−s²) ds for 0 ≤ v ≤ ρ
    0.5 * (v * (rho * rho - v * v).max(0.0).sqrt() + rho * rho * (v / rho).clamp(-1.0, 1.0).asin())
}

/// Area of {0 ≤ u ≤ x, 0 ≤ v ≤ y, u²+v² ≤ ρ²} for x, y ≥ 0.
fn quadrant_area(x: f64, y: f64, rho: f64) -> f64 {
    if rho <= 0.0 {
        return 0.0;
    }
    if x * x + y * y <= rho * rho {
        return x * y;
    }
    let y = y.min(rho);
    if x >= rho {
        return seg(y, rho);
    }
    let vs = (rho * rho - x * x).sqrt();
    if y <= vs {
        x * y
    } else {
        x * vs + seg(y, rho) - seg(vs, rho)
    }
}

fn corner(x: f64, y: f64, rho: f64) -> f64 {
    x.signum() * y.signum() * quadrant_area(x.abs(), y.abs(), rho)
}

fn rect_disk(x0: f64, x1: f64, y0: f64, y1: f64, rho: f64) -> f64 {
    corner(x1, y1, rho) - corner(x0, y1, rho) - corner(x1, y0, rho) + corner(x0, y0, rho)
}

/// Volume of ∏[lo_i, hi_i] ∩ B(0, ρ); `None` outside d ∈ {1, 2, 3}.
pub fn box_ball_volume(lo: &[f64], hi: &[f64], rho: f64) -> Option<f64> {
    match lo.len() {
        1 => Some((hi[0].min(rho) - lo[0].max(-rho)).max(0.0)),
        2 => Some(rect_disk(lo[0], hi[0], lo[1], hi[1], rho)),
        3 => {
            let z0 = lo[2].max(-rho);
            let z1 = hi[2].min(rho);
            if z1 <= z0 {
                return Some(0.0);
            }
            let mut breaks = Vec::new();
            for &a in &[lo[0], hi[0]] {
                for &b in &[lo[1], hi[1]] {
                    for c in [a * a, b * b, a * a + b * b] {
                        if c < rho * rho {
                            let z = (rho * rho - c).sqrt();
                            breaks.push(z);
                            breaks.push(-z);
                        }
                    }
                }
            }
            let f = |z: f64| rect_disk(lo[0], hi[0], lo[1], hi[1], (rho * rho - z * z).max(0.0).sqrt());
            Some(integrate(f, z0, z1, &breaks, 1e-15, 1e-14).value)
        }
        _ => None,
    }
}
