//! Summation of non-negative series with a deterministic stopping rule and tail classification.

use serde::Serialize;

/// Relative floor below which trailing terms stop the summation.
pub const SERIES_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TailKind {
    /// Terms fell below the floor; the remainder is negligible.
    Negligible,
    /// Geometric decay fitted on the last terms and summed in closed form.
    Geometric,
    /// Power-law decay k^{−q}, q > 1, fitted and summed by the integral estimate.
    Algebraic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesOutcome {
    pub value: f64,
    pub terms: usize,
    pub tail_estimate: f64,
    pub tail: TailKind,
}

/// Sums c_0 + c_1 + … of non-negative terms. Stops when the current term is below
/// `SERIES_FLOOR` times the running sum for three consecutive decreasing terms. If `max_terms`
/// is reached first the tail is extrapolated; `None` means the tail is not summable.
pub fn sum_series(mut term: impl FnMut(usize) -> f64, max_terms: usize) -> Option<SeriesOutcome> {
    let mut sum = 0.0;
    let mut hist: Vec<f64> = Vec::new();
    let mut quiet = 0;
    for k in 0..max_terms {
        let c = term(k);
        if !c.is_finite() {
            return None;
        }
        sum += c;
        let decreasing = hist.last().is_none_or(|&p| c <= p);
        hist.push(c);
        if c <= SERIES_FLOOR * sum && decreasing {
            quiet += 1;
            if quiet >= 3 {
                return Some(SeriesOutcome { value: sum, terms: k + 1, tail_estimate: 0.0, tail: TailKind::Negligible });
            }
        } else {
            quiet = 0;
        }
        if sum == 0.0 && k >= 8 && hist.iter().all(|&v| v == 0.0) {
            return Some(SeriesOutcome { value: 0.0, terms: k + 1, tail_estimate: 0.0, tail: TailKind::Negligible });
        }
    }
    extrapolate(&hist, sum)
}

fn extrapolate(hist: &[f64], sum: f64) -> Option<SeriesOutcome> {
    let n = hist.len();
    if n < 16 {
        return None;
    }
    let w = (n / 4).max(8);
    let window = &hist[n - w..];
    if window.iter().any(|&c| c <= 0.0) {
        // isolated zeros (e.g. compact support reached late) count as negligible
        let last = *hist.last().unwrap();
        return (last <= SERIES_FLOOR * sum).then_some(SeriesOutcome {
            value: sum,
            terms: n,
            tail_estimate: 0.0,
            tail: TailKind::Negligible,
        });
    }
    let last = window[w - 1];
    // geometric: stable ratio below one
    let ratios: Vec<f64> = window.windows(2).map(|p| p[1] / p[0]).collect();
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = ratios.iter().map(|r| (r - mean_ratio).abs()).fold(0.0, f64::max);
    if mean_ratio < 0.9 && spread < 0.05 {
        let tail = last * mean_ratio / (1.0 - mean_ratio);
        return Some(SeriesOutcome { value: sum + tail, terms: n, tail_estimate: tail, tail: TailKind::Geometric });
    }
    // algebraic: least-squares slope of ln c against ln k
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (i, &c) in window.iter().enumerate() {
        let x = ((n - w + i + 1) as f64).ln();
        let y = c.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let m = w as f64;
    let q = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
    if q > 1.05 {
        let tail = last * n as f64 / (q - 1.0);
        return Some(SeriesOutcome { value: sum + tail, terms: n, tail_estimate: tail, tail: TailKind::Algebraic });
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_stops_on_floor() {
        let s = sum_series(|k| 0.5f64.powi(k as i32), 200).unwrap();
        assert!((s.value - 2.0).abs() < 1e-11);
        assert_eq!(s.tail, TailKind::Negligible);
    }

    #[test]
    fn algebraic_tail_extrapolated() {
        let s = sum_series(|k| 1.0 / ((k + 1) as f64).powi(3), 400).unwrap();
        assert!((s.value - 1.202_056_903_159_594).abs() < 1e-5, "{}", s.value);
        assert_eq!(s.tail, TailKind::Algebraic);
    }

    #[test]
    fn harmonic_series_diverges() {
        assert!(sum_series(|k| 1.0 / (k + 1) as f64, 400).is_none());
        assert!(sum_series(|_| 1.0, 400).is_none());
    }
}
