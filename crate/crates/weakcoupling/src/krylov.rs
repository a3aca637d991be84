//! Restarted Krylov eigensolver for the largest-real-part eigenvalues of a matrix-free operator.
//!
//! The basis Q and its image W = AQ are stored together, so the Rayleigh quotient Q*AQ is formed
//! explicitly and restarts (keeping the wanted Ritz vectors) need no extra operator applications.
//! The Hermitian flag switches the projected problem to a Hermitian eigensolve.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::dense::{general_eig, hermitian_eig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct KrylovOptions {
    pub wanted: usize,
    pub max_basis: usize,
    /// Relative residual ‖Ax − θx‖/|θ| required for every wanted pair.
    pub tol: f64,
    pub max_restarts: usize,
    pub hermitian: bool,
}

impl KrylovOptions {
    pub fn new(wanted: usize, hermitian: bool) -> Self {
        Self { wanted, max_basis: (2 * wanted + 24).max(30), tol: 1e-10, max_restarts: 200, hermitian }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: C64,
    pub vector: Vec<C64>,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct KrylovStats {
    pub applications: usize,
    pub restarts: usize,
}

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        s += x.conj() * y;
    }
    s
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [C64], alpha: C64, x: &[C64]) {
    for (u, v) in y.iter_mut().zip(x) {
        *u += alpha * v;
    }
}

/// Deterministic pseudo-random start vector.
pub fn start_vector(n: usize, salt: u64) -> Vec<C64> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ salt.wrapping_mul(0xD1B5_4A32_D192_ED03);
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            C64::new((state >> 11) as f64 / (1u64 << 53) as f64 + 0.5, 0.0)
        })
        .collect()
}

struct Basis {
    q: Vec<Vec<C64>>,
    w: Vec<Vec<C64>>,
}

impl Basis {
    /// Orthonormalises `v` against the basis (two Gram–Schmidt passes); returns false when
    /// `v` is numerically inside the span.
    fn orthonormalize(&self, v: &mut [C64]) -> bool {
        let before = norm(v);
        for _ in 0..2 {
            for qj in &self.q {
                let h = dot(qj, v);
                axpy(v, -h, qj);
            }
        }
        let after = norm(v);
        if !(after > 1e-12 * before) || after == 0.0 {
            return false;
        }
        for x in v.iter_mut() {
            *x /= after;
        }
        true
    }
}

/// Top `opts.wanted` eigenpairs (largest real part) of the operator `apply` on ℂⁿ.
pub fn top_eigenpairs(
    n: usize,
    mut apply: impl FnMut(&[C64], &mut [C64]),
    start: Option<&[C64]>,
    opts: &KrylovOptions,
) -> Result<(Vec<EigenPair>, KrylovStats)> {
    let k = opts.wanted.min(n);
    let m = opts.max_basis.min(n).max(k + 1).min(n);
    let mut stats = KrylovStats::default();
    if n == 0 || k == 0 {
        return Ok((vec![], stats));
    }
    let mut basis = Basis { q: Vec::with_capacity(m), w: Vec::with_capacity(m) };
    let mut salt = 1u64;
    let mut push = |basis: &mut Basis, mut v: Vec<C64>, stats: &mut KrylovStats, apply: &mut dyn FnMut(&[C64], &mut [C64])| {
        while !basis.orthonormalize(&mut v) {
            salt += 1;
            v = start_vector(n, salt);
        }
        let mut av = vec![C64::new(0.0, 0.0); n];
        apply(&v, &mut av);
        stats.applications += 1;
        basis.q.push(v);
        basis.w.push(av);
    };
    let first = match start {
        Some(s) if norm(s) > 0.0 => s.to_vec(),
        _ => start_vector(n, 0),
    };
    push(&mut basis, first, &mut stats, &mut apply);
    let mut worst: f64;
    loop {
        // Rayleigh–Ritz at intermediate sizes too, so a good start vector converges early
        let dim = basis.q.len();
        if dim < m && !(dim >= k + 4 && (dim - k) % 4 == 0) {
            let next = basis.w.last().unwrap().clone();
            push(&mut basis, next, &mut stats, &mut apply);
            continue;
        }
        let h = DMatrix::from_fn(dim, dim, |i, j| dot(&basis.q[i], &basis.w[j]));
        let (vals, coeffs): (Vec<C64>, DMatrix<C64>) = if opts.hermitian {
            let (v, c) = hermitian_eig(&h)?;
            (v.into_iter().map(|x| C64::new(x, 0.0)).collect(), c)
        } else {
            general_eig(&h)?
        };
        let mut pairs = Vec::with_capacity(k);
        let mut first_bad: Option<Vec<C64>> = None;
        worst = 0.0f64;
        for idx in 0..k {
            let theta = vals[idx];
            let s: Vec<C64> = coeffs.column(idx).iter().copied().collect();
            let mut y = vec![C64::new(0.0, 0.0); n];
            let mut r = vec![C64::new(0.0, 0.0); n];
            for j in 0..dim {
                axpy(&mut y, s[j], &basis.q[j]);
                axpy(&mut r, s[j], &basis.w[j]);
            }
            let ny = norm(&y);
            for (ri, yi) in r.iter_mut().zip(&y) {
                *ri -= theta * yi;
            }
            let res = norm(&r) / ny / theta.norm().max(1e-300);
            worst = worst.max(res);
            if res > opts.tol && first_bad.is_none() {
                first_bad = Some(r);
            }
            for yi in y.iter_mut() {
                *yi /= ny;
            }
            pairs.push(EigenPair { value: theta, vector: y, residual: res });
        }
        if first_bad.is_none() {
            return Ok((pairs, stats));
        }
        if dim < m {
            let next = basis.w.last().unwrap().clone();
            push(&mut basis, next, &mut stats, &mut apply);
            continue;
        }
        if stats.restarts >= opts.max_restarts {
            return Err(Error::NoConvergence { iterations: stats.restarts, residual: worst });
        }
        stats.restarts += 1;
        // thick restart on the wanted Ritz vectors plus a few buffer vectors
        let keep = (k + (m - k) / 2).min(dim - 1).max(k);
        let mut kept: Vec<Vec<C64>> = Vec::with_capacity(keep);
        for idx in 0..keep {
            let mut c: Vec<C64> = coeffs.column(idx).iter().copied().collect();
            for _ in 0..2 {
                for prev in &kept {
                    let h = dot(prev, &c);
                    axpy(&mut c, -h, prev);
                }
            }
            let nc = norm(&c);
            if nc < 1e-10 {
                continue;
            }
            for x in c.iter_mut() {
                *x /= nc;
            }
            kept.push(c);
        }
        let mut q_new = Vec::with_capacity(m);
        let mut w_new = Vec::with_capacity(m);
        for c in &kept {
            let mut qv = vec![C64::new(0.0, 0.0); n];
            let mut wv = vec![C64::new(0.0, 0.0); n];
            for j in 0..dim {
                axpy(&mut qv, c[j], &basis.q[j]);
                axpy(&mut wv, c[j], &basis.w[j]);
            }
            q_new.push(qv);
            w_new.push(wv);
        }
        basis = Basis { q: q_new, w: w_new };
        push(&mut basis, first_bad.unwrap(), &mut stats, &mut apply);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_operator() {
        let d: Vec<f64> = (0..200).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let (pairs, _) = top_eigenpairs(
            200,
            |x, y| {
                for i in 0..200 {
                    y[i] = x[i] * d[i];
                }
            },
            None,
            &KrylovOptions::new(3, true),
        )
        .unwrap();
        for (i, p) in pairs.iter().enumerate() {
            assert!((p.value.re - d[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn non_normal_operator() {
        let n = 60;
        let a = DMatrix::<C64>::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(1.0 / (1.0 + i as f64), 0.1 * i as f64 / n as f64)
            } else if j == i + 1 {
                C64::new(0.3, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let (pairs, _) = top_eigenpairs(
            n,
            |x, y| {
                for i in 0..n {
                    y[i] = (0..n).map(|j| a[(i, j)] * x[j]).sum();
                }
            },
            None,
            &KrylovOptions { tol: 1e-9, ..KrylovOptions::new(2, false) },
        )
        .unwrap();
        assert!((pairs[0].value - a[(0, 0)]).norm() < 1e-8);
        assert!((pairs[1].value - a[(1, 1)]).norm() < 1e-8);
    }
}
