//! Dense eigen and singular-value helpers over complex matrices.

use nalgebra::{DMatrix, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_ITER: usize = 0; // 0 = unlimited in nalgebra, bounded internally

fn is_real(m: &DMatrix<C64>) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// Eigenvalues (descending) and eigenvectors (columns) of a Hermitian matrix.
pub fn hermitian_eig(m: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((vec![], DMatrix::zeros(0, 0)));
    }
    let (vals, vecs) = if is_real(m) {
        let re = m.map(|z| z.re);
        let re = (&re + re.transpose()) * 0.5;
        let eig = SymmetricEigen::try_new(re, EIG_EPS, EIG_MAX_ITER)
            .ok_or_else(|| Error::ConvergenceFailure("real symmetric eigensolver".into()))?;
        (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), eig.eigenvectors.map(|x| C64::new(x, 0.0)))
    } else {
        let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::try_new(h, EIG_EPS, EIG_MAX_ITER)
            .ok_or_else(|| Error::ConvergenceFailure("Hermitian eigensolver".into()))?;
        (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = DMatrix::from_fn(n, n, |r, c| vecs[(r, order[c])]);
    Ok((sorted_vals, sorted_vecs))
}

/// Eigenvalues of a general complex matrix sorted by descending real part.
pub fn general_eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    if m.nrows() == 0 {
        return Ok(vec![]);
    }
    let schur = Schur::try_new(m.clone(), EIG_EPS, EIG_MAX_ITER)
        .ok_or_else(|| Error::ConvergenceFailure("complex Schur decomposition".into()))?;
    let (_, t) = schur.unpack();
    let mut vals: Vec<C64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    sort_desc_re(&mut vals);
    Ok(vals)
}

/// Schur form A = Z T Z* with eigenvectors of T computed by back-substitution.
pub fn general_eig(m: &DMatrix<C64>) -> Result<(Vec<C64>, DMatrix<C64>)> {
    let n = m.nrows();
    let schur = Schur::try_new(m.clone(), EIG_EPS, EIG_MAX_ITER)
        .ok_or_else(|| Error::ConvergenceFailure("complex Schur decomposition".into()))?;
    let (z, t) = schur.unpack();
    let scale = t.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
    let mut vecs = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let theta = t[(k, k)];
        let mut y = vec![C64::new(0.0, 0.0); n];
        y[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * y[j];
            }
            let mut den = t[(i, i)] - theta;
            if den.norm() < 1e-14 * scale {
                den = C64::new(1e-14 * scale, 0.0);
            }
            y[i] = -s / den;
        }
        let col: Vec<C64> = (0..n).map(|r| (0..=k).map(|j| z[(r, j)] * y[j]).sum()).collect();
        let nrm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for r in 0..n {
            vecs[(r, k)] = col[r] / nrm;
        }
    }
    let vals: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].re.total_cmp(&vals[a].re).then(vals[b].im.total_cmp(&vals[a].im)));
    let sv = order.iter().map(|&i| vals[i]).collect();
    let svec = DMatrix::from_fn(n, n, |r, c| vecs[(r, order[c])]);
    Ok((sv, svec))
}

pub fn sort_desc_re(v: &mut [C64]) {
    v.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

pub fn singular_values(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(vec![]);
    }
    let svd = SVD::try_new(m.clone(), false, false, EIG_EPS, EIG_MAX_ITER)
        .ok_or_else(|| Error::ConvergenceFailure("singular value decomposition".into()))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// (Σ s^p)^{1/p}; p = ∞ gives the largest value.
pub fn schatten(sv: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return sv.iter().copied().fold(0.0, f64::max);
    }
    let m = sv.iter().copied().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    m * sv.iter().map(|s| (s / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Largest singular value.
pub fn operator_norm(m: &DMatrix<C64>) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

pub fn max_hermitian_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}
