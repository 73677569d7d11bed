//! Thin numerical helpers over nalgebra: spectra, ranks, null spaces,
//! least squares and Hermitian matrix functions.

use nalgebra::{ComplexField, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Scalar};

pub fn singular_values<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn condition_number<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Number of singular values above `rel_cutoff · σ_max`.
pub fn rank_of_values(s: &[f64], rel_cutoff: f64) -> usize {
    let top = s.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_cutoff * top).count()
}

pub fn rank<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, rel_cutoff: f64) -> usize {
    rank_of_values(&singular_values(m), rel_cutoff)
}

/// Orthonormal basis (as columns) of the null space of `m`.
pub fn null_space<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, rel_cutoff: f64) -> DMatrix<T> {
    let (r, c) = m.shape();
    // Pad wide matrices with zero rows so the SVD returns all of V.
    let padded = if r < c {
        let mut sq = DMatrix::<T>::zeros(c, c);
        sq.view_mut((0, 0), (r, c)).copy_from(m);
        sq
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = rel_cutoff * top;
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| top == 0.0 || svd.singular_values[i] <= cutoff)
        .collect();
    let mut out = DMatrix::<T>::zeros(c, keep.len());
    for (dst, &i) in keep.iter().enumerate() {
        for j in 0..c {
            out[(j, dst)] = v_t[(i, j)].clone().conjugate();
        }
    }
    out
}

/// Least-squares solution of `a x = b` via SVD.
pub fn lstsq(a: &DMatrix<Scalar>, b: &DMatrix<Scalar>) -> Result<DMatrix<Scalar>> {
    let svd = a.clone().svd(true, true);
    svd.solve(b, 1e-13 * svd.singular_values.max().max(1e-300))
        .map_err(|e| Error::Singular { what: format!("least-squares system ({e})"), condition: f64::INFINITY })
}

/// Solve a square system, failing when it is numerically singular.
pub fn solve(a: &DMatrix<Scalar>, b: &DMatrix<Scalar>, what: &str) -> Result<DMatrix<Scalar>> {
    let cond = condition_number(a);
    if !cond.is_finite() || cond > 1e14 {
        return Err(Error::Singular { what: what.into(), condition: cond });
    }
    a.clone()
        .lu()
        .solve(b)
        .ok_or(Error::Singular { what: what.into(), condition: cond })
}

fn symmetrize(a: &CMatrix) -> DMatrix<Scalar> {
    (a.as_na() + a.as_na().adjoint()) * Scalar::new(0.5, 0.0)
}

/// Eigenvalues (ascending) of the Hermitian part of `a`.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(symmetrize(a)).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Apply `f` to the spectrum of the Hermitian matrix `a`.
pub fn hermitian_fn(a: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let eig = SymmetricEigen::new(symmetrize(a));
    let q = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| Scalar::new(f(x), 0.0)));
    CMatrix::from_na(q * d * q.adjoint())
}

/// Modified Gram–Schmidt on the columns of `m`, keeping columns whose
/// residual exceeds `rel_tol` times their original norm. Returns the indices
/// of the kept columns.
pub fn independent_columns(m: &DMatrix<Scalar>, rel_tol: f64) -> Vec<usize> {
    let mut q: Vec<nalgebra::DVector<Scalar>> = Vec::new();
    let mut kept = Vec::new();
    for j in 0..m.ncols() {
        let mut v = m.column(j).clone_owned();
        let n0 = v.norm();
        if n0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for u in &q {
                let p = u.dotc(&v);
                v -= u * p;
            }
        }
        let n1 = v.norm();
        if n1 > rel_tol * n0 {
            q.push(v / Scalar::new(n1, 0.0));
            kept.push(j);
        }
    }
    kept
}
