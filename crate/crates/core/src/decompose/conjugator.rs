//! Constructive witnesses for automorphisms of `M_n`: which branch a unital
//! map is on, the matrix conjugating it, and rank-one recovery of a
//! transpose congruence on symmetric matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matlin::{space_basis, SpaceTag};
use crate::matrix::{re, CMatrix, Scalar};
use crate::superop::LinMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `A ↦ NAN⁻¹`
    Automorphism,
    /// `A ↦ NAᵗN⁻¹`
    AntiAutomorphism,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchTest {
    pub branch: Branch,
    pub automorphism_residual: f64,
    pub anti_automorphism_residual: f64,
}

impl BranchTest {
    pub fn winning_residual(&self) -> f64 {
        match self.branch {
            Branch::Automorphism => self.automorphism_residual,
            Branch::AntiAutomorphism => self.anti_automorphism_residual,
        }
    }
}

fn unit_image(phi: &LinMap, i: usize, j: usize) -> CMatrix {
    let n = phi.domain().n;
    phi.apply_projected(&CMatrix::unit(n, i, j))
}

fn rel(a: &CMatrix, target: &CMatrix) -> f64 {
    (a - target).frobenius_norm() / target.frobenius_norm().max(f64::MIN_POSITIVE)
}

/// Decide whether `Φ` multiplies or anti-multiplies matrix units.
///
/// For `n ≥ 3` compares `Φ(E₁₂)Φ(E₂₃)` and `Φ(E₂₃)Φ(E₁₂)` against `Φ(E₁₃)`.
/// For `n = 2` there is no such triple, so `Φ(E₁₂)Φ(E₂₁)` and
/// `Φ(E₂₁)Φ(E₁₂)` are compared against `Φ(E₁₁)`. On `M_1` both branches
/// coincide and the automorphism branch is reported.
pub fn detect_branch(phi: &LinMap) -> BranchTest {
    let n = phi.domain().n;
    let (auto, anti) = match n {
        1 => (0.0, 0.0),
        2 => {
            let (a, b, t) = (unit_image(phi, 0, 1), unit_image(phi, 1, 0), unit_image(phi, 0, 0));
            (rel(&(&a * &b), &t), rel(&(&b * &a), &t))
        }
        _ => {
            let (a, b, t) = (unit_image(phi, 0, 1), unit_image(phi, 1, 2), unit_image(phi, 0, 2));
            (rel(&(&a * &b), &t), rel(&(&b * &a), &t))
        }
    };
    let branch = if auto <= anti { Branch::Automorphism } else { Branch::AntiAutomorphism };
    BranchTest { branch, automorphism_residual: auto, anti_automorphism_residual: anti }
}

/// Map `A ↦ NAN⁻¹` (or `NAᵗN⁻¹`) on `space`.
pub fn conjugation(space: SpaceTag, nmat: &CMatrix, branch: Branch) -> Result<LinMap> {
    let inv = nmat.inverse()?;
    LinMap::from_fn(space, space, |a| match branch {
        Branch::Automorphism => &(nmat * a) * &inv,
        Branch::AntiAutomorphism => &(nmat * &a.transpose()) * &inv,
    })
}

/// Recover `N` (up to a scalar) with `Φ(A) = NAN⁻¹` or `Φ(A) = NAᵗN⁻¹`.
///
/// With `v` spanning the range of the rank-one idempotent `Φ(E_jj)`,
/// column `i` of `N` is `Φ(E_ij)v`. Each `j` is tried until the candidate
/// reproduces `Φ` within `tol`; the best candidate and its relative transfer
/// error are returned.
pub fn recover_conjugator(phi: &LinMap, branch: Branch, tol: f64) -> Result<(CMatrix, f64)> {
    let space = phi.domain();
    let n = space.n;
    let img = |i: usize, j: usize| match branch {
        Branch::Automorphism => unit_image(phi, i, j),
        Branch::AntiAutomorphism => unit_image(phi, j, i),
    };
    let mut best: Option<(CMatrix, f64)> = None;
    for j in 0..n {
        let x = img(j, j);
        let col = (0..n)
            .max_by(|&a, &b| column_norm(&x, a).total_cmp(&column_norm(&x, b)))
            .expect("n >= 1");
        let norm = column_norm(&x, col);
        if norm == 0.0 {
            continue;
        }
        let v = CMatrix::from_fn(n, 1, |r, _| x.get(r, col) / norm);
        let cols: Vec<CMatrix> = (0..n).map(|i| &img(i, j) * &v).collect();
        let cand = CMatrix::from_fn(n, n, |r, s| cols[s].get(r, 0));
        if !(cand.condition_number() < 1e12) {
            continue;
        }
        let res = conjugation(space, &cand, branch)?.rel_distance(phi);
        if best.as_ref().is_none_or(|(_, r)| res < *r) {
            best = Some((cand, res));
        }
        if res <= tol {
            break;
        }
    }
    best.ok_or_else(|| Error::TheoremViolated("no diagonal unit yields an invertible conjugator".into()))
}

fn column_norm(x: &CMatrix, c: usize) -> f64 {
    (0..x.rows()).map(|r| x.get(r, c).norm_sqr()).sum::<f64>().sqrt()
}

/// Rows `r_i` with `φ(E_ii) = r_iᵗ r_i`, signs aligned through
/// `φ(E_1j + E_j1) = r_1ᵗ r_j + r_jᵗ r_1`; the result `M` satisfies
/// `φ(A) ≈ MᵗAM` when `φ` is a transpose congruence of a symmetric space.
pub fn recover_congruence_rows(phi: &LinMap) -> Result<CMatrix> {
    let space = phi.domain();
    let n = space.n;
    let basis = space_basis(space).elements;
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(n);
    for i in 0..n {
        let x = phi.apply_projected(&basis[space.diag_index(i)]);
        let k = (0..n).max_by(|&a, &b| x.get(a, a).norm().total_cmp(&x.get(b, b).norm())).expect("n >= 1");
        let piv = x.get(k, k);
        if piv.norm() == 0.0 {
            return Err(Error::TheoremViolated(format!("image of E_{0}{0} vanishes", i + 1)));
        }
        let s = piv.sqrt();
        rows.push((0..n).map(|j| x.get(k, j) / s).collect());
    }
    let row_mat = |rows: &[Vec<Scalar>]| CMatrix::from_rows(rows);
    for j in 1..n {
        let target = phi.apply_projected(&(&CMatrix::unit(n, 0, j) + &CMatrix::unit(n, j, 0)));
        let r1 = row_mat(&rows[0..1])?;
        let rj = row_mat(&rows[j..j + 1])?;
        let plus = &(&r1.transpose() * &rj) + &(&rj.transpose() * &r1);
        let err_plus = (&plus - &target).frobenius_norm();
        let err_minus = (&plus + &target).frobenius_norm();
        if err_minus < err_plus {
            for z in rows[j].iter_mut() {
                *z = -*z;
            }
        }
    }
    row_mat(&rows)
}

/// Multiply by a unit scalar so the largest-magnitude entry becomes real
/// positive; returns the normalized matrix and the applied factor.
pub fn phase_normalize(m: &CMatrix) -> (CMatrix, Scalar) {
    let (i, j) = m.argmax_abs();
    let z = m.get(i, j);
    if z.norm() == 0.0 {
        return (m.clone(), re(1.0));
    }
    let f = z.conj() / z.norm();
    (m.scale(f), f)
}

/// Scale to unit Frobenius norm, then apply [`phase_normalize`].
pub fn gauge_normalize(m: &CMatrix) -> (CMatrix, Scalar) {
    let norm = m.frobenius_norm();
    let (out, f) = phase_normalize(&m.scale(re(1.0 / norm)));
    (out, f / norm)
}
