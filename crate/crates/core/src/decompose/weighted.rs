//! Weighted products `tr(φ₁(A₁)^{α₁}⋯φₘ(Aₘ)^{αₘ}) = tr(A₁^{β₁}⋯Aₘ^{βₘ})`
//! on positive definite matrices, and the reduction to the linear case.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extend::{extend_from_subset, Mode, PreservationReport};
use crate::families::sample_space;
use crate::linalg;
use crate::matlin::{Kind, SpaceTag};
use crate::matrix::CMatrix;
use crate::superop::{from_canonical, CanonicalForm, LinMap};

/// `A^t` for positive definite `A` through its spectral decomposition.
pub fn herm_power(a: &CMatrix, t: f64) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::dim(format!("power of a {}x{} matrix", a.rows(), a.cols())));
    }
    let dev = a.max_abs_diff(&a.adjoint());
    if dev > 1e-9 * a.max_abs().max(1.0) {
        return Err(Error::Domain(format!("matrix is not Hermitian (deviation {dev:.3e})")));
    }
    let lo = linalg::hermitian_eigenvalues(a)[0];
    if !(lo > 0.0) {
        return Err(Error::Domain(format!("matrix is not positive definite (smallest eigenvalue {lo:.3e})")));
    }
    Ok(if t == 0.0 {
        CMatrix::identity(a.rows())
    } else if t == 1.0 {
        a.clone()
    } else {
        linalg::hermitian_fn(a, |x| x.powf(t))
    })
}

/// `A ↦ L(A^inner)^outer` for a linear `L` on positive definite matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerMap {
    pub inner: f64,
    pub map: LinMap,
    pub outer: f64,
}

impl PowerMap {
    pub fn linear(map: LinMap) -> Self {
        Self { inner: 1.0, map, outer: 1.0 }
    }

    pub fn apply(&self, a: &CMatrix) -> Result<CMatrix> {
        let x = herm_power(a, self.inner)?;
        let y = self.map.apply_projected(&x);
        herm_power(&y, self.outer)
    }

    /// The underlying map when both exponents are one.
    pub fn as_linear(&self) -> Option<&LinMap> {
        (self.inner == 1.0 && self.outer == 1.0).then_some(&self.map)
    }

    /// Fit a linear map to the values of `self` on random positive definite
    /// matrices, failing with an inconsistency when `self` is not linear.
    pub fn linearize(&self, seed: u64, tol: f64) -> Result<LinMap> {
        if let Some(f) = self.as_linear() {
            return Ok(f.clone());
        }
        let dom = self.map.domain();
        let pd = SpaceTag::new(Kind::PosDef, dom.field, dom.n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..2 * dom.span_dim())
            .map(|_| {
                let a = sample_space(pd, &mut rng);
                self.apply(&a).map(|b| (a, b))
            })
            .collect::<Result<Vec<_>>>()?;
        extend_from_subset(&samples, dom, self.map.codomain(), tol)
    }
}

fn check_exponents(m: usize, alpha: &[f64], beta: &[f64]) -> Result<()> {
    if alpha.len() != m || beta.len() != m {
        return Err(Error::InvalidParameter(format!("need {m} exponents each, got {} and {}", alpha.len(), beta.len())));
    }
    if alpha.iter().chain(beta).any(|&x| x == 0.0 || !x.is_finite()) {
        return Err(Error::InvalidParameter("exponents must be finite and nonzero".into()));
    }
    Ok(())
}

/// Randomized check of the weighted identity on positive definite samples.
pub fn verify_weighted(
    maps: &[PowerMap],
    alpha: &[f64],
    beta: &[f64],
    tol: f64,
    trials: usize,
    seed: u64,
) -> Result<PreservationReport> {
    let m = maps.len();
    if m < 2 {
        return Err(Error::InvalidParameter(format!("need at least two maps, got {m}")));
    }
    check_exponents(m, alpha, beta)?;
    let spaces: Vec<SpaceTag> = maps.iter().map(|f| f.map.domain()).collect();
    let n = spaces[0].n;
    if spaces.iter().any(|s| s.n != n) || maps.iter().any(|f| f.map.codomain().n != n) {
        return Err(Error::dim("all maps must act on matrices of one size"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (0.0, vec![0]);
    for t in 0..trials {
        let mut lhs = CMatrix::identity(n);
        let mut rhs = CMatrix::identity(n);
        for i in 0..m {
            let a = sample_space(SpaceTag::new(Kind::PosDef, spaces[i].field, n), &mut rng);
            let out = maps[i].apply(&a).map_err(|e| match e {
                Error::Domain(msg) => Error::Domain(format!("map {}: {msg}", i + 1)),
                other => other,
            })?;
            lhs = &lhs * &herm_power(&out, alpha[i])?;
            rhs = &rhs * &herm_power(&a, beta[i])?;
        }
        let (l, r) = (lhs.trace(), rhs.trace());
        let res = (l - r).norm() / r.norm().max(1.0);
        if !(res <= worst.0) {
            worst = (res, vec![t]);
        }
    }
    Ok(PreservationReport {
        m,
        spaces,
        max_residual: worst.0,
        worst_tuple: worst.1,
        mode: Mode::Randomized { trials, seed },
        pass: worst.0 <= tol,
        tol,
        tuples_evaluated: trials as u64,
        auto_switched: false,
    })
}

/// `ψ_i(A) = φ_i(A^{1/β_i})^{α_i}`, which preserves the plain trace of
/// products exactly when the `φ_i` preserve the weighted one.
pub fn reduce_weighted(maps: &[PowerMap], alpha: &[f64], beta: &[f64]) -> Result<Vec<PowerMap>> {
    check_exponents(maps.len(), alpha, beta)?;
    Ok(maps
        .iter()
        .zip(alpha.iter().zip(beta))
        .map(|(f, (&a, &b))| PowerMap { inner: f.inner / b, map: f.map.clone(), outer: f.outer * a })
        .collect())
}

/// Weighted maps `φ_i(A) = L_i(A^{β_i})^{1/α_i}` built from the linear maps
/// `L_i` of a positive chain or pair form.
pub fn weighted_from_form(form: &CanonicalForm, space: SpaceTag, alpha: &[f64], beta: &[f64]) -> Result<Vec<PowerMap>> {
    let lin = from_canonical(form, space)?;
    check_exponents(lin.len(), alpha, beta)?;
    Ok(lin
        .into_iter()
        .zip(alpha.iter().zip(beta))
        .map(|(map, (&a, &b))| PowerMap { inner: b, map, outer: 1.0 / a })
        .collect())
}
