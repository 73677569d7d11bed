//! Checking the trace-of-products identity, dual maps, extension of maps
//! from spanning samples and from a corner block, and rank certificates
//! ruling out preservers into smaller matrix algebras.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::sample_space;
use crate::linalg;
use crate::matlin::{gram_matrix, space_basis, trace_pair_unchecked, Field, Kind, Span, SpaceTag};
use crate::matrix::{re, CMatrix, Scalar};
use crate::superop::LinMap;

/// Exhaustive checks above this many tuples switch to random sampling.
pub const EXHAUSTIVE_LIMIT: f64 = 1e6;
pub const DEFAULT_TRIALS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Randomized { trials: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreservationReport {
    pub m: usize,
    pub spaces: Vec<SpaceTag>,
    pub max_residual: f64,
    /// Basis indices of the worst tuple, or the trial number in randomized mode.
    pub worst_tuple: Vec<usize>,
    pub mode: Mode,
    pub pass: bool,
    pub tol: f64,
    pub tuples_evaluated: u64,
    #[serde(default)]
    pub auto_switched: bool,
}

fn residual(lhs: Scalar, rhs: Scalar) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}

fn shape_check(maps: &[LinMap]) -> Result<(usize, usize)> {
    if maps.len() < 2 {
        return Err(Error::InvalidParameter(format!("need at least two maps, got {}", maps.len())));
    }
    let n = maps[0].domain().n;
    let k = maps[0].codomain().n;
    for (i, f) in maps.iter().enumerate() {
        if f.domain().n != n || f.codomain().n != k {
            return Err(Error::dim(format!(
                "map {} is {} -> {}, expected inputs of size {n} and outputs of size {k}",
                i + 1,
                f.domain(),
                f.codomain()
            )));
        }
    }
    Ok((n, k))
}

/// Test `tr(φ₁(A₁)⋯φₘ(Aₘ)) = tr(A₁⋯Aₘ)`.
///
/// Exhaustive mode runs over every tuple of canonical basis elements, which
/// suffices by multilinearity; it falls back to `DEFAULT_TRIALS` random
/// tuples (seed 0) when there are more than `EXHAUSTIVE_LIMIT` of them.
pub fn check_preservation(maps: &[LinMap], tol: f64, mode: Mode) -> Result<PreservationReport> {
    check_preservation_seeded(maps, tol, mode, 0)
}

/// As [`check_preservation`], seeding the randomized fallback with `seed`.
pub fn check_preservation_seeded(maps: &[LinMap], tol: f64, mode: Mode, seed: u64) -> Result<PreservationReport> {
    shape_check(maps)?;
    let spaces: Vec<SpaceTag> = maps.iter().map(LinMap::domain).collect();
    let tuples: f64 = spaces.iter().map(|s| s.span_dim() as f64).product();
    let (mode, auto_switched) = match mode {
        Mode::Exhaustive if tuples > EXHAUSTIVE_LIMIT => (Mode::Randomized { trials: DEFAULT_TRIALS, seed }, true),
        other => (other, false),
    };
    let (max_residual, worst_tuple, evaluated) = match mode {
        Mode::Exhaustive => exhaustive(maps),
        Mode::Randomized { trials, seed } => randomized(maps, trials, seed),
    };
    Ok(PreservationReport {
        m: maps.len(),
        spaces,
        max_residual,
        worst_tuple,
        mode,
        pass: max_residual <= tol,
        tol,
        tuples_evaluated: evaluated,
        auto_switched,
    })
}

struct Search<'a> {
    lhs: &'a [Vec<DMatrix<Scalar>>],
    rhs: &'a [Vec<DMatrix<Scalar>>],
    idx: Vec<usize>,
    worst: (f64, Vec<usize>),
    count: u64,
}

impl Search<'_> {
    fn descend(&mut self, level: usize, pl: &DMatrix<Scalar>, pr: &DMatrix<Scalar>) {
        let last = level + 1 == self.lhs.len();
        for j in 0..self.lhs[level].len() {
            self.idx[level] = j;
            if last {
                let l = trace_pair_unchecked(pl, &self.lhs[level][j]);
                let r = trace_pair_unchecked(pr, &self.rhs[level][j]);
                let res = residual(l, r);
                self.count += 1;
                // NaN residuals must win so broken inputs never pass.
                if !(res <= self.worst.0) {
                    self.worst = (res, self.idx.clone());
                }
            } else {
                let nl = pl * &self.lhs[level][j];
                let nr = pr * &self.rhs[level][j];
                self.descend(level + 1, &nl, &nr);
            }
        }
    }
}

fn exhaustive(maps: &[LinMap]) -> (f64, Vec<usize>, u64) {
    let lhs: Vec<Vec<DMatrix<Scalar>>> =
        maps.iter().map(|f| f.basis_images().into_iter().map(CMatrix::into_na).collect()).collect();
    let rhs: Vec<Vec<DMatrix<Scalar>>> = maps
        .iter()
        .map(|f| space_basis(f.domain()).elements.into_iter().map(CMatrix::into_na).collect())
        .collect();
    let k = maps[0].codomain().n;
    let n = maps[0].domain().n;
    let mut s = Search { lhs: &lhs, rhs: &rhs, idx: vec![0; maps.len()], worst: (0.0, vec![0; maps.len()]), count: 0 };
    s.descend(0, &DMatrix::identity(k, k), &DMatrix::identity(n, n));
    (s.worst.0, s.worst.1, s.count)
}

fn randomized(maps: &[LinMap], trials: usize, seed: u64) -> (f64, Vec<usize>, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (0.0, vec![0]);
    for t in 0..trials {
        let inputs: Vec<CMatrix> = maps.iter().map(|f| sample_space(f.domain(), &mut rng)).collect();
        let res = tuple_residual(maps, &inputs);
        if !(res <= worst.0) {
            worst = (res, vec![t]);
        }
    }
    (worst.0, worst.1, trials as u64)
}

/// Residual of the identity on one tuple of inputs (projected onto each domain).
pub fn tuple_residual(maps: &[LinMap], inputs: &[CMatrix]) -> f64 {
    let k = maps[0].codomain().n;
    let n = maps[0].domain().n;
    let mut pl = DMatrix::<Scalar>::identity(k, k);
    let mut pr = DMatrix::<Scalar>::identity(n, n);
    let m = maps.len();
    for (f, a) in maps[..m - 1].iter().zip(inputs) {
        pl = pl * f.apply_projected(a).as_na();
        pr = pr * a.as_na();
    }
    let l = trace_pair_unchecked(&pl, maps[m - 1].apply_projected(&inputs[m - 1]).as_na());
    let r = trace_pair_unchecked(&pr, inputs[m - 1].as_na());
    residual(l, r)
}

/// Orthonormalize `basis` under `⟨A, B⟩ = tr(A*B)` (modified Gram–Schmidt,
/// two passes).
fn orthonormalize(basis: &[CMatrix]) -> Vec<CMatrix> {
    let mut out: Vec<CMatrix> = Vec::with_capacity(basis.len());
    for b in basis {
        let mut v = b.clone();
        for _ in 0..2 {
            for q in &out {
                let p = trace_pair_unchecked(q.adjoint().as_na(), v.as_na());
                v = &v - &q.scale(p);
            }
        }
        let nv = v.frobenius_norm();
        out.push(v.scale(re(1.0 / nv)));
    }
    out
}

/// The unique `ψ` with `tr(φ(A)ψ(B)) = tr(AB)` on the (conjugate-closed)
/// domain of the bijection `φ`.
pub fn dualize(phi: &LinMap, tol: f64) -> Result<LinMap> {
    let v = phi.domain();
    if !v.same_span(&phi.codomain()) {
        return Err(Error::IncompatibleSpace(format!("dual needs a map of one space into itself, got {} -> {}", v, phi.codomain())));
    }
    let cond = phi.transfer().condition_number();
    if !(cond <= 1.0 / tol) {
        return Err(Error::Singular { what: "map to dualize".into(), condition: cond });
    }
    let canon = space_basis(v).elements;
    let ortho = orthonormalize(&canon);
    let d = canon.len();
    // F_ik = tr(φ(A_i*) E_k); the dual basis B_j solves F b_j = e_j and ψ(A_j) = B_j.
    let mut f = DMatrix::<Scalar>::zeros(d, d);
    for (i, a) in ortho.iter().enumerate() {
        let img = phi.apply_projected(&a.adjoint());
        for (k, e) in canon.iter().enumerate() {
            f[(i, k)] = trace_pair_unchecked(img.as_na(), e.as_na());
        }
    }
    let mut acoords = DMatrix::<Scalar>::zeros(d, d);
    for (j, a) in ortho.iter().enumerate() {
        for (i, z) in v.coords(a).into_iter().enumerate() {
            acoords[(i, j)] = z;
        }
    }
    let b = linalg::solve(&f, &DMatrix::identity(d, d), "dual basis system")?;
    // T_ψ · acoords = b
    let t = linalg::solve(&acoords.transpose(), &b.transpose(), "orthonormal basis")?.transpose();
    LinMap::new(v, v, CMatrix::from_na(t))
}

/// Linear map fitted to `(input, output)` samples whose inputs span the domain.
///
/// Inputs are scanned in order and kept when independent of those already
/// kept; every other sample must then agree with the resulting map.
pub fn extend_from_subset(samples: &[(CMatrix, CMatrix)], domain: SpaceTag, codomain: SpaceTag, tol: f64) -> Result<LinMap> {
    let d = domain.span_dim();
    let e = codomain.span_dim();
    let mut x = DMatrix::<Scalar>::zeros(d, samples.len());
    let mut y = DMatrix::<Scalar>::zeros(e, samples.len());
    for (s, (a, b)) in samples.iter().enumerate() {
        for (i, z) in domain.coordinates(a, tol)?.into_iter().enumerate() {
            x[(i, s)] = z;
        }
        for (i, z) in codomain.coordinates(b, tol)?.into_iter().enumerate() {
            y[(i, s)] = z;
        }
    }
    let kept = linalg::independent_columns(&x, 1e-8);
    let xs = x.select_columns(&kept);
    let ys = y.select_columns(&kept);
    let mut worst: Option<(usize, f64)> = None;
    if !kept.is_empty() {
        for s in (0..samples.len()).filter(|s| !kept.contains(s)) {
            let coef = linalg::lstsq(&xs, &x.columns(s, 1).into_owned())?;
            let pred = &ys * coef;
            let actual = y.column(s);
            let res = (&pred - actual).norm() / actual.norm().max(1.0);
            if res > tol && worst.is_none_or(|(_, w)| res > w) {
                worst = Some((s, res));
            }
        }
    }
    if let Some((sample, residual)) = worst {
        return Err(Error::Inconsistent { sample, residual });
    }
    if kept.len() < d {
        return Err(Error::RankDeficient { rank: kept.len(), required: d });
    }
    // T xs = ys
    let t = linalg::solve(&xs.transpose(), &ys.transpose(), "sample basis")?.transpose();
    LinMap::new(domain, codomain, CMatrix::from_na(t))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfeasibilityCertificate {
    pub n: usize,
    pub k: usize,
    pub gram_lhs_rank: usize,
    pub gram_rhs_rank: usize,
    pub singular_values: Vec<f64>,
    pub valid: bool,
}

/// Relative singular-value cutoff for the certificate ranks.
pub const RANK_CUTOFF: f64 = 1e-9;

/// Ranks of `[tr(φ(B_i)ψ(B_j))]` and `[tr(B_i B_j)]` over the basis of `M_n`
/// for maps into `M_k`, `k < n`. The first is at most `k²`, so the pair
/// cannot preserve the trace pairing.
pub fn infeasibility_certificate(phi: &LinMap, psi: &LinMap) -> Result<InfeasibilityCertificate> {
    let (n, k) = shape_check(&[phi.clone(), psi.clone()])?;
    if n <= k {
        return Err(Error::NotApplicable(format!("certificate needs n > k, got n = {n}, k = {k}")));
    }
    let full = SpaceTag::full(n);
    let basis = space_basis(full).elements;
    let left: Vec<CMatrix> = basis.iter().map(|b| phi.apply_projected(b)).collect();
    let right: Vec<CMatrix> = basis.iter().map(|b| psi.apply_projected(b)).collect();
    let lhs = gram_matrix(&left, &right)?;
    let rhs = gram_matrix(&basis, &basis)?;
    let singular_values = linalg::singular_values(lhs.as_na());
    let gram_lhs_rank = linalg::rank_of_values(&singular_values, RANK_CUTOFF);
    let gram_rhs_rank = linalg::rank(rhs.as_na(), RANK_CUTOFF);
    Ok(InfeasibilityCertificate {
        n,
        k,
        gram_lhs_rank,
        gram_rhs_rank,
        singular_values,
        valid: gram_lhs_rank < gram_rhs_rank,
    })
}

fn full_coords_matrix(cols: &[CMatrix], space: SpaceTag) -> DMatrix<Scalar> {
    let d = space.span_dim();
    let mut out = DMatrix::<Scalar>::zeros(d, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, z) in space.coords(c).into_iter().enumerate() {
            out[(i, j)] = z;
        }
    }
    out
}

/// Basis of `{B ∈ M_k : tr(φ(A)B) = 0 for all A}`; Hermitian when
/// `hermitian` is set and `φ` preserves Hermitian matrices.
fn annihilator(phi: &LinMap, k: usize, hermitian: bool) -> Vec<CMatrix> {
    let n = phi.domain().n;
    if hermitian {
        let hk = SpaceTag::new(Kind::Hermitian, Field::Complex, k);
        let hb = space_basis(hk).elements;
        let hn = space_basis(SpaceTag::new(Kind::Hermitian, Field::Complex, n)).elements;
        let imgs: Vec<CMatrix> = hn.iter().map(|a| phi.apply_projected(a)).collect();
        let g = DMatrix::<f64>::from_fn(imgs.len(), hb.len(), |p, l| {
            trace_pair_unchecked(imgs[p].as_na(), hb[l].as_na()).re
        });
        let ns = linalg::null_space(&g, 1e-10);
        (0..ns.ncols())
            .map(|c| {
                let coords: Vec<Scalar> = ns.column(c).iter().map(|&x| re(x)).collect();
                hk.from_coords(&coords)
            })
            .collect()
    } else {
        let mk = SpaceTag::full(k);
        let kb = space_basis(mk).elements;
        let imgs = phi.basis_images();
        let g = DMatrix::<Scalar>::from_fn(imgs.len(), kb.len(), |p, l| trace_pair_unchecked(imgs[p].as_na(), kb[l].as_na()));
        let ns = linalg::null_space(&g, 1e-10);
        (0..ns.ncols())
            .map(|c| mk.from_coords(&ns.column(c).iter().copied().collect::<Vec<_>>()))
            .collect()
    }
}

/// Off-corner part of `M_k`: matrix units (or Hermitian units) outside the
/// leading `n×n` block.
fn off_corner_basis(n: usize, k: usize, hermitian: bool) -> Vec<CMatrix> {
    let outside = |i: usize, j: usize| i >= n || j >= n;
    if hermitian {
        space_basis(SpaceTag::new(Kind::Hermitian, Field::Complex, k))
            .elements
            .into_iter()
            .filter(|h| {
                let (i, j) = h.argmax_abs();
                outside(i, j)
            })
            .collect()
    } else {
        (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .filter(|&(i, j)| outside(i, j))
            .map(|(i, j)| CMatrix::unit(k, i, j))
            .collect()
    }
}

/// Extend a trace-pairing-preserving pair `M_n → M_k` (`n ≤ k`) to bijections
/// of `M_k` agreeing with the inputs on `A ⊕ 0_{k−n}`. Hermitian-preserving
/// inputs give Hermitian-preserving extensions.
pub fn embed_extend_pair(phi1: &LinMap, phi2: &LinMap, tol: f64) -> Result<(LinMap, LinMap)> {
    let (n, k) = shape_check(&[phi1.clone(), phi2.clone()])?;
    for f in [phi1, phi2] {
        if f.domain().span() != Span::Full || f.codomain().span() != Span::Full || f.domain().field != Field::Complex {
            return Err(Error::IncompatibleSpace(format!("extension needs complex full matrix spaces, got {} -> {}", f.domain(), f.codomain())));
        }
    }
    if n > k {
        return Err(Error::Infeasible(Box::new(infeasibility_certificate(phi1, phi2)?)));
    }
    let report = check_preservation(&[phi1.clone(), phi2.clone()], tol, Mode::Exhaustive)?;
    if !report.pass {
        return Err(Error::Precondition { reason: "pair does not preserve the trace pairing".into(), residual: report.max_residual });
    }
    let hermitian = phi1.is_hermitian_preserving(tol) && phi2.is_hermitian_preserving(tol);
    let c = off_corner_basis(n, k, hermitian);
    // φ̃₁ sends C̃ into the annihilator of φ₂, φ̃₂ sends it into that of φ₁.
    let e = annihilator(phi2, k, hermitian);
    let y1 = annihilator(phi1, k, hermitian);
    if e.len() != c.len() || y1.len() != c.len() {
        return Err(Error::TheoremViolated(format!(
            "annihilators have dimensions {} and {}, expected {}",
            e.len(),
            y1.len(),
            c.len()
        )));
    }
    let kmat = gram_matrix(&e, &y1)?;
    let gc = gram_matrix(&c, &c)?;
    // tr(Ẽ_i F̃_j) = tr(C̃_i C̃_j) with F̃ = Y₁ R.
    let r = linalg::solve(kmat.as_na(), gc.as_na(), "annihilator pairing")?;
    let f: Vec<CMatrix> = (0..c.len())
        .map(|j| {
            let mut acc = CMatrix::zeros(k, k);
            for (l, y) in y1.iter().enumerate() {
                let coef = if hermitian { re(r[(l, j)].re) } else { r[(l, j)] };
                acc = &acc + &y.scale(coef);
            }
            acc
        })
        .collect();

    let mk = SpaceTag::full(k);
    let corner: Vec<CMatrix> = space_basis(SpaceTag::full(n)).elements;
    let mut inputs: Vec<CMatrix> = corner.iter().map(|a| a.corner_embed(k)).collect();
    inputs.extend(c.iter().cloned());
    let input_coords = full_coords_matrix(&inputs, mk);

    let build = |phi: &LinMap, tail: &[CMatrix]| -> Result<LinMap> {
        let mut imgs: Vec<CMatrix> = phi.basis_images();
        imgs.extend(tail.iter().cloned());
        let img_coords = full_coords_matrix(&imgs, mk);
        let t = linalg::solve(&input_coords.transpose(), &img_coords.transpose(), "extension basis")?.transpose();
        LinMap::new(mk, mk, CMatrix::from_na(t))
    };
    Ok((build(phi1, &e)?, build(phi2, &f)?))
}

/// Joint least-squares test of `(BC ⊕ BC) Y = BC ⊕ BXCX*` over sampled
/// `(B, C)`: a common `Y` (the would-be image of the identity under an
/// extended third map) exists only for scalar `X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Obstruction {
    pub best_fit: CMatrix,
    pub pair_residuals: Vec<f64>,
    pub max_residual: f64,
}

pub fn nonextendable_obstruction(x: &CMatrix, pairs: &[(CMatrix, CMatrix)]) -> Result<Obstruction> {
    let n = x.rows();
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("need at least one (B, C) pair".into()));
    }
    let w = 2 * n;
    let mut lhs = DMatrix::<Scalar>::zeros(w * pairs.len(), w);
    let mut rhs = DMatrix::<Scalar>::zeros(w * pairs.len(), w);
    let xa = x.adjoint();
    let mut blocks = Vec::with_capacity(pairs.len());
    for (p, (b, c)) in pairs.iter().enumerate() {
        let bc = b.try_mul(c)?;
        let l = bc.direct_sum(&bc);
        let r = bc.direct_sum(&(&(&(b * x) * c) * &xa));
        lhs.view_mut((p * w, 0), (w, w)).copy_from(l.as_na());
        rhs.view_mut((p * w, 0), (w, w)).copy_from(r.as_na());
        blocks.push((l, r));
    }
    let y = CMatrix::from_na(linalg::lstsq(&lhs, &rhs)?);
    let pair_residuals: Vec<f64> = blocks
        .iter()
        .map(|(l, r)| (&(l * &y) - r).frobenius_norm() / r.frobenius_norm().max(f64::MIN_POSITIVE))
        .collect();
    let max_residual = pair_residuals.iter().copied().fold(0.0, f64::max);
    Ok(Obstruction { best_fit: y, pair_residuals, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superop::{from_canonical, CanonicalForm};

    fn m2() -> SpaceTag {
        SpaceTag::full(2)
    }

    #[test]
    fn identity_triple_passes() {
        let id = LinMap::identity(m2());
        let r = check_preservation(&[id.clone(), id.clone(), id], 1e-12, Mode::Exhaustive).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_residual, 0.0);
        assert_eq!(r.tuples_evaluated, 64);
    }

    #[test]
    fn scaling_fails_at_first_unit() {
        let two = LinMap::from_fn(m2(), m2(), |a| a.scale(re(2.0))).unwrap();
        let r = check_preservation(&[two, LinMap::identity(m2())], 1e-12, Mode::Exhaustive).unwrap();
        assert!(!r.pass);
        assert_eq!(r.max_residual, 1.0);
        assert_eq!(r.worst_tuple, vec![0, 0]);
    }

    #[test]
    fn too_few_maps() {
        assert!(check_preservation(&[LinMap::identity(m2())], 1e-9, Mode::Exhaustive).is_err());
    }

    #[test]
    fn dual_of_transpose_and_hadamard() {
        let t = LinMap::from_fn(m2(), m2(), CMatrix::transpose).unwrap();
        assert!(dualize(&t, 1e-9).unwrap().rel_distance(&t) < 1e-14);
        let c = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        let pair = from_canonical(&CanonicalForm::Hadamard { c }, m2()).unwrap();
        assert!(dualize(&pair[0], 1e-9).unwrap().rel_distance(&pair[1]) < 1e-14);
    }

    #[test]
    fn dual_of_singular_map_fails() {
        let proj = LinMap::from_fn(m2(), m2(), |a| CMatrix::from_diag(&a.diagonal())).unwrap();
        assert!(matches!(dualize(&proj, 1e-9), Err(Error::Singular { .. })));
    }

    #[test]
    fn subset_extension_examples() {
        let mut samples: Vec<_> = space_basis(m2()).elements.into_iter().map(|e| (e.clone(), e)).collect();
        samples.push((CMatrix::identity(2), CMatrix::identity(2)));
        let f = extend_from_subset(&samples, m2(), m2(), 1e-9).unwrap();
        assert!(f.rel_distance(&LinMap::identity(m2())) < 1e-14);

        let e11 = CMatrix::unit(1, 0, 0);
        let bad = vec![(e11.clone(), e11.clone()), (e11.scale(re(2.0)), e11.scale(re(3.0)))];
        let m1 = SpaceTag::full(1);
        assert!(matches!(extend_from_subset(&bad, m1, m1, 1e-9), Err(Error::Inconsistent { sample: 1, .. })));

        let few = vec![(CMatrix::unit(2, 0, 0), CMatrix::unit(2, 0, 0))];
        assert!(matches!(extend_from_subset(&few, m2(), m2(), 1e-9), Err(Error::RankDeficient { rank: 1, required: 4 })));
    }

    #[test]
    fn certificate_examples() {
        let m1 = SpaceTag::full(1);
        let corner = LinMap::from_fn(m2(), m1, |a| CMatrix::from_diag(&[a.get(0, 0)])).unwrap();
        let cert = infeasibility_certificate(&corner, &corner).unwrap();
        assert_eq!((cert.gram_lhs_rank, cert.gram_rhs_rank, cert.valid), (1, 4, true));
        let id = LinMap::identity(m2());
        assert!(matches!(infeasibility_certificate(&id, &id), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn scalar_extension_from_one_by_one() {
        let m1 = SpaceTag::full(1);
        let e = LinMap::from_fn(m1, m2(), |a| CMatrix::unit(2, 0, 0).scale(a.get(0, 0))).unwrap();
        let (f1, f2) = embed_extend_pair(&e, &e, 1e-9).unwrap();
        let r = check_preservation(&[f1.clone(), f2.clone()], 1e-9, Mode::Exhaustive).unwrap();
        assert!(r.pass, "{r:?}");
        let a = CMatrix::identity(1);
        assert!(f1.apply(&a.corner_embed(2)).unwrap().max_abs_diff(&e.apply(&a).unwrap()) < 1e-12);
        assert!(f1.is_hermitian_preserving(1e-9) && f2.is_hermitian_preserving(1e-9));
    }

    #[test]
    fn obstruction_vanishes_for_scalar_x() {
        let pairs = vec![
            (CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap(), CMatrix::from_real_rows(&[&[1.0, 0.0], &[3.0, 1.0]]).unwrap()),
            (CMatrix::from_real_rows(&[&[2.0, 0.0], &[1.0, 1.0]]).unwrap(), CMatrix::identity(2)),
        ];
        let o = nonextendable_obstruction(&CMatrix::identity(2).scale(re(2.0)), &pairs).unwrap();
        assert!(o.max_residual < 1e-12);
        let o = nonextendable_obstruction(&CMatrix::from_real_diag(&[1.0, 2.0]), &pairs).unwrap();
        assert!(o.max_residual > 1e-3);
    }
}
