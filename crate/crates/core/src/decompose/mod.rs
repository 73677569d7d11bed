//! Recovering canonical parameters from tuples of maps that preserve the
//! trace of products.
//!
//! Every decomposer checks the identity on a few random tuples first, reduces
//! to an algebra automorphism (or a rank-one congruence on symmetric spaces),
//! reads the parameters off, fixes the gauge, and finally rebuilds the maps to
//! report the relative transfer error.

pub mod conjugator;
pub mod weighted;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extend::{check_preservation, Mode};
use crate::families::sample_space;
use crate::linalg;
use crate::matlin::{Field, Kind, Span, SpaceTag};
use crate::matrix::{re, CMatrix, Scalar, ONE};
use crate::superop::{from_canonical, orthogonality_deviation, permutation_matrix, unitarity_deviation, CanonicalForm, LinMap};

pub use conjugator::{detect_branch, recover_conjugator, Branch, BranchTest};

/// Random tuples tried before decomposing.
pub const PRECHECK_TRIALS: usize = 32;
const PRECHECK_SEED: u64 = 0x7ace;
/// The precheck only screens out maps that plainly fail the identity, so it
/// never runs tighter than this.
pub const PRECHECK_FLOOR: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub form: CanonicalForm,
    pub space: SpaceTag,
    pub reconstruction_residual: f64,
    pub gauge_note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    #[serde(default)]
    pub diagnostics: BTreeMap<String, f64>,
}

fn common_space(maps: &[LinMap]) -> Result<SpaceTag> {
    let first = maps.first().ok_or_else(|| Error::InvalidParameter("no maps given".into()))?;
    let space = first.domain();
    for (i, f) in maps.iter().enumerate() {
        if !f.domain().same_span(&space) || !f.codomain().same_span(&space) {
            return Err(Error::IncompatibleSpace(format!(
                "map {} is {} -> {}, expected a map of {space} into itself",
                i + 1,
                f.domain(),
                f.codomain()
            )));
        }
    }
    Ok(space)
}

fn precheck(maps: &[LinMap], tol: f64) -> Result<()> {
    let mode = Mode::Randomized { trials: PRECHECK_TRIALS, seed: PRECHECK_SEED };
    let r = check_preservation(maps, tol.max(PRECHECK_FLOOR), mode)?;
    if r.pass {
        Ok(())
    } else {
        Err(Error::Precondition { reason: "maps do not preserve the trace of products".into(), residual: r.max_residual })
    }
}

fn as_violation(e: Error) -> Error {
    match e {
        Error::InvalidParameter(msg) => Error::TheoremViolated(format!("recovered parameters are invalid: {msg}")),
        Error::Singular { what, condition } => {
            Error::TheoremViolated(format!("recovered {what} is singular (condition number {condition:.3e})"))
        }
        other => other,
    }
}

fn finish(
    form: CanonicalForm,
    space: SpaceTag,
    maps: &[LinMap],
    tol: f64,
    gauge_note: &str,
    branch: Option<Branch>,
    diagnostics: BTreeMap<String, f64>,
) -> Result<DecompositionResult> {
    let rebuilt = from_canonical(&form, space).map_err(as_violation)?;
    let residual = maps.iter().zip(&rebuilt).map(|(f, g)| f.rel_distance(g)).fold(0.0, f64::max);
    if !(residual <= tol) {
        return Err(Error::TheoremViolated(format!(
            "{} reconstruction is off by {residual:.3e} (tolerance {tol:.1e})",
            form.tag()
        )));
    }
    Ok(DecompositionResult { form, space, reconstruction_residual: residual, gauge_note: gauge_note.into(), branch, diagnostics })
}

fn inverse_of_image(f: &LinMap, what: &str) -> Result<(CMatrix, CMatrix)> {
    let n = f.domain().n;
    let img = f.apply_projected(&CMatrix::identity(n));
    let cond = img.condition_number();
    if !(cond < 1e12) {
        return Err(Error::TheoremViolated(format!("{what} is singular (condition number {cond:.3e})")));
    }
    let inv = img.inverse()?;
    Ok((img, inv))
}

fn real_parts(mats: &mut [CMatrix], diagnostics: &mut BTreeMap<String, f64>) {
    let imag = mats.iter().map(CMatrix::max_imag).fold(0.0, f64::max);
    diagnostics.insert("discarded_imaginary_part".into(), imag);
    for m in mats.iter_mut() {
        *m = m.real_part();
    }
}

fn scalar_product_deviation(c: impl Iterator<Item = Scalar>) -> f64 {
    (c.product::<Scalar>() - ONE).norm()
}

/// Least-squares scalars `c_i` with `T_i ≈ c_i S_i` on transfer matrices.
fn fit_scalars(maps: &[LinMap], base: &[LinMap]) -> Vec<Scalar> {
    maps.iter()
        .zip(base)
        .map(|(t, s)| {
            let (t, s) = (t.transfer().as_na(), s.transfer().as_na());
            let num: Scalar = s.iter().zip(t.iter()).map(|(a, b)| a.conj() * b).sum();
            num / s.norm_squared()
        })
        .collect()
}

/// `φ_i(A) = N_i A N_{i+1}⁻¹` on `M_n`, `m ≥ 3`.
pub fn decompose_mn_chain(maps: &[LinMap], tol: f64) -> Result<DecompositionResult> {
    let space = common_space(maps)?;
    if space.span() != Span::Full {
        return Err(Error::IncompatibleSpace(format!("chain decomposition needs a full matrix space, got {space}")));
    }
    let m = maps.len();
    if m < 3 {
        return Err(Error::NotApplicable("pairs on full matrix spaces have no chain form; use the dual map".into()));
    }
    precheck(maps, tol)?;
    let invs = maps
        .iter()
        .enumerate()
        .map(|(i, f)| inverse_of_image(f, &format!("φ_{}(I)", i + 1)).map(|p| p.1))
        .collect::<Result<Vec<_>>>()?;
    // φ̂₂(A) = φ₂(A) φ₂(I)⁻¹ = N₂ A N₂⁻¹
    let hat = LinMap::from_fn(space, space, |a| &maps[1].apply_projected(a) * &invs[1])?;
    let test = detect_branch(&hat);
    if test.branch == Branch::AntiAutomorphism {
        return Err(Error::TheoremViolated("normalized second map reverses products".into()));
    }
    let (n2, conj_res) = recover_conjugator(&hat, Branch::Automorphism, tol)?;
    let mut ns = vec![CMatrix::zeros(space.n, space.n); m];
    ns[1] = n2;
    for i in 1..m {
        ns[(i + 1) % m] = &invs[i] * &ns[i];
    }
    let (_, f) = conjugator::gauge_normalize(&ns[0]);
    ns.iter_mut().for_each(|x| *x = x.scale(f));
    let mut diagnostics = BTreeMap::from([
        ("conjugator_residual".to_string(), conj_res),
        ("branch_residual".to_string(), test.winning_residual()),
    ]);
    if space.field == Field::Real {
        real_parts(&mut ns, &mut diagnostics);
    }
    finish(
        CanonicalForm::MnChain { n: ns },
        space,
        maps,
        tol,
        "common scale on all N_i: ||N_1||_F = 1, largest entry of N_1 real positive",
        Some(Branch::Automorphism),
        diagnostics,
    )
}

fn hermitian_core(maps: &[LinMap], space: SpaceTag, tol: f64, positive: bool) -> Result<DecompositionResult> {
    let n = space.n;
    let m = maps.len();
    let full = SpaceTag::full(n);
    let cx = maps.iter().map(LinMap::complexify).collect::<Result<Vec<_>>>()?;
    let (_, inv1) = inverse_of_image(&cx[0], "φ_1(I)")?;
    // φ₁(A) = c₁M*AM gives φ₁(I)⁻¹φ₁(A) = M⁻¹AM.
    let hat = LinMap::from_fn(full, full, |a| &inv1 * &cx[0].apply_projected(a))?;
    let test = detect_branch(&hat);
    if test.branch == Branch::AntiAutomorphism {
        return Err(Error::TheoremViolated("transpose congruences cannot preserve products of three or more".into()));
    }
    let (nm, conj_res) = recover_conjugator(&hat, Branch::Automorphism, tol)?;
    let mmat = nm.inverse()?;
    let mut diagnostics = BTreeMap::from([
        ("conjugator_residual".to_string(), conj_res),
        ("branch_residual".to_string(), test.winning_residual()),
    ]);
    let ones = vec![1.0; m];
    let (shape, note): (CanonicalForm, &str) = if m % 2 == 1 {
        let scale = ((&mmat.adjoint() * &mmat).trace().re / n as f64).sqrt();
        let (u, _) = conjugator::phase_normalize(&mmat.scale(re(1.0 / scale)));
        let dev = unitarity_deviation(&u);
        diagnostics.insert("unitarity_deviation".into(), dev);
        if dev > tol {
            return Err(Error::TheoremViolated(format!("conjugating matrix is not unitary (deviation {dev:.3e})")));
        }
        (CanonicalForm::HermOdd { u, c: ones }, "largest entry of U real positive")
    } else {
        let (mg, _) = conjugator::gauge_normalize(&mmat);
        (CanonicalForm::HermEven { m: mg, c: ones }, "||M||_F = 1, largest entry of M real positive; scale absorbed into c")
    };
    let base = from_canonical(&shape, space).map_err(as_violation)?;
    let c: Vec<f64> = fit_scalars(maps, &base).into_iter().map(|z| z.re).collect();
    diagnostics.insert("scalar_product_deviation".into(), scalar_product_deviation(c.iter().map(|&x| re(x))));
    if positive && c.iter().any(|&x| x <= 0.0) {
        return Err(Error::TheoremViolated(format!("scalars must be positive on positive definite matrices, got {c:?}")));
    }
    let form = match shape {
        CanonicalForm::HermOdd { u, .. } => CanonicalForm::HermOdd { u, c },
        CanonicalForm::HermEven { m, .. } => CanonicalForm::HermEven { m, c },
        _ => unreachable!(),
    };
    finish(form, space, maps, tol, note, Some(Branch::Automorphism), diagnostics)
}

/// `φ_i(A) = c_i U*AU` (odd `m`) or alternating `c_i M*AM`, `c_i M⁻¹AM⁻*`
/// (even `m`) on complex Hermitian matrices, `m ≥ 3`.
pub fn decompose_hermitian(maps: &[LinMap], tol: f64) -> Result<DecompositionResult> {
    let space = common_space(maps)?;
    if space.span() != Span::Hermitian {
        return Err(Error::IncompatibleSpace(format!("Hermitian decomposition needs a complex Hermitian space, got {space}")));
    }
    if maps.len() < 3 {
        return Err(Error::NotApplicable("Hermitian pairs are classified by their dual maps, not a chain form".into()));
    }
    precheck(maps, tol)?;
    hermitian_core(maps, space, tol, false)
}

/// `J = φ₃(φ₂⁻¹(I))` must satisfy `φ₃(C) = ½(Jφ₂(C) + φ₂(C)J)`; returns the
/// largest relative violation over the basis.
fn symmetric_triple_relation(maps: &[LinMap]) -> Result<f64> {
    let space = maps[1].domain();
    let n = space.n;
    let t2 = maps[1].transfer().as_na();
    let id = nalgebra::DMatrix::from_column_slice(space.span_dim(), 1, &space.coords(&CMatrix::identity(n)));
    let pre = linalg::solve(t2, &id, "φ_2 transfer")?;
    let pre_mat = space.from_coords(pre.as_slice());
    let j = maps[2].apply_projected(&pre_mat);
    let mut worst: f64 = 0.0;
    for b in crate::matlin::space_basis(space).elements {
        let p2 = maps[1].apply_projected(&b);
        let p3 = maps[2].apply_projected(&b);
        let rhs = (&(&j * &p2) + &(&p2 * &j)).scale(re(0.5));
        worst = worst.max((&p3 - &rhs).frobenius_norm() / p3.frobenius_norm().max(1e-300));
    }
    Ok(worst)
}

fn symmetric_core(maps: &[LinMap], space: SpaceTag, tol: f64, positive: bool) -> Result<DecompositionResult> {
    let n = space.n;
    let m = maps.len();
    let rows = conjugator::recover_congruence_rows(&maps[0])?;
    let mut diagnostics = BTreeMap::new();
    let real = space.field == Field::Real;
    let ones = vec![re(1.0); m];
    let (shape, note): (CanonicalForm, &str) = if m % 2 == 1 {
        let s = ((&rows.transpose() * &rows).trace() / n as f64).sqrt();
        let mut o = rows.scale(ONE / s);
        let (i, j) = o.argmax_abs();
        if o.get(i, j).re < 0.0 {
            o = o.scale(re(-1.0));
        }
        if real {
            let mut v = [o];
            real_parts(&mut v, &mut diagnostics);
            [o] = v;
        }
        let dev = orthogonality_deviation(&o);
        diagnostics.insert("orthogonality_deviation".into(), dev);
        if dev > tol {
            return Err(Error::TheoremViolated(format!("congruence matrix is not orthogonal (deviation {dev:.3e})")));
        }
        (CanonicalForm::SymOdd { o, c: ones }, "sign of O fixed so its largest entry has positive real part")
    } else {
        let (mut mg, _) = conjugator::gauge_normalize(&rows);
        if real {
            let mut v = [mg];
            real_parts(&mut v, &mut diagnostics);
            [mg] = v;
        }
        (CanonicalForm::SymEven { m: mg, c: ones }, "||M||_F = 1, largest entry of M real positive; scale absorbed into c")
    };
    let base = from_canonical(&shape, space).map_err(as_violation)?;
    let mut c = fit_scalars(maps, &base);
    if real {
        let imag = c.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        diagnostics.insert("discarded_scalar_imaginary_part".into(), imag);
        c.iter_mut().for_each(|z| *z = re(z.re));
    }
    diagnostics.insert("scalar_product_deviation".into(), scalar_product_deviation(c.iter().copied()));
    if positive && c.iter().any(|z| z.re <= 0.0 || z.im.abs() > tol) {
        return Err(Error::TheoremViolated(format!("scalars must be positive on positive definite matrices, got {c:?}")));
    }
    if m == 3 {
        diagnostics.insert("triple_relation_residual".into(), symmetric_triple_relation(maps)?);
    }
    let form = match shape {
        CanonicalForm::SymOdd { o, .. } => CanonicalForm::SymOdd { o, c },
        CanonicalForm::SymEven { m, .. } => CanonicalForm::SymEven { m, c },
        _ => unreachable!(),
    };
    finish(form, space, maps, tol, note, None, diagnostics)
}

/// `φ_i(A) = c_i OᵗAO` (odd `m`, `O` orthogonal) or alternating
/// `c_i MᵗAM`, `c_i M⁻¹AM⁻ᵗ` (even `m`) on symmetric matrices, `m ≥ 3`.
/// Over the reals all parameters come out real.
pub fn decompose_symmetric(maps: &[LinMap], tol: f64) -> Result<DecompositionResult> {
    let space = common_space(maps)?;
    if space.span() != Span::Symmetric {
        return Err(Error::IncompatibleSpace(format!("symmetric decomposition needs a symmetric space, got {space}")));
    }
    if maps.len() < 3 {
        return Err(Error::NotApplicable("symmetric pairs are classified by their dual maps, not a chain form".into()));
    }
    precheck(maps, tol)?;
    symmetric_core(maps, space, tol, false)
}

fn require_positive_cone(space: SpaceTag) -> Result<()> {
    if matches!(space.kind, Kind::PosDef | Kind::PosSemiDef) {
        Ok(())
    } else {
        Err(Error::IncompatibleSpace(format!("expected maps on positive definite matrices, got {space}")))
    }
}

fn check_positive_outputs(maps: &[LinMap], space: SpaceTag) -> Result<()> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(PRECHECK_SEED);
    let pd = SpaceTag::new(Kind::PosDef, space.field, space.n);
    for _ in 0..PRECHECK_TRIALS {
        let a = sample_space(pd, &mut rng);
        for (i, f) in maps.iter().enumerate() {
            let img = f.apply_projected(&a);
            let lo = linalg::hermitian_eigenvalues(&img)[0];
            if lo < -PRECHECK_FLOOR * img.max_abs().max(1.0) {
                return Err(Error::Precondition {
                    reason: format!("map {} sends a positive definite matrix outside the positive semidefinite cone", i + 1),
                    residual: -lo,
                });
            }
        }
    }
    Ok(())
}

/// `φ(A) = M*AM`, `ψ(A) = M⁻¹AM⁻*`, possibly with `A` replaced by `Aᵗ`, on
/// positive definite matrices. Over the reals the transpose is invisible and
/// `M` is real.
pub fn decompose_pn_pair(phi: &LinMap, psi: &LinMap, tol: f64) -> Result<DecompositionResult> {
    let maps = [phi.clone(), psi.clone()];
    let space = common_space(&maps)?;
    require_positive_cone(space)?;
    let r = check_preservation(&maps, tol.max(PRECHECK_FLOOR), Mode::Exhaustive)?;
    if !r.pass {
        return Err(Error::Precondition { reason: "pair does not preserve the trace pairing".into(), residual: r.max_residual });
    }
    precheck(&maps, tol)?;
    check_positive_outputs(&maps, space)?;

    if space.field == Field::Real {
        let sym = symmetric_core(&maps, space, tol, true)?;
        let CanonicalForm::SymEven { m, c } = sym.form else { unreachable!("m = 2 is even") };
        let mp = m.scale(re(c[0].re.sqrt()));
        let mut diagnostics = sym.diagnostics;
        diagnostics.insert("m_unitarity_deviation".into(), unitarity_deviation(&mp));
        return finish(
            CanonicalForm::PnPair { m: mp, transpose: false },
            space,
            &maps,
            tol,
            "largest entry of M/sqrt(c_1) positive; M absorbs the scalars",
            Some(Branch::Automorphism),
            diagnostics,
        );
    }

    let n = space.n;
    let p = phi.apply_projected(&CMatrix::identity(n));
    let lo = linalg::hermitian_eigenvalues(&p)[0];
    if !(lo > tol * p.max_abs().max(1.0)) {
        return Err(Error::TheoremViolated(format!("φ(I) is not positive definite (smallest eigenvalue {lo:.3e})")));
    }
    let s = linalg::hermitian_fn(&p, f64::sqrt);
    let sinv = linalg::hermitian_fn(&p, |x| 1.0 / x.sqrt());
    let full = SpaceTag::full(n);
    let cx = phi.complexify()?;
    // φ(A) = M*AM with M = US gives S⁻¹φ(A)S⁻¹ = U*AU.
    let unital = LinMap::from_fn(full, full, |a| &(&sinv * &cx.apply_projected(a)) * &sinv)?;
    let test = detect_branch(&unital);
    let (nm, conj_res) = recover_conjugator(&unital, test.branch, tol)?;
    let ua = nm.adjoint();
    let u = ua.scale(re(1.0 / ((&nm * &ua).trace().re / n as f64).sqrt()));
    let (mmat, _) = conjugator::phase_normalize(&(&u * &s));
    let diagnostics = BTreeMap::from([
        ("conjugator_residual".to_string(), conj_res),
        ("branch_residual".to_string(), test.winning_residual()),
        ("u_unitarity_deviation".to_string(), unitarity_deviation(&u)),
        ("m_unitarity_deviation".to_string(), unitarity_deviation(&mmat)),
    ]);
    finish(
        CanonicalForm::PnPair { m: mmat, transpose: test.branch == Branch::AntiAutomorphism },
        space,
        &maps,
        tol,
        "M = U phi(I)^(1/2) with the largest entry of M real positive",
        Some(test.branch),
        diagnostics,
    )
}

/// Chains on positive definite matrices: positive scalars with unitary or
/// congruence parameters (`m ≥ 3`), or over the reals orthogonal or real
/// congruence parameters (`m ≥ 2`).
pub fn decompose_pn_chain(maps: &[LinMap], tol: f64) -> Result<DecompositionResult> {
    let space = common_space(maps)?;
    require_positive_cone(space)?;
    let min_m = if space.field == Field::Real { 2 } else { 3 };
    if maps.len() < min_m {
        return Err(Error::NotApplicable(format!("need at least {min_m} maps on {space}")));
    }
    precheck(maps, tol)?;
    check_positive_outputs(maps, space)?;
    match space.field {
        Field::Complex => hermitian_core(maps, space, tol, true),
        Field::Real => symmetric_core(maps, space, tol, true),
    }
}

/// `φ₁ = diag ∘ N ∘ diag⁻¹`, `φ₂ = diag ∘ N⁻ᵗ ∘ diag⁻¹` on diagonal matrices.
pub fn decompose_diag_pair(phi: &LinMap, psi: &LinMap, tol: f64) -> Result<DecompositionResult> {
    let maps = [phi.clone(), psi.clone()];
    let space = common_space(&maps)?;
    if space.span() != Span::Diagonal {
        return Err(Error::IncompatibleSpace(format!("expected diagonal matrices, got {space}")));
    }
    let r = check_preservation(&maps, tol.max(PRECHECK_FLOOR), Mode::Exhaustive)?;
    if !r.pass {
        return Err(Error::Precondition { reason: "pair does not preserve the trace pairing".into(), residual: r.max_residual });
    }
    let nm = phi.transfer().clone();
    let cond = nm.condition_number();
    if !(cond < 1e12) {
        return Err(Error::TheoremViolated(format!("transfer of φ is singular (condition number {cond:.3e})")));
    }
    let dual_dev = psi.transfer().rel_diff(&nm.inverse()?.transpose());
    let diagnostics = BTreeMap::from([("dual_transfer_deviation".to_string(), dual_dev)]);
    finish(CanonicalForm::DiagPair { n: nm }, space, &maps, tol, "N is the transfer matrix of the first map; no gauge freedom", None, diagnostics)
}

/// `φ_i(A) = C_i PᵗAP` on diagonal matrices, `m ≥ 3`.
pub fn decompose_diag_chain(maps: &[LinMap], tol: f64) -> Result<DecompositionResult> {
    let space = common_space(maps)?;
    if space.span() != Span::Diagonal {
        return Err(Error::IncompatibleSpace(format!("expected diagonal matrices, got {space}")));
    }
    if maps.len() < 3 {
        return Err(Error::NotApplicable("diagonal pairs have the DiagPair form".into()));
    }
    precheck(maps, tol)?;
    let n = space.n;
    let (_, inv1) = inverse_of_image(&maps[0], "φ_1(I)")?;
    let mut sigma = Vec::with_capacity(n);
    let mut unit_dev: f64 = 0.0;
    for i in 0..n {
        let x = &maps[0].apply_projected(&CMatrix::unit(n, i, i)) * &inv1;
        let j = (0..n).max_by(|&a, &b| x.get(a, a).norm().total_cmp(&x.get(b, b).norm())).expect("n >= 1");
        let dev = x.max_abs_diff(&CMatrix::unit(n, j, j));
        if dev > tol {
            return Err(Error::TheoremViolated(format!("normalized image of E_{0}{0} is not a diagonal unit (deviation {dev:.3e})", i + 1)));
        }
        unit_dev = unit_dev.max(dev);
        sigma.push(j);
    }
    let mut seen = vec![false; n];
    for &j in &sigma {
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::TheoremViolated("diagonal units are not permuted bijectively".into()));
        }
    }
    let p = permutation_matrix(&sigma);
    let mut cs: Vec<CMatrix> = maps.iter().map(|f| CMatrix::from_diag(&f.apply_projected(&CMatrix::identity(n)).diagonal())).collect();
    let mut diagnostics = BTreeMap::from([("unit_deviation".to_string(), unit_dev)]);
    if space.field == Field::Real {
        real_parts(&mut cs, &mut diagnostics);
    }
    let prod = cs.iter().fold(CMatrix::identity(n), |acc, c| &acc * c);
    let prod_dev = prod.max_abs_diff(&CMatrix::identity(n));
    diagnostics.insert("product_deviation".into(), prod_dev);
    if prod_dev > tol {
        return Err(Error::TheoremViolated(format!("product of the C_i differs from I by {prod_dev:.3e}")));
    }
    finish(CanonicalForm::DiagChain { p, c: cs }, space, maps, tol, "C_i = phi_i(I); no gauge freedom", None, diagnostics)
}

/// Pick the decomposer from the domain of the maps and their number.
pub fn decompose(maps: &[LinMap], tol: f64) -> Result<DecompositionResult> {
    let space = common_space(maps)?;
    let m = maps.len();
    match (space.kind, space.span()) {
        (Kind::PosDef | Kind::PosSemiDef, _) if m == 2 => decompose_pn_pair(&maps[0], &maps[1], tol),
        (Kind::PosDef | Kind::PosSemiDef, _) => decompose_pn_chain(maps, tol),
        (_, Span::Full) => decompose_mn_chain(maps, tol),
        (_, Span::Hermitian) => decompose_hermitian(maps, tol),
        (_, Span::Symmetric) => decompose_symmetric(maps, tol),
        (_, Span::Diagonal) if m == 2 => decompose_diag_pair(&maps[0], &maps[1], tol),
        (_, Span::Diagonal) => decompose_diag_chain(maps, tol),
    }
}

/// Rank of the realigned transfer matrix of a map on `M_n`.
///
/// `A ↦ XAY` has transfer entries `X_pq Y_sr` at row `(p, r)` and column
/// `(q, s)`; regrouping rows as `(p, q)` and columns as `(r, s)` gives the
/// rank-one matrix `vec(X) vec(Yᵗ)ᵗ`. Rank above one rules out every two-sided
/// multiplication, in particular every chain map.
pub fn operator_schmidt_rank(phi: &LinMap, rel_cutoff: f64) -> Result<usize> {
    let (d, c) = (phi.domain(), phi.codomain());
    if d.span() != Span::Full || c.span() != Span::Full || d.n != c.n {
        return Err(Error::IncompatibleSpace(format!("realignment needs a map on a full matrix space, got {d} -> {c}")));
    }
    let n = d.n;
    let t = phi.transfer();
    let r = nalgebra::DMatrix::<Scalar>::from_fn(n * n, n * n, |row, col| {
        let (p, q) = (row / n, row % n);
        let (r_, s) = (col / n, col % n);
        t.get(p * n + r_, q * n + s)
    });
    Ok(linalg::rank(&r, rel_cutoff))
}
