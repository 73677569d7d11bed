//! Linear maps between matrix spaces, stored as transfer matrices in the
//! canonical-basis coordinates of their domain and codomain, and the
//! canonical parameterizations that realize trace-of-products preservers.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matlin::{space_basis, Field, Kind, Span, SpaceTag, DEFAULT_TOL};
use crate::matrix::{re, CMatrix, Scalar, I, ONE};

/// Tolerance for canonical-form invariants (unitarity, `Πc_i = 1`, ...).
pub const FORM_TOL: f64 = 1e-8;

/// Parameter matrices with a larger condition number are rejected.
pub const MAX_CONDITION: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLinMap")]
pub struct LinMap {
    domain: SpaceTag,
    codomain: SpaceTag,
    transfer: CMatrix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLinMap {
    domain: SpaceTag,
    codomain: SpaceTag,
    transfer: CMatrix,
}

impl TryFrom<RawLinMap> for LinMap {
    type Error = Error;
    fn try_from(r: RawLinMap) -> Result<Self> {
        LinMap::new(r.domain, r.codomain, r.transfer)
    }
}

impl LinMap {
    /// Wrap a transfer matrix of shape `span_dim(codomain) × span_dim(domain)`.
    /// Real-coordinate spaces require a real transfer matrix.
    pub fn new(domain: SpaceTag, codomain: SpaceTag, transfer: CMatrix) -> Result<Self> {
        if transfer.rows() != codomain.span_dim() || transfer.cols() != domain.span_dim() {
            return Err(Error::dim(format!(
                "transfer is {}x{}, {domain} -> {codomain} needs {}x{}",
                transfer.rows(),
                transfer.cols(),
                codomain.span_dim(),
                domain.span_dim()
            )));
        }
        if !transfer.is_finite() {
            return Err(Error::InvalidParameter("transfer has non-finite entries".into()));
        }
        let real = domain.coordinate_field() == Field::Real || codomain.coordinate_field() == Field::Real;
        if domain.coordinate_field() != codomain.coordinate_field() {
            return Err(Error::IncompatibleSpace(format!(
                "{domain} and {codomain} have coordinates over different fields"
            )));
        }
        let transfer = if real {
            if transfer.max_imag() > 1e-12 * transfer.max_abs().max(1.0) {
                return Err(Error::InvalidParameter("transfer between real-coordinate spaces must be real".into()));
            }
            transfer.real_part()
        } else {
            transfer
        };
        Ok(Self { domain, codomain, transfer })
    }

    /// Build the map by evaluating `f` on the domain basis.
    pub fn from_fn(domain: SpaceTag, codomain: SpaceTag, f: impl Fn(&CMatrix) -> CMatrix) -> Result<Self> {
        let basis = space_basis(domain);
        let d = basis.len();
        let e = codomain.span_dim();
        let mut t = DMatrix::<Scalar>::zeros(e, d);
        for (j, b) in basis.elements.iter().enumerate() {
            let img = f(b);
            let c = codomain.coordinates(&img, FORM_TOL)?;
            for (i, z) in c.into_iter().enumerate() {
                t[(i, j)] = z;
            }
        }
        Self::new(domain, codomain, CMatrix::from_na(t))
    }

    pub fn identity(space: SpaceTag) -> Self {
        let d = space.span_dim();
        Self { domain: space, codomain: space, transfer: CMatrix::identity(d) }
    }

    pub fn domain(&self) -> SpaceTag {
        self.domain
    }

    pub fn codomain(&self) -> SpaceTag {
        self.codomain
    }

    pub fn transfer(&self) -> &CMatrix {
        &self.transfer
    }

    /// Same transfer matrix, retagged to spaces with the same spans.
    pub fn retag(&self, domain: SpaceTag, codomain: SpaceTag) -> Result<Self> {
        if !domain.same_span(&self.domain) || !codomain.same_span(&self.codomain) {
            return Err(Error::IncompatibleSpace(format!(
                "cannot retag {} -> {} as {domain} -> {codomain}",
                self.domain, self.codomain
            )));
        }
        Ok(Self { domain, codomain, transfer: self.transfer.clone() })
    }

    pub fn apply_coords(&self, c: &[Scalar]) -> Vec<Scalar> {
        let t = self.transfer.as_na();
        (0..t.nrows()).map(|i| (0..t.ncols()).map(|j| t[(i, j)] * c[j]).sum()).collect()
    }

    /// Apply to a matrix in the span of the domain.
    pub fn apply(&self, a: &CMatrix) -> Result<CMatrix> {
        let c = self.domain.coordinates(a, DEFAULT_TOL)?;
        Ok(self.codomain.from_coords(&self.apply_coords(&c)))
    }

    /// Apply to the projection of `a` onto the domain span.
    pub fn apply_projected(&self, a: &CMatrix) -> CMatrix {
        self.codomain.from_coords(&self.apply_coords(&self.domain.coords(a)))
    }

    /// Images of the canonical domain basis.
    pub fn basis_images(&self) -> Vec<CMatrix> {
        let t = self.transfer.as_na();
        (0..t.ncols())
            .map(|j| {
                let col: Vec<Scalar> = t.column(j).iter().copied().collect();
                self.codomain.from_coords(&col)
            })
            .collect()
    }

    /// `f ∘ g`.
    pub fn compose(f: &LinMap, g: &LinMap) -> Result<LinMap> {
        if !f.domain.same_span(&g.codomain) {
            return Err(Error::dim(format!("cannot compose {} -> {} after {} -> {}", f.domain, f.codomain, g.domain, g.codomain)));
        }
        LinMap::new(g.domain, f.codomain, &f.transfer * &g.transfer)
    }

    /// Whether the map sends every Hermitian matrix of its domain to a
    /// Hermitian matrix.
    pub fn is_hermitian_preserving(&self, tol: f64) -> bool {
        let herm = SpaceTag::new(Kind::Hermitian, self.domain.field, self.domain.n);
        for b in space_basis(herm).elements {
            if self.domain.span_deviation(&b) > 0.0 {
                continue;
            }
            let img = self.apply_projected(&b);
            if img.max_abs_diff(&img.adjoint()) > tol * img.max_abs().max(1.0) {
                return false;
            }
        }
        true
    }

    /// Restrict to a subspace of the domain, landing in `codomain`.
    pub fn restrict(&self, domain: SpaceTag, codomain: SpaceTag) -> Result<LinMap> {
        for b in space_basis(domain).elements {
            let dev = self.domain.span_deviation(&b);
            if dev > 0.0 {
                return Err(Error::IncompatibleSpace(format!("{domain} is not contained in {}", self.domain)));
            }
        }
        LinMap::from_fn(domain, codomain, |a| self.apply_projected(a))
    }

    /// Extend real-linearly to the complex span: `φ̃(P + iQ) = φ(P) + iφ(Q)`.
    pub fn complexify(&self) -> Result<LinMap> {
        fn lift(s: SpaceTag) -> SpaceTag {
            match s.span() {
                Span::Hermitian => SpaceTag::new(Kind::FullMatrix, Field::Complex, s.n),
                Span::Symmetric => SpaceTag::new(Kind::Symmetric, Field::Complex, s.n),
                Span::Full => SpaceTag::new(Kind::FullMatrix, Field::Complex, s.n),
                Span::Diagonal => SpaceTag::new(Kind::Diagonal, Field::Complex, s.n),
            }
        }
        if self.domain.coordinate_field() == Field::Complex {
            return Ok(self.clone());
        }
        let dom = self.domain;
        let split = move |a: &CMatrix| -> (CMatrix, CMatrix) {
            if dom.span() == Span::Hermitian {
                let p = (a + &a.adjoint()).scale(re(0.5));
                let q = (a - &a.adjoint()).scale(Scalar::new(0.0, -0.5));
                (p, q)
            } else {
                (a.real_part(), a.conj().scale(Scalar::new(0.0, 0.5)) + a.scale(Scalar::new(0.0, -0.5)))
            }
        };
        LinMap::from_fn(lift(self.domain), lift(self.codomain), |a| {
            let (p, q) = split(a);
            &self.apply_projected(&p) + &self.apply_projected(&q).scale(I)
        })
    }

    /// Relative Frobenius distance between transfer matrices.
    pub fn rel_distance(&self, other: &LinMap) -> f64 {
        other.transfer.rel_diff(&self.transfer)
    }
}

/// Explicit parameterizations of trace-of-products preservers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", content = "params")]
pub enum CanonicalForm {
    /// `φ_i(A) = N_i A N_{i+1}^{-1}`, `N_{m+1} = N_1`.
    MnChain {
        #[serde(rename = "N")]
        n: Vec<CMatrix>,
    },
    /// `φ_i(A) = c_i U*AU`.
    HermOdd {
        #[serde(rename = "U")]
        u: CMatrix,
        c: Vec<f64>,
    },
    /// `c_i M*AM` for odd `i`, `c_i M⁻¹AM⁻*` for even `i`.
    HermEven {
        #[serde(rename = "M")]
        m: CMatrix,
        c: Vec<f64>,
    },
    /// `φ(A) = M*AM`, `ψ(A) = M⁻¹AM⁻*`, with `A` replaced by `Aᵗ` when `transpose`.
    PnPair {
        #[serde(rename = "M")]
        m: CMatrix,
        transpose: bool,
    },
    /// `φ_i(A) = c_i OᵗAO`.
    SymOdd {
        #[serde(rename = "O")]
        o: CMatrix,
        c: Vec<Scalar>,
    },
    /// `c_i MᵗAM` for odd `i`, `c_i M⁻¹AM⁻ᵗ` for even `i`.
    SymEven {
        #[serde(rename = "M")]
        m: CMatrix,
        c: Vec<Scalar>,
    },
    /// `φ₁(A) = diag(N diag⁻¹(A))`, `φ₂(A) = diag(N⁻ᵗ diag⁻¹(A))`.
    DiagPair {
        #[serde(rename = "N")]
        n: CMatrix,
    },
    /// `φ_i(A) = C_i PᵗAP`.
    DiagChain {
        #[serde(rename = "P")]
        p: CMatrix,
        #[serde(rename = "C")]
        c: Vec<CMatrix>,
    },
    /// `φ(A) = A∘C`, `ψ(A) = A∘Ĉ` with `Ĉ_ij = 1/C_ij`.
    Hadamard {
        #[serde(rename = "C")]
        c: CMatrix,
    },
    /// `φ(E_ij) = E_ij A_i`, `ψ(E_ij) = A_j⁻¹ E_ij`.
    RankOneFrame {
        #[serde(rename = "A")]
        a: Vec<CMatrix>,
    },
    /// `A ↦ A⊕0`, `B ↦ B⊕B`, `C ↦ C⊕XCX*` from `M_n` to `M_{2n}`.
    NonextendableTriple {
        #[serde(rename = "X")]
        x: CMatrix,
    },
}

impl CanonicalForm {
    pub fn tag(&self) -> &'static str {
        match self {
            CanonicalForm::MnChain { .. } => "MnChain",
            CanonicalForm::HermOdd { .. } => "HermOdd",
            CanonicalForm::HermEven { .. } => "HermEven",
            CanonicalForm::PnPair { .. } => "PnPair",
            CanonicalForm::SymOdd { .. } => "SymOdd",
            CanonicalForm::SymEven { .. } => "SymEven",
            CanonicalForm::DiagPair { .. } => "DiagPair",
            CanonicalForm::DiagChain { .. } => "DiagChain",
            CanonicalForm::Hadamard { .. } => "Hadamard",
            CanonicalForm::RankOneFrame { .. } => "RankOneFrame",
            CanonicalForm::NonextendableTriple { .. } => "NonextendableTriple",
        }
    }

    /// Number of maps the form describes.
    pub fn arity(&self) -> usize {
        match self {
            CanonicalForm::MnChain { n } => n.len(),
            CanonicalForm::HermOdd { c, .. } | CanonicalForm::HermEven { c, .. } => c.len(),
            CanonicalForm::SymOdd { c, .. } | CanonicalForm::SymEven { c, .. } => c.len(),
            CanonicalForm::DiagChain { c, .. } => c.len(),
            CanonicalForm::NonextendableTriple { .. } => 3,
            CanonicalForm::PnPair { .. }
            | CanonicalForm::DiagPair { .. }
            | CanonicalForm::Hadamard { .. }
            | CanonicalForm::RankOneFrame { .. } => 2,
        }
    }
}

fn check_square(m: &CMatrix, n: usize, what: &str) -> Result<()> {
    if m.rows() != n || m.cols() != n {
        return Err(Error::dim(format!("{what} is {}x{}, expected {n}x{n}", m.rows(), m.cols())));
    }
    if !m.is_finite() {
        return Err(Error::InvalidParameter(format!("{what} has non-finite entries")));
    }
    Ok(())
}

fn check_invertible(m: &CMatrix, n: usize, what: &str) -> Result<CMatrix> {
    check_square(m, n, what)?;
    let cond = m.condition_number();
    if !(cond <= MAX_CONDITION) {
        return Err(Error::Singular { what: what.into(), condition: cond });
    }
    m.inverse()
}

pub(crate) fn unitarity_deviation(u: &CMatrix) -> f64 {
    (&u.adjoint() * u).max_abs_diff(&CMatrix::identity(u.rows()))
}

pub(crate) fn orthogonality_deviation(o: &CMatrix) -> f64 {
    (&o.transpose() * o).max_abs_diff(&CMatrix::identity(o.rows()))
}

fn check_product_one<T: Copy + Into<Scalar>>(c: &[T]) -> Result<()> {
    if c.iter().any(|&x| x.into().norm() == 0.0) {
        return Err(Error::InvalidParameter("scalars must be nonzero".into()));
    }
    let p: Scalar = c.iter().map(|&x| x.into()).product();
    if (p - ONE).norm() > FORM_TOL {
        return Err(Error::InvalidParameter(format!("product of scalars is {p}, expected 1")));
    }
    Ok(())
}

fn require(space: SpaceTag, ok: bool, form: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::IncompatibleSpace(format!("{form} cannot act on {space}")))
    }
}

fn require_positive_scalars(space: SpaceTag, c: &[Scalar]) -> Result<()> {
    if matches!(space.kind, Kind::PosDef | Kind::PosSemiDef)
        && c.iter().any(|z| z.re <= 0.0 || z.im.abs() > FORM_TOL)
    {
        return Err(Error::InvalidParameter(format!("scalars on {space} must be positive")));
    }
    Ok(())
}

fn chain<F>(space: SpaceTag, m: usize, f: F) -> Result<Vec<LinMap>>
where
    F: Fn(usize, &CMatrix) -> CMatrix,
{
    (0..m).map(|i| LinMap::from_fn(space, space, |a| f(i, a))).collect()
}

/// Realize the maps described by `form` on `space`.
pub fn from_canonical(form: &CanonicalForm, space: SpaceTag) -> Result<Vec<LinMap>> {
    let n = space.n;
    let span = space.span();
    let name = form.tag();
    match form {
        CanonicalForm::MnChain { n: mats } => {
            require(space, span == Span::Full, name)?;
            if mats.len() < 2 {
                return Err(Error::InvalidParameter("a chain needs at least two matrices".into()));
            }
            let invs = mats
                .iter()
                .enumerate()
                .map(|(i, x)| check_invertible(x, n, &format!("N_{}", i + 1)))
                .collect::<Result<Vec<_>>>()?;
            let m = mats.len();
            chain(space, m, |i, a| &(&mats[i] * a) * &invs[(i + 1) % m])
        }
        CanonicalForm::HermOdd { u, c } => {
            require(space, matches!(space.kind, Kind::Hermitian | Kind::PosDef | Kind::PosSemiDef), name)?;
            check_invertible(u, n, "U")?;
            if unitarity_deviation(u) > FORM_TOL {
                return Err(Error::InvalidParameter("U is not unitary".into()));
            }
            let cs: Vec<Scalar> = c.iter().map(|&x| re(x)).collect();
            check_product_one(&cs)?;
            require_positive_scalars(space, &cs)?;
            let ua = u.adjoint();
            chain(space, c.len(), |i, a| (&(&ua * a) * u).scale(cs[i]))
        }
        CanonicalForm::HermEven { m, c } => {
            require(space, matches!(space.kind, Kind::Hermitian | Kind::PosDef | Kind::PosSemiDef), name)?;
            let minv = check_invertible(m, n, "M")?;
            let cs: Vec<Scalar> = c.iter().map(|&x| re(x)).collect();
            check_product_one(&cs)?;
            require_positive_scalars(space, &cs)?;
            let (ma, minv_a) = (m.adjoint(), minv.adjoint());
            chain(space, c.len(), |i, a| {
                let x = if i % 2 == 0 { &(&ma * a) * m } else { &(&minv * a) * &minv_a };
                x.scale(cs[i])
            })
        }
        CanonicalForm::PnPair { m, transpose } => {
            require(space, matches!(space.kind, Kind::Hermitian | Kind::PosDef | Kind::PosSemiDef), name)?;
            let minv = check_invertible(m, n, "M")?;
            let (ma, minv_a) = (m.adjoint(), minv.adjoint());
            let t = *transpose;
            let tr = move |a: &CMatrix| if t { a.transpose() } else { a.clone() };
            Ok(vec![
                LinMap::from_fn(space, space, |a| &(&ma * &tr(a)) * m)?,
                LinMap::from_fn(space, space, |a| &(&minv * &tr(a)) * &minv_a)?,
            ])
        }
        CanonicalForm::SymOdd { o, c } => {
            require(space, span == Span::Symmetric, name)?;
            check_invertible(o, n, "O")?;
            if orthogonality_deviation(o) > FORM_TOL {
                return Err(Error::InvalidParameter("O is not orthogonal".into()));
            }
            check_product_one(c)?;
            require_positive_scalars(space, c)?;
            let ot = o.transpose();
            chain(space, c.len(), |i, a| (&(&ot * a) * o).scale(c[i]))
        }
        CanonicalForm::SymEven { m, c } => {
            require(space, span == Span::Symmetric, name)?;
            let minv = check_invertible(m, n, "M")?;
            check_product_one(c)?;
            require_positive_scalars(space, c)?;
            let (mt, minv_t) = (m.transpose(), minv.transpose());
            chain(space, c.len(), |i, a| {
                let x = if i % 2 == 0 { &(&mt * a) * m } else { &(&minv * a) * &minv_t };
                x.scale(c[i])
            })
        }
        CanonicalForm::DiagPair { n: nm } => {
            require(space, span == Span::Diagonal, name)?;
            let ninv_t = check_invertible(nm, n, "N")?.transpose();
            let vec_map = |t: &CMatrix| {
                let t = t.clone();
                move |a: &CMatrix| {
                    let v = CMatrix::from_fn(n, 1, |i, _| a.get(i, i));
                    CMatrix::from_diag(&(&t * &v).entries())
                }
            };
            Ok(vec![
                LinMap::from_fn(space, space, vec_map(nm))?,
                LinMap::from_fn(space, space, vec_map(&ninv_t))?,
            ])
        }
        CanonicalForm::DiagChain { p, c } => {
            require(space, span == Span::Diagonal, name)?;
            check_square(p, n, "P")?;
            if !is_permutation_matrix(p) {
                return Err(Error::InvalidParameter("P is not a permutation matrix".into()));
            }
            let mut prod = CMatrix::identity(n);
            for (i, ci) in c.iter().enumerate() {
                check_invertible(ci, n, &format!("C_{}", i + 1))?;
                if crate::matlin::SpaceTag::new(Kind::Diagonal, Field::Complex, n).span_deviation(ci) > 0.0 {
                    return Err(Error::InvalidParameter(format!("C_{} is not diagonal", i + 1)));
                }
                prod = &prod * ci;
            }
            if prod.max_abs_diff(&CMatrix::identity(n)) > FORM_TOL {
                return Err(Error::InvalidParameter("product of the C_i is not the identity".into()));
            }
            let pt = p.transpose();
            chain(space, c.len(), |i, a| &c[i] * &(&(&pt * a) * p))
        }
        CanonicalForm::Hadamard { c } => {
            check_square(c, n, "C")?;
            if c.max_abs_diff(&c.transpose()) > FORM_TOL * c.max_abs().max(1.0) {
                return Err(Error::InvalidParameter("C must be symmetric".into()));
            }
            if c.entries().iter().any(|z| z.norm() == 0.0) {
                return Err(Error::InvalidParameter("C must have all entries nonzero".into()));
            }
            let chat = CMatrix::from_fn(n, n, |i, j| ONE / c.get(i, j));
            let full = SpaceTag::new(Kind::FullMatrix, space.field, n);
            let phi = LinMap::from_fn(full, full, |a| a.hadamard(c).expect("shapes checked"))?;
            let psi = LinMap::from_fn(full, full, |a| a.hadamard(&chat).expect("shapes checked"))?;
            match span {
                Span::Full => Ok(vec![phi, psi]),
                Span::Hermitian | Span::Symmetric => Ok(vec![phi.restrict(space, space)?, psi.restrict(space, space)?]),
                Span::Diagonal => Err(Error::IncompatibleSpace(format!("{name} cannot act on {space}"))),
            }
        }
        CanonicalForm::RankOneFrame { a } => {
            require(space, span == Span::Full, name)?;
            if a.len() != n {
                return Err(Error::InvalidParameter(format!("need {n} frame matrices, got {}", a.len())));
            }
            let invs = a
                .iter()
                .enumerate()
                .map(|(i, x)| check_invertible(x, n, &format!("A_{}", i + 1)))
                .collect::<Result<Vec<_>>>()?;
            // φ(C) = Σ_i E_ii C A_i and ψ(D) = Σ_j D E_jj A_j⁻¹ ... reordered:
            // ψ(E_ij) = A_j⁻¹ E_ij, so ψ(D) = Σ_j A_j⁻¹ D E_jj.
            let phi = LinMap::from_fn(space, space, |x| {
                (0..n).fold(CMatrix::zeros(n, n), |acc, i| &acc + &(&(&CMatrix::unit(n, i, i) * x) * &a[i]))
            })?;
            let psi = LinMap::from_fn(space, space, |x| {
                (0..n).fold(CMatrix::zeros(n, n), |acc, j| &acc + &(&(&invs[j] * x) * &CMatrix::unit(n, j, j)))
            })?;
            Ok(vec![phi, psi])
        }
        CanonicalForm::NonextendableTriple { x } => {
            require(space, span == Span::Full && space.field == Field::Complex, name)?;
            check_square(x, n, "X")?;
            let scalar = CMatrix::identity(n).scale(x.trace() / n as f64);
            if x.max_abs_diff(&scalar) <= FORM_TOL {
                return Err(Error::InvalidParameter("X must be nonscalar".into()));
            }
            let big = SpaceTag::full(2 * n);
            let zero = CMatrix::zeros(n, n);
            let xa = x.adjoint();
            Ok(vec![
                LinMap::from_fn(space, big, |a| a.direct_sum(&zero))?,
                LinMap::from_fn(space, big, |b| b.direct_sum(b))?,
                LinMap::from_fn(space, big, |c| c.direct_sum(&(&(x * c) * &xa)))?,
            ])
        }
    }
}

pub fn is_permutation_matrix(p: &CMatrix) -> bool {
    if !p.is_square() {
        return false;
    }
    let n = p.rows();
    let entries_ok = p.entries().iter().all(|z| *z == ONE || z.norm() == 0.0);
    let rows_ok = (0..n).all(|i| (0..n).filter(|&j| p.get(i, j) == ONE).count() == 1);
    let cols_ok = (0..n).all(|j| (0..n).filter(|&i| p.get(i, j) == ONE).count() == 1);
    entries_ok && rows_ok && cols_ok
}

/// Permutation matrix with `P[i][σ(i)] = 1`, so `Pᵗ E_ii P = E_σ(i)σ(i)`.
pub fn permutation_matrix(sigma: &[usize]) -> CMatrix {
    let n = sigma.len();
    CMatrix::from_fn(n, n, |i, j| if sigma[i] == j { ONE } else { Scalar::new(0.0, 0.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::trace_pair;

    fn m2() -> SpaceTag {
        SpaceTag::full(2)
    }

    #[test]
    fn identity_chain_gives_identities() {
        let form = CanonicalForm::MnChain { n: vec![CMatrix::identity(2); 3] };
        let maps = from_canonical(&form, m2()).unwrap();
        assert_eq!(maps.len(), 3);
        for f in maps {
            assert_eq!(f, LinMap::identity(m2()));
        }
    }

    #[test]
    fn hadamard_pair_values() {
        let c = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        let maps = from_canonical(&CanonicalForm::Hadamard { c: c.clone() }, m2()).unwrap();
        let chat = CMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 1.0]]).unwrap();
        let ones = CMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        assert_eq!(maps[0].apply(&ones).unwrap(), c);
        assert_eq!(maps[1].apply(&ones).unwrap(), chat);
    }

    #[test]
    fn diag_chain_on_units() {
        // σ = (1 2 3): P[i][σ(i)] = 1, so Pᵗ E_11 P = E_22, Pᵗ E_22 P = E_33, Pᵗ E_33 P = E_11.
        let p = permutation_matrix(&[1, 2, 0]);
        let c = vec![CMatrix::from_real_diag(&[2.0, 1.0, 1.0]), CMatrix::from_real_diag(&[0.5, 1.0, 1.0]), CMatrix::identity(3)];
        let space = SpaceTag::new(Kind::Diagonal, Field::Complex, 3);
        let maps = from_canonical(&CanonicalForm::DiagChain { p, c }, space).unwrap();
        assert_eq!(maps[0].apply(&CMatrix::unit(3, 0, 0)).unwrap(), CMatrix::unit(3, 1, 1));
        assert_eq!(maps[0].apply(&CMatrix::unit(3, 2, 2)).unwrap(), CMatrix::unit(3, 0, 0).scale(re(2.0)));
        assert_eq!(maps[1].apply(&CMatrix::unit(3, 2, 2)).unwrap(), CMatrix::unit(3, 0, 0).scale(re(0.5)));
        assert_eq!(maps[2].apply(&CMatrix::unit(3, 1, 1)).unwrap(), CMatrix::unit(3, 2, 2));
    }

    #[test]
    fn apply_examples() {
        let t = LinMap::from_fn(m2(), m2(), CMatrix::transpose).unwrap();
        assert_eq!(t.apply(&CMatrix::unit(2, 0, 1)).unwrap(), CMatrix::unit(2, 1, 0));
        let m = CMatrix::from_real_diag(&[1.0, 2.0]);
        let space = SpaceTag::new(Kind::PosDef, Field::Complex, 2);
        let maps = from_canonical(&CanonicalForm::PnPair { m, transpose: false }, space).unwrap();
        assert_eq!(maps[0].apply(&CMatrix::identity(2)).unwrap(), CMatrix::from_real_diag(&[1.0, 4.0]));
        assert!(maps[0].apply(&CMatrix::unit(2, 0, 1)).is_err());
    }

    #[test]
    fn compose_and_identity() {
        let t = LinMap::from_fn(m2(), m2(), CMatrix::transpose).unwrap();
        assert_eq!(LinMap::compose(&t, &t).unwrap(), LinMap::identity(m2()));
        let id = LinMap::identity(m2());
        assert_eq!(LinMap::compose(&id, &t).unwrap(), t);
        assert_eq!(LinMap::compose(&t, &id).unwrap(), t);
        assert!(LinMap::compose(&t, &LinMap::identity(SpaceTag::full(3))).is_err());
    }

    #[test]
    fn hermitian_preservation() {
        let nmat = CMatrix::from_rows(&[vec![re(1.0), re(2.0)], vec![I, re(3.0)]]).unwrap();
        let congr = LinMap::from_fn(m2(), m2(), |a| &(&nmat * a) * &nmat.adjoint()).unwrap();
        assert!(congr.is_hermitian_preserving(1e-12));
        let d = CMatrix::from_diag(&[I, ONE]);
        let bad = LinMap::from_fn(m2(), m2(), |a| &(&d * a) * &d).unwrap();
        assert!(!bad.is_hermitian_preserving(1e-12));
        // E_11 alone does not witness the failure: i·E_11·i = −E_11 is Hermitian.
        let img = bad.apply(&CMatrix::unit(2, 0, 0)).unwrap();
        assert_eq!(img, img.adjoint());
    }

    #[test]
    fn rank_one_frame_preserves_pairing() {
        let a2 = CMatrix::from_real_diag(&[2.0, 1.0]);
        let maps = from_canonical(&CanonicalForm::RankOneFrame { a: vec![CMatrix::identity(2), a2] }, m2()).unwrap();
        let b = space_basis(m2()).elements;
        for x in &b {
            for y in &b {
                let lhs = trace_pair(&maps[0].apply(x).unwrap(), &maps[1].apply(y).unwrap()).unwrap();
                assert!((lhs - trace_pair(x, y).unwrap()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn invalid_forms() {
        let bad = CanonicalForm::HermOdd { u: CMatrix::identity(2), c: vec![2.0, 1.0, 1.0] };
        assert!(matches!(from_canonical(&bad, SpaceTag::new(Kind::Hermitian, Field::Complex, 2)), Err(Error::InvalidParameter(_))));
        let sing = CanonicalForm::MnChain { n: vec![CMatrix::identity(2), CMatrix::from_real_diag(&[1.0, 0.0]), CMatrix::identity(2)] };
        assert!(matches!(from_canonical(&sing, m2()), Err(Error::Singular { .. })));
        let wrong_space = CanonicalForm::DiagPair { n: CMatrix::identity(2) };
        assert!(matches!(from_canonical(&wrong_space, m2()), Err(Error::IncompatibleSpace(_))));
        let neg = CanonicalForm::HermOdd { u: CMatrix::identity(2), c: vec![-1.0, -1.0, 1.0] };
        assert!(from_canonical(&neg, SpaceTag::new(Kind::PosDef, Field::Complex, 2)).is_err());
        assert!(from_canonical(&neg, SpaceTag::new(Kind::Hermitian, Field::Complex, 2)).is_ok());
        let scalar_x = CanonicalForm::NonextendableTriple { x: CMatrix::identity(2) };
        assert!(from_canonical(&scalar_x, m2()).is_err());
    }

    #[test]
    fn complexify_hermitian_map() {
        let h = SpaceTag::new(Kind::Hermitian, Field::Complex, 2);
        let u = CMatrix::from_rows(&[vec![re(0.6), re(0.8)], vec![re(-0.8), re(0.6)]]).unwrap();
        let maps = from_canonical(&CanonicalForm::HermOdd { u: u.clone(), c: vec![1.0, 1.0, 1.0] }, h).unwrap();
        let full = maps[0].complexify().unwrap();
        assert_eq!(full.domain(), m2());
        let e12 = CMatrix::unit(2, 0, 1);
        let expected = &(&u.adjoint() * &e12) * &u;
        assert!(full.apply(&e12).unwrap().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn form_json_shape() {
        let f = CanonicalForm::PnPair { m: CMatrix::identity(1), transpose: true };
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v["tag"], "PnPair");
        assert_eq!(v["params"]["transpose"], true);
        assert!(v["params"]["M"].is_object());
        let back: CanonicalForm = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
    }
}
