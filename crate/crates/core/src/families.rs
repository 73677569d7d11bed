//! Seeded generators: random space elements, random parameters (unitary,
//! orthogonal, well-conditioned invertible), and every canonical and
//! counterexample family, realized as maps.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matlin::{Field, Kind, SpaceTag};
use crate::matrix::{re, CMatrix, Scalar, ONE};
use crate::superop::{from_canonical, permutation_matrix, CanonicalForm, LinMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    MnChain,
    HermOdd,
    HermEven,
    PnPair,
    SymOdd,
    SymEven,
    DiagPair,
    DiagChain,
    Hadamard,
    RankOneFrame,
    NonextendableTriple,
}

impl Family {
    pub const ALL: [Family; 11] = [
        Family::MnChain,
        Family::HermOdd,
        Family::HermEven,
        Family::PnPair,
        Family::SymOdd,
        Family::SymEven,
        Family::DiagPair,
        Family::DiagChain,
        Family::Hadamard,
        Family::RankOneFrame,
        Family::NonextendableTriple,
    ];

    /// Whether `m` maps (with `positive` and `field`) make sense for the family.
    pub fn allows(self, m: usize, field: Field, positive: bool) -> bool {
        match self {
            Family::MnChain | Family::DiagChain => m >= 3,
            Family::HermOdd => field == Field::Complex && m >= 3 && m % 2 == 1,
            Family::HermEven => field == Field::Complex && m >= 4 && m % 2 == 0,
            Family::SymOdd => m >= 3 && m % 2 == 1 && (field == Field::Real || !positive),
            Family::SymEven => {
                m % 2 == 0 && (m >= 4 || (m == 2 && positive && field == Field::Real)) && (field == Field::Real || !positive)
            }
            Family::PnPair | Family::DiagPair | Family::Hadamard | Family::RankOneFrame => m == 2,
            Family::NonextendableTriple => m == 3 && field == Field::Complex,
        }
    }
}

fn default_condition_bound() -> f64 {
    1e3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub field: Field,
    pub seed: u64,
    #[serde(default = "default_condition_bound")]
    pub condition_bound: f64,
    /// Place Hermitian and real symmetric chains on positive definite matrices.
    #[serde(default)]
    pub positive: bool,
    /// Use the transpose branch for `PnPair`.
    #[serde(default)]
    pub transpose: bool,
}

impl GenSpec {
    pub fn new(family: Family, n: usize, m: usize, field: Field, seed: u64) -> Self {
        Self { family, n, m, field, seed, condition_bound: default_condition_bound(), positive: false, transpose: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generated {
    pub family: Family,
    pub space: SpaceTag,
    pub form: CanonicalForm,
    pub maps: Vec<LinMap>,
    /// Set when the instance extends a family past its real symmetric construction.
    pub extrapolated: bool,
}

pub fn gaussian(rows: usize, cols: usize, field: Field, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| match field {
        Field::Real => re(rng.sample(StandardNormal)),
        Field::Complex => {
            let (x, y): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
            Scalar::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
        }
    })
}

/// Element of the named set, drawn from a full-measure distribution:
/// Gaussian entries, `(G + G*)/2`, `(G + Gᵗ)/2`, `G*G + 0.1 I`, or a
/// Gaussian diagonal.
pub fn sample_space(space: SpaceTag, rng: &mut impl Rng) -> CMatrix {
    let n = space.n;
    let g = gaussian(n, n, space.field, rng);
    match space.kind {
        Kind::FullMatrix => g,
        Kind::Hermitian => (&g + &g.adjoint()).scale(re(0.5)),
        Kind::Symmetric => (&g + &g.transpose()).scale(re(0.5)),
        Kind::PosDef | Kind::PosSemiDef => &(&g.adjoint() * &g) + &CMatrix::identity(n).scale(re(0.1)),
        Kind::Diagonal => CMatrix::from_diag(&g.diagonal()),
    }
}

pub fn gen_space_sample(space: SpaceTag, seed: u64) -> CMatrix {
    sample_space(space, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn resample<R: Rng, T>(bound: f64, rng: &mut R, mut draw: impl FnMut(&mut R) -> (T, f64)) -> Result<T> {
    if !(bound > 1.0) {
        return Err(Error::InvalidParameter(format!("condition bound must exceed 1, got {bound}")));
    }
    for _ in 0..10_000 {
        let (x, cond) = draw(rng);
        if cond <= bound {
            return Ok(x);
        }
    }
    Err(Error::InvalidParameter(format!("could not sample within condition bound {bound}")))
}

/// Gaussian matrix with condition number at most `bound`.
pub fn random_invertible(n: usize, field: Field, bound: f64, rng: &mut impl Rng) -> Result<CMatrix> {
    resample(bound, rng, |r| {
        let g = gaussian(n, n, field, r);
        let c = g.condition_number();
        (g, c)
    })
}

/// Haar unitary (or real orthogonal) from the QR factorization of a Gaussian
/// matrix, with the phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary(n: usize, field: Field, rng: &mut impl Rng) -> CMatrix {
    let g = gaussian(n, n, field, rng).into_na();
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_diagonal(&r.diagonal().map(|z| if z.norm() == 0.0 { ONE } else { z / z.norm() }));
    CMatrix::from_na(q * phases)
}

/// Complex orthogonal matrix `(I − K)(I + K)⁻¹` from a complex
/// skew-symmetric `K`, limited to condition number `bound`.
pub fn random_complex_orthogonal(n: usize, bound: f64, rng: &mut impl Rng) -> Result<CMatrix> {
    resample(bound, rng, |r| {
        let g = gaussian(n, n, Field::Complex, r);
        let k = (&g - &g.transpose()).scale(re(0.25));
        let id = CMatrix::identity(n);
        match (&id + &k).inverse() {
            Ok(inv) => {
                let o = &(&id - &k) * &inv;
                let c = o.condition_number();
                (o, c)
            }
            Err(_) => (id, f64::INFINITY),
        }
    })
}

pub fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Nonzero scalar with magnitude in `[1/2, 2]`; a random sign (real) or
/// phase (complex) unless `positive`.
fn random_scalar(field: Field, positive: bool, rng: &mut impl Rng) -> Scalar {
    let mag = (rng.random_range(-1.0..1.0) * std::f64::consts::LN_2).exp();
    if positive {
        re(mag)
    } else {
        match field {
            Field::Real => re(if rng.random_bool(0.5) { mag } else { -mag }),
            Field::Complex => Scalar::from_polar(mag, rng.random_range(0.0..std::f64::consts::TAU)),
        }
    }
}

/// `m` scalars whose product is one: the last is the inverse of the others' product.
fn scalars_with_unit_product(m: usize, field: Field, positive: bool, rng: &mut impl Rng) -> Vec<Scalar> {
    let mut c: Vec<Scalar> = (0..m - 1).map(|_| random_scalar(field, positive, rng)).collect();
    let p: Scalar = c.iter().product();
    c.push(ONE / p);
    c
}

/// Random linear bijection of `space` with transfer condition number at most `bound`.
pub fn random_bijection(space: SpaceTag, bound: f64, rng: &mut impl Rng) -> Result<LinMap> {
    let t = random_invertible(space.span_dim(), space.coordinate_field(), bound, rng)?;
    LinMap::new(space, space, t)
}

/// Random linear map with Gaussian transfer matrix.
pub fn random_linear_map(domain: SpaceTag, codomain: SpaceTag, rng: &mut impl Rng) -> Result<LinMap> {
    let t = gaussian(codomain.span_dim(), domain.span_dim(), domain.coordinate_field(), rng);
    LinMap::new(domain, codomain, t)
}

/// Hermitian-preserving pair `M_n → M_k` preserving the trace pairing:
/// `φ₁(A) = S*(M*AM ⊕ 0)S`, `φ₂(B) = S⁻¹(M⁻¹BM⁻* ⊕ 0)S⁻*`.
pub fn gen_embedded_pair(n: usize, k: usize, bound: f64, rng: &mut impl Rng) -> Result<(LinMap, LinMap)> {
    if n > k {
        return Err(Error::InvalidParameter(format!("embedding needs n <= k, got {n} > {k}")));
    }
    let m = random_invertible(n, Field::Complex, bound, rng)?;
    let s = random_invertible(k, Field::Complex, bound, rng)?;
    let (mi, si) = (m.inverse()?, s.inverse()?);
    let (ma, mia, sa, sia) = (m.adjoint(), mi.adjoint(), s.adjoint(), si.adjoint());
    let (dom, cod) = (SpaceTag::full(n), SpaceTag::full(k));
    let phi1 = LinMap::from_fn(dom, cod, |a| &(&sa * &(&(&ma * a) * &m).corner_embed(k)) * &s)?;
    let phi2 = LinMap::from_fn(dom, cod, |b| &(&si * &(&(&mi * b) * &mia).corner_embed(k)) * &sia)?;
    Ok((phi1, phi2))
}

/// `(A ↦ A∘C, A ↦ A∘Ĉ)` with `Ĉ_ij = 1/C_ij`. The flag is set for complex
/// `C`, which goes beyond the real symmetric family.
pub fn gen_hadamard_pair(c: &CMatrix) -> Result<(LinMap, LinMap, bool)> {
    if !c.is_square() {
        return Err(Error::dim("Hadamard weight must be square"));
    }
    let field = c.field();
    let maps = from_canonical(&CanonicalForm::Hadamard { c: c.clone() }, SpaceTag::new(Kind::FullMatrix, Field::Complex, c.rows()))?;
    let [phi, psi]: [LinMap; 2] = maps.try_into().expect("pair");
    Ok((phi, psi, field == Field::Complex))
}

/// `E_ij ↦ E_ij A_i` and `E_ij ↦ A_j⁻¹ E_ij`.
pub fn gen_rank_one_frame_pair(a: &[CMatrix]) -> Result<(LinMap, LinMap)> {
    let n = a.len();
    let maps = from_canonical(&CanonicalForm::RankOneFrame { a: a.to_vec() }, SpaceTag::full(n))?;
    let [phi, psi]: [LinMap; 2] = maps.try_into().expect("pair");
    Ok((phi, psi))
}

/// `A ↦ A ⊕ 0`, `B ↦ B ⊕ B`, `C ↦ C ⊕ XCX*` from `M_n` into `M_{2n}`.
pub fn gen_nonextendable_triple(x: &CMatrix, n: usize) -> Result<Vec<LinMap>> {
    if x.rows() != n || x.cols() != n {
        return Err(Error::dim(format!("X must be {n}x{n}")));
    }
    from_canonical(&CanonicalForm::NonextendableTriple { x: x.clone() }, SpaceTag::full(n)).map_err(|e| match e {
        Error::InvalidParameter(msg) => Error::Precondition { reason: msg, residual: 0.0 },
        other => other,
    })
}

fn family_space(spec: &GenSpec) -> SpaceTag {
    let n = spec.n;
    let kind = match spec.family {
        Family::MnChain | Family::Hadamard | Family::RankOneFrame | Family::NonextendableTriple => Kind::FullMatrix,
        Family::HermOdd | Family::HermEven if spec.positive => Kind::PosDef,
        Family::HermOdd | Family::HermEven => Kind::Hermitian,
        Family::PnPair => Kind::PosDef,
        Family::SymOdd | Family::SymEven if spec.positive => Kind::PosDef,
        Family::SymOdd | Family::SymEven => Kind::Symmetric,
        Family::DiagPair | Family::DiagChain => Kind::Diagonal,
    };
    SpaceTag::new(kind, spec.field, n)
}

/// Random instance of a family together with its maps, deterministic in the seed.
pub fn gen_canonical(spec: &GenSpec) -> Result<Generated> {
    let (n, m, field) = (spec.n, spec.m, spec.field);
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if !spec.family.allows(m, field, spec.positive) {
        return Err(Error::InvalidParameter(format!(
            "{:?} does not admit m = {m} over {:?}{}",
            spec.family,
            field,
            if spec.positive { " on positive definite matrices" } else { "" }
        )));
    }
    let bound = spec.condition_bound;
    let rng = &mut ChaCha8Rng::seed_from_u64(spec.seed);
    let positive = spec.positive;
    let real_c = |c: Vec<Scalar>| c.into_iter().map(|z| z.re).collect::<Vec<f64>>();
    let form = match spec.family {
        Family::MnChain => {
            CanonicalForm::MnChain { n: (0..m).map(|_| random_invertible(n, field, bound, rng)).collect::<Result<_>>()? }
        }
        Family::HermOdd => CanonicalForm::HermOdd {
            u: random_unitary(n, Field::Complex, rng),
            c: real_c(scalars_with_unit_product(m, Field::Real, positive, rng)),
        },
        Family::HermEven => CanonicalForm::HermEven {
            m: random_invertible(n, Field::Complex, bound, rng)?,
            c: real_c(scalars_with_unit_product(m, Field::Real, positive, rng)),
        },
        Family::PnPair => CanonicalForm::PnPair { m: random_invertible(n, field, bound, rng)?, transpose: spec.transpose },
        Family::SymOdd => CanonicalForm::SymOdd {
            o: match field {
                Field::Real => random_unitary(n, Field::Real, rng),
                Field::Complex => random_complex_orthogonal(n, bound, rng)?,
            },
            c: scalars_with_unit_product(m, field, positive, rng),
        },
        Family::SymEven => CanonicalForm::SymEven {
            m: random_invertible(n, field, bound, rng)?,
            c: scalars_with_unit_product(m, field, positive, rng),
        },
        Family::DiagPair => CanonicalForm::DiagPair { n: random_invertible(n, field, bound, rng)? },
        Family::DiagChain => {
            let p = permutation_matrix(&random_permutation(n, rng));
            let mut c: Vec<CMatrix> = Vec::with_capacity(m);
            let mut prod = vec![ONE; n];
            for _ in 0..m - 1 {
                let d: Vec<Scalar> = (0..n).map(|_| random_scalar(field, false, rng)).collect();
                prod.iter_mut().zip(&d).for_each(|(p, x)| *p *= x);
                c.push(CMatrix::from_diag(&d));
            }
            c.push(CMatrix::from_diag(&prod.iter().map(|p| ONE / p).collect::<Vec<_>>()));
            CanonicalForm::DiagChain { p, c }
        }
        Family::Hadamard => {
            let mut w = vec![vec![ONE; n]; n];
            for i in 0..n {
                for j in i..n {
                    let z = random_scalar(Field::Real, false, rng);
                    w[i][j] = z;
                    w[j][i] = z;
                }
            }
            CanonicalForm::Hadamard { c: CMatrix::from_rows(&w)? }
        }
        Family::RankOneFrame => {
            CanonicalForm::RankOneFrame { a: (0..n).map(|_| random_invertible(n, field, bound, rng)).collect::<Result<_>>()? }
        }
        Family::NonextendableTriple => CanonicalForm::NonextendableTriple { x: gaussian(n, n, Field::Complex, rng) },
    };
    let space = family_space(spec);
    let maps = from_canonical(&form, space)?;
    Ok(Generated { family: spec.family, space, form, maps, extrapolated: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extend::{check_preservation, Mode};
    use crate::linalg::hermitian_eigenvalues;
    use crate::superop::unitarity_deviation;

    #[test]
    fn samples_land_in_their_sets() {
        let p = gen_space_sample(SpaceTag::new(Kind::PosDef, Field::Complex, 3), 1);
        assert!(hermitian_eigenvalues(&p)[0] > 0.0);
        let h = gen_space_sample(SpaceTag::new(Kind::Hermitian, Field::Complex, 3), 2);
        assert_eq!(h, h.adjoint());
        let d = gen_space_sample(SpaceTag::new(Kind::Diagonal, Field::Real, 4), 3);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(d.get(i, j), Scalar::new(0.0, 0.0));
                }
            }
        }
        assert_eq!(d.field(), Field::Real);
    }

    #[test]
    fn unitary_and_orthogonal() {
        let rng = &mut ChaCha8Rng::seed_from_u64(5);
        assert!(unitarity_deviation(&random_unitary(4, Field::Complex, rng)) < 1e-12);
        let o = random_complex_orthogonal(3, 1e3, rng).unwrap();
        assert!((&o.transpose() * &o).max_abs_diff(&CMatrix::identity(3)) < 1e-12);
        assert!(o.max_imag() > 0.0);
    }

    #[test]
    fn deterministic() {
        let spec = GenSpec::new(Family::MnChain, 3, 4, Field::Complex, 7);
        assert_eq!(gen_canonical(&spec).unwrap(), gen_canonical(&spec).unwrap());
    }

    #[test]
    fn scalar_products_exact() {
        let g = gen_canonical(&GenSpec::new(Family::HermOdd, 3, 3, Field::Complex, 11)).unwrap();
        let CanonicalForm::HermOdd { c, .. } = g.form else { panic!() };
        assert!((c.iter().product::<f64>() - 1.0).abs() < 1e-15);
        let g = gen_canonical(&GenSpec::new(Family::DiagChain, 4, 4, Field::Complex, 12)).unwrap();
        let CanonicalForm::DiagChain { c, .. } = g.form else { panic!() };
        let prod = c.iter().fold(CMatrix::identity(4), |a, x| &a * x);
        assert!(prod.max_abs_diff(&CMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn hadamard_examples() {
        let (phi, psi, beyond) = gen_hadamard_pair(&CMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap()).unwrap();
        assert!(!beyond);
        assert_eq!(phi, LinMap::identity(SpaceTag::full(2)));
        assert_eq!(psi, LinMap::identity(SpaceTag::full(2)));
        assert!(gen_hadamard_pair(&CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap()).is_err());
        let cz = CMatrix::from_rows(&[vec![ONE, Scalar::new(1.0, 1.0)], vec![Scalar::new(1.0, 1.0), ONE]]).unwrap();
        assert!(gen_hadamard_pair(&cz).unwrap().2);
    }

    #[test]
    fn rank_one_frames_pass_pairs() {
        let (phi, psi) = gen_rank_one_frame_pair(&[CMatrix::identity(2), CMatrix::from_real_diag(&[2.0, 1.0])]).unwrap();
        assert!(check_preservation(&[phi, psi], 1e-12, Mode::Exhaustive).unwrap().pass);
        let (phi, psi) = gen_rank_one_frame_pair(&[CMatrix::identity(2), CMatrix::identity(2)]).unwrap();
        assert_eq!(phi, LinMap::identity(SpaceTag::full(2)));
        assert_eq!(psi, phi);
    }

    #[test]
    fn nonextendable_triple_examples() {
        let t = gen_nonextendable_triple(&CMatrix::unit(2, 0, 1), 2).unwrap();
        let r = check_preservation(&t, 1e-12, Mode::Exhaustive).unwrap();
        assert!(r.pass && r.tuples_evaluated == 64);
        assert!(matches!(gen_nonextendable_triple(&CMatrix::identity(2), 2), Err(Error::Precondition { .. })));
    }

    #[test]
    fn embedded_pair_preserves() {
        let rng = &mut ChaCha8Rng::seed_from_u64(3);
        let (a, b) = gen_embedded_pair(2, 3, 1e2, rng).unwrap();
        assert!(check_preservation(&[a.clone(), b], 1e-9, Mode::Exhaustive).unwrap().pass);
        assert!(a.is_hermitian_preserving(1e-9));
    }

    #[test]
    fn family_constraints() {
        assert!(gen_canonical(&GenSpec::new(Family::MnChain, 2, 2, Field::Complex, 0)).is_err());
        assert!(gen_canonical(&GenSpec::new(Family::HermOdd, 2, 4, Field::Complex, 0)).is_err());
        let mut spec = GenSpec::new(Family::SymEven, 2, 2, Field::Real, 0);
        assert!(gen_canonical(&spec).is_err());
        spec.positive = true;
        assert!(gen_canonical(&spec).is_ok());
    }
}
