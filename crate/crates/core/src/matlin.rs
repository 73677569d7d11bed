//! Matrix spaces, their canonical bases, coordinates, and the trace pairing.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{re, CMatrix, Scalar, I, ONE, ZERO};

/// Default absolute tolerance on unit-scale data.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    #[serde(rename = "real", alias = "Real")]
    Real,
    #[serde(rename = "complex", alias = "Complex")]
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    FullMatrix,
    Hermitian,
    Symmetric,
    PosDef,
    PosSemiDef,
    Diagonal,
}

/// The linear span a space lives in, after folding real Hermitian into real
/// symmetric and the positive cones into their spans.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Span {
    Full,
    Hermitian,
    Symmetric,
    Diagonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceTag {
    pub kind: Kind,
    pub field: Field,
    pub n: usize,
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            Kind::FullMatrix => "M",
            Kind::Hermitian => "H",
            Kind::Symmetric => "S",
            Kind::PosDef => "P",
            Kind::PosSemiDef => "Pbar",
            Kind::Diagonal => "D",
        };
        let fld = match self.field {
            Field::Real => "R",
            Field::Complex => "C",
        };
        write!(f, "{k}_{}({fld})", self.n)
    }
}

impl SpaceTag {
    pub fn new(kind: Kind, field: Field, n: usize) -> Self {
        Self { kind, field, n }
    }

    pub fn full(n: usize) -> Self {
        Self::new(Kind::FullMatrix, Field::Complex, n)
    }

    pub fn span(&self) -> Span {
        match (self.kind, self.field) {
            (Kind::FullMatrix, _) => Span::Full,
            (Kind::Hermitian | Kind::PosDef | Kind::PosSemiDef, Field::Complex) => Span::Hermitian,
            (Kind::Hermitian | Kind::PosDef | Kind::PosSemiDef, Field::Real) => Span::Symmetric,
            (Kind::Symmetric, _) => Span::Symmetric,
            (Kind::Diagonal, _) => Span::Diagonal,
        }
    }

    /// The field the coordinates live in. Complex Hermitian matrices have
    /// real coordinates.
    pub fn coordinate_field(&self) -> Field {
        match self.span() {
            Span::Hermitian => Field::Real,
            _ => self.field,
        }
    }

    pub fn span_dim(&self) -> usize {
        let n = self.n;
        match self.span() {
            Span::Full | Span::Hermitian => n * n,
            Span::Symmetric => n * (n + 1) / 2,
            Span::Diagonal => n,
        }
    }

    /// True when the two tags have the same linear span.
    pub fn same_span(&self, other: &SpaceTag) -> bool {
        self.n == other.n && self.span() == other.span() && self.coordinate_field() == other.coordinate_field()
            && self.field == other.field
    }

    fn off_diagonal_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect()
    }

    pub fn basis(&self) -> Basis {
        space_basis(*self)
    }

    /// Coordinates of the projection of `a` onto the span (no validation).
    pub fn coords(&self, a: &CMatrix) -> Vec<Scalar> {
        let n = self.n;
        let real = self.coordinate_field() == Field::Real;
        let fix = |z: Scalar| if real { re(z.re) } else { z };
        match self.span() {
            Span::Full => a.entries().into_iter().map(fix).collect(),
            Span::Diagonal => (0..n).map(|i| fix(a.get(i, i))).collect(),
            Span::Symmetric => {
                let mut c: Vec<Scalar> = (0..n).map(|i| fix(a.get(i, i))).collect();
                for (i, j) in self.off_diagonal_pairs() {
                    c.push(fix((a.get(i, j) + a.get(j, i)) * 0.5));
                }
                c
            }
            Span::Hermitian => {
                let pairs = self.off_diagonal_pairs();
                let mut c: Vec<Scalar> = (0..n).map(|i| re(a.get(i, i).re)).collect();
                let upper: Vec<Scalar> = pairs.iter().map(|&(i, j)| (a.get(i, j) + a.get(j, i).conj()) * 0.5).collect();
                c.extend(upper.iter().map(|z| re(z.re)));
                c.extend(upper.iter().map(|z| re(z.im)));
                c
            }
        }
    }

    pub fn from_coords(&self, c: &[Scalar]) -> CMatrix {
        let n = self.n;
        debug_assert_eq!(c.len(), self.span_dim());
        let mut m = DMatrix::<Scalar>::zeros(n, n);
        match self.span() {
            Span::Full => {
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = c[i * n + j];
                    }
                }
            }
            Span::Diagonal => {
                for i in 0..n {
                    m[(i, i)] = c[i];
                }
            }
            Span::Symmetric => {
                for i in 0..n {
                    m[(i, i)] = c[i];
                }
                for (k, (i, j)) in self.off_diagonal_pairs().into_iter().enumerate() {
                    m[(i, j)] = c[n + k];
                    m[(j, i)] = c[n + k];
                }
            }
            Span::Hermitian => {
                let pairs = self.off_diagonal_pairs();
                let p = pairs.len();
                for i in 0..n {
                    m[(i, i)] = c[i];
                }
                for (k, &(i, j)) in pairs.iter().enumerate() {
                    let z = c[n + k] + I * c[n + p + k];
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
        }
        CMatrix::from_na(m)
    }

    /// Largest entrywise distance from `a` to the span.
    pub fn span_deviation(&self, a: &CMatrix) -> f64 {
        if a.rows() != self.n || a.cols() != self.n {
            return f64::INFINITY;
        }
        a.max_abs_diff(&self.from_coords(&self.coords(a)))
    }

    /// Coordinates of `a`, which must lie in the span within
    /// `tol · max(1, max|a_ij|)`.
    pub fn coordinates(&self, a: &CMatrix, tol: f64) -> Result<Vec<Scalar>> {
        if a.rows() != self.n || a.cols() != self.n {
            return Err(Error::dim(format!("{}x{} matrix for {self}", a.rows(), a.cols())));
        }
        let dev = self.span_deviation(a);
        if dev > tol * a.max_abs().max(1.0) {
            return Err(Error::NotInSpace { space: format!("span of {self}"), deviation: dev });
        }
        Ok(self.coords(a))
    }

    /// Zero-based index of the basis element `E_ii`; every span contains the
    /// diagonal units at the front of its basis except the full one.
    pub fn diag_index(&self, i: usize) -> usize {
        match self.span() {
            Span::Full => i * self.n + i,
            _ => i,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Basis {
    pub space: SpaceTag,
    pub elements: Vec<CMatrix>,
}

impl Basis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Canonical ordered basis of the span of `space`.
///
/// FullMatrix: `E_ij` row-major. Hermitian: diagonal units, then `E_ij + E_ji`
/// for `i < j` in lexicographic order, then `i(E_ij − E_ji)` in the same
/// order. Symmetric: as Hermitian without the imaginary family. Diagonal:
/// diagonal units. Positive cones use the basis of their span.
pub fn space_basis(space: SpaceTag) -> Basis {
    let d = space.span_dim();
    let elements = (0..d)
        .map(|k| {
            let mut c = vec![ZERO; d];
            c[k] = ONE;
            space.from_coords(&c)
        })
        .collect();
    Basis { space, elements }
}

/// `tr(AB) = Σ A_ij B_ji`.
pub fn trace_pair(a: &CMatrix, b: &CMatrix) -> Result<Scalar> {
    if a.cols() != b.rows() || a.rows() != b.cols() {
        return Err(Error::dim(format!(
            "trace pairing of {}x{} with {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(trace_pair_unchecked(a.as_na(), b.as_na()))
}

pub(crate) fn trace_pair_unchecked(a: &DMatrix<Scalar>, b: &DMatrix<Scalar>) -> Scalar {
    let mut s = ZERO;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

/// `[tr(left_i · right_j)]`.
pub fn gram_matrix(left: &[CMatrix], right: &[CMatrix]) -> Result<CMatrix> {
    let mut g = DMatrix::<Scalar>::zeros(left.len(), right.len());
    for (i, a) in left.iter().enumerate() {
        for (j, b) in right.iter().enumerate() {
            g[(i, j)] = trace_pair(a, b)?;
        }
    }
    Ok(CMatrix::from_na(g))
}

/// Whether `a` lies in the set named by `space`, within absolute tolerance
/// `tol` on entries and eigenvalues.
pub fn membership(space: SpaceTag, a: &CMatrix, tol: f64) -> bool {
    if a.rows() != space.n || a.cols() != space.n || !a.is_finite() {
        return false;
    }
    if space.span_deviation(a) > tol {
        return false;
    }
    match space.kind {
        Kind::PosDef => linalg::hermitian_eigenvalues(a)[0] > tol,
        Kind::PosSemiDef => linalg::hermitian_eigenvalues(a)[0] >= -tol,
        _ => true,
    }
}
