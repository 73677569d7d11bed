//! Dense complex matrices, the value type shared by every other module.
//!
//! Real matrices are complex matrices whose imaginary parts are zero; the
//! JSON encoding records which of the two a matrix is.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matlin::Field;

pub type Scalar = Complex64;

pub const ZERO: Scalar = Complex64::new(0.0, 0.0);
pub const ONE: Scalar = Complex64::new(1.0, 0.0);
pub const I: Scalar = Complex64::new(0.0, 1.0);

pub fn re(x: f64) -> Scalar {
    Complex64::new(x, 0.0)
}

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    inner: DMatrix<Scalar>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { inner: DMatrix::zeros(rows, cols) }
    }

    pub fn identity(n: usize) -> Self {
        Self { inner: DMatrix::identity(n, n) }
    }

    /// The matrix unit `E_ij` (zero-based indices) of size `n × n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = ONE;
        Self { inner: m }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Scalar) -> Self {
        Self { inner: DMatrix::from_fn(rows, cols, f) }
    }

    pub fn from_rows(rows: &[Vec<Scalar>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::dim("rows must be non-empty and of equal length"));
        }
        Ok(Self::from_fn(r, c, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&x| re(x)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn from_diag(d: &[Scalar]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { d[i] } else { ZERO })
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        let d: Vec<Scalar> = d.iter().map(|&x| re(x)).collect();
        Self::from_diag(&d)
    }

    pub fn from_na(inner: DMatrix<Scalar>) -> Self {
        Self { inner }
    }

    pub fn as_na(&self) -> &DMatrix<Scalar> {
        &self.inner
    }

    pub fn into_na(self) -> DMatrix<Scalar> {
        self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.inner[(i, j)]
    }

    /// Row-major entries.
    pub fn entries(&self) -> Vec<Scalar> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vec<Scalar> {
        (0..self.rows().min(self.cols())).map(|i| self.inner[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint() }
    }

    pub fn transpose(&self) -> Self {
        Self { inner: self.inner.transpose() }
    }

    pub fn conj(&self) -> Self {
        Self { inner: self.inner.map(|z| z.conj()) }
    }

    pub fn real_part(&self) -> Self {
        Self { inner: self.inner.map(|z| re(z.re)) }
    }

    pub fn trace(&self) -> Scalar {
        self.inner.diagonal().iter().sum()
    }

    pub fn scale(&self, s: Scalar) -> Self {
        Self { inner: &self.inner * s }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.inner.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.inner.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.max_imag() <= tol
    }

    /// Position of the entry of largest modulus (first in row-major order on ties).
    pub fn argmax_abs(&self) -> (usize, usize) {
        let mut best = (0, 0);
        let mut best_val: f64 = -1.0;
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let v = self.inner[(i, j)].norm();
                if v > best_val + 1e-14 * best_val.abs() {
                    best_val = v;
                    best = (i, j);
                }
            }
        }
        best
    }

    pub fn try_mul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols() != other.rows() {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(self * other)
    }

    pub fn hadamard(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.inner.shape() != other.inner.shape() {
            return Err(Error::dim("Hadamard product needs equal shapes"));
        }
        Ok(Self { inner: self.inner.component_mul(&other.inner) })
    }

    pub fn direct_sum(&self, other: &CMatrix) -> CMatrix {
        let (r1, c1) = self.inner.shape();
        let (r2, c2) = other.inner.shape();
        let mut m = DMatrix::zeros(r1 + r2, c1 + c2);
        m.view_mut((0, 0), (r1, c1)).copy_from(&self.inner);
        m.view_mut((r1, c1), (r2, c2)).copy_from(&other.inner);
        Self { inner: m }
    }

    /// Embed an `n × n` matrix as the upper-left corner of a `k × k` zero matrix.
    pub fn corner_embed(&self, k: usize) -> CMatrix {
        let mut m = DMatrix::zeros(k, k);
        m.view_mut((0, 0), self.inner.shape()).copy_from(&self.inner);
        Self { inner: m }
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        if !self.is_square() {
            return Err(Error::dim("inverse of a non-square matrix"));
        }
        let cond = crate::linalg::condition_number(&self.inner);
        if !cond.is_finite() || cond > 1e14 {
            return Err(Error::Singular { what: "matrix".into(), condition: cond });
        }
        self.inner
            .clone()
            .try_inverse()
            .map(Self::from_na)
            .ok_or(Error::Singular { what: "matrix".into(), condition: cond })
    }

    pub fn condition_number(&self) -> f64 {
        crate::linalg::condition_number(&self.inner)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.inner.shape() != other.inner.shape() {
            return f64::INFINITY;
        }
        self.inner.iter().zip(other.inner.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `‖self − other‖_F / max(‖other‖_F, 1e-300)`.
    pub fn rel_diff(&self, other: &CMatrix) -> f64 {
        if self.inner.shape() != other.inner.shape() {
            return f64::INFINITY;
        }
        (&self.inner - &other.inner).norm() / other.inner.norm().max(1e-300)
    }

    pub fn field(&self) -> Field {
        if self.max_imag() == 0.0 {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMatrix{}x{}[", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols() {
                let z = self.inner[(i, j)];
                if j > 0 {
                    write!(f, ", ")?;
                }
                if z.im == 0.0 {
                    write!(f, "{:.6}", z.re)?;
                } else {
                    write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
                }
            }
        }
        write!(f, "]")
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix { inner: &self.inner * &rhs.inner }
    }
}

impl Mul for CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: CMatrix) -> CMatrix {
        CMatrix { inner: self.inner * rhs.inner }
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix { inner: &self.inner + &rhs.inner }
    }
}

impl Add for CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: CMatrix) -> CMatrix {
        CMatrix { inner: self.inner + rhs.inner }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix { inner: &self.inner - &rhs.inner }
    }
}

impl Sub for CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: CMatrix) -> CMatrix {
        CMatrix { inner: self.inner - rhs.inner }
    }
}

impl Neg for CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix { inner: -self.inner }
    }
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    #[serde(default)]
    field: Option<Field>,
    data: Vec<RawEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawEntry {
    Pair([f64; 2]),
    Real(f64),
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawMatrix {
            rows: self.rows(),
            cols: self.cols(),
            field: Some(self.field()),
            data: self.entries().into_iter().map(|z| RawEntry::Pair([z.re, z.im])).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMatrix::deserialize(d)?;
        if raw.rows == 0 || raw.cols == 0 {
            return Err(D::Error::custom("rows and cols must be positive"));
        }
        if raw.data.len() != raw.rows * raw.cols {
            return Err(D::Error::custom(format!(
                "data has {} entries, expected {}",
                raw.data.len(),
                raw.rows * raw.cols
            )));
        }
        let entries: Vec<Scalar> = raw
            .data
            .iter()
            .map(|e| match *e {
                RawEntry::Pair([a, b]) => Complex64::new(a, b),
                RawEntry::Real(a) => re(a),
            })
            .collect();
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(D::Error::custom("matrix entries must be finite"));
        }
        if raw.field == Some(Field::Real) && entries.iter().any(|z| z.im != 0.0) {
            return Err(D::Error::custom("field is real but an entry has a nonzero imaginary part"));
        }
        Ok(CMatrix::from_fn(raw.rows, raw.cols, |i, j| entries[i * raw.cols + j]))
    }
}
