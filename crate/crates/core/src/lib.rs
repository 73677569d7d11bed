//! Maps on matrix spaces that preserve the trace of products,
//! `tr(φ₁(A₁)⋯φₘ(Aₘ)) = tr(A₁⋯Aₘ)`.
//!
//! Maps are finite transfer matrices over canonical bases ([`matlin`],
//! [`superop`]). [`extend`] checks the identity and builds dual maps and
//! extensions, [`decompose`] recovers canonical parameters from preserving
//! tuples, and [`families`] generates seeded instances of every family.

pub mod decompose;
pub mod error;
pub mod extend;
pub mod families;
pub mod io;
pub mod linalg;
pub mod matlin;
pub mod matrix;
pub mod superop;

pub use error::{Error, Result};
pub use matlin::{Field, Kind, SpaceTag};
pub use matrix::{CMatrix, Scalar};
pub use superop::{from_canonical, CanonicalForm, LinMap};
