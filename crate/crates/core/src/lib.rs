//! Domain-informed B-spline interpolation (DIBSI).
//!
//! Given uniform samples of a signal and a set of subdomain functions that
//! describe an inhomogeneous domain, this crate builds a shift-variant
//! B-spline generating basis tailored to the domain and interpolates with it.
//! Standard shift-invariant B-spline interpolation (BSI) is provided alongside
//! as the baseline.
//!
//! The numerical core ([`splines`], [`domain`], [`dibasis`], [`interp`]) is
//! generic over the floating-point type through [`Scalar`]. The experiment
//! layers ([`bench`], [`image2d`]) work in `f64`; the aliases at the crate root
//! name the `f64` instantiations used there.

// `!(a < b)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod dibasis;
pub mod domain;
mod error;
pub mod image2d;
pub mod interp;
mod scalar;
pub mod seed;
pub mod splines;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Working precision of the experiment layers.
pub type Real = f64;

pub type GridFunction = domain::GridFunction<Real>;
pub type SubdomainSet = domain::SubdomainSet<Real>;
pub type MeyerSystem = domain::MeyerSystem<Real>;
pub type DiBasis = dibasis::DiBasis<Real>;
pub type StandardBasis = dibasis::StandardBasis<Real>;
pub type SampleSequence = interp::SampleSequence<Real>;
