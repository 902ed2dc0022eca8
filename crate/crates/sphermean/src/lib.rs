//! Symbolic and numeric tools for spherical mean transforms of compactly
//! supported functions, the moment polynomials of discrete measures, and the
//! local classification of singular points on ruled surfaces.
//!
//! The crate is organized around a handful of exact kernels (multivariate
//! polynomials and truncated power series over arbitrary-precision rationals)
//! plus floating-point quadrature for the transform itself:
//!
//! * [`poly`] — sparse polynomials over `BigRational`, Laplacians, harmonic
//!   decompositions, square-linear-factor extraction.
//! * [`quad`] — quadrature rules on the unit circle and sphere.
//! * [`means`] — spherical means of compactly supported functions and batch
//!   zero-verification reports.
//! * [`generators`] — bump profiles, reflection-antisymmetric functions,
//!   normalized Bessel kernels, plane-wave eigenfunctions, spectral
//!   projections of discrete measures.
//! * [`moments`] — the moment polynomial family of a finite measure and its
//!   harmonic minor.
//! * [`series`] — truncated power series over a generic coefficient ring,
//!   including series with polynomial coefficients in a slope parameter.
//! * [`ruled`] — line geometry (closest points, extremal distances) and the
//!   canonical-form pipeline classifying singular points of ruled charts.
//! * [`symmetry`] — reflections, mirror closures, shrink certificates, and
//!   the cone-configuration validator.

pub mod error;
pub mod generators;
pub mod json;
pub mod means;
pub mod moments;
pub mod poly;
pub mod quad;
pub mod ruled;
pub mod series;
pub mod symmetry;

mod vec3;

pub use error::Error;
pub use vec3::Vec3;
