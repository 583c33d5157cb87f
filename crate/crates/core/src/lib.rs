//! Multiplier spectra of rational maps on the Riemann sphere.
//!
//! The crate computes, for a rational map `f` of degree `d >= 2`, the
//! multiset of multipliers of periodic points of formal exact period `n`
//! (counted with multiplicity), its elementary-symmetric coordinates, and the
//! reciprocal variant which is defined off the locus of maps with a
//! superattracting cycle in the period window.
//!
//! Layout:
//!
//! - [`poly`]: complex scalars (double and extended precision), dense
//!   univariate polynomials and homogeneous bivariate forms.
//! - [`ratmap`]: rational maps, Möbius transformations, cycle multipliers.
//! - [`dynatomic`]: period and dynatomic forms, the counting function.
//! - [`rootfind`]: projective root clusters of homogeneous forms.
//! - [`spectra`]: cycles, spectrum layers, sigma/rho/delta/tau coordinates.
//! - [`lattes`]: the degree-4 flexible Lattès family.
//! - [`probe`]: deterministic sampling campaigns.

// NaN must fail tolerance checks, so `!(x <= tol)` is used on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynatomic;
pub mod error;
pub mod lattes;
pub mod poly;
pub mod probe;
pub mod ratmap;
pub mod rootfind;
pub mod spectra;

pub use error::{Error, Result};
pub use poly::{Cplx, ExtFloat, HomForm2, Poly, Precision, Real};
pub use ratmap::{Moebius, ProjPoint, RationalMap};
