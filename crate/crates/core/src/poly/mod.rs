//! Complex scalars, univariate polynomials and homogeneous bivariate forms.

mod banded;
pub mod cplx;
mod ext;
mod fft;
mod form;
mod resultant;
mod scalar;
mod univariate;

pub use cplx::Cplx;
pub use ext::ExtFloat;
pub(crate) use form::powers as form_powers;
pub use form::HomForm2;
pub use resultant::resultant;
pub use scalar::{Precision, Real};
pub use univariate::Poly;
