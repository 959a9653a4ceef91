//! Symmetric tensor polynomials in D dimensions, orthonormal under a radial
//! weight, for orders N = 0..4.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coefficients;
pub mod error;
pub mod expansion;
pub mod moments;
pub mod polynomials;
pub mod quadrature;
pub mod sampling;
pub mod special;
pub mod tensor;
pub mod verification;
pub mod weights;

pub use error::{Error, Result};
