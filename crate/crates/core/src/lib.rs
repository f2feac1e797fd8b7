// `!(x <= tol)` comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aaa;
pub mod barycentric;
pub mod conformal;
pub mod continuum_aaa;
pub mod curve;
pub mod curves;
pub mod error;
pub mod linalg;
pub mod mfs;
pub mod pipeline;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
