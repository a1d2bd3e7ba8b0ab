//! Linear algebra on n-vector spaces: tuples of vector spaces over one field,
//! operated on componentwise, with exact arithmetic over `Q` and `Z_p` and
//! tolerance-based arithmetic over `R`.
//!
//! Beyond the componentwise core (`nspace`, `nmatrix`, `ntransform`) the crate
//! covers eigen-theory (`spectral`), inner-product geometry (`inner`), Markov
//! n-chains (`markov`) and Leontief input-output n-models (`leontief`).

pub mod arith;
pub mod error;
pub mod exec;
pub mod field;
pub mod format;
pub mod inner;
pub mod leontief;
pub mod markov;
pub mod matrix;
pub mod nmatrix;
pub mod nspace;
pub mod ntransform;
pub mod numeric;
pub mod poly;
pub mod spectral;

pub use error::{Error, ParseError, Result};
pub use field::{Field, Scalar};
pub use matrix::Matrix;
pub use nmatrix::NMatrix;
pub use nspace::{NSubset, NVector};
pub use ntransform::NLinearMap;
pub use poly::Polynomial;
