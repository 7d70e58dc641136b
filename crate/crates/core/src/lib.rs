//! Integration of finite-dimensional Lie algebra representations to local
//! group representations.
//!
//! The crate models a real Lie algebra by structure constants, multiplies
//! near the identity with the truncated Dynkin series, factorizes chart
//! points along a direct-sum decomposition, evaluates right logarithmic
//! derivatives and builds `π(z) = e^{α(z_1)} ⋯ e^{α(z_n)}` from a matrix
//! representation `α`. Every identity relating these objects is exposed as
//! a residual so that it can be certified numerically.
//!
//! All numerical code is generic over [`Real`] (`f32`/`f64`); the `*64`
//! aliases below fix the double-precision instantiation used by the
//! catalog, the file formats and the command-line tool.

pub mod algebra;
pub mod bch;
pub mod catalog;
pub mod diff;
pub mod error;
pub mod factorization;
pub mod integrator;
pub mod io;
pub mod linalg;
pub mod logderiv;
pub mod quadrature;
pub mod oracle;
pub mod report;
pub mod representation;
pub mod scalar;
pub mod suite;

pub use algebra::{AlgebraVector, Decomposition, LieAlgebra, LinearMap, StructureConstant};
pub use bch::{bch, bch_differential_at_zero_right, bch_multi, BchConfig, BchProduct};
pub use error::{Error, Result};
pub use report::{CheckRecord, VerificationReport};
pub use scalar::Real;

pub type LieAlgebra64 = LieAlgebra<f64>;
pub type AlgebraVector64 = AlgebraVector<f64>;
pub type Decomposition64 = Decomposition<f64>;
pub type LinearMap64 = LinearMap<f64>;
pub type BchConfig64 = BchConfig<f64>;
