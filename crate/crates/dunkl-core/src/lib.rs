pub mod dunkl_ops;
pub mod error;
pub mod function;
pub mod kernels;
pub mod lipschitz;
pub mod measure;
pub mod potentials;
pub mod quadrature;
pub mod specfun;
pub mod transforms;

pub use error::{Error, Result};
