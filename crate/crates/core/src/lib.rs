//! Numerical verification of convexity statements for momentum maps:
//! linear symplectic involutions, local normal forms, cone duality,
//! Iwasawa decompositions and Kostant's nonlinear convexity theorem.

pub mod error;
pub mod numkit;
pub mod sampling;
pub mod geomcone;
pub mod iwasawa;
pub mod kostant;
pub mod leaf;
pub mod liecore;
pub mod localmodel;
pub mod symplin;

pub use error::{Error, Result};

use num_complex::Complex64;

pub type Mat = numkit::Mat<f64>;
pub type CMat = numkit::Mat<Complex64>;
pub type Tolerance = numkit::Tolerance<f64>;
