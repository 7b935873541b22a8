//! Hermitian geometry of almost abelian Lie algebras.
//!
//! Closed formulas for Lee forms, Ricci forms, curvature and flow
//! endomorphisms in terms of the data `(a, v, A)`, alongside a brute-force
//! exterior calculus that serves as an independent check of each formula.

pub mod catalog;
pub mod connections;
pub mod error;
pub mod exterior;
pub mod flows;
pub mod hermitian;
pub mod io;
pub mod lie;
pub mod linalg;
pub mod samples;
pub mod scalar;

pub use error::{Error, Result};
pub use exterior::GradedForm;
pub use lie::{AlmostAbelianData, HermitianStructure, LieAlgebra};
pub use linalg::Mat;
pub use scalar::{rat, Rational, Scalar, C64};
