//! Alpert multiwavelets: exact refinement and wavelet matrices, identity
//! checkers, and a floating-point filter bank.

pub mod exact;
pub mod export;
pub mod fourier;
pub mod hypergeom;
pub mod legendre;
pub mod matrix;
pub mod recurrences;
pub mod refinement;
pub mod transform;
pub mod verify;
pub mod waveletsolve;

pub use exact::{Rational, SurdValue};
pub use matrix::{Matrix, Scalar};
pub use refinement::{build_coeff_matrices, CoeffMatrixPair, FormulaPath};
pub use transform::{analyze, synthesize, FilterBank, SignalTree};
pub use verify::{run_verification, VerifyReport, VerifyScope};
pub use waveletsolve::{build_wavelet_matrices, WaveletMatrixPair};

pub type ExactMatrix = Matrix<SurdValue>;
pub type FilterBank64 = FilterBank<f64>;
pub type FilterBank32 = FilterBank<f32>;
pub type SignalTree64 = SignalTree<f64>;
pub type SignalTree32 = SignalTree<f32>;
