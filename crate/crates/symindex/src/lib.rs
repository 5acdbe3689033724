//! Exact-arithmetic toolkit for the index iteration theory of symplectic
//! paths: basic normal forms and splitting numbers, the precise iteration
//! formulas and their Bott-type estimates, a crossing-count oracle for
//! concrete linear Hamiltonian paths, common-index-jump search by Kronecker
//! approximation, ceiling-congruence solving, and equivariant Morse-series
//! bookkeeping. The weakly non-resonant ellipsoid serves as executable
//! ground truth throughout.

pub mod iteration;
pub mod kronecker;
pub mod modsolve;
pub mod morse;
pub mod numeric;
pub mod oracle;
pub mod symplectic;

pub use numeric::{brackets, compare, BracketResult, NumericError, ScalarValue};
pub use symplectic::{BasicNormalForm, NormalFormDecomposition, SymplecticMatrix};
pub use iteration::{IterationResult, MeanIndex, PathIndexData};
