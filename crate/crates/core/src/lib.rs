//! Exact computations with trifiltered cochain complexes: spectral sequences of
//! filtered complexes, C-Hodge complexes and the Hodge structures they induce
//! on cohomology, and the descent machinery over finite posets used to build
//! such complexes.

pub mod cli;
pub mod descent;
pub mod error;
pub mod filtcx;
pub mod finspace;
pub mod generate;
pub mod hodge;
pub mod json;
pub mod qlinalg;
pub mod rational;
pub mod specseq;

pub use error::{Error, Result};
pub use qlinalg::{Field, Gauss, Matrix, Quotient, Subspace, Q};
