//! Exact computations with graded maximal Cohen-Macaulay modules over an
//! algebra `A` that is finite and free over a weighted polynomial ring `R`.

pub mod algdata;
pub mod cli;
pub mod error;
pub mod exactla;
pub mod gradedcore;
pub mod homresolve;
pub mod homspace;
pub mod mcmtools;
pub mod mfgen;
pub mod polyparse;
pub mod problem;
pub mod repscheme;
pub mod tangent;

pub use error::{Error, Result};
