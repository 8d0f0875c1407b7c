//! Exact finite-dimensional computations for noncommutative spectra:
//! homotopical epimorphisms between algebras, their localization lattices,
//! the frames and point spaces built from them, and descent checks.

pub mod error;
pub mod exactlin;
pub mod algcore;
pub mod modhom;
pub mod freeprod;
pub mod epiloc;
pub mod topos;
pub mod descent;
pub mod fixtures;

pub use error::{Error, Result};
