//! Numerical laboratory for the Weyl and t-quantizations on `R^n x R^n`.
//!
//! Symbols are sampled on uniform phase-space grids, quantized to dense
//! kernels, and measured in Schatten-von Neumann norms. Alongside sit the
//! Hormander-metric tools (dual metric, Planck's function, symplectic core),
//! the `S^{r,s}_{ρ,δ}` symbol classes and a set of harmonic-analysis
//! estimates, all wired into reproducible verification suites.

pub mod classes;
pub mod error;
pub mod fourier;
pub mod grid;
pub mod harmonic;
pub mod io;
pub mod jet;
pub mod metric;
pub mod quantization;
pub mod schatten;
pub mod smooth;
pub mod symbols;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{ConfigGrid, Field, FunctionField, Grid, PhaseGrid, SymbolField};
