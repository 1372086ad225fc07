//! Clustered colorings of `Z^n`, chessboard crossings in cube grids, and
//! approximate level sets of Lipschitz maps `I^n -> R^{n-1}` that connect
//! opposite faces of the cube.

pub mod check;
pub mod coloring;
pub mod constants;
pub mod continuous;
pub mod discrete;
mod dsu;
pub mod error;
pub mod functions;
pub mod gen;
pub mod grid;
pub mod io;
pub mod lattice;
pub mod render;
pub mod steinhaus;
pub mod suite;

pub use error::{Error, Result};
