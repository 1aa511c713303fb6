//! Quality-driven agglomeration of polygonal meshes and virtual element
//! solvers for Poisson problems on single meshes and fracture networks.

pub mod agglomerate;
pub mod cli;
pub mod dfn;
pub mod error;
pub mod export;
pub mod mesh;
pub mod quality;
pub mod report;
pub mod vem;

pub use error::{Error, Result};
