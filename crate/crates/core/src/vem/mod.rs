//! Virtual element discretization of `-div(K grad u) = f` for orders 1 to 3.

pub mod assembly;
pub mod element;
pub mod monomials;
pub mod problems;
pub mod quadrature;
pub mod solve;
pub mod sparse;

pub use assembly::{mesh_dofs, number_dofs, CellDofs, DofMap};
pub use element::VemElement;
pub use solve::{error_norms, solve_poisson, Discretization, ErrorNorms, SolveOptions};
