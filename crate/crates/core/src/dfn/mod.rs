//! Conforming polygonal meshes and virtual element solves on discrete
//! fracture networks.

pub mod cut;
pub mod network;
pub mod network1;
pub mod solve;
pub mod stitch;
pub mod triangulate;

pub use network::{FractureNetwork, Trace};
pub use network1::network1;
pub use solve::{build_dfn_mesh, solve_network, DfnConfig, DfnMesh, DfnReport, NetworkSolution};
pub use triangulate::MeshTarget;
