//! Circuit-level QRAM workbench: constructions for table lookup, an exact
//! sparse simulator, Monte-Carlo noise trajectories, counting and fidelity
//! bounds, and cost models for classical parallel matrix-vector products.

pub mod bounds;
pub mod builders;
pub mod circuit;
pub mod noise;
pub mod qla;
pub mod resources;
pub mod sim;
pub mod table;

pub use builders::{build, BuildError, BuilderKind, BuilderSpec, QramCircuit, UncomputeMode};
pub use circuit::{Circuit, CircuitError, Gate, GateKind, Packing, Qubit};
pub use resources::{count_resources, ResourceProfile, ResourceReport};
pub use table::BitTable;
