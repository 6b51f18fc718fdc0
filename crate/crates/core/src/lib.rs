//! Multi-programming scheduler for modular trapped-ion (QCCD) devices.
//!
//! Circuits are rectangles on a qubit × layer grid; a device is a row of
//! traps. The packers in [`packing`] place a queue of circuits onto that grid,
//! [`cluster`] spreads a queue over several devices first, and [`metrics`]
//! scores the result.

pub mod cluster;
pub mod formats;
pub mod layering;
pub mod metrics;
pub mod model;
pub mod packing;
pub mod qasm;
pub mod queue;
pub mod render;

pub use model::{
    Algorithm, Batch, Circuit, CircuitId, DeviceTopology, Gate, GateKind, Placement, Schedule,
    WorkerAssignment,
};
