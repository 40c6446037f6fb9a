//! Dual-rail QDI adder generation, event-driven simulation and checking.

pub mod adders;
pub mod encoding;
pub mod logiclib;
pub mod metrics;
pub mod netlist;
pub mod qdicheck;
pub mod sim;
pub mod vectors;

pub use adders::{generate, AdderError, AdderSpec, Architecture};
pub use encoding::{DualRailWord, Protocol, RailPair};
pub use logiclib::{FullAdderFlavor, Indication};
pub use metrics::{MetricsRow, ReferenceTable};
pub use netlist::{GateKind, NetId, NetPair, Netlist};
pub use qdicheck::{Violation, ViolationKind};
pub use sim::{DelayModel, HandshakeTrace, Simulator};
pub use vectors::Vector;
