//! Pulse-level simulation of a quantum register built on an Ising spin chain
//! with nearest and next-nearest neighbor couplings.
//!
//! The register is driven by rectangular RF pulses. Three evolution engines
//! are available:
//!
//! * **ideal** keeps only the resonant transitions of each pulse,
//! * **block** adds the near-resonant 2×2 blocks using their closed-form
//!   propagator,
//! * **full** integrates the complete interaction-picture Schrödinger
//!   equation, far-resonant couplings included.
//!
//! On top of the engines sit the two built-in protocols (factoring 4 and
//! three-qubit teleportation), the optimal Rabi frequency calculator and the
//! sweep / file-format machinery used by the `isingqc` command-line tool.

pub mod engine;
pub mod error;
pub mod protocols;
pub mod pulses;
pub mod register;
pub mod runner;
pub mod state;

pub use engine::{
    evolve_full, fidelity, oracle_evolve, run_sequence, FidelityTrace, IntegratorSettings, Mode,
    TraceSample,
};
pub use error::{Error, Result};
pub use protocols::{
    shor4_ideal_states, shor4_sequence, teleport_sequence, teleport_verify,
    x_register_probabilities, MeasurementReport, PulseSequence, TeleportReport,
};
pub use pulses::{
    apply_block, apply_ideal, block_propagator, classify_transitions, optimal_rabi, BlockClass,
    Mat2, Pulse, PulseAngle, TransitionBlock,
};
pub use register::{BasisIndex, ChainConfig, OffsetSet};
pub use state::StateVector;

pub use num_complex::Complex64;
