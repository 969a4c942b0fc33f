//! Front-end machinery shared by the command-line tool: the sequence file
//! format, Rabi-frequency sweeps, CSV / report emission and a seeded
//! measurement sampler.

pub mod output;
pub mod parse;
pub mod sample;
pub mod sweep;

pub use output::{emit_outputs, fmt_sig, RunArtifacts};
pub use parse::{parse_sequence_file, serialize_sequence, ParseError};
pub use sample::sample_outcomes;
pub use sweep::{local_maxima, sweep_rabi, sweep_rabi_with, Execution, SweepRow, SweepSpec};
