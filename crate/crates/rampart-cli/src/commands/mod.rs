//! The four harness commands.

pub mod generate;
pub mod rank;
pub mod simulate;
pub mod validate_theory;

pub use generate::{cmd_generate, GenPreset, GenerateOpts};
pub use rank::{cmd_rank, RankOpts};
pub use simulate::{cmd_simulate, run_simulate, SimulateOpts};
pub use validate_theory::{cmd_validate_theory, run_validate_theory, TheoryOpts};
