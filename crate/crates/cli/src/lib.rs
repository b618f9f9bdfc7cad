//! Command-line harness for the `mediocre` protocols: instance files,
//! random generators, single runs and parallel sweeps.

pub mod args;
pub mod gen;
pub mod instance;
pub mod run;
pub mod sweep;

pub use gen::{generate, GenMode, GenParams};
pub use instance::Instance;
pub use run::{run, Protocol, RunParams, RunRecord, Verdict};
pub use sweep::SweepConfig;
