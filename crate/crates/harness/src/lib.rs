//! Monte-Carlo simulation and benchmarking on top of `polar-sym`.
//!
//! [`simulate`] runs independent encode → channel → decode rounds and
//! counts frame and bit errors; [`bench_scaling`] times decoders over a grid
//! of block lengths and list sizes. Every trial draws from its own ChaCha8
//! stream, so results are identical however rayon schedules the work.

pub mod bench;
pub mod error;
pub mod report;
pub mod sim;

pub use bench::{bench_scaling, BenchConfig, BenchRow};
pub use error::{HarnessError, Result};
pub use report::{csv_header, ResultRow};
pub use sim::{design_epsilon, simulate, Mode, SimConfig, SimResult};
