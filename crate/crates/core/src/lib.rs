//! Trace-driven resource estimation and design-space exploration for
//! heterogeneous fault-tolerant quantum architectures.
//!
//! The pipeline: parse a Clifford+T circuit ([`frontend`]), synthesize it into
//! a layered FT workload ([`workload`]), describe an architecture
//! ([`archmodel`]), replay the workload against it ([`engine`]), and check the
//! outcome against closed-form models ([`analysis`]).

pub mod analysis;
pub mod archmodel;
pub mod engine;
pub mod error;
pub mod frontend;
pub mod workload;

pub use error::{Error, Result};
