//! Hybrid-cloud resource allocation: synthetic workloads, a preprocessing
//! pipeline, a linear demand forecaster, a tabular Q-learning autoscaler and
//! a deterministic tick-driven simulator.
//!
//! The crate is `no_std` and needs only `alloc`; file formats and the
//! command line live in the `hcloud` crate.
#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod allocator;
pub mod error;
pub mod forecast;
pub mod model;
pub mod pipeline;
pub mod sim;
pub mod training;
pub mod workload;

pub use error::{Error, Result};
