//! Simulation and reinforcement learning for a two-layer multimedia system:
//! a video encoder with a pre-encoding buffer on top of a processor with
//! frequency scaling.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dms;
pub mod error;
pub mod learners;
pub mod mdp;
pub mod metrics;
pub mod trace;

pub use error::{Error, Result};
