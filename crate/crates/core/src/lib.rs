//! Bounds on the average causal effect in the instrumental scenario under
//! classical, quantum and non-signaling common causes.

pub mod bounds;
pub mod commands;
pub mod constructions;
pub mod matcore;
pub mod numfmt;
pub mod optimize;
pub mod polytopes;
pub mod quantum;
pub mod region;
pub mod rng;
pub mod scenario;
pub mod tolerances;
pub mod verify;
