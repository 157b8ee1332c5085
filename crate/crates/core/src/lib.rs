//! Simulation and closed-form analysis of two-hop relay routing in
//! intermittently connected mobile networks (ICMNs) whose node pairs meet
//! according to independent Poisson processes.
//!
//! The crate is organised around the data flow of an experiment:
//!
//! * [`meeting`] produces pairwise meeting schedules, either from the Poisson
//!   generator or (via [`mobility`]) from random waypoint / random direction
//!   trajectories.
//! * [`routing`] replays a schedule through the two-hop relay algorithm and
//!   collects throughput and delay statistics.
//! * [`analysis`] holds the closed-form capacity, delay and delay/throughput
//!   results the simulations are compared against.
//! * [`experiment`] drives parameter sweeps and writes reports.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod meeting;
pub mod mobility;
pub mod params;
pub mod queueing;
pub mod rng;
pub mod routing;
pub mod stats;

pub use error::{Error, Result};
pub use params::NetworkParams;
