//! Two-hop relay routing over a meeting schedule.
//!
//! Every node is the source of one flow, destined to `φ(node)`. A node keeps
//! one FIFO source queue and one FIFO relay queue for each flow it may relay.
//! At each meeting the transmitter either delivers its own traffic directly,
//! hands a packet to the receiver as relay, or delivers a relayed packet to
//! the receiver, so every packet travels at most two hops.

mod sim;
mod stats;
mod traffic;

pub use sim::{handle_meeting, simulate, MeetingOutcome, Moved, NodeState, Packet, Transmission};
pub use stats::{measured_throughput, Delivery, QueueSample, SimulationStats};
pub use traffic::{sample_derangement, TrafficParams};
