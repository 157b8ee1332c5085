use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::stats::{Delivery, QueueSample, SimulationStats};
use super::TrafficParams;
use crate::error::{Error, Result};
use crate::meeting::{MeetingEvent, MeetingSchedule};
use crate::params::NetworkParams;
use crate::rng::{self, Purpose};

/// Number of evenly spaced queue-length snapshots taken per run.
const QUEUE_SAMPLES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Packet {
    pub id: u64,
    /// Source node of the packet's flow.
    pub flow: u32,
    pub created_at: f64,
    /// When the packet left its source queue.
    pub left_source_at: Option<f64>,
    pub delivered_at: Option<f64>,
    /// Relay that carried the packet, for two-hop deliveries.
    pub relay: Option<u32>,
    /// Transmissions so far.
    pub hops: u8,
}

impl Packet {
    pub fn new(id: u64, flow: usize, created_at: f64) -> Self {
        Packet {
            id,
            flow: flow as u32,
            created_at,
            left_source_at: None,
            delivered_at: None,
            relay: None,
            hops: 0,
        }
    }
}

/// Queues held by one node.
#[derive(Clone, Debug, Default)]
pub struct NodeState {
    pub source_queue: VecDeque<Packet>,
    /// Relay queues indexed by flow. Only the `n − 2` flows for which this
    /// node is neither source nor destination are ever populated.
    pub relay_queues: Vec<VecDeque<Packet>>,
}

impl NodeState {
    pub fn new(n: usize) -> Self {
        NodeState {
            source_queue: VecDeque::new(),
            relay_queues: vec![VecDeque::new(); n],
        }
    }

    pub fn relayed_len(&self) -> usize {
        self.relay_queues.iter().map(VecDeque::len).sum()
    }
}

/// Which branch of the routing rule a meeting took.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transmission {
    SourceToDestination,
    SourceToRelay,
    RelayToDestination,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Moved {
    /// The selected queue was empty.
    Idle,
    /// A packet was appended to the receiver's relay queue.
    Relayed(u64),
    Delivered(Packet),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeetingOutcome {
    pub kind: Transmission,
    pub moved: Moved,
}

/// Applies the two-hop routing rule to one meeting.
///
/// If the receiver is the transmitter's destination, the head of the
/// transmitter's source queue is delivered. Otherwise the transmitter flips a
/// fair coin: heads hands the head of its source queue to the receiver as
/// relay, tails delivers the head of its relay queue for the flow destined to
/// the receiver. At most one packet moves; an empty queue means idle.
pub fn handle_meeting<R: Rng + ?Sized>(
    event: &MeetingEvent,
    states: &mut [NodeState],
    traffic: &TrafficParams,
    coin: &mut R,
) -> MeetingOutcome {
    let tx = event.transmitter();
    let rx = event.receiver();
    let time = event.time;

    if traffic.destination(tx) == rx {
        let moved = match states[tx].source_queue.pop_front() {
            Some(mut p) => {
                p.left_source_at = Some(time);
                p.delivered_at = Some(time);
                p.hops = 1;
                Moved::Delivered(p)
            }
            None => Moved::Idle,
        };
        return MeetingOutcome {
            kind: Transmission::SourceToDestination,
            moved,
        };
    }

    if coin.random::<bool>() {
        let moved = match states[tx].source_queue.pop_front() {
            Some(mut p) => {
                p.left_source_at = Some(time);
                p.relay = Some(rx as u32);
                p.hops = 1;
                let id = p.id;
                states[rx].relay_queues[tx].push_back(p);
                Moved::Relayed(id)
            }
            None => Moved::Idle,
        };
        MeetingOutcome {
            kind: Transmission::SourceToRelay,
            moved,
        }
    } else {
        let flow = traffic.flow_to(rx);
        let moved = match states[tx].relay_queues[flow].pop_front() {
            Some(mut p) => {
                p.delivered_at = Some(time);
                p.hops = 2;
                Moved::Delivered(p)
            }
            None => Moved::Idle,
        };
        MeetingOutcome {
            kind: Transmission::RelayToDestination,
            moved,
        }
    }
}

#[derive(PartialEq)]
struct NextArrival {
    time: f64,
    node: usize,
}

impl Eq for NextArrival {}

impl Ord for NextArrival {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for NextArrival {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Runs two-hop relay routing over `schedule` with Poisson arrivals at every
/// source.
///
/// Arrivals and meetings are processed in global time order; an arrival at
/// exactly the time of a meeting is processed first. Delays are recorded for
/// packets created at or after `warmup`, and throughput counts deliveries in
/// `[warmup, horizon]`. Arrival streams derive from `traffic.seed` and routing
/// coins from the schedule seed, so each can be varied independently.
pub fn simulate(
    params: &NetworkParams,
    traffic: &TrafficParams,
    schedule: &MeetingSchedule,
    warmup: f64,
) -> Result<SimulationStats> {
    params.validate()?;
    let n = params.n;
    if schedule.n != n {
        return Err(Error::Config(format!(
            "schedule has {} nodes but the network has {n}",
            schedule.n
        )));
    }
    if traffic.n() != n {
        return Err(Error::Config(format!(
            "traffic pattern covers {} nodes but the network has {n}",
            traffic.n()
        )));
    }
    let horizon = schedule.horizon;
    if !(warmup >= 0.0 && warmup < horizon) {
        return Err(Error::param(format!(
            "warmup {warmup} must lie in [0, {horizon})"
        )));
    }

    let inter_arrival = Exp::new(traffic.lambda).map_err(|_| {
        Error::param(format!(
            "arrival rate must be positive (got {})",
            traffic.lambda
        ))
    })?;
    let mut arrival_rngs: Vec<_> = (0..n)
        .map(|i| rng::stream(traffic.seed, Purpose::Arrivals, i as u64))
        .collect();
    let mut coin = rng::stream(schedule.seed, Purpose::RoutingCoin, 0);

    let mut arrivals = BinaryHeap::with_capacity(n);
    for (node, r) in arrival_rngs.iter_mut().enumerate() {
        arrivals.push(NextArrival {
            time: inter_arrival.sample(r),
            node,
        });
    }

    let mut states: Vec<NodeState> = (0..n).map(|_| NodeState::new(n)).collect();
    let mut stats = SimulationStats::new(n, traffic, schedule, warmup);
    let mut next_id = 0u64;
    let sample_every = horizon / QUEUE_SAMPLES as f64;
    let mut next_sample = sample_every;
    let mut queued_source = 0u64;
    let mut queued_relay = 0u64;

    let mut take_samples = |upto: f64, src: u64, rel: u64, stats: &mut SimulationStats| {
        while next_sample <= upto && next_sample <= horizon {
            stats.queue_samples.push(QueueSample {
                time: next_sample,
                source: src,
                relay: rel,
            });
            next_sample += sample_every;
        }
    };

    let mut admit_until = |limit: f64,
                           states: &mut [NodeState],
                           stats: &mut SimulationStats,
                           queued_source: &mut u64| {
        while let Some(top) = arrivals.peek() {
            if top.time > limit {
                break;
            }
            let NextArrival { time, node } = arrivals.pop().unwrap();
            states[node]
                .source_queue
                .push_back(Packet::new(next_id, node, time));
            next_id += 1;
            *queued_source += 1;
            stats.generated[node] += 1;
            let next = time + inter_arrival.sample(&mut arrival_rngs[node]);
            arrivals.push(NextArrival { time: next, node });
        }
    };

    for event in schedule.events() {
        admit_until(event.time, &mut states, &mut stats, &mut queued_source);
        take_samples(event.time, queued_source, queued_relay, &mut stats);
        let outcome = handle_meeting(event, &mut states, traffic, &mut coin);
        let tx = event.transmitter();
        match outcome.kind {
            Transmission::SourceToDestination => stats.direct_opportunities[tx] += 1,
            Transmission::SourceToRelay => stats.relay_opportunities[tx] += 1,
            Transmission::RelayToDestination => {}
        }
        match outcome.moved {
            Moved::Idle => stats.idle += 1,
            Moved::Relayed(_) => {
                stats.source_to_relay += 1;
                stats.relay_inputs[event.receiver() * n + tx] += 1;
                queued_source -= 1;
                queued_relay += 1;
            }
            Moved::Delivered(p) => {
                if p.hops == 1 {
                    stats.source_to_destination += 1;
                    queued_source -= 1;
                } else {
                    stats.relay_to_destination += 1;
                    queued_relay -= 1;
                }
                stats.record_delivery(Delivery::from_packet(&p));
            }
        }
        stats.meetings += 1;
    }
    admit_until(horizon, &mut states, &mut stats, &mut queued_source);
    take_samples(horizon, queued_source, queued_relay, &mut stats);

    stats.residual_source = queued_source;
    stats.residual_relay = queued_relay;
    debug_assert_eq!(
        queued_source,
        states
            .iter()
            .map(|s| s.source_queue.len() as u64)
            .sum::<u64>()
    );
    debug_assert_eq!(
        queued_relay,
        states.iter().map(|s| s.relayed_len() as u64).sum::<u64>()
    );
    Ok(stats)
}
