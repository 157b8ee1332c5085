use std::io::Write;

use super::sim::Packet;
use super::TrafficParams;
use crate::error::{Error, Result};
use crate::meeting::MeetingSchedule;
use crate::stats::Summary;

/// One delivered packet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Delivery {
    pub packet_id: u64,
    pub flow: u32,
    pub created_at: f64,
    pub left_source_at: f64,
    pub delivered_at: f64,
    pub relay: Option<u32>,
    pub hops: u8,
}

impl Delivery {
    pub(super) fn from_packet(p: &Packet) -> Self {
        Delivery {
            packet_id: p.id,
            flow: p.flow,
            created_at: p.created_at,
            left_source_at: p.left_source_at.expect("delivered packet left its source"),
            delivered_at: p
                .delivered_at
                .expect("delivered packet has a delivery time"),
            relay: p.relay,
            hops: p.hops,
        }
    }

    pub fn delay(&self) -> f64 {
        self.delivered_at - self.created_at
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QueueSample {
    pub time: f64,
    /// Packets waiting in all source queues.
    pub source: u64,
    /// Packets waiting in all relay queues.
    pub relay: u64,
}

impl QueueSample {
    pub fn total(&self) -> u64 {
        self.source + self.relay
    }
}

/// Counters and per-packet records from one routing run.
///
/// Meeting counters cover the whole horizon. Throughput and delay use the
/// measurement window `[warmup, horizon]`.
#[derive(Clone, Debug)]
pub struct SimulationStats {
    pub n: usize,
    pub lambda: f64,
    pub warmup: f64,
    pub horizon: f64,
    pub traffic_seed: u64,
    pub schedule_seed: u64,
    pub permutation: Vec<usize>,
    /// Flow reported by [`measured_throughput`].
    pub measured_flow: usize,
    /// Packets generated per flow over the whole horizon.
    pub generated: Vec<u64>,
    /// Packets delivered per flow within the measurement window.
    pub delivered: Vec<u64>,
    /// Every delivery over the whole horizon, in delivery order.
    pub deliveries: Vec<Delivery>,
    pub source_to_destination: u64,
    pub source_to_relay: u64,
    pub relay_to_destination: u64,
    pub idle: u64,
    /// Total meetings `Y(T)`.
    pub meetings: u64,
    /// Per node: meetings where it transmitted to its own destination.
    pub direct_opportunities: Vec<u64>,
    /// Per node: meetings where it transmitted to a relay and drew heads.
    pub relay_opportunities: Vec<u64>,
    /// `relay_inputs[relay * n + flow]`: packets handed to `relay` for `flow`.
    pub relay_inputs: Vec<u64>,
    pub residual_source: u64,
    pub residual_relay: u64,
    pub queue_samples: Vec<QueueSample>,
}

impl SimulationStats {
    pub(super) fn new(
        n: usize,
        traffic: &TrafficParams,
        schedule: &MeetingSchedule,
        warmup: f64,
    ) -> Self {
        SimulationStats {
            n,
            lambda: traffic.lambda,
            warmup,
            horizon: schedule.horizon,
            traffic_seed: traffic.seed,
            schedule_seed: schedule.seed,
            permutation: traffic.permutation().to_vec(),
            measured_flow: 0,
            generated: vec![0; n],
            delivered: vec![0; n],
            deliveries: Vec::new(),
            source_to_destination: 0,
            source_to_relay: 0,
            relay_to_destination: 0,
            idle: 0,
            meetings: 0,
            direct_opportunities: vec![0; n],
            relay_opportunities: vec![0; n],
            relay_inputs: vec![0; n * n],
            residual_source: 0,
            residual_relay: 0,
            queue_samples: Vec::new(),
        }
    }

    pub(super) fn record_delivery(&mut self, d: Delivery) {
        if d.delivered_at >= self.warmup {
            self.delivered[d.flow as usize] += 1;
        }
        self.deliveries.push(d);
    }

    pub fn window(&self) -> f64 {
        self.horizon - self.warmup
    }

    /// Deliveries per second of `flow` within the measurement window.
    pub fn throughput(&self, flow: usize) -> f64 {
        self.delivered[flow] as f64 / self.window()
    }

    /// Per-flow throughput averaged over all flows.
    pub fn mean_throughput(&self) -> f64 {
        self.delivered.iter().sum::<u64>() as f64 / (self.n as f64 * self.window())
    }

    /// Deliveries of packets created inside the measurement window.
    pub fn measured_deliveries(&self) -> impl Iterator<Item = &Delivery> + '_ {
        let warmup = self.warmup;
        self.deliveries
            .iter()
            .filter(move |d| d.created_at >= warmup)
    }

    /// End-to-end delays of packets created inside the measurement window.
    pub fn delays(&self) -> impl Iterator<Item = f64> + '_ {
        self.measured_deliveries().map(Delivery::delay)
    }

    pub fn delay_summary(&self) -> Summary {
        self.delays().collect()
    }

    pub fn flow_delay_summary(&self, flow: usize) -> Summary {
        self.measured_deliveries()
            .filter(|d| d.flow as usize == flow)
            .map(Delivery::delay)
            .collect()
    }

    pub fn mean_delay(&self) -> f64 {
        self.delay_summary().mean()
    }

    pub fn total_generated(&self) -> u64 {
        self.generated.iter().sum()
    }

    /// `generated = delivered + queued` over the whole horizon.
    pub fn is_conserved(&self) -> bool {
        self.total_generated()
            == self.deliveries.len() as u64 + self.residual_source + self.residual_relay
    }

    /// Meeting rate at which `node` gets a chance to serve its source queue.
    pub fn service_opportunity_rate(&self, node: usize) -> (f64, f64) {
        (
            self.direct_opportunities[node] as f64 / self.horizon,
            self.relay_opportunities[node] as f64 / self.horizon,
        )
    }

    pub fn write_report(&self, mut out: impl Write) -> Result<()> {
        let delay = self.delay_summary();
        let lines: Vec<(&str, String)> = vec![
            ("n", self.n.to_string()),
            ("lambda", self.lambda.to_string()),
            ("horizon", self.horizon.to_string()),
            ("warmup", self.warmup.to_string()),
            ("traffic_seed", self.traffic_seed.to_string()),
            ("schedule_seed", self.schedule_seed.to_string()),
            (
                "permutation",
                self.permutation
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("measured_flow", self.measured_flow.to_string()),
            (
                "throughput",
                self.throughput(self.measured_flow).to_string(),
            ),
            ("mean_throughput", self.mean_throughput().to_string()),
            ("mean_delay", delay.mean().to_string()),
            ("delay_stderr", delay.std_error().to_string()),
            ("delay_samples", delay.count().to_string()),
            ("generated", self.total_generated().to_string()),
            ("delivered", self.deliveries.len().to_string()),
            ("residual_source", self.residual_source.to_string()),
            ("residual_relay", self.residual_relay.to_string()),
            ("meetings", self.meetings.to_string()),
            (
                "source_to_destination",
                self.source_to_destination.to_string(),
            ),
            ("source_to_relay", self.source_to_relay.to_string()),
            (
                "relay_to_destination",
                self.relay_to_destination.to_string(),
            ),
            ("idle", self.idle.to_string()),
        ];
        for (k, v) in lines {
            writeln!(out, "{k} = {v}")?;
        }
        Ok(())
    }

    /// Per-packet CSV with header `packet_id,flow,created_at,delivered_at,hops`.
    pub fn write_delays_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "packet_id,flow,created_at,delivered_at,hops")?;
        for d in &self.deliveries {
            writeln!(
                out,
                "{},{},{},{},{}",
                d.packet_id, d.flow, d.created_at, d.delivered_at, d.hops
            )?;
        }
        Ok(())
    }
}

/// Throughput of the designated flow over the measurement window.
pub fn measured_throughput(stats: &SimulationStats) -> Result<f64> {
    if !(stats.window() > 0.0) {
        return Err(Error::param("measurement window must be positive"));
    }
    Ok(stats.throughput(stats.measured_flow))
}
