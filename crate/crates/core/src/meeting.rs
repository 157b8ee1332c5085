//! Pairwise meeting events and schedules.
//!
//! A [`MeetingSchedule`] is the only thing the routing simulator consumes, so
//! Poisson-generated and trace-derived meetings are interchangeable. Both
//! serialize to the same line-oriented `icmn-meetings v1` text format.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::params::{pair_count, pair_index, pairs, NetworkParams};
use crate::rng::{self, Purpose, StreamRng};

pub const SCHEDULE_MAGIC: &str = "icmn-meetings v1";

/// One instantaneous contact between two nodes, carrying one packet
/// transmission opportunity from `transmitter` to the other node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeetingEvent {
    pub time: f64,
    /// Smaller node id of the pair.
    pub a: u32,
    /// Larger node id of the pair.
    pub b: u32,
    pub transmitter: u32,
    pub seq: u64,
}

impl MeetingEvent {
    pub fn new(time: f64, i: usize, j: usize, transmitter: usize, seq: u64) -> Self {
        debug_assert!(i != j && (transmitter == i || transmitter == j));
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        MeetingEvent {
            time,
            a: a as u32,
            b: b as u32,
            transmitter: transmitter as u32,
            seq,
        }
    }

    pub fn transmitter(&self) -> usize {
        self.transmitter as usize
    }

    pub fn receiver(&self) -> usize {
        if self.transmitter == self.a {
            self.b as usize
        } else {
            self.a as usize
        }
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.a as usize, self.b as usize)
    }

    fn order(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.seq.cmp(&other.seq))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeetingSchedule {
    pub n: usize,
    pub horizon: f64,
    /// Seed the schedule was generated (or its transmitter coins flipped) with.
    pub seed: u64,
    events: Vec<MeetingEvent>,
}

impl MeetingSchedule {
    /// Builds a schedule from events, validating the ordering and range
    /// invariants.
    pub fn new(n: usize, horizon: f64, seed: u64, events: Vec<MeetingEvent>) -> Result<Self> {
        if n < 2 {
            return Err(Error::param(format!(
                "schedule needs at least 2 nodes (got {n})"
            )));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::param(format!(
                "horizon must be positive (got {horizon})"
            )));
        }
        for (k, e) in events.iter().enumerate() {
            if !(e.time >= 0.0 && e.time <= horizon) {
                return Err(Error::param(format!(
                    "event {k} time {} outside [0, {horizon}]",
                    e.time
                )));
            }
            if e.a >= e.b || e.b as usize >= n {
                return Err(Error::param(format!(
                    "event {k} has invalid pair ({}, {})",
                    e.a, e.b
                )));
            }
            if e.transmitter != e.a && e.transmitter != e.b {
                return Err(Error::param(format!("event {k} transmitter not in pair")));
            }
            if k > 0 && events[k - 1].order(e) != Ordering::Less {
                return Err(Error::param(format!("event {k} out of (time, seq) order")));
            }
        }
        Ok(MeetingSchedule {
            n,
            horizon,
            seed,
            events,
        })
    }

    pub fn events(&self) -> &[MeetingEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Event times of one unordered pair, in order.
    pub fn pair_times(&self, i: usize, j: usize) -> Vec<f64> {
        let (a, b) = if i < j {
            (i as u32, j as u32)
        } else {
            (j as u32, i as u32)
        };
        self.events
            .iter()
            .filter(|e| e.a == a && e.b == b)
            .map(|e| e.time)
            .collect()
    }

    /// Gaps between consecutive meetings of one pair.
    pub fn inter_meeting_times(&self, i: usize, j: usize) -> Vec<f64> {
        self.pair_times(i, j)
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect()
    }

    /// Number of events for every pair, indexed by [`pair_index`].
    pub fn pair_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; pair_count(self.n)];
        for e in &self.events {
            counts[pair_index(self.n, e.a as usize, e.b as usize)] += 1;
        }
        counts
    }

    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        writeln!(
            out,
            "{SCHEDULE_MAGIC} n={} horizon={} seed={}",
            self.n, self.horizon, self.seed
        )?;
        let mut line = String::with_capacity(64);
        for e in &self.events {
            line.clear();
            let _ = writeln!(line, "{} {} {} {}", e.time, e.a, e.b, e.transmitter);
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("schedule text is ASCII")
    }

    /// Parses the `icmn-meetings v1` format. Sequence numbers are assigned in
    /// line order.
    pub fn read_from(input: impl BufRead) -> Result<Self> {
        let mut lines = input.lines();
        let header = match lines.next() {
            Some(line) => line?,
            None => return Err(Error::parse(1, "empty schedule file")),
        };
        let fields = parse_header(&header, SCHEDULE_MAGIC, &["n", "horizon", "seed"])
            .map_err(|m| Error::parse(1, m))?;
        let n: usize = parse_field(&fields[0], "n", 1)?;
        let horizon: f64 = parse_field(&fields[1], "horizon", 1)?;
        let seed: u64 = parse_field(&fields[2], "seed", 1)?;

        let mut events = Vec::new();
        for (k, line) in lines.enumerate() {
            let lineno = k + 2;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(Error::parse(
                    lineno,
                    format!("expected 4 fields, found {}", parts.len()),
                ));
            }
            let time: f64 = parse_field(parts[0], "time", lineno)?;
            let i: usize = parse_field(parts[1], "node", lineno)?;
            let j: usize = parse_field(parts[2], "node", lineno)?;
            let tx: usize = parse_field(parts[3], "transmitter", lineno)?;
            if i == j || i >= n || j >= n {
                return Err(Error::parse(
                    lineno,
                    format!("invalid node pair ({i}, {j}) for n={n}"),
                ));
            }
            if tx != i && tx != j {
                return Err(Error::parse(
                    lineno,
                    format!("transmitter {tx} not in pair ({i}, {j})"),
                ));
            }
            events.push(MeetingEvent::new(time, i, j, tx, events.len() as u64));
        }
        MeetingSchedule::new(n, horizon, seed, events).map_err(|e| match e {
            Error::Parameter(m) => Error::parse(0, m),
            other => other,
        })
    }
}

/// Splits `<magic> k1=v1 k2=v2 ...` and returns the values for `keys` in order.
pub(crate) fn parse_header(
    line: &str,
    magic: &str,
    keys: &[&str],
) -> std::result::Result<Vec<String>, String> {
    let rest = line
        .strip_prefix(magic)
        .ok_or_else(|| format!("expected header starting with `{magic}`"))?;
    let mut values = vec![None; keys.len()];
    for tok in rest.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| format!("malformed header field `{tok}`"))?;
        let idx = keys
            .iter()
            .position(|&key| key == k)
            .ok_or_else(|| format!("unknown header field `{k}`"))?;
        values[idx] = Some(v.to_string());
    }
    values
        .into_iter()
        .zip(keys)
        .map(|(v, k)| v.ok_or_else(|| format!("missing header field `{k}`")))
        .collect()
}

pub(crate) fn parse_field<T: std::str::FromStr>(s: &str, what: &str, line: usize) -> Result<T> {
    s.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{s}`")))
}

/// Draws one exponential inter-meeting time with rate `beta`.
pub fn sample_inter_meeting<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> Result<f64> {
    let exp = Exp::new(beta)
        .ok()
        .filter(|_| beta > 0.0 && beta.is_finite())
        .ok_or_else(|| Error::param(format!("meeting rate must be positive (got {beta})")))?;
    Ok(exp.sample(rng))
}

/// Aggregate meeting rate `n(n-1)β/2` over all unordered pairs.
pub fn total_meeting_rate(n: usize, beta: f64) -> f64 {
    pair_count(n) as f64 * beta
}

#[derive(PartialEq)]
struct Pending {
    time: f64,
    pair: usize,
}

impl Eq for Pending {}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap.
        other
            .time
            .total_cmp(&self.time)
            .then(other.pair.cmp(&self.pair))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Generates independent Poisson meeting processes of rate `params.beta` for
/// every unordered pair on `[0, horizon]`, merged into one time-ordered
/// schedule.
///
/// Each pair draws its inter-meeting times and its transmitter coins from its
/// own seeded stream, so the schedule is reproducible bit for bit.
pub fn generate_schedule(
    params: &NetworkParams,
    horizon: f64,
    seed: u64,
) -> Result<MeetingSchedule> {
    params.validate()?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param(format!(
            "horizon must be positive (got {horizon})"
        )));
    }
    let n = params.n;
    let pair_list: Vec<(usize, usize)> = pairs(n).collect();
    let mut gaps: Vec<StreamRng> = (0..pair_list.len())
        .map(|p| rng::stream(seed, Purpose::PairMeetings, p as u64))
        .collect();
    let mut coins: Vec<StreamRng> = (0..pair_list.len())
        .map(|p| rng::stream(seed, Purpose::PairTransmitter, p as u64))
        .collect();

    let mut heap = BinaryHeap::with_capacity(pair_list.len());
    for (p, g) in gaps.iter_mut().enumerate() {
        let t = sample_inter_meeting(params.beta, g)?;
        if t <= horizon {
            heap.push(Pending { time: t, pair: p });
        }
    }

    let expected = params.total_meeting_rate() * horizon;
    let mut events = Vec::with_capacity((expected * 1.01) as usize + 16);
    while let Some(Pending { time, pair }) = heap.pop() {
        let (i, j) = pair_list[pair];
        let tx = if coins[pair].random::<bool>() { i } else { j };
        events.push(MeetingEvent::new(time, i, j, tx, events.len() as u64));
        let next = time + sample_inter_meeting(params.beta, &mut gaps[pair])?;
        if next <= horizon {
            heap.push(Pending { time: next, pair });
        }
    }
    MeetingSchedule::new(n, horizon, seed, events)
}

/// Per-pair meeting rate estimate from an observed schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateEstimate {
    pub beta: f64,
    pub events: usize,
    /// Set when too few events were observed for the estimate to mean much.
    pub low_sample: bool,
}

/// Minimum event count below which [`RateEstimate::low_sample`] is set.
pub const LOW_SAMPLE_EVENTS: usize = 100;

/// Estimates the pairwise meeting rate as `2|E| / (n(n-1) T)`.
pub fn estimate_beta(schedule: &MeetingSchedule) -> RateEstimate {
    let events = schedule.len();
    let beta = if events == 0 {
        0.0
    } else {
        events as f64 / (pair_count(schedule.n) as f64 * schedule.horizon)
    };
    if events < LOW_SAMPLE_EVENTS {
        log::warn!("rate estimate based on only {events} meetings");
    }
    RateEstimate {
        beta,
        events,
        low_sample: events < LOW_SAMPLE_EVENTS,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, beta: f64) -> NetworkParams {
        NetworkParams::poisson(n, beta).unwrap()
    }

    #[test]
    fn inter_meeting_moments() {
        let mut rng = rng::stream(11, Purpose::PairMeetings, 0);
        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| sample_inter_meeting(1.0, &mut rng).unwrap())
            .collect();
        assert!((crate::stats::mean(&xs) - 1.0).abs() < 0.01);

        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| sample_inter_meeting(6.96e-4, &mut rng).unwrap())
            .collect();
        let m = crate::stats::mean(&xs);
        assert!((m - 1436.78).abs() / 1436.78 < 0.01, "mean {m}");

        let s: crate::stats::Summary = (0..1_000_000)
            .map(|_| sample_inter_meeting(2.0, &mut rng).unwrap())
            .collect();
        assert!(
            (s.variance() - 0.25).abs() < 0.0025,
            "variance {}",
            s.variance()
        );
    }

    #[test]
    fn inter_meeting_rejects_bad_rate() {
        let mut rng = rng::stream(1, Purpose::PairMeetings, 0);
        assert!(sample_inter_meeting(0.0, &mut rng).is_err());
        assert!(sample_inter_meeting(-1.0, &mut rng).is_err());
        assert!(sample_inter_meeting(f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn total_rate_examples() {
        assert!((total_meeting_rate(20, 6.96e-4) - 0.132240).abs() < 1e-9);
        assert_eq!(total_meeting_rate(3, 1.0), 3.0);
        assert_eq!(total_meeting_rate(2, 2.0), 2.0);
    }

    #[test]
    fn tiny_horizon_is_empty_and_valid() {
        let s = generate_schedule(&params(3, 0.5), 1e-4, 5).unwrap();
        assert!(s.is_empty());
        assert_eq!(estimate_beta(&s).beta, 0.0);
        assert!(estimate_beta(&s).low_sample);
    }

    #[test]
    fn generate_rejects_bad_horizon() {
        assert!(generate_schedule(&params(3, 0.5), 0.0, 5).is_err());
        assert!(generate_schedule(&params(3, 0.5), -1.0, 5).is_err());
    }

    #[test]
    fn schedule_is_deterministic_and_ordered() {
        let p = params(6, 0.01);
        let a = generate_schedule(&p, 1e4, 3).unwrap();
        let b = generate_schedule(&p, 1e4, 3).unwrap();
        let c = generate_schedule(&p, 1e4, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.events().windows(2).all(|w| w[0].time <= w[1].time));
        assert!(a
            .events()
            .iter()
            .enumerate()
            .all(|(k, e)| e.seq == k as u64));
    }

    #[test]
    fn estimate_one_pair_direct_count() {
        let events = (0..100)
            .map(|k| MeetingEvent::new(k as f64 + 0.5, 0, 1, 0, k))
            .collect();
        let s = MeetingSchedule::new(2, 100.0, 0, events).unwrap();
        let est = estimate_beta(&s);
        assert_eq!(est.beta, 1.0);
        assert!(!est.low_sample);
    }

    #[test]
    fn text_round_trip_is_exact() {
        let s = generate_schedule(&params(5, 0.02), 5e3, 9).unwrap();
        let text = s.to_text();
        assert!(text.starts_with("icmn-meetings v1 n=5 horizon=5000 seed=9\n"));
        let back = MeetingSchedule::read_from(text.as_bytes()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "icmn-meetings v1 n=3 horizon=10 seed=1\n1.0 0 1 0\n2.0 0 0 0\n";
        match MeetingSchedule::read_from(bad.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let bad = "icmn-meetings v1 n=3 horizon=10\n";
        assert!(MeetingSchedule::read_from(bad.as_bytes()).is_err());
        let bad = "icmn-meetings v1 n=3 horizon=10 seed=1\n2.0 0 1 2\n";
        assert!(MeetingSchedule::read_from(bad.as_bytes()).is_err());
        let unordered = "icmn-meetings v1 n=3 horizon=10 seed=1\n2.0 0 1 0\n1.0 0 2 0\n";
        assert!(MeetingSchedule::read_from(unordered.as_bytes()).is_err());
    }

    #[test]
    fn receiver_is_other_end() {
        let e = MeetingEvent::new(1.0, 4, 2, 4, 0);
        assert_eq!(e.pair(), (2, 4));
        assert_eq!(e.receiver(), 2);
        let e = MeetingEvent::new(1.0, 4, 2, 2, 0);
        assert_eq!(e.receiver(), 4);
    }
}
