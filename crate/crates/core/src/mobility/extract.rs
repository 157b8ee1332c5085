use rand::Rng;
use rayon::prelude::*;

use super::{Trace, Waypoint};
use crate::error::{Error, Result};
use crate::meeting::{MeetingEvent, MeetingSchedule};
use crate::params::{pair_index, pairs};
use crate::rng::{self, Purpose};

/// Relative velocities below this (m/s squared magnitude) are treated as zero.
const PARALLEL_EPS: f64 = 1e-18;

/// Extracts meeting events from a trace: one event each time the distance
/// between two nodes drops below `range`, plus one at `t = 0` for pairs that
/// start in contact.
///
/// Crossing times are exact roots of the per-segment quadratic, so no contact
/// is missed regardless of its duration. Transmitters are chosen by a fair
/// coin from a per-pair stream derived from `seed`.
pub fn extract_meetings(trace: &Trace, range: f64, seed: u64) -> Result<MeetingSchedule> {
    if !(range > 0.0 && range.is_finite()) {
        return Err(Error::param(format!(
            "transmission range must be positive (got {range})"
        )));
    }
    let n = trace.node_count();
    let pair_list: Vec<(usize, usize)> = pairs(n).collect();
    let per_pair: Vec<Vec<f64>> = pair_list
        .par_iter()
        .map(|&(i, j)| contact_starts(&trace.nodes[i], &trace.nodes[j], range))
        .collect();

    let mut tagged: Vec<(f64, usize, usize)> =
        Vec::with_capacity(per_pair.iter().map(Vec::len).sum());
    for (p, times) in per_pair.iter().enumerate() {
        let (i, j) = pair_list[p];
        let mut coin = rng::stream(seed, Purpose::PairTransmitter, pair_index(n, i, j) as u64);
        for &t in times {
            let tx = if coin.random::<bool>() { i } else { j };
            tagged.push((t, p, tx));
        }
    }
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let events = tagged
        .into_iter()
        .enumerate()
        .map(|(seq, (t, p, tx))| {
            let (i, j) = pair_list[p];
            MeetingEvent::new(t, i, j, tx, seq as u64)
        })
        .collect();
    MeetingSchedule::new(n, trace.horizon, seed, events)
}

/// Times at which two trajectories come within `range` of each other.
///
/// Walks the merged breakpoints of both piecewise-linear paths. Within each
/// interval the squared separation is quadratic in time and its smaller root
/// is the entry time. Contact state carries across intervals so an ongoing
/// contact is not reported twice.
pub fn contact_starts(a: &[Waypoint], b: &[Waypoint], range: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let end = a.last().unwrap().t.min(b.last().unwrap().t);
    let r2 = range * range;
    let (mut ia, mut ib) = (0usize, 0usize);
    let mut t = 0.0f64;
    let mut in_contact = false;
    loop {
        while ia + 2 < a.len() && a[ia + 1].t <= t {
            ia += 1;
        }
        while ib + 2 < b.len() && b[ib + 1].t <= t {
            ib += 1;
        }
        let (sa, sb) = (
            Segment::new(a[ia], a[ia + 1]),
            Segment::new(b[ib], b[ib + 1]),
        );
        let t_next = a[ia + 1].t.min(b[ib + 1].t).min(end);

        let (ax, ay) = sa.at(t);
        let (bx, by) = sb.at(t);
        let (px, py) = (ax - bx, ay - by);
        let (vx, vy) = (sa.vx - sb.vx, sa.vy - sb.vy);
        let span = t_next - t;

        let start_inside = px * px + py * py < r2;
        if in_contact && !start_inside {
            in_contact = false;
        } else if !in_contact && start_inside {
            out.push(t);
            in_contact = true;
        }

        if span > 0.0 {
            let qa = vx * vx + vy * vy;
            if qa > PARALLEL_EPS {
                let qb = 2.0 * (px * vx + py * vy);
                let qc = px * px + py * py - r2;
                let disc = qb * qb - 4.0 * qa * qc;
                if !in_contact && disc > 0.0 {
                    let entry = entry_root(qa, qb, qc, disc);
                    if entry > 0.0 && entry < span {
                        out.push(t + entry);
                    }
                }
                let (ex, ey) = (px + vx * span, py + vy * span);
                in_contact = ex * ex + ey * ey < r2;
            }
        }

        if t_next >= end {
            break;
        }
        t = t_next;
    }
    out
}

/// Smaller root of `qa s² + qb s + qc` computed without cancellation.
fn entry_root(qa: f64, qb: f64, qc: f64, disc: f64) -> f64 {
    let sq = disc.sqrt();
    if qb <= 0.0 {
        // -qb + sq is large; pair it with the other root via Vieta.
        let big = (-qb + sq) / (2.0 * qa);
        if big == 0.0 {
            0.0
        } else {
            qc / (qa * big)
        }
    } else {
        (-qb - sq) / (2.0 * qa)
    }
}

#[derive(Clone, Copy)]
struct Segment {
    t0: f64,
    x0: f64,
    y0: f64,
    vx: f64,
    vy: f64,
}

impl Segment {
    fn new(from: Waypoint, to: Waypoint) -> Self {
        let dt = to.t - from.t;
        let (vx, vy) = if dt > 0.0 {
            ((to.x - from.x) / dt, (to.y - from.y) / dt)
        } else {
            (0.0, 0.0)
        };
        Segment {
            t0: from.t,
            x0: from.x,
            y0: from.y,
            vx,
            vy,
        }
    }

    fn at(&self, t: f64) -> (f64, f64) {
        let dt = t - self.t0;
        (self.x0 + self.vx * dt, self.y0 + self.vy * dt)
    }
}
