use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::meeting::{parse_field, parse_header};

pub const TRACE_MAGIC: &str = "icmn-trace v1";

/// Slack allowed on region bounds for floating-point drift.
const POSITION_SLACK: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Waypoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl Waypoint {
    pub fn new(t: f64, x: f64, y: f64) -> Self {
        Waypoint { t, x, y }
    }
}

/// Piecewise-linear trajectories of every node over `[0, horizon]`.
///
/// Each node's waypoint list starts at `t = 0` and ends at `t = horizon`;
/// motion between consecutive waypoints is linear at constant speed. Two
/// consecutive waypoints with the same time denote an instantaneous jump,
/// which only wrap-around boundaries produce.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub side: f64,
    pub horizon: f64,
    pub nodes: Vec<Vec<Waypoint>>,
}

impl Trace {
    pub fn new(side: f64, horizon: f64, nodes: Vec<Vec<Waypoint>>) -> Result<Self> {
        let trace = Trace {
            side,
            horizon,
            nodes,
        };
        trace.validate()?;
        Ok(trace)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.side > 0.0 && self.horizon > 0.0) {
            return Err(Error::param("trace side and horizon must be positive"));
        }
        for (node, wps) in self.nodes.iter().enumerate() {
            let (first, last) = match (wps.first(), wps.last()) {
                (Some(f), Some(l)) if wps.len() >= 2 => (f, l),
                _ => {
                    return Err(Error::param(format!(
                        "node {node} needs at least two waypoints"
                    )))
                }
            };
            if first.t != 0.0 || last.t != self.horizon {
                return Err(Error::param(format!(
                    "node {node} waypoints must span [0, {}] (got [{}, {}])",
                    self.horizon, first.t, last.t
                )));
            }
            for (k, w) in wps.iter().enumerate() {
                let lim = self.side + POSITION_SLACK;
                if !(w.x >= -POSITION_SLACK && w.x <= lim && w.y >= -POSITION_SLACK && w.y <= lim) {
                    return Err(Error::param(format!(
                        "node {node} waypoint {k} ({}, {}) outside region",
                        w.x, w.y
                    )));
                }
                if k > 0 && w.t < wps[k - 1].t {
                    return Err(Error::param(format!(
                        "node {node} waypoint {k} goes back in time"
                    )));
                }
                if k > 1 && w.t == wps[k - 1].t && wps[k - 1].t == wps[k - 2].t {
                    return Err(Error::param(format!(
                        "node {node} has repeated jumps at waypoint {k}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Position of `node` at time `t`. At a jump, the post-jump position is
    /// returned.
    pub fn position(&self, node: usize, t: f64) -> (f64, f64) {
        let wps = &self.nodes[node];
        // First waypoint strictly after t.
        let k = wps.partition_point(|w| w.t <= t);
        if k == 0 {
            return (wps[0].x, wps[0].y);
        }
        if k == wps.len() {
            let w = wps[k - 1];
            return (w.x, w.y);
        }
        let (a, b) = (wps[k - 1], wps[k]);
        let f = (t - a.t) / (b.t - a.t);
        (a.x + f * (b.x - a.x), a.y + f * (b.y - a.y))
    }

    /// Speeds of every segment with positive duration, per node.
    pub fn segment_speeds(&self, node: usize) -> impl Iterator<Item = f64> + '_ {
        self.nodes[node]
            .windows(2)
            .filter(|w| w[1].t > w[0].t)
            .map(|w| {
                let (dx, dy) = (w[1].x - w[0].x, w[1].y - w[0].y);
                dx.hypot(dy) / (w[1].t - w[0].t)
            })
    }

    /// Positions of every node sampled on a regular time grid.
    pub fn sample_positions(&self, interval: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for node in 0..self.node_count() {
            let mut t = 0.0;
            while t <= self.horizon {
                out.push(self.position(node, t));
                t += interval;
            }
        }
        out
    }

    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        writeln!(
            out,
            "{TRACE_MAGIC} n={} L={} horizon={}",
            self.node_count(),
            self.side,
            self.horizon
        )?;
        let mut line = String::with_capacity(64);
        for (node, wps) in self.nodes.iter().enumerate() {
            for w in wps {
                line.clear();
                let _ = writeln!(line, "{node} {} {} {}", w.t, w.x, w.y);
                out.write_all(line.as_bytes())?;
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("trace text is ASCII")
    }

    /// Parses the `icmn-trace v1` format. Waypoints of a node may be
    /// interleaved with other nodes' lines but must be in time order.
    pub fn read_from(input: impl BufRead) -> Result<Self> {
        let mut lines = input.lines();
        let header = match lines.next() {
            Some(line) => line?,
            None => return Err(Error::parse(1, "empty trace file")),
        };
        let fields = parse_header(&header, TRACE_MAGIC, &["n", "L", "horizon"])
            .map_err(|m| Error::parse(1, m))?;
        let n: usize = parse_field(&fields[0], "n", 1)?;
        let side: f64 = parse_field(&fields[1], "L", 1)?;
        let horizon: f64 = parse_field(&fields[2], "horizon", 1)?;

        let mut nodes = vec![Vec::new(); n];
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
            let node: usize = parse_field(parts[0], "node", lineno)?;
            if node >= n {
                return Err(Error::parse(
                    lineno,
                    format!("node {node} out of range for n={n}"),
                ));
            }
            let t = parse_field(parts[1], "time", lineno)?;
            let x = parse_field(parts[2], "x", lineno)?;
            let y = parse_field(parts[3], "y", lineno)?;
            let wps: &mut Vec<Waypoint> = &mut nodes[node];
            if wps.last().is_some_and(|w| w.t > t) {
                return Err(Error::parse(
                    lineno,
                    format!("node {node} waypoint goes back in time"),
                ));
            }
            wps.push(Waypoint::new(t, x, y));
        }
        Trace::new(side, horizon, nodes).map_err(|e| match e {
            Error::Parameter(m) => Error::parse(0, m),
            other => other,
        })
    }
}
