//! Import of NS-2 `setdest` movement files.
//!
//! Supported lines:
//!
//! ```text
//! $node_(3) set X_ 120.5
//! $node_(3) set Y_ 88.0
//! $ns_ at 12.0 "$node_(3) setdest 400.0 10.0 20.0"
//! ```
//!
//! `set Z_` lines, `#` comments and blank lines are skipped; any other line is
//! a parse error carrying its line number.

use std::io::BufRead;

use super::{Trace, Waypoint};
use crate::error::{Error, Result};

#[derive(Debug)]
struct SetDest {
    time: f64,
    x: f64,
    y: f64,
    speed: f64,
}

#[derive(Default)]
struct NodeScript {
    x: Option<f64>,
    y: Option<f64>,
    moves: Vec<SetDest>,
}

/// Converts a setdest movement file into a [`Trace`] over `[0, horizon]`.
///
/// When `horizon` is `None` it defaults to the time the last movement ends.
/// Moves scheduled at or after the horizon are ignored.
/// A new `setdest` interrupts any movement still in progress, as in NS-2.
pub fn import_ns2(input: impl BufRead, side: f64, horizon: Option<f64>) -> Result<Trace> {
    let mut scripts: Vec<NodeScript> = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let lineno = k + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [node, "set", coord, value] => {
                let node = parse_node(node, lineno)?;
                let value = parse_num(value, lineno)?;
                let script = script_for(&mut scripts, node);
                match *coord {
                    "X_" => script.x = Some(value),
                    "Y_" => script.y = Some(value),
                    "Z_" => {}
                    other => {
                        return Err(Error::parse(
                            lineno,
                            format!("unsupported attribute `{other}`"),
                        ))
                    }
                }
            }
            ["$ns_", "at", time, node, "setdest", x, y, speed] => {
                let node = node
                    .strip_prefix('"')
                    .ok_or_else(|| Error::parse(lineno, "expected quoted node command"))?;
                let speed = speed
                    .strip_suffix('"')
                    .ok_or_else(|| Error::parse(lineno, "unterminated quoted command"))?;
                let node = parse_node(node, lineno)?;
                let mv = SetDest {
                    time: parse_num(time, lineno)?,
                    x: parse_num(x, lineno)?,
                    y: parse_num(y, lineno)?,
                    speed: parse_num(speed, lineno)?,
                };
                if mv.time < 0.0 || mv.speed < 0.0 {
                    return Err(Error::parse(lineno, "negative time or speed"));
                }
                script_for(&mut scripts, node).moves.push(mv);
            }
            _ => return Err(Error::parse(lineno, format!("unsupported line `{line}`"))),
        }
    }
    if scripts.is_empty() {
        return Err(Error::parse(0, "movement file defines no nodes"));
    }

    let mut nodes = Vec::with_capacity(scripts.len());
    for (i, script) in scripts.iter_mut().enumerate() {
        let (Some(x), Some(y)) = (script.x, script.y) else {
            return Err(Error::parse(
                0,
                format!("node {i} has no initial X_/Y_ position"),
            ));
        };
        script.moves.sort_by(|a, b| a.time.total_cmp(&b.time));
        nodes.push(replay(
            Waypoint::new(0.0, x, y),
            &script.moves,
            horizon.unwrap_or(f64::INFINITY),
        ));
    }
    let horizon = match horizon {
        Some(h) => h,
        None => nodes
            .iter()
            .map(|wps| wps.last().map_or(0.0, |w| w.t))
            .fold(0.0f64, f64::max),
    };
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param(format!(
            "trace horizon must be positive (got {horizon})"
        )));
    }
    for wps in &mut nodes {
        let last = *wps.last().unwrap();
        if last.t < horizon {
            wps.push(Waypoint::new(horizon, last.x, last.y));
        }
    }
    Trace::new(side, horizon, nodes)
}

fn script_for(scripts: &mut Vec<NodeScript>, node: usize) -> &mut NodeScript {
    if scripts.len() <= node {
        scripts.resize_with(node + 1, NodeScript::default);
    }
    &mut scripts[node]
}

struct Motion {
    from: Waypoint,
    to_x: f64,
    to_y: f64,
    arrive: f64,
}

impl Motion {
    fn at(&self, t: f64) -> (f64, f64) {
        if t >= self.arrive {
            return (self.to_x, self.to_y);
        }
        let f = (t - self.from.t) / (self.arrive - self.from.t);
        (
            self.from.x + f * (self.to_x - self.from.x),
            self.from.y + f * (self.to_y - self.from.y),
        )
    }
}

fn replay(start: Waypoint, moves: &[SetDest], horizon: f64) -> Vec<Waypoint> {
    let mut wps = vec![start];
    let mut pos = (start.x, start.y);
    let mut motion: Option<Motion> = None;

    let push = |wps: &mut Vec<Waypoint>, t: f64, p: (f64, f64)| {
        if t > wps.last().unwrap().t {
            wps.push(Waypoint::new(t, p.0, p.1));
        }
    };

    for mv in moves.iter().filter(|m| m.time < horizon) {
        if let Some(m) = motion.take() {
            if m.arrive <= mv.time {
                push(&mut wps, m.arrive, (m.to_x, m.to_y));
            }
            pos = m.at(mv.time);
        }
        push(&mut wps, mv.time, pos);
        let dist = (mv.x - pos.0).hypot(mv.y - pos.1);
        if mv.speed > 0.0 && dist > 0.0 {
            motion = Some(Motion {
                from: Waypoint::new(mv.time, pos.0, pos.1),
                to_x: mv.x,
                to_y: mv.y,
                arrive: mv.time + dist / mv.speed,
            });
        }
    }
    if let Some(m) = motion {
        if m.arrive < horizon {
            push(&mut wps, m.arrive, (m.to_x, m.to_y));
        }
        pos = m.at(horizon);
    }
    // With an open-ended horizon the trace stops at the last arrival; the
    // caller pads every node to the common end time.
    if horizon.is_finite() {
        push(&mut wps, horizon, pos);
    }
    wps
}

fn parse_node(token: &str, line: usize) -> Result<usize> {
    token
        .strip_prefix("$node_(")
        .and_then(|s| s.strip_suffix(')'))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(line, format!("invalid node reference `{token}`")))
}

fn parse_num(token: &str, line: usize) -> Result<f64> {
    token
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::parse(line, format!("invalid number `{token}`")))
}
