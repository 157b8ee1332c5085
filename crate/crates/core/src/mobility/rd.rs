use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use super::rwp::check_common;
use super::{DurationDist, SpeedModel, Trace, Waypoint};
use crate::error::{Error, Result};
use crate::rng::{self, Purpose, StreamRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Bounce back: the velocity component normal to the wall flips sign.
    Reflect,
    /// Leave through one side and re-enter through the opposite side.
    Wrap,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RdConfig {
    pub speed: SpeedModel,
    pub pause: DurationDist,
    pub travel_time: DurationDist,
    pub boundary: Boundary,
}

/// Mean travel time per leg when none is configured.
pub const DEFAULT_TRAVEL_TIME_MEAN: f64 = 60.0;

impl RdConfig {
    pub fn constant_speed(v: f64) -> Self {
        RdConfig {
            speed: SpeedModel::Constant(v),
            pause: DurationDist::Zero,
            travel_time: DurationDist::Exponential {
                mean: DEFAULT_TRAVEL_TIME_MEAN,
            },
            boundary: Boundary::Reflect,
        }
    }
}

/// Random direction trajectories for `n` nodes in a `side × side` square.
///
/// Each leg draws a uniform heading, a speed and a travel time; walls reflect
/// or wrap per `cfg.boundary`, with each bounce or wrap splitting the leg so
/// motion stays piecewise linear.
pub fn generate_rd(n: usize, side: f64, cfg: &RdConfig, horizon: f64, seed: u64) -> Result<Trace> {
    cfg.speed.validate()?;
    cfg.pause.validate()?;
    cfg.travel_time.validate()?;
    if !cfg.travel_time.is_strictly_positive() {
        return Err(Error::param(
            "travel time distribution must be strictly positive",
        ));
    }
    check_common(n, side, horizon)?;
    let nodes = (0..n)
        .into_par_iter()
        .map(|node| {
            let mut rng = rng::stream(seed, Purpose::NodeMobility, node as u64);
            rd_node(&mut rng, side, cfg, horizon)
        })
        .collect();
    Trace::new(side, horizon, nodes)
}

fn rd_node(rng: &mut StreamRng, side: f64, cfg: &RdConfig, horizon: f64) -> Vec<Waypoint> {
    let start = Waypoint::new(
        0.0,
        rng.random_range(0.0..side),
        rng.random_range(0.0..side),
    );
    let mut wps = vec![start];
    let mut at = start;
    loop {
        let heading = rng.random_range(0.0..2.0 * PI);
        let speed = cfg.speed.sample(rng);
        let duration = cfg.travel_time.sample(rng).min(horizon - at.t);
        let leg = advance_leg(at, heading, speed, duration, cfg.boundary, side);
        at = *leg.last().unwrap_or(&at);
        wps.extend(leg);
        if at.t >= horizon {
            break;
        }
        let pause = cfg.pause.sample(rng);
        if pause > 0.0 {
            at.t = (at.t + pause).min(horizon);
            wps.push(at);
            if at.t >= horizon {
                break;
            }
        }
    }
    if let Some(last) = wps.last_mut() {
        last.t = horizon;
    }
    wps
}

/// Moves from `from` along `heading` at `speed` for `duration` seconds inside
/// `[0, side]²`, returning the waypoints produced (wall hits and the end
/// point). A wrap produces two waypoints at the same time: the exit point and
/// the re-entry point.
pub fn advance_leg(
    from: Waypoint,
    heading: f64,
    speed: f64,
    duration: f64,
    boundary: Boundary,
    side: f64,
) -> Vec<Waypoint> {
    let mut out = Vec::new();
    let (mut vx, mut vy) = (speed * heading.cos(), speed * heading.sin());
    let (mut x, mut y, mut t) = (from.x, from.y, from.t);
    let mut remaining = duration;
    // A leg crosses the square at most a bounded number of times; the cap
    // only guards against pathological float loops.
    for _ in 0..1_000_000 {
        if remaining <= 0.0 {
            break;
        }
        let hit_x = time_to_wall(x, vx, side);
        let hit_y = time_to_wall(y, vy, side);
        let hit = hit_x.min(hit_y);
        if hit >= remaining {
            t += remaining;
            out.push(Waypoint::new(
                t,
                (x + vx * remaining).clamp(0.0, side),
                (y + vy * remaining).clamp(0.0, side),
            ));
            break;
        }
        t += hit;
        remaining -= hit;
        x = (x + vx * hit).clamp(0.0, side);
        y = (y + vy * hit).clamp(0.0, side);
        let on_x = hit_x <= hit;
        let on_y = hit_y <= hit;
        if on_x {
            x = if vx > 0.0 { side } else { 0.0 };
        }
        if on_y {
            y = if vy > 0.0 { side } else { 0.0 };
        }
        out.push(Waypoint::new(t, x, y));
        match boundary {
            Boundary::Reflect => {
                if on_x {
                    vx = -vx;
                }
                if on_y {
                    vy = -vy;
                }
            }
            Boundary::Wrap => {
                if on_x {
                    x = if vx > 0.0 { 0.0 } else { side };
                }
                if on_y {
                    y = if vy > 0.0 { 0.0 } else { side };
                }
                out.push(Waypoint::new(t, x, y));
            }
        }
    }
    out
}

fn time_to_wall(pos: f64, vel: f64, side: f64) -> f64 {
    if vel > 0.0 {
        ((side - pos) / vel).max(0.0)
    } else if vel < 0.0 {
        (pos / -vel).max(0.0)
    } else {
        f64::INFINITY
    }
}
