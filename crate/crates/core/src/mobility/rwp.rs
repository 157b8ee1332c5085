use rand::Rng;
use rayon::prelude::*;

use super::{DurationDist, SpeedModel, Trace, Waypoint};
use crate::error::{Error, Result};
use crate::rng::{self, Purpose, StreamRng};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RwpConfig {
    pub speed: SpeedModel,
    pub pause: DurationDist,
}

impl RwpConfig {
    pub fn constant_speed(v: f64) -> Self {
        RwpConfig {
            speed: SpeedModel::Constant(v),
            pause: DurationDist::Zero,
        }
    }
}

/// Random waypoint trajectories for `n` nodes in a `side × side` square.
///
/// Nodes start uniformly placed, then repeatedly travel in a straight line to
/// a uniformly chosen destination at a speed drawn per leg, pausing on
/// arrival. Each node uses its own seeded stream.
pub fn generate_rwp(
    n: usize,
    side: f64,
    cfg: &RwpConfig,
    horizon: f64,
    seed: u64,
) -> Result<Trace> {
    cfg.speed.validate()?;
    cfg.pause.validate()?;
    check_common(n, side, horizon)?;
    let nodes = (0..n)
        .into_par_iter()
        .map(|node| {
            let mut rng = rng::stream(seed, Purpose::NodeMobility, node as u64);
            rwp_node(&mut rng, side, cfg, horizon)
        })
        .collect();
    Trace::new(side, horizon, nodes)
}

pub(super) fn check_common(n: usize, side: f64, horizon: f64) -> Result<()> {
    if n < 1 {
        return Err(Error::param("trace needs at least one node"));
    }
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::param(format!(
            "region side must be positive (got {side})"
        )));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param(format!(
            "horizon must be positive (got {horizon})"
        )));
    }
    Ok(())
}

fn rwp_node(rng: &mut StreamRng, side: f64, cfg: &RwpConfig, horizon: f64) -> Vec<Waypoint> {
    let mut t = 0.0;
    let mut x = rng.random_range(0.0..side);
    let mut y = rng.random_range(0.0..side);
    let mut wps = vec![Waypoint::new(0.0, x, y)];
    loop {
        let tx = rng.random_range(0.0..side);
        let ty = rng.random_range(0.0..side);
        let v = cfg.speed.sample(rng);
        let dist = (tx - x).hypot(ty - y);
        let arrive = t + dist / v;
        if arrive >= horizon {
            let f = (horizon - t) / (arrive - t);
            wps.push(Waypoint::new(horizon, x + f * (tx - x), y + f * (ty - y)));
            return wps;
        }
        if arrive > t {
            wps.push(Waypoint::new(arrive, tx, ty));
        }
        t = arrive;
        x = tx;
        y = ty;
        let pause = cfg.pause.sample(rng);
        if pause > 0.0 {
            if t + pause >= horizon {
                wps.push(Waypoint::new(horizon, x, y));
                return wps;
            }
            t += pause;
            wps.push(Waypoint::new(t, x, y));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_speed_segments() {
        let trace = generate_rwp(20, 2000.0, &RwpConfig::constant_speed(40.0), 1e5, 1).unwrap();
        for node in 0..20 {
            for v in trace.segment_speeds(node) {
                assert!((v - 40.0).abs() < 1e-6, "speed {v}");
            }
        }
    }

    #[test]
    fn truncates_at_short_horizon() {
        // No leg in a 2000 m square at 40 m/s is this short except with
        // negligible probability.
        let trace = generate_rwp(20, 2000.0, &RwpConfig::constant_speed(40.0), 1e-3, 2).unwrap();
        for wps in &trace.nodes {
            assert_eq!(wps.len(), 2);
            assert_eq!(wps[1].t, 1e-3);
        }
    }

    #[test]
    fn pauses_are_stationary_segments() {
        let cfg = RwpConfig {
            speed: SpeedModel::Uniform {
                min: 5.0,
                max: 10.0,
            },
            pause: DurationDist::Constant(30.0),
        };
        let trace = generate_rwp(3, 500.0, &cfg, 1e4, 3).unwrap();
        let speeds: Vec<f64> = trace.segment_speeds(0).collect();
        assert!(speeds.contains(&0.0));
        assert!(speeds
            .iter()
            .all(|&v| v == 0.0 || (4.999..=10.001).contains(&v)));
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = RwpConfig::constant_speed(10.0);
        let a = generate_rwp(4, 100.0, &cfg, 1e3, 9).unwrap();
        let b = generate_rwp(4, 100.0, &cfg, 1e3, 9).unwrap();
        assert_eq!(a, b);
        assert!(generate_rwp(4, 100.0, &RwpConfig::constant_speed(0.0), 1e3, 9).is_err());
    }
}
