//! Mobility models and the meeting-rate approximations that connect them to
//! the Poisson meeting model.

mod extract;
mod ns2;
mod rd;
mod rwp;
mod trace;

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};

pub use extract::{contact_starts, extract_meetings};
pub use ns2::import_ns2;
pub use rd::{advance_leg, generate_rd, Boundary, RdConfig, DEFAULT_TRAVEL_TIME_MEAN};
pub use rwp::{generate_rwp, RwpConfig};
pub use trace::{Trace, Waypoint, TRACE_MAGIC};

/// Random waypoint meeting-rate constant `c₁`.
pub const RWP_RATE_CONSTANT: f64 = 1.3683;

/// Per-leg travel speed distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpeedModel {
    Constant(f64),
    /// Uniform on `(min, max)` with `min > 0`.
    Uniform {
        min: f64,
        max: f64,
    },
}

impl SpeedModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SpeedModel::Constant(v) if v > 0.0 && v.is_finite() => Ok(()),
            SpeedModel::Uniform { min, max } if min > 0.0 && max >= min && max.is_finite() => {
                Ok(())
            }
            other => Err(Error::param(format!(
                "invalid speed model {other:?}; speeds must be positive"
            ))),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            SpeedModel::Constant(v) => v,
            SpeedModel::Uniform { min, max } if max > min => rng.random_range(min..max),
            SpeedModel::Uniform { min, .. } => min,
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            SpeedModel::Constant(v) => (v, v),
            SpeedModel::Uniform { min, max } => (min, max),
        }
    }

    pub fn mean(&self) -> f64 {
        let (lo, hi) = self.bounds();
        (lo + hi) / 2.0
    }
}

/// Distribution of a non-negative duration (pause or travel time).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DurationDist {
    Zero,
    Constant(f64),
    Uniform { min: f64, max: f64 },
    Exponential { mean: f64 },
}

impl DurationDist {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DurationDist::Zero => true,
            DurationDist::Constant(c) => c >= 0.0 && c.is_finite(),
            DurationDist::Uniform { min, max } => min >= 0.0 && max >= min && max.is_finite(),
            DurationDist::Exponential { mean } => mean > 0.0 && mean.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param(format!(
                "invalid duration distribution {self:?}"
            )))
        }
    }

    /// Whether every draw is strictly positive (required for travel times).
    pub fn is_strictly_positive(&self) -> bool {
        match *self {
            DurationDist::Zero => false,
            DurationDist::Constant(c) => c > 0.0,
            DurationDist::Uniform { min, .. } => min > 0.0,
            DurationDist::Exponential { .. } => true,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DurationDist::Zero => 0.0,
            DurationDist::Constant(c) => c,
            DurationDist::Uniform { min, max } if max > min => rng.random_range(min..max),
            DurationDist::Uniform { min, .. } => min,
            DurationDist::Exponential { mean } => Exp::new(1.0 / mean).unwrap().sample(rng),
        }
    }
}

/// Average relative speed `E‖V₁ − V₂‖` between two nodes.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct RelativeSpeed(f64);

impl RelativeSpeed {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(RelativeSpeed(value))
        } else {
            Err(Error::param(format!(
                "relative speed must be positive (got {value})"
            )))
        }
    }

    /// `4v/π`, the value for two nodes at constant speed `v` with independent
    /// uniform headings.
    pub fn constant_speed(v: f64) -> Result<Self> {
        Self::new(4.0 * v / PI)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

const QUADRATURE_TOLERANCE: f64 = 1e-6;

/// Computes `E‖V₁ − V₂‖` for two velocities with independent uniform headings
/// and speeds drawn from `speed`, by adaptive quadrature over the heading
/// difference and both speeds.
pub fn expected_relative_speed(speed: &SpeedModel) -> Result<RelativeSpeed> {
    speed.validate()?;
    let (lo, hi) = speed.bounds();
    // Mean over the heading difference θ ∈ [0, π] (the integrand is even in θ).
    let over_heading = |v1: f64, v2: f64, tol: f64| {
        let f = |theta: f64| {
            (v1 * v1 + v2 * v2 - 2.0 * v1 * v2 * theta.cos())
                .max(0.0)
                .sqrt()
        };
        adaptive_simpson(&f, 0.0, PI, tol * (v1 + v2).max(f64::MIN_POSITIVE)) / PI
    };
    let value = if hi == lo {
        over_heading(lo, lo, QUADRATURE_TOLERANCE)
    } else {
        let width = hi - lo;
        let tol = QUADRATURE_TOLERANCE * lo;
        let inner = |v1: f64| {
            // The integrand has a kink at v2 = v1; split there.
            let g = |v2: f64| over_heading(v1, v2, QUADRATURE_TOLERANCE * 0.1);
            let left = if v1 > lo {
                adaptive_simpson(&g, lo, v1, tol * width)
            } else {
                0.0
            };
            let right = if v1 < hi {
                adaptive_simpson(&g, v1, hi, tol * width)
            } else {
                0.0
            };
            (left + right) / width
        };
        adaptive_simpson(&inner, lo, hi, tol * width) / width
    };
    RelativeSpeed::new(value)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        (a, fa): (f64, f64),
        (m, fm): (f64, f64),
        (b, fb): (f64, f64),
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = (a + m) / 2.0;
        let rm = (m + b) / 2.0;
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, (a, fa), (lm, flm), (m, fm), left, tol / 2.0, depth - 1)
            + recurse(f, (m, fm), (rm, frm), (b, fb), right, tol / 2.0, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let m = (a + b) / 2.0;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, (a, fa), (m, fm), (b, fb), whole, tol, 40)
}

fn warn_if_range_large(side: f64, range: f64) {
    if range / side > 0.1 {
        log::warn!(
            "transmission range {range} is not small relative to side {side}; \
             the meeting-rate approximation degrades"
        );
    }
}

/// Random waypoint pairwise meeting rate `2 c₁ d E[V*] / L²`.
pub fn beta_rwp(side: f64, range: f64, ev: RelativeSpeed) -> f64 {
    warn_if_range_large(side, range);
    2.0 * RWP_RATE_CONSTANT * range * ev.value() / (side * side)
}

/// Random direction pairwise meeting rate `2 d E[V*] / L²`.
pub fn beta_rd(side: f64, range: f64, ev: RelativeSpeed) -> f64 {
    warn_if_range_large(side, range);
    2.0 * range * ev.value() / (side * side)
}

/// Which mobility model a trace or approximation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MobilityKind {
    RandomWaypoint,
    RandomDirection,
}

impl MobilityKind {
    pub fn beta(self, side: f64, range: f64, ev: RelativeSpeed) -> f64 {
        match self {
            MobilityKind::RandomWaypoint => beta_rwp(side, range, ev),
            MobilityKind::RandomDirection => beta_rd(side, range, ev),
        }
    }
}
