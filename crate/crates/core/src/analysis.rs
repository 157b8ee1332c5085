//! Closed-form throughput capacity, expected delay of two-hop relaying, the
//! delay/throughput necessary condition, and the mobility case studies built
//! on top of them.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::mobility::{MobilityKind, RelativeSpeed, RWP_RATE_CONSTANT};

/// `1 − ln 2`, the constant in the delay/throughput bound.
pub const TRADEOFF_CONSTANT: f64 = 1.0 - LN_2;

fn check_rate(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!(
            "meeting rate must be positive (got {beta})"
        )))
    }
}

/// Per-node throughput capacity `μ = nβ/4`.
pub fn capacity(n: usize, beta: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::param(format!(
            "capacity needs at least 3 nodes (got {n})"
        )));
    }
    check_rate(beta)?;
    Ok(n as f64 * beta / 4.0)
}

/// The two parts of a source's service rate: meeting its destination as
/// transmitter (`β/2`) and handing off to one of `n − 2` relays on heads
/// (`(n − 2)β/4`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ServiceRate {
    pub direct: f64,
    pub via_relay: f64,
}

impl ServiceRate {
    pub fn total(&self) -> f64 {
        self.direct + self.via_relay
    }
}

pub fn service_rate(n: usize, beta: f64) -> Result<ServiceRate> {
    capacity(n, beta)?;
    Ok(ServiceRate {
        direct: beta / 2.0,
        via_relay: (n as f64 - 2.0) * beta / 4.0,
    })
}

/// Expected end-to-end delay of two-hop relaying and its queueing stages.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelayBreakdown {
    /// `(n − 1)/(μ − λ)`.
    pub total: f64,
    /// Sojourn in the source queue, an M/M/1 queue: `1/(μ − λ)`.
    pub source_stage: f64,
    /// Sojourn in one relay queue, an M/M/1 queue with arrival rate `λ/n` and
    /// service rate `β/4`: `1/(β/4 − λ/n)`.
    pub relay_stage: f64,
    /// Fraction of packets that take the relay path, `(n − 2)/n`.
    pub relay_fraction: f64,
}

impl DelayBreakdown {
    /// `E{D_s} + (n−2)/n · E{D_r}`; equals [`DelayBreakdown::total`].
    pub fn staged_total(&self) -> f64 {
        self.source_stage + self.relay_fraction * self.relay_stage
    }
}

/// Expected end-to-end delay `(n − 1)/(μ − λ)` under two-hop relaying.
pub fn expected_delay(n: usize, beta: f64, lambda: f64) -> Result<DelayBreakdown> {
    let mu = capacity(n, beta)?;
    if !(lambda > 0.0) {
        return Err(Error::param(format!(
            "arrival rate must be positive (got {lambda})"
        )));
    }
    if lambda >= mu {
        return Err(Error::Unstable { lambda, mu });
    }
    let nf = n as f64;
    Ok(DelayBreakdown {
        total: (nf - 1.0) / (mu - lambda),
        source_stage: 1.0 / (mu - lambda),
        relay_stage: 1.0 / (beta / 4.0 - lambda / nf),
        relay_fraction: (nf - 2.0) / nf,
    })
}

/// Lower bound on `E{D}/λ` for any routing algorithm:
/// `(1 − ln 2) / (2(n − 1)β²)`.
pub fn tradeoff_bound(n: usize, beta: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::param(format!(
            "bound needs at least 2 nodes (got {n})"
        )));
    }
    check_rate(beta)?;
    Ok(TRADEOFF_CONSTANT / (2.0 * (n as f64 - 1.0) * beta * beta))
}

/// Mean sojourn time `1/(μ − λ)` of an M/M/1 queue.
pub fn mm1_expected_delay(lambda: f64, mu: f64) -> Result<f64> {
    if !(lambda > 0.0 && mu > 0.0) {
        return Err(Error::param(format!(
            "rates must be positive (lambda {lambda}, mu {mu})"
        )));
    }
    if lambda >= mu {
        return Err(Error::Unstable { lambda, mu });
    }
    Ok(1.0 / (mu - lambda))
}

/// Capacity, delay and bound for one operating point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticalResult {
    pub n: usize,
    pub beta: f64,
    pub lambda: Option<f64>,
    pub mu: f64,
    /// Present only when `λ < μ`.
    pub expected_delay: Option<DelayBreakdown>,
    pub tradeoff_bound: f64,
}

impl AnalyticalResult {
    pub fn evaluate(n: usize, beta: f64, lambda: Option<f64>) -> Result<Self> {
        let mu = capacity(n, beta)?;
        let expected_delay = match lambda {
            Some(l) => match expected_delay(n, beta, l) {
                Ok(d) => Some(d),
                Err(Error::Unstable { .. }) => None,
                Err(e) => return Err(e),
            },
            None => None,
        };
        Ok(AnalyticalResult {
            n,
            beta,
            lambda,
            mu,
            expected_delay,
            tradeoff_bound: tradeoff_bound(n, beta)?,
        })
    }

    /// System load `ρ = λ/μ`.
    pub fn rho(&self) -> Option<f64> {
        self.lambda.map(|l| l / self.mu)
    }

    pub fn is_stable(&self) -> bool {
        self.expected_delay.is_some()
    }
}

/// Capacity/delay/bound for a mobility model, with the meeting rate taken
/// from the model's approximation in terms of region side, range and average
/// relative speed. Constant-speed cases pass `RelativeSpeed::constant_speed(v)`.
pub fn case_study(
    kind: MobilityKind,
    side: f64,
    range: f64,
    ev: RelativeSpeed,
    n: usize,
    lambda: Option<f64>,
) -> Result<AnalyticalResult> {
    if !(side > 0.0 && range > 0.0) {
        return Err(Error::param("side and range must be positive"));
    }
    AnalyticalResult::evaluate(n, kind.beta(side, range, ev), lambda)
}

/// Constant-speed closed forms exactly as conventionally printed for the two
/// mobility models. The random direction forms use `β ≈ 8dv/L²`, which is `π`
/// times larger than substituting `E[V*] = 4v/π` into the general `2dE[V*]/L²`;
/// [`case_study`] uses the general form. These are for display only.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrintedConstantSpeedForms {
    pub capacity: f64,
    pub tradeoff_bound: f64,
}

pub fn printed_constant_speed_forms(
    kind: MobilityKind,
    side: f64,
    range: f64,
    v: f64,
    n: usize,
) -> PrintedConstantSpeedForms {
    let nf = n as f64;
    let l2 = side * side;
    match kind {
        MobilityKind::RandomWaypoint => PrintedConstantSpeedForms {
            capacity: 2.0 * RWP_RATE_CONSTANT * nf * range * v / (PI * l2),
            tradeoff_bound: TRADEOFF_CONSTANT * PI * PI * l2 * l2
                / (128.0 * (nf - 1.0) * (RWP_RATE_CONSTANT * range * v).powi(2)),
        },
        MobilityKind::RandomDirection => PrintedConstantSpeedForms {
            capacity: 2.0 * nf * range * v / l2,
            tradeoff_bound: TRADEOFF_CONSTANT * l2 * l2
                / (128.0 * (nf - 1.0) * (range * v).powi(2)),
        },
    }
}
