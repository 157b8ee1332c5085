//! Standalone single-server FIFO queue with Poisson arrivals and exponential
//! service. Serves as an independent reference for the queueing behaviour
//! the routing analysis relies on.

use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};

#[derive(Clone, Debug)]
pub struct Mm1Run {
    pub arrivals: Vec<f64>,
    pub departures: Vec<f64>,
}

impl Mm1Run {
    pub fn sojourn_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.arrivals
            .iter()
            .zip(&self.departures)
            .map(|(a, d)| d - a)
    }

    pub fn inter_departure_times(&self) -> Vec<f64> {
        self.departures.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Simulates `customers` arrivals through an M/M/1 queue via the Lindley
/// recursion: each departure is `max(arrival, previous departure) + service`.
pub fn simulate_mm1(lambda: f64, mu: f64, customers: usize, seed: u64) -> Result<Mm1Run> {
    if !(lambda > 0.0 && mu > 0.0 && lambda.is_finite() && mu.is_finite()) {
        return Err(Error::param(format!(
            "rates must be positive (lambda {lambda}, mu {mu})"
        )));
    }
    let inter = Exp::new(lambda).unwrap();
    let service = Exp::new(mu).unwrap();
    let mut arrivals_rng = rng::stream(seed, Purpose::Queueing, 0);
    let mut service_rng = rng::stream(seed, Purpose::Queueing, 1);

    let mut arrivals = Vec::with_capacity(customers);
    let mut departures = Vec::with_capacity(customers);
    let (mut t, mut last_departure) = (0.0f64, 0.0f64);
    for _ in 0..customers {
        t += inter.sample(&mut arrivals_rng);
        let done = t.max(last_departure) + service.sample(&mut service_rng);
        arrivals.push(t);
        departures.push(done);
        last_departure = done;
    }
    Ok(Mm1Run {
        arrivals,
        departures,
    })
}
