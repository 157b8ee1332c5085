use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};

/// Offered load and source/destination pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct TrafficParams {
    /// Poisson packet arrival rate at every source, packets/s.
    pub lambda: f64,
    /// Seed of the arrival streams (and of the permutation when sampled).
    pub seed: u64,
    permutation: Vec<usize>,
    inverse: Vec<usize>,
}

impl TrafficParams {
    /// `permutation[i]` is the destination of the flow sourced at `i`; it
    /// must be a derangement.
    pub fn new(lambda: f64, permutation: Vec<usize>, seed: u64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param(format!(
                "arrival rate must be positive (got {lambda})"
            )));
        }
        let n = permutation.len();
        let mut inverse = vec![usize::MAX; n];
        for (src, &dst) in permutation.iter().enumerate() {
            if dst >= n || inverse[dst] != usize::MAX {
                return Err(Error::param("destination map is not a permutation"));
            }
            if dst == src {
                return Err(Error::param(format!("node {src} is its own destination")));
            }
            inverse[dst] = src;
        }
        Ok(TrafficParams {
            lambda,
            seed,
            permutation,
            inverse,
        })
    }

    /// Random derangement drawn from `seed`.
    pub fn random(n: usize, lambda: f64, seed: u64) -> Result<Self> {
        Self::new(lambda, sample_derangement(n, seed)?, seed)
    }

    pub fn n(&self) -> usize {
        self.permutation.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn destination(&self, source: usize) -> usize {
        self.permutation[source]
    }

    /// The flow (source node) whose destination is `dest`.
    pub fn flow_to(&self, dest: usize) -> usize {
        self.inverse[dest]
    }
}

/// Uniform random derangement of `0..n` by rejection sampling of uniform
/// permutations. About `e` attempts are needed on average.
pub fn sample_derangement(n: usize, seed: u64) -> Result<Vec<usize>> {
    if n < 2 {
        return Err(Error::param(format!("no derangement exists for n = {n}")));
    }
    let mut rng = rng::stream(seed, Purpose::Permutation, 0);
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        perm.shuffle(&mut rng);
        if perm.iter().enumerate().all(|(i, &p)| i != p) {
            return Ok(perm);
        }
    }
}
