use crate::error::{Error, Result};

/// Static description of the network: node count, square region side,
/// transmission range and pairwise meeting rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkParams {
    pub n: usize,
    /// Side length of the square region in meters.
    pub side: f64,
    /// Transmission range in meters.
    pub range: f64,
    /// Pairwise meeting rate in 1/s.
    pub beta: f64,
}

impl NetworkParams {
    pub fn new(n: usize, side: f64, range: f64, beta: f64) -> Result<Self> {
        let params = NetworkParams {
            n,
            side,
            range,
            beta,
        };
        params.validate()?;
        Ok(params)
    }

    /// Parameters for a pure Poisson meeting source where geometry is
    /// irrelevant. Uses the reference 2000 m region and 20 m range.
    pub fn poisson(n: usize, beta: f64) -> Result<Self> {
        Self::new(n, 2000.0, 20.0, beta)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::param(format!(
                "node count must be at least 3 (got {}); two-hop relaying needs a relay",
                self.n
            )));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::param(format!(
                "meeting rate must be positive (got {})",
                self.beta
            )));
        }
        if !(self.side > 0.0 && self.side.is_finite()) {
            return Err(Error::param(format!(
                "region side must be positive (got {})",
                self.side
            )));
        }
        if !(self.range > 0.0 && self.range < self.side) {
            return Err(Error::param(format!(
                "transmission range must lie in (0, side) (got {} with side {})",
                self.range, self.side
            )));
        }
        Ok(())
    }

    pub fn pair_count(&self) -> usize {
        pair_count(self.n)
    }

    /// Aggregate meeting rate of the whole network, `n(n-1)β/2`.
    pub fn total_meeting_rate(&self) -> f64 {
        crate::meeting::total_meeting_rate(self.n, self.beta)
    }
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Index of the unordered pair `{i, j}` in row-major upper-triangle order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(b < n && a != b);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Iterates unordered pairs `(i, j)` with `i < j` in [`pair_index`] order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}
