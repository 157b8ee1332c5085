//! Small statistics toolkit: sample moments and the one-sample
//! Kolmogorov–Smirnov test used to check exponentiality of inter-event times.

/// Running mean and variance (Welford).
#[derive(Clone, Copy, Debug, Default)]
pub struct Summary {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Summary {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for Summary {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Summary::default();
        for x in iter {
            s.push(x);
        }
        s
    }
}

impl Extend<f64> for Summary {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<Summary>().mean()
}

#[derive(Clone, Copy, Debug)]
pub struct KsResult {
    /// Supremum distance between the empirical and reference CDFs.
    pub statistic: f64,
    pub samples: usize,
    /// Asymptotic p-value from the Kolmogorov distribution.
    pub p_value: f64,
}

impl KsResult {
    /// Whether the sample is consistent with the reference distribution at
    /// significance `alpha`.
    pub fn passes(&self, alpha: f64) -> bool {
        self.statistic < ks_critical_value(self.samples, alpha)
    }
}

/// One-sample KS statistic of `samples` against the continuous CDF `cdf`.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        sup = sup.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let p_value = if sorted.is_empty() {
        1.0
    } else {
        kolmogorov_survival(sup * n.sqrt())
    };
    KsResult {
        statistic: sup,
        samples: sorted.len(),
        p_value,
    }
}

/// KS test against the exponential distribution with the given rate.
pub fn ks_exponential(samples: &[f64], rate: f64) -> KsResult {
    ks_test(
        samples,
        |x| if x <= 0.0 { 0.0 } else { -(-rate * x).exp_m1() },
    )
}

/// Asymptotic critical value `c(α)/√n` with `c(α) = √(-ln(α/2)/2)`.
pub fn ks_critical_value(samples: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (samples as f64).sqrt()
}

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.0 {
        // The alternating series converges slowly here; use the dual form.
        let mut sum = 0.0;
        let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * x * x);
        for k in 1..=50 {
            let odd = (2 * k - 1) as f64;
            sum += (-odd * odd * c).exp();
        }
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * sum).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
