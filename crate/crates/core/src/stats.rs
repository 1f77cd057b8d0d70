//! Interval estimates and agreement tests used by the simulator and the
//! verification checks.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `errors` successes out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if errors == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let hi = if errors == trials { 1.0 } else { (center + half).clamp(p, 1.0) };
    (lo, hi)
}

/// Result of comparing two SEP estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agreement {
    pub difference: f64,
    /// Combined standard error of the difference.
    pub sigma: f64,
}

impl Agreement {
    /// |difference| in units of sigma; zero difference with zero sigma is 0.
    pub fn z_score(&self) -> f64 {
        if self.difference == 0.0 {
            0.0
        } else if self.sigma == 0.0 {
            f64::INFINITY
        } else {
            self.difference.abs() / self.sigma
        }
    }

    pub fn within(&self, k: f64) -> bool {
        self.z_score() <= k
    }
}

/// Monte Carlo count against a reference value with its own standard error.
///
/// The binomial part uses the reference probability, so a run with zero
/// observed errors still gets a nonzero sigma when the reference is positive.
pub fn compare_to_reference(errors: u64, trials: u64, reference: f64, reference_se: f64) -> Agreement {
    let n = trials as f64;
    let p = reference.clamp(0.0, 1.0);
    Agreement {
        difference: errors as f64 / n - reference,
        sigma: (p * (1.0 - p) / n + reference_se * reference_se).sqrt(),
    }
}

/// Two Monte Carlo counts under the pooled two-proportion null.
pub fn compare_counts(e1: u64, n1: u64, e2: u64, n2: u64) -> Agreement {
    let (a, b) = (n1 as f64, n2 as f64);
    let pooled = (e1 + e2) as f64 / (a + b);
    Agreement {
        difference: e1 as f64 / a - e2 as f64 / b,
        sigma: (pooled * (1.0 - pooled) * (1.0 / a + 1.0 / b)).sqrt(),
    }
}

/// Mean and standard error of a set of independent batch estimates.
pub fn batch_mean_se(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Kolmogorov–Smirnov statistic of a sorted sample against a cdf.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Two-sample Kolmogorov–Smirnov statistic of two sorted samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic critical value of the two-sample KS statistic at level alpha.
pub fn ks_two_sample_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_values() {
        // 0 of 100: upper limit z²/(n + z²)
        let (lo, hi) = wilson_interval(0, 100, Z95);
        assert_eq!(lo, 0.0);
        assert!((hi - Z95 * Z95 / (100.0 + Z95 * Z95)).abs() < 1e-14);
        let (lo, hi) = wilson_interval(50, 100, Z95);
        assert!((lo - 0.403_831_4).abs() < 1e-6 && (hi - 0.596_168_6).abs() < 1e-6);
        let (lo, hi) = wilson_interval(7, 7, Z95);
        assert!(hi == 1.0 && lo > 0.6);
    }

    #[test]
    fn wilson_contains_estimate() {
        for (e, n) in [(0, 10_000), (3, 10_000), (5_000, 10_000), (9_999, 10_000)] {
            let (lo, hi) = wilson_interval(e, n, Z95);
            let p = e as f64 / n as f64;
            assert!(lo <= p && p <= hi);
        }
    }

    #[test]
    fn agreement_edges() {
        assert!(compare_counts(0, 1000, 0, 1000).within(3.0));
        assert!(!compare_counts(0, 1000, 50, 1000).within(3.0));
        let a = compare_to_reference(437_500, 1_000_000, 0.4375, 0.0);
        assert_eq!(a.z_score(), 0.0);
    }

    #[test]
    fn ks_identical_samples() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(ks_two_sample(&a, &a), 0.0);
        let b: Vec<f64> = (0..100).map(|i| i as f64 + 1000.0).collect();
        assert_eq!(ks_two_sample(&a, &b), 1.0);
        let d = ks_one_sample(&[0.1, 0.2, 0.3], |x| x);
        assert!((d - 0.7).abs() < 1e-12);
    }
}
