//! Small statistics helpers for the calibration and validation harnesses.

/// Mean and population standard deviation.
pub fn mean_and_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Two-sample Kolmogorov-Smirnov test result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// Supremum distance between the two empirical CDFs.
    pub statistic: f64,
    /// Asymptotic p-value (conservative in the presence of ties).
    pub p_value: f64,
}

/// Two-sample KS test on raw observations.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> KsResult {
    assert!(!a.is_empty() && !b.is_empty(), "KS needs nonempty samples");
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());

    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0_f64;
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        let diff = (i as f64 / n as f64 - j as f64 / m as f64).abs();
        d = d.max(diff);
    }

    let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    KsResult {
        statistic: d,
        p_value: ks_survival(lambda),
    }
}

/// Kolmogorov distribution tail `Q(λ) = 2 Σ (−1)^{j−1} exp(−2 j² λ²)`.
fn ks_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j as f64) * (j as f64) * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_sd_basics() {
        let (mean, sd) = mean_and_sd(&[1.0, 2.0, 3.0, 4.0]);
        assert!((mean - 2.5).abs() < 1e-12);
        assert!((sd - (1.25_f64).sqrt()).abs() < 1e-12);
        assert_eq!(mean_and_sd(&[]), (0.0, 0.0));
    }

    #[test]
    fn ks_statistic_hand_checked() {
        // CDF gap between {1,2} and {1,3} peaks at 1/2 just after 2.
        let r = two_sample_ks(&[1.0, 2.0], &[1.0, 3.0]);
        assert!((r.statistic - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ks_identical_samples_have_high_p() {
        let xs: Vec<f64> = (0..500).map(|i| (i % 37) as f64).collect();
        let r = two_sample_ks(&xs, &xs);
        assert_eq!(r.statistic, 0.0);
        assert!(r.p_value > 0.99);
    }

    #[test]
    fn ks_disjoint_samples_have_tiny_p() {
        let xs: Vec<f64> = (0..200).map(|i| i as f64).collect();
        let ys: Vec<f64> = (0..200).map(|i| 1000.0 + i as f64).collect();
        let r = two_sample_ks(&xs, &ys);
        assert_eq!(r.statistic, 1.0);
        assert!(r.p_value < 1e-6);
    }
}
