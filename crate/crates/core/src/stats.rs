//! Small statistics helpers shared by the experiment harnesses.

/// Exact upper tail of a binomial: `P[Bin(n, p) >= m]`.
///
/// Computed by summing the pmf with an incrementally updated term, which is
/// stable for the `n <= 64` desk-scale range used here.
pub fn binomial_tail_geq(n: u64, p: f64, m: u64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "p out of range");
    if m == 0 {
        return 1.0;
    }
    if m > n {
        return 0.0;
    }
    if p == 0.0 {
        return 0.0; // m >= 1
    }
    if p == 1.0 {
        return 1.0; // m <= n
    }
    let q = 1.0 - p;
    // pmf(0) = q^n, then pmf(k+1) = pmf(k) * (n-k)/(k+1) * p/q.
    let mut pmf = q.powi(n as i32);
    let mut tail = 0.0;
    for k in 0..=n {
        if k >= m {
            tail += pmf;
        }
        if k < n {
            pmf *= (n - k) as f64 / (k + 1) as f64 * (p / q);
        }
    }
    tail.clamp(0.0, 1.0)
}

/// Wilson score interval for a binomial proportion at `z` standard normal
/// quantiles (use `z = 1.96` for 95%).
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// z-score of an observed count against `Bin(n, p)`.
///
/// Returns 0 when the prediction is degenerate (`p` in {0, 1}) and the
/// observation matches it exactly, infinity otherwise.
pub fn binomial_z_score(successes: u64, trials: u64, p: f64) -> f64 {
    let n = trials as f64;
    let var = n * p * (1.0 - p);
    let diff = successes as f64 - n * p;
    if var == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY * diff.signum()
        }
    } else {
        diff / var.sqrt()
    }
}

/// Total variation distance between two distributions given as aligned
/// probability slices.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Brute-force oracle: enumerate all 2^n outcome strings.
    fn tail_by_enumeration(n: u64, p: f64, m: u64) -> f64 {
        let mut total = 0.0;
        for mask in 0u64..(1 << n) {
            let ones = mask.count_ones() as u64;
            let prob = p.powi(ones as i32) * (1.0 - p).powi((n - ones) as i32);
            if ones >= m {
                total += prob;
            }
        }
        total
    }

    #[test]
    fn binomial_tail_matches_enumeration() {
        for &(n, p) in &[(1u64, 0.3), (4, 0.5), (7, 0.9), (10, 0.123)] {
            for m in 0..=n {
                let exact = tail_by_enumeration(n, p, m);
                let got = binomial_tail_geq(n, p, m);
                assert!(
                    (exact - got).abs() < 1e-12,
                    "n={n} p={p} m={m}: {exact} vs {got}"
                );
            }
        }
    }

    #[test]
    fn binomial_tail_edges() {
        assert_eq!(binomial_tail_geq(10, 0.4, 0), 1.0);
        assert_eq!(binomial_tail_geq(10, 0.4, 11), 0.0);
        assert_eq!(binomial_tail_geq(10, 0.0, 1), 0.0);
        assert_eq!(binomial_tail_geq(10, 1.0, 10), 1.0);
    }

    #[test]
    fn wilson_contains_point_estimate() {
        let (lo, hi) = wilson_interval(40, 100, 1.96);
        assert!(lo < 0.4 && 0.4 < hi);
        assert!(lo > 0.3 && hi < 0.5);
    }

    #[test]
    fn z_score_degenerate() {
        assert_eq!(binomial_z_score(100, 100, 1.0), 0.0);
        assert!(binomial_z_score(99, 100, 1.0).is_infinite());
    }

    #[test]
    fn tv_of_identical_is_zero() {
        assert_eq!(total_variation(&[0.25, 0.75], &[0.25, 0.75]), 0.0);
        assert!((total_variation(&[1.0, 0.0], &[0.0, 1.0]) - 1.0).abs() < 1e-15);
    }
}
