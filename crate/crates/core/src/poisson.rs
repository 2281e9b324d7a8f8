//! Poisson weights of coherent states, evaluated in log space.

/// Poisson probabilities `p_0 ..` with enough support that the omitted
/// upper tail is below `1e-300`.
///
/// Log-weights are accumulated outward from the mode, where they stay small,
/// and the table is normalized by its own sum; this keeps relative accuracy
/// near machine precision even for means in the thousands.
pub fn pmf_table(lambda: f64) -> Vec<f64> {
    if lambda == 0.0 {
        return vec![1.0];
    }
    let upper = (lambda + 40.0 * lambda.sqrt() + 60.0).ceil() as usize;
    let mode = (lambda.floor() as usize).min(upper);
    let ln_lambda = lambda.ln();
    let mut logw = vec![0.0_f64; upper + 1];
    for n in (mode + 1)..=upper {
        logw[n] = logw[n - 1] + ln_lambda - (n as f64).ln();
    }
    for n in (0..mode).rev() {
        logw[n] = logw[n + 1] - ln_lambda + ((n + 1) as f64).ln();
    }
    let w: Vec<f64> = logw.iter().map(|l| l.exp()).collect();
    let total: f64 = w.iter().rev().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// Probability mass of `n >= from` under a Poisson distribution of mean `lambda`.
pub fn upper_tail(lambda: f64, from: usize) -> f64 {
    let table = pmf_table(lambda);
    if from >= table.len() {
        return 0.0;
    }
    // summed from the far end so small tails keep full relative precision
    table[from..].iter().rev().sum()
}

/// Smallest truncation `dim` whose omitted tail `n >= dim` is below `tol`.
pub fn required_dim(lambda: f64, tol: f64) -> usize {
    let table = pmf_table(lambda);
    let mut tail = 0.0;
    let mut dim = table.len();
    for (n, p) in table.iter().enumerate().rev() {
        if tail + p >= tol {
            break;
        }
        tail += p;
        dim = n;
    }
    dim
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_of_mean_nine_beyond_eleven() {
        // direct complement of the first twelve terms
        let mut head = 0.0;
        let mut term = (-9.0_f64).exp();
        for n in 0..12 {
            if n > 0 {
                term *= 9.0 / n as f64;
            }
            head += term;
        }
        let tail = upper_tail(9.0, 12);
        assert!((tail - (1.0 - head)).abs() < 1e-14);
        assert!((tail - 0.197).abs() < 1e-3);
    }

    #[test]
    fn required_dim_is_minimal() {
        for &lambda in &[0.0, 0.5, 9.0, 25.0, 400.0] {
            let d = required_dim(lambda, 1e-10);
            assert!(upper_tail(lambda, d) < 1e-10);
            if d > 1 {
                assert!(upper_tail(lambda, d - 1) >= 1e-10);
            }
        }
        assert_eq!(required_dim(0.0, 1e-10), 1);
    }

    #[test]
    fn pmf_matches_direct_recurrence() {
        let mut p = (-9.0_f64).exp();
        let table = pmf_table(9.0);
        for (n, v) in table.iter().enumerate().take(40) {
            if n > 0 {
                p *= 9.0 / n as f64;
            }
            assert!((v - p).abs() <= 1e-14 * p.max(1e-300), "n={n}");
        }
    }

    #[test]
    fn pmf_sums_to_one() {
        for &lambda in &[0.0, 1.0, 9.0, 2500.0] {
            let s: f64 = pmf_table(lambda).iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "lambda {lambda}: {s}");
        }
    }
}
