//! Chi-square helpers for comparing seeded samplers.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sample chi-square outcome.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Two-sample chi-square over aligned category counts.
///
/// Categories whose combined count falls below `min_combined` are pooled
/// with the following ones, so the asymptotic chi-square approximation
/// stays usable. With unequal sample sizes the counts are rescaled by
/// sqrt(B/A) and sqrt(A/B).
pub fn chi_square_two_sample(a: &[u64], b: &[u64], min_combined: u64) -> ChiSquareResult {
    assert_eq!(a.len(), b.len(), "category counts must align");
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut acc_a = 0u64;
    let mut acc_b = 0u64;
    for (&x, &y) in a.iter().zip(b) {
        acc_a += x;
        acc_b += y;
        if acc_a + acc_b >= min_combined {
            bins.push((acc_a as f64, acc_b as f64));
            acc_a = 0;
            acc_b = 0;
        }
    }
    if acc_a + acc_b > 0 {
        if let Some(last) = bins.last_mut() {
            last.0 += acc_a as f64;
            last.1 += acc_b as f64;
        } else {
            bins.push((acc_a as f64, acc_b as f64));
        }
    }
    if bins.len() < 2 {
        return ChiSquareResult {
            statistic: 0.0,
            df: 0,
            p_value: 1.0,
        };
    }
    let total_a: f64 = bins.iter().map(|(x, _)| x).sum();
    let total_b: f64 = bins.iter().map(|(_, y)| y).sum();
    let k1 = (total_b / total_a).sqrt();
    let k2 = (total_a / total_b).sqrt();
    let statistic: f64 = bins
        .iter()
        .map(|&(x, y)| {
            let diff = k1 * x - k2 * y;
            diff * diff / (x + y)
        })
        .sum();
    let df = bins.len() - 1;
    let p_value = 1.0 - chi_square_cdf(statistic, df as f64);
    ChiSquareResult {
        statistic,
        df,
        p_value,
    }
}

/// Builds aligned integer-value histograms over the combined range of two
/// samples, then runs the two-sample test.
pub fn chi_square_two_sample_values(xs: &[u64], ys: &[u64], min_combined: u64) -> ChiSquareResult {
    let lo = xs.iter().chain(ys).copied().min().unwrap_or(0);
    let hi = xs.iter().chain(ys).copied().max().unwrap_or(0);
    let width = (hi - lo + 1) as usize;
    let mut a = vec![0u64; width];
    let mut b = vec![0u64; width];
    for &x in xs {
        a[(x - lo) as usize] += 1;
    }
    for &y in ys {
        b[(y - lo) as usize] += 1;
    }
    chi_square_two_sample(&a, &b, min_combined)
}

pub fn chi_square_cdf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ChiSquared::new(df).expect("positive df").cdf(x)
}
