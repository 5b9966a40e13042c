//! Rank correlations (Spearman rho, Kendall tau-b) with tie handling,
//! independence-assuming approximate p-values, and the bootstrap comparison
//! protocol for differences between measures.

mod bootstrap;

pub use bootstrap::{
    bootstrap_compare, bootstrap_compare_matrices, BootstrapReport, RankStatistic,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::repcore::check_finite_slice;

/// Both rank correlations for one (x, y) sample, with approximate two-sided
/// p-values.
///
/// The p-values assume independent samples; perturbation suites share
/// training randomness across entries, which inflates them, so they are
/// flagged approximate and never used for automated decisions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankCorrelation {
    pub rho: f64,
    pub tau: f64,
    /// Two-sided p-value for rho (Fisher transform); `None` when n < 3.
    pub p_rho: Option<f64>,
    /// Two-sided p-value for tau (normal approximation); `None` when n < 3.
    pub p_tau: Option<f64>,
    pub n: usize,
    /// Always true: the p-values are normal approximations that assume
    /// independent samples.
    pub approximate_p: bool,
    /// Set when n < 3: too few points for the correlation to mean much.
    pub low_sample: bool,
}

/// Spearman's rho: Pearson correlation of average-ranked data (ties receive
/// their mean rank).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    pearson(&rx, &ry)
}

/// Kendall's tau-b with tie corrections, computed in `O(n log n)` with a
/// merge-sort inversion count.
///
/// All pair counts are exact integers; the only floating-point arithmetic is
/// the final `(C - D) / sqrt((n0 - n1)(n0 - n2))`, so the result is
/// bit-identical to the quadratic definitional count.
pub fn kendall(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        x[i].total_cmp(&x[j]).then_with(|| y[i].total_cmp(&y[j]))
    });
    let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();

    // Tie counts over x (and joint ties) from the sorted sequence.
    let mut n1: i128 = 0; // pairs tied in x
    let mut n3: i128 = 0; // pairs tied in both
    let mut run_x = 1i128;
    let mut run_xy = 1i128;
    for i in 1..n {
        if xs[i] == xs[i - 1] {
            run_x += 1;
            if ys[i] == ys[i - 1] {
                run_xy += 1;
            } else {
                n3 += run_xy * (run_xy - 1) / 2;
                run_xy = 1;
            }
        } else {
            n1 += run_x * (run_x - 1) / 2;
            run_x = 1;
            n3 += run_xy * (run_xy - 1) / 2;
            run_xy = 1;
        }
    }
    n1 += run_x * (run_x - 1) / 2;
    n3 += run_xy * (run_xy - 1) / 2;

    // Discordant pairs are inversions of y once sorted by (x, y).
    let discordant = merge_sort_inversions(&mut ys) as i128;

    // Tie counts over y from the now-sorted y sequence.
    let mut n2: i128 = 0;
    let mut run_y = 1i128;
    for i in 1..n {
        if ys[i] == ys[i - 1] {
            run_y += 1;
        } else {
            n2 += run_y * (run_y - 1) / 2;
            run_y = 1;
        }
    }
    n2 += run_y * (run_y - 1) / 2;

    let n0 = (n as i128) * (n as i128 - 1) / 2;
    if n1 == n0 {
        return Err(Error::DegenerateInput {
            context: "first argument is constant; tau-b is undefined".into(),
        });
    }
    if n2 == n0 {
        return Err(Error::DegenerateInput {
            context: "second argument is constant; tau-b is undefined".into(),
        });
    }

    // C + D = n0 - n1 - n2 + n3, so C - D = that minus twice the discordant count.
    let c_minus_d = n0 - n1 - n2 + n3 - 2 * discordant;
    Ok(tau_b_from_counts(c_minus_d, n0, n1, n2))
}

/// The shared final expression for tau-b; kept in one place so the fast path
/// and the quadratic oracle produce bit-identical floats.
pub fn tau_b_from_counts(c_minus_d: i128, n0: i128, n1: i128, n2: i128) -> f64 {
    (c_minus_d as f64) / (((n0 - n1) as f64) * ((n0 - n2) as f64)).sqrt()
}

/// Approximate two-sided p-values for (rho, tau) on `n` samples.
///
/// Spearman uses the Fisher transform `z = atanh(rho) * sqrt((n-3)/1.06)`;
/// Kendall uses the tau-b normal approximation with variance
/// `2(2n+5) / (9n(n-1))`. Both assume independent samples.
pub fn approx_p_values(rho: f64, tau: f64, n: usize) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::TooFewSamples { n, min: 3 });
    }
    let nf = n as f64;
    let z_rho = rho.clamp(-1.0, 1.0).atanh() * ((nf - 3.0) / 1.06).sqrt();
    let p_rho = two_sided_p(z_rho);
    let var_tau = 2.0 * (2.0 * nf + 5.0) / (9.0 * nf * (nf - 1.0));
    let z_tau = tau / var_tau.sqrt();
    let p_tau = two_sided_p(z_tau);
    Ok((p_rho, p_tau))
}

/// Compute both correlations and their approximate p-values in one shot.
pub fn rank_correlation(x: &[f64], y: &[f64]) -> Result<RankCorrelation> {
    let rho = spearman(x, y)?;
    let tau = kendall(x, y)?;
    let n = x.len();
    let (p_rho, p_tau) = if n >= 3 {
        let (pr, pt) = approx_p_values(rho, tau, n)?;
        (Some(pr), Some(pt))
    } else {
        (None, None)
    };
    Ok(RankCorrelation {
        rho,
        tau,
        p_rho,
        p_tau,
        n,
        approximate_p: true,
        low_sample: n < 3,
    })
}

fn two_sided_p(z: f64) -> f64 {
    if !z.is_finite() {
        return if z.is_nan() { f64::NAN } else { 0.0 };
    }
    (2.0 * standard_normal_cdf(-z.abs())).clamp(0.0, 1.0)
}

/// Standard normal CDF, double-precision rational approximation (accurate to
/// ~1e-15).
pub fn standard_normal_cdf(x: f64) -> f64 {
    let xabs = x.abs();
    let tail = if xabs > 37.0 {
        0.0
    } else {
        let e = (-xabs * xabs / 2.0).exp();
        if xabs < 7.071_067_811_865_48 {
            let mut num = 3.526_249_659_989_11e-2 * xabs + 0.700_383_064_443_688;
            num = num * xabs + 6.373_962_203_531_65;
            num = num * xabs + 33.912_866_078_383;
            num = num * xabs + 112.079_291_497_871;
            num = num * xabs + 221.213_596_169_931;
            num = num * xabs + 220.206_867_912_376;
            let mut den = 8.838_834_764_831_84e-2 * xabs + 1.755_667_163_182_64;
            den = den * xabs + 16.064_177_579_207;
            den = den * xabs + 86.780_732_202_946_1;
            den = den * xabs + 296.564_248_779_674;
            den = den * xabs + 637.333_633_378_831;
            den = den * xabs + 793.826_512_519_948;
            den = den * xabs + 440.413_735_824_752;
            e * num / den
        } else {
            let mut build = xabs + 0.65;
            build = xabs + 4.0 / build;
            build = xabs + 3.0 / build;
            build = xabs + 2.0 / build;
            build = xabs + 1.0 / build;
            e / (build * 2.506_628_274_631_000_5)
        }
    };
    if x > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Average ranks with ties receiving the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1 ..= j+1 share the average.
        let avg = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateInput {
            context: "first argument is constant; rank correlation is undefined".into(),
        });
    }
    if syy == 0.0 {
        return Err(Error::DegenerateInput {
            context: "second argument is constant; rank correlation is undefined".into(),
        });
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooFewSamples {
            n: x.len(),
            min: 2,
        });
    }
    check_finite_slice(x, "rank correlation first argument")?;
    check_finite_slice(y, "rank correlation second argument")?;
    Ok(())
}

fn merge_sort_inversions(values: &mut [f64]) -> u64 {
    let n = values.len();
    let mut buffer = values.to_vec();
    let mut inversions = 0u64;
    let mut width = 1;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            if mid < end {
                inversions += merge_count(&values[start..mid], &values[mid..end], &mut buffer);
                values[start..end].copy_from_slice(&buffer[..end - start]);
            }
            start = end;
        }
        width *= 2;
    }
    inversions
}

fn merge_count(left: &[f64], right: &[f64], out: &mut [f64]) -> u64 {
    let mut inversions = 0u64;
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < left.len() && j < right.len() {
        // Strict inversion only: equal values are not discordant.
        if right[j] < left[i] {
            inversions += (left.len() - i) as u64;
            out[k] = right[j];
            j += 1;
        } else {
            out[k] = left[i];
            i += 1;
        }
        k += 1;
    }
    while i < left.len() {
        out[k] = left[i];
        i += 1;
        k += 1;
    }
    while j < right.len() {
        out[k] = right[j];
        j += 1;
        k += 1;
    }
    inversions
}

/// Quadratic definitional tau-b; the oracle the fast path is validated
/// against.
pub fn kendall_brute_force(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len();
    let mut concordant: i128 = 0;
    let mut discordant: i128 = 0;
    let mut ties_x: i128 = 0;
    let mut ties_y: i128 = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = x[i].total_cmp(&x[j]);
            let dy = y[i].total_cmp(&y[j]);
            match (dx, dy) {
                (std::cmp::Ordering::Equal, std::cmp::Ordering::Equal) => {}
                (std::cmp::Ordering::Equal, _) => ties_x += 1,
                (_, std::cmp::Ordering::Equal) => ties_y += 1,
                (a, b) if a == b => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let n0 = (n as i128) * (n as i128 - 1) / 2;
    let joint = n0 - concordant - discordant - ties_x - ties_y;
    let n1 = ties_x + joint;
    let n2 = ties_y + joint;
    if n1 == n0 || n2 == n0 {
        return Err(Error::DegenerateInput {
            context: "constant input; tau-b is undefined".into(),
        });
    }
    Ok(tau_b_from_counts(concordant - discordant, n0, n1, n2))
}
