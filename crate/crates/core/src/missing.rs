//! How many positive integers a random `A ⊆ N` fails to cover with `A + A`.
//!
//! A random set is truncated to `X = A ∩ [1, h]`; the elements of `[1, h]`
//! outside `X + X` are exactly the misses of `A + A` below `h`.

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::{Ambient, GSet};
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::rng::{random_half_subset, SeededSource};

/// Samples drawn from one ChaCha stream; stream `b` serves block `b`.
pub const BLOCK: u64 = 1 << 14;
/// Largest horizon for which every subset is enumerated.
pub const MAX_EXACT_HORIZON: usize = 24;
/// Two-sided 95% normal quantile used for the reported intervals.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Misses of `X + X` inside `[1, h]`, where `x` is the membership mask of
/// `X` with bit `i` standing for `i + 1`. `sums` is scratch of width `h - 1`.
fn misses(x: &BitSet, sums: &mut BitSet) -> usize {
    let h = x.len();
    sums.clear();
    for i in x.iter() {
        if i + 1 >= h {
            break;
        }
        sums.or_shifted(x, i);
    }
    // Bit j of sums is the sum j + 2; 1 is never a sum.
    h - sums.count()
}

/// `|{1, ..., h} \ (X + X)|` for `X` inside the interval ambient `[1, h]`.
pub fn missing_count(x: &GSet) -> Result<usize> {
    match x.ambient() {
        Ambient::Interval { lo: 1, hi } if hi >= 2 => {
            let mut sums = BitSet::new(hi as usize - 1);
            Ok(misses(x.mask(), &mut sums))
        }
        amb => Err(Error::Contract(format!(
            "missing_count needs an ambient [1, h] with h >= 2, got {amb}"
        ))),
    }
}

fn horizon_ambient(h: usize) -> Result<Ambient> {
    if h < 2 {
        return Err(Error::Domain(format!("horizon {h} must be at least 2")));
    }
    Ambient::interval(1, h as i64)
}

/// Histogram of misses over `samples` uniform subsets of `[1, h]`.
pub fn sample_histogram(h: usize, samples: u64, seed: u64) -> Result<Vec<u64>> {
    let amb = horizon_ambient(h)?;
    let blocks = samples.div_ceil(BLOCK);
    let hist = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = SeededSource::new(seed, b).rng();
            let mut sums = BitSet::new(h - 1);
            let mut hist = vec![0u64; h + 1];
            let todo = BLOCK.min(samples - b * BLOCK);
            for _ in 0..todo {
                let x = random_half_subset(amb, &mut rng);
                hist[misses(x.mask(), &mut sums)] += 1;
            }
            hist
        })
        .reduce(
            || vec![0u64; h + 1],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(hist)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissingRow {
    pub s: usize,
    pub count: u64,
    pub a_hat: f64,
    pub sigma: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// `-(2/s) log2 a_hat(s)`, when `s >= 1` and the bucket is nonempty.
    pub exponent_fit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecursionCheck {
    pub s: usize,
    pub a_hat: f64,
    pub half_previous: f64,
    pub sigma: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissingDistribution {
    pub horizon: usize,
    pub samples: u64,
    pub seed: u64,
    pub histogram: Vec<u64>,
    pub rows: Vec<MissingRow>,
    pub recursion: Vec<RecursionCheck>,
    /// `sum_{n > h} (3/4)^{floor(n/2)}`, bounding the chance that `A + A`
    /// misses anything beyond the horizon.
    pub tail_bound: f64,
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (kf, n) = (k as f64, n as f64);
    let p = kf / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if kf == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

pub fn tail_bound(h: usize) -> f64 {
    let mut total = 0.0;
    let mut n = h + 1;
    loop {
        let term = 0.75f64.powi((n / 2) as i32);
        if term < 1e-300 {
            return total;
        }
        total += term;
        n += 1;
    }
}

fn summarise(h: usize, samples: u64, seed: u64, histogram: Vec<u64>) -> MissingDistribution {
    let n = samples.max(1) as f64;
    let rows: Vec<MissingRow> = histogram
        .iter()
        .enumerate()
        .map(|(s, &count)| {
            let a_hat = count as f64 / n;
            let (ci_lo, ci_hi) = wilson_interval(count, samples, Z95);
            MissingRow {
                s,
                count,
                a_hat,
                sigma: (a_hat * (1.0 - a_hat) / n).sqrt(),
                ci_lo,
                ci_hi,
                exponent_fit: (s >= 1 && count > 0).then(|| -(2.0 / s as f64) * a_hat.log2()),
            }
        })
        .collect();
    let recursion = (3..rows.len())
        .map(|s| {
            let (cur, prev) = (&rows[s], &rows[s - 2]);
            let sigma = (cur.sigma.powi(2) + prev.sigma.powi(2) / 4.0).sqrt();
            RecursionCheck {
                s,
                a_hat: cur.a_hat,
                half_previous: prev.a_hat / 2.0,
                sigma,
                holds: cur.a_hat >= prev.a_hat / 2.0 - 3.0 * sigma,
            }
        })
        .collect();
    MissingDistribution {
        horizon: h,
        samples,
        seed,
        histogram,
        rows,
        recursion,
        tail_bound: tail_bound(h),
    }
}

/// Distribution of the miss count at horizon `10 * s_max`.
pub fn missing_distribution(s_max: usize, samples: u64, seed: u64) -> Result<MissingDistribution> {
    if s_max == 0 {
        return Err(Error::Domain("s_max must be positive".into()));
    }
    missing_distribution_at(10 * s_max, samples, seed)
}

pub fn missing_distribution_at(h: usize, samples: u64, seed: u64) -> Result<MissingDistribution> {
    let hist = sample_histogram(h, samples, seed)?;
    Ok(summarise(h, samples, seed, hist))
}

/// Miss counts over all `2^h` subsets of `[1, h]`.
pub fn exact_histogram(h: usize) -> Result<Vec<u64>> {
    horizon_ambient(h)?;
    if h > MAX_EXACT_HORIZON {
        return Err(Error::budget(
            format!("exhaustive miss count at horizon {h}"),
            2f64.powi(h as i32),
            2f64.powi(MAX_EXACT_HORIZON as i32),
        ));
    }
    let hi_bits = h.min(8);
    let lo_bits = h - hi_bits;
    let hist = (0u64..1 << hi_bits)
        .into_par_iter()
        .map(|top| {
            let mut sums = BitSet::new(h - 1);
            let mut hist = vec![0u64; h + 1];
            for low in 0u64..1 << lo_bits {
                let bits = low | top << lo_bits;
                let x = BitSet::from_indices(h, (0..h).filter(|&i| bits >> i & 1 == 1));
                hist[misses(&x, &mut sums)] += 1;
            }
            hist
        })
        .reduce(
            || vec![0u64; h + 1],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(hist)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketComparison {
    pub s: usize,
    pub exact: f64,
    pub sampled: f64,
    pub sigma: f64,
    pub within: bool,
}

/// Bucketwise comparison of a sampled histogram against exact probabilities,
/// with `sigma` the binomial standard error under the exact law.
pub fn compare_with_exact(sampled: &[u64], exact: &[u64], k_sigma: f64) -> Result<Vec<BucketComparison>> {
    if sampled.len() != exact.len() {
        return Err(Error::Contract("histograms have different horizons".into()));
    }
    let n = sampled.iter().sum::<u64>().max(1) as f64;
    let total = exact.iter().sum::<u64>() as f64;
    Ok(sampled
        .iter()
        .zip(exact)
        .enumerate()
        .map(|(s, (&c, &e))| {
            let p = e as f64 / total;
            let q = c as f64 / n;
            let sigma = (p * (1.0 - p) / n).sqrt();
            BucketComparison {
                s,
                exact: p,
                sampled: q,
                sigma,
                within: (q - p).abs() <= k_sigma * sigma,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationReport {
    pub s_max: usize,
    pub horizon: usize,
    pub extended: usize,
    pub samples: u64,
    /// Samples with at most `s_max` misses in `[1, horizon]` and at least one
    /// in `(horizon, extended]`.
    pub offending: u64,
    pub tail_bound: f64,
}

/// Samples `[1, 10 s_max + 40]` and looks for misses past `10 s_max`.
pub fn truncation_check(s_max: usize, samples: u64, seed: u64) -> Result<TruncationReport> {
    let h = 10 * s_max;
    let ext = h + 40;
    let amb = horizon_ambient(ext)?;
    horizon_ambient(h)?;
    let offending = (0..samples.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut rng = SeededSource::new(seed, b).rng();
            let mut sums = BitSet::new(ext - 1);
            let mut bad = 0u64;
            for _ in 0..BLOCK.min(samples - b * BLOCK) {
                let x = random_half_subset(amb, &mut rng);
                misses(x.mask(), &mut sums);
                // Sum t sits at bit t - 2.
                let below = 1 + (0..h - 1).filter(|&j| !sums.contains(j)).count();
                let beyond = (h - 1..ext - 1).any(|j| !sums.contains(j));
                if below <= s_max && beyond {
                    bad += 1;
                }
            }
            bad
        })
        .sum();
    Ok(TruncationReport {
        s_max,
        horizon: h,
        extended: ext,
        samples,
        offending,
        tail_bound: tail_bound(h),
    })
}

/// Uniform subset of `[1, h]` drawn the same way the samplers do.
pub fn random_truncation<R: RngCore>(h: usize, rng: &mut R) -> Result<GSet> {
    Ok(random_half_subset(horizon_ambient(h)?, rng))
}
