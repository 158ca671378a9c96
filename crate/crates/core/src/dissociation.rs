//! `M`-dissociated sets: exhaustive relation search over the integer
//! ℓ1 ball, greedy maximal dissociated subsets and ball counting.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::{Ambient, GSet};
use crate::arith::binomial;
use crate::error::{Error, Result};
use crate::rng::{sample_indices, SeededSource};
use crate::sumset::sumset_size;

/// Largest number of sign-normalised coefficient vectors a single scan may visit.
pub const DEFAULT_SCAN_BUDGET: f64 = 1e9;

/// A vanishing combination `sum λ_i x_i = 0` of small ℓ1 weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DissociationWitness {
    pub coefficients: Vec<i64>,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "dissociated", rename_all = "snake_case")]
pub enum Dissociation {
    Yes,
    No { witness: DissociationWitness },
}

impl Dissociation {
    pub fn is_yes(&self) -> bool {
        matches!(self, Dissociation::Yes)
    }
}

/// Number of integer `d`-tuples with `sum |λ_i| <= m`, zero tuple included.
pub fn l1_ball_count(d: u64, m: u64) -> BigUint {
    let mut total = BigUint::from(0u32);
    for j in 0..=d.min(m) {
        total += (BigUint::one() << j) * binomial(d, j) * binomial(m, j);
    }
    total
}

/// Nonnegative `d`-tuples with coordinate sum at most `m`.
pub fn positive_orthant_count(d: u64, m: u64) -> BigUint {
    binomial(m + d, d)
}

/// The crude envelope `(4d)^m`.
pub fn l1_ball_envelope(d: u64, m: u64) -> BigUint {
    BigUint::from(4 * d).pow(m as u32)
}

fn reduce(v: i128, modulus: Option<i128>) -> i128 {
    modulus.map_or(v, |n| v.rem_euclid(n))
}

struct Scan<'a> {
    x: &'a [i128],
    modulus: Option<i128>,
}

impl Scan<'_> {
    /// Depth-first search for a vector of weight exactly `rem` on
    /// coordinates `pos..`, ascending lexicographically, first nonzero
    /// coordinate positive.
    fn rec(&self, pos: usize, rem: i64, seen: bool, acc: i128, coeffs: &mut Vec<i64>) -> bool {
        let d = self.x.len();
        if pos == d {
            return rem == 0 && reduce(acc, self.modulus) == 0;
        }
        let lo = if seen { -rem } else { 0 };
        for lam in lo..=rem {
            let left = rem - lam.abs();
            // The last coordinate must consume the remaining weight.
            if pos + 1 == d && left != 0 {
                continue;
            }
            coeffs.push(lam);
            let next = reduce(acc + lam as i128 * self.x[pos], self.modulus);
            if self.rec(pos + 1, left, seen || lam != 0, next, coeffs) {
                return true;
            }
            coeffs.pop();
        }
        false
    }

    fn weight(&self, w: i64) -> Option<Vec<i64>> {
        let d = self.x.len();
        if d == 0 {
            return None;
        }
        (0..=w).into_par_iter().find_map_first(|first| {
            if d == 1 && first != w {
                return None;
            }
            let mut coeffs = Vec::with_capacity(d);
            coeffs.push(first);
            let acc = reduce(first as i128 * self.x[0], self.modulus);
            self.rec(1, w - first, first != 0, acc, &mut coeffs)
                .then_some(coeffs)
        })
    }
}

fn scan_budget(d: usize, m: u64, limit: f64) -> Result<()> {
    let ball = l1_ball_count(d as u64, m);
    let projected = ((ball - 1u32) / 2u32).to_f64().unwrap_or(f64::INFINITY);
    if projected > limit {
        return Err(Error::budget(
            format!(
                "l1-ball scan for d = {d}, M = {m}; envelope (4d)^M = {}",
                l1_ball_envelope(d as u64, m)
            ),
            projected,
            limit,
        ));
    }
    Ok(())
}

/// Whether no nonzero integer vector of ℓ1 weight at most `m` annihilates
/// `x`. Relations are over the integers for interval ambients and modulo
/// `N` for cyclic ones. Candidates are tried by weight, then
/// lexicographically, with the first nonzero coefficient positive.
pub fn is_dissociated(x: &[i64], m: u64, ambient: Ambient) -> Result<Dissociation> {
    is_dissociated_with_budget(x, m, ambient, DEFAULT_SCAN_BUDGET)
}

pub fn is_dissociated_with_budget(
    x: &[i64],
    m: u64,
    ambient: Ambient,
    limit: f64,
) -> Result<Dissociation> {
    scan_budget(x.len(), m, limit)?;
    let modulus = ambient.modulus().map(|n| n as i128);
    let xs: Vec<i128> = x.iter().map(|&v| reduce(v as i128, modulus)).collect();
    let scan = Scan { x: &xs, modulus };
    for w in 1..=m as i64 {
        if let Some(coefficients) = scan.weight(w) {
            return Ok(Dissociation::No {
                witness: DissociationWitness {
                    coefficients,
                    weight: w as u64,
                },
            });
        }
    }
    Ok(Dissociation::Yes)
}

/// Greedy maximal `m`-dissociated subset, scanning members in increasing order.
pub fn max_dissociated_subset(a: &GSet, m: u64) -> Result<GSet> {
    let ambient = a.ambient();
    let mut chosen: Vec<i64> = Vec::new();
    for v in a.values() {
        chosen.push(v);
        if !is_dissociated(&chosen, m, ambient)?.is_yes() {
            chosen.pop();
        }
    }
    GSet::from_values(ambient, chosen)
}

/// One sample of the dissociated-subset size experiment in `Z/NZ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DissociationSample {
    pub sample: u64,
    pub k: usize,
    pub sumset_size: usize,
    pub dense: bool,
    pub d: usize,
    /// `d / (2m/k)`.
    pub ratio: f64,
}

/// Draws uniform `k`-subsets of `Z/nZ`, extracts a greedy `big_m`-dissociated
/// subset and reports its size against `2|A+A|/k`. A sample is `dense` when
/// `|A+A| >= eps k^2`.
pub fn dissociation_experiment(
    n: u64,
    k: usize,
    big_m: u64,
    eps: f64,
    samples: u64,
    seed: u64,
) -> Result<Vec<DissociationSample>> {
    let ambient = Ambient::cyclic(n)?;
    if k == 0 || k > n as usize {
        return Err(Error::Domain(format!("k = {k} outside [1, {n}]")));
    }
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = SeededSource::new(seed, i).rng();
            let idx = sample_indices(&mut rng, n as usize, k);
            let a = GSet::from_values(ambient, idx.into_iter().map(|v| v as i64))?;
            let m = sumset_size(&a, false);
            let x = max_dissociated_subset(&a, big_m)?;
            Ok(DissociationSample {
                sample: i,
                k,
                sumset_size: m,
                dense: m as f64 >= eps * (k * k) as f64,
                d: x.len(),
                ratio: x.len() as f64 * k as f64 / (2.0 * m as f64),
            })
        })
        .collect()
}
