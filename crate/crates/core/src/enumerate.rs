//! Exact enumeration of `k`-subsets whose (restricted) sumset has at most
//! `m` elements.
//!
//! The search visits increasing index tuples depth-first and maintains the
//! partial sumset incrementally. In an integer interval every new largest
//! element contributes at least two fresh sums (`x + max` and `2x`, or
//! `x + max` and `x + second max` for restricted sums), which gives the
//! pruning bound; in `Z/NZ` only the current size is used.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::{Ambient, GSet};
use crate::arith::{binomial, ceil_pow2, floor_rat, is_prime, rat_int, ExactRational};
use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// Default ceiling on the projected number of `k`-subsets visited.
pub const DEFAULT_NODE_CEILING: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountQuery {
    pub ambient: Ambient,
    pub k: usize,
    /// Sumset-size budget; `None` counts every `k`-set.
    pub m: Option<usize>,
    pub restricted: bool,
}

impl CountQuery {
    pub fn new(ambient: Ambient, k: usize, m: Option<usize>, restricted: bool) -> Self {
        CountQuery {
            ambient,
            k,
            m,
            restricted,
        }
    }

    fn validate(&self, ceiling: f64) -> Result<()> {
        let n = self.ambient.size();
        if self.k == 0 || self.k > n {
            return Err(Error::Domain(format!(
                "k = {} must lie in [1, {n}] for {}",
                self.k, self.ambient
            )));
        }
        let projected = binomial(n as u64, self.k as u64).to_f64().unwrap_or(f64::INFINITY);
        if projected > ceiling {
            return Err(Error::budget(
                format!("C({n}, {}) subsets of {}", self.k, self.ambient),
                projected,
                ceiling,
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountResult {
    #[serde(serialize_with = "crate::serde_display")]
    pub exact_count: BigUint,
    /// `m' -> #{A : |A ± A| = m'}` over the sets with `m' <= m`.
    pub per_m_breakdown: BTreeMap<usize, u64>,
    pub nodes_explored: u64,
}

/// Growth guaranteed by appending `slots` more elements, each larger than
/// all current ones, to a partial set of size `size` in an integer interval.
fn interval_growth(size: usize, slots: usize, restricted: bool) -> usize {
    let mut s = size;
    let mut g = 0;
    for _ in 0..slots {
        g += if restricted { s.min(2) } else if s == 0 { 1 } else { 2 };
        s += 1;
    }
    g
}

struct Searcher {
    n: usize,
    k: usize,
    m: usize,
    restricted: bool,
    cyclic: bool,
    masks: Vec<BitSet>,
    sums: Vec<BitSet>,
    chosen: Vec<usize>,
    nodes: u64,
    growth: Vec<Vec<usize>>,
}

impl Searcher {
    fn new(q: &CountQuery) -> Self {
        let n = q.ambient.size();
        let cyclic = q.ambient.is_cyclic();
        let width = if cyclic { n } else { 2 * n - 1 };
        let growth = (0..=q.k)
            .map(|size| (0..=q.k).map(|slots| interval_growth(size, slots, q.restricted)).collect())
            .collect();
        Searcher {
            n,
            k: q.k,
            m: q.m.unwrap_or(usize::MAX),
            restricted: q.restricted,
            cyclic,
            masks: (0..=q.k).map(|_| BitSet::new(n)).collect(),
            sums: (0..=q.k).map(|_| BitSet::new(width)).collect(),
            chosen: Vec::with_capacity(q.k),
            nodes: 0,
            growth,
        }
    }

    /// Extends depth `d` with element `x`, writing depth `d + 1`. Returns the
    /// new sumset size, or `None` when the branch is pruned.
    fn push(&mut self, d: usize, x: usize) -> Option<usize> {
        self.nodes += 1;
        let (lo, hi) = self.sums.split_at_mut(d + 1);
        let next = &mut hi[0];
        next.clone_from(&lo[d]);
        if self.cyclic {
            next.or_rotated(&self.masks[d], x);
            if !self.restricted {
                next.insert((2 * x) % self.n);
            }
        } else {
            next.or_shifted(&self.masks[d], x);
            if !self.restricted {
                next.insert(2 * x);
            }
        }
        let size = next.count();
        let slots = self.k - (d + 1);
        let bound = if self.cyclic {
            size
        } else {
            size + self.growth[d + 1][slots]
        };
        if bound > self.m {
            return None;
        }
        let (lo, hi) = self.masks.split_at_mut(d + 1);
        hi[0].clone_from(&lo[d]);
        hi[0].insert(x);
        Some(size)
    }

    fn run<F: FnMut(&[usize], usize) -> bool>(&mut self, d: usize, start: usize, visit: &mut F) -> bool {
        let slots_after = self.k - d - 1;
        for x in start..self.n {
            if self.n - x - 1 < slots_after {
                break;
            }
            let Some(size) = self.push(d, x) else { continue };
            self.chosen.push(x);
            let keep_going = if d + 1 == self.k {
                visit(&self.chosen, size)
            } else {
                self.run(d + 1, x + 1, visit)
            };
            self.chosen.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }

    /// Searches only the subtree whose least element is `first`.
    fn run_rooted<F: FnMut(&[usize], usize) -> bool>(&mut self, first: usize, visit: &mut F) {
        if self.n - first - 1 < self.k - 1 {
            return;
        }
        let Some(size) = self.push(0, first) else { return };
        self.chosen.push(first);
        if self.k == 1 {
            visit(&self.chosen, size);
        } else {
            self.run(1, first + 1, visit);
        }
        self.chosen.pop();
    }
}

/// Exact number of `k`-sets in the ambient with `|A ± A| <= m`.
pub fn count_small_sumset(q: &CountQuery) -> Result<CountResult> {
    count_small_sumset_with_ceiling(q, DEFAULT_NODE_CEILING)
}

pub fn count_small_sumset_with_ceiling(q: &CountQuery, ceiling: f64) -> Result<CountResult> {
    q.validate(ceiling)?;
    let n = q.ambient.size();
    let partials: Vec<(BTreeMap<usize, u64>, u64)> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut s = Searcher::new(q);
            let mut hist = BTreeMap::new();
            s.run_rooted(first, &mut |_, size| {
                *hist.entry(size).or_insert(0u64) += 1;
                true
            });
            (hist, s.nodes)
        })
        .collect();
    let mut per_m_breakdown = BTreeMap::new();
    let mut nodes_explored = 0;
    for (h, nodes) in partials {
        nodes_explored += nodes;
        for (m, c) in h {
            *per_m_breakdown.entry(m).or_insert(0) += c;
        }
    }
    let exact_count = per_m_breakdown.values().map(|&c| BigUint::from(c)).sum();
    Ok(CountResult {
        exact_count,
        per_m_breakdown,
        nodes_explored,
    })
}

/// Sets produced by [`list_small_sumset`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Listing {
    pub sets: Vec<GSet>,
    /// More qualifying sets exist beyond the cap.
    pub truncated: bool,
}

/// Streams every qualifying set, in lexicographic order of the sorted
/// member list, to `visit` until it returns `false`.
pub fn for_each_small_sumset<F: FnMut(GSet) -> bool>(q: &CountQuery, mut visit: F) -> Result<()> {
    q.validate(DEFAULT_NODE_CEILING)?;
    let amb = q.ambient;
    let mut s = Searcher::new(q);
    s.run(0, 0, &mut |idx, _| {
        let set = GSet::from_mask(amb, BitSet::from_indices(amb.size(), idx.iter().copied()))
            .expect("indices lie in the ambient");
        visit(set)
    });
    Ok(())
}

pub fn list_small_sumset(q: &CountQuery, cap: usize) -> Result<Listing> {
    let mut sets = Vec::new();
    let mut truncated = false;
    for_each_small_sumset(q, |a| {
        if sets.len() == cap {
            truncated = true;
            return false;
        }
        sets.push(a);
        true
    })?;
    Ok(Listing { sets, truncated })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundValue {
    #[serde(serialize_with = "crate::serde_display")]
    pub value: BigUint,
    /// `ceil(2^(delta k))`.
    #[serde(serialize_with = "crate::serde_display")]
    pub pow2_factor: BigUint,
    /// `floor(K k / 2)`, the top index of the binomial.
    pub binomial_top: u64,
    /// `floor(K + delta)`, the exponent of `N`.
    pub n_exponent: u64,
    /// The binomial vanished because `k > floor(K k / 2)`.
    pub binomial_zero: bool,
}

/// `ceil(2^(delta k)) * C(floor(K k / 2), k) * N^floor(K + delta)`.
pub fn small_doubling_bound(n: u64, k: u64, big_k: &ExactRational, delta: &ExactRational) -> Result<BoundValue> {
    let zero = ExactRational::zero();
    if *big_k <= zero || *delta <= zero || k == 0 {
        return Err(Error::Domain("need K > 0, delta > 0 and k >= 1".into()));
    }
    let kr = rat_int(k);
    let pow2_factor = ceil_pow2(&(delta * &kr))?;
    let binomial_top = u64::try_from(floor_rat(&(big_k * &kr / rat_int(2))))
        .map_err(|_| Error::Range("binomial top index out of range".into()))?;
    let n_exponent = u64::try_from(floor_rat(&(big_k + delta)))
        .map_err(|_| Error::Range("exponent out of range".into()))?;
    let b = binomial(binomial_top, k);
    let binomial_zero = b.is_zero();
    let value = &pow2_factor * b * num_traits::pow(BigUint::from(n), n_exponent as usize);
    Ok(BoundValue {
        value,
        pow2_factor,
        binomial_top,
        n_exponent,
        binomial_zero,
    })
}

/// Base-2 logarithm of the bound evaluated in floating point, for
/// cross-checking [`small_doubling_bound`].
pub fn small_doubling_bound_log2(n: u64, k: u64, big_k: f64, delta: f64) -> f64 {
    let top = (big_k * k as f64 / 2.0).floor();
    let mut log_binom = 0.0;
    for i in 0..k {
        log_binom += ((top - i as f64) / (i + 1) as f64).log2();
    }
    (delta * k as f64).exp2().ceil().log2() + log_binom + (big_k + delta).floor() * (n as f64).log2()
}

/// Lexicographically least member list among all affine images
/// `lambda * A + mu`, `lambda != 0`, of `A` in `Z/NZ` with `N` prime.
pub fn affine_canonical(a: &GSet) -> Result<GSet> {
    let n = a
        .ambient()
        .modulus()
        .ok_or_else(|| Error::Domain("affine canonical form needs Z/NZ".into()))?;
    if !is_prime(n) {
        return Err(Error::Domain(format!("modulus {n} is not prime")));
    }
    if a.is_empty() {
        return Err(Error::Domain("affine canonical form of the empty set".into()));
    }
    let members: Vec<u64> = a.mask().iter().map(|i| i as u64).collect();
    // The minimum contains 0, so only translates sending a member to 0 compete.
    let best = (1..n)
        .into_par_iter()
        .map(|lambda| {
            let dil: Vec<u64> = members.iter().map(|&x| x * lambda % n).collect();
            let mut best: Option<Vec<u64>> = None;
            let mut buf = Vec::with_capacity(dil.len());
            for &anchor in &dil {
                buf.clear();
                buf.extend(dil.iter().map(|&x| (x + n - anchor) % n));
                buf.sort_unstable();
                if best.as_ref().is_none_or(|b| buf < *b) {
                    best = Some(buf.clone());
                }
            }
            best.expect("nonempty set")
        })
        .min()
        .expect("n >= 2");
    GSet::from_values(a.ambient(), best.into_iter().map(|x| x as i64))
}
