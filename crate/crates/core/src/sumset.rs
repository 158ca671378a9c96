//! Sumset kernels, doubling statistics and representation counts.
//!
//! Plain and restricted sumsets are computed with word-parallel shift-or
//! over the membership mask: for each member `a`, OR the mask shifted by
//! `a` into the result. Cyclic sums are formed over `[0, 2N-1)` and then
//! folded onto `Z/NZ`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::ambient::{Ambient, GSet};
use crate::arith::{ceil_rat, floor_rat, is_prime, rat_int, ExactRational};
use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// Unfolded sums of two masks as a mask of width `a.len() + b.len() - 1`
/// (index `i + j` for members `i` of `a`, `j` of `b`).
pub(crate) fn add_masks(a: &BitSet, b: &BitSet) -> BitSet {
    let width = (a.len() + b.len()).saturating_sub(1).max(1);
    let mut out = BitSet::new(width);
    let (small, large) = if a.count() <= b.count() { (a, b) } else { (b, a) };
    for i in small.iter() {
        out.or_shifted(large, i);
    }
    out
}

/// Unfolded restricted sums `i + j`, `i != j`, of one mask.
pub(crate) fn restricted_self_sums(a: &BitSet) -> BitSet {
    let width = (2 * a.len()).saturating_sub(1).max(1);
    let mut out = BitSet::new(width);
    let members: Vec<usize> = a.iter().collect();
    let mut above = BitSet::new(a.len());
    for &i in members.iter().rev() {
        out.or_shifted(&above, i);
        above.insert(i);
    }
    out
}

/// `A + A`, or the restricted sumset `A +^ A = {a + b : a != b}`.
///
/// For an interval ambient `[lo, hi]` the result lives in `[2lo, 2hi]`; for
/// `Z/NZ` it stays in `Z/NZ`.
pub fn sumset(a: &GSet, restricted: bool) -> GSet {
    let amb = a.ambient();
    let raw = if restricted {
        restricted_self_sums(a.mask())
    } else {
        add_masks(a.mask(), a.mask())
    };
    let mask = match amb {
        Ambient::Interval { .. } => {
            let mut m = BitSet::new(2 * amb.size() - 1);
            m.or_shifted(&raw, 0);
            m
        }
        Ambient::Cyclic { modulus } => raw.fold_mod(modulus as usize),
    };
    GSet::from_mask(amb.doubled(), mask).expect("sumset width is consistent")
}

/// Sumset of two sets in the same ambient.
pub fn sumset_of(a: &GSet, b: &GSet) -> Result<GSet> {
    if a.ambient() != b.ambient() {
        return Err(Error::Contract("sumset of sets in different ambients".into()));
    }
    let amb = a.ambient();
    let raw = add_masks(a.mask(), b.mask());
    let mask = match amb {
        Ambient::Interval { .. } => {
            let mut m = BitSet::new(2 * amb.size() - 1);
            m.or_shifted(&raw, 0);
            m
        }
        Ambient::Cyclic { modulus } => raw.fold_mod(modulus as usize),
    };
    GSet::from_mask(amb.doubled(), mask)
}

/// Double-loop reference implementation of [`sumset`].
pub fn sumset_naive(a: &GSet, restricted: bool) -> GSet {
    let amb = a.ambient().doubled();
    let v = a.to_vec();
    let mut out = GSet::empty(amb);
    for (i, &x) in v.iter().enumerate() {
        for &y in &v[i..] {
            if restricted && x == y {
                continue;
            }
            out.insert(x + y).expect("sum lies in the doubled ambient");
        }
    }
    out
}

pub fn sumset_size(a: &GSet, restricted: bool) -> usize {
    sumset(a, restricted).len()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingStats {
    pub k: usize,
    pub sumset_size: usize,
    pub restricted_size: usize,
    #[serde(serialize_with = "crate::serde_rational")]
    pub doubling: ExactRational,
}

impl DoublingStats {
    /// `|A +^ A| / |A + A|`, the quantity whose limit is one for large sets.
    pub fn restricted_ratio(&self) -> ExactRational {
        ExactRational::new(BigInt::from(self.restricted_size), BigInt::from(self.sumset_size))
    }
}

pub fn doubling_stats(a: &GSet) -> Result<DoublingStats> {
    let k = a.len();
    if k == 0 {
        return Err(Error::Domain("doubling of the empty set is undefined".into()));
    }
    let s = sumset_size(a, false);
    let r = sumset_size(a, true);
    Ok(DoublingStats {
        k,
        sumset_size: s,
        restricted_size: r,
        doubling: ExactRational::new(BigInt::from(s), BigInt::from(k)),
    })
}

/// Ordered representation counts for a subset of `Z/qZ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepHistogram {
    pub q: u64,
    /// `reps[x] = #{(i, j) in S x S : i + j = x}`.
    pub reps: Vec<u64>,
    /// `counts[t - 1] = N_t = #{x : reps[x] >= t}` for `t = 1..=max reps`.
    pub counts: Vec<u64>,
}

impl RepHistogram {
    /// `N_t`; `N_0 = q` since every element has at least zero representations.
    pub fn n(&self, t: u64) -> u64 {
        if t == 0 {
            return self.q;
        }
        self.counts.get(t as usize - 1).copied().unwrap_or(0)
    }

    pub fn total_mass(&self) -> u64 {
        self.reps.iter().sum()
    }
}

fn require_prime_cyclic(s: &GSet) -> Result<u64> {
    let q = s
        .ambient()
        .modulus()
        .ok_or_else(|| Error::Domain("representation counts need a cyclic ambient".into()))?;
    if !is_prime(q) {
        return Err(Error::Domain(format!("modulus {q} is not prime")));
    }
    Ok(q)
}

pub fn rep_histogram(s: &GSet) -> Result<RepHistogram> {
    let q = require_prime_cyclic(s)?;
    let members: Vec<usize> = s.mask().iter().collect();
    let mut reps = vec![0u64; q as usize];
    for &i in &members {
        for &j in &members {
            reps[(i + j) % q as usize] += 1;
        }
    }
    let max = reps.iter().copied().max().unwrap_or(0);
    let mut at_least = vec![0u64; max as usize + 2];
    for &r in &reps {
        at_least[r as usize] += 1;
    }
    // suffix sums: N_t = #{x : reps >= t}
    for t in (0..=max as usize).rev() {
        at_least[t] += at_least[t + 1];
    }
    let counts = (1..=max as usize).map(|t| at_least[t]).collect();
    Ok(RepHistogram { q, reps, counts })
}

/// Checks `(N_1 + ... + N_t) / t >= min(2|S|, q) - t` in integer form.
pub fn pollard_averaged_holds(h: &RepHistogram, set_size: usize, t: u64) -> bool {
    assert!(t >= 1);
    let lhs: i128 = (1..=t).map(|i| h.n(i) as i128).sum();
    let m = (2 * set_size as i128).min(h.q as i128);
    lhs >= t as i128 * (m - t as i128)
}

/// All `t in [1, q]` at which the averaged inequality fails.
pub fn pollard_violations(s: &GSet) -> Result<Vec<u64>> {
    let h = rep_histogram(s)?;
    let k = s.len();
    Ok((1..=h.q).filter(|&t| !pollard_averaged_holds(&h, k, t)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PollardReport {
    pub q: u64,
    pub set_size: usize,
    #[serde(serialize_with = "crate::serde_rational")]
    pub beta: ExactRational,
    /// Whether `q > 16 / beta^2`, the regime of the quantitative statement.
    pub quantitative_regime: bool,
    /// `t = floor(beta q / 2)`.
    pub t_used: u64,
    /// `ceil(beta^2 q / 8)`.
    pub threshold: u64,
    /// `floor(beta/2 * floor(beta q / 2))`, the threshold the derivation actually reaches.
    pub nested_threshold: u64,
    /// Elements with at least `threshold` representations.
    pub popular_count: u64,
    /// Elements with at least `nested_threshold` representations.
    pub popular_count_nested: u64,
    /// `min(2|S|, q) - beta q`.
    #[serde(serialize_with = "crate::serde_rational")]
    pub lemma_bound: ExactRational,
    /// `popular_count_nested >= lemma_bound`.
    pub lemma_holds: bool,
    /// `popular_count >= lemma_bound`.
    pub lemma_holds_ceil_threshold: bool,
    /// `(N_1 + ... + N_t)/t` at `t = t_used`, when `t_used >= 1`.
    #[serde(serialize_with = "crate::serde_opt_rational")]
    pub averaged_lhs: Option<ExactRational>,
    pub averaged_rhs: Option<i64>,
    pub averaged_holds: Option<bool>,
}

pub fn pollard_report(s: &GSet, beta: &ExactRational) -> Result<PollardReport> {
    if *beta <= ExactRational::zero() || *beta > ExactRational::one() {
        return Err(Error::Domain(format!("beta = {beta} outside (0, 1]")));
    }
    let h = rep_histogram(s)?;
    let q = h.q;
    let k = s.len();
    let qr = rat_int(q);
    let to_u64 = |b: BigInt| -> u64 { u64::try_from(b).unwrap_or(0) };

    let t_used = to_u64(floor_rat(&(beta * &qr / rat_int(2))));
    let threshold = to_u64(ceil_rat(&(beta * beta * &qr / rat_int(8))));
    let nested_threshold = to_u64(floor_rat(&(beta * rat_int(t_used) / rat_int(2))));
    let quantitative_regime = qr > rat_int(16) / (beta * beta);

    let min_term = (2 * k as u64).min(q);
    let lemma_bound = rat_int(min_term) - beta * &qr;
    let popular_count = h.n(threshold);
    let popular_count_nested = h.n(nested_threshold);

    let (averaged_lhs, averaged_rhs, averaged_holds) = if t_used >= 1 {
        let sum: u64 = (1..=t_used).map(|i| h.n(i)).sum();
        let lhs = ExactRational::new(BigInt::from(sum), BigInt::from(t_used));
        let rhs = min_term as i64 - t_used as i64;
        let holds = pollard_averaged_holds(&h, k, t_used);
        (Some(lhs), Some(rhs), Some(holds))
    } else {
        (None, None, None)
    };

    Ok(PollardReport {
        q,
        set_size: k,
        beta: beta.clone(),
        quantitative_regime,
        t_used,
        threshold,
        nested_threshold,
        popular_count,
        popular_count_nested,
        lemma_holds: rat_int(popular_count_nested) >= lemma_bound,
        lemma_holds_ceil_threshold: rat_int(popular_count) >= lemma_bound,
        lemma_bound,
        averaged_lhs,
        averaged_rhs,
        averaged_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    fn iv(lo: i64, hi: i64, v: &[i64]) -> GSet {
        GSet::interval(lo, hi, v.iter().copied()).unwrap()
    }

    #[test]
    fn small_examples() {
        let a = iv(1, 10, &[1, 2, 3]);
        assert_eq!(sumset(&a, false).to_vec(), vec![2, 3, 4, 5, 6]);
        assert_eq!(sumset(&a, true).to_vec(), vec![3, 4, 5]);
        assert_eq!(sumset(&a, false).ambient(), Ambient::interval(2, 20).unwrap());

        // powers of two are a Sidon set: C(5,2) + 5 distinct sums
        let p = iv(1, 32, &[1, 2, 4, 8, 16]);
        assert_eq!(sumset_size(&p, false), 15);
        assert_eq!(sumset_naive(&p, false).len(), 15);

        let e = GSet::empty(Ambient::interval(0, 4).unwrap());
        assert!(sumset(&e, true).is_empty());
        assert!(sumset(&e, false).is_empty());
    }

    #[test]
    fn doubling_examples() {
        for k in 1..=12i64 {
            let ap: Vec<i64> = (0..k).map(|i| 3 + 5 * i).collect();
            let a = iv(0, 100, &ap);
            let d = doubling_stats(&a).unwrap();
            assert_eq!(d.sumset_size, 2 * k as usize - 1);
            assert_eq!(d.doubling, rat(2 * k - 1, k));
        }
        let z = GSet::cyclic(5, [0]).unwrap();
        let d = doubling_stats(&z).unwrap();
        assert_eq!((d.sumset_size, d.doubling.clone()), (1, rat(1, 1)));
        assert!(doubling_stats(&GSet::empty(Ambient::cyclic(5).unwrap())).is_err());
    }

    /// AP of length k - K + 2 plus K - 2 scattered points.
    #[test]
    fn two_part_family_has_doubling_below_k() {
        for big_k in 3..=6i64 {
            for k in (big_k + 2)..=(big_k + 12) {
                let p_len = k - big_k + 2;
                let mut v: Vec<i64> = (0..p_len).collect();
                // generic points: far apart and with distinct pairwise sums
                for i in 0..(big_k - 2) {
                    v.push(1000 * (1 << i) + 7 * i);
                }
                let a = GSet::interval(0, 40_000, v).unwrap();
                let d = doubling_stats(&a).unwrap();
                let p = p_len;
                let bound = 2 * p + (big_k - 2) * p + (big_k - 2) * (big_k - 1) / 2;
                assert!(d.sumset_size as i64 <= bound, "K={big_k} k={k}");
                assert!((d.sumset_size as i64) < big_k * a.len() as i64);
            }
        }
    }

    #[test]
    fn histogram_examples() {
        let full = GSet::full(Ambient::cyclic(5).unwrap());
        let h = rep_histogram(&full).unwrap();
        assert!(h.reps.iter().all(|&r| r == 5));
        assert_eq!((1..=5).map(|t| h.n(t)).collect::<Vec<_>>(), vec![5; 5]);
        assert_eq!(h.n(6), 0);

        // enumerate all 9 ordered pairs of {0,1,3} in Z/7
        let s = GSet::cyclic(7, [0, 1, 3]).unwrap();
        let mut oracle = [0u64; 7];
        for i in [0, 1, 3] {
            for j in [0, 1, 3] {
                oracle[(i + j) % 7] += 1;
            }
        }
        let h = rep_histogram(&s).unwrap();
        assert_eq!(h.reps, oracle.to_vec());
        assert_eq!(h.reps, vec![1, 2, 1, 2, 2, 0, 1]);
        assert_eq!((h.n(1), h.n(2), h.n(3)), (6, 3, 0));
        assert_eq!(h.total_mass(), 9);

        let e = GSet::empty(Ambient::cyclic(7).unwrap());
        let h = rep_histogram(&e).unwrap();
        assert_eq!(h.n(1), 0);
        assert!(rep_histogram(&GSet::cyclic(8, [1]).unwrap()).is_err());
    }

    #[test]
    fn pollard_examples() {
        let s = GSet::cyclic(7, [0, 1, 3]).unwrap();
        let h = rep_histogram(&s).unwrap();
        // (6 + 3) / 2 = 4.5 >= min(6, 7) - 2 = 4
        assert!(pollard_averaged_holds(&h, 3, 2));
        let r = pollard_report(&s, &rat(4, 7)).unwrap();
        assert_eq!(r.t_used, 2);
        assert_eq!(r.averaged_lhs, Some(rat(9, 2)));
        assert_eq!(r.averaged_rhs, Some(4));
        assert_eq!(r.averaged_holds, Some(true));

        let full = GSet::full(Ambient::cyclic(11).unwrap());
        assert!(pollard_violations(&full).unwrap().is_empty());
        let r = pollard_report(&full, &rat(1, 1)).unwrap();
        assert!(r.lemma_holds && r.averaged_holds == Some(true));

        assert!(pollard_report(&s, &rat(0, 1)).is_err());
        assert!(pollard_report(&s, &rat(3, 2)).is_err());
    }

    #[test]
    fn pollard_thresholds() {
        // q = 101, beta = 1/2: t = 25, ceil(101/32) = 4, nested floor(25/4) = 6
        let s = GSet::cyclic(101, 0..30).unwrap();
        let r = pollard_report(&s, &rat(1, 2)).unwrap();
        assert_eq!((r.t_used, r.threshold, r.nested_threshold), (25, 4, 6));
        assert!(r.quantitative_regime);
        assert!(r.lemma_holds);
    }

    #[test]
    fn pollard_exhaustive_small_primes() {
        for q in [2u64, 3, 5, 7, 11] {
            for bits in 0u64..(1 << q) {
                let s = GSet::cyclic(q, (0..q as i64).filter(|i| bits >> i & 1 == 1)).unwrap();
                assert!(pollard_violations(&s).unwrap().is_empty(), "q={q} S={s:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn kernels_match_naive(cyc in any::<bool>(), n in 1i64..90, vals in prop::collection::vec(0i64..90, 0..25), restricted in any::<bool>()) {
            let a = if cyc {
                GSet::cyclic(n as u64, vals.iter().copied()).unwrap()
            } else {
                GSet::interval(0, n, vals.iter().map(|v| v % (n + 1))).unwrap()
            };
            prop_assert_eq!(sumset(&a, restricted), sumset_naive(&a, restricted));
        }

        #[test]
        fn plain_restricted_sandwich(n in 2u64..60, vals in prop::collection::vec(0i64..60, 1..20)) {
            let a = GSet::cyclic(n, vals).unwrap();
            let plain = sumset(&a, false);
            let restricted = sumset(&a, true);
            prop_assert!(restricted.is_subset(&plain));
            let mut with_doubles = restricted.clone();
            for x in a.values() {
                with_doubles.insert(2 * x).unwrap();
            }
            prop_assert_eq!(with_doubles, plain.clone());
            let d = doubling_stats(&a).unwrap();
            prop_assert!(d.restricted_size <= d.sumset_size && d.sumset_size <= d.restricted_size + d.k);
        }

        #[test]
        fn interval_bounds(vals in prop::collection::btree_set(-40i64..40, 1..15)) {
            let a = GSet::interval(-40, 40, vals.iter().copied()).unwrap();
            let k = a.len();
            let s = sumset_size(&a, false);
            prop_assert!(2 * k - 1 <= s && s <= k * (k + 1) / 2);
        }

        #[test]
        fn histogram_mass(qi in 0usize..6, vals in prop::collection::vec(0i64..100, 0..30)) {
            let q = [2u64, 3, 13, 31, 61, 97][qi];
            let s = GSet::cyclic(q, vals).unwrap();
            let h = rep_histogram(&s).unwrap();
            prop_assert_eq!(h.total_mass(), (s.len() * s.len()) as u64);
            prop_assert!(h.counts.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(h.counts.iter().all(|&c| c <= q));
        }

        #[test]
        fn dilation_invariance(qi in 0usize..4, lambda in 1i64..1000, vals in prop::collection::vec(0i64..200, 1..20)) {
            let p = [7u64, 31, 101, 197][qi];
            prop_assume!(lambda % p as i64 != 0);
            let a = GSet::cyclic(p, vals).unwrap();
            let b = a.dilate(lambda).unwrap();
            prop_assert_eq!(sumset_size(&a, false), sumset_size(&b, false));
        }
    }
}
