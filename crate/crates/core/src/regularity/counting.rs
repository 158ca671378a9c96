//! The four-term expansion of `#{(x, x') in A x A' : x + x' in S}` and the
//! sumset lower bound for regular pairs of dense sets.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::fourier::{regular_pair_test, RegularityVerdict};
use crate::ambient::{Ambient, GSet};
use crate::arith::ExactRational;
use crate::error::{Error, Result};
use crate::sumset::add_masks;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountingTerms {
    pub incidences: u64,
    #[serde(serialize_with = "crate::serde_rational")]
    pub main: ExactRational,
    #[serde(serialize_with = "crate::serde_rational")]
    pub e1: ExactRational,
    #[serde(serialize_with = "crate::serde_rational")]
    pub e2: ExactRational,
    #[serde(serialize_with = "crate::serde_rational")]
    pub e3: ExactRational,
}

impl CountingTerms {
    pub fn total(&self) -> ExactRational {
        &self.main + &self.e1 + &self.e2 + &self.e3
    }

    pub fn identity_holds(&self) -> bool {
        self.total() == ExactRational::from_integer(self.incidences.into())
    }
}

fn interval(a: &GSet) -> Result<(i64, usize)> {
    match a.ambient() {
        Ambient::Interval { lo, .. } => Ok((lo, a.ambient().size())),
        _ => Err(Error::Contract("expected a set in an interval ambient".into())),
    }
}

/// Splits `1_A = alpha 1_I + f_A` and `1_A' = alpha' 1_I' + f_A'` and sums
/// each product term against `1_S(x + x')` exactly. Sums are accumulated
/// with the integer weights `|I| f_A` and `|I'| f_A'`.
pub fn counting_terms(a: &GSet, b: &GSet, s: &GSet) -> Result<CountingTerms> {
    let (lo_a, la) = interval(a)?;
    let (lo_b, lb) = interval(b)?;
    let (na, nb) = (a.len() as i128, b.len() as i128);
    let (la_i, lb_i) = (la as i128, lb as i128);
    let (mut plain, mut with_fb, mut with_fa, mut with_both) = (0i128, 0i128, 0i128, 0i128);
    let mut incidences = 0u64;
    for i in 0..la {
        let in_a = a.mask().contains(i);
        let wa = la_i * in_a as i128 - na;
        for j in 0..lb {
            if !s.contains(lo_a + i as i64 + lo_b + j as i64) {
                continue;
            }
            let in_b = b.mask().contains(j);
            let wb = lb_i * in_b as i128 - nb;
            plain += 1;
            with_fb += wb;
            with_fa += wa;
            with_both += wa * wb;
            incidences += (in_a && in_b) as u64;
        }
    }
    let r = |num: i128, den: i128| ExactRational::new(BigInt::from(num), BigInt::from(den));
    let ll = la_i * lb_i;
    Ok(CountingTerms {
        incidences,
        main: r(na * nb * plain, ll),
        e1: r(na * with_fb, ll),
        e2: r(nb * with_fa, ll),
        e3: r(with_both, ll),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingCheck {
    /// The common length, taken as the shorter interval.
    pub l: usize,
    pub epsilon: f64,
    pub length_ok: bool,
    pub sizes_ok: bool,
    /// Verdict at `eps^7`, computed when the other preconditions hold.
    pub regularity: Option<RegularityVerdict>,
    pub vacuous: bool,
    pub sumset_size: usize,
    /// `(2 - 8 eps) L`.
    pub bound: f64,
    pub holds: Option<bool>,
}

/// Checks `|A + A'| >= (2 - 8 eps) L` when `L > 16 / eps`, both sets have at
/// least `eps L` elements and the pair is certified `eps^7`-regular.
pub fn counting_lemma_check(a: &GSet, b: &GSet, eps: f64) -> Result<CountingCheck> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("epsilon {eps} outside (0, 1)")));
    }
    let (_, la) = interval(a)?;
    let (_, lb) = interval(b)?;
    let l = la.min(lb);
    let lf = l as f64;
    let length_ok = lf > 16.0 / eps;
    let sizes_ok = a.len() as f64 >= eps * lf && b.len() as f64 >= eps * lf;
    let regularity = if length_ok && sizes_ok {
        Some(regular_pair_test(a, b, eps.powi(7))?)
    } else {
        None
    };
    let vacuous = !regularity.as_ref().is_some_and(|v| v.is_regular());
    let sumset_size = if a.is_empty() || b.is_empty() {
        0
    } else {
        add_masks(a.mask(), b.mask()).count()
    };
    let bound = (2.0 - 8.0 * eps) * lf;
    Ok(CountingCheck {
        l,
        epsilon: eps,
        length_ok,
        sizes_ok,
        regularity,
        vacuous,
        sumset_size,
        bound,
        holds: (!vacuous).then_some(sumset_size as f64 >= bound),
    })
}

impl CountingTerms {
    pub fn error_sum(&self) -> ExactRational {
        &self.e1 + &self.e2 + &self.e3
    }

    pub fn is_disjoint_case(&self) -> bool {
        self.incidences == 0 && (&self.main + self.error_sum()).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_half_subset, SeededSource};

    fn brute_incidences(a: &GSet, b: &GSet, s: &GSet) -> u64 {
        let mut n = 0;
        for x in a.values() {
            for y in b.values() {
                n += s.contains(x + y) as u64;
            }
        }
        n
    }

    #[test]
    fn identity_on_random_instances() {
        for (seed, l) in [(1u64, 32i64), (2, 64), (3, 40)] {
            let src = SeededSource::new(seed, 0);
            let mut rng = src.rng();
            let a = random_half_subset(Ambient::interval(0, l - 1).unwrap(), &mut rng);
            let b = random_half_subset(Ambient::interval(l, 2 * l + 2).unwrap(), &mut rng);
            let s = random_half_subset(Ambient::interval(l, 3 * l).unwrap(), &mut rng);
            let t = counting_terms(&a, &b, &s).unwrap();
            assert!(t.identity_holds());
            assert_eq!(t.incidences, brute_incidences(&a, &b, &s));
        }
    }

    #[test]
    fn disjoint_target_and_full_sets() {
        let a = GSet::interval(0, 9, [0, 2, 4, 6, 8]).unwrap();
        let b = GSet::interval(0, 9, [0, 2, 4]).unwrap();
        let odd = GSet::interval(0, 18, (1..18).step_by(2)).unwrap();
        let t = counting_terms(&a, &b, &odd).unwrap();
        assert_eq!(t.incidences, 0);
        assert_eq!(t.main, -t.error_sum());
        assert!(t.is_disjoint_case());

        let i = GSet::full(Ambient::interval(0, 9).unwrap());
        let j = GSet::full(Ambient::interval(20, 29).unwrap());
        let s = GSet::interval(20, 38, [20, 25, 31, 38]).unwrap();
        let t = counting_terms(&i, &j, &s).unwrap();
        assert!(t.e1.is_zero() && t.e2.is_zero() && t.e3.is_zero());
        assert_eq!(t.main, ExactRational::from_integer(t.incidences.into()));
    }

    #[test]
    fn lemma_check_on_full_pair() {
        let i = GSet::full(Ambient::interval(0, 255).unwrap());
        let j = GSet::full(Ambient::interval(256, 511).unwrap());
        let c = counting_lemma_check(&i, &j, 0.25).unwrap();
        assert!(!c.vacuous);
        assert_eq!(c.sumset_size, 511);
        assert_eq!(c.holds, Some(true));

        let small = GSet::interval(0, 255, 0..10).unwrap();
        let c = counting_lemma_check(&small, &j, 0.25).unwrap();
        assert!(c.vacuous && !c.sizes_ok && c.holds.is_none());
    }
}
