use std::collections::BTreeMap;

use addcomb::cayley::{build_cayley, clique_number};
use addcomb::dissociation::{is_dissociated, max_dissociated_subset};
use addcomb::enumerate::{count_small_sumset, CountQuery};
use addcomb::freiman::{affine_stabilizer, freiman_dimension};
use addcomb::missing::missing_count;
use addcomb::regularity::counting_terms;
use addcomb::rng::{random_half_subset, sample_indices};
use addcomb::structure::{cluster_decompose, SimpleGraph};
use addcomb::sumset::{rep_histogram, sumset, sumset_of};
use addcomb::{Ambient, GSet, SeededSource};
use proptest::prelude::*;

fn naive_sums(a: &[i64], restricted: bool, modulus: Option<i64>) -> Vec<i64> {
    let mut out = Vec::new();
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in a.iter().enumerate() {
            if restricted && i == j {
                continue;
            }
            let s = modulus.map_or(x + y, |n| (x + y).rem_euclid(n));
            out.push(s);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn breakdown_matches_naive(n in 1usize..12, k in 1usize..5, cyclic in any::<bool>(), restricted in any::<bool>()) {
        prop_assume!(k <= n);
        let amb = if cyclic { Ambient::cyclic(n as u64).unwrap() } else { Ambient::interval(1, n as i64).unwrap() };
        let modulus = cyclic.then_some(n as i64);
        let mut want: BTreeMap<usize, u64> = BTreeMap::new();
        for s in subsets(n, k) {
            let vals: Vec<i64> = s.iter().map(|&i| amb.value_at(i)).collect();
            *want.entry(naive_sums(&vals, restricted, modulus).len()).or_default() += 1;
        }
        let got = count_small_sumset(&CountQuery::new(amb, k, None, restricted)).unwrap();
        prop_assert_eq!(got.per_m_breakdown, want);
    }

    #[test]
    fn sumset_matches_naive(vals in proptest::collection::vec(0i64..40, 0..12), cyclic in any::<bool>(), restricted in any::<bool>()) {
        let (amb, modulus) = if cyclic { (Ambient::cyclic(37).unwrap(), Some(37)) } else { (Ambient::interval(0, 40).unwrap(), None) };
        let a = GSet::from_values(amb, vals.iter().map(|v| modulus.map_or(*v, |n| v % n))).unwrap();
        let got = sumset(&a, restricted).to_vec();
        prop_assert_eq!(got, naive_sums(&a.to_vec(), restricted, modulus));
    }

    #[test]
    fn sumset_of_commutes(x in proptest::collection::vec(0i64..31, 1..10), y in proptest::collection::vec(0i64..31, 1..10)) {
        let amb = Ambient::cyclic(31).unwrap();
        let a = GSet::from_values(amb, x).unwrap();
        let b = GSet::from_values(amb, y).unwrap();
        prop_assert_eq!(sumset_of(&a, &b).unwrap(), sumset_of(&b, &a).unwrap());
    }

    #[test]
    fn representation_counts_match_naive(vals in proptest::collection::vec(0i64..23, 0..15)) {
        let s = GSet::cyclic(23, vals).unwrap();
        let h = rep_histogram(&s).unwrap();
        let xs = s.to_vec();
        for t in 0..=23u64 {
            let n_t = (0..23i64)
                .filter(|z| {
                    let reps = xs.iter().filter(|&&x| s.contains((z - x).rem_euclid(23))).count();
                    reps as u64 >= t
                })
                .count() as u64;
            prop_assert_eq!(h.n(t), n_t);
        }
    }

    #[test]
    fn freiman_dimension_is_affine_invariant(seed in 0u64..1000, lambda in 1i64..13, mu in 0i64..13) {
        let amb = Ambient::cyclic(13).unwrap();
        let idx = sample_indices(&mut SeededSource::new(seed, 0).rng(), 13, 5);
        let a = GSet::from_values(amb, idx.iter().map(|&i| i as i64)).unwrap();
        let b = a.affine_image(lambda, mu).unwrap();
        prop_assert_eq!(freiman_dimension(&a).unwrap().r, freiman_dimension(&b).unwrap().r);
    }

    #[test]
    fn counting_identity(seed in 0u64..10_000, len in 8i64..80) {
        let mut rng = SeededSource::new(seed, 1).rng();
        let ia = Ambient::interval(0, len - 1).unwrap();
        let ib = Ambient::interval(len, 2 * len - 1).unwrap();
        let a = random_half_subset(ia, &mut rng);
        let b = random_half_subset(ib, &mut rng);
        let s = random_half_subset(Ambient::interval(len, 3 * len - 2).unwrap(), &mut rng);
        let t = counting_terms(&a, &b, &s).unwrap();
        prop_assert!(t.identity_holds());
        let brute = a.values().map(|x| b.values().filter(|y| s.contains(x + y)).count() as u64).sum::<u64>();
        prop_assert_eq!(t.incidences, brute);
    }

    #[test]
    fn greedy_dissociated_is_maximal(seed in 0u64..1000, m in 1u64..4) {
        let amb = Ambient::cyclic(29).unwrap();
        let idx = sample_indices(&mut SeededSource::new(seed, 2).rng(), 29, 7);
        let a = GSet::from_values(amb, idx.iter().map(|&i| i as i64)).unwrap();
        let x = max_dissociated_subset(&a, m).unwrap();
        prop_assert!(is_dissociated(&x.to_vec(), m, amb).unwrap().is_yes());
        for v in a.values().filter(|v| !x.contains(*v)) {
            let mut ext = x.to_vec();
            ext.push(v);
            prop_assert!(!is_dissociated(&ext, m, amb).unwrap().is_yes());
        }
    }

    #[test]
    fn cluster_properties(seed in 0u64..10_000, n in 2usize..120, dense in any::<bool>(), di in 0usize..3) {
        let mut rng = SeededSource::new(seed, 3).rng();
        let g = SimpleGraph::gnp(n, if dense { 0.2 } else { 0.05 }, &mut rng);
        let a = random_half_subset(Ambient::cyclic(n as u64).unwrap(), &mut rng);
        let d = [8.0, 16.0, 32.0][di];
        let p = cluster_decompose(&g, a.mask(), d).unwrap();
        prop_assert!(p.leftover.len() as f64 <= 32.0 * (a.len() as f64 / d).powi(2));
        prop_assert!(p.block_diameters.iter().all(|&x| x as f64 <= d));
    }

    #[test]
    fn cliques_have_restricted_sums_in_generator(seed in 0u64..1000) {
        let amb = Ambient::cyclic(23).unwrap();
        let a = random_half_subset(amb, &mut SeededSource::new(seed, 4).rng());
        let w = clique_number(&build_cayley(&a).unwrap().graph).unwrap();
        let c = GSet::from_values(amb, w.witness.iter().map(|&v| v as i64)).unwrap();
        prop_assert!(sumset(&c, true).is_subset(&a));
    }

    #[test]
    fn missing_count_matches_definition(vals in proptest::collection::vec(1i64..=30, 0..20)) {
        let x = GSet::interval(1, 30, vals).unwrap();
        let xs = x.to_vec();
        let naive = (1..=30).filter(|t| !xs.iter().any(|a| x.contains(t - a))).count();
        prop_assert_eq!(missing_count(&x).unwrap(), naive);
    }
}

#[test]
fn stabilizer_sizes_divide_group_order() {
    for n in [7u64, 11, 13] {
        let amb = Ambient::cyclic(n).unwrap();
        for seed in 0..20 {
            let a = random_half_subset(amb, &mut SeededSource::new(seed, 5).rng());
            let st = affine_stabilizer(&a).unwrap();
            assert!(st.contains(&(1, 0)));
            assert_eq!((n * (n - 1)) % st.len() as u64, 0);
        }
    }
}
