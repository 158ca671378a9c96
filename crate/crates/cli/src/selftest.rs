use serde::Serialize;

use addcomb::arith::rat;
use addcomb::bitset::BitSet;
use addcomb::cayley::{build_cayley, clique_number, expected_clique_count};
use addcomb::dissociation::max_dissociated_subset;
use addcomb::enumerate::{count_small_sumset, CountQuery};
use addcomb::freiman::{freiman_dimension, freiman_lemma_holds};
use addcomb::missing::{exact_histogram, missing_count};
use addcomb::regularity::{counting_terms, dirichlet_approx, dirichlet_scan, regular_pair_test, Phase};
use addcomb::rng::{random_half_subset, sample_indices};
use addcomb::structure::{cluster_decompose, isoperimetry_check, SimpleGraph};
use addcomb::sumset::{pollard_violations, sumset};
use addcomb::{Ambient, GSet, Result, SeededSource};

use crate::run::{Ctx, RunResult};

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn naive_sumset_len(a: &[i64], modulus: Option<i64>) -> usize {
    let mut s: Vec<i64> = a
        .iter()
        .flat_map(|x| a.iter().map(move |y| modulus.map_or(x + y, |n| (x + y).rem_euclid(n))))
        .collect();
    s.sort_unstable();
    s.dedup();
    s.len()
}

fn count_example() -> Result<(bool, String)> {
    let q = CountQuery::new(Ambient::interval(1, 10)?, 3, Some(5), false);
    let c = count_small_sumset(&q)?.exact_count;
    Ok((c == 20u32.into(), format!("3-subsets of [1,10] with |A+A| <= 5: {c}")))
}

fn sumset_random() -> Result<(bool, String)> {
    let mut bad = 0;
    for i in 0..200 {
        let cyclic = i % 2 == 0;
        let amb = if cyclic { Ambient::cyclic(53)? } else { Ambient::interval(-20, 40)? };
        let a = random_half_subset(amb, &mut SeededSource::new(7, i).rng());
        let want = naive_sumset_len(&a.to_vec(), cyclic.then_some(53));
        bad += (sumset(&a, false).len() != want) as u32;
    }
    Ok((bad == 0, format!("{bad} of 200 sumsets differ from the naive sums")))
}

fn pollard_exhaustive() -> Result<(bool, String)> {
    let amb = Ambient::cyclic(7)?;
    let mut bad = 0;
    for bits in 0u32..128 {
        let s = GSet::from_mask(amb, BitSet::from_indices(7, (0..7).filter(|i| bits >> i & 1 == 1)))?;
        bad += pollard_violations(&s)?.len();
    }
    Ok((bad == 0, format!("{bad} violations over all subsets of Z/7Z")))
}

fn freiman_sampled() -> Result<(bool, String)> {
    let mut bad = 0;
    let mut total = 0;
    for (amb, modulus) in [(Ambient::interval(1, 24)?, None), (Ambient::cyclic(13)?, Some(13))] {
        for i in 0..60 {
            let k = 2 + (i as usize % 6);
            let idx = sample_indices(&mut SeededSource::new(11, i).rng(), amb.size(), k);
            let a = GSet::from_values(amb, idx.iter().map(|&j| amb.value_at(j)))?;
            let r = freiman_dimension(&a)?.r;
            bad += !freiman_lemma_holds(naive_sumset_len(&a.to_vec(), modulus), k, r) as u32;
            total += 1;
        }
    }
    Ok((bad == 0, format!("lemma fails on {bad} of {total} sets")))
}

fn dirichlet_agree() -> Result<(bool, String)> {
    let mut bad = 0;
    for (num, den) in [(1u64, 7u64), (618, 1000), (355, 1130), (1, 2), (0, 1), (999_983, 1_000_003)] {
        let th = Phase::new(num, den)?;
        for q in [1u64, 5, 17, 100] {
            bad += (dirichlet_scan(th, q)? != dirichlet_approx(th, q)?) as u32;
        }
    }
    Ok((bad == 0, format!("{bad} disagreements between scan and convergents")))
}

fn dissociation_greedy() -> Result<(bool, String)> {
    let a = GSet::interval(1, 4, [1, 2, 3, 4])?;
    let m2 = max_dissociated_subset(&a, 2)?.to_vec();
    let m3 = max_dissociated_subset(&a, 3)?.to_vec();
    Ok((m2 == [1, 2, 3, 4] && m3 == [1, 3], format!("M=2 {m2:?}, M=3 {m3:?}")))
}

fn cluster_path() -> Result<(bool, String)> {
    let p = cluster_decompose(&SimpleGraph::path(64), &BitSet::full(64), 16.0)?;
    Ok((
        p.max_block_diameter <= 16,
        format!("{} blocks, leftover {}, max diameter {}", p.blocks.len(), p.leftover.len(), p.max_block_diameter),
    ))
}

fn isoperimetry_segments() -> Result<(bool, String)> {
    let eps = rat(3, 20);
    let fails: Vec<usize> = (10..=14)
        .filter(|&d| !isoperimetry_check(d, 5 * d / 2, &eps).holds)
        .collect();
    Ok((fails.is_empty(), format!("failing dimensions {fails:?}")))
}

fn cayley_small() -> Result<(bool, String)> {
    let full = GSet::full(Ambient::cyclic(11)?);
    let omega = clique_number(&build_cayley(&full)?.graph)?.omega;
    let e = expected_clique_count(7, 2)?;
    Ok((
        omega == 11 && e.equal && e.direct == rat(21, 2),
        format!("omega(Z/11) = {omega}, E[#2-cliques in Z/7] = {}", e.direct),
    ))
}

fn missing_exact() -> Result<(bool, String)> {
    let h = 10;
    let hist = exact_histogram(h)?;
    let amb = Ambient::interval(1, h as i64)?;
    let mut brute = vec![0u64; hist.len()];
    for bits in 0u32..1 << h {
        let x = GSet::from_mask(amb, BitSet::from_indices(h, (0..h).filter(|i| bits >> i & 1 == 1)))?;
        brute[missing_count(&x)?] += 1;
    }
    Ok((brute == hist, format!("exhaustive histogram at horizon {h}")))
}

fn counting_identity() -> Result<(bool, String)> {
    let mut bad = 0;
    for i in 0..20 {
        let mut rng = SeededSource::new(13, i).rng();
        let a = random_half_subset(Ambient::interval(0, 39)?, &mut rng);
        let b = random_half_subset(Ambient::interval(40, 79)?, &mut rng);
        let s = random_half_subset(Ambient::interval(40, 118)?, &mut rng);
        bad += !counting_terms(&a, &b, &s)?.identity_holds() as u32;
    }
    Ok((bad == 0, format!("{bad} of 20 decompositions miss the incidence count")))
}

fn full_intervals_regular() -> Result<(bool, String)> {
    let a = GSet::full(Ambient::interval(0, 127)?);
    let b = GSet::full(Ambient::interval(128, 255)?);
    let v = regular_pair_test(&a, &b, 0.25)?;
    Ok((v.is_regular(), "full intervals of length 128 at eps 1/4".into()))
}

type Probe = fn() -> Result<(bool, String)>;

const BATTERY: &[(&str, Probe)] = &[
    ("count_example", count_example),
    ("sumset_random", sumset_random),
    ("pollard_exhaustive_z7", pollard_exhaustive),
    ("freiman_lemma_sampled", freiman_sampled),
    ("dirichlet_agreement", dirichlet_agree),
    ("dissociation_greedy", dissociation_greedy),
    ("cluster_path", cluster_path),
    ("isoperimetry_segments", isoperimetry_segments),
    ("cayley_small", cayley_small),
    ("missing_exact", missing_exact),
    ("counting_identity", counting_identity),
    ("full_intervals_regular", full_intervals_regular),
];

pub fn run(ctx: &mut Ctx) -> RunResult {
    let mut rows = Vec::new();
    for &(name, probe) in BATTERY {
        let (passed, detail) = match probe() {
            Ok(r) => r,
            Err(e) => (false, e.to_string()),
        };
        println!("[{}] {name}: {detail}", if passed { "ok" } else { "FAIL" });
        ctx.check(passed, || format!("{name}: {detail}"));
        rows.push(vec![name.to_string(), passed.to_string()]);
        ctx.sink.record("selftest", "check", &Check { name, passed, detail })?;
    }
    ctx.sink.table("selftest", &["check", "passed"], &rows)?;
    Ok(())
}
