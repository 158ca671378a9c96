use std::io;

use serde::Serialize;

use addcomb::arith::{parse_rational, rational_to_f64, floor_rat, ExactRational};
use addcomb::bitset::BitSet;
use addcomb::cayley::{clique_experiment, expected_clique_count};
use addcomb::dissociation::{dissociation_experiment, is_dissociated, max_dissociated_subset};
use addcomb::enumerate::{count_small_sumset_with_ceiling, list_small_sumset, small_doubling_bound, CountQuery};
use addcomb::freiman::{
    affine_stabilizer, count_freiman_homs, dilates_into_short_interval, freiman_dimension, freiman_lemma_holds,
};
use addcomb::missing::{compare_with_exact, exact_histogram, missing_distribution, sample_histogram, truncation_check};
use addcomb::regularity::decompose::Outcome;
use addcomb::regularity::{
    counting_lemma_check, counting_terms, dirichlet_approx, dirichlet_scan, regular_pair_test, regularity_decompose,
    DecomposeOptions, Phase,
};
use addcomb::rng::{below, random_half_subset, random_subset, unit_f64};
use addcomb::structure::{cluster_decompose, degree_ball, grid_expansion, isoperimetry_check, SimpleGraph};
use addcomb::sumset::{pollard_averaged_holds, pollard_report, pollard_violations, rep_histogram, sumset_size};
use addcomb::{Ambient, Error, GSet, SeededSource};

use crate::args::*;
use crate::output::Sink;

/// Why a run did not succeed; each maps to one exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Budget(String),
    Internal(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Budget(_) => 3,
            Failure::Internal(_) => 2,
            Failure::Io(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Budget(m) | Failure::Internal(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Budget { .. } | Error::Scale { .. } => Failure::Budget(msg),
            Error::Internal(_) => Failure::Internal(msg),
            Error::Domain(_) | Error::Range(_) | Error::Contract(_) => Failure::Usage(msg),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

pub type RunResult = std::result::Result<(), Failure>;

/// State shared by one subcommand run.
pub struct Ctx {
    pub sink: Sink,
    pub seed: Option<u64>,
    /// Checked properties that did not hold.
    pub failed: Vec<String>,
}

impl Ctx {
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failed.push(what());
        }
    }
}

fn rational(s: &str, flag: &str) -> std::result::Result<ExactRational, Failure> {
    parse_rational(s).map_err(|e| Failure::Usage(format!("--{flag}: {e}")))
}

fn ambient_for(kind: AmbientKind, n: Option<u64>, set: &[i64]) -> std::result::Result<Ambient, Failure> {
    Ok(match (kind, n) {
        (AmbientKind::Cyclic, Some(n)) => Ambient::cyclic(n)?,
        (AmbientKind::Cyclic, None) => return Err(Failure::Usage("--ambient cyclic needs --N".into())),
        (AmbientKind::Int, Some(n)) => Ambient::interval(1, n as i64)?,
        (AmbientKind::Int, None) => {
            let (lo, hi) = set
                .iter()
                .fold((i64::MAX, i64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            if lo > hi {
                return Err(Failure::Usage("an empty --set needs --N".into()));
            }
            Ambient::interval(lo, hi)?
        }
    })
}

fn f(x: f64) -> String {
    format!("{x}")
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or(String::new(), T::to_string)
}

#[derive(Serialize)]
struct CountRecord<'a> {
    query: &'a CountQuery,
    #[serde(flatten)]
    result: &'a addcomb::enumerate::CountResult,
}

#[derive(Serialize)]
struct SetRecord {
    members: Vec<i64>,
    sumset_size: usize,
}

pub fn count(ctx: &mut Ctx, a: &CountArgs) -> RunResult {
    let amb = match a.ambient {
        AmbientKind::Int => Ambient::interval(1, a.n as i64)?,
        AmbientKind::Cyclic => Ambient::cyclic(a.n)?,
    };
    let q = CountQuery::new(amb, a.k, a.m, a.restricted);
    let r = count_small_sumset_with_ceiling(&q, a.ceiling)?;
    ctx.sink.record("count", "count_result", &CountRecord { query: &q, result: &r })?;
    let rows: Vec<Vec<String>> = r
        .per_m_breakdown
        .iter()
        .map(|(m, c)| vec![m.to_string(), c.to_string()])
        .collect();
    ctx.sink.table("count_breakdown", &["m", "count"], &rows)?;
    if let Some(cap) = a.list {
        let listing = list_small_sumset(&q, cap)?;
        for s in &listing.sets {
            let rec = SetRecord {
                members: s.to_vec(),
                sumset_size: sumset_size(s, a.restricted),
            };
            ctx.sink.record("count", "set", &rec)?;
        }
    }
    if let Some(k) = &a.bound_k {
        let big_k = rational(k, "bound-k")?;
        let delta = rational(&a.bound_delta, "bound-delta")?;
        let b = small_doubling_bound(a.n, a.k as u64, &big_k, &delta)?;
        ctx.sink.record("count", "bound", &b)?;
    }
    println!("{}", r.exact_count);
    Ok(())
}

#[derive(Serialize)]
struct PollardSet {
    q: u64,
    members: Vec<i64>,
    violations: Vec<u64>,
}

#[derive(Serialize)]
struct PollardSummary {
    q: u64,
    mode: &'static str,
    sets: u64,
    pairs: u64,
    violations: u64,
}

pub fn pollard(ctx: &mut Ctx, a: &PollardArgs) -> RunResult {
    let amb = Ambient::cyclic(a.q)?;
    let mut summaries = Vec::new();
    if let Some(set) = &a.set {
        let s = GSet::from_values(amb, set.iter().map(|v| v.rem_euclid(a.q as i64)))?;
        let violations = pollard_violations(&s)?;
        summaries.push(PollardSummary {
            q: a.q,
            mode: "set",
            sets: 1,
            pairs: a.q,
            violations: violations.len() as u64,
        });
        ctx.sink.record("pollard", "set", &PollardSet { q: a.q, members: s.to_vec(), violations })?;
        if let Some(beta) = &a.beta {
            let report = pollard_report(&s, &rational(beta, "beta")?)?;
            ctx.sink.record("pollard", "report", &report)?;
        }
    }
    if a.exhaustive {
        if a.q > 24 {
            return Err(Failure::Budget(format!("2^{} subsets exceed the 2^24 cap", a.q)));
        }
        let mut violations = 0;
        for bits in 0u64..1 << a.q {
            let s = GSet::from_mask(amb, BitSet::from_indices(a.q as usize, (0..a.q as usize).filter(|i| bits >> i & 1 == 1)))?;
            violations += pollard_violations(&s)?.len() as u64;
        }
        summaries.push(PollardSummary {
            q: a.q,
            mode: "exhaustive",
            sets: 1 << a.q,
            pairs: (1u64 << a.q) * a.q,
            violations,
        });
    }
    if a.samples > 0 {
        let mut violations = 0;
        for i in 0..a.samples {
            let mut rng = SeededSource::new(a.seed, i).rng();
            let s = random_half_subset(amb, &mut rng);
            let t = 1 + below(&mut rng, a.q);
            let h = rep_histogram(&s)?;
            violations += !pollard_averaged_holds(&h, s.len(), t) as u64;
        }
        summaries.push(PollardSummary {
            q: a.q,
            mode: "random",
            sets: a.samples,
            pairs: a.samples,
            violations,
        });
    }
    let mut rows = Vec::new();
    for s in &summaries {
        ctx.sink.record("pollard", "summary", s)?;
        rows.push(vec![s.q.to_string(), s.mode.into(), s.sets.to_string(), s.pairs.to_string(), s.violations.to_string()]);
        println!("q={} mode={} sets={} violations={}", s.q, s.mode, s.sets, s.violations);
        ctx.check(s.violations == 0, || format!("Pollard inequality failed {} times ({})", s.violations, s.mode));
    }
    ctx.sink.table("pollard", &["q", "mode", "sets", "pairs", "violations"], &rows)?;
    Ok(())
}

#[derive(Serialize)]
struct FreimanRecord {
    ambient: Ambient,
    members: Vec<i64>,
    r: usize,
    sumset_size: usize,
    lemma_rhs: i64,
    lemma_holds: bool,
}

/// Affine maps `x -> lambda x + mu` fixing the set, as `(lambda, mu)`.
#[derive(Serialize)]
struct StabilizerRecord {
    maps: Vec<(u64, u64)>,
}

#[derive(Serialize)]
struct DilateRecord {
    len: u64,
    lambdas: Vec<u64>,
    found: usize,
    /// `found * |A| / N`.
    ratio: f64,
}

pub fn freiman(ctx: &mut Ctx, a: &FreimanArgs) -> RunResult {
    let amb = ambient_for(a.ambient, a.n, &a.set)?;
    let set = GSet::from_values(amb, a.set.iter().copied())?;
    let r = freiman_dimension(&set)?.r;
    let s = sumset_size(&set, false);
    let k = set.len();
    let holds = freiman_lemma_holds(s, k, r);
    ctx.sink.record(
        "freiman",
        "dimension",
        &FreimanRecord {
            ambient: amb,
            members: set.to_vec(),
            r,
            sumset_size: s,
            lemma_rhs: (r as i64 + 1) * k as i64 - (r as i64 + 1) * r as i64 / 2,
            lemma_holds: holds,
        },
    )?;
    println!("r={r} |A+A|={s} lemma_holds={holds}");
    ctx.check(holds, || format!("Freiman's lemma fails: |A+A| = {s}, r = {r}"));
    if let Some(n) = a.homs {
        let h = count_freiman_homs(&set, n)?;
        println!("homs={} bound={}", h.count, h.bound);
        ctx.sink.record("freiman", "homomorphisms", &h)?;
    }
    if a.stabilizer {
        let st = affine_stabilizer(&set)?;
        println!("stabilizer={}", st.len());
        ctx.sink.record("freiman", "stabilizer", &StabilizerRecord { maps: st })?;
    }
    if let Some(len) = a.dilate_len {
        let lambdas = dilates_into_short_interval(&set, len)?;
        let n = amb.size() as f64;
        let rec = DilateRecord {
            len,
            found: lambdas.len(),
            ratio: lambdas.len() as f64 * k as f64 / n,
            lambdas,
        };
        println!("dilates={}", rec.found);
        ctx.sink.record("freiman", "dilates", &rec)?;
    }
    Ok(())
}

pub fn regularity(ctx: &mut Ctx, c: &RegularityCommand) -> RunResult {
    match c {
        RegularityCommand::Decompose(a) => decompose(ctx, a),
        RegularityCommand::Pair(a) => pair(ctx, a),
        RegularityCommand::Counting(a) => counting(ctx, a),
        RegularityCommand::Dirichlet(a) => dirichlet(ctx, a),
    }
}

#[derive(Serialize)]
struct Sampled<'a, T: Serialize> {
    sample: u64,
    #[serde(flatten)]
    data: &'a T,
}

fn decompose(ctx: &mut Ctx, a: &DecomposeArgs) -> RunResult {
    let amb = Ambient::cyclic(a.p)?;
    let opts = DecomposeOptions {
        q_min_override: a.q_min,
        l_floor: a.l_floor,
        max_steps: a.max_steps,
    };
    let mut rows = Vec::new();
    for i in 0..a.samples {
        let set = random_half_subset(amb, &mut SeededSource::new(a.seed, i).rng());
        let d = regularity_decompose(&set, a.eps, &opts)?;
        ctx.sink.record("regularity", "decomposition", &Sampled { sample: i, data: &d })?;
        let conclusion = d.conclusion.as_ref().map(|c| c.holds);
        rows.push(vec![
            i.to_string(),
            serde_json::to_value(d.outcome)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
            d.steps.len().to_string(),
            d.q.to_string(),
            d.lambda.to_string(),
            d.energy_monotone.to_string(),
            opt(&conclusion),
        ]);
        println!("sample={i} outcome={:?} steps={} q={}", d.outcome, d.steps.len(), d.q);
        ctx.check(d.energy_monotone, || format!("sample {i}: energy trace decreased beyond tolerance"));
        if d.outcome == Outcome::Success {
            ctx.check(conclusion == Some(true), || format!("sample {i}: pair conclusion failed"));
        }
    }
    ctx.sink.table(
        "decompose",
        &["sample", "outcome", "steps", "q", "lambda", "energy_monotone", "conclusion_holds"],
        &rows,
    )?;
    Ok(())
}

fn interval_pair(l: i64, density: f64, seed: u64, i: u64) -> std::result::Result<(GSet, GSet), Failure> {
    if l < 1 {
        return Err(Failure::Usage("--L must be positive".into()));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(Failure::Usage("--density must lie in [0, 1]".into()));
    }
    let mut rng = SeededSource::new(seed, i).rng();
    let a = random_subset(Ambient::interval(0, l - 1)?, density, &mut rng);
    let b = random_subset(Ambient::interval(l, 2 * l - 1)?, density, &mut rng);
    Ok((a, b))
}

fn pair(ctx: &mut Ctx, a: &PairArgs) -> RunResult {
    let mut rows = Vec::new();
    for i in 0..a.samples {
        let (x, y) = interval_pair(a.l, a.density, a.seed, i)?;
        let v = regular_pair_test(&x, &y, a.eps)?;
        ctx.sink.record("regularity", "pair", &Sampled { sample: i, data: &v })?;
        let status = match v.verdict {
            addcomb::regularity::Verdict::Regular => "regular",
            addcomb::regularity::Verdict::Irregular { .. } => "irregular",
            addcomb::regularity::Verdict::Undecided { .. } => "undecided",
        };
        rows.push(vec![i.to_string(), x.len().to_string(), y.len().to_string(), status.into()]);
        println!("sample={i} {status}");
    }
    ctx.sink.table("pair", &["sample", "size_a", "size_b", "status"], &rows)?;
    Ok(())
}

#[derive(Serialize)]
struct CountingRecord<'a> {
    terms: &'a addcomb::regularity::CountingTerms,
    identity_holds: bool,
    check: &'a addcomb::regularity::CountingCheck,
}

fn counting(ctx: &mut Ctx, a: &CountingArgs) -> RunResult {
    let mut rows = Vec::new();
    for i in 0..a.samples {
        let (x, y) = interval_pair(a.l, a.density, a.seed, i)?;
        let mut rng = SeededSource::new(a.seed, i).substream(1).rng();
        let s = random_half_subset(Ambient::interval(a.l, 3 * a.l - 2)?, &mut rng);
        let terms = counting_terms(&x, &y, &s)?;
        let identity = terms.identity_holds();
        let check = counting_lemma_check(&x, &y, a.eps)?;
        ctx.sink.record(
            "regularity",
            "counting",
            &Sampled {
                sample: i,
                data: &CountingRecord {
                    terms: &terms,
                    identity_holds: identity,
                    check: &check,
                },
            },
        )?;
        rows.push(vec![
            i.to_string(),
            terms.incidences.to_string(),
            terms.main.to_string(),
            terms.e1.to_string(),
            terms.e2.to_string(),
            terms.e3.to_string(),
            identity.to_string(),
            (!check.vacuous).to_string(),
            check.sumset_size.to_string(),
            f(check.bound),
            opt(&check.holds),
        ]);
        ctx.check(identity, || format!("sample {i}: counting identity failed"));
        ctx.check(check.holds != Some(false), || format!("sample {i}: sumset below (2 - 8 eps) L"));
    }
    let certified = rows.iter().filter(|r| r[7] == "true").count();
    println!("samples={} certified={certified}", a.samples);
    ctx.sink.table(
        "counting",
        &["sample", "incidences", "main", "e1", "e2", "e3", "identity", "certified", "sumset_size", "bound", "holds"],
        &rows,
    )?;
    Ok(())
}

#[derive(Serialize)]
struct DirichletRecord {
    theta: Phase,
    q_bound: u64,
    d_scan: u64,
    d_convergents: u64,
}

fn dirichlet(ctx: &mut Ctx, a: &DirichletArgs) -> RunResult {
    let theta = Phase::parse(&a.theta)?;
    let d_scan = dirichlet_scan(theta, a.q)?;
    let d_convergents = dirichlet_approx(theta, a.q)?;
    ctx.sink.record(
        "regularity",
        "dirichlet",
        &DirichletRecord {
            theta,
            q_bound: a.q,
            d_scan,
            d_convergents,
        },
    )?;
    println!("{d_convergents}");
    ctx.check(d_scan == d_convergents, || format!("scan {d_scan} and convergents {d_convergents} differ"));
    Ok(())
}

#[derive(Serialize)]
struct GreedyRecord {
    m: u64,
    subset: Vec<i64>,
}

pub fn dissociate(ctx: &mut Ctx, a: &DissociateArgs) -> RunResult {
    if a.experiment {
        let n = a.n.ok_or_else(|| Failure::Usage("--experiment needs --N".into()))?;
        let k = a.k.ok_or_else(|| Failure::Usage("--experiment needs --k".into()))?;
        let rows = dissociation_experiment(n, k, a.m, a.eps, a.samples, a.seed)?;
        let mut table = Vec::new();
        for r in &rows {
            ctx.sink.record("dissociate", "sample", r)?;
            table.push(vec![
                r.sample.to_string(),
                r.k.to_string(),
                r.sumset_size.to_string(),
                r.dense.to_string(),
                r.d.to_string(),
                f(r.ratio),
            ]);
        }
        let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        println!("samples={} max_ratio={max_ratio}", rows.len());
        ctx.sink.table("dissociate", &["sample", "k", "sumset_size", "dense", "d", "ratio"], &table)?;
        return Ok(());
    }
    let set = a
        .set
        .as_ref()
        .ok_or_else(|| Failure::Usage("give --set or --experiment".into()))?;
    let amb = ambient_for(a.ambient, a.n, set)?;
    let verdict = is_dissociated(set, a.m, amb)?;
    ctx.sink.record("dissociate", "verdict", &verdict)?;
    let g = GSet::from_values(amb, set.iter().copied())?;
    let x = max_dissociated_subset(&g, a.m)?;
    ctx.sink.record("dissociate", "greedy", &GreedyRecord { m: a.m, subset: x.to_vec() })?;
    println!("dissociated={} greedy={:?}", verdict.is_yes(), x.to_vec());
    Ok(())
}

#[derive(Serialize)]
struct ClusterRecord<'a> {
    sample: u64,
    n: usize,
    p: f64,
    #[serde(flatten)]
    partition: &'a addcomb::structure::ClusterPartition,
}

pub fn cluster(ctx: &mut Ctx, a: &ClusterArgs) -> RunResult {
    let mut rows = Vec::new();
    let samples = if a.path { 1 } else { a.samples };
    for i in 0..samples {
        let (g, set) = if a.path {
            (SimpleGraph::path(a.n), BitSet::full(a.n))
        } else {
            let mut rng = SeededSource::new(a.seed, i).rng();
            let g = SimpleGraph::gnp(a.n, a.p, &mut rng);
            let mut set = BitSet::new(a.n);
            for v in 0..a.n {
                if unit_f64(&mut rng) < a.density {
                    set.insert(v);
                }
            }
            (g, set)
        };
        for &d in &a.d {
            let part = cluster_decompose(&g, &set, d)?;
            ctx.sink.record(
                "cluster",
                "partition",
                &ClusterRecord {
                    sample: i,
                    n: a.n,
                    p: if a.path { 1.0 } else { a.p },
                    partition: &part,
                },
            )?;
            rows.push(vec![
                i.to_string(),
                f(d),
                part.set_size.to_string(),
                part.blocks.len().to_string(),
                part.leftover.len().to_string(),
                f(part.leftover_bound),
                part.max_block_diameter.to_string(),
            ]);
        }
    }
    println!("instances={}", rows.len());
    ctx.sink.table(
        "cluster",
        &["sample", "D", "set_size", "blocks", "leftover", "leftover_bound", "max_block_diameter"],
        &rows,
    )?;
    Ok(())
}

#[derive(Serialize)]
struct BallRecord {
    d: usize,
    radius: u32,
    size: usize,
    expansion: usize,
}

pub fn isoperimetry(ctx: &mut Ctx, a: &IsoArgs) -> RunResult {
    let c = rational(&a.c, "C")?;
    let eps = rational(&a.eps, "eps")?;
    let mut rows = Vec::new();
    for d in a.d_min..=a.d_max {
        let size = floor_rat(&(&c * ExactRational::from_integer(d.into())));
        let size = usize::try_from(size).map_err(|_| Failure::Usage("segment size out of range".into()))?;
        let rec = isoperimetry_check(d, size, &eps);
        ctx.sink.record("isoperimetry", "segment", &rec)?;
        rows.push(vec![d.to_string(), size.to_string(), rec.expansion.to_string(), rec.bound.to_string(), rec.holds.to_string()]);
        ctx.check(rec.holds, || format!("d = {d}: expansion {} below {}", rec.expansion, rec.bound));
    }
    let ball = degree_ball(a.ball_d, 2);
    let rec = BallRecord {
        d: a.ball_d,
        radius: 2,
        size: ball.len(),
        expansion: grid_expansion(&ball, a.ball_d),
    };
    println!("segments={} ball_expansion={}", rows.len(), rec.expansion);
    ctx.sink.record("isoperimetry", "ball", &rec)?;
    ctx.sink.table("isoperimetry", &["d", "size", "expansion", "bound", "holds"], &rows)?;
    Ok(())
}

pub fn cayley(ctx: &mut Ctx, a: &CayleyArgs) -> RunResult {
    let stats = clique_experiment(a.n, a.samples, a.eps, a.seed)?;
    ctx.sink.record("cayley", "summary", &stats)?;
    let rows: Vec<Vec<String>> = stats
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.seed.to_string(),
                r.stream.to_string(),
                r.size_a.to_string(),
                r.omega.to_string(),
                f(r.threshold),
                r.violated.to_string(),
            ]
        })
        .collect();
    ctx.sink.table("cayley", &["N", "seed", "stream", "A_size", "omega", "threshold", "violated"], &rows)?;
    println!(
        "N={} samples={} mean_omega={} max_omega={} violations={}",
        stats.n, stats.samples, stats.mean_omega, stats.max_omega, stats.violations
    );
    if let Some(k) = a.expected_k {
        let e = expected_clique_count(a.n, k)?;
        println!("expected_{k}_cliques={} ({})", e.direct, rational_to_f64(&e.direct));
        ctx.check(e.equal, || format!("expected {k}-clique forms differ"));
        ctx.sink.record("cayley", "expected_cliques", &e)?;
    }
    Ok(())
}

pub fn missing(ctx: &mut Ctx, a: &MissingArgs) -> RunResult {
    let d = missing_distribution(a.s_max, a.samples, a.seed)?;
    let rows: Vec<Vec<String>> = d
        .rows
        .iter()
        .map(|r| {
            vec![
                r.s.to_string(),
                r.count.to_string(),
                f(r.a_hat),
                f(r.ci_lo),
                f(r.ci_hi),
                r.exponent_fit.map(f).unwrap_or_default(),
            ]
        })
        .collect();
    ctx.sink.table("missing", &["s", "count", "a_hat", "ci_lo", "ci_hi", "exponent_fit"], &rows)?;
    ctx.sink.record("missing", "distribution", &d)?;
    for c in &d.recursion {
        ctx.check(c.holds, || format!("a({}) below a({})/2 - 3 sigma", c.s, c.s - 2));
    }
    if let Some(h) = a.exact_horizon {
        let exact = exact_histogram(h)?;
        let sampled = sample_histogram(h, a.samples, a.seed)?;
        for b in compare_with_exact(&sampled, &exact, 3.0)? {
            ctx.check(b.within, || format!("horizon {h}, s = {}: sampled {} vs exact {}", b.s, b.sampled, b.exact));
            ctx.sink.record("missing", "exact_comparison", &b)?;
        }
    }
    if a.truncation_samples > 0 {
        let t = truncation_check(a.s_max, a.truncation_samples, a.seed)?;
        ctx.check(t.offending == 0, || format!("{} samples miss sums past the horizon", t.offending));
        ctx.sink.record("missing", "truncation", &t)?;
    }
    let fits: Vec<String> = d
        .rows
        .iter()
        .filter(|r| r.s >= 1)
        .filter_map(|r| r.exponent_fit.map(|e| format!("{}:{e:.3}", r.s)))
        .collect();
    println!("horizon={} samples={} exponent_fit {}", d.horizon, d.samples, fits.join(" "));
    Ok(())
}
