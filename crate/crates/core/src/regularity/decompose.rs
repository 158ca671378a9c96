//! Energy-increment decomposition of `A` in `Z/pZ` into interval cells.
//!
//! Cell `i` of level `q` is `I_i(q) = {x : floor(x q / p) = i}`, the
//! contiguous block `[ceil(i p / q), ceil((i + 1) p / q) - 1]`.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::dirichlet::{dirichlet_approx, Phase};
use super::fourier::{grid_size, pair_verdict, spectra, Grid, GridChoice, Verdict};
use crate::ambient::{Ambient, GSet};
use crate::arith::{is_prime, mod_inverse, prime_at_least, ExactRational};
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::sumset::add_masks;

pub fn cell_of(x: u64, p: u64, q: u64) -> u64 {
    (x as u128 * q as u128 / p as u128) as u64
}

/// Inclusive bounds of cell `i`.
pub fn cell_bounds(i: u64, p: u64, q: u64) -> (u64, u64) {
    let start = |i: u64| ((i as u128 * p as u128).div_ceil(q as u128)) as u64;
    (start(i), start(i + 1) - 1)
}

fn check_level(p: u64, q: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if q == 0 || q >= p {
        return Err(Error::Domain(format!("need 1 <= q < p, got q = {q}")));
    }
    Ok(())
}

fn require_prime_cyclic(a: &GSet) -> Result<u64> {
    let p = a
        .ambient()
        .modulus()
        .ok_or_else(|| Error::Domain("expected a subset of Z/pZ".into()))?;
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    Ok(p)
}

/// Members of `lambda A` in each cell.
fn cell_counts(a: &GSet, lambda: u64, q: u64) -> Vec<u64> {
    let p = a.ambient().size() as u64;
    let mut counts = vec![0u64; q as usize];
    for x in a.mask().iter() {
        let y = (x as u128 * lambda as u128 % p as u128) as u64;
        counts[cell_of(y, p, q) as usize] += 1;
    }
    counts
}

/// `(1/q) sum_i (|lambda A cap I_i(q)| / |I_i(q)|)^2`.
pub fn energy(a: &GSet, lambda: u64, q: u64) -> Result<ExactRational> {
    let p = require_prime_cyclic(a)?;
    check_level(p, q)?;
    Ok(energy_from_counts(&cell_counts(a, lambda, q), p))
}

fn energy_from_counts(counts: &[u64], p: u64) -> ExactRational {
    let q = counts.len() as u64;
    let mut e = ExactRational::from_integer(0.into());
    for (i, &c) in counts.iter().enumerate() {
        let (s, t) = cell_bounds(i as u64, p, q);
        e += ExactRational::new(BigInt::from(c * c), BigInt::from((t - s + 1) * (t - s + 1)));
    }
    e / ExactRational::from_integer(q.into())
}

/// Slack for comparing energies at levels `q | q2`: unequal cell sizes
/// perturb each level by at most `q / p`.
pub fn refinement_tolerance(p: u64, q: u64, q2: u64) -> f64 {
    (q + q2) as f64 / p as f64
}

/// The cells of `lambda A` at level `q`, each in its own interval ambient.
pub fn cells(a: &GSet, lambda: u64, q: u64) -> Result<Vec<GSet>> {
    let p = require_prime_cyclic(a)?;
    check_level(p, q)?;
    let mut masks: Vec<BitSet> = (0..q)
        .map(|i| {
            let (s, t) = cell_bounds(i, p, q);
            BitSet::new((t - s + 1) as usize)
        })
        .collect();
    for x in a.mask().iter() {
        let y = (x as u128 * lambda as u128 % p as u128) as u64;
        let i = cell_of(y, p, q);
        let (s, _) = cell_bounds(i, p, q);
        masks[i as usize].insert((y - s) as usize);
    }
    masks
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            let (s, t) = cell_bounds(i as u64, p, q);
            GSet::from_mask(Ambient::interval(s as i64, t as i64)?, m)
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DecomposeOptions {
    pub q_min_override: Option<u64>,
    pub l_floor: Option<u64>,
    pub max_steps: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QRegime {
    /// `q_1 >= ceil(eps^-10)`.
    Default,
    Override,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    /// Cells became shorter than the length floor.
    Saturated,
    MaxSteps,
    /// No grid frequency was large on any cell of an unregular pair.
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopularFrequency {
    pub r: u64,
    pub m: u64,
    pub theta: f64,
    /// Cells of unregular pairs whose large spectrum contains `r / m`.
    pub cells: usize,
}

/// Per-cell energy gain from splitting cells along progressions of
/// difference `d`, split by whether the cell shares the popular frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncrementReport {
    pub omega_size: usize,
    pub mean_increment_omega: Option<f64>,
    pub mean_increment_rest: Option<f64>,
    /// `(eps / 2)^2`.
    pub target: f64,
    /// Progressions not inside a single old cell, and the `d q_t` cap.
    pub bad_progressions: u64,
    pub bad_cap: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub t: u64,
    pub lambda: u64,
    pub q: u64,
    /// `p / q`.
    pub l: f64,
    #[serde(serialize_with = "crate::serde_rational")]
    pub energy: ExactRational,
    pub energy_f64: f64,
    pub saturated: bool,
    pub grid: Option<GridChoice>,
    pub regular_pairs: u64,
    pub irregular_pairs: u64,
    pub undecided_pairs: u64,
    pub regular_fraction: f64,
    pub witness: Option<PopularFrequency>,
    pub d: Option<u64>,
    /// Largest set of grid points where one cell's transform is at least
    /// `eps L / 2`, and the Parseval cap `4 M / (eps^2 L)` it must respect.
    pub sigma_max: Option<usize>,
    pub sigma_within_cap: Option<bool>,
    pub increment: Option<IncrementReport>,
    /// Allowed energy drop into the next step: `d q_t / q_(t+1) + L_t^(-1/12)`.
    pub edge_tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConclusionCheck {
    pub epsilon: f64,
    /// Pairs with `min(|A_i|, |A_j|) <= eps p / q` or
    /// `|A_i + A_j| >= (2 - eps) p / q`.
    pub good_pairs: u64,
    pub total_pairs: u64,
    pub required: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityDecomposition {
    pub p: u64,
    pub epsilon: f64,
    pub regime: QRegime,
    pub q_min: u64,
    pub l_floor: u64,
    pub max_steps: u64,
    pub outcome: Outcome,
    pub steps: Vec<StepRecord>,
    pub lambda: u64,
    pub q: u64,
    pub cell_sizes: Vec<u64>,
    pub cell_counts: Vec<u64>,
    /// Row `i` holds `R`, `I` or `U` for each pair `(i, j)` at the last tested step.
    pub pair_matrix: Vec<String>,
    pub conclusion: Option<ConclusionCheck>,
    pub energy_monotone: bool,
}

impl RegularityDecomposition {
    pub fn energy_trace(&self) -> Vec<&ExactRational> {
        self.steps.iter().map(|s| &s.energy).collect()
    }
}

/// Smallest `n` with `n^4 >= p^3 q`.
fn quarter_mean(p: u64, q: u64) -> u64 {
    let target = (p as u128).pow(3) * q as u128;
    let mut n = ((p as f64).powf(0.75) * (q as f64).powf(0.25)).floor() as u128;
    n = n.saturating_sub(2);
    while n.pow(4) < target {
        n += 1;
    }
    n as u64
}

/// Largest `Q >= 1` with `Q^3 q <= p`, i.e. `floor(L^(1/3))`.
fn cube_root_floor(p: u64, q: u64) -> u64 {
    let mut n = ((p as f64 / q as f64).cbrt().floor() as u128).saturating_sub(1);
    while (n + 1).pow(3) * q as u128 <= p as u128 {
        n += 1;
    }
    n.max(1) as u64
}

fn conclusion(cells: &[GSet], p: u64, q: u64, eps: f64) -> ConclusionCheck {
    let l = p as f64 / q as f64;
    let n = cells.len();
    let good: u64 = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (a, b) = (&cells[idx / n], &cells[idx % n]);
            let small = (a.len().min(b.len()) as f64) <= eps * l;
            let big = || !a.is_empty() && !b.is_empty() && add_masks(a.mask(), b.mask()).count() as f64 >= (2.0 - eps) * l;
            (small || big()) as u64
        })
        .sum();
    let total = (n * n) as u64;
    let required = (1.0 - eps) * total as f64;
    ConclusionCheck {
        epsilon: eps,
        good_pairs: good,
        total_pairs: total,
        required,
        holds: good as f64 >= required,
    }
}

fn increment(
    counts_t: &[u64],
    counts_next: &[u64],
    omega: &[bool],
    p: u64,
    d: u64,
    eps: f64,
) -> IncrementReport {
    let (q, q2) = (counts_t.len() as u64, counts_next.len() as u64);
    let mut sums = vec![(0.0f64, 0u64); q as usize];
    let mut bad = 0;
    for j in 0..q2 {
        let (s, t) = cell_bounds(j, p, q2);
        let first = (d as u128 * s as u128 % p as u128) as u64;
        let last = (d as u128 * t as u128 % p as u128) as u64;
        let i = cell_of(first, p, q);
        if last >= first && last - first == d * (t - s) && cell_of(last, p, q) == i {
            let dens = counts_next[j as usize] as f64 / (t - s + 1) as f64;
            sums[i as usize].0 += dens * dens;
            sums[i as usize].1 += 1;
        } else {
            bad += 1;
        }
    }
    let (mut om, mut rest) = ((0.0, 0usize), (0.0, 0usize));
    for i in 0..q as usize {
        let (sum, r) = sums[i];
        if r == 0 {
            continue;
        }
        let (s, t) = cell_bounds(i as u64, p, q);
        let dens = counts_t[i] as f64 / (t - s + 1) as f64;
        let inc = sum / r as f64 - dens * dens;
        let acc = if omega[i] { &mut om } else { &mut rest };
        acc.0 += inc;
        acc.1 += 1;
    }
    let mean = |(s, n): (f64, usize)| (n > 0).then(|| s / n as f64);
    IncrementReport {
        omega_size: omega.iter().filter(|&&b| b).count(),
        mean_increment_omega: mean(om),
        mean_increment_rest: mean(rest),
        target: (eps / 2.0).powi(2),
        bad_progressions: bad,
        bad_cap: d * q,
    }
}

/// Runs the energy-increment loop on `A` in `Z/pZ`.
pub fn regularity_decompose(a: &GSet, eps: f64, opts: &DecomposeOptions) -> Result<RegularityDecomposition> {
    let p = require_prime_cyclic(a)?;
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("epsilon {eps} outside (0, 1/2)")));
    }
    let (regime, q_min) = match opts.q_min_override {
        Some(q) => (QRegime::Override, q.max(1)),
        None => (QRegime::Default, eps.powi(-10).ceil().min(u64::MAX as f64 / 4.0) as u64),
    };
    let l_floor = opts.l_floor.unwrap_or((16.0 / eps).ceil() as u64).max(1);
    let max_steps = opts.max_steps.unwrap_or((4.0 / eps.powi(6)).ceil() as u64).max(1);
    let minimum = |q1: u64| q1.saturating_mul(l_floor).saturating_add(1);
    let mut q = prime_at_least(q_min)?;
    if (p as u128) < q as u128 * l_floor as u128 {
        return Err(Error::Scale {
            reason: format!("p = {p} is below q_1 * L_floor = {q} * {l_floor}"),
            minimum: minimum(q),
        });
    }
    let mut lambda = 1u64;
    let mut steps: Vec<StepRecord> = Vec::new();
    let outcome;
    let mut pair_matrix = Vec::new();
    let mut conclusion_check = None;
    let mut last_cells: Vec<GSet>;
    let mut t = 0u64;
    loop {
        t += 1;
        let counts = cell_counts(a, lambda, q);
        let e = energy_from_counts(&counts, p);
        let l = p as f64 / q as f64;
        let mut step = StepRecord {
            t,
            lambda,
            q,
            l,
            energy_f64: crate::arith::rational_to_f64(&e),
            energy: e,
            saturated: false,
            grid: None,
            regular_pairs: 0,
            irregular_pairs: 0,
            undecided_pairs: 0,
            regular_fraction: 0.0,
            witness: None,
            d: None,
            sigma_max: None,
            sigma_within_cap: None,
            increment: None,
            edge_tolerance: None,
        };
        last_cells = cells(a, lambda, q)?;
        if (p as u128) < q as u128 * l_floor as u128 {
            step.saturated = true;
            steps.push(step);
            outcome = Outcome::Saturated;
            break;
        }
        if t > max_steps {
            steps.push(step);
            outcome = Outcome::MaxSteps;
            break;
        }
        let max_len = last_cells.iter().map(|c| c.ambient().size()).max().unwrap_or(1);
        let choice = grid_size(max_len, eps);
        step.grid = Some(choice);
        let grid = Grid::new(choice.used as usize);
        let specs = spectra(&last_cells, &grid, eps)?;
        let n = q as usize;
        let verdicts: Vec<u8> = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                match pair_verdict(&specs[i], &last_cells[i], &specs[j], &last_cells[j], eps, choice).verdict {
                    Verdict::Regular => b'R',
                    Verdict::Irregular { .. } => b'I',
                    Verdict::Undecided { .. } => b'U',
                }
            })
            .collect();
        pair_matrix = verdicts.chunks(n).map(|r| String::from_utf8_lossy(r).into_owned()).collect();
        step.regular_pairs = verdicts.iter().filter(|&&v| v == b'R').count() as u64;
        step.irregular_pairs = verdicts.iter().filter(|&&v| v == b'I').count() as u64;
        step.undecided_pairs = verdicts.iter().filter(|&&v| v == b'U').count() as u64;
        let total = (n * n) as f64;
        step.regular_fraction = step.regular_pairs as f64 / total;
        if step.regular_pairs as f64 >= (1.0 - eps) * total {
            steps.push(step);
            outcome = Outcome::Success;
            conclusion_check = Some(conclusion(&last_cells, p, q, eps));
            break;
        }

        let mut involved = vec![false; n];
        for (idx, &v) in verdicts.iter().enumerate() {
            if v != b'R' {
                involved[idx / n] = true;
                involved[idx % n] = true;
            }
        }
        let m = grid.m;
        let mut popularity = vec![0u32; m];
        let mut sigma_max = 0usize;
        let mut within_cap = true;
        let sigmas: Vec<Vec<usize>> = specs
            .iter()
            .map(|s| {
                let thr = eps * s.len as f64 / 2.0;
                s.mags.iter().enumerate().filter(|(_, &g)| g >= thr).map(|(r, _)| r).collect()
            })
            .collect();
        for (i, sig) in sigmas.iter().enumerate() {
            sigma_max = sigma_max.max(sig.len());
            let cap = 4.0 * m as f64 / (eps * eps * specs[i].len as f64);
            within_cap &= sig.len() as f64 <= cap;
            if involved[i] {
                for &r in sig {
                    popularity[r] += 1;
                }
            }
        }
        step.sigma_max = Some(sigma_max);
        step.sigma_within_cap = Some(within_cap);
        let best = (0..m)
            .filter(|&r| popularity[r] > 0)
            .max_by(|&x, &y| {
                popularity[x]
                    .cmp(&popularity[y])
                    .then_with(|| y.min(m - y).cmp(&x.min(m - x)))
                    .then_with(|| y.cmp(&x))
            });
        let Some(r) = best else {
            steps.push(step);
            outcome = Outcome::Stalled;
            break;
        };
        let omega: Vec<bool> = sigmas.iter().map(|s| s.binary_search(&r).is_ok()).collect();
        step.witness = Some(PopularFrequency {
            r: r as u64,
            m: m as u64,
            theta: r as f64 / m as f64,
            cells: popularity[r] as usize,
        });
        let theta = Phase::new(r as u64, m as u64)?;
        let d = dirichlet_approx(theta, cube_root_floor(p, q))?;
        step.d = Some(d);
        let next_lambda = (lambda as u128 * mod_inverse(d as i64, p)? as u128 % p as u128) as u64;
        let next_q = prime_at_least(quarter_mean(p, q).max(q + 1))?;
        if next_q >= p {
            steps.push(step);
            outcome = Outcome::Saturated;
            break;
        }
        step.increment = Some(increment(&counts, &cell_counts(a, next_lambda, next_q), &omega, p, d, eps));
        step.edge_tolerance = Some(d as f64 * q as f64 / next_q as f64 + l.powf(-1.0 / 12.0));
        steps.push(step);
        lambda = next_lambda;
        q = next_q;
    }

    let energy_monotone = steps.windows(2).all(|w| {
        let tol = w[0].edge_tolerance.unwrap_or(0.0);
        w[1].energy_f64 >= w[0].energy_f64 - tol
    });
    Ok(RegularityDecomposition {
        p,
        epsilon: eps,
        regime,
        q_min,
        l_floor,
        max_steps,
        outcome,
        lambda,
        q,
        cell_sizes: last_cells.iter().map(|c| c.ambient().size() as u64).collect(),
        cell_counts: last_cells.iter().map(|c| c.len() as u64).collect(),
        steps,
        pair_matrix,
        conclusion: conclusion_check,
        energy_monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_half_subset, SeededSource};

    #[test]
    fn cell_layout() {
        let sizes: Vec<u64> = (0..5).map(|i| {
            let (s, t) = cell_bounds(i, 101, 5);
            t - s + 1
        }).collect();
        assert_eq!(sizes, vec![21, 20, 20, 20, 20]);
        for x in 0..101 {
            let i = cell_of(x, 101, 5);
            let (s, t) = cell_bounds(i, 101, 5);
            assert!(s <= x && x <= t);
        }
    }

    #[test]
    fn energy_examples() {
        let amb = Ambient::cyclic(101).unwrap();
        assert_eq!(energy(&GSet::full(amb), 1, 5).unwrap(), ExactRational::from_integer(1.into()));
        assert_eq!(energy(&GSet::empty(amb), 3, 5).unwrap(), ExactRational::from_integer(0.into()));
        let two_cells = GSet::from_values(amb, 0..41).unwrap();
        assert_eq!(energy(&two_cells, 1, 5).unwrap(), crate::arith::rat(2, 5));
        assert!(energy(&two_cells, 1, 101).is_err());
    }

    #[test]
    fn energy_bounds_and_refinement() {
        let p = 1009;
        let amb = Ambient::cyclic(p).unwrap();
        for seed in 0..20 {
            let mut rng = SeededSource::new(seed, 4).rng();
            let a = crate::rng::random_subset(amb, 0.1 + 0.04 * seed as f64, &mut rng);
            let alpha = ExactRational::new((a.len() as i64).into(), (p as i64).into());
            for lambda in [1u64, 2, 500] {
                for q in [3u64, 7, 10] {
                    let e = energy(&a, lambda, q).unwrap();
                    assert!(alpha.clone() * alpha.clone() <= e && e <= ExactRational::from_integer(1.into()));
                    let fine = energy(&a, lambda, 4 * q).unwrap();
                    let tol = refinement_tolerance(p, q, 4 * q);
                    assert!(crate::arith::rational_to_f64(&fine) >= crate::arith::rational_to_f64(&e) - tol);
                }
            }
        }
    }

    #[test]
    fn integer_roots() {
        assert_eq!(cube_root_floor(1000, 1), 10);
        assert_eq!(cube_root_floor(999, 1), 9);
        assert_eq!(cube_root_floor(5, 10), 1);
        let n = quarter_mean(10007, 11);
        assert!((n as u128).pow(4) >= 10007u128.pow(3) * 11);
        assert!(((n - 1) as u128).pow(4) < 10007u128.pow(3) * 11);
    }

    #[test]
    fn trivial_sets_stop_at_once() {
        let amb = Ambient::cyclic(1009).unwrap();
        let opts = DecomposeOptions {
            q_min_override: Some(7),
            ..Default::default()
        };
        for a in [GSet::full(amb), GSet::empty(amb)] {
            let d = regularity_decompose(&a, 0.3, &opts).unwrap();
            assert_eq!(d.outcome, Outcome::Success);
            assert_eq!(d.steps.len(), 1);
            assert!(d.pair_matrix.iter().all(|r| r.bytes().all(|c| c == b'R')));
        }
    }

    #[test]
    fn scale_error_for_tiny_p() {
        let a = GSet::full(Ambient::cyclic(101).unwrap());
        match regularity_decompose(&a, 0.3, &DecomposeOptions::default()) {
            Err(Error::Scale { minimum, .. }) => assert!(minimum > 101),
            other => panic!("expected scale error, got {other:?}"),
        }
    }

    #[test]
    fn random_set_is_regular_at_first_level() {
        let amb = Ambient::cyclic(10007).unwrap();
        let a = random_half_subset(amb, &mut SeededSource::new(5, 0).rng());
        let opts = DecomposeOptions {
            q_min_override: Some(11),
            ..Default::default()
        };
        let d = regularity_decompose(&a, 0.3, &opts).unwrap();
        assert_eq!(d.outcome, Outcome::Success);
        assert_eq!(d.q, 11);
        assert!(d.conclusion.as_ref().unwrap().holds);
        assert!(d.energy_monotone);
    }

    #[test]
    fn half_interval_runs_to_a_recorded_end() {
        let amb = Ambient::cyclic(10007).unwrap();
        let a = GSet::from_values(amb, 0..5003).unwrap();
        let opts = DecomposeOptions {
            q_min_override: Some(11),
            ..Default::default()
        };
        let d = regularity_decompose(&a, 0.3, &opts).unwrap();
        assert!(d.energy_monotone);
        assert!(!d.steps.is_empty());
    }
}
