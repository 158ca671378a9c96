//! Balanced Fourier transforms of sets in intervals and the certified
//! pair-regularity test.
//!
//! A set `A` lives in the interval ambient `I = [lo, hi]`; its balanced
//! function is `f = 1_A - |A|/|I|` on `I`. Grid values at `r/M` come from a
//! zero-padded inverse FFT of `f` indexed from `lo`, which changes only a
//! unimodular phase.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::ambient::GSet;
use crate::error::{Error, Result};

/// Largest grid the certifier will transform.
pub const GRID_CAP: usize = 1 << 20;

/// Neumaier-compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum + self.carry
    }
}

fn interval_of(a: &GSet) -> Result<(i64, usize)> {
    match a.ambient() {
        crate::Ambient::Interval { lo, .. } => Ok((lo, a.ambient().size())),
        _ => Err(Error::Contract("balanced transforms need an interval ambient".into())),
    }
}

/// Values of the balanced function, indexed from the interval start.
pub fn balanced_values(a: &GSet) -> Result<Vec<f64>> {
    let (_, len) = interval_of(a)?;
    let alpha = a.len() as f64 / len as f64;
    Ok((0..len)
        .map(|j| if a.mask().contains(j) { 1.0 - alpha } else { -alpha })
        .collect())
}

fn sum_phases(a: &GSet, phase: impl Fn(i64) -> f64) -> Result<Complex64> {
    let (lo, len) = interval_of(a)?;
    let alpha = a.len() as f64 / len as f64;
    let (mut re, mut im) = (Compensated::default(), Compensated::default());
    for j in 0..len {
        let x = lo + j as i64;
        let w = if a.mask().contains(j) { 1.0 - alpha } else { -alpha };
        let (s, c) = (std::f64::consts::TAU * phase(x)).sin_cos();
        re.add(w * c);
        im.add(w * s);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// `sum_{x in I} (1_A(x) - alpha) e(x theta)` for real `theta`.
pub fn balanced_ft(a: &GSet, theta: f64) -> Result<Complex64> {
    let t = theta.rem_euclid(1.0);
    sum_phases(a, |x| (x as f64 * t).rem_euclid(1.0))
}

/// The transform at `theta = r / m` with exactly reduced phases.
pub fn balanced_ft_at(a: &GSet, r: u64, m: u64) -> Result<Complex64> {
    if m == 0 {
        return Err(Error::Domain("grid size must be positive".into()));
    }
    sum_phases(a, |x| {
        let k = (x.rem_euclid(m as i64) as u128 * (r % m) as u128 % m as u128) as f64;
        k / m as f64
    })
}

/// Smallest 7-smooth integer at least `n`.
fn smooth_at_least(n: usize) -> usize {
    let smooth = |mut x: usize| {
        for p in [2, 3, 5, 7] {
            while x % p == 0 {
                x /= p;
            }
        }
        x == 1
    };
    (n.max(1)..).find(|&x| smooth(x)).expect("smooth numbers are unbounded")
}

/// Grid resolution: the required `ceil(100 L / eps)` and the size actually
/// transformed (rounded up to a fast FFT length, capped at [`GRID_CAP`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridChoice {
    pub required: u64,
    pub used: u64,
}

pub fn grid_size(max_len: usize, eps: f64) -> GridChoice {
    let required = (100.0 * max_len as f64 / eps).ceil();
    let used = if required > GRID_CAP as f64 {
        GRID_CAP.max(smooth_at_least(max_len))
    } else {
        smooth_at_least(required as usize)
    };
    GridChoice {
        required: required.min(u64::MAX as f64) as u64,
        used: used as u64,
    }
}

/// Shared inverse FFT plan for one grid size.
#[derive(Clone)]
pub struct Grid {
    pub m: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl Grid {
    pub fn new(m: usize) -> Self {
        Grid {
            m,
            fft: FftPlanner::new().plan_fft_inverse(m),
        }
    }
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid").field("m", &self.m).finish()
    }
}

/// Grid magnitudes of a balanced function plus the bounds needed to
/// certify all `theta` between grid points.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub len: usize,
    /// `sum |f|`, a bound on `|f^|` everywhere.
    pub l1: f64,
    /// `2 pi sum |x - c| |f(x)|` with `c` the interval midpoint; bounds the
    /// derivative of `|f^|`.
    pub lipschitz: f64,
    pub m: usize,
    /// `|f^(r / m)|`; empty when the transform was not needed.
    pub mags: Vec<f64>,
}

impl Spectrum {
    /// Builds the grid unless `l1 < skip_below`, in which case `mags` stays
    /// empty and `l1` serves as the bound everywhere.
    pub fn compute(a: &GSet, grid: &Grid, skip_below: f64) -> Result<Self> {
        let f = balanced_values(a)?;
        let len = f.len();
        if grid.m < len {
            return Err(Error::Contract(format!("grid {} shorter than interval {len}", grid.m)));
        }
        let mut l1 = Compensated::default();
        let mut lip = Compensated::default();
        let c = (len as f64 - 1.0) / 2.0;
        for (j, v) in f.iter().enumerate() {
            l1.add(v.abs());
            lip.add((j as f64 - c).abs() * v.abs());
        }
        let l1 = l1.value();
        let lipschitz = std::f64::consts::TAU * lip.value();
        let mags = if l1 < skip_below {
            Vec::new()
        } else {
            let mut buf: Vec<Complex64> = vec![Complex64::default(); grid.m];
            for (b, v) in buf.iter_mut().zip(&f) {
                b.re = *v;
            }
            grid.fft.process(&mut buf);
            buf.iter().map(|z| z.norm()).collect()
        };
        Ok(Spectrum {
            len,
            l1,
            lipschitz,
            m: grid.m,
            mags,
        })
    }

    /// Floating-point error allowance on grid values.
    pub fn float_err(&self) -> f64 {
        1e-9 * (self.l1 + 1.0)
    }

    /// Certified bound on `| |f^(theta)| - |f^(r/m)| |` for `theta` within
    /// half a grid step of `r / m`, including rounding.
    pub fn slack(&self) -> f64 {
        self.lipschitz / (2.0 * self.m as f64) + self.float_err()
    }

    /// `(grid value, certified upper bound on the surrounding cell)`.
    pub fn at(&self, r: usize) -> (f64, f64) {
        if self.mags.is_empty() {
            (0.0, self.l1)
        } else {
            let g = self.mags[r];
            (g, (g + self.slack()).min(self.l1))
        }
    }

    pub fn has_grid(&self) -> bool {
        !self.mags.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    /// Both transforms exceed their thresholds at one frequency.
    Both,
    /// One transform exceeds its threshold at a low frequency.
    LowFrequency,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub r: u64,
    pub m: u64,
    pub theta: f64,
    pub clause: Clause,
    pub value_a: f64,
    pub value_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Regular,
    Irregular { witness: Witness },
    Undecided { margin: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityVerdict {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub epsilon: f64,
    pub grid: GridChoice,
}

impl RegularityVerdict {
    pub fn is_regular(&self) -> bool {
        matches!(self.verdict, Verdict::Regular)
    }

    pub fn is_irregular(&self) -> bool {
        matches!(self.verdict, Verdict::Irregular { .. })
    }
}

/// Three-valued verdict for a pair of precomputed spectra on a common grid.
pub fn pair_verdict(sa: &Spectrum, a: &GSet, sb: &Spectrum, b: &GSet, eps: f64, grid: GridChoice) -> RegularityVerdict {
    let (la, lb) = (sa.len as f64, sb.len as f64);
    let (ta, tb) = (eps * la, eps * lb);
    let verdict = |verdict| RegularityVerdict {
        verdict,
        epsilon: eps,
        grid,
    };
    if sa.l1 <= ta && sb.l1 <= tb {
        return verdict(Verdict::Regular);
    }
    let m = sa.m;
    debug_assert_eq!(m, sb.m);
    let low = (1.0 / (eps * la)).min(1.0 / (eps * lb));
    let half = 0.5 / m as f64;
    let (ea, eb) = (sa.float_err(), sb.float_err());

    let mut worst: Option<(f64, usize, Clause)> = None;
    let mut margin = 0.0f64;
    let mut uncertified = false;
    for r in 0..m {
        let dist = r.min(m - r) as f64 / m as f64;
        let (ga, ua) = sa.at(r);
        let (gb, ub) = sb.at(r);
        let mut consider = |score: f64, clause: Clause| {
            if worst.is_none_or(|(s, _, _)| score > s) {
                worst = Some((score, r, clause));
            }
        };
        if ga > ta + ea && gb > tb + eb {
            consider((ga - ta).min(gb - tb), Clause::Both);
        }
        if !(ua <= ta || ub <= tb) {
            uncertified = true;
            margin = margin.max((ua - ta).min(ub - tb));
        }
        if dist <= low && (ga > ta + ea || gb > tb + eb) {
            consider((ga - ta).max(gb - tb), Clause::LowFrequency);
        }
        if dist - half <= low && !(ua <= ta && ub <= tb) {
            uncertified = true;
            margin = margin.max((ua - ta).max(ub - tb));
        }
    }
    if let Some((_, r, clause)) = worst {
        let (r64, m64) = (r as u64, m as u64);
        let va = balanced_ft_at(a, r64, m64).map(|z| z.norm()).unwrap_or(f64::NAN);
        let vb = balanced_ft_at(b, r64, m64).map(|z| z.norm()).unwrap_or(f64::NAN);
        let confirmed = match clause {
            Clause::Both => va > ta && vb > tb,
            Clause::LowFrequency => va > ta || vb > tb,
        };
        if confirmed {
            return verdict(Verdict::Irregular {
                witness: Witness {
                    r: r64,
                    m: m64,
                    theta: r as f64 / m as f64,
                    clause,
                    value_a: va,
                    value_b: vb,
                },
            });
        }
        return verdict(Verdict::Undecided { margin: margin.max(0.0) });
    }
    if uncertified {
        verdict(Verdict::Undecided { margin })
    } else {
        verdict(Verdict::Regular)
    }
}

/// Certified test of whether `(A, A')` is an `eps`-regular pair.
pub fn regular_pair_test(a: &GSet, b: &GSet, eps: f64) -> Result<RegularityVerdict> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("epsilon {eps} must be positive")));
    }
    let (_, la) = interval_of(a)?;
    let (_, lb) = interval_of(b)?;
    if la < 2 || lb < 2 {
        return Err(Error::Domain("intervals need at least two elements".into()));
    }
    let choice = grid_size(la.max(lb), eps);
    let grid = Grid::new(choice.used as usize);
    let (sa, sb) = rayon::join(
        || Spectrum::compute(a, &grid, eps * la as f64 / 2.0),
        || Spectrum::compute(b, &grid, eps * lb as f64 / 2.0),
    );
    Ok(pair_verdict(&sa?, a, &sb?, b, eps, choice))
}

/// Spectra of many sets on one grid, computed in parallel.
pub fn spectra(sets: &[GSet], grid: &Grid, eps: f64) -> Result<Vec<Spectrum>> {
    sets.par_iter()
        .map(|s| Spectrum::compute(s, grid, eps * s.ambient().size() as f64 / 2.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_half_subset, SeededSource};
    use crate::Ambient;

    fn evens(len: i64) -> GSet {
        GSet::interval(0, len - 1, (0..len).step_by(2)).unwrap()
    }

    #[test]
    fn transform_examples() {
        let a = GSet::interval(3, 40, [3, 5, 9, 17, 33, 34]).unwrap();
        assert!(balanced_ft(&a, 0.0).unwrap().norm() < 1e-12);
        let full = GSet::full(Ambient::interval(0, 49).unwrap());
        for t in [0.0, 0.1, 0.37, 0.5] {
            assert!(balanced_ft(&full, t).unwrap().norm() < 1e-12);
        }
        let e = evens(64);
        let v = balanced_ft(&e, 0.5).unwrap();
        assert!((v.re - 32.0).abs() < 1e-9 && v.im.abs() < 1e-9);
        let w = balanced_ft_at(&e, 1, 2).unwrap();
        assert!((w.re - 32.0).abs() < 1e-9);
    }

    #[test]
    fn grid_matches_direct_evaluation_and_parseval() {
        let amb = Ambient::interval(5, 68).unwrap();
        let a = random_half_subset(amb, &mut SeededSource::new(3, 0).rng());
        let grid = Grid::new(320);
        let s = Spectrum::compute(&a, &grid, 0.0).unwrap();
        for r in [0usize, 1, 7, 100, 319] {
            let direct = balanced_ft_at(&a, r as u64, 320).unwrap().norm();
            assert!((direct - s.mags[r]).abs() < 1e-9, "r={r}");
        }
        let f = balanced_values(&a).unwrap();
        let energy: f64 = f.iter().map(|x| x * x).sum();
        let grid_energy: f64 = s.mags.iter().map(|x| x * x).sum::<f64>() / 320.0;
        assert!(((grid_energy - energy) / energy).abs() < 2f64.powi(-30));
        assert!(s.mags[0] < 1e-9);
    }

    #[test]
    fn lipschitz_bound_holds_between_grid_points() {
        let amb = Ambient::interval(0, 47).unwrap();
        let a = random_half_subset(amb, &mut SeededSource::new(9, 1).rng());
        let grid = Grid::new(96);
        let s = Spectrum::compute(&a, &grid, 0.0).unwrap();
        for r in 0..96 {
            for k in 1..8 {
                let theta = (r as f64 + k as f64 / 16.0) / 96.0;
                let v = balanced_ft(&a, theta).unwrap().norm();
                assert!(v <= s.mags[r] + s.slack());
            }
        }
    }

    #[test]
    fn full_sets_are_regular() {
        let i = GSet::full(Ambient::interval(0, 31).unwrap());
        let j = GSet::full(Ambient::interval(32, 64).unwrap());
        for eps in [0.5, 0.1, 1e-4] {
            assert!(regular_pair_test(&i, &j, eps).unwrap().is_regular());
        }
    }

    #[test]
    fn evens_are_irregular_at_one_half() {
        let v = regular_pair_test(&evens(64), &evens(64), 0.2).unwrap();
        match v.verdict {
            Verdict::Irregular { witness } => {
                assert_eq!(witness.theta, 0.5);
                assert!((witness.value_a - 32.0).abs() < 1e-6);
                assert_eq!(witness.clause, Clause::Both);
            }
            other => panic!("expected irregular, got {other:?}"),
        }
    }

    #[test]
    fn low_frequency_clause_fires_for_half_intervals() {
        let a = GSet::interval(0, 99, 0..50).unwrap();
        let b = GSet::full(Ambient::interval(100, 199).unwrap());
        let v = regular_pair_test(&a, &b, 0.2).unwrap();
        match v.verdict {
            Verdict::Irregular { witness } => assert_eq!(witness.clause, Clause::LowFrequency),
            other => panic!("expected irregular, got {other:?}"),
        }
    }

    #[test]
    fn grid_sizes() {
        let g = grid_size(256, 0.25);
        assert_eq!(g.required, 102_400);
        assert!(g.used >= g.required);
        let g = grid_size(256, 0.25f64.powi(7));
        assert_eq!(g.used as usize, GRID_CAP);
        assert_eq!(smooth_at_least(11), 12);
    }
}
