//! Freiman dimension, Freiman homomorphisms into `[1, N]`, affine
//! stabilizers and dilates into short cyclic intervals.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::GSet;
use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::linalg::Echelon;

/// Largest set accepted by [`freiman_dimension`] unless overridden.
pub const DEFAULT_DIMENSION_CAP: usize = 24;
/// Largest number of candidate maps either counting strategy may scan.
pub const DEFAULT_HOM_BUDGET: f64 = 2e8;

/// All additive quadruples `a + b = c + d` among the members of a set, as
/// index quadruples with `a <= b`, `c <= d` and `(a, b) < (c, d)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadrupleSystem {
    pub base: Vec<i64>,
    pub constraints: Vec<[usize; 4]>,
}

impl QuadrupleSystem {
    pub fn build(a: &GSet) -> Self {
        let base = a.to_vec();
        let modulus = a.ambient().modulus().map(|n| n as i64);
        let mut buckets: BTreeMap<i64, Vec<(usize, usize)>> = BTreeMap::new();
        for i in 0..base.len() {
            for j in i..base.len() {
                let s = base[i] + base[j];
                let s = modulus.map_or(s, |n| s.rem_euclid(n));
                buckets.entry(s).or_default().push((i, j));
            }
        }
        let mut constraints = Vec::new();
        for pairs in buckets.values() {
            for (x, &(a, b)) in pairs.iter().enumerate() {
                for &(c, d) in &pairs[x + 1..] {
                    constraints.push([a, b, c, d]);
                }
            }
        }
        constraints.sort_unstable();
        QuadrupleSystem { base, constraints }
    }

    /// Coefficient row of the constraint `phi(a) + phi(b) - phi(c) - phi(d) = 0`.
    pub fn row(&self, q: &[usize; 4]) -> Vec<BigInt> {
        let mut r = vec![0i64; self.base.len()];
        r[q[0]] += 1;
        r[q[1]] += 1;
        r[q[2]] -= 1;
        r[q[3]] -= 1;
        r.into_iter().map(BigInt::from).collect()
    }

    pub fn is_hom(&self, phi: &[i64]) -> bool {
        self.constraints
            .iter()
            .all(|q| phi[q[0]] + phi[q[1]] == phi[q[2]] + phi[q[3]])
    }

    fn echelon(&self) -> Echelon {
        let k = self.base.len();
        let mut e = Echelon::new(k);
        for q in &self.constraints {
            // Constant maps are always homomorphisms, so rank <= k - 1.
            if e.rank() + 1 >= k {
                break;
            }
            e.insert(self.row(q));
        }
        e
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreimanDim {
    pub r: usize,
    #[serde(skip)]
    pub kernel_basis: Vec<Vec<BigRational>>,
}

pub fn freiman_dimension(a: &GSet) -> Result<FreimanDim> {
    freiman_dimension_with_cap(a, DEFAULT_DIMENSION_CAP)
}

pub fn freiman_dimension_with_cap(a: &GSet, cap: usize) -> Result<FreimanDim> {
    let k = a.len();
    if k == 0 {
        return Err(Error::Domain("Freiman dimension of the empty set".into()));
    }
    if k > cap {
        return Err(Error::budget(format!("Freiman system with {k} unknowns"), k as f64, cap as f64));
    }
    let e = QuadrupleSystem::build(a).echelon();
    let kernel_basis = e.kernel_basis();
    Ok(FreimanDim {
        r: kernel_basis.len() - 1,
        kernel_basis,
    })
}

/// `|A + A| >= (r + 1)|A| - C(r + 1, 2)`.
pub fn freiman_lemma_holds(sumset_size: usize, k: usize, r: usize) -> bool {
    let lhs = sumset_size as i128;
    let rhs = (r as i128 + 1) * k as i128 - (r as i128 + 1) * r as i128 / 2;
    lhs >= rhs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HomMethod {
    Kernel,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomCount {
    #[serde(serialize_with = "crate::serde_display")]
    pub count: BigUint,
    pub r: usize,
    /// `N^(r + 1)`.
    #[serde(serialize_with = "crate::serde_display")]
    pub bound: BigUint,
    pub method: HomMethod,
}

/// Dependent coordinate `phi(j) = (sum_f num[f] * phi(free[f])) / den`.
struct Dependent {
    num: Vec<i128>,
    den: i128,
}

fn dependents(e: &Echelon, k: usize) -> Result<(Vec<usize>, Vec<Dependent>)> {
    let free = e.free_columns();
    let basis = e.kernel_basis();
    let overflow = || Error::Range("kernel coefficients exceed 128 bits".into());
    let mut deps = Vec::new();
    for col in (0..k).filter(|c| !free.contains(c)) {
        let coeffs: Vec<&BigRational> = basis.iter().map(|v| &v[col]).collect();
        let den = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let num = coeffs
            .iter()
            .map(|c| (c.numer() * (&den / c.denom())).to_i128().ok_or_else(overflow))
            .collect::<Result<Vec<_>>>()?;
        deps.push(Dependent {
            num,
            den: den.to_i128().ok_or_else(overflow)?,
        });
    }
    Ok((free, deps))
}

fn count_by_kernel(free: &[usize], deps: &[Dependent], n: i64) -> u64 {
    let f = free.len();
    (1..=n)
        .into_par_iter()
        .map(|first| {
            let mut vals = vec![1i64; f];
            vals[0] = first;
            let mut count = 0u64;
            loop {
                let ok = deps.iter().all(|d| {
                    let s: i128 = d.num.iter().zip(&vals).map(|(&c, &v)| c * v as i128).sum();
                    s % d.den == 0 && (1..=n as i128).contains(&(s / d.den))
                });
                count += ok as u64;
                let mut i = f;
                loop {
                    if i == 1 {
                        return count;
                    }
                    i -= 1;
                    if vals[i] < n {
                        vals[i] += 1;
                        break;
                    }
                    vals[i] = 1;
                }
            }
        })
        .sum()
}

/// Brute-force count over all `N^k` maps; used as the fallback strategy.
pub fn count_freiman_homs_brute(sys: &QuadrupleSystem, n: i64) -> u64 {
    let k = sys.base.len();
    let mut phi = vec![1i64; k];
    let mut count = 0;
    loop {
        count += sys.is_hom(&phi) as u64;
        let mut i = k;
        loop {
            if i == 0 {
                return count;
            }
            i -= 1;
            if phi[i] < n {
                phi[i] += 1;
                break;
            }
            phi[i] = 1;
        }
    }
}

/// Number of Freiman homomorphisms `phi: A -> [1, N]`.
pub fn count_freiman_homs(a: &GSet, n: u64) -> Result<HomCount> {
    count_freiman_homs_with_budget(a, n, DEFAULT_HOM_BUDGET)
}

pub fn count_freiman_homs_with_budget(a: &GSet, n: u64, budget: f64) -> Result<HomCount> {
    let k = a.len();
    if k == 0 || n == 0 {
        return Err(Error::Domain("need a nonempty set and N >= 1".into()));
    }
    let ni = i64::try_from(n).map_err(|_| Error::Range("N exceeds i64".into()))?;
    let dim = freiman_dimension(a)?;
    let r = dim.r;
    let bound = num_traits::pow(BigUint::from(n), r + 1);
    let sys = QuadrupleSystem::build(a);
    let kernel_work = (n as f64).powi(r as i32 + 1);
    let brute_work = (n as f64).powi(k as i32);
    let (count, method) = if kernel_work <= budget {
        let (free, deps) = dependents(&sys.echelon(), k)?;
        (count_by_kernel(&free, &deps, ni), HomMethod::Kernel)
    } else if brute_work <= budget {
        (count_freiman_homs_brute(&sys, ni), HomMethod::BruteForce)
    } else {
        return Err(Error::budget(
            format!("Freiman homomorphisms of a {k}-set into [1, {n}]"),
            kernel_work.min(brute_work),
            budget,
        ));
    };
    let count = BigUint::from(count);
    if count > bound {
        return Err(Error::Internal(format!("hom count {count} exceeds N^(r+1) = {bound}")));
    }
    Ok(HomCount {
        count,
        r,
        bound,
        method,
    })
}

fn prime_modulus(a: &GSet) -> Result<u64> {
    match a.ambient().modulus() {
        Some(n) if is_prime(n) => Ok(n),
        Some(n) => Err(Error::Domain(format!("modulus {n} is not prime"))),
        None => Err(Error::Domain("expected a subset of Z/NZ".into())),
    }
}

/// All `(lambda, mu)` with `lambda A + mu = A`, sorted.
pub fn affine_stabilizer(a: &GSet) -> Result<Vec<(u64, u64)>> {
    let n = prime_modulus(a)?;
    let members: Vec<u64> = a.mask().iter().map(|i| i as u64).collect();
    let out: Vec<Vec<(u64, u64)>> = (1..n)
        .into_par_iter()
        .map(|lambda| {
            let Some(&x0) = members.first() else {
                return (0..n).map(|mu| (lambda, mu)).collect();
            };
            let image0 = x0 * lambda % n;
            let mut hits = Vec::new();
            for &target in &members {
                let mu = (target + n - image0) % n;
                if members.iter().all(|&x| a.mask().contains(((x * lambda + mu) % n) as usize)) {
                    hits.push((lambda, mu));
                }
            }
            hits.sort_unstable();
            hits
        })
        .collect();
    Ok(out.into_iter().flatten().collect())
}

/// Composition `x -> l1 (l2 x + m2) + m1` of affine maps mod `n`.
pub fn compose_affine(f: (u64, u64), g: (u64, u64), n: u64) -> (u64, u64) {
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % n as u128) as u64;
    (mul(f.0, g.0), (mul(f.0, g.1) + f.1) % n)
}

/// Largest gap between cyclically consecutive members of `s` (a sorted,
/// deduplicated list in `[0, n)`); `n` for a singleton.
fn max_cyclic_gap(s: &[u64], n: u64) -> u64 {
    let wrap = s[0] + n - s[s.len() - 1];
    s.windows(2).map(|w| w[1] - w[0]).fold(wrap, u64::max)
}

/// All `lambda in Z/NZ` (including 0) such that `lambda A` lies in a cyclic
/// interval of diameter less than `len`, i.e. its largest cyclic gap exceeds
/// `N - len`.
pub fn dilates_into_short_interval(a: &GSet, len: u64) -> Result<Vec<u64>> {
    let n = prime_modulus(a)?;
    if len == 0 || len > n {
        return Err(Error::Domain(format!("length {len} outside [1, {n}]")));
    }
    let members: Vec<u64> = a.mask().iter().map(|i| i as u64).collect();
    if members.is_empty() {
        return Ok((0..n).collect());
    }
    Ok((0..n)
        .into_par_iter()
        .filter(|&lambda| {
            let mut img: Vec<u64> = members.iter().map(|&x| x * lambda % n).collect();
            img.sort_unstable();
            img.dedup();
            max_cyclic_gap(&img, n) > n - len
        })
        .collect())
}
