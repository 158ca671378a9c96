//! Cayley sum graphs of `Z/NZ`, exact clique numbers and random-graph
//! clique statistics.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::{Ambient, GSet};
use crate::bitset::BitSet;
use crate::enumerate::{count_small_sumset, CountQuery};
use crate::error::{Error, Result};
use crate::rng::{random_half_subset, SeededSource};
use crate::structure::SimpleGraph;
use crate::sumset::sumset_size;
use crate::ExactRational;

/// Largest graph order accepted by the clique solver.
pub const MAX_CLIQUE_ORDER: usize = 4096;
/// Default cap on branch-and-bound nodes.
pub const DEFAULT_NODE_LIMIT: u64 = 2_000_000_000;

/// `G_A` on `Z/NZ`: `x ~ y` iff `x != y` and `x + y ∈ A`.
#[derive(Debug, Clone)]
pub struct CayleyGraph {
    pub modulus: u64,
    pub generators: GSet,
    pub graph: SimpleGraph,
}

pub fn build_cayley(a: &GSet) -> Result<CayleyGraph> {
    let modulus = a
        .ambient()
        .modulus()
        .ok_or_else(|| Error::Contract("Cayley sum graphs need a cyclic ambient".into()))?;
    let n = modulus as usize;
    let rows = (0..n)
        .map(|x| {
            let mut row = BitSet::new(n);
            row.or_rotated(a.mask(), n - x);
            row.remove(x);
            row
        })
        .collect();
    Ok(CayleyGraph {
        modulus,
        generators: a.clone(),
        graph: SimpleGraph::from_rows(rows)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliqueResult {
    pub omega: usize,
    pub witness: Vec<usize>,
    pub nodes: u64,
}

struct Solver {
    adj: Vec<Vec<u64>>,
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    limit: u64,
    aborted: bool,
}

fn first_bit(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

impl Solver {
    /// Greedy sequential colouring of `p`; returns vertices with colour at
    /// least `kmin`, in nondecreasing colour order.
    fn colour(&self, p: &[u64], kmin: usize) -> Vec<(usize, usize)> {
        let mut uncoloured = p.to_vec();
        let mut out = Vec::new();
        let mut colour = 0;
        while uncoloured.iter().any(|&w| w != 0) {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = first_bit(&q) {
                q[v / 64] &= !(1u64 << (v % 64));
                uncoloured[v / 64] &= !(1u64 << (v % 64));
                for (qw, aw) in q.iter_mut().zip(&self.adj[v]) {
                    *qw &= !aw;
                }
                if colour >= kmin {
                    out.push((v, colour));
                }
            }
        }
        out
    }

    fn expand(&mut self, mut p: Vec<u64>) {
        self.nodes += 1;
        if self.nodes > self.limit {
            self.aborted = true;
            return;
        }
        let kmin = (self.best.len() + 1).saturating_sub(self.current.len()).max(1);
        let order = self.colour(&p, kmin);
        for &(v, c) in order.iter().rev() {
            if self.aborted || self.current.len() + c <= self.best.len() {
                return;
            }
            self.current.push(v);
            let np: Vec<u64> = p.iter().zip(&self.adj[v]).map(|(a, b)| a & b).collect();
            if np.iter().all(|&w| w == 0) {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(np);
            }
            self.current.pop();
            p[v / 64] &= !(1u64 << (v % 64));
        }
    }
}

/// Exact clique number by colouring-bounded branch and bound.
pub fn clique_number(g: &SimpleGraph) -> Result<CliqueResult> {
    clique_number_with_limit(g, DEFAULT_NODE_LIMIT)
}

pub fn clique_number_with_limit(g: &SimpleGraph, limit: u64) -> Result<CliqueResult> {
    let n = g.n();
    if n > MAX_CLIQUE_ORDER {
        return Err(Error::budget(
            format!("clique search on {n} vertices"),
            n as f64,
            MAX_CLIQUE_ORDER as f64,
        ));
    }
    if n == 0 {
        return Ok(CliqueResult { omega: 0, witness: Vec::new(), nodes: 0 });
    }
    // Relabel by nonincreasing degree so colouring sees dense vertices first.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let words = n.div_ceil(64);
    let adj = order
        .iter()
        .map(|&v| {
            let mut row = vec![0u64; words];
            for u in g.neighbors(v).iter() {
                row[pos[u] / 64] |= 1u64 << (pos[u] % 64);
            }
            row
        })
        .collect();
    let mut s = Solver {
        adj,
        best: vec![0],
        current: Vec::new(),
        nodes: 0,
        limit,
        aborted: false,
    };
    let mut all = vec![u64::MAX; words];
    if n % 64 != 0 {
        all[words - 1] = (1u64 << (n % 64)) - 1;
    }
    s.expand(all);
    let mut witness: Vec<usize> = s.best.iter().map(|&i| order[i]).collect();
    witness.sort_unstable();
    if s.aborted {
        return Err(Error::Budget {
            what: format!("clique search on {n} vertices"),
            projected: s.nodes as f64,
            limit: limit as f64,
            best_lower_bound: Some(witness.len() as u64),
        });
    }
    for (i, &u) in witness.iter().enumerate() {
        if witness[i + 1..].iter().any(|&v| !g.has_edge(u, v)) {
            return Err(Error::Internal("clique witness is not a clique".into()));
        }
    }
    Ok(CliqueResult {
        omega: witness.len(),
        witness,
        nodes: s.nodes,
    })
}

/// `E[#k-cliques of G_A]` for uniform random `A ⊆ Z/NZ`, computed directly
/// over all `k`-subsets and via the restricted-sumset size breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectedCliques {
    pub n: u64,
    pub k: usize,
    #[serde(serialize_with = "crate::serde_rational")]
    pub direct: ExactRational,
    #[serde(serialize_with = "crate::serde_rational")]
    pub via_breakdown: ExactRational,
    pub equal: bool,
}

fn inv_pow2(m: usize) -> ExactRational {
    ExactRational::new(BigInt::one(), BigInt::one() << m)
}

fn for_each_k_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn expected_clique_count(n: u64, k: usize) -> Result<ExpectedCliques> {
    let ambient = Ambient::cyclic(n)?;
    let mut direct = ExactRational::zero();
    let mut err = None;
    for_each_k_subset(n as usize, k, |c| {
        match GSet::from_values(ambient, c.iter().map(|&v| v as i64)) {
            Ok(set) => direct += inv_pow2(sumset_size(&set, true)),
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let counts = count_small_sumset(&CountQuery::new(ambient, k, None, true))?;
    let mut via_breakdown = ExactRational::zero();
    for (&m, &c) in &counts.per_m_breakdown {
        via_breakdown += inv_pow2(m) * ExactRational::from_integer(BigInt::from(c));
    }
    Ok(ExpectedCliques {
        n,
        k,
        equal: direct == via_breakdown,
        direct,
        via_breakdown,
    })
}

/// Monte-Carlo estimate of the mean number of `k`-cliques of `G_A`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledMean {
    pub samples: u64,
    pub mean: f64,
    pub std_err: f64,
}

pub fn sampled_clique_count(n: u64, k: usize, samples: u64, seed: u64) -> Result<SampledMean> {
    let ambient = Ambient::cyclic(n)?;
    let mut subsets: Vec<GSet> = Vec::new();
    let mut err = None;
    for_each_k_subset(n as usize, k, |c| {
        match GSet::from_values(ambient, c.iter().map(|&v| v as i64)) {
            Ok(set) => subsets.push(crate::sumset::sumset(&set, true)),
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let counts: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let a = random_half_subset(ambient, &mut SeededSource::new(seed, i).rng());
            subsets.iter().filter(|s| s.is_subset(&a)).count() as f64
        })
        .collect();
    let s = samples.max(1) as f64;
    let mean = counts.iter().sum::<f64>() / s;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (s - 1.0).max(1.0);
    Ok(SampledMean {
        samples,
        mean,
        std_err: (var / s).sqrt(),
    })
}

/// One random Cayley sum graph of the clique experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliqueRow {
    pub n: u64,
    pub seed: u64,
    pub stream: u64,
    pub size_a: usize,
    pub omega: usize,
    pub threshold: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliqueStats {
    pub n: u64,
    pub samples: u64,
    pub epsilon: f64,
    pub threshold: f64,
    pub violations: u64,
    pub violation_fraction: f64,
    pub mean_omega: f64,
    pub max_omega: usize,
    pub two_log2_n: f64,
    #[serde(skip)]
    pub rows: Vec<CliqueRow>,
}

/// Clique numbers of `samples` random `G_A`, `A` uniform, sample `i`
/// drawn from stream `(seed, i)`; violations are `omega > (2 + eps) log2 N`.
pub fn clique_experiment(n: u64, samples: u64, eps: f64, seed: u64) -> Result<CliqueStats> {
    let ambient = Ambient::cyclic(n)?;
    let threshold = (2.0 + eps) * (n as f64).log2();
    let rows: Vec<CliqueRow> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let a = random_half_subset(ambient, &mut SeededSource::new(seed, i).rng());
            let g = build_cayley(&a)?;
            let omega = clique_number(&g.graph)?.omega;
            Ok(CliqueRow {
                n,
                seed,
                stream: i,
                size_a: a.len(),
                omega,
                threshold,
                violated: omega as f64 > threshold,
            })
        })
        .collect::<Result<_>>()?;
    let violations = rows.iter().filter(|r| r.violated).count() as u64;
    let s = samples.max(1) as f64;
    Ok(CliqueStats {
        n,
        samples,
        epsilon: eps,
        threshold,
        violations,
        violation_fraction: violations as f64 / s,
        mean_omega: rows.iter().map(|r| r.omega as f64).sum::<f64>() / s,
        max_omega: rows.iter().map(|r| r.omega).max().unwrap_or(0),
        two_log2_n: 2.0 * (n as f64).log2(),
        rows,
    })
}

/// `C(N, k) 2^{-C(k, 2)}`, the expected number of `k`-cliques in `G(N, 1/2)`.
pub fn first_moment_bound(n: u64, k: u64) -> ExactRational {
    let c = crate::arith::binomial(n, k);
    let pairs = k * k.saturating_sub(1) / 2;
    ExactRational::new(BigInt::from(c), BigInt::from(BigUint::one() << pairs))
}
