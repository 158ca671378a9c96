//! Graph cluster decompositions and vertex isoperimetry in the grid
//! `Z_{>=0}^d`.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use rand::RngCore;
use serde::Serialize;

use crate::arith::{binomial_u64, rat_int};
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::rng::unit_f64;
use crate::ExactRational;

/// Sentinel distance for unreachable vertices.
pub const UNREACHABLE: u32 = u32::MAX;

/// Undirected loop-free graph on `0..n` with bitset adjacency rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    rows: Vec<BitSet>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        SimpleGraph {
            rows: vec![BitSet::new(n); n],
        }
    }

    pub fn from_rows(rows: Vec<BitSet>) -> Result<Self> {
        let n = rows.len();
        for (u, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::Contract(format!("row {u} has width {}", r.len())));
            }
            if r.contains(u) {
                return Err(Error::Contract(format!("loop at vertex {u}")));
            }
            if let Some(v) = r.iter().find(|&v| !rows[v].contains(u)) {
                return Err(Error::Contract(format!("edge {u}-{v} is not symmetric")));
            }
        }
        Ok(SimpleGraph { rows })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.n();
        if u >= n || v >= n {
            return Err(Error::Contract(format!("edge {u}-{v} outside 0..{n}")));
        }
        if u == v {
            return Err(Error::Contract(format!("loop at vertex {u}")));
        }
        self.rows[u].insert(v);
        self.rows[v].insert(u);
        Ok(())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn neighbors(&self, u: usize) -> &BitSet {
        &self.rows[u]
    }

    pub fn rows(&self) -> &[BitSet] {
        &self.rows
    }

    pub fn degree(&self, u: usize) -> usize {
        self.rows[u].count()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(BitSet::count).sum::<usize>() / 2
    }

    /// Erdős–Rényi `G(n, p)`; pairs `u < v` are visited in lexicographic order.
    pub fn gnp<R: RngCore>(n: usize, p: f64, rng: &mut R) -> Self {
        let mut g = SimpleGraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if unit_f64(rng) < p {
                    g.rows[u].insert(v);
                    g.rows[v].insert(u);
                }
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = SimpleGraph::new(n);
        for u in 1..n {
            g.rows[u - 1].insert(u);
            g.rows[u].insert(u - 1);
        }
        g
    }

    /// Breadth-first distances from `src` inside the subgraph induced by `within`.
    pub fn bfs_within(&self, within: &BitSet, src: usize) -> Vec<u32> {
        let n = self.n();
        let mut dist = vec![UNREACHABLE; n];
        if !within.contains(src) {
            return dist;
        }
        dist[src] = 0;
        let mut frontier = vec![src];
        let mut level = 0;
        while !frontier.is_empty() {
            level += 1;
            let mut next = Vec::new();
            for &u in &frontier {
                for v in self.rows[u].iter() {
                    if dist[v] == UNREACHABLE && within.contains(v) {
                        dist[v] = level;
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        dist
    }

    /// Connected components of the induced subgraph, each sorted, ordered by
    /// least vertex.
    pub fn components_within(&self, within: &BitSet) -> Vec<Vec<usize>> {
        let mut seen = BitSet::new(self.n());
        let mut out = Vec::new();
        for s in within.iter() {
            if seen.contains(s) {
                continue;
            }
            let dist = self.bfs_within(within, s);
            let comp: Vec<usize> = (0..self.n()).filter(|&v| dist[v] != UNREACHABLE).collect();
            for &v in &comp {
                seen.insert(v);
            }
            out.push(comp);
        }
        out
    }
}

/// Blocks `A_1..A_l`, leftover `A_*`, centres and radii of a cluster
/// decomposition, with the observed quantities used by the checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterPartition {
    pub d: f64,
    pub set_size: usize,
    pub blocks: Vec<Vec<usize>>,
    pub leftover: Vec<usize>,
    pub centers: Vec<usize>,
    pub radii: Vec<u32>,
    pub components: usize,
    /// Components with no integer radius in `(D/4, D/2]`, sent wholesale to the leftover.
    pub radius_free_components: usize,
    pub block_diameters: Vec<u32>,
    pub max_block_diameter: u32,
    pub leftover_bound: f64,
}

/// Integer radii in `(D/4, D/2]`.
pub fn radius_range(d: f64) -> std::ops::RangeInclusive<u32> {
    let lo = (d / 4.0).floor() as u32 + 1;
    let hi = (d / 2.0).floor() as u32;
    lo..=hi
}

/// Splits `a` into blocks of small diameter with no edges between them,
/// leaving out few vertices. Distances are measured in `G[a]`.
pub fn cluster_decompose(g: &SimpleGraph, a: &BitSet, d: f64) -> Result<ClusterPartition> {
    if !(d > 1.0) || !d.is_finite() {
        return Err(Error::Domain(format!("cluster scale D = {d} must exceed 1")));
    }
    if a.len() != g.n() {
        return Err(Error::Contract("vertex set width differs from graph order".into()));
    }
    let radii_range = radius_range(d);
    let mut part = ClusterPartition {
        d,
        set_size: a.count(),
        blocks: Vec::new(),
        leftover: Vec::new(),
        centers: Vec::new(),
        radii: Vec::new(),
        components: 0,
        radius_free_components: 0,
        block_diameters: Vec::new(),
        max_block_diameter: 0,
        leftover_bound: 32.0 * (a.count() as f64 / d).powi(2),
    };
    for comp in g.components_within(a) {
        part.components += 1;
        if radii_range.is_empty() {
            part.radius_free_components += 1;
            part.leftover.extend(&comp);
            continue;
        }
        let mut centers: Vec<(usize, Vec<u32>)> = Vec::new();
        for &v in &comp {
            let far = centers
                .iter()
                .all(|(_, dist)| dist[v] as f64 >= d / 4.0);
            if far {
                centers.push((v, g.bfs_within(a, v)));
            }
        }
        let mut claimed = BitSet::new(g.n());
        let mut taken = BitSet::new(g.n());
        for (x, dist) in &centers {
            let mut best: Option<(usize, u32)> = None;
            for r in radii_range.clone() {
                let sphere = comp.iter().filter(|&&v| dist[v] == r).count();
                if best.is_none_or(|(s, _)| sphere < s) {
                    best = Some((sphere, r));
                }
            }
            let r = best.expect("nonempty radius range").1;
            let block: Vec<usize> = comp
                .iter()
                .copied()
                .filter(|&v| dist[v] < r && !claimed.contains(v))
                .collect();
            for &v in &block {
                taken.insert(v);
            }
            for &v in comp.iter().filter(|&&v| dist[v] <= r) {
                claimed.insert(v);
            }
            part.centers.push(*x);
            part.radii.push(r);
            part.blocks.push(block);
        }
        part.leftover
            .extend(comp.iter().copied().filter(|&v| !taken.contains(v)));
    }
    part.leftover.sort_unstable();
    verify_partition(g, a, &mut part)?;
    Ok(part)
}

fn verify_partition(g: &SimpleGraph, a: &BitSet, part: &mut ClusterPartition) -> Result<()> {
    let n = g.n();
    let mut owner = vec![usize::MAX; n];
    for (j, b) in part.blocks.iter().enumerate() {
        for &v in b {
            owner[v] = j;
        }
    }
    let covered = part.blocks.iter().map(Vec::len).sum::<usize>() + part.leftover.len();
    if covered != part.set_size {
        return Err(Error::Internal(format!(
            "blocks and leftover cover {covered} of {} vertices",
            part.set_size
        )));
    }
    for (j, b) in part.blocks.iter().enumerate() {
        for &u in b {
            if let Some(v) = g.neighbors(u).iter().find(|&v| owner[v] != usize::MAX && owner[v] != j) {
                return Err(Error::Internal(format!("edge {u}-{v} joins two blocks")));
            }
        }
    }
    part.block_diameters.clear();
    for b in &part.blocks {
        let mut diam = 0;
        for &u in b {
            let dist = g.bfs_within(a, u);
            for &v in b {
                diam = diam.max(dist[v]);
            }
        }
        if diam as f64 > part.d {
            return Err(Error::Internal(format!("block diameter {diam} exceeds D = {}", part.d)));
        }
        part.block_diameters.push(diam);
    }
    part.max_block_diameter = part.block_diameters.iter().copied().max().unwrap_or(0);
    if part.leftover.len() as f64 > part.leftover_bound {
        return Err(Error::Internal(format!(
            "leftover {} exceeds 32(|A|/D)^2 = {}",
            part.leftover.len(),
            part.leftover_bound
        )));
    }
    Ok(())
}

/// A point of `Z_{>=0}^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticePoint(pub Vec<u32>);

impl LatticePoint {
    pub fn zero(d: usize) -> Self {
        LatticePoint(vec![0; d])
    }

    pub fn unit(d: usize, i: usize) -> Self {
        let mut p = LatticePoint::zero(d);
        p.0[i] = 1;
        p
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }
}

/// Degree first; among equal degrees the point whose first differing
/// coordinate is larger comes first.
pub fn simplicial_compare(x: &LatticePoint, y: &LatticePoint) -> Result<Ordering> {
    if x.dim() != y.dim() {
        return Err(Error::Contract(format!(
            "dimensions {} and {} differ",
            x.dim(),
            y.dim()
        )));
    }
    Ok(x.degree()
        .cmp(&y.degree())
        .then_with(|| y.0.cmp(&x.0)))
}

/// The first `size` points of `Z_{>=0}^d` in simplicial order.
pub fn initial_segment(d: usize, size: usize) -> Vec<LatticePoint> {
    fn fill(d: usize, pos: usize, rem: u32, cur: &mut Vec<u32>, out: &mut Vec<LatticePoint>, cap: usize) {
        if out.len() >= cap {
            return;
        }
        if pos + 1 == d {
            cur.push(rem);
            out.push(LatticePoint(cur.clone()));
            cur.pop();
            return;
        }
        for c in (0..=rem).rev() {
            cur.push(c);
            fill(d, pos + 1, rem - c, cur, out, cap);
            cur.pop();
            if out.len() >= cap {
                return;
            }
        }
    }
    let mut out = Vec::with_capacity(size);
    if d == 0 {
        if size > 0 {
            out.push(LatticePoint(Vec::new()));
        }
        return out;
    }
    let mut degree = 0;
    while out.len() < size {
        fill(d, 0, degree, &mut Vec::with_capacity(d), &mut out, size);
        degree += 1;
    }
    out
}

/// All points of degree at most `radius`.
pub fn degree_ball(d: usize, radius: u32) -> Vec<LatticePoint> {
    let size = binomial_u64(d as u64 + radius as u64, d as u64).expect("ball size fits u64");
    initial_segment(d, size as usize)
}

/// `|S + {e_1, ..., e_d}|`.
pub fn grid_expansion(s: &[LatticePoint], d: usize) -> usize {
    let mut seen: HashSet<LatticePoint> = HashSet::with_capacity(s.len() * d);
    for p in s {
        for i in 0..d {
            let mut q = p.clone();
            q.0[i] += 1;
            seen.insert(q);
        }
    }
    seen.len()
}

/// Oriented vertex boundary `|(S + {e_1, ..., e_d}) \ S|`.
pub fn oriented_boundary(s: &[LatticePoint], d: usize) -> usize {
    let own: HashSet<&LatticePoint> = s.iter().collect();
    let mut seen: HashSet<LatticePoint> = HashSet::with_capacity(s.len() * d);
    for p in s {
        for i in 0..d {
            let mut q = p.clone();
            q.0[i] += 1;
            if !own.contains(&q) {
                seen.insert(q);
            }
        }
    }
    seen.len()
}

/// Expansion of an initial simplicial segment against `(1/2 - eps) d |S|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsoperimetryRecord {
    pub d: usize,
    pub size: usize,
    pub expansion: usize,
    #[serde(serialize_with = "crate::serde_rational")]
    pub epsilon: ExactRational,
    #[serde(serialize_with = "crate::serde_rational")]
    pub bound: ExactRational,
    pub holds: bool,
}

pub fn isoperimetry_check(d: usize, size: usize, eps: &ExactRational) -> IsoperimetryRecord {
    let s = initial_segment(d, size);
    let expansion = grid_expansion(&s, d);
    let half = ExactRational::new(BigInt::from(1), BigInt::from(2));
    let bound = (half - eps) * rat_int(d as i64) * rat_int(size as i64);
    IsoperimetryRecord {
        d,
        size,
        expansion,
        epsilon: eps.clone(),
        holds: rat_int(expansion as i64) >= bound,
        bound,
    }
}
