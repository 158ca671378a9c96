//! Exact rank and null space of integer matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Row echelon form built one row at a time with fraction-free elimination.
/// Each stored row has a distinct leading column and zeros before it.
#[derive(Debug, Clone)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<Vec<BigInt>>,
    /// `lead_row[c]` is the stored row whose leading column is `c`.
    lead_row: Vec<Option<usize>>,
}

fn leading(v: &[BigInt]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

fn normalize(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
    if let Some(l) = leading(v) {
        if v[l].is_negative() {
            for x in v.iter_mut() {
                *x = -&*x;
            }
        }
    }
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: Vec::new(),
            lead_row: vec![None; ncols],
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a row; returns whether the rank grew.
    pub fn insert(&mut self, mut v: Vec<BigInt>) -> bool {
        assert_eq!(v.len(), self.ncols, "row length mismatch");
        while let Some(l) = leading(&v) {
            let Some(ri) = self.lead_row[l] else {
                normalize(&mut v);
                self.lead_row[l] = Some(self.rows.len());
                self.rows.push(v);
                return true;
            };
            let r = &self.rows[ri];
            let (a, b) = (r[l].clone(), v[l].clone());
            for (x, y) in v.iter_mut().zip(r).skip(l) {
                *x = &a * &*x - &b * y;
            }
            normalize(&mut v);
        }
        false
    }

    pub fn insert_i64(&mut self, v: &[i64]) -> bool {
        self.insert(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Basis of `{x : M x = 0}`, one vector per free column, with that free
    /// coordinate equal to 1 and the other free coordinates 0.
    pub fn kernel_basis(&self) -> Vec<Vec<BigRational>> {
        let n = self.ncols;
        // Reduced row echelon form over Q, rows sorted by leading column.
        let mut order: Vec<usize> = (0..n).filter_map(|c| self.lead_row[c]).collect();
        order.sort_by_key(|&i| leading(&self.rows[i]));
        let mut rref: Vec<(usize, Vec<BigRational>)> = order
            .iter()
            .map(|&i| {
                let row = &self.rows[i];
                let l = leading(row).expect("stored rows are nonzero");
                let p = row[l].clone();
                let r = row.iter().map(|x| BigRational::new(x.clone(), p.clone())).collect();
                (l, r)
            })
            .collect();
        for i in (0..rref.len()).rev() {
            let (li, ri) = rref[i].clone();
            for (_, rj) in rref.iter_mut().take(i) {
                let f = rj[li].clone();
                if f.is_zero() {
                    continue;
                }
                for (x, y) in rj.iter_mut().zip(&ri).skip(li) {
                    *x -= &f * y;
                }
            }
        }
        let is_pivot: Vec<bool> = (0..n).map(|c| self.lead_row[c].is_some()).collect();
        (0..n)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![BigRational::zero(); n];
                v[free] = BigRational::one();
                for (l, r) in &rref {
                    v[*l] = -r[free].clone();
                }
                v
            })
            .collect()
    }

    /// Columns without a pivot, in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.lead_row[c].is_none()).collect()
    }
}

/// Exact rank of an integer matrix given by rows.
pub fn rank(rows: &[Vec<i64>], ncols: usize) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert_i64(r);
    }
    e.rank()
}
