//! Ambient groups and the universal finite-set representation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// Largest ambient (in elements) backed by a dense mask.
pub const MAX_AMBIENT: u64 = 1 << 24;

/// Where a set lives: an integer interval `[lo, hi]` or the cyclic group `Z/NZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ambient {
    Interval { lo: i64, hi: i64 },
    Cyclic { modulus: u64 },
}

impl Ambient {
    pub fn interval(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!("empty interval [{lo}, {hi}]")));
        }
        let a = Ambient::Interval { lo, hi };
        a.check_width()?;
        Ok(a)
    }

    pub fn cyclic(modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Domain("cyclic modulus must be positive".into()));
        }
        let a = Ambient::Cyclic { modulus };
        a.check_width()?;
        Ok(a)
    }

    fn check_width(&self) -> Result<()> {
        let w = self.size_u128();
        if w > MAX_AMBIENT as u128 {
            return Err(Error::Range(format!(
                "ambient of {w} elements exceeds the dense-mask limit {MAX_AMBIENT}"
            )));
        }
        Ok(())
    }

    fn size_u128(&self) -> u128 {
        match *self {
            Ambient::Interval { lo, hi } => (hi as i128 - lo as i128 + 1) as u128,
            Ambient::Cyclic { modulus } => modulus as u128,
        }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size_u128() as usize
    }

    pub fn is_cyclic(&self) -> bool {
        matches!(self, Ambient::Cyclic { .. })
    }

    pub fn modulus(&self) -> Option<u64> {
        match *self {
            Ambient::Cyclic { modulus } => Some(modulus),
            Ambient::Interval { .. } => None,
        }
    }

    /// Mask index of a value, reducing modulo `N` for cyclic ambients.
    #[inline]
    pub fn index_of(&self, v: i64) -> Option<usize> {
        match *self {
            Ambient::Interval { lo, hi } => (lo..=hi).contains(&v).then(|| (v - lo) as usize),
            Ambient::Cyclic { modulus } => Some((v as i128).rem_euclid(modulus as i128) as usize),
        }
    }

    #[inline]
    pub fn value_at(&self, i: usize) -> i64 {
        match *self {
            Ambient::Interval { lo, .. } => lo + i as i64,
            Ambient::Cyclic { .. } => i as i64,
        }
    }

    /// Ambient of `A + A` for `A` in this ambient.
    pub fn doubled(&self) -> Ambient {
        match *self {
            Ambient::Interval { lo, hi } => Ambient::Interval { lo: 2 * lo, hi: 2 * hi },
            c @ Ambient::Cyclic { .. } => c,
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Ambient::Interval { lo, hi } => write!(f, "[{lo},{hi}]"),
            Ambient::Cyclic { modulus } => write!(f, "Z/{modulus}Z"),
        }
    }
}

/// A finite set of elements of an [`Ambient`], stored as a membership mask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GSet {
    ambient: Ambient,
    mask: BitSet,
}

impl GSet {
    pub fn empty(ambient: Ambient) -> Self {
        GSet {
            ambient,
            mask: BitSet::new(ambient.size()),
        }
    }

    pub fn full(ambient: Ambient) -> Self {
        GSet {
            ambient,
            mask: BitSet::full(ambient.size()),
        }
    }

    /// Builds a set from values; cyclic values are reduced, interval values
    /// outside `[lo, hi]` are rejected.
    pub fn from_values(ambient: Ambient, values: impl IntoIterator<Item = i64>) -> Result<Self> {
        let mut s = GSet::empty(ambient);
        for v in values {
            let i = ambient
                .index_of(v)
                .ok_or_else(|| Error::Contract(format!("{v} lies outside {ambient}")))?;
            s.mask.insert(i);
        }
        Ok(s)
    }

    pub fn from_mask(ambient: Ambient, mask: BitSet) -> Result<Self> {
        if mask.len() != ambient.size() {
            return Err(Error::Contract(format!(
                "mask of width {} does not match {ambient}",
                mask.len()
            )));
        }
        Ok(GSet { ambient, mask })
    }

    /// Shorthand for a subset of `Z/nZ`.
    pub fn cyclic(n: u64, values: impl IntoIterator<Item = i64>) -> Result<Self> {
        GSet::from_values(Ambient::cyclic(n)?, values)
    }

    /// Shorthand for a subset of the interval `[lo, hi]`.
    pub fn interval(lo: i64, hi: i64, values: impl IntoIterator<Item = i64>) -> Result<Self> {
        GSet::from_values(Ambient::interval(lo, hi)?, values)
    }

    #[inline]
    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    #[inline]
    pub fn mask(&self) -> &BitSet {
        &self.mask
    }

    /// Cardinality `k = |A|`.
    #[inline]
    pub fn len(&self) -> usize {
        self.mask.count()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn contains(&self, v: i64) -> bool {
        self.ambient.index_of(v).is_some_and(|i| self.mask.contains(i))
    }

    pub fn values(&self) -> impl Iterator<Item = i64> + '_ {
        self.mask.iter().map(|i| self.ambient.value_at(i))
    }

    pub fn to_vec(&self) -> Vec<i64> {
        self.values().collect()
    }

    pub fn insert(&mut self, v: i64) -> Result<()> {
        let i = self
            .ambient
            .index_of(v)
            .ok_or_else(|| Error::Contract(format!("{v} lies outside {}", self.ambient)))?;
        self.mask.insert(i);
        Ok(())
    }

    pub fn is_subset(&self, other: &GSet) -> bool {
        self.ambient == other.ambient && self.mask.is_subset(&other.mask)
    }

    fn require_cyclic(&self) -> Result<u64> {
        self.ambient
            .modulus()
            .ok_or_else(|| Error::Contract(format!("operation needs a cyclic ambient, got {}", self.ambient)))
    }

    /// `lambda * A + mu` in `Z/NZ`, reduced eagerly.
    pub fn affine_image(&self, lambda: i64, mu: i64) -> Result<GSet> {
        let n = self.require_cyclic()? as i128;
        let lambda = (lambda as i128).rem_euclid(n);
        let mu = (mu as i128).rem_euclid(n);
        let mut out = GSet::empty(self.ambient);
        for i in self.mask.iter() {
            out.mask.insert(((lambda * i as i128 + mu) % n) as usize);
        }
        Ok(out)
    }

    pub fn dilate(&self, lambda: i64) -> Result<GSet> {
        self.affine_image(lambda, 0)
    }

    pub fn translate(&self, mu: i64) -> Result<GSet> {
        self.affine_image(1, mu)
    }
}

impl fmt::Debug for GSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.ambient)?;
        f.debug_set().entries(self.values()).finish()
    }
}

#[derive(Serialize, Deserialize)]
struct GSetRepr {
    ambient: Ambient,
    members: Vec<i64>,
}

impl Serialize for GSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GSetRepr {
            ambient: self.ambient,
            members: self.to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = GSetRepr::deserialize(d)?;
        GSet::from_values(r.ambient, r.members).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_values_are_reduced() {
        let a = GSet::cyclic(7, [8, -1, 3]).unwrap();
        assert_eq!(a.to_vec(), vec![1, 3, 6]);
        assert!(a.contains(13));
    }

    #[test]
    fn interval_rejects_outsiders() {
        assert!(GSet::interval(1, 10, [0]).is_err());
        let a = GSet::interval(-3, 3, [-3, 0, 3]).unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(a.to_vec(), vec![-3, 0, 3]);
    }

    #[test]
    fn width_limit() {
        assert!(Ambient::cyclic(MAX_AMBIENT).is_ok());
        assert!(matches!(Ambient::cyclic(MAX_AMBIENT + 1), Err(Error::Range(_))));
        assert!(Ambient::interval(5, 4).is_err());
        assert!(Ambient::cyclic(0).is_err());
    }

    #[test]
    fn affine_maps() {
        let a = GSet::cyclic(7, [1, 2, 4]).unwrap();
        assert_eq!(a.dilate(-1).unwrap().to_vec(), vec![3, 5, 6]);
        assert_eq!(a.dilate(2).unwrap(), a);
        assert_eq!(a.translate(3).unwrap().to_vec(), vec![0, 4, 5]);
        let b = GSet::interval(0, 3, [1]).unwrap();
        assert!(b.dilate(2).is_err());
    }

    #[test]
    fn equality_includes_ambient() {
        let a = GSet::cyclic(7, [1]).unwrap();
        let b = GSet::cyclic(11, [1]).unwrap();
        assert_ne!(a, b);
    }
}
