//! Computational workbench for sets with small doubling.
//!
//! Exact counting of `k`-sets with bounded sumset, Pollard representation
//! counts, Freiman dimension, a certified Fourier regularity engine, dissociated
//! subsets, graph cluster decompositions, grid isoperimetry, random Cayley
//! sum graph clique statistics and the distribution of sums missed by a
//! random set of naturals.

pub mod ambient;
pub mod arith;
pub mod bitset;
pub mod cayley;
pub mod dissociation;
pub mod enumerate;
pub mod error;
pub mod freiman;
pub mod linalg;
pub mod missing;
pub mod regularity;
pub mod rng;
pub mod structure;
pub mod sumset;

pub use ambient::{Ambient, GSet};
pub use arith::ExactRational;
pub use error::{Error, Result};
pub use rng::SeededSource;

/// Version tag written into every serialized record.
pub const SCHEMA_VERSION: u32 = 1;

pub(crate) fn serde_rational<S: serde::Serializer>(
    r: &ExactRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub(crate) fn serde_opt_rational<S: serde::Serializer>(
    r: &Option<ExactRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

pub(crate) fn serde_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}
