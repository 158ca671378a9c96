//! Certified Fourier regularity: balanced transforms, pair tests, the
//! counting-term identity, Dirichlet approximation and the energy-increment
//! decomposition of subsets of `Z/pZ`.

pub mod counting;
pub mod decompose;
pub mod dirichlet;
pub mod fourier;

pub use counting::{counting_lemma_check, counting_terms, CountingCheck, CountingTerms};
pub use decompose::{energy, regularity_decompose, DecomposeOptions, RegularityDecomposition};
pub use dirichlet::{dirichlet_approx, dirichlet_scan, Phase};
pub use fourier::{balanced_ft, regular_pair_test, RegularityVerdict, Verdict};
