//! Least `d <= Q` with `||d theta|| <= 1/Q`, by scan and by continued
//! fractions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{parse_rational, ExactRational};
use crate::error::{Error, Result};

/// A point `num / den` of `R/Z`, reduced, with `0 <= num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Phase {
    pub num: u64,
    pub den: u64,
}

impl Phase {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("phase denominator must be positive".into()));
        }
        let num = num % den;
        let g = num.gcd(&den);
        Ok(Phase {
            num: num / g,
            den: den / g,
        })
    }

    pub fn from_rational(x: &ExactRational) -> Result<Self> {
        let den = x.denom();
        let num = x.numer().mod_floor(den);
        match (num.to_u64(), den.to_u64()) {
            (Some(n), Some(d)) => Phase::new(n, d),
            _ => Err(Error::Range(format!("phase {x} needs a denominator below 2^64"))),
        }
    }

    /// Parses decimals, fractions or exponent forms exactly.
    pub fn parse(s: &str) -> Result<Self> {
        Phase::from_rational(&parse_rational(s)?)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Numerator of `||d theta||` over `den`.
    fn dist_num(self, d: u64) -> u64 {
        let x = (d as u128 * self.num as u128 % self.den as u128) as u64;
        x.min(self.den - x)
    }

    /// `||d theta|| <= 1/q`.
    pub fn within(self, d: u64, q: u64) -> bool {
        (self.dist_num(d) as u128) * (q as u128) <= self.den as u128
    }

    /// `||d theta||` as a float.
    pub fn dist(self, d: u64) -> f64 {
        self.dist_num(d) as f64 / self.den as f64
    }
}

/// Direct scan over `d = 1..=Q`.
pub fn dirichlet_scan(theta: Phase, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::Domain("Q must be at least 1".into()));
    }
    (1..=q)
        .find(|&d| theta.within(d, q))
        .ok_or_else(|| Error::Internal(format!("no d <= {q} approximates {theta:?}")))
}

/// Same answer as [`dirichlet_scan`], found among continued-fraction
/// denominators: the least qualifying `d` improves on every smaller
/// multiplier, so it is a convergent denominator.
pub fn dirichlet_approx(theta: Phase, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::Domain("Q must be at least 1".into()));
    }
    let (mut num, mut den) = (BigInt::from(theta.num), BigInt::from(theta.den));
    let (mut q_prev, mut q_cur) = (0u128, 1u128);
    // a_0 = floor(theta) = 0
    loop {
        if q_cur > q as u128 {
            break;
        }
        if theta.within(q_cur as u64, q) {
            return Ok(q_cur as u64);
        }
        if num.is_zero() {
            break;
        }
        let (a, r) = den.div_rem(&num);
        den = num;
        num = r;
        let a = a.to_u128().unwrap_or(u128::MAX);
        let next = a.saturating_mul(q_cur).saturating_add(q_prev);
        q_prev = q_cur;
        q_cur = next;
    }
    Err(Error::Internal(format!("no convergent up to {q} approximates {theta:?}")))
}
