//! Integer and rational arithmetic: primes, inverses, binomials and exact
//! rational helpers.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number; arithmetic never rounds.
pub type ExactRational = BigRational;

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin; the witness set below is exact for all
/// 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> Result<u64> {
    // The largest 64-bit prime is 2^64 - 59.
    if n >= u64::MAX - 58 {
        return Err(Error::Range(format!("no 64-bit prime exceeds {n}")));
    }
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    Ok(c)
}

/// Smallest prime `>= n`.
pub fn prime_at_least(n: u64) -> Result<u64> {
    if n <= 2 {
        return Ok(2);
    }
    next_prime(n - 1)
}

/// Multiplicative inverse of `a` modulo the prime `p`, in `[1, p)`.
pub fn mod_inverse(a: i64, p: u64) -> Result<u64> {
    if p < 2 {
        return Err(Error::Domain(format!("modulus {p} is not prime")));
    }
    let r = (a as i128).rem_euclid(p as i128) as u64;
    if r == 0 {
        return Err(Error::Domain(format!("{a} is not invertible modulo {p}")));
    }
    if !is_prime(p) {
        return Err(Error::Contract(format!("modulus {p} is not prime")));
    }
    let (mut old_r, mut cur_r) = (r as i128, p as i128);
    let (mut old_s, mut cur_s) = (1i128, 0i128);
    while cur_r != 0 {
        let q = old_r / cur_r;
        (old_r, cur_r) = (cur_r, old_r - q * cur_r);
        (old_s, cur_s) = (cur_s, old_s - q * cur_s);
    }
    Ok(old_s.rem_euclid(p as i128) as u64)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn binomial_u64(n: u64, k: u64) -> Option<u64> {
    binomial(n, k).to_u64()
}

pub fn rat(n: i64, d: i64) -> ExactRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> ExactRational {
    BigRational::from_integer(n.into())
}

pub fn floor_rat(x: &ExactRational) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil_rat(x: &ExactRational) -> BigInt {
    x.ceil().to_integer()
}

/// Parses `"3"`, `"-0.25"`, `"7/16"` or `"1e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<ExactRational> {
    let s = s.trim();
    let bad = || Error::Domain(format!("cannot parse {s:?} as a rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// `ceil(2^x)` for a nonnegative rational exponent, computed exactly.
pub fn ceil_pow2(x: &ExactRational) -> Result<BigUint> {
    if x.is_negative() {
        return Err(Error::Domain("negative exponent".into()));
    }
    let a = x.numer().to_biguint().unwrap();
    let b = x.denom().to_u32().ok_or_else(|| Error::Range("exponent denominator too large".into()))?;
    if b == 1 {
        let e = a.to_u64().ok_or_else(|| Error::Range("exponent too large".into()))?;
        return Ok(BigUint::one() << e);
    }
    // Smallest c with c^b >= 2^a.
    let target = BigUint::one() << a.to_u64().ok_or_else(|| Error::Range("exponent too large".into()))?;
    let est = x.to_f64().unwrap_or(0.0).exp2().floor();
    let mut c = if est.is_finite() && est < 1e15 {
        BigUint::from(est.max(1.0) as u64)
    } else {
        target.nth_root(b)
    };
    while c.pow(b) < target {
        c += 1u32;
    }
    while c > BigUint::one() && (&c - 1u32).pow(b) >= target {
        c -= 1u32;
    }
    Ok(c)
}

pub fn rational_to_f64(x: &ExactRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sieve(limit: usize) -> Vec<bool> {
        let mut is = vec![true; limit + 1];
        is[0] = false;
        is[1] = false;
        let mut i = 2;
        while i * i <= limit {
            if is[i] {
                let mut j = i * i;
                while j <= limit {
                    is[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        is
    }

    #[test]
    fn next_prime_examples() {
        assert_eq!(next_prime(10).unwrap(), 11);
        assert_eq!(next_prime(1).unwrap(), 2);
        assert_eq!(next_prime(0).unwrap(), 2);
        // sieve oracle up to 10^6 + 100
        let s = sieve(1_000_100);
        let want = (1_000_001..=1_000_100).find(|&i| s[i]).unwrap() as u64;
        assert_eq!(want, 1_000_003);
        assert_eq!(next_prime(1_000_000).unwrap(), want);
        assert!(next_prime(u64::MAX - 10).is_err());
    }

    #[test]
    fn primality_agrees_with_sieve() {
        let s = sieve(200_000);
        for (n, &p) in s.iter().enumerate() {
            assert_eq!(is_prime(n as u64), p, "n = {n}");
        }
        // strong pseudoprimes to several small bases
        for n in [3_215_031_751u64, 2_152_302_898_747, 3_474_749_660_383, 341_550_071_728_321] {
            assert!(!is_prime(n));
        }
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        assert_eq!(mod_inverse(1, 101).unwrap(), 1);
        let scan = (1..13).find(|b| (10 * b) % 13 == 1).unwrap();
        assert_eq!(scan, 4);
        assert_eq!(mod_inverse(10, 13).unwrap(), 4);
        assert_eq!(mod_inverse(-1, 7).unwrap(), 6);
        assert!(matches!(mod_inverse(14, 7), Err(Error::Domain(_))));
        assert!(matches!(mod_inverse(3, 8), Err(Error::Contract(_))));
    }

    #[test]
    fn parse_and_pow() {
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7/16").unwrap(), rat(7, 16));
        assert_eq!(parse_rational("2e-1").unwrap(), rat(1, 5));
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert!(parse_rational("x").is_err());
        assert_eq!(ceil_pow2(&rat(1, 1)).unwrap(), BigUint::from(2u32));
        assert_eq!(ceil_pow2(&rat(5, 1)).unwrap(), BigUint::from(32u32));
        // 2^(1/2) = 1.414.. -> 2 ; 2^(3/2) = 2.83 -> 3
        assert_eq!(ceil_pow2(&rat(1, 2)).unwrap(), BigUint::from(2u32));
        assert_eq!(ceil_pow2(&rat(3, 2)).unwrap(), BigUint::from(3u32));
        assert_eq!(ceil_pow2(&rat(0, 1)).unwrap(), BigUint::from(1u32));
    }

    proptest! {
        #[test]
        fn inverse_round_trip(idx in 0usize..40, a in 1u64..1_000_000) {
            let p = [2u64, 3, 5, 7, 11, 13, 101, 10007, 65537, 1_000_003][idx % 10];
            let a = a % p;
            prop_assume!(a != 0);
            let b = mod_inverse(a as i64, p).unwrap();
            prop_assert_eq!((a as u128 * b as u128 % p as u128) as u64, 1);
            prop_assert_eq!(mod_inverse(b as i64, p).unwrap(), a);
        }

        #[test]
        fn next_prime_monotone(m in 0u64..1_000_000, n in 0u64..1_000_000) {
            let (lo, hi) = if m <= n { (m, n) } else { (n, m) };
            prop_assert!(next_prime(lo).unwrap() <= next_prime(hi).unwrap());
        }

        #[test]
        fn rational_field_axioms(v in prop::collection::vec((-50i64..50, 1i64..30), 3)) {
            let a = rat(v[0].0, v[0].1);
            let b = rat(v[1].0, v[1].1);
            let c = rat(v[2].0, v[2].1);
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            if !b.is_zero() {
                prop_assert_eq!((&a / &b) * &b, a.clone());
                prop_assert_eq!(b.recip().recip(), b.clone());
            }
            prop_assert!(a.denom().is_positive());
        }
    }
}
