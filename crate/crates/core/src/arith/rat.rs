//! Arbitrary-precision rationals and the small integer helpers used for
//! denominators and ramification indices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms with positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Denominator as a machine integer. Exponent denominators are bounded by
/// ramification indices, which are tiny in practice.
pub fn den_u64(q: &Rat) -> u64 {
    q.denom().to_u64().expect("denominator exceeds u64")
}

pub fn num_i64(q: &Rat) -> i64 {
    q.numer().to_i64().expect("numerator exceeds i64")
}

pub fn floor_i64(q: &Rat) -> i64 {
    q.floor().to_integer().to_i64().expect("floor exceeds i64")
}

pub fn is_integral(q: &Rat) -> bool {
    q.is_integer()
}

/// Parses `p` or `p/q` with optional sign.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let t = text.trim();
    let bad = || Error::Syntax { pos: 0, msg: format!("not a rational: {t:?}") };
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(Rat::new(n, d))
}

/// Renders as `p/q`, or `p` when integral.
pub fn fmt_rat(q: &Rat) -> String {
    q.to_string()
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    for p in prime_factors(n) {
        result = result / p * (p - 1);
    }
    result
}

/// Distinct prime divisors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Inverse of `a` modulo `m` (`m >= 1`, `gcd(a, m) = 1`).
pub fn inv_mod(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "{a} is not invertible mod {m}");
    t.rem_euclid(m as i128) as u64
}

pub fn is_positive(q: &Rat) -> bool {
    q.is_positive()
}

pub fn one() -> Rat {
    Rat::one()
}
