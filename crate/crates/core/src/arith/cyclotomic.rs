//! Exact arithmetic in cyclotomic fields.
//!
//! A [`CycNum`] is stored in the power basis of `Q(ζ_N)` reduced modulo the
//! cyclotomic polynomial `Φ_N`, with `N` shrunk to the smallest conductor
//! whose field contains the value. Two values are equal exactly when their
//! stored forms are equal.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Signed, Zero};

use super::rat::{euler_phi, gcd_u64, int, inv_mod, lcm_u64, prime_factors, Rat};
use crate::error::{Error, Result};

static PHI_TABLE: OnceLock<RwLock<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();

/// Coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_poly(n: u64) -> Arc<Vec<i64>> {
    assert!(n >= 1);
    let table = PHI_TABLE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = table.read().unwrap().get(&n) {
        return p.clone();
    }
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        num = div_monic(&num, &cyclotomic_poly(d));
    }
    let p = Arc::new(num);
    table.write().unwrap().insert(n, p.clone());
    p
}

fn div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (t, &d) in den.iter().enumerate() {
                rem[i + t] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

/// Reduces a dense polynomial in `ζ_m` (any length) to the power basis of
/// `Q(ζ_m)`, i.e. modulo `x^m - 1` and then `Φ_m`.
fn reduce(m: u64, dense: Vec<Rat>) -> Vec<Rat> {
    let m_us = m as usize;
    let mut folded = vec![Rat::zero(); m_us];
    for (e, c) in dense.into_iter().enumerate() {
        if !c.is_zero() {
            folded[e % m_us] += c;
        }
    }
    let phi = cyclotomic_poly(m);
    let d = phi.len() - 1;
    for i in (d..m_us).rev() {
        let c = std::mem::take(&mut folded[i]);
        if c.is_zero() {
            continue;
        }
        for (t, &p) in phi.iter().enumerate().take(d) {
            if p != 0 {
                folded[i - d + t] -= &c * int(p);
            }
        }
    }
    folded.truncate(d);
    folded
}

/// Tries to express a reduced element of `Q(ζ_n)` in `Q(ζ_{n/p})`.
fn descend_once(n: u64, p: u64, v: &[Rat]) -> Option<Vec<Rat>> {
    let m = n / p;
    let m_us = m as usize;
    let mut parts = vec![vec![Rat::zero(); m_us]; p as usize];
    if m.is_multiple_of(p) {
        // ζ_n^e = ζ_n^j · ζ_m^a with e = p·a + j.
        for (e, c) in v.iter().enumerate() {
            if !c.is_zero() {
                let e = e as u64;
                parts[(e % p) as usize][((e / p) % m) as usize] += c;
            }
        }
        let parts: Vec<Vec<Rat>> = parts.into_iter().map(|d| reduce(m, d)).collect();
        if parts[1..].iter().all(|c| c.iter().all(Zero::is_zero)) {
            return Some(parts.into_iter().next().unwrap());
        }
        None
    } else {
        // ζ_n = ζ_p^a0 · ζ_m^b0 and {ζ_p^j : 1 ≤ j < p} is a basis over Q(ζ_m).
        let a0 = inv_mod(m % p, p);
        let b0 = inv_mod(p % m.max(1), m);
        for (e, c) in v.iter().enumerate() {
            if !c.is_zero() {
                let e = e as u64;
                parts[((e * a0) % p) as usize][((e * b0) % m) as usize] += c;
            }
        }
        let parts: Vec<Vec<Rat>> = parts.into_iter().map(|d| reduce(m, d)).collect();
        if parts[2..].iter().any(|c| c != &parts[1]) {
            return None;
        }
        Some(parts[0].iter().zip(&parts[1]).map(|(a, b)| a - b).collect())
    }
}

/// An exact element of a cyclotomic field.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CycNum {
    conductor: u64,
    coeffs: Vec<Rat>,
}

impl CycNum {
    fn canonical(mut n: u64, mut v: Vec<Rat>) -> CycNum {
        'outer: loop {
            if n == 1 {
                break;
            }
            for p in prime_factors(n) {
                if let Some(w) = descend_once(n, p, &v) {
                    n /= p;
                    v = w;
                    continue 'outer;
                }
            }
            break;
        }
        CycNum { conductor: n, coeffs: v }
    }

    fn from_dense(m: u64, dense: Vec<Rat>) -> CycNum {
        CycNum::canonical(m, reduce(m, dense))
    }

    pub fn zero() -> CycNum {
        CycNum { conductor: 1, coeffs: vec![Rat::zero()] }
    }

    pub fn one() -> CycNum {
        CycNum::from_rat(Rat::one())
    }

    pub fn from_rat(q: Rat) -> CycNum {
        CycNum { conductor: 1, coeffs: vec![q] }
    }

    pub fn from_int(n: i64) -> CycNum {
        CycNum::from_rat(int(n))
    }

    /// `ζ_n = exp(2πi/n)`.
    pub fn root_of_unity(n: u64) -> CycNum {
        CycNum::zeta_pow(n, 1)
    }

    /// `ζ_n^k` for any integer `k`.
    pub fn zeta_pow(n: u64, k: i64) -> CycNum {
        assert!(n >= 1);
        let e = k.rem_euclid(n as i64) as usize;
        let mut dense = vec![Rat::zero(); n as usize];
        dense[e] = Rat::one();
        CycNum::from_dense(n, dense)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Power-basis coefficients: `self = Σ c_e ζ_N^e`, `0 ≤ e < φ(N)`.
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.conductor == 1 && self.coeffs[0].is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.conductor == 1 && self.coeffs[0].is_one()
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        (self.conductor == 1).then(|| &self.coeffs[0])
    }

    fn lifted(&self, m: u64) -> impl Iterator<Item = (u64, &Rat)> {
        let step = m / self.conductor;
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(e, c)| (e as u64 * step, c))
    }

    fn lin_comb(&self, other: &CycNum, sign: i64) -> CycNum {
        let m = lcm_u64(self.conductor, other.conductor);
        let mut dense = vec![Rat::zero(); m as usize];
        for (e, c) in self.lifted(m) {
            dense[e as usize] += c;
        }
        for (e, c) in other.lifted(m) {
            if sign > 0 {
                dense[e as usize] += c;
            } else {
                dense[e as usize] -= c;
            }
        }
        CycNum::from_dense(m, dense)
    }

    pub fn add(&self, other: &CycNum) -> CycNum {
        if self.conductor == 1 && other.conductor == 1 {
            return CycNum::from_rat(&self.coeffs[0] + &other.coeffs[0]);
        }
        self.lin_comb(other, 1)
    }

    pub fn sub(&self, other: &CycNum) -> CycNum {
        if self.conductor == 1 && other.conductor == 1 {
            return CycNum::from_rat(&self.coeffs[0] - &other.coeffs[0]);
        }
        self.lin_comb(other, -1)
    }

    pub fn neg(&self) -> CycNum {
        CycNum { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &CycNum) -> CycNum {
        if let Some(q) = other.as_rat() {
            return self.scale(q);
        }
        if let Some(q) = self.as_rat() {
            return other.scale(q);
        }
        let m = lcm_u64(self.conductor, other.conductor);
        let mut dense = vec![Rat::zero(); m as usize];
        for (e1, c1) in self.lifted(m) {
            for (e2, c2) in other.lifted(m) {
                dense[((e1 + e2) % m) as usize] += c1 * c2;
            }
        }
        CycNum::from_dense(m, dense)
    }

    pub fn scale(&self, q: &Rat) -> CycNum {
        if q.is_zero() {
            return CycNum::zero();
        }
        CycNum { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    /// Image under the automorphism `ζ_N ↦ ζ_N^a` of the ambient field
    /// `Q(ζ_M)`, where `M` is a multiple of the conductor and `gcd(a, M) = 1`.
    pub fn galois_conjugate(&self, m: u64, a: u64) -> CycNum {
        assert_eq!(m % self.conductor, 0);
        assert_eq!(gcd_u64(a, m), 1);
        let mut dense = vec![Rat::zero(); m as usize];
        for (e, c) in self.lifted(m) {
            dense[((e * a) % m) as usize] += c;
        }
        CycNum::from_dense(m, dense)
    }

    /// Rational norm from `Q(ζ_N)` to `Q`, returned together with the product
    /// of the non-trivial conjugates.
    fn norm_parts(&self) -> (Rat, CycNum) {
        let n = self.conductor;
        let mut cofactor = CycNum::one();
        for a in 2..n {
            if gcd_u64(a, n) == 1 {
                cofactor = cofactor.mul(&self.galois_conjugate(n, a));
            }
        }
        let norm = self.mul(&cofactor);
        let q = norm.as_rat().expect("norm lies in Q").clone();
        (q, cofactor)
    }

    pub fn inv(&self) -> Result<CycNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.as_rat() {
            return Ok(CycNum::from_rat(q.recip()));
        }
        let (norm, cofactor) = self.norm_parts();
        Ok(cofactor.scale(&norm.recip()))
    }

    pub fn div(&self, other: &CycNum) -> Result<CycNum> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<CycNum> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = CycNum::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// Multiplies by `ζ_n^k`.
    pub fn mul_root(&self, n: u64, k: i64) -> CycNum {
        if self.is_zero() {
            return CycNum::zero();
        }
        let k = k.rem_euclid(n as i64) as u64;
        if k == 0 {
            return self.clone();
        }
        let m = lcm_u64(self.conductor, n);
        let shift = k * (m / n);
        let mut dense = vec![Rat::zero(); m as usize];
        for (e, c) in self.lifted(m) {
            dense[((e + shift) % m) as usize] += c;
        }
        CycNum::from_dense(m, dense)
    }

    /// Textual form using `E(n)` for `ζ_n`, re-parseable by the factor grammar.
    pub fn render(&self) -> String {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (e, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            let body = if e == 0 {
                a.to_string()
            } else {
                let z = if e == 1 { format!("E({})", self.conductor) } else { format!("E({})^{}", self.conductor, e) };
                if a.is_one() {
                    z
                } else {
                    format!("{a}*{z}")
                }
            };
            parts.push((neg, body));
        }
        if parts.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (neg, body)) in parts.into_iter().enumerate() {
            match (i, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            out.push_str(&body);
        }
        out
    }

    /// True when the rendered form is a single signed monomial.
    pub fn is_monomial(&self) -> bool {
        self.coeffs.iter().filter(|c| !c.is_zero()).count() <= 1
    }
}

impl Default for CycNum {
    fn default() -> Self {
        CycNum::zero()
    }
}

impl PartialOrd for CycNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CycNum {
    fn cmp(&self, other: &Self) -> Ordering {
        self.conductor.cmp(&other.conductor).then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl From<Rat> for CycNum {
    fn from(q: Rat) -> Self {
        CycNum::from_rat(q)
    }
}

impl From<i64> for CycNum {
    fn from(n: i64) -> Self {
        CycNum::from_int(n)
    }
}

/// Euler's totient of the conductor, exposed for tests and diagnostics.
pub fn field_degree(x: &CycNum) -> u64 {
    euler_phi(x.conductor)
}
