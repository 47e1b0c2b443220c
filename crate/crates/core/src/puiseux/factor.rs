//! Exponential factors `q = Σ a_k x^k` with rational exponents `k > 0`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::arith::rat::{den_u64, lcm_u64, num_i64};
use crate::arith::{CycNum, Rat};
use crate::error::{Error, Result};

/// A Puiseux principal part: finitely many monomials with positive rational
/// exponents and nonzero cyclotomic coefficients. The tame factor `0` has no
/// terms.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ExpFactor {
    terms: BTreeMap<Rat, CycNum>,
}

impl ExpFactor {
    pub fn zero() -> ExpFactor {
        ExpFactor::default()
    }

    pub fn monomial(coeff: CycNum, exponent: Rat) -> Result<ExpFactor> {
        ExpFactor::from_terms([(exponent, coeff)])
    }

    /// Builds a factor, merging like exponents and dropping zero coefficients.
    pub fn from_terms<I: IntoIterator<Item = (Rat, CycNum)>>(terms: I) -> Result<ExpFactor> {
        let mut map: BTreeMap<Rat, CycNum> = BTreeMap::new();
        for (k, c) in terms {
            let slot = map.entry(k).or_default();
            *slot = slot.add(&c);
        }
        map.retain(|_, c| !c.is_zero());
        if let Some(k) = map.keys().find(|k| !k.is_positive()) {
            return Err(Error::NonPositiveExponent(k.clone()));
        }
        Ok(ExpFactor { terms: map })
    }

    pub fn terms(&self) -> &BTreeMap<Rat, CycNum> {
        &self.terms
    }

    /// Terms from the highest exponent down.
    pub fn terms_desc(&self) -> impl Iterator<Item = (&Rat, &CycNum)> {
        self.terms.iter().rev()
    }

    pub fn exponents(&self) -> impl Iterator<Item = &Rat> {
        self.terms.keys()
    }

    pub fn coeff(&self, k: &Rat) -> Option<&CycNum> {
        self.terms.get(k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lcm of the exponent denominators; 1 for the tame factor.
    pub fn ram(&self) -> u64 {
        self.terms.keys().fold(1, |acc, k| lcm_u64(acc, den_u64(k)))
    }

    /// Largest exponent, or 0.
    pub fn slope(&self) -> Rat {
        self.terms.keys().next_back().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn irr(&self) -> Rat {
        self.slope() * Rat::from_integer(self.ram().into())
    }

    /// `σ^k(q)`: the monomial `x^(n/d)` is multiplied by `exp(-2πi·k·n/d)`.
    pub fn galois(&self, k: i64) -> ExpFactor {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let d = den_u64(e);
                let shift = -(k.rem_euclid(d as i64)) * num_i64(e);
                (e.clone(), c.mul_root(d, shift))
            })
            .collect();
        ExpFactor { terms }
    }

    /// All `ram(q)` Galois conjugates, `σ^0(q)` first.
    pub fn conjugates(&self) -> Vec<ExpFactor> {
        (0..self.ram() as i64).map(|k| self.galois(k)).collect()
    }

    pub fn same_orbit(&self, other: &ExpFactor) -> bool {
        if self.terms.len() != other.terms.len() || !self.terms.keys().eq(other.terms.keys()) {
            return false;
        }
        (0..self.ram() as i64).any(|k| &self.galois(k) == other)
    }

    /// Canonical representative of the Galois orbit: the least conjugate in
    /// the order of [`Ord`] for `ExpFactor`.
    pub fn orbit_rep(&self) -> ExpFactor {
        self.conjugates().into_iter().min().expect("orbit is nonempty")
    }

    /// `τ_k(q)`: keep the terms with exponent `≥ k`.
    pub fn truncate(&self, k: &Rat) -> ExpFactor {
        ExpFactor { terms: self.terms.range(k.clone()..).map(|(e, c)| (e.clone(), c.clone())).collect() }
    }

    /// The integer-exponent part of `q`.
    pub fn unramified_part(&self) -> ExpFactor {
        ExpFactor { terms: self.terms.iter().filter(|(e, _)| e.is_integer()).map(|(e, c)| (e.clone(), c.clone())).collect() }
    }

    pub fn add(&self, other: &ExpFactor) -> ExpFactor {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let slot = terms.entry(e.clone()).or_default();
            *slot = slot.add(c);
        }
        terms.retain(|_, c| !c.is_zero());
        ExpFactor { terms }
    }

    pub fn neg(&self) -> ExpFactor {
        ExpFactor { terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, other: &ExpFactor) -> ExpFactor {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &CycNum) -> ExpFactor {
        if c.is_zero() {
            return ExpFactor::zero();
        }
        ExpFactor { terms: self.terms.iter().map(|(e, a)| (e.clone(), a.mul(c))).collect() }
    }

    /// `slope(self - other)` without materialising the difference.
    pub fn slope_of_difference(&self, other: &ExpFactor) -> Rat {
        let mut a = self.terms.iter().rev().peekable();
        let mut b = other.terms.iter().rev().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Rat::zero(),
                (Some((e, _)), None) | (None, Some((e, _))) => return (*e).clone(),
                (Some((ea, ca)), Some((eb, cb))) => match ea.cmp(eb) {
                    Ordering::Greater => return (*ea).clone(),
                    Ordering::Less => return (*eb).clone(),
                    Ordering::Equal => {
                        if ca != cb {
                            return (*ea).clone();
                        }
                        a.next();
                        b.next();
                    }
                },
            }
        }
    }

    /// Text form accepted by [`crate::puiseux::parse_factor`].
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono = if e == &Rat::from_integer(1.into()) { "x".to_string() } else { format!("x^({e})") };
            let (neg, body) = if c.is_one() {
                (false, mono)
            } else if c.neg().is_one() {
                (true, mono)
            } else if let Some(q) = c.as_rat() {
                (q.is_negative(), format!("{}*{mono}", q.abs()))
            } else if c.is_monomial() && c.render().starts_with('-') {
                (true, format!("{}*{mono}", c.neg().render()))
            } else if c.is_monomial() {
                (false, format!("{}*{mono}", c.render()))
            } else {
                (false, format!("({})*{mono}", c.render()))
            };
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
}

impl Ord for ExpFactor {
    /// Compares term sequences read from the highest exponent down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.terms.iter().rev().cmp(other.terms.iter().rev())
    }
}

impl PartialOrd for ExpFactor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExpFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::puiseux::parse_factor;

    fn pf(s: &str) -> ExpFactor {
        parse_factor(s).unwrap()
    }

    #[test]
    fn derived_quantities() {
        let q = pf("x^3 + x^(5/2) + x^(3/2) + x^(1/3)");
        assert_eq!(q.ram(), 6);
        assert_eq!(q.slope(), int(3));
        assert_eq!(q.irr(), int(18));
        let z = ExpFactor::zero();
        assert_eq!((z.ram(), z.slope()), (1, int(0)));
    }

    #[test]
    fn galois_action() {
        assert_eq!(pf("x").galois(1), pf("x"));
        assert_eq!(pf("x^(1/2)").galois(1), pf("-x^(1/2)"));
        // ε = exp(-πi/3) = E(6)^5.
        let q = pf("x^(3/6) + x^(2/6) + 7*x^(1/6)");
        let eps = CycNum::zeta_pow(6, -1);
        let expected =
            ExpFactor::from_terms([(rat(1, 2), eps.pow(3).unwrap()), (rat(1, 3), eps.pow(2).unwrap()), (rat(1, 6), eps.scale(&int(7)))])
                .unwrap();
        assert_eq!(q.galois(1), expected);
        assert_eq!(q.galois(6), q);
    }

    #[test]
    fn orbits() {
        assert!(pf("x^(1/2)").same_orbit(&pf("-x^(1/2)")));
        assert!(!pf("x^(1/2)").same_orbit(&pf("2*x^(1/2)")));
        let lam = CycNum::from_int(3);
        let mu = lam.mul_root(5, 2);
        let a = ExpFactor::monomial(lam, rat(2, 5)).unwrap();
        let b = ExpFactor::monomial(mu, rat(2, 5)).unwrap();
        assert!(a.same_orbit(&b));
        assert_eq!(a.orbit_rep(), b.orbit_rep());
    }

    #[test]
    fn truncation() {
        let q = pf("x^3 + x^(5/2) + x^(3/2) + x^(1/3)");
        assert_eq!(q.truncate(&rat(3, 2)), pf("x^3 + x^(5/2) + x^(3/2)"));
        assert_eq!(q.truncate(&int(0)), q);
        assert!(pf("x^(1/2)").truncate(&int(1)).is_zero());
    }

    #[test]
    fn difference_slope() {
        let a = pf("x^2 + x^(1/2)");
        let b = pf("x^2 + 3*x^(1/2) + x^(1/3)");
        assert_eq!(a.slope_of_difference(&b), rat(1, 2));
        assert_eq!(a.slope_of_difference(&a), int(0));
        assert_eq!(a.slope_of_difference(&ExpFactor::zero()), int(2));
    }

    #[test]
    fn render_round_trip() {
        for s in ["x^(3/2) + 2*x^(1/3)", "E(3)*x^(1/6)", "-x - 1/2*x^(1/2)", "(1 + E(5))*x^(2/5)", "0"] {
            let q = pf(s);
            assert_eq!(pf(&q.render()), q, "{s}");
        }
        assert_eq!(pf("x^(3/2)+x").render(), "x^(3/2) + x");
    }
}
