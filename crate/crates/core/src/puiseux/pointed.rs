//! Pointed irregular types, irregular classes, compatibility and pullback.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::arith::rat::lcm_u64;
use crate::arith::{CycNum, Rat};
use crate::error::{Error, Result};

use super::factor::ExpFactor;

fn check_entries(entries: &[(u32, ExpFactor)]) -> Result<()> {
    if entries.iter().any(|(n, _)| *n == 0) {
        return Err(Error::ZeroMultiplicity);
    }
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            if entries[i].1.same_orbit(&entries[j].1) {
                return Err(Error::DuplicateOrbit(i, j));
            }
        }
    }
    Ok(())
}

/// An ordered list of `(multiplicity, factor)` with factors in pairwise
/// distinct Galois orbits.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PointedIrregularType {
    entries: Vec<(u32, ExpFactor)>,
}

impl PointedIrregularType {
    pub fn new(entries: Vec<(u32, ExpFactor)>) -> Result<Self> {
        check_entries(&entries)?;
        Ok(PointedIrregularType { entries })
    }

    pub fn entries(&self) -> &[(u32, ExpFactor)] {
        &self.entries
    }

    pub fn factors(&self) -> impl Iterator<Item = &ExpFactor> {
        self.entries.iter().map(|(_, q)| q)
    }

    pub fn multiplicities(&self) -> Vec<u32> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Σ n_i · ram(q_i)`.
    pub fn rank(&self) -> u64 {
        self.entries.iter().map(|(n, q)| *n as u64 * q.ram()).sum()
    }

    pub fn ram(&self) -> u64 {
        self.entries.iter().fold(1, |acc, (_, q)| lcm_u64(acc, q.ram()))
    }

    /// Largest slope among the factors.
    pub fn katz(&self) -> Rat {
        self.factors().map(ExpFactor::slope).max().unwrap_or_else(Rat::zero)
    }

    /// Whenever two truncations lie in one orbit they are equal.
    pub fn is_compatible(&self) -> bool {
        let qs: Vec<&ExpFactor> = self.factors().collect();
        (0..qs.len()).all(|i| (i + 1..qs.len()).all(|j| pair_compatible(qs[i], qs[j])))
    }

    /// Replaces factors by Galois conjugates so that the result is compatible.
    pub fn make_compatible(&self) -> PointedIrregularType {
        let mut order: Vec<usize> = (0..self.entries.len()).collect();
        order.sort_by(|&a, &b| self.entries[b].1.slope().cmp(&self.entries[a].1.slope()).then(a.cmp(&b)));
        let mut placed: Vec<Option<ExpFactor>> = vec![None; self.entries.len()];
        for &i in &order {
            let q = &self.entries[i].1;
            let chosen = q
                .conjugates()
                .into_iter()
                .find(|c| placed.iter().flatten().all(|p| pair_compatible(c, p)))
                .expect("a compatible conjugate always exists");
            placed[i] = Some(chosen);
        }
        let entries = self.entries.iter().zip(placed).map(|((n, _), q)| (*n, q.unwrap())).collect();
        PointedIrregularType { entries }
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self.entries.iter().map(|(n, q)| format!("({n}, {})", q.render())).collect();
        format!("[{}]", parts.join(", "))
    }
}

impl fmt::Display for PointedIrregularType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Compatibility of one pair of factors. Truncation orbits only change at
/// exponents of either factor, so those are the only cut points to test.
pub fn pair_compatible(a: &ExpFactor, b: &ExpFactor) -> bool {
    let cuts: std::collections::BTreeSet<&Rat> = a.exponents().chain(b.exponents()).collect();
    cuts.into_iter().all(|k| {
        let (ta, tb) = (a.truncate(k), b.truncate(k));
        ta == tb || !ta.same_orbit(&tb)
    })
}

/// A multiset of Galois orbits, each stored by its canonical representative.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct IrregularClass {
    orbits: Vec<(u32, ExpFactor)>,
}

impl IrregularClass {
    pub fn new(entries: Vec<(u32, ExpFactor)>) -> Result<Self> {
        check_entries(&entries)?;
        let mut orbits: Vec<(u32, ExpFactor)> = entries.into_iter().map(|(n, q)| (n, q.orbit_rep())).collect();
        orbits.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        Ok(IrregularClass { orbits })
    }

    pub fn orbits(&self) -> &[(u32, ExpFactor)] {
        &self.orbits
    }

    pub fn rank(&self) -> u64 {
        self.orbits.iter().map(|(n, q)| *n as u64 * q.ram()).sum()
    }

    pub fn katz(&self) -> Rat {
        self.orbits.iter().map(|(_, q)| q.slope()).max().unwrap_or_else(Rat::zero)
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> =
            self.orbits.iter().map(|(n, q)| if *n == 1 { format!("<{}>", q.render()) } else { format!("{n}<{}>", q.render()) }).collect();
        parts.join(" + ")
    }
}

impl fmt::Display for IrregularClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub fn classify(q: &PointedIrregularType) -> IrregularClass {
    IrregularClass::new(q.entries.clone()).expect("pointed types have distinct orbits")
}

/// A compatible pointed type with the given class.
pub fn point(theta: &IrregularClass) -> PointedIrregularType {
    PointedIrregularType { entries: theta.orbits.clone() }.make_compatible()
}

/// A polynomial in `t = x^(1/r)` without constant term: degree ↦ coefficient.
pub type TPoly = BTreeMap<u64, CycNum>;

/// Rewrites one factor as a polynomial in `t` with `t^r = x`.
pub fn pullback_factor(q: &ExpFactor, r: u64) -> Result<TPoly> {
    if r == 0 || !r.is_multiple_of(q.ram()) {
        return Err(Error::RamMismatch { ram: q.ram(), r });
    }
    let rr = Rat::from_integer(r.into());
    Ok(q.terms().iter().map(|(e, c)| ((e * &rr).to_integer().try_into().unwrap(), c.clone())).collect())
}

/// The full untwisted type: every Galois conjugate of every entry, each
/// repeated by its multiplicity, rewritten in `t`.
pub fn pullback(q: &PointedIrregularType, r: u64) -> Result<Vec<TPoly>> {
    let mut out = Vec::new();
    for (n, f) in q.entries() {
        for c in f.conjugates() {
            let p = pullback_factor(&c, r)?;
            for _ in 0..*n {
                out.push(p.clone());
            }
        }
    }
    Ok(out)
}

/// Substitutes `t ↦ ζ_r t`.
pub fn rotate_tpoly(p: &TPoly, r: u64) -> TPoly {
    p.iter().map(|(d, c)| (*d, c.mul_root(r, *d as i64))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puiseux::{parse_factor, parse_type};

    fn pt(s: &str) -> PointedIrregularType {
        parse_type(s).unwrap()
    }

    #[test]
    fn compatibility() {
        assert!(pt("[(1, x^(3/2)+x^(1/2)), (1, x^(3/2)+2*x^(1/2))]").is_compatible());
        let bad = pt("[(1, x^(3/2)), (1, -x^(3/2)+x)]");
        assert!(!bad.is_compatible());
        let fixed = bad.make_compatible();
        assert!(fixed.is_compatible());
        assert_eq!(fixed.entries()[1].1, parse_factor("x^(3/2) + x").unwrap());
        assert_eq!(classify(&fixed), classify(&bad));
        assert!(pt("[(3, x^(5/6))]").is_compatible());
    }

    #[test]
    fn point_and_classify() {
        let c = IrregularClass::new(vec![(1, parse_factor("-x^(1/2)").unwrap())]).unwrap();
        let p = point(&c);
        assert_eq!(p.entries()[0].1, c.orbits()[0].1);
        assert_eq!(classify(&p), c);
    }

    #[test]
    fn pullbacks() {
        let t = pullback_factor(&parse_factor("x^(1/2)").unwrap(), 2).unwrap();
        assert_eq!(t, TPoly::from([(1, CycNum::one())]));
        let t = pullback_factor(&parse_factor("x^(3/2)+x").unwrap(), 2).unwrap();
        assert_eq!(t, TPoly::from([(2, CycNum::one()), (3, CycNum::one())]));
        assert!(matches!(pullback_factor(&parse_factor("x^(1/3)").unwrap(), 2), Err(Error::RamMismatch { .. })));
    }
}
