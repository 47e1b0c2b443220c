//! Level data of a single Stokes circle, admissible and inconsequential
//! exponents, and the single-circle configuration space.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::arith::rat::{den_u64, floor_i64, lcm_u64};
use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::puiseux::ExpFactor;

/// Strictly decreasing positive rationals whose running lcm-denominators
/// `1 < r_1 < r_2 < ... < r_m` strictly increase.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct LevelDatum {
    levels: Vec<Rat>,
}

impl LevelDatum {
    pub fn new(levels: Vec<Rat>) -> Result<Self> {
        let mut prev_r = 1;
        for (i, k) in levels.iter().enumerate() {
            if !k.is_positive() {
                return Err(Error::MalformedLevelDatum(format!("level {k} is not positive")));
            }
            if i > 0 && k >= &levels[i - 1] {
                return Err(Error::MalformedLevelDatum("levels must strictly decrease".into()));
            }
            let r = lcm_u64(prev_r, den_u64(k));
            if r <= prev_r {
                return Err(Error::MalformedLevelDatum(format!("level {k} does not raise the ramification")));
            }
            prev_r = r;
        }
        Ok(LevelDatum { levels })
    }

    pub fn empty() -> Self {
        LevelDatum::default()
    }

    pub fn levels(&self) -> &[Rat] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// The running ramification indices `r_1 < ... < r_m`.
    pub fn ram_indices(&self) -> Vec<u64> {
        let mut r = 1;
        self.levels
            .iter()
            .map(|k| {
                r = lcm_u64(r, den_u64(k));
                r
            })
            .collect()
    }

    pub fn ram(&self) -> u64 {
        self.ram_indices().last().copied().unwrap_or(1)
    }

    /// Lcm of the denominators of the levels `≥ v`.
    pub fn ram_at(&self, v: &Rat) -> u64 {
        self.levels.iter().take_while(|k| *k >= v).fold(1, |r, k| lcm_u64(r, den_u64(k)))
    }

    /// `v ∈ A(L)`: positive and a multiple of `1/Ram(v)`.
    pub fn is_admissible(&self, v: &Rat) -> bool {
        v.is_positive() && self.ram_at(v).is_multiple_of(den_u64(v))
    }

    pub fn contains(&self, v: &Rat) -> bool {
        self.levels.contains(v)
    }

    /// `|A(L) ∖ ℕ| = Σ_i (r_i k_i − ⌊r_{i−1} k_i⌋)`.
    pub fn non_integral_admissible_count(&self) -> u64 {
        let mut prev = 1u64;
        let mut total = 0i64;
        for (k, r) in self.levels.iter().zip(self.ram_indices()) {
            let rk = k * Rat::from_integer(r.into());
            let pk = k * Rat::from_integer(prev.into());
            total += floor_i64(&rk) - floor_i64(&pk);
            prev = r;
        }
        total as u64
    }

    pub fn render(&self) -> String {
        self.levels.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ")
    }
}

impl fmt::Display for LevelDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.levels.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", "))
    }
}

/// Admissible and inconsequential exponents in `(0, bound]`, both sorted
/// descending.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExponentSets {
    pub levels: LevelDatum,
    pub bound: Rat,
    pub admissible: Vec<Rat>,
    pub inconsequential: Vec<Rat>,
}

/// Multiples of `1/r` in the open interval `(lo, hi)`, intersected with
/// `(0, bound]`.
fn multiples_between(r: u64, lo: &Rat, hi: &Rat, bound: &Rat, out: &mut BTreeSet<Rat>) {
    let rr = Rat::from_integer(r.into());
    let mut j = floor_i64(&(lo * &rr)) + 1;
    loop {
        let v = Rat::new(j.into(), r.into());
        if &v >= hi || &v > bound {
            break;
        }
        if v.is_positive() {
            out.insert(v);
        }
        j += 1;
    }
}

/// `Inc(L) = ℕ_{>0} ∪ ⋃_i ((k_{i+1}, k_i) ∩ (1/r_i)ℕ)` with `k_{m+1} = 0`, and
/// `A(L) = L ⊔ Inc(L)`, both cut to `(0, bound]`.
pub fn exponent_sets(levels: &LevelDatum, bound: &Rat) -> Result<ExponentSets> {
    LevelDatum::new(levels.levels.clone())?;
    let mut inc = BTreeSet::new();
    let mut n = 1i64;
    while Rat::from_integer(n.into()) <= *bound {
        inc.insert(Rat::from_integer(n.into()));
        n += 1;
    }
    let rs = levels.ram_indices();
    for (i, k) in levels.levels.iter().enumerate() {
        let lower = levels.levels.get(i + 1).cloned().unwrap_or_else(Rat::zero);
        multiples_between(rs[i], &lower, k, bound, &mut inc);
    }
    let mut adm: BTreeSet<Rat> = inc.clone();
    adm.extend(levels.levels.iter().filter(|k| *k <= bound).cloned());
    Ok(ExponentSets {
        levels: levels.clone(),
        bound: bound.clone(),
        admissible: adm.into_iter().rev().collect(),
        inconsequential: inc.into_iter().rev().collect(),
    })
}

/// Levels by the structural rule: the exponents at which the running
/// ramification of the truncation strictly increases.
pub fn levels_of(q: &ExpFactor) -> LevelDatum {
    let mut r = 1;
    let mut levels = Vec::new();
    for (k, _) in q.terms_desc() {
        let next = lcm_u64(r, den_u64(k));
        if next > r {
            levels.push(k.clone());
            r = next;
        }
    }
    LevelDatum { levels }
}

/// Levels as the distinct nonzero slopes of `q − σ^i(q)`.
pub fn levels_oracle(q: &ExpFactor) -> LevelDatum {
    let slopes: BTreeSet<Rat> = (1..q.ram() as i64).map(|i| q.slope_of_difference(&q.galois(i))).filter(|s| !s.is_zero()).collect();
    LevelDatum { levels: slopes.into_iter().rev().collect() }
}

/// Shape of the single-circle configuration space `(ℂ*)^m × ℂ^N`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SingleCircleConfig {
    pub torus_rank: usize,
    pub affine_dim: usize,
    pub special_affine_dim: usize,
}

impl SingleCircleConfig {
    pub fn special_dim(&self) -> usize {
        self.torus_rank + self.special_affine_dim
    }
}

pub fn single_circle_config(q: &ExpFactor) -> SingleCircleConfig {
    let l = levels_of(q);
    let sets = exponent_sets(&l, &q.slope()).expect("levels of a factor are valid");
    let special = match l.levels.first() {
        Some(k1) => exponent_sets(&l, k1).unwrap().inconsequential.iter().filter(|v| !v.is_integer()).count(),
        None => 0,
    };
    SingleCircleConfig { torus_rank: l.len(), affine_dim: sets.inconsequential.len(), special_affine_dim: special }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::puiseux::parse_factor;
    use proptest::prelude::*;

    fn pf(s: &str) -> ExpFactor {
        parse_factor(s).unwrap()
    }

    fn ld(v: &[(i64, i64)]) -> LevelDatum {
        LevelDatum::new(v.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    #[test]
    fn worked_example() {
        let q = pf("x^3 + x^(5/2) + x^(3/2) + x^(1/3)");
        let l = levels_of(&q);
        assert_eq!(l, ld(&[(5, 2), (1, 3)]));
        assert_eq!(levels_oracle(&q), l);
        assert_eq!(l.ram_indices(), vec![2, 6]);
        let s = exponent_sets(&l, &int(3)).unwrap();
        let expected: Vec<Rat> = [(3, 1), (5, 2), (2, 1), (3, 2), (1, 1), (1, 2), (1, 3), (1, 6)].iter().map(|&(a, b)| rat(a, b)).collect();
        assert_eq!(s.admissible, expected);
        assert_eq!(l.non_integral_admissible_count(), 5);
        let c = single_circle_config(&q);
        assert_eq!((c.torus_rank, c.affine_dim, c.special_affine_dim), (2, 6, 3));
        assert_eq!(c.special_dim(), 5);
    }

    #[test]
    fn small_cases() {
        assert!(levels_of(&pf("x^2 + 3*x")).is_empty());
        assert_eq!(levels_of(&pf("x^(1/2) + x^(1/3)")), ld(&[(1, 2), (1, 3)]));
        assert_eq!(levels_oracle(&pf("x^(1/2) + x^(1/3)")), ld(&[(1, 2), (1, 3)]));
        assert_eq!(levels_oracle(&pf("x^(5/6)")), ld(&[(5, 6)]));
        let s = exponent_sets(&LevelDatum::empty(), &int(2)).unwrap();
        assert_eq!(s.admissible, vec![int(2), int(1)]);
        assert_eq!(s.inconsequential, vec![int(2), int(1)]);
        let c = single_circle_config(&ExpFactor::zero());
        assert_eq!((c.torus_rank, c.affine_dim, c.special_affine_dim), (0, 0, 0));
    }

    #[test]
    fn malformed() {
        assert!(LevelDatum::new(vec![rat(1, 2), rat(3, 2)]).is_err());
        assert!(LevelDatum::new(vec![rat(3, 2), rat(1, 2)]).is_err());
        assert!(LevelDatum::new(vec![int(2)]).is_err());
        assert!(LevelDatum::new(vec![rat(1, 2), rat(1, 4)]).is_ok());
    }

    #[test]
    fn single_monomial_config() {
        for (s, r) in [(5i64, 2i64), (7, 3), (3, 4), (1, 5)] {
            let q = ExpFactor::monomial(crate::arith::CycNum::from_int(2), rat(s, r)).unwrap();
            let c = single_circle_config(&q);
            let fl = s / r;
            assert_eq!((c.torus_rank, c.affine_dim as i64, c.special_affine_dim as i64), (1, s - 1, s - 1 - fl));
        }
    }

    fn arb_levels() -> impl Strategy<Value = LevelDatum> {
        proptest::collection::vec((1i64..=40, 2i64..=12), 0..5).prop_map(|raw| {
            let mut cands: Vec<Rat> = raw.into_iter().map(|(a, b)| rat(a, b)).collect();
            cands.sort();
            cands.dedup();
            let mut r = 1;
            let mut out = Vec::new();
            for k in cands.into_iter().rev() {
                let n = lcm_u64(r, den_u64(&k));
                if n > r {
                    out.push(k);
                    r = n;
                }
            }
            LevelDatum::new(out).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn levels_realised_by_monomial_sum(l in arb_levels()) {
            let q = ExpFactor::from_terms(l.levels().iter().map(|k| (k.clone(), crate::arith::CycNum::one()))).unwrap();
            prop_assert_eq!(levels_of(&q), l.clone());
            prop_assert_eq!(levels_oracle(&q), l);
        }

        #[test]
        fn membership_matches_enumeration(l in arb_levels(), b in 1i64..6) {
            let bound = int(b);
            let sets = exponent_sets(&l, &bound).unwrap();
            let r = l.ram();
            for j in 1..=(b as u64 * r) {
                let v = Rat::new(j.into(), r.into());
                prop_assert_eq!(sets.admissible.contains(&v), l.is_admissible(&v));
            }
        }
    }
}
