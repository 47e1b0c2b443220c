//! Common parts, fission exponents, fission data and the slope-matrix test
//! for numerical equivalence.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::levels::{levels_of, LevelDatum};
use crate::puiseux::{ExpFactor, IrregularClass, PointedIrregularType};

/// Truncations of `q1, q2` at the smallest exponent of `q1` where they lie in
/// one Galois orbit, or `(0, 0)` if there is none.
pub fn common_part(q1: &ExpFactor, q2: &ExpFactor) -> (ExpFactor, ExpFactor) {
    for k in q1.exponents() {
        let (t1, t2) = (q1.truncate(k), q2.truncate(k));
        if t1.same_orbit(&t2) {
            return (t1, t2);
        }
    }
    (ExpFactor::zero(), ExpFactor::zero())
}

/// `max(slope(q1 − qc1), slope(q2 − qc2))`; zero exactly when the two
/// factors share an orbit.
pub fn fission_exponent(q1: &ExpFactor, q2: &ExpFactor) -> Rat {
    let (c1, c2) = common_part(q1, q2);
    q1.slope_of_difference(&c1).max(q2.slope_of_difference(&c2))
}

/// Smallest slope among all differences of conjugates. Agrees with
/// [`fission_exponent`]; kept as an independent check.
pub fn fission_exponent_oracle(q1: &ExpFactor, q2: &ExpFactor) -> Rat {
    let c2 = q2.conjugates();
    q1.conjugates().iter().flat_map(|a| c2.iter().map(move |b| a.slope_of_difference(b))).min().unwrap()
}

/// Branch level data with multiplicities plus the symmetric matrix of
/// pairwise fission exponents.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FissionDatum {
    pub branches: Vec<(u32, LevelDatum)>,
    pub fission: Vec<Vec<Rat>>,
}

fn datum_of<'a>(entries: impl Iterator<Item = &'a (u32, ExpFactor)>) -> FissionDatum {
    let entries: Vec<&(u32, ExpFactor)> = entries.collect();
    let m = entries.len();
    let mut fission = vec![vec![Rat::zero(); m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let f = fission_exponent(&entries[i].1, &entries[j].1);
            fission[i][j] = f.clone();
            fission[j][i] = f;
        }
    }
    FissionDatum { branches: entries.iter().map(|(n, q)| (*n, levels_of(q))).collect(), fission }
}

/// Labelled fission datum of a compatible pointed type.
pub fn fission_datum(q: &PointedIrregularType) -> Result<FissionDatum> {
    if !q.is_compatible() {
        return Err(Error::NotCompatible);
    }
    Ok(datum_of(q.entries().iter()))
}

/// Fission datum of a class, branches in canonical orbit order.
pub fn class_fission_datum(c: &IrregularClass) -> FissionDatum {
    datum_of(c.orbits().iter())
}

impl FissionDatum {
    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Each branch repeated by its multiplicity, copies at fission exponent 0.
    pub fn expanded(&self) -> (Vec<LevelDatum>, Vec<Vec<Rat>>) {
        let owner: Vec<usize> = self.branches.iter().enumerate().flat_map(|(i, (n, _))| std::iter::repeat_n(i, *n as usize)).collect();
        let levels = owner.iter().map(|&i| self.branches[i].1.clone()).collect();
        let f = owner.iter().map(|&a| owner.iter().map(|&b| self.fission[a][b].clone()).collect()).collect();
        (levels, f)
    }

    /// Multiplicities recovered from the expanded form as `#{i : f_ij = 0}`.
    pub fn recovered_multiplicities(&self) -> Vec<u32> {
        let (_, f) = self.expanded();
        let mut out = Vec::new();
        let mut j = 0;
        while j < f.len() {
            let n = f[j].iter().filter(|x| x.is_zero()).count();
            out.push(n as u32);
            j += n;
        }
        out
    }

    /// Equality up to relabelling the branches.
    pub fn equivalent_unlabelled(&self, other: &FissionDatum) -> bool {
        let m = self.len();
        if m != other.len() {
            return false;
        }
        let mut assigned: Vec<usize> = Vec::with_capacity(m);
        let mut used = vec![false; m];
        fn extend(a: &FissionDatum, b: &FissionDatum, assigned: &mut Vec<usize>, used: &mut [bool]) -> bool {
            let i = assigned.len();
            if i == a.len() {
                return true;
            }
            for j in 0..b.len() {
                if used[j] || a.branches[i] != b.branches[j] {
                    continue;
                }
                if assigned.iter().enumerate().any(|(p, &q)| a.fission[p][i] != b.fission[q][j]) {
                    continue;
                }
                used[j] = true;
                assigned.push(j);
                if extend(a, b, assigned, used) {
                    return true;
                }
                assigned.pop();
                used[j] = false;
            }
            false
        }
        extend(self, other, &mut assigned, &mut used)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "branches": self.branches.iter().map(|(n, l)| json!({
                "multiplicity": n,
                "levels": l.levels().iter().map(|k| k.to_string()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "fission": self.fission.iter().map(|row| row.iter().map(|f| f.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// `slope(σ^k q_i − σ^l q_j)` for `0 ≤ k ≤ K_i`, `0 ≤ l ≤ K_j`, stored as
/// `entries[i][j][k][l]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SlopeMatrix {
    pub ranges: Vec<u64>,
    pub entries: Vec<Vec<Vec<Vec<Rat>>>>,
}

impl SlopeMatrix {
    pub fn get(&self, i: usize, k: usize, j: usize, l: usize) -> &Rat {
        &self.entries[i][j][k][l]
    }

    /// Distinct values in the table.
    pub fn values(&self) -> BTreeSet<Rat> {
        self.entries.iter().flatten().flatten().flatten().cloned().collect()
    }
}

/// Table over the inclusive ranges `0 ≤ k ≤ ranges[i]`.
pub fn slope_matrix_over(q: &PointedIrregularType, ranges: &[u64]) -> SlopeMatrix {
    let conj: Vec<Vec<ExpFactor>> = q.factors().zip(ranges).map(|(f, &r)| (0..=r as i64).map(|k| f.galois(k)).collect()).collect();
    let entries = conj
        .iter()
        .map(|ci| conj.iter().map(|cj| ci.iter().map(|a| cj.iter().map(|b| a.slope_of_difference(b)).collect()).collect()).collect())
        .collect();
    SlopeMatrix { ranges: ranges.to_vec(), entries }
}

/// The full table with `k` running up to `ram(q_i)` inclusive.
pub fn slope_matrix(q: &PointedIrregularType) -> SlopeMatrix {
    let rams: Vec<u64> = q.factors().map(ExpFactor::ram).collect();
    slope_matrix_over(q, &rams)
}

fn same_shape(a: &PointedIrregularType, b: &PointedIrregularType) -> bool {
    a.len() == b.len() && a.multiplicities() == b.multiplicities()
}

/// Same shape and equal slope tables over the index ranges of `q1`.
pub fn numerically_equivalent(q1: &PointedIrregularType, q2: &PointedIrregularType) -> bool {
    if !same_shape(q1, q2) {
        return false;
    }
    let m1 = slope_matrix(q1);
    m1 == slope_matrix_over(q2, &m1.ranges) && slope_matrix(q2) == slope_matrix_over(q1, &slope_matrix(q2).ranges)
}

/// The same test restricted to `0 ≤ k < ram(q_i)`.
pub fn numerically_equivalent_reduced(q1: &PointedIrregularType, q2: &PointedIrregularType) -> bool {
    if !same_shape(q1, q2) {
        return false;
    }
    let r1: Vec<u64> = q1.factors().map(|f| f.ram() - 1).collect();
    let r2: Vec<u64> = q2.factors().map(|f| f.ram() - 1).collect();
    slope_matrix_over(q1, &r1) == slope_matrix_over(q2, &r1) && slope_matrix_over(q1, &r2) == slope_matrix_over(q2, &r2)
}
