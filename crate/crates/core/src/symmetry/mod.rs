//! Automorphism and Weyl groups of fission trees, their action on pointed
//! types, and the full group of a single circle.

mod snf;

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::arith::rat::den_u64;
use crate::error::{Error, Result};
use crate::levels::levels_of;
use crate::puiseux::{ExpFactor, PointedIrregularType};
use crate::tree::{FissionTree, VertexId};

pub use snf::{determinant, mat_mul, smith_normal_form, IntMatrix};

/// Symbolic group built from symmetric and cyclic pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupShape {
    Trivial,
    Cyclic(u64),
    Product(Vec<GroupShape>),
    /// `Sym_n ≀ G`.
    Wreath(u32, Box<GroupShape>),
    /// Shift vectors of the `branches` factors of `inner` agree modulo
    /// `modulus`.
    Constrained {
        inner: Box<GroupShape>,
        modulus: u64,
        branches: usize,
    },
}

fn factorial(n: u32) -> BigUint {
    (1..=n as u64).map(BigUint::from).product()
}

impl GroupShape {
    pub fn order(&self) -> BigUint {
        match self {
            GroupShape::Trivial => BigUint::one(),
            GroupShape::Cyclic(n) => BigUint::from(*n),
            GroupShape::Product(gs) => gs.iter().map(GroupShape::order).product(),
            GroupShape::Wreath(n, g) => factorial(*n) * g.order().pow(*n),
            GroupShape::Constrained { inner, modulus, branches } => inner.order() / BigUint::from(*modulus).pow(*branches as u32 - 1),
        }
    }

    fn is_atomic(&self) -> bool {
        matches!(self, GroupShape::Trivial | GroupShape::Cyclic(_))
            || matches!(self, GroupShape::Wreath(_, g) if **g == GroupShape::Trivial)
    }

    /// Drops trivial factors, one-fold wreaths and congruences modulo 1.
    fn simplify(self) -> GroupShape {
        match self {
            GroupShape::Cyclic(1) => GroupShape::Trivial,
            GroupShape::Wreath(n, g) => match (n, g.simplify()) {
                (1, g) => g,
                (n, g) => GroupShape::Wreath(n, Box::new(g)),
            },
            GroupShape::Product(gs) => {
                let mut gs: Vec<GroupShape> = gs.into_iter().map(GroupShape::simplify).filter(|g| *g != GroupShape::Trivial).collect();
                match gs.len() {
                    0 => GroupShape::Trivial,
                    1 => gs.pop().unwrap(),
                    _ => GroupShape::Product(gs),
                }
            }
            GroupShape::Constrained { inner, modulus: 1, .. } => inner.simplify(),
            GroupShape::Constrained { inner, modulus, branches } => match inner.simplify() {
                GroupShape::Trivial => GroupShape::Trivial,
                inner => GroupShape::Constrained { inner: Box::new(inner), modulus, branches },
            },
            g => g,
        }
    }
}

impl fmt::Display for GroupShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |g: &GroupShape| if g.is_atomic() { g.to_string() } else { format!("({g})") };
        match self {
            GroupShape::Trivial => write!(f, "1"),
            GroupShape::Cyclic(n) => write!(f, "Z/{n}"),
            GroupShape::Product(gs) => write!(f, "{}", gs.iter().map(wrap).join(" x ")),
            GroupShape::Wreath(n, g) if **g == GroupShape::Trivial => write!(f, "Sym_{n}"),
            GroupShape::Wreath(n, g) => write!(f, "Sym_{n} wr {}", wrap(g)),
            GroupShape::Constrained { inner, modulus, .. } => write!(f, "{inner} | shifts mod {modulus}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupDescriptor {
    pub order: BigUint,
    pub shape: GroupShape,
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.shape, self.order)
    }
}

/// Recursive shape at `v`: children are grouped into isomorphism classes of
/// subtrees; leaves contribute `leaf(v)`.
fn shape_at(t: &FissionTree, forms: &[String], v: VertexId, weyl: bool) -> GroupShape {
    let kids = t.children(v);
    if kids.is_empty() {
        return if weyl { GroupShape::Cyclic(t.ram_index(v)) } else { GroupShape::Trivial };
    }
    if kids.len() == 1 {
        return shape_at(t, forms, kids[0], weyl);
    }
    let mut classes: BTreeMap<&str, (u32, VertexId)> = BTreeMap::new();
    for &c in kids {
        classes.entry(forms[c.0].as_str()).or_insert((0, c)).0 += 1;
    }
    let parts = classes.values().map(|&(n, c)| GroupShape::Wreath(n, Box::new(shape_at(t, forms, c, weyl)))).collect();
    let inner = GroupShape::Product(parts);
    if weyl {
        GroupShape::Constrained { inner: Box::new(inner), modulus: t.ram_index(v), branches: kids.len() }
    } else {
        inner
    }
}

/// `Aut(𝒯)` as a product of wreath products over isomorphism classes of
/// subtrees.
pub fn aut_group(t: &FissionTree) -> GroupDescriptor {
    let shape = shape_at(t, &t.subtree_forms(), t.root(), false).simplify();
    GroupDescriptor { order: shape.order(), shape }
}

/// `W(𝒯)`: automorphisms together with per-leaf shifts that agree modulo the
/// ramification of every nearest common ancestor.
pub fn weyl_group(t: &FissionTree) -> GroupDescriptor {
    let raw = shape_at(t, &t.subtree_forms(), t.root(), true);
    let order = raw.order();
    let shape = raw.simplify();
    debug_assert_eq!(shape.order(), order);
    GroupDescriptor { order, shape }
}

/// `|W(𝒯)| = |Aut(𝒯)| · D(root)` where `D` counts compatible shift vectors.
pub fn weyl_order_by_shifts(t: &FissionTree) -> BigUint {
    fn d(t: &FissionTree, v: VertexId) -> BigUint {
        let kids = t.children(v);
        if kids.is_empty() {
            return BigUint::from(t.ram_index(v));
        }
        let prod: BigUint = kids.iter().map(|&c| d(t, c)).product();
        prod / BigUint::from(t.ram_index(v)).pow(kids.len() as u32 - 1)
    }
    aut_group(t).order * d(t, t.root())
}

/// An element `(π, d)`; leaf `i` is sent to leaf `perm[i]` and shifted by
/// `shifts[i]` modulo its ramification. Indices follow the leaf labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElement {
    pub perm: Vec<usize>,
    pub shifts: Vec<u64>,
}

impl WeylElement {
    pub fn identity(p: usize) -> WeylElement {
        WeylElement { perm: (0..p).collect(), shifts: vec![0; p] }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j) && self.shifts.iter().all(|&d| d == 0)
    }
}

fn labelled(t: &FissionTree) -> FissionTree {
    if t.is_labelled() {
        t.clone()
    } else {
        t.with_labels(t.leaves()).expect("leaves biject onto themselves")
    }
}

fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter().all(|&j| j < seen.len() && !std::mem::replace(&mut seen[j], true))
}

fn preserves_tree(t: &FissionTree, form: &str, perm: &[usize]) -> bool {
    let ls = t.labels().expect("labelled");
    let moved: Vec<VertexId> = perm.iter().map(|&j| ls[j]).collect();
    t.with_labels(moved).map(|u| u.canonical_form_at_top(true) == form).unwrap_or(false)
}

/// Leaf ramifications `r_i` and pair moduli `r_ij = Ram(nca(i, j))`.
fn ram_data(t: &FissionTree) -> (Vec<u64>, Vec<Vec<u64>>) {
    let ls = t.leaves();
    let r: Vec<u64> = ls.iter().map(|&l| t.ram_index(l)).collect();
    let pair = ls.iter().map(|&a| ls.iter().map(|&b| t.ram_index(t.nearest_common_ancestor(a, b))).collect()).collect();
    (r, pair)
}

fn shifts_ok(shifts: &[u64], pair: &[Vec<u64>]) -> bool {
    (0..shifts.len()).all(|i| (i + 1..shifts.len()).all(|j| (shifts[i] as i128 - shifts[j] as i128).rem_euclid(pair[i][j] as i128) == 0))
}

pub fn weyl_member(t: &FissionTree, w: &WeylElement) -> Result<bool> {
    let t = labelled(t);
    let p = t.leaves().len();
    if w.perm.len() != p || w.shifts.len() != p || !is_permutation(&w.perm) {
        return Err(Error::ShapeMismatch(format!("expected a permutation and shifts on {p} leaves")));
    }
    let (r, pair) = ram_data(&t);
    let reduced: Vec<u64> = w.shifts.iter().zip(&r).map(|(d, r)| d % r).collect();
    Ok(preserves_tree(&t, &t.canonical_form_at_top(true), &w.perm) && shifts_ok(&reduced, &pair))
}

/// Leaf permutations preserving the tree, by exhaustive search.
pub fn automorphisms_brute(t: &FissionTree) -> Vec<Vec<usize>> {
    let t = labelled(t);
    let form = t.canonical_form_at_top(true);
    let p = t.leaves().len();
    (0..p).permutations(p).filter(|perm| preserves_tree(&t, &form, perm)).collect()
}

/// All compatible shift vectors, by exhaustive search.
pub fn shift_vectors_brute(t: &FissionTree) -> Vec<Vec<u64>> {
    let t = labelled(t);
    let (r, pair) = ram_data(&t);
    r.iter().map(|&ri| 0..ri).multi_cartesian_product().filter(|d| shifts_ok(d, &pair)).collect()
}

/// `|W(𝒯)|` by enumerating the ambient semidirect product.
pub fn weyl_order_brute(t: &FissionTree) -> BigUint {
    BigUint::from(automorphisms_brute(t).len()) * BigUint::from(shift_vectors_brute(t).len())
}

/// Every element of `W(𝒯)`; only sensible for small trees.
pub fn weyl_elements(t: &FissionTree) -> Vec<WeylElement> {
    let shifts = shift_vectors_brute(t);
    automorphisms_brute(t)
        .into_iter()
        .flat_map(|perm| shifts.iter().map(move |d| WeylElement { perm: perm.clone(), shifts: d.clone() }))
        .collect()
}

/// `(π, d)·Q`: entry `i` of the result is `(n_{π(i)}, σ^{d_{π(i)}} q_{π(i)})`.
pub fn weyl_act(q: &PointedIrregularType, w: &WeylElement) -> Result<PointedIrregularType> {
    let p = q.len();
    if w.perm.len() != p || w.shifts.len() != p || !is_permutation(&w.perm) {
        return Err(Error::ShapeMismatch(format!("expected a permutation and shifts on {p} entries")));
    }
    let e = q.entries();
    let entries = w
        .perm
        .iter()
        .map(|&j| {
            let (n, f) = &e[j];
            (*n, f.galois(w.shifts[j] as i64))
        })
        .collect();
    PointedIrregularType::new(entries)
}

/// The full group of one circle: generators `γ_1…γ_m, ν` subject to
/// `Σ gcd(n_i, r) γ_i = r ν`. Returns the free rank and the diagonal of the
/// Smith form of the relation.
pub fn one_circle_full_group(q: &ExpFactor) -> (usize, Vec<BigInt>) {
    let l = levels_of(q);
    let r = q.ram();
    let mut row: Vec<BigInt> = l
        .levels()
        .iter()
        .map(|k| {
            let n = (k * crate::arith::Rat::from_integer(r.into())).to_integer();
            num_integer::gcd(n, BigInt::from(r))
        })
        .collect();
    row.push(-BigInt::from(r));
    debug_assert!(l.levels().iter().all(|k| r.is_multiple_of(den_u64(k))));
    let (_, s, _) = smith_normal_form(&vec![row]);
    let diag: Vec<BigInt> = vec![s[0][0].clone()];
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    (l.len() + 1 - rank, diag)
}
