//! Realisations of truncated trees and the product decomposition of the
//! configuration space.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::arith::rat::floor_i64;
use crate::arith::{int, CycNum, Rat};
use crate::error::{Error, Result};
use crate::puiseux::{ExpFactor, PointedIrregularType};
use crate::tree::{build_tree_labelled, FissionTree, TruncatedTree, VertexId, VertexKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactorKind {
    Point,
    /// `X_n`: ordered configurations of `n` points in ℂ.
    Braid {
        n: u32,
    },
    /// `X*_{n,N}`: points of ℂ* with pairwise distinct `N`-th powers.
    Star {
        n: u32,
        big_n: u64,
    },
}

impl FactorKind {
    pub fn dim(self) -> u64 {
        match self {
            FactorKind::Point => 0,
            FactorKind::Braid { n } | FactorKind::Star { n, .. } => n as u64,
        }
    }

    /// First Betti number: the number of hyperplanes removed.
    pub fn betti1(self) -> u64 {
        match self {
            FactorKind::Point => 0,
            FactorKind::Braid { n } => n as u64 * (n as u64).saturating_sub(1) / 2,
            FactorKind::Star { n, big_n } => n as u64 + big_n * n as u64 * (n as u64).saturating_sub(1) / 2,
        }
    }

    /// Label of the fundamental group, `None` when it is trivial.
    pub fn pi1_label(self) -> Option<String> {
        match self {
            FactorKind::Point | FactorKind::Braid { n: 0 | 1 } => None,
            FactorKind::Braid { n } => Some(format!("PB_{n}")),
            FactorKind::Star { n, big_n } => Some(format!("P({big_n},1,{n})")),
        }
    }

    fn is_abelian(self) -> bool {
        match self {
            FactorKind::Point => true,
            FactorKind::Braid { n } => n <= 2,
            FactorKind::Star { n, .. } => n <= 1,
        }
    }
}

impl fmt::Display for FactorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorKind::Point => write!(f, "pt"),
            FactorKind::Braid { n } => write!(f, "X_{n}"),
            FactorKind::Star { n, big_n } => write!(f, "X*_{{{n},{big_n}}}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigFactorization {
    pub factors: Vec<(VertexId, FactorKind)>,
    pub total_dim: u64,
    pub special_dim: u64,
}

impl ConfigFactorization {
    /// Non-point factors, sorted.
    pub fn factor_multiset(&self) -> Vec<FactorKind> {
        let mut v: Vec<FactorKind> = self.factors.iter().map(|(_, k)| *k).filter(|k| *k != FactorKind::Point).collect();
        v.sort();
        v
    }

    /// Nontrivial fundamental-group factors: pure braid groups by strand
    /// count, then `P(N,1,n)` by `(N, n)`.
    pub fn pi1_factors(&self) -> Vec<String> {
        let mut kinds: Vec<FactorKind> = self.factors.iter().map(|(_, k)| *k).filter(|k| k.pi1_label().is_some()).collect();
        kinds.sort_by_key(|k| match *k {
            FactorKind::Braid { n } => (0, 0, n),
            FactorKind::Star { n, big_n } => (1, big_n, n),
            FactorKind::Point => (2, 0, 0),
        });
        kinds.into_iter().filter_map(FactorKind::pi1_label).collect()
    }

    pub fn pi1_string(&self) -> String {
        let fs = self.pi1_factors();
        if fs.is_empty() {
            "1".to_string()
        } else {
            fs.join(" × ")
        }
    }

    pub fn betti1(&self) -> u64 {
        self.factors.iter().map(|(_, k)| k.betti1()).sum()
    }

    pub fn is_abelian(&self) -> bool {
        self.factors.iter().all(|(_, k)| k.is_abelian())
    }

    /// Rank of the fundamental group when it is free abelian.
    pub fn pi1_rank(&self) -> Option<u64> {
        self.is_abelian().then(|| self.betti1())
    }

    pub fn to_json(&self) -> Value {
        let factors: Vec<Value> = self
            .factors
            .iter()
            .map(|(v, k)| {
                let (kind, n, big_n) = match *k {
                    FactorKind::Point => ("point", 0, 1),
                    FactorKind::Braid { n } => ("X", n, 1),
                    FactorKind::Star { n, big_n } => ("X*", n, big_n),
                };
                json!({"vertex": v.0, "kind": kind, "n": n, "N": big_n, "dim": k.dim()})
            })
            .collect();
        json!({
            "factors": factors,
            "total_dim": self.total_dim,
            "special_dim": self.special_dim,
            "pi1": self.pi1_string(),
            "betti1": self.betti1(),
            "abelian": self.is_abelian(),
        })
    }
}

/// One factor per vertex: `X_n` over `n` authorised children, `X*_{n,N}`
/// over `n` mandatory children with relative ramification `N`, else a point.
pub fn factorize(tb: &TruncatedTree) -> ConfigFactorization {
    let t = tb.tree();
    let factors: Vec<(VertexId, FactorKind)> = t
        .vertices()
        .map(|(id, v)| {
            let nonempty: Vec<VertexId> = v.children.iter().copied().filter(|&c| t.kind(c).is_admissible()).collect();
            let kind = match nonempty.first().map(|&c| t.kind(c)) {
                None => FactorKind::Point,
                Some(VertexKind::Authorised) => FactorKind::Braid { n: nonempty.len() as u32 },
                Some(_) => FactorKind::Star { n: nonempty.len() as u32, big_n: t.relative_ram(id) },
            };
            (id, kind)
        })
        .collect();
    let total_dim: u64 = factors.iter().map(|(_, k)| k.dim()).sum();
    let special_dim = total_dim - (floor_i64(tb.eta()) as u64 - 1);
    ConfigFactorization { factors, total_dim, special_dim }
}

/// Coefficients on the admissible vertices strictly below the root.
pub type Realisation = BTreeMap<VertexId, CycNum>;

fn check_domain(tb: &TruncatedTree, c: &Realisation) -> Result<()> {
    let dom: Vec<VertexId> = c.keys().copied().collect();
    let mut want = tb.admissible_below_root();
    want.sort();
    if dom != want {
        return Err(Error::DomainMismatch);
    }
    Ok(())
}

/// The three sibling conditions on coefficients.
pub fn is_realisation(tb: &TruncatedTree, c: &Realisation) -> Result<bool> {
    check_domain(tb, c)?;
    let t = tb.tree();
    for (id, v) in t.vertices() {
        if v.kind == VertexKind::Mandatory && c[&id].is_zero() {
            return Ok(false);
        }
        let kids: Vec<VertexId> = v.children.iter().copied().filter(|&k| t.kind(k).is_admissible()).collect();
        let big_n = t.relative_ram(id);
        for (a, &u) in kids.iter().enumerate() {
            for &w in &kids[a + 1..] {
                let clash = match (t.kind(u), t.kind(w)) {
                    (VertexKind::Authorised, VertexKind::Authorised) => c[&u] == c[&w],
                    (VertexKind::Mandatory, VertexKind::Mandatory) => {
                        c[&u].pow(big_n as i64).expect("positive power") == c[&w].pow(big_n as i64).expect("positive power")
                    }
                    // Mixed authorised/mandatory siblings do not occur in valid trees.
                    _ => false,
                };
                if clash {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `q_i = Σ c(v) x^{h(v)}` over the admissible vertices on branch `i`.
pub fn realisation_to_type(tb: &TruncatedTree, c: &Realisation) -> Result<PointedIrregularType> {
    check_domain(tb, c)?;
    let t = tb.tree();
    let labels = t.labels().ok_or_else(|| Error::NotRealisation("tree is unlabelled".into()))?;
    let mut entries = Vec::with_capacity(labels.len());
    for &leaf in labels {
        let terms = t.ancestors(leaf).into_iter().filter_map(|a| c.get(&a).map(|x| (t.height(a).clone(), x.clone())));
        entries.push((t.multiplicity(leaf), ExpFactor::from_terms(terms)?));
    }
    PointedIrregularType::new(entries).map_err(|e| Error::NotRealisation(e.to_string()))
}

/// The truncated labelled tree of `Q` at `η = ⌊Katz(Q)⌋ + 1` and the
/// coefficients of `Q` read off at its admissible vertices.
pub fn type_to_realisation(q: &PointedIrregularType) -> Result<(TruncatedTree, Realisation)> {
    let t = build_tree_labelled(q)?;
    let tb = t.truncate(Some(&q.katz()))?;
    let tt = tb.tree();
    let mut c = Realisation::new();
    for (i, &leaf) in tt.labels().expect("labelled").iter().enumerate() {
        let f = &q.entries()[i].1;
        for a in tt.ancestors(leaf) {
            if a != tt.root() && tt.kind(a).is_admissible() {
                c.entry(a).or_insert_with(|| f.coeff(tt.height(a)).cloned().unwrap_or_else(CycNum::zero));
            }
        }
    }
    Ok((tb, c))
}

/// Semantic realisation test: rebuild the tree of the realised type and
/// compare labelled forms at the same root height.
pub fn is_realisation_semantic(tb: &TruncatedTree, c: &Realisation) -> Result<bool> {
    check_domain(tb, c)?;
    let q = match realisation_to_type(tb, c) {
        Ok(q) => q,
        Err(Error::NotRealisation(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    let Ok(t) = build_tree_labelled(&q) else { return Ok(false) };
    let Ok(rebuilt) = t.truncate(Some(&(tb.eta() - int(1)))) else { return Ok(false) };
    Ok(rebuilt.tree().canonical_form_at_top(true) == tb.tree().canonical_form_at_top(true))
}

fn random_candidate(rng: &mut ChaCha8Rng) -> CycNum {
    let a = rng.gen_range(-4i64..=4);
    match rng.gen_range(0..4) {
        0 => CycNum::from_int(a).mul_root(4, rng.gen_range(0..4)),
        1 => CycNum::from_int(a).mul_root(3, rng.gen_range(0..3)),
        _ => CycNum::from_int(a),
    }
}

/// Picks coefficients sibling group by sibling group: a few seeded random
/// draws, then a scan of `1, 2, 3, …` which always succeeds.
pub fn sample_realisation(tb: &TruncatedTree, seed: u64) -> Realisation {
    let t = tb.tree();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Realisation::new();
    for (id, v) in t.vertices() {
        let big_n = t.relative_ram(id) as i64;
        let key = |x: &CycNum, k: VertexKind| if k == VertexKind::Mandatory { x.pow(big_n).expect("positive power") } else { x.clone() };
        let mut taken: Vec<CycNum> = Vec::new();
        for &k in &v.children {
            let kind = t.kind(k);
            if !kind.is_admissible() {
                continue;
            }
            let ok = |x: &CycNum, taken: &[CycNum]| !(kind == VertexKind::Mandatory && x.is_zero()) && !taken.contains(&key(x, kind));
            let mut chosen = None;
            for _ in 0..8 {
                let x = random_candidate(&mut rng);
                if ok(&x, &taken) {
                    chosen = Some(x);
                    break;
                }
            }
            let x = chosen.unwrap_or_else(|| (1..).map(CycNum::from_int).find(|x| ok(x, &taken)).expect("finitely many exclusions"));
            taken.push(key(&x, kind));
            c.insert(k, x);
        }
    }
    c
}

/// `Tr(Q) = Σ n_i · ram(q_i) · π_un(q_i)`.
pub fn trace(q: &PointedIrregularType) -> ExpFactor {
    q.entries()
        .iter()
        .fold(ExpFactor::zero(), |acc, (n, f)| acc.add(&f.unramified_part().scale(&CycNum::from_int(*n as i64 * f.ram() as i64))))
}

/// `pr(Q) = Q − Tr(Q)/rank`.
pub fn trace_project(q: &PointedIrregularType) -> PointedIrregularType {
    let rank = q.rank();
    if rank == 0 {
        return q.clone();
    }
    let shift = trace(q).scale(&CycNum::from_rat(Rat::new(1.into(), (rank as i64).into())));
    let entries = q.entries().iter().map(|(n, f)| (*n, f.sub(&shift))).collect();
    PointedIrregularType::new(entries).expect("a common shift keeps orbits distinct")
}

/// The moduli number read from a realisation's configuration space:
/// one plus the special dimension.
pub fn moduli_from_config(t: &FissionTree) -> Result<u64> {
    Ok(1 + factorize(&t.truncate(None)?).special_dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::puiseux::{parse_factor, parse_type};

    fn big() -> PointedIrregularType {
        parse_type("[(1, x^(3/2)+x), (1, x^(3/2)+2*x), (1, x^(1/3)), (1, 2*x^(1/3))]").unwrap()
    }

    fn find(tb: &TruncatedTree, h: Rat, leaf: usize) -> VertexId {
        let t = tb.tree();
        t.ancestors(t.labels().unwrap()[leaf]).into_iter().find(|&a| t.height(a) == &h).unwrap()
    }

    #[test]
    fn big_example_factorization() {
        let (tb, _) = type_to_realisation(&big()).unwrap();
        let f = factorize(&tb);
        assert_eq!((f.total_dim, f.special_dim), (8, 7));
        let mut expected = vec![
            FactorKind::Star { n: 1, big_n: 2 },
            FactorKind::Braid { n: 2 },
            FactorKind::Braid { n: 1 },
            FactorKind::Braid { n: 1 },
            FactorKind::Braid { n: 1 },
            FactorKind::Star { n: 2, big_n: 3 },
        ];
        expected.sort();
        assert_eq!(f.factor_multiset(), expected);
        assert_eq!(f.pi1_string(), "PB_2 × P(2,1,1) × P(3,1,2)");
        assert!(!f.is_abelian());
        assert_eq!(f.betti1(), 1 + 1 + 2 + 3);
    }

    #[test]
    fn two_circle_examples() {
        let q = parse_type("[(1, x^(3/2)+x^(1/2)), (1, x^(3/2)+2*x^(1/2))]").unwrap();
        let f = factorize(&type_to_realisation(&q).unwrap().0);
        let mut expected = vec![FactorKind::Star { n: 1, big_n: 2 }, FactorKind::Braid { n: 1 }, FactorKind::Braid { n: 2 }];
        expected.sort();
        assert_eq!(f.factor_multiset(), expected);
        assert_eq!(f.pi1_rank(), Some(2));

        for (s, r) in [(5i64, 2i64), (7, 3), (2, 5)] {
            let lam = ExpFactor::monomial(CycNum::from_int(1), rat(s, r)).unwrap();
            let mu = ExpFactor::monomial(CycNum::from_int(2), rat(s, r)).unwrap();
            let q = PointedIrregularType::new(vec![(1, lam), (1, mu)]).unwrap();
            let f = factorize(&type_to_realisation(&q).unwrap().0);
            let ones = f.factor_multiset().iter().filter(|k| **k == FactorKind::Braid { n: 1 }).count() as i64;
            assert!(f.factor_multiset().contains(&FactorKind::Star { n: 2, big_n: r as u64 }));
            assert_eq!(ones, 2 * (s - 1));
            assert_eq!(f.factor_multiset().len() as i64, 1 + 2 * (s - 1));
        }
    }

    #[test]
    fn single_circle_torus() {
        let q = parse_type("[(1, x^3 + x^(5/2) + x^(3/2) + x^(1/3))]").unwrap();
        let f = factorize(&type_to_realisation(&q).unwrap().0);
        let stars = f.factor_multiset().into_iter().filter(|k| matches!(k, FactorKind::Star { n: 1, .. })).count();
        assert_eq!(stars, 2);
        assert_eq!(f.pi1_rank(), Some(2));
    }

    #[test]
    fn realisation_conditions() {
        let q = big();
        let (tb, c) = type_to_realisation(&q).unwrap();
        assert!(is_realisation(&tb, &c).unwrap());
        assert!(is_realisation_semantic(&tb, &c).unwrap());
        assert_eq!(realisation_to_type(&tb, &c).unwrap(), q);

        let v3 = find(&tb, rat(1, 3), 2);
        let v4 = find(&tb, rat(1, 3), 3);
        let mut bad = c.clone();
        bad.insert(v3, CycNum::zero());
        assert!(!is_realisation(&tb, &bad).unwrap());
        assert!(!is_realisation_semantic(&tb, &bad).unwrap());

        let mut bad = c.clone();
        bad.insert(v3, CycNum::one());
        bad.insert(v4, CycNum::root_of_unity(3));
        assert!(!is_realisation(&tb, &bad).unwrap());
        assert!(!is_realisation_semantic(&tb, &bad).unwrap());

        let mut short = c.clone();
        short.remove(&v3);
        assert!(matches!(is_realisation(&tb, &short), Err(Error::DomainMismatch)));
    }

    #[test]
    fn constant_realisation() {
        let t = FissionTree::parse_canonical("(3 A (2 A (1 A (0 E x1 #1))))").unwrap();
        let tb = t.truncate(Some(&int(2))).unwrap();
        let c: Realisation = tb.admissible_below_root().into_iter().map(|v| (v, CycNum::one())).collect();
        let q = realisation_to_type(&tb, &c).unwrap();
        assert_eq!(q.entries()[0].1, parse_factor("x^2 + x").unwrap());
    }

    #[test]
    fn sampling() {
        let (tb, _) = type_to_realisation(&big()).unwrap();
        for seed in 0..20 {
            let c = sample_realisation(&tb, seed);
            assert!(is_realisation(&tb, &c).unwrap());
            assert!(is_realisation_semantic(&tb, &c).unwrap());
            assert_eq!(sample_realisation(&tb, seed), c);
        }
    }

    #[test]
    fn trace_free_projection() {
        let q = parse_type("[(1, x^3 + x^(5/2) + x^(3/2) + x^(1/3))]").unwrap();
        let p = trace_project(&q);
        assert_eq!(p.entries()[0].1, parse_factor("x^(5/2) + x^(3/2) + x^(1/3)").unwrap());
        assert!(trace(&p).is_zero());
        assert_eq!(trace_project(&p), p);
        let r = parse_type("[(1, x^(1/2)), (2, x^(2/3))]").unwrap();
        assert_eq!(trace_project(&r), r);
        let mixed = parse_type("[(2, x^2 + x^(1/2)), (1, 3*x)]").unwrap();
        let p = trace_project(&mixed);
        assert!(trace(&p).is_zero());
        assert_eq!(trace_project(&p), p);
    }

    #[test]
    fn moduli_number_matches_config() {
        let t = build_tree_labelled(&big()).unwrap();
        assert_eq!(moduli_from_config(&t).unwrap(), t.moduli_number());
    }
}
