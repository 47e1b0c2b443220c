//! Acceptance suite. Prints one PASS/FAIL line per criterion with its
//! runtime and exits nonzero if any check fails or overruns its budget.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fission_core::arith::rat::lcm_u64;
use fission_core::arith::{den_u64, int, rat, CycNum, Rat};
use fission_core::config::{
    factorize, is_realisation, is_realisation_semantic, realisation_to_type, sample_realisation, type_to_realisation, FactorKind,
};
use fission_core::fission::{fission_datum, numerically_equivalent};
use fission_core::gen::{random_compatible_type, random_cyc, random_factor, random_partner};
use fission_core::levels::{exponent_sets, levels_of, LevelDatum};
use fission_core::puiseux::{classify, parse_factor, parse_type, ExpFactor, PointedIrregularType};
use fission_core::skeleton::{census, skeleton_of};
use fission_core::symmetry::{one_circle_full_group, weyl_group, weyl_order_brute};
use fission_core::tree::{build_tree, build_tree_labelled, validate, FissionTree, VertexId, VertexKind};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

/// Name, runtime budget and check.
type Criterion = (&'static str, Duration, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn big() -> PointedIrregularType {
    parse_type("[(1, x^(3/2)+x), (1, x^(3/2)+2*x), (1, x^(1/3)), (1, 2*x^(1/3))]").unwrap()
}

fn levels_golden() -> Check {
    let q = parse_factor("x^3+x^(5/2)+x^(3/2)+x^(1/3)").map_err(|e| e.to_string())?;
    let l = levels_of(&q);
    ensure!(l.levels() == [rat(5, 2), rat(1, 3)], "levels {l}");
    ensure!(l.ram_indices() == [2, 6], "ramification indices {:?}", l.ram_indices());
    let adm = exponent_sets(&l, &int(3)).map_err(|e| e.to_string())?.admissible;
    let want = [int(3), rat(5, 2), int(2), rat(3, 2), int(1), rat(1, 2), rat(1, 3), rat(1, 6)];
    ensure!(adm == want, "admissible {adm:?}");
    ensure!(l.non_integral_admissible_count() == 5, "count {}", l.non_integral_admissible_count());
    Ok("levels 5/2 1/3, admissible set and count 5".into())
}

/// Up to four levels, each with denominator at most 12, whose running lcm
/// strictly increases.
fn random_level_datum(rng: &mut ChaCha8Rng) -> LevelDatum {
    loop {
        let m = rng.gen_range(1..=4);
        let mut r = 1u64;
        let mut hi = int(4);
        let mut levels = Vec::new();
        for _ in 0..m {
            let dens: Vec<u64> = (2..=12).filter(|&d| lcm_u64(r, d) > r).collect();
            let d = *dens.choose(rng).unwrap();
            let cands: Vec<Rat> = (1..(&hi * int(d as i64)).ceil().to_integer().try_into().unwrap_or(1i64))
                .map(|k| Rat::new(k.into(), (d as i64).into()))
                .filter(|k| *k < hi && lcm_u64(r, den_u64(k)) > r)
                .collect();
            let Some(k) = cands.choose(rng).cloned() else { break };
            r = lcm_u64(r, den_u64(&k));
            hi = k.clone();
            levels.push(k);
        }
        if !levels.is_empty() {
            return LevelDatum::new(levels).expect("built with rising lcm");
        }
    }
}

fn counting_formula() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut max_len = 0;
    for _ in 0..500 {
        let l = random_level_datum(&mut rng);
        max_len = max_len.max(l.len());
        let top = l.levels()[0].clone();
        let listed = exponent_sets(&l, &top).map_err(|e| e.to_string())?.admissible.iter().filter(|k| !k.is_integer()).count() as u64;
        // Scan the lattice (1/Ram)ℤ and test each point on its own.
        let r = l.ram() as i64;
        let scanned = (1..=(&top * int(r)).to_integer().try_into().unwrap_or(0i64))
            .map(|j| Rat::new(j.into(), r.into()))
            .filter(|k| !k.is_integer() && l.is_admissible(k))
            .count() as u64;
        let formula = l.non_integral_admissible_count();
        ensure!(listed == formula && scanned == formula, "{l}: listed {listed}, scanned {scanned}, formula {formula}");
    }
    Ok(format!("500 level data, up to {max_len} levels"))
}

fn oracle_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut equal = 0;
    for n in 0..300 {
        let a = random_compatible_type(&mut rng, 8, 3, 4);
        let b = random_partner(&mut rng, &a, 8, 3);
        ensure!(a.rank() <= 8 && b.rank() <= 8, "rank bound");
        let num = numerically_equivalent(&a, &b);
        let data = fission_datum(&a).map_err(|e| e.to_string())? == fission_datum(&b).map_err(|e| e.to_string())?;
        let ta = build_tree_labelled(&a).map_err(|e| e.to_string())?;
        let tb = build_tree_labelled(&b).map_err(|e| e.to_string())?;
        let trees = ta.isomorphic_labelled(&tb);
        ensure!(num == data && data == trees, "pair {n}: {a} vs {b}: slopes {num}, data {data}, trees {trees}");
        equal += num as usize;
    }
    ensure!(equal > 0 && equal < 300, "only one outcome seen ({equal} equivalent)");
    Ok(format!("300 pairs, {equal} equivalent"))
}

/// The truncated tree of the big example, entered vertex by vertex.
fn hand_tree() -> FissionTree {
    use VertexKind::{Authorised as A, Empty as E, Mandatory as M};
    let v = |i: usize| Some(VertexId(i));
    let parts = vec![
        (int(2), E, None, 0),
        (rat(3, 2), M, v(0), 0),
        (rat(3, 2), E, v(0), 0),
        (int(1), A, v(1), 0),
        (int(1), A, v(1), 0),
        (int(1), A, v(2), 0),
        (rat(1, 2), A, v(3), 0),
        (rat(1, 2), A, v(4), 0),
        (rat(1, 2), E, v(5), 0),
        (rat(1, 3), E, v(6), 0),
        (rat(1, 3), E, v(7), 0),
        (rat(1, 3), M, v(8), 0),
        (rat(1, 3), M, v(8), 0),
        (int(0), E, v(9), 1),
        (int(0), E, v(10), 1),
        (int(0), E, v(11), 1),
        (int(0), E, v(12), 1),
    ];
    FissionTree::from_parts(parts, Some((13..17).map(VertexId).collect())).unwrap()
}

fn big_example() -> Check {
    let q = big();
    ensure!(q.rank() == 10, "rank {}", q.rank());
    let (tb, _) = type_to_realisation(&q).map_err(|e| e.to_string())?;
    ensure!(*tb.eta() == int(2), "eta {}", tb.eta());
    let t = tb.tree();
    let heights: BTreeSet<Rat> = tb.admissible_below_root().iter().map(|&v| t.height(v).clone()).collect();
    ensure!(heights == BTreeSet::from([rat(3, 2), int(1), rat(1, 2), rat(1, 3)]), "heights {heights:?}");
    ensure!(t.isomorphic_labelled(&hand_tree()), "tree {}", t.labelled_canonical_form());
    let f = factorize(&tb);
    ensure!((f.total_dim, f.special_dim) == (8, 7), "dims {} {}", f.total_dim, f.special_dim);
    let mu = build_tree(&classify(&q)).map_err(|e| e.to_string())?.moduli_number();
    ensure!(mu == 8, "moduli number {mu}");
    let mut want = vec![
        FactorKind::Star { n: 1, big_n: 2 },
        FactorKind::Braid { n: 2 },
        FactorKind::Braid { n: 1 },
        FactorKind::Braid { n: 1 },
        FactorKind::Braid { n: 1 },
        FactorKind::Star { n: 2, big_n: 3 },
    ];
    want.sort();
    ensure!(f.factor_multiset() == want, "factors {:?}", f.factor_multiset());
    let at_half = f.factors.iter().find(|(v, _)| t.height(*v) == &rat(1, 2) && !t.kind(*v).is_admissible()).map(|(_, k)| *k);
    ensure!(at_half == Some(FactorKind::Star { n: 2, big_n: 3 }), "factor at the empty 1/2 vertex {at_half:?}");
    Ok("rank 10, eta 2, dim 8, special 7, mu 8".into())
}

fn factors_of(text: &str) -> std::result::Result<(Vec<FactorKind>, Option<u64>), String> {
    let q = parse_type(text).map_err(|e| e.to_string())?;
    let (tb, _) = type_to_realisation(&q).map_err(|e| e.to_string())?;
    let f = factorize(&tb);
    Ok((f.factor_multiset(), f.pi1_rank()))
}

fn sorted(mut v: Vec<FactorKind>) -> Vec<FactorKind> {
    v.sort();
    v
}

fn equal_slopes() -> Check {
    for (s, r) in [(1, 2), (5, 2), (7, 3), (2, 5), (4, 3)] {
        let (got, _) = factors_of(&format!("[(1, x^({s}/{r})), (1, 2*x^({s}/{r}))]"))?;
        let mut want = vec![FactorKind::Star { n: 2, big_n: r }];
        want.extend(std::iter::repeat_n(FactorKind::Braid { n: 1 }, 2 * (s as usize - 1)));
        ensure!(got == sorted(want), "s/r = {s}/{r}: {got:?}");
    }
    Ok("X*_{2,r} x C^{2(s-1)} for five s/r".into())
}

fn shared_level() -> Check {
    let (got, rank) = factors_of("[(1, x^(3/2)+x^(1/2)), (1, x^(3/2)+2*x^(1/2))]")?;
    let want = sorted(vec![FactorKind::Star { n: 1, big_n: 2 }, FactorKind::Braid { n: 1 }, FactorKind::Braid { n: 2 }]);
    ensure!(got == want && rank == Some(2), "{got:?} {rank:?}");
    Ok("X*_{1,2} x X_1 x X_2, pi_1 of rank 2".into())
}

fn split_level() -> Check {
    let (got, rank) = factors_of("[(1, x^(3/2)+x^(1/3)), (1, x^(3/2))]")?;
    let want = sorted(vec![
        FactorKind::Star { n: 1, big_n: 2 },
        FactorKind::Star { n: 1, big_n: 3 },
        FactorKind::Braid { n: 1 },
        FactorKind::Braid { n: 1 },
        FactorKind::Braid { n: 1 },
    ]);
    ensure!(got == want && rank == Some(2), "{got:?} {rank:?}");
    Ok("(C*)^2 x C^3, pi_1 of rank 2".into())
}

/// Each example has its own budget, so they are timed one by one.
fn two_circle_suite() -> Check {
    let mut notes = Vec::new();
    for (name, check) in [("first", equal_slopes as fn() -> Check), ("second", shared_level), ("third", split_level)] {
        let start = Instant::now();
        let note = check().map_err(|e| format!("{name} example: {e}"))?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        ensure!(start.elapsed() < Duration::from_millis(10), "{name} example took {ms:.2} ms, budget 10 ms");
        notes.push(format!("{note} in {ms:.2} ms"));
    }
    Ok(notes.join("; "))
}

fn round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut accepted, mut rejected) = (0, 0);
    for _ in 0..300 {
        let q = random_compatible_type(&mut rng, 8, 3, 5);
        let (tb, c) = type_to_realisation(&q).map_err(|e| e.to_string())?;
        ensure!(realisation_to_type(&tb, &c).map_err(|e| e.to_string())? == q, "round trip of {q}");
        let keys: Vec<VertexId> = c.keys().copied().collect();
        for _ in 0..3 {
            let mut d = c.clone();
            if let Some(&v) = keys.choose(&mut rng) {
                let sib = tb.tree().children(tb.tree().parent(v).unwrap()).iter().copied().find(|s| *s != v && c.contains_key(s));
                let x = match (rng.gen_range(0..3), sib) {
                    (0, _) => CycNum::zero(),
                    (1, Some(s)) => c[&s].clone(),
                    _ => random_cyc(&mut rng),
                };
                d.insert(v, x);
            }
            let syn = is_realisation(&tb, &d).map_err(|e| e.to_string())?;
            let sem = is_realisation_semantic(&tb, &d).map_err(|e| e.to_string())?;
            ensure!(syn == sem, "{q}: conditions say {syn}, rebuilt tree says {sem}");
            if syn {
                accepted += 1
            } else {
                rejected += 1
            }
        }
    }
    ensure!(rejected > 0, "no perturbation was rejected");
    Ok(format!("300 types, {accepted} perturbed realisations accepted and {rejected} rejected"))
}

fn weyl_groups() -> Check {
    for r in 1..=12u64 {
        let q = PointedIrregularType::new(vec![(1, ExpFactor::monomial(CycNum::one(), rat(1, r as i64)).unwrap())]).unwrap();
        let t = build_tree(&classify(&q)).map_err(|e| e.to_string())?;
        ensure!(weyl_group(&t).order == BigUint::from(r), "ram {r}: order {}", weyl_group(&t).order);
    }
    for (p, n) in [(2u64, 2u64), (3, 2), (2, 3)] {
        let entries = (1..=p).map(|a| (1, ExpFactor::monomial(CycNum::from_int(a as i64), rat(1, n as i64)).unwrap())).collect();
        let t = build_tree(&classify(&PointedIrregularType::new(entries).unwrap())).map_err(|e| e.to_string())?;
        let fact: u64 = (1..=p).product();
        let want = BigUint::from(fact * n.pow(p as u32));
        let w = weyl_group(&t);
        ensure!(w.order == want && weyl_order_brute(&t) == want, "(p, N) = ({p}, {n}): {}", w.order);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases = 0;
    while cases < 50 {
        let q = random_compatible_type(&mut rng, 12, 2, 5);
        if q.ram() > 6 {
            continue;
        }
        let t = build_tree(&classify(&q)).map_err(|e| e.to_string())?;
        let (fast, slow) = (weyl_group(&t).order, weyl_order_brute(&t));
        ensure!(fast == slow, "{q}: recursive {fast}, brute force {slow}");
        cases += 1;
    }
    Ok("cyclic, generalised symmetric and 50 random trees".into())
}

fn one_circle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut cases = 0;
    while cases < 100 {
        let q = random_factor(&mut rng, 12, 3);
        let r = q.ram();
        if r == 1 {
            continue;
        }
        let l = levels_of(&q);
        let ns: Vec<u64> = l.levels().iter().map(|k| (k * int(r as i64)).to_integer().try_into().unwrap()).collect();
        let g = ns.iter().fold(r, |g, n| g.gcd(n));
        ensure!(g == 1, "{q}: gcd(r, n_i) = {g}");
        let (free, diag) = one_circle_full_group(&q);
        ensure!(free == l.len() && diag.iter().all(|d| d.is_one()), "{q}: free rank {free}, diagonal {diag:?}");
        cases += 1;
    }
    Ok("100 ramified factors".into())
}

fn tame() -> Check {
    let tame = fission_core::puiseux::parse_class("<0>").unwrap();
    for g in 0..=3u32 {
        for m in 0..=6usize {
            let s = skeleton_of(g, &vec![tame.clone(); m]).map_err(|e| e.to_string())?;
            let want = 3 * g as i64 - 3 + m as i64;
            ensure!(s.moduli_dimension() == want, "g {g}, m {m}: {}", s.moduli_dimension());
        }
    }
    Ok("g <= 3, m <= 6".into())
}

/// Isomorphism by matching children recursively, without canonical forms.
fn iso(a: &FissionTree, u: VertexId, b: &FissionTree, v: VertexId) -> bool {
    let (x, y) = (a.vertex(u), b.vertex(v));
    if x.height != y.height || x.kind != y.kind || x.multiplicity != y.multiplicity || x.children.len() != y.children.len() {
        return false;
    }
    fn matching(a: &FissionTree, us: &[VertexId], b: &FissionTree, vs: &mut Vec<VertexId>) -> bool {
        let Some((&u, rest)) = us.split_first() else { return true };
        for i in 0..vs.len() {
            if iso(a, u, b, vs[i]) {
                let v = vs.swap_remove(i);
                if matching(a, rest, b, vs) {
                    return true;
                }
                vs.push(v);
                let last = vs.len() - 1;
                vs.swap(i, last);
            }
        }
        false
    }
    matching(a, &x.children, b, &mut y.children.clone())
}

fn census_soundness() -> Check {
    let rows = census(3, &int(1)).map_err(|e| e.to_string())?;
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            let (ta, tb) = (&a.tree, &b.tree);
            ensure!(!iso(ta, ta.root(), tb, tb.root()), "duplicate {}", a.canonical);
        }
    }
    for (i, row) in rows.iter().enumerate() {
        let t = &row.tree;
        ensure!(validate(t).is_empty(), "{} fails validation: {:?}", row.canonical, validate(t));
        ensure!(t.rank() <= 3 && t.katz() <= int(1), "{} out of bounds", row.canonical);
        let labelled = t.with_labels(t.leaves()).map_err(|e| e.to_string())?;
        let tb = labelled.truncate(None).map_err(|e| e.to_string())?;
        let c = sample_realisation(&tb, i as u64);
        ensure!(is_realisation(&tb, &c).map_err(|e| e.to_string())?, "{}: sample rejected", row.canonical);
        let q = realisation_to_type(&tb, &c).map_err(|e| e.to_string())?;
        let rebuilt = build_tree(&classify(&q)).map_err(|e| e.to_string())?.normalized();
        ensure!(iso(&rebuilt, rebuilt.root(), t, t.root()), "{}: realised by {q} with a different tree", row.canonical);
        let special = factorize(&tb).special_dim;
        ensure!(row.moduli == 1 + special, "{}: mu {} but special dim {special}", row.canonical, row.moduli);
    }
    Ok(format!("{} trees", rows.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("levels golden test", Duration::from_millis(1), levels_golden),
        ("non-integral admissible counting formula", Duration::from_secs(5), counting_formula),
        ("oracle equivalence", Duration::from_secs(60), oracle_equivalence),
        ("big example", Duration::from_millis(10), big_example),
        ("two-circle examples", Duration::from_millis(30), two_circle_suite),
        ("realisation round trip", Duration::from_secs(30), round_trip),
        ("Weyl groups", Duration::from_secs(60), weyl_groups),
        ("one-circle full group", Duration::from_secs(5), one_circle),
        ("tame specialisation", Duration::from_millis(1), tame),
        ("census soundness", Duration::from_secs(30), census_soundness),
    ];
    // Warm the cyclotomic caches so the millisecond budgets time the checks.
    let _ = CycNum::root_of_unity(12).pow(5);
    let mut failed = 0;
    for (n, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let ms = took.as_secs_f64() * 1e3;
        let limit = budget.as_secs_f64() * 1e3;
        match outcome {
            Ok(detail) if took <= *budget => println!("PASS {:>2} {name}: {detail} ({ms:.2} ms, budget {limit} ms)", n + 1),
            Ok(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} but took {ms:.2} ms, budget {limit} ms", n + 1);
            }
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({ms:.2} ms)", n + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
