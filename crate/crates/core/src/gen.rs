//! Seeded random objects for property tests, the acceptance suite and
//! benchmarks. Coefficients stay in small cyclotomic fields so that
//! arithmetic remains cheap.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::arith::rat::{den_u64, floor_i64, lcm_u64};
use crate::arith::{CycNum, Rat};
use crate::config::{realisation_to_type, sample_realisation};
use crate::levels::LevelDatum;
use crate::puiseux::{ExpFactor, PointedIrregularType};
use crate::tree::build_tree_labelled;

/// A nonzero coefficient `a·ζ` with `|a| ≤ 3` and `ζ` a root of unity of
/// order dividing 4 or 3.
pub fn random_cyc<R: Rng + ?Sized>(rng: &mut R) -> CycNum {
    let a = *[-3i64, -2, -1, 1, 2, 3].choose(rng).unwrap();
    let base = CycNum::from_int(a);
    match rng.gen_range(0..6) {
        0 => base.mul_root(4, 1),
        1 => base.mul_root(3, rng.gen_range(1..3)),
        _ => base,
    }
}

/// Multiples of `1/r` in `(lo, hi]`, ascending.
fn lattice(r: u64, lo: &Rat, hi: &Rat) -> Vec<Rat> {
    let rr = Rat::from_integer(r.into());
    let start = floor_i64(&(lo * &rr)) + 1;
    let end = floor_i64(&(hi * &rr));
    (start..=end).map(|k| Rat::new(k.into(), (r as i64).into())).collect()
}

/// A factor with `ram ≤ max_ram` and slope `≤ max_slope`.
pub fn random_factor<R: Rng + ?Sized>(rng: &mut R, max_ram: u64, max_slope: u64) -> ExpFactor {
    let r = rng.gen_range(1..=max_ram.max(1));
    let zero = Rat::from_integer(0.into());
    let slots = lattice(r, &zero, &Rat::from_integer(max_slope.into()));
    let terms: Vec<(Rat, CycNum)> = slots.into_iter().filter_map(|k| rng.gen_bool(0.3).then(|| (k, random_cyc(rng)))).collect();
    ExpFactor::from_terms(terms).expect("positive exponents")
}

/// A level datum with every level `≤ max_slope` and ramification `≤ max_ram`.
pub fn random_levels<R: Rng + ?Sized>(rng: &mut R, max_ram: u64, max_slope: u64) -> LevelDatum {
    let mut levels = Vec::new();
    let mut r = 1;
    let mut hi = Rat::from_integer(max_slope.into());
    for _ in 0..rng.gen_range(0..4) {
        let dens: Vec<u64> = (2..=max_ram).filter(|d| lcm_u64(r, *d) > r && lcm_u64(r, *d) <= max_ram).collect();
        let Some(&d) = dens.choose(rng) else { break };
        let cands: Vec<Rat> =
            lattice(d, &Rat::from_integer(0.into()), &hi).into_iter().filter(|k| *k != hi && lcm_u64(r, den_u64(k)) > r).collect();
        let Some(k) = cands.choose(rng).cloned() else { break };
        r = lcm_u64(r, den_u64(&k));
        hi = k.clone();
        levels.push(k);
    }
    LevelDatum::new(levels).expect("levels built with rising ramification")
}

/// Replaces the part of `q` below `cut` with fresh random terms of slope at
/// most `max_slope` whose denominators keep the result within `max_ram`.
fn branch_off<R: Rng + ?Sized>(rng: &mut R, q: &ExpFactor, cut: &Rat, max_ram: u64, max_slope: u64) -> ExpFactor {
    let keep = q.truncate(cut);
    let rams: Vec<u64> = (1..=max_ram.max(1)).filter(|d| lcm_u64(keep.ram(), *d) <= max_ram).collect();
    let r = *rams.choose(rng).unwrap_or(&1);
    let zero = Rat::from_integer(0.into());
    let top = cut.clone().min(Rat::from_integer(max_slope.into()));
    let lower: Vec<(Rat, CycNum)> =
        lattice(r, &zero, &top).into_iter().filter(|k| k < cut).filter_map(|k| rng.gen_bool(0.4).then(|| (k, random_cyc(rng)))).collect();
    keep.add(&ExpFactor::from_terms(lower).expect("positive exponents"))
}

/// A compatible pointed type with `rank ≤ max_rank`, slopes `≤ max_slope`
/// and at most `max_len` entries. Later factors often share a leading part
/// with earlier ones so that trees have interesting branchings.
pub fn random_compatible_type<R: Rng + ?Sized>(rng: &mut R, max_rank: u64, max_slope: u64, max_len: usize) -> PointedIrregularType {
    let mut entries: Vec<(u32, ExpFactor)> = Vec::new();
    let mut rank = 0;
    let target = rng.gen_range(1..=max_len.max(1));
    for _ in 0..4 * target {
        if entries.len() >= target {
            break;
        }
        let room = max_rank - rank;
        if room == 0 {
            break;
        }
        let q = if entries.is_empty() || rng.gen_bool(0.3) {
            random_factor(rng, room, max_slope)
        } else {
            let (_, base) = entries.choose(rng).unwrap();
            let mut cuts: Vec<Rat> = base.exponents().cloned().collect();
            cuts.push(Rat::from_integer((max_slope + 1).into()));
            let cut = cuts.choose(rng).unwrap().clone();
            branch_off(rng, base, &cut, room, max_slope)
        };
        let n = if rng.gen_bool(0.2) { 2 } else { 1 };
        if rank + n as u64 * q.ram() > max_rank || entries.iter().any(|(_, e)| e.same_orbit(&q)) {
            continue;
        }
        rank += n as u64 * q.ram();
        entries.push((n, q));
    }
    if entries.is_empty() {
        entries.push((1, ExpFactor::zero()));
    }
    PointedIrregularType::new(entries).expect("orbits checked").make_compatible()
}

/// A second type to compare with `q`: a fresh realisation of its tree, a
/// small perturbation, or an unrelated random type with as many entries.
pub fn random_partner<R: Rng + ?Sized>(rng: &mut R, q: &PointedIrregularType, max_rank: u64, max_slope: u64) -> PointedIrregularType {
    match rng.gen_range(0..3) {
        0 => {
            let tb = build_tree_labelled(q).expect("compatible").truncate(Some(&q.katz())).expect("own Katz bound");
            let c = sample_realisation(&tb, rng.gen());
            realisation_to_type(&tb, &c).expect("sampled realisations are valid")
        }
        1 => {
            for _ in 0..8 {
                let mut entries = q.entries().to_vec();
                let i = rng.gen_range(0..entries.len());
                let f = &entries[i].1;
                let exps: Vec<Rat> = f.exponents().cloned().collect();
                let changed = match (exps.choose(rng), rng.gen_range(0..3)) {
                    (Some(k), 0) => f.sub(&ExpFactor::monomial(f.coeff(k).unwrap().clone(), k.clone()).unwrap()),
                    (Some(k), 1) => f.add(&ExpFactor::monomial(random_cyc(rng), k.clone()).unwrap()),
                    _ => f.add(&random_factor(rng, (max_rank / entries[i].0 as u64).max(1).min(f.ram().max(2)), max_slope)),
                };
                entries[i].1 = changed;
                let rank: u64 = entries.iter().map(|(n, f)| *n as u64 * f.ram()).sum();
                if rank > max_rank {
                    continue;
                }
                if let Ok(p) = PointedIrregularType::new(entries) {
                    return p.make_compatible();
                }
            }
            q.clone()
        }
        _ => loop {
            let p = random_compatible_type(rng, max_rank, max_slope, q.len());
            if p.len() == q.len() || rng.gen_bool(0.2) {
                return p;
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_types_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let q = random_compatible_type(&mut rng, 8, 3, 4);
            assert!(q.rank() <= 8);
            assert!(q.katz() <= Rat::from_integer(3.into()));
            assert!(q.is_compatible());
            let p = random_partner(&mut rng, &q, 8, 3);
            assert!(p.is_compatible());
        }
        for _ in 0..100 {
            let l = random_levels(&mut rng, 6, 3);
            assert!(l.ram() <= 6);
        }
    }
}
