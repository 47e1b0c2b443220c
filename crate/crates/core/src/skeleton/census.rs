//! Enumeration of fission trees with bounded rank and Katz invariant.
//!
//! Trees are grown top-down over the lattice `(1/D)ℤ`, `D = lcm(1..=max_rank)`:
//! at each lattice height every open branch chooses how it splits, branches
//! whose ramification already divides the denominator must continue as
//! authorised vertices, the others may stay empty or open new levels.
//! Results are deduplicated by canonical form.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::arith::rat::{den_u64, floor_i64, lcm_u64};
use crate::arith::{int, Rat};
use crate::error::{Error, Result};
use crate::symmetry::weyl_group;
use crate::tree::{FissionTree, VertexId, VertexKind};

/// Default cap on search states before giving up with `BoundsTooLarge`.
pub const DEFAULT_STATE_LIMIT: usize = 2_000_000;

const MAX_LATTICE_POINTS: i64 = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusRow {
    pub canonical: String,
    pub tree: FissionTree,
    pub rank: u64,
    pub katz: Rat,
    pub moduli: u64,
    /// Dimension of the configuration space at the minimal truncation.
    pub dim: u64,
    pub weyl_order: BigUint,
}

impl CensusRow {
    pub fn to_json(&self) -> Value {
        json!({
            "tree": self.canonical,
            "rank": self.rank,
            "katz": self.katz.to_string(),
            "mu": self.moduli,
            "dim": self.dim,
            "weyl_order": self.weyl_order.to_string(),
        })
    }

    pub fn csv_header() -> &'static str {
        "rank,katz,mu,dim,weyl_order,tree"
    }

    pub fn to_csv(&self) -> String {
        format!("{},{},{},{},{},\"{}\"", self.rank, self.katz, self.moduli, self.dim, self.weyl_order, self.canonical)
    }
}

#[derive(Clone, Copy, Debug)]
enum Split {
    Authorised(usize),
    Empty,
    Mandatory { empty: bool, count: usize },
}

type Part = (Rat, VertexKind, Option<VertexId>, u32);

struct Search {
    heights: Vec<Rat>,
    max_rank: u64,
    katz_bound: Rat,
    states: usize,
    limit: usize,
    found: BTreeMap<String, CensusRow>,
}

/// Every fission tree with `rank ≤ max_rank` and `Katz(𝒯) ≤ katz_bound`, once
/// up to isomorphism, sorted by rank and then canonical form.
pub fn census(max_rank: u64, katz_bound: &Rat) -> Result<Vec<CensusRow>> {
    census_with_limit(max_rank, katz_bound, DEFAULT_STATE_LIMIT)
}

pub fn census_with_limit(max_rank: u64, katz_bound: &Rat, limit: usize) -> Result<Vec<CensusRow>> {
    if max_rank == 0 || katz_bound < &Rat::zero() {
        return Err(Error::BoundsTooLarge("need max_rank ≥ 1 and katz_bound ≥ 0".into()));
    }
    let d = (1..=max_rank).fold(1, lcm_u64);
    let eta = floor_i64(katz_bound) + 1;
    let points = (eta as i128) * (d as i128);
    if points > MAX_LATTICE_POINTS as i128 {
        return Err(Error::BoundsTooLarge(format!("{points} lattice heights")));
    }
    let heights: Vec<Rat> = (1..points as i64).rev().map(|k| Rat::new(k.into(), (d as i64).into())).collect();
    let mut s = Search { heights, max_rank, katz_bound: katz_bound.clone(), states: 0, limit, found: BTreeMap::new() };
    let parts = vec![(int(eta), VertexKind::Authorised, None, 0)];
    s.descend(0, parts, vec![(VertexId(0), 1)])?;
    let mut rows: Vec<CensusRow> = s.found.into_values().collect();
    rows.sort_by(|a, b| a.rank.cmp(&b.rank).then_with(|| a.canonical.cmp(&b.canonical)));
    Ok(rows)
}

impl Search {
    fn tick(&mut self) -> Result<()> {
        self.states += 1;
        if self.states > self.limit {
            return Err(Error::BoundsTooLarge(format!("census explored more than {} states", self.limit)));
        }
        Ok(())
    }

    fn descend(&mut self, idx: usize, parts: Vec<Part>, active: Vec<(VertexId, u64)>) -> Result<()> {
        self.tick()?;
        if idx == self.heights.len() {
            return self.assign_leaves(&parts, &active, 0, &mut Vec::new());
        }
        let h = self.heights[idx].clone();
        let mut choice = Vec::with_capacity(active.len());
        self.choose(idx, &h, &parts, &active, 0, 0, &mut choice)
    }

    /// Chooses a split for `active[i..]`; `used` is the ramification budget
    /// already committed to new branches.
    #[allow(clippy::too_many_arguments)]
    fn choose(
        &mut self,
        idx: usize,
        h: &Rat,
        parts: &[Part],
        active: &[(VertexId, u64)],
        i: usize,
        used: u64,
        choice: &mut Vec<Split>,
    ) -> Result<()> {
        if i == active.len() {
            return self.apply(idx, h, parts, active, choice);
        }
        let rho = active[i].1;
        let rest: u64 = active[i + 1..].iter().map(|a| a.1).sum();
        let budget = self.max_rank.saturating_sub(used + rest);
        let den = den_u64(h);
        if rho.is_multiple_of(den) {
            for k in 1..=(budget / rho) as usize {
                choice.push(Split::Authorised(k));
                self.choose(idx, h, parts, active, i + 1, used + k as u64 * rho, choice)?;
                choice.pop();
            }
            return Ok(());
        }
        if rho <= budget {
            choice.push(Split::Empty);
            self.choose(idx, h, parts, active, i + 1, used + rho, choice)?;
            choice.pop();
        }
        if h <= &self.katz_bound {
            let new_rho = lcm_u64(rho, den);
            for empty in [false, true] {
                let base = if empty { rho } else { 0 };
                let mut count = 1;
                while base + count as u64 * new_rho <= budget {
                    choice.push(Split::Mandatory { empty, count });
                    self.choose(idx, h, parts, active, i + 1, used + base + count as u64 * new_rho, choice)?;
                    choice.pop();
                    count += 1;
                }
            }
        }
        Ok(())
    }

    fn apply(&mut self, idx: usize, h: &Rat, parts: &[Part], active: &[(VertexId, u64)], choice: &[Split]) -> Result<()> {
        if choice.iter().all(|c| matches!(c, Split::Empty)) {
            // No branch is admissible here, so this is not a tree height.
            return self.descend(idx + 1, parts.to_vec(), active.to_vec());
        }
        let mut parts = parts.to_vec();
        let mut next = Vec::new();
        let den = den_u64(h);
        for (&(v, rho), c) in active.iter().zip(choice) {
            let mut add = |kind: VertexKind, r: u64, parts: &mut Vec<Part>| {
                parts.push((h.clone(), kind, Some(v), 0));
                next.push((VertexId(parts.len() - 1), r));
            };
            match *c {
                Split::Authorised(k) => (0..k).for_each(|_| add(VertexKind::Authorised, rho, &mut parts)),
                Split::Empty => add(VertexKind::Empty, rho, &mut parts),
                Split::Mandatory { empty, count } => {
                    if empty {
                        add(VertexKind::Empty, rho, &mut parts);
                    }
                    (0..count).for_each(|_| add(VertexKind::Mandatory, lcm_u64(rho, den), &mut parts));
                }
            }
        }
        self.descend(idx + 1, parts, next)
    }

    fn assign_leaves(&mut self, parts: &[Part], active: &[(VertexId, u64)], i: usize, mults: &mut Vec<u32>) -> Result<()> {
        if i == active.len() {
            return self.record(parts, active, mults);
        }
        let used: u64 = active[..i].iter().zip(mults.iter()).map(|(a, &n)| a.1 * n as u64).sum();
        let rest: u64 = active[i + 1..].iter().map(|a| a.1).sum();
        let rho = active[i].1;
        let mut n = 1u32;
        while used + rest + n as u64 * rho <= self.max_rank {
            mults.push(n);
            self.assign_leaves(parts, active, i + 1, mults)?;
            mults.pop();
            n += 1;
        }
        Ok(())
    }

    fn record(&mut self, parts: &[Part], active: &[(VertexId, u64)], mults: &[u32]) -> Result<()> {
        self.tick()?;
        let mut parts = parts.to_vec();
        for (&(v, _), &n) in active.iter().zip(mults) {
            parts.push((Rat::zero(), VertexKind::Empty, Some(v), n));
        }
        let t = FissionTree::from_parts(parts, None)?;
        let katz = t.katz();
        if katz > self.katz_bound {
            return Ok(());
        }
        let t = t.normalized();
        let canonical = t.canonical_form();
        if self.found.contains_key(&canonical) {
            return Ok(());
        }
        let tb = t.truncate(None)?;
        let row = CensusRow {
            rank: t.rank(),
            katz,
            moduli: t.moduli_number(),
            dim: tb.admissible_below_root().len() as u64,
            weyl_order: weyl_group(&t).order,
            tree: t,
            canonical: canonical.clone(),
        };
        self.found.insert(canonical, row);
        Ok(())
    }
}
