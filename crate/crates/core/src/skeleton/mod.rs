//! Topological skeleta, moduli dimensions and the bounded census of trees.

mod census;

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::arith::{int, Rat};
use crate::error::{Error, Result};
use crate::puiseux::IrregularClass;
use crate::tree::{build_tree, FissionTree};

pub use census::{census, census_with_limit, CensusRow, DEFAULT_STATE_LIMIT};

/// Genus together with the multiset of fission trees at the marked points,
/// keyed by canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub genus: u32,
    forest: BTreeMap<String, (FissionTree, usize)>,
}

impl Skeleton {
    pub fn new(genus: u32, trees: impl IntoIterator<Item = FissionTree>) -> Skeleton {
        let mut forest: BTreeMap<String, (FissionTree, usize)> = BTreeMap::new();
        for t in trees {
            let t = t.without_labels().normalized();
            forest.entry(t.canonical_form()).or_insert((t, 0)).1 += 1;
        }
        Skeleton { genus, forest }
    }

    /// `(canonical form, multiplicity)` in canonical order.
    pub fn forest(&self) -> impl Iterator<Item = (&str, usize)> {
        self.forest.iter().map(|(k, (_, n))| (k.as_str(), *n))
    }

    pub fn trees(&self) -> impl Iterator<Item = (&FissionTree, usize)> {
        self.forest.values().map(|(t, n)| (t, *n))
    }

    pub fn points(&self) -> usize {
        self.forest.values().map(|(_, n)| n).sum()
    }

    /// `3g − 3 + Σ μ(𝒯)`, unclamped.
    pub fn moduli_dimension(&self) -> i64 {
        let mu: i64 = self.trees().map(|(t, n)| t.moduli_number() as i64 * n as i64).sum();
        3 * self.genus as i64 - 3 + mu
    }

    /// `2g − 2 + Σ (1 + Katz(𝒯))`.
    pub fn dm_weight(&self) -> Rat {
        let nu: Rat = self.trees().map(|(t, n)| (int(1) + t.katz()) * int(n as i64)).sum();
        int(2 * self.genus as i64 - 2) + nu
    }

    pub fn expect_dm(&self) -> bool {
        self.dm_weight() > int(0)
    }

    pub fn to_json(&self) -> Value {
        let forest: Vec<Value> = self.forest().map(|(k, n)| json!({"tree": k, "mult": n})).collect();
        json!({"genus": self.genus, "forest": forest})
    }

    /// Reads `{genus, forest: [{tree, mult}]}`; a bare string entry counts once.
    pub fn from_json(v: &Value) -> Result<Skeleton> {
        let bad = |m: &str| Error::InvalidTree(m.to_string());
        let genus = v.get("genus").and_then(Value::as_u64).ok_or_else(|| bad("missing genus"))? as u32;
        let mut trees = Vec::new();
        for e in v.get("forest").and_then(Value::as_array).ok_or_else(|| bad("missing forest"))? {
            let (form, mult) = match e {
                Value::String(s) => (s.as_str(), 1),
                _ => (
                    e.get("tree").and_then(Value::as_str).ok_or_else(|| bad("forest entry without tree"))?,
                    e.get("mult").and_then(Value::as_u64).unwrap_or(1),
                ),
            };
            let t = FissionTree::parse_canonical(form)?;
            for _ in 0..mult {
                trees.push(t.clone());
            }
        }
        Ok(Skeleton::new(genus, trees))
    }
}

pub fn skeleton_of(genus: u32, classes: &[IrregularClass]) -> Result<Skeleton> {
    let trees = classes.iter().map(build_tree).collect::<Result<Vec<_>>>()?;
    Ok(Skeleton::new(genus, trees))
}
