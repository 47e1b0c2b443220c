use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::arith::rat::floor_i64;
use crate::arith::{int, Rat};
use crate::error::{Error, Result};
use crate::levels::{exponent_sets, levels_of};
use crate::puiseux::{point, ExpFactor, IrregularClass, PointedIrregularType};

use super::{FissionTree, VertexId, VertexKind};

/// Labelled fission tree of a compatible pointed type; leaf `i` carries
/// entry `i`. The root sits at `⌊Katz(Q)⌋ + 1`.
pub fn build_tree_labelled(q: &PointedIrregularType) -> Result<FissionTree> {
    if !q.is_compatible() {
        return Err(Error::NotCompatible);
    }
    if q.is_empty() {
        return Err(Error::InvalidTree("a type with no entries has no tree".into()));
    }
    let factors: Vec<&ExpFactor> = q.factors().collect();
    let levels: Vec<_> = factors.iter().map(|f| levels_of(f)).collect();
    let top = int(floor_i64(&q.katz()) + 1);

    let mut heights: BTreeSet<Rat> = BTreeSet::new();
    heights.insert(top.clone());
    for l in &levels {
        heights.extend(exponent_sets(l, &top)?.admissible);
    }

    let mut parts: Vec<(Rat, VertexKind, Option<VertexId>, u32)> = Vec::new();
    // Current vertex of every entry at the height just processed.
    let mut current: Vec<Option<VertexId>> = vec![None; factors.len()];
    for h in heights.iter().rev() {
        let mut groups: BTreeMap<ExpFactor, VertexId> = BTreeMap::new();
        for (i, f) in factors.iter().enumerate() {
            let t = f.truncate(h);
            let id = *groups.entry(t).or_insert_with(|| {
                let kind = if levels[i].contains(h) {
                    VertexKind::Mandatory
                } else if levels[i].is_admissible(h) {
                    VertexKind::Authorised
                } else {
                    VertexKind::Empty
                };
                parts.push((h.clone(), kind, current[i], 0));
                VertexId(parts.len() - 1)
            });
            current[i] = Some(id);
        }
    }
    let mut labels = Vec::with_capacity(factors.len());
    for (i, (n, _)) in q.entries().iter().enumerate() {
        parts.push((Rat::zero(), VertexKind::Empty, current[i], *n));
        labels.push(VertexId(parts.len() - 1));
    }
    FissionTree::from_parts(parts, Some(labels))
}

/// Unlabelled fission tree of an irregular class.
pub fn build_tree(theta: &IrregularClass) -> Result<FissionTree> {
    Ok(build_tree_labelled(&point(theta))?.without_labels())
}
