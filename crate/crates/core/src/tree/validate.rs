//! Axiom checks for fission trees.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::arith::Rat;
use crate::levels::{exponent_sets, LevelDatum};

use super::{FissionTree, VertexId, VertexKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: u8,
    pub vertices: Vec<VertexId>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        write!(f, "axiom {}: {} [{}]", self.axiom, self.message, vs.join(", "))
    }
}

fn push(out: &mut Vec<Violation>, axiom: u8, vertices: Vec<VertexId>, message: impl Into<String>) {
    out.push(Violation { axiom, vertices, message: message.into() });
}

/// Checks the five fission-tree axioms; an empty result means valid. A tree
/// whose root is empty is checked as a truncated tree.
pub fn validate(t: &FissionTree) -> Vec<Violation> {
    let mut out = Vec::new();
    let root = t.root();
    let truncated = t.is_truncated();

    // Structure.
    if !t.top().is_integer() || !t.top().is_positive() {
        push(&mut out, 2, vec![root], "root height must be a positive integer");
    }
    if truncated && t.children(root).is_empty() {
        push(&mut out, 2, vec![root], "truncated root has no children");
    }
    for (id, v) in t.vertices() {
        if let Some(p) = v.parent {
            if t.height(p) <= &v.height {
                push(&mut out, 2, vec![p, id], "heights must strictly decrease towards the leaves");
            }
        }
        if v.children.is_empty() {
            if !v.height.is_zero() {
                push(&mut out, 2, vec![id], "leaf not at height 0");
            }
            if v.kind != VertexKind::Empty {
                push(&mut out, 2, vec![id], "leaf must be empty");
            }
            if v.multiplicity == 0 {
                push(&mut out, 2, vec![id], "leaf needs a positive multiplicity");
            }
        } else {
            if v.height.is_negative() || v.height.is_zero() {
                push(&mut out, 2, vec![id], "inner vertex at height 0");
            }
            if v.multiplicity != 0 {
                push(&mut out, 2, vec![id], "only leaves carry multiplicities");
            }
        }
    }
    if !out.is_empty() {
        return out;
    }

    // Heights: every branch passes through every height, and every nonzero
    // height below the root carries an admissible vertex.
    let all: BTreeSet<Rat> = t.heights().into_iter().collect();
    let adm = t.admissible_heights();
    for h in &all {
        if !h.is_zero() && h != t.top() && !adm.contains(h) {
            let at: Vec<VertexId> = t.vertices().filter(|(_, v)| &v.height == h).map(|(id, _)| id).collect();
            push(&mut out, 1, at, format!("no admissible vertex at height {h}"));
        }
    }
    if !truncated && !adm.contains(t.top()) {
        push(&mut out, 1, vec![root], "untruncated root must be admissible");
    }
    for leaf in t.leaves() {
        let path: BTreeSet<Rat> = t.ancestors(leaf).into_iter().map(|a| t.height(a).clone()).collect();
        if path != all {
            push(&mut out, 1, vec![leaf], "branch misses some vertex height");
        }
    }

    for leaf in t.leaves() {
        // Mandatory heights along the branch form a level datum.
        let levels = t.branch_levels(leaf);
        let datum = match LevelDatum::new(levels.clone()) {
            Ok(d) => d,
            Err(e) => {
                let ms: Vec<VertexId> = t.ancestors(leaf).into_iter().filter(|&a| t.kind(a) == VertexKind::Mandatory).collect();
                push(&mut out, 3, ms, format!("mandatory heights are not a level datum: {e}"));
                continue;
            }
        };
        // Admissible heights along the branch are exactly A(L) below the root.
        let bound = t.top().clone();
        let mut expected: BTreeSet<Rat> = exponent_sets(&datum, &bound).expect("datum is valid").admissible.into_iter().collect();
        if truncated {
            expected.remove(&bound);
        }
        let path = t.ancestors(leaf);
        let actual: BTreeSet<Rat> = path.iter().filter(|&&a| t.kind(a).is_admissible()).map(|&a| t.height(a).clone()).collect();
        if actual != expected {
            let wrong: Vec<VertexId> = path
                .iter()
                .copied()
                .filter(|&a| !t.height(a).is_zero() && (t.kind(a).is_admissible() != expected.contains(t.height(a))))
                .filter(|&a| !(truncated && a == root))
                .collect();
            push(&mut out, 4, wrong, "admissible heights on the branch differ from those of its levels");
        }
    }

    for b in t.branch_vertices() {
        let kinds: Vec<VertexKind> = t.children(b).iter().map(|&c| t.kind(c)).collect();
        let empties = kinds.iter().filter(|k| **k == VertexKind::Empty).count();
        let all_auth = kinds.iter().all(|k| *k == VertexKind::Authorised);
        let mand = kinds.iter().filter(|k| **k == VertexKind::Mandatory).count();
        if !(all_auth || (empties <= 1 && empties + mand == kinds.len())) {
            let mut vs = vec![b];
            vs.extend_from_slice(t.children(b));
            push(&mut out, 5, vs, "children of a branch vertex have an illegal kind pattern");
        }
    }
    out
}
