//! Fission trees.
//!
//! A tree is stored as a finite vertex set with rational heights. The stored
//! root sits at an integer height; everything above it is a chain of
//! authorised integer vertices and is left implicit. A [`TruncatedTree`] has
//! its root at `η = ⌊Katz⌋ + 1` marked empty.

mod build;
mod canon;
mod io;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::arith::rat::{den_u64, floor_i64, lcm_u64};
use crate::arith::{int, Rat};
use crate::error::{Error, Result};
use crate::fission::FissionDatum;
use crate::levels::{exponent_sets, LevelDatum};

pub use build::{build_tree, build_tree_labelled};
pub use validate::{validate, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Ordered by the rank used in canonical forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Mandatory,
    Authorised,
    Empty,
}

impl VertexKind {
    pub fn is_admissible(self) -> bool {
        self != VertexKind::Empty
    }

    pub fn letter(self) -> char {
        match self {
            VertexKind::Mandatory => 'M',
            VertexKind::Authorised => 'A',
            VertexKind::Empty => 'E',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VertexKind::Mandatory => "mandatory",
            VertexKind::Authorised => "authorised",
            VertexKind::Empty => "empty",
        }
    }

    pub fn from_name(s: &str) -> Option<VertexKind> {
        match s {
            "mandatory" | "M" => Some(VertexKind::Mandatory),
            "authorised" | "authorized" | "A" => Some(VertexKind::Authorised),
            "empty" | "E" => Some(VertexKind::Empty),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub height: Rat,
    pub kind: VertexKind,
    pub parent: Option<VertexId>,
    pub children: Vec<VertexId>,
    /// Positive on leaves, zero elsewhere.
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FissionTree {
    vertices: Vec<Vertex>,
    root: VertexId,
    labels: Option<Vec<VertexId>>,
}

impl FissionTree {
    /// Assembles a tree from raw parts; children lists are derived from the
    /// parent pointers. No axioms are checked here, see [`validate`].
    pub fn from_parts(vertices: Vec<(Rat, VertexKind, Option<VertexId>, u32)>, labels: Option<Vec<VertexId>>) -> Result<Self> {
        let n = vertices.len();
        let mut vs: Vec<Vertex> = vertices
            .into_iter()
            .map(|(height, kind, parent, multiplicity)| Vertex { height, kind, parent, children: Vec::new(), multiplicity })
            .collect();
        let mut roots = Vec::new();
        for i in 0..n {
            match vs[i].parent {
                Some(p) if p.0 < n && p.0 != i => vs[p.0].children.push(VertexId(i)),
                Some(_) => return Err(Error::InvalidTree(format!("vertex {i} has a bad parent"))),
                None => roots.push(i),
            }
        }
        if roots.len() != 1 {
            return Err(Error::InvalidTree(format!("expected one root, found {}", roots.len())));
        }
        let t = FissionTree { vertices: vs, root: VertexId(roots[0]), labels };
        // Every vertex must reach the root.
        for i in 0..n {
            let mut v = VertexId(i);
            let mut steps = 0;
            while let Some(p) = t.vertices[v.0].parent {
                v = p;
                steps += 1;
                if steps > n {
                    return Err(Error::InvalidTree("cycle in parent pointers".into()));
                }
            }
        }
        if let Some(ls) = &t.labels {
            let leaves: BTreeSet<VertexId> = t.leaves().into_iter().collect();
            let labelled: BTreeSet<VertexId> = ls.iter().copied().collect();
            if labelled != leaves || ls.len() != leaves.len() {
                return Err(Error::InvalidTree("labels must biject onto the leaves".into()));
            }
        }
        Ok(t)
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v.0]
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, &Vertex)> {
        self.vertices.iter().enumerate().map(|(i, v)| (VertexId(i), v))
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn height(&self, v: VertexId) -> &Rat {
        &self.vertices[v.0].height
    }

    pub fn kind(&self, v: VertexId) -> VertexKind {
        self.vertices[v.0].kind
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.vertices[v.0].parent
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.vertices[v.0].children
    }

    pub fn top(&self) -> &Rat {
        self.height(self.root)
    }

    pub fn labels(&self) -> Option<&[VertexId]> {
        self.labels.as_deref()
    }

    pub fn is_labelled(&self) -> bool {
        self.labels.is_some()
    }

    pub fn without_labels(&self) -> FissionTree {
        FissionTree { labels: None, ..self.clone() }
    }

    /// Replaces the labelling; `labels[i]` is the leaf carrying label `i`.
    pub fn with_labels(&self, labels: Vec<VertexId>) -> Result<FissionTree> {
        let parts = self.vertices.iter().map(|v| (v.height.clone(), v.kind, v.parent, v.multiplicity)).collect();
        FissionTree::from_parts(parts, Some(labels))
    }

    /// Leaves in label order when labelled, otherwise in storage order.
    pub fn leaves(&self) -> Vec<VertexId> {
        if let Some(ls) = &self.labels {
            return ls.clone();
        }
        self.vertices().filter(|(_, v)| v.children.is_empty()).map(|(id, _)| id).collect()
    }

    pub fn multiplicity(&self, leaf: VertexId) -> u32 {
        self.vertices[leaf.0].multiplicity
    }

    /// Path from `v` up to the root, `v` first.
    pub fn ancestors(&self, v: VertexId) -> Vec<VertexId> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            out.push(p);
            cur = p;
        }
        out
    }

    pub fn nearest_common_ancestor(&self, a: VertexId, b: VertexId) -> VertexId {
        let up: BTreeSet<VertexId> = self.ancestors(a).into_iter().collect();
        self.ancestors(b).into_iter().find(|v| up.contains(v)).expect("tree is connected")
    }

    /// All distinct vertex heights, descending.
    pub fn heights(&self) -> Vec<Rat> {
        let hs: BTreeSet<Rat> = self.vertices.iter().map(|v| v.height.clone()).collect();
        hs.into_iter().rev().collect()
    }

    /// Heights of admissible vertices (the root included when authorised).
    pub fn admissible_heights(&self) -> BTreeSet<Rat> {
        self.vertices.iter().filter(|v| v.kind.is_admissible()).map(|v| v.height.clone()).collect()
    }

    pub fn is_truncated(&self) -> bool {
        self.kind(self.root) == VertexKind::Empty
    }

    /// Rank `Σ n_i · Ram(leaf_i)`.
    pub fn rank(&self) -> u64 {
        self.leaves().into_iter().map(|l| self.multiplicity(l) as u64 * self.ram_index(l)).sum()
    }

    /// `Ram(v)`: lcm of the denominators of mandatory heights on the path
    /// from `v` up to the root.
    pub fn ram_index(&self, v: VertexId) -> u64 {
        self.ancestors(v).into_iter().filter(|&a| self.kind(a) == VertexKind::Mandatory).fold(1, |r, a| lcm_u64(r, den_u64(self.height(a))))
    }

    /// `Ram(c)/Ram(p)` for an admissible child `c` of `p`; 1 if there is none.
    pub fn relative_ram(&self, p: VertexId) -> u64 {
        match self.children(p).iter().find(|&&c| self.kind(c).is_admissible()) {
            Some(&c) => self.ram_index(c) / self.ram_index(p),
            None => 1,
        }
    }

    /// Vertices with at least two children.
    pub fn branch_vertices(&self) -> Vec<VertexId> {
        self.vertices().filter(|(_, v)| v.children.len() >= 2).map(|(id, _)| id).collect()
    }

    /// Mandatory heights along the branch of `leaf`, descending.
    pub fn branch_levels(&self, leaf: VertexId) -> Vec<Rat> {
        self.ancestors(leaf).into_iter().rev().filter(|&a| self.kind(a) == VertexKind::Mandatory).map(|a| self.height(a).clone()).collect()
    }

    /// `Katz(𝒯) = max(0, max mandatory height, max branch height − 1)`.
    pub fn katz(&self) -> Rat {
        let mut k = Rat::zero();
        for (_, v) in self.vertices() {
            if v.kind == VertexKind::Mandatory && v.height > k {
                k = v.height.clone();
            }
            if v.children.len() >= 2 {
                let b = &v.height - int(1);
                if b > k {
                    k = b;
                }
            }
        }
        k
    }

    /// Smallest root height that keeps all branching and mandatory data.
    pub fn minimal_top(&self) -> Rat {
        int(floor_i64(&self.katz()) + 1)
    }

    /// Moves the root to integer height `h`, adding or removing trunk
    /// vertices. The root keeps its kind.
    pub fn retop(&self, h: &Rat) -> Result<FissionTree> {
        if !h.is_integer() || !h.is_positive() {
            return Err(Error::InvalidTree(format!("root height {h} must be a positive integer")));
        }
        if h < &self.minimal_top() {
            return Err(Error::KatzBelowTree(h - int(1)));
        }
        let root_kind = self.kind(self.root);
        let mut parts: Vec<(Rat, VertexKind, Option<VertexId>, u32)> =
            self.vertices.iter().map(|v| (v.height.clone(), v.kind, v.parent, v.multiplicity)).collect();
        parts[self.root.0].1 = VertexKind::Authorised;
        let mut labels = self.labels.clone();
        let root = if h >= self.top() {
            let mut below = self.root;
            let mut cur = self.top().clone();
            while &cur < h {
                cur += int(1);
                parts.push((cur.clone(), VertexKind::Authorised, None, 0));
                let id = VertexId(parts.len() - 1);
                parts[below.0].2 = Some(id);
                below = id;
            }
            below
        } else {
            // Above the minimal top the tree is a single chain of integers.
            let new_root =
                self.vertices().find(|(_, v)| &v.height == h).map(|(id, _)| id).expect("integer heights below the top are present");
            let mut remap = vec![None; parts.len()];
            let mut kept = Vec::new();
            for (i, p) in parts.into_iter().enumerate() {
                if &p.0 <= h {
                    remap[i] = Some(VertexId(kept.len()));
                    kept.push(p);
                }
            }
            for p in kept.iter_mut() {
                p.2 = p.2.and_then(|q| remap[q.0]);
            }
            labels = labels.map(|ls| ls.into_iter().map(|l| remap[l.0].expect("leaves are kept")).collect());
            parts = kept;
            remap[new_root.0].unwrap()
        };
        parts[root.0].1 = root_kind;
        FissionTree::from_parts(parts, labels)
    }

    /// The tree with its root at the minimal height.
    pub fn normalized(&self) -> FissionTree {
        self.retop(&self.minimal_top()).expect("minimal top is always reachable")
    }

    /// `pred` in the admissible heights: the largest admissible height below
    /// `h`, or 0.
    pub fn admissible_pred(&self, h: &Rat) -> Rat {
        let mut adm = self.admissible_heights();
        // Integers below the root are admissible even when the root is empty.
        let mut n = 1;
        while &int(n) < self.top() {
            adm.insert(int(n));
            n += 1;
        }
        adm.range(..h.clone()).next_back().cloned().unwrap_or_else(Rat::zero)
    }

    /// Fission datum read back from the tree: level data along each branch
    /// and `f_ij = pred(h(nca(i, j)))`.
    pub fn fission_datum(&self) -> FissionDatum {
        let leaves = self.leaves();
        let m = leaves.len();
        let mut fission = vec![vec![Rat::zero(); m]; m];
        for i in 0..m {
            for j in i + 1..m {
                let v = self.nearest_common_ancestor(leaves[i], leaves[j]);
                let f = self.admissible_pred(self.height(v));
                fission[i][j] = f.clone();
                fission[j][i] = f;
            }
        }
        let branches = leaves.iter().map(|&l| (self.multiplicity(l), LevelDatum::new(self.branch_levels(l)).unwrap_or_default())).collect();
        FissionDatum { branches, fission }
    }

    /// Truncation at `η = ⌊katz⌋ + 1`, with `katz` defaulting to `Katz(𝒯)`.
    pub fn truncate(&self, katz: Option<&Rat>) -> Result<TruncatedTree> {
        let own = self.katz();
        let k = katz.cloned().unwrap_or_else(|| own.clone());
        if k.is_negative() || floor_i64(&k) < floor_i64(&own) {
            return Err(Error::KatzBelowTree(k));
        }
        let eta = int(floor_i64(&k) + 1);
        let mut t = self.retop(&eta)?;
        let r = t.root;
        t.vertices[r.0].kind = VertexKind::Empty;
        Ok(TruncatedTree { tree: t })
    }

    /// `μ = |𝔸^♭| + 2 − η` on the minimal truncation.
    pub fn moduli_number(&self) -> u64 {
        let tb = self.truncate(None).expect("minimal truncation exists");
        let mu = tb.admissible_below_root().len() as i64 + 2 - floor_i64(tb.eta());
        debug_assert_eq!(mu, self.moduli_number_by_branches() as i64);
        mu as u64
    }

    /// `μ = 1 + |A_1 ∖ ℕ| + Σ_{i≥2} |A_i ∩ (0, f_i]|`, `f_i = min_{j<i} f_ij`.
    pub fn moduli_number_by_branches(&self) -> u64 {
        let d = self.fission_datum();
        let mut mu = 1u64;
        for (i, (_, l)) in d.branches.iter().enumerate() {
            if i == 0 {
                mu += l.non_integral_admissible_count();
            } else {
                let fi = (0..i).map(|j| d.fission[i][j].clone()).min().unwrap();
                mu += exponent_sets(l, &fi).expect("branch levels are valid").admissible.len() as u64;
            }
        }
        mu
    }

    /// Admissible height sets `A_i ∩ (0, top]` per leaf, descending.
    pub fn branch_admissible_heights(&self, leaf: VertexId) -> Vec<Rat> {
        self.ancestors(leaf).into_iter().filter(|&a| self.kind(a).is_admissible()).map(|a| self.height(a).clone()).collect()
    }
}

/// A fission tree whose root at `η` is marked empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedTree {
    tree: FissionTree,
}

impl TruncatedTree {
    /// Wraps a tree whose root is already marked empty.
    pub fn from_tree(tree: FissionTree) -> Result<Self> {
        if !tree.is_truncated() || !tree.top().is_integer() {
            return Err(Error::InvalidTree("truncated trees need an empty root at an integer height".into()));
        }
        Ok(TruncatedTree { tree })
    }

    pub fn tree(&self) -> &FissionTree {
        &self.tree
    }

    pub fn eta(&self) -> &Rat {
        self.tree.top()
    }

    /// `𝔸^♭`: admissible vertices strictly below the root, in storage order.
    pub fn admissible_below_root(&self) -> Vec<VertexId> {
        self.tree.vertices().filter(|(id, v)| *id != self.tree.root && v.kind.is_admissible()).map(|(id, _)| id).collect()
    }

    /// The full tree this truncation came from.
    pub fn untruncated(&self) -> FissionTree {
        let mut t = self.tree.clone();
        let r = t.root;
        t.vertices[r.0].kind = VertexKind::Authorised;
        t
    }
}
