//! Canonical s-expression forms `(h KIND [xMULT] [#LABEL] children...)`.

use crate::arith::{parse_rat, Rat};
use crate::error::{Error, Result};

use super::{FissionTree, VertexId, VertexKind};

impl FissionTree {
    /// Canonical form of the tree as stored, without normalising the root.
    /// Children are ordered by kind, then multiplicity, then their own form.
    pub fn canonical_form_at_top(&self, labelled: bool) -> String {
        let label_of: Vec<Option<usize>> = {
            let mut v = vec![None; self.len()];
            if labelled {
                if let Some(ls) = self.labels() {
                    for (i, l) in ls.iter().enumerate() {
                        v[l.0] = Some(i + 1);
                    }
                }
            }
            v
        };
        self.forms(&label_of).swap_remove(self.root().0)
    }

    /// Unlabelled forms of every subtree, indexed by vertex.
    pub fn subtree_forms(&self) -> Vec<String> {
        self.forms(&vec![None; self.len()])
    }

    /// Forms of all subtrees, built children first.
    fn forms(&self, label_of: &[Option<usize>]) -> Vec<String> {
        let mut post = Vec::with_capacity(self.len());
        let mut stack = vec![(self.root(), false)];
        while let Some((v, done)) = stack.pop() {
            if done {
                post.push(v);
            } else {
                stack.push((v, true));
                stack.extend(self.children(v).iter().map(|&c| (c, false)));
            }
        }
        let mut forms: Vec<Option<((VertexKind, u32), String)>> = vec![None; self.len()];
        for v in post {
            let vx = self.vertex(v);
            let mut kids: Vec<&((VertexKind, u32), String)> =
                vx.children.iter().map(|c| forms[c.0].as_ref().expect("children first")).collect();
            kids.sort();
            let mut s = format!("({} {}", vx.height, vx.kind.letter());
            if vx.multiplicity > 0 {
                s.push_str(&format!(" x{}", vx.multiplicity));
            }
            if let Some(l) = label_of[v.0] {
                s.push_str(&format!(" #{l}"));
            }
            for (_, k) in kids {
                s.push(' ');
                s.push_str(k);
            }
            s.push(')');
            forms[v.0] = Some(((vx.kind, vx.multiplicity), s));
        }
        forms.into_iter().map(|f| f.expect("every vertex reaches the root").1).collect()
    }

    /// Isomorphism-invariant form of the normalised, unlabelled tree.
    pub fn canonical_form(&self) -> String {
        self.normalized().canonical_form_at_top(false)
    }

    /// As [`FissionTree::canonical_form`] but leaves keep their labels.
    pub fn labelled_canonical_form(&self) -> String {
        self.normalized().canonical_form_at_top(true)
    }

    pub fn isomorphic(&self, other: &FissionTree) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    pub fn isomorphic_labelled(&self, other: &FissionTree) -> bool {
        self.labelled_canonical_form() == other.labelled_canonical_form()
    }

    /// Parses a canonical form back into a tree. Labels, when present, must
    /// be exactly `1..=p` on the leaves.
    pub fn parse_canonical(text: &str) -> Result<FissionTree> {
        let tokens = tokenize(text);
        let mut pos = 0;
        let mut parts = Vec::new();
        let mut labels: Vec<(usize, VertexId)> = Vec::new();
        parse_node(&tokens, &mut pos, None, &mut parts, &mut labels)?;
        if pos != tokens.len() {
            return Err(Error::Syntax { pos: tokens.get(pos).map_or(text.len(), |t| t.0), msg: "trailing input".into() });
        }
        let labels = if labels.is_empty() {
            None
        } else {
            labels.sort();
            if labels.iter().enumerate().any(|(i, (l, _))| *l != i + 1) {
                return Err(Error::InvalidTree("labels must be 1..p".into()));
            }
            Some(labels.into_iter().map(|(_, v)| v).collect())
        };
        FissionTree::from_parts(parts, labels)
    }
}

fn tokenize(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut cur: Option<(usize, String)> = None;
    for (i, ch) in text.char_indices() {
        if ch == '(' || ch == ')' || ch.is_whitespace() {
            if let Some(t) = cur.take() {
                out.push(t);
            }
            if !ch.is_whitespace() {
                out.push((i, ch.to_string()));
            }
        } else {
            cur.get_or_insert_with(|| (i, String::new())).1.push(ch);
        }
    }
    out.extend(cur);
    out
}

type Part = (Rat, VertexKind, Option<VertexId>, u32);

fn parse_node(
    tokens: &[(usize, String)],
    pos: &mut usize,
    parent: Option<VertexId>,
    parts: &mut Vec<Part>,
    labels: &mut Vec<(usize, VertexId)>,
) -> Result<()> {
    let err = |p: usize, msg: &str| Error::Syntax { pos: p, msg: msg.into() };
    let end = tokens.last().map_or(0, |t| t.0 + t.1.len());
    let at = |p: usize| tokens.get(p).map_or(end, |t| t.0);
    if tokens.get(*pos).map(|t| t.1.as_str()) != Some("(") {
        return Err(err(at(*pos), "expected '('"));
    }
    *pos += 1;
    let height = match tokens.get(*pos) {
        Some((_, t)) if t != "(" && t != ")" => parse_rat(t).map_err(|_| err(at(*pos), "bad height"))?,
        _ => return Err(err(at(*pos), "expected a height")),
    };
    *pos += 1;
    let kind = tokens.get(*pos).and_then(|t| VertexKind::from_name(&t.1)).ok_or_else(|| err(at(*pos), "expected M, A or E"))?;
    *pos += 1;
    parts.push((height, kind, parent, 0));
    let id = VertexId(parts.len() - 1);
    while let Some((p, t)) = tokens.get(*pos) {
        if let Some(m) = t.strip_prefix('x') {
            parts[id.0].3 = m.parse().map_err(|_| err(*p, "bad multiplicity"))?;
        } else if let Some(l) = t.strip_prefix('#') {
            labels.push((l.parse().map_err(|_| err(*p, "bad label"))?, id));
        } else {
            break;
        }
        *pos += 1;
    }
    loop {
        match tokens.get(*pos).map(|t| t.1.as_str()) {
            Some(")") => {
                *pos += 1;
                return Ok(());
            }
            Some("(") => parse_node(tokens, pos, Some(id), parts, labels)?,
            _ => return Err(err(at(*pos), "expected '(' or ')'")),
        }
    }
}
