//! JSON and Graphviz forms of fission trees.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use serde_json::{json, Map, Value};

use crate::arith::{parse_rat, Rat};
use crate::error::{Error, Result};

use super::{FissionTree, VertexId, VertexKind};

impl FissionTree {
    pub fn to_json(&self) -> Value {
        let nodes: Vec<Value> = self
            .vertices()
            .map(|(id, v)| {
                let mut n = json!({"id": id.0, "height": v.height.to_string(), "kind": v.kind.name()});
                if v.multiplicity > 0 {
                    n["mult"] = json!(v.multiplicity);
                }
                n
            })
            .collect();
        let edges: Vec<Value> = self.vertices().filter_map(|(id, v)| v.parent.map(|p| json!([p.0, id.0]))).collect();
        let mut out = json!({"nodes": nodes, "edges": edges});
        if let Some(ls) = self.labels() {
            let m: Map<String, Value> = ls.iter().enumerate().map(|(i, l)| ((i + 1).to_string(), json!(l.0))).collect();
            out["labels"] = Value::Object(m);
        }
        out
    }

    /// Reads the schema produced by [`FissionTree::to_json`]. Node ids may be
    /// arbitrary distinct integers.
    pub fn from_json(v: &Value) -> Result<FissionTree> {
        let bad = |m: &str| Error::InvalidTree(m.to_string());
        let nodes = v.get("nodes").and_then(Value::as_array).ok_or_else(|| bad("missing nodes"))?;
        let mut index: HashMap<i64, usize> = HashMap::new();
        let mut parts: Vec<(Rat, VertexKind, Option<VertexId>, u32)> = Vec::new();
        for n in nodes {
            let id = n.get("id").and_then(Value::as_i64).ok_or_else(|| bad("node without integer id"))?;
            let h = match n.get("height") {
                Some(Value::String(s)) => parse_rat(s)?,
                Some(Value::Number(x)) => parse_rat(&x.to_string())?,
                _ => return Err(bad("node without height")),
            };
            let kind =
                n.get("kind").and_then(Value::as_str).and_then(VertexKind::from_name).ok_or_else(|| bad("node with unknown kind"))?;
            let mult = n.get("mult").and_then(Value::as_u64).unwrap_or(0) as u32;
            if index.insert(id, parts.len()).is_some() {
                return Err(bad("duplicate node id"));
            }
            parts.push((h, kind, None, mult));
        }
        let lookup = |x: &Value| x.as_i64().and_then(|i| index.get(&i).copied()).ok_or_else(|| bad("edge names an unknown node"));
        for e in v.get("edges").and_then(Value::as_array).ok_or_else(|| bad("missing edges"))? {
            let pair = e.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("edges are [parent, child] pairs"))?;
            let (p, c) = (lookup(&pair[0])?, lookup(&pair[1])?);
            if parts[c].2.replace(VertexId(p)).is_some() {
                return Err(bad("vertex with two parents"));
            }
        }
        let labels = match v.get("labels") {
            None | Some(Value::Null) => None,
            Some(Value::Object(m)) => {
                let mut ls: BTreeMap<usize, VertexId> = BTreeMap::new();
                for (k, x) in m {
                    let i: usize = k.parse().map_err(|_| bad("label keys are integers"))?;
                    ls.insert(i, VertexId(lookup(x)?));
                }
                if ls.keys().enumerate().any(|(i, k)| *k != i + 1) {
                    return Err(bad("labels must be 1..p"));
                }
                Some(ls.into_values().collect())
            }
            _ => return Err(bad("labels must be an object")),
        };
        FissionTree::from_parts(parts, labels)
    }

    /// Graphviz rendering with one rank row per height.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph fission_tree {\n  rankdir=TB;\n  node [label=\"\", width=0.15, height=0.15];\n");
        for (id, v) in self.vertices() {
            let style = if id == self.root() {
                "shape=square, style=filled, fillcolor=black"
            } else {
                match v.kind {
                    VertexKind::Mandatory => "shape=circle, style=filled, fillcolor=black",
                    VertexKind::Authorised => "shape=circle",
                    VertexKind::Empty => "shape=point",
                }
            };
            let mut tip = format!("h={}", v.height);
            if v.multiplicity > 0 {
                write!(tip, " n={}", v.multiplicity).unwrap();
            }
            writeln!(s, "  v{} [{style}, tooltip=\"{tip}\"];", id.0).unwrap();
        }
        if let Some(ls) = self.labels() {
            for (i, l) in ls.iter().enumerate() {
                writeln!(s, "  v{} [xlabel=\"{}\"];", l.0, i + 1).unwrap();
            }
        }
        for (id, v) in self.vertices() {
            if let Some(p) = v.parent {
                writeln!(s, "  v{} -> v{} [arrowhead=none];", p.0, id.0).unwrap();
            }
        }
        let mut rows: BTreeMap<&Rat, Vec<usize>> = BTreeMap::new();
        for (id, v) in self.vertices() {
            rows.entry(&v.height).or_default().push(id.0);
        }
        for (h, ids) in rows.iter().rev() {
            let names: Vec<String> = ids.iter().map(|i| format!("v{i}")).collect();
            writeln!(s, "  {{ rank=same; /* {h} */ {}; }}", names.join("; ")).unwrap();
        }
        s.push_str("}\n");
        s
    }
}
