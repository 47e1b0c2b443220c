//! The `fission` command line. [`run`] is the whole program; `main` only
//! wires it to the process streams.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fission_core::arith::{parse_rat, Rat};
use fission_core::config::{factorize, realisation_to_type, sample_realisation, type_to_realisation, ConfigFactorization};
use fission_core::fission::{
    class_fission_datum, fission_datum, fission_exponent, fission_exponent_oracle, numerically_equivalent, slope_matrix,
};
use fission_core::levels::{exponent_sets, levels_of, levels_oracle};
use fission_core::puiseux::{classify, parse_input, ExpFactor, Input, IrregularClass, PointedIrregularType};
use fission_core::skeleton::{census, CensusRow, Skeleton};
use fission_core::symmetry::{aut_group, weyl_group, weyl_order_brute, weyl_order_by_shifts};
use fission_core::tree::{build_tree, build_tree_labelled, validate, FissionTree, TruncatedTree};

/// Trees with more leaves than this skip the brute-force Weyl check.
const BRUTE_FORCE_LEAVES: usize = 6;

#[derive(Parser, Debug)]
#[command(name = "fission", version, about = "Fission trees, configuration spaces and Weyl groups of twisted irregular classes")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Katz bound used for truncation, as p/q.
    #[arg(long, global = true)]
    katz: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for sampling realisations.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Keep the pointing and order of pointed types.
    #[arg(long, global = true)]
    labelled: bool,
    /// Read an input from a file: the text grammar, a canonical tree form, or
    /// tree or skeleton JSON.
    #[arg(long, global = true)]
    file: Vec<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Parse and normalise inputs.
    Parse { inputs: Vec<String> },
    /// Levels of each exponential factor.
    Levels { inputs: Vec<String> },
    /// Fission tree of an input.
    Tree { inputs: Vec<String> },
    /// Exit 0 if two inputs have isomorphic trees, 3 if not.
    Equiv { inputs: Vec<String> },
    /// Product decomposition of the configuration space.
    Config { inputs: Vec<String> },
    /// Weyl group and automorphism group of the tree.
    Weyl { inputs: Vec<String> },
    /// Moduli numbers, or the moduli dimension of a skeleton.
    Moduli {
        inputs: Vec<String>,
        /// Treat the inputs as the marked points of a curve of this genus.
        #[arg(long)]
        genus: Option<u32>,
    },
    /// All trees with bounded rank and Katz invariant (default bound 1).
    Census {
        #[arg(long)]
        max_rank: u64,
    },
    /// Cross-check every computation that has an independent route.
    Oracle { inputs: Vec<String> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
    Csv,
}

enum Failure {
    Usage(String),
    Domain(&'static str, String),
}

impl From<fission_core::Error> for Failure {
    fn from(e: fission_core::Error) -> Failure {
        Failure::Domain(e.kind(), e.to_string())
    }
}

type Outcome = std::result::Result<(String, i32), Failure>;

/// A parsed command-line or file input.
enum Obj {
    Factor(ExpFactor),
    Type(PointedIrregularType),
    Class(IrregularClass),
    Tree(FissionTree),
    Skeleton(Skeleton),
}

/// Runs the program on `args` (program name first) and returns the exit
/// code: 0 on success, 1 on domain errors, 2 on usage errors and 3 when
/// `equiv` finds the inputs inequivalent.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Domain(kind, message)) => {
            let _ = writeln!(err, "{}", json!({"error": kind, "message": message}));
            1
        }
    }
}

fn execute(cli: &Cli) -> Outcome {
    let katz = cli.katz.as_deref().map(parse_rat).transpose().map_err(|e| Failure::Usage(format!("--katz: {e}")))?;
    let ctx = Ctx { katz, format: cli.format, seed: cli.seed, labelled: cli.labelled };
    match &cli.verb {
        Verb::Parse { inputs } => ctx.parse(&inputs_of(inputs, &cli.file)?),
        Verb::Levels { inputs } => ctx.levels(&inputs_of(inputs, &cli.file)?),
        Verb::Tree { inputs } => ctx.tree(&one(inputs_of(inputs, &cli.file)?)?),
        Verb::Equiv { inputs } => ctx.equiv(&inputs_of(inputs, &cli.file)?),
        Verb::Config { inputs } => ctx.config(&one(inputs_of(inputs, &cli.file)?)?),
        Verb::Weyl { inputs } => ctx.weyl(&one(inputs_of(inputs, &cli.file)?)?),
        Verb::Moduli { inputs, genus } => ctx.moduli(&inputs_of(inputs, &cli.file)?, *genus),
        Verb::Census { max_rank } => ctx.census(*max_rank),
        Verb::Oracle { inputs } => ctx.oracle(&inputs_of(inputs, &cli.file)?),
    }
}

fn parse_obj(text: &str) -> std::result::Result<Obj, Failure> {
    let t = text.trim();
    if t.starts_with('{') {
        let v: Value = serde_json::from_str(t).map_err(|e| Failure::Domain("SyntaxError", e.to_string()))?;
        return if v.get("genus").is_some() {
            Ok(Obj::Skeleton(Skeleton::from_json(&v)?))
        } else {
            Ok(Obj::Tree(FissionTree::from_json(&v)?))
        };
    }
    if t.starts_with('(') {
        return Ok(Obj::Tree(FissionTree::parse_canonical(t)?));
    }
    Ok(match parse_input(t)? {
        Input::Factor(f) => Obj::Factor(f),
        Input::Type(q) => Obj::Type(q),
        Input::Class(c) => Obj::Class(c),
    })
}

fn inputs_of(inline: &[String], files: &[PathBuf]) -> std::result::Result<Vec<Obj>, Failure> {
    let mut objs = Vec::new();
    for s in inline {
        objs.push(parse_obj(s)?);
    }
    for p in files {
        let text = std::fs::read_to_string(p).map_err(|e| Failure::Domain("IoError", format!("{}: {e}", p.display())))?;
        objs.push(parse_obj(&text)?);
    }
    if objs.is_empty() {
        return Err(Failure::Usage("no input given".into()));
    }
    Ok(objs)
}

fn one(mut objs: Vec<Obj>) -> std::result::Result<Obj, Failure> {
    if objs.len() != 1 {
        return Err(Failure::Usage(format!("expected one input, got {}", objs.len())));
    }
    Ok(objs.pop().unwrap())
}

fn json_text(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialise") + "\n"
}

fn class_of(f: &ExpFactor) -> IrregularClass {
    IrregularClass::new(vec![(1, f.clone())]).expect("one orbit")
}

fn rats(xs: &[Rat]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

struct Ctx {
    katz: Option<Rat>,
    format: Format,
    seed: Option<u64>,
    labelled: bool,
}

impl Ctx {
    fn formats(&self, allowed: &[Format]) -> std::result::Result<(), Failure> {
        if allowed.contains(&self.format) {
            Ok(())
        } else {
            Err(Failure::Usage(format!("format {:?} is not available for this command", self.format).to_lowercase()))
        }
    }

    /// The tree of an input; pointed types keep their labels only with
    /// `--labelled`.
    fn tree_of(&self, o: &Obj) -> std::result::Result<FissionTree, Failure> {
        Ok(match o {
            Obj::Factor(f) => build_tree(&class_of(f))?,
            Obj::Class(c) => build_tree(c)?,
            Obj::Type(q) if self.labelled => build_tree_labelled(q)?,
            Obj::Type(q) => build_tree(&classify(q))?,
            Obj::Tree(t) => t.clone(),
            Obj::Skeleton(_) => return Err(Failure::Usage("a skeleton is not a single tree".into())),
        })
    }

    /// Truncation at `--katz`, or at the input's own Katz rank. Trees that
    /// already carry an empty integer root are taken as truncated.
    fn truncated(&self, o: &Obj) -> std::result::Result<TruncatedTree, Failure> {
        match (o, &self.katz) {
            (Obj::Type(q), None) => Ok(type_to_realisation(q)?.0),
            (Obj::Type(q), Some(k)) => Ok(build_tree_labelled(q)?.truncate(Some(k))?),
            (Obj::Tree(t), None) if t.is_truncated() && t.top().is_integer() => Ok(TruncatedTree::from_tree(t.clone())?),
            (Obj::Factor(f), None) => Ok(build_tree(&class_of(f))?.truncate(Some(&f.slope()))?),
            (Obj::Class(c), None) => Ok(build_tree(c)?.truncate(Some(&c.katz()))?),
            (_, k) => Ok(self.tree_of(o)?.truncate(k.as_ref())?),
        }
    }

    fn parse(&self, objs: &[Obj]) -> Outcome {
        self.formats(&[Format::Text, Format::Json])?;
        let mut text = String::new();
        let mut vals = Vec::new();
        for o in objs {
            let v = match o {
                Obj::Factor(f) => json!({"kind": "factor", "value": f.render(), "ram": f.ram(), "slope": f.slope().to_string()}),
                Obj::Type(q) => {
                    json!({"kind": "type", "value": q.render(), "rank": q.rank(), "katz": q.katz().to_string(), "compatible": q.is_compatible()})
                }
                Obj::Class(c) => json!({"kind": "class", "value": c.render(), "rank": c.rank(), "katz": c.katz().to_string()}),
                Obj::Tree(t) => {
                    json!({"kind": "tree", "value": t.canonical_form_at_top(t.is_labelled()), "rank": t.rank(), "katz": t.katz().to_string()})
                }
                Obj::Skeleton(s) => json!({"kind": "skeleton", "value": s.to_json()}),
            };
            match &v["value"] {
                Value::String(s) => writeln!(text, "{}: {s}", v["kind"].as_str().unwrap()).unwrap(),
                other => writeln!(text, "{}: {other}", v["kind"].as_str().unwrap()).unwrap(),
            }
            vals.push(v);
        }
        Ok((if self.format == Format::Json { json_text(&Value::Array(vals)) } else { text }, 0))
    }

    fn levels(&self, objs: &[Obj]) -> Outcome {
        self.formats(&[Format::Text, Format::Json])?;
        let mut factors = Vec::new();
        for o in objs {
            match o {
                Obj::Factor(f) => factors.push(f.clone()),
                Obj::Type(q) => factors.extend(q.factors().cloned()),
                Obj::Class(c) => factors.extend(c.orbits().iter().map(|(_, f)| f.clone())),
                _ => return Err(Failure::Usage("levels needs exponential factors".into())),
            }
        }
        let mut text = String::new();
        let mut vals = Vec::new();
        for f in &factors {
            let l = levels_of(f);
            let bound = self.katz.clone().unwrap_or_else(|| f.slope());
            let sets = exponent_sets(&l, &bound)?;
            writeln!(text, "{}", if l.is_empty() { "-".to_string() } else { l.render() }).unwrap();
            if self.katz.is_some() {
                writeln!(text, "admissible {}", rats(&sets.admissible)).unwrap();
                writeln!(text, "inconsequential {}", rats(&sets.inconsequential)).unwrap();
            }
            vals.push(json!({
                "factor": f.render(),
                "levels": l.levels().iter().map(|k| k.to_string()).collect::<Vec<_>>(),
                "ram_indices": l.ram_indices(),
                "non_integral_admissible": l.non_integral_admissible_count(),
                "bound": bound.to_string(),
                "admissible": sets.admissible.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
                "inconsequential": sets.inconsequential.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
            }));
        }
        Ok((if self.format == Format::Json { json_text(&Value::Array(vals)) } else { text }, 0))
    }

    fn tree(&self, o: &Obj) -> Outcome {
        self.formats(&[Format::Text, Format::Json, Format::Dot])?;
        let t = match self.katz {
            Some(_) => self.truncated(o)?.tree().clone(),
            None => self.tree_of(o)?,
        };
        let text = match self.format {
            Format::Json => json_text(&t.to_json()),
            Format::Dot => t.to_dot(),
            _ if self.katz.is_some() => t.canonical_form_at_top(t.is_labelled()) + "\n",
            _ if t.is_labelled() => t.labelled_canonical_form() + "\n",
            _ => t.canonical_form() + "\n",
        };
        Ok((text, 0))
    }

    fn equiv(&self, objs: &[Obj]) -> Outcome {
        self.formats(&[Format::Text, Format::Json])?;
        let [a, b] = objs else { return Err(Failure::Usage(format!("equiv needs two inputs, got {}", objs.len()))) };
        let same = match (a, b) {
            (Obj::Type(p), Obj::Type(q)) if self.labelled => {
                let by_slopes = numerically_equivalent(p, q);
                let by_trees = build_tree_labelled(p)?.isomorphic_labelled(&build_tree_labelled(q)?);
                if by_slopes != by_trees {
                    return Err(Failure::Domain("OracleMismatch", "slope matrices and labelled trees disagree".into()));
                }
                by_trees
            }
            _ => {
                let (s, t) = (self.tree_of(a)?, self.tree_of(b)?);
                if s.is_labelled() && t.is_labelled() {
                    s.normalized().isomorphic_labelled(&t.normalized())
                } else {
                    s.isomorphic(&t)
                }
            }
        };
        let text = match self.format {
            Format::Json => json_text(&json!({"equivalent": same})),
            _ => format!("{}\n", if same { "equivalent" } else { "not equivalent" }),
        };
        Ok((text, if same { 0 } else { 3 }))
    }

    fn config(&self, o: &Obj) -> Outcome {
        self.formats(&[Format::Text, Format::Json, Format::Dot])?;
        let tb = self.truncated(o)?;
        let f = factorize(&tb);
        let sample = match self.seed {
            Some(seed) => Some(sample_type(&tb, seed)?),
            None => None,
        };
        let report = config_report(&tb, &f, sample.as_ref());
        let text = match self.format {
            Format::Json => {
                let mut v = f.to_json();
                v["eta"] = json!(tb.eta().to_string());
                if let Some(q) = &sample {
                    v["sample"] = json!(q.render());
                }
                json_text(&v)
            }
            Format::Dot => report.lines().map(|l| format!("// {l}\n")).collect::<String>() + &tb.tree().to_dot(),
            _ => report,
        };
        Ok((text, 0))
    }

    fn weyl(&self, o: &Obj) -> Outcome {
        self.formats(&[Format::Text, Format::Json])?;
        let t = self.tree_of(o)?.without_labels().normalized();
        let (w, a) = (weyl_group(&t), aut_group(&t));
        let text = match self.format {
            Format::Json => json_text(&json!({
                "weyl": {"shape": w.shape.to_string(), "order": w.order.to_string()},
                "aut": {"shape": a.shape.to_string(), "order": a.order.to_string()},
            })),
            _ => format!("W {}\n|W| {}\nAut {}\n|Aut| {}\n", w.shape, w.order, a.shape, a.order),
        };
        Ok((text, 0))
    }

    fn moduli(&self, objs: &[Obj], genus: Option<u32>) -> Outcome {
        self.formats(&[Format::Text, Format::Json])?;
        let skeleton = match (objs, genus) {
            ([Obj::Skeleton(s)], None) => Some(s.clone()),
            (_, Some(g)) => {
                let trees = objs.iter().map(|o| self.tree_of(o)).collect::<std::result::Result<Vec<_>, _>>()?;
                Some(Skeleton::new(g, trees))
            }
            _ => None,
        };
        if let Some(s) = skeleton {
            let text = match self.format {
                Format::Json => json_text(&json!({
                    "genus": s.genus,
                    "points": s.points(),
                    "dim": s.moduli_dimension(),
                    "dm_weight": s.dm_weight().to_string(),
                    "expect_dm": s.expect_dm(),
                })),
                _ => format!(
                    "genus {}\npoints {}\ndim {}\ndm weight {}\nexpect DM {}\n",
                    s.genus,
                    s.points(),
                    s.moduli_dimension(),
                    s.dm_weight(),
                    if s.expect_dm() { "yes" } else { "no" }
                ),
            };
            return Ok((text, 0));
        }
        let mut mus = Vec::new();
        for o in objs {
            mus.push(self.tree_of(o)?.moduli_number());
        }
        let text = match self.format {
            Format::Json => json_text(&json!(mus)),
            _ => mus.iter().map(|m| format!("mu {m}\n")).collect(),
        };
        Ok((text, 0))
    }

    fn census(&self, max_rank: u64) -> Outcome {
        self.formats(&[Format::Text, Format::Json, Format::Csv])?;
        let bound = self.katz.clone().unwrap_or_else(|| Rat::from_integer(1.into()));
        let rows = census(max_rank, &bound)?;
        let text = match self.format {
            Format::Json => json_text(&Value::Array(rows.iter().map(CensusRow::to_json).collect())),
            Format::Csv => {
                std::iter::once(CensusRow::csv_header().to_string()).chain(rows.iter().map(CensusRow::to_csv)).map(|l| l + "\n").collect()
            }
            _ => {
                let mut s = String::from("rank\tkatz\tmu\tdim\t|W|\ttree\n");
                for r in &rows {
                    writeln!(s, "{}\t{}\t{}\t{}\t{}\t{}", r.rank, r.katz, r.moduli, r.dim, r.weyl_order, r.canonical).unwrap();
                }
                writeln!(s, "{} trees", rows.len()).unwrap();
                s
            }
        };
        Ok((text, 0))
    }

    fn oracle(&self, objs: &[Obj]) -> Outcome {
        self.formats(&[Format::Text, Format::Json])?;
        let checks = match objs {
            [Obj::Type(p), Obj::Type(q)] => pair_checks(p, q)?,
            [o] => single_checks(o, self)?,
            _ => return Err(Failure::Usage("oracle needs one input or two pointed types".into())),
        };
        let failed: Vec<&Check> = checks.iter().filter(|c| !c.agree).collect();
        let text = match self.format {
            Format::Json => {
                json_text(&Value::Array(checks.iter().map(|c| json!({"check": c.name, "agree": c.agree, "detail": c.detail})).collect()))
            }
            _ => checks.iter().map(|c| format!("{} {}: {}\n", if c.agree { "ok  " } else { "FAIL" }, c.name, c.detail)).collect(),
        };
        if let Some(c) = failed.first() {
            return Err(Failure::Domain("OracleMismatch", format!("{}: {}", c.name, c.detail)));
        }
        Ok((text, 0))
    }
}

fn sample_type(tb: &TruncatedTree, seed: u64) -> std::result::Result<PointedIrregularType, Failure> {
    let tb = if tb.tree().is_labelled() {
        tb.clone()
    } else {
        let t = tb.tree();
        TruncatedTree::from_tree(t.with_labels(t.leaves())?)?
    };
    Ok(realisation_to_type(&tb, &sample_realisation(&tb, seed))?)
}

fn config_report(tb: &TruncatedTree, f: &ConfigFactorization, sample: Option<&PointedIrregularType>) -> String {
    let t = tb.tree();
    let mut factors: Vec<_> = f.factors.iter().filter(|(_, k)| k.dim() > 0).collect();
    factors.sort_by(|(u, _), (v, _)| t.height(*v).cmp(t.height(*u)));
    let list =
        if factors.is_empty() { "pt".to_string() } else { factors.iter().map(|(_, k)| k.to_string()).collect::<Vec<_>>().join(" × ") };
    let mut s = format!("eta {}\nfactors {list}\ndim {}\nspecial dim {}\npi1 {}\n", tb.eta(), f.total_dim, f.special_dim, f.pi1_string());
    if let Some(r) = f.pi1_rank() {
        writeln!(s, "pi1 free abelian of rank {r}").unwrap();
    }
    if let Some(q) = sample {
        writeln!(s, "sample {q}").unwrap();
    }
    s
}

struct Check {
    name: &'static str,
    agree: bool,
    detail: String,
}

fn check(name: &'static str, a: impl ToString, b: impl ToString) -> Check {
    let (a, b) = (a.to_string(), b.to_string());
    Check { name, agree: a == b, detail: if a == b { a } else { format!("{a} vs {b}") } }
}

fn pair_checks(p: &PointedIrregularType, q: &PointedIrregularType) -> std::result::Result<Vec<Check>, Failure> {
    let slopes = numerically_equivalent(p, q);
    let data = fission_datum(p)? == fission_datum(q)?;
    let trees = build_tree_labelled(p)?.isomorphic_labelled(&build_tree_labelled(q)?);
    Ok(vec![
        check("slope matrices vs fission data", slopes, data),
        check("fission data vs labelled trees", data, trees),
        Check { name: "equivalent", agree: true, detail: slopes.to_string() },
    ])
}

fn single_checks(o: &Obj, ctx: &Ctx) -> std::result::Result<Vec<Check>, Failure> {
    let mut out = Vec::new();
    let factors: Vec<ExpFactor> = match o {
        Obj::Factor(f) => vec![f.clone()],
        Obj::Type(q) => q.factors().cloned().collect(),
        Obj::Class(c) => c.orbits().iter().map(|(_, f)| f.clone()).collect(),
        _ => vec![],
    };
    for f in &factors {
        out.push(check("levels by ramification vs conjugate slopes", levels_of(f), levels_oracle(f)));
    }
    let mut pairs = (0, 0);
    for (i, a) in factors.iter().enumerate() {
        for b in &factors[i + 1..] {
            pairs.0 += 1;
            pairs.1 += (fission_exponent(a, b) == fission_exponent_oracle(a, b)) as usize;
        }
    }
    if pairs.0 > 0 {
        out.push(check("fission exponents vs minimal conjugate slope", format!("{} pairs", pairs.0), format!("{} pairs", pairs.1)));
    }
    if let Obj::Type(q) = o {
        if q.is_compatible() {
            let t = build_tree_labelled(q)?;
            out.push(check("fission datum vs tree read-back", fission_datum(q)?.to_json(), t.fission_datum().to_json()));
            let m = slope_matrix(q).values().len();
            out.push(Check { name: "distinct slopes in the slope matrix", agree: true, detail: m.to_string() });
        }
    }
    if let Obj::Class(c) = o {
        let t = build_tree(c)?;
        out.push(check("class fission datum vs tree read-back", class_fission_datum(c).equivalent_unlabelled(&t.fission_datum()), true));
    }
    let t = ctx.tree_of(o)?.without_labels().normalized();
    let v = validate(&t);
    out.push(Check {
        name: "tree axioms",
        agree: v.is_empty(),
        detail: if v.is_empty() { "hold".into() } else { v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ") },
    });
    let mu = t.moduli_number();
    out.push(check("moduli number by vertices vs by branches", mu, t.moduli_number_by_branches()));
    out.push(check("moduli number vs 1 + special dimension", mu, 1 + factorize(&t.truncate(None)?).special_dim));
    let w = weyl_group(&t).order;
    out.push(check("Weyl order by recursion vs by shifts", &w, weyl_order_by_shifts(&t)));
    if t.leaves().len() <= BRUTE_FORCE_LEAVES {
        out.push(check("Weyl order by recursion vs brute force", &w, weyl_order_brute(&t)));
    }
    Ok(out)
}
