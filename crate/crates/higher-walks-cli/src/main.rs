//! `hwalk`: command-line access to ordinals, ladders, walks, the bases
//! `B_n`, the systems `f_n`, coherence checks and simplicial homology.
//!
//! Exit status is 0 on success, 1 when a check fails and 2 on a usage
//! error. Every run is determined by its arguments.

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use higher_walks::basis::Basis;
use higher_walks::chain::{is_increasing, Chain};
use higher_walks::coherence::{
    a_n_convert, check_coherent_i, check_coherent_ii, phi_star_family, phi_theta, phi_theta_family, phi_x_family,
    rho2_fiber_family, s1, s2, theta, FamilyOracle,
};
use higher_walks::fsys::{collapse, fmt_tuple, m_formula, m_value, relativize_check, verify_coherence, FSystem, Variant};
use higher_walks::ordinal::Kind;
use higher_walks::sample;
use higher_walks::simplicial::{
    elementary_good_graph, integer_kernel_trivial, reduced_homology, tail_acyclic_report, walk_graph, Complex, Graph,
};
use higher_walks::walks::{internal_trace, rho1, tr2, tr2_signed, upper_trace, Sign, WalkTree};
use higher_walks::{Context, LadderSystem, Ordinal};

#[derive(Parser)]
#[command(name = "hwalk", version, about = "Higher walks on ordinals")]
struct Cli {
    /// Ladder system: `canonical` or `seeded:<n>`.
    #[arg(long, global = true, default_value = "canonical")]
    ladder: String,
    /// Exclusive bound on the ordinals a run may touch.
    #[arg(long, global = true)]
    bound: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Ordinal notation and arithmetic.
    #[command(subcommand)]
    Ord(OrdCmd),
    /// Ladders and compounded ladders.
    #[command(subcommand)]
    Ladder(LadderCmd),
    /// The walk from `--from` down to `--to`.
    Walk(WalkArgs),
    /// The higher walk tree `tr₂(α,β,γ)`.
    Tr2(Tr2Args),
    /// Coefficients, slices and checks of the systems `f_n`.
    #[command(subcommand)]
    F(FCmd),
    /// The bases `B_n(ε)`.
    #[command(subcommand)]
    Basis(BasisCmd),
    /// Simplicial homology and good graphs.
    #[command(subcommand)]
    Homology(HomologyCmd),
    /// Coherence checks for families.
    #[command(subcommand)]
    Cohere(CohereCmd),
    /// CSV point clouds `(…, coeff)` of `f_n` slices.
    ExportFig(ExportArgs),
}

#[derive(Subcommand)]
enum OrdCmd {
    Parse { a: String },
    Cmp { a: String, b: String },
    Add { a: String, b: String },
    Classify { a: String },
}

#[derive(Subcommand)]
enum LadderCmd {
    /// Prefix of `C_β`.
    Show {
        beta: String,
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
    /// Prefix of `C_{β⃗}` for a comma-separated tuple.
    Compound {
        tuple: String,
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
}

#[derive(Args)]
struct WalkArgs {
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    /// Walk inside `C_δ` instead.
    #[arg(long)]
    internal: Option<String>,
}

#[derive(Args)]
struct Tr2Args {
    /// `α,β,γ`.
    #[arg(long)]
    tuple: String,
    /// Build the signed tree `Tr₂(+,α,β,γ)`.
    #[arg(long)]
    signed: bool,
}

#[derive(Subcommand)]
enum FCmd {
    /// One coefficient of `f_n(input)`.
    Coeff {
        #[arg(long)]
        tuple: String,
        #[arg(long)]
        target: String,
        /// Read the target as `(x, k, z)` of `f̃₁`.
        #[arg(long)]
        tilde: bool,
    },
    /// The terms of `f_n(input)` straddling `--at β` (first coordinate
    /// below β, last above), or with first coordinate `--x α`.
    Slice {
        #[arg(long)]
        tuple: String,
        #[arg(long, conflicts_with = "x")]
        at: Option<String>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        tilde: bool,
    },
    /// Checks `Σ(−1)ⁱ f_n(α⃗ⁱ) = s d⟨α⃗⟩`.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        tuple: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// `m(β,γ)`.
    M {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        gamma: String,
    },
    /// `f₂` on the hyperplane `z = γ` against translated `f₁`.
    Relativize {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        gamma: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum BasisCmd {
    /// Members of `B_n(ε)` inside a window.
    List {
        #[arg(long)]
        eps: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        window: String,
    },
    Member {
        #[arg(long)]
        eps: String,
        #[arg(long)]
        tuple: String,
    },
    /// Decomposes a boundary chain (JSON, or `@file`) over `d B_n(ε)`.
    Decompose {
        #[arg(long)]
        eps: String,
        #[arg(long)]
        chain: String,
    },
    /// Independence and spanning of `d B_n(ε)` on a window.
    Verify {
        #[arg(long)]
        eps: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        window: String,
    },
}

#[derive(Subcommand)]
enum HomologyCmd {
    /// Reduced homology of a face-list file.
    Compute { faces: String },
    TailAcyclic { faces: String },
    /// Good-graph check of the 1-skeleton of a face-list file.
    GoodGraph { faces: String },
    /// `⋃ Tr²(α,γ)`, or the elementary graph.
    WalkGraph {
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        elementary: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    PhiX,
    PhiStar,
    PhiTheta,
    Rho2,
}

#[derive(Subcommand)]
enum CohereCmd {
    /// First-sense coherence on index tuples `a,b;c,d;…`.
    #[command(name = "check-I")]
    CheckI {
        #[arg(long, value_enum)]
        family: FamilyName,
        #[arg(long)]
        tuples: String,
        #[arg(long)]
        window: Option<String>,
    },
    /// Second-sense coherence of `ã_n(Φ)` on pairs `γ,δ;…`.
    #[command(name = "check-II")]
    CheckII {
        #[arg(long, value_enum)]
        family: FamilyName,
        #[arg(long)]
        pairs: String,
        #[arg(long)]
        window: Option<String>,
    },
    PhiTheta {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        alpha: String,
    },
    S1 {
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
    S2 {
        #[arg(long)]
        delta: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        gamma: String,
    },
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    tuple: String,
    /// Export the slices straddling these ordinals.
    #[arg(long, conflicts_with = "x")]
    at: Option<String>,
    /// First-coordinate slices to export.
    #[arg(long)]
    x: Option<String>,
}

/// What a command produced, in every format it supports.
struct Outcome {
    text: String,
    json: Value,
    dot: Option<String>,
    csv: Option<String>,
    pass: bool,
}

impl Outcome {
    fn new(text: String, json: Value) -> Outcome {
        Outcome { text, json, dot: None, csv: None, pass: true }
    }

    fn check(mut self, pass: bool) -> Outcome {
        self.pass = pass;
        self
    }
}

type Res<T> = Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn parse_ord(s: &str) -> Res<Ordinal> {
    Ordinal::parse(s.trim()).map_err(|e| format!("cannot parse ordinal {s:?}: {e}"))
}

fn parse_list(s: &str) -> Res<Vec<Ordinal>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_ord).collect()
}

fn parse_tuples(s: &str) -> Res<Vec<Vec<Ordinal>>> {
    s.split(';').map(parse_list).collect()
}

fn parse_context(s: &str) -> Res<Context> {
    match s.trim() {
        "top" | "Omega" => Ok(Context::omega()),
        t => Ok(Context::ordinal(parse_ord(t)?)),
    }
}

fn list_json(v: &[Ordinal]) -> Value {
    Value::Array(v.iter().map(|o| Value::String(o.to_string())).collect())
}

fn list_text(v: &[Ordinal]) -> String {
    v.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(", ")
}

fn read_source(s: &str) -> Res<String> {
    match s.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("{path}: {e}")),
        None => Ok(s.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let body = match cli.format {
                Format::Text => Some(out.text),
                Format::Json => Some(format!("{}\n", serde_json::to_string_pretty(&out.json).expect("serializable"))),
                Format::Dot => out.dot,
                Format::Csv => out.csv,
            };
            match body {
                Some(b) => {
                    print!("{b}");
                    if out.pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                None => {
                    eprintln!("error: this command has no output in the requested format");
                    ExitCode::from(2)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Res<Outcome> {
    let mut sys = LadderSystem::from_spec(&cli.ladder).map_err(err)?;
    if let Some(b) = &cli.bound {
        sys = sys.with_bound(parse_ord(b)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    match &cli.command {
        Command::Ord(c) => ord_cmd(c),
        Command::Ladder(c) => ladder_cmd(&sys, c),
        Command::Walk(a) => walk_cmd(&sys, a),
        Command::Tr2(a) => tr2_cmd(&sys, a),
        Command::F(c) => f_cmd(&sys, c, &mut rng),
        Command::Basis(c) => basis_cmd(&sys, c),
        Command::Homology(c) => homology_cmd(&sys, c),
        Command::Cohere(c) => cohere_cmd(&sys, c),
        Command::ExportFig(a) => export_cmd(&sys, a),
    }
}

fn ord_cmd(c: &OrdCmd) -> Res<Outcome> {
    Ok(match c {
        OrdCmd::Parse { a } => {
            let x = parse_ord(a)?;
            Outcome::new(format!("{x}\n"), json!({"input": a, "ordinal": x.to_string()}))
        }
        OrdCmd::Cmp { a, b } => {
            let r = match parse_ord(a)?.cmp(&parse_ord(b)?) {
                std::cmp::Ordering::Less => "LT",
                std::cmp::Ordering::Equal => "EQ",
                std::cmp::Ordering::Greater => "GT",
            };
            Outcome::new(format!("{r}\n"), json!({"a": a, "b": b, "cmp": r}))
        }
        OrdCmd::Add { a, b } => {
            let s = parse_ord(a)?.add(&parse_ord(b)?);
            Outcome::new(format!("{s}\n"), json!({"a": a, "b": b, "sum": s.to_string()}))
        }
        OrdCmd::Classify { a } => {
            let x = parse_ord(a)?;
            let (kind, pred) = match x.classify() {
                Kind::Zero => ("zero", None),
                Kind::Successor(p) => ("successor", Some(p.to_string())),
                Kind::Limit => ("limit", None),
            };
            let mut text = format!("{x}: {kind}, cofinality {}\n", x.cof_rank());
            if let Some(p) = &pred {
                writeln!(text, "predecessor: {p}").unwrap();
            }
            Outcome::new(text, json!({"ordinal": x.to_string(), "kind": kind, "cof": x.cof_rank().to_string(), "predecessor": pred}))
        }
    })
}

fn ladder_outcome(sys: &LadderSystem, ctx: &Context, limit: usize) -> Outcome {
    let (elems, truncated) = ctx.prefix(sys, limit);
    let label = ctx.labels().join(",");
    let text = format!("C_{{{label}}} = {{{}{}}}\n", list_text(&elems), if truncated { ", ..." } else { "" });
    Outcome::new(text, json!({"context": ctx.labels(), "elements": list_json(&elems), "truncated": truncated}))
}

fn ladder_cmd(sys: &LadderSystem, c: &LadderCmd) -> Res<Outcome> {
    match c {
        LadderCmd::Show { beta, limit } => {
            let ctx = sys.ladder(&parse_ord(beta)?).map_err(err)?;
            Ok(ladder_outcome(sys, &ctx, *limit))
        }
        LadderCmd::Compound { tuple, limit } => {
            let t = parse_list(tuple)?;
            match sys.compound(&t).map_err(err)? {
                Some(ctx) => Ok(ladder_outcome(sys, &ctx, *limit)),
                None => Err(format!("C_{{{}}} is undefined: a coordinate is not an element of the view above it", fmt_tuple(&t))),
            }
        }
    }
}

fn walk_cmd(sys: &LadderSystem, a: &WalkArgs) -> Res<Outcome> {
    let (beta, alpha) = (parse_ord(&a.from)?, parse_ord(&a.to)?);
    if alpha > beta {
        return Err(format!("a walk goes down: --to {alpha} exceeds --from {beta}"));
    }
    for x in [&alpha, &beta] {
        sys.check(x).map_err(err)?;
    }
    let (tr, label) = match &a.internal {
        Some(d) => {
            let delta = parse_ord(d)?;
            if beta >= delta {
                return Err(format!("an internal walk stays below δ = {delta}"));
            }
            (internal_trace(sys, &delta, &alpha, &beta), format!("Tr^{delta}"))
        }
        None => (upper_trace(sys, &alpha, &beta), "Tr".to_string()),
    };
    let r1 = rho1(sys, &alpha, &beta);
    let mut text = format!("{label}({alpha},{beta}) = {}\n", list_text(&tr.steps));
    writeln!(text, "rho2 = {}", tr.rho2()).unwrap();
    if a.internal.is_none() {
        writeln!(text, "L = {}", list_text(&tr.lower)).unwrap();
        writeln!(text, "rho1 = {r1}").unwrap();
    }
    let json = json!({
        "from": beta.to_string(),
        "to": alpha.to_string(),
        "internal": a.internal,
        "trace": list_json(&tr.steps),
        "lower": list_json(&tr.lower),
        "rho2": tr.rho2(),
        "rho1": if a.internal.is_none() { Some(r1) } else { None },
    });
    Ok(Outcome::new(text, json))
}

fn tree_text(t: &WalkTree, depth: usize, out: &mut String) {
    let Some(o) = &t.output else { return };
    let sign = t.sign.map(Sign::as_str).unwrap_or("");
    writeln!(out, "{}{sign}{} -> {o}", "  ".repeat(depth), fmt_tuple(&t.input)).unwrap();
    for c in &t.children {
        tree_text(c, depth + 1, out);
    }
}

fn tr2_cmd(sys: &LadderSystem, a: &Tr2Args) -> Res<Outcome> {
    let t = parse_list(&a.tuple)?;
    if t.len() != 3 || !is_increasing(&t) {
        return Err("tr2 needs an increasing triple α,β,γ".into());
    }
    for x in &t {
        sys.check(x).map_err(err)?;
    }
    let tree = if a.signed { tr2_signed(sys, Sign::Plus, &t[0], &t[1], &t[2]) } else { tr2(sys, &t[0], &t[1], &t[2]) };
    let mut text = String::new();
    tree_text(&tree, 0, &mut text);
    writeln!(text, "nodes = {}", tree.size()).unwrap();
    if a.signed {
        writeln!(text, "rho2^2 = {}", tree.signed_count()).unwrap();
    }
    let mut out = Outcome::new(text, tree.to_json());
    out.dot = Some(tree.to_dot());
    Ok(out)
}

fn f_cmd(sys: &LadderSystem, c: &FCmd, rng: &mut ChaCha8Rng) -> Res<Outcome> {
    let fs = FSystem::new(sys.clone());
    match c {
        FCmd::Coeff { tuple, target, tilde } => {
            let input = parse_list(tuple)?;
            let variant = if *tilde { Variant::Tilde } else { Variant::Standard };
            let oracle = fs.oracle(&input, variant).map_err(err)?;
            let target = parse_target(target, *tilde)?;
            let z = oracle.coefficient(&target).map_err(err)?;
            Ok(Outcome::new(format!("{z}\n"), json!({"input": fmt_tuple(&input), "target": target.iter().map(|o| o.to_string()).collect::<Vec<_>>(), "coeff": z})))
        }
        FCmd::Slice { tuple, at, x, tilde } => {
            let input = parse_list(tuple)?;
            let chain = match (at, x) {
                (Some(b), None) => fs.support_slice(&input, &parse_ord(b)?),
                (None, Some(x)) => fs.x_slice(&input, &parse_ord(x)?),
                _ => return Err("give exactly one of --at and --x".into()),
            }
            .map_err(err)?;
            if *tilde {
                if input.len() != 2 {
                    return Err("the collapsed variant is defined for f₁ only".into());
                }
                let terms = collapse(sys, &chain);
                let text: String = terms.iter().map(|t| format!("{:+} ({},{},{})\n", t.coeff, t.x, t.k, t.z)).collect();
                return Ok(Outcome::new(text, Value::Array(terms.iter().map(|t| t.to_json()).collect())));
            }
            Ok(Outcome::new(format!("{chain}\n"), chain.to_json()))
        }
        FCmd::Verify { n, tuple, samples } => {
            let t = parse_list(tuple)?;
            if t.len() != n + 2 {
                return Err(format!("f_{n} coherence is checked on tuples of length {}", n + 2));
            }
            let r = verify_coherence(&fs, &t, *samples, rng).map_err(err)?;
            let mut text = format!(
                "{} coherence of f_{n} at {}: {} coefficients checked, defect s d = {}\n",
                if r.pass() { "PASS" } else { "FAIL" },
                fmt_tuple(&t),
                r.checked,
                r.defect
            );
            for m in &r.mismatches {
                writeln!(text, "  mismatch at {}: {} vs {}", fmt_tuple(&m.target), m.lhs, m.rhs).unwrap();
            }
            Ok(Outcome::new(text, r.to_json()).check(r.pass()))
        }
        FCmd::M { beta, gamma } => {
            let (b, g) = (parse_ord(beta)?, parse_ord(gamma)?);
            let m = m_value(&fs, &b, &g, 4).map_err(err)?;
            let formula = m_formula(sys, &b, &g, false);
            let text = format!("m({b},{g}) = {m}\nmin{{η ∈ C_{b} : η ≥ max L({b},{g})}} = {formula}\n");
            Ok(Outcome::new(text, json!({"beta": b.to_string(), "gamma": g.to_string(), "m": m.to_string(), "formula": formula.to_string()})))
        }
        FCmd::Relativize { beta, gamma, samples } => {
            let (b, g) = (parse_list(beta)?, parse_ord(gamma)?);
            let r = relativize_check(&fs, &b, &g, *samples, rng).map_err(err)?;
            let mut text = format!("{} relativization along {g}: {} targets checked\n", if r.pass() { "PASS" } else { "FAIL" }, r.checked);
            for m in &r.mismatches {
                writeln!(text, "  mismatch at {}: {} vs {}", fmt_tuple(&m.target), m.lhs, m.rhs).unwrap();
            }
            Ok(Outcome::new(text, r.to_json()).check(r.pass()))
        }
    }
}

fn parse_target(s: &str, tilde: bool) -> Res<Vec<Ordinal>> {
    if !tilde {
        return parse_list(s);
    }
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("a collapsed target is x,k,z".into());
    }
    let k: u64 = parts[1].trim().parse().map_err(|_| format!("k must be a natural number, got {:?}", parts[1]))?;
    Ok(vec![parse_ord(parts[0])?, Ordinal::from(k), parse_ord(parts[2])?])
}

fn basis_cmd(sys: &LadderSystem, c: &BasisCmd) -> Res<Outcome> {
    let basis = Basis::new(sys.clone());
    match c {
        BasisCmd::List { eps, n, window } => {
            let ctx = parse_context(eps)?;
            let members = basis.members_in(&ctx, *n, &parse_list(window)?);
            let text: String = members.iter().map(|m| format!("{}\n", fmt_tuple(m))).collect();
            Ok(Outcome::new(text, Value::Array(members.iter().map(|m| list_json(m)).collect())))
        }
        BasisCmd::Member { eps, tuple } => {
            let ctx = parse_context(eps)?;
            let t = parse_list(tuple)?;
            let m = basis.is_member(&ctx, &t);
            Ok(Outcome::new(format!("{m}\n"), json!({"tuple": fmt_tuple(&t), "member": m})))
        }
        BasisCmd::Decompose { eps, chain } => {
            let ctx = parse_context(eps)?;
            let v: Value = serde_json::from_str(&read_source(chain)?).map_err(err)?;
            let x = Chain::from_json(&v).map_err(err)?;
            let parts = basis.decompose(&ctx, &x).map_err(err)?;
            let section = basis.section(&ctx, &x).map_err(err)?;
            let mut text: String = parts.iter().map(|(z, g)| format!("{z:+} d{}\n", fmt_tuple(g))).collect();
            writeln!(text, "s(x) = {section}").unwrap();
            let json = json!({
                "decomposition": parts.iter().map(|(z, g)| json!({"coeff": z, "gen": list_json(g)})).collect::<Vec<_>>(),
                "section": section.to_json(),
            });
            Ok(Outcome::new(text, json))
        }
        BasisCmd::Verify { eps, n, window } => {
            let ctx = parse_context(eps)?;
            let w = parse_list(window)?;
            let members = basis.members_in(&ctx, *n, &w);
            let bds: Vec<Chain> = members.iter().map(|m| Chain::gen(m.clone()).and_then(|c| c.boundary())).collect::<Result<_, _>>().map_err(err)?;
            let independent = integer_kernel_trivial(&bds);
            let mut checked = 0;
            let mut failures = Vec::new();
            let mut all: Vec<Ordinal> = w.clone();
            all.sort();
            all.dedup();
            for t in combinations(&all, n + 1) {
                let x = Chain::gen(t.clone()).and_then(|c| c.boundary()).map_err(err)?;
                let back = basis.section(&ctx, &x).map_err(err)?.boundary().map_err(err)?;
                checked += 1;
                if back != x {
                    failures.push(fmt_tuple(&t));
                }
            }
            let pass = independent && failures.is_empty();
            let text = format!(
                "{}: {} members of B_{n} on the window, independent: {independent}, spanning checked on {checked} boundaries, failures: {}\n",
                if pass { "PASS" } else { "FAIL" },
                members.len(),
                failures.len()
            );
            let json = json!({"members": members.len(), "independent": independent, "spanning_checked": checked, "spanning_failures": failures, "pass": pass});
            Ok(Outcome::new(text, json).check(pass))
        }
    }
}

fn combinations(v: &[Ordinal], k: usize) -> Vec<Vec<Ordinal>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        for mut rest in combinations(&v[i + 1..], k - 1) {
            rest.insert(0, v[i].clone());
            out.push(rest);
        }
    }
    out
}

fn read_complex(path: &str) -> Res<Complex> {
    let text = fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    Complex::parse_face_list(&text).map_err(err)
}

fn graph_outcome(g: &Graph, header: String, pass: bool) -> Outcome {
    let mut text = header;
    for (a, b) in g.edges() {
        writeln!(text, "{a} -- {b}").unwrap();
    }
    if g.truncated {
        text.push_str("(truncated to the window)\n");
    }
    let mut out = Outcome::new(text, g.to_json()).check(pass);
    out.dot = Some(g.to_dot());
    out
}

fn homology_cmd(sys: &LadderSystem, c: &HomologyCmd) -> Res<Outcome> {
    match c {
        HomologyCmd::Compute { faces } => {
            let cx = read_complex(faces)?;
            let h = reduced_homology(&cx);
            Ok(Outcome::new(h.to_string(), h.to_json()))
        }
        HomologyCmd::TailAcyclic { faces } => {
            let cx = read_complex(faces)?;
            let r = tail_acyclic_report(&cx);
            let mut text = format!("tail-acyclic: {}\ncomplete skeleton: {}\n", r.pass(), r.complete_skeleton);
            if let Some((v, h)) = &r.failing_tail {
                writeln!(text, "tail from {v}:").unwrap();
                text.push_str(&h.to_string());
            }
            Ok(Outcome::new(text, r.to_json()).check(r.pass()))
        }
        HomologyCmd::GoodGraph { faces } => {
            let cx = read_complex(faces)?;
            if cx.dim() > 1 {
                return Err("a graph file lists vertices and edges only".into());
            }
            let edges: Vec<(Ordinal, Ordinal)> =
                cx.faces().filter(|f| f.len() == 2).map(|f| (f[0].clone(), f[1].clone())).collect();
            let g = Graph::new(cx.vertices(), &edges).map_err(err)?;
            let good = g.is_good();
            let forbidden = g.forbidden_configuration();
            let mut text = format!("good: {good}\n");
            if let Some((a, b, c)) = &forbidden {
                writeln!(text, "copy of G1: {{{a},{b}}}, {{{a},{c}}}").unwrap();
            }
            let json = json!({
                "good": good,
                "connected": g.is_connected(),
                "forbidden": forbidden.map(|(a, b, c)| [a.to_string(), b.to_string(), c.to_string()]),
            });
            let mut out = Outcome::new(text, json).check(good);
            out.dot = Some(g.to_dot());
            Ok(out)
        }
        HomologyCmd::WalkGraph { gamma, window, elementary } => {
            let g = parse_ord(gamma)?;
            sys.check(&g).map_err(err)?;
            let w = match window {
                Some(w) => parse_list(w)?,
                None if g.is_finite() => Vec::new(),
                None => return Err(format!("{g} is infinite: pass --window")),
            };
            let graph = if *elementary { elementary_good_graph(sys, &g, &w) } else { walk_graph(sys, &g, &w) };
            let good = graph.is_good();
            Ok(graph_outcome(&graph, format!("good: {good}\n"), true))
        }
    }
}

fn default_window(sys: &LadderSystem, seeds: &[Ordinal]) -> Vec<Ordinal> {
    let hi = seeds.iter().max().cloned().unwrap_or_else(Ordinal::zero);
    sample::neighbourhood(sys, seeds, &Ordinal::zero(), &hi, 8)
}

fn family(fs: &FSystem, name: FamilyName) -> FamilyOracle {
    match name {
        FamilyName::PhiX => phi_x_family(fs),
        FamilyName::PhiStar => phi_star_family(fs),
        FamilyName::PhiTheta => phi_theta_family(fs),
        FamilyName::Rho2 => rho2_fiber_family(fs.system()),
    }
}

fn report_text(name: &str, r: &higher_walks::coherence::CheckReport) -> String {
    let mut text = format!("{} {name}\n", if r.pass() { "PASS" } else { "FAIL" });
    for t in &r.tuples {
        writeln!(text, "  {}: {:?}, defect support {{{}}}", fmt_tuple(&t.tuple), t.verdict, list_text(&t.defect_support)).unwrap();
    }
    text
}

fn cohere_cmd(sys: &LadderSystem, c: &CohereCmd) -> Res<Outcome> {
    let fs = FSystem::new(sys.clone());
    match c {
        CohereCmd::CheckI { family: name, tuples, window } => {
            let fam = family(&fs, *name);
            let ts = parse_tuples(tuples)?;
            let w = match window {
                Some(w) => parse_list(w)?,
                None => default_window(sys, &ts.concat()),
            };
            let r = check_coherent_i(&fam, &ts, &w).map_err(err)?;
            Ok(Outcome::new(report_text(&fam.name, &r), r.to_json()).check(r.pass()))
        }
        CohereCmd::CheckII { family: name, pairs, window } => {
            let fam = family(&fs, *name);
            if fam.arity > 2 {
                return Err("second-sense checks cover families of arity 1 and 2".into());
            }
            let ps: Vec<(Ordinal, Ordinal)> = parse_tuples(pairs)?
                .into_iter()
                .map(|p| match p.as_slice() {
                    [g, d] => Ok((g.clone(), d.clone())),
                    _ => Err(format!("a pair has two entries, got {}", fmt_tuple(&p))),
                })
                .collect::<Res<_>>()?;
            let seeds: Vec<Ordinal> = ps.iter().flat_map(|(g, d)| [g.clone(), d.clone()]).collect();
            let w = match window {
                Some(w) => parse_list(w)?,
                None => default_window(sys, &seeds),
            };
            let (s, wit) = a_n_convert(&fam);
            let r = check_coherent_ii(&s, &wit, &ps, &w).map_err(err)?;
            Ok(Outcome::new(report_text(&s.name, &r), r.to_json()).check(r.pass()))
        }
        CohereCmd::PhiTheta { beta, alpha } => {
            let (b, a) = (parse_ord(beta)?, parse_ord(alpha)?);
            let t = theta(&a).map_err(err)?;
            let v = phi_theta(&fs, &b, &a).map_err(err)?;
            let text = format!("theta({a}) = {}\nphi^theta_{b}({a}) = {v}\n", fmt_tuple(&t));
            Ok(Outcome::new(text, json!({"alpha": a.to_string(), "beta": b.to_string(), "theta": list_json(&t), "value": v})))
        }
        CohereCmd::S1 { gamma, alpha, beta } => {
            let (g, a, b) = (parse_ord(gamma)?, parse_ord(alpha)?, parse_ord(beta)?);
            let v = s1(&fs, &g, &a, &b).map_err(err)?;
            Ok(Outcome::new(format!("{v}\n"), json!({"gamma": g.to_string(), "alpha": a.to_string(), "beta": b.to_string(), "value": v})))
        }
        CohereCmd::S2 { delta, beta, gamma } => {
            let (d, b, g) = (parse_ord(delta)?, parse_ord(beta)?, parse_ord(gamma)?);
            let ch = s2(&fs, &d, &b, &g).map_err(err)?;
            Ok(Outcome::new(format!("{ch}\n"), ch.to_json()))
        }
    }
}

/// Adds the terms of `part` not yet in `acc`; slices of one chain overlap.
fn union(acc: &mut Chain, part: &Chain) {
    for (t, z) in part.terms() {
        if acc.coeff(t) == 0 {
            acc.add_term(t.clone(), z);
        }
    }
}

fn export_cmd(sys: &LadderSystem, a: &ExportArgs) -> Res<Outcome> {
    let fs = FSystem::new(sys.clone());
    let input = parse_list(&a.tuple)?;
    let mut chain = Chain::zero();
    match (&a.at, &a.x) {
        (Some(at), None) => {
            for b in parse_list(at)? {
                union(&mut chain, &fs.support_slice(&input, &b).map_err(err)?);
            }
        }
        (None, Some(x)) => {
            for b in parse_list(x)? {
                union(&mut chain, &fs.x_slice(&input, &b).map_err(err)?);
            }
        }
        _ => chain = fs.full(&input).map_err(|e| format!("{e}; pass --at or --x to export slices"))?,
    }
    let header = match input.len() {
        2 => "x,y,z,coeff",
        3 => "w,x,y,z,coeff",
        _ => "x,coeff",
    };
    let mut csv = format!("{header}\n");
    for (t, z) in chain.terms() {
        writeln!(csv, "{},{z}", t.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(",")).unwrap();
    }
    let mut out = Outcome::new(csv.clone(), chain.to_json());
    out.csv = Some(csv);
    Ok(out)
}
