//! `stabdb` command line tool.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on usage or
//! input errors.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use stabdb::canon::class_key_with_aut;
use stabdb::db::{build_records, emit_distributions, list_cells, query, read_level, write_db, Query};
use stabdb::f2::BitMatrix;
use stabdb::pauli::{parse_generator_file, StabGroup};
use stabdb::properties::properties;
use stabdb::search::{
    cws_enumerate_with, cws_to_stabilizer, enumerate_classes_with, parse_code, stabilizer_to_cws, Enumeration,
    GraphState, SearchError, SearchOptions,
};
use stabdb::verify::mass_check;

#[derive(Parser)]
#[command(name = "stabdb", version, about = "Enumerate and query stabilizer codes up to local Clifford and qubit permutation equivalence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all classes for n qubits and write the database.
    Enumerate(EnumerateArgs),
    /// Check the mass formula on every cell of a database.
    VerifyMass(VerifyArgs),
    /// Print the invariants of one code.
    Props(PropsArgs),
    /// Print the canonical key and automorphism group order of one code.
    Canon(GensArgs),
    /// Print matching records as JSON lines.
    Query(QueryArgs),
    /// Convert between stabilizer generators and CWS form.
    Cws(CwsArgs),
    /// Write the distance distribution of one n as CSV.
    Dist(DistArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Iterative,
    Cws,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    n: usize,
    /// Smallest k to enumerate.
    #[arg(long, default_value_t = 0)]
    kmin: usize,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Strategy::Iterative)]
    strategy: Strategy,
    #[arg(long, env = "STABDB_THREADS")]
    threads: Option<usize>,
    /// Stop after this many canonical-form computations.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    db: PathBuf,
    /// Restrict to one n.
    #[arg(long)]
    n: Option<usize>,
    /// Also recompute every stored canonical key.
    #[arg(long)]
    keys: bool,
}

#[derive(Args)]
struct GensArgs {
    /// Semicolon-separated Pauli strings, e.g. "XXXX;ZZZZ".
    #[arg(long)]
    gens: String,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "source")]
struct Source {
    /// Generator file: one Pauli string per line, `#` comments.
    #[arg(long = "in", group = "source")]
    input: Option<PathBuf>,
    /// Semicolon-separated Pauli strings.
    #[arg(long, group = "source")]
    gens: Option<String>,
}

#[derive(Args)]
struct PropsArgs {
    #[command(flatten)]
    source: Source,
    /// Print one JSON object instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    db: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    index: Option<usize>,
    /// Only CSS classes.
    #[arg(long)]
    css: bool,
    /// Only GF(4)-linear classes.
    #[arg(long)]
    gf4: bool,
    /// Only indecomposable classes.
    #[arg(long)]
    indecomposable: bool,
    /// Extra filter `field=value`, repeatable.
    #[arg(long = "filter", value_name = "FIELD=VALUE")]
    filters: Vec<String>,
    /// Skip generator validation while reading.
    #[arg(long)]
    info_only: bool,
    /// Print the number of matches only.
    #[arg(long)]
    count: bool,
}

#[derive(Args)]
struct CwsArgs {
    /// Build the stabilizer from a graph and a classical code.
    #[arg(long, conflicts_with = "to_cws", requires_all = ["edges", "n"])]
    to_stab: bool,
    /// Convert generators to CWS form.
    #[arg(long, requires = "gens")]
    to_cws: bool,
    /// Graph edges, e.g. "0-1;1-2".
    #[arg(long)]
    edges: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Code rows, e.g. "101;011". Empty means k = 0.
    #[arg(long, default_value = "")]
    code: String,
    #[arg(long)]
    gens: Option<String>,
}

#[derive(Args)]
struct DistArgs {
    #[arg(long)]
    db: PathBuf,
    #[arg(long)]
    n: usize,
    /// Output path, `-` for stdout.
    #[arg(long)]
    csv: PathBuf,
}

/// A check that ran and failed; mapped to exit code 1.
#[derive(Debug)]
struct VerificationFailed(String);

impl fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "verification failed: {}", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Enumerate(a) => enumerate(a),
        Command::VerifyMass(a) => verify_mass(a),
        Command::Props(a) => props(a),
        Command::Canon(a) => canon(a),
        Command::Query(a) => run_query(a),
        Command::Cws(a) => cws(a),
        Command::Dist(a) => dist(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", error_chain(&e));
            if e.is::<VerificationFailed>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

/// Joins the error chain, skipping causes whose text the previous message
/// already contains.
fn error_chain(e: &anyhow::Error) -> String {
    let mut out = e.to_string();
    let mut last = out.clone();
    for cause in e.chain().skip(1) {
        let text = cause.to_string();
        if !last.contains(&text) {
            out.push_str(": ");
            out.push_str(&text);
        }
        last = text;
    }
    out
}

fn parse_gens(s: &str) -> Result<StabGroup> {
    StabGroup::parse(s).with_context(|| format!("bad generators {s:?}"))
}

fn load_group(src: &Source) -> Result<StabGroup> {
    match (&src.input, &src.gens) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_generator_file(&text).with_context(|| format!("parsing {}", path.display()))
        }
        (None, Some(g)) => parse_gens(g),
        (None, None) => bail!("one of --in or --gens is required"),
    }
}

fn enumerate(a: EnumerateArgs) -> Result<()> {
    let opts = SearchOptions { threads: a.threads, budget: a.budget };
    let result = match a.strategy {
        Strategy::Iterative => enumerate_classes_with(a.n, a.kmin, &opts),
        Strategy::Cws => enumerate_cws(a.n, a.kmin, &opts),
    };
    let (enumeration, partial) = match result {
        Ok(e) => (e, None),
        Err(SearchError::Budget { limit, completed_down_to, completed }) => (*completed, Some((limit, completed_down_to))),
        Err(e) => return Err(e.into()),
    };
    let records = build_records(&enumeration)?;
    let paths = write_db(&a.out, a.n, &records)?;
    for (k, recs) in &records {
        println!("n={} k={k}: {} classes", a.n, recs.len());
    }
    println!("total {} classes, {} files in {}", enumeration.total(), paths.len(), a.out.display());
    if let Some((limit, down_to)) = partial {
        bail!("budget of {limit} canonical forms exhausted; levels k >= {down_to} are complete and were written");
    }
    Ok(())
}

fn enumerate_cws(n: usize, kmin: usize, opts: &SearchOptions) -> Result<Enumeration, SearchError> {
    if kmin > n {
        return Err(SearchError::BadLevel { n, k_min: kmin });
    }
    let mut levels = BTreeMap::new();
    for k in (kmin..=n).rev() {
        match cws_enumerate_with(n, k, opts) {
            Ok(classes) => {
                levels.insert(k, classes);
            }
            Err(SearchError::Budget { limit, .. }) => {
                return Err(SearchError::Budget {
                    limit,
                    completed_down_to: k + 1,
                    completed: Box::new(Enumeration { n, levels }),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Enumeration { n, levels })
}

fn verify_mass(a: VerifyArgs) -> Result<()> {
    let cells: Vec<(usize, usize)> =
        list_cells(&a.db)?.into_iter().filter(|&(n, _)| a.n.is_none_or(|x| x == n)).collect();
    if cells.is_empty() {
        bail!("no database files found in {}", a.db.display());
    }
    let mut failures = Vec::new();
    for (n, k) in cells {
        let records = read_level(&a.db, n, k, true)?;
        let check = mass_check(records.iter().map(|r| &r.aut_group_size), n, k)?;
        let status = if check.ok() { "ok" } else { "MISMATCH" };
        println!("n={n} k={k} classes={} sum={} expected={} {status}", records.len(), check.lhs, check.rhs);
        if !check.ok() {
            failures.push(format!("mass n={n} k={k}"));
        }
        if a.keys {
            for r in &records {
                if !r.key_matches()? {
                    failures.push(format!("key n={n} k={k} index={}", r.index));
                }
            }
        }
    }
    if !failures.is_empty() {
        return Err(VerificationFailed(failures.join(", ")).into());
    }
    Ok(())
}

fn props(a: PropsArgs) -> Result<()> {
    let g = load_group(&a.source)?;
    let p = properties(&g)?;
    let (key, aut) = class_key_with_aut(&g)?;
    if a.json {
        let value = json!({
            "n": g.n(),
            "k": g.k(),
            "d": p.d,
            "generators": g.generator_strings(),
            "aut_group_size": aut.to_string(),
            "is_css": p.is_css,
            "is_decomposable": p.is_decomposable,
            "is_degenerate": p.is_degenerate,
            "is_gf4linear": p.is_gf4linear,
            "is_even": p.is_even,
            "length": p.length,
            "weight_enumerator": p.weight_enumerator.coeffs,
            "canonical_key": key.to_hex(),
        });
        println!("{value}");
        return Ok(());
    }
    println!("[[{},{},{}]]", g.n(), g.k(), p.d);
    println!("weight enumerator: {}", p.weight_enumerator);
    println!("aut group size: {aut}");
    println!("css: {}", p.is_css);
    println!("gf4 linear: {}", p.is_gf4linear);
    println!("decomposable: {}", p.is_decomposable);
    println!("length: {}", p.length);
    println!("degenerate: {}", p.is_degenerate);
    println!("even: {}", p.is_even);
    println!("canonical key: {key}");
    Ok(())
}

fn canon(a: GensArgs) -> Result<()> {
    let g = parse_gens(&a.gens)?;
    let (key, aut) = class_key_with_aut(&g)?;
    println!("{key}");
    println!("{aut}");
    Ok(())
}

fn run_query(a: QueryArgs) -> Result<()> {
    let mut q = Query { n: a.n, k: a.k, d: a.d, index: a.index, info_only: a.info_only, ..Query::default() };
    if a.css {
        q.is_css = Some(true);
    }
    if a.gf4 {
        q.is_gf4linear = Some(true);
    }
    if a.indecomposable {
        q.is_decomposable = Some(false);
    }
    for f in &a.filters {
        let (name, value) = f.split_once('=').with_context(|| format!("filter {f:?} is not FIELD=VALUE"))?;
        q.set(name.trim(), value)?;
    }
    let records = query(&a.db, &q)?;
    if a.count {
        println!("{}", records.len());
    } else {
        for r in &records {
            println!("{}", r.to_json_line());
        }
    }
    Ok(())
}

fn code_string(m: &BitMatrix) -> String {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| if m.get(i, j) { '1' } else { '0' }).collect::<String>())
        .collect::<Vec<_>>()
        .join(";")
}

fn cws(a: CwsArgs) -> Result<()> {
    if a.to_stab {
        let (edges, n) = (a.edges.as_deref().unwrap_or_default(), a.n.unwrap_or_default());
        let graph = GraphState::parse_edges(edges, n)?;
        let code = parse_code(&a.code, n)?;
        let g = cws_to_stabilizer(&graph, &code)?;
        println!("{}", g.generator_strings().join(";"));
    } else if a.to_cws {
        let g = parse_gens(a.gens.as_deref().unwrap_or_default())?;
        let form = stabilizer_to_cws(&g);
        println!("n: {}", g.n());
        println!("edges: {}", form.graph.edges_string());
        println!("code: {}", code_string(&form.words));
        let names: Vec<&str> = form.clifford.perms.iter().map(|p| p.name()).collect();
        println!("local clifford: {}", names.join(" "));
    } else {
        bail!("one of --to-stab or --to-cws is required");
    }
    Ok(())
}

fn dist(a: DistArgs) -> Result<()> {
    let text = emit_distributions(&a.db, a.n)?;
    if a.csv == Path::new("-") {
        print!("{text}");
    } else {
        fs::write(&a.csv, text).with_context(|| format!("writing {}", a.csv.display()))?;
    }
    Ok(())
}
