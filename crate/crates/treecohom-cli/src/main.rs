//! Batch driver over the treecohom library.
//!
//! Subcommands: betti, verify, tableaux, dump.  All output is deterministic;
//! JSON is byte-stable across runs for identical inputs.
//!
//! Exit codes: 0 success / all checks pass, 1 check failure or method
//! disagreement, 2 usage or input error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use treecohom::closedform;
use treecohom::complex::{BettiMethod, ComplexError, ExteriorComplex};
use treecohom::diagram::{BuiltinFamily, Edge, TreeDiagram};
use treecohom::liealg::LieAlgebraModel;
use treecohom::verify::{self, CheckReport};

/// Largest model dimension accepted without --force.  Cochain spaces grow as
/// 2^dim, so this guards against accidental exponential blowups.
const DIM_CAP: usize = 24;

#[derive(Parser)]
#[command(
    name = "treecohom",
    version,
    about = "Exact cohomology of Lie algebras built from weighted oriented tree diagrams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute Betti numbers, optionally listed per weight
    Betti(BettiArgs),
    /// Run named identity checks and report pass/fail
    Verify(VerifyArgs),
    /// Count bounded row-strict tableaux by enumeration and by hook contents
    Tableaux(TableauxArgs),
    /// Print the basis and structure constants of a model
    Dump(DumpArgs),
}

/// Exactly one diagram source: a file in the "nodes N / edge I J W" format,
/// or a builtin spec.
#[derive(Args)]
struct Source {
    /// Diagram file
    #[arg(value_name = "FILE", conflicts_with = "builtin")]
    file: Option<PathBuf>,
    /// Builtin diagram: path:N, a:N,M, multi:D, instar:N, outstar:M, figure1
    #[arg(long, value_name = "SPEC")]
    builtin: Option<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Algebra {
    /// Nilpotent model spanned by the natural basis
    L0,
    /// Extension by the diagonal derivations x_i d_i
    L1,
}

#[derive(Args)]
struct BettiArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value = "l0")]
    algebra: Algebra,
    /// laplacian, rank, or both (both cross-validates)
    #[arg(long, default_value = "both")]
    method: String,
    /// Also list nonzero per-weight block dimensions (text output)
    #[arg(long)]
    per_weight: bool,
    #[arg(long)]
    json: bool,
    /// Run even if the model dimension exceeds the cap
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    /// Comma-separated list from: euler, vandermonde, anm, totalrank, b2,
    /// solvable, closedform
    #[arg(long, default_value = "euler")]
    checks: String,
    /// Algebra used by the euler check; the others fix their own
    #[arg(long, value_enum, default_value = "l0")]
    algebra: Algebra,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct TableauxArgs {
    /// Largest allowed entry
    #[arg(long)]
    m: usize,
    /// Rows are capped at n+1
    #[arg(long)]
    n: usize,
    /// Total number of cells
    #[arg(long)]
    degree: usize,
    /// Also print every filling
    #[arg(long)]
    list: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value = "l0")]
    algebra: Algebra,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// TREECOHOM_THREADS caps the rayon pool used for block parallelism.
fn init_threads() {
    if let Ok(value) = std::env::var("TREECOHOM_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Betti(args) => cmd_betti(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Tableaux(args) => cmd_tableaux(args),
        Command::Dump(args) => cmd_dump(args),
    }
}

fn load(source: &Source) -> Result<(TreeDiagram, Option<BuiltinFamily>)> {
    match (&source.file, &source.builtin) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("no such file: {}", path.display()))?;
            Ok((TreeDiagram::parse(&text)?, None))
        }
        (None, Some(spec)) => {
            let family = BuiltinFamily::from_str(spec)?;
            Ok((TreeDiagram::builtin(family)?, Some(family)))
        }
        _ => bail!("exactly one diagram source is required: a FILE or --builtin SPEC"),
    }
}

fn build_model(diagram: &TreeDiagram, algebra: Algebra) -> Result<LieAlgebraModel> {
    let model = match algebra {
        Algebra::L0 => LieAlgebraModel::nilpotent(diagram)?,
        Algebra::L1 => LieAlgebraModel::solvable(diagram)?,
    };
    Ok(model)
}

fn guard_dim(dim: usize, force: bool) -> Result<()> {
    if dim > DIM_CAP && !force {
        bail!("model dimension {dim} exceeds the cap {DIM_CAP}; pass --force to run anyway");
    }
    Ok(())
}

/// Recognizes a path with `m` tips attached to its last node, all weights 1.
/// Prefers the largest path part, so a bare path reads as (n, 0).
/// The builtin spec wins when it already names the parameters.
fn branched_params(diagram: &TreeDiagram, builtin: Option<BuiltinFamily>) -> Option<(usize, usize)> {
    match builtin {
        Some(BuiltinFamily::Path(n)) => return Some((n, 0)),
        Some(BuiltinFamily::BranchedPath(n, m)) => return Some((n, m)),
        Some(BuiltinFamily::OutStar(m)) => return Some((1, m)),
        _ => {}
    }
    let total = diagram.node_count();
    for n in (1..=total).rev() {
        let m = total - n;
        let mut edges: Vec<Edge> = (1..n).map(|i| Edge { tail: i, head: i + 1, weight: 1 }).collect();
        edges.extend((1..=m).map(|k| Edge { tail: n, head: n + k, weight: 1 }));
        edges.sort();
        if edges.as_slice() == diagram.edges() {
            return Some((n, m));
        }
    }
    None
}

fn cmd_betti(args: BettiArgs) -> Result<ExitCode> {
    let (diagram, _) = load(&args.source)?;
    let method = BettiMethod::from_str(&args.method).map_err(anyhow::Error::msg)?;
    let model = build_model(&diagram, args.algebra)?;
    guard_dim(model.dim(), args.force)?;
    let complex = ExteriorComplex::new(&model)?;
    let table = match complex.betti(method) {
        Ok(table) => table,
        Err(
            err @ (ComplexError::MethodDisagreement { .. } | ComplexError::HodgeMismatch { .. }),
        ) => {
            eprintln!("betti: {err}");
            return Ok(ExitCode::from(1));
        }
        Err(err) => return Err(err.into()),
    };
    if args.json {
        println!("{}", table.to_json());
    } else {
        let line: Vec<String> = table.betti.iter().map(|b| b.to_string()).collect();
        println!("{}", line.join(" "));
        if args.per_weight {
            for ((p, w), d) in &table.per_weight {
                let parts: Vec<String> = w.iter().map(|c| c.to_string()).collect();
                println!("p={} w=[{}] dim={}", p, parts.join(","), d);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

const KNOWN_CHECKS: [&str; 7] =
    ["euler", "vandermonde", "anm", "totalrank", "b2", "solvable", "closedform"];

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let (diagram, builtin) = load(&args.source)?;
    let names: Vec<&str> =
        args.checks.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        bail!("--checks must name at least one check");
    }
    for name in &names {
        if !KNOWN_CHECKS.contains(name) {
            bail!("unknown check '{}' (known: {})", name, KNOWN_CHECKS.join(", "));
        }
    }

    let mut reports: Vec<CheckReport> = Vec::new();
    for name in names {
        let report = match name {
            "euler" => {
                let model = build_model(&diagram, args.algebra)?;
                guard_dim(model.dim(), args.force)?;
                verify::check_euler(&model)?
            }
            "vandermonde" => {
                let (n, m) = branched_params(&diagram, builtin)
                    .context("vandermonde requires a weight-1 path diagram")?;
                if m != 0 {
                    bail!("vandermonde requires a weight-1 path diagram with no extra tips");
                }
                verify::check_vandermonde(n)?
            }
            "anm" => {
                let (n, m) = branched_params(&diagram, builtin)
                    .context("anm requires a weight-1 branched path diagram")?;
                verify::check_anm_identity(n, m)?
            }
            "totalrank" => {
                let model = LieAlgebraModel::nilpotent(&diagram)?;
                guard_dim(model.dim(), args.force)?;
                verify::check_total_rank(&model)?
            }
            "b2" => {
                let model = LieAlgebraModel::nilpotent(&diagram)?;
                guard_dim(model.dim(), args.force)?;
                verify::check_b2(&model)?
            }
            "solvable" => {
                let model = LieAlgebraModel::solvable(&diagram)?;
                guard_dim(model.dim(), args.force)?;
                verify::check_solvable(&diagram)?
            }
            "closedform" => {
                let (n, m) = branched_params(&diagram, builtin)
                    .context("closedform requires a weight-1 branched path diagram")?;
                let dim = n * (n + 1) / 2 + m * (n + 1);
                guard_dim(dim, args.force)?;
                verify::check_closedform(n, m)?
            }
            _ => unreachable!(),
        };
        reports.push(report);
    }

    let all_pass = reports.iter().all(|r| r.pass);
    if args.json {
        let array: Vec<serde_json::Value> = reports.iter().map(CheckReport::to_json).collect();
        println!("{}", serde_json::Value::Array(array));
    } else {
        for report in &reports {
            if report.pass {
                println!("{}: pass {}", report.check, report.details);
            } else {
                let witness = report.witness.clone().unwrap_or(serde_json::Value::Null);
                println!("{}: FAIL {} witness={}", report.check, report.details, witness);
            }
        }
    }
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_tableaux(args: TableauxArgs) -> Result<ExitCode> {
    if args.m == 0 || args.n == 0 {
        bail!("--m and --n must be positive");
    }
    let tableaux = closedform::enumerate_tableaux(args.m, args.n, args.degree);
    let enumerated = tableaux.len();
    let hooks = closedform::tableau_count_via_hooks(args.m, args.n, args.degree);
    let hook_count: usize = hooks
        .to_string()
        .parse()
        .with_context(|| format!("hook count {hooks} does not fit in usize"))?;
    if args.json {
        let mut out = json!({
            "m": args.m,
            "n": args.n,
            "degree": args.degree,
            "enumerated": enumerated,
            "hook": hook_count,
        });
        if args.list {
            let fillings: Vec<serde_json::Value> =
                tableaux.iter().map(closedform::Tableau::to_json).collect();
            out["tableaux"] = serde_json::Value::Array(fillings);
        }
        println!("{out}");
    } else {
        println!("count={enumerated} (enum) count={hook_count} (hook)");
        if args.list {
            for tableau in &tableaux {
                println!("{}", tableau.to_json());
            }
        }
    }
    Ok(if enumerated == hook_count { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_dump(args: DumpArgs) -> Result<ExitCode> {
    let (diagram, _) = load(&args.source)?;
    let model = build_model(&diagram, args.algebra)?;
    if args.json {
        println!("{}", model.dump_json());
    } else {
        println!("dim {}", model.dim());
        for (i, u) in model.basis.iter().enumerate() {
            let parts: Vec<String> = model.weights[i].iter().map(|c| c.to_string()).collect();
            println!("u{i} = {u}  weight [{}]", parts.join(","));
        }
        for (i, j, c, k) in model.table_entries() {
            println!("[u{i}, u{j}] = {c}*u{k}");
        }
    }
    Ok(ExitCode::SUCCESS)
}
