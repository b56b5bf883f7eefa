mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pebbling_core::bounds::{self, BoundMethod, BoundsJson, GraphBounds, RootJson};
use pebbling_core::families::{parse_parents, FamilySpec};
use pebbling_core::lp::{self, format_rational, LpStatus};
use pebbling_core::solver::{self, SolverOptions, DEFAULT_MAX_CONFIGS};
use pebbling_core::strategy::{self, GenerationMethod, StrategySet};
use pebbling_core::treepi;
use pebbling_core::verify::{self, Level};
use pebbling_core::Graph;

use input::GraphSource;

#[derive(Parser, Debug)]
#[command(name = "pebbling", version, about = "Graph pebbling numbers, strategies and bounds")]
struct Cli {
    /// Print the result as JSON.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "PEBBLING_THREADS", default_value_t = 0)]
    threads: usize,

    /// Largest number of configurations enumerated per pebble count.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_CONFIGS)]
    max_configs: u64,

    /// Write the primary output to this file instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a family member as an edge list.
    Family(FamilyArgs),
    /// Decide whether a configuration can reach the root.
    Solve(SolveArgs),
    /// Exact pebbling number, rooted or over all roots.
    Pi(PiArgs),
    /// A largest unsolvable configuration for a root.
    MaxUnsolvable(RootedArgs),
    /// Generate a strategy set and write it as JSON.
    Strategies(StrategiesArgs),
    /// Upper bounds from strategy sets.
    Bound(BoundArgs),
    /// Solve the linear relaxation for one root.
    Lp(LpArgs),
    /// Closed-form pebbling number of a tree.
    TreePi(TreePiArgs),
    /// Run the reproduction checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Size parameter: vertex count, or dimension for hypercubes.
    #[arg(long, short, visible_alias = "d")]
    n: Option<usize>,
    /// Parent array for trees, `-` marking the root, e.g. `-,0,0,1`.
    #[arg(long, allow_hyphen_values = true)]
    parents: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Path,
    Cycle,
    Complete,
    Hypercube,
    Petersen,
    Bruhat,
    Tree,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    graph: GraphSource,
    #[arg(long)]
    root: usize,
    /// Inline configuration `vertex:count,...`.
    #[arg(long, group = "conf", required_unless_present = "config_file")]
    config: Option<String>,
    /// File holding a configuration, or a JSON report with a `config` field.
    #[arg(long, group = "conf")]
    config_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PiArgs {
    #[command(flatten)]
    graph: GraphSource,
    /// Omit to maximize over all roots.
    #[arg(long)]
    root: Option<usize>,
}

#[derive(Args, Debug)]
struct RootedArgs {
    #[command(flatten)]
    graph: GraphSource,
    #[arg(long)]
    root: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Greedy,
    Paths,
    Bfs,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// How strategies are generated.
    #[arg(long, value_enum, default_value_t = Method::Greedy)]
    method: Method,
    /// Strategy cap for greedy search.
    #[arg(long, default_value_t = 256)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Longest path for `paths`; defaults to the root's eccentricity.
    #[arg(long)]
    max_len: Option<usize>,
    /// Number of trees for `bfs`.
    #[arg(long, default_value_t = 16)]
    count: usize,
}

impl GenArgs {
    fn method(&self, graph: &Graph, root: usize) -> pebbling_core::Result<GenerationMethod> {
        Ok(match self.method {
            Method::Greedy => GenerationMethod::GreedySearch { budget: self.budget, seed: self.seed },
            Method::Paths => GenerationMethod::AllPaths {
                max_len: match self.max_len {
                    Some(l) => l,
                    None => graph.eccentricity(root)?,
                },
            },
            Method::Bfs => GenerationMethod::BfsTrees { count: self.count, seed: self.seed },
        })
    }
}

#[derive(Args, Debug)]
struct StrategiesArgs {
    #[command(flatten)]
    graph: GraphSource,
    #[arg(long)]
    root: usize,
    #[command(flatten)]
    gen: GenArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum By {
    Ratio,
    Lp,
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[command(flatten)]
    graph: GraphSource,
    /// Omit to bound every root with generated strategies.
    #[arg(long)]
    root: Option<usize>,
    /// Strategy-set JSON file for `--root`.
    #[arg(long, requires = "root")]
    strategies: Option<PathBuf>,
    /// Which bound the overall figure uses.
    #[arg(long, value_enum, default_value_t = By::Lp)]
    by: By,
    #[command(flatten)]
    gen: GenArgs,
}

#[derive(Args, Debug)]
struct LpArgs {
    #[command(flatten)]
    graph: GraphSource,
    #[arg(long)]
    root: usize,
    /// Strategy-set JSON file; generated when absent.
    #[arg(long)]
    strategies: Option<PathBuf>,
    /// Dump every simplex tableau to stderr.
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    gen: GenArgs,
}

#[derive(Args, Debug)]
struct TreePiArgs {
    #[command(flatten)]
    graph: GraphSource,
    /// Omit to maximize over all roots.
    #[arg(long)]
    root: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
    level: LevelArg,
}

/// A failed run: the message and the exit code.
struct Failure(String, u8);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string(), 1)
    }
}

type Res<T> = std::result::Result<T, Failure>;

/// What a verb produced: text for stdout (or `--out`) and the JSON form.
struct Output {
    text: String,
    json: Value,
    /// Set when the verb itself failed after producing a report.
    failed: Option<String>,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Output { text, json, failed: None }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(msg, code)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Res<()> {
    let opts = SolverOptions { max_configs: cli.max_configs };
    let out = match &cli.command {
        Command::Family(a) => family(a)?,
        Command::Solve(a) => solve(a)?,
        Command::Pi(a) => pi(a, &opts)?,
        Command::MaxUnsolvable(a) => max_unsolvable(a, &opts)?,
        Command::Strategies(a) => strategies(a)?,
        Command::Bound(a) => bound(a)?,
        Command::Lp(a) => lp_verb(a)?,
        Command::TreePi(a) => tree_pi(a)?,
        Command::Verify(a) => verify_verb(a, !cli.json && cli.out.is_none()),
    };
    let body = if cli.json {
        serde_json::to_string_pretty(&out.json)? + "\n"
    } else {
        out.text
    };
    match &cli.out {
        Some(path) => std::fs::write(path, body).map_err(|e| Failure(format!("{}: {e}", path.display()), 1))?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    match out.failed {
        Some(msg) => Err(Failure(msg, 1)),
        None => Ok(()),
    }
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn family(a: &FamilyArgs) -> Res<Output> {
    let size = |what: &str| a.n.ok_or_else(|| Failure(format!("--kind {what} needs --n"), 2));
    let spec = match a.kind {
        Kind::Path => FamilySpec::Path(size("path")?),
        Kind::Cycle => FamilySpec::Cycle(size("cycle")?),
        Kind::Complete => FamilySpec::Complete(size("complete")?),
        Kind::Hypercube => FamilySpec::Hypercube(size("hypercube")?),
        Kind::Bruhat => FamilySpec::Bruhat(size("bruhat")?),
        Kind::Petersen => FamilySpec::Petersen,
        Kind::Tree => {
            let p = a.parents.as_deref().ok_or_else(|| Failure("--kind tree needs --parents".into(), 2))?;
            FamilySpec::Tree(parse_parents(p)?)
        }
    };
    let g = spec.build()?;
    let json = json!({
        "family": spec.to_string(),
        "n": g.vertex_count(),
        "m": g.edge_count(),
        "edges": g.edges(),
    });
    Ok(Output::new(g.to_edge_list(), json))
}

fn solve(a: &SolveArgs) -> Res<Output> {
    let (g, _) = a.graph.load()?;
    let config = match (&a.config, &a.config_file) {
        (Some(text), _) => pebbling_core::Configuration::parse_sparse(text, g.vertex_count())?,
        (None, Some(path)) => input::read_config(path, g.vertex_count())?,
        (None, None) => unreachable!("clap requires one of them"),
    };
    let start = Instant::now();
    let res = solver::is_solvable(&g, &config, a.root)?;
    let ms = elapsed_ms(start);
    let moves = res.witness.clone().unwrap_or_default();
    let mut text = format!("{}\n", if res.solvable { "solvable" } else { "unsolvable" });
    for m in &moves.0 {
        text += &format!("{} -> {}\n", m.0, m.1);
    }
    let json = json!({
        "solvable": res.solvable,
        "witness": moves.0.iter().map(|m| [m.0, m.1]).collect::<Vec<_>>(),
        "explored": res.explored,
        "elapsed_ms": ms,
    });
    Ok(Output::new(text, json))
}

fn pi(a: &PiArgs, opts: &SolverOptions) -> Res<Output> {
    let (g, _) = a.graph.load()?;
    let start = Instant::now();
    let res = match a.root {
        Some(r) => solver::pi_rooted(&g, r, opts)?,
        None => solver::pi_graph(&g, opts)?,
    };
    let ms = elapsed_ms(start);
    let json = json!({
        "value": res.value,
        "root": res.root,
        "all_roots": a.root.is_none(),
        "config": res.critical_config.to_string(),
        "configs_checked": res.configs_checked,
        "elapsed_ms": ms,
    });
    let text = match a.root {
        Some(_) => format!("{}\n", res.value),
        None => format!("{} (root {})\n", res.value, res.root),
    };
    Ok(Output::new(text, json))
}

fn max_unsolvable(a: &RootedArgs, opts: &SolverOptions) -> Res<Output> {
    let (g, _) = a.graph.load()?;
    let start = Instant::now();
    let (total, config) = solver::max_unsolvable(&g, a.root, opts)?;
    let ms = elapsed_ms(start);
    eprintln!("{total} pebbles, unsolvable for root {}", a.root);
    let json = json!({
        "root": a.root,
        "total": total,
        "config": config.to_string(),
        "elapsed_ms": ms,
    });
    Ok(Output::new(format!("{config}\n"), json))
}

fn strategies(a: &StrategiesArgs) -> Res<Output> {
    let (g, _) = a.graph.load()?;
    let set = strategy::generate_strategies(&g, a.root, a.gen.method(&g, a.root)?)?;
    let text = set.to_json();
    let json: Value = serde_json::from_str(&text)?;
    Ok(Output::new(text, json))
}

fn load_strategies(g: &Graph, path: &PathBuf) -> Res<StrategySet> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display()), 1))?;
    StrategySet::from_json(g, &text).map_err(|e| Failure(format!("{}: {e}", path.display()), 1))
}

fn bounds_text(report: &BoundsJson) -> String {
    let mut text = String::new();
    for r in &report.per_root {
        match r {
            RootJson::Ok { root, kappa, chi, ratio_bound, lp_value, lp_bound } => {
                text += &format!(
                    "root {root}: kappa {kappa} chi {chi} ratio bound {ratio_bound} lp value {lp_value} lp bound {lp_bound}\n"
                );
            }
            RootJson::Failed { root, error } => text += &format!("root {root}: failed: {error}\n"),
        }
    }
    match report.overall_bound {
        Some(b) => text += &format!("bound {b}\n"),
        None => text += "bound unavailable\n",
    }
    text
}

fn bound(a: &BoundArgs) -> Res<Output> {
    let (g, name) = a.graph.load()?;
    let method = match a.by {
        By::Ratio => BoundMethod::Ratio,
        By::Lp => BoundMethod::Lp,
    };
    let report = match a.root {
        None => {
            // every root gets its own generated set
            let gen = match a.gen.method {
                Method::Paths if a.gen.max_len.is_none() => GenerationMethod::AllPaths { max_len: g.diameter()? },
                _ => a.gen.method(&g, 0)?,
            };
            bounds::bound_graph(&g, method, gen)?
        }
        Some(r) => {
            let set = match &a.strategies {
                Some(path) => load_strategies(&g, path)?,
                None => strategy::generate_strategies(&g, r, a.gen.method(&g, r)?)?,
            };
            let rep = bounds::lp_bound(&g, r, &set)?;
            let overall = Some(rep.bound(method));
            GraphBounds { per_root: vec![(r, Ok(rep))], overall, method }
        }
    };
    let report = report.to_json(&name);
    let failed = report.overall_bound.is_none().then(|| "some roots could not be bounded".to_string());
    Ok(Output { text: bounds_text(&report), json: serde_json::to_value(&report)?, failed })
}

fn lp_verb(a: &LpArgs) -> Res<Output> {
    let (g, _) = a.graph.load()?;
    let set = match &a.strategies {
        Some(path) => load_strategies(&g, path)?,
        None => strategy::generate_strategies(&g, a.root, a.gen.method(&g, a.root)?)?,
    };
    let relax = lp::build_relaxation(&g, a.root, &set)?;
    let sol = if a.trace {
        let mut trace = String::new();
        let sol = lp::solve_max_traced(&relax.program, &mut trace);
        eprint!("{trace}");
        sol
    } else {
        lp::solve_max(&relax.program)
    };
    let status = match sol.status {
        LpStatus::Optimal => "optimal",
        LpStatus::Unbounded => "unbounded",
    };
    let point: serde_json::Map<String, Value> = relax
        .vertices
        .iter()
        .zip(&sol.point)
        .map(|(v, x)| (v.to_string(), Value::String(format_rational(x))))
        .collect();
    let duals: Vec<String> = sol.duals.iter().map(format_rational).collect();
    let mut text = format!("status {status}\nvalue {}\n", format_rational(&sol.value));
    if sol.status == LpStatus::Optimal {
        text += &format!("bound {}\n", lp::floor_int(&sol.value) + 1);
    }
    text += "point";
    for (v, x) in relax.vertices.iter().zip(&sol.point) {
        text += &format!(" {v}:{}", format_rational(x));
    }
    text += "\nduals";
    for d in &duals {
        text += &format!(" {d}");
    }
    text += &format!("\npivots {}\n", sol.pivot_count);
    let json = json!({
        "status": status,
        "value": format_rational(&sol.value),
        "point": point,
        "duals": duals,
        "pivots": sol.pivot_count,
        "strategies": set.len(),
    });
    Ok(Output::new(text, json))
}

fn tree_pi(a: &TreePiArgs) -> Res<Output> {
    let (g, _) = a.graph.load()?;
    let (value, root) = match a.root {
        Some(r) => (treepi::pi_tree(&g, r)?, r),
        None => treepi::pi_tree_all(&g)?,
    };
    let partition = treepi::max_path_partition(&g, root)?;
    let mut text = format!("{value} (root {root})\n");
    for p in &partition.paths {
        let vs: Vec<String> = p.iter().map(ToString::to_string).collect();
        text += &format!("path {}\n", vs.join(" "));
    }
    let json = json!({
        "value": value,
        "root": root,
        "partition": partition,
        "lengths": partition.lengths(),
        "config": partition.critical_config(g.vertex_count())?.to_string(),
    });
    Ok(Output::new(text, json))
}

/// With `stream`, rows go to stdout as each check finishes.
fn verify_verb(a: &VerifyArgs, stream: bool) -> Output {
    let level = match a.level {
        LevelArg::Fast => Level::Fast,
        LevelArg::Full => Level::Full,
    };
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for check in verify::checks().iter().filter(|c| level == Level::Full || c.tier == verify::Tier::Fast) {
        let outcome = verify::run_check(check);
        if stream {
            println!("{outcome}");
        } else {
            text += &format!("{outcome}\n");
        }
        if !outcome.passed {
            failed.push(format!("{} ({})", outcome.id, outcome.name));
        }
        rows.push(json!({
            "id": outcome.id,
            "name": outcome.name,
            "passed": outcome.passed,
            "detail": outcome.detail,
            "elapsed_ms": outcome.elapsed.as_millis() as u64,
            "budget_s": outcome.budget.as_secs(),
        }));
    }
    let json = json!({ "passed": failed.is_empty(), "checks": rows });
    Output {
        text,
        json,
        failed: (!failed.is_empty()).then(|| format!("failed checks: {}", failed.join(", "))),
    }
}
