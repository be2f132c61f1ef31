//! `rosary` command-line interface.
//!
//! Exit codes: 0 when the checked property holds, 1 for a well-formed
//! negative answer, 2 for usage or input errors. With `--json` the whole of
//! stdout is a single report object; diagnostics always go to stderr.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::constructions::{
    bounds_table, catalog, catalog_checksum, catalog_keys, counterexample_instance,
    counterexample_template, naive_rosary, theorem1_rosary, theorem2_rosary, theorem_rosary,
    BoundsRow, ConstructionId, CounterexampleCase,
};
use crate::containment::{
    cycle_contains_permutation, cyclic_contains, embedding, is_rosary,
    string_contains_all_permutations, CycleMatcher, Engine, VerifyConfig,
};
use crate::error::{Error, Result};
use crate::lemmas::{self, LuckyIndexQuery};
use crate::search::{self, canonical_form, catalog_match, SearchConfig};
use crate::seqcore::{
    code_of_cycle, code_of_string, lambda_decomposition, maximal_blocks, string_block_counts,
    Cycle, Permutation,
};
use crate::text::{format_sequence, parse_single};

pub const THREADS_ENV: &str = "ROSARY_THREADS";

pub fn version_string() -> &'static str {
    static VERSION: OnceLock<String> = OnceLock::new();
    VERSION.get_or_init(|| {
        format!("{} (catalog sha256 {})", env!("CARGO_PKG_VERSION"), catalog_checksum())
    })
}

#[derive(Parser, Debug)]
#[command(name = "rosary", about = "Construct, verify and search for rosaries")]
struct Cli {
    /// Emit a single JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for verification and search.
    #[arg(long, global = true, env = THREADS_ENV, value_name = "N")]
    parallel: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a rosary built by one of the constructions.
    Construct(ConstructArgs),
    /// Check that a cycle contains every permutation of 1..=n.
    Verify(VerifyArgs),
    /// Check whether a permutation is a subsequence of a one-loop reading.
    Contains(ContainsArgs),
    /// Check whether some rotation of one cycle sits inside another.
    CyclicContains(CyclicContainsArgs),
    /// Maximal increasing and decreasing blocks of a cycle.
    Blocks(SourceOnly),
    /// Ascent/descent code and lambda-decomposition.
    Code(CodeArgs),
    /// Depth-first search for rosaries of a given length.
    Search(SearchArgs),
    /// Exact minimum rosary length for a tiny degree.
    Exact(ExactArgs),
    /// Upper bounds on the shortest rosary length per degree.
    Table(TableArgs),
    /// Window-sum predicates and lucky indices.
    Lemma(LemmaArgs),
    /// Decide one of the stored non-containment instances.
    Counterexample(CounterexampleArgs),
    /// Check that a linear string contains every permutation.
    StringCheck(StringCheckArgs),
}

#[derive(Args, Debug, Serialize)]
#[group(required = true, multiple = false)]
struct CycleSource {
    /// Catalog key or comma-separated sequence.
    #[arg(value_name = "CYCLE")]
    source: Option<String>,
    /// Comma-separated sequence, e.g. "1,2,1,3".
    #[arg(long)]
    inline: Option<String>,
    /// File holding exactly one sequence.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Catalog key, e.g. fig2-n6.
    #[arg(long)]
    catalog: Option<String>,
    /// Construction: naive:N, theorem:N, theorem1:N or theorem2:N.
    #[arg(long)]
    construct: Option<String>,
}

impl CycleSource {
    fn load(&self, n: Option<usize>) -> Result<Cycle> {
        let cycle = if let Some(s) = &self.source {
            if catalog_keys().contains(&s.as_str()) {
                catalog(s)?
            } else {
                Cycle::from_values(parse_single(s)?)?
            }
        } else if let Some(s) = &self.inline {
            Cycle::from_values(parse_single(s)?)?
        } else if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
            Cycle::from_values(parse_single(&text)?)?
        } else if let Some(key) = &self.catalog {
            catalog(key)?
        } else if let Some(desc) = &self.construct {
            build_from_descriptor(desc)?
        } else {
            return Err(Error::Domain("no cycle source given".into()));
        };
        match n {
            Some(n) if n != cycle.n() => Cycle::new(cycle.values().to_vec(), n),
            _ => Ok(cycle),
        }
    }
}

fn build_from_descriptor(desc: &str) -> Result<Cycle> {
    let (method, n) = desc
        .split_once(':')
        .ok_or_else(|| Error::Domain(format!("construction `{desc}` is not METHOD:N")))?;
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| Error::Domain(format!("bad degree in `{desc}`")))?;
    match method.trim() {
        "naive" => naive_rosary(n),
        "theorem" => theorem_rosary(n),
        "theorem1" => theorem1_rosary(n),
        "theorem2" => theorem2_rosary(n),
        other => Err(Error::Domain(format!(
            "unknown construction `{other}` (naive, theorem, theorem1, theorem2)"
        ))),
    }
}

fn parse_perm(s: &str) -> Result<Permutation> {
    Permutation::new(parse_single(s)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Naive,
    Theorem,
    Catalog,
}

#[derive(Args, Debug, Serialize)]
struct ConstructArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value = "theorem")]
    method: Method,
    /// Catalog key for --method catalog.
    #[arg(long)]
    name: Option<String>,
    /// Theorem parameter k; the degree then follows from --n modulo 4.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[command(flatten)]
    source: CycleSource,
    /// Degree; defaults to the largest value in the cycle.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = Engine::NextTable)]
    engine: Engine,
    #[arg(long, default_value_t = 16)]
    witness_cap: usize,
    #[arg(long)]
    early_exit: bool,
    /// Largest degree for which enumeration is attempted.
    #[arg(long, default_value_t = 10)]
    max_n: usize,
}

#[derive(Args, Debug, Serialize)]
struct ContainsArgs {
    #[command(flatten)]
    source: CycleSource,
    #[arg(long)]
    perm: String,
    #[arg(long, default_value_t = Engine::NextTable)]
    engine: Engine,
}

#[derive(Args, Debug, Serialize)]
struct CyclicContainsArgs {
    #[command(flatten)]
    source: CycleSource,
    /// The cycle searched for, comma-separated.
    #[arg(long)]
    pattern: String,
}

#[derive(Args, Debug, Serialize)]
struct SourceOnly {
    #[command(flatten)]
    source: CycleSource,
}

#[derive(Args, Debug, Serialize)]
struct CodeArgs {
    #[command(flatten)]
    source: CycleSource,
    /// Treat the input as a linear string.
    #[arg(long)]
    string: bool,
}

#[derive(Args, Debug, Serialize)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    length: usize,
    /// Fixed opening; defaults to 1,2,…,n. Pass "" for none.
    #[arg(long)]
    prefix: Option<String>,
    /// Time budget in seconds.
    #[arg(long)]
    budget: Option<f64>,
    /// Node budget.
    #[arg(long)]
    nodes: Option<u64>,
    #[arg(long, default_value_t = 1)]
    max_results: usize,
    /// Seed of the sampled permutations used for pruning.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long)]
    no_filter: bool,
    #[arg(long)]
    allow_adjacent: bool,
}

#[derive(Args, Debug, Serialize)]
struct ExactArgs {
    #[arg(long)]
    n: usize,
    /// Permit n = 5 (long running).
    #[arg(long)]
    allow_long: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TableFormat {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
struct TableArgs {
    #[arg(long, default_value_t = 10)]
    max_n: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: TableFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum LemmaKind {
    Lemma1,
    Lemma2,
    Lucky,
}

#[derive(Args, Debug, Serialize)]
struct LemmaArgs {
    #[arg(long, value_enum)]
    kind: LemmaKind,
    /// Permutation, comma-separated. Omit together with --sweep.
    #[arg(long, required_unless_present = "sweep")]
    perm: Option<String>,
    #[arg(long = "K", required_unless_present = "sweep")]
    k: Option<usize>,
    #[arg(long = "M", required_unless_present = "sweep")]
    m: Option<usize>,
    #[arg(long = "N")]
    ceiling: Option<usize>,
    /// Exhaustive soundness sweep over all permutations of this degree.
    #[arg(long, conflicts_with = "perm")]
    sweep: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct CounterexampleArgs {
    /// n21 or n33.
    #[arg(value_name = "CASE", required_unless_present = "case_flag")]
    case: Option<String>,
    #[arg(long = "case", id = "case_flag", conflicts_with = "case")]
    case_flag: Option<String>,
    #[arg(long, default_value_t = Engine::NextTable)]
    engine: Engine,
}

#[derive(Args, Debug, Serialize)]
struct StringCheckArgs {
    #[command(flatten)]
    source: CycleSource,
    #[arg(long)]
    n: Option<usize>,
    /// Check the cycle read twice around.
    #[arg(long)]
    doubled: bool,
    #[arg(long, default_value_t = 10)]
    max_n: usize,
}

/// What a subcommand produced.
struct Outcome {
    inputs: Value,
    result: Value,
    text: String,
    code: i32,
}

impl Outcome {
    fn new(inputs: &impl Serialize, result: impl Serialize, text: String, holds: bool) -> Self {
        Self {
            inputs: serde_json::to_value(inputs).unwrap_or(Value::Null),
            result: serde_json::to_value(result).unwrap_or(Value::Null),
            text,
            code: if holds { 0 } else { 1 },
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    inputs: Value,
    result: Value,
    version: &'a str,
    elapsed_ms: f64,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Construct(_) => "construct",
        Command::Verify(_) => "verify",
        Command::Contains(_) => "contains",
        Command::CyclicContains(_) => "cyclic-contains",
        Command::Blocks(_) => "blocks",
        Command::Code(_) => "code",
        Command::Search(_) => "search",
        Command::Exact(_) => "exact",
        Command::Table(_) => "table",
        Command::Lemma(_) => "lemma",
        Command::Counterexample(_) => "counterexample",
        Command::StringCheck(_) => "string-check",
    }
}

/// Entry point for the binary.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = match Cli::command()
        .version(version_string())
        .try_get_matches_from(args)
    {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return 2;
        }
    };

    let started = Instant::now();
    let outcome = match cli.parallel {
        Some(0) => Err(Error::Domain("--parallel must be at least 1".into())),
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Error::Domain(format!("cannot start worker pool: {e}"))),
        },
        None => dispatch(&cli.command),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };

    let written = if cli.json {
        let report = Report {
            command: command_name(&cli.command),
            inputs: outcome.inputs,
            result: outcome.result,
            version: version_string(),
            elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
        };
        serde_json::to_string_pretty(&report)
            .map_err(std::io::Error::other)
            .and_then(|s| writeln!(out, "{s}"))
    } else {
        write!(out, "{}", outcome.text)
    };
    if written.is_err() {
        return 2;
    }
    outcome.code
}

fn dispatch(command: &Command) -> Result<Outcome> {
    match command {
        Command::Construct(a) => cmd_construct(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Contains(a) => cmd_contains(a),
        Command::CyclicContains(a) => cmd_cyclic_contains(a),
        Command::Blocks(a) => cmd_blocks(a),
        Command::Code(a) => cmd_code(a),
        Command::Search(a) => cmd_search(a),
        Command::Exact(a) => cmd_exact(a),
        Command::Table(a) => cmd_table(a),
        Command::Lemma(a) => cmd_lemma(a),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::StringCheck(a) => cmd_string_check(a),
    }
}

fn cmd_construct(a: &ConstructArgs) -> Result<Outcome> {
    let need_n = || {
        a.n.ok_or_else(|| Error::Domain("--n is required for this method".into()))
    };
    let id = match a.method {
        Method::Naive => ConstructionId::Naive { n: need_n()? },
        Method::Theorem => {
            let n = need_n()?;
            let id = ConstructionId::theorem_for(n)?;
            if let Some(k) = a.k {
                if k != n / 4 {
                    return Err(Error::Domain(format!("k = {k} does not match n = {n} (k = n / 4)")));
                }
            }
            id
        }
        Method::Catalog => {
            let name = a.name.clone().ok_or_else(|| {
                Error::Domain(format!(
                    "--name is required for --method catalog (keys: {})",
                    catalog_keys().join(", ")
                ))
            })?;
            ConstructionId::Catalog { name }
        }
    };
    let cycle = id.build()?;
    if let (Some(n), Method::Catalog) = (a.n, a.method) {
        if n != cycle.n() {
            return Err(Error::Domain(format!(
                "catalog entry has degree {}, not {n}",
                cycle.n()
            )));
        }
    }
    let text = format!("{}\n", format_sequence(cycle.values()));
    let result = json!({
        "construction": id,
        "n": cycle.n(),
        "length": cycle.len(),
        "cycle": cycle.values(),
    });
    Ok(Outcome::new(a, result, text, true))
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome> {
    let cycle = a.source.load(a.n)?;
    let cfg = VerifyConfig {
        engine: a.engine,
        max_n: a.max_n,
        witness_cap: a.witness_cap,
        early_exit: a.early_exit,
        parallel: true,
    };
    let report = is_rosary(&cycle, cycle.n(), &cfg)?;
    let mut text = format!(
        "{}: n={} length={} checked={} engine={}\n",
        if report.is_rosary { "rosary" } else { "not a rosary" },
        report.n,
        report.length,
        report.checked,
        report.engine,
    );
    if !report.is_rosary {
        let _ = writeln!(text, "missing: {}", report.missing_count);
        for p in &report.missing {
            let _ = writeln!(text, "  {p}");
        }
    }
    let holds = report.is_rosary;
    Ok(Outcome::new(a, report, text, holds))
}

fn cmd_contains(a: &ContainsArgs) -> Result<Outcome> {
    let perm = parse_perm(&a.perm)?;
    let cycle = a.source.load(Some(perm.n()).filter(|&n| n > 0))?;
    let verdict = cycle_contains_permutation(&cycle, &perm, a.engine)?;
    let positions = verdict
        .start_index
        .and_then(|s| embedding(&cycle, perm.values(), s));
    let text = match (verdict.start_index, &positions) {
        (Some(s), Some(pos)) => format!(
            "contained: start {s}, positions {}\n",
            pos.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
        ),
        _ => "not contained\n".to_string(),
    };
    let result = json!({
        "contained": verdict.contained,
        "start_index": verdict.start_index,
        "positions": positions,
        "length": cycle.len(),
    });
    Ok(Outcome::new(a, result, text, verdict.contained))
}

fn cmd_cyclic_contains(a: &CyclicContainsArgs) -> Result<Outcome> {
    let pattern = Cycle::from_values(parse_single(&a.pattern)?)?;
    let cycle = a.source.load(None)?;
    let cycle = if pattern.n() > cycle.n() {
        Cycle::new(cycle.values().to_vec(), pattern.n())?
    } else {
        cycle
    };
    let contained = cyclic_contains(&cycle, &pattern)?;
    let rotation = if contained {
        CycleMatcher::new(&cycle).rotation_contained(pattern.values())
    } else {
        None
    };
    let text = match rotation {
        Some(j) => format!("contained: rotation starting at pattern position {j}\n"),
        None => "not contained\n".to_string(),
    };
    let result = json!({ "contained": contained, "rotation_start": rotation });
    Ok(Outcome::new(a, result, text, contained))
}

fn join_blocks(blocks: &[Vec<u8>]) -> String {
    blocks
        .iter()
        .map(|b| format!("({})", format_sequence(b)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_blocks(a: &SourceOnly) -> Result<Outcome> {
    let cycle = a.source.load(None)?;
    let blocks = maximal_blocks(&cycle)?;
    let inc = blocks.increasing_values(&cycle);
    let dec = blocks.decreasing_values(&cycle);
    let (string_inc, string_dec) = string_block_counts(cycle.values())?;
    let text = format!(
        "increasing ({}): {}\ndecreasing ({}): {}\nas a string: {} increasing, {} decreasing\n",
        inc.len(),
        join_blocks(&inc),
        dec.len(),
        join_blocks(&dec),
        string_inc,
        string_dec,
    );
    let result = json!({
        "increasing": inc,
        "decreasing": dec,
        "cyclic_counts": { "increasing": inc.len(), "decreasing": dec.len() },
        "string_counts": { "increasing": string_inc, "decreasing": string_dec },
    });
    Ok(Outcome::new(a, result, text, true))
}

fn cmd_code(a: &CodeArgs) -> Result<Outcome> {
    let cycle = a.source.load(None)?;
    if a.string {
        let code = code_of_string(cycle.values())?;
        let text = format!("code: {code}\nones={} zeros={}\n", code.ones(), code.zeros());
        let result = json!({ "kind": "string", "bits": code.bits(), "x": code.ones(), "y": code.zeros() });
        return Ok(Outcome::new(a, result, text, true));
    }
    let code = code_of_cycle(&cycle)?;
    let ld = lambda_decomposition(&code).ok();
    let mut text = format!("code: {code}\nx={} y={}\n", code.ones(), code.zeros());
    if let Some(ld) = &ld {
        let lambdas: Vec<String> = ld.lambdas.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(text, "lambda: ({}) anchor={}", lambdas.join(","), ld.anchor);
    }
    let result = json!({
        "kind": "cyclic",
        "bits": code.bits(),
        "x": code.ones(),
        "y": code.zeros(),
        "lambda": ld,
    });
    Ok(Outcome::new(a, result, text, true))
}

fn cmd_search(a: &SearchArgs) -> Result<Outcome> {
    let mut cfg = SearchConfig::new(a.n, a.length);
    if let Some(prefix) = &a.prefix {
        cfg.prefix = if prefix.trim().is_empty() {
            Vec::new()
        } else {
            parse_single(prefix)?
        };
    }
    if let Some(secs) = a.budget {
        if !(secs > 0.0 && secs.is_finite()) {
            return Err(Error::Infeasible("--budget must be a positive number of seconds".into()));
        }
        cfg.time_budget = Some(Duration::from_secs_f64(secs));
    }
    cfg.node_budget = a.nodes;
    cfg.max_results = a.max_results;
    cfg.seed = a.seed;
    cfg.sample_size = a.samples;
    cfg.use_filter = !a.no_filter;
    cfg.prune_adjacent = !a.allow_adjacent;
    if a.n > 7 && cfg.time_budget.is_none() && cfg.node_budget.is_none() {
        return Err(Error::Infeasible(format!(
            "n = {} needs --budget or --nodes (unbudgeted search is limited to n <= 7)",
            a.n
        )));
    }
    let outcome = search::search_rosaries(&cfg)?;
    let found: Vec<Value> = outcome
        .found
        .iter()
        .map(|c| {
            json!({
                "cycle": c.values(),
                "canonical": canonical_form(c).values(),
                "catalog_match": catalog_match(c),
            })
        })
        .collect();
    let mut text = format!(
        "found {} rosar{} of degree {} and length {} ({} nodes, {})\n",
        outcome.found.len(),
        if outcome.found.len() == 1 { "y" } else { "ies" },
        outcome.n,
        outcome.length,
        outcome.nodes,
        match (&outcome.budget_hit, outcome.exhausted) {
            (Some(b), _) => format!("{b} budget hit"),
            (None, true) => "exhausted".to_string(),
            (None, false) => "stopped at max results".to_string(),
        },
    );
    for c in &outcome.found {
        let _ = write!(text, "{}", format_sequence(c.values()));
        let _ = write!(text, "  canonical {}", format_sequence(canonical_form(c).values()));
        if let Some(key) = catalog_match(c) {
            let _ = write!(text, "  matches {key}");
        }
        text.push('\n');
    }
    let result = json!({
        "n": outcome.n,
        "length": outcome.length,
        "nodes": outcome.nodes,
        "exhausted": outcome.exhausted,
        "budget_hit": outcome.budget_hit,
        "found": found,
        "elapsed_ms": outcome.elapsed_ms,
    });
    let holds = !outcome.found.is_empty();
    Ok(Outcome::new(a, result, text, holds))
}

fn cmd_exact(a: &ExactArgs) -> Result<Outcome> {
    let cap = if a.allow_long { 5 } else { 4 };
    let out = search::exact_r(a.n, cap)?;
    let mut text = format!(
        "r({}) = {} (computed exhaustively), witness {}\n",
        out.n,
        out.length,
        format_sequence(out.witness.values())
    );
    for level in &out.levels {
        let _ = writeln!(
            text,
            "  length {}: {} canonical candidates, {} rosaries",
            level.length, level.candidates, level.rosaries
        );
    }
    Ok(Outcome::new(a, out, text, true))
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn table_text(rows: &[BoundsRow], sep: &str, pad: bool) -> String {
    let header = ["n", "naive", "theorem", "catalog", "best", "target", "odd_bound"];
    let cell = |s: String| if pad { format!("{s:>9}") } else { s };
    let mut text = header.iter().map(|h| cell(h.to_string())).collect::<Vec<_>>().join(sep);
    text.push('\n');
    for r in rows {
        let cols = [
            r.n.to_string(),
            r.naive_length.to_string(),
            fmt_opt(r.theorem_length),
            fmt_opt(r.catalog_length),
            r.best_length.to_string(),
            format!("{:.2}", r.conjecture_target),
            fmt_opt(r.odd_bound.map(|b| format!("{b:.2}"))),
        ];
        let line: Vec<String> = cols
            .into_iter()
            .map(|c| if !pad && c == "-" { String::new() } else { cell(c) })
            .collect();
        text.push_str(&line.join(sep));
        text.push('\n');
    }
    text
}

fn cmd_table(a: &TableArgs) -> Result<Outcome> {
    if a.max_n < 2 {
        return Err(Error::Domain("--max-n must be at least 2".into()));
    }
    let rows = bounds_table(a.max_n);
    let text = match a.format {
        TableFormat::Text => table_text(&rows, " ", true),
        TableFormat::Csv => table_text(&rows, ",", false),
        TableFormat::Json => {
            let mut s = serde_json::to_string_pretty(&rows).map_err(|e| Error::Domain(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    Ok(Outcome::new(a, rows, text, true))
}

fn cmd_lemma(a: &LemmaArgs) -> Result<Outcome> {
    if let Some(n) = a.sweep {
        let report = match a.kind {
            LemmaKind::Lemma1 => lemmas::lemma1_sweep(n)?,
            LemmaKind::Lemma2 | LemmaKind::Lucky => lemmas::lemma2_sweep(n)?,
        };
        let text = format!(
            "n={}: {} permutations, {} cases, {} fired, {} confirmed, {} violations\n",
            report.n,
            report.permutations,
            report.cases,
            report.fired,
            report.confirmed,
            report.violations.len()
        );
        let holds = report.violations.is_empty();
        return Ok(Outcome::new(a, report, text, holds));
    }
    let missing = |flag: &str| Error::Domain(format!("{flag} is required"));
    let perm = parse_perm(a.perm.as_deref().ok_or_else(|| missing("--perm"))?)?;
    let k = a.k.ok_or_else(|| missing("--K"))?;
    let m = a.m.ok_or_else(|| missing("--M"))?;
    let ceiling = || a.ceiling.ok_or_else(|| missing("--N"));
    match a.kind {
        LemmaKind::Lucky => {
            let q = LuckyIndexQuery::new(k, m, ceiling()?);
            let indices = lemmas::lucky_indices(&perm, q)?;
            let text = if indices.is_empty() {
                "no lucky index\n".to_string()
            } else {
                let list: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
                format!("lucky indices: {}\n", list.join(","))
            };
            let holds = !indices.is_empty();
            Ok(Outcome::new(a, json!({ "lucky_indices": indices }), text, holds))
        }
        LemmaKind::Lemma1 | LemmaKind::Lemma2 => {
            let check = if a.kind == LemmaKind::Lemma1 {
                lemmas::check_lemma1(&perm, k, m)?
            } else {
                lemmas::check_lemma2(&perm, LuckyIndexQuery::new(k, m, ceiling()?))?
            };
            let text = match (check.index, check.containment_confirmed) {
                (Some(i), Some(true)) => format!("fired at index {i}; containment confirmed\n"),
                (Some(i), _) => format!("fired at index {i}; containment NOT confirmed\n"),
                (None, _) => "predicate did not fire\n".to_string(),
            };
            let holds = check.containment_confirmed != Some(false);
            Ok(Outcome::new(a, check, text, holds))
        }
    }
}

fn cmd_counterexample(a: &CounterexampleArgs) -> Result<Outcome> {
    let name = a.case.as_deref().or(a.case_flag.as_deref()).unwrap_or_default();
    let case: CounterexampleCase = name.parse()?;
    let (perm, cycle) = counterexample_instance(case)?;
    let verdict = cycle_contains_permutation(&cycle, &perm, a.engine)?;
    let cyclic = CycleMatcher::new(&cycle).contains_cyclic(perm.values())?;
    let pc = perm.as_cycle();
    let ld = lambda_decomposition(&code_of_cycle(&pc)?)?;
    let blocks = maximal_blocks(&pc)?;
    let (string_inc, string_dec) = string_block_counts(perm.values())?;
    let template_matches = counterexample_template(case) == cycle;
    let text = format!(
        "{case}: permutation {perm} vs cycle of length {}\n\
         verdict: {}\n\
         rotations of the permutation: {}\n\
         x={} y={} lambda=({})\n\
         cyclic blocks: {} increasing, {} decreasing; as a string: {} increasing, {} decreasing\n",
        cycle.len(),
        if verdict.contained { "contained" } else { "not contained" },
        if cyclic { "some rotation contained" } else { "no rotation contained" },
        ld.x,
        ld.y,
        ld.lambdas.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(","),
        blocks.increasing.len(),
        blocks.decreasing.len(),
        string_inc,
        string_dec,
    );
    let result = json!({
        "case": case,
        "n": perm.n(),
        "permutation": perm,
        "cycle_length": cycle.len(),
        "contained": verdict.contained,
        "start_index": verdict.start_index,
        "cyclic_contained": cyclic,
        "lambda": ld,
        "cyclic_blocks": { "increasing": blocks.increasing.len(), "decreasing": blocks.decreasing.len() },
        "string_blocks": { "increasing": string_inc, "decreasing": string_dec },
        "template_matches_catalog": template_matches,
    });
    Ok(Outcome::new(a, result, text, !verdict.contained))
}

fn cmd_string_check(a: &StringCheckArgs) -> Result<Outcome> {
    let cycle = a.source.load(a.n)?;
    let s = if a.doubled {
        cycle.doubled()
    } else {
        cycle.values().to_vec()
    };
    let cfg = VerifyConfig {
        max_n: a.max_n,
        ..VerifyConfig::default()
    };
    let check = string_contains_all_permutations(&s, cycle.n(), &cfg)?;
    let text = match &check.first_missing {
        None => format!(
            "contains all {} permutations (length {})\n",
            check.checked, check.length
        ),
        Some(p) => format!("missing {p} (length {})\n", check.length),
    };
    let holds = check.contains_all;
    Ok(Outcome::new(a, check, text, holds))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(
            std::iter::once("rosary").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn construct_naive() {
        let (code, out, _) = run_args(&["construct", "--n", "4", "--method", "naive"]);
        assert_eq!(code, 0);
        assert_eq!(out, "1,2,3,4,2,3,4,2\n");
    }

    #[test]
    fn construct_bad_combination_is_usage_error() {
        let (code, _, err) = run_args(&["construct", "--n", "3", "--method", "theorem"]);
        assert_eq!(code, 2);
        assert!(err.contains("n >= 5 odd"), "{err}");
    }

    #[test]
    fn verify_exit_codes() {
        assert_eq!(run_args(&["verify", "fig1-n3"]).0, 0);
        let (code, out, _) = run_args(&["verify", "--inline", "1,2,3"]);
        assert_eq!(code, 1);
        assert!(out.contains("1,3,2"));
        assert_eq!(run_args(&["verify"]).0, 2);
        assert_eq!(run_args(&["verify", "--inline", "1,0"]).0, 2);
    }

    #[test]
    fn json_report_shape() {
        let (code, out, _) = run_args(&["--json", "verify", "--catalog", "fig1-n4"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["command"], "verify");
        assert_eq!(v["result"]["checked"], 24);
        assert_eq!(v["version"], version_string());
        assert_eq!(v["inputs"]["source"]["catalog"], "fig1-n4");
    }

    #[test]
    fn lemma_lucky() {
        let (code, out, _) =
            run_args(&["lemma", "--kind", "lucky", "--perm", "1,3,2", "--K", "1", "--M", "1", "--N", "1"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.starts_with("lucky indices:"));
    }

    #[test]
    fn version_has_checksum() {
        let (code, out, _) = run_args(&["--version"]);
        assert_eq!(code, 0);
        assert!(out.contains(&catalog_checksum()));
    }
}
