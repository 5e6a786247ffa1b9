//! The `crnforge` command line. [`run`] parses arguments, dispatches, and
//! returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | verification failed (counterexample printed), or a set is not a graph |
//! | 2 | usage or file-format error |
//! | 3 | state-space cap, count bound, or unbounded network |
//!
//! `CRNFORGE_THREADS` caps the worker pool.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::bench::{balanced_input, fit_loglog, scaling_csv, scaling_run_crc, BenchError};
use crate::compiler::{compile_guard, compile_piecewise, graph_decider, search_backend, search_crc, CompileError, CompileOptions};
use crate::crn::{Crc, Crd};
use crate::format::{manifest_path, parse_crn, serialize_crc, serialize_crd, CrnFile, FormatError, Manifest};
use crate::kinetics::{run_trials, trials_csv, KineticsError, Machine, Oracle, SimLimits, VolumePolicy};
use crate::semilinear::{
    extract_affine, fn_spec_to_json, hat_transform, parse_fn_spec, vectors_in_box, vectors_up_to_norm, GraphSets,
    GuardFile, PiecewiseAffineFn, SemilinearError,
};
use crate::verifier::{check_stable_computation, check_stable_decision, VerifyError, VerifyOptions, DEFAULT_CAP};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error(transparent)]
    Semilinear(#[from] SemilinearError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Kinetics(#[from] KineticsError),
    #[error(transparent)]
    Bench(#[from] BenchError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        let limit = |k: &KineticsError| matches!(k, KineticsError::Unbounded | KineticsError::CountBoundViolated { .. });
        match self {
            CliError::Verify(VerifyError::CapExceeded { .. } | VerifyError::Unbounded | VerifyError::Overflow) => 3,
            CliError::Kinetics(k) | CliError::Bench(BenchError::Kinetics(k)) if limit(k) => 3,
            _ => 2,
        }
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

/// Inputs up to this norm are checked for coverage by `decompose`.
const COVERAGE_NORM: u64 = 8;

type Predicate = dyn Fn(&[u64]) -> Option<bool> + Sync;

#[derive(Debug, Parser)]
#[command(name = "crnforge", version, about = "Compile, simulate and verify chemical reaction networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Fast,
    Search,
}

#[derive(Debug, clap::Args)]
struct InputSet {
    /// Check every input with norm at most this.
    #[arg(long, conflicts_with = "max_entry")]
    max_norm: Option<u64>,
    /// Check every input with all coordinates at most this.
    #[arg(long)]
    max_entry: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Write the report as JSON here as well.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Skip inputs where the oracle is undefined.
    #[arg(long)]
    allow_partial: bool,
    /// Explore every interleaving, without eager-reaction reduction.
    #[arg(long)]
    full: bool,
}

impl InputSet {
    fn inputs(&self, k: usize) -> Result<Vec<Vec<u64>>> {
        match (self.max_norm, self.max_entry) {
            (Some(n), _) => Ok(vectors_up_to_norm(k, n)),
            (None, Some(m)) => Ok(vectors_in_box(k, m)),
            (None, None) => Err(CliError::Usage("one of --max-norm or --max-entry is required".into())),
        }
    }

    fn options(&self) -> VerifyOptions {
        VerifyOptions {
            cap: self.cap,
            allow_partial: self.allow_partial,
            reduce: !self.full,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a function spec at a named input.
    Eval {
        #[arg(long = "fn")]
        func: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
    },
    /// Compile a function spec (or a guard) into a .crn plus manifest.
    Compile {
        #[arg(long = "fn", required_unless_present = "guard", conflicts_with = "guard")]
        func: Option<PathBuf>,
        #[arg(long)]
        guard: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = Backend::Fast)]
        backend: Backend,
        /// Scope prefix for internal species.
        #[arg(long, default_value = "")]
        prefix: String,
        /// With `--backend search`: a decider of the difference-encoded
        /// graph to search over, instead of the compiled one.
        #[arg(long, requires = "func")]
        decider: Option<PathBuf>,
    },
    /// Simulate a network under stochastic mass-action kinetics.
    Simulate {
        #[arg(long)]
        crn: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `auto` or a positive volume.
        #[arg(long, default_value = "auto")]
        volume: String,
        #[arg(long)]
        max_events: Option<u64>,
        #[arg(long)]
        max_time: Option<f64>,
        /// Function spec for `fraction_correct` (computers).
        #[arg(long = "fn", conflicts_with = "guard")]
        func: Option<PathBuf>,
        /// Guard for `fraction_correct` (deciders).
        #[arg(long)]
        guard: Option<PathBuf>,
        /// Statistics JSON destination (stdout if absent).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Per-trial CSV destination.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Certify that a computer stably computes a function spec.
    Verify {
        #[arg(long)]
        crn: PathBuf,
        #[arg(long = "fn")]
        func: PathBuf,
        #[command(flatten)]
        set: InputSet,
    },
    /// Certify that a decider stably decides a guard, or the graph of a
    /// function spec.
    VerifyPred {
        #[arg(long)]
        crd: PathBuf,
        #[arg(long, required_unless_present = "graph_of", conflicts_with = "graph_of")]
        guard: Option<PathBuf>,
        /// Decide `y = f(x)` with the claimed outputs as the trailing inputs.
        #[arg(long)]
        graph_of: Option<PathBuf>,
        #[command(flatten)]
        set: InputSet,
    },
    /// Extract an affine piece from each linear set of a graph.
    Decompose {
        #[arg(long)]
        graph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Difference-encode a graph set.
    Hat {
        #[arg(long)]
        graph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build the decider for the graph of a computer's function.
    GraphDecider {
        #[arg(long)]
        crn: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Wrap a graph decider into a searching computer.
    SearchCrc {
        #[arg(long)]
        crd: PathBuf,
        /// Number of function inputs (the rest are claim inputs).
        #[arg(short)]
        k: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Measure convergence time over growing input sizes.
    Bench {
        #[arg(long = "fn")]
        func: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<u64>,
        #[arg(long, default_value_t = 25)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Input weights; `n` is split proportionally with the remainder on
        /// the first coordinate. Balanced if absent.
        #[arg(long, value_delimiter = ',')]
        shape: Option<Vec<u64>>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let threads = std::env::var("CRNFORGE_THREADS").ok().and_then(|s| s.parse::<usize>().ok());
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Eval { func, input } => {
            let f = load_fn(&func)?;
            let x = parse_input(&input, &f.inputs)?;
            let y = f.eval(&x)?;
            let names = crate::compiler::default_outputs(y.len());
            let shown: Vec<String> = names.iter().zip(&y).map(|(n, v)| format!("{n}={v}")).collect();
            println!("{}", shown.join(","));
            Ok(0)
        }
        Command::Compile {
            func,
            guard,
            output,
            backend,
            prefix,
            decider,
        } => compile(func, guard, &output, backend, &prefix, decider),
        Command::Simulate {
            crn,
            input,
            trials,
            seed,
            volume,
            max_events,
            max_time,
            func,
            guard,
            output,
            csv,
        } => {
            let policy = parse_volume(&volume)?;
            let limits = SimLimits {
                max_events,
                max_time: max_time.unwrap_or(f64::INFINITY),
            };
            if limits.max_events == Some(0) || limits.max_time <= 0.0 {
                return Err(CliError::Usage("limits must be positive".into()));
            }
            let file = load_crn_file(&crn)?;
            let stats = if file.is_decider() {
                let crd = file.into_crd().map_err(|e| fmt_err(&crn, e))?;
                let names = species_names(crd.crn(), crd.inputs());
                let x = parse_input(&input, &names)?;
                let g = guard.as_deref().map(load_guard).transpose()?;
                let oracle = g.map(|g| {
                    let perm = align(&g.inputs, &names);
                    move |x: &[u64]| Some(vec![g.guard.eval(&permute(x, &perm)) as u64])
                });
                let oracle_ref = oracle.as_ref().map(|o| o as &Oracle);
                run_trials(Machine::Decider(&crd), &x, trials, seed, policy, limits, oracle_ref)?
            } else {
                let crc = load_crc(&crn, Some(file))?;
                let names = species_names(crc.crn(), crc.inputs());
                let x = parse_input(&input, &names)?;
                let f = func.as_deref().map(load_fn).transpose()?;
                let oracle = f.map(|f| {
                    let perm = align(&f.inputs, &names);
                    move |x: &[u64]| f.eval(&permute(x, &perm)).ok()
                });
                let oracle_ref = oracle.as_ref().map(|o| o as &Oracle);
                run_trials(Machine::Computer(&crc), &x, trials, seed, policy, limits, oracle_ref)?
            };
            write_out(output.as_deref(), &stats.to_json())?;
            if let Some(p) = csv {
                write_file(&p, &trials_csv(&stats.records))?;
            }
            Ok(0)
        }
        Command::Verify { crn, func, set } => {
            let crc = load_crc(&crn, None)?;
            let f = load_fn(&func)?;
            let names = species_names(crc.crn(), crc.inputs());
            if f.arity() != names.len() || f.outputs() != crc.outputs().len() {
                return Err(CliError::Usage(format!(
                    "network has {} inputs and {} outputs, function has {} and {}",
                    names.len(),
                    crc.outputs().len(),
                    f.arity(),
                    f.outputs()
                )));
            }
            let perm = align(&f.inputs, &names);
            let report = check_stable_computation(
                &crc,
                |x| f.eval(&permute(x, &perm)).ok(),
                set.inputs(names.len())?,
                set.options(),
            )?;
            finish_report(&report, crc.crn(), set.json.as_deref())
        }
        Command::VerifyPred { crd, guard, graph_of, set } => {
            let file = load_crn_file(&crd)?;
            let d = file.into_crd().map_err(|e| fmt_err(&crd, e))?;
            let names = species_names(d.crn(), d.inputs());
            let pred: Box<Predicate> = match (guard, graph_of) {
                (Some(g), _) => {
                    let g = load_guard(&g)?;
                    if g.inputs.len() != names.len() {
                        return Err(CliError::Usage(format!(
                            "decider has {} inputs, guard has {}",
                            names.len(),
                            g.inputs.len()
                        )));
                    }
                    let perm = align(&g.inputs, &names);
                    Box::new(move |x| Some(g.guard.eval(&permute(x, &perm))))
                }
                (None, Some(f)) => {
                    let f = load_fn(&f)?;
                    let k = f.arity();
                    if k + f.outputs() != names.len() {
                        return Err(CliError::Usage(format!(
                            "decider has {} inputs, the graph of the function needs {}",
                            names.len(),
                            k + f.outputs()
                        )));
                    }
                    Box::new(move |x| f.eval(&x[..k]).ok().map(|y| y == x[k..]))
                }
                (None, None) => unreachable!("clap requires one of --guard, --graph-of"),
            };
            let report = check_stable_decision(&d, pred, set.inputs(names.len())?, set.options())?;
            finish_report(&report, d.crn(), set.json.as_deref())
        }
        Command::Decompose { graph, output } => {
            let sets = load_graph(&graph)?;
            let mut pieces = Vec::with_capacity(sets.sets.len());
            for (i, s) in sets.sets.iter().enumerate() {
                match extract_affine(s, sets.dim_in) {
                    Ok(p) => pieces.push(p),
                    Err(SemilinearError::NotAGraph { output, first, second }) => {
                        println!("set {} is not the graph of a function: {first:?} and {second:?} differ in output {output}", i + 1);
                        return Ok(1);
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            let names = (1..=sets.dim_in).map(|i| format!("x{i}")).collect();
            let f = PiecewiseAffineFn::new(names, pieces)?;
            eprintln!("note: every piece has guard true; restrict each to its linear set's domain before compiling");
            let gaps = sets.uncovered(COVERAGE_NORM)?;
            if !gaps.is_empty() {
                let shown: Vec<String> = gaps.iter().take(5).map(|x| format!("{x:?}")).collect();
                eprintln!(
                    "note: the graph is partial: {} inputs of norm <= {COVERAGE_NORM} have no output (e.g. {})",
                    gaps.len(),
                    shown.join(", ")
                );
            }
            write_out(output.as_deref(), &fn_spec_to_json(&f))?;
            Ok(0)
        }
        Command::Hat { graph, output } => {
            let sets = load_graph(&graph)?;
            let hat = hat_transform(&sets.union()?, sets.dim_in)?;
            let out = GraphSets {
                dim_in: sets.dim_in,
                dim_out: 2 * sets.dim_out,
                sets: hat.components,
            };
            write_out(output.as_deref(), &out.to_json())?;
            Ok(0)
        }
        Command::GraphDecider { crn, output } => {
            let crc = load_crc(&crn, None)?;
            let d = graph_decider(&crc)?;
            write_crd(&output, &d, Some("graph-decider"))?;
            Ok(0)
        }
        Command::SearchCrc { crd, k, output } => {
            let file = load_crn_file(&crd)?;
            let d = file.into_crd().map_err(|e| fmt_err(&crd, e))?;
            let crc = search_crc(&d, k)?;
            write_crc(&output, &crc, Some("search"), None)?;
            Ok(0)
        }
        Command::Bench {
            func,
            ns,
            trials,
            seed,
            shape,
            output,
        } => {
            let f = load_fn(&func)?;
            let k = f.arity();
            if let Some(w) = &shape {
                if w.len() != k || w.iter().all(|&v| v == 0) {
                    return Err(CliError::Usage(format!("--shape needs {k} weights, not all zero")));
                }
            }
            let crc = compile_piecewise(&f, &CompileOptions::default())?.crc;
            let shaper = |n: u64| match &shape {
                None => balanced_input(n, k),
                Some(w) => weighted_input(n, w),
            };
            let rows = scaling_run_crc(&crc, &shaper, &ns, trials, seed)?;
            for r in &rows {
                if let Some(w) = &r.warning {
                    eprintln!("warning: n={}: {w}", r.n);
                }
            }
            if let Ok(s) = fit_loglog(&rows) {
                eprintln!("log-log slope: {s:.4}");
            }
            write_out(output.as_deref(), &scaling_csv(&rows))?;
            Ok(0)
        }
    }
}

fn compile(
    func: Option<PathBuf>,
    guard: Option<PathBuf>,
    output: &Path,
    backend: Backend,
    prefix: &str,
    decider: Option<PathBuf>,
) -> Result<i32> {
    let opts = CompileOptions::with_prefix(prefix);
    if let Some(g) = guard {
        if backend == Backend::Search {
            return Err(CliError::Usage("the search backend compiles functions, not guards".into()));
        }
        let g = load_guard(&g)?;
        let opts = CompileOptions {
            input_names: Some(g.inputs.clone()),
            ..opts
        };
        let d = compile_guard(&g.guard, &opts)?;
        write_crd(output, &d, Some("fast"))?;
        return Ok(0);
    }
    let f = load_fn(func.as_deref().expect("clap requires --fn or --guard"))?;
    match (backend, decider) {
        (Backend::Fast, None) => {
            let c = compile_piecewise(&f, &opts)?;
            write_crc(output, &c.crc, Some("fast"), Some(c.fanout_width))?;
        }
        (Backend::Fast, Some(_)) => {
            return Err(CliError::Usage("--decider only applies to --backend search".into()));
        }
        (Backend::Search, None) => {
            let crc = search_backend(&f, &opts)?;
            write_crc(output, &crc, Some("search"), None)?;
        }
        (Backend::Search, Some(d)) => {
            let file = load_crn_file(&d)?;
            let d = file.into_crd().map_err(|e| fmt_err(&d, e))?;
            let crc = search_crc(&d, f.arity())?;
            write_crc(output, &crc, Some("search"), None)?;
        }
    }
    Ok(0)
}

fn finish_report(report: &crate::verifier::VerifyReport, crn: &crate::crn::Crn, json: Option<&Path>) -> Result<i32> {
    print!("{}", report.render_text(Some(crn)));
    if let Some(p) = json {
        write_file(p, &report.to_json())?;
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fmt_err(path: &Path, source: FormatError) -> CliError {
    CliError::Format {
        path: path.to_path_buf(),
        source,
    }
}

fn in_file(path: &Path, e: SemilinearError) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

fn load_fn(path: &Path) -> Result<PiecewiseAffineFn> {
    parse_fn_spec(&read(path)?).map_err(|e| in_file(path, e))
}

fn load_guard(path: &Path) -> Result<GuardFile> {
    GuardFile::from_json(&read(path)?).map_err(|e| in_file(path, e))
}

fn load_graph(path: &Path) -> Result<GraphSets> {
    GraphSets::from_json(&read(path)?).map_err(|e| in_file(path, e))
}

fn load_crn_file(path: &Path) -> Result<CrnFile> {
    parse_crn(&read(path)?).map_err(|e| fmt_err(path, e))
}

/// Loads a computer and applies its manifest sidecar when one exists.
fn load_crc(path: &Path, parsed: Option<CrnFile>) -> Result<Crc> {
    let file = match parsed {
        Some(f) => f,
        None => load_crn_file(path)?,
    };
    let crc = file.into_crc().map_err(|e| fmt_err(path, e))?;
    let mpath = manifest_path(path);
    if !mpath.exists() {
        return Ok(crc);
    }
    let m = Manifest::from_json(&read(&mpath)?).map_err(|e| fmt_err(&mpath, e))?;
    Ok(m.apply_to(crc))
}

fn write_crc(path: &Path, crc: &Crc, backend: Option<&str>, fanout: Option<usize>) -> Result<()> {
    write_file(path, &serialize_crc(crc))?;
    write_file(&manifest_path(path), &Manifest::for_crc(crc, backend, fanout).to_json())
}

fn write_crd(path: &Path, crd: &Crd, backend: Option<&str>) -> Result<()> {
    write_file(path, &serialize_crd(crd))?;
    write_file(&manifest_path(path), &Manifest::for_crd(crd, backend).to_json())
}

fn species_names(crn: &crate::crn::Crn, ids: &[usize]) -> Vec<String> {
    ids.iter().map(|&s| crn.name(s).to_string()).collect()
}

fn parse_volume(s: &str) -> Result<VolumePolicy> {
    if s == "auto" {
        return Ok(VolumePolicy::Auto);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(VolumePolicy::Fixed(v)),
        _ => Err(CliError::Usage(format!("--volume must be `auto` or a positive number, got `{s}`"))),
    }
}

/// Parses `name=count,...` against `names`; unnamed coordinates are 0.
pub fn parse_input(s: &str, names: &[String]) -> Result<Vec<u64>> {
    let mut x = vec![0u64; names.len()];
    let mut seen = vec![false; names.len()];
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("input `{part}` is not of the form name=count")))?;
        let (name, value) = (name.trim(), value.trim());
        let i = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| CliError::Usage(format!("unknown input `{name}`; inputs are {}", names.join(", "))))?;
        if seen[i] {
            return Err(CliError::Usage(format!("input `{name}` given twice")));
        }
        seen[i] = true;
        x[i] = value
            .parse()
            .map_err(|_| CliError::Usage(format!("input `{name}` has non-numeric count `{value}`")))?;
    }
    Ok(x)
}

/// `perm[j]` is the network coordinate holding spec input `j`: matched by
/// name when every name matches, positional otherwise.
fn align(spec: &[String], network: &[String]) -> Vec<usize> {
    let by_name: Option<Vec<usize>> = spec.iter().map(|n| network.iter().position(|m| m == n)).collect();
    by_name.unwrap_or_else(|| (0..spec.len()).collect())
}

fn permute(x: &[u64], perm: &[usize]) -> Vec<u64> {
    perm.iter().map(|&i| x[i]).collect()
}

fn weighted_input(n: u64, w: &[u64]) -> Vec<u64> {
    let total: u64 = w.iter().sum();
    let mut x: Vec<u64> = w.iter().map(|&wi| n * wi / total).collect();
    x[0] += n - x.iter().sum::<u64>();
    x
}
