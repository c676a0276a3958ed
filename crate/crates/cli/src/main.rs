use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dnnf_forge::oracle::{OracleError, TruthOracle};
use dnnf_forge::pipeline::{self, PipelineError};
use dnnf_forge::{
    parse_dimacs, parse_nnf, write_dimacs, write_nnf, Clause, Cnf, CompileError, DeterminismMode,
    Formula, Lit, NnfDag, PipelineInput, PipelineOptions, TransformKind, Var,
};

mod bench;
mod gen;

/// Compile CNFs into DNNF by transforming, compiling and forgetting.
#[derive(Parser, Debug)]
#[command(name = "dnnf-forge", version)]
struct Cli {
    /// Seed for randomized generators; DNNF_FORGE_SEED takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the transform-compile-forget pipeline on a CNF or formula file.
    Compile(CompileArgs),
    /// Write a benchmark instance as DIMACS.
    Gen(GenArgs),
    /// Check structural properties of an NNF file.
    Check(CheckArgs),
    /// Answer a query on an NNF file.
    Query(QueryArgs),
    /// Compare the pipeline with and without bva on a family or on files.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TransformArg {
    None,
    Bva,
    Tseitin,
}

#[derive(Args, Debug)]
struct CompileArgs {
    /// DIMACS CNF, or a formula in prefix notation.
    input: PathBuf,
    /// Defaults to `none` for CNF input and `tseitin` for formulas.
    #[arg(long, value_enum)]
    transform: Option<TransformArg>,
    #[arg(long, default_value_t = 8)]
    max_steps: usize,
    /// Output NNF path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the key=value report.
    #[arg(long)]
    report: bool,
    /// Compilation time budget in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Use this NNF as the compiled transformed CNF.
    #[arg(long)]
    precompiled: Option<PathBuf>,
    /// Skip the oracle equivalence check.
    #[arg(long)]
    no_verify: bool,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(value_enum)]
    family: gen::Family,
    #[arg(value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    /// Clause count for the random family.
    #[arg(long)]
    clauses: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Structural,
    Oracle,
}

#[derive(Args, Debug)]
struct CheckArgs {
    input: PathBuf,
    #[arg(long)]
    decomposable: bool,
    #[arg(long, value_enum)]
    deterministic: Option<ModeArg>,
    /// Compare against a DIMACS CNF, projected onto its non-auxiliary variables.
    #[arg(long)]
    equiv: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct QueryKind {
    #[arg(long)]
    consistent: bool,
    /// Clause as DIMACS literals, e.g. "1 -3".
    #[arg(long, allow_hyphen_values = true)]
    entails: Option<String>,
    #[arg(long)]
    count: bool,
    #[arg(long)]
    min_card: bool,
}

#[derive(Args, Debug)]
struct QueryArgs {
    input: PathBuf,
    #[command(flatten)]
    kind: QueryKind,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    error: anyhow::Error,
    quiet: bool,
}

impl Failure {
    pub fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 1,
            error: error.into(),
            quiet: false,
        }
    }

    pub fn resource(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 2,
            error: error.into(),
            quiet: false,
        }
    }

    pub fn internal(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 3,
            error: error.into(),
            quiet: false,
        }
    }

    /// A requested check did not hold; the verdicts are already printed.
    fn check_failed() -> Self {
        Failure {
            code: 1,
            error: anyhow!("check failed"),
            quiet: true,
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Compile(CompileError::Timeout(_)) => Failure::resource(e),
            PipelineError::Oracle(OracleError::TooManyVariables(_)) => Failure::resource(e),
            PipelineError::Unsound | PipelineError::Oracle(_) => Failure::internal(e),
            PipelineError::FormulaNeedsTseitin(_) | PipelineError::Transform(_) => {
                Failure::input(e)
            }
        }
    }
}

fn oracle_failure(e: OracleError) -> Failure {
    match e {
        OracleError::TooManyVariables(_) => Failure::resource(e),
        _ => Failure::input(e),
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::input)
}

fn check_out(path: &Option<PathBuf>) -> Outcome {
    if let Some(p) = path {
        let dir = p.parent().filter(|d| !d.as_os_str().is_empty());
        if let Some(d) = dir {
            if !d.is_dir() {
                return Err(Failure::input(anyhow!(
                    "output directory {} does not exist",
                    d.display()
                )));
            }
        }
    }
    Ok(())
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(Failure::input),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_cnf(path: &Path) -> Result<Cnf, Failure> {
    parse_dimacs(&read(path)?)
        .with_context(|| format!("{}", path.display()))
        .map_err(Failure::input)
}

fn load_nnf(path: &Path) -> Result<NnfDag, Failure> {
    parse_nnf(&read(path)?)
        .with_context(|| format!("{}", path.display()))
        .map_err(Failure::input)
}

fn is_formula(text: &str) -> bool {
    let t = text.trim_start();
    t.starts_with('(')
        || t == "true"
        || t == "false"
        || t.starts_with("true\n")
        || t.starts_with("false\n")
}

fn load_input(path: &Path) -> Result<PipelineInput, Failure> {
    let text = read(path)?;
    if is_formula(&text) {
        let f = Formula::parse(&text)
            .with_context(|| format!("{}", path.display()))
            .map_err(Failure::input)?;
        Ok(f.into())
    } else {
        let c = parse_dimacs(&text)
            .with_context(|| format!("{}", path.display()))
            .map_err(Failure::input)?;
        Ok(c.into())
    }
}

fn timeout(secs: Option<f64>) -> Result<Option<Duration>, Failure> {
    secs.map(|s| {
        Duration::try_from_secs_f64(s).map_err(|e| Failure::input(anyhow!("bad timeout {s}: {e}")))
    })
    .transpose()
}

fn cmd_compile(args: CompileArgs) -> Outcome {
    check_out(&args.out)?;
    let input = load_input(&args.input)?;
    let precompiled = args.precompiled.as_deref().map(load_nnf).transpose()?;
    let transform = match (args.transform, &input) {
        (None, PipelineInput::Formula(_)) | (Some(TransformArg::Tseitin), _) => {
            TransformKind::Tseitin
        }
        (None, PipelineInput::Cnf(_)) | (Some(TransformArg::None), _) => TransformKind::None,
        (Some(TransformArg::Bva), _) => TransformKind::Bva {
            max_steps: args.max_steps,
        },
    };
    let mut options = PipelineOptions::new(transform);
    options.compile.timeout = timeout(args.timeout)?;
    options.precompiled = precompiled;
    options.verify = !args.no_verify;
    let (dag, report) = pipeline::run(&input, &options)?;
    write_out(&args.out, &write_nnf(&dag))?;
    if args.report {
        if args.out.is_some() {
            print!("{}", report.to_kv());
        } else {
            eprint!("{}", report.to_kv());
        }
    }
    Ok(())
}

fn cmd_gen(args: GenArgs, seed: u64) -> Outcome {
    check_out(&args.out)?;
    let cnf = gen::generate(args.family, args.n, args.clauses, seed).map_err(Failure::input)?;
    write_out(&args.out, &write_dimacs(&cnf))
}

fn verdict(name: &str, ok: bool) -> bool {
    println!("{name}: {}", if ok { "yes" } else { "no" });
    ok
}

fn cmd_check(args: CheckArgs) -> Outcome {
    let dag = load_nnf(&args.input)?;
    let reference = args.equiv.as_deref().map(load_cnf).transpose()?;
    let all = !args.decomposable && args.deterministic.is_none() && reference.is_none();
    let mut ok = true;
    if args.decomposable || all {
        ok &= verdict("decomposable", dag.is_decomposable());
    }
    if let Some(mode) = args.deterministic {
        let mode = match mode {
            ModeArg::Structural => DeterminismMode::Structural,
            ModeArg::Oracle => DeterminismMode::Oracle,
        };
        let det = dag.check_deterministic(mode).map_err(oracle_failure)?;
        ok &= verdict("deterministic", det);
    }
    if let Some(cnf) = reference {
        let vars = cnf.original_vars();
        if let Some(v) = dag.mentioned_vars().into_iter().find(|v| !vars.contains(v)) {
            return Err(Failure::input(anyhow!(
                "variable {v} of the NNF is not an original variable of the CNF"
            )));
        }
        let aux: Vec<Var> = cnf
            .free_vars()
            .into_iter()
            .filter(|v| cnf.is_aux(*v))
            .collect();
        let want = TruthOracle::over(&cnf, &cnf.free_vars())
            .and_then(|o| o.forget(&aux))
            .map_err(oracle_failure)?;
        let got = dag.oracle(want.vars()).map_err(oracle_failure)?;
        ok &= verdict("equivalent", got.equiv(&want).map_err(Failure::internal)?);
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::check_failed())
    }
}

fn parse_clause(text: &str) -> Result<Clause, Failure> {
    let mut lits = Vec::new();
    for tok in text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
    {
        let v: i64 = tok
            .parse()
            .map_err(|_| Failure::input(anyhow!("bad literal {tok:?}")))?;
        if v == 0 {
            break;
        }
        lits.push(Lit::from_dimacs(v));
    }
    Clause::new(lits).map_err(Failure::input)
}

fn is_deterministic(dag: &NnfDag) -> Result<bool, Failure> {
    if dag
        .check_deterministic(DeterminismMode::Structural)
        .map_err(Failure::internal)?
    {
        return Ok(true);
    }
    match dag.check_deterministic(DeterminismMode::Oracle) {
        Ok(det) => Ok(det),
        Err(OracleError::TooManyVariables(_)) => Ok(false),
        Err(e) => Err(Failure::internal(e)),
    }
}

fn cmd_query(args: QueryArgs) -> Outcome {
    let dag = load_nnf(&args.input)?;
    let q = args.kind;
    if q.consistent {
        println!("{}", dag.is_consistent());
    } else if let Some(text) = q.entails {
        let clause = parse_clause(&text)?;
        if let Some(l) = clause
            .lits()
            .iter()
            .find(|l| l.var().index() > dag.num_vars())
        {
            return Err(Failure::input(anyhow!(
                "literal {l} outside the NNF's {} variables",
                dag.num_vars()
            )));
        }
        println!("{}", dag.entails_clause(&clause));
    } else if q.count {
        if !is_deterministic(&dag)? {
            return Err(Failure::input(anyhow!(
                "cannot count models: not deterministic"
            )));
        }
        let vars: Vec<Var> = (1..=dag.num_vars()).map(Var::new).collect();
        let count = dag.smooth().model_count(&vars).map_err(Failure::internal)?;
        println!("{count}");
    } else if q.min_card {
        match dag.min_cardinality() {
            Some(k) => println!("{k}"),
            None => println!("inconsistent"),
        }
    }
    Ok(())
}

fn seed(cli_seed: u64) -> Result<u64, Failure> {
    match std::env::var("DNNF_FORGE_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::input(anyhow!("DNNF_FORGE_SEED is not an integer: {s:?}"))),
        Err(_) => Ok(cli_seed),
    }
}

fn dispatch(cli: Cli) -> Outcome {
    let seed = seed(cli.seed)?;
    match cli.command {
        Command::Compile(a) => cmd_compile(a),
        Command::Gen(a) => cmd_gen(a, seed),
        Command::Check(a) => cmd_check(a),
        Command::Query(a) => cmd_query(a),
        Command::Bench(a) => bench::run(a, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    // the compiler recurses once per decision level
    let worker = std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(move || dispatch(cli))
        .expect("spawn worker thread");
    match worker.join() {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => {
            if !f.quiet {
                eprintln!("error: {:#}", f.error);
            }
            ExitCode::from(f.code)
        }
        Err(_) => ExitCode::from(3),
    }
}
