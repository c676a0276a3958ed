//! Transform, compile, forget.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::cnf::{Cnf, Lit, Var};
use crate::compiler::{CompileError, CompileOptions, Compiler};
use crate::formula::Formula;
use crate::nnf::{NnfDag, NnfStats};
use crate::oracle::{OracleError, TruthOracle, MAX_VARS};
use crate::transform::{self, TransformError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransformKind {
    None,
    Bva {
        max_steps: usize,
    },
    Tseitin,
    /// Successive extensions, one fresh variable per literal pair.
    Extension(Vec<(Lit, Lit)>),
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformKind::None => f.write_str("none"),
            TransformKind::Bva { max_steps } => write!(f, "bva({max_steps})"),
            TransformKind::Tseitin => f.write_str("tseitin"),
            TransformKind::Extension(_) => f.write_str("extension"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum PipelineInput {
    Cnf(Cnf),
    Formula(Formula),
}

impl From<Cnf> for PipelineInput {
    fn from(c: Cnf) -> Self {
        PipelineInput::Cnf(c)
    }
}

impl From<Formula> for PipelineInput {
    fn from(f: Formula) -> Self {
        PipelineInput::Formula(f)
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub transform: TransformKind,
    pub compile: CompileOptions,
    /// Use this DAG as the compiled transformed CNF instead of compiling.
    pub precompiled: Option<NnfDag>,
    /// Check the output against the input with the oracle when the input
    /// has at most [`MAX_VARS`] variables.
    pub verify: bool,
}

impl PipelineOptions {
    pub fn new(transform: TransformKind) -> Self {
        PipelineOptions {
            transform,
            compile: CompileOptions::default(),
            precompiled: None,
            verify: true,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("formula input requires the tseitin transformation, got {0}")]
    FormulaNeedsTseitin(String),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("oracle: {0}")]
    Oracle(#[from] OracleError),
    #[error("output is not equivalent to the input over its original variables")]
    Unsound,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Timings {
    pub transform: Duration,
    pub compile: Duration,
    pub forget: Duration,
}

impl Timings {
    pub fn total(&self) -> Duration {
        self.transform + self.compile + self.forget
    }
}

/// Seconds at 10 ms resolution.
pub fn format_seconds(d: Duration) -> String {
    let centis = (d.as_millis() + 5) / 10;
    format!("{}.{:02}", centis / 100, centis % 100)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineReport {
    pub transform_kind: TransformKind,
    /// Variables added by the transformation.
    pub aux_vars: BTreeSet<Var>,
    /// Every registered auxiliary variable of the compiled CNF, all forgotten.
    pub forgotten: BTreeSet<Var>,
    pub clauses_before: usize,
    pub clauses_after: usize,
    pub pre_stats: NnfStats,
    pub post_stats: NnfStats,
    pub timings: Timings,
    /// `None` when the input was too large for the oracle or checking was off.
    pub verified: Option<bool>,
    pub forget_visits: usize,
    pub cache_hits: u64,
    pub cache_misses: u64,
}

impl PipelineReport {
    pub fn to_kv(&self) -> String {
        let vars = |s: &BTreeSet<Var>| {
            s.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::new();
        let _ = writeln!(out, "transform={}", self.transform_kind);
        let _ = writeln!(out, "aux_count={}", self.aux_vars.len());
        let _ = writeln!(out, "aux_vars={}", vars(&self.aux_vars));
        let _ = writeln!(out, "forgotten={}", vars(&self.forgotten));
        let _ = writeln!(out, "clauses_before={}", self.clauses_before);
        let _ = writeln!(out, "clauses_after={}", self.clauses_after);
        let _ = writeln!(out, "pre_nodes={}", self.pre_stats.node_count);
        let _ = writeln!(out, "pre_edges={}", self.pre_stats.edge_count);
        let _ = writeln!(out, "post_nodes={}", self.post_stats.node_count);
        let _ = writeln!(out, "post_edges={}", self.post_stats.edge_count);
        let _ = writeln!(out, "forget_visits={}", self.forget_visits);
        let _ = writeln!(out, "cache_hits={}", self.cache_hits);
        let _ = writeln!(out, "cache_misses={}", self.cache_misses);
        let verified = match self.verified {
            Some(true) => "true",
            Some(false) => "false",
            None => "unverified",
        };
        let _ = writeln!(out, "verified={verified}");
        let _ = writeln!(
            out,
            "time_transform={}",
            format_seconds(self.timings.transform)
        );
        let _ = writeln!(out, "time_compile={}", format_seconds(self.timings.compile));
        let _ = writeln!(out, "time_forget={}", format_seconds(self.timings.forget));
        let _ = writeln!(out, "time_total={}", format_seconds(self.timings.total()));
        out
    }

    /// `#node #edge time`, tab separated.
    pub fn table_row(&self) -> String {
        format!(
            "{}\t{}\t{}",
            self.post_stats.node_count,
            self.post_stats.edge_count,
            format_seconds(self.timings.total())
        )
    }
}

/// The reference function of the input over `vars`: existentially projected
/// onto the non-auxiliary variables for CNF input.
fn input_oracle(input: &PipelineInput, vars: &[Var]) -> Result<Option<TruthOracle>, OracleError> {
    match input {
        PipelineInput::Formula(f) => {
            if vars.len() > MAX_VARS {
                return Ok(None);
            }
            TruthOracle::over(f, vars).map(Some)
        }
        PipelineInput::Cnf(c) => {
            let free = c.free_vars();
            if free.len() > MAX_VARS {
                return Ok(None);
            }
            let aux: Vec<Var> = free.iter().copied().filter(|v| c.is_aux(*v)).collect();
            let all = TruthOracle::over(c, &free)?;
            let projected = all.forget(&aux)?;
            debug_assert_eq!(projected.vars(), vars);
            Ok(Some(projected))
        }
    }
}

pub fn run(
    input: &PipelineInput,
    options: &PipelineOptions,
) -> Result<(NnfDag, PipelineReport), PipelineError> {
    let t0 = Instant::now();
    let (original, before_aux, clauses_before, transformed) = match input {
        PipelineInput::Formula(f) => {
            if options.transform != TransformKind::Tseitin {
                return Err(PipelineError::FormulaNeedsTseitin(
                    options.transform.to_string(),
                ));
            }
            let vars: Vec<Var> = (1..=f.max_var()).map(Var::new).collect();
            (vars, BTreeSet::new(), 0, transform::tseitin(f))
        }
        PipelineInput::Cnf(c) => {
            let g = match &options.transform {
                TransformKind::None => c.clone(),
                TransformKind::Bva { max_steps } => transform::bva(c, *max_steps),
                TransformKind::Tseitin => transform::tseitin(&Formula::from_cnf(c)),
                TransformKind::Extension(pairs) => {
                    let mut g = c.clone();
                    for &(l1, l2) in pairs {
                        g = transform::extend(&g, l1, l2)?;
                    }
                    g
                }
            };
            (c.original_vars(), c.aux_vars(), c.num_clauses(), g)
        }
    };
    let transform_time = t0.elapsed();

    let t1 = Instant::now();
    let mut compiler = Compiler::new(options.compile);
    let compiled = match &options.precompiled {
        Some(d) => d.clone(),
        None => compiler.compile(&transformed)?,
    };
    let compile_time = t1.elapsed();

    let t2 = Instant::now();
    let forgotten = transformed.aux_vars();
    let (output, visits) = compiled.forget_counted(&forgotten);
    let forget_time = t2.elapsed();

    let verified = if options.verify {
        match input_oracle(input, &original)? {
            Some(reference) => {
                let got = output.oracle(&original)?;
                let ok = got.equiv(&reference)?;
                if !ok {
                    return Err(PipelineError::Unsound);
                }
                Some(true)
            }
            None => None,
        }
    } else {
        None
    };

    let report = PipelineReport {
        transform_kind: options.transform.clone(),
        aux_vars: forgotten.difference(&before_aux).copied().collect(),
        forgotten,
        clauses_before,
        clauses_after: transformed.num_clauses(),
        pre_stats: compiled.stats(),
        post_stats: output.stats(),
        timings: Timings {
            transform: transform_time,
            compile: compile_time,
            forget: forget_time,
        },
        verified,
        forget_visits: visits,
        cache_hits: compiler.cache().hits,
        cache_misses: compiler.cache().misses,
    };
    Ok((output, report))
}

pub type BranchResult = Result<(NnfDag, PipelineReport), PipelineError>;

/// Runs `bva(k)` and the untransformed pipeline on the same CNF, on two
/// threads. Returns `(with, without)`.
pub fn compare(cnf: &Cnf, k: usize, compile: CompileOptions) -> (BranchResult, BranchResult) {
    let input = PipelineInput::Cnf(cnf.clone());
    let mut with = PipelineOptions::new(TransformKind::Bva { max_steps: k });
    with.compile = compile;
    let mut without = PipelineOptions::new(TransformKind::None);
    without.compile = compile;
    std::thread::scope(|s| {
        let h = s.spawn(|| run(&input, &with));
        let b = run(&input, &without);
        (h.join().expect("pipeline branch panicked"), b)
    })
}
