use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::anyhow;
use clap::Args;
use dnnf_forge::pipeline::{self, BranchResult, PipelineError};
use dnnf_forge::{parse_dimacs, Cnf, CompileError, CompileOptions};
use rayon::prelude::*;

use crate::gen::{self, Family};
use crate::Failure;

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value = "delta-a")]
    family: Family,
    /// Comma-separated instance sizes; an empty list prints the header only.
    #[arg(long, default_value = "10,15,30,50,75,100")]
    n_list: String,
    /// Per-branch compilation budget in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 8)]
    max_steps: usize,
    /// DIMACS files to benchmark instead of the family.
    files: Vec<PathBuf>,
}

fn parse_list(text: &str) -> Result<Vec<u32>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<u32>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Failure::input(anyhow!("bad instance size {t:?}"))),
        })
        .collect()
}

fn cells(r: BranchResult) -> Result<String, Failure> {
    match r {
        Ok((_, rep)) => Ok(rep.table_row()),
        Err(PipelineError::Compile(CompileError::Timeout(_))) => Ok("--\t--\t--".into()),
        Err(e) => Err(e.into()),
    }
}

pub fn run(args: BenchArgs, seed: u64) -> Result<(), Failure> {
    let budget = std::time::Duration::try_from_secs_f64(args.timeout)
        .map_err(|e| Failure::input(anyhow!("bad timeout: {e}")))?;
    if args.jobs == 0 {
        return Err(Failure::input(anyhow!("--jobs must be at least 1")));
    }
    let instances: Vec<(String, Cnf)> = if args.files.is_empty() {
        parse_list(&args.n_list)?
            .into_iter()
            .map(|n| {
                let cnf = gen::generate(args.family, n, None, seed).map_err(Failure::input)?;
                Ok((n.to_string(), cnf))
            })
            .collect::<Result<_, Failure>>()?
    } else {
        args.files
            .iter()
            .map(|p| {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Failure::input(anyhow!("cannot read {}: {e}", p.display())))?;
                let cnf = parse_dimacs(&text)
                    .map_err(|e| Failure::input(anyhow!("{}: {e}", p.display())))?;
                Ok((p.display().to_string(), cnf))
            })
            .collect::<Result<_, Failure>>()?
    };
    let label = if args.files.is_empty() {
        args.family.name()
    } else {
        "instance"
    };
    println!("{label}\tbva:#node\t#edge\ttime\tnone:#node\t#edge\ttime");

    let compile = CompileOptions {
        timeout: Some(budget),
        ..CompileOptions::default()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .stack_size(512 << 20)
        .build()
        .map_err(Failure::internal)?;
    let rows: Vec<Result<String, Failure>> = pool.install(|| {
        instances
            .par_iter()
            .map(|(name, cnf)| {
                let (with, without) = pipeline::compare(cnf, args.max_steps, compile);
                let mut row = String::new();
                let _ = write!(row, "{name}\t{}\t{}", cells(with)?, cells(without)?);
                Ok(row)
            })
            .collect()
    });
    for row in rows {
        println!("{}", row?);
    }
    Ok(())
}
