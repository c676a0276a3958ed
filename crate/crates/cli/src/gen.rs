use anyhow::{bail, Result};
use clap::ValueEnum;
use dnnf_forge::families::{delta_a, delta_b};
use dnnf_forge::{Clause, Cnf, Lit, Var};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    DeltaA,
    DeltaB,
    /// Uniform random 3-CNF over `n` variables.
    Random,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::DeltaA => "delta-a",
            Family::DeltaB => "delta-b",
            Family::Random => "random",
        }
    }
}

pub fn random_cnf(vars: u32, clauses: usize, seed: u64) -> Cnf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = vars.min(3) as usize;
    let mut cnf = Cnf::new(vars);
    for _ in 0..clauses {
        let lits: Vec<Lit> = sample(&mut rng, vars as usize, width)
            .into_iter()
            .map(|i| Lit::new(Var::new(i as u32 + 1), rng.gen()))
            .collect();
        cnf.push(Clause::new(lits).expect("distinct variables"))
            .expect("in range");
    }
    cnf
}

pub fn generate(family: Family, n: u32, clauses: Option<usize>, seed: u64) -> Result<Cnf> {
    if n == 0 {
        bail!("n must be at least 1");
    }
    if clauses.is_some() && family != Family::Random {
        bail!("--clauses only applies to the random family");
    }
    Ok(match family {
        Family::DeltaA => delta_a(n),
        Family::DeltaB => delta_b(n),
        Family::Random => random_cnf(n, clauses.unwrap_or(4 * n as usize), seed),
    })
}
