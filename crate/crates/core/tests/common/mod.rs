#![allow(dead_code)]

use dnnf_forge::{Clause, Cnf, Formula, Lit, Var};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_lit<R: Rng>(rng: &mut R, vars: u32) -> Lit {
    Lit::new(Var::new(rng.gen_range(1..=vars)), rng.gen())
}

pub fn random_clause<R: Rng>(rng: &mut R, vars: u32, max_len: usize) -> Clause {
    let len = rng.gen_range(1..=max_len.min(vars as usize));
    let mut pool: Vec<u32> = (1..=vars).collect();
    pool.shuffle(rng);
    Clause::new(
        pool[..len]
            .iter()
            .map(|&v| Lit::new(Var::new(v), rng.gen())),
    )
    .expect("distinct variables")
}

pub fn random_cnf<R: Rng>(rng: &mut R, max_vars: u32, max_clauses: usize) -> Cnf {
    let vars = rng.gen_range(1..=max_vars);
    let n = rng.gen_range(0..=max_clauses);
    let mut cnf = Cnf::new(vars);
    for _ in 0..n {
        cnf.push(random_clause(rng, vars, 4)).unwrap();
    }
    cnf
}

/// Adds the grid `{l ∨ body_j}` over literals of `lits` and single-literal
/// bodies, which one replacement step can shrink.
pub fn plant_grid(cnf: &mut Cnf, lits: &[Lit], bodies: &[Lit]) {
    for &l in lits {
        for &b in bodies {
            cnf.push_simplified([l, b]).unwrap();
        }
    }
}

/// A random CNF that may contain a planted grid. Total variables stay below
/// `max_vars`.
pub fn random_cnf_with_grid<R: Rng>(rng: &mut R, max_vars: u32, max_clauses: usize) -> Cnf {
    let mut cnf = random_cnf(rng, max_vars, max_clauses);
    if rng.gen_bool(0.5) && cnf.universe() >= 4 {
        let vars = cnf.universe();
        let mut pool: Vec<u32> = (1..=vars).collect();
        pool.shuffle(rng);
        let split = rng.gen_range(2..=(vars as usize - 2).min(3));
        let take = (split + rng.gen_range(2..=3)).min(vars as usize);
        let lits: Vec<Lit> = pool[..split]
            .iter()
            .map(|&v| Lit::new(Var::new(v), rng.gen()))
            .collect();
        let bodies: Vec<Lit> = pool[split..take]
            .iter()
            .map(|&v| Lit::new(Var::new(v), rng.gen()))
            .collect();
        plant_grid(&mut cnf, &lits, &bodies);
    }
    cnf
}

pub fn random_formula<R: Rng>(rng: &mut R, vars: u32, gates: usize) -> Formula {
    if gates == 0 || rng.gen_bool(0.15) {
        return match rng.gen_range(0..12) {
            0 => Formula::Const(rng.gen()),
            1 | 2 => Formula::not(Formula::var(rng.gen_range(1..=vars))),
            _ => Formula::var(rng.gen_range(1..=vars)),
        };
    }
    let left = rng.gen_range(0..gates);
    let right = gates - 1 - left;
    match rng.gen_range(0..6) {
        0 => Formula::not(random_formula(rng, vars, gates)),
        1 => Formula::and(vec![
            random_formula(rng, vars, left),
            random_formula(rng, vars, right),
        ]),
        2 => Formula::or(vec![
            random_formula(rng, vars, left),
            random_formula(rng, vars, right),
        ]),
        3 => Formula::xor(
            random_formula(rng, vars, left),
            random_formula(rng, vars, right),
        ),
        4 => Formula::iff(
            random_formula(rng, vars, left),
            random_formula(rng, vars, right),
        ),
        _ => {
            let k = rng.gen_range(1..=3);
            let parts = (0..k)
                .map(|_| random_formula(rng, vars, gates / k))
                .collect();
            if rng.gen() {
                Formula::and(parts)
            } else {
                Formula::or(parts)
            }
        }
    }
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, r²)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (a, b, r2)
}
