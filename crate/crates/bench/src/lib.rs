//! Shared inputs for the criterion benchmarks.

use dnnf_forge::families::delta_a;
use dnnf_forge::transform::bva;
use dnnf_forge::{compile, Cnf, NnfDag};

pub const SIZES: [u32; 3] = [10, 20, 40];

/// `delta_a(n)` after the bva rewrite, compiled: the input of the forgetting
/// phase.
pub fn compiled_rewrite(n: u32, max_steps: usize) -> (Cnf, NnfDag) {
    let g = bva(&delta_a(n), max_steps);
    let dag = compile(&g);
    (g, dag)
}
