//! Compile CNFs into DNNF without enforcing determinism.
//!
//! The pipeline adds auxiliary variables to a CNF with a transformation that
//! is *equivalent modulo forgetting* (Tseitin, the extension rule, or bounded
//! variable addition), compiles the result into a deterministic DNNF, and then
//! forgets the auxiliary variables in one linear pass. The output is a DNNF of
//! the original CNF that is in general no longer deterministic.
//!
//! Every transformation is checked against [`oracle::TruthOracle`], an
//! explicit truth-table representation used as ground truth in tests.

pub mod cnf;
pub mod compiler;
pub mod dimacs;
pub mod families;
pub mod formula;
pub mod nnf;
pub mod oracle;
pub mod pipeline;
pub mod transform;
pub mod width;

pub use cnf::{AuxKind, Clause, Cnf, CnfError, Lit, PrimalGraph, Propagation, Var};
pub use compiler::{compile, CompileError, CompileOptions, Compiler};
pub use dimacs::{parse_dimacs, write_dimacs, DimacsError};
pub use formula::{Formula, FormulaError};
pub use nnf::{
    parse_nnf, write_nnf, DeterminismMode, NnfDag, NnfError, NnfNode, NnfStats, NodeId, QueryError,
};
pub use oracle::{OracleError, TruthOracle};
pub use pipeline::{PipelineError, PipelineInput, PipelineOptions, PipelineReport, TransformKind};
pub use width::{Jointree, JointreeViolation, WidthError};
