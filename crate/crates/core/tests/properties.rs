mod common;

use std::collections::BTreeSet;

use dnnf_forge::cnf::Propagation;
use dnnf_forge::families::{delta_a, delta_b};
use dnnf_forge::oracle::emf_check;
use dnnf_forge::transform::{bva, bva_step, extend, gate_count, tseitin};
use dnnf_forge::width::{treewidth_exact_small, treewidth_upper};
use dnnf_forge::{
    compile, parse_dimacs, parse_nnf, write_dimacs, write_nnf, AuxKind, Clause, Cnf,
    CompileOptions, Compiler, DeterminismMode, Jointree, Lit, PrimalGraph, TruthOracle, Var,
};
use proptest::prelude::*;

fn clause_strategy(vars: u32) -> impl Strategy<Value = Vec<(u32, bool)>> {
    proptest::collection::vec((1..=vars, any::<bool>()), 1..=4)
}

/// Random CNFs over up to `max_vars` variables; repeated variables in a
/// clause collapse to the first occurrence.
fn cnf_strategy(max_vars: u32, max_clauses: usize) -> impl Strategy<Value = Cnf> {
    (1..=max_vars).prop_flat_map(move |vars| {
        proptest::collection::vec(clause_strategy(vars), 0..=max_clauses).prop_map(move |raw| {
            let mut cnf = Cnf::new(vars);
            for lits in raw {
                let mut seen = BTreeSet::new();
                let lits: Vec<Lit> = lits
                    .into_iter()
                    .filter(|(v, _)| seen.insert(*v))
                    .map(|(v, s)| Lit::new(Var::new(v), s))
                    .collect();
                cnf.push(Clause::new(lits).unwrap()).unwrap();
            }
            cnf
        })
    })
}

fn graph_strategy() -> impl Strategy<Value = PrimalGraph> {
    (1..=10u32).prop_flat_map(|n| {
        proptest::collection::vec((1..=n, 1..=n), 0..=25).prop_map(move |edges| {
            let mut g = PrimalGraph::new();
            for v in 1..=n {
                g.add_vertex(Var::new(v));
            }
            for (u, v) in edges {
                if u != v {
                    g.add_edge(Var::new(u), Var::new(v));
                }
            }
            g
        })
    })
}

fn all_vars(cnf: &Cnf) -> Vec<Var> {
    (1..=cnf.universe()).map(Var::new).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn conditioning_commutes_with_the_oracle(cnf in cnf_strategy(10, 12), pick in any::<u32>(), sign in any::<bool>()) {
        let lit = Lit::new(Var::new(pick % cnf.universe() + 1), sign);
        let full = TruthOracle::over(&cnf, &all_vars(&cnf)).unwrap();
        let rest: Vec<Var> = all_vars(&cnf).into_iter().filter(|&v| v != lit.var()).collect();
        let conditioned = cnf.condition(&[lit]).unwrap();
        let got = TruthOracle::over(&conditioned, &rest).unwrap();
        prop_assert!(got.equiv(&full.condition(lit).unwrap()).unwrap());
    }

    #[test]
    fn unit_propagation_preserves_equivalence(cnf in cnf_strategy(10, 12)) {
        let vars = all_vars(&cnf);
        let full = TruthOracle::over(&cnf, &vars).unwrap();
        match cnf.unit_propagate() {
            Propagation::Conflict => prop_assert!(!full.is_satisfiable()),
            Propagation::Propagated { residual, implied } => {
                let mut back = residual.clone();
                for l in implied {
                    back.push(Clause::new([l]).unwrap()).unwrap();
                }
                // the residual leaves assigned variables unconstrained
                prop_assert!(TruthOracle::over(&back, &vars).unwrap().equiv(&full).unwrap());
            }
        }
    }

    #[test]
    fn components_are_disjoint_and_keep_every_clause(cnf in cnf_strategy(12, 14)) {
        let parts = cnf.connected_components();
        let mut seen: BTreeSet<Var> = BTreeSet::new();
        let mut total = 0;
        for p in &parts {
            let vars = p.mentioned_vars();
            prop_assert!(vars.is_disjoint(&seen));
            seen.extend(vars);
            total += p.num_clauses();
        }
        prop_assert_eq!(total, cnf.num_clauses());
    }

    #[test]
    fn dimacs_round_trip(cnf in cnf_strategy(12, 14), aux in any::<bool>()) {
        let cnf = if aux { bva(&cnf, 3) } else { cnf };
        let back = parse_dimacs(&write_dimacs(&cnf)).unwrap();
        prop_assert_eq!(back.universe(), cnf.universe());
        prop_assert_eq!(back.clauses(), cnf.clauses());
        prop_assert_eq!(back.aux(), cnf.aux());
    }

    #[test]
    fn forgetting_on_the_oracle_is_order_independent(cnf in cnf_strategy(8, 10), a in 1..=8u32, b in 1..=8u32) {
        let vars = all_vars(&cnf);
        let (a, b) = (Var::new((a - 1) % cnf.universe() + 1), Var::new((b - 1) % cnf.universe() + 1));
        prop_assume!(a != b);
        let o = TruthOracle::over(&cnf, &vars).unwrap();
        prop_assert_eq!(o.forget(&[a, b]).unwrap(), o.forget(&[b, a]).unwrap());
    }

    #[test]
    fn tseitin_size_bound(seed in any::<u64>(), vars in 1..=6u32, gates in 0..=12usize) {
        let f = common::random_formula(&mut common::rng(seed), vars, gates);
        let cnf = tseitin(&f);
        let g = gate_count(&f);
        prop_assert!(cnf.num_clauses() <= 4 * g + 1);
        prop_assert_eq!(cnf.aux_vars().len(), g);
    }

    #[test]
    fn bva_step_accounting(cnf in cnf_strategy(8, 20)) {
        if let Some((next, m)) = bva_step(&cnf) {
            prop_assert!(m.reduction >= 1);
            prop_assert_eq!(cnf.num_clauses() as i64 - next.num_clauses() as i64, m.reduction);
            prop_assert_eq!(
                (cnf.num_clauses() + cnf.universe() as usize) as i64
                    - (next.num_clauses() + next.universe() as usize) as i64,
                m.reduction - 1
            );
            // every clause outside the grid survives
            let (seed, clauses) = (m.seed(), &m.matched_clauses);
            let grid: BTreeSet<Vec<Lit>> = m
                .matched_literals
                .iter()
                .flat_map(|&l| {
                    clauses.iter().map(move |c| {
                        let mut lits: Vec<Lit> = c.lits().iter().copied().filter(|&x| x != seed).collect();
                        lits.push(l);
                        lits.sort();
                        lits
                    })
                })
                .collect();
            let kept: BTreeSet<Vec<Lit>> = next.clauses().iter().map(|c| c.sorted_lits()).collect();
            for c in cnf.clauses() {
                let key = c.sorted_lits();
                prop_assert!(grid.contains(&key) || kept.contains(&key));
            }
        }
    }

    #[test]
    fn bva_is_idempotent_at_fixpoint(cnf in cnf_strategy(8, 20)) {
        let done = bva(&cnf, usize::MAX);
        prop_assert!(bva_step(&done).is_none());
    }

    #[test]
    fn cache_does_not_change_the_function(cnf in cnf_strategy(12, 20)) {
        let vars = cnf.free_vars();
        let on = compile(&cnf);
        let off = Compiler::new(CompileOptions { cache: false, ..CompileOptions::default() })
            .compile(&cnf)
            .unwrap();
        prop_assert!(on.oracle(&vars).unwrap().equiv(&off.oracle(&vars).unwrap()).unwrap());
        prop_assert!(on.is_decomposable());
        prop_assert!(on.check_deterministic(DeterminismMode::Structural).unwrap());
    }

    #[test]
    fn queries_agree_with_the_oracle(cnf in cnf_strategy(10, 16), drop in 0..=3usize) {
        let vars = all_vars(&cnf);
        let dag = compile(&cnf);
        let o = TruthOracle::over(&cnf, &vars).unwrap();
        prop_assert_eq!(dag.is_consistent(), o.is_satisfiable());
        let smooth = dag.smooth();
        prop_assert_eq!(smooth.model_count(&vars).unwrap(), o.count().into());
        prop_assert!(smooth.is_decomposable());
        prop_assert!(smooth.oracle(&vars).unwrap().equiv(&dag.oracle(&vars).unwrap()).unwrap());

        let gone: BTreeSet<Var> = vars.iter().copied().take(drop.min(vars.len())).collect();
        let (forgotten, visits) = dag.forget_counted(&gone);
        prop_assert_eq!(visits, dag.len());
        prop_assert!(forgotten.is_decomposable());
        let rest: Vec<Var> = vars.iter().copied().filter(|v| !gone.contains(v)).collect();
        let expected = o.forget(&gone.iter().copied().collect::<Vec<_>>()).unwrap();
        prop_assert!(forgotten.oracle(&rest).unwrap().equiv(&expected).unwrap());
    }

    #[test]
    fn compiled_nnf_round_trip(cnf in cnf_strategy(10, 16)) {
        let dag = compile(&cnf);
        let back = parse_nnf(&write_nnf(&dag)).unwrap();
        prop_assert_eq!(write_nnf(&back), write_nnf(&dag));
    }

    #[test]
    fn exact_treewidth_never_exceeds_min_fill(g in graph_strategy()) {
        let exact = treewidth_exact_small(&g).unwrap();
        let (upper, order) = treewidth_upper(&g);
        prop_assert!(exact <= upper);
        let jt = Jointree::from_elimination_order(&g, &order);
        prop_assert_eq!(jt.width().unwrap(), upper);
    }

    #[test]
    fn extending_a_jointree_adds_one(cnf in cnf_strategy(10, 12), fresh in 1..=3u32) {
        let jt = Jointree::trivial(&cnf);
        let v = Var::new(cnf.universe() + fresh);
        prop_assert_eq!(jt.extend(v).unwrap().width().unwrap(), jt.width().unwrap() + 1);
    }

    #[test]
    fn extension_is_emf(cnf in cnf_strategy(8, 10), a in any::<(u32, bool)>(), b in any::<(u32, bool)>()) {
        let n = cnf.universe();
        let l1 = Lit::new(Var::new(a.0 % n + 1), a.1);
        let l2 = Lit::new(Var::new(b.0 % n + 1), b.1);
        let g = extend(&cnf, l1, l2).unwrap();
        let f = TruthOracle::over(&cnf, &all_vars(&cnf)).unwrap();
        let go = TruthOracle::over(&g, &all_vars(&g)).unwrap();
        prop_assert!(emf_check(&f, &go).unwrap());
    }
}

#[test]
fn model_counts_differ_under_emf() {
    // f = X1 and g = X1 with an unconstrained auxiliary Y: emf, counts 1 and 2
    let f = Cnf::from_dimacs_clauses(1, &[&[1]]).unwrap();
    let mut g = f.clone();
    let y = g.fresh_aux(AuxKind::Extension);
    let fo = TruthOracle::of(&f).unwrap();
    let go = TruthOracle::over(&g, &[Var::new(1), y]).unwrap();
    assert!(emf_check(&fo, &go).unwrap());
    assert_eq!((fo.count(), go.count()), (1, 2));
}

#[test]
fn generators_are_byte_stable() {
    for n in 1..=6 {
        assert_eq!(write_dimacs(&delta_a(n)), write_dimacs(&delta_a(n)));
        assert_eq!(write_dimacs(&delta_b(n)), write_dimacs(&delta_b(n)));
    }
    assert_eq!(
        write_dimacs(&delta_b(1)),
        include_str!("golden/delta_b_1.cnf")
    );
}
