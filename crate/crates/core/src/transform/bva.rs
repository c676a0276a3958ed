//! Bounded variable addition.
//!
//! A step looks for literals `M_lit` and clauses `M_cls` (all containing the
//! seed literal) such that every `(C \ seed) ∪ {l}` is present, then replaces
//! that grid by `l ∨ X` for each `l` and `(C \ seed) ∨ ¬X` for each `C`.
//!
//! Lookups of `(C \ seed) ∪ {k}` go through an order-independent clause
//! fingerprint: `H(D) = Σ mix(l)` over the literals of `D`, so
//! `H(D) - mix(k)` fingerprints `D \ {k}`. Every fingerprint hit is verified
//! literal by literal.

use std::collections::HashSet;

use crate::cnf::{AuxKind, Clause, Cnf, Lit, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BvaMatch {
    /// `M_lit`, seed first.
    pub matched_literals: Vec<Lit>,
    /// `M_cls`, each containing the seed.
    pub matched_clauses: Vec<Clause>,
    pub reduction: i64,
    pub aux_var: Var,
}

impl BvaMatch {
    pub fn seed(&self) -> Lit {
        self.matched_literals[0]
    }
}

fn mix(lit: Lit) -> u64 {
    // splitmix64 finaliser
    let mut z = (lit.code() as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn reduction(lits: usize, clauses: usize) -> i64 {
    let (l, c) = (lits as i64, clauses as i64);
    l * c - (l + c)
}

/// Sorted clause literals in one flat buffer plus fingerprints and
/// occurrence lists.
struct Db {
    start: Vec<usize>,
    lits: Vec<Lit>,
    hash: Vec<u64>,
    occ: Vec<Vec<u32>>,
    /// `(H(D) - mix(l), D, l)` for every clause `D` and literal `l ∈ D`.
    index: Vec<(u64, u32, Lit)>,
}

impl Db {
    fn new(cnf: &Cnf) -> Db {
        let n = cnf.num_clauses();
        let mut start = Vec::with_capacity(n + 1);
        let mut lits = Vec::with_capacity(cnf.size());
        let mut hash = Vec::with_capacity(n);
        let mut occ: Vec<Vec<u32>> = vec![Vec::new(); 2 * cnf.universe() as usize + 2];
        let mut index = Vec::with_capacity(cnf.size());
        for (id, c) in cnf.clauses().iter().enumerate() {
            start.push(lits.len());
            let from = lits.len();
            lits.extend_from_slice(c.lits());
            lits[from..].sort_unstable();
            let h = c.lits().iter().fold(0u64, |a, &l| a.wrapping_add(mix(l)));
            hash.push(h);
            for &l in c.lits() {
                occ[l.code()].push(id as u32);
                index.push((h.wrapping_sub(mix(l)), id as u32, l));
            }
        }
        start.push(lits.len());
        index.sort_unstable();
        Db {
            start,
            lits,
            hash,
            occ,
            index,
        }
    }

    fn sorted(&self, id: u32) -> &[Lit] {
        &self.lits[self.start[id as usize]..self.start[id as usize + 1]]
    }

    fn lookup(&self, key: u64) -> &[(u64, u32, Lit)] {
        let lo = self.index.partition_point(|e| e.0 < key);
        let hi = self.index.partition_point(|e| e.0 <= key);
        &self.index[lo..hi]
    }
}

/// Whether `a \ {x} == b \ {y}` for sorted duplicate-free slices.
fn equal_without(a: &[Lit], x: Lit, b: &[Lit], y: Lit) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut ia = a.iter().filter(|&&l| l != x);
    let mut ib = b.iter().filter(|&&l| l != y);
    loop {
        match (ia.next(), ib.next()) {
            (None, None) => return true,
            (Some(p), Some(q)) if p == q => {}
            _ => return false,
        }
    }
}

struct Grid {
    seed: Lit,
    lits: Vec<Lit>,
    /// Clause ids of `M_cls` with, per clause, the ids of the partner clause
    /// for each non-seed literal of `lits`, in the same order.
    rows: Vec<(u32, Vec<u32>)>,
    reduction: i64,
}

fn try_seed(db: &Db, seed: Lit) -> Option<Grid> {
    let mut seen: HashSet<&[Lit]> = HashSet::new();
    let m_cls: Vec<u32> = db.occ[seed.code()]
        .iter()
        .copied()
        .filter(|&c| seen.insert(db.sorted(c)))
        .collect();
    // per clause: (k, partner id), sorted by k, first partner per k
    let mut matches: Vec<Vec<(Lit, u32)>> = Vec::with_capacity(m_cls.len());
    let mut count: Vec<u32> = vec![0; db.occ.len()];
    let mut candidates: Vec<Lit> = Vec::new();
    for &c in &m_cls {
        let cl = db.sorted(c);
        let key = db.hash[c as usize].wrapping_sub(mix(seed));
        let mut found: Vec<(Lit, u32)> = Vec::new();
        for &(_, d, k) in db.lookup(key) {
            if d == c || k == seed || cl.binary_search(&k).is_ok() {
                continue;
            }
            if equal_without(db.sorted(d), k, cl, seed) {
                found.push((k, d));
            }
        }
        found.sort_by_key(|&(k, d)| (k, d));
        found.dedup_by_key(|e| e.0);
        for &(k, _) in &found {
            if count[k.code()] == 0 {
                candidates.push(k);
            }
            count[k.code()] += 1;
        }
        matches.push(found);
    }

    let mut alive = vec![true; m_cls.len()];
    let mut n_cls = m_cls.len();
    let mut lits = vec![seed];
    let mut red = reduction(1, n_cls);
    candidates.sort_unstable();
    loop {
        let best = candidates
            .iter()
            .copied()
            .filter(|k| !lits.contains(k))
            .fold(None::<(Lit, u32)>, |best, k| {
                let c = count[k.code()];
                match best {
                    Some((_, bc)) if bc >= c => best,
                    _ if c == 0 => best,
                    _ => Some((k, c)),
                }
            });
        let Some((k, c)) = best else { break };
        let next = reduction(lits.len() + 1, c as usize);
        if next <= red {
            break;
        }
        lits.push(k);
        red = next;
        for (i, m) in matches.iter().enumerate() {
            if alive[i] && m.binary_search_by_key(&k, |e| e.0).is_err() {
                alive[i] = false;
                n_cls -= 1;
                for &(j, _) in m {
                    count[j.code()] -= 1;
                }
            }
        }
        debug_assert_eq!(n_cls, c as usize);
    }
    if red <= 0 {
        return None;
    }
    let rows = m_cls
        .iter()
        .zip(&matches)
        .zip(&alive)
        .filter(|(_, &a)| a)
        .map(|((&c, m), _)| {
            let partners = lits[1..]
                .iter()
                .map(|k| {
                    m[m.binary_search_by_key(k, |e| e.0)
                        .expect("alive row matches")]
                    .1
                })
                .collect();
            (c, partners)
        })
        .collect();
    Some(Grid {
        seed,
        lits,
        rows,
        reduction: red,
    })
}

/// One greedy replacement, or `None` when no grid yields a reduction.
///
/// Seeds are tried by decreasing occurrence count, ties by literal order.
/// For a seed the grid grows one literal at a time, always taking the
/// candidate matched by the most clauses, as long as the reduction
/// `|M_lit|·|M_cls| − (|M_lit| + |M_cls|)` increases; the grid is applied if
/// the final reduction is positive.
pub fn bva_step(cnf: &Cnf) -> Option<(Cnf, BvaMatch)> {
    let db = Db::new(cnf);
    let mut seeds: Vec<Lit> = (0..db.occ.len())
        .filter(|&code| db.occ[code].len() >= 2)
        .map(Lit::from_code)
        .collect();
    seeds.sort_by_key(|l| (std::cmp::Reverse(db.occ[l.code()].len()), *l));
    let grid = seeds.into_iter().find_map(|s| try_seed(&db, s))?;

    let mut removed = vec![false; cnf.num_clauses()];
    for (c, partners) in &grid.rows {
        removed[*c as usize] = true;
        for &d in partners {
            removed[d as usize] = true;
        }
    }
    let mut out = cnf.clone();
    out.retain_clauses(|i, _| !removed[i]);
    let x = out.fresh_aux(AuxKind::Bva);
    for &l in &grid.lits {
        out.push(Clause::new([l, x.pos()]).expect("fresh variable"))
            .expect("in range");
    }
    let matched_clauses: Vec<Clause> = grid
        .rows
        .iter()
        .map(|(c, _)| cnf.clauses()[*c as usize].clone())
        .collect();
    for c in &matched_clauses {
        let rest = c.lits().iter().copied().filter(|&l| l != grid.seed);
        out.push(Clause::new(rest.chain([x.neg()])).expect("fresh variable"))
            .expect("in range");
    }
    Some((
        out,
        BvaMatch {
            matched_literals: grid.lits,
            matched_clauses,
            reduction: grid.reduction,
            aux_var: x,
        },
    ))
}

/// Applies [`bva_step`] until no gain or `max_steps` replacements.
pub fn bva(cnf: &Cnf, max_steps: usize) -> Cnf {
    bva_trace(cnf, max_steps).0
}

/// [`bva`] together with the applied matches in order.
pub fn bva_trace(cnf: &Cnf, max_steps: usize) -> (Cnf, Vec<BvaMatch>) {
    let mut current = cnf.clone();
    let mut trace = Vec::new();
    while trace.len() < max_steps {
        match bva_step(&current) {
            Some((next, m)) => {
                current = next;
                trace.push(m);
            }
            None => break,
        }
    }
    (current, trace)
}
