//! Free clones of presentations by breadth-first saturation.
//!
//! For each arity `n` an e-graph over the variables `x1 … xn` is grown one
//! round at a time: every symbol is applied to every tuple of current
//! classes, then every equation instance over the current classes is merged
//! until nothing changes. The arity is saturated when a round neither adds
//! a class nor merges two.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::{AbstractClone, OpId};
use crate::budget::{pow_sat, SearchBudget};
use crate::error::{Error, Result};
use crate::theory::{Presentation, Term};
use crate::tuples;
use crate::unionfind::UnionFind;

/// Members listed per class in a [`SaturationReport`].
const LISTED_MEMBERS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaturationReport {
    pub saturated: bool,
    /// `n ↦ |O(n)|`.
    pub sizes: BTreeMap<usize, usize>,
    /// Largest number of rounds any arity needed.
    pub depth_used: usize,
    /// `n ↦ (representative ↦ sample of class members)`.
    pub class_reps: BTreeMap<usize, BTreeMap<String, Vec<String>>>,
}

#[derive(Debug, Clone)]
enum Pattern {
    Var(usize),
    App(usize, Vec<Pattern>),
}

impl Pattern {
    fn compile(t: &Term, index: &HashMap<&str, usize>) -> Pattern {
        match t {
            Term::Var(i) => Pattern::Var(i - 1),
            Term::App(f, args) => Pattern::App(
                index[f.as_str()],
                args.iter().map(|a| Pattern::compile(a, index)).collect(),
            ),
        }
    }
}

struct EGraph {
    uf: UnionFind,
    /// (symbol, children as inserted, class id)
    nodes: Vec<(usize, Vec<usize>, usize)>,
    memo: HashMap<(usize, Vec<usize>), usize>,
    nvars: usize,
}

impl EGraph {
    fn new(nvars: usize) -> Self {
        EGraph {
            uf: UnionFind::new(nvars),
            nodes: Vec::new(),
            memo: HashMap::new(),
            nvars,
        }
    }

    fn canon(&mut self, children: &[usize]) -> Vec<usize> {
        children.iter().map(|&c| self.uf.find(c)).collect()
    }

    fn lookup(&mut self, sym: usize, children: &[usize]) -> Option<usize> {
        let key = (sym, self.canon(children));
        let c = *self.memo.get(&key)?;
        Some(self.uf.find(c))
    }

    fn add(&mut self, sym: usize, children: &[usize]) -> usize {
        if let Some(c) = self.lookup(sym, children) {
            return c;
        }
        let kids = self.canon(children);
        let id = self.uf.push();
        self.nodes.push((sym, kids.clone(), id));
        self.memo.insert((sym, kids), id);
        id
    }

    fn eval(&mut self, p: &Pattern, env: &[usize]) -> Option<usize> {
        match p {
            Pattern::Var(i) => Some(self.uf.find(env[*i])),
            Pattern::App(sym, args) => {
                let mut kids = Vec::with_capacity(args.len());
                for a in args {
                    kids.push(self.eval(a, env)?);
                }
                self.lookup(*sym, &kids)
            }
        }
    }

    /// Restores congruence closure after merges. Returns true if any classes
    /// were merged on the way.
    fn rebuild(&mut self) -> bool {
        let mut merged = false;
        loop {
            let mut changed = false;
            let mut memo: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            for i in 0..self.nodes.len() {
                let (sym, kids, id) = self.nodes[i].clone();
                let kids = self.canon(&kids);
                let root = self.uf.find(id);
                match memo.get(&(sym, kids.clone())) {
                    Some(&other) if self.uf.find(other) != root => {
                        self.uf.union(other, root);
                        changed = true;
                    }
                    Some(_) => {}
                    None => {
                        memo.insert((sym, kids), root);
                    }
                }
            }
            self.memo = memo;
            if !changed {
                return merged;
            }
            merged = true;
        }
    }

    fn roots(&mut self) -> Vec<usize> {
        let set: BTreeSet<usize> = (0..self.uf.len()).map(|x| self.uf.find(x)).collect();
        set.into_iter().collect()
    }
}

struct Saturated {
    graph: EGraph,
    /// Classes in canonical order of their representatives.
    classes: Vec<usize>,
    reps: Vec<Term>,
    class_index: HashMap<usize, OpId>,
    rounds: usize,
}

fn saturate_arity(
    p: &Presentation,
    equations: &[(usize, Pattern, Pattern)],
    n: usize,
    depth_bound: usize,
    budget: &SearchBudget,
) -> Result<std::result::Result<Saturated, usize>> {
    let symbols = p.signature.symbols();
    let mut g = EGraph::new(n);
    let mut rounds = 0;
    let mut saturated = false;
    for round in 1..=depth_bound {
        rounds = round;
        let classes = g.roots();
        let mut created = false;
        for (si, s) in symbols.iter().enumerate() {
            budget.check_tuples("saturation round", pow_sat(classes.len(), s.arity))?;
            let before = g.uf.len();
            if classes.is_empty() && s.arity > 0 {
                continue;
            }
            let mut tuple = vec![0; s.arity];
            let mut idx = vec![0; s.arity];
            loop {
                for (slot, &i) in tuple.iter_mut().zip(idx.iter()) {
                    *slot = classes[i];
                }
                g.add(si, &tuple);
                if !tuples::advance(&mut idx, classes.len()) {
                    break;
                }
            }
            created |= g.uf.len() > before;
        }
        let mut merged = false;
        loop {
            let classes = g.roots();
            let mut changed = false;
            for (nv, lhs, rhs) in equations {
                budget.check_tuples("equation instances", pow_sat(classes.len(), *nv))?;
                if classes.is_empty() && *nv > 0 {
                    continue;
                }
                let mut env = vec![0; *nv];
                let mut idx = vec![0; *nv];
                loop {
                    for (slot, &i) in env.iter_mut().zip(idx.iter()) {
                        *slot = classes[i];
                    }
                    if let (Some(l), Some(r)) = (g.eval(lhs, &env), g.eval(rhs, &env)) {
                        changed |= g.uf.union(l, r);
                    }
                    if !tuples::advance(&mut idx, classes.len()) {
                        break;
                    }
                }
            }
            changed |= g.rebuild();
            if !changed {
                break;
            }
            merged = true;
        }
        if !created && !merged {
            saturated = true;
            break;
        }
    }
    if !saturated {
        return Ok(Err(g.roots().len()));
    }

    // least term per class, by repeated relaxation
    let mut best: HashMap<usize, Term> = HashMap::new();
    for v in 0..g.nvars {
        let r = g.uf.find(v);
        let t = Term::Var(v + 1);
        if best.get(&r).map_or(true, |b| t < *b) {
            best.insert(r, t);
        }
    }
    loop {
        let mut changed = false;
        for i in 0..g.nodes.len() {
            let (sym, kids, id) = g.nodes[i].clone();
            let kids: Vec<usize> = kids.iter().map(|&c| g.uf.find(c)).collect();
            let Some(args) = kids
                .iter()
                .map(|c| best.get(c).cloned())
                .collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            let cand = Term::App(symbols[sym].name.clone(), args);
            let r = g.uf.find(id);
            if best.get(&r).map_or(true, |b| cand < *b) {
                best.insert(r, cand);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut order: Vec<(Term, usize)> = g
        .roots()
        .into_iter()
        .map(|r| (best[&r].clone(), r))
        .collect();
    order.sort();
    let class_index = order
        .iter()
        .enumerate()
        .map(|(i, (_, r))| (*r, i))
        .collect();
    Ok(Ok(Saturated {
        reps: order.iter().map(|(t, _)| t.clone()).collect(),
        classes: order.into_iter().map(|(_, r)| r).collect(),
        class_index,
        graph: g,
        rounds,
    }))
}

/// The free clone of `p` truncated at `n_max`, by saturation with at most
/// `depth_bound` rounds per arity.
///
/// Operation names are the printouts of the least term in each class, in
/// (depth, lexicographic) order; `π^n_j` is the class of `xj`.
pub fn free_clone(
    p: &Presentation,
    n_max: usize,
    depth_bound: usize,
    budget: &SearchBudget,
) -> Result<(AbstractClone, SaturationReport)> {
    if depth_bound == 0 {
        return Err(Error::InvalidInput("depth bound must be at least 1".into()));
    }
    if let Some(s) = p.signature.symbols().iter().find(|s| s.arity > n_max) {
        return Err(Error::ArityAboveBound {
            symbol: s.name.clone(),
            arity: s.arity,
            n_max,
        });
    }
    let index: HashMap<&str, usize> = p
        .signature
        .symbols()
        .iter()
        .enumerate()
        .map(|(i, s)| (s.name.as_str(), i))
        .collect();
    let equations: Vec<(usize, Pattern, Pattern)> = p
        .equations
        .iter()
        .map(|e| {
            (
                e.nvars,
                Pattern::compile(&e.lhs, &index),
                Pattern::compile(&e.rhs, &index),
            )
        })
        .collect();

    let mut arities = Vec::with_capacity(n_max + 1);
    let mut sizes = Vec::with_capacity(n_max + 1);
    let mut failed = false;
    for n in 0..=n_max {
        match saturate_arity(p, &equations, n, depth_bound, budget)? {
            Ok(s) => {
                sizes.push(s.classes.len());
                arities.push(s);
            }
            Err(count) => {
                sizes.push(count);
                failed = true;
                break;
            }
        }
    }
    if failed {
        return Err(Error::NotSaturated { depth_bound, sizes });
    }

    let names: Vec<Vec<String>> = arities
        .iter()
        .map(|s| s.reps.iter().map(|t| t.to_string()).collect())
        .collect();
    let proj: Vec<Vec<OpId>> = arities
        .iter_mut()
        .enumerate()
        .map(|(n, s)| {
            (0..n)
                .map(|v| {
                    let r = s.graph.uf.find(v);
                    s.class_index[&r]
                })
                .collect()
        })
        .collect();

    let mut entries: u128 = 0;
    for n in 0..=n_max {
        for k in 0..=n_max {
            entries = entries.saturating_add((sizes[n] as u128) * pow_sat(sizes[k], n));
        }
    }
    budget.check_tuples("substitution table", entries)?;

    let mut tables = vec![vec![Vec::new(); n_max + 1]; n_max + 1];
    for n in 0..=n_max {
        let rep_patterns: Vec<Pattern> = arities[n]
            .reps
            .iter()
            .map(|t| Pattern::compile(t, &index))
            .collect();
        for k in 0..=n_max {
            let sk = &mut arities[k];
            let ok = sk.classes.len();
            let mut table = Vec::with_capacity(sizes[n] * ok.pow(n as u32));
            let mut env = vec![0; n];
            for pat in &rep_patterns {
                let mut idx = vec![0; n];
                if ok == 0 && n > 0 {
                    continue;
                }
                loop {
                    for (slot, &i) in env.iter_mut().zip(idx.iter()) {
                        *slot = sk.classes[i];
                    }
                    let r = sk.graph.eval(pat, &env).ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "substitution left the saturated universe at arity {k}"
                        ))
                    })?;
                    table.push(sk.class_index[&sk.graph.uf.find(r)]);
                    if !tuples::advance(&mut idx, ok) {
                        break;
                    }
                }
            }
            tables[n][k] = table;
        }
    }

    let mut class_reps = BTreeMap::new();
    for (n, s) in arities.iter_mut().enumerate() {
        let mut members: Vec<BTreeSet<Term>> = vec![BTreeSet::new(); s.classes.len()];
        for v in 0..n {
            let r = s.graph.uf.find(v);
            members[s.class_index[&r]].insert(Term::Var(v + 1));
        }
        let nodes = s.graph.nodes.clone();
        for (sym, kids, id) in nodes {
            let args: Vec<Term> = kids
                .iter()
                .map(|&c| s.reps[s.class_index[&s.graph.uf.find(c)]].clone())
                .collect();
            let r = s.graph.uf.find(id);
            members[s.class_index[&r]]
                .insert(Term::App(p.signature.symbols()[sym].name.clone(), args));
        }
        let block: BTreeMap<String, Vec<String>> = s
            .reps
            .iter()
            .zip(members)
            .map(|(rep, ms)| {
                (
                    rep.to_string(),
                    ms.iter()
                        .take(LISTED_MEMBERS)
                        .map(|t| t.to_string())
                        .collect(),
                )
            })
            .collect();
        class_reps.insert(n, block);
    }

    let report = SaturationReport {
        saturated: true,
        sizes: sizes.iter().copied().enumerate().collect(),
        depth_used: arities.iter().map(|s| s.rounds).max().unwrap_or(0),
        class_reps,
    };
    let clone = AbstractClone::from_tables(&format!("free({})", p.name), names, proj, tables)?;
    Ok((clone, report))
}
