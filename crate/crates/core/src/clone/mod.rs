//! Truncated abstract clones.
//!
//! A clone stores, for every arity `n ≤ n_max`, the operation set `O(n)` as
//! the index range `0..|O(n)|` with a printable name per operation. The
//! substitution `σ ∗ (t_1 … t_n)` is evaluated by one of three laws: an
//! explicit table, composition of coefficient tuples over a finite ring, or
//! composition of functions on a finite carrier.

mod free;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{pow_sat, SearchBudget};
use crate::error::{Error, Result};
use crate::report::{Axiom, ValidationReport, Violation, MAX_LISTED_VIOLATIONS};
use crate::ring::FiniteRing;
use crate::theory::{Equation, Presentation, Signature, Symbol, Term};
use crate::tuples;

pub use free::{free_clone, SaturationReport};

/// Index of an operation inside its arity block `O(n)`.
pub type OpId = usize;

/// Axiom instances drawn from a block too large to check exhaustively.
pub const SAMPLE_PER_BLOCK: u64 = 1 << 18;

#[derive(Debug, Clone, PartialEq)]
enum Composition {
    /// `tables[n][k][σ·|O(k)|^n + encode(args)]`.
    Table(Vec<Vec<Vec<OpId>>>),
    /// `coords[n][op]` is the coefficient tuple of `op`. Affine clones keep
    /// only the tuples summing to one and index them by their first `n-1`
    /// coordinates.
    Coefficients {
        ring: FiniteRing,
        affine: bool,
        coords: Vec<Vec<Vec<usize>>>,
    },
    /// All functions `A^n → A` on `size` points, indexed by their value
    /// table read as a base-`size` numeral.
    Functions { size: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbstractClone {
    label: String,
    n_max: usize,
    names: Vec<Vec<String>>,
    proj: Vec<Vec<OpId>>,
    law: Composition,
}

impl AbstractClone {
    /// A clone given by explicit substitution tables,
    /// `tables[n][k][σ·|O(k)|^n + encode(args)]`.
    pub fn from_tables(
        label: &str,
        names: Vec<Vec<String>>,
        proj: Vec<Vec<OpId>>,
        tables: Vec<Vec<Vec<OpId>>>,
    ) -> Result<Self> {
        let n_max = names
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::InvalidInput("a clone needs at least arity 0".into()))?;
        if proj.len() != n_max + 1 || tables.len() != n_max + 1 {
            return Err(Error::InvalidInput(
                "arity blocks disagree in length".into(),
            ));
        }
        for n in 0..=n_max {
            if proj[n].len() != n || proj[n].iter().any(|&p| p >= names[n].len()) {
                return Err(Error::InvalidInput(format!("bad projections at arity {n}")));
            }
            if tables[n].len() != n_max + 1 {
                return Err(Error::InvalidInput(format!("missing tables for arity {n}")));
            }
            for k in 0..=n_max {
                let want = tuples::count(names[k].len(), n)
                    .and_then(|c| c.checked_mul(names[n].len()))
                    .ok_or_else(|| Error::InvalidInput("table too large".into()))?;
                if tables[n][k].len() != want {
                    return Err(Error::InvalidInput(format!(
                        "table ({n},{k}) has {} entries, expected {want}",
                        tables[n][k].len()
                    )));
                }
                if tables[n][k].iter().any(|&r| r >= names[k].len()) {
                    return Err(Error::InvalidInput(format!(
                        "table ({n},{k}) leaves O({k})"
                    )));
                }
            }
        }
        Ok(AbstractClone {
            label: label.to_string(),
            n_max,
            names,
            proj,
            law: Composition::Table(tables),
        })
    }

    /// Tabulates `f(n, k, σ, args)` into a table clone.
    pub fn tabulate(
        label: &str,
        names: Vec<Vec<String>>,
        proj: Vec<Vec<OpId>>,
        f: impl Fn(usize, usize, OpId, &[OpId]) -> OpId,
    ) -> Result<Self> {
        let n_max = names.len().saturating_sub(1);
        let mut tables = vec![vec![Vec::new(); n_max + 1]; n_max + 1];
        for n in 0..=n_max {
            for k in 0..=n_max {
                let ok = names[k].len();
                let mut table = Vec::new();
                for sigma in 0..names[n].len() {
                    tuples::for_each(ok, n, |args| table.push(f(n, k, sigma, args)));
                }
                tables[n][k] = table;
            }
        }
        Self::from_tables(label, names, proj, tables)
    }

    /// Coefficient clone over `ring`: all tuples (abelian) or the tuples
    /// summing to one (affine), composed as matrices.
    pub(crate) fn coefficients(
        label: &str,
        ring: FiniteRing,
        affine: bool,
        n_max: usize,
        budget: &SearchBudget,
    ) -> Result<Self> {
        budget.check_tuples("coefficient tuples", pow_sat(ring.size(), n_max))?;
        let elems: Vec<usize> = (0..ring.size()).collect();
        let mut coords = Vec::with_capacity(n_max + 1);
        let mut names = Vec::with_capacity(n_max + 1);
        let mut proj = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let ops: Vec<Vec<usize>> = crate::theory::tuples(&elems, n)
                .into_iter()
                .filter(|t| {
                    !affine || t.iter().fold(ring.zero(), |a, &x| ring.add(a, x)) == ring.one()
                })
                .collect();
            names.push(
                ops.iter()
                    .map(|t| {
                        let parts: Vec<&str> = t.iter().map(|&x| ring.name(x)).collect();
                        format!("({})", parts.join(","))
                    })
                    .collect(),
            );
            proj.push(
                (0..n)
                    .map(|j| {
                        ops.iter()
                            .position(|t| {
                                t.iter().enumerate().all(|(i, &x)| {
                                    x == if i == j { ring.one() } else { ring.zero() }
                                })
                            })
                            .expect("unit tuples are always present")
                    })
                    .collect(),
            );
            coords.push(ops);
        }
        Ok(AbstractClone {
            label: label.to_string(),
            n_max,
            names,
            proj,
            law: Composition::Coefficients {
                ring,
                affine,
                coords,
            },
        })
    }

    /// `End(A)` for `|A| = size`, truncated at `n_max`.
    pub fn endo(carrier: &[String], n_max: usize, budget: &SearchBudget) -> Result<Self> {
        let size = carrier.len();
        if size == 0 {
            return Err(Error::InvalidInput(
                "endomorphism clone of an empty set".into(),
            ));
        }
        let top = pow_sat(size, n_max);
        let required = if top > 64 {
            u128::MAX
        } else {
            pow_sat(size, top as usize)
        };
        budget.check_functions("endomorphism clone", required)?;
        let mut names = Vec::with_capacity(n_max + 1);
        let mut proj = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let points = size.pow(n as u32);
            let count = size.pow(points as u32);
            let mut block = Vec::with_capacity(count);
            let mut table = vec![0; points];
            for idx in 0..count {
                tuples::decode(idx, size, points, &mut table);
                let parts: Vec<&str> = table.iter().map(|&v| carrier[v].as_str()).collect();
                block.push(format!("[{}]", parts.join(",")));
            }
            names.push(block);
            let mut p = Vec::with_capacity(n);
            let mut point = vec![0; n];
            for j in 0..n {
                let table: Vec<usize> = (0..points)
                    .map(|q| {
                        tuples::decode(q, size, n, &mut point);
                        point[j]
                    })
                    .collect();
                p.push(tuples::encode(&table, size));
            }
            proj.push(p);
        }
        Ok(AbstractClone {
            label: format!("endo({size},{n_max})"),
            n_max,
            names,
            proj,
            law: Composition::Functions { size },
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `|O(n)|`.
    pub fn size(&self, n: usize) -> usize {
        self.names[n].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.names.iter().map(Vec::len).collect()
    }

    pub fn name(&self, n: usize, op: OpId) -> &str {
        &self.names[n][op]
    }

    pub fn names(&self, n: usize) -> &[String] {
        &self.names[n]
    }

    pub fn op_index(&self, n: usize, name: &str) -> Option<OpId> {
        self.names.get(n)?.iter().position(|s| s == name)
    }

    /// `π^n_j`, with `j` 1-based.
    pub fn proj(&self, n: usize, j: usize) -> OpId {
        self.proj[n][j - 1]
    }

    pub fn projections(&self, n: usize) -> &[OpId] {
        &self.proj[n]
    }

    /// Carrier size for endomorphism clones.
    pub fn endo_carrier_size(&self) -> Option<usize> {
        match self.law {
            Composition::Functions { size } => Some(size),
            _ => None,
        }
    }

    /// Index of the function with value table `table` (row-major over
    /// `A^n`) in an endomorphism clone.
    pub fn endo_index_of(&self, n: usize, table: &[usize]) -> Option<OpId> {
        let size = self.endo_carrier_size()?;
        if table.len() != size.pow(n as u32) || table.iter().any(|&v| v >= size) {
            return None;
        }
        Some(tuples::encode(table, size))
    }

    /// Coefficient tuple of `op` for ring-coefficient clones.
    pub fn coefficients_of(&self, n: usize, op: OpId) -> Option<&[usize]> {
        match &self.law {
            Composition::Coefficients { coords, .. } => Some(&coords[n][op]),
            _ => None,
        }
    }

    /// The coefficient ring and whether only affine tuples are kept.
    pub fn coefficient_ring(&self) -> Option<(&FiniteRing, bool)> {
        match &self.law {
            Composition::Coefficients { ring, affine, .. } => Some((ring, *affine)),
            _ => None,
        }
    }

    /// `σ ∗_{nk} (t_1 … t_n)` for `σ ∈ O(n)`, `t_i ∈ O(k)`.
    pub fn subst(&self, n: usize, k: usize, sigma: OpId, args: &[OpId]) -> OpId {
        debug_assert_eq!(args.len(), n);
        match &self.law {
            Composition::Table(tables) => {
                let ok = self.names[k].len();
                tables[n][k][sigma * ok.pow(n as u32) + tuples::encode(args, ok)]
            }
            Composition::Coefficients {
                ring,
                affine,
                coords,
            } => {
                let s = &coords[n][sigma];
                let width = if *affine { k.saturating_sub(1) } else { k };
                let base = ring.size();
                let mut idx = 0;
                for j in 0..width {
                    let mut r = ring.zero();
                    for (i, &t) in args.iter().enumerate() {
                        r = ring.add(r, ring.mul(s[i], coords[k][t][j]));
                    }
                    idx = idx * base + r;
                }
                idx
            }
            Composition::Functions { size } => {
                let size = *size;
                let pts_k = size.pow(k as u32);
                let pts_n = size.pow(n as u32);
                let digit = |idx: usize, len: usize, pos: usize| {
                    (idx / size.pow((len - 1 - pos) as u32)) % size
                };
                let mut out = 0;
                for p in 0..pts_k {
                    let q = args
                        .iter()
                        .fold(0, |acc, &t| acc * size + digit(t, pts_k, p));
                    out = out * size + digit(sigma, pts_n, q);
                }
                out
            }
        }
    }

    /// Function table of `op ∈ O(n)` in an endomorphism clone.
    pub fn endo_table(&self, n: usize, op: OpId) -> Option<Vec<usize>> {
        let size = self.endo_carrier_size()?;
        let points = size.pow(n as u32);
        let mut t = vec![0; points];
        tuples::decode(op, size, points, &mut t);
        Some(t)
    }

    /// Number of substitution entries `Σ |O(n)|·|O(k)|^n`.
    pub fn table_entries(&self) -> u128 {
        let mut total: u128 = 0;
        for n in 0..=self.n_max {
            for k in 0..=self.n_max {
                total = total.saturating_add(
                    (self.size(n) as u128).saturating_mul(pow_sat(self.size(k), n)),
                );
            }
        }
        total
    }

    /// Materialises the substitution as an explicit table clone.
    pub fn to_table_clone(&self, budget: &SearchBudget) -> Result<AbstractClone> {
        budget.check_tuples("substitution table", self.table_entries())?;
        AbstractClone::tabulate(
            &self.label,
            self.names.clone(),
            self.proj.clone(),
            |n, k, s, a| self.subst(n, k, s, a),
        )
    }

    /// Serialises to the JSON clone format.
    pub fn to_json(&self, budget: &SearchBudget) -> Result<serde_json::Value> {
        budget.check_tuples("substitution table", self.table_entries())?;
        let mut ops = BTreeMap::new();
        let mut proj = BTreeMap::new();
        for n in 0..=self.n_max {
            ops.insert(n.to_string(), self.names[n].clone());
            for j in 1..=n {
                proj.insert(format!("{n},{j}"), self.names[n][self.proj(n, j)].clone());
            }
        }
        let mut subst = Vec::new();
        for n in 0..=self.n_max {
            for k in 0..=self.n_max {
                for sigma in 0..self.size(n) {
                    tuples::for_each(self.size(k), n, |args| {
                        subst.push(SubstEntry {
                            n,
                            k,
                            sigma: self.names[n][sigma].clone(),
                            args: args.iter().map(|&a| self.names[k][a].clone()).collect(),
                            result: self.names[k][self.subst(n, k, sigma, args)].clone(),
                        });
                    });
                }
            }
        }
        Ok(serde_json::to_value(CloneJson {
            label: Some(self.label.clone()),
            n_max: self.n_max,
            ops,
            proj,
            subst,
        })?)
    }

    /// Reads the JSON clone format into a table clone.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let cj: CloneJson = serde_json::from_value(value.clone())?;
        let mut names = Vec::with_capacity(cj.n_max + 1);
        let mut lookup = Vec::with_capacity(cj.n_max + 1);
        for n in 0..=cj.n_max {
            let block = cj
                .ops
                .get(&n.to_string())
                .cloned()
                .ok_or_else(|| Error::InvalidInput(format!("ops for arity {n} missing")))?;
            let map: HashMap<String, OpId> = block
                .iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), i))
                .collect();
            if map.len() != block.len() {
                return Err(Error::InvalidInput(format!(
                    "duplicate op names at arity {n}"
                )));
            }
            lookup.push(map);
            names.push(block);
        }
        let find = |n: usize, s: &str| -> Result<OpId> {
            lookup[n]
                .get(s)
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("unknown op {s:?} at arity {n}")))
        };
        let mut proj = vec![Vec::new(); cj.n_max + 1];
        for (n, p) in proj.iter_mut().enumerate() {
            for j in 1..=n {
                let s = cj
                    .proj
                    .get(&format!("{n},{j}"))
                    .ok_or_else(|| Error::InvalidInput(format!("projection {n},{j} missing")))?;
                p.push(find(n, s)?);
            }
        }
        let mut tables: Vec<Vec<Vec<Option<OpId>>>> = (0..=cj.n_max)
            .map(|n| {
                (0..=cj.n_max)
                    .map(|k| {
                        let len = tuples::count(names[k].len(), n).unwrap_or(0) * names[n].len();
                        vec![None; len]
                    })
                    .collect()
            })
            .collect();
        for e in &cj.subst {
            if e.n > cj.n_max || e.k > cj.n_max || e.args.len() != e.n {
                return Err(Error::InvalidInput(format!(
                    "malformed substitution entry ({},{})",
                    e.n, e.k
                )));
            }
            let sigma = find(e.n, &e.sigma)?;
            let args = e
                .args
                .iter()
                .map(|a| find(e.k, a))
                .collect::<Result<Vec<_>>>()?;
            let ok = names[e.k].len();
            let slot = sigma * ok.pow(e.n as u32) + tuples::encode(&args, ok);
            tables[e.n][e.k][slot] = Some(find(e.k, &e.result)?);
        }
        let tables = tables
            .into_iter()
            .enumerate()
            .map(|(n, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(k, t)| {
                        t.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| {
                            Error::InvalidInput(format!("substitution table ({n},{k}) is partial"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let label = cj.label.unwrap_or_else(|| "inline".to_string());
        Self::from_tables(&label, names, proj, tables)
    }
}

impl fmt::Display for AbstractClone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} with |O(n)| = {:?}", self.label, self.sizes())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SubstEntry {
    n: usize,
    k: usize,
    sigma: String,
    args: Vec<String>,
    result: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CloneJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    n_max: usize,
    ops: BTreeMap<String, Vec<String>>,
    proj: BTreeMap<String, String>,
    subst: Vec<SubstEntry>,
}

/// Runs `check` on every instance of a block, or on a seeded sample when the
/// block has more than `budget.max_tuples` instances. Returns (checked,
/// violation count, listed violations).
fn run_block<F>(
    total: u128,
    budget: &SearchBudget,
    seed: u64,
    check: F,
) -> (u64, u64, Vec<Violation>)
where
    F: Fn(Option<&mut ChaCha8Rng>, u64, &mut Vec<Violation>) -> u64 + Sync,
{
    if total == 0 {
        return (0, 0, Vec::new());
    }
    if total <= budget.max_tuples as u128 {
        let mut vs = Vec::new();
        let bad = check(None, total as u64, &mut vs);
        (total as u64, bad, vs)
    } else {
        let samples = SAMPLE_PER_BLOCK.min(budget.max_tuples);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vs = Vec::new();
        let bad = check(Some(&mut rng), samples, &mut vs);
        (samples, bad, vs)
    }
}

fn show(c: &AbstractClone, n: usize, ops: &[OpId]) -> String {
    let parts: Vec<&str> = ops.iter().map(|&o| c.name(n, o)).collect();
    format!("({})", parts.join(","))
}

/// Checks associativity, projection, unit and normalisation for every index
/// up to `n_max`. Blocks with more than `budget.max_tuples` instances are
/// checked on a deterministic random sample, recorded in the coverage.
pub fn validate_clone(c: &AbstractClone, budget: &SearchBudget) -> ValidationReport {
    let mut report = ValidationReport::new(format!("clone {}", c.label));
    let nm = c.n_max;
    let sz = c.sizes();

    for n in 0..=nm {
        for m in 0..=nm {
            for k in 0..=nm {
                let total = (sz[n] as u128)
                    .saturating_mul(pow_sat(sz[m], n))
                    .saturating_mul(pow_sat(sz[k], m));
                let seed = ((n * 31 + m) * 31 + k) as u64;
                let (checked, bad, vs) = run_block(total, budget, seed, |rng, count, vs| {
                    assoc_instances(c, n, m, k, rng, count, vs)
                });
                report.cover(Axiom::Associativity, vec![n, m, k], checked, total);
                report.violation_count += bad;
                report.violations.extend(vs);
            }
        }
    }

    for n in 1..=nm {
        for m in 0..=nm {
            let total = (n as u128).saturating_mul(pow_sat(sz[m], n));
            let seed = 0x5eed ^ ((n * 31 + m) as u64);
            let (checked, bad, vs) = run_block(total, budget, seed, |rng, count, vs| {
                let mut bad = 0;
                let mut t = vec![0; n];
                let mut visit = |j: usize, t: &[OpId], vs: &mut Vec<Violation>| {
                    let got = c.subst(n, m, c.proj(n, j), t);
                    if got != t[j - 1] {
                        bad += 1;
                        if vs.len() < MAX_LISTED_VIOLATIONS {
                            vs.push(Violation {
                                axiom: Axiom::Projection,
                                indices: vec![n, j],
                                witness: format!(
                                    "π^{n}_{j} ∗ {} = {} ≠ {}",
                                    show(c, m, t),
                                    c.name(m, got),
                                    c.name(m, t[j - 1])
                                ),
                            });
                        }
                    }
                };
                match rng {
                    None => {
                        for j in 1..=n {
                            tuples::for_each(sz[m], n, |t| visit(j, t, vs));
                        }
                    }
                    Some(rng) => {
                        for _ in 0..count {
                            let j = rng.gen_range(1..=n);
                            t.iter_mut().for_each(|x| *x = rng.gen_range(0..sz[m]));
                            visit(j, &t, vs);
                        }
                    }
                }
                bad
            });
            report.cover(Axiom::Projection, vec![n, m], checked, total);
            report.violation_count += bad;
            report.violations.extend(vs);
        }
    }

    for n in 0..=nm {
        let ids: Vec<OpId> = c.projections(n).to_vec();
        for sigma in 0..sz[n] {
            let got = c.subst(n, n, sigma, &ids);
            if got != sigma {
                report.push(Violation {
                    axiom: Axiom::Unit,
                    indices: vec![n],
                    witness: format!(
                        "{} ∗ (π^{n}_1…π^{n}_{n}) = {}",
                        c.name(n, sigma),
                        c.name(n, got)
                    ),
                });
            }
        }
        report.cover(Axiom::Unit, vec![n], sz[n] as u64, sz[n] as u128);
    }

    for cst in 0..sz[0] {
        let got = c.subst(0, 0, cst, &[]);
        if got != cst {
            report.push(Violation {
                axiom: Axiom::Normalisation,
                indices: vec![],
                witness: format!("∗00({}) = {}", c.name(0, cst), c.name(0, got)),
            });
        }
    }
    report.cover(Axiom::Normalisation, vec![], sz[0] as u64, sz[0] as u128);

    report.violations.truncate(MAX_LISTED_VIOLATIONS);
    report.finish()
}

/// `(σ ∗ t) ∗ s = σ ∗ (t_1 ∗ s, …, t_n ∗ s)` for `σ ∈ O(n)`, `t ∈ O(m)^n`,
/// `s ∈ O(k)^m`.
fn assoc_instances(
    c: &AbstractClone,
    n: usize,
    m: usize,
    k: usize,
    rng: Option<&mut ChaCha8Rng>,
    count: u64,
    vs: &mut Vec<Violation>,
) -> u64 {
    let (on, om, ok) = (c.size(n), c.size(m), c.size(k));
    let witness = |sigma: OpId, t: &[OpId], s: &[OpId], l: OpId, r: OpId| Violation {
        axiom: Axiom::Associativity,
        indices: vec![n, m, k],
        witness: format!(
            "σ={} t={} s={}: {} ≠ {}",
            c.name(n, sigma),
            show(c, m, t),
            show(c, k, s),
            c.name(k, l),
            c.name(k, r)
        ),
    };
    match rng {
        Some(rng) => {
            let mut bad = 0;
            let mut t = vec![0; n];
            let mut s = vec![0; m];
            let mut u = vec![0; n];
            for _ in 0..count {
                let sigma = rng.gen_range(0..on);
                t.iter_mut().for_each(|x| *x = rng.gen_range(0..om));
                s.iter_mut().for_each(|x| *x = rng.gen_range(0..ok));
                for i in 0..n {
                    u[i] = c.subst(m, k, t[i], &s);
                }
                let l = c.subst(n, k, sigma, &u);
                let r = c.subst(m, k, c.subst(n, m, sigma, &t), &s);
                if l != r {
                    bad += 1;
                    if vs.len() < MAX_LISTED_VIOLATIONS {
                        vs.push(witness(sigma, &t, &s, l, r));
                    }
                }
            }
            bad
        }
        None => {
            let t_count = om.pow(n as u32);
            let s_count = ok.pow(m as u32);
            let parts: Vec<(u64, Vec<Violation>)> = (0..t_count)
                .into_par_iter()
                .map(|ti| {
                    let mut t = vec![0; n];
                    tuples::decode(ti, om, n, &mut t);
                    let w: Vec<OpId> = (0..on).map(|sg| c.subst(n, m, sg, &t)).collect();
                    let mut s = vec![0; m];
                    let mut u = vec![0; n];
                    let mut bad = 0;
                    let mut local = Vec::new();
                    for si in 0..s_count {
                        tuples::decode(si, ok, m, &mut s);
                        for i in 0..n {
                            u[i] = c.subst(m, k, t[i], &s);
                        }
                        for (sigma, &ws) in w.iter().enumerate() {
                            let l = c.subst(n, k, sigma, &u);
                            let r = c.subst(m, k, ws, &s);
                            if l != r {
                                bad += 1;
                                if local.len() < MAX_LISTED_VIOLATIONS {
                                    local.push(witness(sigma, &t, &s, l, r));
                                }
                            }
                        }
                    }
                    (bad, local)
                })
                .collect();
            let mut bad = 0;
            for (b, local) in parts {
                bad += b;
                for v in local {
                    if vs.len() < MAX_LISTED_VIOLATIONS {
                        vs.push(v);
                    }
                }
            }
            bad
        }
    }
}

/// A family `f_n : O(n) → O'(n)`.
#[derive(Debug, Clone)]
pub struct CloneHom<'a> {
    pub source: &'a AbstractClone,
    pub target: &'a AbstractClone,
    pub maps: Vec<Vec<OpId>>,
}

/// True iff the family preserves substitution and projections at every
/// index up to `n_max`. Malformed families are rejected.
pub fn clone_hom_check(h: &CloneHom<'_>) -> bool {
    let (s, t) = (h.source, h.target);
    if s.n_max != t.n_max || h.maps.len() != s.n_max + 1 {
        return false;
    }
    for n in 0..=s.n_max {
        if h.maps[n].len() != s.size(n) || h.maps[n].iter().any(|&x| x >= t.size(n)) {
            return false;
        }
        if (1..=n).any(|j| h.maps[n][s.proj(n, j)] != t.proj(n, j)) {
            return false;
        }
    }
    let mut image = Vec::new();
    for n in 0..=s.n_max {
        for k in 0..=s.n_max {
            let ok = s.size(k);
            for sigma in 0..s.size(n) {
                let mut good = true;
                tuples::for_each(ok, n, |args| {
                    if !good {
                        return;
                    }
                    image.clear();
                    image.extend(args.iter().map(|&a| h.maps[k][a]));
                    let lhs = h.maps[k][s.subst(n, k, sigma, args)];
                    let rhs = t.subst(n, k, h.maps[n][sigma], &image);
                    good = lhs == rhs;
                });
                if !good {
                    return false;
                }
            }
        }
    }
    true
}

/// Symbol naming operation `op ∈ O(n)` in [`theory_of_clone`].
pub fn clone_symbol(n: usize, op: OpId) -> String {
    format!("o{n}_{op}")
}

/// The presentation with one symbol per operation whose equations are the
/// substitution table and the projection laws written as term equations.
///
/// Every entry `σ ∗ (t_1 … t_n) = r` of `∗_{nk}` becomes
/// `σ(t_1(x1..xk), …, t_n(x1..xk)) = r(x1..xk)` over `k` variables, and
/// every projection becomes `π^n_j(x1..xn) = xj`.
pub fn theory_of_clone(c: &AbstractClone, budget: &SearchBudget) -> Result<Presentation> {
    budget.check_tuples("theory equations", c.table_entries())?;
    let mut symbols = Vec::new();
    for n in 0..=c.n_max {
        for op in 0..c.size(n) {
            symbols.push(Symbol {
                name: clone_symbol(n, op),
                arity: n,
            });
        }
    }
    let signature = Signature::new(symbols, c.n_max)?;
    let app = |n: usize, op: OpId, args: Vec<Term>| Term::App(clone_symbol(n, op), args);
    let vars = |k: usize| (1..=k).map(Term::Var).collect::<Vec<_>>();
    let mut equations = Vec::new();
    for n in 0..=c.n_max {
        for k in 0..=c.n_max {
            for sigma in 0..c.size(n) {
                tuples::for_each(c.size(k), n, |args| {
                    let inner = args.iter().map(|&t| app(k, t, vars(k))).collect();
                    equations.push(Equation {
                        nvars: k,
                        lhs: app(n, sigma, inner),
                        rhs: app(k, c.subst(n, k, sigma, args), vars(k)),
                    });
                });
            }
        }
        for j in 1..=n {
            equations.push(Equation {
                nvars: n,
                lhs: app(n, c.proj(n, j), vars(n)),
                rhs: Term::Var(j),
            });
        }
    }
    let name: String = c
        .label
        .chars()
        .map(|ch| if ch.is_ascii_alphanumeric() { ch } else { '_' })
        .collect();
    Presentation::new(&format!("T_{name}"), signature, equations)
}
