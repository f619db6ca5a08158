//! Infinitesimal algebras over a truncated clone and their homomorphisms.
//!
//! The action `•_n : O(n) × A⟨n⟩ → A` is stored densely per arity, indexed
//! by operation and by the position of the tuple in the sorted `A⟨n⟩`.
//! Asking for the action on a tuple outside `A⟨n⟩` is a [`Error::Domain`].

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clone::{AbstractClone, OpId};
use crate::error::{Error, Result};
use crate::istructure::{self, IStructure, Tuple};
use crate::report::{Axiom, ValidationReport, Violation, MAX_LISTED_VIOLATIONS};
use crate::tuples;

#[derive(Debug, Clone, PartialEq)]
pub struct IAlgebra {
    clone: Arc<AbstractClone>,
    istr: IStructure,
    /// `action[n][op·|A⟨n⟩| + index of the tuple in A⟨n⟩]`.
    action: Vec<Vec<usize>>,
}

impl IAlgebra {
    /// Tabulates `f(n, op, x)` on every `x ∈ A⟨n⟩`.
    pub fn from_fn(
        clone: Arc<AbstractClone>,
        istr: IStructure,
        f: impl Fn(usize, OpId, &[usize]) -> usize,
    ) -> Result<Self> {
        if clone.n_max() != istr.n_max() {
            return Err(Error::InvalidInput(format!(
                "clone truncated at {} but i-structure at {}",
                clone.n_max(),
                istr.n_max()
            )));
        }
        let size = istr.size();
        let mut action = Vec::with_capacity(clone.n_max() + 1);
        for n in 0..=clone.n_max() {
            let dom = istr.tuples(n);
            let mut block = Vec::with_capacity(clone.size(n) * dom.len());
            for op in 0..clone.size(n) {
                for x in dom {
                    let r = f(n, op, x);
                    if r >= size {
                        return Err(Error::InvalidInput(format!(
                            "{} • {} = {r} leaves the carrier",
                            clone.name(n, op),
                            istr.show(x)
                        )));
                    }
                    block.push(r);
                }
            }
            action.push(block);
        }
        Ok(IAlgebra {
            clone,
            istr,
            action,
        })
    }

    /// Builds the action from explicit `(n, op, tuple, result)` entries,
    /// which must cover `O(n) × A⟨n⟩` exactly.
    pub fn from_entries(
        clone: Arc<AbstractClone>,
        istr: IStructure,
        entries: &[(usize, OpId, Tuple, usize)],
    ) -> Result<Self> {
        if clone.n_max() != istr.n_max() {
            return Err(Error::InvalidInput(
                "clone and i-structure truncations differ".into(),
            ));
        }
        let mut action: Vec<Vec<Option<usize>>> = (0..=clone.n_max())
            .map(|n| vec![None; clone.size(n) * istr.tuples(n).len()])
            .collect();
        for (n, op, t, r) in entries {
            let (n, op, r) = (*n, *op, *r);
            if n > clone.n_max() || op >= clone.size(n) || t.len() != n || r >= istr.size() {
                return Err(Error::InvalidInput(format!(
                    "malformed action entry ({n}, {op}, {t:?}, {r})"
                )));
            }
            let idx = istr.index_of(t).ok_or_else(|| Error::Domain {
                arity: n,
                tuple: t.clone(),
            })?;
            action[n][op * istr.tuples(n).len() + idx] = Some(r);
        }
        let action = action
            .into_iter()
            .enumerate()
            .map(|(n, block)| {
                block
                    .into_iter()
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| {
                        Error::InvalidInput(format!("action at arity {n} is not total on A⟨{n}⟩"))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IAlgebra {
            clone,
            istr,
            action,
        })
    }

    pub fn clone_ref(&self) -> &Arc<AbstractClone> {
        &self.clone
    }

    pub fn istructure(&self) -> &IStructure {
        &self.istr
    }

    pub fn carrier(&self) -> &[String] {
        self.istr.carrier()
    }

    pub fn size(&self) -> usize {
        self.istr.size()
    }

    pub fn n_max(&self) -> usize {
        self.istr.n_max()
    }

    /// `σ •_n x`, or [`Error::Domain`] when `x ∉ A⟨n⟩`.
    pub fn act(&self, n: usize, op: OpId, x: &[usize]) -> Result<usize> {
        if x.len() != n || n > self.n_max() || op >= self.clone.size(n) {
            return Err(Error::Domain {
                arity: n,
                tuple: x.to_vec(),
            });
        }
        let idx = self.istr.index_of(x).ok_or_else(|| Error::Domain {
            arity: n,
            tuple: x.to_vec(),
        })?;
        Ok(self.act_at(n, op, idx))
    }

    /// `σ •_n x` for the tuple at position `idx` of `A⟨n⟩`.
    #[inline]
    pub fn act_at(&self, n: usize, op: OpId, idx: usize) -> usize {
        self.action[n][op * self.istr.tuples(n).len() + idx]
    }

    /// Same carrier names, i-structure and action; the clones must agree.
    pub fn same_as(&self, other: &IAlgebra) -> bool {
        same_clone(&self.clone, &other.clone)
            && self.istr == other.istr
            && self.action == other.action
    }

    /// The same algebra with relabelled carrier.
    pub fn with_carrier_names(self, names: Vec<String>) -> Result<Self> {
        Ok(IAlgebra {
            istr: self.istr.with_carrier_names(names)?,
            ..self
        })
    }

    /// The isomorphic copy in which element `x` becomes `new_index[x]`.
    pub fn relabel(&self, new_index: &[usize], names: Vec<String>) -> Result<Self> {
        let size = self.size();
        if new_index.len() != size || names.len() != size {
            return Err(Error::InvalidInput(
                "relabelling has the wrong length".into(),
            ));
        }
        let mut old = vec![usize::MAX; size];
        for (x, &y) in new_index.iter().enumerate() {
            if y >= size || old[y] != usize::MAX {
                return Err(Error::InvalidInput(
                    "relabelling is not a permutation".into(),
                ));
            }
            old[y] = x;
        }
        let istr = self.istr.image_under(new_index, names);
        IAlgebra::from_fn(self.clone.clone(), istr, |n, op, t| {
            let orig: Tuple = t.iter().map(|&y| old[y]).collect();
            new_index[self
                .act(n, op, &orig)
                .expect("permuted tuples stay in the domain")]
        })
    }

    /// Sub-algebra on `subset` (ascending indices) with restricted
    /// i-structure.
    pub fn restrict(&self, subset: &[usize]) -> Result<Self> {
        let sub = self.istr.restrict(subset)?;
        let mut inside = vec![false; self.size()];
        for &x in subset {
            inside[x] = true;
        }
        for n in 0..=self.n_max() {
            for (idx, t) in self.istr.tuples(n).iter().enumerate() {
                if !t.iter().all(|&x| inside[x]) {
                    continue;
                }
                for op in 0..self.clone.size(n) {
                    let r = self.act_at(n, op, idx);
                    if !inside[r] {
                        return Err(Error::NotClosed(format!(
                            "{} • {} = {}",
                            self.clone.name(n, op),
                            self.istr.show(t),
                            self.carrier()[r]
                        )));
                    }
                }
            }
        }
        let mut pos = vec![usize::MAX; self.size()];
        for (i, &x) in subset.iter().enumerate() {
            pos[x] = i;
        }
        IAlgebra::from_fn(self.clone.clone(), sub, |n, op, t| {
            let orig: Tuple = t.iter().map(|&i| subset[i]).collect();
            pos[self
                .act(n, op, &orig)
                .expect("restricted tuples stay in the domain")]
        })
    }

    /// Least subset containing `gens` and closed under the action.
    pub fn closure_of(&self, gens: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.size()];
        for &g in gens {
            inside[g] = true;
        }
        loop {
            let mut grew = false;
            for n in 0..=self.n_max() {
                for (idx, t) in self.istr.tuples(n).iter().enumerate() {
                    if !t.iter().all(|&x| inside[x]) {
                        continue;
                    }
                    for op in 0..self.clone.size(n) {
                        let r = self.act_at(n, op, idx);
                        if !inside[r] {
                            inside[r] = true;
                            grew = true;
                        }
                    }
                }
            }
            if !grew {
                break;
            }
        }
        (0..self.size()).filter(|&x| inside[x]).collect()
    }

    /// For a total algebra, the family `O(n) → End(A)(n)` sending each
    /// operation to its action table.
    pub fn endo_family(&self, endo: &AbstractClone) -> Option<Vec<Vec<OpId>>> {
        if endo.endo_carrier_size() != Some(self.size()) || endo.n_max() != self.n_max() {
            return None;
        }
        let mut maps = Vec::with_capacity(self.n_max() + 1);
        for n in 0..=self.n_max() {
            let points = self.istr.tuples(n).len();
            if points != self.size().pow(n as u32) {
                return None;
            }
            maps.push(
                (0..self.clone.size(n))
                    .map(|op| {
                        endo.endo_index_of(n, &self.action[n][op * points..(op + 1) * points])
                    })
                    .collect::<Option<Vec<_>>>()?,
            );
        }
        Some(maps)
    }

    pub fn action_entries(&self) -> Vec<(usize, OpId, Tuple, usize)> {
        let mut out = Vec::new();
        for n in 0..=self.n_max() {
            for op in 0..self.clone.size(n) {
                for (idx, t) in self.istr.tuples(n).iter().enumerate() {
                    out.push((n, op, t.clone(), self.act_at(n, op, idx)));
                }
            }
        }
        out
    }

    /// JSON with the clone given as `clone_json` (a reference string or an
    /// inline clone).
    pub fn to_json(&self, clone_json: serde_json::Value) -> serde_json::Value {
        let action: Vec<ActionEntry> = self
            .action_entries()
            .into_iter()
            .map(|(n, op, tuple, result)| ActionEntry {
                n,
                op: self.clone.name(n, op).to_string(),
                tuple,
                result,
            })
            .collect();
        serde_json::json!({
            "clone": clone_json,
            "istructure": self.istr.to_json(),
            "action": serde_json::to_value(action).expect("plain data serialises"),
        })
    }

    /// Reads the JSON form; `resolve` turns the `"clone"` field into a
    /// clone.
    pub fn from_json(
        value: &serde_json::Value,
        resolve: impl Fn(&serde_json::Value) -> Result<Arc<AbstractClone>>,
    ) -> Result<Self> {
        let clone = resolve(
            value
                .get("clone")
                .ok_or_else(|| Error::InvalidInput("i-algebra without a clone".into()))?,
        )?;
        let istr = IStructure::from_json(
            value
                .get("istructure")
                .ok_or_else(|| Error::InvalidInput("i-algebra without an i-structure".into()))?,
        )?;
        let entries: Vec<ActionEntry> = serde_json::from_value(
            value
                .get("action")
                .cloned()
                .ok_or_else(|| Error::InvalidInput("i-algebra without an action".into()))?,
        )?;
        let entries = entries
            .into_iter()
            .map(|e| {
                if e.n > clone.n_max() {
                    return Err(Error::InvalidInput(format!(
                        "action arity {} above n_max",
                        e.n
                    )));
                }
                let op = clone.op_index(e.n, &e.op).ok_or_else(|| {
                    Error::InvalidInput(format!("unknown operation {:?} at arity {}", e.op, e.n))
                })?;
                Ok((e.n, op, e.tuple, e.result))
            })
            .collect::<Result<Vec<_>>>()?;
        IAlgebra::from_entries(clone, istr, &entries)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ActionEntry {
    n: usize,
    op: String,
    tuple: Tuple,
    result: usize,
}

pub(crate) fn same_clone(a: &Arc<AbstractClone>, b: &Arc<AbstractClone>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Checks the neighbourhood, associativity and projection axioms at every
/// index up to `n_max`, exhaustively.
pub fn validate_ialgebra(a: &IAlgebra) -> ValidationReport {
    let mut report = ValidationReport::new(format!("i-algebra over {}", a.clone.label()));
    let c = &a.clone;
    let s = &a.istr;
    let nm = a.n_max();

    // Neighbourhood: the set of values {σ •_m x} must have all its n-tuples
    // in A⟨n⟩; checking distinct values covers every σ-tuple.
    for m in 0..=nm {
        for (xi, x) in s.tuples(m).iter().enumerate() {
            let values: BTreeSet<usize> = (0..c.size(m)).map(|op| a.act_at(m, op, xi)).collect();
            let values: Vec<usize> = values.into_iter().collect();
            for n in 0..=nm {
                tuples::for_each(values.len(), n, |pick| {
                    let t: Tuple = pick.iter().map(|&i| values[i]).collect();
                    if !s.contains(&t) {
                        let ops: Vec<String> = t
                            .iter()
                            .map(|&v| {
                                let op =
                                    (0..c.size(m)).find(|&op| a.act_at(m, op, xi) == v).unwrap();
                                c.name(m, op).to_string()
                            })
                            .collect();
                        report.push(Violation {
                            axiom: Axiom::Neighbourhood,
                            indices: vec![n, m],
                            witness: format!(
                                "σ = ({}) at x = {}: {} ∉ A⟨{n}⟩",
                                ops.join(","),
                                s.show(x),
                                s.show(&t)
                            ),
                        });
                    }
                });
            }
        }
        for n in 0..=nm {
            let total =
                (s.tuples(m).len() as u128).saturating_mul(crate::budget::pow_sat(c.size(m), n));
            report.cover(
                Axiom::Neighbourhood,
                vec![n, m],
                total.min(u64::MAX as u128) as u64,
                total,
            );
        }
    }

    // Associativity: (σ ∗ t) •_m x = σ •_n (t_1 •_m x, …, t_n •_m x).
    for n in 0..=nm {
        for m in 0..=nm {
            let (on, om) = (c.size(n), c.size(m));
            let dom = s.tuples(m);
            let parts: Vec<(u64, u64, Vec<Violation>)> = (0..dom.len())
                .into_par_iter()
                .map(|xi| {
                    let vals: Vec<usize> = (0..om).map(|op| a.act_at(m, op, xi)).collect();
                    let mut checked = 0;
                    let mut bad = 0;
                    let mut local = Vec::new();
                    let mut inner = vec![0; n];
                    tuples::for_each(om, n, |t| {
                        for (slot, &ti) in inner.iter_mut().zip(t) {
                            *slot = vals[ti];
                        }
                        let Some(ii) = s.index_of(&inner) else {
                            // undefined right-hand side, reported under Neighbourhood
                            return;
                        };
                        for sigma in 0..on {
                            checked += 1;
                            let l = vals[c.subst(n, m, sigma, t)];
                            let r = a.act_at(n, sigma, ii);
                            if l != r {
                                bad += 1;
                                if local.len() < MAX_LISTED_VIOLATIONS {
                                    let tn: Vec<&str> = t.iter().map(|&o| c.name(m, o)).collect();
                                    local.push(Violation {
                                        axiom: Axiom::ActionAssociativity,
                                        indices: vec![n, m],
                                        witness: format!(
                                            "σ = {} t = ({}) x = {}: {} ≠ {}",
                                            c.name(n, sigma),
                                            tn.join(","),
                                            s.show(&dom[xi]),
                                            s.carrier()[l],
                                            s.carrier()[r]
                                        ),
                                    });
                                }
                            }
                        }
                    });
                    (checked, bad, local)
                })
                .collect();
            let mut checked = 0;
            for (ch, bad, local) in parts {
                checked += ch;
                report.violation_count += bad;
                for v in local {
                    if report.violations.len() < MAX_LISTED_VIOLATIONS {
                        report.violations.push(v);
                    }
                }
            }
            let total = (on as u128)
                .saturating_mul(crate::budget::pow_sat(om, n))
                .saturating_mul(dom.len() as u128);
            // instances with an undefined inner tuple are Neighbourhood failures
            let covered = if report.has_violation(Axiom::Neighbourhood, &[n, m]) {
                checked
            } else {
                total.min(u64::MAX as u128) as u64
            };
            report.cover(Axiom::ActionAssociativity, vec![n, m], covered, total);
        }
    }

    // Projection: π^n_j •_n x = x_j.
    for n in 1..=nm {
        for j in 1..=n {
            let p = c.proj(n, j);
            for (xi, x) in s.tuples(n).iter().enumerate() {
                let r = a.act_at(n, p, xi);
                if r != x[j - 1] {
                    report.push(Violation {
                        axiom: Axiom::ActionProjection,
                        indices: vec![n, j],
                        witness: format!("π^{n}_{j} • {} = {}", s.show(x), s.carrier()[r]),
                    });
                }
            }
            let total = s.tuples(n).len();
            report.cover(
                Axiom::ActionProjection,
                vec![n, j],
                total as u64,
                total as u128,
            );
        }
    }
    report.finish()
}

/// The total algebra on `carrier` with action `f`, provided the clone-algebra
/// axioms hold.
pub fn total_algebra(
    clone: Arc<AbstractClone>,
    carrier: Vec<String>,
    f: impl Fn(usize, OpId, &[usize]) -> usize,
) -> Result<IAlgebra> {
    let n_max = clone.n_max();
    let a = IAlgebra::from_fn(clone, IStructure::indiscrete(carrier, n_max), f)?;
    let report = validate_ialgebra(&a);
    match report.violations.first() {
        None => Ok(a),
        Some(v) => Err(Error::NotACloneAlgebra(format!(
            "{} {:?}: {}",
            v.axiom, v.indices, v.witness
        ))),
    }
}

/// The total algebra on the constants `O(0)`, acting by `∗_{n0}`.
pub fn constants_algebra(clone: Arc<AbstractClone>) -> Result<IAlgebra> {
    let names = clone.names(0).to_vec();
    let c = clone.clone();
    total_algebra(clone, names, move |n, op, x| c.subst(n, 0, op, x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomFlags {
    pub i_morphism: bool,
    pub equivariant: bool,
    pub reflects: bool,
    pub closed_image: bool,
}

/// An accepted i-O-homomorphism with its computed flags.
#[derive(Debug, Clone)]
pub struct IHom {
    pub source: Arc<IAlgebra>,
    pub target: Arc<IAlgebra>,
    pub map: Vec<usize>,
    pub flags: HomFlags,
}

impl IHom {
    /// Computes all four flags and accepts the map iff it is an i-morphism
    /// and equivariant.
    pub fn new(source: Arc<IAlgebra>, target: Arc<IAlgebra>, map: Vec<usize>) -> Result<IHom> {
        let (flags, witness) = hom_flags(&source, &target, &map)?;
        if !(flags.i_morphism && flags.equivariant) {
            return Err(Error::NotIHom {
                i_morphism: flags.i_morphism,
                equivariant: flags.equivariant,
                witness: witness.unwrap_or_default(),
            });
        }
        Ok(IHom {
            source,
            target,
            map,
            flags,
        })
    }

    pub fn identity(a: Arc<IAlgebra>) -> IHom {
        let map = (0..a.size()).collect();
        IHom::new(a.clone(), a, map).expect("identity is a homomorphism")
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &IHom) -> Result<IHom> {
        if !(Arc::ptr_eq(&self.target, &g.source) || self.target.same_as(&g.source)) {
            return Err(Error::InvalidInput(
                "homomorphisms are not composable".into(),
            ));
        }
        let map = self.map.iter().map(|&x| g.map[x]).collect();
        IHom::new(self.source.clone(), g.target.clone(), map)
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.size()];
        for &y in &self.map {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }
}

/// Flags of `map: A → B` with a witness for the first failure of the
/// i-morphism or equivariance condition.
pub fn hom_flags(a: &IAlgebra, b: &IAlgebra, map: &[usize]) -> Result<(HomFlags, Option<String>)> {
    if !same_clone(&a.clone, &b.clone) {
        return Err(Error::DifferentClones);
    }
    if map.len() != a.size() || map.iter().any(|&y| y >= b.size()) {
        return Err(Error::InvalidInput("map does not fit the carriers".into()));
    }
    let (s, t) = (&a.istr, &b.istr);
    let mut witness = None;
    let mut i_morphism = true;
    'outer: for n in 2..=a.n_max() {
        for x in s.tuples(n) {
            let img: Tuple = x.iter().map(|&v| map[v]).collect();
            if !t.contains(&img) {
                i_morphism = false;
                witness = Some(format!("{} ↦ {} ∉ B⟨{n}⟩", s.show(x), t.show(&img)));
                break 'outer;
            }
        }
    }
    let mut equivariant = true;
    'eq: for n in 0..=a.n_max() {
        for (xi, x) in s.tuples(n).iter().enumerate() {
            let img: Tuple = x.iter().map(|&v| map[v]).collect();
            let Some(yi) = t.index_of(&img) else { continue };
            for op in 0..a.clone.size(n) {
                let l = map[a.act_at(n, op, xi)];
                let r = b.act_at(n, op, yi);
                if l != r {
                    equivariant = false;
                    if witness.is_none() {
                        witness = Some(format!(
                            "h({} • {}) = {} but {} • h(x) = {}",
                            a.clone.name(n, op),
                            s.show(x),
                            t.carrier()[l],
                            a.clone.name(n, op),
                            t.carrier()[r]
                        ));
                    }
                    break 'eq;
                }
            }
        }
    }
    let flags = HomFlags {
        i_morphism,
        equivariant,
        reflects: istructure::reflects_istructure(map, s, t),
        closed_image: istructure::image_closed(map, s, t),
    };
    Ok((flags, witness))
}

/// Decision form of [`IHom::new`].
pub fn is_ihom(map: &[usize], a: &Arc<IAlgebra>, b: &Arc<IAlgebra>) -> Result<IHom> {
    IHom::new(a.clone(), b.clone(), map.to_vec())
}
