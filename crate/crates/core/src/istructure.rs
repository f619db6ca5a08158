//! Finite i-structures and the morphism predicates used by the gluing
//! constructions.
//!
//! An i-structure on a carrier `A` is a family `A⟨n⟩ ⊆ A^n`, `n ≤ n_max`,
//! with `A⟨0⟩` the one-point set and `A⟨1⟩ = A`, closed under
//! precomposition with every map `h: m → n`. Each `A⟨n⟩` is kept as a sorted
//! vector of index tuples.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::budget::{pow_sat, SearchBudget};
use crate::error::{Error, Result};
use crate::report::{Axiom, ValidationReport, Violation};
use crate::ring::FiniteRing;
use crate::tuples;

pub type Tuple = Vec<usize>;

/// Carrier names `"0" … "size-1"`.
pub fn index_names(size: usize) -> Vec<String> {
    (0..size).map(|i| i.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IStructure {
    carrier: Vec<String>,
    n_max: usize,
    /// `nbhd[n]` for `0 ≤ n ≤ n_max`, sorted and deduplicated.
    nbhd: Vec<Vec<Tuple>>,
}

impl IStructure {
    /// Assembles a structure from explicit tuple sets without checking the
    /// closure conditions; see [`IStructure::validate`]. A missing arity-1
    /// block defaults to the carrier, other missing blocks are empty.
    pub fn from_parts(
        carrier: Vec<String>,
        n_max: usize,
        blocks: BTreeMap<usize, Vec<Tuple>>,
    ) -> Result<Self> {
        let size = carrier.len();
        let mut nbhd = vec![Vec::new(); n_max + 1];
        nbhd[0] = vec![Vec::new()];
        nbhd[1] = (0..size).map(|a| vec![a]).collect();
        if n_max == 0 {
            nbhd.truncate(1);
        }
        for (n, tuples) in blocks {
            if n == 0 || n > n_max {
                return Err(Error::InvalidInput(format!(
                    "neighbourhood block for arity {n} outside 1..={n_max}"
                )));
            }
            for t in &tuples {
                if t.len() != n || t.iter().any(|&x| x >= size) {
                    return Err(Error::InvalidInput(format!(
                        "tuple {t:?} is not an {n}-tuple over a carrier of size {size}"
                    )));
                }
            }
            nbhd[n] = tuples;
        }
        Ok(Self::normalised(carrier, n_max, nbhd))
    }

    fn normalised(carrier: Vec<String>, n_max: usize, mut nbhd: Vec<Vec<Tuple>>) -> Self {
        for block in nbhd.iter_mut() {
            block.sort();
            block.dedup();
        }
        IStructure {
            carrier,
            n_max,
            nbhd,
        }
    }

    /// `A⟨n⟩ = Δ_n`.
    pub fn discrete(carrier: Vec<String>, n_max: usize) -> Self {
        let size = carrier.len();
        let nbhd = (0..=n_max)
            .map(|n| {
                if n == 0 {
                    vec![Vec::new()]
                } else {
                    (0..size).map(|a| vec![a; n]).collect()
                }
            })
            .collect();
        IStructure {
            carrier,
            n_max,
            nbhd,
        }
    }

    /// `A⟨n⟩ = A^n`.
    pub fn indiscrete(carrier: Vec<String>, n_max: usize) -> Self {
        let size = carrier.len();
        let nbhd = (0..=n_max).map(|n| tuples::all(size, n)).collect();
        IStructure {
            carrier,
            n_max,
            nbhd,
        }
    }

    /// `A⟨m⟩` = the `m`-tuples whose entries are pairwise related by `rel`.
    pub fn generate_from_binary(
        carrier: Vec<String>,
        n_max: usize,
        rel: &[(usize, usize)],
    ) -> Result<Self> {
        let size = carrier.len();
        if let Some(&(x, y)) = rel.iter().find(|&&(x, y)| x >= size || y >= size) {
            return Err(Error::InvalidInput(format!(
                "pair ({x},{y}) leaves the carrier"
            )));
        }
        let mut related = vec![false; size * size];
        for &(x, y) in rel {
            related[x * size + y] = true;
        }
        let mut missing = BTreeSet::new();
        for x in 0..size {
            if !related[x * size + x] {
                missing.insert((x, x));
            }
        }
        for &(x, y) in rel {
            if !related[y * size + x] {
                missing.insert((y, x));
            }
        }
        if !missing.is_empty() {
            return Err(Error::NotSymmetricReflexive(missing.into_iter().collect()));
        }
        let mut nbhd = vec![vec![Vec::new()]];
        for m in 1..=n_max {
            let mut block = Vec::new();
            let mut t = Vec::with_capacity(m);
            cliques(size, m, &related, &mut t, &mut block);
            nbhd.push(block);
        }
        Ok(IStructure {
            carrier,
            n_max,
            nbhd,
        })
    }

    /// The least i-structure containing the generators, by a single pass of
    /// precompositions.
    pub fn generate_from_tuples(
        carrier: Vec<String>,
        n_max: usize,
        gens: &BTreeMap<usize, Vec<Tuple>>,
    ) -> Result<Self> {
        let size = carrier.len();
        let mut sets: Vec<BTreeSet<Tuple>> = vec![BTreeSet::new(); n_max + 1];
        sets[0].insert(Vec::new());
        let singletons: Vec<Tuple> = (0..size).map(|a| vec![a]).collect();
        let mut all_gens: Vec<&Tuple> = singletons.iter().collect();
        for (&n, ts) in gens {
            if n > n_max {
                return Err(Error::InvalidInput(format!(
                    "generator arity {n} above n_max = {n_max}"
                )));
            }
            for t in ts {
                if t.len() != n || t.iter().any(|&x| x >= size) {
                    return Err(Error::InvalidInput(format!("malformed generator {t:?}")));
                }
                all_gens.push(t);
            }
        }
        for t in all_gens {
            let n = t.len();
            for (m, set) in sets.iter_mut().enumerate() {
                tuples::for_each(n, m, |h| {
                    set.insert(h.iter().map(|&i| t[i]).collect());
                });
            }
        }
        Ok(IStructure {
            carrier,
            n_max,
            nbhd: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    /// The nil-square structure on `R^k`: `P` and `Q` are neighbours iff
    /// `Q − P ∈ D(k)`, higher arities pairwise.
    pub fn nil_square(
        ring: &FiniteRing,
        k: usize,
        n_max: usize,
        budget: &SearchBudget,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput(
                "nil-square structure needs k ≥ 1".into(),
            ));
        }
        let size = pow_sat(ring.size(), k);
        budget.check_tuples("nil-square carrier", size.saturating_mul(size))?;
        let points = tuples::all(ring.size(), k);
        let carrier = points.iter().map(|p| ring_tuple_name(ring, p)).collect();
        let d: BTreeSet<Tuple> = ring.nil_square_tuples(k).into_iter().collect();
        let mut rel = Vec::new();
        for (i, p) in points.iter().enumerate() {
            for (j, q) in points.iter().enumerate() {
                let diff: Tuple = q.iter().zip(p).map(|(&a, &b)| ring.sub(a, b)).collect();
                if d.contains(&diff) {
                    rel.push((i, j));
                }
            }
        }
        Self::generate_from_binary(carrier, n_max, &rel)
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn size(&self) -> usize {
        self.carrier.len()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `A⟨n⟩`, sorted.
    pub fn tuples(&self, n: usize) -> &[Tuple] {
        &self.nbhd[n]
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        t.len() <= self.n_max
            && self.nbhd[t.len()]
                .binary_search_by(|x| x.as_slice().cmp(t))
                .is_ok()
    }

    /// Position of `t` in `A⟨|t|⟩`.
    pub fn index_of(&self, t: &[usize]) -> Option<usize> {
        if t.len() > self.n_max {
            return None;
        }
        self.nbhd[t.len()]
            .binary_search_by(|x| x.as_slice().cmp(t))
            .ok()
    }

    /// Checks `A⟨1⟩ = A` and closure under every `h: m → n`, `m, n ≤ n_max`.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new("i-structure");
        let size = self.size();
        if self.nbhd[0] != vec![Vec::<usize>::new()] {
            report.push(Violation {
                axiom: Axiom::ArityZero,
                indices: vec![0],
                witness: "A⟨0⟩ is not the one-point set".into(),
            });
        }
        report.cover(Axiom::ArityZero, vec![0], 1, 1);
        if self.n_max >= 1 {
            for a in 0..size {
                if !self.contains(&[a]) {
                    report.push(Violation {
                        axiom: Axiom::ArityOne,
                        indices: vec![1],
                        witness: format!("({}) missing from A⟨1⟩", self.carrier[a]),
                    });
                }
            }
            report.cover(Axiom::ArityOne, vec![1], size as u64, size as u128);
        }
        for n in 1..=self.n_max {
            for m in 0..=self.n_max {
                let mut checked = 0u64;
                for t in &self.nbhd[n] {
                    tuples::for_each(n, m, |h| {
                        checked += 1;
                        let img: Tuple = h.iter().map(|&i| t[i]).collect();
                        if !self.contains(&img) {
                            let h1: Vec<usize> = h.iter().map(|i| i + 1).collect();
                            report.push(Violation {
                                axiom: Axiom::Precomposition,
                                indices: vec![m, n],
                                witness: format!(
                                    "h = {h1:?}: {} ↦ {} not in A⟨{m}⟩",
                                    self.show(t),
                                    self.show(&img)
                                ),
                            });
                        }
                    });
                }
                report.cover(Axiom::Precomposition, vec![m, n], checked, checked as u128);
            }
        }
        report.finish()
    }

    /// Renders a tuple with carrier names.
    pub fn show(&self, t: &[usize]) -> String {
        let parts: Vec<&str> = t.iter().map(|&i| self.carrier[i].as_str()).collect();
        format!("({})", parts.join(","))
    }

    /// Restriction to `subset` (ascending indices): tuples with all entries
    /// in the subset, renumbered.
    pub fn restrict(&self, subset: &[usize]) -> Result<Self> {
        let mut pos = vec![usize::MAX; self.size()];
        for (i, &x) in subset.iter().enumerate() {
            if x >= self.size() {
                return Err(Error::InvalidInput(format!(
                    "index {x} outside the carrier"
                )));
            }
            pos[x] = i;
        }
        let nbhd = self
            .nbhd
            .iter()
            .map(|block| {
                block
                    .iter()
                    .filter(|t| t.iter().all(|&x| pos[x] != usize::MAX))
                    .map(|t| t.iter().map(|&x| pos[x]).collect())
                    .collect()
            })
            .collect();
        Ok(Self::normalised(
            subset.iter().map(|&x| self.carrier[x].clone()).collect(),
            self.n_max,
            nbhd,
        ))
    }

    /// `(A×B)⟨n⟩`: pairs of tuples componentwise neighbours. The carrier
    /// element `(a,b)` has index `a·|B| + b`.
    pub fn product(a: &IStructure, b: &IStructure) -> Result<Self> {
        if a.n_max != b.n_max {
            return Err(Error::InvalidInput("n_max differs".into()));
        }
        let bs = b.size();
        let carrier = a
            .carrier
            .iter()
            .flat_map(|x| b.carrier.iter().map(move |y| format!("({x},{y})")))
            .collect();
        let nbhd = (0..=a.n_max)
            .map(|n| {
                let mut block = Vec::with_capacity(a.nbhd[n].len() * b.nbhd[n].len());
                for s in &a.nbhd[n] {
                    for t in &b.nbhd[n] {
                        block.push(s.iter().zip(t).map(|(&x, &y)| x * bs + y).collect());
                    }
                }
                block
            })
            .collect();
        Ok(Self::normalised(carrier, a.n_max, nbhd))
    }

    /// Same carrier size, `n_max` and relations; names are ignored.
    pub fn same_relations(&self, other: &IStructure) -> bool {
        self.size() == other.size() && self.n_max == other.n_max && self.nbhd == other.nbhd
    }

    pub fn with_carrier_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.size() {
            return Err(Error::InvalidInput("carrier name count differs".into()));
        }
        self.carrier = names;
        Ok(self)
    }

    /// `f^n(A⟨n⟩)` as an i-structure on a carrier of `target.len()` points.
    pub(crate) fn image_under(&self, map: &[usize], target: Vec<String>) -> Self {
        let nbhd = self
            .nbhd
            .iter()
            .map(|block| {
                block
                    .iter()
                    .map(|t| t.iter().map(|&x| map[x]).collect())
                    .collect()
            })
            .collect();
        Self::normalised(target, self.n_max, nbhd)
    }

    /// Union of several structures on the same carrier.
    pub(crate) fn join(carrier: Vec<String>, n_max: usize, parts: &[IStructure]) -> Self {
        let mut nbhd: Vec<Vec<Tuple>> = vec![Vec::new(); n_max + 1];
        nbhd[0] = vec![Vec::new()];
        for p in parts {
            for n in 1..=n_max {
                nbhd[n].extend(p.nbhd[n].iter().cloned());
            }
        }
        Self::normalised(carrier, n_max, nbhd)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut nbhd = BTreeMap::new();
        for n in 2..=self.n_max {
            nbhd.insert(n.to_string(), self.nbhd[n].clone());
        }
        serde_json::to_value(IStructureJson {
            carrier: self.carrier.clone(),
            n_max: self.n_max,
            nbhd,
        })
        .expect("plain data serialises")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let j: IStructureJson = serde_json::from_value(value.clone())?;
        let mut blocks = BTreeMap::new();
        for (k, v) in j.nbhd {
            let n: usize = k
                .parse()
                .map_err(|_| Error::InvalidInput(format!("arity key {k:?} is not a number")))?;
            blocks.insert(n, v);
        }
        Self::from_parts(j.carrier, j.n_max, blocks)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct IStructureJson {
    carrier: Vec<String>,
    n_max: usize,
    #[serde(default)]
    nbhd: BTreeMap<String, Vec<Tuple>>,
}

fn cliques(size: usize, m: usize, related: &[bool], t: &mut Tuple, out: &mut Vec<Tuple>) {
    if t.len() == m {
        out.push(t.clone());
        return;
    }
    for x in 0..size {
        if t.iter().all(|&y| related[y * size + x]) {
            t.push(x);
            cliques(size, m, related, t, out);
            t.pop();
        }
    }
}

/// Carrier name of a point of `R^k`: the element itself for `k = 1`, a
/// parenthesised tuple otherwise.
pub fn ring_tuple_name(ring: &FiniteRing, p: &[usize]) -> String {
    if p.len() == 1 {
        ring.name(p[0]).to_string()
    } else {
        let parts: Vec<&str> = p.iter().map(|&x| ring.name(x)).collect();
        format!("({})", parts.join(","))
    }
}

fn map_in_range(map: &[usize], s: &IStructure, t: &IStructure) -> bool {
    map.len() == s.size() && map.iter().all(|&y| y < t.size())
}

/// `f^n(S⟨n⟩) ⊆ T⟨n⟩` for all `n ≤ n_max`.
pub fn is_i_morphism(map: &[usize], s: &IStructure, t: &IStructure) -> bool {
    if !map_in_range(map, s, t) || s.n_max != t.n_max {
        return false;
    }
    let mut img = Vec::new();
    (2..=s.n_max).all(|n| {
        s.nbhd[n].iter().all(|x| {
            img.clear();
            img.extend(x.iter().map(|&a| map[a]));
            t.contains(&img)
        })
    })
}

/// Every tuple whose image is a neighbour tuple is itself a neighbour tuple.
pub fn reflects_istructure(map: &[usize], s: &IStructure, t: &IStructure) -> bool {
    reflection_failure(map, s, t).is_none()
}

/// A source tuple whose image is in `T⟨n⟩` but which is not in `S⟨n⟩`.
pub fn reflection_failure(map: &[usize], s: &IStructure, t: &IStructure) -> Option<Tuple> {
    if !map_in_range(map, s, t) || s.n_max != t.n_max {
        return Some(Vec::new());
    }
    let mut fibres = vec![Vec::new(); t.size()];
    for (a, &y) in map.iter().enumerate() {
        fibres[y].push(a);
    }
    for n in 2..=s.n_max {
        for y in &t.nbhd[n] {
            if y.iter().any(|&b| fibres[b].is_empty()) {
                continue;
            }
            let bases: Vec<usize> = y.iter().map(|&b| fibres[b].len()).collect();
            let mut idx = vec![0; n];
            loop {
                let x: Tuple = idx.iter().zip(y).map(|(&i, &b)| fibres[b][i]).collect();
                if !s.contains(&x) {
                    return Some(x);
                }
                let mut carry = true;
                for i in (0..n).rev() {
                    idx[i] += 1;
                    if idx[i] < bases[i] {
                        carry = false;
                        break;
                    }
                    idx[i] = 0;
                }
                if carry {
                    break;
                }
            }
        }
    }
    None
}

/// No point outside the image is a neighbour of an image point.
pub fn image_closed(map: &[usize], s: &IStructure, t: &IStructure) -> bool {
    if !map_in_range(map, s, t) {
        return false;
    }
    if t.n_max < 2 {
        return true;
    }
    let mut in_image = vec![false; t.size()];
    for &y in map {
        in_image[y] = true;
    }
    t.nbhd[2]
        .iter()
        .all(|pair| !in_image[pair[0]] || in_image[pair[1]])
}

/// `Z⟨n⟩ = f^n(S⟨n⟩)` for a surjection `f` onto a carrier of `target.len()`
/// points.
pub fn image_istructure(map: &[usize], s: &IStructure, target: Vec<String>) -> Result<IStructure> {
    if map.len() != s.size() || map.iter().any(|&y| y >= target.len()) {
        return Err(Error::InvalidInput("map does not fit the carriers".into()));
    }
    let mut hit = vec![false; target.len()];
    for &y in map {
        hit[y] = true;
    }
    let missed: Vec<usize> = (0..target.len()).filter(|&y| !hit[y]).collect();
    if !missed.is_empty() {
        return Err(Error::NotSurjective(missed));
    }
    Ok(s.image_under(map, target))
}
