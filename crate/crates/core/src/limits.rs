//! Products, equalizers, pullbacks, kernel pairs and congruences.
//!
//! Limits are computed in sets and given the restricted product
//! i-structure and the componentwise action.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ialgebra::{same_clone, IAlgebra, IHom};
use crate::istructure::{IStructure, Tuple};
use crate::unionfind::UnionFind;

fn same_algebra(a: &Arc<IAlgebra>, b: &Arc<IAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || a.same_as(b)
}

/// `A × B`; the element `(a,b)` has index `a·|B| + b`.
pub fn product(a: &IAlgebra, b: &IAlgebra) -> Result<IAlgebra> {
    if !same_clone(a.clone_ref(), b.clone_ref()) {
        return Err(Error::DifferentClones);
    }
    let bs = b.size();
    let istr = IStructure::product(a.istructure(), b.istructure())?;
    IAlgebra::from_fn(a.clone_ref().clone(), istr, |n, op, t| {
        let ta: Tuple = t.iter().map(|&z| z / bs).collect();
        let tb: Tuple = t.iter().map(|&z| z % bs).collect();
        let x = a.act(n, op, &ta).expect("first components are neighbours");
        let y = b.act(n, op, &tb).expect("second components are neighbours");
        x * bs + y
    })
}

/// `A × B` with its two projections.
pub fn product_with_projections(
    a: &Arc<IAlgebra>,
    b: &Arc<IAlgebra>,
) -> Result<(Arc<IAlgebra>, IHom, IHom)> {
    let p = Arc::new(product(a, b)?);
    let bs = b.size();
    let p1 = IHom::new(
        p.clone(),
        a.clone(),
        (0..p.size()).map(|z| z / bs).collect(),
    )?;
    let p2 = IHom::new(
        p.clone(),
        b.clone(),
        (0..p.size()).map(|z| z % bs).collect(),
    )?;
    Ok((p, p1, p2))
}

/// The sub-algebra `{x : f(x) = g(x)}` and its inclusion.
pub fn equalizer(f: &IHom, g: &IHom) -> Result<(Arc<IAlgebra>, IHom)> {
    if !same_clone(f.source.clone_ref(), g.source.clone_ref()) {
        return Err(Error::DifferentClones);
    }
    if !same_algebra(&f.source, &g.source) || !same_algebra(&f.target, &g.target) {
        return Err(Error::InvalidInput(
            "equalizer needs a parallel pair".into(),
        ));
    }
    let subset: Vec<usize> = (0..f.source.size())
        .filter(|&x| f.map[x] == g.map[x])
        .collect();
    let e = Arc::new(f.source.restrict(&subset)?);
    let inc = IHom::new(e.clone(), f.source.clone(), subset)?;
    Ok((e, inc))
}

/// A pullback square over a common codomain.
#[derive(Debug, Clone)]
pub struct Pullback {
    pub apex: Arc<IAlgebra>,
    /// To the domain of the first map.
    pub first: IHom,
    /// To the domain of the second map.
    pub second: IHom,
}

/// `{(b,a) : f(b) = g(a)}` for `f: B → Z`, `g: A → Z`.
pub fn pullback(f: &IHom, g: &IHom) -> Result<Pullback> {
    if !same_clone(f.source.clone_ref(), g.source.clone_ref()) {
        return Err(Error::DifferentClones);
    }
    if !same_algebra(&f.target, &g.target) {
        return Err(Error::InvalidInput(
            "pullback needs a common codomain".into(),
        ));
    }
    let (b, a) = (&f.source, &g.source);
    let full = product(b, a)?;
    let asz = a.size();
    let subset: Vec<usize> = (0..full.size())
        .filter(|&z| f.map[z / asz] == g.map[z % asz])
        .collect();
    let apex = Arc::new(full.restrict(&subset)?);
    let first = IHom::new(
        apex.clone(),
        b.clone(),
        subset.iter().map(|&z| z / asz).collect(),
    )?;
    let second = IHom::new(
        apex.clone(),
        a.clone(),
        subset.iter().map(|&z| z % asz).collect(),
    )?;
    Ok(Pullback {
        apex,
        first,
        second,
    })
}

/// A jointly injective pair `p1, p2 : R ⇉ A` whose image is an equivalence
/// relation.
#[derive(Debug, Clone)]
pub struct Congruence {
    pub rel: Arc<IAlgebra>,
    pub p1: IHom,
    pub p2: IHom,
}

impl Congruence {
    pub fn new(p1: IHom, p2: IHom) -> Result<Self> {
        if !same_algebra(&p1.source, &p2.source) || !same_algebra(&p1.target, &p2.target) {
            return Err(Error::NotACongruence("p1 and p2 are not parallel".into()));
        }
        let size = p1.target.size();
        let mut related = vec![false; size * size];
        for y in 0..p1.source.size() {
            let cell = &mut related[p1.map[y] * size + p2.map[y]];
            if *cell {
                return Err(Error::NotACongruence(format!(
                    "p1, p2 not jointly injective at ({},{})",
                    p1.map[y], p2.map[y]
                )));
            }
            *cell = true;
        }
        for x in 0..size {
            if !related[x * size + x] {
                return Err(Error::NotACongruence(format!("not reflexive at {x}")));
            }
            for y in 0..size {
                if related[x * size + y] && !related[y * size + x] {
                    return Err(Error::NotACongruence(format!("not symmetric at ({x},{y})")));
                }
                for z in 0..size {
                    if related[x * size + y] && related[y * size + z] && !related[x * size + z] {
                        return Err(Error::NotACongruence(format!(
                            "not transitive at ({x},{y},{z})"
                        )));
                    }
                }
            }
        }
        Ok(Congruence {
            rel: p1.source.clone(),
            p1,
            p2,
        })
    }

    /// The algebra the relation lives on.
    pub fn base(&self) -> &Arc<IAlgebra> {
        &self.p1.target
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.rel.size())
            .map(|y| (self.p1.map[y], self.p2.map[y]))
            .collect()
    }

    /// Classes of the relation, numbered by least member.
    pub fn classes(&self) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.base().size());
        for (x, y) in self.pairs() {
            uf.union(x, y);
        }
        uf.classes()
    }
}

/// A tuple `y` of relation elements with `p1(y), p2(y)` neighbour tuples but
/// `y ∉ R⟨n⟩`.
pub fn joint_reflection_failure(cg: &Congruence) -> Option<Tuple> {
    let a = cg.base().istructure();
    let index: HashMap<(usize, usize), usize> = cg
        .pairs()
        .into_iter()
        .enumerate()
        .map(|(y, p)| (p, y))
        .collect();
    for n in 2..=a.n_max() {
        for u in a.tuples(n) {
            for v in a.tuples(n) {
                let y: Option<Tuple> = u
                    .iter()
                    .zip(v)
                    .map(|(&x, &x2)| index.get(&(x, x2)).copied())
                    .collect();
                if let Some(y) = y {
                    if !cg.rel.istructure().contains(&y) {
                        return Some(y);
                    }
                }
            }
        }
    }
    None
}

/// A congruence is a kernel pair iff its projections jointly reflect the
/// i-structure.
pub fn is_kernel_pair(cg: &Congruence) -> bool {
    joint_reflection_failure(cg).is_none()
}

/// The kernel pair of `f` as a congruence on its domain.
pub fn kernel_pair(f: &IHom) -> Result<Congruence> {
    let pb = pullback(f, f)?;
    Congruence::new(pb.first, pb.second)
}

/// Surjective, with the codomain structure equal to the image structure.
pub fn is_regular_epi(q: &IHom) -> bool {
    if !q.is_surjective() {
        return false;
    }
    let image = q
        .source
        .istructure()
        .image_under(&q.map, q.target.carrier().to_vec());
    image.same_relations(q.target.istructure())
}

/// The congruence of a partition of `a`'s carrier. The relation carries the
/// restricted product structure unless `structure` is given, in which case
/// it must be a valid i-structure inside the restricted product structure.
pub fn congruence_from_partition(
    a: &Arc<IAlgebra>,
    class_of: &[usize],
    structure: Option<IStructure>,
) -> Result<Congruence> {
    let size = a.size();
    if class_of.len() != size {
        return Err(Error::InvalidInput("partition has the wrong length".into()));
    }
    let subset: Vec<usize> = (0..size * size)
        .filter(|&z| class_of[z / size] == class_of[z % size])
        .collect();
    let full = product(a, a)?;
    let restricted = full
        .restrict(&subset)
        .map_err(|e| Error::NotACongruence(format!("relation is not compatible: {e}")))?;
    let rel = match structure {
        None => restricted,
        Some(s) => {
            if s.size() != subset.len() || s.n_max() != a.n_max() {
                return Err(Error::InvalidInput(
                    "relation structure has the wrong shape".into(),
                ));
            }
            if !s.validate().is_valid() {
                return Err(Error::InvalidInput(
                    "relation structure is not an i-structure".into(),
                ));
            }
            let r = &restricted;
            IAlgebra::from_fn(a.clone_ref().clone(), s, |n, op, t| {
                r.act(n, op, t).unwrap_or(usize::MAX)
            })
            .map_err(|_| {
                Error::InvalidInput("relation structure exceeds the product structure".into())
            })?
            .with_carrier_names(restricted.carrier().to_vec())?
        }
    };
    let rel = Arc::new(rel);
    let p1 = IHom::new(
        rel.clone(),
        a.clone(),
        subset.iter().map(|&z| z / size).collect(),
    )?;
    let p2 = IHom::new(
        rel.clone(),
        a.clone(),
        subset.iter().map(|&z| z % size).collect(),
    )?;
    Congruence::new(p1, p2)
}

/// Least partition of the common codomain identifying `f_0(a)` with every
/// `f_i(a)` and compatible with the partial action.
pub fn generated_partition(maps: &[IHom]) -> Result<(Vec<usize>, usize)> {
    let b = &maps
        .first()
        .ok_or_else(|| Error::InvalidInput("no maps given".into()))?
        .target;
    for f in maps {
        if !same_algebra(&f.target, b) || !same_algebra(&f.source, &maps[0].source) {
            return Err(Error::InvalidInput("maps are not parallel".into()));
        }
    }
    let pairs: Vec<(usize, usize)> = maps[1..]
        .iter()
        .flat_map(|f| f.map.iter().enumerate().map(|(x, &y)| (maps[0].map[x], y)))
        .collect();
    Ok(compatible_closure(b, &pairs))
}

/// Least partition of `b`'s carrier relating each of `pairs` and
/// compatible with the partial action.
pub fn compatible_closure(b: &IAlgebra, pairs: &[(usize, usize)]) -> (Vec<usize>, usize) {
    let mut uf = UnionFind::new(b.size());
    for &(x, y) in pairs {
        uf.union(x, y);
    }
    let s = b.istructure();
    let c = b.clone_ref();
    loop {
        let mut changed = false;
        for n in 1..=b.n_max() {
            let mut buckets: HashMap<Tuple, Vec<usize>> = HashMap::new();
            for (idx, t) in s.tuples(n).iter().enumerate() {
                let key: Tuple = t.iter().map(|&x| uf.find(x)).collect();
                buckets.entry(key).or_default().push(idx);
            }
            for members in buckets.values() {
                for op in 0..c.size(n) {
                    let first = b.act_at(n, op, members[0]);
                    for &m in &members[1..] {
                        changed |= uf.union(first, b.act_at(n, op, m));
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    uf.classes()
}
