//! Initial object, coproducts, wide pushouts of reflecting legs, quotients by
//! congruences and coequalizers of reflecting maps with closed image.
//!
//! Every construction glues a disjoint union of carriers along a union-find
//! partition, gives the quotient the join of the image structures, and reads
//! each action cell off every witness tuple, failing if two disagree.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::clone::AbstractClone;
use crate::error::{Error, Result};
use crate::ialgebra::{constants_algebra, same_clone, IAlgebra, IHom};
use crate::istructure::{IStructure, Tuple};
use crate::limits::{joint_reflection_failure, Congruence};
use crate::unionfind::UnionFind;

#[derive(Debug, Clone)]
pub struct CoconeResult {
    pub apex: Arc<IAlgebra>,
    pub legs: Vec<IHom>,
    /// One line per identification made while closing the zig-zags.
    pub log: Vec<String>,
}

impl CoconeResult {
    pub fn to_json(&self, clone_json: serde_json::Value) -> serde_json::Value {
        serde_json::json!({
            "apex": self.apex.to_json(clone_json),
            "legs": self.legs.iter().map(|l| serde_json::json!({
                "map": l.map,
                "flags": l.flags,
            })).collect::<Vec<_>>(),
            "log": self.log,
        })
    }
}

/// Offsets of each part inside the disjoint union.
fn offsets(parts: &[Arc<IAlgebra>]) -> Vec<usize> {
    let mut out = Vec::with_capacity(parts.len() + 1);
    let mut acc = 0;
    for p in parts {
        out.push(acc);
        acc += p.size();
    }
    out.push(acc);
    out
}

/// Quotient of the disjoint union of `parts` by `uf`. Returns the apex and,
/// for each part, the map into it.
fn glue(
    parts: &[Arc<IAlgebra>],
    uf: &mut UnionFind,
    name: impl Fn(usize, usize) -> String,
) -> Result<(IAlgebra, Vec<Vec<usize>>)> {
    let clone = parts[0].clone_ref().clone();
    let n_max = parts[0].n_max();
    let off = offsets(parts);
    let (class_of, count) = uf.classes();
    let maps: Vec<Vec<usize>> = (0..parts.len())
        .map(|i| (off[i]..off[i + 1]).map(|g| class_of[g]).collect())
        .collect();

    let mut rep = vec![None; count];
    for (i, p) in parts.iter().enumerate() {
        for x in 0..p.size() {
            let c = class_of[off[i] + x];
            if rep[c].is_none() {
                rep[c] = Some((i, x));
            }
        }
    }
    let names: Vec<String> = rep
        .iter()
        .map(|r| {
            let (i, x) = r.expect("every class has a member");
            name(i, x)
        })
        .collect();

    let images: Vec<IStructure> = parts
        .iter()
        .zip(&maps)
        .map(|(p, m)| p.istructure().image_under(m, names.clone()))
        .collect();
    let istr = IStructure::join(names.clone(), n_max, &images);

    let mut entries: Vec<(usize, usize, Tuple, usize)> = Vec::new();
    for n in 0..=n_max {
        let dom = istr.tuples(n);
        let ops = clone.size(n);
        let mut cells: Vec<Option<(usize, usize, Tuple)>> = vec![None; ops * dom.len()];
        let mut values: Vec<usize> = vec![usize::MAX; ops * dom.len()];
        for (i, p) in parts.iter().enumerate() {
            for (xi, x) in p.istructure().tuples(n).iter().enumerate() {
                let z: Tuple = x.iter().map(|&v| maps[i][v]).collect();
                let zi = istr.index_of(&z).expect("images lie in the join");
                for op in 0..ops {
                    let v = maps[i][p.act_at(n, op, xi)];
                    let cell = op * dom.len() + zi;
                    match &cells[cell] {
                        None => {
                            cells[cell] = Some((i, xi, x.clone()));
                            values[cell] = v;
                        }
                        Some((j, _, y)) if values[cell] != v => {
                            return Err(Error::InternalInconsistency {
                                cell: format!("{} • {}", clone.name(n, op), istr.show(&z)),
                                witnesses: vec![
                                    format!(
                                        "{j}:{} ↦ {}",
                                        parts[*j].istructure().show(y),
                                        names[values[cell]]
                                    ),
                                    format!("{i}:{} ↦ {}", p.istructure().show(x), names[v]),
                                ],
                            });
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        for op in 0..ops {
            for (zi, z) in dom.iter().enumerate() {
                entries.push((n, op, z.clone(), values[op * dom.len() + zi]));
            }
        }
    }
    let apex = IAlgebra::from_entries(clone, istr, &entries)?;
    Ok((apex, maps))
}

/// Names of `parts` elements, qualified by part index when two classes
/// would otherwise share a name.
fn disjoint_names(parts: &[Arc<IAlgebra>], uf: &mut UnionFind) -> impl Fn(usize, usize) -> String {
    let off = offsets(parts);
    let (class_of, count) = uf.classes();
    let mut seen = vec![false; count];
    let mut reps = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        for x in 0..p.size() {
            let c = class_of[off[i] + x];
            if !seen[c] {
                seen[c] = true;
                reps.push(p.carrier()[x].clone());
            }
        }
    }
    let distinct = reps.iter().collect::<BTreeSet<_>>().len() == reps.len();
    let carriers: Vec<Vec<String>> = parts.iter().map(|p| p.carrier().to_vec()).collect();
    move |i, x| {
        if distinct {
            carriers[i][x].clone()
        } else {
            format!("{i}:{}", carriers[i][x])
        }
    }
}

/// The total algebra `O(0)` of constants.
pub fn initial_object(clone: &Arc<AbstractClone>) -> Result<Arc<IAlgebra>> {
    Ok(Arc::new(constants_algebra(clone.clone())?))
}

/// The unique homomorphism `σ ↦ •_0(σ)` out of the initial object.
pub fn initial_morphism(initial: &Arc<IAlgebra>, b: &Arc<IAlgebra>) -> Result<IHom> {
    if !same_clone(initial.clone_ref(), b.clone_ref()) {
        return Err(Error::DifferentClones);
    }
    let map = (0..initial.size())
        .map(|sigma| b.act(0, sigma, &[]))
        .collect::<Result<Vec<_>>>()?;
    IHom::new(initial.clone(), b.clone(), map)
}

/// Wide pushout of i-structure reflecting homomorphisms out of `source`.
///
/// With injective legs the set-level pushout always carries the glued
/// structure and the cocone legs reflect. A leg that identifies points can
/// break both: a neighbour tuple mixing identified points with points
/// outside the leg images may have no consistent action value, reported as
/// [`Error::InternalInconsistency`], or may make an output leg fail to
/// reflect, visible in its flags.
pub fn wide_pushout(source: &Arc<IAlgebra>, legs: &[IHom]) -> Result<CoconeResult> {
    if legs.is_empty() {
        return Err(Error::InvalidInput(
            "wide pushout needs at least one leg".into(),
        ));
    }
    for (i, l) in legs.iter().enumerate() {
        if !same_clone(l.source.clone_ref(), source.clone_ref()) {
            return Err(Error::DifferentClones);
        }
        if !(Arc::ptr_eq(&l.source, source) || l.source.same_as(source)) {
            return Err(Error::InvalidInput(format!(
                "leg {i} does not start at the source"
            )));
        }
        if !l.flags.reflects {
            return Err(Error::LegNotReflecting(i));
        }
    }
    let parts: Vec<Arc<IAlgebra>> = legs.iter().map(|l| l.target.clone()).collect();
    let off = offsets(&parts);
    let mut uf = UnionFind::new(off[parts.len()]);
    let mut log = Vec::new();
    for a in 0..source.size() {
        for (i, l) in legs.iter().enumerate().skip(1) {
            let (u, v) = (off[0] + legs[0].map[a], off[i] + l.map[a]);
            if uf.union(u, v) {
                log.push(format!(
                    "0:{} ~ {i}:{} via {}",
                    parts[0].carrier()[legs[0].map[a]],
                    parts[i].carrier()[l.map[a]],
                    source.carrier()[a]
                ));
            }
        }
    }
    let names = disjoint_names(&parts, &mut uf);
    let (apex, maps) = glue(&parts, &mut uf, names)?;
    let apex = Arc::new(apex);
    let legs = parts
        .iter()
        .zip(maps)
        .map(|(p, m)| IHom::new(p.clone(), apex.clone(), m))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoconeResult { apex, legs, log })
}

/// Coproduct: the wide pushout of the initial morphisms into each factor.
pub fn coproduct(clone: &Arc<AbstractClone>, factors: &[Arc<IAlgebra>]) -> Result<CoconeResult> {
    let init = initial_object(clone)?;
    if factors.is_empty() {
        return Ok(CoconeResult {
            apex: init,
            legs: Vec::new(),
            log: Vec::new(),
        });
    }
    let legs = factors
        .iter()
        .map(|f| initial_morphism(&init, f))
        .collect::<Result<Vec<_>>>()?;
    wide_pushout(&init, &legs)
}

/// Quotient by a congruence whose projections jointly reflect the
/// i-structure; the apex carries the image structure.
pub fn coequalizer_congruence(cg: &Congruence) -> Result<CoconeResult> {
    if let Some(w) = joint_reflection_failure(cg) {
        return Err(Error::JointReflectionFailure(w));
    }
    let a = cg.base().clone();
    let mut uf = UnionFind::new(a.size());
    let mut log = Vec::new();
    for (x, y) in cg.pairs() {
        if uf.union(x, y) {
            log.push(format!("{} ~ {}", a.carrier()[x], a.carrier()[y]));
        }
    }
    let names: Vec<String> = a.carrier().iter().map(|s| format!("[{s}]")).collect();
    let parts = [a.clone()];
    let (apex, mut maps) = glue(&parts, &mut uf, |_, x| names[x].clone())?;
    let apex = Arc::new(apex);
    let q = IHom::new(a, apex.clone(), maps.remove(0))?;
    Ok(CoconeResult {
        apex,
        legs: vec![q],
        log,
    })
}

/// Coequalizer of parallel reflecting maps with infinitesimally closed
/// image, computed as the quotient of sets with the image structure.
pub fn coequalizer_reflecting(maps: &[IHom]) -> Result<CoconeResult> {
    let first = maps
        .first()
        .ok_or_else(|| Error::InvalidInput("no maps given".into()))?;
    for (i, f) in maps.iter().enumerate() {
        if !same_clone(f.source.clone_ref(), first.source.clone_ref()) {
            return Err(Error::DifferentClones);
        }
        let parallel = (Arc::ptr_eq(&f.source, &first.source) || f.source.same_as(&first.source))
            && (Arc::ptr_eq(&f.target, &first.target) || f.target.same_as(&first.target));
        if !parallel {
            return Err(Error::InvalidInput(format!(
                "map {i} is not parallel to map 0"
            )));
        }
        if !f.flags.reflects {
            return Err(Error::LegNotReflecting(i));
        }
        if !f.flags.closed_image {
            return Err(Error::ImageNotClosed(i));
        }
    }
    let b = first.target.clone();
    let mut uf = UnionFind::new(b.size());
    let mut log = Vec::new();
    for (i, f) in maps.iter().enumerate().skip(1) {
        for a in 0..first.source.size() {
            if uf.union(first.map[a], f.map[a]) {
                log.push(format!(
                    "{} ~ {} via {} under map {i}",
                    b.carrier()[first.map[a]],
                    b.carrier()[f.map[a]],
                    first.source.carrier()[a]
                ));
            }
        }
    }
    let names: Vec<String> = b.carrier().iter().map(|s| format!("[{s}]")).collect();
    let parts = [b.clone()];
    let (apex, mut m) = glue(&parts, &mut uf, |_, x| names[x].clone())?;
    let apex = Arc::new(apex);
    let q = IHom::new(b, apex.clone(), m.remove(0))?;
    Ok(CoconeResult {
        apex,
        legs: vec![q],
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::ialgebra::validate_ialgebra;
    use crate::limits::{congruence_from_partition, generated_partition, kernel_pair};

    fn z2_over_exp2() -> Arc<IAlgebra> {
        Arc::new(gallery::abelian_total(2, 3).unwrap())
    }

    #[test]
    fn pushout_of_identities_is_the_source() {
        let a = Arc::new(gallery::affine_nil_square(4, 1, 3).unwrap());
        let id = IHom::identity(a.clone());
        let r = wide_pushout(&a, &[id.clone(), id]).unwrap();
        assert!(r.apex.same_as(&a));
        assert!(r.legs.iter().all(|l| l.flags.reflects));
    }

    #[test]
    fn pushout_over_empty_of_two_cliques() {
        let line = gallery::affine_nil_square(4, 1, 3).unwrap();
        let v1 = Arc::new(line.restrict(&[0, 2]).unwrap());
        let v2 = Arc::new(line.restrict(&[1, 3]).unwrap());
        let empty = Arc::new(line.restrict(&[]).unwrap());
        let l1 = IHom::new(empty.clone(), v1, vec![]).unwrap();
        let l2 = IHom::new(empty.clone(), v2, vec![]).unwrap();
        let r = wide_pushout(&empty, &[l1, l2]).unwrap();
        assert_eq!(r.apex.size(), 4);
        assert_eq!(r.apex.istructure().tuples(2).len(), 8);
        assert!(validate_ialgebra(&r.apex).is_valid());
    }

    #[test]
    fn collapsing_leg_can_leave_no_consistent_action() {
        let z4 = Arc::new(gallery::affine_total(4, 3).unwrap());
        let evens = Arc::new(z4.restrict(&[0, 2]).unwrap());
        let point = Arc::new(crate::corpus::terminal(z4.clone_ref()).unwrap());
        for a in [&z4, &evens, &point] {
            assert!(validate_ialgebra(a).is_valid());
        }
        let incl = IHom::new(evens.clone(), z4, vec![0, 2]).unwrap();
        let collapse = IHom::new(evens.clone(), point, vec![0, 0]).unwrap();
        assert!(incl.flags.reflects && collapse.flags.reflects);
        // (1,1,3) sends (0,0,1) to 3 and (0,2,1) to 1, yet 0 ~ 2
        let err = wide_pushout(&evens, &[incl, collapse]).unwrap_err();
        assert!(matches!(err, Error::InternalInconsistency { .. }), "{err}");
    }

    #[test]
    fn collapsing_leg_can_make_an_output_leg_non_reflecting() {
        let c = Arc::new(gallery::pointed_clone(3).unwrap());
        let s = Arc::new(crate::corpus::pointed_iset(&c, 2, 0, &[]).unwrap());
        let b = Arc::new(crate::corpus::pointed_iset(&c, 3, 0, &[(0, 1)]).unwrap());
        let point = Arc::new(crate::corpus::terminal(&c).unwrap());
        let f = IHom::new(s.clone(), b, vec![0, 1]).unwrap();
        let g = IHom::new(s.clone(), point, vec![0, 0]).unwrap();
        assert!(f.flags.reflects && g.flags.reflects);
        let r = wide_pushout(&s, &[f, g]).unwrap();
        assert!(validate_ialgebra(&r.apex).is_valid());
        assert_eq!(r.apex.size(), 2);
        assert!(!r.legs[0].flags.reflects);
        assert!(r.legs[1].flags.reflects);
    }

    #[test]
    fn wedge_of_two_z2() {
        let z2 = z2_over_exp2();
        let r = coproduct(z2.clone_ref(), &[z2.clone(), z2.clone()]).unwrap();
        assert_eq!(r.apex.size(), 3);
        assert_eq!(r.apex.carrier(), ["0:0", "0:1", "1:1"]);
        assert!(r.legs.iter().all(|l| l.flags.reflects));
        assert!(validate_ialgebra(&r.apex).is_valid());
    }

    #[test]
    fn coproduct_of_affine_lines_is_disjoint() {
        let l = Arc::new(gallery::affine_nil_square(3, 1, 3).unwrap());
        let r = coproduct(l.clone_ref(), &[l.clone(), l.clone()]).unwrap();
        assert_eq!(r.apex.size(), 6);
        let single = coproduct(l.clone_ref(), &[l.clone()]).unwrap();
        assert!(single.apex.same_as(&l));
    }

    #[test]
    fn initial_morphisms() {
        let z2 = z2_over_exp2();
        let init = initial_object(z2.clone_ref()).unwrap();
        assert_eq!(init.size(), 1);
        assert_eq!(initial_morphism(&init, &z2).unwrap().map, vec![0]);
        let aff = Arc::new(gallery::affine_total(3, 3).unwrap());
        let init = initial_object(aff.clone_ref()).unwrap();
        assert_eq!(init.size(), 0);
        assert!(initial_morphism(&init, &aff).unwrap().map.is_empty());
    }

    #[test]
    fn non_reflecting_leg_is_rejected() {
        let c = gallery::affine_clone_zmod(3, 3).unwrap();
        let d = Arc::new(gallery::discrete_affine(c, crate::istructure::index_names(3)).unwrap());
        let t = Arc::new(gallery::affine_total(3, 3).unwrap());
        let good = IHom::identity(d.clone());
        let bad = IHom::new(d.clone(), t, vec![0, 1, 2]).unwrap();
        assert_eq!(
            wide_pushout(&d, &[good, bad]).unwrap_err(),
            Error::LegNotReflecting(1)
        );
    }

    #[test]
    fn quotient_of_z4_by_two() {
        let z4 = Arc::new(gallery::abelian_total(4, 3).unwrap());
        let cg = congruence_from_partition(&z4, &[0, 1, 0, 1], None).unwrap();
        let r = coequalizer_congruence(&cg).unwrap();
        assert_eq!(r.apex.size(), 2);
        assert_eq!(r.apex.carrier(), ["[0]", "[1]"]);
        assert_eq!(r.apex.istructure().tuples(3).len(), 8);
        assert!(r.legs[0].flags.reflects);
        let kp = kernel_pair(&r.legs[0]).unwrap();
        assert_eq!(kp.pairs(), cg.pairs());
    }

    #[test]
    fn diagonal_quotient_is_the_algebra() {
        let a = Arc::new(gallery::affine_nil_square(4, 1, 3).unwrap());
        let cg = congruence_from_partition(&a, &[0, 1, 2, 3], None).unwrap();
        let r = coequalizer_congruence(&cg).unwrap();
        assert_eq!(r.legs[0].map, vec![0, 1, 2, 3]);
        assert!(r.apex.istructure().same_relations(a.istructure()));
    }

    #[test]
    fn closed_image_pathway() {
        let a = Arc::new(gallery::affine_nil_square(4, 1, 3).unwrap());
        let v = Arc::new(a.restrict(&[0, 2]).unwrap());
        let inc = IHom::new(v.clone(), a.clone(), vec![0, 2]).unwrap();
        let swap = IHom::new(v.clone(), a.clone(), vec![2, 0]).unwrap();
        assert!(inc.flags.closed_image && inc.flags.reflects);
        let r = coequalizer_reflecting(&[inc.clone(), swap.clone()]).unwrap();
        assert_eq!(r.apex.size(), 3);
        let (classes, count) = generated_partition(&[inc, swap]).unwrap();
        assert_eq!(count, 3);
        assert_eq!(classes, r.legs[0].map);
    }

    #[test]
    fn closed_image_pathway_rejects_open_images() {
        let z4 = Arc::new(gallery::abelian_total(4, 3).unwrap());
        let zero = IHom::new(z4.clone(), z4.clone(), vec![0; 4]).unwrap();
        let dbl = IHom::new(z4.clone(), z4.clone(), vec![0, 2, 0, 2]).unwrap();
        assert_eq!(
            coequalizer_reflecting(&[zero, dbl]).unwrap_err(),
            Error::ImageNotClosed(0)
        );
    }

    #[test]
    fn closed_images_do_not_make_set_classes_a_congruence() {
        let z3 = Arc::new(gallery::abelian_total(3, 3).unwrap());
        let id = IHom::identity(z3.clone());
        let neg = IHom::new(z3.clone(), z3.clone(), vec![0, 2, 1]).unwrap();
        assert!(neg.flags.reflects && neg.flags.closed_image);
        assert!(matches!(
            coequalizer_reflecting(&[id.clone(), neg.clone()]).unwrap_err(),
            Error::InternalInconsistency { .. }
        ));
        let (_, count) = generated_partition(&[id, neg]).unwrap();
        assert_eq!(count, 1);
    }
}
