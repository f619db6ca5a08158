//! Brute-force check of the universal property of a computed cocone.
//!
//! For each test target `W` with a cocone `c_i`, every function
//! `u : apex → W` with `u ∘ leg_i = c_i` is tried and counted if it is an
//! i-O-homomorphism. Values of `u` on leg images are forced, so the search
//! ranges over the free choices only; functions violating a forced value
//! can never commute and are skipped without being built.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::budget::SearchBudget;
use crate::colimits::CoconeResult;
use crate::error::{Error, Result};
use crate::ialgebra::{hom_flags, IAlgebra, IHom};

/// The diagram a cocone was computed from.
#[derive(Debug, Clone)]
pub enum Diagram {
    /// Legs out of a common source; cocone maps start at the leg targets.
    Span {
        source: Arc<IAlgebra>,
        legs: Vec<IHom>,
    },
    /// Parallel maps `A ⇉ B`; the cocone is one map out of `B`.
    Parallel { maps: Vec<IHom> },
}

impl Diagram {
    /// Objects receiving cocone maps, in leg order.
    fn vertices(&self) -> Vec<Arc<IAlgebra>> {
        match self {
            Diagram::Span { legs, .. } => legs.iter().map(|l| l.target.clone()).collect(),
            Diagram::Parallel { maps } => maps
                .first()
                .map(|m| vec![m.target.clone()])
                .unwrap_or_default(),
        }
    }

    fn commutes(&self, cocone: &[Vec<usize>]) -> bool {
        match self {
            Diagram::Span { source, legs } => (0..source.size()).all(|a| {
                legs.iter()
                    .zip(cocone)
                    .all(|(l, c)| c[l.map[a]] == cocone[0][legs[0].map[a]])
            }),
            Diagram::Parallel { maps } => match maps.first() {
                None => true,
                Some(f) => maps.iter().all(|g| {
                    (0..f.source.size()).all(|a| cocone[0][f.map[a]] == cocone[0][g.map[a]])
                }),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct TestTarget {
    pub algebra: Arc<IAlgebra>,
    /// One map per diagram vertex.
    pub cocone: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetOutcome {
    pub target_size: usize,
    pub candidates: u128,
    pub mediating: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniversalReport {
    pub targets: Vec<TargetOutcome>,
    pub passed: bool,
}

/// Counts mediating homomorphisms into every test target. Passes iff each
/// count is exactly one.
pub fn verify_universal_property(
    result: &CoconeResult,
    diagram: &Diagram,
    targets: &[TestTarget],
    budget: &SearchBudget,
) -> Result<UniversalReport> {
    let vertices = diagram.vertices();
    if vertices.len() != result.legs.len() {
        return Err(Error::InvalidInput(
            "cocone and diagram have different legs".into(),
        ));
    }
    let apex = &result.apex;
    let mut outcomes = Vec::with_capacity(targets.len());
    for (ti, t) in targets.iter().enumerate() {
        let w = &t.algebra;
        if t.cocone.len() != vertices.len() {
            return Err(Error::InvalidInput(format!(
                "test target {ti} has the wrong number of maps"
            )));
        }
        for (v, c) in vertices.iter().zip(&t.cocone) {
            IHom::new(v.clone(), w.clone(), c.clone())?;
        }
        if !diagram.commutes(&t.cocone) {
            return Err(Error::InvalidInput(format!(
                "test cocone {ti} does not commute"
            )));
        }
        let mut forced: Vec<Option<usize>> = vec![None; apex.size()];
        let mut consistent = true;
        for (leg, c) in result.legs.iter().zip(&t.cocone) {
            for (x, &z) in leg.map.iter().enumerate() {
                match forced[z] {
                    None => forced[z] = Some(c[x]),
                    Some(v) if v != c[x] => consistent = false,
                    Some(_) => {}
                }
            }
        }
        let free: Vec<usize> = (0..apex.size()).filter(|&z| forced[z].is_none()).collect();
        let candidates = if consistent {
            (w.size() as u128).saturating_pow(free.len() as u32)
        } else {
            0
        };
        budget.check_functions("mediating map candidates", candidates)?;
        let mut mediating = 0;
        if consistent && (free.is_empty() || w.size() > 0) {
            let mut u: Vec<usize> = forced.iter().map(|v| v.unwrap_or(0)).collect();
            let mut digits = vec![0usize; free.len()];
            loop {
                for (&z, &d) in free.iter().zip(&digits) {
                    u[z] = d;
                }
                let (flags, _) = hom_flags(apex, w, &u)?;
                if flags.i_morphism && flags.equivariant {
                    mediating += 1;
                }
                if !crate::tuples::advance(&mut digits, w.size()) {
                    break;
                }
            }
        }
        outcomes.push(TargetOutcome {
            target_size: w.size(),
            candidates,
            mediating,
        });
    }
    let passed = outcomes.iter().all(|o| o.mediating == 1);
    Ok(UniversalReport {
        targets: outcomes,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colimits::{coproduct, initial_morphism, initial_object};
    use crate::gallery;

    fn line3() -> Arc<IAlgebra> {
        Arc::new(gallery::affine_nil_square(3, 1, 3).unwrap())
    }

    #[test]
    fn fold_is_the_only_mediating_map() {
        let l = line3();
        let r = coproduct(l.clone_ref(), &[l.clone(), l.clone()]).unwrap();
        let init = initial_object(l.clone_ref()).unwrap();
        let legs = vec![initial_morphism(&init, &l).unwrap(); 2];
        let d = Diagram::Span { source: init, legs };
        let target = TestTarget {
            algebra: Arc::new(gallery::affine_total(3, 3).unwrap()),
            cocone: vec![vec![0, 1, 2]; 2],
        };
        let rep = verify_universal_property(&r, &d, &[target], &SearchBudget::default()).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.targets[0].mediating, 1);
    }

    #[test]
    fn oversized_apex_fails() {
        let l = line3();
        let big = coproduct(l.clone_ref(), &[l.clone(), l.clone(), l.clone()]).unwrap();
        let fake = CoconeResult {
            apex: big.apex.clone(),
            legs: big.legs[..2].to_vec(),
            log: Vec::new(),
        };
        let init = initial_object(l.clone_ref()).unwrap();
        let legs = vec![initial_morphism(&init, &l).unwrap(); 2];
        let d = Diagram::Span { source: init, legs };
        let target = TestTarget {
            algebra: Arc::new(gallery::affine_total(3, 3).unwrap()),
            cocone: vec![vec![0, 1, 2]; 2],
        };
        let rep =
            verify_universal_property(&fake, &d, &[target], &SearchBudget::default()).unwrap();
        assert!(!rep.passed);
        assert!(rep.targets[0].mediating >= 2);
    }

    #[test]
    fn wedge_into_z2() {
        let z2 = Arc::new(gallery::abelian_total(2, 3).unwrap());
        let r = coproduct(z2.clone_ref(), &[z2.clone(), z2.clone()]).unwrap();
        let init = initial_object(z2.clone_ref()).unwrap();
        let legs = vec![initial_morphism(&init, &z2).unwrap(); 2];
        let d = Diagram::Span { source: init, legs };
        let target = TestTarget {
            algebra: z2.clone(),
            cocone: vec![vec![0, 1]; 2],
        };
        let rep = verify_universal_property(&r, &d, &[target], &SearchBudget::default()).unwrap();
        assert!(rep.passed);
    }

    #[test]
    fn non_commuting_test_cocone_is_rejected() {
        let z2 = Arc::new(gallery::abelian_total(2, 3).unwrap());
        let id = IHom::identity(z2.clone());
        let zero = IHom::new(z2.clone(), z2.clone(), vec![0, 0]).unwrap();
        let d = Diagram::Parallel {
            maps: vec![id, zero],
        };
        let r = crate::colimits::coequalizer_congruence(
            &crate::limits::congruence_from_partition(&z2, &[0, 0], None).unwrap(),
        )
        .unwrap();
        let bad = TestTarget {
            algebra: z2.clone(),
            cocone: vec![vec![0, 1]],
        };
        assert!(verify_universal_property(&r, &d, &[bad], &SearchBudget::default()).is_err());
        let good = TestTarget {
            algebra: z2,
            cocone: vec![vec![0, 0]],
        };
        assert!(
            verify_universal_property(&r, &d, &[good], &SearchBudget::default())
                .unwrap()
                .passed
        );
    }
}
