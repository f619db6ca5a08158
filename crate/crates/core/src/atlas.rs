//! Infinitesimal atlases and their gluing by iterated binary pushouts.
//!
//! The union of charts `V_1 … V_k` is extended by a further chart `V` as
//! the pushout over `(V_1 ∪ … ∪ V_k) ∩ V`, itself glued recursively from
//! the meets `V_i ∩ V`. The next chart is chosen greedily among those whose
//! intersection includes reflectingly into both sides.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::colimits::wide_pushout;
use crate::error::{Error, Result};
use crate::ialgebra::{same_clone, IAlgebra, IHom};

#[derive(Debug, Clone)]
pub struct Chart {
    /// Ascending indices into the ambient set.
    pub subset: Vec<usize>,
    /// Lift of the subset, elements in subset order.
    pub algebra: Arc<IAlgebra>,
}

#[derive(Debug, Clone)]
pub struct Atlas {
    ambient: Vec<String>,
    charts: Vec<Chart>,
}

fn show(ambient: &[String], s: &[usize]) -> String {
    let parts: Vec<&str> = s.iter().map(|&i| ambient[i].as_str()).collect();
    format!("{{{}}}", parts.join(","))
}

fn meet(a: &[usize], b: &[usize]) -> Vec<usize> {
    let b: BTreeSet<usize> = b.iter().copied().collect();
    a.iter().copied().filter(|x| b.contains(x)).collect()
}

/// Positions of `small` inside `big`, both ascending.
fn positions(small: &[usize], big: &[usize]) -> Option<Vec<usize>> {
    small.iter().map(|x| big.binary_search(x).ok()).collect()
}

impl Atlas {
    /// Checks meet-stability, reflecting inclusions and covering.
    pub fn new(ambient: Vec<String>, charts: Vec<Chart>) -> Result<Self> {
        let first = charts
            .first()
            .ok_or_else(|| Error::AtlasInvalid("no charts".into()))?;
        let mut seen = BTreeSet::new();
        for c in &charts {
            if !c.subset.windows(2).all(|w| w[0] < w[1])
                || c.subset.iter().any(|&x| x >= ambient.len())
            {
                return Err(Error::InvalidInput(format!(
                    "chart subset {:?} is not an ascending subset of the ambient set",
                    c.subset
                )));
            }
            if c.algebra.size() != c.subset.len() {
                return Err(Error::InvalidInput(format!(
                    "chart {} has a lift of the wrong size",
                    show(&ambient, &c.subset)
                )));
            }
            if !same_clone(c.algebra.clone_ref(), first.algebra.clone_ref()) {
                return Err(Error::DifferentClones);
            }
            if !seen.insert(c.subset.clone()) {
                return Err(Error::AtlasInvalid(format!(
                    "chart {} listed twice",
                    show(&ambient, &c.subset)
                )));
            }
        }
        let charts: Vec<Chart> = charts
            .into_iter()
            .map(|c| {
                let names = c.subset.iter().map(|&i| ambient[i].clone()).collect();
                Ok(Chart {
                    algebra: Arc::new((*c.algebra).clone().with_carrier_names(names)?),
                    subset: c.subset,
                })
            })
            .collect::<Result<_>>()?;
        for a in &charts {
            for b in &charts {
                let m = meet(&a.subset, &b.subset);
                if !seen.contains(&m) {
                    return Err(Error::AtlasInvalid(format!(
                        "missing meet {} of {} and {}",
                        show(&ambient, &m),
                        show(&ambient, &a.subset),
                        show(&ambient, &b.subset)
                    )));
                }
                if let Some(pos) = positions(&a.subset, &b.subset) {
                    let ok = IHom::new(a.algebra.clone(), b.algebra.clone(), pos)
                        .map(|h| h.flags.reflects)
                        .unwrap_or(false);
                    if !ok {
                        return Err(Error::AtlasInvalid(format!(
                            "inclusion {} ⊆ {} is not a reflecting homomorphism",
                            show(&ambient, &a.subset),
                            show(&ambient, &b.subset)
                        )));
                    }
                }
            }
        }
        let covered: BTreeSet<usize> = charts
            .iter()
            .flat_map(|c| c.subset.iter().copied())
            .collect();
        let missed: Vec<usize> = (0..ambient.len())
            .filter(|x| !covered.contains(x))
            .collect();
        if !missed.is_empty() {
            return Err(Error::AtlasInvalid(format!(
                "not covering: {} missed",
                show(&ambient, &missed)
            )));
        }
        Ok(Atlas { ambient, charts })
    }

    pub fn ambient(&self) -> &[String] {
        &self.ambient
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    fn chart_of(&self, subset: &[usize]) -> usize {
        self.charts
            .iter()
            .position(|c| c.subset == subset)
            .expect("meets were checked at construction")
    }

    /// Union of the charts at `family` (closed under meets), as a subset and
    /// a lift in subset order.
    fn glue_family(&self, family: &[usize]) -> Result<(Vec<usize>, Arc<IAlgebra>)> {
        let mut order: Vec<usize> = family.to_vec();
        order.sort_by_key(|&i| (std::cmp::Reverse(self.charts[i].subset.len()), i));
        order.dedup();
        let start = order.remove(0);
        let mut used = vec![start];
        let mut union = self.charts[start].subset.clone();
        let mut alg = self.charts[start].algebra.clone();
        while !order.is_empty() {
            let mut step = None;
            for (pos, &v) in order.iter().enumerate() {
                let chart = &self.charts[v];
                let mut pieces: Vec<usize> = used
                    .iter()
                    .map(|&u| self.chart_of(&meet(&self.charts[u].subset, &chart.subset)))
                    .collect();
                pieces.sort_unstable();
                pieces.dedup();
                let (isub, ialg) = self.glue_family(&pieces)?;
                let into_union = positions(&isub, &union).expect("meets lie in the union");
                let into_chart = positions(&isub, &chart.subset).expect("meets lie in the chart");
                let l1 = IHom::new(ialg.clone(), alg.clone(), into_union);
                let l2 = IHom::new(ialg.clone(), chart.algebra.clone(), into_chart);
                if let (Ok(l1), Ok(l2)) = (l1, l2) {
                    if l1.flags.reflects && l2.flags.reflects {
                        step = Some((pos, ialg, l1, l2));
                        break;
                    }
                }
            }
            let (pos, ialg, l1, l2) = step.ok_or_else(|| {
                Error::AtlasInvalid(
                    "no chart extends the union along a reflecting intersection".into(),
                )
            })?;
            let v = order.remove(pos);
            let chart = &self.charts[v];
            let r = wide_pushout(&ialg, &[l1, l2])?;
            let mut point = vec![usize::MAX; r.apex.size()];
            for (src, leg) in [(&union, &r.legs[0]), (&chart.subset, &r.legs[1])] {
                for (x, &z) in leg.map.iter().enumerate() {
                    if point[z] != usize::MAX && point[z] != src[x] {
                        return Err(Error::InternalInconsistency {
                            cell: format!("glued point {}", r.apex.carrier()[z]),
                            witnesses: vec![
                                self.ambient[point[z]].clone(),
                                self.ambient[src[x]].clone(),
                            ],
                        });
                    }
                    point[z] = src[x];
                }
            }
            let mut new_union = point.clone();
            new_union.sort_unstable();
            let new_index: Vec<usize> = point
                .iter()
                .map(|p| new_union.binary_search(p).expect("present"))
                .collect();
            let names = new_union.iter().map(|&i| self.ambient[i].clone()).collect();
            alg = Arc::new(r.apex.relabel(&new_index, names)?);
            union = new_union;
            used.push(v);
        }
        Ok((union, alg))
    }
}

/// The glued i-algebra on the ambient set, in ambient order.
pub fn glue_atlas(at: &Atlas) -> Result<IAlgebra> {
    let all: Vec<usize> = (0..at.charts.len()).collect();
    let (union, alg) = at.glue_family(&all)?;
    if union.len() != at.ambient.len() {
        return Err(Error::AtlasInvalid(
            "glued union does not cover the ambient set".into(),
        ));
    }
    Ok((*alg).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::ialgebra::validate_ialgebra;
    use crate::istructure::index_names;

    fn z4_atlas(subsets: &[&[usize]]) -> Result<Atlas> {
        let line = gallery::affine_nil_square(4, 1, 3).unwrap();
        let charts = subsets
            .iter()
            .map(|s| Chart {
                subset: s.to_vec(),
                algebra: Arc::new(line.restrict(s).unwrap()),
            })
            .collect();
        Atlas::new(index_names(4), charts)
    }

    #[test]
    fn two_cliques_glue_to_the_nil_square_line() {
        let at = z4_atlas(&[&[], &[0, 2], &[1, 3]]).unwrap();
        let g = glue_atlas(&at).unwrap();
        assert!(g.same_as(&gallery::affine_nil_square(4, 1, 3).unwrap()));
    }

    #[test]
    fn single_chart() {
        let at = z4_atlas(&[&[0, 1, 2, 3]]).unwrap();
        let g = glue_atlas(&at).unwrap();
        assert!(g.same_as(&gallery::affine_nil_square(4, 1, 3).unwrap()));
    }

    fn chain() -> Atlas {
        let c = gallery::affine_clone_zmod(3, 3).unwrap();
        let names: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let chart = |s: &[usize]| Chart {
            subset: s.to_vec(),
            algebra: Arc::new(
                gallery::discrete_affine(c.clone(), s.iter().map(|&i| names[i].clone()).collect())
                    .unwrap(),
            ),
        };
        Atlas::new(
            names.clone(),
            vec![
                chart(&[]),
                chart(&[1]),
                chart(&[2]),
                chart(&[0, 1]),
                chart(&[1, 2]),
                chart(&[2, 3]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn three_chart_chain_has_four_points() {
        let at = chain();
        let g = glue_atlas(&at).unwrap();
        assert_eq!(g.carrier(), ["a", "b", "c", "d"]);
        assert!(validate_ialgebra(&g).is_valid());
        let empty = at.charts()[0].algebra.clone();
        let legs: Vec<IHom> = at.charts()[3..]
            .iter()
            .map(|c| IHom::new(empty.clone(), c.algebra.clone(), vec![]).unwrap())
            .collect();
        assert_eq!(wide_pushout(&empty, &legs).unwrap().apex.size(), 6);
    }

    #[test]
    fn invalid_atlases() {
        assert!(matches!(
            z4_atlas(&[&[0, 2], &[1, 3]]),
            Err(Error::AtlasInvalid(_))
        ));
        assert!(matches!(
            z4_atlas(&[&[], &[0, 2]]),
            Err(Error::AtlasInvalid(_))
        ));
        let line = gallery::affine_nil_square(4, 1, 3).unwrap();
        let disc = gallery::linear_algebra(
            line.clone_ref().clone(),
            4,
            1,
            crate::istructure::IStructure::discrete(index_names(4), 3),
        )
        .unwrap();
        let bad = Atlas::new(
            index_names(4),
            vec![
                Chart {
                    subset: vec![0, 1, 2, 3],
                    algebra: Arc::new(line),
                },
                Chart {
                    subset: vec![0, 2],
                    algebra: Arc::new(disc.restrict(&[0, 2]).unwrap()),
                },
            ],
        );
        assert!(matches!(bad, Err(Error::AtlasInvalid(_))));
    }
}
