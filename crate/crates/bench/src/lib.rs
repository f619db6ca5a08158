//! Inputs shared by the criterion benches in `benches/`.

use std::sync::Arc;

use infinialg_core::atlas::{Atlas, Chart};
use infinialg_core::colimits::initial_object;
use infinialg_core::gallery::{abelian_total, affine_nil_square, discrete_affine};
use infinialg_core::limits::congruence_from_partition;
use infinialg_core::{Congruence, IAlgebra, IHom, Result};

/// `k` copies of total `Z/2` glued at zero: the span out of the initial
/// algebra.
pub fn wedge(k: usize, n_max: usize) -> Result<(Arc<IAlgebra>, Vec<IHom>)> {
    let z2 = Arc::new(abelian_total(2, n_max)?);
    let init = initial_object(z2.clone_ref())?;
    let legs = (0..k)
        .map(|_| IHom::new(init.clone(), z2.clone(), vec![0]))
        .collect::<Result<Vec<_>>>()?;
    Ok((init, legs))
}

/// The two cliques `{0,2}` and `{1,3}` of the nil-square line over `Z/4`,
/// with the empty chart as their meet.
pub fn clique_atlas(n_max: usize) -> Result<Atlas> {
    let line = affine_nil_square(4, 1, n_max)?;
    let charts = [vec![], vec![0, 2], vec![1, 3]]
        .into_iter()
        .map(|subset| {
            Ok(Chart {
                algebra: Arc::new(line.restrict(&subset)?),
                subset,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Atlas::new(line.carrier().to_vec(), charts)
}

/// A chain of `n` discrete affine points over `Z/3`, consecutive pairs
/// overlapping in one point.
pub fn chain_atlas(n: usize, n_max: usize) -> Result<Atlas> {
    let clone = infinialg_core::gallery::affine_clone_zmod(3, n_max)?;
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let chart = |subset: Vec<usize>| -> Result<Chart> {
        let carrier = subset.iter().map(|&i| names[i].clone()).collect();
        Ok(Chart {
            algebra: Arc::new(discrete_affine(clone.clone(), carrier)?),
            subset,
        })
    };
    let mut charts = vec![chart(vec![])?];
    for i in 0..n {
        charts.push(chart(vec![i])?);
    }
    for i in 0..n.saturating_sub(1) {
        charts.push(chart(vec![i, i + 1])?);
    }
    Atlas::new(names, charts)
}

/// Congruence mod 2 on total `Z/4`.
pub fn mod_two(n_max: usize) -> Result<Congruence> {
    let z4 = Arc::new(abelian_total(4, n_max)?);
    congruence_from_partition(&z4, &[0, 1, 0, 1], None)
}
