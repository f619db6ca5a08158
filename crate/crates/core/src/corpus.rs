//! Seeded random instances for the property and acceptance tests.
//!
//! Every generator draws from its own ChaCha stream of the seed in
//! `INFINIALG_SEED` (decimal or `0x` hex), so instances are reproducible and
//! independent of the order in which tests run.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clone::AbstractClone;
use crate::colimits::{coequalizer_congruence, initial_morphism, initial_object};
use crate::error::{Error, Result};
use crate::gallery;
use crate::ialgebra::{hom_flags, IAlgebra, IHom};
use crate::istructure::{index_names, IStructure};
use crate::limits::{compatible_closure, congruence_from_partition, Congruence};
use crate::tuples;
use crate::universal::TestTarget;

pub const SEED_VAR: &str = "INFINIALG_SEED";
pub const DEFAULT_SEED: u64 = 0x1f1a_2026;

/// The corpus seed; unparsable values fall back to the default.
pub fn seed() -> u64 {
    std::env::var(SEED_VAR)
        .ok()
        .and_then(|s| {
            let s = s.trim();
            match s.strip_prefix("0x") {
                Some(hex) => u64::from_str_radix(hex, 16).ok(),
                None => s.parse().ok(),
            }
        })
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed());
    r.set_stream(stream);
    r
}

/// A pointed i-set: `e` acts as `base`, projections as projections. The
/// i-structure is generated by `pairs` together with `base` related to
/// every point.
pub fn pointed_iset(
    clone: &Arc<AbstractClone>,
    size: usize,
    base: usize,
    pairs: &[(usize, usize)],
) -> Result<IAlgebra> {
    if base >= size {
        return Err(Error::InvalidInput("base point outside the carrier".into()));
    }
    let mut rel: Vec<(usize, usize)> = (0..size).map(|x| (x, x)).collect();
    for x in 0..size {
        rel.push((base, x));
        rel.push((x, base));
    }
    for &(x, y) in pairs {
        rel.push((x, y));
        rel.push((y, x));
    }
    let istr = IStructure::generate_from_binary(index_names(size), clone.n_max(), &rel)?;
    let c = clone.clone();
    IAlgebra::from_fn(clone.clone(), istr, move |n, op, t| {
        match c.name(n, op).strip_prefix('x') {
            Some(j) => t[j.parse::<usize>().expect("projection name") - 1],
            None => base,
        }
    })
}

/// The one-point algebra with every operation defined.
pub fn terminal(clone: &Arc<AbstractClone>) -> Result<IAlgebra> {
    IAlgebra::from_fn(
        clone.clone(),
        IStructure::indiscrete(vec!["*".into()], clone.n_max()),
        |_, _, _| 0,
    )
}

/// All homomorphisms `s → t`, optionally only those reflecting the
/// i-structure.
pub fn homs(s: &IAlgebra, t: &IAlgebra, reflecting: bool) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut err = None;
    tuples::for_each(t.size(), s.size(), |m| {
        if err.is_some() {
            return;
        }
        match hom_flags(s, t, m) {
            Ok((f, _)) if f.i_morphism && f.equivariant && (f.reflects || !reflecting) => {
                out.push(m.to_vec())
            }
            Ok(_) => {}
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn random_pairs(rng: &mut ChaCha8Rng, size: usize, count: usize) -> Vec<(usize, usize)> {
    if size == 0 {
        return Vec::new();
    }
    (0..count)
        .map(|_| (rng.gen_range(0..size), rng.gen_range(0..size)))
        .collect()
}

fn random_pointed(
    rng: &mut ChaCha8Rng,
    clone: &Arc<AbstractClone>,
    size: usize,
) -> Result<IAlgebra> {
    let base = rng.gen_range(0..size);
    let count = rng.gen_range(0..=size);
    let pairs = random_pairs(rng, size, count);
    pointed_iset(clone, size, base, &pairs)
}

fn random_permutation(rng: &mut ChaCha8Rng, size: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..size).collect();
    p.shuffle(rng);
    p
}

fn shuffled(rng: &mut ChaCha8Rng, a: &IAlgebra) -> Result<IAlgebra> {
    let p = random_permutation(rng, a.size());
    a.relabel(&p, index_names(a.size()))
}

/// A random subalgebra: the closure of one or two random points.
fn random_subalgebra(rng: &mut ChaCha8Rng, a: &IAlgebra) -> Result<(IAlgebra, Vec<usize>)> {
    let count = rng.gen_range(1..=2);
    let gens: Vec<usize> = (0..count).map(|_| rng.gen_range(0..a.size())).collect();
    let sub = a.closure_of(&gens);
    Ok((a.restrict(&sub)?, sub))
}

/// Algebras over the affine clone on `Z/m` with at most `max` points.
fn affine_pool(clone: &Arc<AbstractClone>, m: usize, max: usize) -> Result<Vec<IAlgebra>> {
    let n_max = clone.n_max();
    let ring = gallery::ring_zmod(m)?;
    let mut pool = vec![terminal(clone)?];
    for d in (2..=m).filter(|d| m % d == 0 && *d <= max) {
        pool.push(gallery::linear_algebra(
            clone.clone(),
            d,
            1,
            IStructure::indiscrete(index_names(d), n_max),
        )?);
    }
    if m <= max {
        let nil = IStructure::nil_square(&ring, 1, n_max, &Default::default())?;
        pool.push(gallery::linear_algebra(clone.clone(), m, 1, nil)?);
        pool.push(gallery::linear_algebra(
            clone.clone(),
            m,
            1,
            IStructure::discrete(index_names(m), n_max),
        )?);
    }
    for k in 2..=max.min(3) {
        pool.push(gallery::discrete_affine(clone.clone(), index_names(k))?);
    }
    Ok(pool)
}

/// A span of reflecting homomorphisms with a panel of test targets.
#[derive(Debug, Clone)]
pub struct SpanCase {
    pub family: &'static str,
    pub source: Arc<IAlgebra>,
    pub legs: Vec<IHom>,
    pub targets: Vec<TestTarget>,
}

/// Extends a pointed i-set by `extra` points, relating new points to
/// anything at random. The inclusion reflects the i-structure.
fn pointed_extension(
    rng: &mut ChaCha8Rng,
    clone: &Arc<AbstractClone>,
    s: &IAlgebra,
    base: usize,
    extra: usize,
) -> Result<(IAlgebra, Vec<usize>)> {
    let size = s.size() + extra;
    let mut pairs: Vec<(usize, usize)> = s
        .istructure()
        .tuples(2)
        .iter()
        .map(|t| (t[0], t[1]))
        .collect();
    for _ in 0..rng.gen_range(0..=2 * extra) {
        let x = rng.gen_range(s.size()..size);
        pairs.push((x, rng.gen_range(0..size)));
    }
    let ext = pointed_iset(clone, size, base, &pairs)?;
    let p = random_permutation(rng, size);
    let ext = ext.relabel(&p, index_names(size))?;
    Ok((ext, p[..s.size()].to_vec()))
}

fn pointed_base(a: &IAlgebra) -> Result<usize> {
    let e = a
        .clone_ref()
        .op_index(0, "e")
        .ok_or_else(|| Error::InvalidInput("clone has no constant e".into()))?;
    a.act(0, e, &[])
}

const MAX_SPAN_CARRIER: usize = 5;

fn pointed_span(rng: &mut ChaCha8Rng, clone: &Arc<AbstractClone>) -> Result<SpanCase> {
    let size = rng.gen_range(1..=3);
    let source = Arc::new(random_pointed(rng, clone, size)?);
    let base = pointed_base(&source)?;
    let mut legs = Vec::new();
    for _ in 0..rng.gen_range(2..=3) {
        let leg = if rng.gen_bool(0.5) {
            let extra = rng.gen_range(0..=MAX_SPAN_CARRIER - size);
            let (t, map) = pointed_extension(rng, clone, &source, base, extra)?;
            IHom::new(source.clone(), Arc::new(t), map)?
        } else {
            let tsize = rng.gen_range(1..=MAX_SPAN_CARRIER);
            let t = Arc::new(random_pointed(rng, clone, tsize)?);
            match homs(&source, &t, true)?.choose(rng) {
                Some(m) => IHom::new(source.clone(), t, m.clone())?,
                None => IHom::identity(source.clone()),
            }
        };
        legs.push(leg);
    }
    let mut panel = vec![Arc::new(terminal(clone)?)];
    for _ in 0..rng.gen_range(0..=2) {
        let wsize = rng.gen_range(1..=3);
        panel.push(Arc::new(random_pointed(rng, clone, wsize)?));
    }
    let targets = test_targets(rng, &legs, panel)?;
    Ok(SpanCase {
        family: "pointed",
        source,
        legs,
        targets,
    })
}

fn affine_span(rng: &mut ChaCha8Rng) -> Result<SpanCase> {
    let m = *[2usize, 3, 4, 5].choose(rng).expect("non-empty");
    let clone = gallery::affine_clone_zmod(m, crate::DEFAULT_N_MAX)?;
    let pool: Vec<Arc<IAlgebra>> = affine_pool(&clone, m, MAX_SPAN_CARRIER)?
        .into_iter()
        .map(Arc::new)
        .collect();
    let parent = pool.choose(rng).expect("non-empty").clone();
    let (sub, incl) = random_subalgebra(rng, &parent)?;
    let source = Arc::new(sub);
    let mut legs = Vec::new();
    for _ in 0..rng.gen_range(2..=3) {
        let t = pool.choose(rng).expect("non-empty").clone();
        let t = Arc::new(shuffled(rng, &t)?);
        let leg = match homs(&source, &t, true)?.choose(rng) {
            Some(m) => IHom::new(source.clone(), t, m.clone())?,
            None => IHom::new(source.clone(), parent.clone(), incl.clone())?,
        };
        legs.push(leg);
    }
    let mut panel = vec![Arc::new(terminal(&clone)?)];
    for _ in 0..rng.gen_range(0..=2) {
        let w = pool.choose(rng).expect("non-empty");
        if w.size() <= 3 {
            panel.push(w.clone());
        }
    }
    let targets = test_targets(rng, &legs, panel)?;
    Ok(SpanCase {
        family: "affine",
        source,
        legs,
        targets,
    })
}

/// For each panel algebra, a random cocone over the legs: one homomorphism
/// out of each leg target, all agreeing on the source.
fn test_targets(
    rng: &mut ChaCha8Rng,
    legs: &[IHom],
    panel: Vec<Arc<IAlgebra>>,
) -> Result<Vec<TestTarget>> {
    let mut out = Vec::new();
    for w in panel {
        let mut options = Vec::with_capacity(legs.len());
        for l in legs {
            let mut hs = homs(&l.target, &w, false)?;
            hs.shuffle(rng);
            options.push(hs);
        }
        let mut chosen = Vec::with_capacity(legs.len());
        if extend_cocone(legs, &options, &mut chosen) {
            out.push(TestTarget {
                algebra: w,
                cocone: chosen,
            });
        }
    }
    Ok(out)
}

fn extend_cocone(legs: &[IHom], options: &[Vec<Vec<usize>>], chosen: &mut Vec<Vec<usize>>) -> bool {
    let i = chosen.len();
    if i == legs.len() {
        return true;
    }
    for h in &options[i] {
        let agrees = chosen.first().map_or(true, |c0| {
            (0..legs[i].map.len()).all(|a| h[legs[i].map[a]] == c0[legs[0].map[a]])
        });
        if agrees {
            chosen.push(h.clone());
            if extend_cocone(legs, options, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// A random span of reflecting legs, pointed or affine.
pub fn reflecting_span(rng: &mut ChaCha8Rng, pointed: &Arc<AbstractClone>) -> Result<SpanCase> {
    if rng.gen_bool(0.5) {
        pointed_span(rng, pointed)
    } else {
        affine_span(rng)
    }
}

/// Factors for a coproduct, all over `clone`.
#[derive(Debug, Clone)]
pub struct CoproductCase {
    pub clone: Arc<AbstractClone>,
    pub factors: Vec<Arc<IAlgebra>>,
}

/// Affine factors (no constants): lines, sub-lines and discrete algebras.
pub fn affine_coproduct(rng: &mut ChaCha8Rng) -> Result<CoproductCase> {
    let m = *[2usize, 3, 4].choose(rng).expect("non-empty");
    let clone = gallery::affine_clone_zmod(m, crate::DEFAULT_N_MAX)?;
    let pool = affine_pool(&clone, m, 4)?;
    let mut factors = Vec::new();
    for _ in 0..rng.gen_range(2..=4) {
        let a = pool.choose(rng).expect("non-empty");
        let a = if rng.gen_bool(0.3) {
            random_subalgebra(rng, a)?.0
        } else {
            shuffled(rng, a)?
        };
        factors.push(Arc::new(a));
    }
    Ok(CoproductCase { clone, factors })
}

/// Total elementary abelian 2-groups of order 1, 2 and 4, randomly
/// relabelled.
pub fn abelian2_coproduct(
    rng: &mut ChaCha8Rng,
    clone: &Arc<AbstractClone>,
) -> Result<CoproductCase> {
    let n_max = clone.n_max();
    let mut factors = Vec::new();
    for _ in 0..rng.gen_range(2..=4) {
        let k = rng.gen_range(0..=2);
        let a = gallery::linear_algebra(
            clone.clone(),
            2,
            k,
            IStructure::indiscrete(index_names(1 << k), n_max),
        )?;
        factors.push(Arc::new(shuffled(rng, &a)?));
    }
    Ok(CoproductCase {
        clone: clone.clone(),
        factors,
    })
}

/// Clones shared by the congruence and regularity generators.
pub struct Clones {
    pub pointed: Arc<AbstractClone>,
    pub affine4: Arc<AbstractClone>,
    pub abelian2: Arc<AbstractClone>,
    pub abelian4: Arc<AbstractClone>,
}

impl Clones {
    pub fn new() -> Result<Self> {
        let n = crate::DEFAULT_N_MAX;
        Ok(Clones {
            pointed: Arc::new(gallery::pointed_clone(n)?),
            affine4: gallery::affine_clone_zmod(4, n)?,
            abelian2: gallery::abelian_clone_zmod(2, n)?,
            abelian4: gallery::abelian_clone_zmod(4, n)?,
        })
    }
}

/// An algebra with at most four points, a smaller sub-i-structure on the
/// same carrier carrying the same action when there is one, and a pool of
/// further algebras over the same clone.
struct Small {
    algebra: Arc<IAlgebra>,
    sub: Option<IStructure>,
    pool: Vec<Arc<IAlgebra>>,
}

fn star(a: &IAlgebra, base: usize) -> Result<IStructure> {
    let rel: Vec<(usize, usize)> = (0..a.size())
        .flat_map(|x| [(x, x), (base, x), (x, base)])
        .collect();
    IStructure::generate_from_binary(a.carrier().to_vec(), a.n_max(), &rel)
}

fn small_algebra(rng: &mut ChaCha8Rng, clones: &Clones) -> Result<Small> {
    let n_max = crate::DEFAULT_N_MAX;
    match rng.gen_range(0..4) {
        0 => {
            let c = &clones.pointed;
            let size = rng.gen_range(1..=4);
            let a = random_pointed(rng, c, size)?;
            let sub = star(&a, pointed_base(&a)?)?;
            let mut pool = vec![Arc::new(terminal(c)?)];
            for s in 1..=3 {
                pool.push(Arc::new(random_pointed(rng, c, s)?));
            }
            Ok(Small {
                algebra: Arc::new(a),
                sub: Some(sub),
                pool,
            })
        }
        1 => {
            let c = &clones.affine4;
            let pool: Vec<Arc<IAlgebra>> =
                affine_pool(c, 4, 4)?.into_iter().map(Arc::new).collect();
            let pick = pool.choose(rng).expect("non-empty").clone();
            let a = shuffled(rng, &pick)?;
            let sub = IStructure::discrete(a.carrier().to_vec(), n_max);
            Ok(Small {
                algebra: Arc::new(a),
                sub: Some(sub),
                pool,
            })
        }
        2 => {
            let c = &clones.abelian2;
            let k = rng.gen_range(1..=2);
            let a = gallery::linear_algebra(
                c.clone(),
                2,
                k,
                IStructure::indiscrete(index_names(1 << k), n_max),
            )?;
            let pool = vec![
                Arc::new(gallery::abelian_total_over(c.clone(), 2)?),
                Arc::new(terminal(c)?),
            ];
            Ok(Small {
                algebra: Arc::new(shuffled(rng, &a)?),
                sub: None,
                pool,
            })
        }
        _ => {
            let c = &clones.abelian4;
            let d = *[2usize, 4].choose(rng).expect("non-empty");
            let a = gallery::abelian_total_over(c.clone(), d)?;
            let pool = vec![
                Arc::new(gallery::abelian_total_over(c.clone(), 2)?),
                Arc::new(gallery::abelian_total_over(c.clone(), 4)?),
                Arc::new(terminal(c)?),
            ];
            Ok(Small {
                algebra: Arc::new(shuffled(rng, &a)?),
                sub: None,
                pool,
            })
        }
    }
}

fn random_partition(rng: &mut ChaCha8Rng, a: &IAlgebra) -> Vec<usize> {
    let count = rng.gen_range(0..=2);
    let pairs = random_pairs(rng, a.size(), count);
    compatible_closure(a, &pairs).0
}

/// A random congruence on at most four points. Roughly half of the
/// relations carry the product structure of a smaller sub-i-structure
/// instead of the restricted product structure.
pub fn random_congruence(rng: &mut ChaCha8Rng, clones: &Clones) -> Result<Congruence> {
    let small = small_algebra(rng, clones)?;
    let a = &small.algebra;
    let class_of = random_partition(rng, a);
    let structure = match &small.sub {
        Some(sub) if rng.gen_bool(0.5) => {
            let size = a.size();
            let subset: Vec<usize> = (0..size * size)
                .filter(|&z| class_of[z / size] == class_of[z % size])
                .collect();
            Some(IStructure::product(sub, sub)?.restrict(&subset)?)
        }
        _ => None,
    };
    congruence_from_partition(a, &class_of, structure)
}

/// A regular epimorphism `e : B → C` and a homomorphism `f : A → C`.
#[derive(Debug, Clone)]
pub struct RegularCase {
    pub epi: IHom,
    pub map: IHom,
    pub kind: &'static str,
}

pub fn regular_epi_case(rng: &mut ChaCha8Rng, clones: &Clones) -> Result<RegularCase> {
    let small = small_algebra(rng, clones)?;
    let b = &small.algebra;
    let class_of = random_partition(rng, b);
    let cg = congruence_from_partition(b, &class_of, None)?;
    let epi = coequalizer_congruence(&cg)?.legs.remove(0);
    let c = epi.target.clone();
    let (map, kind) = match rng.gen_range(0..4) {
        0 => (IHom::identity(c), "identity"),
        1 => (epi.clone(), "self"),
        2 => {
            let a = small.pool.choose(rng).expect("non-empty").clone();
            match homs(&a, &c, false)?.choose(rng) {
                Some(m) => (IHom::new(a, c, m.clone())?, "random"),
                None => (IHom::identity(c), "identity"),
            }
        }
        _ => {
            let init = initial_object(b.clone_ref())?;
            (initial_morphism(&init, &c)?, "initial")
        }
    };
    Ok(RegularCase { epi, map, kind })
}
