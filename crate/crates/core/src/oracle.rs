//! Brute-force reference computations.
//!
//! Nothing here calls the constructive code; only the data accessors of
//! clones, i-structures and i-algebras are used. Everything is exponential.

use std::collections::{BTreeMap, BTreeSet};

use crate::budget::SearchBudget;
use crate::clone::{AbstractClone, OpId};
use crate::error::Result;
use crate::ialgebra::IAlgebra;
use crate::istructure::{IStructure, Tuple};
use crate::limits::Congruence;

/// Every `len`-tuple over `0..base`, first coordinate most significant.
fn all_tuples(base: usize, len: usize) -> Vec<Tuple> {
    let mut out: Vec<Tuple> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..base).map(move |x| {
                    let mut u = t.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
    }
    out
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |a, b| a.saturating_mul(b))
}

/// Calls `f` on every permutation of `0..n` until it returns true.
fn find_permutation(n: usize, f: &mut impl FnMut(&[usize]) -> bool) -> Option<Vec<usize>> {
    fn go(p: &mut Vec<usize>, used: &mut Vec<bool>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if p.len() == used.len() {
            return f(p);
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                p.push(x);
                if go(p, used, f) {
                    return true;
                }
                p.pop();
                used[x] = false;
            }
        }
        false
    }
    let mut p = Vec::with_capacity(n);
    let mut used = vec![false; n];
    go(&mut p, &mut used, f).then_some(p)
}

/// Least precomposition-closed family containing `gens`, by repeated
/// passes until nothing changes.
pub fn brute_istructure_closure(
    carrier: Vec<String>,
    n_max: usize,
    gens: &BTreeMap<usize, Vec<Tuple>>,
    budget: &SearchBudget,
) -> Result<IStructure> {
    let size = carrier.len();
    budget.check_tuples(
        "closure universe",
        (size as u128).saturating_pow(n_max as u32),
    )?;
    let mut sets: Vec<BTreeSet<Tuple>> = vec![BTreeSet::new(); n_max + 1];
    for x in 0..size {
        if n_max >= 1 {
            sets[1].insert(vec![x]);
        }
    }
    for (&n, ts) in gens {
        if n <= n_max {
            sets[n].extend(ts.iter().cloned());
        }
    }
    loop {
        let mut changed = false;
        for n in 1..=n_max {
            let current: Vec<Tuple> = sets[n].iter().cloned().collect();
            for m in 1..=n_max {
                for h in all_tuples(n, m) {
                    for t in &current {
                        let u: Tuple = h.iter().map(|&i| t[i]).collect();
                        changed |= sets[m].insert(u);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let blocks = (2..=n_max)
        .map(|n| (n, sets[n].iter().cloned().collect()))
        .collect();
    IStructure::from_parts(carrier, n_max, blocks)
}

/// `D(k)` over `Z/m`: tuples whose pairwise products vanish, by direct
/// arithmetic.
pub fn brute_nil_square_differences(m: usize, k: usize) -> Vec<Tuple> {
    all_tuples(m, k)
        .into_iter()
        .filter(|d| d.iter().all(|&x| d.iter().all(|&y| (x * y) % m == 0)))
        .collect()
}

/// Neighbour pairs of the nil-square structure on `(Z/m)^k`.
pub fn brute_nil_square_pairs(m: usize, k: usize) -> usize {
    let d: BTreeSet<Tuple> = brute_nil_square_differences(m, k).into_iter().collect();
    let pts = all_tuples(m, k);
    let mut count = 0;
    for p in &pts {
        for q in &pts {
            let diff: Tuple = q.iter().zip(p).map(|(&a, &b)| (a + m - b) % m).collect();
            if d.contains(&diff) {
                count += 1;
            }
        }
    }
    count
}

/// `map` is an i-morphism and equivariant, checked by direct lookups.
pub fn brute_is_hom(a: &IAlgebra, b: &IAlgebra, map: &[usize]) -> bool {
    let c = a.clone_ref();
    for n in 0..=a.n_max() {
        for x in a.istructure().tuples(n) {
            let y: Tuple = x.iter().map(|&v| map[v]).collect();
            if !b.istructure().contains(&y) {
                return false;
            }
            for op in 0..c.size(n) {
                match (a.act(n, op, x), b.act(n, op, &y)) {
                    (Ok(l), Ok(r)) if map[l] == r => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

/// Every tuple of the source whose image is a neighbour tuple is one.
pub fn brute_reflects(s: &IStructure, t: &IStructure, map: &[usize]) -> bool {
    (2..=s.n_max()).all(|n| {
        all_tuples(s.size(), n).into_iter().all(|x| {
            let y: Tuple = x.iter().map(|&v| map[v]).collect();
            !t.contains(&y) || s.contains(&x)
        })
    })
}

/// A carrier bijection that is a homomorphism both ways.
pub fn brute_iso_search(
    a: &IAlgebra,
    b: &IAlgebra,
    budget: &SearchBudget,
) -> Result<Option<Vec<usize>>> {
    if a.size() != b.size() || a.n_max() != b.n_max() {
        return Ok(None);
    }
    budget.check_functions("carrier bijections", factorial(a.size()))?;
    Ok(find_permutation(a.size(), &mut |p| {
        let mut inv = vec![0; p.len()];
        for (x, &y) in p.iter().enumerate() {
            inv[y] = x;
        }
        brute_is_hom(a, b, p) && brute_is_hom(b, a, &inv)
    }))
}

/// Arity-wise bijections `O(n) → O'(n)` commuting with substitution and
/// fixing projections.
pub fn brute_clone_iso_search(
    c: &AbstractClone,
    d: &AbstractClone,
    budget: &SearchBudget,
) -> Result<Option<Vec<Vec<OpId>>>> {
    if c.n_max() != d.n_max() || c.sizes() != d.sizes() {
        return Ok(None);
    }
    let nm = c.n_max();
    let total = (0..=nm).fold(1u128, |acc, n| acc.saturating_mul(factorial(c.size(n))));
    budget.check_functions("arity-wise bijections", total)?;
    let ok = |f: &[Vec<OpId>]| -> bool {
        for n in 1..=nm {
            for j in 1..=n {
                if f[n][c.proj(n, j)] != d.proj(n, j) {
                    return false;
                }
            }
        }
        for n in 0..=nm {
            for k in 0..=nm {
                for sigma in 0..c.size(n) {
                    for args in all_tuples(c.size(k), n) {
                        let lhs = f[k][c.subst(n, k, sigma, &args)];
                        let img: Vec<OpId> = args.iter().map(|&t| f[k][t]).collect();
                        if lhs != d.subst(n, k, f[n][sigma], &img) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    };
    fn go(
        n: usize,
        c: &AbstractClone,
        acc: &mut Vec<Vec<OpId>>,
        ok: &impl Fn(&[Vec<OpId>]) -> bool,
    ) -> bool {
        if n > c.n_max() {
            return ok(acc);
        }
        let mut found = false;
        find_permutation(c.size(n), &mut |p| {
            acc.push(p.to_vec());
            found = go(n + 1, c, acc, ok);
            if !found {
                acc.pop();
            }
            found
        });
        found
    }
    let mut acc = Vec::new();
    Ok(go(0, c, &mut acc, &ok).then_some(acc))
}

/// Classes of the equivalence on `0..codomain` generated by
/// `f(a) ~ g(a)`, by relabelling until stable. Classes are sorted.
pub fn brute_set_coequalizer(f: &[usize], g: &[usize], codomain: usize) -> Vec<Vec<usize>> {
    let mut label: Vec<usize> = (0..codomain).collect();
    loop {
        let mut changed = false;
        for (&x, &y) in f.iter().zip(g) {
            let (lx, ly) = (label[x], label[y]);
            if lx != ly {
                let (keep, drop) = (lx.min(ly), lx.max(ly));
                for l in label.iter_mut() {
                    if *l == drop {
                        *l = keep;
                    }
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (x, &l) in label.iter().enumerate() {
        classes.entry(l).or_default().push(x);
    }
    classes.into_values().collect()
}

/// `{(x, y) : f(x) = f(y)}` in lexicographic order.
pub fn brute_kernel_pairs(map: &[usize]) -> Vec<(usize, usize)> {
    let n = map.len();
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if map[x] == map[y] {
                out.push((x, y));
            }
        }
    }
    out
}

/// `{x : f(x) = g(x)}`.
pub fn brute_equalizer(f: &[usize], g: &[usize]) -> Vec<usize> {
    (0..f.len()).filter(|&x| f[x] == g[x]).collect()
}

/// Tuples of relation elements whose two projections are neighbour tuples,
/// for each arity `2..=n_max`.
fn product_restricted(a: &IStructure, pairs: &[(usize, usize)]) -> Vec<BTreeSet<Tuple>> {
    let mut out = vec![BTreeSet::new(); a.n_max() + 1];
    for n in 2..=a.n_max() {
        for y in all_tuples(pairs.len(), n) {
            let l: Tuple = y.iter().map(|&i| pairs[i].0).collect();
            let r: Tuple = y.iter().map(|&i| pairs[i].1).collect();
            if a.contains(&l) && a.contains(&r) {
                out[n].insert(y);
            }
        }
    }
    out
}

/// Whether the relation structure equals the product-restricted one.
pub fn brute_has_product_structure(cg: &Congruence) -> bool {
    let pairs = cg.pairs();
    let expect = product_restricted(cg.base().istructure(), &pairs);
    let rel = cg.rel.istructure();
    (2..=rel.n_max()).all(|n| {
        let have: BTreeSet<Tuple> = rel.tuples(n).iter().cloned().collect();
        have == expect[n]
    })
}

/// Searches for a homomorphism `q` out of the base whose kernel pair is
/// `cg`: the quotient by the classes of `cg` with the image structure and
/// the action read off representatives. Returns the class map when the
/// candidate is a homomorphism and its kernel pair, with the product
/// restricted structure, equals `cg` including the relation structure.
pub fn brute_kernel_pair_witness(cg: &Congruence) -> Option<Vec<usize>> {
    let a = cg.base();
    let pairs = cg.pairs();
    let classes = brute_set_coequalizer(
        &pairs.iter().map(|p| p.0).collect::<Vec<_>>(),
        &pairs.iter().map(|p| p.1).collect::<Vec<_>>(),
        a.size(),
    );
    let mut q = vec![0; a.size()];
    for (i, cls) in classes.iter().enumerate() {
        for &x in cls {
            q[x] = i;
        }
    }
    let s = a.istructure();
    let c = a.clone_ref();
    let mut cells: BTreeMap<(usize, OpId, Tuple), usize> = BTreeMap::new();
    for n in 0..=a.n_max() {
        for x in s.tuples(n) {
            let z: Tuple = x.iter().map(|&v| q[v]).collect();
            for op in 0..c.size(n) {
                let v = q[a.act(n, op, x).ok()?];
                if *cells.entry((n, op, z.clone())).or_insert(v) != v {
                    return None;
                }
            }
        }
    }
    let kernel: BTreeSet<(usize, usize)> = brute_kernel_pairs(&q).into_iter().collect();
    let have: BTreeSet<(usize, usize)> = pairs.iter().copied().collect();
    if kernel != have || !brute_has_product_structure(cg) {
        return None;
    }
    Some(q)
}

/// Surjective, and every neighbour tuple of the codomain is the image of
/// one of the domain.
pub fn brute_is_regular_epi(a: &IStructure, b: &IStructure, map: &[usize]) -> bool {
    if (0..b.size()).any(|y| !map.contains(&y)) {
        return false;
    }
    (2..=b.n_max()).all(|n| {
        all_tuples(b.size(), n).into_iter().all(|y| {
            let hit = all_tuples(a.size(), n)
                .into_iter()
                .any(|x| a.contains(&x) && x.iter().zip(&y).all(|(&u, &v)| map[u] == v));
            b.contains(&y) == hit
        })
    })
}

/// `|O(n)|` for the affine clone over `Z/m`: tuples summing to one.
pub fn count_affine_ops(m: usize, n: usize) -> usize {
    all_tuples(m, n)
        .into_iter()
        .filter(|t| t.iter().sum::<usize>() % m == 1 % m)
        .count()
}

/// `|O(n)|` for all coefficient tuples over `Z/m`.
pub fn count_abelian_ops(m: usize, n: usize) -> usize {
    all_tuples(m, n).len()
}

/// Number of functions `A^n → A`.
pub fn count_endo_ops(size: usize, n: usize) -> u128 {
    (size as u128).pow(size.pow(n as u32) as u32)
}

/// Elements of the free semilattice on `n` generators: non-empty subsets.
pub fn count_semilattice_ops(n: usize) -> usize {
    (1..(1usize << n)).count()
}

/// Terms of the free pointed set on `n` variables: variables and the point.
pub fn count_pointed_ops(n: usize) -> usize {
    (1..=n).count() + 1
}

/// Elements of the free exponent-`m` abelian group on `n` generators.
pub fn count_abelian_free(m: usize, n: usize) -> usize {
    (0..n).fold(1, |acc, _| acc * m)
}

/// Brute-force check of the i-algebra axioms by direct lookups; returns
/// the first failure.
pub fn brute_ialgebra_failure(a: &IAlgebra) -> Option<String> {
    let c = a.clone_ref();
    let s = a.istructure();
    let nm = a.n_max();
    for m in 0..=nm {
        for x in s.tuples(m) {
            for n in 0..=nm {
                for sigmas in all_tuples(c.size(m), n) {
                    let y: Option<Tuple> = sigmas.iter().map(|&sg| a.act(m, sg, x).ok()).collect();
                    let y = y?;
                    if !s.contains(&y) {
                        return Some(format!("neighbourhood at m={m}, n={n}, x={x:?}"));
                    }
                    for sigma in 0..c.size(n) {
                        let lhs = a.act(m, c.subst(n, m, sigma, &sigmas), x).ok()?;
                        let rhs = a.act(n, sigma, &y).ok()?;
                        if lhs != rhs {
                            return Some(format!("associativity at m={m}, n={n}, x={x:?}"));
                        }
                    }
                }
            }
            for j in 1..=m {
                if a.act(m, c.proj(m, j), x).ok()? != x[j - 1] {
                    return Some(format!("projection at m={m}, j={j}"));
                }
            }
        }
    }
    None
}
