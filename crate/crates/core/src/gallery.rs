//! Named rings, clones, algebras and the counterexample fixtures.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::budget::{SearchBudget, DEFAULT_N_MAX};
use crate::clone::{free_clone, AbstractClone};
use crate::colimits::coequalizer_congruence;
use crate::error::{Error, Result};
use crate::ialgebra::{validate_ialgebra, IAlgebra, IHom};
use crate::io;
use crate::istructure::{index_names, IStructure};
use crate::limits::{
    congruence_from_partition, generated_partition, is_kernel_pair, is_regular_epi,
};
use crate::ring::FiniteRing;
use crate::theory::parse_presentation_with;
use crate::tuples;
use crate::unionfind::UnionFind;

pub const SEMILATTICE: &str = "theory Semilattice; op meet/2; \
    eq[2] meet(x1,x1)=x1; \
    eq[2] meet(x1,x2)=meet(x2,x1); \
    eq[3] meet(meet(x1,x2),x3)=meet(x1,meet(x2,x3));";

pub const POINTED: &str = "theory Pointed; op e/0;";

pub const ABELIAN_EXP2: &str = "theory AbelianExp2; op add/2; op neg/1; op zero/0; \
    eq[3] add(add(x1,x2),x3)=add(x1,add(x2,x3)); \
    eq[2] add(x1,x2)=add(x2,x1); \
    eq[1] add(x1,zero)=x1; \
    eq[1] add(x1,neg(x1))=zero; \
    eq[1] add(x1,x1)=zero;";

/// Binary affine combinations `a_r(x,y) = r·x + (1−r)·y` over `Z/m`.
pub fn affine_presentation(m: usize) -> String {
    let mut s = format!("theory AffineZ{m};");
    for r in 0..m {
        s.push_str(&format!(" op a{r}/2;"));
    }
    for r in 0..m {
        s.push_str(&format!(" eq[1] a{r}(x1,x1)=x1;"));
        s.push_str(&format!(" eq[2] a{r}(x2,x1)=a{}(x1,x2);", (m + 1 - r) % m));
    }
    s.push_str(" eq[2] a1(x1,x2)=x1; eq[2] a0(x1,x2)=x2;");
    for r in 0..m {
        for u in 0..m {
            for t in 0..m {
                let v = (r * u + (m + 1 - r) % m * t) % m;
                s.push_str(&format!(
                    " eq[2] a{r}(a{u}(x1,x2),a{t}(x1,x2))=a{v}(x1,x2);"
                ));
            }
        }
    }
    s
}

pub fn ring_zmod(m: usize) -> Result<FiniteRing> {
    FiniteRing::zmod(m)
}

/// Affine combinations over `ring`: coefficient tuples summing to one.
pub fn affine_clone(ring: &FiniteRing, label: &str, n_max: usize) -> Result<AbstractClone> {
    AbstractClone::coefficients(label, ring.clone(), true, n_max, &SearchBudget::default())
}

/// All coefficient tuples over `Z/m`, acting by `Σ a_i x_i`.
pub fn abelian_exp_clone(m: usize, n_max: usize) -> Result<AbstractClone> {
    AbstractClone::coefficients(
        &format!("abelian({m},{n_max})"),
        ring_zmod(m)?,
        false,
        n_max,
        &SearchBudget::default(),
    )
}

pub fn affine_clone_zmod(m: usize, n_max: usize) -> Result<Arc<AbstractClone>> {
    Ok(Arc::new(affine_clone(
        &ring_zmod(m)?,
        &format!("affine(Z/{m},{n_max})"),
        n_max,
    )?))
}

pub fn abelian_clone_zmod(m: usize, n_max: usize) -> Result<Arc<AbstractClone>> {
    Ok(Arc::new(abelian_exp_clone(m, n_max)?))
}

pub fn pointed_clone(n_max: usize) -> Result<AbstractClone> {
    let p = parse_presentation_with(POINTED, n_max)?;
    let (c, _) = free_clone(&p, n_max, 2, &SearchBudget::default())?;
    Ok(c.with_label(&format!("pointed({n_max})")))
}

pub fn semilattice_clone(n_max: usize) -> Result<AbstractClone> {
    let p = parse_presentation_with(SEMILATTICE, n_max.max(2))?;
    let (c, _) = free_clone(&p, n_max, 4, &SearchBudget::default())?;
    Ok(c.with_label(&format!("semilattice({n_max})")))
}

/// Resolves a clone reference such as `affine(Z/4,3)`, `abelian(4,3)`,
/// `endo(2,2)`, `pointed(2)` or `semilattice(2)`.
pub fn clone_by_ref(r: &str, budget: &SearchBudget) -> Result<Arc<AbstractClone>> {
    let bad = || Error::InvalidInput(format!("unknown clone reference {r:?}"));
    let r = r.trim();
    let open = r.find('(').ok_or_else(bad)?;
    if !r.ends_with(')') {
        return Err(bad());
    }
    let kind = &r[..open];
    let args: Vec<&str> = r[open + 1..r.len() - 1].split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let clone = match (kind, args.as_slice()) {
        ("affine", [ring, n]) => {
            let m = num(ring.strip_prefix("Z/").ok_or_else(bad)?)?;
            affine_clone(
                &ring_zmod(m)?,
                &format!("affine(Z/{m},{})", num(n)?),
                num(n)?,
            )?
        }
        ("abelian", [m, n]) => abelian_exp_clone(num(m)?, num(n)?)?,
        ("endo", [size, n]) => AbstractClone::endo(&index_names(num(size)?), num(n)?, budget)?,
        ("pointed", [n]) => pointed_clone(num(n)?)?,
        ("semilattice", [n]) => semilattice_clone(num(n)?)?,
        _ => return Err(bad()),
    };
    Ok(Arc::new(clone))
}

/// The linear action `σ • (P_1…P_n) = Σ a_i P_i` of a coefficient clone on
/// `(Z/modulus)^k`, with points indexed lexicographically. The clone's ring
/// must be `Z/m` with `modulus | m`.
pub fn linear_algebra(
    clone: Arc<AbstractClone>,
    modulus: usize,
    k: usize,
    istr: IStructure,
) -> Result<IAlgebra> {
    let (ring, _) = clone
        .coefficient_ring()
        .ok_or_else(|| Error::InvalidInput("linear action needs a coefficient clone".into()))?;
    if modulus == 0 || ring.size() % modulus != 0 {
        return Err(Error::InvalidInput(format!(
            "Z/{modulus} is not a quotient of a ring of size {}",
            ring.size()
        )));
    }
    let points =
        tuples::count(modulus, k).ok_or_else(|| Error::InvalidInput("carrier too large".into()))?;
    if istr.size() != points {
        return Err(Error::InvalidInput(
            "i-structure carrier is not (Z/m)^k".into(),
        ));
    }
    let c = clone.clone();
    let a = IAlgebra::from_fn(clone, istr, |n, op, t| {
        let coeffs = c.coefficients_of(n, op).expect("coefficient clone");
        let mut p = vec![0; k];
        let mut q = vec![0; k];
        for (&a, &x) in coeffs.iter().zip(t) {
            tuples::decode(x, modulus, k, &mut q);
            for j in 0..k {
                p[j] = (p[j] + a * q[j]) % modulus;
            }
        }
        tuples::encode(&p, modulus)
    })?;
    Ok(a)
}

/// `(Z/m)^k` with the nil-square structure and the affine action.
pub fn affine_nil_square(m: usize, k: usize, n_max: usize) -> Result<IAlgebra> {
    let istr = IStructure::nil_square(&ring_zmod(m)?, k, n_max, &SearchBudget::default())?;
    linear_algebra(affine_clone_zmod(m, n_max)?, m, k, istr)
}

/// `Z/m` as a total affine algebra.
pub fn affine_total(m: usize, n_max: usize) -> Result<IAlgebra> {
    linear_algebra(
        affine_clone_zmod(m, n_max)?,
        m,
        1,
        IStructure::indiscrete(index_names(m), n_max),
    )
}

/// `Z/m` as a total algebra over `abelian(m, n_max)`.
pub fn abelian_total(m: usize, n_max: usize) -> Result<IAlgebra> {
    abelian_total_over(abelian_clone_zmod(m, n_max)?, m)
}

/// `Z/modulus` as a total algebra over a coefficient clone on `Z/m`.
pub fn abelian_total_over(clone: Arc<AbstractClone>, modulus: usize) -> Result<IAlgebra> {
    let n_max = clone.n_max();
    linear_algebra(
        clone,
        modulus,
        1,
        IStructure::indiscrete(index_names(modulus), n_max),
    )
}

/// The discrete structure on `carrier` with every operation acting on a
/// diagonal tuple by returning its entry. Needs a clone without constants
/// whose operations are idempotent.
pub fn discrete_affine(clone: Arc<AbstractClone>, carrier: Vec<String>) -> Result<IAlgebra> {
    if clone.size(0) > 0 {
        return Err(Error::InvalidInput("clone has constants".into()));
    }
    let istr = IStructure::discrete(carrier, clone.n_max());
    let a = IAlgebra::from_fn(clone, istr, |_, _, t| t[0])?;
    match validate_ialgebra(&a).violations.first() {
        None => Ok(a),
        Some(v) => Err(Error::NotACloneAlgebra(v.witness.clone())),
    }
}

/// Outcome of one counterexample fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureReport {
    pub name: String,
    pub passed: bool,
    pub expected: serde_json::Value,
    pub observed: serde_json::Value,
    pub note: String,
}

/// Zero and doubling on `Z/4`. Both reflect the i-structure, yet the set
/// quotient `{[0,2],[1],[3]}` carries no algebra structure making the
/// quotient map a homomorphism; the congruence they generate has two
/// classes. Over the integers the same pair gives the odd numbers plus one
/// point in sets and `Z/2` as the algebraic quotient.
pub fn fixture_coeq_totals() -> Result<FixtureReport> {
    let z4 = Arc::new(abelian_total(4, DEFAULT_N_MAX)?);
    let zero = IHom::new(z4.clone(), z4.clone(), vec![0; 4])?;
    let dbl = IHom::new(z4.clone(), z4.clone(), vec![0, 2, 0, 2])?;
    let mut uf = UnionFind::new(4);
    for a in 0..4 {
        uf.union(zero.map[a], dbl.map[a]);
    }
    let (_, set_classes) = uf.classes();
    let (classes, _) = generated_partition(&[zero.clone(), dbl.clone()])?;
    let cg = congruence_from_partition(&z4, &classes, None)?;
    let q = coequalizer_congruence(&cg)?;
    let both_reflect = zero.flags.reflects && dbl.flags.reflects;
    let observed = serde_json::json!({
        "set_carrier": set_classes,
        "ialg_carrier": q.apex.size(),
        "both_reflect": both_reflect,
    });
    let expected = serde_json::json!({"set_carrier": 3, "ialg_carrier": 2, "both_reflect": true});
    Ok(FixtureReport {
        name: "coeq_totals".into(),
        passed: observed == expected,
        expected,
        observed,
        note: "zero map and doubling on total Z/4; integer version: Z/2 versus the odd numbers plus a point".into(),
    })
}

/// The projections `A × A ⇉ A` with the discrete structure on `A × A`, for
/// total affine `A = Z/3`. They do not jointly reflect the i-structure, so
/// the quotient construction refuses them, but the set quotient `A → 1`
/// lifts to the one-point total algebra.
pub fn fixture_not_kernel_pair() -> Result<FixtureReport> {
    let a = Arc::new(affine_total(3, DEFAULT_N_MAX)?);
    let rel_names: Vec<String> = (0..9).map(|z| format!("({},{})", z / 3, z % 3)).collect();
    let cg = congruence_from_partition(
        &a,
        &[0, 0, 0],
        Some(IStructure::discrete(rel_names, DEFAULT_N_MAX)),
    )?;
    let kernel = is_kernel_pair(&cg);
    let refused = matches!(
        coequalizer_congruence(&cg),
        Err(Error::JointReflectionFailure(_))
    );
    let point = Arc::new(linear_algebra(
        a.clone_ref().clone(),
        1,
        1,
        IStructure::indiscrete(vec!["*".into()], DEFAULT_N_MAX),
    )?);
    let point_valid = validate_ialgebra(&point).is_valid();
    let lift = IHom::new(a.clone(), point, vec![0; 3]).is_ok();
    let observed = serde_json::json!({
        "is_kernel_pair": kernel,
        "joint_reflection_failure": refused,
        "one_point_lift_valid": point_valid && lift,
    });
    let expected = serde_json::json!({
        "is_kernel_pair": false,
        "joint_reflection_failure": true,
        "one_point_lift_valid": true,
    });
    Ok(FixtureReport {
        name: "not_kernel_pair".into(),
        passed: observed == expected,
        expected,
        observed,
        note: "discrete projections on Z/3 × Z/3 over total affine Z/3".into(),
    })
}

/// The identity from discrete to total affine `Z/3`: a bijective
/// homomorphism that does not reflect the i-structure and is not a regular
/// epimorphism.
pub fn fixture_non_reflecting_identity() -> Result<FixtureReport> {
    let t = Arc::new(affine_total(3, DEFAULT_N_MAX)?);
    let d = Arc::new(discrete_affine(t.clone_ref().clone(), index_names(3))?);
    let id = IHom::new(d, t, vec![0, 1, 2])?;
    let observed = serde_json::json!({
        "accepted": true,
        "reflects": id.flags.reflects,
        "regular_epi": is_regular_epi(&id),
    });
    let expected = serde_json::json!({"accepted": true, "reflects": false, "regular_epi": false});
    Ok(FixtureReport {
        name: "non_reflecting_identity".into(),
        passed: observed == expected,
        expected,
        observed,
        note: "identity from discrete to indiscrete affine Z/3".into(),
    })
}

/// The three counterexample fixtures, ordered by name.
pub fn counterexample_suite() -> Result<Vec<FixtureReport>> {
    let mut out = vec![
        fixture_coeq_totals()?,
        fixture_non_reflecting_identity()?,
        fixture_not_kernel_pair()?,
    ];
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

pub fn suite_text(reports: &[FixtureReport]) -> String {
    reports
        .iter()
        .map(|r| {
            format!(
                "{} {}: observed {} expected {}\n",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.observed,
                r.expected
            )
        })
        .collect()
}

/// Writes the JSON fixtures into `dir` and returns the files written.
pub fn write_fixtures(dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut written = Vec::new();
    let mut index = Vec::new();
    let mut put =
        |name: &str, kind: &str, value: serde_json::Value, expected: serde_json::Value| {
            let path = dir.join(name);
            let text = serde_json::to_string_pretty(&value).expect("plain data serialises");
            std::fs::write(&path, text + "\n").map_err(|e| Error::InvalidInput(e.to_string()))?;
            index.push(serde_json::json!({"file": name, "kind": kind, "expected": expected}));
            written.push(path);
            Ok::<(), Error>(())
        };

    let n = DEFAULT_N_MAX;
    let line = Arc::new(affine_nil_square(4, 1, n)?);
    let plane = affine_nil_square(4, 2, n)?;
    put(
        "affine_z4_nilsquare.json",
        "ialgebra",
        io::algebra_to_json(&line),
        serde_json::json!({"violations": 0, "carrier": 4, "pairs": 8}),
    )?;
    put(
        "affine_z4_nilsquare_plane.json",
        "ialgebra",
        io::algebra_to_json(&plane),
        serde_json::json!({"violations": 0, "carrier": 16}),
    )?;

    let z2 = Arc::new(abelian_total(2, n)?);
    let init = crate::colimits::initial_object(z2.clone_ref())?;
    put(
        "pushout_wedge.json",
        "diagram",
        io::span_to_json(&init, &[(z2.clone(), vec![0]), (z2.clone(), vec![0])]),
        serde_json::json!({"apex_carrier": 3}),
    )?;

    let t3 = Arc::new(affine_total(3, n)?);
    let d3 = Arc::new(discrete_affine(t3.clone_ref().clone(), index_names(3))?);
    put(
        "pushout_nonreflecting.json",
        "diagram",
        io::span_to_json(
            &d3,
            &[(d3.clone(), vec![0, 1, 2]), (t3.clone(), vec![0, 1, 2])],
        ),
        serde_json::json!({"error": "LegNotReflecting(1)"}),
    )?;

    let l3 = Arc::new(affine_nil_square(3, 1, n)?);
    put(
        "coproduct_affine_z3.json",
        "coproduct",
        serde_json::json!({"factors": [io::algebra_to_json(&l3), io::algebra_to_json(&l3)]}),
        serde_json::json!({"apex_carrier": 6}),
    )?;

    let z4 = Arc::new(abelian_total(4, n)?);
    put(
        "congruence_z4_mod2.json",
        "congruence",
        serde_json::json!({"algebra": io::algebra_to_json(&z4), "classes": [0, 1, 0, 1]}),
        serde_json::json!({"is_kernel_pair": true, "apex_carrier": 2}),
    )?;
    let rel_names: Vec<String> = (0..9).map(|z| format!("({},{})", z / 3, z % 3)).collect();
    put(
        "congruence_discrete_z3.json",
        "congruence",
        serde_json::json!({
            "algebra": io::algebra_to_json(&t3),
            "classes": [0, 0, 0],
            "rel_istructure": IStructure::discrete(rel_names, n).to_json(),
        }),
        serde_json::json!({"is_kernel_pair": false, "error": "JointReflectionFailure"}),
    )?;

    let chart = |subset: &[usize]| -> Result<serde_json::Value> {
        Ok(serde_json::json!({
            "subset": subset,
            "algebra": io::algebra_to_json(&line.restrict(subset)?),
        }))
    };
    put(
        "atlas_z4.json",
        "atlas",
        serde_json::json!({
            "ambient": line.carrier(),
            "charts": [chart(&[])?, chart(&[0, 2])?, chart(&[1, 3])?],
        }),
        serde_json::json!({"carrier": 4, "equals": "affine_z4_nilsquare.json"}),
    )?;

    let abcd: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
    let aff = affine_clone_zmod(3, n)?;
    let disc = |subset: &[usize]| -> Result<serde_json::Value> {
        let names = subset.iter().map(|&i| abcd[i].clone()).collect();
        Ok(serde_json::json!({
            "subset": subset,
            "algebra": io::algebra_to_json(&discrete_affine(aff.clone(), names)?),
        }))
    };
    put(
        "atlas_three_charts.json",
        "atlas",
        serde_json::json!({
            "ambient": abcd,
            "charts": [disc(&[])?, disc(&[1])?, disc(&[2])?, disc(&[0, 1])?, disc(&[1, 2])?, disc(&[2, 3])?],
        }),
        serde_json::json!({"carrier": 4}),
    )?;

    let path = dir.join("index.json");
    let text = serde_json::to_string_pretty(&index).expect("plain data serialises");
    std::fs::write(&path, text + "\n").map_err(|e| Error::InvalidInput(e.to_string()))?;
    written.push(path);
    Ok(written)
}
