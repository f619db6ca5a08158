//! Acceptance gate: ten criteria, each with its time bound. Prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use infinialg_core::atlas::{glue_atlas, Atlas, Chart};
use infinialg_core::colimits::{coequalizer_congruence, coproduct, wide_pushout};
use infinialg_core::corpus::{self, Clones};
use infinialg_core::gallery;
use infinialg_core::istructure::index_names;
use infinialg_core::limits::{
    equalizer, is_kernel_pair, is_regular_epi, kernel_pair, product, pullback,
};
use infinialg_core::oracle;
use infinialg_core::universal::{verify_universal_property, Diagram};
use infinialg_core::{
    clone_hom_check, free_clone, parse_presentation, theory_of_clone, validate_clone,
    validate_ialgebra, AbstractClone, CloneHom, Error, IHom, SearchBudget,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn budget() -> SearchBudget {
    SearchBudget::default()
}

fn clone_laws() -> Outcome {
    let b = budget();
    let semi = parse_presentation(gallery::SEMILATTICE).map_err(e2s)?;
    let pointed = parse_presentation(gallery::POINTED).map_err(e2s)?;
    let cases: Vec<(&str, AbstractClone, usize, usize)> = vec![
        (
            "free semilattice",
            free_clone(&semi, 2, 4, &b).map_err(e2s)?.0,
            oracle::count_semilattice_ops(2),
            3,
        ),
        (
            "free pointed",
            free_clone(&pointed, 2, 2, &b).map_err(e2s)?.0,
            oracle::count_pointed_ops(2),
            3,
        ),
        (
            "affine Z/4",
            gallery::affine_clone(&gallery::ring_zmod(4).map_err(e2s)?, "affine(Z/4,3)", 3)
                .map_err(e2s)?,
            oracle::count_affine_ops(4, 2),
            4,
        ),
        (
            "abelian Z/4",
            gallery::abelian_exp_clone(4, 3).map_err(e2s)?,
            oracle::count_abelian_ops(4, 2),
            16,
        ),
        (
            "endo {0,1}",
            AbstractClone::endo(&index_names(2), 2, &b).map_err(e2s)?,
            oracle::count_endo_ops(2, 2) as usize,
            16,
        ),
    ];
    let mut sizes = Vec::new();
    for (name, c, counted, stated) in &cases {
        let r = validate_clone(c, &b);
        ensure(r.violation_count == 0, || {
            format!("{name}: {} violations", r.violation_count)
        })?;
        ensure(c.size(2) == *counted && *counted == *stated, || {
            format!(
                "{name}: |O(2)| = {}, oracle {counted}, stated {stated}",
                c.size(2)
            )
        })?;
        sizes.push(c.size(2));
    }
    Ok(format!("0 violations; |O(2)| = {sizes:?}"))
}

/// The pointed-set clone tabulated by hand: op `j < n` is the projection
/// `x_{j+1}`, op `n` is the constant.
fn hand_pointed(n_max: usize) -> Result<AbstractClone, String> {
    let names = (0..=n_max)
        .map(|n| {
            let mut v: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
            v.push("e".into());
            v
        })
        .collect();
    let proj = (0..=n_max).map(|n| (0..n).collect()).collect();
    AbstractClone::tabulate("pointed", names, proj, |n, k, sigma, args| {
        if sigma == n {
            k
        } else {
            args[sigma]
        }
    })
    .map_err(e2s)
}

fn round_trip() -> Outcome {
    let b = budget();
    let c = hand_pointed(2)?;
    let p = theory_of_clone(&c, &b).map_err(e2s)?;
    let (f, rep) = free_clone(&p, 2, 3, &b).map_err(e2s)?;
    ensure(rep.saturated, || "free clone did not saturate".into())?;
    let iso = oracle::brute_clone_iso_search(&f, &c, &b)
        .map_err(e2s)?
        .ok_or("no arity-wise bijection found")?;
    let h = CloneHom {
        source: &f,
        target: &c,
        maps: iso,
    };
    ensure(clone_hom_check(&h), || {
        "bijection is not a clone hom".into()
    })?;
    Ok(format!(
        "{} symbols, {} equations, sizes {:?}",
        p.signature.len(),
        p.equations.len(),
        f.sizes()
    ))
}

fn ialgebra_validity() -> Outcome {
    let mut out = Vec::new();
    for k in [1, 2] {
        let a = gallery::affine_nil_square(4, k, 3).map_err(e2s)?;
        let r = validate_ialgebra(&a);
        ensure(r.violation_count == 0 && r.is_exhaustive(), || {
            format!(
                "k = {k}: {} violations, exhaustive {}",
                r.violation_count,
                r.is_exhaustive()
            )
        })?;
        let pairs = oracle::brute_nil_square_pairs(4, k);
        ensure(a.istructure().tuples(2).len() == pairs, || {
            format!(
                "k = {k}: {} pairs, oracle {pairs}",
                a.istructure().tuples(2).len()
            )
        })?;
        out.push(format!("k={k}: {} points, {pairs} pairs", a.size()));
    }
    Ok(format!("0 violations, exhaustive; {}", out.join("; ")))
}

fn injective(map: &[usize]) -> bool {
    let distinct: BTreeSet<_> = map.iter().collect();
    distinct.len() == map.len()
}

/// Failures of the lifting claim are tallied rather than returned early,
/// split by whether every leg of the diagram is injective. Anything else
/// going wrong is reported at once.
fn first_gluing() -> Outcome {
    let b = budget();
    let pointed = Arc::new(gallery::pointed_clone(3).map_err(e2s)?);
    let mut rng = corpus::rng(4);
    let mut panel_total = 0;
    let (mut injective_cases, mut no_action, mut not_reflecting) = (0, 0, 0);
    let mut injective_failures = Vec::new();
    for i in 0..100 {
        let case = corpus::reflecting_span(&mut rng, &pointed).map_err(e2s)?;
        ensure(
            case.source.size() <= 5 && case.legs.iter().all(|l| l.target.size() <= 5),
            || format!("diagram {i}: carrier above 5"),
        )?;
        ensure((2..=3).contains(&case.legs.len()), || {
            format!("diagram {i}: {} legs", case.legs.len())
        })?;
        ensure(case.legs.iter().all(|l| l.flags.reflects), || {
            format!("diagram {i}: an input leg does not reflect")
        })?;
        ensure(case.targets.len() <= 3, || {
            format!("diagram {i}: panel too big")
        })?;
        let all_injective = case.legs.iter().all(|l| injective(&l.map));
        injective_cases += all_injective as usize;
        let r = match wide_pushout(&case.source, &case.legs) {
            Ok(r) => r,
            Err(Error::InternalInconsistency { .. }) => {
                no_action += 1;
                if all_injective {
                    injective_failures.push(i);
                }
                continue;
            }
            Err(e) => return Err(format!("diagram {i}: {e}")),
        };
        if !r.legs.iter().all(|l| l.flags.reflects) {
            not_reflecting += 1;
            if all_injective {
                injective_failures.push(i);
            }
        }
        let parts: Vec<usize> = case.legs.iter().map(|l| l.target.size()).collect();
        let offsets: Vec<usize> = parts
            .iter()
            .scan(0, |acc, &s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect();
        let (mut f, mut g) = (Vec::new(), Vec::new());
        for (li, l) in case.legs.iter().enumerate().skip(1) {
            for a in 0..case.source.size() {
                f.push(offsets[0] + case.legs[0].map[a]);
                g.push(offsets[li] + l.map[a]);
            }
        }
        let set_classes = oracle::brute_set_coequalizer(&f, &g, parts.iter().sum()).len();
        ensure(r.apex.size() == set_classes, || {
            format!(
                "diagram {i}: apex {} vs set pushout {set_classes}",
                r.apex.size()
            )
        })?;
        ensure(validate_ialgebra(&r.apex).is_valid(), || {
            format!("diagram {i}: apex is not an i-algebra")
        })?;
        let d = Diagram::Span {
            source: case.source.clone(),
            legs: case.legs.clone(),
        };
        let rep = verify_universal_property(&r, &d, &case.targets, &b)
            .map_err(|e| format!("diagram {i}: {e}"))?;
        ensure(rep.passed, || {
            format!("diagram {i}: universal property fails: {rep:?}")
        })?;
        panel_total += case.targets.len();
    }
    ensure(injective_failures.is_empty(), || {
        format!("diagrams with injective legs fail: {injective_failures:?}")
    })?;
    let summary = format!(
        "{injective_cases} injective-leg diagrams all lift with reflecting legs; \
         {panel_total} test targets, each with a unique mediating map"
    );
    ensure(no_action == 0 && not_reflecting == 0, || {
        format!(
            "{summary}; among {} diagrams with a collapsing leg, {no_action} admit no \
             consistent action on the set pushout and {not_reflecting} have a \
             non-reflecting output leg",
            100 - injective_cases
        )
    })?;
    Ok(summary)
}

fn coproduct_laws() -> Outcome {
    let abelian2 = gallery::abelian_clone_zmod(2, 3).map_err(e2s)?;
    let mut rng = corpus::rng(5);
    let mut counts = [0; 2];
    for i in 0..50 {
        let (case, shared) = if i % 2 == 0 {
            (corpus::affine_coproduct(&mut rng).map_err(e2s)?, false)
        } else {
            (
                corpus::abelian2_coproduct(&mut rng, &abelian2).map_err(e2s)?,
                true,
            )
        };
        let sum: usize = case.factors.iter().map(|f| f.size()).sum();
        let k = case.factors.len();
        let expected = if shared { sum - (k - 1) } else { sum };
        let r = coproduct(&case.clone, &case.factors).map_err(e2s)?;
        ensure(r.apex.size() == expected, || {
            format!("instance {i}: apex {} expected {expected}", r.apex.size())
        })?;
        counts[shared as usize] += 1;
    }
    Ok(format!(
        "{} affine, {} AbelianExp2 instances",
        counts[0], counts[1]
    ))
}

fn second_gluing() -> Outcome {
    let clones = Clones::new().map_err(e2s)?;
    let mut rng = corpus::rng(6);
    let (mut kernels, mut refused) = (0, 0);
    for i in 0..100 {
        let cg = corpus::random_congruence(&mut rng, &clones).map_err(e2s)?;
        ensure(cg.base().size() <= 4, || {
            format!("congruence {i}: carrier above 4")
        })?;
        let kp = is_kernel_pair(&cg);
        let witness = oracle::brute_kernel_pair_witness(&cg);
        ensure(kp == witness.is_some(), || {
            format!(
                "congruence {i}: is_kernel_pair {kp} but oracle {}",
                witness.is_some()
            )
        })?;
        if kp {
            let q = coequalizer_congruence(&cg).map_err(|e| format!("congruence {i}: {e}"))?;
            let back = kernel_pair(&q.legs[0]).map_err(e2s)?;
            let have: BTreeSet<_> = back.pairs().into_iter().collect();
            let want: BTreeSet<_> = cg.pairs().into_iter().collect();
            ensure(have == want, || {
                format!("congruence {i}: kernel pair relation differs")
            })?;
            ensure(
                back.pairs() == cg.pairs()
                    && back.rel.istructure().same_relations(cg.rel.istructure())
                    && oracle::brute_has_product_structure(&cg),
                || format!("congruence {i}: kernel pair structure differs"),
            )?;
            kernels += 1;
        } else {
            match coequalizer_congruence(&cg) {
                Err(Error::JointReflectionFailure(_)) => refused += 1,
                other => return Err(format!("congruence {i}: expected refusal, got {other:?}")),
            }
        }
    }
    ensure(kernels > 0 && refused > 0, || {
        format!("corpus is one-sided: {kernels} kernel pairs, {refused} refusals")
    })?;
    Ok(format!(
        "{kernels} kernel pairs reproduced, {refused} joint reflection failures"
    ))
}

fn regularity() -> Outcome {
    let clones = Clones::new().map_err(e2s)?;
    let mut rng = corpus::rng(7);
    let mut kinds = std::collections::BTreeMap::new();
    for i in 0..50 {
        let case = corpus::regular_epi_case(&mut rng, &clones).map_err(e2s)?;
        let e = &case.epi;
        ensure(
            is_regular_epi(e)
                && oracle::brute_is_regular_epi(
                    e.source.istructure(),
                    e.target.istructure(),
                    &e.map,
                ),
            || format!("case {i}: the epi is not regular"),
        )?;
        let pb = pullback(e, &case.map).map_err(e2s)?;
        let p = &pb.second;
        ensure(is_regular_epi(p), || {
            format!("case {i} ({}): projection is not a regular epi", case.kind)
        })?;
        ensure(
            oracle::brute_is_regular_epi(p.source.istructure(), p.target.istructure(), &p.map),
            || format!("case {i}: oracle disagrees"),
        )?;
        *kinds.entry(case.kind).or_insert(0) += 1;
    }
    Ok(format!("50 pullbacks {kinds:?}"))
}

fn counterexamples() -> Outcome {
    let suite = gallery::counterexample_suite().map_err(e2s)?;
    ensure(suite.len() == 3 && suite.iter().all(|r| r.passed), || {
        gallery::suite_text(&suite)
    })?;
    let get = |name: &str| {
        suite
            .iter()
            .find(|r| r.name == name)
            .map(|r| r.observed.clone())
    };
    let a = get("coeq_totals").ok_or("missing fixture a")?;
    ensure(a["set_carrier"] == 3 && a["ialg_carrier"] == 2, || {
        format!("fixture a: {a}")
    })?;
    let b = get("not_kernel_pair").ok_or("missing fixture b")?;
    ensure(
        b["joint_reflection_failure"] == true && b["one_point_lift_valid"] == true,
        || format!("fixture b: {b}"),
    )?;
    let c = get("non_reflecting_identity").ok_or("missing fixture c")?;
    ensure(c["reflects"] == false, || format!("fixture c: {c}"))?;
    Ok("set 3 vs i-algebra 2; JointReflectionFailure + valid lift; reflects = false".into())
}

fn third_gluing() -> Outcome {
    let line = gallery::affine_nil_square(4, 1, 3).map_err(e2s)?;
    let chart = |s: &[usize]| -> Result<Chart, String> {
        Ok(Chart {
            subset: s.to_vec(),
            algebra: Arc::new(line.restrict(s).map_err(e2s)?),
        })
    };
    let at = Atlas::new(
        line.carrier().to_vec(),
        vec![chart(&[])?, chart(&[0, 2])?, chart(&[1, 3])?],
    )
    .map_err(e2s)?;
    let glued = glue_atlas(&at).map_err(e2s)?;
    ensure(glued.same_as(&line), || {
        "glued Z/4 differs from the nil-square line".into()
    })?;

    let aff = gallery::affine_clone_zmod(3, 3).map_err(e2s)?;
    let names = ["a", "b", "c", "d"];
    let disc = |s: &[usize]| -> Result<Chart, String> {
        let carrier = s.iter().map(|&i| names[i].to_string()).collect();
        Ok(Chart {
            subset: s.to_vec(),
            algebra: Arc::new(gallery::discrete_affine(aff.clone(), carrier).map_err(e2s)?),
        })
    };
    let subsets: [&[usize]; 6] = [&[], &[1], &[2], &[0, 1], &[1, 2], &[2, 3]];
    let charts = subsets
        .iter()
        .map(|s| disc(s))
        .collect::<Result<Vec<_>, _>>()?;
    let at = Atlas::new(
        names.iter().map(|s| s.to_string()).collect(),
        charts.clone(),
    )
    .map_err(e2s)?;
    let glued3 = glue_atlas(&at).map_err(e2s)?;
    ensure(glued3.size() == 4, || {
        format!("chain atlas glues to {} points", glued3.size())
    })?;

    let empty = charts[0].algebra.clone();
    let legs = charts[3..]
        .iter()
        .map(|c| IHom::new(empty.clone(), c.algebra.clone(), Vec::new()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(e2s)?;
    let one_shot = wide_pushout(&empty, &legs).map_err(e2s)?;
    ensure(one_shot.apex.size() == 6, || {
        format!("one-shot pushout has {} points", one_shot.apex.size())
    })?;
    Ok("Z/4 atlas = nil-square line; chain atlas 4 points (one-shot 6)".into())
}

fn limit_lifting() -> Outcome {
    let line = gallery::affine_nil_square(4, 1, 3).map_err(e2s)?;
    let plane = gallery::affine_nil_square(4, 2, 3).map_err(e2s)?;
    let p = product(&line, &line).map_err(e2s)?;
    ensure(p.same_as(&plane), || {
        "product differs from the nil-square plane".into()
    })?;

    let z4 = Arc::new(gallery::abelian_total(4, 3).map_err(e2s)?);
    let id = IHom::identity(z4.clone());
    let neg = IHom::new(z4.clone(), z4.clone(), vec![0, 3, 2, 1]).map_err(e2s)?;
    let (eq, incl) = equalizer(&id, &neg).map_err(e2s)?;
    let brute = oracle::brute_equalizer(&id.map, &neg.map);
    ensure(incl.map == brute && eq.size() == 2, || {
        format!("equalizer {:?} vs oracle {brute:?}", incl.map)
    })?;

    let c4 = gallery::abelian_clone_zmod(4, 3).map_err(e2s)?;
    let a = Arc::new(gallery::abelian_total_over(c4.clone(), 4).map_err(e2s)?);
    let b = Arc::new(gallery::abelian_total_over(c4, 2).map_err(e2s)?);
    let m2 = IHom::new(a, b, vec![0, 1, 0, 1]).map_err(e2s)?;
    let kp = kernel_pair(&m2).map_err(e2s)?;
    let brute: BTreeSet<_> = oracle::brute_kernel_pairs(&m2.map).into_iter().collect();
    let have: BTreeSet<_> = kp.pairs().into_iter().collect();
    ensure(have == brute && is_kernel_pair(&kp), || {
        format!("kernel pair {have:?} vs oracle {brute:?}")
    })?;
    Ok(format!(
        "product = plane; equalizer {brute_eq:?}; kernel pair of {} pairs",
        have.len(),
        brute_eq = incl.map
    ))
}

struct Criterion {
    id: usize,
    name: &'static str,
    bound: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "clone laws",
            bound: Duration::from_secs(10),
            run: clone_laws,
        },
        Criterion {
            id: 2,
            name: "round trip",
            bound: Duration::from_secs(60),
            run: round_trip,
        },
        Criterion {
            id: 3,
            name: "i-algebra validity",
            bound: Duration::from_secs(30),
            run: ialgebra_validity,
        },
        Criterion {
            id: 4,
            name: "first gluing theorem",
            bound: Duration::from_secs(300),
            run: first_gluing,
        },
        Criterion {
            id: 5,
            name: "coproduct size laws",
            bound: Duration::from_secs(30),
            run: coproduct_laws,
        },
        Criterion {
            id: 6,
            name: "second gluing theorem",
            bound: Duration::from_secs(300),
            run: second_gluing,
        },
        Criterion {
            id: 7,
            name: "regularity",
            bound: Duration::from_secs(120),
            run: regularity,
        },
        Criterion {
            id: 8,
            name: "counterexample suite",
            bound: Duration::from_secs(10),
            run: counterexamples,
        },
        Criterion {
            id: 9,
            name: "third gluing theorem",
            bound: Duration::from_secs(10),
            run: third_gluing,
        },
        Criterion {
            id: 10,
            name: "limit lifting",
            bound: Duration::from_secs(10),
            run: limit_lifting,
        },
    ];
    println!("acceptance (seed {:#x})", corpus::seed());
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let verdict = match outcome {
            Ok(detail) if took <= c.bound => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; over the {:?} bound", c.bound)),
            Err(why) => ("FAIL", why),
        };
        if verdict.0 == "FAIL" {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {}: {:.2?} (< {:?}) {}",
            verdict.0, c.id, c.name, took, c.bound, verdict.1
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
