use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Value};

use infinialg_core::gallery;
use infinialg_core::io::{algebra_to_json, clone_to_json, Loader};
use infinialg_core::oracle;
use infinialg_core::{
    clone_hom_check, coequalizer_congruence, coequalizer_reflecting, coproduct, equalizer,
    free_clone, glue_atlas, image_closed, image_istructure, initial_object, is_i_morphism, is_ihom,
    is_kernel_pair, is_regular_epi, kernel_pair, parse_presentation_with, parse_term, product,
    pullback, reflects_istructure, term_substitute, theory_of_clone, total_algebra, validate_clone,
    validate_ialgebra, wide_pushout, CloneHom, CoconeResult, Congruence, Error, IAlgebra, IHom,
    Result, SearchBudget, ValidationReport,
};

use crate::inputs::{self, check_map, decode, field, read_json, read_text};

/// What a command produced: a JSON result, summary lines for text output, and
/// whether the run counts as a success.
pub struct Outcome {
    pub ok: bool,
    pub result: Value,
    pub lines: Vec<String>,
}

impl Outcome {
    fn ok(result: Value, lines: Vec<String>) -> Self {
        Outcome {
            ok: true,
            result,
            lines,
        }
    }

    fn verdict(ok: bool, result: Value, lines: Vec<String>) -> Self {
        Outcome { ok, result, lines }
    }
}

pub struct Ctx {
    pub n_max: usize,
    pub budget: SearchBudget,
}

impl Ctx {
    fn loader(&self) -> Loader {
        Loader::new(self.budget)
    }
}

fn report_outcome(report: ValidationReport) -> Outcome {
    let ok = report.is_valid();
    let line = format!(
        "{}: {} violations{}",
        report.subject,
        report.violation_count,
        if report.is_exhaustive() {
            ""
        } else {
            " (sampled)"
        }
    );
    let mut lines = vec![line];
    lines.extend(
        report
            .violations
            .iter()
            .take(10)
            .map(|v| format!("  {} {:?}: {}", v.axiom, v.indices, v.witness)),
    );
    Outcome::verdict(
        ok,
        json!({
            "subject": report.subject,
            "violations": report.violation_count,
            "exhaustive": report.is_exhaustive(),
            "report": report,
        }),
        lines,
    )
}

fn flags_line(label: &str, h: &IHom) -> String {
    let f = h.flags;
    format!(
        "{label}: i_morphism={} equivariant={} reflects={} closed_image={}",
        f.i_morphism, f.equivariant, f.reflects, f.closed_image
    )
}

fn cocone_outcome(r: &CoconeResult, what: &str) -> Outcome {
    let mut lines = vec![format!(
        "{what}: apex carrier {} {:?}",
        r.apex.size(),
        r.apex.carrier()
    )];
    lines.extend(
        r.legs
            .iter()
            .enumerate()
            .map(|(i, l)| flags_line(&format!("leg {i}"), l)),
    );
    let mut result = r.to_json(clone_to_json(r.apex.clone_ref()));
    result["apex_carrier"] = json!(r.apex.size());
    Outcome::ok(result, lines)
}

pub enum ValidateTarget<'a> {
    Clone(&'a str),
    Presentation(&'a Path),
    IStructure(&'a Path),
    IAlgebra(&'a Path),
    Total(&'a Path),
    Hom(&'a Path),
    Map(&'a Path),
    CloneHom(&'a Path),
}

pub fn validate(ctx: &Ctx, target: ValidateTarget<'_>) -> Result<Outcome> {
    match target {
        ValidateTarget::Clone(r) => {
            let c = inputs::clone_arg(r, &ctx.budget)?;
            let mut out = report_outcome(validate_clone(&c, &ctx.budget));
            out.result["sizes"] = json!(c.sizes());
            out.lines.push(format!("sizes {:?}", c.sizes()));
            Ok(out)
        }
        ValidateTarget::Presentation(p) => {
            let pres = parse_presentation_with(&read_text(p)?, ctx.n_max)?;
            Ok(Outcome::ok(
                json!({
                    "name": pres.name,
                    "symbols": pres.signature.symbols(),
                    "equations": pres.equations.len(),
                }),
                vec![format!(
                    "theory {}: {} symbols, {} equations",
                    pres.name,
                    pres.signature.len(),
                    pres.equations.len()
                )],
            ))
        }
        ValidateTarget::IStructure(p) => {
            let s = inputs::istructure(&read_json(p)?, ctx.n_max, &ctx.budget)?;
            let mut out = report_outcome(s.validate());
            let sizes: Vec<usize> = (0..=s.n_max()).map(|n| s.tuples(n).len()).collect();
            out.result["block_sizes"] = json!(sizes);
            out.result["istructure"] = s.to_json();
            out.lines.push(format!("block sizes {sizes:?}"));
            Ok(out)
        }
        ValidateTarget::IAlgebra(p) => {
            let a = ctx.loader().algebra(&read_json(p)?)?;
            Ok(report_outcome(validate_ialgebra(&a)))
        }
        ValidateTarget::Total(p) => {
            let v = read_json(p)?;
            let clone = ctx.loader().clone_from(field(&v, "clone")?)?;
            let carrier: Vec<String> = decode(field(&v, "carrier")?)?;
            let a = total_from_tables(clone, carrier, field(&v, "action")?)?;
            let mut out = report_outcome(validate_ialgebra(&a));
            out.result["algebra"] = algebra_to_json(&a);
            Ok(out)
        }
        ValidateTarget::Hom(p) => {
            let v = read_json(p)?;
            let mut loader = ctx.loader();
            let a = loader.algebra(field(&v, "source")?)?;
            let b = loader.algebra(field(&v, "target")?)?;
            let map: Vec<usize> = decode(field(&v, "map")?)?;
            match is_ihom(&map, &a, &b) {
                Ok(h) => Ok(Outcome::ok(
                    json!({"accepted": true, "flags": h.flags}),
                    vec![flags_line("accepted", &h)],
                )),
                Err(e @ Error::NotIHom { .. }) => Ok(Outcome::verdict(
                    false,
                    json!({"accepted": false, "reason": e.to_string()}),
                    vec![format!("rejected: {e}")],
                )),
                Err(e) => Err(e),
            }
        }
        ValidateTarget::Map(p) => {
            let v = read_json(p)?;
            let s = inputs::istructure(field(&v, "source")?, ctx.n_max, &ctx.budget)?;
            let t = inputs::istructure(field(&v, "target")?, ctx.n_max, &ctx.budget)?;
            let map: Vec<usize> = decode(field(&v, "map")?)?;
            check_map(&map, s.size(), t.size())?;
            if s.n_max() != t.n_max() {
                return Err(Error::InvalidInput(
                    "structures have different truncation bounds".into(),
                ));
            }
            let i_morphism = is_i_morphism(&map, &s, &t);
            let reflects = reflects_istructure(&map, &s, &t);
            let closed = image_closed(&map, &s, &t);
            Ok(Outcome::verdict(
                i_morphism,
                json!({"i_morphism": i_morphism, "reflects": reflects, "closed_image": closed}),
                vec![format!(
                    "i_morphism={i_morphism} reflects={reflects} closed_image={closed}"
                )],
            ))
        }
        ValidateTarget::CloneHom(p) => {
            let v = read_json(p)?;
            let mut loader = ctx.loader();
            let source = loader.clone_from(field(&v, "source")?)?;
            let target = loader.clone_from(field(&v, "target")?)?;
            let names: Vec<Vec<String>> = decode(field(&v, "maps")?)?;
            if names.len() != source.n_max() + 1 || source.n_max() != target.n_max() {
                return Err(Error::InvalidInput(
                    "maps must list one arity block per n ≤ n_max of both clones".into(),
                ));
            }
            let mut maps = Vec::new();
            for (n, block) in names.iter().enumerate() {
                if block.len() != source.size(n) {
                    return Err(Error::InvalidInput(format!(
                        "arity {n} block has {} entries, the source has {} operations",
                        block.len(),
                        source.size(n)
                    )));
                }
                maps.push(
                    block
                        .iter()
                        .map(|name| {
                            target.op_index(n, name).ok_or_else(|| {
                                Error::InvalidInput(format!(
                                    "no operation {name:?} of arity {n} in the target"
                                ))
                            })
                        })
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            let h = CloneHom {
                source: &source,
                target: &target,
                maps,
            };
            let ok = clone_hom_check(&h);
            Ok(Outcome::verdict(
                ok,
                json!({"clone_hom": ok}),
                vec![format!("clone homomorphism: {ok}")],
            ))
        }
    }
}

/// A total algebra from action entries in the i-algebra JSON layout; every
/// cell of every arity must be present.
fn total_from_tables(
    clone: Arc<infinialg_core::AbstractClone>,
    carrier: Vec<String>,
    action: &Value,
) -> Result<IAlgebra> {
    #[derive(serde::Deserialize)]
    struct Entry {
        n: usize,
        op: String,
        tuple: Vec<usize>,
        result: usize,
    }
    let entries: Vec<Entry> = decode(action)?;
    let size = carrier.len();
    let mut table: HashMap<(usize, usize, Vec<usize>), usize> = HashMap::new();
    for e in entries {
        let op = clone.op_index(e.n, &e.op).ok_or_else(|| {
            Error::InvalidInput(format!("unknown operation {:?} at arity {}", e.op, e.n))
        })?;
        if e.tuple.len() != e.n || e.tuple.iter().chain([&e.result]).any(|&x| x >= size) {
            return Err(Error::InvalidInput(format!(
                "action entry {:?} {:?} does not fit the carrier",
                e.op, e.tuple
            )));
        }
        table.insert((e.n, op, e.tuple), e.result);
    }
    for n in 0..=clone.n_max() {
        let cells = (size as u128).saturating_pow(n as u32) * clone.size(n) as u128;
        let present = table.keys().filter(|k| k.0 == n).count() as u128;
        if present != cells {
            return Err(Error::InvalidInput(format!(
                "arity {n} has {present} action entries, a total action needs {cells}"
            )));
        }
    }
    total_algebra(clone, carrier, move |n, op, x| table[&(n, op, x.to_vec())])
}

pub enum FreeCloneMode<'a> {
    Presentation {
        path: &'a Path,
        depth: usize,
    },
    TheoryOf(&'a str),
    Gallery(&'a str),
    Substitute {
        path: &'a Path,
        term: &'a str,
        into: &'a [String],
        vars: usize,
    },
}

pub fn free_clone_cmd(ctx: &Ctx, mode: FreeCloneMode<'_>) -> Result<Outcome> {
    match mode {
        FreeCloneMode::Presentation { path, depth } => {
            let p = parse_presentation_with(&read_text(path)?, ctx.n_max)?;
            let (c, rep) = free_clone(&p, ctx.n_max, depth, &ctx.budget)?;
            let report = validate_clone(&c, &ctx.budget);
            let lines = vec![
                format!(
                    "{}: sizes {:?}, saturated after depth {}",
                    p.name,
                    c.sizes(),
                    rep.depth_used
                ),
                format!("clone laws: {} violations", report.violation_count),
            ];
            Ok(Outcome::verdict(
                report.is_valid(),
                json!({
                    "sizes": c.sizes(),
                    "saturation": rep,
                    "violations": report.violation_count,
                    "clone": c.to_json(&ctx.budget)?,
                }),
                lines,
            ))
        }
        FreeCloneMode::TheoryOf(r) => {
            let c = inputs::clone_arg(r, &ctx.budget)?;
            let p = theory_of_clone(&c, &ctx.budget)?;
            Ok(Outcome::ok(
                json!({
                    "clone": c.label(),
                    "symbols": p.signature.len(),
                    "equations": p.equations.len(),
                    "presentation": p.to_string(),
                }),
                vec![format!(
                    "theory of {}: {} symbols, {} equations",
                    c.label(),
                    p.signature.len(),
                    p.equations.len()
                )],
            ))
        }
        FreeCloneMode::Gallery(r) => {
            let c = inputs::clone_arg(r, &ctx.budget)?;
            let names: Vec<&[String]> = (0..=c.n_max()).map(|n| c.names(n)).collect();
            Ok(Outcome::ok(
                json!({"label": c.label(), "sizes": c.sizes(), "operations": names}),
                vec![format!("{}: sizes {:?}", c.label(), c.sizes())],
            ))
        }
        FreeCloneMode::Substitute {
            path,
            term,
            into,
            vars,
        } => {
            let p = parse_presentation_with(&read_text(path)?, ctx.n_max)?;
            let t = parse_term(term, &p.signature, into.len())?;
            let subs = into
                .iter()
                .map(|s| parse_term(s, &p.signature, vars))
                .collect::<Result<Vec<_>>>()?;
            let r = term_substitute(&t, &subs)?;
            Ok(Outcome::ok(
                json!({"term": r.to_string()}),
                vec![r.to_string()],
            ))
        }
    }
}

#[derive(Clone, Copy)]
pub enum LimitKind {
    Product,
    Equalizer,
    Pullback,
    KernelPair,
    RegularEpi,
}

fn congruence_json(cg: &Congruence) -> Value {
    let (classes, count) = cg.classes();
    json!({
        "pairs": cg.pairs(),
        "classes": classes,
        "class_count": count,
        "is_kernel_pair": is_kernel_pair(cg),
        "rel": algebra_to_json(&cg.rel),
    })
}

pub fn limit(ctx: &Ctx, kind: LimitKind, diagram: &Path) -> Result<Outcome> {
    let v = read_json(diagram)?;
    let mut loader = ctx.loader();
    match kind {
        LimitKind::Product => {
            let factors = inputs::algebras(&mut loader, field(&v, "factors")?)?;
            let (first, rest) = factors
                .split_first()
                .ok_or_else(|| Error::InvalidInput("product needs at least one factor".into()))?;
            let mut apex = first.clone();
            for f in rest {
                apex = Arc::new(product(&apex, f)?);
            }
            let report = validate_ialgebra(&apex);
            let pairs = apex.istructure().tuples(2.min(apex.n_max())).len();
            Ok(Outcome::ok(
                json!({
                    "apex_carrier": apex.size(),
                    "neighbour_pairs": pairs,
                    "violations": report.violation_count,
                    "apex": algebra_to_json(&apex),
                }),
                vec![format!(
                    "product: carrier {}, {} neighbour pairs, {} violations",
                    apex.size(),
                    pairs,
                    report.violation_count
                )],
            ))
        }
        LimitKind::Equalizer => {
            let maps = loader.parallel(&v)?;
            let [f, g] = maps.as_slice() else {
                return Err(Error::InvalidInput(
                    "equalizer needs exactly two maps".into(),
                ));
            };
            let (e, inc) = equalizer(f, g)?;
            Ok(Outcome::ok(
                json!({
                    "apex_carrier": e.size(),
                    "inclusion": inc.map,
                    "oracle": oracle::brute_equalizer(&f.map, &g.map),
                    "apex": algebra_to_json(&e),
                }),
                vec![format!("equalizer: {:?}", e.carrier())],
            ))
        }
        LimitKind::Pullback => {
            let f = inputs::hom(&mut loader, field(&v, "f")?)?;
            let g = inputs::hom(&mut loader, field(&v, "g")?)?;
            let pb = pullback(&f, &g)?;
            Ok(Outcome::ok(
                json!({
                    "apex_carrier": pb.apex.size(),
                    "first": pb.first.map,
                    "second": pb.second.map,
                    "second_regular_epi": is_regular_epi(&pb.second),
                    "apex": algebra_to_json(&pb.apex),
                }),
                vec![
                    format!("pullback: carrier {:?}", pb.apex.carrier()),
                    format!(
                        "second projection regular epi: {}",
                        is_regular_epi(&pb.second)
                    ),
                ],
            ))
        }
        LimitKind::KernelPair => {
            let f = inputs::hom(&mut loader, &v)?;
            let cg = kernel_pair(&f)?;
            let (_, classes) = cg.classes();
            Ok(Outcome::ok(
                congruence_json(&cg),
                vec![format!(
                    "kernel pair: {} pairs, {} classes",
                    cg.pairs().len(),
                    classes
                )],
            ))
        }
        LimitKind::RegularEpi => {
            let f = inputs::hom(&mut loader, &v)?;
            let r = is_regular_epi(&f);
            Ok(Outcome::ok(
                json!({"regular_epi": r, "flags": f.flags}),
                vec![format!("regular epi: {r}"), flags_line("map", &f)],
            ))
        }
    }
}

#[derive(Clone, Copy)]
pub enum ColimitKind {
    Initial,
    Coproduct,
    Pushout,
    Coequalizer,
    Quotient,
    Image,
}

pub fn colimit(ctx: &Ctx, kind: ColimitKind, diagram: &Path) -> Result<Outcome> {
    let v = read_json(diagram)?;
    let mut loader = ctx.loader();
    match kind {
        ColimitKind::Initial => {
            let c = loader.clone_from(field(&v, "clone")?)?;
            let a = initial_object(&c)?;
            Ok(Outcome::ok(
                json!({"apex_carrier": a.size(), "apex": algebra_to_json(&a)}),
                vec![format!("initial object: {:?}", a.carrier())],
            ))
        }
        ColimitKind::Coproduct => {
            let factors = inputs::algebras(&mut loader, field(&v, "factors")?)?;
            let clone = match (v.get("clone"), factors.first()) {
                (Some(c), _) => loader.clone_from(c)?,
                (None, Some(f)) => f.clone_ref().clone(),
                (None, None) => {
                    return Err(Error::InvalidInput(
                        "an empty coproduct needs a \"clone\"".into(),
                    ))
                }
            };
            Ok(cocone_outcome(&coproduct(&clone, &factors)?, "coproduct"))
        }
        ColimitKind::Pushout => {
            let (source, legs) = loader.span(&v)?;
            Ok(cocone_outcome(&wide_pushout(&source, &legs)?, "pushout"))
        }
        ColimitKind::Coequalizer => {
            let maps = loader.parallel(&v)?;
            let sets = match maps.as_slice() {
                [f, g] => Some(oracle::brute_set_coequalizer(
                    &f.map,
                    &g.map,
                    f.target.size(),
                )),
                _ => None,
            };
            let mut out = cocone_outcome(&coequalizer_reflecting(&maps)?, "coequalizer");
            if let Some(s) = sets {
                out.result["set_carrier"] = json!(s.len());
                out.lines
                    .push(format!("set coequalizer: {} classes", s.len()));
            }
            Ok(out)
        }
        ColimitKind::Quotient => {
            let cg = loader.congruence(&v)?;
            let mut out = cocone_outcome(&coequalizer_congruence(&cg)?, "quotient");
            out.result["is_kernel_pair"] = json!(is_kernel_pair(&cg));
            Ok(out)
        }
        ColimitKind::Image => {
            let s = inputs::istructure(field(&v, "istructure")?, ctx.n_max, &ctx.budget)?;
            let map: Vec<usize> = decode(field(&v, "map")?)?;
            let target: Vec<String> = match v.get("target") {
                Some(t) => decode(t)?,
                None => {
                    infinialg_core::istructure::index_names(map.iter().max().map_or(0, |m| m + 1))
                }
            };
            check_map(&map, s.size(), target.len())?;
            let img = image_istructure(&map, &s, target)?;
            let sizes: Vec<usize> = (0..=img.n_max()).map(|n| img.tuples(n).len()).collect();
            Ok(Outcome::ok(
                json!({"block_sizes": sizes, "istructure": img.to_json()}),
                vec![format!("image structure: block sizes {sizes:?}")],
            ))
        }
    }
}

pub fn glue(ctx: &Ctx, atlas: &Path, compare: Option<&Path>) -> Result<Outcome> {
    let mut loader = ctx.loader();
    let at = loader.atlas(&read_json(atlas)?)?;
    let a = glue_atlas(&at)?;
    let report = validate_ialgebra(&a);
    let mut result = json!({
        "carrier": a.size(),
        "violations": report.violation_count,
        "algebra": algebra_to_json(&a),
    });
    let mut lines = vec![format!(
        "glued: carrier {:?}, {} violations",
        a.carrier(),
        report.violation_count
    )];
    let mut ok = report.is_valid();
    if let Some(path) = compare {
        let b = loader.algebra(&read_json(path)?)?;
        let identical = a.same_as(&b);
        result["identical"] = json!(identical);
        lines.push(format!("identical to {}: {identical}", path.display()));
        ok &= identical;
    }
    Ok(Outcome::verdict(ok, result, lines))
}

pub enum FixturesMode<'a> {
    Counterexamples,
    Write(&'a Path),
}

pub fn fixtures(mode: FixturesMode<'_>) -> Result<Outcome> {
    match mode {
        FixturesMode::Counterexamples => {
            let reports = gallery::counterexample_suite()?;
            let ok = reports.iter().all(|r| r.passed);
            let lines = gallery::suite_text(&reports)
                .lines()
                .map(str::to_string)
                .collect();
            Ok(Outcome::verdict(ok, json!({ "fixtures": reports }), lines))
        }
        FixturesMode::Write(dir) => {
            let written: Vec<PathBuf> = gallery::write_fixtures(dir)?;
            let names: Vec<String> = written
                .iter()
                .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
                .collect();
            Ok(Outcome::ok(
                json!({"written": names}),
                names.iter().map(|n| format!("wrote {n}")).collect(),
            ))
        }
    }
}

#[derive(Clone, Copy)]
pub enum OracleKind {
    Closure,
    SetCoequalizer,
    Iso,
    RoundTrip,
    KernelPair,
    NilSquare,
}

pub struct OracleArgs<'a> {
    pub input: Option<&'a Path>,
    pub other: Option<&'a Path>,
    pub clone: Option<&'a str>,
    pub depth: usize,
}

fn need<T>(x: Option<T>, flag: &str) -> Result<T> {
    x.ok_or_else(|| Error::InvalidInput(format!("this oracle needs {flag}")))
}

pub fn oracle_cmd(ctx: &Ctx, kind: OracleKind, args: OracleArgs<'_>) -> Result<Outcome> {
    match kind {
        OracleKind::Closure => {
            let v = read_json(need(args.input, "--input")?)?;
            let carrier = match v.get("carrier") {
                Some(c) => decode(c)?,
                None => infinialg_core::istructure::index_names(decode(field(&v, "size")?)?),
            };
            let gens = inputs::tuple_blocks(field(&v, "tuples")?)?;
            let brute =
                oracle::brute_istructure_closure(carrier.clone(), ctx.n_max, &gens, &ctx.budget)?;
            let fast = infinialg_core::IStructure::generate_from_tuples(carrier, ctx.n_max, &gens)?;
            let agree = brute == fast;
            let sizes: Vec<usize> = (0..=brute.n_max()).map(|n| brute.tuples(n).len()).collect();
            Ok(Outcome::verdict(
                agree,
                json!({"block_sizes": sizes, "agrees": agree, "istructure": brute.to_json()}),
                vec![format!(
                    "closure block sizes {sizes:?}; one-pass generation agrees: {agree}"
                )],
            ))
        }
        OracleKind::SetCoequalizer => {
            let v = read_json(need(args.input, "--input")?)?;
            let f: Vec<usize> = decode(field(&v, "f")?)?;
            let g: Vec<usize> = decode(field(&v, "g")?)?;
            let codomain: usize = decode(field(&v, "codomain")?)?;
            if f.len() != g.len() {
                return Err(Error::InvalidInput("f and g have different domains".into()));
            }
            check_map(&f, f.len(), codomain)?;
            check_map(&g, g.len(), codomain)?;
            let classes = oracle::brute_set_coequalizer(&f, &g, codomain);
            Ok(Outcome::ok(
                json!({"classes": classes, "class_count": classes.len()}),
                vec![format!("{} classes {:?}", classes.len(), classes)],
            ))
        }
        OracleKind::Iso => {
            let mut loader = ctx.loader();
            let a = loader.algebra(&read_json(need(args.input, "--input")?)?)?;
            let b = loader.algebra(&read_json(need(args.other, "--other")?)?)?;
            if !Arc::ptr_eq(a.clone_ref(), b.clone_ref()) {
                return Err(Error::DifferentClones);
            }
            let found = oracle::brute_iso_search(&a, &b, &ctx.budget)?;
            Ok(Outcome::verdict(
                found.is_some(),
                json!({"bijection": found}),
                vec![match &found {
                    Some(p) => format!("isomorphism {p:?}"),
                    None => "no isomorphism".to_string(),
                }],
            ))
        }
        OracleKind::RoundTrip => {
            let c = inputs::clone_arg(need(args.clone, "--clone")?, &ctx.budget)?;
            let p = theory_of_clone(&c, &ctx.budget)?;
            let (f, rep) = free_clone(&p, c.n_max(), args.depth, &ctx.budget)?;
            let iso = oracle::brute_clone_iso_search(&f, &c, &ctx.budget)?;
            let hom = iso.as_ref().is_some_and(|maps| {
                clone_hom_check(&CloneHom {
                    source: &f,
                    target: &c,
                    maps: maps.clone(),
                })
            });
            Ok(Outcome::verdict(
                hom,
                json!({
                    "sizes": f.sizes(),
                    "saturated": rep.saturated,
                    "isomorphic": hom,
                }),
                vec![format!(
                    "free clone of the theory of {}: sizes {:?}, isomorphic: {hom}",
                    c.label(),
                    f.sizes()
                )],
            ))
        }
        OracleKind::KernelPair => {
            let cg = ctx
                .loader()
                .congruence(&read_json(need(args.input, "--input")?)?)?;
            let fast = is_kernel_pair(&cg);
            let witness = oracle::brute_kernel_pair_witness(&cg);
            let agree = fast == witness.is_some();
            Ok(Outcome::verdict(
                agree,
                json!({"is_kernel_pair": fast, "oracle_witness": witness, "agrees": agree}),
                vec![format!("kernel pair: {fast}; oracle agrees: {agree}")],
            ))
        }
        OracleKind::NilSquare => {
            let v = read_json(need(args.input, "--input")?)?;
            let m: usize = decode(field(&v, "ring")?)?;
            let k: usize = decode(field(&v, "k")?)?;
            let ring = gallery::ring_zmod(m)?;
            let s =
                infinialg_core::IStructure::nil_square(&ring, k, 2.max(ctx.n_max), &ctx.budget)?;
            let pairs = oracle::brute_nil_square_pairs(m, k);
            let agree = pairs == s.tuples(2).len();
            Ok(Outcome::verdict(
                agree,
                json!({"pairs": pairs, "agrees": agree}),
                vec![format!(
                    "nil-square pairs over Z/{m}, k={k}: {pairs}; agrees: {agree}"
                )],
            ))
        }
    }
}
