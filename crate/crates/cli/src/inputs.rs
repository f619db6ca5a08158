//! Reading input files and the small JSON shapes only the command line uses.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde_json::Value;

use infinialg_core::gallery;
use infinialg_core::io::Loader;
use infinialg_core::istructure::index_names;
use infinialg_core::{
    AbstractClone, Error, IAlgebra, IHom, IStructure, Result, SearchBudget, Tuple,
};

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

pub fn read_json(path: &Path) -> Result<Value> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

pub fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::InvalidInput(format!("missing field {key:?}")))
}

pub fn decode<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T> {
    Ok(serde_json::from_value(v.clone())?)
}

/// A clone given as a reference string, or as the path of a JSON file holding
/// a reference string or an inline clone.
pub fn clone_arg(arg: &str, budget: &SearchBudget) -> Result<Arc<AbstractClone>> {
    let path = Path::new(arg);
    if path.is_file() {
        return Loader::new(*budget).clone_from(&read_json(path)?);
    }
    gallery::clone_by_ref(arg, budget)
}

fn carrier_of(v: &Value) -> Result<Vec<String>> {
    match (v.get("carrier"), v.get("size")) {
        (Some(c), _) => decode(c),
        (None, Some(s)) => Ok(index_names(decode(s)?)),
        (None, None) => Err(Error::InvalidInput(
            "structure needs a \"carrier\" or a \"size\"".into(),
        )),
    }
}

/// An explicit structure, or a generator object
/// `{"generate": "discrete" | "indiscrete" | "binary" | "tuples" | "nil_square", ...}`.
pub fn istructure(v: &Value, n_max: usize, budget: &SearchBudget) -> Result<IStructure> {
    let Some(kind) = v.get("generate") else {
        return IStructure::from_json(v);
    };
    let kind: String = decode(kind)?;
    match kind.as_str() {
        "discrete" => Ok(IStructure::discrete(carrier_of(v)?, n_max)),
        "indiscrete" => Ok(IStructure::indiscrete(carrier_of(v)?, n_max)),
        "binary" => {
            let carrier = carrier_of(v)?;
            let pairs: Vec<(usize, usize)> = decode(field(v, "pairs")?)?;
            IStructure::generate_from_binary(carrier, n_max, &pairs)
        }
        "tuples" => {
            let carrier = carrier_of(v)?;
            let gens = tuple_blocks(field(v, "tuples")?)?;
            IStructure::generate_from_tuples(carrier, n_max, &gens)
        }
        "nil_square" => {
            let ring = gallery::ring_zmod(decode(field(v, "ring")?)?)?;
            IStructure::nil_square(&ring, decode(field(v, "k")?)?, n_max, budget)
        }
        other => Err(Error::InvalidInput(format!(
            "unknown structure generator {other:?}"
        ))),
    }
}

/// `{"2": [[0,1], ...], "3": [...]}` keyed by arity.
pub fn tuple_blocks(v: &Value) -> Result<BTreeMap<usize, Vec<Tuple>>> {
    let raw: BTreeMap<String, Vec<Tuple>> = decode(v)?;
    raw.into_iter()
        .map(|(k, ts)| {
            let n = k
                .parse()
                .map_err(|_| Error::InvalidInput(format!("arity key {k:?} is not a number")))?;
            Ok((n, ts))
        })
        .collect()
}

/// `{"source": A, "target": B, "map": [...]}`.
pub fn hom(loader: &mut Loader, v: &Value) -> Result<IHom> {
    let source = loader.algebra(field(v, "source")?)?;
    let target = loader.algebra(field(v, "target")?)?;
    IHom::new(source, target, decode(field(v, "map")?)?)
}

pub fn algebras(loader: &mut Loader, v: &Value) -> Result<Vec<Arc<IAlgebra>>> {
    v.as_array()
        .ok_or_else(|| Error::InvalidInput("expected a list of algebras".into()))?
        .iter()
        .map(|a| loader.algebra(a))
        .collect()
}

/// Checks a map of carriers against sizes before any table lookup.
pub fn check_map(map: &[usize], source: usize, target: usize) -> Result<()> {
    if map.len() != source {
        return Err(Error::InvalidInput(format!(
            "map has {} entries for a source of size {source}",
            map.len()
        )));
    }
    if let Some(y) = map.iter().find(|&&y| y >= target) {
        return Err(Error::InvalidInput(format!(
            "map value {y} outside a target of size {target}"
        )));
    }
    Ok(())
}
