//! JSON forms of algebras, spans, congruences and atlases.
//!
//! A `"clone"` field is either a reference string understood by
//! [`gallery::clone_by_ref`] or an inline clone object.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::atlas::{Atlas, Chart};
use crate::budget::SearchBudget;
use crate::clone::AbstractClone;
use crate::error::{Error, Result};
use crate::gallery;
use crate::ialgebra::{same_clone, IAlgebra, IHom};
use crate::istructure::IStructure;
use crate::limits::{congruence_from_partition, Congruence};

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::InvalidInput(format!("missing field {key:?}")))
}

fn indices(v: &Value) -> Result<Vec<usize>> {
    Ok(serde_json::from_value(v.clone())?)
}

/// The clone's label when it resolves back to an equal clone, the inline
/// form otherwise.
pub fn clone_to_json(c: &AbstractClone) -> Value {
    let budget = SearchBudget::default();
    match gallery::clone_by_ref(c.label(), &budget) {
        Ok(r) if *r == *c => Value::String(c.label().to_string()),
        _ => c
            .to_json(&budget)
            .unwrap_or_else(|_| Value::String(c.label().to_string())),
    }
}

pub fn algebra_to_json(a: &IAlgebra) -> Value {
    a.to_json(clone_to_json(a.clone_ref()))
}

/// Resolves clone fields, handing out one shared clone per distinct value.
#[derive(Default)]
pub struct Loader {
    budget: SearchBudget,
    seen: Vec<(Value, Arc<AbstractClone>)>,
}

impl Loader {
    pub fn new(budget: SearchBudget) -> Self {
        Loader {
            budget,
            seen: Vec::new(),
        }
    }

    pub fn clone_from(&mut self, v: &Value) -> Result<Arc<AbstractClone>> {
        if let Some((_, c)) = self.seen.iter().find(|(k, _)| k == v) {
            return Ok(c.clone());
        }
        let c = match v {
            Value::String(r) => gallery::clone_by_ref(r, &self.budget)?,
            _ => Arc::new(AbstractClone::from_json(v)?),
        };
        let c = match self.seen.iter().find(|(_, d)| same_clone(d, &c)) {
            Some((_, d)) => d.clone(),
            None => c,
        };
        self.seen.push((v.clone(), c.clone()));
        Ok(c)
    }

    pub fn algebra(&mut self, v: &Value) -> Result<Arc<IAlgebra>> {
        let c = self.clone_from(field(v, "clone")?)?;
        Ok(Arc::new(IAlgebra::from_json(v, |_| Ok(c.clone()))?))
    }

    /// `{"source": A, "legs": [{"target": B, "map": [...]}, ...]}`.
    pub fn span(&mut self, v: &Value) -> Result<(Arc<IAlgebra>, Vec<IHom>)> {
        let source = self.algebra(field(v, "source")?)?;
        let legs = field(v, "legs")?
            .as_array()
            .ok_or_else(|| Error::InvalidInput("legs must be a list".into()))?
            .iter()
            .map(|l| {
                let target = self.algebra(field(l, "target")?)?;
                IHom::new(source.clone(), target, indices(field(l, "map")?)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((source, legs))
    }

    /// `{"source": A, "target": B, "maps": [[...], ...]}`.
    pub fn parallel(&mut self, v: &Value) -> Result<Vec<IHom>> {
        let source = self.algebra(field(v, "source")?)?;
        let target = self.algebra(field(v, "target")?)?;
        field(v, "maps")?
            .as_array()
            .ok_or_else(|| Error::InvalidInput("maps must be a list".into()))?
            .iter()
            .map(|m| IHom::new(source.clone(), target.clone(), indices(m)?))
            .collect()
    }

    /// `{"algebra": A, "classes": [...], "rel_istructure": S?}`.
    pub fn congruence(&mut self, v: &Value) -> Result<Congruence> {
        let a = self.algebra(field(v, "algebra")?)?;
        let classes = indices(field(v, "classes")?)?;
        let structure = v
            .get("rel_istructure")
            .map(IStructure::from_json)
            .transpose()?;
        congruence_from_partition(&a, &classes, structure)
    }

    /// `{"ambient": [names], "charts": [{"subset": [...], "algebra": A}, ...]}`.
    pub fn atlas(&mut self, v: &Value) -> Result<Atlas> {
        let ambient: Vec<String> = serde_json::from_value(field(v, "ambient")?.clone())?;
        let charts = field(v, "charts")?
            .as_array()
            .ok_or_else(|| Error::InvalidInput("charts must be a list".into()))?
            .iter()
            .map(|c| {
                Ok(Chart {
                    subset: indices(field(c, "subset")?)?,
                    algebra: self.algebra(field(c, "algebra")?)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Atlas::new(ambient, charts)
    }
}

pub fn span_to_json(source: &IAlgebra, legs: &[(Arc<IAlgebra>, Vec<usize>)]) -> Value {
    json!({
        "source": algebra_to_json(source),
        "legs": legs.iter().map(|(t, m)| json!({
            "target": algebra_to_json(t),
            "map": m,
        })).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_round_trip_through_a_reference() {
        let a = gallery::affine_nil_square(4, 1, 3).unwrap();
        let v = algebra_to_json(&a);
        assert_eq!(v["clone"], "affine(Z/4,3)");
        let b = Loader::default().algebra(&v).unwrap();
        assert!(b.same_as(&a));
    }

    #[test]
    fn span_shares_clones() {
        let z2 = Arc::new(gallery::abelian_total(2, 3).unwrap());
        let init = crate::colimits::initial_object(z2.clone_ref()).unwrap();
        let v = span_to_json(&init, &[(z2.clone(), vec![0]), (z2, vec![0])]);
        let (s, legs) = Loader::default().span(&v).unwrap();
        assert_eq!(legs.len(), 2);
        assert!(Arc::ptr_eq(s.clone_ref(), legs[1].target.clone_ref()));
    }

    #[test]
    fn malformed_input_is_an_input_error() {
        let err = Loader::default()
            .algebra(&json!({"clone": "affine(Z/4,3)"}))
            .unwrap_err();
        assert!(err.is_input_error());
    }
}
