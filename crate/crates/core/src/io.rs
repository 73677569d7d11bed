//! JSON documents describing tuples of maps.
//!
//! A document is either an array of map entries or an object with a `maps`
//! array (other keys are ignored, so `generate` output can be fed back in).
//! Each entry is one of
//!
//! - `{"domain", "codomain", "transfer"}`: an explicit transfer matrix;
//! - `{"canonical", "space", "index"}`: map number `index` (from 0) of a
//!   canonical form realized on `space`;
//! - `{"inner", "map", "outer"}`: a weighted map `A ↦ L(A^inner)^outer`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::decompose::weighted::PowerMap;
use crate::error::{Error, Result};
use crate::matlin::SpaceTag;
use crate::superop::{from_canonical, CanonicalForm, LinMap};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalRef {
    pub canonical: CanonicalForm,
    pub space: SpaceTag,
    #[serde(default)]
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum MapSpec {
    Canonical(CanonicalRef),
    Power(PowerMap),
    Transfer(LinMap),
}

impl MapSpec {
    fn from_value(v: Value, pos: usize) -> Result<Self> {
        let ctx = |e: serde_json::Error| Error::Parse(format!("map entry {pos}: {e}"));
        let obj = v.as_object().ok_or_else(|| Error::Parse(format!("map entry {pos} is not an object")))?;
        if obj.contains_key("canonical") {
            serde_json::from_value(v).map(MapSpec::Canonical).map_err(ctx)
        } else if obj.contains_key("inner") || obj.contains_key("outer") {
            serde_json::from_value(v).map(MapSpec::Power).map_err(ctx)
        } else {
            serde_json::from_value(v).map(MapSpec::Transfer).map_err(ctx)
        }
    }

    pub fn to_power(&self) -> Result<PowerMap> {
        Ok(match self {
            MapSpec::Power(p) => p.clone(),
            MapSpec::Transfer(f) => PowerMap::linear(f.clone()),
            MapSpec::Canonical(c) => {
                let maps = from_canonical(&c.canonical, c.space)?;
                let count = maps.len();
                let f = maps.into_iter().nth(c.index).ok_or_else(|| {
                    Error::InvalidParameter(format!("{} has {count} maps, index {} requested", c.canonical.tag(), c.index))
                })?;
                PowerMap::linear(f)
            }
        })
    }

    pub fn to_linear(&self) -> Result<LinMap> {
        let p = self.to_power()?;
        p.as_linear()
            .cloned()
            .ok_or_else(|| Error::InvalidParameter("weighted map given where a linear map is required".into()))
    }
}

pub fn parse_map_specs(json: &str) -> Result<Vec<MapSpec>> {
    let doc: Value = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    let list = match doc {
        Value::Array(v) => v,
        Value::Object(mut o) => match o.remove("maps") {
            Some(Value::Array(v)) => v,
            _ => return Err(Error::Parse("expected an array of maps or an object with a \"maps\" array".into())),
        },
        _ => return Err(Error::Parse("expected an array of maps or an object with a \"maps\" array".into())),
    };
    list.into_iter().enumerate().map(|(i, v)| MapSpec::from_value(v, i)).collect()
}

pub fn load_maps(json: &str) -> Result<Vec<LinMap>> {
    parse_map_specs(json)?.iter().map(MapSpec::to_linear).collect()
}

pub fn load_power_maps(json: &str) -> Result<Vec<PowerMap>> {
    parse_map_specs(json)?.iter().map(MapSpec::to_power).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::{Field, Kind};
    use crate::matrix::CMatrix;

    #[test]
    fn both_entry_styles() {
        let id = LinMap::identity(SpaceTag::full(2));
        let explicit = serde_json::to_string(&id).unwrap();
        let doc = format!(
            r#"{{"maps": [{explicit}, {{"canonical": {{"tag": "MnChain", "params": {{"N": [{i}, {i}, {i}]}}}}, "space": {{"kind": "FullMatrix", "field": "complex", "n": 2}}, "index": 2}}], "note": "ignored"}}"#,
            i = serde_json::to_string(&CMatrix::identity(2)).unwrap()
        );
        let maps = load_maps(&doc).unwrap();
        assert_eq!(maps, vec![id.clone(), id]);
    }

    #[test]
    fn power_entries() {
        let p = PowerMap { inner: 0.5, map: LinMap::identity(SpaceTag::new(Kind::PosDef, Field::Complex, 2)), outer: 2.0 };
        let doc = serde_json::to_string(&vec![p.clone()]).unwrap();
        assert_eq!(load_power_maps(&doc).unwrap(), vec![p]);
        assert!(load_maps(&doc).is_err());
    }

    #[test]
    fn malformed() {
        assert!(matches!(parse_map_specs("{"), Err(Error::Parse(_))));
        assert!(matches!(parse_map_specs("3"), Err(Error::Parse(_))));
        assert!(matches!(parse_map_specs(r#"[{"domain": 1}]"#), Err(Error::Parse(_))));
        let bad_shape = r#"[{"domain":{"kind":"FullMatrix","field":"complex","n":2},"codomain":{"kind":"FullMatrix","field":"complex","n":2},"transfer":{"rows":1,"cols":1,"field":"real","data":[1]}}]"#;
        assert!(parse_map_specs(bad_shape).is_err());
    }
}
