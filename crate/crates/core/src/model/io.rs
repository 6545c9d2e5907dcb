//! JSON instance format.
//!
//! ```json
//! {"m": 2, "agents": [
//!   {"entitlement": "1/2", "valuation": {"type": "additive", "values": ["1", "2/3"]}},
//!   {"entitlement": "1/2", "valuation": {"type": "table",
//!     "values": {"0": "0", "1": "1", "2": "1", "3": "3/2"}}}
//! ]}
//! ```
//!
//! Table keys are bundle bitmasks in decimal; every one of the `2^m` bundles
//! must be listed. XOS valuations use `{"type": "xos", "clauses": [[...], ...]}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Agent, Instance, Valuation, MAX_TABLE_ITEMS};
use crate::numerics::Rat;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    m: usize,
    agents: Vec<AgentDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentDoc {
    entitlement: Rat,
    valuation: ValuationDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum ValuationDoc {
    Additive { values: Vec<Rat> },
    Xos { clauses: Vec<Vec<Rat>> },
    Table { values: TableDoc },
}

/// Table entries keyed by decimal bitmask, written in numeric key order.
struct TableDoc(BTreeMap<u64, Rat>);

impl Serialize for TableDoc {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = ser.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(&k.to_string(), v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for TableDoc {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, Rat>::deserialize(de)?;
        raw.into_iter()
            .map(|(k, v)| {
                k.parse::<u64>().map(|k| (k, v)).map_err(|_| {
                    serde::de::Error::custom(format!("table key {k:?} is not a bitmask"))
                })
            })
            .collect::<std::result::Result<_, _>>()
            .map(TableDoc)
    }
}

impl ValuationDoc {
    fn into_valuation(self, m: usize) -> Result<Valuation> {
        match self {
            ValuationDoc::Additive { values } => Valuation::additive(values),
            ValuationDoc::Xos { clauses } => Valuation::xos(clauses),
            ValuationDoc::Table {
                values: TableDoc(values),
            } => {
                if m > MAX_TABLE_ITEMS {
                    return Err(Error::TooLarge(format!("table over {m} items")));
                }
                let size = 1u64 << m;
                if let Some(k) = values.keys().find(|&&k| k >= size) {
                    return Err(Error::InvalidValuation(format!(
                        "table key {k} names items outside 0..{m}"
                    )));
                }
                if values.len() as u64 != size {
                    let missing = (0..size).find(|k| !values.contains_key(k)).unwrap_or(0);
                    return Err(Error::InvalidValuation(format!(
                        "table is missing bundle {missing} (all {size} bundles are required)"
                    )));
                }
                Valuation::table(m, values.into_values().collect())
            }
        }
    }

    fn from_valuation(v: &Valuation) -> Result<Self> {
        Ok(match v {
            Valuation::Additive(values) => ValuationDoc::Additive {
                values: values.clone(),
            },
            Valuation::Xos(clauses) => ValuationDoc::Xos {
                clauses: clauses.clone(),
            },
            Valuation::Table(_) | Valuation::Truncated { .. } => {
                let t = v.to_table()?;
                ValuationDoc::Table {
                    values: TableDoc(
                        t.values()
                            .iter()
                            .enumerate()
                            .map(|(k, x)| (k as u64, x.clone()))
                            .collect(),
                    ),
                }
            }
        })
    }
}

fn parse(text: &str) -> Result<(usize, Vec<Agent>)> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    let m = doc.m;
    let agents = doc
        .agents
        .into_iter()
        .map(|a| {
            Ok(Agent {
                entitlement: a.entitlement,
                valuation: a.valuation.into_valuation(m)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((m, agents))
}

impl Instance {
    /// Parses an instance whose entitlements sum to exactly 1.
    pub fn from_json(text: &str) -> Result<Self> {
        let (m, agents) = parse(text)?;
        Instance::new(m, agents)
    }

    /// Parses an instance whose entitlements sum to at most 1.
    pub fn from_json_partial(text: &str) -> Result<Self> {
        let (m, agents) = parse(text)?;
        Instance::with_partial_entitlements(m, agents)
    }

    /// Pretty-printed JSON. Truncated valuations are written as tables.
    pub fn to_json(&self) -> Result<String> {
        let doc = InstanceDoc {
            m: self.m(),
            agents: self
                .agents()
                .iter()
                .map(|a| {
                    Ok(AgentDoc {
                        entitlement: a.entitlement.clone(),
                        valuation: ValuationDoc::from_valuation(&a.valuation)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Json(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{"m": 2, "agents": [
        {"entitlement": "1/2", "valuation": {"type": "additive", "values": ["1", "2/3"]}},
        {"entitlement": "1/2", "valuation": {"type": "table",
            "values": {"0": "0", "1": "1", "2": "1", "3": "3/2"}}}
    ]}"#;

    #[test]
    fn round_trip() {
        let inst = Instance::from_json(DOC).unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.valuation(1).total(), Rat::frac(3, 2));
        let again = Instance::from_json(&inst.to_json().unwrap()).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn missing_table_entry_is_rejected() {
        let doc = DOC.replace(r#", "3": "3/2""#, "");
        assert!(matches!(
            Instance::from_json(&doc),
            Err(Error::InvalidValuation(_))
        ));
    }

    #[test]
    fn malformed_input_is_a_json_error() {
        assert!(matches!(Instance::from_json("{"), Err(Error::Json(_))));
        let neg = DOC.replace("2/3", "2/-3");
        assert!(Instance::from_json(&neg).is_err());
    }

    #[test]
    fn partial_entitlements_need_the_partial_parser() {
        let doc = DOC.replacen("1/2", "1/4", 1);
        assert!(Instance::from_json(&doc).is_err());
        assert!(Instance::from_json_partial(&doc).is_ok());
    }
}
