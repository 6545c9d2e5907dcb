use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Bundle, Valuation, ValueTable};

/// Largest item count for exhaustive class checks.
pub const MAX_EXHAUSTIVE_ITEMS: usize = 16;
/// Largest item count for the LP-based XOS test on tables.
pub const MAX_XOS_TABLE_ITEMS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValuationClass {
    Additive,
    Submodular,
    Xos,
    Subadditive,
    Monotone,
}

impl std::str::FromStr for ValuationClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "additive" => ValuationClass::Additive,
            "submodular" => ValuationClass::Submodular,
            "xos" => ValuationClass::Xos,
            "subadditive" => ValuationClass::Subadditive,
            "monotone" => ValuationClass::Monotone,
            _ => return Err(Error::Usage(format!("unknown valuation class {s:?}"))),
        })
    }
}

/// Exact class membership.
///
/// Additive and clause representations are decided structurally where the
/// representation implies membership; everything else is checked against
/// the definition over all bundles.
pub fn class_check(v: &Valuation, class: ValuationClass) -> Result<bool> {
    use ValuationClass::*;
    match (v, class) {
        (Valuation::Additive(_), _) => return Ok(true),
        (Valuation::Xos(_), Xos | Subadditive | Monotone) => return Ok(true),
        (Valuation::Xos(c), Additive | Submodular) if c.len() == 1 => return Ok(true),
        _ => {}
    }
    let m = v.num_items();
    if m > MAX_EXHAUSTIVE_ITEMS {
        return Err(Error::TooLarge(format!(
            "exhaustive class check over {m} items (limit {MAX_EXHAUSTIVE_ITEMS})"
        )));
    }
    let t = v.to_table()?;
    Ok(match class {
        Monotone => is_monotone(&t),
        Additive => is_additive(&t),
        Submodular => is_monotone(&t) && is_submodular(&t),
        Subadditive => is_monotone(&t) && is_subadditive(&t),
        Xos => {
            if m > MAX_XOS_TABLE_ITEMS {
                return Err(Error::TooLarge(format!(
                    "XOS check over {m} items (limit {MAX_XOS_TABLE_ITEMS})"
                )));
            }
            is_monotone(&t) && is_xos(&t)?
        }
    })
}

fn is_monotone(t: &ValueTable) -> bool {
    let vals = t.values();
    (0..vals.len()).all(|s| (0..t.num_items()).all(|i| vals[s] <= vals[s | 1 << i]))
}

fn is_additive(t: &ValueTable) -> bool {
    let vals = t.values();
    (1..vals.len()).all(|s| {
        let low = s & s.wrapping_neg();
        vals[s] == &vals[s & (s - 1)] + &vals[low]
    })
}

/// Local form of diminishing returns: v(S+a) + v(S+b) ≥ v(S+a+b) + v(S).
fn is_submodular(t: &ValueTable) -> bool {
    let vals = t.values();
    let m = t.num_items();
    (0..vals.len()).all(|s| {
        (0..m).filter(|&a| s >> a & 1 == 0).all(|a| {
            (a + 1..m).filter(|&b| s >> b & 1 == 0).all(|b| {
                &vals[s | 1 << a] + &vals[s | 1 << b] >= &vals[s | 1 << a | 1 << b] + &vals[s]
            })
        })
    })
}

/// v(S) + v(T) ≥ v(S ∪ T) over disjoint pairs (enough given monotonicity).
fn is_subadditive(t: &ValueTable) -> bool {
    let vals = t.values();
    (0..vals.len()).all(|u| {
        Bundle::from_mask(u as u64).subsets().all(|s| {
            let rest = u & !(s.mask() as usize);
            s.mask() as usize > rest || &vals[s.mask() as usize] + &vals[rest] >= vals[u]
        })
    })
}

fn is_xos(t: &ValueTable) -> Result<bool> {
    let v = Valuation::Table(t.clone());
    for s in Bundle::full(t.num_items()).subsets() {
        match v.supporting_clause(s) {
            Ok(_) => {}
            Err(Error::NotXos(_)) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}
