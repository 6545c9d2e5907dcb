use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Bundle, Instance, Valuation, MAX_TABLE_ITEMS};
use crate::numerics::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorClass {
    Subadditive,
    Xos,
}

impl FromStr for VectorClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subadditive" => Ok(VectorClass::Subadditive),
            "xos" => Ok(VectorClass::Xos),
            _ => Err(Error::Usage(format!(
                "unknown class {s:?} (subadditive, xos)"
            ))),
        }
    }
}

impl fmt::Display for VectorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VectorClass::Subadditive => "subadditive",
            VectorClass::Xos => "xos",
        })
    }
}

/// Coordinate `c` (0-based) of the vector numbered `item`, in `0..n`.
pub fn coordinate(item: usize, c: usize, n: usize) -> usize {
    item / n.pow(c as u32) % n
}

/// Items whose coordinate `c` equals `j`.
pub fn fiber(c: usize, j: usize, n: usize) -> Bundle {
    let m = n.pow(n as u32);
    Bundle::from_items((0..m).filter(|&e| coordinate(e, c, n) == j))
}

/// `n` agents over the `n^n` vectors of `{1..n}^n`. Agent `i` cares about
/// the fibers of coordinate `i`: under `Subadditive` a set is worth 2 if it
/// contains a whole fiber and 1 otherwise (0 when empty); under `Xos` it is
/// worth the largest number of items it shares with one fiber.
///
/// Entitlements are equal. The subadditive form is a full value table, so
/// it exists only for `n = 2`; the XOS form also exists for `n = 3`.
pub fn gen_vector_instance(n: usize, class: VectorClass) -> Result<Instance> {
    if n < 2 {
        return Err(Error::InvalidInput("vector instances need n ≥ 2".into()));
    }
    if n > 3 {
        return Err(Error::ParameterTooLarge(format!("n = {n} (limit 3)")));
    }
    let m = n.pow(n as u32);
    let valuations = (0..n)
        .map(|i| match class {
            VectorClass::Xos => {
                let clauses = (0..n)
                    .map(|j| {
                        let f = fiber(i, j, n);
                        (0..m)
                            .map(|e| Rat::from_int(f.contains(e) as i64))
                            .collect()
                    })
                    .collect();
                Valuation::xos(clauses)
            }
            VectorClass::Subadditive => {
                if m > MAX_TABLE_ITEMS {
                    return Err(Error::ParameterTooLarge(format!(
                        "subadditive vector instance over {m} items needs a full table"
                    )));
                }
                let fibers: Vec<Bundle> = (0..n).map(|j| fiber(i, j, n)).collect();
                let values = (0..1u64 << m)
                    .map(|s| {
                        let s = Bundle::from_mask(s);
                        if s.is_empty() {
                            Rat::zero()
                        } else if fibers.iter().any(|f| f.is_subset_of(s)) {
                            Rat::from_int(2)
                        } else {
                            Rat::one()
                        }
                    })
                    .collect();
                Valuation::table(m, values)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::equal(m, valuations)
}
