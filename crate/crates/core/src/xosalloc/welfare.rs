use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Instance, Valuation, ValueTable};
use crate::numerics::Rat;

/// Largest number of assignments `n^m` the exhaustive welfare search visits.
pub const MAX_ASSIGNMENTS: u64 = 10_000_000;

/// An allocation maximizing `Σ v_i(A_i)` over all assignments of every
/// item to some agent, with one valuation per agent.
///
/// Ties go to the assignment whose owner sequence (item 0's owner, item 1's
/// owner, …) is lexicographically smallest.
pub fn welfare_max(inst: &Instance, valuations: &[Valuation]) -> Result<(Allocation, Rat)> {
    let (n, m) = (inst.n(), inst.m());
    if valuations.len() != n || valuations.iter().any(|v| v.num_items() != m) {
        return Err(Error::InvalidInput(
            "one valuation per agent over the instance items".into(),
        ));
    }
    let tables = valuations
        .iter()
        .map(Valuation::to_table)
        .collect::<Result<Vec<_>>>()?;
    welfare_max_tables(&tables, m)
}

pub(crate) fn welfare_max_tables(tables: &[ValueTable], m: usize) -> Result<(Allocation, Rat)> {
    let n = tables.len();
    if n == 0 {
        return Err(Error::InvalidInput("no agents".into()));
    }
    let size = (n as u64).checked_pow(m as u32).unwrap_or(u64::MAX);
    if size > MAX_ASSIGNMENTS {
        return Err(Error::TooLarge(format!("{n}^{m} assignments")));
    }
    let mut search = Search {
        tables,
        m,
        masks: vec![0u64; n],
        best: None,
    };
    search.go(0);
    let (value, masks) = search.best.expect("at least one assignment");
    let bundles = masks.into_iter().map(Bundle::from_mask).collect();
    Ok((Allocation::new(bundles)?, value))
}

struct Search<'a> {
    tables: &'a [ValueTable],
    m: usize,
    masks: Vec<u64>,
    best: Option<(Rat, Vec<u64>)>,
}

impl Search<'_> {
    fn go(&mut self, item: usize) {
        if item == self.m {
            let w: Rat = self
                .tables
                .iter()
                .zip(&self.masks)
                .map(|(t, &s)| t.get(Bundle::from_mask(s)))
                .sum();
            if self.best.as_ref().is_none_or(|(b, _)| w > *b) {
                self.best = Some((w, self.masks.clone()));
            }
            return;
        }
        for i in 0..self.tables.len() {
            self.masks[i] |= 1 << item;
            self.go(item + 1);
            self.masks[i] &= !(1 << item);
        }
    }
}
