use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{fill_coverage, Bundle, Instance, Valuation, ValueTable};
use crate::numerics::{lp_solve, LinearProgram, Rat, Relation};

/// Largest number of (agent, bundle) columns the configuration LP accepts.
pub const MAX_CLP_COLUMNS: usize = 100_000;

/// A fractional assignment of bundles to agents: every agent's weights sum
/// to 1 and every item is covered exactly once.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClpSolution {
    /// `(agent, bundle, x)` with `x > 0`.
    pub entries: Vec<(usize, Bundle, Rat)>,
    pub objective: Rat,
}

impl ClpSolution {
    /// Agent `i`'s fractional welfare `Σ_S x_{i,S} v_i(S)`.
    pub fn contribution(&self, i: usize, v: &Valuation) -> Rat {
        self.entries
            .iter()
            .filter(|(a, _, _)| *a == i)
            .map(|(_, s, x)| x * v.value(*s))
            .sum()
    }

    /// Checks both families of equality constraints and non-negativity.
    pub fn is_feasible(&self, n: usize, m: usize) -> bool {
        let all_nonneg = self.entries.iter().all(|(_, _, x)| !x.is_negative());
        let agents_ok = (0..n).all(|i| {
            self.entries
                .iter()
                .filter(|(a, _, _)| *a == i)
                .map(|(_, _, x)| x)
                .sum::<Rat>()
                == Rat::one()
        });
        let items_ok = (0..m).all(|e| {
            self.entries
                .iter()
                .filter(|(_, s, _)| s.contains(e))
                .map(|(_, _, x)| x)
                .sum::<Rat>()
                == Rat::one()
        });
        all_nonneg && agents_ok && items_ok && self.entries.iter().all(|(a, _, _)| *a < n)
    }
}

/// Solves the configuration LP for the given instance, optionally with
/// replacement valuations (one per agent).
pub fn clp_solve(inst: &Instance, valuations: Option<&[Valuation]>) -> Result<ClpSolution> {
    let vals: Vec<&Valuation> = match valuations {
        Some(vs) => {
            if vs.len() != inst.n() || vs.iter().any(|v| v.num_items() != inst.m()) {
                return Err(Error::InvalidInput(
                    "override valuations do not match the instance".into(),
                ));
            }
            vs.iter().collect()
        }
        None => inst.agents().iter().map(|a| &a.valuation).collect(),
    };
    let tables = vals
        .iter()
        .map(|v| v.to_table())
        .collect::<Result<Vec<_>>>()?;
    clp_solve_tables(&tables)
}

/// Configuration LP over explicit value tables (all over the same items):
/// maximize `Σ x_{i,S} v_i(S)` with each agent receiving one unit of
/// bundles and each item allocated at most once, then completed so both
/// constraint families hold with equality.
///
/// Only bundles whose every item has positive marginal value are offered as
/// columns; any other bundle is dominated by a proper subset.
pub fn clp_solve_tables(tables: &[ValueTable]) -> Result<ClpSolution> {
    let n = tables.len();
    let m = tables.first().map_or(0, ValueTable::num_items);
    if n == 0 {
        return Err(Error::InvalidInput(
            "configuration LP without agents".into(),
        ));
    }
    if m >= 40 || n << m > MAX_CLP_COLUMNS {
        return Err(Error::TooLarge(format!(
            "configuration LP with {n} agents and {m} items"
        )));
    }
    let mut columns: Vec<(usize, Bundle)> = Vec::new();
    for (i, t) in tables.iter().enumerate() {
        for s in Bundle::full(m).subsets().skip(1) {
            let v = t.get(s);
            if s.items().all(|e| t.get(s.without(e)) < v) {
                columns.push((i, s));
            }
        }
    }
    if columns.len() > MAX_CLP_COLUMNS {
        return Err(Error::TooLarge(format!(
            "configuration LP with {} columns",
            columns.len()
        )));
    }
    let objective = columns
        .iter()
        .map(|(i, s)| tables[*i].get(*s).clone())
        .collect();
    let mut lp = LinearProgram::new(objective);
    for i in 0..n {
        let row: Vec<(usize, Rat)> = columns
            .iter()
            .enumerate()
            .filter(|(_, (a, _))| *a == i)
            .map(|(c, _)| (c, Rat::one()))
            .collect();
        lp.add_sparse(&row, Relation::Le, Rat::one());
    }
    for e in 0..m {
        let row: Vec<(usize, Rat)> = columns
            .iter()
            .enumerate()
            .filter(|(_, (_, s))| s.contains(e))
            .map(|(c, _)| (c, Rat::one()))
            .collect();
        lp.add_sparse(&row, Relation::Le, Rat::one());
    }
    let res = lp_solve(&lp)?;
    if !res.is_optimal() {
        return Err(Error::Numerics(
            crate::numerics::NumericsError::Verification(format!(
                "configuration LP reported {:?}",
                res.status
            )),
        ));
    }
    let mut entries: Vec<(usize, Bundle, Rat)> = columns
        .iter()
        .zip(res.solution)
        .filter(|(_, x)| x.is_positive())
        .map(|(&(i, s), x)| (i, s, x))
        .collect();
    for i in 0..n {
        let used: Rat = entries
            .iter()
            .filter(|(a, _, _)| *a == i)
            .map(|(_, _, x)| x)
            .sum();
        if used < Rat::one() {
            entries.push((i, Bundle::EMPTY, Rat::one() - used));
        }
    }
    fill_coverage(&mut entries, &Rat::one(), m)?;
    let objective = entries.iter().map(|(i, s, x)| x * tables[*i].get(*s)).sum();
    Ok(ClpSolution { entries, objective })
}
