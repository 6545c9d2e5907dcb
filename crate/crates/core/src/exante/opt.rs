use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Instance};
use crate::numerics::{lp_solve, LinearProgram, NumericsError, Rat, Relation};
use crate::shares::{mes, mms};

use super::clp::ClpSolution;

/// Largest number of deterministic allocations `n^m` the ex-ante LP enumerates.
pub const MAX_EXANTE_ALLOCATIONS: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShareKind {
    Mes,
    Mms,
}

impl FromStr for ShareKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mes" | "MES" => Ok(ShareKind::Mes),
            "mms" | "MMS" => Ok(ShareKind::Mms),
            _ => Err(Error::Usage(format!("unknown share {s:?} (mes, mms)"))),
        }
    }
}

impl fmt::Display for ShareKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShareKind::Mes => "mes",
            ShareKind::Mms => "mms",
        })
    }
}

/// A lottery over deterministic allocations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RandomizedAllocation {
    pub support: Vec<(Allocation, Rat)>,
}

impl RandomizedAllocation {
    pub fn expected_values(&self, inst: &Instance) -> Vec<Rat> {
        (0..inst.n())
            .map(|i| {
                self.support
                    .iter()
                    .map(|(a, p)| p * inst.valuation(i).value(a.bundle(i)))
                    .sum()
            })
            .collect()
    }

    pub fn total_probability(&self) -> Rat {
        self.support.iter().map(|(_, p)| p).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExanteResult {
    pub share: ShareKind,
    pub shares: Vec<Rat>,
    pub lottery: RandomizedAllocation,
    pub expected: Vec<Rat>,
    /// Largest `r` with every agent's expected value at least `r` times its
    /// share (agents with share 0 impose nothing).
    pub ratio: Rat,
}

/// Each agent's share of the given kind. MMS needs equal entitlements.
pub fn agent_shares(inst: &Instance, kind: ShareKind) -> Result<Vec<Rat>> {
    match kind {
        ShareKind::Mes => inst
            .agents()
            .iter()
            .map(|a| mes(&a.valuation, &a.entitlement).map(|x| x.0))
            .collect(),
        ShareKind::Mms => {
            if !inst.has_equal_entitlements() {
                return Err(Error::InvalidInstance(
                    "MMS needs equal entitlements".into(),
                ));
            }
            inst.agents()
                .iter()
                .map(|a| mms(&a.valuation, inst.n()).map(|x| x.0))
                .collect()
        }
    }
}

/// The randomized allocation maximizing the smallest ratio of expected
/// value to share, by an exact LP over every assignment of items to agents.
/// Assignments with the same value profile share one column.
pub fn exante_opt(inst: &Instance, kind: ShareKind) -> Result<ExanteResult> {
    let shares = agent_shares(inst, kind)?;
    exante_opt_with_shares(inst, kind, shares)
}

pub(crate) fn exante_opt_with_shares(
    inst: &Instance,
    kind: ShareKind,
    shares: Vec<Rat>,
) -> Result<ExanteResult> {
    let (n, m) = (inst.n(), inst.m());
    let count = (n as u64).checked_pow(m as u32).unwrap_or(u64::MAX);
    if count > MAX_EXANTE_ALLOCATIONS {
        return Err(Error::TooLarge(format!(
            "{n}^{m} deterministic allocations"
        )));
    }
    let constrained: Vec<usize> = (0..n).filter(|&i| shares[i].is_positive()).collect();
    if constrained.is_empty() {
        return Err(Error::InvalidInput(
            "every share is 0; the ratio is unbounded".into(),
        ));
    }

    let mut columns: Vec<Vec<Bundle>> = Vec::new();
    let mut profiles: Vec<Vec<Rat>> = Vec::new();
    let mut seen: HashMap<Vec<Rat>, ()> = HashMap::new();
    let mut owner = vec![0usize; m];
    loop {
        let mut bundles = vec![Bundle::EMPTY; n];
        for (e, &i) in owner.iter().enumerate() {
            bundles[i] = bundles[i].with(e);
        }
        let profile: Vec<Rat> = (0..n)
            .map(|i| inst.valuation(i).value(bundles[i]))
            .collect();
        if seen.insert(profile.clone(), ()).is_none() {
            columns.push(bundles);
            profiles.push(profile);
        }
        let mut k = 0;
        while k < m && owner[k] + 1 == n {
            owner[k] = 0;
            k += 1;
        }
        if k == m {
            break;
        }
        owner[k] += 1;
    }

    // variables: one probability per column, then r
    let c = columns.len();
    let mut objective = vec![Rat::zero(); c + 1];
    objective[c] = Rat::one();
    let mut lp = LinearProgram::new(objective);
    let mut ones = vec![Rat::one(); c + 1];
    ones[c] = Rat::zero();
    lp.add(ones, Relation::Eq, Rat::one());
    for &i in &constrained {
        let mut row: Vec<Rat> = profiles.iter().map(|p| p[i].clone()).collect();
        row.push(-shares[i].clone());
        lp.add(row, Relation::Ge, Rat::zero());
    }
    let res = lp_solve(&lp)?;
    if !res.is_optimal() {
        return Err(Error::Numerics(NumericsError::Verification(format!(
            "ex-ante LP reported {:?}",
            res.status
        ))));
    }
    let ratio = res.solution[c].clone();
    let support = columns
        .into_iter()
        .zip(&res.solution[..c])
        .filter(|(_, p)| p.is_positive())
        .map(|(b, p)| Ok((Allocation::new(b)?, p.clone())))
        .collect::<Result<Vec<_>>>()?;
    let lottery = RandomizedAllocation { support };
    let expected = lottery.expected_values(inst);
    for &i in &constrained {
        if expected[i] < &ratio * &shares[i] {
            return Err(Error::Numerics(NumericsError::Verification(format!(
                "agent {i} expects {} < {ratio}·{}",
                expected[i], shares[i]
            ))));
        }
    }
    Ok(ExanteResult {
        share: kind,
        shares,
        lottery,
        expected,
        ratio,
    })
}

/// The configuration-LP point built from every agent's MES partition: agent
/// `i` takes bundle `S` with its weight in that partition. It is feasible
/// because coverages `b_i` add up to 1, and its objective is `Σ_i MES_i`.
pub fn mes_warm_start(inst: &Instance) -> Result<ClpSolution> {
    if inst.total_entitlement() != Rat::one() {
        return Err(Error::InvalidInstance("entitlements must sum to 1".into()));
    }
    let mut entries = Vec::new();
    let mut objective = Rat::zero();
    for (i, a) in inst.agents().iter().enumerate() {
        let (value, fp) = mes(&a.valuation, &a.entitlement)?;
        objective += value;
        entries.extend(fp.support().map(|(s, w)| (i, *s, w.clone())));
    }
    Ok(ClpSolution { entries, objective })
}
