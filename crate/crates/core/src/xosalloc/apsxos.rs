use crate::error::{Error, Result};
use crate::model::{Agent, Instance, Valuation};
use crate::numerics::Rat;
use crate::shares::aps;

use super::welfare::welfare_max;
use super::{outcomes, AllocationReport};

/// `min(cap_fraction · b, (b / aps) · v)`: `v` rescaled so its share is `b`,
/// then capped. A zero share gives the zero valuation.
pub fn hat_valuation(v: &Valuation, share: &Rat, b: &Rat, cap_fraction: &Rat) -> Result<Valuation> {
    if !share.is_positive() {
        return Valuation::additive(vec![Rat::zero(); v.num_items()]);
    }
    Valuation::truncated(v.scaled(&(b / share)), b * cap_fraction)
}

/// Welfare maximization over the capped valuations `min(b_i, (b_i/APS_i)·v_i)`.
/// Every agent then gets at least `(1 − b + b_i)·APS_i`, where `b` is the
/// total entitlement (which may fall short of 1); this is checked.
pub fn apsxos_allocate(inst: &Instance) -> Result<AllocationReport> {
    let shares = inst
        .agents()
        .iter()
        .map(|a| aps(&a.valuation, &a.entitlement).map(|x| x.0))
        .collect::<Result<Vec<_>>>()?;
    apsxos_with_shares(inst, &shares)
}

pub(crate) fn apsxos_with_shares(inst: &Instance, shares: &[Rat]) -> Result<AllocationReport> {
    let total = inst.total_entitlement();
    let hats = inst
        .agents()
        .iter()
        .zip(shares)
        .map(|(a, s)| hat_valuation(&a.valuation, s, &a.entitlement, &Rat::one()))
        .collect::<Result<Vec<_>>>()?;
    let (allocation, _) = welfare_max(inst, &hats)?;
    let guarantees: Vec<Rat> = inst
        .agents()
        .iter()
        .zip(shares)
        .map(|(a, s)| (Rat::one() - &total + &a.entitlement) * s)
        .collect();
    let agents = outcomes(inst, &allocation, shares, &guarantees);
    for o in &agents {
        if o.value < o.guarantee {
            return Err(Error::BoundViolated(format!(
                "agent {} gets {} < (1 − {total} + b_i)·APS = {}",
                o.agent, o.value, o.guarantee
            )));
        }
    }
    Ok(AllocationReport {
        algorithm: "apsxos".into(),
        allocation,
        agents,
        steps: Vec::new(),
        step1: Vec::new(),
        n5: None,
    })
}

/// The same instance with every entitlement halved (total 1/2).
pub fn halve_entitlements(inst: &Instance) -> Result<Instance> {
    let agents = inst
        .agents()
        .iter()
        .map(|a| Agent {
            valuation: a.valuation.clone(),
            entitlement: &a.entitlement / Rat::from_int(2),
        })
        .collect();
    Instance::with_partial_entitlements(inst.m(), agents)
}
