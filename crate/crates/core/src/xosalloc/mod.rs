//! Allocation algorithms for XOS valuations with APS guarantees: capped
//! welfare maximization, the iterative replacement procedure for arbitrary
//! entitlements, and the two-step algorithm for equal entitlements.

mod apsxos;
mod equal;
mod sixth;
mod split;
mod welfare;

use serde::Serialize;

use crate::model::{Allocation, Bundle, Instance};
use crate::numerics::Rat;

pub use apsxos::{apsxos_allocate, halve_entitlements, hat_valuation};
pub use equal::{allocate_equal_417, lemma817_check, Step1Pick};
pub use sixth::{
    allocate_one_sixth, allocate_one_sixth_from, default_max_steps, ReplacementCase,
    ReplacementStep,
};
pub use split::{split_min_value, three_set_partition, MAX_THREE_SET_ITEMS};
pub use welfare::{welfare_max, MAX_ASSIGNMENTS};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AgentOutcome {
    pub agent: usize,
    pub bundle: Bundle,
    pub value: Rat,
    pub aps: Rat,
    /// The value the algorithm promises this agent.
    pub guarantee: Rat,
    /// `value / aps`, absent when the APS is 0.
    pub ratio: Option<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AllocationReport {
    pub algorithm: String,
    pub allocation: Allocation,
    pub agents: Vec<AgentOutcome>,
    /// Replacement steps (one-sixth procedure only).
    pub steps: Vec<ReplacementStep>,
    /// Small bundles handed out greedily (equal-entitlement algorithm only).
    pub step1: Vec<Step1Pick>,
    /// Agents left for the second step of the equal-entitlement algorithm.
    pub n5: Option<usize>,
}

impl AllocationReport {
    pub fn all_guarantees_met(&self) -> bool {
        self.agents.iter().all(|o| o.value >= o.guarantee)
    }
}

pub(crate) fn outcomes(
    inst: &Instance,
    allocation: &Allocation,
    shares: &[Rat],
    guarantees: &[Rat],
) -> Vec<AgentOutcome> {
    (0..inst.n())
        .map(|i| {
            let bundle = allocation.bundle(i);
            let value = inst.valuation(i).value(bundle);
            let ratio = shares[i].is_positive().then(|| &value / &shares[i]);
            AgentOutcome {
                agent: i,
                bundle,
                value,
                aps: shares[i].clone(),
                guarantee: guarantees[i].clone(),
                ratio,
            }
        })
        .collect()
}
