use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Bundle, Valuation};
use crate::numerics::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent {
    pub valuation: Valuation,
    pub entitlement: Rat,
}

/// Items `0..m` and agents with positive entitlements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    m: usize,
    agents: Vec<Agent>,
}

impl Instance {
    /// Entitlements must be positive and sum to exactly 1.
    pub fn new(m: usize, agents: Vec<Agent>) -> Result<Self> {
        let inst = Instance::with_partial_entitlements(m, agents)?;
        let total = inst.total_entitlement();
        if total != Rat::one() {
            return Err(Error::InvalidInstance(format!(
                "entitlements sum to {total}, expected 1"
            )));
        }
        Ok(inst)
    }

    /// Like [`Instance::new`] but only requires the entitlements to sum to
    /// at most 1.
    pub fn with_partial_entitlements(m: usize, agents: Vec<Agent>) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::InvalidInstance("no agents".into()));
        }
        if m > crate::model::MAX_ITEMS {
            return Err(Error::TooLarge(format!("{m} items (limit 64)")));
        }
        for (i, a) in agents.iter().enumerate() {
            if a.valuation.num_items() != m {
                return Err(Error::InvalidInstance(format!(
                    "agent {i} values {} items, instance has {m}",
                    a.valuation.num_items()
                )));
            }
            if !a.entitlement.is_positive() {
                return Err(Error::InvalidInstance(format!(
                    "agent {i} has non-positive entitlement {}",
                    a.entitlement
                )));
            }
        }
        let inst = Instance { m, agents };
        if inst.total_entitlement() > Rat::one() {
            return Err(Error::InvalidInstance(format!(
                "entitlements sum to {} > 1",
                inst.total_entitlement()
            )));
        }
        Ok(inst)
    }

    /// Every agent gets entitlement `1/n`.
    pub fn equal(m: usize, valuations: Vec<Valuation>) -> Result<Self> {
        let n = valuations.len() as i64;
        if n == 0 {
            return Err(Error::InvalidInstance("no agents".into()));
        }
        let agents = valuations
            .into_iter()
            .map(|valuation| Agent {
                valuation,
                entitlement: Rat::frac(1, n),
            })
            .collect();
        Instance::new(m, agents)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent(&self, i: usize) -> &Agent {
        &self.agents[i]
    }

    pub fn valuation(&self, i: usize) -> &Valuation {
        &self.agents[i].valuation
    }

    pub fn entitlement(&self, i: usize) -> &Rat {
        &self.agents[i].entitlement
    }

    pub fn total_entitlement(&self) -> Rat {
        self.agents.iter().map(|a| &a.entitlement).sum()
    }

    pub fn items(&self) -> Bundle {
        Bundle::full(self.m)
    }

    pub fn has_equal_entitlements(&self) -> bool {
        let n = self.n() as i64;
        self.agents.iter().all(|a| a.entitlement == Rat::frac(1, n))
    }
}

/// One bundle per agent; bundles are pairwise disjoint but need not cover
/// every item.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Allocation {
    bundles: Vec<Bundle>,
}

impl Allocation {
    pub fn new(bundles: Vec<Bundle>) -> Result<Self> {
        let mut seen = Bundle::EMPTY;
        for (i, b) in bundles.iter().enumerate() {
            if !seen.is_disjoint(*b) {
                return Err(Error::InvalidAllocation(format!(
                    "bundle of agent {i} overlaps an earlier bundle"
                )));
            }
            seen = seen.union(*b);
        }
        Ok(Allocation { bundles })
    }

    pub fn empty(n: usize) -> Self {
        Allocation {
            bundles: vec![Bundle::EMPTY; n],
        }
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn bundle(&self, i: usize) -> Bundle {
        self.bundles[i]
    }

    pub fn allocated(&self) -> Bundle {
        self.bundles.iter().fold(Bundle::EMPTY, |a, b| a.union(*b))
    }

    pub fn is_complete(&self, m: usize) -> bool {
        self.allocated() == Bundle::full(m)
    }

    /// Per-agent values under the instance's valuations.
    pub fn values(&self, inst: &Instance) -> Vec<Rat> {
        self.bundles
            .iter()
            .enumerate()
            .map(|(i, b)| inst.valuation(i).value(*b))
            .collect()
    }
}

/// Weighted bundles such that weights sum to 1 and every item is covered
/// with total weight exactly `rho`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FractionalPartition {
    pub parts: Vec<(Bundle, Rat)>,
    pub rho: Rat,
}

impl FractionalPartition {
    /// The `1/n`-partition induced by an integral partition.
    pub fn from_partition(bundles: &[Bundle]) -> Self {
        let w = Rat::frac(1, bundles.len() as i64);
        FractionalPartition {
            parts: bundles.iter().map(|b| (*b, w.clone())).collect(),
            rho: w,
        }
    }

    /// Turns weighted bundles with total weight at most 1 and item coverage
    /// at most `rho` into an exact fractional `rho`-partition of `0..m`.
    ///
    /// Missing weight goes to the empty bundle; each item's coverage deficit
    /// is filled by adding the item to bundles that lack it (splitting a
    /// bundle's weight when only part of it is needed). Bundles only grow, so
    /// every bundle value under a monotone valuation can only increase.
    pub fn completed(parts: Vec<(Bundle, Rat)>, rho: Rat, m: usize) -> Result<Self> {
        if rho.is_negative() || rho > Rat::one() {
            return Err(Error::InvalidInput(format!(
                "coverage {rho} outside [0, 1]"
            )));
        }
        let mut parts: Vec<(Bundle, Rat)> =
            parts.into_iter().filter(|(_, w)| w.is_positive()).collect();
        let total: Rat = parts.iter().map(|(_, w)| w).sum();
        if total > Rat::one() {
            return Err(Error::InvalidInput(format!("weights sum to {total} > 1")));
        }
        if total < Rat::one() {
            parts.push((Bundle::EMPTY, Rat::one() - total));
        }
        let mut tagged: Vec<((), Bundle, Rat)> =
            parts.into_iter().map(|(b, w)| ((), b, w)).collect();
        fill_coverage(&mut tagged, &rho, m)?;
        let merged = tagged.into_iter().map(|(_, b, w)| (b, w)).collect();
        Ok(FractionalPartition { parts: merged, rho })
    }

    /// Bundles with positive weight.
    pub fn support(&self) -> impl Iterator<Item = &(Bundle, Rat)> {
        self.parts.iter().filter(|(_, w)| w.is_positive())
    }
}

/// Adds items to tagged weighted bundles until every item in `0..m` has
/// coverage exactly `target`, then merges identical entries. Coverage must
/// not already exceed `target`, and the total weight must be at least
/// `target`.
pub(crate) fn fill_coverage<T: Clone + PartialEq>(
    parts: &mut Vec<(T, Bundle, Rat)>,
    target: &Rat,
    m: usize,
) -> Result<()> {
    for e in 0..m {
        let cover: Rat = parts
            .iter()
            .filter(|(_, b, _)| b.contains(e))
            .map(|(_, _, w)| w)
            .sum();
        let mut deficit = target - &cover;
        if deficit.is_negative() {
            return Err(Error::InvalidInput(format!(
                "item {e} covered with weight {cover} > {target}"
            )));
        }
        let mut k = 0;
        while deficit.is_positive() && k < parts.len() {
            if !parts[k].1.contains(e) {
                let (t, b, w) = parts[k].clone();
                if w <= deficit {
                    parts[k].1 = b.with(e);
                    deficit -= &w;
                } else {
                    parts[k].2 = &w - &deficit;
                    parts.push((t, b.with(e), deficit.clone()));
                    deficit = Rat::zero();
                }
            }
            k += 1;
        }
        if deficit.is_positive() {
            return Err(Error::InvalidInput(format!(
                "not enough weight to cover item {e}"
            )));
        }
    }
    let mut merged: Vec<(T, Bundle, Rat)> = Vec::with_capacity(parts.len());
    for (t, b, w) in parts.drain(..) {
        match merged.iter_mut().find(|(u, c, _)| *u == t && *c == b) {
            Some((_, _, x)) => *x += w,
            None => merged.push((t, b, w)),
        }
    }
    *parts = merged;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionCheck {
    pub valid: bool,
    /// Minimum value over bundles with positive weight (0 if none).
    pub min_value: Rat,
    /// First violated constraint, when invalid.
    pub violation: Option<String>,
}

/// Checks the weight constraints of `fp` over the items of `v` and reports
/// the smallest supported bundle value.
pub fn check_fractional_partition(fp: &FractionalPartition, v: &Valuation) -> PartitionCheck {
    let m = v.num_items();
    let min_value = fp
        .support()
        .map(|(b, _)| v.value(*b))
        .min()
        .unwrap_or_default();
    let violation = partition_violation(fp, m);
    PartitionCheck {
        valid: violation.is_none(),
        min_value,
        violation,
    }
}

fn partition_violation(fp: &FractionalPartition, m: usize) -> Option<String> {
    let full = Bundle::full(m);
    for (b, w) in &fp.parts {
        if w.is_negative() {
            return Some(format!("negative weight {w} on {b}"));
        }
        if !b.is_subset_of(full) {
            return Some(format!("bundle {b} names items outside 0..{m}"));
        }
    }
    let total: Rat = fp.parts.iter().map(|(_, w)| w).sum();
    if total != Rat::one() {
        return Some(format!("weights sum to {total}, expected 1"));
    }
    for e in 0..m {
        let cover: Rat = fp
            .parts
            .iter()
            .filter(|(b, _)| b.contains(e))
            .map(|(_, w)| w)
            .sum();
        if cover != fp.rho {
            return Some(format!(
                "item {e} covered with weight {cover}, expected {}",
                fp.rho
            ));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    #[test]
    fn entitlements_must_sum_to_one() {
        let v = Valuation::additive(vec![r(1)]).unwrap();
        let agent = |b| Agent {
            valuation: v.clone(),
            entitlement: b,
        };
        assert!(Instance::new(1, vec![agent(Rat::frac(1, 2))]).is_err());
        assert!(Instance::with_partial_entitlements(1, vec![agent(Rat::frac(1, 2))]).is_ok());
        assert!(Instance::new(1, vec![agent(Rat::frac(1, 2)), agent(Rat::frac(1, 2))]).is_ok());
        assert!(Instance::new(1, vec![agent(r(0)), agent(r(1))]).is_err());
        assert!(Instance::new(2, vec![agent(r(1))]).is_err());
    }

    #[test]
    fn overlapping_allocation_is_rejected() {
        assert!(Allocation::new(vec![Bundle::from_items([0, 1]), Bundle::singleton(1)]).is_err());
        let a = Allocation::new(vec![Bundle::singleton(0), Bundle::singleton(2)]).unwrap();
        assert!(!a.is_complete(3));
        assert_eq!(a.allocated(), Bundle::from_items([0, 2]));
    }

    #[test]
    fn integral_partition_is_fractional() {
        let v = Valuation::additive(vec![r(1), r(2), r(3)]).unwrap();
        let fp = FractionalPartition::from_partition(&[
            Bundle::from_items([0, 1]),
            Bundle::singleton(2),
            Bundle::EMPTY,
        ]);
        let c = check_fractional_partition(&fp, &v);
        assert!(c.valid);
        assert_eq!(c.min_value, r(0));
    }

    #[test]
    fn completion_fills_coverage_exactly() {
        let v = Valuation::additive(vec![r(1), r(1), r(1)]).unwrap();
        let parts = vec![
            (Bundle::singleton(0), Rat::frac(1, 3)),
            (Bundle::singleton(1), Rat::frac(1, 3)),
        ];
        let fp = FractionalPartition::completed(parts, Rat::frac(1, 2), 3).unwrap();
        let c = check_fractional_partition(&fp, &v);
        assert!(c.valid, "{:?}", c.violation);
        assert!(fp.parts.iter().any(|(b, _)| b.contains(0) && b.contains(2)));
        let over = vec![(Bundle::singleton(0), Rat::one())];
        assert!(FractionalPartition::completed(over, Rat::frac(1, 2), 1).is_err());
    }

    #[test]
    fn half_weight_is_invalid() {
        let v = Valuation::additive(vec![r(1)]).unwrap();
        let fp = FractionalPartition {
            parts: vec![(Bundle::singleton(0), Rat::frac(1, 2))],
            rho: Rat::frac(1, 2),
        };
        let c = check_fractional_partition(&fp, &v);
        assert!(!c.valid);
        assert!(c.violation.unwrap().contains("sum"));
    }
}
