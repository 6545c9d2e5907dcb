use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Instance, Valuation};
use crate::numerics::Rat;
use crate::shares::aps;

use super::apsxos::hat_valuation;
use super::split::split_min_value;
use super::welfare::welfare_max;
use super::{outcomes, AllocationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ReplacementCase {
    SingleItem,
    MultiItems,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplacementStep {
    pub agent: usize,
    pub case: ReplacementCase,
    pub old: Bundle,
    pub new: Bundle,
    pub welfare_before: Rat,
    pub welfare_after: Rat,
}

/// `⌈(1/b_min)²⌉ + 10`.
pub fn default_max_steps(inst: &Instance) -> usize {
    let b_min = inst
        .agents()
        .iter()
        .map(|a| a.entitlement.clone())
        .min()
        .unwrap_or_else(Rat::one);
    let inv = Rat::one()
        .checked_div(&b_min)
        .unwrap_or_else(|_| Rat::one());
    let sq = inv.pow(2).ceil();
    usize::try_from(sq).unwrap_or(usize::MAX / 2) + 10
}

/// One agent's view, with values rescaled so that its APS equals `b`.
struct Normalized {
    b: Rat,
    hat: Valuation,
    /// Single items from the APS partition, with their weights.
    singles: Vec<(usize, Rat)>,
    /// Halves of the remaining APS bundles.
    multis: Vec<Bundle>,
    /// Total weight of bundles that became single items.
    alpha: Rat,
    trivial: bool,
}

impl Normalized {
    fn build(v: &Valuation, b: &Rat, share: &Rat, partition: &[(Bundle, Rat)]) -> Result<Self> {
        let third = b / Rat::from_int(3);
        let hat = hat_valuation(v, share, b, &Rat::frac(1, 3))?;
        if !share.is_positive() {
            return Ok(Normalized {
                b: b.clone(),
                hat,
                singles: Vec::new(),
                multis: Vec::new(),
                alpha: Rat::zero(),
                trivial: true,
            });
        }
        let v = v.scaled(&(b / share));
        let mut singles: Vec<(usize, Rat)> = Vec::new();
        let mut multis = Vec::new();
        let mut alpha = Rat::zero();
        for (part, w) in partition {
            if !w.is_positive() {
                continue;
            }
            let large = part
                .items()
                .map(|e| (v.item_value(e), e))
                .filter(|(x, _)| *x >= third)
                .max_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
            if let Some((_, e)) = large {
                alpha += w;
                match singles.iter_mut().find(|(x, _)| *x == e) {
                    Some(s) => s.1 += w,
                    None => singles.push((e, w.clone())),
                }
            } else {
                let (h1, h2) = split_min_value(*part, &v, &third)?;
                multis.extend([h1, h2]);
            }
        }
        singles.sort_by_key(|s| s.0);
        multis.sort_by(|a, c| a.canonical_cmp(*c));
        multis.dedup();
        Ok(Normalized {
            b: b.clone(),
            hat,
            singles,
            multis,
            alpha,
            trivial: false,
        })
    }

    fn acceptable(&self, s: Bundle) -> bool {
        self.trivial || self.hat.value(s) * Rat::from_int(6) >= self.b
    }
}

/// Every agent gets at least a sixth of its APS, for any entitlements.
///
/// Starts from a welfare maximizer for `min(b_i/3, (b_i/APS_i)·v_i)`. While
/// some agent (lowest index first) holds less than `b_i/6` under that
/// capped valuation, it rebuilds its APS partition (bundles with an item
/// worth `b_i/3` shrink to that item; the rest split into two halves worth
/// `b_i/3` each) and takes whichever candidate costs the others the least,
/// measured by their supporting clauses. It takes a single item when the
/// APS weight on single items is at least the share of the others' welfare
/// sitting on those items, and a half otherwise. Items it gives up stay
/// unallocated.
///
/// Steps beyond `max_steps` (default [`default_max_steps`]) fail with
/// [`Error::StepBudgetExhausted`]. A half-bundle step that does not raise
/// the capped welfare fails with [`Error::TheoremViolated`].
pub fn allocate_one_sixth(inst: &Instance, max_steps: Option<usize>) -> Result<AllocationReport> {
    run(inst, None, max_steps)
}

/// [`allocate_one_sixth`] started from `start` instead of the capped
/// welfare maximizer. Items `start` leaves unallocated stay so.
pub fn allocate_one_sixth_from(
    inst: &Instance,
    start: &Allocation,
    max_steps: Option<usize>,
) -> Result<AllocationReport> {
    if start.bundles().len() != inst.n() || start.allocated().span() > inst.m() {
        return Err(Error::InvalidAllocation(
            "start does not fit the instance".into(),
        ));
    }
    run(inst, Some(start), max_steps)
}

fn run(
    inst: &Instance,
    start: Option<&Allocation>,
    max_steps: Option<usize>,
) -> Result<AllocationReport> {
    let max_steps = max_steps.unwrap_or_else(|| default_max_steps(inst));
    let mut shares = Vec::with_capacity(inst.n());
    let mut agents = Vec::with_capacity(inst.n());
    for a in inst.agents() {
        let (share, fp) = aps(&a.valuation, &a.entitlement)?;
        agents.push(Normalized::build(
            &a.valuation,
            &a.entitlement,
            &share,
            &fp.parts,
        )?);
        shares.push(share);
    }
    let mut bundles = match start {
        Some(a) => a.bundles().to_vec(),
        None => {
            let hats: Vec<Valuation> = agents.iter().map(|a| a.hat.clone()).collect();
            welfare_max(inst, &hats)?.0.bundles().to_vec()
        }
    };
    let welfare = |bundles: &[Bundle]| -> Rat {
        agents
            .iter()
            .zip(bundles)
            .map(|(a, b)| a.hat.value(*b))
            .sum()
    };

    let mut steps = Vec::new();
    while let Some(i) = (0..inst.n()).find(|&i| !agents[i].acceptable(bundles[i])) {
        if steps.len() >= max_steps {
            return Err(Error::StepBudgetExhausted(max_steps));
        }
        // additive contributions of every other agent's current bundle
        let mut contrib = vec![Rat::zero(); inst.m()];
        for (j, a) in agents.iter().enumerate() {
            if j == i {
                continue;
            }
            for (e, x) in a.hat.supporting_clause(bundles[j])?.into_iter().enumerate() {
                if x.is_positive() {
                    contrib[e] = x;
                }
            }
        }
        let cost = |s: Bundle| -> Rat { s.items().map(|e| &contrib[e]).sum() };
        let others: Rat = contrib.iter().sum();
        let me = &agents[i];
        let on_singles = cost(Bundle::from_items(me.singles.iter().map(|s| s.0)));
        let alpha = if others.is_positive() {
            on_singles / &others
        } else {
            Rat::zero()
        };

        let (case, new) = if me.alpha.is_positive() && me.alpha >= alpha {
            let e = me
                .singles
                .iter()
                .map(|s| s.0)
                .min_by(|&x, &y| contrib[x].cmp(&contrib[y]).then(x.cmp(&y)))
                .expect("positive single-item weight");
            (ReplacementCase::SingleItem, Bundle::singleton(e))
        } else {
            let b = me
                .multis
                .iter()
                .copied()
                .min_by(|x, y| cost(*x).cmp(&cost(*y)).then(x.canonical_cmp(*y)))
                .ok_or_else(|| {
                    Error::TheoremViolated(format!("agent {i} has no candidate bundle"))
                })?;
            (ReplacementCase::MultiItems, b)
        };

        let before = welfare(&bundles);
        let old = bundles[i];
        for (j, b) in bundles.iter_mut().enumerate() {
            *b = if j == i { new } else { b.difference(new) };
        }
        let after = welfare(&bundles);
        if case == ReplacementCase::MultiItems && after <= before {
            return Err(Error::TheoremViolated(format!(
                "replacement by agent {i} moved capped welfare from {before} to {after}"
            )));
        }
        steps.push(ReplacementStep {
            agent: i,
            case,
            old,
            new,
            welfare_before: before,
            welfare_after: after,
        });
    }

    let allocation = Allocation::new(bundles)?;
    let guarantees: Vec<Rat> = shares.iter().map(|s| s / Rat::from_int(6)).collect();
    let outcomes = outcomes(inst, &allocation, &shares, &guarantees);
    if let Some(o) = outcomes.iter().find(|o| o.value < o.guarantee) {
        return Err(Error::BoundViolated(format!(
            "agent {} gets {} < APS/6 = {}",
            o.agent, o.value, o.guarantee
        )));
    }
    Ok(AllocationReport {
        algorithm: "one-sixth".into(),
        allocation,
        agents: outcomes,
        steps,
        step1: Vec::new(),
        n5: None,
    })
}
