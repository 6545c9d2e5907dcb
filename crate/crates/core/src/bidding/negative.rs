use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Agent, Bundle, Instance, Valuation, MAX_ITEMS};
use crate::numerics::Rat;

use super::game::{Strategy, View};

/// Group sizes for the adversarial construction.
///
/// The full construction needs thousands of agents; here each group keeps
/// its bidding rule but has few members, each funded with the whole
/// group's requirement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NegativeSizes {
    /// Number of blocks of agent 0's valuation.
    pub blocks: usize,
    pub p1: usize,
    pub p2: usize,
}

/// An instance where agent 0's XOS valuation is the maximum over blocks,
/// additive within each block, and the other agents follow the price-setting
/// (`P1`) and block-spoiling (`P2`) rules.
#[derive(Clone, Debug, Serialize)]
pub struct NegativeInstance {
    #[serde(skip)]
    pub instance: Instance,
    pub k: usize,
    pub q: usize,
    pub eps: Rat,
    pub blocks: Vec<Bundle>,
    pub p1: Vec<usize>,
    pub p2: Vec<usize>,
    /// Budget units per unit of entitlement; agent 0 holds `k` units.
    pub scale: Rat,
    /// `1 + 3k/q + ε/2`.
    pub bound: Rat,
}

/// Items per block: one of value 1, `q` of value `1/q`, …, `q^{k-1}` of
/// value `1/q^{k-1}`.
pub fn block_size(k: usize, q: usize) -> Option<usize> {
    (0..k).try_fold(0usize, |acc, t| {
        let p = q.checked_pow(t as u32)?;
        acc.checked_add(p)
    })
}

pub fn gen_negative_instance(
    k: usize,
    q: usize,
    eps: &Rat,
) -> Result<(NegativeInstance, Vec<Box<dyn Strategy>>)> {
    let per = block_size(k, q).unwrap_or(usize::MAX);
    let blocks = (MAX_ITEMS / per.max(1)).min(4);
    gen_negative_instance_with(
        k,
        q,
        eps,
        NegativeSizes {
            blocks,
            p1: 2,
            p2: 2,
        },
    )
}

/// Builds the instance and the strategies of agents `1..n`; agent 0's
/// strategy is left to the caller.
pub fn gen_negative_instance_with(
    k: usize,
    q: usize,
    eps: &Rat,
    sizes: NegativeSizes,
) -> Result<(NegativeInstance, Vec<Box<dyn Strategy>>)> {
    if k == 0 || q == 0 || !eps.is_positive() || sizes.p1 == 0 || sizes.p2 == 0 {
        return Err(Error::InvalidInput(
            "k, q, ε and group sizes must be positive".into(),
        ));
    }
    if k > 3 || q > 8 {
        return Err(Error::ParameterTooLarge(format!(
            "k = {k}, q = {q} (limits 3 and 8)"
        )));
    }
    let per = block_size(k, q).unwrap_or(usize::MAX);
    if sizes.blocks == 0 || per.saturating_mul(sizes.blocks) > MAX_ITEMS {
        return Err(Error::ParameterTooLarge(format!(
            "{} blocks of {per} items",
            sizes.blocks
        )));
    }
    let m = per * sizes.blocks;
    let mut item_values = Vec::with_capacity(per);
    for t in 0..k {
        let v = Rat::one() / Rat::from(q).pow(t as u32);
        item_values.extend(std::iter::repeat_n(v, q.pow(t as u32)));
    }
    let blocks: Vec<Bundle> = (0..sizes.blocks)
        .map(|j| Bundle::from_items(j * per..(j + 1) * per))
        .collect();
    let clauses: Vec<Vec<Rat>> = (0..sizes.blocks)
        .map(|j| {
            let mut c = vec![Rat::zero(); m];
            c[j * per..(j + 1) * per].clone_from_slice(&item_values);
            c
        })
        .collect();
    let v0 = Valuation::xos(clauses)?;

    let kk = Rat::from(k);
    let half = Rat::frac(1, 2);
    // P1 buys every item at half its value
    let p1_budget = Rat::from(sizes.blocks) * &kk * &half;
    // at most 4k/ε blocks become dangerous, each costing P2 at most (k − ε/2)q
    let dangerous = (Rat::from_int(4) * &kk / eps).ceil();
    let dangerous = Rat::from(sizes.blocks).min(Rat::from_big(dangerous, 1.into())?);
    let p2_budget = dangerous * (&kk - eps * &half) * Rat::from(q);
    let scale = &kk + Rat::from(sizes.p1) * &p1_budget + Rat::from(sizes.p2) * &p2_budget;

    let mut agents = vec![Agent {
        valuation: v0.clone(),
        entitlement: &kk / &scale,
    }];
    let mut strategies: Vec<Box<dyn Strategy>> = Vec::new();
    let p1: Vec<usize> = (1..=sizes.p1).collect();
    let p2: Vec<usize> = (sizes.p1 + 1..=sizes.p1 + sizes.p2).collect();
    for _ in &p1 {
        agents.push(Agent {
            valuation: v0.clone(),
            entitlement: &p1_budget / &scale,
        });
        strategies.push(Box::new(PriceSetter {
            values: v0.clone(),
            scale: scale.clone(),
        }));
    }
    for _ in &p2 {
        agents.push(Agent {
            valuation: v0.clone(),
            entitlement: &p2_budget / &scale,
        });
        strategies.push(Box::new(Spoiler {
            values: v0.clone(),
            blocks: blocks.clone(),
            q: Rat::from(q),
            threshold: eps * &half,
            scale: scale.clone(),
        }));
    }
    let instance = Instance::new(m, agents)?;
    let bound = Rat::one() + Rat::from(3 * k) / Rat::from(q) + eps * &half;
    Ok((
        NegativeInstance {
            instance,
            k,
            q,
            eps: eps.clone(),
            blocks,
            p1,
            p2,
            scale,
            bound,
        },
        strategies,
    ))
}

/// Most valuable remaining item under agent 0's valuation, lowest index
/// first.
fn top_item(v: &Valuation, among: Bundle) -> Option<(Rat, usize)> {
    among
        .items()
        .map(|e| (v.item_value(e), e))
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
}

/// Bids half the value of the most valuable remaining item and takes it.
struct PriceSetter {
    values: Valuation,
    scale: Rat,
}

impl Strategy for PriceSetter {
    fn name(&self) -> String {
        "price-setter".into()
    }

    fn bid(&mut self, view: &View) -> Result<Rat> {
        let Some((t, _)) = top_item(&self.values, view.state.remaining) else {
            return Ok(Rat::zero());
        };
        let b = t / Rat::from_int(2) / &self.scale;
        Ok(if b <= *view.budget() { b } else { Rat::zero() })
    }

    fn select(&mut self, view: &View, _price: &Rat) -> Result<Bundle> {
        top_item(&self.values, view.state.remaining)
            .map(|(_, e)| Bundle::singleton(e))
            .ok_or_else(|| Error::IllegalSelection {
                agent: view.agent,
                reason: "nothing remains".into(),
            })
    }
}

/// Once agent 0 holds value at least `threshold` inside some block, bids
/// `q` times the most valuable item left in such blocks and takes it.
struct Spoiler {
    values: Valuation,
    blocks: Vec<Bundle>,
    q: Rat,
    threshold: Rat,
    scale: Rat,
}

impl Spoiler {
    fn target(&self, view: &View) -> Option<(Rat, usize)> {
        let held = view.state.holdings[0];
        let pool = self
            .blocks
            .iter()
            .filter(|b| self.values.value(held.intersection(**b)) >= self.threshold)
            .fold(Bundle::EMPTY, |acc, b| acc.union(*b))
            .intersection(view.state.remaining);
        top_item(&self.values, pool)
    }
}

impl Strategy for Spoiler {
    fn name(&self) -> String {
        "spoiler".into()
    }

    fn bid(&mut self, view: &View) -> Result<Rat> {
        let Some((s, _)) = self.target(view) else {
            return Ok(Rat::zero());
        };
        let b = &self.q * s / &self.scale;
        Ok(if b <= *view.budget() { b } else { Rat::zero() })
    }

    fn select(&mut self, view: &View, _price: &Rat) -> Result<Bundle> {
        self.target(view)
            .map(|(_, e)| Bundle::singleton(e))
            .ok_or_else(|| Error::IllegalSelection {
                agent: view.agent,
                reason: "no dangerous block has items left".into(),
            })
    }
}
