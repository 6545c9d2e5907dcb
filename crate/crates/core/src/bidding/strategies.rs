use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ladder::choose_k;
use crate::model::{Bundle, Valuation, MAX_TABLE_ITEMS};
use crate::numerics::Rat;
use crate::shares::aps;

use super::game::{Strategy, View};

/// Smallest bundle of `remaining` worth at least `rho`; among equal sizes
/// the most valuable, then the canonical order. `None` if even all of
/// `remaining` falls short.
pub fn smallest_acceptable(v: &Valuation, remaining: Bundle, rho: &Rat) -> Result<Option<Bundle>> {
    let clauses: Option<Vec<&[Rat]>> = match v {
        Valuation::Additive(c) => Some(vec![c.as_slice()]),
        Valuation::Xos(cs) => Some(cs.iter().map(Vec::as_slice).collect()),
        _ => None,
    };
    match clauses {
        Some(cs) => Ok(smallest_by_clauses(&cs, remaining, rho)),
        None => smallest_by_enumeration(v, remaining, rho),
    }
}

/// For a maximum of additive clauses, the best bundle of each size is a
/// top-valued prefix of some clause.
fn smallest_by_clauses(clauses: &[&[Rat]], remaining: Bundle, rho: &Rat) -> Option<Bundle> {
    let orders: Vec<Vec<usize>> = clauses
        .iter()
        .map(|c| {
            let mut items: Vec<usize> = remaining.items().collect();
            items.sort_by(|&a, &b| c[b].cmp(&c[a]).then(a.cmp(&b)));
            items
        })
        .collect();
    for s in 0..=remaining.len() {
        let mut best: Option<(Rat, Bundle)> = None;
        for (c, order) in clauses.iter().zip(&orders) {
            let set = Bundle::from_items(order[..s].iter().copied());
            let val: Rat = order[..s].iter().map(|&e| &c[e]).sum();
            let better = match &best {
                None => true,
                Some((bv, bs)) => val > *bv || (val == *bv && set.canonical_cmp(*bs).is_lt()),
            };
            if better {
                best = Some((val, set));
            }
        }
        if let Some((val, set)) = best {
            if val >= *rho {
                return Some(set);
            }
        }
    }
    None
}

fn smallest_by_enumeration(v: &Valuation, remaining: Bundle, rho: &Rat) -> Result<Option<Bundle>> {
    if remaining.len() > MAX_TABLE_ITEMS {
        return Err(Error::TooLarge(format!(
            "searching {} items for an acceptable bundle",
            remaining.len()
        )));
    }
    let mut best: Option<(usize, Rat, Bundle)> = None;
    for s in remaining.subsets() {
        let val = v.value(s);
        if val < *rho {
            continue;
        }
        let better = match &best {
            None => true,
            Some((n, bv, bs)) => {
                s.len() < *n
                    || (s.len() == *n
                        && (val > *bv || (val == *bv && s.canonical_cmp(*bs).is_lt())))
            }
        };
        if better {
            best = Some((s.len(), val, s));
        }
    }
    Ok(best.map(|(_, _, s)| s))
}

/// Bids `b_i / |S|` for the smallest acceptable bundle `S` while holding
/// the full entitlement; on winning takes exactly `S` and bids 0 thereafter.
///
/// The target defaults to `APS/k` with `k` from [`choose_k`] at the agent's
/// entitlement. With a zero target the agent never bids.
#[derive(Clone, Debug)]
pub struct OneShot {
    target: Target,
    resolved: Option<Rat>,
}

#[derive(Clone, Debug)]
enum Target {
    Value(Rat),
    ApsOver(Option<usize>),
}

impl OneShot {
    pub fn new() -> Self {
        OneShot {
            target: Target::ApsOver(None),
            resolved: None,
        }
    }

    /// Acceptable means worth at least `rho`.
    pub fn with_target(rho: Rat) -> Self {
        OneShot {
            target: Target::Value(rho),
            resolved: None,
        }
    }

    /// Acceptable means worth at least `APS/k`.
    pub fn with_k(k: usize) -> Self {
        OneShot {
            target: Target::ApsOver(Some(k)),
            resolved: None,
        }
    }

    pub fn target(&mut self, view: &View) -> Result<Rat> {
        if let Some(r) = &self.resolved {
            return Ok(r.clone());
        }
        let v = view.instance.valuation(view.agent);
        let b = view.instance.entitlement(view.agent);
        let rho = match &self.target {
            Target::Value(r) => r.clone(),
            Target::ApsOver(k) => {
                let k = k.unwrap_or_else(|| choose_k(view.instance.m() as u64, Some(b)));
                aps(v, b)?.0 / Rat::from(k)
            }
        };
        if rho.is_negative() {
            return Err(Error::InvalidInput(format!(
                "agent {}: negative acceptability target {rho}",
                view.agent
            )));
        }
        self.resolved = Some(rho.clone());
        Ok(rho)
    }

    fn wanted(&mut self, view: &View) -> Result<Option<Bundle>> {
        if *view.budget() != *view.instance.entitlement(view.agent) {
            return Ok(None);
        }
        let rho = self.target(view)?;
        // a zero target is met by the empty bundle
        if rho.is_zero() {
            return Ok(None);
        }
        let v = view.instance.valuation(view.agent);
        match smallest_acceptable(v, view.state.remaining, &rho)? {
            Some(s) => Ok(Some(s)),
            None => Err(Error::StrategyFailed {
                agent: view.agent,
                round: view.state.round,
            }),
        }
    }
}

impl Default for OneShot {
    fn default() -> Self {
        OneShot::new()
    }
}

impl Strategy for OneShot {
    fn name(&self) -> String {
        match &self.target {
            Target::Value(r) => format!("one-shot@{r}"),
            Target::ApsOver(Some(k)) => format!("one-shot:k={k}"),
            Target::ApsOver(None) => "one-shot".into(),
        }
    }

    fn bid(&mut self, view: &View) -> Result<Rat> {
        Ok(match self.wanted(view)? {
            Some(s) => view.budget() / &Rat::from(s.len()),
            None => Rat::zero(),
        })
    }

    fn select(&mut self, view: &View, _price: &Rat) -> Result<Bundle> {
        self.wanted(view)?.ok_or_else(|| Error::IllegalSelection {
            agent: view.agent,
            reason: "one-shot agent won after retiring".into(),
        })
    }
}

/// Bids `budget / spread` and takes as many items as it can pay for,
/// each time the one adding the most value.
#[derive(Clone, Debug)]
pub struct Greedy {
    pub spread: usize,
}

impl Strategy for Greedy {
    fn name(&self) -> String {
        format!("greedy:{}", self.spread)
    }

    fn bid(&mut self, view: &View) -> Result<Rat> {
        Ok(view.budget() / &Rat::from(self.spread.max(1)))
    }

    fn select(&mut self, view: &View, price: &Rat) -> Result<Bundle> {
        let v = view.instance.valuation(view.agent);
        let mut held = view.state.holdings[view.agent];
        let mut taken = Bundle::EMPTY;
        let count = view.affordable(price).max(1);
        for _ in 0..count {
            let base = v.value(held);
            let pick = view
                .state
                .remaining
                .difference(taken)
                .items()
                .map(|e| (v.value(held.with(e)) - &base, e))
                .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
            match pick {
                Some((_, e)) => {
                    taken = taken.with(e);
                    held = held.with(e);
                }
                None => break,
            }
        }
        Ok(taken)
    }
}

/// Bids a random multiple of an eighth of its budget and takes a random
/// affordable set.
#[derive(Clone, Debug)]
pub struct RandomBids {
    rng: ChaCha8Rng,
    seed: u64,
}

impl RandomBids {
    pub fn new(seed: u64) -> Self {
        RandomBids {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        }
    }
}

impl Strategy for RandomBids {
    fn name(&self) -> String {
        format!("random:{}", self.seed)
    }

    fn bid(&mut self, view: &View) -> Result<Rat> {
        let j = self.rng.gen_range(0..=8);
        Ok(view.budget() * Rat::frac(j, 8))
    }

    fn select(&mut self, view: &View, price: &Rat) -> Result<Bundle> {
        let mut items: Vec<usize> = view.state.remaining.items().collect();
        items.shuffle(&mut self.rng);
        let count = self.rng.gen_range(1..=view.affordable(price).max(1));
        Ok(Bundle::from_items(items.into_iter().take(count)))
    }
}

/// Never bids.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroBid;

impl Strategy for ZeroBid {
    fn name(&self) -> String {
        "zero".into()
    }

    fn bid(&mut self, _view: &View) -> Result<Rat> {
        Ok(Rat::zero())
    }

    fn select(&mut self, view: &View, _price: &Rat) -> Result<Bundle> {
        view.state
            .remaining
            .items()
            .next()
            .map(Bundle::singleton)
            .ok_or_else(|| Error::IllegalSelection {
                agent: view.agent,
                reason: "nothing remains".into(),
            })
    }
}

/// Textual strategy names: `one-shot`, `one-shot:k=K`, `one-shot@RHO`,
/// `greedy`, `greedy:SPREAD`, `random`, `random:SEED`, `zero`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategySpec {
    OneShot,
    OneShotK(usize),
    OneShotTarget(Rat),
    Greedy(usize),
    Random(Option<u64>),
    Zero,
}

impl StrategySpec {
    /// Builds the strategy for `agent`; unseeded random strategies derive
    /// their seed from the game seed and the agent index.
    pub fn build(&self, seed: u64, agent: usize) -> Box<dyn Strategy> {
        match self {
            StrategySpec::OneShot => Box::new(OneShot::new()),
            StrategySpec::OneShotK(k) => Box::new(OneShot::with_k(*k)),
            StrategySpec::OneShotTarget(r) => Box::new(OneShot::with_target(r.clone())),
            StrategySpec::Greedy(s) => Box::new(Greedy { spread: *s }),
            StrategySpec::Random(s) => {
                Box::new(RandomBids::new(s.unwrap_or_else(|| {
                    seed ^ (agent as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
                })))
            }
            StrategySpec::Zero => Box::new(ZeroBid),
        }
    }
}

impl FromStr for StrategySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Usage(format!("unknown strategy `{s}`"));
        if let Some(rho) = s.strip_prefix("one-shot@") {
            return rho
                .parse()
                .map(StrategySpec::OneShotTarget)
                .map_err(|_| bad());
        }
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        match (name, arg) {
            ("one-shot", None) => Ok(StrategySpec::OneShot),
            ("one-shot", Some(a)) => a
                .strip_prefix("k=")
                .and_then(|k| k.parse().ok())
                .filter(|&k| k >= 1)
                .map(StrategySpec::OneShotK)
                .ok_or_else(bad),
            ("greedy", None) => Ok(StrategySpec::Greedy(1)),
            ("greedy", Some(a)) => a
                .parse()
                .ok()
                .filter(|&x| x >= 1)
                .map(StrategySpec::Greedy)
                .ok_or_else(bad),
            ("random", None) => Ok(StrategySpec::Random(None)),
            ("random", Some(a)) => a
                .parse()
                .map(|x| StrategySpec::Random(Some(x)))
                .map_err(|_| bad()),
            ("zero", None) => Ok(StrategySpec::Zero),
            _ => Err(bad()),
        }
    }
}
