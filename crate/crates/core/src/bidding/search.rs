use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Agent, Instance};
use crate::numerics::Rat;

use super::game::{check_bid, GameMode, GameState, RoundRecord, Strategy, View};

/// Item limit for the game-tree search.
pub const MAX_SEARCH_ITEMS: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    pub mode: GameMode,
    /// Adds midpoints between neighboring grid bids.
    pub refine: bool,
    pub node_limit: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: GameMode::Extended,
            refine: false,
            node_limit: 2_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub worst_value: Rat,
    pub nodes: usize,
}

/// Smallest final value the protagonist can be held to when every other
/// agent is merged into one adversary holding their combined budget, who
/// also wins all ties.
///
/// Adversary bids range over a finite grid: the protagonist's current bid
/// and the fractions `budget / j` of both budgets for `j ≤ m`. The
/// protagonist's strategy must depend on the game state only (not on the
/// history), since positions are memoized.
pub fn adversary_search(
    inst: &Instance,
    protagonist: usize,
    strategy: &mut dyn Strategy,
    cfg: &SearchConfig,
) -> Result<SearchOutcome> {
    if protagonist >= inst.n() {
        return Err(Error::InvalidInput(format!("no agent {protagonist}")));
    }
    if inst.m() > MAX_SEARCH_ITEMS {
        return Err(Error::SearchSpaceTooLarge(format!(
            "{} items (limit {MAX_SEARCH_ITEMS})",
            inst.m()
        )));
    }
    let me = inst.agent(protagonist).clone();
    let others: Rat = (0..inst.n())
        .filter(|&i| i != protagonist)
        .map(|i| inst.entitlement(i))
        .sum();
    let mut agents = vec![me.clone()];
    if others.is_positive() {
        agents.push(Agent {
            valuation: me.valuation.clone(),
            entitlement: others,
        });
    }
    let duel = Instance::with_partial_entitlements(inst.m(), agents)?;
    let mut search = Search {
        inst: &duel,
        strategy,
        cfg,
        nodes: 0,
        memo: HashMap::new(),
    };
    let state = GameState::initial(&duel);
    let worst_value = search.explore(&state)?;
    Ok(SearchOutcome {
        worst_value,
        nodes: search.nodes,
    })
}

type Key = (u64, u64, Rat, Rat);

struct Search<'a> {
    inst: &'a Instance,
    strategy: &'a mut dyn Strategy,
    cfg: &'a SearchConfig,
    nodes: usize,
    memo: HashMap<Key, Rat>,
}

impl Search<'_> {
    fn explore(&mut self, state: &GameState) -> Result<Rat> {
        let v = self.inst.valuation(0);
        if state.remaining.is_empty() {
            return Ok(v.value(state.holdings[0]));
        }
        let key = (
            state.remaining.mask(),
            state.holdings[0].mask(),
            state.budgets[0].clone(),
            state.budgets.get(1).cloned().unwrap_or_default(),
        );
        if let Some(x) = self.memo.get(&key) {
            return Ok(x.clone());
        }
        self.nodes += 1;
        if self.nodes > self.cfg.node_limit {
            return Err(Error::SearchSpaceTooLarge(format!(
                "more than {} positions",
                self.cfg.node_limit
            )));
        }
        let history: &[RoundRecord] = &[];
        let view = View {
            agent: 0,
            instance: self.inst,
            state,
            history,
            mode: self.cfg.mode,
        };
        let p = self.strategy.bid(&view)?;
        check_bid(state, 0, &p)?;

        // the adversary stays below the protagonist's bid
        let mut worst = if p.is_zero() {
            v.value(state.holdings[0])
        } else {
            let sel = self.strategy.select(&view, &p)?;
            let mut next = state.clone();
            next.apply(self.cfg.mode, 0, &p, sel)?;
            self.explore(&next)?
        };
        if self.inst.n() == 2 {
            for g in self.grid(state, &p) {
                let count = {
                    let v1 = View {
                        agent: 1,
                        instance: self.inst,
                        state,
                        history,
                        mode: self.cfg.mode,
                    };
                    v1.affordable(&g)
                };
                for sel in state.remaining.subsets().skip(1) {
                    if sel.len() > count {
                        continue;
                    }
                    let mut next = state.clone();
                    next.apply(self.cfg.mode, 1, &g, sel)?;
                    let x = self.explore(&next)?;
                    if x < worst {
                        worst = x;
                    }
                }
            }
        }
        self.memo.insert(key, worst.clone());
        Ok(worst)
    }

    /// Winning adversary bids: at least the protagonist's bid, at most the
    /// adversary's budget, and positive.
    fn grid(&self, state: &GameState, p: &Rat) -> Vec<Rat> {
        let adv = &state.budgets[1];
        let m = self.inst.m();
        let mut set: BTreeSet<Rat> = BTreeSet::new();
        set.insert(p.clone());
        for j in 1..=m {
            let j = Rat::from(j);
            set.insert(adv / &j);
            set.insert(self.inst.entitlement(0) / &j);
        }
        let mut grid: Vec<Rat> = set
            .into_iter()
            .filter(|g| g.is_positive() && g >= p && g <= adv)
            .collect();
        if self.cfg.refine {
            let mids: Vec<Rat> = grid
                .windows(2)
                .map(|w| (&w[0] + &w[1]) / Rat::from_int(2))
                .collect();
            grid.extend(mids);
            grid.sort();
        }
        grid
    }
}
