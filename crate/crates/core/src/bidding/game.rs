use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Instance};
use crate::numerics::Rat;

/// Plain: a winner takes exactly one item. Extended: a winner takes any
/// number of items, paying her bid per item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GameMode {
    Plain,
    Extended,
}

impl FromStr for GameMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(GameMode::Plain),
            "extended" => Ok(GameMode::Extended),
            _ => Err(Error::Usage(format!("unknown game mode `{s}`"))),
        }
    }
}

/// Who wins among equal highest bids.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieRule {
    #[default]
    LowestIndex,
    HighestIndex,
    /// Uniform among the tied agents, drawn from the game seed.
    Seeded,
}

impl FromStr for TieRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowest-index" => Ok(TieRule::LowestIndex),
            "highest-index" => Ok(TieRule::HighestIndex),
            "seeded" => Ok(TieRule::Seeded),
            _ => Err(Error::Usage(format!("unknown tie rule `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GameState {
    pub remaining: Bundle,
    pub budgets: Vec<Rat>,
    pub holdings: Vec<Bundle>,
    /// Rounds played so far.
    pub round: usize,
    /// Price paid per item; zero while unsold.
    pub prices: Vec<Rat>,
    /// Agents with budget left.
    pub active: Vec<bool>,
}

impl GameState {
    pub fn initial(inst: &Instance) -> Self {
        let budgets: Vec<Rat> = inst
            .agents()
            .iter()
            .map(|a| a.entitlement.clone())
            .collect();
        GameState {
            remaining: inst.items(),
            active: budgets.iter().map(Rat::is_positive).collect(),
            budgets,
            holdings: vec![Bundle::EMPTY; inst.n()],
            round: 0,
            prices: vec![Rat::zero(); inst.m()],
        }
    }

    /// Applies a won round after validating it.
    pub(crate) fn apply(
        &mut self,
        mode: GameMode,
        winner: usize,
        bid: &Rat,
        selection: Bundle,
    ) -> Result<Rat> {
        check_selection(mode, self, winner, bid, selection)?;
        let payment = bid * Rat::from(selection.len());
        self.budgets[winner] = &self.budgets[winner] - &payment;
        self.active[winner] = self.budgets[winner].is_positive();
        self.holdings[winner] = self.holdings[winner].union(selection);
        self.remaining = self.remaining.difference(selection);
        for e in selection.items() {
            self.prices[e] = bid.clone();
        }
        self.round += 1;
        Ok(payment)
    }
}

pub(crate) fn check_bid(state: &GameState, agent: usize, bid: &Rat) -> Result<()> {
    if bid.is_negative() {
        return Err(Error::IllegalBid {
            agent,
            reason: format!("negative bid {bid}"),
        });
    }
    if *bid > state.budgets[agent] {
        return Err(Error::IllegalBid {
            agent,
            reason: format!("bid {bid} exceeds budget {}", state.budgets[agent]),
        });
    }
    Ok(())
}

pub(crate) fn check_selection(
    mode: GameMode,
    state: &GameState,
    agent: usize,
    bid: &Rat,
    selection: Bundle,
) -> Result<()> {
    let fail = |reason: String| Err(Error::IllegalSelection { agent, reason });
    if selection.is_empty() {
        return fail("empty selection".into());
    }
    if !selection.is_subset_of(state.remaining) {
        return fail(format!("{selection} includes unavailable items"));
    }
    if mode == GameMode::Plain && selection.len() != 1 {
        return fail(format!("plain game allows one item, got {selection}"));
    }
    let cost = bid * Rat::from(selection.len());
    if cost > state.budgets[agent] {
        return fail(format!(
            "{} items at {bid} cost {cost}, budget is {}",
            selection.len(),
            state.budgets[agent]
        ));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub bids: Vec<Rat>,
    pub winner: usize,
    pub selection: Bundle,
    pub payment: Rat,
}

/// What a strategy sees when asked to act.
pub struct View<'a> {
    pub agent: usize,
    pub instance: &'a Instance,
    pub state: &'a GameState,
    pub history: &'a [RoundRecord],
    pub mode: GameMode,
}

impl View<'_> {
    pub fn budget(&self) -> &Rat {
        &self.state.budgets[self.agent]
    }

    /// How many items the agent can pay for at `price` (all of them at
    /// price 0), capped by what remains and by the mode.
    pub fn affordable(&self, price: &Rat) -> usize {
        let left = self.state.remaining.len();
        let cap = if self.mode == GameMode::Plain {
            1
        } else {
            left
        };
        if !price.is_positive() {
            return cap;
        }
        let n = (self.budget() / price).floor();
        usize::try_from(n).map_or(cap, |n| n.min(cap))
    }
}

/// A bidding behavior. Bids must lie in `[0, budget]`; a selection must be
/// a non-empty set of remaining items the agent can pay for.
pub trait Strategy {
    fn name(&self) -> String;
    fn bid(&mut self, view: &View) -> Result<Rat>;
    fn select(&mut self, view: &View, price: &Rat) -> Result<Bundle>;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub mode: GameMode,
    pub rounds: Vec<RoundRecord>,
    pub allocation: Allocation,
    pub values: Vec<Rat>,
    pub budgets: Vec<Rat>,
}

#[derive(Serialize)]
struct RoundLine<'a> {
    round: usize,
    bids: &'a [Rat],
    winner: usize,
    selection: u64,
    payment: &'a Rat,
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    bundles: Vec<u64>,
    values: &'a [Rat],
    budgets: &'a [Rat],
}

impl Transcript {
    /// One JSON object per round, then one summary object.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.rounds {
            let line = RoundLine {
                round: r.round,
                bids: &r.bids,
                winner: r.winner,
                selection: r.selection.mask(),
                payment: &r.payment,
            };
            out.push_str(&serde_json::to_string(&line).expect("serializable"));
            out.push('\n');
        }
        let summary = SummaryLine {
            bundles: self.allocation.bundles().iter().map(|b| b.mask()).collect(),
            values: &self.values,
            budgets: &self.budgets,
        };
        out.push_str(&serde_json::to_string(&summary).expect("serializable"));
        out.push('\n');
        out
    }

    /// Replays the rounds against the instance, checking bids, payments,
    /// budgets and the final allocation.
    pub fn verify(&self, inst: &Instance) -> Result<()> {
        let mut state = GameState::initial(inst);
        for r in &self.rounds {
            if r.bids.len() != inst.n() || r.winner >= inst.n() {
                return Err(Error::InvalidInput(format!(
                    "round {} is malformed",
                    r.round
                )));
            }
            for (i, b) in r.bids.iter().enumerate() {
                check_bid(&state, i, b)?;
            }
            let top = r.bids.iter().max().expect("at least one agent");
            if r.bids[r.winner] != *top {
                return Err(Error::InvalidInput(format!(
                    "round {}: winner did not place the highest bid",
                    r.round
                )));
            }
            let paid = state.apply(self.mode, r.winner, top, r.selection)?;
            if paid != r.payment {
                return Err(Error::InvalidInput(format!(
                    "round {}: payment {} recorded, {paid} due",
                    r.round, r.payment
                )));
            }
        }
        let expected = Allocation::new(state.holdings.clone())?;
        if expected != self.allocation || state.budgets != self.budgets {
            return Err(Error::InvalidInput(
                "final state does not match the rounds".into(),
            ));
        }
        for (i, b) in state.budgets.iter().enumerate() {
            let spent: Rat = self
                .rounds
                .iter()
                .filter(|r| r.winner == i)
                .map(|r| &r.payment)
                .sum();
            if *b != inst.entitlement(i) - &spent || b.is_negative() {
                return Err(Error::InvalidInput(format!(
                    "budget of agent {i} not conserved"
                )));
            }
        }
        Ok(())
    }
}

/// Plays the game to the end: until no items remain or every bid is 0.
pub fn run_game(
    inst: &Instance,
    strategies: &mut [Box<dyn Strategy>],
    mode: GameMode,
    tie: TieRule,
    seed: u64,
) -> Result<Transcript> {
    if strategies.len() != inst.n() {
        return Err(Error::InvalidInput(format!(
            "{} strategies for {} agents",
            strategies.len(),
            inst.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = GameState::initial(inst);
    let mut rounds: Vec<RoundRecord> = Vec::new();
    while !state.remaining.is_empty() {
        let mut bids = Vec::with_capacity(inst.n());
        for (i, s) in strategies.iter_mut().enumerate() {
            let view = View {
                agent: i,
                instance: inst,
                state: &state,
                history: &rounds,
                mode,
            };
            let b = s.bid(&view)?;
            check_bid(&state, i, &b)?;
            bids.push(b);
        }
        let top = bids.iter().max().expect("at least one agent").clone();
        if top.is_zero() {
            break;
        }
        let tied: Vec<usize> = (0..bids.len()).filter(|&i| bids[i] == top).collect();
        let winner = match tie {
            TieRule::LowestIndex => tied[0],
            TieRule::HighestIndex => tied[tied.len() - 1],
            TieRule::Seeded => tied[rng.gen_range(0..tied.len())],
        };
        let view = View {
            agent: winner,
            instance: inst,
            state: &state,
            history: &rounds,
            mode,
        };
        let selection = strategies[winner].select(&view, &top)?;
        let round = state.round;
        let payment = state.apply(mode, winner, &top, selection)?;
        rounds.push(RoundRecord {
            round,
            bids,
            winner,
            selection,
            payment,
        });
    }
    let allocation = Allocation::new(state.holdings.clone())?;
    let values = allocation.values(inst);
    Ok(Transcript {
        mode,
        rounds,
        allocation,
        values,
        budgets: state.budgets,
    })
}

impl fmt::Display for GameMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameMode::Plain => "plain",
            GameMode::Extended => "extended",
        })
    }
}
