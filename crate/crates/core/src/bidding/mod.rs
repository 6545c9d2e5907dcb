//! The bidding game in its plain and extended forms, strategies for it, an
//! adversarial construction against XOS bidders, and an exhaustive
//! adversary search for small instances.

mod game;
mod negative;
mod search;
mod strategies;

pub use game::{run_game, GameMode, GameState, RoundRecord, Strategy, TieRule, Transcript, View};
pub use negative::{
    block_size, gen_negative_instance, gen_negative_instance_with, NegativeInstance, NegativeSizes,
};
pub use search::{adversary_search, SearchConfig, SearchOutcome, MAX_SEARCH_ITEMS};
pub use strategies::{smallest_acceptable, Greedy, OneShot, RandomBids, StrategySpec, ZeroBid};

#[cfg(test)]
mod tests;
