//! Exact fair division of indivisible goods: share benchmarks (MMS, APS,
//! MES), the bidding game and its strategies, allocation algorithms for XOS
//! valuations, and ex-ante allocation via the configuration LP.
//!
//! All arithmetic is exact over [`Rat`].

pub mod bidding;
pub mod error;
pub mod exante;
pub mod ladder;
pub mod model;
pub mod numerics;
pub mod shares;
pub mod xosalloc;

pub use error::{Error, Result};
pub use model::{Allocation, Bundle, FractionalPartition, Instance, Valuation};
pub use numerics::Rat;
