//! Bundles, valuations, instances, allocations and fractional partitions,
//! plus value and demand oracles.

mod bundle;
mod classes;
pub mod generate;
mod instance;
mod io;
mod oracle;
mod valuation;

pub use bundle::{Bundle, Items, Subsets, MAX_ITEMS};
pub use classes::{class_check, ValuationClass, MAX_EXHAUSTIVE_ITEMS, MAX_XOS_TABLE_ITEMS};
pub(crate) use instance::fill_coverage;
pub use instance::{
    check_fractional_partition, Agent, Allocation, FractionalPartition, Instance, PartitionCheck,
};
pub use oracle::{demand_query, truncated_demand_query, MAX_DEMAND_ITEMS};
pub use valuation::{lift, Valuation, ValueTable, MAX_TABLE_ITEMS};
