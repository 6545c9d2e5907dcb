//! Configuration LP, ex-ante optimal randomized allocations, random-priority
//! rounding and the vector instances that bound ex-ante guarantees.

mod clp;
mod opt;
mod rounding;
mod vector;

pub use clp::{clp_solve, clp_solve_tables, ClpSolution, MAX_CLP_COLUMNS};
pub use opt::{
    agent_shares, exante_opt, mes_warm_start, ExanteResult, RandomizedAllocation, ShareKind,
    MAX_EXANTE_ALLOCATIONS,
};
pub use rounding::{round_solution, RoundingAgent, RoundingReport, DEFAULT_TRIALS};
pub use vector::{coordinate, fiber, gen_vector_instance, VectorClass};
