//! Ladders of minimum bundle sizes, the payment bound they imply, and the
//! x/y sequence identities behind it.

mod ladders;
mod sequences;

pub use ladders::{
    check_ladder_lemmas, choose_k, compute_ladder, payment_bound, Ladder, MAX_LADDER_ITEMS,
};
pub use sequences::{
    alternating_path_sum, path_sums, random_y, verify_appendix, x_from_y, xk_path_formula,
    y_from_x, y_from_x_raw, AppendixReport, XSeq, YSeq, MAX_SEQ_LEN,
};
