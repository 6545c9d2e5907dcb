use crate::error::{Error, Result};
use crate::exante::clp_solve_tables;
use crate::model::{lift, Bundle, Valuation, ValueTable};
use crate::numerics::Rat;

use super::Objective;

/// Item limit for exhaustive partition search.
pub const MAX_MMS_ITEMS: usize = 12;
/// Part-count limit for exhaustive partition search.
pub const MAX_MMS_AGENTS: usize = 5;

/// Best partition of `items` into `n` parts (some possibly empty) under the
/// given objective, by dynamic programming over subsets: the part holding
/// the lowest remaining item is chosen first.
///
/// Returns the objective value and the parts in the order they were chosen.
pub fn best_partition(
    t: &ValueTable,
    items: Bundle,
    n: usize,
    objective: Objective,
) -> (Rat, Vec<Bundle>) {
    assert!(n >= 1);
    let size = 1usize << t.num_items();
    let combine = |a: &Rat, b: &Rat| match objective {
        Objective::MaxMin => Rat::min_of(a.clone(), b.clone()),
        Objective::MaxSum => a + b,
    };
    // best[k][S]: best value of S split into k + 1 parts
    let mut best: Vec<Vec<Rat>> = vec![t.values().to_vec()];
    let mut choice: Vec<Vec<u64>> = vec![Vec::new()];
    for k in 1..n {
        let prev = &best[k - 1];
        let mut cur = vec![Rat::zero(); size];
        let mut pick = vec![0u64; size];
        for s in items.subsets().skip(1) {
            let low = s.mask() & s.mask().wrapping_neg();
            let rest_of = s.without(low.trailing_zeros() as usize);
            let mut top: Option<Rat> = None;
            for a in rest_of.subsets() {
                let a = a.with(low.trailing_zeros() as usize);
                let val = combine(t.get(a), &prev[s.difference(a).mask() as usize]);
                if top.as_ref().is_none_or(|x| val > *x) {
                    top = Some(val);
                    pick[s.mask() as usize] = a.mask();
                }
            }
            cur[s.mask() as usize] = top.unwrap_or_default();
        }
        best.push(cur);
        choice.push(pick);
    }
    let value = best[n - 1][items.mask() as usize].clone();
    let mut parts = Vec::with_capacity(n);
    let mut s = items;
    for k in (1..n).rev() {
        let a = if s.is_empty() {
            Bundle::EMPTY
        } else {
            Bundle::from_mask(choice[k][s.mask() as usize])
        };
        parts.push(a);
        s = s.difference(a);
    }
    parts.push(s);
    (value, parts)
}

/// Partition of all items into `n` bundles for a subadditive valuation,
/// each worth at least `T/6k`, where `T` is the configuration-LP value for
/// `k` copies of `v` on the items still unassigned when the bundle is
/// formed (`k` counts the bundles still to be formed).
///
/// While some item is worth at least `T/3k` it becomes a bundle on its own.
/// Otherwise `k` disjoint bundles of maximum total value are found exactly,
/// and chunks worth at least `T/6k` are cut from them (smallest value
/// first); surplus chunks and leftovers join the last bundle.
pub fn approx_mms_partition_subadditive(v: &Valuation, n: usize) -> Result<Vec<Bundle>> {
    let m = v.num_items();
    if n == 0 {
        return Err(Error::InvalidInput("need at least one bundle".into()));
    }
    if m > MAX_MMS_ITEMS {
        return Err(Error::TooLarge(format!("partition over {m} items")));
    }
    let t = v.to_table()?;
    let mut out: Vec<Bundle> = Vec::with_capacity(n);
    let mut items = Bundle::full(m);
    let mut k = n;
    while k > 1 {
        let list: Vec<usize> = items.items().collect();
        let local = v.restrict(&list).to_table()?;
        let total = if list.is_empty() {
            Rat::zero()
        } else {
            clp_solve_tables(&vec![local.clone(); k])?.objective
        };
        if total.is_zero() {
            break;
        }
        let kk = Rat::from(k);
        let big = &total / (Rat::from_int(3) * &kk);
        let lower = &total / (Rat::from_int(6) * &kk);
        let heavy = items
            .items()
            .filter(|&e| *t.get(Bundle::singleton(e)) >= big)
            .max_by(|&a, &b| {
                t.get(Bundle::singleton(a))
                    .cmp(t.get(Bundle::singleton(b)))
                    .then(b.cmp(&a))
            });
        if let Some(e) = heavy {
            out.push(Bundle::singleton(e));
            items = items.without(e);
            k -= 1;
            continue;
        }
        let (_, parts) = best_partition(&local, Bundle::full(list.len()), k, Objective::MaxSum);
        let mut chunks: Vec<Bundle> = Vec::new();
        let mut leftover = Bundle::EMPTY;
        for p in parts {
            let mut rem = lift(p, &list);
            while let Some(c) = cheapest_chunk(&t, rem, &lower) {
                chunks.push(c);
                rem = rem.difference(c);
            }
            leftover = leftover.union(rem);
        }
        if chunks.len() < k {
            return Err(Error::GuaranteeViolated(format!(
                "only {} chunks worth at least {lower} for {k} bundles",
                chunks.len()
            )));
        }
        let extra = chunks[k..].iter().fold(leftover, |acc, c| acc.union(*c));
        chunks.truncate(k);
        chunks[k - 1] = chunks[k - 1].union(extra);
        for c in &chunks {
            if *t.get(*c) < lower {
                return Err(Error::GuaranteeViolated(format!(
                    "bundle {c} worth {} < {lower}",
                    t.get(*c)
                )));
            }
        }
        out.extend(chunks);
        items = Bundle::EMPTY;
        k = 0;
    }
    if k >= 1 {
        out.push(items);
        out.resize(n, Bundle::EMPTY);
    }
    debug_assert_eq!(out.len(), n);
    Ok(out)
}

/// Subset of `rem` worth at least `lower` with the smallest value (then
/// fewest items, then canonical order).
fn cheapest_chunk(t: &ValueTable, rem: Bundle, lower: &Rat) -> Option<Bundle> {
    if !lower.is_positive() {
        return None;
    }
    rem.subsets()
        .filter(|&s| t.get(s) >= lower)
        .min_by(|&a, &b| {
            t.get(a)
                .cmp(t.get(b))
                .then(a.len().cmp(&b.len()))
                .then_with(|| a.canonical_cmp(b))
        })
}
