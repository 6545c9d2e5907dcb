use crate::error::{Error, Result};
use crate::model::{Bundle, Valuation};
use crate::numerics::Rat;

/// Splits `b` into two disjoint parts each worth at least `threshold`.
///
/// Items go into the first part in order of decreasing value (then index)
/// until it reaches the threshold; the rest form the second part. At least
/// one item always goes first, so threshold 0 yields the top item and the
/// rest.
pub fn split_min_value(b: Bundle, v: &Valuation, threshold: &Rat) -> Result<(Bundle, Bundle)> {
    let mut items: Vec<(Rat, usize)> = b.items().map(|e| (v.item_value(e), e)).collect();
    items.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    let mut first = Bundle::EMPTY;
    for (_, e) in &items {
        first = first.with(*e);
        if v.value(first) >= *threshold {
            break;
        }
    }
    let second = b.difference(first);
    if first.is_empty() || v.value(first) < *threshold || v.value(second) < *threshold {
        return Err(Error::Unsplittable(format!(
            "{b} into two parts worth {threshold}: got {} and {}",
            v.value(first),
            v.value(second)
        )));
    }
    Ok((first, second))
}

/// Item limit for the exhaustive three-way split.
pub const MAX_THREE_SET_ITEMS: usize = 13;

/// Three subsets of `b ∖ {e}`, each worth at least half of `v(b)` under the
/// additive values `values`, with every item in at most two of them.
///
/// They are the pairwise unions of a three-way partition of `b ∖ {e}` whose
/// largest and smallest parts differ the least (first found in assignment
/// order). This works whenever every pair of items is worth less than a
/// quarter of `v(b)`; a failure with that condition met is reported as
/// [`Error::LemmaViolated`], and otherwise as [`Error::HypothesisViolated`].
pub fn three_set_partition(b: Bundle, values: &[Rat], e: usize) -> Result<[Bundle; 3]> {
    if !b.contains(e) {
        return Err(Error::InvalidInput(format!("item {e} is not in {b}")));
    }
    if b.span() > values.len() {
        return Err(Error::InvalidInput(format!(
            "no values for every item of {b}"
        )));
    }
    let total: Rat = b.items().map(|x| &values[x]).sum();
    if !total.is_positive() {
        return Err(Error::InvalidInput(format!("{b} has value 0")));
    }
    let rest: Vec<usize> = b.without(e).items().collect();
    if rest.len() > MAX_THREE_SET_ITEMS {
        return Err(Error::TooLarge(format!(
            "three-way split of {} items",
            rest.len()
        )));
    }
    let val = |s: Bundle| -> Rat { s.items().map(|x| &values[x]).sum() };

    let mut best: Option<(Rat, [Bundle; 3])> = None;
    let mut owner = vec![0u8; rest.len()];
    loop {
        let mut parts = [Bundle::EMPTY; 3];
        for (k, &x) in rest.iter().enumerate() {
            parts[owner[k] as usize] = parts[owner[k] as usize].with(x);
        }
        let mut sorted = parts;
        sorted.sort_by_key(|&e| std::cmp::Reverse(val(e)));
        let spread = val(sorted[0]) - val(sorted[2]);
        if best.as_ref().is_none_or(|(s, _)| spread < *s) {
            best = Some((spread, sorted));
        }
        // next assignment in base 3
        let mut k = 0;
        while k < owner.len() && owner[k] == 2 {
            owner[k] = 0;
            k += 1;
        }
        if k == owner.len() {
            break;
        }
        owner[k] += 1;
    }
    let [s1, s2, s3] = best.expect("at least one assignment").1;
    let out = [s1.union(s2), s2.union(s3), s3.union(s1)];
    let half = &total / Rat::from_int(2);
    if out.iter().all(|s| val(*s) >= half) {
        return Ok(out);
    }
    let quarter = &total / Rat::from_int(4);
    let mut pair_ok = true;
    for (i, &x) in rest.iter().enumerate() {
        for &y in &rest[i + 1..] {
            if &values[x] + &values[y] >= quarter {
                pair_ok = false;
            }
        }
    }
    let msg = format!(
        "three-way split of {b} without {e}: parts worth {}, {}, {} of {total}",
        val(out[0]),
        val(out[1]),
        val(out[2])
    );
    if pair_ok {
        Err(Error::LemmaViolated(msg))
    } else {
        Err(Error::HypothesisViolated(msg))
    }
}
