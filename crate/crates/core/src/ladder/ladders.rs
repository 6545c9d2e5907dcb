use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{lift, Bundle, Valuation};
use crate::numerics::Rat;

/// Largest bundle size accepted by exhaustive ladder computations.
pub const MAX_LADDER_ITEMS: usize = 16;

/// Minimum bundle sizes reaching the value levels `j/k · v(B)`, `j = 1..k`.
///
/// Entries are extended with `L_0 = 1` and `L_{-1} = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Ladder {
    entries: Vec<usize>,
}

impl Ladder {
    /// Validates `1 ≤ L_1 ≤ L_2 ≤ … ≤ L_k`.
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("a ladder needs k ≥ 1 entries".into()));
        }
        if entries[0] == 0 {
            return Err(Error::InvalidInput(
                "ladder entries must be at least 1".into(),
            ));
        }
        if entries.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput(
                "ladder entries must be non-decreasing".into(),
            ));
        }
        Ok(Ladder { entries })
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    /// `L_j` for `-1 ≤ j ≤ k`.
    pub fn at(&self, j: isize) -> usize {
        match j {
            -1 => 0,
            0 => 1,
            _ => self.entries[j as usize - 1],
        }
    }

    /// `L_1..L_k`.
    pub fn entries(&self) -> &[usize] {
        &self.entries
    }
}

/// The `k`-ladder of `v` restricted to bundle `b`.
pub fn compute_ladder(v: &Valuation, b: Bundle, k: usize) -> Result<Ladder> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let items: Vec<usize> = b.items().collect();
    if items.len() > MAX_LADDER_ITEMS {
        return Err(Error::TooLarge(format!(
            "ladder over {} items (limit {MAX_LADDER_ITEMS})",
            items.len()
        )));
    }
    let t = v.restrict(&items).to_table()?;
    let total = t.get(Bundle::full(items.len())).clone();
    if !total.is_positive() {
        return Err(Error::InvalidInput(format!("bundle {b} has value 0")));
    }
    // best[s]: largest value of a subset with exactly s items
    let mut best = vec![Rat::zero(); items.len() + 1];
    for (mask, x) in t.values().iter().enumerate() {
        let s = mask.count_ones() as usize;
        if *x > best[s] {
            best[s] = x.clone();
        }
    }
    let kk = Rat::from(k);
    let entries = (1..=k)
        .map(|j| {
            let level = Rat::from(j) * &total / &kk;
            (1..=items.len())
                .find(|&s| best[s] >= level)
                .expect("the whole bundle reaches every level")
        })
        .collect();
    Ladder::new(entries)
}

/// Checks the two structural properties of ladders of subadditive
/// valuations on `b`:
///
/// * `h(j) = L_j − 1` is superadditive: `h(i) + h(j) ≤ h(i + j)`;
/// * for `j ≤ k − 1` and every `S ⊆ B` with `|S| < L_j`, `B ∖ S` holds some
///   `T` with `|T| ≤ L_{j+1}` and `v(T) > v(B)/k`.
///
/// A failure names the offending indices or set as
/// [`Error::LemmaViolated`].
pub fn check_ladder_lemmas(v: &Valuation, b: Bundle, k: usize) -> Result<Ladder> {
    let ladder = compute_ladder(v, b, k)?;
    let h = |j: usize| ladder.at(j as isize) as i64 - 1;
    for i in 1..=k {
        for j in i..=k - i {
            if h(i) + h(j) > h(i + j) {
                return Err(Error::LemmaViolated(format!(
                    "ladder {:?}: h({i}) + h({j}) > h({})",
                    ladder.entries(),
                    i + j
                )));
            }
        }
    }
    let items: Vec<usize> = b.items().collect();
    let m = items.len();
    let t = v.restrict(&items).to_table()?;
    let full = Bundle::full(m);
    let share = t.get(full) / &Rat::from(k);
    // within[c][s]: best value of a subset of c with at most s items
    let size = 1usize << m;
    let mut within: Vec<Vec<Rat>> = vec![Vec::new(); size];
    for c in 0..size {
        let cb = Bundle::from_mask(c as u64);
        let mut row = vec![Rat::zero(); m + 1];
        for (s, slot) in row.iter_mut().enumerate() {
            let mut x = if cb.len() <= s {
                t.get(cb).clone()
            } else {
                Rat::zero()
            };
            for e in cb.items() {
                let y = &within[cb.without(e).mask() as usize][s];
                if *y > x {
                    x = y.clone();
                }
            }
            *slot = x;
        }
        within[c] = row;
    }
    for j in 1..k {
        let (lj, lnext) = (ladder.at(j as isize), ladder.at(j as isize + 1));
        for s in full.subsets().filter(|s| s.len() < lj) {
            let rest = full.difference(s);
            if within[rest.mask() as usize][lnext] <= share {
                return Err(Error::LemmaViolated(format!(
                    "ladder {:?}: removing {} leaves no set of at most {lnext} items worth more than {share}",
                    ladder.entries(),
                    lift(s, &items)
                )));
            }
        }
    }
    Ok(ladder)
}

/// Lower bound on what other agents pay to exhaust a bundle with this
/// ladder: `b · Σ_{j=0}^{k-1} (L_j − L_{j−1}) / L_{j+1}`.
pub fn payment_bound(ladder: &Ladder, b: &Rat) -> Rat {
    let sum: Rat = (0..ladder.k() as isize)
        .map(|j| {
            let num = ladder.at(j) as i64 - ladder.at(j - 1) as i64;
            Rat::frac(num, ladder.at(j + 1) as i64)
        })
        .sum();
    sum * b
}

/// Smallest `k ≥ 2` with `m ≤ (k−1)^{k−1}`; with an entitlement `b < 1`,
/// smallest `k ≥ 2` with `m ≤ ((k−1)/(1−b))^{k−1}`.
pub fn choose_k(m: u64, b: Option<&Rat>) -> usize {
    let m = Rat::from_big(m.into(), 1.into()).expect("nonzero denominator");
    let slack = match b {
        Some(b) if *b >= Rat::one() => return 2,
        Some(b) => Rat::one() - b,
        None => Rat::one(),
    };
    let mut k: usize = 2;
    loop {
        let base = Rat::from(k - 1) / &slack;
        if base.pow((k - 1) as u32) >= m {
            return k;
        }
        k += 1;
    }
}
