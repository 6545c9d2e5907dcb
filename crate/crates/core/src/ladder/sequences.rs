use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::Rat;

use super::Ladder;

/// Largest sequence length accepted by the path formula.
pub const MAX_SEQ_LEN: usize = 24;

/// `x_1..x_k`, extended with `x_{-1} = 0` and `x_0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XSeq {
    values: Vec<Rat>,
}

impl XSeq {
    pub fn new(values: Vec<Rat>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty x-sequence".into()));
        }
        if values.iter().any(Rat::is_negative) {
            return Err(Error::InvalidInput(
                "x-sequence entries must be non-negative".into(),
            ));
        }
        Ok(XSeq { values })
    }

    /// Ladder sizes read as rationals.
    pub fn from_ladder(l: &Ladder) -> Self {
        XSeq {
            values: l.entries().iter().map(|&x| Rat::from(x)).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    /// `x_i` for `-1 ≤ i ≤ k`.
    pub fn at(&self, i: isize) -> Rat {
        match i {
            -1 => Rat::zero(),
            0 => Rat::one(),
            _ => self.values[i as usize - 1].clone(),
        }
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// `Σ_{i=1}^k (x_{i−1} − x_{i−2}) / x_i`; `None` if some `x_i` is zero.
    pub fn increment_sum(&self) -> Option<Rat> {
        (1..=self.k() as isize)
            .map(|i| {
                (self.at(i - 1) - self.at(i - 2))
                    .checked_div(&self.at(i))
                    .ok()
            })
            .sum()
    }

    /// First failing property among: non-decreasing, `x_i − 1`
    /// superadditive, increment sum below 1.
    pub fn hypothesis_violation(&self) -> Option<String> {
        let k = self.k() as isize;
        if let Some(i) = (1..=k).find(|&i| self.at(i) < self.at(i - 1)) {
            return Some(format!("x_{i} < x_{}", i - 1));
        }
        for i in 1..=k {
            for j in i..=k - i {
                if self.at(i) + self.at(j) - Rat::one() > self.at(i + j) {
                    return Some(format!("x_{i} + x_{j} − 1 > x_{}", i + j));
                }
            }
        }
        match self.increment_sum() {
            Some(s) if s < Rat::one() => None,
            Some(s) => Some(format!("increment sum {s} ≥ 1")),
            None => Some("zero entry".into()),
        }
    }
}

/// `y_1..y_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct YSeq {
    values: Vec<Rat>,
}

impl YSeq {
    /// All entries must be positive.
    pub fn new(values: Vec<Rat>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty y-sequence".into()));
        }
        if !values.iter().all(Rat::is_positive) {
            return Err(Error::InvalidInput(
                "y-sequence entries must be positive".into(),
            ));
        }
        Ok(YSeq { values })
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    /// `y_i` for `1 ≤ i ≤ k`.
    pub fn at(&self, i: usize) -> &Rat {
        &self.values[i - 1]
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn sum(&self) -> Rat {
        self.values.iter().sum()
    }
}

/// Evaluates `x_i = (x_{i−1} − x_{i−2}) / y_i` from `x_{-1} = 0`, `x_0 = 1`.
pub fn x_from_y(y: &YSeq) -> XSeq {
    let mut prev2 = Rat::zero();
    let mut prev = Rat::one();
    let mut values = Vec::with_capacity(y.k());
    for yi in y.values() {
        let x = (&prev - &prev2) / yi;
        values.push(x.clone());
        prev2 = std::mem::replace(&mut prev, x);
    }
    // entries can go negative outside the hypothesis; keep them as computed
    XSeq { values }
}

/// `y_i = (x_{i−1} − x_{i−2}) / x_i` without any checks beyond `x_i ≠ 0`.
pub fn y_from_x_raw(x: &XSeq) -> Result<Vec<Rat>> {
    (1..=x.k() as isize)
        .map(|i| {
            (x.at(i - 1) - x.at(i - 2))
                .checked_div(&x.at(i))
                .map_err(|_| Error::InvalidInput(format!("x_{i} is zero")))
        })
        .collect()
}

/// Inverse of [`x_from_y`] for sequences that are non-decreasing, have
/// superadditive `x_i − 1` and increment sum below 1; every resulting
/// `y_i` is then positive.
pub fn y_from_x(x: &XSeq) -> Result<YSeq> {
    if let Some(why) = x.hypothesis_violation() {
        return Err(Error::HypothesisViolated(why));
    }
    let ys = y_from_x_raw(x)?;
    if let Some(i) = ys.iter().position(|y| !y.is_positive()) {
        return Err(Error::TheoremViolated(format!(
            "y_{} = {} is not positive for x = {:?}",
            i + 1,
            ys[i],
            x.values()
        )));
    }
    Ok(YSeq { values: ys })
}

/// `sums[j]`: total over paths with `j` edges in the graph on vertices
/// `1..=n` (edge `i → j` iff `i ≤ j − 2`) of the product of `y` over the
/// path's vertices.
pub fn path_sums(y: &YSeq, n: usize) -> Vec<Rat> {
    assert!(n <= y.k());
    if n == 0 {
        return Vec::new();
    }
    // from[v][len]: sum over paths starting at v with len more edges
    let max_len = n.div_ceil(2);
    let mut from = vec![vec![Rat::zero(); max_len]; n + 2];
    for v in (1..=n).rev() {
        from[v][0] = y.at(v).clone();
        for len in 1..max_len {
            let tail: Rat = (v + 2..=n).map(|u| &from[u][len - 1]).sum();
            from[v][len] = y.at(v) * tail;
        }
    }
    let mut sums: Vec<Rat> = (0..max_len)
        .map(|len| (1..=n).map(|v| &from[v][len]).sum())
        .collect();
    while sums.len() > 1 && sums.last().is_some_and(Rat::is_zero) {
        sums.pop();
    }
    sums
}

/// `Y_k = Σ_j (−1)^{j+1} · path_sums(y, k−1)[j]`.
pub fn alternating_path_sum(y: &YSeq) -> Rat {
    path_sums(y, y.k() - 1)
        .iter()
        .enumerate()
        .map(|(j, s)| if j % 2 == 0 { -s } else { s.clone() })
        .sum()
}

/// `x_k` computed as `(1 + Y_k) / Π y_i`.
pub fn xk_path_formula(y: &YSeq) -> Result<Rat> {
    if y.k() > MAX_SEQ_LEN {
        return Err(Error::TooLarge(format!("sequence of length {}", y.k())));
    }
    let prod: Rat = y.values().iter().product();
    Ok((Rat::one() + alternating_path_sum(y)) / prod)
}

/// Outcome of [`verify_appendix`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AppendixReport {
    pub k: usize,
    pub x_recurrence: Rat,
    pub x_path: Rat,
    pub path_sums: Vec<Rat>,
    pub one_plus_y: Rat,
    pub bound: Rat,
}

/// For positive `y` summing below 1, checks that the recurrence and path
/// formula agree on `x_k`, that the path sums decrease strictly while
/// positive, that `1 + Y_k > y_k` and that `x_k > (k−1)^{k−1}`.
pub fn verify_appendix(y: &YSeq) -> Result<AppendixReport> {
    let k = y.k();
    if y.sum() >= Rat::one() {
        return Err(Error::HypothesisViolated(format!("Σy = {} ≥ 1", y.sum())));
    }
    let x_recurrence = x_from_y(y).at(k as isize);
    let x_path = xk_path_formula(y)?;
    if x_recurrence != x_path {
        return Err(Error::TheoremViolated(format!(
            "recurrence gives x_{k} = {x_recurrence}, path formula gives {x_path}"
        )));
    }
    let sums = path_sums(y, k - 1);
    for j in 1..sums.len() {
        let ok = if sums[j - 1].is_positive() {
            sums[j] < sums[j - 1]
        } else {
            sums[j] <= sums[j - 1]
        };
        if !ok {
            return Err(Error::TheoremViolated(format!(
                "path sum with {j} edges {} exceeds the one with {} edges {}",
                sums[j],
                j - 1,
                sums[j - 1]
            )));
        }
    }
    let one_plus_y = Rat::one() + alternating_path_sum(y);
    if one_plus_y <= *y.at(k) {
        return Err(Error::TheoremViolated(format!(
            "1 + Y_{k} = {one_plus_y} ≤ y_{k} = {}",
            y.at(k)
        )));
    }
    let bound = Rat::from(k - 1).pow((k - 1) as u32);
    if x_recurrence <= bound {
        return Err(Error::TheoremViolated(format!(
            "x_{k} = {x_recurrence} ≤ {bound}"
        )));
    }
    Ok(AppendixReport {
        k,
        x_recurrence,
        x_path,
        path_sums: sums,
        one_plus_y,
        bound,
    })
}

/// Random positive `y` of length `k` with sum below 1. Entries are
/// `w_i / D` with integer weights, `D` exceeding their total.
pub fn random_y<R: rand::Rng + ?Sized>(rng: &mut R, k: usize) -> YSeq {
    let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=1000)).collect();
    let total: i64 = weights.iter().sum();
    let denom = total + rng.gen_range(1..=total.max(1) * 2);
    YSeq {
        values: weights.iter().map(|&w| Rat::frac(w, denom)).collect(),
    }
}
