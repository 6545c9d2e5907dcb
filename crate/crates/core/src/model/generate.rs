//! Random and structured valuation generators. All randomness comes from the
//! caller's generator, so outputs are reproducible from a seed.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Agent, Instance, Valuation, ValuationClass, ValueTable, MAX_TABLE_ITEMS};
use crate::numerics::Rat;

/// How entitlements are drawn for random instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entitlements {
    /// Every agent gets `1/n`.
    Equal,
    /// Random positive weights normalized to sum to 1.
    Random,
    /// Random positive weights normalized to a random total in `(0, 1]`.
    RandomPartial,
}

/// Item values drawn uniformly from `0..=max`.
pub fn random_additive<R: Rng + ?Sized>(rng: &mut R, m: usize, max: i64) -> Valuation {
    Valuation::Additive(random_vec(rng, m, max))
}

/// Pointwise maximum of `clauses` random additive functions.
pub fn random_xos<R: Rng + ?Sized>(rng: &mut R, m: usize, clauses: usize, max: i64) -> Valuation {
    assert!(clauses > 0);
    Valuation::Xos((0..clauses).map(|_| random_vec(rng, m, max)).collect())
}

/// Monotone table: random values pushed up to the maximum over subsets.
pub fn random_monotone_table<R: Rng + ?Sized>(rng: &mut R, m: usize, max: i64) -> Valuation {
    Valuation::Table(ValueTable::from_raw(m, monotone_values(rng, m, max)))
}

/// Subadditive table: a random monotone table followed by the subadditive
/// closure `v(S) ← min(v(S), min over splits v(A) + v(S∖A))`.
///
/// Subsets have smaller masks, so one pass in mask order reaches the
/// fixpoint, and the closure of a monotone function stays monotone.
pub fn random_subadditive<R: Rng + ?Sized>(rng: &mut R, m: usize, max: i64) -> Valuation {
    let mut v = monotone_values(rng, m, max);
    for s in 1..v.len() {
        let mut a = (s - 1) & s;
        while a > 0 {
            let b = s & !a;
            if a > b {
                let split = &v[a] + &v[b];
                if split < v[s] {
                    v[s] = split;
                }
            }
            a = (a - 1) & s;
        }
    }
    Valuation::Table(ValueTable::from_raw(m, v))
}

/// Weighted coverage function (submodular): item `i` covers a random subset
/// of a small weighted universe; `v(S)` is the weight covered by `S`.
pub fn random_coverage<R: Rng + ?Sized>(rng: &mut R, m: usize, max: i64) -> Valuation {
    let universe = m + 2;
    let weights = random_vec(rng, universe, max);
    let covers: Vec<u64> = (0..m).map(|_| rng.gen_range(0..1u64 << universe)).collect();
    let values = (0..1usize << m)
        .map(|s| {
            let covered = (0..m)
                .filter(|&i| s >> i & 1 == 1)
                .fold(0u64, |acc, i| acc | covers[i]);
            (0..universe)
                .filter(|&u| covered >> u & 1 == 1)
                .map(|u| &weights[u])
                .sum()
        })
        .collect();
    Valuation::Table(ValueTable::from_raw(m, values))
}

/// A random valuation of the requested class with a positive total.
pub fn random_valuation<R: Rng + ?Sized>(
    rng: &mut R,
    class: ValuationClass,
    m: usize,
    max: i64,
) -> Result<Valuation> {
    if m > MAX_TABLE_ITEMS && !matches!(class, ValuationClass::Additive | ValuationClass::Xos) {
        return Err(Error::TooLarge(format!("random table over {m} items")));
    }
    if max <= 0 {
        return Err(Error::InvalidInput("value range must be positive".into()));
    }
    loop {
        let v = match class {
            ValuationClass::Additive => random_additive(rng, m, max),
            ValuationClass::Xos => {
                let k = rng.gen_range(1..=3);
                random_xos(rng, m, k, max)
            }
            ValuationClass::Submodular => random_coverage(rng, m, max),
            ValuationClass::Subadditive => random_subadditive(rng, m, max),
            ValuationClass::Monotone => random_monotone_table(rng, m, max),
        };
        if m == 0 || v.total().is_positive() {
            return Ok(v);
        }
    }
}

/// Entitlement vector for `n` agents.
pub fn random_entitlements<R: Rng + ?Sized>(rng: &mut R, n: usize, mode: Entitlements) -> Vec<Rat> {
    match mode {
        Entitlements::Equal => vec![Rat::frac(1, n as i64); n],
        Entitlements::Random | Entitlements::RandomPartial => {
            let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
            let mut total = Rat::one();
            if mode == Entitlements::RandomPartial {
                total = Rat::frac(rng.gen_range(1..=4), 4);
            }
            let sum: i64 = w.iter().sum();
            w.into_iter().map(|x| Rat::frac(x, sum) * &total).collect()
        }
    }
}

/// A random instance with `n` agents of one class over `m` items.
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    class: ValuationClass,
    m: usize,
    n: usize,
    max: i64,
    mode: Entitlements,
) -> Result<Instance> {
    let b = random_entitlements(rng, n, mode);
    let agents = b
        .into_iter()
        .map(|entitlement| {
            Ok(Agent {
                valuation: random_valuation(rng, class, m, max)?,
                entitlement,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if mode == Entitlements::RandomPartial {
        Instance::with_partial_entitlements(m, agents)
    } else {
        Instance::new(m, agents)
    }
}

/// XOS valuation over `n + 3` items: items `0..6` are the vertices of two
/// disjoint triangles `{0,1,2}` and `{3,4,5}`, items `6..n+3` are large
/// items worth 2 each.
///
/// A nonempty vertex set is worth 1, or 2 if it contains an edge; large
/// items add their value on top.
pub fn two_triangles(n: usize) -> Result<Valuation> {
    if n < 3 {
        return Err(Error::InvalidInput(
            "two-triangle valuation needs n ≥ 3".into(),
        ));
    }
    let m = n + 3;
    let edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)];
    let clauses = edges
        .iter()
        .map(|&(a, b)| {
            let mut c = vec![Rat::zero(); m];
            c[a] = Rat::one();
            c[b] = Rat::one();
            for x in c.iter_mut().skip(6) {
                *x = Rat::from_int(2);
            }
            c
        })
        .collect();
    Valuation::xos(clauses)
}

/// `n` agents sharing the two-triangle valuation with entitlement `1/n`.
pub fn two_triangles_instance(n: usize) -> Result<Instance> {
    let v = two_triangles(n)?;
    Instance::equal(n + 3, vec![v; n])
}

fn random_vec<R: Rng + ?Sized>(rng: &mut R, len: usize, max: i64) -> Vec<Rat> {
    (0..len)
        .map(|_| Rat::from_int(rng.gen_range(0..=max)))
        .collect()
}

fn monotone_values<R: Rng + ?Sized>(rng: &mut R, m: usize, max: i64) -> Vec<Rat> {
    assert!(m <= MAX_TABLE_ITEMS);
    let mut v = vec![Rat::zero(); 1 << m];
    for s in 1..v.len() {
        let mut best = Rat::from_int(rng.gen_range(0..=max));
        for i in 0..m {
            if s >> i & 1 == 1 && v[s & !(1 << i)] > best {
                best = v[s & !(1 << i)].clone();
            }
        }
        v[s] = best;
    }
    v
}
