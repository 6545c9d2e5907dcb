use crate::error::{Error, Result};
use crate::model::Bundle;
use crate::numerics::{lp_solve, LinearProgram, Rat, Relation};

/// Largest item count accepted for an explicit value table.
pub const MAX_TABLE_ITEMS: usize = 20;

/// Explicit set function: one value per bundle, indexed by bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueTable {
    m: usize,
    values: Vec<Rat>,
}

impl ValueTable {
    /// Builds a table after checking size, `v(∅) = 0`, non-negativity and
    /// monotonicity.
    pub fn new(m: usize, values: Vec<Rat>) -> Result<Self> {
        if m > MAX_TABLE_ITEMS {
            return Err(Error::TooLarge(format!(
                "value table over {m} items (limit {MAX_TABLE_ITEMS})"
            )));
        }
        if values.len() != 1 << m {
            return Err(Error::InvalidValuation(format!(
                "table over {m} items needs {} entries, got {}",
                1u64 << m,
                values.len()
            )));
        }
        if !values[0].is_zero() {
            return Err(Error::InvalidValuation("v(∅) must be 0".into()));
        }
        if let Some(s) = values.iter().position(Rat::is_negative) {
            return Err(Error::InvalidValuation(format!(
                "negative value at bundle {}",
                Bundle::from_mask(s as u64)
            )));
        }
        let table = ValueTable { m, values };
        if let Some((small, large)) = table.monotonicity_violation() {
            return Err(Error::InvalidValuation(format!(
                "not monotone: v({small}) > v({large})"
            )));
        }
        Ok(table)
    }

    /// Builds a table without validation. Callers must guarantee the
    /// invariants of [`ValueTable::new`].
    pub(crate) fn from_raw(m: usize, values: Vec<Rat>) -> Self {
        debug_assert_eq!(values.len(), 1 << m);
        ValueTable { m, values }
    }

    pub fn num_items(&self) -> usize {
        self.m
    }

    pub fn get(&self, s: Bundle) -> &Rat {
        &self.values[s.mask() as usize]
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// A pair `S ⊂ T` with `v(S) > v(T)`, if any (only single-item
    /// extensions need checking).
    fn monotonicity_violation(&self) -> Option<(Bundle, Bundle)> {
        for s in 0..self.values.len() {
            for i in 0..self.m {
                let t = s | 1 << i;
                if t != s && self.values[s] > self.values[t] {
                    return Some((Bundle::from_mask(s as u64), Bundle::from_mask(t as u64)));
                }
            }
        }
        None
    }
}

/// A normalized monotone set function over items `0..m`.
///
/// Use the checked constructors; building variants directly skips validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Valuation {
    Additive(Vec<Rat>),
    /// Pointwise maximum of additive clauses (all of the same length).
    Xos(Vec<Vec<Rat>>),
    Table(ValueTable),
    /// `min(base(S), cap)`.
    Truncated {
        base: Box<Valuation>,
        cap: Rat,
    },
}

impl Valuation {
    pub fn additive(values: Vec<Rat>) -> Result<Self> {
        check_items(values.len())?;
        if values.iter().any(Rat::is_negative) {
            return Err(Error::InvalidValuation("negative item value".into()));
        }
        Ok(Valuation::Additive(values))
    }

    pub fn xos(clauses: Vec<Vec<Rat>>) -> Result<Self> {
        let Some(first) = clauses.first() else {
            return Err(Error::InvalidValuation("XOS clause list is empty".into()));
        };
        let m = first.len();
        check_items(m)?;
        if clauses.iter().any(|c| c.len() != m) {
            return Err(Error::InvalidValuation(
                "XOS clauses differ in length".into(),
            ));
        }
        if clauses.iter().flatten().any(Rat::is_negative) {
            return Err(Error::InvalidValuation("negative clause entry".into()));
        }
        Ok(Valuation::Xos(clauses))
    }

    pub fn table(m: usize, values: Vec<Rat>) -> Result<Self> {
        Ok(Valuation::Table(ValueTable::new(m, values)?))
    }

    pub fn truncated(base: Valuation, cap: Rat) -> Result<Self> {
        if cap.is_negative() {
            return Err(Error::InvalidValuation("negative cap".into()));
        }
        Ok(Valuation::Truncated {
            base: Box::new(base),
            cap,
        })
    }

    pub fn num_items(&self) -> usize {
        match self {
            Valuation::Additive(v) => v.len(),
            Valuation::Xos(c) => c.first().map_or(0, Vec::len),
            Valuation::Table(t) => t.m,
            Valuation::Truncated { base, .. } => base.num_items(),
        }
    }

    /// `v(S)`, rejecting bundles that name items outside `0..m`.
    pub fn eval(&self, s: Bundle) -> Result<Rat> {
        let m = self.num_items();
        if s.span() > m {
            return Err(Error::IndexOutOfRange {
                item: s.span() - 1,
                m,
            });
        }
        Ok(self.value(s))
    }

    /// `v(S)` without range checking; items beyond `m` are ignored by
    /// additive representations and may panic for tables.
    pub fn value(&self, s: Bundle) -> Rat {
        match self {
            Valuation::Additive(v) => sum_over(v, s),
            Valuation::Xos(clauses) => clauses
                .iter()
                .map(|c| sum_over(c, s))
                .max()
                .unwrap_or_default(),
            Valuation::Table(t) => t.get(s).clone(),
            Valuation::Truncated { base, cap } => Rat::min_of(base.value(s), cap.clone()),
        }
    }

    pub fn item_value(&self, item: usize) -> Rat {
        self.value(Bundle::singleton(item))
    }

    pub fn total(&self) -> Rat {
        self.value(Bundle::full(self.num_items()))
    }

    /// Every bundle's value, indexed by mask.
    pub fn to_table(&self) -> Result<ValueTable> {
        let m = self.num_items();
        if m > MAX_TABLE_ITEMS {
            return Err(Error::TooLarge(format!(
                "materializing a valuation over {m} items"
            )));
        }
        let size = 1usize << m;
        let values = match self {
            Valuation::Additive(v) => additive_table(v, size),
            Valuation::Xos(clauses) => {
                let mut best = vec![Rat::zero(); size];
                for c in clauses {
                    for (b, x) in best.iter_mut().zip(additive_table(c, size)) {
                        if x > *b {
                            *b = x;
                        }
                    }
                }
                best
            }
            Valuation::Table(t) => return Ok(t.clone()),
            Valuation::Truncated { base, cap } => base
                .to_table()?
                .values
                .into_iter()
                .map(|x| Rat::min_of(x, cap.clone()))
                .collect(),
        };
        Ok(ValueTable::from_raw(m, values))
    }

    /// `factor · v` for a non-negative factor.
    pub fn scaled(&self, factor: &Rat) -> Valuation {
        assert!(!factor.is_negative(), "scaling factor must be non-negative");
        let scale = |v: &[Rat]| v.iter().map(|x| x * factor).collect::<Vec<_>>();
        match self {
            Valuation::Additive(v) => Valuation::Additive(scale(v)),
            Valuation::Xos(clauses) => Valuation::Xos(clauses.iter().map(|c| scale(c)).collect()),
            Valuation::Table(t) => Valuation::Table(ValueTable::from_raw(t.m, scale(&t.values))),
            Valuation::Truncated { base, cap } => Valuation::Truncated {
                base: Box::new(base.scaled(factor)),
                cap: cap * factor,
            },
        }
    }

    /// The valuation seen on a sub-collection of items: new item `j` is old
    /// item `items[j]`.
    pub fn restrict(&self, items: &[usize]) -> Valuation {
        let pick = |v: &[Rat]| items.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
        match self {
            Valuation::Additive(v) => Valuation::Additive(pick(v)),
            Valuation::Xos(clauses) => Valuation::Xos(clauses.iter().map(|c| pick(c)).collect()),
            Valuation::Table(t) => {
                let k = items.len();
                let values = (0..1u64 << k)
                    .map(|s| t.get(lift(Bundle::from_mask(s), items)).clone())
                    .collect();
                Valuation::Table(ValueTable::from_raw(k, values))
            }
            Valuation::Truncated { base, cap } => Valuation::Truncated {
                base: Box::new(base.restrict(items)),
                cap: cap.clone(),
            },
        }
    }

    /// An additive function `a`, zero outside `S`, with `a(S) = v(S)` and
    /// `a(T) ≤ v(T)` for every `T`. Exists exactly when `v` is XOS at `S`.
    pub fn supporting_clause(&self, s: Bundle) -> Result<Vec<Rat>> {
        let m = self.num_items();
        let restrict_to = |c: &[Rat]| {
            (0..m)
                .map(|i| {
                    if s.contains(i) {
                        c[i].clone()
                    } else {
                        Rat::zero()
                    }
                })
                .collect::<Vec<_>>()
        };
        match self {
            Valuation::Additive(v) => Ok(restrict_to(v)),
            Valuation::Xos(clauses) => {
                let mut best = &clauses[0];
                let mut best_val = sum_over(best, s);
                for c in &clauses[1..] {
                    let x = sum_over(c, s);
                    if x > best_val {
                        best = c;
                        best_val = x;
                    }
                }
                Ok(restrict_to(best))
            }
            Valuation::Table(t) => table_supporting_clause(t, s),
            Valuation::Truncated { base, cap } => {
                let clause = base.supporting_clause(s)?;
                let total = sum_over(&clause, s);
                if total > *cap {
                    let f = cap / &total;
                    Ok(clause.iter().map(|x| x * &f).collect())
                } else {
                    Ok(clause)
                }
            }
        }
    }
}

/// Maps a bundle over positions `0..items.len()` back to original indices.
pub fn lift(s: Bundle, items: &[usize]) -> Bundle {
    Bundle::from_items(s.items().map(|j| items[j]))
}

fn check_items(m: usize) -> Result<()> {
    if m > crate::model::MAX_ITEMS {
        return Err(Error::TooLarge(format!("{m} items (limit 64)")));
    }
    Ok(())
}

fn sum_over(v: &[Rat], s: Bundle) -> Rat {
    s.items().filter(|&i| i < v.len()).map(|i| &v[i]).sum()
}

fn additive_table(v: &[Rat], size: usize) -> Vec<Rat> {
    let mut out = Vec::with_capacity(size);
    out.push(Rat::zero());
    for s in 1..size {
        let low = s.trailing_zeros() as usize;
        let rest = out[s & (s - 1)].clone();
        out.push(rest + &v[low]);
    }
    out
}

fn table_supporting_clause(t: &ValueTable, s: Bundle) -> Result<Vec<Rat>> {
    let items: Vec<usize> = s.items().collect();
    let k = items.len();
    if k > 12 {
        return Err(Error::TooLarge(format!(
            "supporting clause LP over {k} items"
        )));
    }
    // maximize p(S) subject to p(T) ≤ v(T) for all T ⊆ S, p ≥ 0
    let mut lp = LinearProgram::new(vec![Rat::one(); k]);
    for sub in 1..(1u64 << k) {
        let row: Vec<(usize, Rat)> = Bundle::from_mask(sub)
            .items()
            .map(|j| (j, Rat::one()))
            .collect();
        let rhs = t.get(lift(Bundle::from_mask(sub), &items)).clone();
        lp.add_sparse(&row, Relation::Le, rhs);
    }
    let res = lp_solve(&lp)?;
    if !res.is_optimal() || res.objective != *t.get(s) {
        return Err(Error::NotXos(format!("no supporting clause at {s}")));
    }
    let mut clause = vec![Rat::zero(); t.m];
    for (j, x) in res.solution.into_iter().enumerate() {
        clause[items[j]] = x;
    }
    Ok(clause)
}
