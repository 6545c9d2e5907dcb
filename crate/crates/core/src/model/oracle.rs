use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{Bundle, Valuation};
use crate::numerics::Rat;

/// Largest item count for exhaustive demand queries on non-additive
/// valuations.
pub const MAX_DEMAND_ITEMS: usize = 20;

/// The bundle maximizing `v(S) − p(S)`. Ties go to the bundle that comes
/// first in [`Bundle::canonical_cmp`] order.
pub fn demand_query(v: &Valuation, prices: &[Rat]) -> Result<Bundle> {
    let m = v.num_items();
    check_prices(m, prices)?;
    if let Valuation::Additive(values) = v {
        // zero-profit items are included: the superset precedes its subsets
        return Ok(Bundle::from_items(
            (0..m).filter(|&i| values[i] >= prices[i]),
        ));
    }
    if m > MAX_DEMAND_ITEMS {
        return Err(Error::TooLarge(format!("demand query over {m} items")));
    }
    let table = v.to_table()?;
    let mut price_of = vec![Rat::zero(); 1 << m];
    let mut best = Bundle::EMPTY;
    let mut best_profit = Rat::zero();
    for s in 1..price_of.len() {
        let low = s.trailing_zeros() as usize;
        price_of[s] = &price_of[s & (s - 1)] + &prices[low];
        let b = Bundle::from_mask(s as u64);
        let profit = table.get(b) - &price_of[s];
        match profit.cmp(&best_profit) {
            Ordering::Greater => {
                best = b;
                best_profit = profit;
            }
            Ordering::Equal if b.canonical_cmp(best) == Ordering::Less => best = b,
            _ => {}
        }
    }
    Ok(best)
}

/// Demand query against `min(v, cap)`.
pub fn truncated_demand_query(v: &Valuation, prices: &[Rat], cap: &Rat) -> Result<Bundle> {
    let capped = Valuation::truncated(v.clone(), cap.clone())?;
    demand_query(&capped, prices)
}

fn check_prices(m: usize, prices: &[Rat]) -> Result<()> {
    if prices.len() != m {
        return Err(Error::InvalidInput(format!(
            "{} prices for {m} items",
            prices.len()
        )));
    }
    if prices.iter().any(Rat::is_negative) {
        return Err(Error::InvalidInput("negative price".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn brute(v: &Valuation, prices: &[Rat]) -> Bundle {
        let m = v.num_items();
        let profit = |s: Bundle| v.value(s) - s.items().map(|i| &prices[i]).sum::<Rat>();
        Bundle::full(m)
            .subsets()
            .min_by(|a, b| profit(*b).cmp(&profit(*a)).then(a.canonical_cmp(*b)))
            .unwrap()
    }

    #[test]
    fn additive_examples() {
        let v = Valuation::additive(vec![r(3), r(1)]).unwrap();
        assert_eq!(
            demand_query(&v, &[r(1), r(2)]).unwrap(),
            Bundle::singleton(0)
        );
        assert_eq!(demand_query(&v, &[r(0), r(0)]).unwrap(), Bundle::full(2));
        let one = Valuation::additive(vec![r(1)]).unwrap();
        assert_eq!(demand_query(&one, &[r(5)]).unwrap(), Bundle::EMPTY);
    }

    #[test]
    fn additive_fast_path_matches_enumeration() {
        let v = Valuation::additive(vec![r(2), r(1), r(3), r(1)]).unwrap();
        let as_xos = Valuation::xos(vec![vec![r(2), r(1), r(3), r(1)]]).unwrap();
        let prices = [r(2), r(0), r(4), r(1)];
        assert_eq!(demand_query(&v, &prices).unwrap(), brute(&v, &prices));
        assert_eq!(demand_query(&as_xos, &prices).unwrap(), brute(&v, &prices));
    }

    #[test]
    fn truncated_examples() {
        let v = Valuation::additive(vec![r(3), r(3)]).unwrap();
        let p = [r(1), r(1)];
        assert_eq!(
            truncated_demand_query(&v, &p, &r(3)).unwrap(),
            Bundle::singleton(0)
        );
        assert_eq!(
            truncated_demand_query(&v, &p, &r(0)).unwrap(),
            Bundle::EMPTY
        );
        assert_eq!(
            truncated_demand_query(&v, &p, &r(1000)).unwrap(),
            demand_query(&v, &p).unwrap()
        );
    }

    #[test]
    fn price_vector_must_match() {
        let v = Valuation::additive(vec![r(3), r(3)]).unwrap();
        assert!(demand_query(&v, &[r(1)]).is_err());
        assert!(demand_query(&v, &[r(1), r(-1)]).is_err());
    }
}
