//! Share benchmarks: maximin share (MMS), anyprice share (APS) and maximum
//! expectation share (MES), computed exactly.

mod partition;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exante::clp_solve_tables;
use crate::model::{
    class_check, Bundle, FractionalPartition, Valuation, ValuationClass, ValueTable,
};
use crate::numerics::{lp_solve, LinearProgram, Rat, Relation};

pub use partition::{
    approx_mms_partition_subadditive, best_partition, MAX_MMS_AGENTS, MAX_MMS_ITEMS,
};

/// Largest item count for APS and MES linear programs.
pub const MAX_SHARE_ITEMS: usize = 16;
/// Largest number of LP columns built for APS and MES.
pub const MAX_SHARE_COLUMNS: usize = 20_000;

/// Maximin share of `v` for `n` agents and a witness partition (`n` bundles,
/// some possibly empty).
pub fn mms(v: &Valuation, n: usize) -> Result<(Rat, Vec<Bundle>)> {
    let m = v.num_items();
    if n == 0 {
        return Err(Error::InvalidInput("MMS needs at least one part".into()));
    }
    if m > MAX_MMS_ITEMS || n > MAX_MMS_AGENTS {
        return Err(Error::TooLarge(format!(
            "MMS with m = {m}, n = {n} (limits {MAX_MMS_ITEMS}, {MAX_MMS_AGENTS})"
        )));
    }
    let t = v.to_table()?;
    Ok(best_partition(&t, Bundle::full(m), n, Objective::MaxMin))
}

/// How [`best_partition`] scores a partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// Maximize the smallest part value.
    MaxMin,
    /// Maximize the sum of part values.
    MaxSum,
}

/// Anyprice share of `v` at entitlement `b` with a fractional `b`-partition
/// whose smallest supported bundle value equals the share.
///
/// Candidate thresholds are the distinct positive values of `v`. Threshold
/// `t` is feasible when some weights on bundles worth at least `t` sum to 1
/// while covering each item at most `b`; such weights complete to an exact
/// `b`-partition by adding items, and only inclusion-minimal bundles worth
/// `t` need to be offered. Feasibility is monotone in `t`, so the largest
/// feasible candidate is found by bisection.
pub fn aps(v: &Valuation, b: &Rat) -> Result<(Rat, FractionalPartition)> {
    check_entitlement(b)?;
    let t = share_table(v)?;
    let m = t.num_items();
    let mut candidates: Vec<Rat> = t
        .values()
        .iter()
        .filter(|x| x.is_positive())
        .cloned()
        .collect();
    candidates.sort();
    candidates.dedup();

    let mut best: Option<(Rat, Vec<(Bundle, Rat)>)> = None;
    let (mut lo, mut hi) = (0usize, candidates.len());
    // invariant: candidates[..lo] feasible, candidates[hi..] infeasible
    while lo < hi {
        let mid = (lo + hi) / 2;
        match aps_feasible(&t, &candidates[mid], b)? {
            Some(parts) => {
                best = Some((candidates[mid].clone(), parts));
                lo = mid + 1;
            }
            None => hi = mid,
        }
    }
    // feasible mids only increase, so the last one recorded is the largest
    match best {
        Some((value, parts)) => {
            let fp = FractionalPartition::completed(parts, b.clone(), m)?;
            Ok((value, fp))
        }
        None => {
            let full = Bundle::full(m);
            let mut parts = vec![(full, b.clone())];
            if *b < Rat::one() {
                parts.push((Bundle::EMPTY, Rat::one() - b));
            }
            Ok((
                Rat::zero(),
                FractionalPartition {
                    parts,
                    rho: b.clone(),
                },
            ))
        }
    }
}

fn aps_feasible(t: &ValueTable, threshold: &Rat, b: &Rat) -> Result<Option<Vec<(Bundle, Rat)>>> {
    let m = t.num_items();
    let cols: Vec<Bundle> = Bundle::full(m)
        .subsets()
        .filter(|&s| t.get(s) >= threshold && s.items().all(|e| t.get(s.without(e)) < threshold))
        .collect();
    if cols.len() > MAX_SHARE_COLUMNS {
        return Err(Error::TooLarge(format!(
            "APS feasibility LP with {} columns",
            cols.len()
        )));
    }
    let mut lp = LinearProgram::feasibility(cols.len());
    lp.add(vec![Rat::one(); cols.len()], Relation::Eq, Rat::one());
    for e in 0..m {
        let row: Vec<(usize, Rat)> = cols
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(e))
            .map(|(k, _)| (k, Rat::one()))
            .collect();
        lp.add_sparse(&row, Relation::Le, b.clone());
    }
    let res = lp_solve(&lp)?;
    if !res.is_optimal() {
        return Ok(None);
    }
    Ok(Some(
        cols.into_iter()
            .zip(res.solution)
            .filter(|(_, w)| w.is_positive())
            .collect(),
    ))
}

/// Maximum expectation share: the largest `Σ λ_S v(S)` over fractional
/// `b`-partitions (the empty bundle may carry weight).
pub fn mes(v: &Valuation, b: &Rat) -> Result<(Rat, FractionalPartition)> {
    check_entitlement(b)?;
    let t = share_table(v)?;
    let m = t.num_items();
    // coverage "at most b" has the same optimum: adding items never lowers value
    let cols: Vec<Bundle> = Bundle::full(m)
        .subsets()
        .filter(|&s| s.items().all(|e| t.get(s.without(e)) < t.get(s)))
        .collect();
    if cols.len() > MAX_SHARE_COLUMNS {
        return Err(Error::TooLarge(format!(
            "MES LP with {} columns",
            cols.len()
        )));
    }
    let mut lp = LinearProgram::new(cols.iter().map(|s| t.get(*s).clone()).collect());
    lp.add(vec![Rat::one(); cols.len()], Relation::Eq, Rat::one());
    for e in 0..m {
        let row: Vec<(usize, Rat)> = cols
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(e))
            .map(|(k, _)| (k, Rat::one()))
            .collect();
        lp.add_sparse(&row, Relation::Le, b.clone());
    }
    let res = lp_solve(&lp)?;
    if !res.is_optimal() {
        return Err(Error::Numerics(
            crate::numerics::NumericsError::Verification("MES LP is not optimal".into()),
        ));
    }
    let parts = cols
        .into_iter()
        .zip(res.solution)
        .filter(|(_, w)| w.is_positive())
        .collect();
    let fp = FractionalPartition::completed(parts, b.clone(), m)?;
    let value = fp.parts.iter().map(|(s, w)| w * t.get(*s)).sum();
    Ok((value, fp))
}

/// APS at entitlement `1/n` through the configuration LP with `n` copies of
/// `min(v, C)`: the LP reaches `nC` exactly when `C` does not exceed the
/// share. Candidate caps are the distinct positive values of `v`.
pub fn aps_via_clp(v: &Valuation, n: usize) -> Result<Rat> {
    if n == 0 {
        return Err(Error::InvalidInput("need at least one agent".into()));
    }
    let t = share_table(v)?;
    let mut candidates: Vec<Rat> = t
        .values()
        .iter()
        .filter(|x| x.is_positive())
        .cloned()
        .collect();
    candidates.sort();
    candidates.dedup();
    let reaches = |cap: &Rat| -> Result<bool> {
        let capped = Valuation::truncated(Valuation::Table(t.clone()), cap.clone())?.to_table()?;
        let sol = clp_solve_tables(&vec![capped; n])?;
        Ok(sol.objective == cap * Rat::from(n))
    };
    let (mut lo, mut hi) = (0usize, candidates.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if reaches(&candidates[mid])? {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    Ok(if lo == 0 {
        Rat::zero()
    } else {
        candidates[lo - 1].clone()
    })
}

/// MMS (when the entitlement is `1/n`), APS and MES of one agent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShareReport {
    pub mms: Option<Rat>,
    pub aps: Rat,
    pub mes: Rat,
    pub aps_partition: FractionalPartition,
    pub mes_partition: FractionalPartition,
}

/// All shares of one agent. The MMS is reported when `b = 1/n` for an
/// integer `n` within the exhaustive limits.
pub fn share_report(v: &Valuation, b: &Rat) -> Result<ShareReport> {
    let (aps, aps_partition) = aps(v, b)?;
    let (mes, mes_partition) = mes(v, b)?;
    let mms = match equal_share_count(b) {
        Some(n) if n <= MAX_MMS_AGENTS && v.num_items() <= MAX_MMS_ITEMS => Some(mms(v, n)?.0),
        _ => None,
    };
    Ok(ShareReport {
        mms,
        aps,
        mes,
        aps_partition,
        mes_partition,
    })
}

/// `n` when `b = 1/n`.
pub fn equal_share_count(b: &Rat) -> Option<usize> {
    let r = b.recip().ok()?;
    if r.is_integer() && r.is_positive() {
        usize::try_from(r.floor()).ok()
    } else {
        None
    }
}

/// MMS, APS and MES at entitlement `1/n`, with the class-dependent
/// relations that were checked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub n: usize,
    pub mms: Rat,
    pub aps: Rat,
    pub mes: Rat,
    /// `Some(true)` when the valuation is subadditive and `APS ≤ 5·MMS` was
    /// checked; `None` when membership could not be decided.
    pub subadditive: Option<bool>,
    pub xos: Option<bool>,
}

/// Computes the three shares at `1/n` and checks `MES ≥ APS ≥ MMS`, plus
/// `APS ≤ 5·MMS` for subadditive and `APS ≤ (17/4)·MMS` for XOS valuations.
pub fn share_relations(v: &Valuation, n: usize) -> Result<RelationReport> {
    let b = Rat::frac(1, n as i64);
    let (mms_value, _) = mms(v, n)?;
    let (aps_value, _) = aps(v, &b)?;
    let (mes_value, _) = mes(v, &b)?;
    let decide = |c| match class_check(v, c) {
        Ok(x) => Ok(Some(x)),
        Err(Error::TooLarge(_)) => Ok(None),
        Err(e) => Err(e),
    };
    let subadditive = decide(ValuationClass::Subadditive)?;
    let xos = decide(ValuationClass::Xos)?;
    let report = RelationReport {
        n,
        mms: mms_value,
        aps: aps_value,
        mes: mes_value,
        subadditive,
        xos,
    };
    let fail = |what: &str| {
        Err(Error::RelationViolated(format!(
            "{what} (n = {n}, MMS = {}, APS = {}, MES = {})",
            report.mms, report.aps, report.mes
        )))
    };
    if report.mes < report.aps {
        return fail("MES < APS");
    }
    if report.aps < report.mms {
        return fail("APS < MMS");
    }
    if subadditive == Some(true) && report.aps > Rat::from_int(5) * &report.mms {
        return fail("APS > 5·MMS for a subadditive valuation");
    }
    if xos == Some(true) && report.aps > Rat::frac(17, 4) * &report.mms {
        return fail("APS > (17/4)·MMS for an XOS valuation");
    }
    Ok(report)
}

fn check_entitlement(b: &Rat) -> Result<()> {
    if !b.is_positive() || *b > Rat::one() {
        return Err(Error::InvalidInput(format!(
            "entitlement {b} outside (0, 1]"
        )));
    }
    Ok(())
}

fn share_table(v: &Valuation) -> Result<ValueTable> {
    let m = v.num_items();
    if m > MAX_SHARE_ITEMS {
        return Err(Error::TooLarge(format!(
            "share LP over {m} items (limit {MAX_SHARE_ITEMS})"
        )));
    }
    v.to_table()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_fractional_partition;
    use crate::model::generate::two_triangles;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn additive(v: &[i64]) -> Valuation {
        Valuation::additive(v.iter().map(|&x| r(x)).collect()).unwrap()
    }

    #[test]
    fn mms_examples() {
        assert_eq!(mms(&additive(&[1, 1, 1, 1]), 2).unwrap().0, r(2));
        assert_eq!(mms(&additive(&[3, 2, 2, 1]), 2).unwrap().0, r(4));
        assert_eq!(mms(&two_triangles(3).unwrap(), 3).unwrap().0, r(1));
    }

    #[test]
    fn aps_examples() {
        let (x, fp) = aps(&two_triangles(3).unwrap(), &Rat::frac(1, 3)).unwrap();
        assert_eq!(x, r(2));
        let c = check_fractional_partition(&fp, &two_triangles(3).unwrap());
        assert!(c.valid);
        assert_eq!(c.min_value, r(2));
        assert_eq!(aps(&additive(&[1]), &Rat::frac(1, 2)).unwrap().0, r(0));
        assert_eq!(
            aps(&additive(&[1, 1, 1]), &Rat::frac(1, 3)).unwrap().0,
            r(1)
        );
    }

    #[test]
    fn mes_examples() {
        assert_eq!(mes(&additive(&[2, 4]), &Rat::frac(1, 2)).unwrap().0, r(3));
        assert_eq!(
            mes(&additive(&[1]), &Rat::frac(1, 2)).unwrap().0,
            Rat::frac(1, 2)
        );
        let x = two_triangles(4).unwrap();
        assert_eq!(mes(&x, &r(1)).unwrap().0, x.total());
    }

    #[test]
    fn aps_via_clp_examples() {
        assert_eq!(aps_via_clp(&two_triangles(3).unwrap(), 3).unwrap(), r(2));
        assert_eq!(aps_via_clp(&additive(&[1, 1, 1]), 3).unwrap(), r(1));
        assert_eq!(aps_via_clp(&additive(&[1]), 2).unwrap(), r(0));
    }

    #[test]
    fn two_triangle_relations() {
        let rep = share_relations(&two_triangles(3).unwrap(), 3).unwrap();
        assert_eq!(rep.aps, r(2) * &rep.mms);
        assert_eq!(rep.xos, Some(true));
    }

    #[test]
    fn report_includes_mms_only_for_unit_fractions() {
        let v = additive(&[1, 2, 3]);
        assert!(share_report(&v, &Rat::frac(1, 2)).unwrap().mms.is_some());
        assert!(share_report(&v, &Rat::frac(2, 5)).unwrap().mms.is_none());
    }
}
