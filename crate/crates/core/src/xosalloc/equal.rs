use serde::Serialize;

use crate::bidding::smallest_acceptable;
use crate::error::{Error, Result};
use crate::model::{lift, Agent, Allocation, Bundle, Instance, Valuation};
use crate::numerics::Rat;
use crate::shares::aps;

use super::apsxos::apsxos_allocate;
use super::split::{split_min_value, three_set_partition};
use super::{outcomes, AllocationReport};

/// A bundle handed out in the greedy first step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step1Pick {
    pub agent: usize,
    pub bundle: Bundle,
    /// Value relative to the agent's APS.
    pub value: Rat,
}

fn rho() -> Rat {
    Rat::frac(4, 17)
}

/// Each agent's APS at `1/n` and its valuation divided by it (`None` for a
/// zero APS).
fn normalize(inst: &Instance) -> Result<Vec<(Rat, Option<Valuation>)>> {
    let b = Rat::frac(1, inst.n() as i64);
    inst.agents()
        .iter()
        .map(|a| {
            let (s, _) = aps(&a.valuation, &b)?;
            let u = s
                .is_positive()
                .then(|| a.valuation.scaled(&s.recip().expect("positive")));
            Ok((s, u))
        })
        .collect()
}

/// The two-step algorithm for equal entitlements, giving every agent at
/// least `4/17` of its APS.
///
/// Step 1 repeatedly looks, for every unserved agent, at the smallest
/// remaining bundle worth `4/17` of its APS, and takes the smallest of these
/// overall (ties: higher relative value, then lower agent index). While that
/// bundle has at most 4 items it goes to its agent. Step 2 runs
/// [`apsxos_allocate`] on what is left, with entitlement `1/(2 n₅)` for each
/// of the `n₅` agents still unserved. Agents with APS 0 get nothing.
pub fn allocate_equal_417(inst: &Instance) -> Result<AllocationReport> {
    if !inst.has_equal_entitlements() {
        return Err(Error::InvalidInstance(
            "the 4/17 algorithm needs equal entitlements".into(),
        ));
    }
    let norm = normalize(inst)?;
    let mut bundles = vec![Bundle::EMPTY; inst.n()];
    let mut active: Vec<usize> = (0..inst.n()).filter(|&i| norm[i].1.is_some()).collect();
    let mut remaining = inst.items();
    let mut step1 = Vec::new();

    loop {
        let mut best: Option<(usize, Rat, usize, Bundle)> = None;
        for &i in &active {
            let u = norm[i].1.as_ref().expect("active agents have positive APS");
            let Some(s) = smallest_acceptable(u, remaining, &rho())? else {
                continue;
            };
            let val = u.value(s);
            let better = match &best {
                None => true,
                Some((n, bv, _, _)) => s.len() < *n || (s.len() == *n && val > *bv),
            };
            if better {
                best = Some((s.len(), val, i, s));
            }
        }
        match best {
            Some((size, value, agent, bundle)) if size <= 4 => {
                bundles[agent] = bundle;
                remaining = remaining.difference(bundle);
                active.retain(|&i| i != agent);
                step1.push(Step1Pick {
                    agent,
                    bundle,
                    value,
                });
            }
            _ => break,
        }
    }

    let n5 = active.len();
    if n5 > 0 {
        let items: Vec<usize> = remaining.items().collect();
        let agents = active
            .iter()
            .map(|&i| Agent {
                valuation: inst.valuation(i).restrict(&items),
                entitlement: Rat::frac(1, 2 * n5 as i64),
            })
            .collect();
        let rest = Instance::with_partial_entitlements(items.len(), agents)?;
        let sub = apsxos_allocate(&rest)?;
        for (k, &i) in active.iter().enumerate() {
            bundles[i] = lift(sub.allocation.bundle(k), &items);
        }
    }

    let allocation = Allocation::new(bundles)?;
    let shares: Vec<Rat> = norm.iter().map(|x| x.0.clone()).collect();
    let guarantees: Vec<Rat> = shares.iter().map(|s| s * rho()).collect();
    let agents = outcomes(inst, &allocation, &shares, &guarantees);
    if let Some(o) = agents.iter().find(|o| o.value < o.guarantee) {
        return Err(Error::BoundViolated(format!(
            "agent {} gets {} < 4/17·APS = {}",
            o.agent, o.value, o.guarantee
        )));
    }
    Ok(AllocationReport {
        algorithm: "equal-4/17".into(),
        allocation,
        agents,
        steps: Vec::new(),
        step1,
        n5: Some(n5),
    })
}

/// Rebuilds, for every agent left after step 1 of [`allocate_equal_417`],
/// a fractional `1/(2 n₅)`-partition of the leftover items whose bundles
/// are all worth `8/17` of the agent's APS, starting from its APS partition
/// at `1/n`.
///
/// Each APS bundle `B` of weight `w` is classified by how many of its items
/// went out in step-1 bundles of each size `j` (`m_j`):
///
/// * `m₁ + m₂/2 + m₃/3 + m₄/4 ≥ 1`: dropped.
/// * nothing taken: split into two halves, each of weight `w n / (2 n₅)`.
/// * `m₂ = 1, m₃ + m₄ ≤ 2`, or `m₂ = 0, 2 ≤ m₃ + m₄ ≤ 4`: what is left of
///   `B`, with weight `w n / (2 n₅)`.
/// * `m₂ = 0, m₃ + m₄ = 1`: three overlapping subsets of the rest, each of
///   weight `w n / (4 n₅)`.
///
/// Any failure (a split that cannot be made, a cheap bundle, an item
/// covered too much, or total weight below 1) is [`Error::LemmaViolated`].
pub fn lemma817_check(inst: &Instance, report: &AllocationReport) -> Result<()> {
    let n = inst.n();
    let norm = normalize(inst)?;
    let served: Vec<usize> = report.step1.iter().map(|p| p.agent).collect();
    let left: Vec<usize> = (0..n)
        .filter(|i| norm[*i].1.is_some() && !served.contains(i))
        .collect();
    let n5 = left.len();
    if n5 == 0 {
        return Ok(());
    }
    let m5 = report
        .step1
        .iter()
        .fold(inst.items(), |r, p| r.difference(p.bundle));
    let b = Rat::frac(1, n as i64);
    for &i in &left {
        let u = norm[i].1.as_ref().expect("positive APS");
        let (_, fp) = aps(inst.valuation(i), &b)?;
        let parts: Vec<(Bundle, Rat)> = fp.support().cloned().collect();
        rebuild_partition(u, &parts, &report.step1, m5, n, n5).map_err(|e| match e {
            Error::LemmaViolated(msg) => Error::LemmaViolated(format!("agent {i}: {msg}")),
            other => other,
        })?;
    }
    Ok(())
}

/// The case analysis of [`lemma817_check`] for one agent with normalized
/// valuation `u` and APS partition `partition` at `1/n`; returns the
/// rebuilt weighted bundles after checking them.
pub(crate) fn rebuild_partition(
    u: &Valuation,
    partition: &[(Bundle, Rat)],
    picks: &[Step1Pick],
    m5: Bundle,
    n: usize,
    n5: usize,
) -> Result<Vec<(Bundle, Rat)>> {
    let scale = Rat::frac(n as i64, n5 as i64);
    let eight = Rat::frac(8, 17);
    let cover_limit = Rat::frac(1, 2 * n5 as i64);
    let mut parts: Vec<(Bundle, Rat)> = Vec::new();
    for (bundle, w) in partition {
        if !w.is_positive() {
            continue;
        }
        let mut m = [0usize; 5];
        for p in picks {
            let j = p.bundle.len();
            if (1..=4).contains(&j) {
                m[j] += bundle.intersection(p.bundle).len();
            }
        }
        let used = Rat::from(m[1])
            + Rat::frac(m[2] as i64, 2)
            + Rat::frac(m[3] as i64, 3)
            + Rat::frac(m[4] as i64, 4);
        let rest = bundle.intersection(m5);
        let half = w * &scale / Rat::from_int(2);
        let clause = u.supporting_clause(*bundle)?;
        let (m2, m34) = (m[2], m[3] + m[4]);
        if used >= Rat::one() {
            continue;
        } else if m[1] + m2 + m34 == 0 {
            let additive = Valuation::additive(clause)?;
            let (h1, h2) = split_min_value(rest, &additive, &eight)
                .map_err(|e| Error::LemmaViolated(format!("untouched bundle {bundle}: {e}")))?;
            parts.push((h1, half.clone()));
            parts.push((h2, half));
        } else if (m2 == 1 && m34 <= 2) || (m2 == 0 && (2..=4).contains(&m34)) {
            parts.push((rest, half));
        } else if m2 == 0 && m34 == 1 {
            let e = bundle
                .difference(m5)
                .items()
                .next()
                .expect("one item taken");
            let sets = three_set_partition(*bundle, &clause, e).map_err(|err| {
                Error::LemmaViolated(format!("bundle {bundle} without {e}: {err}"))
            })?;
            let quarter = &half / Rat::from_int(2);
            parts.extend(sets.into_iter().map(|s| (s, quarter.clone())));
        } else {
            return Err(Error::LemmaViolated(format!(
                "bundle {bundle}: no case for counts {:?}",
                &m[1..]
            )));
        }
    }

    let total: Rat = parts.iter().map(|p| &p.1).sum();
    if total < Rat::one() {
        return Err(Error::LemmaViolated(format!(
            "rebuilt weights sum to {total} < 1"
        )));
    }
    for (s, _) in &parts {
        if !s.is_subset_of(m5) {
            return Err(Error::LemmaViolated(format!("{s} uses a removed item")));
        }
        if u.value(*s) < eight {
            return Err(Error::LemmaViolated(format!(
                "{s} is worth {} < 8/17",
                u.value(*s)
            )));
        }
    }
    for e in m5.items() {
        let cover: Rat = parts.iter().filter(|p| p.0.contains(e)).map(|p| &p.1).sum();
        if cover > cover_limit {
            return Err(Error::LemmaViolated(format!(
                "item {e} covered {cover} > {cover_limit}"
            )));
        }
    }
    Ok(parts)
}
