use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Bundle, Instance};
use crate::numerics::Rat;

use super::clp::ClpSolution;
use super::vector::VectorClass;

pub const DEFAULT_TRIALS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundingAgent {
    pub agent: usize,
    pub lp_contribution: Rat,
    pub empirical_mean: Rat,
    /// `empirical_mean / lp_contribution`.
    pub ratio: Option<f64>,
    pub share: Option<Rat>,
    pub ratio_to_share: Option<f64>,
    /// Fraction of trials in which the agent kept at least half the value
    /// of its tentative bundle.
    pub half_value_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundingReport {
    pub class: VectorClass,
    pub trials: usize,
    pub seed: u64,
    /// Ratio the literature's rounding attains in expectation for this
    /// class; this scheme is only measured against it.
    pub target: f64,
    pub agents: Vec<RoundingAgent>,
}

impl RoundingReport {
    pub fn min_ratio(&self) -> Option<f64> {
        self.agents
            .iter()
            .filter_map(|a| a.ratio)
            .min_by(|a, b| a.total_cmp(b))
    }
}

/// Samples a tentative bundle for every agent from its configuration-LP
/// weights, then lets agents keep their bundles in a uniformly random
/// priority order, each losing items already kept by someone earlier.
///
/// Trial `t` draws from stream `t` of a generator seeded with `seed`, so
/// results do not depend on the thread count.
pub fn round_solution(
    inst: &Instance,
    x: &ClpSolution,
    class: VectorClass,
    seed: u64,
    trials: usize,
    shares: Option<&[Rat]>,
) -> Result<RoundingReport> {
    let n = inst.n();
    if trials == 0 {
        return Err(Error::InvalidInput("at least one trial".into()));
    }
    if !x.is_feasible(n, inst.m()) {
        return Err(Error::InvalidInput(
            "not a feasible configuration-LP solution".into(),
        ));
    }
    if shares.is_some_and(|s| s.len() != n) {
        return Err(Error::InvalidInput("one share per agent".into()));
    }
    let menus: Vec<Vec<(Bundle, f64)>> = (0..n)
        .map(|i| {
            x.entries
                .iter()
                .filter(|(a, _, _)| *a == i)
                .map(|(_, s, w)| (*s, w.to_f64()))
                .collect()
        })
        .collect();

    let per_trial = |t: usize| -> (Vec<Rat>, Vec<bool>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let tentative: Vec<Bundle> = menus
            .iter()
            .map(|menu| {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (s, w) in menu {
                    acc += w;
                    if u < acc {
                        return *s;
                    }
                }
                menu.last().map_or(Bundle::EMPTY, |m| m.0)
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut taken = Bundle::EMPTY;
        let mut values = vec![Rat::zero(); n];
        let mut half = vec![false; n];
        for i in order {
            let kept = tentative[i].difference(taken);
            taken = taken.union(kept);
            let v = inst.valuation(i);
            values[i] = v.value(kept);
            half[i] = &values[i] * Rat::from_int(2) >= v.value(tentative[i]);
        }
        (values, half)
    };

    let (sums, halves) = (0..trials)
        .into_par_iter()
        .map(per_trial)
        .map(|(v, h)| (v, h.into_iter().map(usize::from).collect::<Vec<_>>()))
        .reduce(
            || (vec![Rat::zero(); n], vec![0usize; n]),
            |(mut a, mut ah), (b, bh)| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                for (x, y) in ah.iter_mut().zip(bh) {
                    *x += y;
                }
                (a, ah)
            },
        );

    let count = Rat::from(trials);
    let agents = (0..n)
        .map(|i| {
            let lp = x.contribution(i, inst.valuation(i));
            let mean = &sums[i] / &count;
            let share = shares.map(|s| s[i].clone());
            let ratio_to = |d: &Rat| d.is_positive().then(|| (&mean / d).to_f64());
            RoundingAgent {
                agent: i,
                ratio: ratio_to(&lp),
                ratio_to_share: share.as_ref().and_then(ratio_to),
                lp_contribution: lp,
                empirical_mean: mean.clone(),
                share,
                half_value_rate: halves[i] as f64 / trials as f64,
            }
        })
        .collect();
    let target = match class {
        VectorClass::Xos => 1.0 - (-1.0f64).exp(),
        VectorClass::Subadditive => 0.25,
    };
    Ok(RoundingReport {
        class,
        trials,
        seed,
        target,
        agents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Valuation;

    #[test]
    fn disjoint_bundles_are_kept() {
        let a = Valuation::additive(vec![Rat::one(), Rat::zero()]).unwrap();
        let b = Valuation::additive(vec![Rat::zero(), Rat::one()]).unwrap();
        let inst = Instance::equal(2, vec![a, b]).unwrap();
        let x = ClpSolution {
            entries: vec![
                (0, Bundle::singleton(0), Rat::one()),
                (1, Bundle::singleton(1), Rat::one()),
            ],
            objective: Rat::from_int(2),
        };
        let rep = round_solution(&inst, &x, VectorClass::Xos, 3, 50, None).unwrap();
        for a in &rep.agents {
            assert_eq!(a.empirical_mean, Rat::one());
            assert_eq!(a.ratio, Some(1.0));
            assert_eq!(a.half_value_rate, 1.0);
        }
    }

    #[test]
    fn infeasible_input_is_rejected() {
        let a = Valuation::additive(vec![Rat::one()]).unwrap();
        let inst = Instance::equal(1, vec![a]).unwrap();
        let x = ClpSolution {
            entries: vec![(0, Bundle::EMPTY, Rat::one())],
            objective: Rat::zero(),
        };
        assert!(round_solution(&inst, &x, VectorClass::Xos, 0, 10, None).is_err());
    }
}
