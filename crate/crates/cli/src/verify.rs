use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use fairshare::bidding::{gen_negative_instance, run_game, GameMode, StrategySpec, TieRule};
use fairshare::ladder::{
    check_ladder_lemmas, choose_k, compute_ladder, payment_bound, random_y, verify_appendix,
};
use fairshare::model::{class_check, ValuationClass};
use fairshare::shares::{share_relations, RelationReport};
use fairshare::{Bundle, Rat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::{print_json, read_instance, Falsified, NegativeArgs};

/// Prints the report, then turns recorded failures into a falsification.
fn finish<T: Serialize>(report: &T, failures: usize, what: &str) -> anyhow::Result<()> {
    print_json(report)?;
    if failures > 0 {
        return Err(Falsified(format!("{failures} {what}")).into());
    }
    Ok(())
}

/// Splits a library result into a recorded falsification or a hard error.
fn falsified_or<T>(r: fairshare::Result<T>) -> anyhow::Result<Result<T, String>> {
    match r {
        Ok(x) => Ok(Ok(x)),
        Err(e) if e.is_falsification() => Ok(Err(e.to_string())),
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct AppendixSummary {
    k: usize,
    samples: usize,
    seed: u64,
    /// Smallest `x_k / (k−1)^{k−1}` seen.
    smallest_ratio: Option<Rat>,
    violations: Vec<(usize, String)>,
}

pub fn appendix(k: usize, samples: usize, seed: u64) -> anyhow::Result<()> {
    if k < 2 {
        bail!("--k must be at least 2");
    }
    let outcomes = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let y = random_y(&mut rng, k);
            falsified_or(verify_appendix(&y)).map(|r| (s, r))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut smallest: Option<Rat> = None;
    let mut violations = Vec::new();
    for (s, r) in outcomes {
        match r {
            Ok(rep) => {
                let ratio = &rep.x_recurrence / &rep.bound;
                if smallest.as_ref().is_none_or(|x| ratio < *x) {
                    smallest = Some(ratio);
                }
            }
            Err(why) => violations.push((s, why)),
        }
    }
    let n = violations.len();
    let summary = AppendixSummary {
        k,
        samples,
        seed,
        smallest_ratio: smallest,
        violations,
    };
    finish(&summary, n, "appendix violations")
}

#[derive(Serialize)]
struct LadderEntry {
    file: PathBuf,
    agent: usize,
    k: usize,
    subadditive: bool,
    ladder: Option<Vec<usize>>,
    /// Raw sum `Σ (L_j − L_{j−1}) / L_{j+1}`.
    payment_sum: Option<Rat>,
    /// Whether `m ≤ (k−1)^{k−1}`, under which the sum must reach 1.
    bound_applies: bool,
    violation: Option<String>,
}

fn ladder_entries(file: &Path, k: Option<usize>) -> anyhow::Result<Vec<LadderEntry>> {
    let inst = read_instance(Some(file))?;
    let m = inst.m();
    (0..inst.n())
        .map(|i| -> anyhow::Result<LadderEntry> {
            let v = inst.valuation(i);
            let k = k.unwrap_or_else(|| choose_k(m as u64, Some(inst.entitlement(i))));
            let subadditive = class_check(v, ValuationClass::Subadditive)?;
            let full = Bundle::full(m);
            let mut entry = LadderEntry {
                file: file.to_path_buf(),
                agent: i,
                k,
                subadditive,
                ladder: None,
                payment_sum: None,
                bound_applies: false,
                violation: None,
            };
            if v.value(full).is_zero() {
                return Ok(entry);
            }
            // the structural properties are only claimed for subadditive v
            let ladder = if subadditive {
                match falsified_or(check_ladder_lemmas(v, full, k))? {
                    Ok(l) => l,
                    Err(why) => {
                        entry.violation = Some(why);
                        compute_ladder(v, full, k)?
                    }
                }
            } else {
                compute_ladder(v, full, k)?
            };
            let sum = payment_bound(&ladder, &Rat::one());
            let cap = Rat::from(k - 1).pow(k as u32 - 1);
            entry.bound_applies = subadditive && Rat::from(m) <= cap;
            if entry.bound_applies && sum < Rat::one() && entry.violation.is_none() {
                entry.violation = Some(format!("payment sum {sum} < 1"));
            }
            entry.ladder = Some(ladder.entries().to_vec());
            entry.payment_sum = Some(sum);
            Ok(entry)
        })
        .collect::<anyhow::Result<Vec<_>>>()
        .with_context(|| format!("ladders of {}", file.display()))
}

pub fn ladder(files: &[PathBuf], k: Option<usize>) -> anyhow::Result<()> {
    if k == Some(0) {
        bail!("--k must be positive");
    }
    let entries: Vec<LadderEntry> = files
        .par_iter()
        .map(|f| ladder_entries(f, k))
        .collect::<anyhow::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let failures = entries.iter().filter(|e| e.violation.is_some()).count();
    finish(&entries, failures, "ladder violations")
}

#[derive(Serialize)]
struct RelationEntry {
    file: PathBuf,
    agent: usize,
    report: Option<RelationReport>,
    violation: Option<String>,
}

pub fn relations(files: &[PathBuf]) -> anyhow::Result<()> {
    let entries: Vec<RelationEntry> = files
        .par_iter()
        .map(|f| -> anyhow::Result<Vec<RelationEntry>> {
            let inst = read_instance(Some(f))?;
            (0..inst.n())
                .map(|i| {
                    let r = falsified_or(share_relations(inst.valuation(i), inst.n()))
                        .with_context(|| format!("{} agent {i}", f.display()))?;
                    let (report, violation) = match r {
                        Ok(rep) => (Some(rep), None),
                        Err(why) => (None, Some(why)),
                    };
                    Ok(RelationEntry {
                        file: f.clone(),
                        agent: i,
                        report,
                        violation,
                    })
                })
                .collect()
        })
        .collect::<anyhow::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let failures = entries.iter().filter(|e| e.violation.is_some()).count();
    finish(&entries, failures, "relation violations")
}

#[derive(Serialize)]
struct NegativeRun {
    strategy: String,
    value: Rat,
}

#[derive(Serialize)]
struct NegativeSummary {
    k: usize,
    q: usize,
    eps: Rat,
    bound: Rat,
    best: Rat,
    runs: Vec<NegativeRun>,
}

pub fn negative(args: &NegativeArgs) -> anyhow::Result<()> {
    let mut names: Vec<String> = [
        "one-shot@1",
        "one-shot@1/2",
        "greedy",
        "greedy:2",
        "greedy:4",
    ]
    .map(String::from)
    .to_vec();
    names.extend((0..args.samples).map(|s| format!("random:{s}")));
    let runs = names
        .par_iter()
        .map(|name| -> anyhow::Result<NegativeRun> {
            let spec: StrategySpec = name.parse()?;
            let (neg, adversaries) = gen_negative_instance(args.k, args.q, &args.eps)?;
            let mut players = vec![spec.build(0, 0)];
            players.extend(adversaries);
            let t = run_game(
                &neg.instance,
                &mut players,
                GameMode::Extended,
                TieRule::default(),
                0,
            )
            .with_context(|| format!("strategy {name}"))?;
            t.verify(&neg.instance)?;
            Ok(NegativeRun {
                strategy: name.clone(),
                value: t.values[0].clone(),
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let (neg, _) = gen_negative_instance(args.k, args.q, &args.eps)?;
    let best = runs
        .iter()
        .map(|r| r.value.clone())
        .max()
        .unwrap_or_default();
    let failures = runs.iter().filter(|r| r.value > neg.bound).count();
    let summary = NegativeSummary {
        k: args.k,
        q: args.q,
        eps: args.eps.clone(),
        bound: neg.bound,
        best,
        runs,
    };
    finish(&summary, failures, "runs above the bound")
}
