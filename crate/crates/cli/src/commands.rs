use anyhow::{bail, Context};
use fairshare::bidding::{gen_negative_instance, run_game, GameMode, StrategySpec, TieRule};
use fairshare::exante::{
    clp_solve, exante_opt, gen_vector_instance, round_solution, ExanteResult, RoundingReport,
    ShareKind, VectorClass,
};
use fairshare::model::generate::{random_instance, two_triangles_instance, Entitlements};
use fairshare::shares::share_report;
use fairshare::xosalloc::{
    allocate_equal_417, allocate_one_sixth, apsxos_allocate, lemma817_check, welfare_max,
};
use fairshare::{Allocation, Instance, Rat, Valuation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{print_json, print_text, GenerateCommand};

#[derive(Serialize)]
struct AgentShares {
    agent: usize,
    entitlement: Rat,
    #[serde(flatten)]
    report: fairshare::shares::ShareReport,
}

pub fn shares(inst: &Instance, agent: Option<usize>) -> anyhow::Result<()> {
    let report = |i: usize| -> anyhow::Result<AgentShares> {
        let b = inst.entitlement(i);
        Ok(AgentShares {
            agent: i,
            entitlement: b.clone(),
            report: share_report(inst.valuation(i), b).with_context(|| format!("agent {i}"))?,
        })
    };
    match agent {
        Some(i) if i >= inst.n() => bail!("no agent {i} (instance has {})", inst.n()),
        Some(i) => print_json(&report(i)?),
        None => print_json(
            &(0..inst.n())
                .map(report)
                .collect::<anyhow::Result<Vec<_>>>()?,
        ),
    }
}

#[derive(Serialize)]
struct WelfareReport {
    algorithm: &'static str,
    allocation: Allocation,
    welfare: Rat,
    values: Vec<Rat>,
}

pub fn allocate(inst: &Instance, algo: &str, max_steps: Option<usize>) -> anyhow::Result<()> {
    match algo {
        "apsxos" => print_json(&apsxos_allocate(inst)?),
        "one-sixth" => print_json(&allocate_one_sixth(inst, max_steps)?),
        "four-seventeenths" => {
            let rep = allocate_equal_417(inst)?;
            lemma817_check(inst, &rep)?;
            print_json(&rep)
        }
        "welfare-max" => {
            let vals: Vec<Valuation> = (0..inst.n()).map(|i| inst.valuation(i).clone()).collect();
            let (allocation, welfare) = welfare_max(inst, &vals)?;
            let values = allocation.values(inst);
            print_json(&WelfareReport {
                algorithm: "welfare-max",
                allocation,
                welfare,
                values,
            })
        }
        _ => unreachable!("clap restricts the algorithm names"),
    }
}

pub fn bid(
    inst: &Instance,
    strategies: &[String],
    mode: GameMode,
    tie: TieRule,
    seed: u64,
) -> anyhow::Result<()> {
    if strategies.len() != inst.n() {
        bail!("{} strategies for {} agents", strategies.len(), inst.n());
    }
    let mut players = strategies
        .iter()
        .enumerate()
        .map(|(i, s)| Ok(s.parse::<StrategySpec>()?.build(seed, i)))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let t = run_game(inst, &mut players, mode, tie, seed)?;
    t.verify(inst)?;
    print_text(&t.to_json_lines())
}

#[derive(Serialize)]
struct ExanteReport {
    #[serde(flatten)]
    result: ExanteResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    rounding: Option<RoundingReport>,
}

pub fn exante(
    inst: &Instance,
    share: ShareKind,
    trials: usize,
    class: VectorClass,
    seed: u64,
) -> anyhow::Result<()> {
    let result = exante_opt(inst, share)?;
    let rounding = if trials > 0 {
        let x = clp_solve(inst, None)?;
        Some(round_solution(
            inst,
            &x,
            class,
            seed,
            trials,
            Some(&result.shares),
        )?)
    } else {
        None
    };
    print_json(&ExanteReport { result, rounding })
}

pub fn generate(cmd: GenerateCommand, seed: u64) -> anyhow::Result<()> {
    let inst = match cmd {
        GenerateCommand::Vector { n, class } => gen_vector_instance(n, class)?,
        GenerateCommand::Triangles { n } => two_triangles_instance(n)?,
        GenerateCommand::Negative(a) => gen_negative_instance(a.k, a.q, &a.eps)?.0.instance,
        GenerateCommand::Random {
            class,
            m,
            n,
            max,
            entitlements,
        } => {
            let mode = match entitlements.as_str() {
                "equal" => Entitlements::Equal,
                "random" => Entitlements::Random,
                _ => Entitlements::RandomPartial,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_instance(&mut rng, class, m, n, max, mode)?
        }
    };
    print_text(&(inst.to_json()? + "\n"))
}
