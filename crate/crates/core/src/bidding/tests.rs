use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Error;
use crate::model::generate::{random_subadditive, random_xos};
use crate::model::{Agent, Bundle, Instance, Valuation};
use crate::numerics::Rat;
use crate::shares::aps;

fn r(n: i64) -> Rat {
    Rat::from_int(n)
}

fn additive(v: &[i64]) -> Valuation {
    Valuation::additive(v.iter().map(|&x| r(x)).collect()).unwrap()
}

fn boxed(specs: &[&str]) -> Vec<Box<dyn Strategy>> {
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| s.parse::<StrategySpec>().unwrap().build(7, i))
        .collect()
}

#[test]
fn lone_agent_takes_everything() {
    let inst = Instance::equal(3, vec![additive(&[1, 2, 3])]).unwrap();
    let t = run_game(
        &inst,
        &mut boxed(&["greedy:3"]),
        GameMode::Extended,
        TieRule::default(),
        0,
    )
    .unwrap();
    assert_eq!(t.allocation.bundle(0), Bundle::full(3));
    t.verify(&inst).unwrap();
}

#[test]
fn two_one_shot_agents_split_two_items() {
    let inst = Instance::equal(2, vec![additive(&[1, 1]), additive(&[1, 1])]).unwrap();
    let (share, _) = aps(inst.valuation(0), inst.entitlement(0)).unwrap();
    assert_eq!(share, r(1));
    let mut s = boxed(&["one-shot:k=1", "one-shot:k=1"]);
    let t = run_game(&inst, &mut s, GameMode::Extended, TieRule::default(), 0).unwrap();
    assert_eq!(t.values, vec![r(1), r(1)]);
    t.verify(&inst).unwrap();
}

/// Wins with a fixed bid and takes a fixed set.
struct Fixed(Rat, Bundle);

impl Strategy for Fixed {
    fn name(&self) -> String {
        "fixed".into()
    }
    fn bid(&mut self, _view: &View) -> crate::Result<Rat> {
        Ok(self.0.clone())
    }
    fn select(&mut self, _view: &View, _price: &Rat) -> crate::Result<Bundle> {
        Ok(self.1)
    }
}

#[test]
fn overspending_selection_is_rejected() {
    let inst = Instance::equal(3, vec![additive(&[1, 1, 1]), additive(&[1, 1, 1])]).unwrap();
    let mut s: Vec<Box<dyn Strategy>> = vec![
        Box::new(Fixed(Rat::frac(1, 4), Bundle::full(3))),
        Box::new(ZeroBid),
    ];
    let err = run_game(&inst, &mut s, GameMode::Extended, TieRule::default(), 0).unwrap_err();
    assert!(matches!(err, Error::IllegalSelection { agent: 0, .. }));
}

#[test]
fn overbidding_is_rejected() {
    let inst = Instance::equal(1, vec![additive(&[1]), additive(&[1])]).unwrap();
    let mut s: Vec<Box<dyn Strategy>> =
        vec![Box::new(ZeroBid), Box::new(Fixed(r(1), Bundle::full(1)))];
    let err = run_game(&inst, &mut s, GameMode::Extended, TieRule::default(), 0).unwrap_err();
    assert!(matches!(err, Error::IllegalBid { agent: 1, .. }));
}

#[test]
fn plain_game_takes_one_item_per_round() {
    let inst = Instance::equal(4, vec![additive(&[1, 2, 3, 4]), additive(&[4, 3, 2, 1])]).unwrap();
    let mut s = boxed(&["greedy:4", "greedy:4"]);
    let t = run_game(&inst, &mut s, GameMode::Plain, TieRule::default(), 0).unwrap();
    assert!(t.rounds.iter().all(|r| r.selection.len() == 1));
    t.verify(&inst).unwrap();
}

#[test]
fn game_ends_when_nobody_bids() {
    let inst = Instance::equal(2, vec![additive(&[1, 1]), additive(&[1, 1])]).unwrap();
    let t = run_game(
        &inst,
        &mut boxed(&["zero", "zero"]),
        GameMode::Extended,
        TieRule::default(),
        0,
    )
    .unwrap();
    assert!(t.rounds.is_empty());
    assert_eq!(t.allocation.allocated(), Bundle::EMPTY);
}

#[test]
fn transcripts_replay_identically() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let vals: Vec<Valuation> = (0..3).map(|_| random_xos(&mut rng, 6, 2, 5)).collect();
    let inst = Instance::equal(6, vals).unwrap();
    let play = || {
        let mut s = boxed(&["random", "random", "greedy:2"]);
        run_game(&inst, &mut s, GameMode::Extended, TieRule::Seeded, 99).unwrap()
    };
    let (a, b) = (play(), play());
    assert_eq!(a, b);
    assert_eq!(a.to_json_lines(), b.to_json_lines());
    a.verify(&inst).unwrap();
    assert_eq!(a.to_json_lines().lines().count(), a.rounds.len() + 1);
}

#[test]
fn strategy_specs_parse() {
    assert_eq!(
        "one-shot".parse::<StrategySpec>().unwrap(),
        StrategySpec::OneShot
    );
    assert_eq!(
        "one-shot:k=3".parse::<StrategySpec>().unwrap(),
        StrategySpec::OneShotK(3)
    );
    assert_eq!(
        "one-shot@1/3".parse::<StrategySpec>().unwrap(),
        StrategySpec::OneShotTarget(Rat::frac(1, 3))
    );
    assert_eq!(
        "greedy".parse::<StrategySpec>().unwrap(),
        StrategySpec::Greedy(1)
    );
    assert_eq!(
        "random:5".parse::<StrategySpec>().unwrap(),
        StrategySpec::Random(Some(5))
    );
    assert!("greedy:0".parse::<StrategySpec>().is_err());
    assert!("bogus".parse::<StrategySpec>().is_err());
}

#[test]
fn acceptable_singleton_means_full_bid() {
    let v = additive(&[1, 5, 2]);
    let s = smallest_acceptable(&v, Bundle::full(3), &r(4)).unwrap();
    assert_eq!(s, Some(Bundle::singleton(1)));
    assert_eq!(
        smallest_acceptable(&v, Bundle::from_items([0, 2]), &r(4)).unwrap(),
        None
    );
    // among pairs worth at least 3, {1,2} is the most valuable
    let w = additive(&[2, 2, 2]);
    assert_eq!(
        smallest_acceptable(&w, Bundle::full(3), &r(3)).unwrap(),
        Some(Bundle::from_items([0, 1]))
    );
}

#[test]
fn clause_search_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let v = random_xos(&mut rng, 6, 3, 4);
        let t = Valuation::table(6, v.to_table().unwrap().values().to_vec()).unwrap();
        for rho in 1..=8 {
            for rem in [Bundle::full(6), Bundle::from_items([0, 2, 3, 5])] {
                assert_eq!(
                    smallest_acceptable(&v, rem, &r(rho)).unwrap(),
                    smallest_acceptable(&t, rem, &r(rho)).unwrap(),
                );
            }
        }
    }
}

#[test]
fn search_alone_gets_everything() {
    let inst = Instance::equal(3, vec![additive(&[1, 2, 3])]).unwrap();
    let out = adversary_search(
        &inst,
        0,
        &mut Greedy { spread: 3 },
        &SearchConfig::default(),
    )
    .unwrap();
    assert_eq!(out.worst_value, r(6));
}

#[test]
fn search_against_silent_protagonist_is_zero() {
    let inst = Instance::equal(3, vec![additive(&[1, 2, 3]), additive(&[1, 1, 1])]).unwrap();
    let out = adversary_search(&inst, 0, &mut ZeroBid, &SearchConfig::default()).unwrap();
    assert_eq!(out.worst_value, r(0));
}

#[test]
fn one_shot_survives_search_on_small_subadditive() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let v = random_subadditive(&mut rng, 4, 4);
        let b = Rat::frac(1, 3);
        let (share, _) = aps(&v, &b).unwrap();
        if share.is_zero() {
            continue;
        }
        let inst = Instance::new(
            4,
            vec![
                Agent {
                    valuation: v.clone(),
                    entitlement: b.clone(),
                },
                Agent {
                    valuation: v,
                    entitlement: Rat::frac(2, 3),
                },
            ],
        )
        .unwrap();
        let out =
            adversary_search(&inst, 0, &mut OneShot::with_k(3), &SearchConfig::default()).unwrap();
        assert!(out.worst_value >= &share / &r(3));
    }
}

#[test]
fn one_shot_secures_the_sth_item() {
    // b = 1/3 > 1/4, so s = 3 and the third most valuable item is worth 3
    let v = additive(&[5, 4, 3, 1]);
    let inst = Instance::new(
        4,
        vec![
            Agent {
                valuation: v.clone(),
                entitlement: Rat::frac(1, 3),
            },
            Agent {
                valuation: v,
                entitlement: Rat::frac(2, 3),
            },
        ],
    )
    .unwrap();
    let cfg = SearchConfig {
        refine: true,
        ..SearchConfig::default()
    };
    let out = adversary_search(&inst, 0, &mut OneShot::with_target(r(3)), &cfg).unwrap();
    assert!(out.worst_value >= r(3));
}

#[test]
fn negative_blocks_have_the_stated_profile() {
    let (neg, adv) = gen_negative_instance(2, 4, &Rat::frac(1, 2)).unwrap();
    assert_eq!(block_size(2, 4), Some(5));
    assert_eq!(adv.len(), neg.instance.n() - 1);
    let v = neg.instance.valuation(0);
    for b in &neg.blocks {
        assert_eq!(v.value(*b), r(2));
        let ones = b.items().filter(|&e| v.item_value(e) == r(1)).count();
        let quarters = b
            .items()
            .filter(|&e| v.item_value(e) == Rat::frac(1, 4))
            .count();
        assert_eq!((ones, quarters), (1, 4));
    }
    assert_eq!(neg.instance.entitlement(0) * &neg.scale, r(2));
    let (one, _) = gen_negative_instance(1, 4, &Rat::frac(1, 2)).unwrap();
    assert!(one.blocks.iter().all(|b| b.len() == 1));
    assert!(matches!(
        gen_negative_instance(4, 2, &Rat::frac(1, 2)),
        Err(Error::ParameterTooLarge(_))
    ));
}

fn negative_battery(k: usize, q: usize, sizes: Option<NegativeSizes>) {
    let eps = Rat::frac(1, 2);
    let mut specs: Vec<StrategySpec> = vec![
        StrategySpec::OneShotTarget(r(1)),
        StrategySpec::OneShotTarget(Rat::frac(1, 2)),
        StrategySpec::Greedy(1),
        StrategySpec::Greedy(4),
    ];
    specs.extend((0..10).map(|s| StrategySpec::Random(Some(s))));
    for spec in specs {
        let (neg, adv) = match sizes {
            Some(z) => gen_negative_instance_with(k, q, &eps, z).unwrap(),
            None => gen_negative_instance(k, q, &eps).unwrap(),
        };
        let mut all = vec![spec.build(0, 0)];
        all.extend(adv);
        let t = run_game(
            &neg.instance,
            &mut all,
            GameMode::Extended,
            TieRule::default(),
            0,
        )
        .unwrap();
        t.verify(&neg.instance).unwrap();
        assert!(
            t.values[0] <= neg.bound,
            "{spec:?}: {} > {}",
            t.values[0],
            neg.bound
        );
    }
}

#[test]
fn negative_bound_holds_at_small_parameters() {
    negative_battery(2, 8, None);
}

#[test]
fn negative_bound_holds_where_it_bites() {
    // one block worth 3; the bound 1 + 9/6 + 1/4 is below it
    let sizes = NegativeSizes {
        blocks: 1,
        p1: 2,
        p2: 2,
    };
    negative_battery(3, 6, Some(sizes));
}
