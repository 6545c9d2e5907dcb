use fairshare::bidding::{
    adversary_search, run_game, GameMode, OneShot, SearchConfig, Strategy as Bidder, StrategySpec,
    TieRule,
};
use fairshare::ladder::choose_k;
use fairshare::model::generate::{random_instance, Entitlements};
use fairshare::model::{Agent, ValuationClass};
use fairshare::shares::aps;
use fairshare::{Bundle, Instance, Rat, Valuation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const OPPONENTS: [&str; 5] = ["greedy", "greedy:2", "random", "zero", "one-shot"];

fn lineup(first: &str, others: &[usize], seed: u64) -> Vec<Box<dyn Bidder>> {
    std::iter::once(first)
        .chain(others.iter().map(|&k| OPPONENTS[k]))
        .enumerate()
        .map(|(i, s)| s.parse::<StrategySpec>().unwrap().build(seed, i))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn games_keep_their_books(
        seed in any::<u64>(),
        m in 1usize..7,
        picks in prop::collection::vec(0usize..5, 1..4),
        plain in any::<bool>(),
        tie in 0usize..3,
    ) {
        let n = picks.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, ValuationClass::Subadditive, m, n, 6, Entitlements::Random).unwrap();
        let mode = if plain { GameMode::Plain } else { GameMode::Extended };
        let tie = [TieRule::LowestIndex, TieRule::HighestIndex, TieRule::Seeded][tie];
        let mut bidders: Vec<Box<dyn Bidder>> = picks
            .iter()
            .enumerate()
            .map(|(i, &k)| OPPONENTS[k].parse::<StrategySpec>().unwrap().build(seed, i))
            .collect();
        let t = run_game(&inst, &mut bidders, mode, tie, seed).unwrap();
        t.verify(&inst).unwrap();

        let mut seen = Bundle::EMPTY;
        let mut spent = vec![Rat::zero(); n];
        for r in &t.rounds {
            prop_assert!(!r.selection.is_empty());
            prop_assert!(r.selection.is_disjoint(seen));
            if mode == GameMode::Plain {
                prop_assert_eq!(r.selection.len(), 1);
            }
            prop_assert_eq!(&r.bids[r.winner], r.bids.iter().max().unwrap());
            prop_assert_eq!(&r.payment, &(&r.bids[r.winner] * Rat::from(r.selection.len())));
            seen = seen.union(r.selection);
            spent[r.winner] += &r.payment;
        }
        prop_assert_eq!(t.allocation.allocated(), seen);
        for i in 0..n {
            prop_assert!(!t.budgets[i].is_negative());
            prop_assert_eq!(&t.budgets[i] + &spent[i], inst.entitlement(i).clone());
            prop_assert_eq!(&t.values[i], &inst.valuation(i).value(t.allocation.bundle(i)));
        }
    }

    // One-shot with its default target against a field of other bidders.
    #[test]
    fn one_shot_meets_its_target(
        seed in any::<u64>(),
        m in 1usize..7,
        others in prop::collection::vec(0usize..5, 1..3),
    ) {
        let n = others.len() + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, ValuationClass::Subadditive, m, n, 6, Entitlements::Random).unwrap();
        let b = inst.entitlement(0);
        let share = aps(inst.valuation(0), b).unwrap().0;
        let target = share / Rat::from(choose_k(m as u64, Some(b)));
        let mut bidders = lineup("one-shot", &others, seed);
        let t = run_game(&inst, &mut bidders, GameMode::Extended, TieRule::HighestIndex, seed).unwrap();
        prop_assert!(t.values[0] >= target, "value {} below target {}", t.values[0], target);
    }
}

#[test]
fn equal_additive_pair_each_get_one_item() {
    let v = Valuation::additive(vec![Rat::one(); 2]).unwrap();
    let inst = Instance::equal(2, vec![v.clone(), v]).unwrap();
    let mut bidders = lineup("one-shot", &[4], 1);
    let t = run_game(
        &inst,
        &mut bidders,
        GameMode::Extended,
        TieRule::default(),
        1,
    )
    .unwrap();
    assert_eq!(t.values, vec![Rat::one(), Rat::one()]);
    assert_eq!(t.to_json_lines().lines().count(), t.rounds.len() + 1);
}

#[test]
fn search_holds_one_shot_to_its_target() {
    // cardinality valuation: 1 for one item, 2 for two or more
    let mut values = vec![Rat::from_int(2); 16];
    values[0] = Rat::zero();
    for i in 0..4 {
        values[1 << i] = Rat::one();
    }
    let v = Valuation::table(4, values).unwrap();
    let agents = [Rat::frac(1, 3), Rat::frac(2, 3)]
        .into_iter()
        .map(|entitlement| Agent {
            valuation: v.clone(),
            entitlement,
        })
        .collect();
    let inst = Instance::new(4, agents).unwrap();
    let share = aps(&v, &Rat::frac(1, 3)).unwrap().0;
    let out =
        adversary_search(&inst, 0, &mut OneShot::with_k(3), &SearchConfig::default()).unwrap();
    assert!(out.worst_value >= share / Rat::from_int(3));
    assert!(out.nodes > 0);
}
