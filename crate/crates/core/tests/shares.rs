use fairshare::model::generate::{random_valuation, two_triangles};
use fairshare::model::{check_fractional_partition, ValuationClass};
use fairshare::numerics::{lp_solve, LinearProgram, LpStatus, Relation};
use fairshare::shares::{
    approx_mms_partition_subadditive, aps, aps_via_clp, mes, mms, share_relations,
};
use fairshare::{Bundle, FractionalPartition, Rat, Valuation};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ints(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| Rat::from_int(x)).collect()
}

fn additive(v: &[i64]) -> Valuation {
    Valuation::additive(ints(v)).unwrap()
}

/// Best smallest-part value over every assignment of items to `n` owners.
fn mms_oracle(v: &Valuation, n: usize) -> Rat {
    let m = v.num_items();
    let mut best = Rat::zero();
    for code in 0..n.pow(m as u32) {
        let mut parts = vec![Bundle::EMPTY; n];
        let mut c = code;
        for e in 0..m {
            parts[c % n] = parts[c % n].with(e);
            c /= n;
        }
        let worst = parts.iter().map(|p| v.value(*p)).min().unwrap();
        best = Rat::max_of(best, worst);
    }
    best
}

/// Weights on every bundle summing to 1 and covering each item exactly `b`.
fn partition_lp(
    v: &Valuation,
    b: &Rat,
    objective: Vec<Rat>,
    allowed: impl Fn(Bundle) -> bool,
) -> LinearProgram {
    let m = v.num_items();
    let all: Vec<Bundle> = Bundle::full(m).subsets().collect();
    let mut lp = LinearProgram::new(objective);
    lp.add(vec![Rat::one(); all.len()], Relation::Eq, Rat::one());
    for e in 0..m {
        let row = all
            .iter()
            .map(|s| {
                if s.contains(e) {
                    Rat::one()
                } else {
                    Rat::zero()
                }
            })
            .collect();
        lp.add(row, Relation::Eq, b.clone());
    }
    for (k, s) in all.iter().enumerate() {
        if !allowed(*s) {
            let mut row = vec![Rat::zero(); all.len()];
            row[k] = Rat::one();
            lp.add(row, Relation::Eq, Rat::zero());
        }
    }
    lp
}

/// Largest value `t` such that some exact fractional `b`-partition uses
/// only bundles worth at least `t`, by scanning every bundle value.
fn aps_oracle(v: &Valuation, b: &Rat) -> Rat {
    let all: Vec<Bundle> = Bundle::full(v.num_items()).subsets().collect();
    let mut values: Vec<Rat> = all.iter().map(|s| v.value(*s)).collect();
    values.sort();
    values.dedup();
    let mut best = Rat::zero();
    for t in values {
        let lp = partition_lp(v, b, vec![Rat::zero(); all.len()], |s| v.value(s) >= t);
        if lp_solve(&lp).unwrap().status == LpStatus::Optimal {
            best = t;
        }
    }
    best
}

fn mes_oracle(v: &Valuation, b: &Rat) -> Rat {
    let obj = Bundle::full(v.num_items())
        .subsets()
        .map(|s| v.value(s))
        .collect();
    let res = lp_solve(&partition_lp(v, b, obj, |_| true)).unwrap();
    assert_eq!(res.status, LpStatus::Optimal);
    res.objective
}

fn random_small(seed: u64, m: usize) -> Valuation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let class = [
        ValuationClass::Additive,
        ValuationClass::Xos,
        ValuationClass::Submodular,
        ValuationClass::Subadditive,
        ValuationClass::Monotone,
    ][rng.gen_range(0..5)];
    random_valuation(&mut rng, class, m, 6).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mms_matches_enumeration(seed in any::<u64>(), m in 1usize..7, n in 1usize..4) {
        let v = random_small(seed, m);
        let (value, parts) = mms(&v, n).unwrap();
        prop_assert_eq!(&value, &mms_oracle(&v, n));
        prop_assert_eq!(parts.len(), n);
        let union = parts.iter().fold(Bundle::EMPTY, |acc, p| {
            assert!(acc.is_disjoint(*p));
            acc.union(*p)
        });
        prop_assert_eq!(union, Bundle::full(m));
        prop_assert!(parts.iter().all(|p| v.value(*p) >= value));
    }

    #[test]
    fn aps_and_mes_match_exact_partition_programs(
        seed in any::<u64>(),
        m in 1usize..5,
        b in prop_oneof![Just((1i64, 2i64)), Just((1, 3)), Just((2, 5)), Just((3, 4))],
    ) {
        let v = random_small(seed, m);
        let b = Rat::frac(b.0, b.1);
        let (a, fp) = aps(&v, &b).unwrap();
        prop_assert_eq!(&a, &aps_oracle(&v, &b));
        let check = check_fractional_partition(&fp, &v);
        prop_assert!(check.valid, "{:?}", check.violation);
        prop_assert_eq!(check.min_value, a.clone());

        let (e, fp) = mes(&v, &b).unwrap();
        prop_assert_eq!(&e, &mes_oracle(&v, &b));
        prop_assert!(check_fractional_partition(&fp, &v).valid);
        let weighted: Rat = fp.support().map(|(s, w)| w * v.value(*s)).sum();
        prop_assert_eq!(weighted, e);
    }

    #[test]
    fn share_order_and_clp_route(seed in any::<u64>(), m in 1usize..6, n in 2usize..4) {
        let v = random_small(seed, m);
        let b = Rat::frac(1, n as i64);
        let (lo, _) = mms(&v, n).unwrap();
        let (mid, _) = aps(&v, &b).unwrap();
        let (hi, _) = mes(&v, &b).unwrap();
        prop_assert!(lo <= mid && mid <= hi, "MMS {lo} APS {mid} MES {hi}");
        prop_assert_eq!(aps_via_clp(&v, n).unwrap(), mid);
    }

    #[test]
    fn additive_mes_is_proportional(values in prop::collection::vec(0i64..20, 1..7), d in 1i64..6) {
        let v = additive(&values);
        let b = Rat::frac(1, d);
        prop_assert_eq!(mes(&v, &b).unwrap().0, &b * v.total());
        // APS never exceeds the proportional share for additive valuations
        prop_assert!(aps(&v, &b).unwrap().0 <= &b * v.total());
    }

    #[test]
    fn approximate_partition_is_a_partition(seed in any::<u64>(), m in 1usize..7, n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_valuation(&mut rng, ValuationClass::Subadditive, m, 6).unwrap();
        let parts = approx_mms_partition_subadditive(&v, n).unwrap();
        prop_assert_eq!(parts.len(), n);
        let union = parts.iter().fold(Bundle::EMPTY, |acc, p| {
            assert!(acc.is_disjoint(*p));
            acc.union(*p)
        });
        prop_assert_eq!(union, Bundle::full(m));
        // every level keeps at least the MMS of what is left, so no bundle
        // falls below a sixth of the MMS
        let floor = mms_oracle(&v, n) / Rat::from_int(6);
        prop_assert!(parts.iter().all(|p| v.value(*p) >= floor));
    }
}

#[test]
fn two_triangle_shares() {
    let v = two_triangles(3).unwrap();
    let third = Rat::frac(1, 3);
    assert_eq!(mms(&v, 3).unwrap().0, Rat::one());
    assert_eq!(aps(&v, &third).unwrap().0, Rat::from_int(2));
    assert_eq!(aps_via_clp(&v, 3).unwrap(), Rat::from_int(2));
    let rel = share_relations(&v, 3).unwrap();
    assert_eq!(&rel.aps / &rel.mms, Rat::from_int(2));

    // the six edges with weight 1/6 each form a fractional 1/3-partition
    let edges = [[0, 1], [1, 2], [0, 2], [3, 4], [4, 5], [3, 5]];
    let fp = FractionalPartition::completed(
        edges
            .iter()
            .map(|e| (Bundle::from_items(*e), Rat::frac(1, 6)))
            .collect(),
        third,
        6,
    )
    .unwrap();
    let check = check_fractional_partition(&fp, &v);
    assert!(check.valid);
    assert_eq!(check.min_value, Rat::from_int(2));
}

#[test]
fn small_share_examples() {
    let half = Rat::frac(1, 2);
    assert_eq!(
        mms(&additive(&[3, 2, 2, 1]), 2).unwrap().0,
        Rat::from_int(4)
    );
    assert_eq!(aps(&additive(&[1]), &half).unwrap().0, Rat::zero());
    assert_eq!(mes(&additive(&[1]), &half).unwrap().0, half);
    assert_eq!(
        aps(&additive(&[1, 1, 1]), &Rat::frac(1, 3)).unwrap().0,
        Rat::one()
    );
    assert_eq!(aps_via_clp(&additive(&[1, 1, 1]), 3).unwrap(), Rat::one());
    assert_eq!(mes(&additive(&[2, 4]), &half).unwrap().0, Rat::from_int(3));

    // T = 4, so each unit item already reaches T/3n = 2/3 and is cut out
    // alone; both bundles clear T/6n = 1/3
    let v = additive(&[1, 1, 1, 1]);
    let parts = approx_mms_partition_subadditive(&v, 2).unwrap();
    assert_eq!(
        parts,
        vec![Bundle::singleton(0), Bundle::from_items([1, 2, 3])]
    );
    assert!(parts.iter().all(|p| v.value(*p) >= Rat::frac(1, 3)));
    let parts = approx_mms_partition_subadditive(&additive(&[9, 1, 1, 1]), 2).unwrap();
    assert!(parts.contains(&Bundle::singleton(0)));
}

#[test]
fn partitions_are_fractional_partitions() {
    let v = additive(&[1, 2, 3, 4, 5]);
    let parts = [
        Bundle::from_items([0, 4]),
        Bundle::from_items([1, 3]),
        Bundle::from_items([2]),
    ];
    let fp = FractionalPartition::from_partition(&parts);
    let check = check_fractional_partition(&fp, &v);
    assert!(check.valid);
    assert_eq!(check.min_value, Rat::from_int(3));
}
