use fairshare::ladder::{
    check_ladder_lemmas, choose_k, compute_ladder, path_sums, payment_bound, random_y,
    verify_appendix, x_from_y, xk_path_formula, y_from_x, y_from_x_raw, Ladder, XSeq, YSeq,
};
use fairshare::model::generate::random_valuation;
use fairshare::model::ValuationClass;
use fairshare::{Bundle, Error, Rat, Valuation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ints(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| Rat::from_int(x)).collect()
}

fn fracs(v: &[(i64, i64)]) -> Vec<Rat> {
    v.iter().map(|&(a, b)| Rat::frac(a, b)).collect()
}

/// Smallest subset of `b` reaching each level `j·v(b)/k`, by enumeration.
fn ladder_oracle(v: &Valuation, b: Bundle, k: usize) -> Vec<usize> {
    let total = v.value(b);
    (1..=k)
        .map(|j| {
            let level = Rat::from(j) * &total / Rat::from(k);
            b.subsets()
                .filter(|s| v.value(*s) >= level)
                .map(|s| s.len())
                .min()
                .unwrap()
        })
        .collect()
}

/// Sum of `Π y` over increasing vertex sequences in `1..=n` with gaps of
/// at least 2, grouped by edge count, found by depth-first search.
fn path_oracle(y: &[Rat], n: usize) -> Vec<Rat> {
    fn walk(y: &[Rat], n: usize, last: usize, edges: usize, prod: Rat, out: &mut Vec<Rat>) {
        if out.len() <= edges {
            out.resize(edges + 1, Rat::zero());
        }
        out[edges] += &prod;
        for next in last + 2..=n {
            walk(y, n, next, edges + 1, &prod * &y[next - 1], out);
        }
    }
    let mut out = Vec::new();
    for start in 1..=n {
        walk(y, n, start, 0, y[start - 1].clone(), &mut out);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ladders_match_enumeration(seed in any::<u64>(), m in 1usize..7, mask in any::<u64>(), k in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_valuation(&mut rng, ValuationClass::Subadditive, m, 6).unwrap();
        let b = Bundle::from_mask(mask).intersection(Bundle::full(m));
        match compute_ladder(&v, b, k) {
            Ok(l) => prop_assert_eq!(l.entries(), &ladder_oracle(&v, b, k)[..]),
            Err(Error::InvalidInput(_)) => prop_assert!(v.value(b).is_zero()),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn subadditive_ladders_satisfy_their_lemmas(seed in any::<u64>(), m in 1usize..7, k in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_valuation(&mut rng, ValuationClass::Subadditive, m, 6).unwrap();
        let l = check_ladder_lemmas(&v, Bundle::full(m), k).unwrap();
        let h = |j: usize| l.at(j as isize) as i64 - 1;
        for i in 1..=k {
            for j in 1..=k - i {
                prop_assert!(h(i) + h(j) <= h(i + j));
            }
        }
        let fits = (m as u64) <= ((k - 1) as u64).pow(k as u32 - 1);
        if fits {
            prop_assert!(payment_bound(&l, &Rat::one()) >= Rat::one());
        }
    }

    #[test]
    fn path_sums_match_enumeration(seed in any::<u64>(), k in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = random_y(&mut rng, k);
        for n in 1..=k {
            let mut want = path_oracle(y.values(), n);
            while want.len() > 1 && want.last().is_some_and(Rat::is_zero) {
                want.pop();
            }
            prop_assert_eq!(path_sums(&y, n), want);
        }
        let x = x_from_y(&y);
        prop_assert_eq!(xk_path_formula(&y).unwrap(), x.at(k as isize));
    }

    #[test]
    fn appendix_identities_hold(seed in any::<u64>(), k in 2usize..11) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = random_y(&mut rng, k);
        let rep = verify_appendix(&y).unwrap();
        prop_assert_eq!(&rep.x_recurrence, &rep.x_path);
        let floor = Rat::from(k - 1).pow(k as u32 - 1);
        prop_assert!(rep.x_recurrence > floor);
    }
}

#[test]
fn round_trips_between_x_and_y() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let mut checked = 0;
    for k in (1..=10).cycle().take(500) {
        let y = random_y(&mut rng, k);
        let x = x_from_y(&y);
        assert_eq!(y_from_x_raw(&x).unwrap(), y.values());
        if x.hypothesis_violation().is_none() {
            let back = y_from_x(&x).unwrap();
            assert_eq!(x_from_y(&back), x);
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn ladder_examples() {
    let v = Valuation::additive(ints(&[3, 3, 3])).unwrap();
    assert_eq!(
        compute_ladder(&v, Bundle::full(3), 3).unwrap().entries(),
        &[1, 2, 3]
    );
    let v = Valuation::additive(ints(&[6, 6, 3, 3, 1, 1, 1])).unwrap();
    assert_eq!(
        compute_ladder(&v, Bundle::full(7), 3).unwrap().entries(),
        &[2, 3, 7]
    );
    let l = Ladder::new(vec![1, 2, 3]).unwrap();
    assert_eq!(payment_bound(&l, &Rat::one()), Rat::frac(4, 3));
    assert_eq!(payment_bound(&l, &Rat::frac(1, 2)), Rat::frac(2, 3));
}

#[test]
fn choice_of_k() {
    assert_eq!(choose_k(3000, None), 6);
    assert_eq!(choose_k(300_000_000, None), 10);
    assert_eq!(choose_k(1, None), 2);
    // a larger entitlement shrinks the needed k
    assert!(choose_k(3000, Some(&Rat::frac(1, 2))) < 6);
}

#[test]
fn sequence_examples() {
    let y = YSeq::new(fracs(&[(1, 3), (1, 3)])).unwrap();
    assert_eq!(x_from_y(&y).values(), &ints(&[3, 6])[..]);
    let y = YSeq::new(vec![Rat::frac(1, 8); 4]).unwrap();
    assert_eq!(x_from_y(&y).values(), &ints(&[8, 56, 384, 2624])[..]);
    assert_eq!(xk_path_formula(&y).unwrap(), Rat::from_int(2624));

    let x = XSeq::new(ints(&[3, 6])).unwrap();
    assert_eq!(
        y_from_x(&x).unwrap().values(),
        &fracs(&[(1, 3), (1, 3)])[..]
    );
    // x_1 = 1 makes y_1 = 1 on its own
    let x = XSeq::new(ints(&[1, 4])).unwrap();
    assert!(matches!(y_from_x(&x), Err(Error::HypothesisViolated(_))));
}

#[test]
fn short_path_formulas() {
    let (a, b, c) = (Rat::frac(1, 5), Rat::frac(2, 7), Rat::frac(1, 4));
    let y = YSeq::new(vec![a.clone(), b.clone()]).unwrap();
    let want = (Rat::one() - &a) / (&a * &b);
    assert_eq!(xk_path_formula(&y).unwrap(), want);
    let y = YSeq::new(vec![a.clone(), b.clone(), c.clone()]).unwrap();
    let want = (Rat::one() - &a - &b) / (&a * &b * &c);
    assert_eq!(xk_path_formula(&y).unwrap(), want);
    assert_eq!(xk_path_formula(&y).unwrap(), x_from_y(&y).at(3));
}
