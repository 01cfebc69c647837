use proptest::prelude::*;

use rlab::coding::*;
use rlab::ips::{encode, eval, parse_program, FnOracle, Outcome};
use rlab::re_sets::{finset_to_windex, w_mem};
use rlab::verify::random_oracle_program;

/// Nested pairs wide enough to stay lazy.
fn deep(n: u32) -> Nat {
    let mut x = Nat::from(7u64);
    for i in 0..n {
        x = Nat::pair(&x, &Nat::from(u64::from(i)));
    }
    x
}

proptest! {
    #[test]
    fn pair_roundtrip(x in any::<u32>(), y in any::<u32>()) {
        let (x, y) = (u64::from(x), u64::from(y));
        let p = Nat::pair(&Nat::from(x), &Nat::from(y));
        prop_assert_eq!(p.unpair(), (Nat::from(x), Nat::from(y)));
        // against T(x + y) + y in plain integers
        let s = u128::from(x + y);
        prop_assert_eq!(p.to_biguint(), num_bigint::BigUint::from(s * (s + 1) / 2 + u128::from(y)));
    }

    #[test]
    fn list_roundtrip(xs in proptest::collection::vec(0u64..1000, 0..8)) {
        let v: Vec<Nat> = xs.iter().map(|&x| Nat::from(x)).collect();
        prop_assert_eq!(list_decode(&list_encode(&v)).unwrap(), v);
    }

    #[test]
    fn finset_roundtrip(xs in proptest::collection::btree_set(0u64..200, 0..10)) {
        let s = FinSet::from_iter(xs.iter().copied());
        prop_assert_eq!(finset_decode(&finset_encode(&s)), s);
    }

    #[test]
    fn blocks_partition(n in 0u64..100_000) {
        let e = block_of(n);
        prop_assert!(block(e).contains(n));
        prop_assert_eq!(block(e).len() as u64, e + 2);
    }

    #[test]
    fn lazy_succ_pred(depth in 10u32..14, k in 0u64..40) {
        let mut x = deep(depth);
        let start = x.clone();
        for _ in 0..k {
            x = x.succ();
        }
        prop_assert_eq!(x.materialize().to_biguint(), start.to_biguint() + k);
        for _ in 0..k {
            x = x.pred();
        }
        prop_assert_eq!(x, start);
    }

    #[test]
    fn fuel_monotone(seed in any::<u64>(), a in 0u64..20, fuel in 1u64..400) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let p = encode(&random_oracle_program(&mut rng, 3));
        let o = FinSet::from_iter([1, 4, 9, 16]);
        let args = [Nat::from(a), Nat::from(a + 1)];
        if let Outcome::Converged { value, .. } = eval(&p, &args, Some(&o), fuel) {
            prop_assert_eq!(eval(&p, &args, Some(&o), fuel * 2).value().cloned(), Some(value));
        }
    }

    #[test]
    fn oracle_use_sound(seed in any::<u64>(), a in 0u64..30, bits in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let p = encode(&random_oracle_program(&mut rng, 4));
        let args = [Nat::from(a), Nat::from(a / 2)];
        let base = move |x: &Nat| x.to_u64().is_some_and(|x| x < 64 && bits >> x & 1 == 1);
        let first = eval(&p, &args, Some(&FnOracle(base)), 10_000);
        if let Outcome::Converged { use_, .. } = &first {
            let u = use_.clone();
            let flipped = FnOracle(move |x: &Nat| if *x < u { base(x) } else { !base(x) });
            prop_assert_eq!(eval(&p, &args, Some(&flipped), 10_000), first);
        }
    }

    #[test]
    fn windex_agrees(xs in proptest::collection::btree_set(0u64..30, 0..6)) {
        let d = FinSet::from_iter(xs.iter().copied());
        let w = finset_to_windex(&d);
        for x in 0..35u64 {
            prop_assert_eq!(w_mem(&w, &Nat::from(x), 100_000), d.contains(x));
        }
    }

    #[test]
    fn sexpr_roundtrip(k in 1u64..6, c in 0u64..1000) {
        let i = k.div_ceil(2);
        let src = format!("(comp (const {c}) (proj {k} {i}) (succ))");
        let p = parse_program(&src).unwrap();
        prop_assert_eq!(eval(&encode(&p), &[], None, 100).value().cloned(), Some(Nat::from(c)));
    }
}
