use std::collections::HashSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use slicerank::exec::Exec;
use slicerank::fftensor::{tensor_product, Matching3, PrimeField, Tensor3};
use slicerank::groups::{crt_primary_decomposition, GroupElement, GroupSpec};
use slicerank::rates::{rate_i, rate_j, tuple_fraction_exact, RateQuery, DEFAULT_COUNT_GUARD};
use slicerank::slicerank::{slice_rank_witness, verify_slice_decomposition, OracleLimits};
use slicerank::stpp::{
    generate_random_stpp, omega_bound, packing_report, uniformize, verify_stpp, verify_stpp_with, GenerateParams,
    STPPConstruction, StppTriple, DEFAULT_DISTRIBUTION_GUARD,
};
use slicerank::sumfree::{verify_sumfree, TricoloredSumFreeSet};

fn group() -> impl Strategy<Value = GroupSpec> {
    prop::collection::vec((2u64..=12, 1u32..=2), 0..=3).prop_filter_map("order too large", |f| {
        let g = GroupSpec::new(f).ok()?;
        (g.order_usize()? <= 2000).then_some(g)
    })
}

fn group_with_elements(k: usize) -> impl Strategy<Value = (GroupSpec, Vec<GroupElement>)> {
    group().prop_flat_map(move |g| {
        let n = g.order_usize().unwrap();
        (Just(g.clone()), prop::collection::vec(0..n, k)).prop_map(|(g, ix)| {
            let els = ix.into_iter().map(|i| g.element_at(i)).collect();
            (g, els)
        })
    })
}

fn small_group() -> impl Strategy<Value = GroupSpec> {
    prop::sample::select(vec!["Z2", "Z3", "Z4", "Z2^2", "Z5", "Z6", "Z7", "Z8", "Z3^2", "Z2 x Z4", "Z10", "Z12"])
        .prop_map(|s| GroupSpec::parse(s).unwrap())
}

fn tensor(p: u64) -> impl Strategy<Value = Tensor3> {
    [1usize..=3, 1usize..=3, 1usize..=3].prop_flat_map(move |dims| {
        prop::collection::vec(0..p, dims.iter().product::<usize>()).prop_map(move |vals| {
            Tensor3::from_fn(PrimeField::new(p).unwrap(), dims, |i, j, k| vals[(i * dims[1] + j) * dims[2] + k])
        })
    })
}

fn generated(g: &GroupSpec, seed: u64) -> STPPConstruction {
    let params = GenerateParams { max_triples: 3, max_set_size: 3, attempts: 40, ..Default::default() };
    generate_random_stpp(g, &params, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn brute_sumfree(g: &GroupSpec, m: &[(GroupElement, GroupElement, GroupElement)]) -> bool {
    let distinct = |f: fn(&(GroupElement, GroupElement, GroupElement)) -> &GroupElement| {
        m.iter().map(f).collect::<HashSet<_>>().len() == m.len()
    };
    if !(distinct(|t| &t.0) && distinct(|t| &t.1) && distinct(|t| &t.2)) {
        return false;
    }
    for (i, a) in m.iter().enumerate() {
        for (j, b) in m.iter().enumerate() {
            for (k, c) in m.iter().enumerate() {
                let z = g.add(&g.add(&a.0, &b.1).unwrap(), &c.2).unwrap();
                if GroupSpec::is_zero(&z) != (i == j && j == k) {
                    return false;
                }
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_axioms((g, x) in group_with_elements(3)) {
        let (a, b, c) = (&x[0], &x[1], &x[2]);
        prop_assert_eq!(g.add(a, b).unwrap(), g.add(b, a).unwrap());
        prop_assert_eq!(g.add(&g.add(a, b).unwrap(), c).unwrap(), g.add(a, &g.add(b, c).unwrap()).unwrap());
        prop_assert_eq!(g.add(a, &g.zero()).unwrap(), a.clone());
        prop_assert!(GroupSpec::is_zero(&g.add(a, &g.neg(a)).unwrap()));
        prop_assert_eq!(g.element_at(g.index_of(a)), a.clone());
    }

    #[test]
    fn crt_round_trip_is_additive((g, x) in group_with_elements(2)) {
        let d = crt_primary_decomposition(&g);
        prop_assert_eq!(d.primary_group().order(), g.order());
        let (ya, yb) = (d.to_primary(&x[0]).unwrap(), d.to_primary(&x[1]).unwrap());
        prop_assert_eq!(d.from_primary(&ya).unwrap(), x[0].clone());
        let sum = d.primary_group().add(&ya, &yb).unwrap();
        prop_assert_eq!(d.from_primary(&sum).unwrap(), g.add(&x[0], &x[1]).unwrap());
    }

    #[test]
    fn power_elements_round_trip((g, x) in group_with_elements(3)) {
        let big = g.power(3);
        let joined = g.power_element(&x);
        prop_assert!(big.contains(&joined));
        prop_assert_eq!(g.split_power_element(&joined, 3), x);
    }

    #[test]
    fn tensor_product_entries(f in tensor(3), h in tensor(3)) {
        let fh = tensor_product(&f, &h).unwrap();
        let [a, b, c] = f.dims();
        let [x, y, z] = h.dims();
        prop_assert_eq!(fh.dims(), [a * x, b * y, c * z]);
        for (i, j, k, v) in f.support() {
            for (ii, jj, kk, w) in h.support() {
                prop_assert_eq!(fh.get(i * x + ii, j * y + jj, k * z + kk), (v * w) % 3);
            }
        }
        prop_assert_eq!(fh.support().len(), f.support().len() * h.support().len());
    }

    #[test]
    fn oracle_witness_reconstructs(t in tensor(2)) {
        let w = slice_rank_witness(&t, &OracleLimits::default()).unwrap();
        prop_assert!(verify_slice_decomposition(&t, &w.decomposition).unwrap());
        prop_assert_eq!(w.decomposition.size(), w.rank);
        prop_assert!(w.rank <= *t.dims().iter().min().unwrap());
    }

    #[test]
    fn sumfree_verifier_matches_brute_force((g, x) in group_with_elements(8), len in 1usize..=4) {
        let m: Vec<_> = (0..len)
            .map(|i| {
                let (s, t) = (x[2 * i].clone(), x[2 * i + 1].clone());
                let u = g.neg(&g.add(&s, &t).unwrap());
                (s, t, u)
            })
            .collect();
        let expected = brute_sumfree(&g, &m);
        let set = TricoloredSumFreeSet { group: g.clone(), matching: Matching3::new(m) };
        prop_assert_eq!(verify_sumfree(&set).map(|r| r.valid).unwrap_or(false), expected);
    }

    #[test]
    fn stpp_difference_sets_are_disjoint(g in small_group(), seed in any::<u64>()) {
        let c = generated(&g, seed);
        prop_assert!(verify_stpp(&c).unwrap().valid);
        let diffs = |x: &[GroupElement], y: &[GroupElement]| -> Vec<GroupElement> {
            x.iter().flat_map(|a| y.iter().map(|b| g.sub(a, b).unwrap())).collect()
        };
        for pick in [|t: &StppTriple| (t.a.clone(), t.b.clone()), |t: &StppTriple| (t.b.clone(), t.c.clone()), |t: &StppTriple| (t.c.clone(), t.a.clone())] {
            let mut seen = HashSet::new();
            for t in &c.triples {
                let (x, y) = pick(t);
                for d in diffs(&x, &y) {
                    prop_assert!(seen.insert(d));
                }
            }
        }
    }

    #[test]
    fn packing_exponents_at_most_one(g in small_group(), seed in any::<u64>()) {
        let c = generated(&g, seed);
        let p = packing_report(&c).unwrap();
        for e in [p.c_ab, p.c_bc, p.c_ca] {
            prop_assert!(e <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn stpp_verdict_independent_of_exec(g in small_group(), idx in prop::collection::vec(0usize..12, 3..=9)) {
        let n = g.order_usize().unwrap();
        let el = |i: usize| g.element_at(i % n);
        let triples = idx
            .chunks(3)
            .filter(|ch| ch.len() == 3)
            .map(|ch| StppTriple { a: vec![el(ch[0])], b: vec![el(ch[1])], c: vec![el(ch[2])] })
            .collect();
        let c = STPPConstruction { group: g.clone(), triples };
        prop_assert_eq!(verify_stpp_with(&c, Exec::Sequential).unwrap(), verify_stpp_with(&c, Exec::Parallel).unwrap());
    }

    #[test]
    fn omega_monotone_in_sizes(
        sizes in prop::collection::vec([1u64..=4, 1u64..=4, 1u64..=4], 1..=3),
        extra in [1u64..=4, 1u64..=4, 1u64..=4],
        order in 16u128..=64,
    ) {
        prop_assume!(sizes.iter().any(|s| s.iter().product::<u64>() >= 2));
        let base = omega_bound(&sizes, order).unwrap().omega_bound;
        let mut more = sizes.clone();
        more.push(extra);
        prop_assert!(omega_bound(&more, order).unwrap().omega_bound <= base + 1e-9);
        let mut grown = sizes.clone();
        grown[0][0] += 1;
        prop_assert!(omega_bound(&grown, order).unwrap().omega_bound <= base + 1e-9);
        prop_assert!(omega_bound(&sizes, order + 1).unwrap().omega_bound >= base - 1e-9);
        prop_assert!((2.0..=3.0).contains(&base));
    }

    #[test]
    fn uniformized_sizes_are_uniform(g in small_group(), seed in any::<u64>(), power in 1u32..=3) {
        let c = generated(&g, seed);
        let s = uniformize(&c, power, DEFAULT_DISTRIBUTION_GUARD).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let idx = s.sample_index(&mut rng);
            prop_assert!(s.is_retained(&idx));
            prop_assert_eq!(s.sizes_at(&idx), [s.size_a.clone(), s.size_b.clone(), s.size_c.clone()]);
            let [a, b, c3] = s.sample_members(&idx, &mut rng);
            prop_assert!(s.group.contains(&a) && s.group.contains(&b) && s.group.contains(&c3));
        }
        prop_assert_eq!(s.spot_check(20, &mut rng).violations, 0);
    }

    #[test]
    fn counts_below_rate_bound(m in 1u64..=6, n in 1u32..=10, num in 1i64..=5) {
        let alpha = num_rational::BigRational::new(num.into(), 12.into());
        let f = tuple_fraction_exact(m, &alpha, n, DEFAULT_COUNT_GUARD).unwrap();
        let rate = rate_i(RateQuery::new(m, num as f64 / 12.0).unwrap()).unwrap().value;
        let frac = num_traits::ToPrimitive::to_f64(&f.fraction).unwrap();
        prop_assert!(frac <= (-rate * n as f64).exp() * (1.0 + 1e-12));
    }

    #[test]
    fn j_decreasing(s in 1.01f64..200.0, ds in 0.01f64..50.0) {
        let (a, b) = (rate_j(s).unwrap().value, rate_j(s + ds).unwrap().value);
        prop_assert!(b < a && a < 1.0 && b > 0.0);
    }
}
