use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tdirac_core::clifford::*;
use tdirac_core::{Cx, FiberEndo, Scalar, Surd};

fn cx(re: i64, im: i64) -> Cx {
    Cx::new(Surd::from_int(re), Surd::from_int(im))
}

fn multivector(q: usize) -> impl Strategy<Value = Multivector> {
    prop::collection::vec((-3i64..=3, -3i64..=3), 1 << q)
        .prop_map(move |v| Multivector::from_coeffs(q, v.into_iter().map(|(a, b)| cx(a, b)).collect()).unwrap())
}

fn homogeneous(q: usize, k: usize) -> impl Strategy<Value = Multivector> {
    multivector(q).prop_map(move |m| m.grade(k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_is_associative(a in multivector(4), b in multivector(4), c in multivector(4)) {
        let (a, b, c) = (quantize(&a), quantize(&b), quantize(&c));
        let left = clifford_mul(&clifford_mul(&a, &b).unwrap(), &c).unwrap();
        let right = clifford_mul(&a, &clifford_mul(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn unit_law(a in multivector(4)) {
        let a = quantize(&a);
        let one = CliffordElement::scalar(4, Cx::one()).unwrap();
        prop_assert_eq!(clifford_mul(&one, &a).unwrap(), a.clone());
        prop_assert_eq!(clifford_mul(&a, &one).unwrap(), a);
    }

    #[test]
    fn grading_is_multiplicative(a in homogeneous(4, 1), b in homogeneous(4, 2), c in homogeneous(4, 3)) {
        let p = clifford_mul(&quantize(&a), &quantize(&b)).unwrap();
        prop_assert!(p.parity() == Some(true) || symbol(&p).is_zero());
        let p = clifford_mul(&quantize(&a), &quantize(&c)).unwrap();
        prop_assert!(p.parity() == Some(false) || symbol(&p).is_zero());
    }

    #[test]
    fn filtration_top_degree(r in 0usize..=2, s in 0usize..=2, a in multivector(4), b in multivector(4)) {
        let (a, b) = (a.grade(r), b.grade(s));
        let prod = symbol(&clifford_mul(&quantize(&a), &quantize(&b)).unwrap());
        prop_assert_eq!(prod.grade(r + s), a.wedge(&b).unwrap());
        for k in r + s + 1..=4 {
            prop_assert!(prod.grade(k).is_zero());
        }
    }

    #[test]
    fn lambda_action_anticommutes(w in multivector(4), i in 1usize..=4, j in 1usize..=4) {
        let ij = lambda_action(i, &lambda_action(j, &w).unwrap()).unwrap();
        let ji = lambda_action(j, &lambda_action(i, &w).unwrap()).unwrap();
        let sum = ij.add(&ji).unwrap();
        let expect = if i == j { w.scale(&cx(-2, 0)) } else { Multivector::zero(4).unwrap() };
        prop_assert_eq!(sum, expect);
    }

    #[test]
    fn symbol_of_vector_product(v in homogeneous(4, 1), w in multivector(4)) {
        // σ(𝐜(v)𝐜(ω)) = c(v)ω
        let lhs = symbol(&clifford_mul(&quantize(&v), &quantize(&w)).unwrap());
        let mut rhs = Multivector::zero(4).unwrap();
        for a in 1..=4 {
            let coeff = v.coeff(1 << (a - 1)).clone();
            rhs = rhs.add(&lambda_action(a, &w).unwrap().scale(&coeff)).unwrap();
        }
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spinor_relations_for_orthonormal_pairs(seed in any::<u64>(), q in prop::sample::select(vec![2usize, 4, 6])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, j) = random_compatible_pair(q, &mut rng).unwrap();
        let o = random_orthogonal(q, &mut rng);
        let f = o.column(0);
        let g = o.column(q - 1);
        let cf = spinor_action(&f, &j).unwrap();
        let cg = spinor_action(&g, &j).unwrap();
        let d = j.fiber().dim();
        prop_assert_eq!(cf.mul(&cf), FiberEndo::scalar(d, cx(-1, 0)));
        prop_assert!(cf.anticommutator(&cg).is_zero());
        prop_assert!(cf.is_skew_hermitian());
        let grading = j.fiber().grading::<Cx>(1);
        prop_assert_eq!(grading.mul(&cf), cf.mul(&grading).neg());
    }

    #[test]
    fn two_form_action_is_even_and_hermitian(seed in any::<u64>(), q in prop::sample::select(vec![2usize, 4, 6]), r in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (b, j) = random_compatible_pair(q, &mut rng).unwrap();
        let a = two_form_action(&b, &j, r).unwrap();
        let g = j.fiber().grading::<Cx>(r);
        prop_assert!(a.is_hermitian());
        prop_assert_eq!(g.mul(&a), a.mul(&g));
    }

    #[test]
    fn invariants_are_orthogonally_invariant(seed in any::<u64>(), q in prop::sample::select(vec![2usize, 4, 6])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (b, _) = random_compatible_pair(q, &mut rng).unwrap();
        let o = random_orthogonal(q, &mut rng);
        prop_assert_eq!(skew_invariants(&b).unwrap(), skew_invariants(&b.conjugate_by(&o)).unwrap());
    }

    #[test]
    fn rl1_and_odd_bound_hold(seed in any::<u64>(), q in prop::sample::select(vec![2usize, 4, 6])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (b, j) = random_compatible_pair(q, &mut rng).unwrap();
        prop_assert!(check_rl1(&b, &j).unwrap().exact_zero);
        let bound = odd_lower_bound(&b, &j, 1).unwrap();
        prop_assert!(!bound.margin.is_negative());
        // cross-check the certified eigenvalue against floating point
        let crl = two_form_action(&b, &j, 1).unwrap();
        let odd = crl.restrict(&j.fiber().sector(true, 1));
        let ev = fiber_eigenvalues(&odd);
        prop_assert!((ev[0] - bound.min_eig.to_f64()).abs() < 1e-9);
    }
}

#[test]
fn battery_matches_brute_force_spectrum() {
    // every eigenvalue of c(R^L) is −λ + 2Σ_{j∈S} μ_j over subsets S
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (b, j) = random_compatible_pair(4, &mut rng).unwrap();
    let inv = skew_invariants(&b).unwrap();
    let ev = fiber_eigenvalues(&two_form_action(&b, &j, 1).unwrap());
    let mu: Vec<f64> = inv.mus.iter().map(Surd::to_f64).collect();
    let lam = inv.lambda.to_f64();
    let mut expect: Vec<f64> = (0..4usize)
        .map(|s| -lam + 2.0 * (0..2).filter(|i| s & (1 << i) != 0).map(|i| mu[i]).sum::<f64>())
        .collect();
    expect.sort_by(f64::total_cmp);
    for (a, e) in ev.iter().zip(&expect) {
        assert!((a - e).abs() < 1e-9, "{ev:?} vs {expect:?}");
    }
}
