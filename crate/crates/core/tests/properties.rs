use kernel_extend::extension::{convolve_sequences, q_range, rescale_function, Upper};
use kernel_extend::function::{
    extend, fejer_regularize, periodization_sup, DecayRule, ClosedForm, Expr, FunctionSpec, GridConfig, SequenceSpec,
};
use kernel_extend::io;
use kernel_extend::measure::{transfer, TorusAtom, TorusMeasure};
use kernel_extend::norms::fiber_norms;
use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn finite_sequence() -> impl Strategy<Value = SequenceSpec> {
    proptest::collection::btree_map(-12i64..=12, complex(), 0..8)
        .prop_map(|entries| SequenceSpec::finite(entries, None).unwrap())
}

fn kernel() -> impl Strategy<Value = FunctionSpec> {
    prop_oneof![
        (0.2..2.0f64).prop_map(|h| FunctionSpec::from(Expr::triangle(0.0, h))),
        (0.3..2.0f64).prop_map(|s| FunctionSpec::from(Expr::gaussian(s))),
        (0.2..1.5f64).prop_map(|h| FunctionSpec::from(Expr::raised_cosine(-h, h))),
        (0.3..1.0f64).prop_map(|h| FunctionSpec::from(Expr::raised_cosine_ft(h))),
        (0.5..1.5f64).prop_map(|w| FunctionSpec::from(Expr::sinc_squared(w))),
    ]
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-3.0..3.0f64, 0.0..2.0f64).prop_map(|(a, w)| Expr::indicator(a, a + w)),
        (-2.0..2.0f64, 0.1..2.0f64).prop_map(|(c, h)| Expr::triangle(c, h)),
        (0.1..3.0f64).prop_map(Expr::gaussian),
        (-2.0..2.0f64, 0.1..2.0f64).prop_map(|(a, w)| Expr::raised_cosine(a, a + w)),
        (proptest::collection::vec(-2.0..2.0f64, 0..4), -1.0..1.0f64, 0.0..1.5f64)
            .prop_map(|(c, a, w)| Expr::poly_piece(c, a, a + w)),
        (0.1..3.0f64).prop_map(Expr::sinc),
        (0.5..4.0f64).prop_map(Expr::rational_decay),
        (-2.0..2.0f64).prop_map(Expr::constant),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), -2.0..2.0f64).prop_map(|(e, s)| e.translate(s)),
            (inner.clone(), -2.0..2.0f64).prop_map(|(e, f)| e.modulate(f)),
            (inner.clone(), 0.25..3.0f64).prop_map(|(e, a)| e.dilate(a)),
            (inner.clone(), complex()).prop_map(|(e, c)| e.scale(c)),
            proptest::collection::vec(inner.clone(), 1..3).prop_map(Expr::Sum),
            proptest::collection::vec(inner.clone(), 1..3).prop_map(Expr::Product),
            inner.prop_map(Expr::periodic),
        ]
    })
}

fn grid() -> GridConfig {
    GridConfig {
        halfwidth: 4.0,
        ..GridConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn extend_is_linear(phi in finite_sequence(), psi in finite_sequence(), a in complex(), b in complex(), k in kernel()) {
        let g = grid();
        let combo = phi.linear_combination(a, &psi, b).unwrap();
        let w = extend(&combo, &k, &g).unwrap();
        let wp = extend(&phi, &k, &g).unwrap();
        let wq = extend(&psi, &k, &g).unwrap();
        for ((x, y), z) in w.values.iter().zip(&wp.values).zip(&wq.values) {
            prop_assert!((x - (a * y + b * z)).norm() < 1e-11);
        }
    }

    #[test]
    fn extension_bounded_by_periodization(phi in finite_sequence(), k in kernel()) {
        let g = grid();
        let w = extend(&phi, &k, &g).unwrap();
        let per = periodization_sup(&k, &g).unwrap();
        let bound = per.certified() * phi.sup_norm() + w.tail_bound.unwrap_or(0.0) + 1e-12;
        prop_assert!(w.max_abs() <= bound, "{} > {}", w.max_abs(), bound);
    }

    #[test]
    fn function_spec_round_trip(e in expr()) {
        let f = FunctionSpec::new(e).unwrap();
        let text = io::function_to_json(&f);
        let back = io::parse_function_spec(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(io::function_to_json(&back), text);
    }

    #[test]
    fn sequence_round_trip(phi in finite_sequence(), ratio in 0.05..0.95f64, scale in complex(), abel in 0.1..1.0f64) {
        let text = io::sequence_to_json(&phi);
        prop_assert_eq!(io::parse_sequence_spec(&text).unwrap(), phi.clone());
        let form = ClosedForm { rule: DecayRule::Geometric { ratio }, scale, phase: 0.3, abel };
        let closed = SequenceSpec::closed_with_corrections(form, phi.entries().clone()).unwrap();
        prop_assert_eq!(io::parse_sequence_spec(&io::sequence_to_json(&closed)).unwrap(), closed);
    }

    #[test]
    fn measure_round_trip(atoms in proptest::collection::vec((0.0..1.0f64, complex()), 0..5)) {
        let atoms = atoms.into_iter().map(|(x, weight)| TorusAtom { x, weight }).collect();
        let m = TorusMeasure::new(atoms, Some(FunctionSpec::from(Expr::constant(1.0)))).unwrap();
        prop_assert_eq!(io::parse_measure_spec(&io::measure_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn q_range_endpoints_conjugate(num in 101i64..2000, den in 1i64..100) {
        let p = Rational64::new(num, den);
        prop_assume!(p > Rational64::from_integer(1) && p != Rational64::from_integer(2));
        let q = q_range(p).unwrap();
        prop_assert_eq!(q.conjugate_sum(), Some(Rational64::from_integer(1)));
        prop_assert!(q.contains(Rational64::from_integer(2)));
        // p and its conjugate share the range.
        let pc = p / (p - Rational64::from_integer(1));
        prop_assert_eq!(q_range(pc).unwrap().lo, q.lo);
        prop_assert_eq!(q_range(pc).unwrap().hi, q.hi);
        if let Upper::Closed(h) = q.hi {
            prop_assert!(q.lo <= h);
        }
    }

    #[test]
    fn integer_rescale_keeps_periodization(k in kernel(), alpha in prop_oneof![Just(-3.0), Just(-1.0), Just(2.0), Just(3.0)]) {
        let g = grid();
        let base = periodization_sup(&k, &g).unwrap();
        let scaled = periodization_sup(&rescale_function(&k, alpha).unwrap(), &g).unwrap();
        prop_assert!(scaled.delta <= base.certified() + 1e-12);
    }

    #[test]
    fn fejer_stays_below_phi(phi in finite_sequence(), n in 1u64..20) {
        let f = fejer_regularize(&phi, n).unwrap();
        prop_assert!(f.support_radius().unwrap() <= n);
        for k in -25i64..=25 {
            prop_assert!(f.value(k).norm() <= phi.value(k).norm());
        }
    }

    #[test]
    fn convolving_with_delta_is_identity(b in finite_sequence(), r in 1.05..2.0f64) {
        let (c, rep) = convolve_sequences(&SequenceSpec::delta(), &b, r).unwrap();
        prop_assert_eq!(c.support(), b.support());
        prop_assert!(rep.sup_c <= rep.holder_bound + 1e-12);
    }

    #[test]
    fn transfer_is_linear(x1 in 0.0..1.0f64, x2 in 0.0..1.0f64, a in complex(), b in complex()) {
        let g = grid();
        let lambda = FunctionSpec::from(Expr::raised_cosine_ft(1.0));
        let one = Complex64::new(1.0, 0.0);
        let n1 = TorusMeasure::atoms_only(vec![TorusAtom { x: x1, weight: one }]).unwrap();
        let n2 = TorusMeasure::atoms_only(vec![TorusAtom { x: x2, weight: one }]).unwrap();
        let mixed = transfer(&n1.linear_combination(a, &n2, b).unwrap(), &lambda, &g).unwrap();
        let separate = transfer(&n1, &lambda, &g).unwrap().linear_combination(a, &transfer(&n2, &lambda, &g).unwrap(), b);
        for atom in mixed.atoms.iter().chain(&separate.atoms) {
            prop_assert!((mixed.atom_at(atom.y) - separate.atom_at(atom.y)).norm() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn fiber_sup_below_periodization(k in kernel()) {
        let g = GridConfig::default();
        let report = fiber_norms(&k, 2.0, &g, 42).unwrap();
        let per = periodization_sup(&k, &g).unwrap();
        let fiber = report.get("fiber_sup").unwrap();
        prop_assert!(fiber <= per.certified() + report.get("tail_bound").unwrap() + 1e-9, "{} vs {}", fiber, per.certified());
    }
}
