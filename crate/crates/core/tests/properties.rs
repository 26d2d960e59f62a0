use gsdyn_core::conjugate::{gevrey_conjugate, log_weight_factor};
use gsdyn_core::jets::{compose_jet, compose_jet_partition, iterate_jet, polynomial_jet, Jet};
use gsdyn_core::polynomials::{conjugate_by, fixed_points, int, iterate, normal_form_degree1, rat, to_f64, AffineMap, Rational};
use gsdyn_core::seminorms::{attainment_matrix, eval_seminorm, SearchSpec, SeminormSpec};
use gsdyn_core::weights::{check_condition, Condition, GridSpec};
use gsdyn_core::{ConjugateMethod, FunctionModel, Polynomial, Weight, YoungConjugate};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn poly(max_deg: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(small_rational(), 1..=max_deg + 1).prop_map(Polynomial::new)
}

fn exact_jet(center: Rational, order: usize) -> impl Strategy<Value = Jet> {
    prop::collection::vec(small_rational(), order).prop_map(move |mut v| {
        v.insert(0, center.clone());
        Jet::from_exact(to_f64(&center), v)
    })
}

fn weight() -> impl Strategy<Value = Weight> {
    prop_oneof![
        (1.2f64..5.0).prop_map(Weight::gevrey),
        (1.1f64..3.0).prop_map(Weight::log_power),
        ((1.2f64..3.0), (1.0f64..3.0)).prop_map(|(d, a)| Weight::root(Weight::gevrey(d), a)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weights_are_monotone(w in weight()) {
        let grid = gsdyn_core::numeric::log_space(1e-6, 1e12, 400);
        let vals: Vec<f64> = grid.iter().map(|&t| w.eval(t).unwrap()).collect();
        prop_assert!(vals.windows(2).all(|p| p[1] >= p[0]));
    }

    #[test]
    fn root_of_gevrey_is_gevrey(d in 1.1f64..6.0, a in 1.0f64..4.0) {
        let r = Weight::root(Weight::gevrey(d), a);
        let g = Weight::gevrey(d * a);
        for t in gsdyn_core::numeric::log_space(1e-8, 1e40, 1000) {
            let (x, y) = (r.eval(t).unwrap(), g.eval(t).unwrap());
            prop_assert!((x - y).abs() <= 1e-12 * y.abs());
        }
    }

    #[test]
    fn conjugate_is_convex(w in weight()) {
        let yc = YoungConjugate::auto(&w);
        let xs = gsdyn_core::numeric::lin_space(0.05, 20.0, 100);
        let v: Vec<f64> = xs.iter().map(|&x| yc.eval(x).unwrap()).collect();
        for k in 1..v.len() - 1 {
            prop_assert!(v[k + 1] - 2.0 * v[k] + v[k - 1] >= -1e-9, "k = {}", k);
        }
    }

    #[test]
    fn conjugate_ratio_grows_past_knee(d in 1.2f64..6.0) {
        let xs = gsdyn_core::numeric::log_space(1.0 / d, 1e3, 200);
        let r: Vec<f64> = xs.iter().map(|&x| gevrey_conjugate(d, x) / x).collect();
        prop_assert!(r.windows(2).all(|p| p[1] >= p[0] - 1e-12));
    }

    #[test]
    fn weight_factor_decreases_past_knee(d in 1.2f64..5.0, lambda in 0.2f64..4.0) {
        let w = Weight::gevrey(d);
        let knee = (lambda * std::f64::consts::E / d).ceil() as usize;
        let v: Vec<f64> = (knee..knee + 60).map(|n| log_weight_factor(&w, lambda, n).unwrap().log_value).collect();
        prop_assert!(v.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn closed_and_numeric_conjugates_agree(d in 1.2f64..5.0, x in 0.05f64..50.0) {
        let closed = gevrey_conjugate(d, x);
        let num = YoungConjugate::new(Weight::gevrey(d), ConjugateMethod::DEFAULT_NUMERIC).unwrap().eval(x).unwrap();
        prop_assert!((closed - num).abs() <= 1e-8 * closed.abs().max(1.0));
    }

    #[test]
    fn iterate_is_associative(p in poly(2), m1 in 1usize..=3, m2 in 1usize..=3) {
        let lhs = iterate(&p, m1 + m2).unwrap();
        let rhs = iterate(&p, m1).unwrap().compose(&iterate(&p, m2).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fixed_points_are_certified(p in poly(4)) {
        prop_assume!(p.degree() >= 2 || !p.is_identity());
        prop_assume!(p.degree() >= 1);
        let g = p.sub(&Polynomial::x());
        for fp in fixed_points(&p).unwrap().points() {
            match &fp.exact {
                Some(x) => prop_assert!(g.eval(x).is_zero()),
                None => {
                    let (a, b) = (g.eval(&fp.lo), g.eval(&fp.hi));
                    prop_assert!(a.signum() * b.signum() < Rational::zero() || a.is_zero() || b.is_zero());
                }
            }
        }
    }

    #[test]
    fn normal_form_round_trip(a in small_rational(), b in small_rational()) {
        prop_assume!(!a.is_zero());
        let psi = Polynomial::new(vec![b, a]);
        let (form, l) = normal_form_degree1(&psi).unwrap();
        prop_assert_eq!(conjugate_by(&form.polynomial(), &l), psi);
    }

    #[test]
    fn chain_rule_at_fixed_points(c in -3i64..=3, m in 1usize..=4) {
        // x² + c·x − c·x0 − x0² + x0 has x0 = 1 as a fixed point
        let x0 = int(1);
        let psi = Polynomial::new(vec![int(-c), int(c), int(1)]);
        prop_assume!(psi.eval(&x0) == x0);
        let dm = iterate(&psi, m).unwrap().derivative().eval(&x0);
        let d1 = psi.derivative().eval(&x0);
        prop_assert_eq!(dm.clone(), num_traits::pow(d1, m));
        let jet = iterate_jet(&psi, &x0, m, 1).unwrap();
        prop_assert_eq!(jet.exact_entry(1).unwrap(), &dm);
    }

    #[test]
    fn composition_paths_agree(f in exact_jet(int(0), 12), g in poly(4), x0 in small_rational()) {
        prop_assume!(!g.is_zero());
        let y = g.eval(&x0);
        let f = Jet::from_exact(to_f64(&y), {
            let mut v = f.exact.clone().unwrap();
            v[0] = y.clone();
            v
        });
        let gj = polynomial_jet(&g, &x0, 12);
        let a = compose_jet(&f, &gj, 12).unwrap();
        let b = compose_jet_partition(&f, &gj, 12).unwrap();
        prop_assert_eq!(&a.exact, &b.exact);
        let fl = Jet::from_log(f.center, (0..=12).map(|n| f.entry(n)).collect());
        let gl = Jet::from_log(gj.center, (0..=12).map(|n| gj.entry(n)).collect());
        let c = compose_jet(&fl, &gl, 12).unwrap();
        let d = compose_jet_partition(&fl, &gl, 12).unwrap();
        for n in 0..=12 {
            let e = a.entry(n);
            for v in [c.entry(n), d.entry(n)] {
                if e.is_zero() {
                    prop_assert!(v.is_zero() || v.log_mag < a.entries.iter().map(|x| x.log_mag).fold(f64::NEG_INFINITY, f64::max) - 20.0);
                } else {
                    prop_assert_eq!(v.sign, e.sign);
                    prop_assert!((v.log_mag - e.log_mag).abs() <= 1e-9 * e.log_mag.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn composition_is_associative(g in poly(3), h in poly(3), x0 in small_rational(), tail in exact_jet(int(0), 10)) {
        let y = h.eval(&x0);
        let z = g.eval(&y);
        let mut fv = tail.exact.clone().unwrap();
        fv[0] = g.eval(&z);
        let f = Jet::from_exact(to_f64(&z), fv);
        let gj = polynomial_jet(&g, &y, 10);
        let hj = polynomial_jet(&h, &x0, 10);
        let lhs = compose_jet(&compose_jet(&f, &gj, 10).unwrap(), &hj, 10).unwrap();
        let rhs = compose_jet(&f, &compose_jet(&gj, &hj, 10).unwrap(), 10).unwrap();
        prop_assert_eq!(lhs.exact, rhs.exact);
    }

    #[test]
    fn single_entry_jet_at_fixed_point(j in 1usize..=8, v in small_rational(), c in -3i64..=3) {
        let x0 = int(1);
        let psi = Polynomial::new(vec![int(-c), int(c), int(1)]);
        let mut entries = vec![Rational::zero(); j + 1];
        entries[0] = Rational::zero();
        entries[j] = v.clone();
        let f = Jet::from_exact(1.0, entries);
        let out = compose_jet(&f, &polynomial_jet(&psi, &x0, j), j).unwrap();
        let d1 = psi.derivative().eval(&x0);
        prop_assert_eq!(out.exact_entry(j).unwrap().clone(), v * num_traits::pow(d1, j));
    }

    #[test]
    fn prescribed_jets_are_homogeneous(num in 1i64..=50, den in 1i64..=7, e1 in -5i64..=5, e3 in -5i64..=5) {
        prop_assume!(e1 != 0 || e3 != 0);
        let c = rat(num, den);
        let mk = |s: &Rational| FunctionModel::PrescribedJet {
            center: 0.5,
            entries: vec![(0, s * int(1)), (1, s * int(e1)), (3, s * int(e3))],
        };
        let spec = SeminormSpec::plain_p(Weight::gevrey(2.0), 1.0).unwrap();
        let search = SearchSpec::at_point(0.5, 8);
        let a = eval_seminorm(&mk(&Rational::one()), &spec, &search).unwrap();
        let b = eval_seminorm(&mk(&c), &spec, &search).unwrap();
        prop_assert!((b.log_value - a.log_value - to_f64(&c).ln()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn scaling_covariance_of_attainments(rho in 0.4f64..3.0) {
        let f = FunctionModel::gaussian(1.0);
        let g = FunctionModel::scaled(f.clone(), rho);
        let spec = SeminormSpec::plain_p(Weight::gevrey(2.0), 1.0).unwrap();
        let search = SearchSpec::default();
        let a = attainment_matrix(&f, &spec, 12, &search).unwrap();
        let b = attainment_matrix(&g, &spec, 12, &search).unwrap();
        for j in 0..=12usize {
            for q in 0..=12 - j {
                let want = a.log_a(j, q) + (j as f64 - q as f64) * rho.ln();
                prop_assert!((b.log_a(j, q) - want).abs() < 1e-8 * want.abs().max(1.0), "({}, {})", j, q);
            }
        }
    }
}

#[test]
fn condition_checks_are_deterministic() {
    let grid = GridSpec::default();
    for w in [Weight::gevrey(2.0), Weight::log_power(2.0)] {
        for c in Condition::WEIGHT_CONDITIONS {
            let a = check_condition(&w, c, &grid).unwrap();
            let b = check_condition(&w, c, &grid).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn condition_matrix_matches_examples() {
    let grid = GridSpec::default();
    let gevrey = Weight::gevrey(2.0);
    for c in [Condition::Alpha, Condition::Beta, Condition::Gamma, Condition::Delta, Condition::Epsilon, Condition::Zeta, Condition::SubAdditive] {
        assert!(check_condition(&gevrey, c, &grid).unwrap().holds(), "{c:?}");
    }
    assert!(!check_condition(&gevrey, Condition::LogCond, &grid).unwrap().holds());
    let lp = Weight::log_power(2.0);
    for c in [Condition::Alpha, Condition::Beta, Condition::Gamma, Condition::Delta, Condition::Epsilon, Condition::LogCond] {
        assert!(check_condition(&lp, c, &grid).unwrap().holds(), "{c:?}");
    }
    assert!(!check_condition(&lp, Condition::Zeta, &grid).unwrap().holds());
}

#[test]
fn reflection_is_isometric() {
    let f = FunctionModel::shifted(FunctionModel::gaussian(1.3), 0.4);
    let g = FunctionModel::scaled(f.clone(), -1.0);
    for spec in [
        SeminormSpec::plain_p(Weight::gevrey(2.0), 1.0).unwrap(),
        SeminormSpec::global_p(Weight::gevrey(3.0), 2.0).unwrap(),
        SeminormSpec::exp_q(Weight::log_power(2.0), 1.0, 1.0).unwrap(),
    ] {
        let a = eval_seminorm(&f, &spec, &SearchSpec::default()).unwrap();
        let b = eval_seminorm(&g, &spec, &SearchSpec::default()).unwrap();
        assert!((a.log_value - b.log_value).abs() <= 1e-12, "{:?}", spec.family);
    }
}

#[test]
fn affine_conjugation_keeps_normal_form() {
    let psi = Polynomial::new(vec![rat(3, 1), rat(2, 1)]);
    for (a, b) in [(rat(5, 1), rat(-1, 2)), (rat(-1, 3), rat(7, 1))] {
        let l = AffineMap::new(a, b).unwrap();
        let conj = conjugate_by(&psi, &l);
        assert_eq!(normal_form_degree1(&conj).unwrap().0, normal_form_degree1(&psi).unwrap().0);
    }
}
