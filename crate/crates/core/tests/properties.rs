use convindex::gen::{flow_instance, random_cover, random_s_prime, young_operator, FlowParams};
use convindex::index::{global_index, irr_cover_check};
use convindex::instance::InstanceFile;
use convindex::operator::young_radii;
use convindex::plf::{combine, CombineOp, PLFunction};
use convindex::radii::checks::{check_integrality, check_weak_superharmonicity};
use convindex::radii::{Equation, FieldConfig};
use convindex::rational::{q, qi, Rational};
use convindex::skeleton::{chi_c_cover, sum_chi_check};
use convindex::suites::invariance_suite;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rational() -> impl Strategy<Value = Rational> {
    (-60i64..60, 1i64..12).prop_map(|(n, d)| q(n, d))
}

fn segment() -> impl Strategy<Value = PLFunction> {
    (rational(), prop::collection::vec((1i64..6, rational()), 1..5)).prop_map(|(v0, steps)| {
        let mut t = qi(0);
        let mut pts = vec![(t.clone(), v0)];
        for (dt, v) in steps {
            t += q(dt, 2);
            pts.push((t.clone(), v));
        }
        PLFunction::segment(pts).unwrap()
    })
}

/// Two segments on a common length, obtained by rescaling the second.
fn segment_pair() -> impl Strategy<Value = (PLFunction, PLFunction)> {
    (segment(), segment()).prop_map(|(f, g)| {
        let (lf, lg) = (f.length().unwrap().clone(), g.length().unwrap().clone());
        let pts = g.points().iter().map(|(t, v)| (t * &lf / &lg, v.clone())).collect();
        (f, PLFunction::segment(pts).unwrap())
    })
}

fn params() -> FlowParams {
    FlowParams { max_s: 6, ..Default::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rationals_print_canonically(r in rational()) {
        let s = r.to_string();
        prop_assert_eq!(s.parse::<Rational>().unwrap(), r.clone());
        let back: Rational = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn min_and_max_are_pointwise((f, g) in segment_pair(), k in 0i64..=16) {
        let t = f.length().unwrap() * q(k, 16);
        let lo = combine(&CombineOp::Min, &[f.clone(), g.clone()]).unwrap();
        let hi = combine(&CombineOp::Max, &[f.clone(), g.clone()]).unwrap();
        let (a, b) = (f.eval(&t).unwrap(), g.eval(&t).unwrap());
        prop_assert_eq!(lo.eval(&t).unwrap(), a.clone().min(b.clone()));
        prop_assert_eq!(hi.eval(&t).unwrap(), a.clone().max(b.clone()));
        let s = combine(&CombineOp::Sum, &[lo, hi]).unwrap();
        prop_assert_eq!(s.eval(&t).unwrap(), &a + &b);
    }

    #[test]
    fn plf_round_trip(f in segment()) {
        let text = serde_json::to_string(&f).unwrap();
        let back: PLFunction = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
        prop_assert!(back.same_function(&f));
    }

    #[test]
    fn generated_instances_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = flow_instance(&mut rng, &params());
        let file = InstanceFile::with_profile(FieldConfig::zero(), inst.skeleton, inst.profile);
        let text = file.to_json();
        let back = InstanceFile::parse(&text).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn index_sides_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = flow_instance(&mut rng, &params());
        let eq = Equation::new(&inst.skeleton, &inst.profile).unwrap();
        let rep = global_index(&eq, &inst.flags);
        prop_assert_eq!(rep.agree, Some(true));
        for d in rep.decomposition.values() {
            prop_assert!(d.holds);
        }
    }

    #[test]
    fn euler_characteristic_is_local(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = flow_instance(&mut rng, &params());
        let (sk, sp) = random_s_prime(&mut rng, &inst.skeleton);
        prop_assert!(sum_chi_check(&sk, &sp).unwrap().equal);
        let (u, v) = random_cover(&mut rng, &inst.skeleton);
        prop_assert!(chi_c_cover(&inst.skeleton, &u, &v).unwrap().equal);
        let eq = Equation::new(&inst.skeleton, &inst.profile).unwrap();
        prop_assert!(irr_cover_check(&eq, &u, &v).unwrap().equal);
    }

    #[test]
    fn wsh_and_integrality_hold(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = flow_instance(&mut rng, &params());
        let eq = Equation::new(&inst.skeleton, &inst.profile).unwrap();
        prop_assert!(check_weak_superharmonicity(&eq).holds);
        prop_assert!(check_integrality(&eq).holds);
    }

    #[test]
    fn refinements_keep_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = flow_instance(&mut rng, &params());
        let rep = invariance_suite(&mut rng, &inst.skeleton, &inst.profile, 3).unwrap();
        prop_assert!(rep.holds, "{:?}", rep.mismatches);
    }

    #[test]
    fn young_radii_increase(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (op, _) = young_operator(&mut rng, p);
        let rs = young_radii(&op, &FieldConfig::new(p).unwrap(), &qi(0), &qi(0)).unwrap();
        let vals: Vec<Rational> = rs.iter().filter_map(|r| r.log_r.clone()).collect();
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(rs[0].valid);
    }
}
