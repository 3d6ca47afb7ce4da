use proptest::prelude::*;
use symnorm::forms::{exterior_derivative, wedge};
use symnorm::random::{random_diffeo, random_form, random_jet, rng};
use symnorm::serial::{
    form_from_json, form_to_json, jet_from_json, jet_to_json, map_from_json, map_to_json,
};
use symnorm::symplectic::{poisson_bracket, standard_form};
use symnorm::{map, Jet, MapJet, Scalar, VariableSpace};

fn spaces() -> impl Strategy<Value = VariableSpace> {
    prop_oneof![
        Just(VariableSpace::symplectic(1)),
        Just(VariableSpace::symplectic(2)),
        Just(VariableSpace::constrained(1)),
        Just(VariableSpace::quasi(1)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn jet_json_round_trip(seed: u64, space in spaces(), order in 1usize..6) {
        let j = random_jet(&mut rng(seed), space, order, 0, order, 0.4);
        let v = jet_to_json(&j);
        prop_assert_eq!(jet_from_json(&v, space, order, "j").unwrap(), j.clone());
        let text = v["text"].clone();
        prop_assert_eq!(jet_from_json(&text, space, order, "j").unwrap(), j);
    }

    #[test]
    fn form_and_map_json_round_trip(seed: u64, degree in 0usize..3) {
        let space = VariableSpace::symplectic(1);
        let mut r = rng(seed);
        let f = random_form(&mut r, space, degree, 3, 3, 0.5);
        prop_assert_eq!(form_from_json(&form_to_json(&f), space, 3, "f").unwrap(), f);
        let m = random_diffeo(&mut r, space, 3, 3, 0.5);
        prop_assert_eq!(map_from_json(&map_to_json(&m), space, 3, "m").unwrap(), m);
    }

    #[test]
    fn ring_laws(seed: u64, space in spaces()) {
        let mut r = rng(seed);
        let order = 4;
        let [a, b, c] = [0, 1, 2].map(|_| random_jet(&mut r, space, order, 0, 3, 0.5));
        prop_assert_eq!(a.mul_jet(&b), b.mul_jet(&a));
        prop_assert_eq!(a.mul_jet(&b).mul_jet(&c), a.mul_jet(&b.mul_jet(&c)));
        prop_assert_eq!(
            a.mul_jet(&b.add_jet(&c)),
            a.mul_jet(&b).add_jet(&a.mul_jet(&c))
        );
    }

    #[test]
    fn leibniz_rule(seed: u64, v in 0usize..2) {
        let space = VariableSpace::symplectic(1);
        let mut r = rng(seed);
        let a = random_jet(&mut r, space, 5, 0, 5, 0.5);
        let b = random_jet(&mut r, space, 5, 0, 5, 0.5);
        let lhs = a.mul_jet(&b).derivative(v);
        let rhs = a.derivative(v).mul_jet(&b).add_jet(&a.mul_jet(&b.derivative(v)));
        let o = lhs.order().min(rhs.order());
        prop_assert_eq!(lhs.truncate(o), rhs.truncate(o));
    }

    #[test]
    fn composition_is_associative(seed: u64) {
        let space = VariableSpace::symplectic(1);
        let mut r = rng(seed);
        let [f, g, h] = [0, 1, 2].map(|_| random_diffeo(&mut r, space, 4, 3, 0.5));
        let lhs = f.compose(&g).unwrap().compose(&h).unwrap();
        let rhs = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_composes_to_identity(seed: u64) {
        let space = VariableSpace::symplectic(1);
        let m = random_diffeo(&mut rng(seed), space, 4, 4, 0.5);
        let inv = m.invert().unwrap();
        prop_assert_eq!(m.compose(&inv).unwrap(), MapJet::identity(space, 4));
        prop_assert_eq!(inv.compose(&m).unwrap(), MapJet::identity(space, 4));
    }

    #[test]
    fn pullback_of_function_is_composition(seed: u64) {
        let space = VariableSpace::symplectic(1);
        let mut r = rng(seed);
        let f = random_jet(&mut r, space, 4, 0, 4, 0.5);
        let m = random_diffeo(&mut r, space, 4, 3, 0.5);
        let composed = map::compose(&f, &m).unwrap();
        let by_hand = f.terms().into_iter().fold(Jet::zero(space, 4), |acc, (e, c)| {
            let mono = e.iter().enumerate().fold(Jet::one(space, 4), |p, (v, &k)| {
                p.mul_jet(&m.components()[v].pow(k as usize))
            });
            acc.add_jet(&mono.scale(&c))
        });
        prop_assert_eq!(composed, by_hand);
    }

    #[test]
    fn bracket_is_antisymmetric(seed: u64) {
        let space = VariableSpace::symplectic(2);
        let om = standard_form(space, 5);
        let mut r = rng(seed);
        let f = random_jet(&mut r, space, 4, 1, 4, 0.3);
        let g = random_jet(&mut r, space, 4, 1, 4, 0.3);
        let fg = poisson_bracket(&f, &g, &om).unwrap();
        let gf = poisson_bracket(&g, &f, &om).unwrap();
        prop_assert!(fg.add_jet(&gf).is_zero());
    }

    #[test]
    fn d_is_a_graded_derivation(seed: u64, p in 0usize..2) {
        let space = VariableSpace::symplectic(2);
        let mut r = rng(seed);
        let a = random_form(&mut r, space, p, 4, 3, 0.3);
        let b = random_form(&mut r, space, 1, 4, 3, 0.3);
        let lhs = exterior_derivative(&wedge(&a, &b));
        let sign = if p % 2 == 0 { Scalar::from_integer(1.into()) } else { Scalar::from_integer((-1).into()) };
        let rhs = wedge(&exterior_derivative(&a), &b)
            .add(&wedge(&a, &exterior_derivative(&b)).scale(&sign));
        let o = lhs.order().min(rhs.order());
        prop_assert_eq!(lhs.truncate(o), rhs.truncate(o));
    }
}

#[test]
fn binomial_powers() {
    let space = VariableSpace::quasi(0);
    let x = Jet::parse(space, 10, "1 + y").unwrap();
    let p = x.pow(10);
    for k in 0..=10u32 {
        let expected: u64 = (0..k).fold(1, |acc, i| acc * (10 - i as u64) / (i as u64 + 1));
        assert_eq!(p.coeff(&[k as u8]), Scalar::from_integer(expected.into()));
    }
}
