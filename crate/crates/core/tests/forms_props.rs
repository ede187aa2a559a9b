mod common;

use common::{random_field, random_form};
use fraclie::forms::{
    exterior_derivative, interior_product, lie_bracket, lie_derivative, wedge, Form,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const FORMS: usize = 200;

#[test]
fn d_squared_vanishes_on_seeded_forms() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..FORMS {
        let k = rng.gen_range(0..=2);
        let w = random_form(&mut rng, 4, k);
        let dd = exterior_derivative(&exterior_derivative(&w));
        assert!(dd.is_zero(), "d(d({w})) = {dd}");
    }
}

#[test]
fn graded_leibniz_on_seeded_forms() {
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..FORMS {
        let (k, l) = (rng.gen_range(0..=2), rng.gen_range(0..=1));
        let a = random_form(&mut rng, 4, k);
        let b = random_form(&mut rng, 4, l);
        let lhs = exterior_derivative(&wedge(&a, &b).unwrap());
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = wedge(&exterior_derivative(&a), &b)
            .unwrap()
            .add(
                &wedge(&a, &exterior_derivative(&b))
                    .unwrap()
                    .scale(&sign.into()),
            )
            .unwrap();
        assert!(lhs.sub(&rhs).unwrap().is_zero(), "a = {a}, b = {b}");
    }
}

#[test]
fn cartan_formula_commutes_with_d() {
    // L_X d = d L_X
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..50 {
        let k = rng.gen_range(0..=1);
        let w = random_form(&mut rng, 3, k);
        let x = random_field(&mut rng, 3);
        let a = lie_derivative(&x, &exterior_derivative(&w)).unwrap();
        let b = exterior_derivative(&lie_derivative(&x, &w).unwrap());
        assert!(a.sub(&b).unwrap().is_zero(), "X = {x}, w = {w}");
    }
}

#[test]
fn contraction_is_nilpotent_and_an_antiderivation() {
    let mut rng = StdRng::seed_from_u64(14);
    for _ in 0..50 {
        let x = random_field(&mut rng, 3);
        let a = random_form(&mut rng, 3, 1);
        let b = random_form(&mut rng, 3, 2);
        let twice = interior_product(&x, &interior_product(&x, &b).unwrap()).unwrap();
        assert!(twice.is_zero());
        let lhs = interior_product(&x, &wedge(&a, &b).unwrap()).unwrap();
        let rhs = wedge(&interior_product(&x, &a).unwrap(), &b)
            .unwrap()
            .sub(&wedge(&a, &interior_product(&x, &b).unwrap()).unwrap())
            .unwrap();
        assert!(lhs.sub(&rhs).unwrap().is_zero());
    }
}

#[test]
fn bracket_antisymmetry_and_jacobi() {
    let mut rng = StdRng::seed_from_u64(15);
    for _ in 0..30 {
        let (x, y, z) = (
            random_field(&mut rng, 3),
            random_field(&mut rng, 3),
            random_field(&mut rng, 3),
        );
        let xy = lie_bracket(&x, &y).unwrap();
        assert!(xy.add(&lie_bracket(&y, &x).unwrap()).unwrap().is_zero());
        let j = lie_bracket(&x, &lie_bracket(&y, &z).unwrap())
            .unwrap()
            .add(&lie_bracket(&y, &lie_bracket(&z, &x).unwrap()).unwrap())
            .unwrap()
            .add(&lie_bracket(&z, &lie_bracket(&x, &y).unwrap()).unwrap())
            .unwrap();
        assert!(j.is_zero(), "{j}");
    }
}

#[test]
fn lie_derivative_of_function_is_directional_derivative() {
    let mut rng = StdRng::seed_from_u64(16);
    let x = random_field(&mut rng, 3);
    let f = random_form(&mut rng, 3, 0);
    let lf = lie_derivative(&x, &f).unwrap();
    assert_eq!(lf, Form::function(f.coords(), x.apply(&f.coefficient(&[]))));
}
