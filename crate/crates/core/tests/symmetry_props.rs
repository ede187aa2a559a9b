mod common;

use common::{cantor, random_polynomial};
use fraclie::calculus::{fractal_derivative, FractalFn};
use fraclie::expr::{is_zero, parse, probe_norm, Atom, JetPoint, Poly};
use fraclie::symmetry::{
    determining_residual, prolong, worked, FractalOde, Generator, ResidualOptions,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn base_atoms() -> Vec<Atom> {
    vec![Atom::Sx, Atom::Y]
}

fn random_generator(rng: &mut StdRng) -> Generator {
    let atoms = base_atoms();
    Generator::new(
        random_polynomial(rng, &atoms, 3, 2),
        random_polynomial(rng, &atoms, 3, 2),
    )
    .unwrap()
}

fn p(s: &str) -> Poly {
    parse(s).unwrap().to_poly()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn residual_is_linear_in_the_generator(s1 in any::<u64>(), s2 in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let ode = FractalOde::new(p("y^(2α) + S(x)*y^(α) - y^2"));
        let g1 = random_generator(&mut StdRng::seed_from_u64(s1));
        let g2 = random_generator(&mut StdRng::seed_from_u64(s2));
        let opts = ResidualOptions::default();
        let lhs = determining_residual(&ode, &g1.combine(a, &g2, b), opts).unwrap();
        let rhs = determining_residual(&ode, &g1, opts).unwrap().scale(a)
            .add(&determining_residual(&ode, &g2, opts).unwrap().scale(b));
        prop_assert!(is_zero(&lhs.sub(&rhs)));
    }

    #[test]
    fn eta_has_exact_jet_order(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random_generator(&mut rng);
        let g = prolong(&g, 3).unwrap();
        for k in 1..=3u32 {
            prop_assert!(g.eta(k as usize).unwrap().jet_order() <= k);
        }
    }
}

#[test]
fn random_non_symmetries_have_visible_residuals() {
    // polynomial symmetries of y'' + y = 0 are spanned by ∂x and y ∂y; the
    // forced S(x)·y term in φ keeps every sample outside that span
    let ode = worked::oscillator();
    let mut rng = StdRng::seed_from_u64(21);
    for _ in 0..40 {
        let g = random_generator(&mut rng);
        let phi = g.phi().add(&p("S(x)*y").scale(rng.gen_range(0.5..2.0)));
        let g = Generator::new(g.xi().clone(), phi).unwrap();
        let r = determining_residual(&ode, &g, ResidualOptions::default()).unwrap();
        assert!(probe_norm(&r) > 1e-3, "{g:?} -> {r}");
    }
}

#[test]
fn first_prolongation_matches_numeric_derivatives_along_sin_s() {
    let s = cantor(12);
    let mut rng = StdRng::seed_from_u64(22);
    let xs: Vec<f64> = s.source().endpoints().into_iter().step_by(331).collect();
    for _ in 0..10 {
        let g = prolong(&random_generator(&mut rng), 1).unwrap();
        let along = |q: &Poly| {
            let (q, s) = (q.clone(), s.clone());
            FractalFn::new("along", move |x| {
                let u = s.value(x);
                q.eval(&JetPoint::new().with(Atom::Sx, u).with(Atom::Y, u.sin()))
                    .unwrap()
            })
        };
        let (phi, xi) = (along(g.phi()), along(g.xi()));
        for &x in &xs {
            let u = s.value(x);
            let jets = JetPoint::new()
                .with(Atom::Sx, u)
                .with(Atom::Y, u.sin())
                .with(Atom::Jet(1), u.cos());
            let symbolic = g.eta(1).unwrap().eval(&jets).unwrap();
            let numeric = fractal_derivative(&phi, &s, x, 14).unwrap().value
                - u.cos() * fractal_derivative(&xi, &s, x, 14).unwrap().value;
            assert!(
                (symbolic - numeric).abs() < 1e-5 * symbolic.abs().max(1.0),
                "{symbolic} vs {numeric}"
            );
        }
    }
}
