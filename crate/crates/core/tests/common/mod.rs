#![allow(dead_code)]

use fraclie::cantor::{FractalSet, Normalization, Staircase};
use fraclie::expr::{Atom, Poly};
use fraclie::forms::{Form, VectorField};
use fraclie::Var;
use rand::rngs::StdRng;
use rand::Rng;

pub const CANTOR_DIM: f64 = 0.630_929_753_571_457_4;

pub fn cantor(depth: u32) -> Staircase {
    Staircase::new(
        &FractalSet::middle_third(depth),
        CANTOR_DIM,
        0.0,
        Normalization::GammaFactor,
    )
    .unwrap()
}

/// Coefficients on a quarter grid keep cancellations exact.
fn coeff(rng: &mut StdRng) -> f64 {
    let c = rng.gen_range(-8..=8) as f64 / 4.0;
    if c == 0.0 {
        1.0
    } else {
        c
    }
}

/// Sum of up to `terms` monomials of total degree at most `degree`.
pub fn random_polynomial(rng: &mut StdRng, atoms: &[Atom], terms: usize, degree: u32) -> Poly {
    let mut p = Poly::zero();
    for _ in 0..rng.gen_range(1..=terms) {
        let mut t = Poly::constant(coeff(rng));
        for _ in 0..rng.gen_range(0..=degree) {
            t = t.mul(&Poly::atom(atoms[rng.gen_range(0..atoms.len())].clone()));
        }
        p = p.add(&t);
    }
    p
}

/// Polynomials occasionally wrapped in `sin`, `cos` or `exp` of a linear argument.
pub fn random_expression(rng: &mut StdRng, atoms: &[Atom]) -> Poly {
    let base = random_polynomial(rng, atoms, 3, 2);
    let arg = Poly::atom(atoms[rng.gen_range(0..atoms.len())].clone()).scale(coeff(rng));
    let wrapped = match rng.gen_range(0..4) {
        0 => Poly::sin(&arg),
        1 => Poly::cos(&arg),
        2 => Poly::exp(&arg),
        _ => Poly::one(),
    };
    base.mul(&wrapped)
}

pub fn coords(n: u32) -> Vec<Var> {
    (1..=n).map(Var::Coord).collect()
}

fn coord_atoms(n: u32) -> Vec<Atom> {
    (1..=n).map(Atom::Coord).collect()
}

/// A random `k`-form on `n` coordinates with polynomial coefficients.
pub fn random_form(rng: &mut StdRng, n: u32, k: usize) -> Form {
    let cs = coords(n);
    let atoms = coord_atoms(n);
    let mut w = Form::zero(&cs, k);
    for _ in 0..rng.gen_range(1..=3) {
        let mut idx: Vec<usize> = (0..n as usize).collect();
        for i in (1..idx.len()).rev() {
            idx.swap(i, rng.gen_range(0..=i));
        }
        idx.truncate(k);
        let term = Form::monomial(&cs, random_polynomial(rng, &atoms, 3, 3), &idx).unwrap();
        w = w.add(&term).unwrap();
    }
    w
}

pub fn random_field(rng: &mut StdRng, n: u32) -> VectorField {
    let atoms = coord_atoms(n);
    let comps = (0..n)
        .map(|_| random_polynomial(rng, &atoms, 2, 2))
        .collect();
    VectorField::new(&coords(n), comps).unwrap()
}
