//! The worked examples as printed, plus the variants the residual checks single out.

use super::{first_order_determining, DeterminingSystem, FractalOde, Generator};
use crate::expr::{Atom, Poly};

fn atom(a: Atom) -> Poly {
    Poly::atom(a)
}

/// `y^(2α) + y = 0`.
pub fn oscillator() -> FractalOde {
    FractalOde::new(atom(Atom::Jet(2)).add(&atom(Atom::Y)))
}

/// `V_1..V_4` with `ξ`, `φ` exactly as printed; `V_2 = S(x) ∂x + S(x) ∂y`.
pub fn oscillator_generators() -> Vec<(&'static str, Generator)> {
    let sx = atom(Atom::Sx);
    vec![
        (
            "V1",
            Generator::new(Poly::one(), Poly::zero()).expect("x-only"),
        ),
        (
            "V2",
            Generator::new(sx.clone(), sx.clone()).expect("x-only"),
        ),
        (
            "V3",
            Generator::new(Poly::zero(), Poly::cos(&sx)).expect("x-only"),
        ),
        (
            "V4",
            Generator::new(Poly::zero(), Poly::sin(&sx)).expect("x-only"),
        ),
    ]
}

/// `V_2` alternatives: `S(x) ∂x + S(y) ∂y` and the scaling `y ∂y`.
pub fn oscillator_v2_variants() -> Vec<(&'static str, Generator)> {
    vec![
        (
            "V2[S(y)]",
            Generator::new(atom(Atom::Sx), atom(Atom::Sy)).expect("x-only"),
        ),
        (
            "V2[y]",
            Generator::new(Poly::zero(), atom(Atom::Y)).expect("x-only"),
        ),
    ]
}

/// `y^(α) = S(x) + S(y)`.
pub fn first_order_rhs() -> Poly {
    atom(Atom::Sx).add(&atom(Atom::Sy))
}

pub fn first_order_system() -> DeterminingSystem {
    first_order_determining(&first_order_rhs()).expect("jet order 0")
}

fn c(i: u32) -> Poly {
    atom(Atom::param(&format!("c{i}")))
}

/// `ξ = c1 e^{S(x)} + c2`.
pub fn first_order_xi() -> Poly {
    c(1).mul(&Poly::exp(&atom(Atom::Sx))).add(&c(2))
}

/// `h = c1 S e^S + c2 + c3 e^S` as printed.
pub fn first_order_h_printed() -> Poly {
    let e = Poly::exp(&atom(Atom::Sx));
    c(1).mul(&atom(Atom::Sx))
        .mul(&e)
        .add(&c(2))
        .add(&c(3).mul(&e))
}

/// `h = c1 S e^S - c2 + c3 e^S`.
pub fn first_order_h_corrected() -> Poly {
    let e = Poly::exp(&atom(Atom::Sx));
    c(1).mul(&atom(Atom::Sx))
        .mul(&e)
        .sub(&c(2))
        .add(&c(3).mul(&e))
}
