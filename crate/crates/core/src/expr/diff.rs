use std::collections::BTreeMap;

use super::normal::{Factor, Poly};
use super::{Atom, Expr, ExprError};

/// Direction of a partial derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// `∂/∂x` acting as `d/dS(x)`; also advances unknown functions of `x`.
    X,
    /// `∂/∂y`, with `∂S(y)/∂y = 1`.
    Y,
    /// `∂/∂y^(kα)`, `k ≥ 1`.
    Jet(u32),
    /// `∂/∂S(x_i)` on a multi-coordinate patch.
    Coord(u32),
}

fn atom_derivative(a: &Atom, v: Var) -> Poly {
    match (a, v) {
        (Atom::Sx, Var::X) | (Atom::Y, Var::Y) | (Atom::Sy, Var::Y) => Poly::one(),
        (Atom::Unknown(name, k), Var::X) => Poly::atom(Atom::Unknown(name.clone(), k + 1)),
        (Atom::Jet(k), Var::Jet(j)) if *k == j => Poly::one(),
        (Atom::Coord(i), Var::Coord(j)) if *i == j => Poly::one(),
        _ => Poly::zero(),
    }
}

fn factor_derivative(f: &Factor, v: Var) -> Poly {
    match f {
        Factor::Atom(a) => atom_derivative(a, v),
        Factor::Exp(u) => Poly::factor_pow(f, 1).mul(&partial_poly(u, v)),
        Factor::Sin(u) => Poly::cos(u).mul(&partial_poly(u, v)),
        Factor::Cos(u) => Poly::sin(u).scale(-1.0).mul(&partial_poly(u, v)),
        Factor::Ln(u) => u.inv().mul(&partial_poly(u, v)),
        Factor::Sum(u) => partial_poly(u, v),
    }
}

/// Partial derivative of a canonical polynomial, all other atoms held fixed.
pub fn partial_poly(p: &Poly, v: Var) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        for (f, k) in m.factors() {
            let df = factor_derivative(f, v);
            if df.is_zero() {
                continue;
            }
            let mut rest: BTreeMap<Factor, i32> = m.map().clone();
            *rest.get_mut(f).expect("factor present") -= 1;
            let rest_poly = rest
                .into_iter()
                .fold(Poly::constant(c * k as f64), |acc, (g, e)| {
                    acc.mul(&Poly::factor_pow(&g, e))
                });
            out = out.add(&rest_poly.mul(&df));
        }
    }
    out
}

pub fn partial(e: &Expr, v: Var) -> Expr {
    Expr::from(&partial_poly(&e.to_poly(), v))
}

/// `D = ∂_x + y^(α)∂_y + Σ_k y^((k+1)α) ∂_{y^(kα)}`.
///
/// Fails when the jet order of `p` already reaches `max_order`.
pub fn total_derivative_poly(p: &Poly, max_order: u32) -> Result<Poly, ExprError> {
    let order = p.jet_order();
    if order >= max_order {
        return Err(ExprError::OrderOverflow { order, max_order });
    }
    let mut out = partial_poly(p, Var::X);
    out = out.add(&Poly::atom(Atom::Jet(1)).mul(&partial_poly(p, Var::Y)));
    for k in 1..=order {
        out = out.add(&Poly::atom(Atom::Jet(k + 1)).mul(&partial_poly(p, Var::Jet(k))));
    }
    Ok(out)
}

pub fn total_derivative(e: &Expr, max_order: u32) -> Result<Expr, ExprError> {
    total_derivative_poly(&e.to_poly(), max_order).map(|p| Expr::from(&p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Poly {
        parse(s).unwrap().to_poly()
    }

    #[test]
    fn partial_examples() {
        assert_eq!(partial_poly(&p("S(x)*y"), Var::Y), p("S(x)"));
        assert_eq!(partial_poly(&p("S(x) + S(y)"), Var::Y), Poly::one());
        assert_eq!(partial_poly(&p("exp(S(x))"), Var::X), p("exp(S(x))"));
        assert_eq!(partial_poly(&p("y^(2α)*y^(α)"), Var::Jet(2)), p("y^(α)"));
        assert_eq!(partial_poly(&p("ln(S(x))"), Var::X), p("S(x)^(-1)"));
        assert_eq!(
            partial_poly(&p("sin(S(x)^2)"), Var::X),
            p("2*S(x)*cos(S(x)^2)")
        );
    }

    #[test]
    fn total_derivative_examples() {
        assert_eq!(total_derivative_poly(&p("y"), 2).unwrap(), p("y^(α)"));
        assert_eq!(
            total_derivative_poly(&p("S(x)*y"), 2).unwrap(),
            p("y + S(x)*y^(α)")
        );
        assert_eq!(total_derivative_poly(&p("y^(α)"), 2).unwrap(), p("y^(2α)"));
        assert_eq!(total_derivative_poly(&p("S(y)"), 1).unwrap(), p("y^(α)"));
        assert_eq!(
            total_derivative_poly(&p("y^(2α)"), 2).unwrap_err(),
            ExprError::OrderOverflow {
                order: 2,
                max_order: 2
            }
        );
    }

    #[test]
    fn unknown_functions_advance() {
        let xi = parse_with_xi("xi*S(x)");
        assert_eq!(
            total_derivative_poly(&xi, 1).unwrap(),
            parse_with_xi("D[xi,1]*S(x) + xi")
        );
    }

    fn parse_with_xi(s: &str) -> Poly {
        crate::expr::parse_with(s, &[], &["xi"]).unwrap().to_poly()
    }
}
