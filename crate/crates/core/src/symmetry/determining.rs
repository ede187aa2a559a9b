use serde::Serialize;

use super::SymmetryError;
use crate::expr::{is_zero, partial_poly, Atom, Poly, Var};

const XI: &str = "xi";
const H: &str = "h";

fn unknown(name: &str, k: u32) -> Poly {
    Poly::atom(Atom::Unknown(name.into(), k))
}

/// Determining system of `y^(α) = f(x, y)` under the ansatz
/// `ξ = ξ(x)`, `φ = S(y) Dξ + h(x)`.
///
/// `ξ` and `h` appear as unknown-function atoms `xi`, `D[xi,k]`, `h`, `D[h,k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterminingSystem {
    pub f: Poly,
    /// `D^{2α}ξ - (∂_y f) D^α ξ`.
    pub first: Poly,
    /// `D^α h - ξ ∂_x f - h ∂_y f`.
    pub second: Poly,
}

impl DeterminingSystem {
    pub fn equations(&self) -> [(&'static str, &Poly); 2] {
        [("xi", &self.first), ("h", &self.second)]
    }
}

pub fn first_order_determining(f: &Poly) -> Result<DeterminingSystem, SymmetryError> {
    if let Some(a) = super::first_jet_atom(f) {
        return Err(SymmetryError::JetDependence {
            what: "f",
            found: a.to_string(),
        });
    }
    let fx = partial_poly(f, Var::X);
    let fy = partial_poly(f, Var::Y);
    let first = unknown(XI, 2).sub(&unknown(XI, 1).mul(&fy));
    let second = unknown(H, 1)
        .sub(&unknown(XI, 0).mul(&fx))
        .sub(&unknown(H, 0).mul(&fy));
    Ok(DeterminingSystem {
        f: f.clone(),
        first,
        second,
    })
}

/// One coefficient of a residual grouped by monomials in the free constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantResidual {
    /// Product of constants, `1` for the constant-free part.
    pub monomial: String,
    pub coefficient: String,
    pub zero: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquationReport {
    pub equation: &'static str,
    pub residual: String,
    pub zero: bool,
    pub by_constant: Vec<ConstantResidual>,
    #[serde(skip)]
    pub residual_poly: Poly,
}

impl EquationReport {
    pub fn nonzero_monomials(&self) -> impl Iterator<Item = &ConstantResidual> {
        self.by_constant.iter().filter(|c| !c.zero)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateReport {
    pub xi: String,
    pub h: String,
    pub equations: Vec<EquationReport>,
}

impl CandidateReport {
    pub fn all_zero(&self) -> bool {
        self.equations.iter().all(|e| e.zero)
    }
}

fn x_only(p: &Poly, what: &'static str) -> Result<(), SymmetryError> {
    if p.atoms()
        .iter()
        .all(|a| matches!(a, Atom::Sx | Atom::Param(_)))
    {
        Ok(())
    } else {
        Err(SymmetryError::NotXOnly(what))
    }
}

fn nth_x_derivative(p: &Poly, k: u32) -> Poly {
    (0..k).fold(p.clone(), |acc, _| partial_poly(&acc, Var::X))
}

/// Substitutes `ξ`, `h` and their staircase derivatives, then checks each
/// equation coefficient by coefficient in the free constants.
pub fn verify_candidate(
    sys: &DeterminingSystem,
    xi: &Poly,
    h: &Poly,
) -> Result<CandidateReport, SymmetryError> {
    x_only(xi, "xi")?;
    x_only(h, "h")?;
    let bind = |a: &Atom| match a {
        Atom::Unknown(name, k) if &**name == XI => Some(nth_x_derivative(xi, *k)),
        Atom::Unknown(name, k) if &**name == H => Some(nth_x_derivative(h, *k)),
        _ => None,
    };
    let equations = sys
        .equations()
        .into_iter()
        .map(|(equation, e)| {
            let residual = e.substitute(&bind);
            let by_constant: Vec<ConstantResidual> = residual
                .collect_by(&|a| matches!(a, Atom::Param(_)))
                .into_iter()
                .map(|(m, coeff)| ConstantResidual {
                    monomial: Poly::term(m, 1.0).to_string(),
                    coefficient: coeff.to_string(),
                    zero: is_zero(&coeff),
                })
                .collect();
            EquationReport {
                equation,
                residual: residual.to_string(),
                zero: by_constant.iter().all(|c| c.zero),
                by_constant,
                residual_poly: residual,
            }
        })
        .collect();
    Ok(CandidateReport {
        xi: xi.to_string(),
        h: h.to_string(),
        equations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Parser};

    fn p(s: &str) -> Poly {
        Parser::new()
            .unknown(XI)
            .unknown(H)
            .parse(s)
            .unwrap()
            .to_poly()
    }

    #[test]
    fn determining_system_examples() {
        let sys = first_order_determining(&p("S(x) + S(y)")).unwrap();
        assert_eq!(sys.first, p("D[xi,2] - D[xi,1]"));
        assert_eq!(sys.second, p("D[h,1] - xi - h"));
        let sys = first_order_determining(&Poly::zero()).unwrap();
        assert_eq!(sys.first, p("D[xi,2]"));
        assert_eq!(sys.second, p("D[h,1]"));
        let sys = first_order_determining(&p("S(y)")).unwrap();
        assert_eq!(sys.second, p("D[h,1] - h"));
        assert!(first_order_determining(&p("y^(α)")).is_err());
    }

    #[test]
    fn printed_xi_and_corrected_h_pass() {
        let sys = first_order_determining(&p("S(x) + S(y)")).unwrap();
        let xi = p("c1*exp(S(x)) + c2");
        let h = p("c1*S(x)*exp(S(x)) + c3*exp(S(x)) - c2");
        let report = verify_candidate(&sys, &xi, &h).unwrap();
        assert!(report.all_zero(), "{report:?}");
    }

    #[test]
    fn printed_h_leaves_a_c2_monomial() {
        let sys = first_order_determining(&p("S(x) + S(y)")).unwrap();
        let xi = p("c1*exp(S(x)) + c2");
        let h = p("c1*S(x)*exp(S(x)) + c2 + c3*exp(S(x))");
        let report = verify_candidate(&sys, &xi, &h).unwrap();
        assert!(report.equations[0].zero);
        let bad: Vec<_> = report.equations[1].nonzero_monomials().collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].monomial, "c2");
        assert_eq!(bad[0].coefficient, "-2");
    }

    #[test]
    fn negative_control_and_domain() {
        let sys = first_order_determining(&p("S(x) + S(y)")).unwrap();
        let report = verify_candidate(&sys, &p("S(x)"), &Poly::zero()).unwrap();
        assert_eq!(report.equations[0].residual, "-1");
        assert!(!report.all_zero());
        assert_eq!(
            verify_candidate(&sys, &parse("y").unwrap().to_poly(), &Poly::zero()),
            Err(SymmetryError::NotXOnly("xi"))
        );
    }
}
