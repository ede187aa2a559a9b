//! Fractal prolongation, determining-equation residuals, the first-order
//! determining system and fractal Noether currents.
//!
//! Prolongation follows `η^(1) = Dφ - y^(α) Dξ`,
//! `η^(k) = Dη^(k-1) - y^(kα) Dξ`. Residuals are restricted to the solution
//! manifold unless [`ResidualOptions::on_shell`] is cleared.

mod closure;
mod determining;
mod noether;
pub mod worked;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{partial_poly, total_derivative_poly, Atom, ExprError, Poly, Var};
use crate::forms::VectorField;

pub use closure::{closure_report, BracketEntry};
pub use determining::{
    first_order_determining, verify_candidate, CandidateReport, ConstantResidual,
    DeterminingSystem, EquationReport,
};
pub use noether::{euler_lagrange_residual, noether_current, Lagrangian, NoetherReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("{what} must not depend on jet variables of order >= 1, found {found}")]
    JetDependence { what: &'static str, found: String },
    #[error("the equation has no solved form for its top derivative")]
    MissingSolvedForm,
    #[error("solved form still contains {0}")]
    InvalidSolvedForm(String),
    #[error("{0} must depend on x only")]
    NotXOnly(&'static str),
    #[error("trajectory lacks the {0} column")]
    MissingColumns(String),
    #[error("trajectory is not a solution: Euler-Lagrange residual {residual:e} exceeds {tol:e}")]
    NonSolution { residual: f64, tol: f64 },
    #[error("Lagrangian depends on jets above first order")]
    LagrangianOrder,
    #[error("evaluation failed at sample {index}: {source}")]
    Evaluation { index: usize, source: ExprError },
}

fn first_jet_atom(p: &Poly) -> Option<Atom> {
    p.atoms().into_iter().find(|a| matches!(a, Atom::Jet(_)))
}

/// Infinitesimal generator `V = ξ ∂x + φ ∂y` with its prolongation coefficients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Generator {
    #[serde(serialize_with = "as_string")]
    xi: Poly,
    #[serde(serialize_with = "as_string")]
    phi: Poly,
    #[serde(serialize_with = "as_strings")]
    etas: Vec<Poly>,
}

fn as_string<S: serde::Serializer>(p: &Poly, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(p)
}

fn as_strings<S: serde::Serializer>(ps: &[Poly], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(ps.iter().map(|p| p.to_string()))
}

impl Generator {
    pub fn new(xi: Poly, phi: Poly) -> Result<Self, SymmetryError> {
        for (what, p) in [("xi", &xi), ("phi", &phi)] {
            if let Some(a) = first_jet_atom(p) {
                return Err(SymmetryError::JetDependence {
                    what,
                    found: a.to_string(),
                });
            }
        }
        Ok(Self {
            xi,
            phi,
            etas: Vec::new(),
        })
    }

    pub fn xi(&self) -> &Poly {
        &self.xi
    }

    pub fn phi(&self) -> &Poly {
        &self.phi
    }

    /// `η^(k)` for `1 ≤ k ≤` the prolonged order.
    pub fn eta(&self, k: usize) -> Option<&Poly> {
        k.checked_sub(1).and_then(|i| self.etas.get(i))
    }

    pub fn etas(&self) -> &[Poly] {
        &self.etas
    }

    pub fn prolonged_order(&self) -> usize {
        self.etas.len()
    }

    /// Characteristic `Q = φ - ξ y^(α)`; reported only, never used in residuals.
    pub fn characteristic(&self) -> Poly {
        self.phi.sub(&self.xi.mul(&Poly::atom(Atom::Jet(1))))
    }

    /// The field on the `(x, y)` plane.
    pub fn vector_field(&self) -> VectorField {
        VectorField::new(&[Var::X, Var::Y], vec![self.xi.clone(), self.phi.clone()])
            .expect("two components")
    }

    /// `a·self + b·other`, unprolonged.
    pub fn combine(&self, a: f64, other: &Generator, b: f64) -> Generator {
        Generator {
            xi: self.xi.scale(a).add(&other.xi.scale(b)),
            phi: self.phi.scale(a).add(&other.phi.scale(b)),
            etas: Vec::new(),
        }
    }
}

/// Fills `η^(1..=n)`.
pub fn prolong(g: &Generator, n: usize) -> Result<Generator, SymmetryError> {
    let n32 = n as u32;
    let d_xi = total_derivative_poly(&g.xi, n32.max(1))?;
    let mut etas = Vec::with_capacity(n);
    let mut prev = g.phi.clone();
    for k in 1..=n32 {
        let d_prev = total_derivative_poly(&prev, k)?;
        let eta = d_prev.sub(&Poly::atom(Atom::Jet(k)).mul(&d_xi));
        etas.push(eta.clone());
        prev = eta;
    }
    Ok(Generator {
        xi: g.xi.clone(),
        phi: g.phi.clone(),
        etas,
    })
}

/// `F(x, y, y^(α), …, y^(nα)) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FractalOde {
    expr: Poly,
    order: u32,
    solved: Option<Poly>,
}

impl FractalOde {
    /// Derives the solved form when `F` is linear in its top derivative.
    pub fn new(expr: Poly) -> Self {
        let order = expr.jet_order();
        let top = Atom::Jet(order);
        let solved = (order >= 1)
            .then(|| {
                let a = partial_poly(&expr, Var::Jet(order));
                let rest = expr.sub(&a.mul(&Poly::atom(top.clone())));
                let linear = !a.is_zero() && !a.contains_atom(&top) && !rest.contains_atom(&top);
                linear.then(|| rest.scale(-1.0).div(&a))
            })
            .flatten();
        Self {
            expr,
            order,
            solved,
        }
    }

    pub fn with_solved_form(mut self, solved: Poly) -> Result<Self, SymmetryError> {
        let top = Atom::Jet(self.order);
        if solved.contains_atom(&top) {
            return Err(SymmetryError::InvalidSolvedForm(top.to_string()));
        }
        self.solved = Some(solved);
        Ok(self)
    }

    pub fn expr(&self) -> &Poly {
        &self.expr
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn solved_form(&self) -> Option<&Poly> {
        self.solved.as_ref()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualOptions {
    /// Substitute the solved form for the top derivative.
    pub on_shell: bool,
    /// Amplitude of `∂F/∂y^(kα)`, the characteristic-function factor.
    pub chi: f64,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self {
            on_shell: true,
            chi: 1.0,
        }
    }
}

/// `ξ ∂_x F + φ ∂_y F + χ Σ η^(k) ∂_{y^(kα)} F`, normalized.
pub fn determining_residual(
    ode: &FractalOde,
    g: &Generator,
    opts: ResidualOptions,
) -> Result<Poly, SymmetryError> {
    let n = ode.order as usize;
    let g = if g.prolonged_order() >= n {
        g.clone()
    } else {
        prolong(g, n)?
    };
    let f = &ode.expr;
    let mut r =
        g.xi.mul(&partial_poly(f, Var::X))
            .add(&g.phi.mul(&partial_poly(f, Var::Y)));
    for k in 1..=n {
        let term = g.etas[k - 1].mul(&partial_poly(f, Var::Jet(k as u32)));
        r = r.add(&term.scale(opts.chi));
    }
    if opts.on_shell && n >= 1 {
        let solved = ode
            .solved
            .as_ref()
            .ok_or(SymmetryError::MissingSolvedForm)?;
        let top = Atom::Jet(ode.order);
        r = r.substitute(&|a| (*a == top).then(|| solved.clone()));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{is_zero, parse};

    fn p(s: &str) -> Poly {
        parse(s).unwrap().to_poly()
    }

    fn gen(xi: &str, phi: &str) -> Generator {
        Generator::new(p(xi), p(phi)).unwrap()
    }

    #[test]
    fn prolongation_examples() {
        let g = prolong(&gen("1", "0"), 2).unwrap();
        assert!(g.eta(1).unwrap().is_zero() && g.eta(2).unwrap().is_zero());
        let g = prolong(&gen("0", "cos(S(x))"), 2).unwrap();
        assert_eq!(g.eta(1).unwrap(), &p("-sin(S(x))"));
        assert_eq!(g.eta(2).unwrap(), &p("-cos(S(x))"));
        let g = prolong(&gen("S(x)", "S(y)"), 2).unwrap();
        assert!(g.eta(1).unwrap().is_zero());
        assert_eq!(g.eta(2).unwrap(), &p("-y^(2α)"));
    }

    #[test]
    fn classical_prolongation_formula() {
        // ξ = x, φ = y: η1 = φ_x + (φ_y - ξ_x) y' - ξ_y y'^2 = 0
        let g = prolong(&gen("S(x)", "y"), 1).unwrap();
        assert!(g.eta(1).unwrap().is_zero());
        // ξ = x y, φ = y^2: η1 = -y y' + 2 y y' - x y'^2
        let g = prolong(&gen("S(x)*y", "y^2"), 1).unwrap();
        assert_eq!(g.eta(1).unwrap(), &p("y*y^(α) - S(x)*y^(α)^2"));
    }

    #[test]
    fn generator_rejects_jets() {
        assert!(matches!(
            Generator::new(p("y^(α)"), p("0")),
            Err(SymmetryError::JetDependence { .. })
        ));
    }

    #[test]
    fn solved_form_is_derived_for_linear_top_jet() {
        let ode = FractalOde::new(p("y^(2α) + y"));
        assert_eq!(ode.order(), 2);
        assert_eq!(ode.solved_form().unwrap(), &p("-y"));
        let ode = FractalOde::new(p("2*y^(α) - S(x) - S(y)"));
        assert_eq!(ode.solved_form().unwrap(), &p("0.5*S(x) + 0.5*S(y)"));
        assert!(FractalOde::new(p("y^(α)^2 - y")).solved_form().is_none());
    }

    #[test]
    fn oscillator_residuals() {
        let ode = FractalOde::new(p("y^(2α) + y"));
        let opts = ResidualOptions::default();
        assert!(determining_residual(&ode, &gen("1", "0"), opts)
            .unwrap()
            .is_zero());
        assert!(determining_residual(&ode, &gen("0", "cos(S(x))"), opts)
            .unwrap()
            .is_zero());
        assert!(determining_residual(&ode, &gen("0", "sin(S(x))"), opts)
            .unwrap()
            .is_zero());
        assert!(determining_residual(&ode, &gen("0", "y"), opts)
            .unwrap()
            .is_zero());
        let bogus = determining_residual(&ode, &gen("0", "S(x)"), opts).unwrap();
        assert_eq!(bogus, p("S(x)"));
    }

    #[test]
    fn off_shell_needs_no_solved_form() {
        let ode = FractalOde::new(p("y^(α)^2 - y"));
        let g = gen("1", "0");
        assert_eq!(
            determining_residual(&ode, &g, ResidualOptions::default()),
            Err(SymmetryError::MissingSolvedForm)
        );
        let off = ResidualOptions {
            on_shell: false,
            chi: 1.0,
        };
        assert!(determining_residual(&ode, &g, off).unwrap().is_zero());
    }

    #[test]
    fn residual_is_linear_in_the_generator() {
        let ode = FractalOde::new(p("y^(2α) + S(x)*y^(α) + y^2"));
        let g1 = gen("S(x)^2", "y*S(x)");
        let g2 = gen("exp(S(x))", "S(y) - 1");
        let opts = ResidualOptions::default();
        let lhs = determining_residual(&ode, &g1.combine(2.0, &g2, -3.0), opts).unwrap();
        let r1 = determining_residual(&ode, &g1, opts).unwrap();
        let r2 = determining_residual(&ode, &g2, opts).unwrap();
        assert!(is_zero(&lhs.sub(&r1.scale(2.0).add(&r2.scale(-3.0)))));
    }

    #[test]
    fn chi_amplitude_scales_jet_terms() {
        let ode = FractalOde::new(p("y^(2α) + y"));
        let opts = ResidualOptions {
            on_shell: true,
            chi: 0.5,
        };
        let r = determining_residual(&ode, &gen("0", "cos(S(x))"), opts).unwrap();
        assert_eq!(r, p("0.5*cos(S(x))"));
    }
}
