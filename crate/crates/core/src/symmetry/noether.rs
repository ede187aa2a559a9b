use serde::Serialize;

use super::SymmetryError;
use crate::calculus::{staircase_gradient, Trajectory};
use crate::expr::{partial_poly, Atom, Poly, Var};

/// `L(t, q, q^(α))` with a Noether infinitesimal `η` and gauge term `f`.
///
/// `q` is the jet atom `y`, `q^(α)` is `y^(α)`, and time enters through `S(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lagrangian {
    l: Poly,
    eta: Poly,
    f: Poly,
}

impl Lagrangian {
    /// Gauge term `f = 0`.
    pub fn new(l: Poly, eta: Poly) -> Result<Self, SymmetryError> {
        Self::with_gauge(l, eta, Poly::zero())
    }

    pub fn with_gauge(l: Poly, eta: Poly, f: Poly) -> Result<Self, SymmetryError> {
        if l.jet_order() > 1 {
            return Err(SymmetryError::LagrangianOrder);
        }
        Ok(Self { l, eta, f })
    }

    /// Time translation in `S(t)`: `η = q^(α)`, `f = L`, so `J = p q^(α) - L`.
    pub fn energy(l: Poly) -> Result<Self, SymmetryError> {
        let f = l.clone();
        Self::with_gauge(l, Poly::atom(Atom::Jet(1)), f)
    }

    pub fn l(&self) -> &Poly {
        &self.l
    }

    pub fn eta(&self) -> &Poly {
        &self.eta
    }

    pub fn gauge(&self) -> &Poly {
        &self.f
    }

    /// `∂L/∂q^(α)`.
    pub fn momentum(&self) -> Poly {
        partial_poly(&self.l, Var::Jet(1))
    }

    /// `J = (∂L/∂q^(α)) η - f`.
    pub fn current(&self) -> Poly {
        self.momentum().mul(&self.eta).sub(&self.f)
    }
}

fn eval_column(p: &Poly, traj: &Trajectory) -> Result<Vec<f64>, SymmetryError> {
    (0..traj.len())
        .map(|i| {
            p.eval(&traj.jet_point(i))
                .map_err(|source| SymmetryError::Evaluation { index: i, source })
        })
        .collect()
}

fn require_velocity(traj: &Trajectory) -> Result<(), SymmetryError> {
    if traj.order() < 1 {
        return Err(SymmetryError::MissingColumns(crate::expr::jet_name(1)));
    }
    Ok(())
}

/// `max |D^α(∂L/∂q^(α)) - ∂L/∂q|` over interior samples, with the outer
/// derivative taken numerically against the staircase.
pub fn euler_lagrange_residual(lag: &Lagrangian, traj: &Trajectory) -> Result<f64, SymmetryError> {
    require_velocity(traj)?;
    let p = eval_column(&lag.momentum(), traj)?;
    let force = eval_column(&partial_poly(&lag.l, Var::Y), traj)?;
    let dp = staircase_gradient(&traj.staircase, &p);
    Ok(dp
        .iter()
        .zip(&force)
        .filter_map(|(d, f)| d.map(|d| (d - f).abs()))
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, Serialize)]
pub struct NoetherReport {
    pub current_expr: String,
    /// `J` sampled along the trajectory as its `y` column.
    pub current: Trajectory,
    /// `max |D^α J|` over interior samples.
    pub drift: f64,
    /// `max J - min J`.
    pub spread: f64,
    pub euler_lagrange_residual: f64,
}

/// Samples `J` along a solution; refuses trajectories whose Euler-Lagrange
/// residual exceeds `tol`.
pub fn noether_current(
    lag: &Lagrangian,
    traj: &Trajectory,
    tol: f64,
) -> Result<NoetherReport, SymmetryError> {
    let residual = euler_lagrange_residual(lag, traj)?;
    if residual > tol || residual.is_nan() {
        return Err(SymmetryError::NonSolution { residual, tol });
    }
    let j_expr = lag.current();
    let j = eval_column(&j_expr, traj)?;
    let drift = staircase_gradient(&traj.staircase, &j)
        .into_iter()
        .flatten()
        .map(f64::abs)
        .fold(0.0, f64::max);
    let (lo, hi) = j
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let current = Trajectory::new(traj.xs.clone(), traj.staircase.clone(), vec![j])
        .expect("same abscissae as a valid trajectory")
        .with_metadata("current", j_expr.to_string());
    Ok(NoetherReport {
        current_expr: j_expr.to_string(),
        current,
        drift,
        spread: if hi >= lo { hi - lo } else { 0.0 },
        euler_lagrange_residual: residual,
    })
}
