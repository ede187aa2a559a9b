//! Numeric F-limits, F^α-derivatives and F^α-integrals on a staircase, plus
//! the conjugacy solver for constant-coefficient linear fractal ODEs.

mod ode;
mod trajectory;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cantor::Staircase;

pub use ode::{solve_linear_fractal_ode, ConjugateSolution};
pub use trajectory::{staircase_gradient, Trajectory};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalculusError {
    #[error("F-limit at {x} did not settle below {tol} (last scatter {scatter})")]
    NoLimit { x: f64, tol: f64, scatter: f64 },
    #[error("every neighbour of {x} at level {level} has the same staircase value")]
    DegenerateDenominator { x: f64, level: u32 },
    #[error("non-finite sample f({x}) = {value}")]
    UnboundedSample { x: f64, value: f64 },
    #[error("expected {expected} initial values, got {got}")]
    InvalidOrder { expected: usize, got: usize },
    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),
    #[error("sample {x} is not in the set")]
    OffSet { x: f64 },
    #[error("invalid window [{c}, {d}]")]
    InvalidWindow { c: f64, d: f64 },
    #[error("malformed trajectory: {0}")]
    MalformedTrajectory(String),
}

/// A real function on the set, `k: F → ℝ`.
pub struct FractalFn {
    label: String,
    eval: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl FractalFn {
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            eval: Box::new(eval),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }
}

impl fmt::Debug for FractalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FractalFn")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

/// Finest level used when approaching a point.
const MAX_LIMIT_LEVEL: u32 = 60;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LimitEstimate {
    pub value: f64,
    /// Spread between the last two refinement levels.
    pub scatter: f64,
    pub level: u32,
}

/// Nearest cell endpoints strictly left and right of `x` at `level`.
fn neighbours(s: &Staircase, x: f64, level: u32) -> (Option<f64>, Option<f64>) {
    let cells = s.cells_containing(x, level);
    // same relative tolerance as cell membership, so a rounded endpoint is not its own neighbour
    let tol = s.cell_length(level) * 1e-6;
    let mut left: Option<f64> = None;
    let mut right: Option<f64> = None;
    for c in cells {
        for p in [c.lo, c.hi] {
            if p < x - tol {
                left = Some(left.map_or(p, |l| l.max(p)));
            } else if p > x + tol {
                right = Some(right.map_or(p, |r| r.min(p)));
            }
        }
    }
    (left, right)
}

/// `F-lim_{y→x} f(y)` over set points approaching `x`; `f(x)` itself is never used.
///
/// The estimate at each level is the mean of `f` at the nearest cell
/// endpoints; successive levels are Aitken-accelerated. The limit is accepted
/// once both the neighbour spread and the level-to-level change stay below
/// `tol` for three consecutive levels.
pub fn f_limit(
    f: &FractalFn,
    s: &Staircase,
    x: f64,
    tol: f64,
) -> Result<LimitEstimate, CalculusError> {
    if !s.in_support(x, s.source().depth()) {
        return Err(CalculusError::OffSet { x });
    }
    let floor = s.source().bounds().len() * 1e-13;
    let mut history: Vec<f64> = Vec::new();
    let mut settled = 0;
    let mut scatter = f64::INFINITY;
    for level in 1..=MAX_LIMIT_LEVEL {
        if s.cell_length(level) < floor {
            break;
        }
        let (l, r) = neighbours(s, x, level);
        let vals: Vec<f64> = [l, r].into_iter().flatten().map(|p| f.eval(p)).collect();
        if vals.is_empty() {
            continue;
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let spread = vals.iter().fold(0.0f64, |acc, v| acc.max((v - mean).abs()));
        let change = history
            .last()
            .map_or(f64::INFINITY, |prev| (mean - prev).abs());
        history.push(mean);
        scatter = spread.max(change);
        if scatter < tol {
            settled += 1;
            if settled >= 3 {
                return Ok(LimitEstimate {
                    value: aitken(&history),
                    scatter,
                    level,
                });
            }
        } else {
            settled = 0;
        }
    }
    Err(CalculusError::NoLimit { x, tol, scatter })
}

fn aitken(h: &[f64]) -> f64 {
    let n = h.len();
    let last = h[n - 1];
    if n < 3 {
        return last;
    }
    let (a, b, c) = (h[n - 3], h[n - 2], last);
    let denom = (c - b) - (b - a);
    if denom.abs() <= 1e-300 || ((c - b) / (b - a)).abs() >= 0.95 || !(b - a).is_normal() {
        return last;
    }
    let acc = c - (c - b) * (c - b) / denom;
    if acc.is_finite() {
        acc
    } else {
        last
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DerivativeEstimate {
    pub value: f64,
    /// Magnitude of the Richardson correction.
    pub error: f64,
    /// `x` lies outside the set; the value is 0 by definition.
    pub off_set: bool,
    pub one_sided: bool,
}

struct Quotient {
    value: f64,
    /// Leading error scale: the step for one-sided, the product of steps for two-sided.
    scale: f64,
    two_sided: bool,
}

fn quotient(
    f: &FractalFn,
    s: &Staircase,
    x: f64,
    fx: f64,
    sx: f64,
    level: u32,
) -> Option<Quotient> {
    let (l, r) = neighbours(s, x, level);
    let left = l.map(|p| (sx - s.value(p), p)).filter(|(h, _)| *h > 0.0);
    let right = r.map(|p| (s.value(p) - sx, p)).filter(|(h, _)| *h > 0.0);
    match (left, right) {
        (Some((hl, pl)), Some((hr, pr))) => {
            let ql = (fx - f.eval(pl)) / hl;
            let qr = (f.eval(pr) - fx) / hr;
            Some(Quotient {
                value: (hl * qr + hr * ql) / (hl + hr),
                scale: hl * hr,
                two_sided: true,
            })
        }
        (Some((h, p)), None) => Some(Quotient {
            value: (fx - f.eval(p)) / h,
            scale: h,
            two_sided: false,
        }),
        (None, Some((h, p))) => Some(Quotient {
            value: (f.eval(p) - fx) / h,
            scale: h,
            two_sided: false,
        }),
        (None, None) => None,
    }
}

/// `D_F^γ f(x)` by staircase difference quotients at levels `window` and
/// `window + 1`, Richardson-extrapolated. Off the set the value is 0.
pub fn fractal_derivative(
    f: &FractalFn,
    s: &Staircase,
    x: f64,
    window: u32,
) -> Result<DerivativeEstimate, CalculusError> {
    if !s.in_support(x, window + 1) {
        return Ok(DerivativeEstimate {
            value: 0.0,
            error: 0.0,
            off_set: true,
            one_sided: false,
        });
    }
    let fx = f.eval(x);
    let sx = s.value(x);
    let coarse = quotient(f, s, x, fx, sx, window);
    let fine =
        quotient(f, s, x, fx, sx, window + 1).ok_or(CalculusError::DegenerateDenominator {
            x,
            level: window + 1,
        })?;
    let one_sided = !fine.two_sided;
    let (value, error) = match coarse {
        Some(c) if c.two_sided == fine.two_sided && c.scale > fine.scale => {
            let rho = fine.scale / c.scale;
            let correction = (fine.value - c.value) * rho / (1.0 - rho);
            (fine.value + correction, correction.abs())
        }
        Some(c) => (fine.value, (fine.value - c.value).abs()),
        None => (fine.value, f64::NAN),
    };
    Ok(DerivativeEstimate {
        value,
        error,
        off_set: false,
        one_sided,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct IntegralEstimate {
    /// Midpoint-rule value.
    pub value: f64,
    /// Lower Darboux-type sum over the same cells.
    pub lower: f64,
    pub upper: f64,
    pub level: u32,
}

impl IntegralEstimate {
    pub fn bracket_width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Default resolution for integrals: the stored depth, refined to at least
/// level 10 while keeping the cell count manageable.
pub fn default_level(s: &Staircase) -> u32 {
    let m = s.source().copies() as f64;
    let cap = (20.0 * 2f64.ln() / m.ln()).floor() as u32;
    s.source().depth().max(10.min(cap))
}

/// `∫_c^d f d_F^γ x` at [`default_level`].
pub fn fractal_integral(
    f: &FractalFn,
    s: &Staircase,
    c: f64,
    d: f64,
) -> Result<IntegralEstimate, CalculusError> {
    fractal_integral_at_level(f, s, c, d, default_level(s))
}

/// Riemann–Stieltjes sums against staircase increments over the level-`level` cells.
pub fn fractal_integral_at_level(
    f: &FractalFn,
    s: &Staircase,
    c: f64,
    d: f64,
    level: u32,
) -> Result<IntegralEstimate, CalculusError> {
    let b = s.source().bounds();
    if !(d >= c) || c < b.lo - 1e-12 * b.len() || d > b.hi + 1e-12 * b.len() {
        return Err(CalculusError::InvalidWindow { c, d });
    }
    let sample = |x: f64| {
        let v = f.eval(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CalculusError::UnboundedSample { x, value: v })
        }
    };
    let (mut value, mut lower, mut upper) = (0.0, 0.0, 0.0);
    for cell in s.cells(level) {
        let a = cell.lo.max(c);
        let e = cell.hi.min(d);
        if e <= a {
            continue;
        }
        let ds = s.value(e) - s.value(a);
        if ds == 0.0 {
            continue;
        }
        let mid = 0.5 * (a + e);
        let (fa, fm, fe) = (sample(a)?, sample(mid)?, sample(e)?);
        value += fm * ds;
        lower += fa.min(fm).min(fe) * ds;
        upper += fa.max(fm).max(fe) * ds;
    }
    Ok(IntegralEstimate {
        value,
        lower,
        upper,
        level,
    })
}
