use serde::{Deserialize, Serialize};

use super::set::child_step;
use super::{gamma_factor, CantorError, FractalSet, Interval};

/// How the staircase scales the raw self-similar mass.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Multiply by `Γ(γ+1)`, matching the coarse-grained measure.
    #[default]
    GammaFactor,
    /// No Γ factor: `S(d)` equals the raw mass.
    Unit,
}

impl Normalization {
    pub fn factor(self, gamma: f64) -> f64 {
        match self {
            Normalization::GammaFactor => gamma_factor(gamma),
            Normalization::Unit => 1.0,
        }
    }
}

/// Distribution of mass inside the deepest stored intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interior {
    /// γ is the similarity dimension: the construction continues below the
    /// stored depth and the staircase is that of the limit set.
    SelfSimilar,
    /// Mass spreads proportionally to length inside each stored interval.
    Uniform,
}

/// Integral staircase `S_F^γ(x)` anchored at `origin`.
///
/// Evaluation walks the construction digit by digit, so a query costs one
/// step per level. Mass per level-`n` interval is `norm * ℓ_n^γ`.
#[derive(Clone, Debug, Serialize)]
pub struct Staircase {
    #[serde(skip)]
    source: FractalSet,
    gamma: f64,
    origin: f64,
    normalization: f64,
    interior: Interior,
    total: f64,
    #[serde(skip)]
    origin_mass: f64,
}

const DIMENSION_MATCH: f64 = 1e-9;
const MAX_LEVELS: u32 = 200;
const ENDPOINT_SNAP: f64 = 1e-14;

impl Staircase {
    pub fn new(
        set: &FractalSet,
        gamma: f64,
        origin: f64,
        norm: Normalization,
    ) -> Result<Self, CantorError> {
        Self::with_scale(set, gamma, origin, norm.factor(gamma))
    }

    /// Staircase with an explicit normalization scalar.
    pub fn with_scale(
        set: &FractalSet,
        gamma: f64,
        origin: f64,
        normalization: f64,
    ) -> Result<Self, CantorError> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(CantorError::InvalidParameter(format!(
                "gamma must lie in (0, 1], got {gamma}"
            )));
        }
        if !(normalization > 0.0) || !normalization.is_finite() {
            return Err(CantorError::InvalidParameter(format!(
                "normalization must be positive, got {normalization}"
            )));
        }
        let b = set.bounds();
        if !b.contains(origin, set.tol()) {
            return Err(CantorError::InvalidParameter(format!(
                "origin {origin} outside bounds [{}, {}]",
                b.lo, b.hi
            )));
        }
        let self_similar = (gamma - set.similarity_dimension()).abs() <= DIMENSION_MATCH
            && (set.copies() as f64 * set.ratio()) < 1.0 - 1e-12;
        let interior = if self_similar {
            Interior::SelfSimilar
        } else {
            Interior::Uniform
        };
        let n = set.depth();
        let total =
            normalization * (set.copies() as f64).powi(n as i32) * set.level_length(n).powf(gamma);
        let mut s = Self {
            source: set.clone(),
            gamma,
            origin,
            normalization,
            interior,
            total,
            origin_mass: 0.0,
        };
        s.origin_mass = s.mass_below(origin);
        Ok(s)
    }

    pub fn source(&self) -> &FractalSet {
        &self.source
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn interior(&self) -> Interior {
        self.interior
    }

    /// Mass of the whole set, `S(d) - S(c)`.
    pub fn total_mass(&self) -> f64 {
        self.total
    }

    /// Mass carried by one cell at `level`.
    pub fn cell_mass(&self, level: u32) -> f64 {
        self.total / (self.source.copies() as f64).powi(level as i32)
    }

    /// Length of one cell at `level` (cells below the stored depth included).
    pub fn cell_length(&self, level: u32) -> f64 {
        let n = self.source.depth();
        match self.interior {
            Interior::Uniform if level > n => {
                self.source.level_length(n) / (self.source.copies() as f64).powi((level - n) as i32)
            }
            _ => self.source.level_length(level),
        }
    }

    /// `S(x)`; negative to the left of the origin.
    pub fn value(&self, x: f64) -> f64 {
        self.mass_below(x) - self.origin_mass
    }

    /// Cumulative mass from the left end of the bounds up to `x`.
    pub fn mass_below(&self, x: f64) -> f64 {
        let b = self.source.bounds();
        if x <= b.lo {
            return 0.0;
        }
        if x >= b.hi {
            return self.total;
        }
        let m = self.source.copies();
        let r = self.source.ratio();
        let floor_len = b.len() * 1e-15;
        // the staircase is only Hölder-γ, so rounding-level offsets from an
        // endpoint are snapped onto it
        let snap = b.len() * ENDPOINT_SNAP;
        let (mut a, mut len, mut w, mut acc) = (b.lo, b.len(), self.total, 0.0);
        for level in 0..MAX_LEVELS {
            let below_depth = level < self.source.depth();
            if !below_depth && (self.interior == Interior::Uniform || len < floor_len) {
                return acc + w * ((x - a) / len).clamp(0.0, 1.0);
            }
            let step = child_step(len, r, m);
            let i = (((x - a) / step).floor().max(0.0) as u32).min(m - 1);
            let lo = a + i as f64 * step;
            let child_w = w / m as f64;
            if x < lo + snap {
                return acc + i as f64 * child_w;
            }
            if x >= lo + len * r - snap {
                return acc + (i + 1) as f64 * child_w;
            }
            acc += i as f64 * child_w;
            a = lo;
            len *= r;
            w = child_w;
        }
        acc + w * ((x - a) / len).clamp(0.0, 1.0)
    }

    pub fn sample(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.value(x)).collect()
    }

    fn children(&self, level: u32, a: f64, len: f64) -> Vec<Interval> {
        let m = self.source.copies();
        if level >= self.source.depth() && self.interior == Interior::Uniform {
            let h = len / m as f64;
            return (0..m)
                .map(|j| Interval::new(a + j as f64 * h, a + (j + 1) as f64 * h))
                .collect();
        }
        let r = self.source.ratio();
        let step = child_step(len, r, m);
        (0..m)
            .map(|j| {
                let lo = a + j as f64 * step;
                Interval::new(lo, lo + len * r)
            })
            .collect()
    }

    fn collect_cells(
        &self,
        cell: Interval,
        level: u32,
        target: u32,
        x: Option<f64>,
        tol: f64,
        out: &mut Vec<Interval>,
    ) {
        if level == target {
            out.push(cell);
            return;
        }
        for child in self.children(level, cell.lo, cell.len()) {
            if x.is_none_or(|x| child.contains(x, tol)) {
                self.collect_cells(child, level + 1, target, x, tol, out);
            }
        }
    }

    /// Level-`level` cells containing `x` (at most two, when cells touch).
    pub fn cells_containing(&self, x: f64, level: u32) -> Vec<Interval> {
        let tol = self.source.tol().min(self.cell_length(level) * 1e-6);
        let b = self.source.bounds();
        let mut out = Vec::new();
        if b.contains(x, tol) {
            self.collect_cells(b, 0, level, Some(x), tol, &mut out);
        }
        out
    }

    /// All cells at `level`, left to right.
    pub fn cells(&self, level: u32) -> Vec<Interval> {
        let mut out = Vec::new();
        self.collect_cells(self.source.bounds(), 0, level, None, 0.0, &mut out);
        out
    }

    /// Whether `x` lies in a level-`level` cell, i.e. in the support seen at that resolution.
    pub fn in_support(&self, x: f64, level: u32) -> bool {
        !self.cells_containing(x, level).is_empty()
    }

    /// Characteristic function with the default `Γ(γ+1)` amplitude.
    pub fn characteristic(&self, z: f64) -> f64 {
        characteristic(&self.source, self.gamma, z)
    }
}

/// `χ_F(z)`: `Γ(γ+1)` on the set, zero off it.
pub fn characteristic(set: &FractalSet, gamma: f64, z: f64) -> f64 {
    characteristic_with_amplitude(set, gamma_factor(gamma), z)
}

pub fn characteristic_with_amplitude(set: &FractalSet, amplitude: f64, z: f64) -> f64 {
    if set.contains(z) {
        amplitude
    } else {
        0.0
    }
}
