use serde::{Deserialize, Serialize};

use super::CantorError;

/// Endpoint identity tolerance, relative to the ambient interval length.
pub(crate) const ENDPOINT_TOL: f64 = 1e-12;

/// Upper bound on the number of stored intervals.
const MAX_INTERVALS: u64 = 1 << 24;

/// A closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    pub fn translate(&self, by: f64) -> Self {
        Self::new(self.lo + by, self.hi + by)
    }

    pub fn scale(&self, by: f64) -> Self {
        Self::new(self.lo * by, self.hi * by)
    }
}

/// Finite-depth approximation of a self-similar Cantor-like set.
///
/// At depth `n` the set is the union of `copies^n` disjoint closed intervals
/// of length `(d - c) * ratio^n`. Each construction step replaces an interval
/// by `copies` evenly spaced children whose outer two touch the parent's
/// endpoints, so `(2, 1/3)` is the middle-third construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractalSet {
    copies: u32,
    ratio: f64,
    depth: u32,
    bounds: Interval,
    intervals: Vec<Interval>,
}

impl FractalSet {
    /// Builds the depth-`depth` iterate of the construction on `bounds`.
    pub fn build(
        copies: u32,
        ratio: f64,
        depth: u32,
        bounds: Interval,
    ) -> Result<Self, CantorError> {
        if copies < 2 {
            return Err(CantorError::InvalidParameter(format!(
                "copies must be >= 2, got {copies}"
            )));
        }
        if !(ratio > 0.0 && ratio <= 0.5) {
            return Err(CantorError::InvalidParameter(format!(
                "ratio must lie in (0, 1/2], got {ratio}"
            )));
        }
        if copies as f64 * ratio > 1.0 + 1e-12 {
            return Err(CantorError::InvalidParameter(format!(
                "copies * ratio = {} exceeds 1, children would overlap",
                copies as f64 * ratio
            )));
        }
        if !(bounds.lo.is_finite() && bounds.hi.is_finite()) || bounds.hi <= bounds.lo {
            return Err(CantorError::DegenerateInterval {
                c: bounds.lo,
                d: bounds.hi,
            });
        }
        let count = (copies as u64)
            .checked_pow(depth)
            .filter(|&n| n <= MAX_INTERVALS);
        if count.is_none() {
            return Err(CantorError::InvalidParameter(format!(
                "{copies}^{depth} intervals exceeds the supported maximum of {MAX_INTERVALS}"
            )));
        }

        let mut lows = vec![bounds.lo];
        let mut len = bounds.len();
        for _ in 0..depth {
            let step = child_step(len, ratio, copies);
            let mut next = Vec::with_capacity(lows.len() * copies as usize);
            for &a in &lows {
                for j in 0..copies {
                    next.push(a + j as f64 * step);
                }
            }
            lows = next;
            len *= ratio;
        }
        let intervals = lows
            .into_iter()
            .map(|a| Interval::new(a, a + len))
            .collect();
        Ok(Self {
            copies,
            ratio,
            depth,
            bounds,
            intervals,
        })
    }

    /// The middle-third Cantor construction on `[0, 1]`.
    pub fn middle_third(depth: u32) -> Self {
        Self::build(2, 1.0 / 3.0, depth, Interval::new(0.0, 1.0))
            .expect("valid middle-third parameters")
    }

    pub fn copies(&self) -> u32 {
        self.copies
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn bounds(&self) -> Interval {
        self.bounds
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    /// Length of every interval at construction level `level`.
    pub fn level_length(&self, level: u32) -> f64 {
        self.bounds.len() * self.ratio.powi(level as i32)
    }

    /// Similarity dimension `ln(copies) / ln(1/ratio)`.
    pub fn similarity_dimension(&self) -> f64 {
        (self.copies as f64).ln() / (1.0 / self.ratio).ln()
    }

    pub(crate) fn tol(&self) -> f64 {
        ENDPOINT_TOL * self.bounds.len()
    }

    /// Index of the interval containing `x` (closed, with endpoint tolerance).
    pub fn locate(&self, x: f64) -> Option<usize> {
        let tol = self.tol();
        let idx = self.intervals.partition_point(|iv| iv.hi + tol < x);
        (idx < self.intervals.len() && self.intervals[idx].contains(x, tol)).then_some(idx)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.locate(x).is_some()
    }

    /// The same construction stopped at `depth.min(self.depth)`.
    pub fn truncate(&self, depth: u32) -> Self {
        let depth = depth.min(self.depth);
        if depth == self.depth {
            return self.clone();
        }
        Self::build(self.copies, self.ratio, depth, self.bounds)
            .expect("parameters already validated")
    }

    /// `self + by`: every interval and the bounds shifted.
    pub fn translate(&self, by: f64) -> Self {
        Self {
            bounds: self.bounds.translate(by),
            intervals: self.intervals.iter().map(|iv| iv.translate(by)).collect(),
            ..self.clone()
        }
    }

    /// `by * self` for `by > 0`.
    pub fn scale(&self, by: f64) -> Self {
        assert!(by > 0.0, "scale factor must be positive");
        Self {
            bounds: self.bounds.scale(by),
            intervals: self.intervals.iter().map(|iv| iv.scale(by)).collect(),
            ..self.clone()
        }
    }

    /// Total length of the stored intervals.
    pub fn covered_length(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    /// Left and right endpoints of every interval, in increasing order.
    pub fn endpoints(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.intervals.len());
        for iv in &self.intervals {
            out.push(iv.lo);
            out.push(iv.hi);
        }
        out
    }

    pub fn left_endpoints(&self) -> Vec<f64> {
        self.intervals.iter().map(|iv| iv.lo).collect()
    }
}

/// Distance between the left ends of consecutive children.
pub(crate) fn child_step(len: f64, ratio: f64, copies: u32) -> f64 {
    len * (1.0 - ratio) / (copies - 1) as f64
}

/// Indicator of Definition-style intersection: 1 iff `k` meets the set.
pub fn indicator(set: &FractalSet, k: Interval) -> u8 {
    let tol = set.tol();
    let idx = set.intervals.partition_point(|iv| iv.hi + tol < k.lo);
    u8::from(idx < set.intervals.len() && set.intervals[idx].lo <= k.hi + tol)
}
