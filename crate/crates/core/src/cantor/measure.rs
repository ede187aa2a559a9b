//! Coarse-grained γ-measure over construction-aligned partitions, its
//! depth-indexed limit, and the ν-dimension estimate.
//!
//! The infimum over all partitions of mesh at most ε is taken over a finite
//! family: for every construction level `j` the partition whose breakpoints
//! are the level-`j` interval endpoints inside `[c, d]`, each piece uniformly
//! refined until it is no longer than the mesh. Pieces that meet the set only
//! in a boundary point are not counted; such slivers can be made arbitrarily
//! short, so the infimum assigns them nothing.

use serde::Serialize;

use super::{gamma_factor, CantorError, FractalSet};

/// Lengths (with multiplicity) of the pieces that meet the set, per level.
#[derive(Clone, Debug)]
pub struct MeasureProfile {
    levels: Vec<Vec<(f64, u64)>>,
}

impl MeasureProfile {
    pub fn new(set: &FractalSet, c: f64, d: f64, mesh: f64) -> Result<Self, CantorError> {
        check_window(set, c, d)?;
        if !(mesh > 0.0) || !mesh.is_finite() {
            return Err(CantorError::InvalidParameter(format!(
                "mesh must be positive, got {mesh}"
            )));
        }
        let tol = set.tol();
        let intervals = set.intervals();
        let n = set.depth();
        let m = set.copies() as usize;

        let mut levels = Vec::with_capacity(n as usize + 1);
        for j in 0..=n {
            let block = m.pow(n - j);
            let mut pieces: Vec<(f64, u64)> = Vec::new();
            for members in intervals.chunks(block) {
                let a = members[0].lo.max(c);
                let b = members[members.len() - 1].hi.min(d);
                if b - a <= tol {
                    continue;
                }
                let count = ((b - a) / mesh - 1e-9).ceil().max(1.0) as u64;
                let h = (b - a) / count as f64;
                let mut idx = 0;
                let mut hits = 0u64;
                for q in 0..count {
                    let lo = a + q as f64 * h;
                    let hi = lo + h;
                    while idx < members.len() && members[idx].hi <= lo + tol {
                        idx += 1;
                    }
                    if idx == members.len() {
                        break;
                    }
                    if members[idx].lo < hi - tol {
                        hits += 1;
                    }
                }
                if hits > 0 {
                    pieces.push((h, hits));
                }
            }
            levels.push(merge_lengths(pieces));
        }
        Ok(Self { levels })
    }

    /// Minimum over the partition family of `Σ Γ(γ+1) h^γ`.
    pub fn eval(&self, gamma: f64) -> f64 {
        let best = self
            .levels
            .iter()
            .map(|pieces| {
                pieces
                    .iter()
                    .map(|&(h, k)| k as f64 * h.powf(gamma))
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        gamma_factor(gamma) * best
    }
}

fn merge_lengths(mut pieces: Vec<(f64, u64)>) -> Vec<(f64, u64)> {
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, u64)> = Vec::with_capacity(pieces.len().min(16));
    for (h, k) in pieces {
        match out.last_mut() {
            Some(last) if (last.0 - h).abs() <= 1e-13 * h => last.1 += k,
            _ => out.push((h, k)),
        }
    }
    out
}

fn check_window(set: &FractalSet, c: f64, d: f64) -> Result<(), CantorError> {
    if !(d > c) {
        return Err(CantorError::DegenerateInterval { c, d });
    }
    let b = set.bounds();
    let tol = set.tol();
    if c < b.lo - tol || d > b.hi + tol {
        return Err(CantorError::OutOfBounds {
            c,
            d,
            lo: b.lo,
            hi: b.hi,
        });
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<(), CantorError> {
    if gamma > 0.0 && gamma <= 1.0 {
        Ok(())
    } else {
        Err(CantorError::InvalidParameter(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )))
    }
}

/// Coarse-grained measure `μ_ε^γ(F, c, d)` with `ε = mesh`.
pub fn coarse_measure(
    set: &FractalSet,
    gamma: f64,
    c: f64,
    d: f64,
    mesh: f64,
) -> Result<f64, CantorError> {
    check_gamma(gamma)?;
    Ok(MeasureProfile::new(set, c, d, mesh)?.eval(gamma))
}

/// The ε → 0 limit approximated from the last three construction scales.
#[derive(Clone, Debug, Serialize)]
pub struct MeasureLimit {
    pub value: f64,
    /// Measures at meshes `ℓ_{n-2}, ℓ_{n-1}, ℓ_n` (fewer when the depth is small).
    pub samples: Vec<f64>,
    /// Magnitude of the last change between scales.
    pub convergence: f64,
}

pub fn measure_limit(
    set: &FractalSet,
    gamma: f64,
    c: f64,
    d: f64,
) -> Result<MeasureLimit, CantorError> {
    check_gamma(gamma)?;
    let n = set.depth();
    let samples = (n.saturating_sub(2)..=n)
        .map(|k| coarse_measure(set, gamma, c, d, set.level_length(k)))
        .collect::<Result<Vec<_>, _>>()?;
    let last = *samples.last().expect("at least one scale");
    let (value, convergence) = match samples.as_slice() {
        [v0, v1, v2] => {
            let (d1, d2) = (v1 - v0, v2 - v1);
            let value = if d1.abs() > f64::MIN_POSITIVE && (d2 / d1).abs() < 0.95 {
                let q = d2 / d1;
                v2 + d2 * q / (1.0 - q)
            } else {
                *v2
            };
            (value, d2.abs())
        }
        [v0, v1] => (*v1, (v1 - v0).abs()),
        _ => (last, 0.0),
    };
    Ok(MeasureLimit {
        value,
        samples,
        convergence,
    })
}

/// Result of the ν-dimension bisection.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DimensionEstimate {
    pub gamma: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Slope threshold separating growth from non-growth of `ln μ_k`.
const SLOPE_EPS: f64 = 1e-9;

/// Estimates `inf{γ : μ^γ(F, c, d) = 0}`.
///
/// For each scale `k` the set truncated at depth `k` is measured at mesh
/// `ℓ_k`; the least-squares slope of `ln μ_k(γ)` against `k` is positive
/// below the dimension and non-positive above it. The sign change is
/// located by bisection to within `tol`.
pub fn estimate_dimension(
    set: &FractalSet,
    c: f64,
    d: f64,
    tol: f64,
) -> Result<DimensionEstimate, CantorError> {
    if !(tol > 0.0) {
        return Err(CantorError::InvalidParameter(format!(
            "tol must be positive, got {tol}"
        )));
    }
    check_window(set, c, d)?;
    let top = set.depth().max(4);
    let profiles = (0..=top)
        .map(|k| MeasureProfile::new(&set.truncate(k), c, d, set.level_length(k)))
        .collect::<Result<Vec<_>, _>>()?;

    let slope = |gamma: f64| -> Result<f64, CantorError> {
        let logs = profiles
            .iter()
            .map(|p| {
                let mu = p.eval(gamma);
                if mu > 0.0 {
                    Ok(mu.ln())
                } else {
                    Err(CantorError::EmptyWindow { c, d })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(least_squares_slope(&logs))
    };

    if slope(1.0)? > SLOPE_EPS {
        return Err(CantorError::NoTransition);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if slope(1e-6)? <= SLOPE_EPS {
        return Ok(DimensionEstimate {
            gamma: 0.0,
            lower: 0.0,
            upper: 1e-6,
        });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if slope(mid)? > SLOPE_EPS {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(DimensionEstimate {
        gamma: 0.5 * (lo + hi),
        lower: lo,
        upper: hi,
    })
}

fn least_squares_slope(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let mean_x = (n - 1.0) / 2.0;
    let mean_y = ys.iter().sum::<f64>() / n;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - mean_x;
        num += dx * (y - mean_y);
        den += dx * dx;
    }
    num / den
}
