use serde::Serialize;

use super::CalculusError;
use crate::expr::{Atom, JetPoint};

/// Sampled solution `y(x)` with its staircase values and derivative columns.
///
/// `columns[0]` holds `y`, `columns[k]` holds `y^(kα)`.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub xs: Vec<f64>,
    pub staircase: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
    /// Free-form provenance pairs written into exported headers.
    pub metadata: Vec<(String, String)>,
}

impl Trajectory {
    pub fn new(
        xs: Vec<f64>,
        staircase: Vec<f64>,
        columns: Vec<Vec<f64>>,
    ) -> Result<Self, CalculusError> {
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CalculusError::MalformedTrajectory(
                "abscissae must be strictly increasing".into(),
            ));
        }
        if staircase.len() != xs.len() || columns.iter().any(|c| c.len() != xs.len()) {
            return Err(CalculusError::MalformedTrajectory(
                "all columns must have the same length".into(),
            ));
        }
        if columns.is_empty() {
            return Err(CalculusError::MalformedTrajectory(
                "at least the y column is required".into(),
            ));
        }
        Ok(Self {
            xs,
            staircase,
            columns,
            metadata: Vec::new(),
        })
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.push((key.into(), value.into()));
        self
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn y(&self) -> &[f64] {
        &self.columns[0]
    }

    /// Highest derivative order carried.
    pub fn order(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn column(&self, k: usize) -> Option<&[f64]> {
        self.columns.get(k).map(Vec::as_slice)
    }

    /// Jet coordinates at sample `i`: `S(x)`, `y` and every derivative column.
    pub fn jet_point(&self, i: usize) -> JetPoint {
        let mut p = JetPoint::new()
            .with(Atom::Sx, self.staircase[i])
            .with(Atom::Y, self.columns[0][i]);
        for (k, col) in self.columns.iter().enumerate().skip(1) {
            p = p.with(Atom::Jet(k as u32), col[i]);
        }
        p
    }

    pub fn column_names(&self) -> Vec<String> {
        let mut names = vec!["x".to_string(), "S(x)".to_string(), "y".to_string()];
        for k in 1..self.columns.len() {
            names.push(crate::expr::jet_name(k as u32));
        }
        names
    }
}

/// Derivative with respect to the staircase of sampled values.
///
/// Samples sharing a staircase value (the two ends of a gap) collapse to one
/// node; interior nodes use the three-point non-uniform formula. Entries for
/// the first and last node are `None`.
pub fn staircase_gradient(staircase: &[f64], values: &[f64]) -> Vec<Option<f64>> {
    assert_eq!(staircase.len(), values.len());
    let scale = staircase
        .iter()
        .fold(0.0f64, |a, s| a.max(s.abs()))
        .max(1.0);
    let mut nodes: Vec<(f64, f64, usize)> = Vec::new();
    let mut node_of = Vec::with_capacity(staircase.len());
    for (&s, &v) in staircase.iter().zip(values) {
        match nodes.last_mut() {
            Some((ls, lv, n)) if (s - *ls).abs() <= 1e-14 * scale => {
                *lv = (*lv * *n as f64 + v) / (*n + 1) as f64;
                *n += 1;
            }
            _ => nodes.push((s, v, 1)),
        }
        node_of.push(nodes.len() - 1);
    }
    let grads: Vec<Option<f64>> = (0..nodes.len())
        .map(|i| {
            if i == 0 || i + 1 == nodes.len() {
                return None;
            }
            let (s0, f0, _) = nodes[i - 1];
            let (s1, f1, _) = nodes[i];
            let (s2, f2, _) = nodes[i + 1];
            let (h1, h2) = (s1 - s0, s2 - s1);
            Some(
                -h2 / (h1 * (h1 + h2)) * f0
                    + (h2 - h1) / (h1 * h2) * f1
                    + h1 / (h2 * (h1 + h2)) * f2,
            )
        })
        .collect();
    node_of.into_iter().map(|i| grads[i]).collect()
}
