use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::{Atom, Poly};

/// Number of random points used by the probabilistic zero test.
pub const PROBE_POINTS: usize = 32;
pub const PROBE_SEED: u64 = 0x5eed_a1fa;

/// Relative residual below which a probe value counts as zero.
const PROBE_TOL: f64 = 1e-9;

/// Numeric bindings for jet coordinates.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct JetPoint(BTreeMap<Atom, f64>);

impl JetPoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, atom: Atom, value: f64) -> Self {
        self.0.insert(atom, value);
        self
    }

    pub fn set(&mut self, atom: Atom, value: f64) {
        self.0.insert(atom, value);
    }

    pub fn get(&self, atom: &Atom) -> Option<f64> {
        self.0.get(atom).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, f64)> {
        self.0.iter().map(|(a, v)| (a, *v))
    }
}

fn probe_points(p: &Poly) -> impl Iterator<Item = JetPoint> {
    probe_points_for(p.atoms().into_iter().collect())
}

/// The seeded probe points over an explicit atom list.
pub(crate) fn probe_points_for(atoms: Vec<Atom>) -> impl Iterator<Item = JetPoint> {
    let mut rng = StdRng::seed_from_u64(PROBE_SEED);
    (0..PROBE_POINTS).map(move |_| {
        let mut point = JetPoint::new();
        for a in &atoms {
            point.set(a.clone(), rng.gen_range(0.2..1.3));
        }
        point
    })
}

/// Normalization followed by a randomized check at [`PROBE_POINTS`] seeded points.
///
/// Points where evaluation fails are skipped; if every point fails the
/// expression is not declared zero.
pub fn is_zero(p: &Poly) -> bool {
    if p.is_zero() {
        return true;
    }
    let mut evaluated = 0;
    for point in probe_points(p) {
        let (Ok(v), Ok(scale)) = (p.eval(&point), p.eval_abs_terms(&point)) else {
            continue;
        };
        if v.abs() > PROBE_TOL * scale.max(1.0) {
            return false;
        }
        evaluated += 1;
    }
    evaluated > 0
}

/// Largest absolute value over the probe points (0 for the zero polynomial).
pub fn probe_norm(p: &Poly) -> f64 {
    probe_points(p)
        .filter_map(|pt| p.eval(&pt).ok())
        .fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn probing_detects_identities_missed_by_normalization() {
        // (a + b)/(a + b) is not reduced by normalization
        let p = parse("(S(x) + y)*(S(x) + y)^(-1) - 1").unwrap().to_poly();
        assert!(!p.is_zero());
        assert!(is_zero(&p));
        assert!(!is_zero(&parse("S(x) - y").unwrap().to_poly()));
    }

    #[test]
    fn probe_norm_of_nonzero() {
        assert!(probe_norm(&parse("S(x)").unwrap().to_poly()) > 0.2);
        assert_eq!(probe_norm(&Poly::zero()), 0.0);
    }

    #[test]
    fn evaluate_examples() {
        let p = JetPoint::new().with(Atom::Sx, 0.25).with(Atom::Sy, 0.5);
        assert_eq!(parse("S(x) + S(y)").unwrap().evaluate(&p).unwrap(), 0.75);
    }
}
