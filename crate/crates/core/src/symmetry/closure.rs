use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::Generator;
use crate::expr::{probe_norm, probe_points_for, Atom, Poly};
use crate::forms::{lie_bracket, VectorField};

/// Relative least-squares residual below which a bracket counts as closing.
const CLOSURE_TOL: f64 = 1e-8;

/// `[V_i, V_j]` expanded against the basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub bracket: String,
    pub coefficients: Vec<f64>,
    /// Probe norm of `[V_i, V_j] - Σ c_k V_k` after normalization.
    pub residual: f64,
    pub closes: bool,
}

/// Brackets every pair of generators and fits each against the whole set by
/// least squares over seeded probe points.
pub fn closure_report(gens: &[Generator]) -> Vec<BracketEntry> {
    let fields: Vec<VectorField> = gens.iter().map(Generator::vector_field).collect();
    let mut out = Vec::new();
    for i in 0..fields.len() {
        for j in i + 1..fields.len() {
            let b = lie_bracket(&fields[i], &fields[j]).expect("generators share coordinates");
            out.push(fit(i, j, &b, &fields));
        }
    }
    out
}

fn fit(i: usize, j: usize, b: &VectorField, basis: &[VectorField]) -> BracketEntry {
    let mut atoms: BTreeSet<Atom> = BTreeSet::new();
    for v in basis.iter().chain(std::iter::once(b)) {
        for c in v.components() {
            atoms.extend(c.atoms());
        }
    }
    let points: Vec<_> = probe_points_for(atoms.into_iter().collect()).collect();
    let comps = b.components().len();
    let rows = points.len() * comps;
    let mut a = DMatrix::<f64>::zeros(rows, basis.len());
    let mut rhs = DVector::<f64>::zeros(rows);
    for (pi, pt) in points.iter().enumerate() {
        for c in 0..comps {
            let r = pi * comps + c;
            rhs[r] = b.components()[c].eval(pt).unwrap_or(f64::NAN);
            for (k, v) in basis.iter().enumerate() {
                a[(r, k)] = v.components()[c].eval(pt).unwrap_or(f64::NAN);
            }
        }
    }
    let coefficients: Vec<f64> = a
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map(|x| {
            x.iter()
                .map(|&c| if c.abs() < 1e-12 { 0.0 } else { c })
                .collect()
        })
        .unwrap_or_else(|_| vec![f64::NAN; basis.len()]);

    let mut diff = b.components().to_vec();
    for (v, &c) in basis.iter().zip(&coefficients) {
        for (d, comp) in diff.iter_mut().zip(v.components()) {
            *d = d.sub(&comp.scale(c));
        }
    }
    let residual = diff.iter().map(probe_norm).fold(0.0, f64::max);
    let scale = b.components().iter().map(probe_norm).fold(1.0, f64::max);
    let closes = diff.iter().all(Poly::is_zero) || residual <= CLOSURE_TOL * scale;
    BracketEntry {
        i,
        j,
        bracket: b.to_string(),
        coefficients,
        residual,
        closes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn gen(xi: &str, phi: &str) -> Generator {
        Generator::new(parse(xi).unwrap().to_poly(), parse(phi).unwrap().to_poly()).unwrap()
    }

    #[test]
    fn oscillator_algebra_with_scaling_closes() {
        let gens = [
            gen("1", "0"),
            gen("0", "y"),
            gen("0", "cos(S(x))"),
            gen("0", "sin(S(x))"),
        ];
        let report = closure_report(&gens);
        assert_eq!(report.len(), 6);
        assert!(report.iter().all(|e| e.closes), "{report:?}");
        // [∂x, cos ∂y] = -sin ∂y
        let e = &report[1];
        assert_eq!((e.i, e.j), (0, 2));
        assert!((e.coefficients[3] + 1.0).abs() < 1e-10);
    }

    #[test]
    fn open_brackets_are_reported() {
        let gens = [gen("1", "0"), gen("S(x)^2", "0")];
        let report = closure_report(&gens);
        assert!(!report[0].closes);
        assert!(report[0].residual > 1e-3);
    }
}
