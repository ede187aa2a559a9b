//! Constant-coefficient linear fractal ODEs
//! `a_n y^(nα) + … + a_1 y^(α) + a_0 y = 0`, solved through the staircase
//! conjugacy `y(x) = Y(S(x))` where `Y` solves the classical equation in `S`.

use super::{CalculusError, Trajectory};
use crate::cantor::Staircase;

/// Classical solution `Y(s)` of the companion system, evaluated by matrix exponential.
#[derive(Clone, Debug)]
pub struct ConjugateSolution {
    coeffs: Vec<f64>,
    companion: Vec<Vec<f64>>,
    initial: Vec<f64>,
}

impl ConjugateSolution {
    /// `coeffs = [a_0, …, a_n]`, `initial = [y, y^(α), …, y^((n-1)α)]` at the origin.
    pub fn new(coeffs: &[f64], initial: &[f64]) -> Result<Self, CalculusError> {
        if coeffs.len() < 2 {
            return Err(CalculusError::InvalidCoefficients(
                "need at least a_0 and a_1".into(),
            ));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(CalculusError::InvalidCoefficients(
                "coefficients must be finite".into(),
            ));
        }
        let n = coeffs.len() - 1;
        let lead = coeffs[n];
        if lead == 0.0 {
            return Err(CalculusError::InvalidCoefficients(
                "leading coefficient a_n is zero".into(),
            ));
        }
        if initial.len() != n {
            return Err(CalculusError::InvalidOrder {
                expected: n,
                got: initial.len(),
            });
        }
        let mut companion = vec![vec![0.0; n]; n];
        for (i, row) in companion.iter_mut().enumerate().take(n - 1) {
            row[i + 1] = 1.0;
        }
        for j in 0..n {
            companion[n - 1][j] = -coeffs[j] / lead;
        }
        Ok(Self {
            coeffs: coeffs.to_vec(),
            companion,
            initial: initial.to_vec(),
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `[Y, Y', …, Y^(n)]` at staircase value `s`.
    pub fn jet_at(&self, s: f64) -> Vec<f64> {
        let n = self.order();
        let a: Vec<Vec<f64>> = self
            .companion
            .iter()
            .map(|row| row.iter().map(|v| v * s).collect())
            .collect();
        let e = expm(&a);
        let mut state: Vec<f64> = e
            .iter()
            .map(|row| row.iter().zip(&self.initial).map(|(r, z)| r * z).sum())
            .collect();
        let top = -state
            .iter()
            .zip(&self.coeffs)
            .map(|(z, c)| z * c)
            .sum::<f64>()
            / self.coeffs[n];
        state.push(top);
        state
    }

    pub fn value_at(&self, s: f64) -> f64 {
        self.jet_at(s)[0]
    }
}

/// Samples `y, y^(α), …, y^(nα)` at the set points `xs`.
pub fn solve_linear_fractal_ode(
    coeffs: &[f64],
    s: &Staircase,
    initial: &[f64],
    xs: &[f64],
) -> Result<Trajectory, CalculusError> {
    let sol = ConjugateSolution::new(coeffs, initial)?;
    if let Some(&x) = xs.iter().find(|&&x| !s.source().contains(x)) {
        return Err(CalculusError::OffSet { x });
    }
    let n = sol.order();
    let staircase = s.sample(xs);
    let mut columns = vec![Vec::with_capacity(xs.len()); n + 1];
    for &u in &staircase {
        for (col, v) in columns.iter_mut().zip(sol.jet_at(u)) {
            col.push(v);
        }
    }
    let coeff_list = coeffs
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(" ");
    Ok(Trajectory::new(xs.to_vec(), staircase, columns)?
        .with_metadata(
            "assumption",
            "y(x) = Y(S(x)) with Y solving the classical equation in S",
        )
        .with_metadata("coefficients", coeff_list))
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// Matrix exponential by scaling and squaring of a Taylor series.
fn expm(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let norm = a
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scale = 2f64.powi(-squarings);
    let scaled: Vec<Vec<f64>> = a
        .iter()
        .map(|row| row.iter().map(|v| v * scale).collect())
        .collect();

    let mut result: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(i == j)).collect())
        .collect();
    let mut term = result.clone();
    for k in 1..=30 {
        term = mat_mul(&term, &scaled);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
        }
        let mut biggest = 0.0f64;
        for (r, t) in result.iter_mut().zip(&term) {
            for (rv, tv) in r.iter_mut().zip(t) {
                *rv += tv;
                biggest = biggest.max(tv.abs());
            }
        }
        if biggest < 1e-20 {
            break;
        }
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::{FractalSet, Normalization};

    const LOG2_3: f64 = 0.630_929_753_571_457_4;

    fn cantor(depth: u32) -> Staircase {
        Staircase::new(
            &FractalSet::middle_third(depth),
            LOG2_3,
            0.0,
            Normalization::GammaFactor,
        )
        .unwrap()
    }

    #[test]
    fn harmonic_oscillator_is_cosine_of_staircase() {
        let s = cantor(8);
        let xs = s.source().endpoints();
        let t = solve_linear_fractal_ode(&[1.0, 0.0, 1.0], &s, &[1.0, 0.0], &xs).unwrap();
        for i in 0..t.len() {
            let u = t.staircase[i];
            assert!((t.y()[i] - u.cos()).abs() < 1e-13);
            assert!((t.columns[1][i] + u.sin()).abs() < 1e-13);
            assert!((t.columns[2][i] + u.cos()).abs() < 1e-13);
        }
        assert!(t.metadata.iter().any(|(k, _)| k == "assumption"));
    }

    #[test]
    fn exponential_growth_mode() {
        // Y'' - Y' = 0, Y(0) = 0, Y'(0) = 1  =>  Y = e^s - 1
        let sol = ConjugateSolution::new(&[0.0, -1.0, 1.0], &[0.0, 1.0]).unwrap();
        for s in [0.0, 0.3, 0.9, 2.5] {
            let jet = sol.jet_at(s);
            assert!((jet[0] - (s.exp() - 1.0)).abs() < 1e-12 * s.exp().max(1.0));
            assert!((jet[1] - s.exp()).abs() < 1e-12 * s.exp());
            assert!((jet[2] - s.exp()).abs() < 1e-12 * s.exp());
        }
    }

    #[test]
    fn first_order_zero_rate_is_constant() {
        let s = cantor(4);
        let xs = s.source().left_endpoints();
        let t = solve_linear_fractal_ode(&[0.0, 1.0], &s, &[2.5], &xs).unwrap();
        assert!(t.y().iter().all(|&v| v == 2.5));
    }

    #[test]
    fn repeated_roots() {
        // (D - 1)^2 Y = 0, Y(0) = 1, Y'(0) = 0  =>  Y = (1 - s) e^s
        let sol = ConjugateSolution::new(&[1.0, -2.0, 1.0], &[1.0, 0.0]).unwrap();
        for s in [0.2, 1.0, 3.0] {
            assert!((sol.value_at(s) - (1.0 - s) * s.exp()).abs() < 1e-11 * s.exp());
        }
    }

    #[test]
    fn order_and_coefficient_errors() {
        let s = cantor(3);
        let xs = [0.0];
        assert_eq!(
            solve_linear_fractal_ode(&[1.0, 0.0, 1.0], &s, &[1.0], &xs).unwrap_err(),
            CalculusError::InvalidOrder {
                expected: 2,
                got: 1
            }
        );
        assert!(matches!(
            solve_linear_fractal_ode(&[1.0, 0.0], &s, &[1.0], &xs),
            Err(CalculusError::InvalidCoefficients(_))
        ));
        assert!(matches!(
            solve_linear_fractal_ode(&[1.0, 1.0], &s, &[1.0], &[0.5]),
            Err(CalculusError::OffSet { .. })
        ));
    }
}
