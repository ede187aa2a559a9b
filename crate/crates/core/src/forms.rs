//! Exterior algebra of fractal differential forms with symbolic coefficients.
//!
//! Base coordinates are staircase coordinates, so `d` and contractions use
//! the same `∂/∂S(x_i)` partials as [`crate::expr`].

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::expr::{is_zero, parse, partial_poly, Expr, Poly, Var};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error("operands live on different coordinate lists")]
    CoordinateMismatch,
    #[error("cannot contract a 0-form")]
    DegreeZero,
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("cannot add forms of degree {0} and {1}")]
    DegreeMismatch(usize, usize),
    #[error("index {0} is not a coordinate")]
    BadIndex(usize),
}

/// Differential symbol of a coordinate: `dx`, `dy`, `dx3`, `dy^(α)`.
fn differential(v: Var) -> String {
    match v {
        Var::X => "dx".into(),
        Var::Y => "dy".into(),
        Var::Coord(i) => format!("dx{i}"),
        Var::Jet(k) => format!("d{}", crate::expr::jet_name(k)),
    }
}

fn partial_name(v: Var) -> String {
    match v {
        Var::X => "∂x".into(),
        Var::Y => "∂y".into(),
        Var::Coord(i) => format!("∂x{i}"),
        Var::Jet(k) => format!("∂{}", crate::expr::jet_name(k)),
    }
}

/// Sign of the permutation sorting `idx`, or `None` on a repeated index.
fn sort_sign(idx: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// A degree-`k` form `Σ ω_I dx^{i_1} ∧ … ∧ dx^{i_k}` over strictly increasing `I`.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    coords: Vec<Var>,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, Poly>,
}

impl Form {
    pub fn zero(coords: &[Var], degree: usize) -> Self {
        Self {
            coords: coords.to_vec(),
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The 0-form `f`.
    pub fn function(coords: &[Var], f: Poly) -> Self {
        let mut w = Self::zero(coords, 0);
        w.insert(Vec::new(), f);
        w
    }

    /// `f dx^{i_1} ∧ …` for indices in any order; repeated indices give zero.
    pub fn monomial(coords: &[Var], f: Poly, indices: &[usize]) -> Result<Self, FormError> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= coords.len()) {
            return Err(FormError::BadIndex(bad));
        }
        let mut w = Self::zero(coords, indices.len());
        let mut idx = indices.to_vec();
        if let Some(sign) = sort_sign(&mut idx) {
            w.insert(idx, f.scale(sign));
        }
        Ok(w)
    }

    /// The basis 1-form `dx^i`.
    pub fn d_coord(coords: &[Var], i: usize) -> Result<Self, FormError> {
        Self::monomial(coords, Poly::one(), &[i])
    }

    fn insert(&mut self, idx: Vec<usize>, f: Poly) {
        if f.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(idx).or_default();
        *slot = slot.add(&f);
        self.coeffs.retain(|_, c| !c.is_zero());
    }

    pub fn coords(&self) -> &[Var] {
        &self.coords
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficient(&self, indices: &[usize]) -> Poly {
        self.coeffs.get(indices).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &Poly)> {
        self.coeffs.iter().map(|(i, c)| (i.as_slice(), c))
    }

    /// Structural zero after normalization.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Zero under normalization plus randomized probing of every coefficient.
    pub fn is_zero_probed(&self) -> bool {
        self.coeffs.values().all(is_zero)
    }

    fn check(&self, other: &Form) -> Result<(), FormError> {
        if self.coords == other.coords {
            Ok(())
        } else {
            Err(FormError::CoordinateMismatch)
        }
    }

    pub fn add(&self, other: &Form) -> Result<Form, FormError> {
        self.check(other)?;
        if self.degree != other.degree {
            return match (self.is_zero(), other.is_zero()) {
                (_, true) => Ok(self.clone()),
                (true, false) => Ok(other.clone()),
                (false, false) => Err(FormError::DegreeMismatch(self.degree, other.degree)),
            };
        }
        let mut out = self.clone();
        for (i, c) in &other.coeffs {
            out.insert(i.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Form) -> Result<Form, FormError> {
        self.add(&other.scale(&Poly::constant(-1.0)))
    }

    /// `f·ω` for a function `f`.
    pub fn scale(&self, f: &Poly) -> Form {
        let mut out = Self::zero(&self.coords, self.degree);
        for (i, c) in &self.coeffs {
            out.insert(i.clone(), c.mul(f));
        }
        out
    }

    /// Coefficient-wise map, e.g. for substitution.
    pub fn map_coefficients(&self, f: impl Fn(&Poly) -> Poly) -> Form {
        let mut out = Self::zero(&self.coords, self.degree);
        for (i, c) in &self.coeffs {
            out.insert(i.clone(), f(c));
        }
        out
    }
}

/// `a ∧ b`; degrees above the dimension give the zero form.
pub fn wedge(a: &Form, b: &Form) -> Result<Form, FormError> {
    a.check(b)?;
    let mut out = Form::zero(&a.coords, a.degree + b.degree);
    for (i, f) in &a.coeffs {
        for (j, g) in &b.coeffs {
            let mut idx: Vec<usize> = i.iter().chain(j).copied().collect();
            if let Some(sign) = sort_sign(&mut idx) {
                out.insert(idx, f.mul(g).scale(sign));
            }
        }
    }
    Ok(out)
}

/// `d ω = Σ_j ∂_j ω_I dx^j ∧ dx^I`.
pub fn exterior_derivative(w: &Form) -> Form {
    let mut out = Form::zero(&w.coords, w.degree + 1);
    for (idx, f) in &w.coeffs {
        for (j, &v) in w.coords.iter().enumerate() {
            if idx.contains(&j) {
                continue;
            }
            let df = partial_poly(f, v);
            if df.is_zero() {
                continue;
            }
            let before = idx.iter().filter(|&&i| i < j).count();
            let sign = if before % 2 == 0 { 1.0 } else { -1.0 };
            let mut new_idx = idx.clone();
            new_idx.insert(before, j);
            out.insert(new_idx, df.scale(sign));
        }
    }
    out
}

/// `ι_X ω`, contracting the first slot.
pub fn interior_product(x: &VectorField, w: &Form) -> Result<Form, FormError> {
    if w.degree == 0 {
        return Err(FormError::DegreeZero);
    }
    if x.coords != w.coords {
        return Err(FormError::CoordinateMismatch);
    }
    let mut out = Form::zero(&w.coords, w.degree - 1);
    for (idx, f) in &w.coeffs {
        for (m, &i) in idx.iter().enumerate() {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let mut rest = idx.clone();
            rest.remove(m);
            out.insert(rest, f.mul(&x.components[i]).scale(sign));
        }
    }
    Ok(out)
}

/// `[X, Y]^j = X^i ∂_i Y^j - Y^i ∂_i X^j`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, FormError> {
    if x.coords != y.coords {
        return Err(FormError::CoordinateMismatch);
    }
    let components = (0..x.coords.len())
        .map(|j| x.apply(&y.components[j]).sub(&y.apply(&x.components[j])))
        .collect();
    Ok(VectorField {
        coords: x.coords.clone(),
        components,
    })
}

/// `L_X ω = d(ι_X ω) + ι_X(dω)`; on functions this is `X(f)`.
pub fn lie_derivative(x: &VectorField, w: &Form) -> Result<Form, FormError> {
    if x.coords != w.coords {
        return Err(FormError::CoordinateMismatch);
    }
    let inner = interior_product(x, &exterior_derivative(w))?;
    if w.degree == 0 {
        return Ok(inner);
    }
    exterior_derivative(&interior_product(x, w)?).add(&inner)
}

/// `X = Σ X^i ∂_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    coords: Vec<Var>,
    components: Vec<Poly>,
}

impl VectorField {
    pub fn new(coords: &[Var], components: Vec<Poly>) -> Result<Self, FormError> {
        if components.len() != coords.len() {
            return Err(FormError::ComponentCount {
                expected: coords.len(),
                got: components.len(),
            });
        }
        Ok(Self {
            coords: coords.to_vec(),
            components,
        })
    }

    /// The coordinate field `∂_i`.
    pub fn coordinate(coords: &[Var], i: usize) -> Result<Self, FormError> {
        if i >= coords.len() {
            return Err(FormError::BadIndex(i));
        }
        let components = (0..coords.len())
            .map(|j| if i == j { Poly::one() } else { Poly::zero() })
            .collect();
        Ok(Self {
            coords: coords.to_vec(),
            components,
        })
    }

    pub fn coords(&self) -> &[Var] {
        &self.coords
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    /// Directional derivative `X(f) = Σ X^i ∂_i f`.
    pub fn apply(&self, f: &Poly) -> Poly {
        self.coords
            .iter()
            .zip(&self.components)
            .filter(|(_, c)| !c.is_zero())
            .fold(Poly::zero(), |acc, (&v, c)| {
                acc.add(&c.mul(&partial_poly(f, v)))
            })
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField, FormError> {
        if self.coords != other.coords {
            return Err(FormError::CoordinateMismatch);
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(Self {
            coords: self.coords.clone(),
            components,
        })
    }

    pub fn scale(&self, c: f64) -> VectorField {
        Self {
            coords: self.coords.clone(),
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }
}

fn write_coefficient(
    f: &mut fmt::Formatter<'_>,
    c: &Poly,
    first: bool,
    suffix: &str,
) -> fmt::Result {
    let e = Expr::from(c);
    let neg = match c.terms().collect::<Vec<_>>().as_slice() {
        [(_, v)] => *v < 0.0,
        _ => false,
    };
    let shown = if neg { Expr::from(&c.scale(-1.0)) } else { e };
    match (first, neg) {
        (true, true) => f.write_str("-")?,
        (false, true) => f.write_str(" - ")?,
        (false, false) => f.write_str(" + ")?,
        (true, false) => {}
    }
    let text = shown.to_string();
    let unit = text == "1" && !suffix.is_empty();
    match (unit, matches!(shown, Expr::Add(_))) {
        (true, _) => f.write_str(suffix),
        (false, true) if !suffix.is_empty() => write!(f, "({text}) {suffix}"),
        (false, _) if suffix.is_empty() => f.write_str(&text),
        (false, _) => write!(f, "{text} {suffix}"),
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (n, (idx, c)) in self.coeffs.iter().enumerate() {
            let basis: Vec<String> = idx.iter().map(|&i| differential(self.coords[i])).collect();
            write_coefficient(f, c, n == 0, &basis.join("^"))?;
        }
        Ok(())
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&v, c) in self.coords.iter().zip(&self.components) {
            if c.is_zero() {
                continue;
            }
            write_coefficient(f, c, first, &partial_name(v))?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Serialize for Form {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let coords: Vec<String> = self.coords.iter().map(|&v| differential(v)).collect();
        let terms: Vec<(Vec<usize>, String)> = self
            .coeffs
            .iter()
            .map(|(i, c)| (i.clone(), c.to_string()))
            .collect();
        let mut st = s.serialize_struct("Form", 3)?;
        st.serialize_field("coords", &coords)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// Same shape as the serialized form; `degree` is only needed when `terms` is empty.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FormSpec {
    coords: Vec<String>,
    #[serde(default)]
    degree: Option<usize>,
    terms: Vec<(Vec<usize>, String)>,
}

fn coordinate_from_differential(name: &str) -> Option<Var> {
    match name.strip_prefix('d')? {
        "x" => Some(Var::X),
        "y" => Some(Var::Y),
        v => v.strip_prefix('x')?.parse().ok().map(Var::Coord),
    }
}

impl<'de> Deserialize<'de> for Form {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let spec = FormSpec::deserialize(d)?;
        let coords = spec
            .coords
            .iter()
            .map(|c| {
                coordinate_from_differential(c).ok_or_else(|| {
                    D::Error::custom(format!("unknown coordinate differential `{c}`"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let degree = spec
            .degree
            .or(spec.terms.first().map(|(i, _)| i.len()))
            .unwrap_or(0);
        let mut form = Form::zero(&coords, degree);
        for (indices, text) in &spec.terms {
            if indices.len() != degree {
                return Err(D::Error::custom(format!(
                    "term {indices:?} does not have degree {degree}"
                )));
            }
            let coeff = parse(text)
                .map_err(|e| D::Error::custom(format!("coefficient `{text}`: {e}")))?
                .to_poly();
            let term = Form::monomial(&coords, coeff, indices).map_err(D::Error::custom)?;
            form = form.add(&term).map_err(D::Error::custom)?;
        }
        Ok(form)
    }
}
