//! Canonical sum-of-products form.
//!
//! A [`Poly`] maps monomials to nonzero coefficients. Canonical rules:
//! - like monomials are merged, cancelled coefficients are dropped;
//! - at most one `exp` factor per monomial, with a constant-free argument;
//! - `sin(u)^k` for `k ≥ 2` is rewritten through `1 - cos(u)^2`;
//! - `sin`/`cos` arguments have a positive leading coefficient;
//! - positive powers of sums are expanded, negative powers of multi-term
//!   sums are kept as [`Factor::Sum`] with a monic argument.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use ordered_float::OrderedFloat;

use super::{Atom, ExprError, JetPoint};

/// Relative size below which a sum of two coefficients counts as cancelled.
const CANCEL_TOL: f64 = 1e-12;

type Coef = OrderedFloat<f64>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    Atom(Atom),
    Exp(Poly),
    Sin(Poly),
    Cos(Poly),
    Ln(Poly),
    /// A multi-term sum, only ever raised to a negative power.
    Sum(Poly),
}

/// Product of factors raised to nonzero integer powers.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(BTreeMap<Factor, i32>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Factor, i32)> {
        self.0.iter().map(|(f, k)| (f, *k))
    }

    pub(crate) fn map(&self) -> &BTreeMap<Factor, i32> {
        &self.0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Coef>,
}

fn add_coef(terms: &mut BTreeMap<Monomial, Coef>, m: Monomial, c: f64) {
    if c == 0.0 {
        return;
    }
    match terms.get_mut(&m) {
        Some(slot) => {
            let old = slot.0;
            let sum = old + c;
            if sum == 0.0 || sum.abs() <= CANCEL_TOL * old.abs().max(c.abs()) {
                terms.remove(&m);
            } else {
                *slot = OrderedFloat(sum);
            }
        }
        None => {
            terms.insert(m, OrderedFloat(c));
        }
    }
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::zero();
        add_coef(&mut p.terms, Monomial::one(), c);
        p
    }

    pub fn atom(a: Atom) -> Self {
        Self::term(Monomial(BTreeMap::from([(Factor::Atom(a), 1)])), 1.0)
    }

    pub fn term(m: Monomial, c: f64) -> Self {
        let mut p = Self::zero();
        add_coef(&mut p.terms, m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial has no non-constant monomial.
    pub fn as_constant(&self) -> Option<f64> {
        match self.terms.len() {
            0 => Some(0.0),
            1 => self.terms.get(&Monomial::one()).map(|c| c.0),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> f64 {
        self.terms.get(&Monomial::one()).map_or(0.0, |c| c.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, c)| (m, c.0))
    }

    fn leading_coef(&self) -> Option<f64> {
        self.terms.values().next().map(|c| c.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        if c == 0.0 {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), OrderedFloat(v.0 * c)))
                .collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_coef(&mut terms, m.clone(), c.0);
        }
        Self { terms }
    }

    pub fn sub(&self, other: &Poly) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_coef(&mut terms, m.clone(), -c.0);
        }
        Self { terms }
    }

    pub fn mul(&self, other: &Poly) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut map = ma.0.clone();
                for (f, k) in &mb.0 {
                    *map.entry(f.clone()).or_insert(0) += k;
                }
                let prod = canon_monomial(map, ca.0 * cb.0);
                for (m, c) in prod.terms {
                    add_coef(&mut out.terms, m, c.0);
                }
            }
        }
        out
    }

    pub fn pow(&self, k: i32) -> Self {
        if k < 0 {
            return self.inv().pow(-k);
        }
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = k as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `1 / self`. The reciprocal of zero is kept symbolically and fails on evaluation.
    pub fn inv(&self) -> Self {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().expect("one term");
            let map = m.0.iter().map(|(f, k)| (f.clone(), -k)).collect();
            return canon_monomial(map, 1.0 / c.0);
        }
        let lead = self.leading_coef().unwrap_or(1.0);
        let monic = self.scale(1.0 / lead);
        Self::term(
            Monomial(BTreeMap::from([(Factor::Sum(monic), -1)])),
            1.0 / lead,
        )
    }

    pub fn div(&self, other: &Poly) -> Self {
        self.mul(&other.inv())
    }

    pub fn exp(arg: &Poly) -> Self {
        let c = arg.constant_term();
        let rest = arg.sub(&Poly::constant(c));
        if rest.is_zero() {
            return Poly::constant(c.exp());
        }
        Self::term(Monomial(BTreeMap::from([(Factor::Exp(rest), 1)])), c.exp())
    }

    pub fn sin(arg: &Poly) -> Self {
        if let Some(c) = arg.as_constant() {
            return Poly::constant(c.sin());
        }
        if arg.leading_coef().is_some_and(|c| c < 0.0) {
            return Self::sin(&arg.scale(-1.0)).scale(-1.0);
        }
        Self::term(
            Monomial(BTreeMap::from([(Factor::Sin(arg.clone()), 1)])),
            1.0,
        )
    }

    pub fn cos(arg: &Poly) -> Self {
        if let Some(c) = arg.as_constant() {
            return Poly::constant(c.cos());
        }
        if arg.leading_coef().is_some_and(|c| c < 0.0) {
            return Self::cos(&arg.scale(-1.0));
        }
        Self::term(
            Monomial(BTreeMap::from([(Factor::Cos(arg.clone()), 1)])),
            1.0,
        )
    }

    pub fn ln(arg: &Poly) -> Self {
        if let Some(c) = arg.as_constant() {
            if c > 0.0 {
                return Poly::constant(c.ln());
            }
        }
        // ln(c·exp(u)) = ln c + u
        if arg.terms.len() == 1 {
            let (m, c) = arg.terms.iter().next().expect("one term");
            if let (true, [(Factor::Exp(u), 1)]) =
                (c.0 > 0.0, m.0.iter().collect::<Vec<_>>().as_slice())
            {
                return Poly::constant(c.0.ln()).add(u);
            }
        }
        Self::term(
            Monomial(BTreeMap::from([(Factor::Ln(arg.clone()), 1)])),
            1.0,
        )
    }

    /// `f^k` in canonical form.
    pub fn factor_pow(f: &Factor, k: i32) -> Self {
        canon_monomial(BTreeMap::from([(f.clone(), k)]), 1.0)
    }

    /// Every atom, including those inside function arguments.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        for m in self.terms.keys() {
            for f in m.0.keys() {
                match f {
                    Factor::Atom(a) => {
                        out.insert(a.clone());
                    }
                    Factor::Exp(p)
                    | Factor::Sin(p)
                    | Factor::Cos(p)
                    | Factor::Ln(p)
                    | Factor::Sum(p) => p.collect_atoms(out),
                }
            }
        }
    }

    /// Highest `k` over `y^(kα)` atoms; `y` alone counts as 0.
    pub fn jet_order(&self) -> u32 {
        self.atoms()
            .iter()
            .filter_map(Atom::jet_order)
            .max()
            .unwrap_or(0)
    }

    pub fn contains_atom(&self, atom: &Atom) -> bool {
        self.atoms().contains(atom)
    }

    /// Replaces atoms for which `f` returns a value and renormalizes.
    pub fn substitute(&self, f: &dyn Fn(&Atom) -> Option<Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.0);
            for (factor, k) in &m.0 {
                let base = match factor {
                    Factor::Atom(a) => f(a).unwrap_or_else(|| Poly::atom(a.clone())),
                    Factor::Exp(p) => Poly::exp(&p.substitute(f)),
                    Factor::Sin(p) => Poly::sin(&p.substitute(f)),
                    Factor::Cos(p) => Poly::cos(&p.substitute(f)),
                    Factor::Ln(p) => Poly::ln(&p.substitute(f)),
                    Factor::Sum(p) => p.substitute(f),
                };
                term = term.mul(&base.pow(*k));
            }
            out = out.add(&term);
        }
        out
    }

    /// Groups terms by the product of their top-level atom factors selected by `pick`.
    ///
    /// Returns `selected monomial -> remaining polynomial`.
    pub fn collect_by(&self, pick: &dyn Fn(&Atom) -> bool) -> BTreeMap<Monomial, Poly> {
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (chosen, rest): (BTreeMap<_, _>, BTreeMap<_, _>) =
                m.0.iter()
                    .map(|(f, k)| (f.clone(), *k))
                    .partition(|(f, _)| matches!(f, Factor::Atom(a) if pick(a)));
            let entry = out.entry(Monomial(chosen)).or_default();
            *entry = entry.add(&Poly::term(Monomial(rest), c.0));
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    pub fn eval(&self, at: &JetPoint) -> Result<f64, ExprError> {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            acc += c.0 * eval_monomial(m, at)?;
        }
        Ok(acc)
    }

    /// `Σ |term value|`, the scale against which cancellation is judged.
    pub fn eval_abs_terms(&self, at: &JetPoint) -> Result<f64, ExprError> {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            acc += (c.0 * eval_monomial(m, at)?).abs();
        }
        Ok(acc)
    }
}

fn eval_monomial(m: &Monomial, at: &JetPoint) -> Result<f64, ExprError> {
    let mut prod = 1.0;
    for (f, k) in &m.0 {
        let v = match f {
            Factor::Atom(a) => at
                .get(a)
                .ok_or_else(|| ExprError::UnboundAtom(a.to_string()))?,
            Factor::Exp(p) => p.eval(at)?.exp(),
            Factor::Sin(p) => p.eval(at)?.sin(),
            Factor::Cos(p) => p.eval(at)?.cos(),
            Factor::Ln(p) => {
                let v = p.eval(at)?;
                if v <= 0.0 {
                    return Err(ExprError::Domain(format!("ln of non-positive value {v}")));
                }
                v.ln()
            }
            Factor::Sum(p) => p.eval(at)?,
        };
        if *k < 0 && v == 0.0 {
            return Err(ExprError::Domain("division by zero".into()));
        }
        prod *= v.powi(*k);
    }
    Ok(prod)
}

/// Canonicalizes a raw product of factors times `coef`.
fn canon_monomial(mut map: BTreeMap<Factor, i32>, mut coef: f64) -> Poly {
    if coef == 0.0 {
        return Poly::zero();
    }
    map.retain(|_, k| *k != 0);

    let exps: Vec<(Factor, i32)> = map
        .iter()
        .filter(|(f, _)| matches!(f, Factor::Exp(_)))
        .map(|(f, k)| (f.clone(), *k))
        .collect();
    if !exps.is_empty() {
        let mut arg = Poly::zero();
        for (f, k) in exps {
            map.remove(&f);
            if let Factor::Exp(p) = f {
                arg = arg.add(&p.scale(k as f64));
            }
        }
        let c0 = arg.constant_term();
        coef *= c0.exp();
        let rest = arg.sub(&Poly::constant(c0));
        if !rest.is_zero() {
            map.insert(Factor::Exp(rest), 1);
        }
    }

    let mut extra = Poly::one();
    let expand: Vec<(Factor, i32)> = map
        .iter()
        .filter(|(f, k)| {
            matches!((f, **k), (Factor::Sum(_), k) if k > 0)
                || matches!((f, **k), (Factor::Sin(_), k) if k >= 2)
        })
        .map(|(f, k)| (f.clone(), *k))
        .collect();
    for (f, k) in expand {
        map.remove(&f);
        match f {
            Factor::Sum(p) => extra = extra.mul(&p.pow(k)),
            Factor::Sin(p) => {
                if k % 2 == 1 {
                    map.insert(Factor::Sin(p.clone()), 1);
                }
                let cos_sq = Poly::term(Monomial(BTreeMap::from([(Factor::Cos(p), 2)])), 1.0);
                extra = extra.mul(&Poly::one().sub(&cos_sq).pow(k / 2));
            }
            _ => unreachable!(),
        }
    }
    let base = Poly::term(Monomial(map), coef);
    if extra == Poly::one() {
        base
    } else {
        base.mul(&extra)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&super::Expr::from(self), f)
    }
}

impl From<f64> for Poly {
    fn from(c: f64) -> Self {
        Poly::constant(c)
    }
}

impl From<Atom> for Poly {
    fn from(a: Atom) -> Self {
        Poly::atom(a)
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::add(self, rhs)
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        Poly::sub(self, rhs)
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        Poly::mul(self, rhs)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sx() -> Poly {
        Poly::atom(Atom::Sx)
    }

    #[test]
    fn like_terms_merge_and_cancel() {
        let a = sx().scale(2.0).add(&sx().scale(3.0));
        assert_eq!(a, sx().scale(5.0));
        let y1 = Poly::atom(Atom::Jet(1));
        assert!(y1.sub(&y1).is_zero());
    }

    #[test]
    fn pythagorean_identity() {
        let s = Poly::sin(&sx());
        let c = Poly::cos(&sx());
        let e = s.pow(2).add(&c.pow(2)).sub(&Poly::one());
        assert!(e.is_zero(), "{e}");
    }

    #[test]
    fn exponentials_merge() {
        let e = Poly::exp(&sx()).mul(&Poly::exp(&Poly::atom(Atom::Sy)));
        assert_eq!(e, Poly::exp(&sx().add(&Poly::atom(Atom::Sy))));
        let back = Poly::exp(&sx()).mul(&Poly::exp(&sx().scale(-1.0)));
        assert_eq!(back, Poly::one());
        // constants are pulled out of the argument
        let shifted = Poly::exp(&sx().add(&Poly::constant(2.0)));
        assert_eq!(shifted, Poly::exp(&sx()).scale(2f64.exp()));
    }

    #[test]
    fn odd_and_even_trig_arguments() {
        let minus = sx().scale(-1.0);
        assert_eq!(Poly::sin(&minus), Poly::sin(&sx()).scale(-1.0));
        assert_eq!(Poly::cos(&minus), Poly::cos(&sx()));
    }

    #[test]
    fn reciprocal_of_a_sum() {
        let s = sx().add(&Poly::atom(Atom::Y));
        let inv = s.scale(2.0).inv();
        assert_eq!(inv, s.inv().scale(0.5));
        let mono = sx().pow(3).scale(4.0).inv();
        assert_eq!(mono, sx().pow(-3).scale(0.25));
    }

    #[test]
    fn collect_by_params() {
        let c1 = Poly::atom(Atom::param("c1"));
        let p = c1.mul(&sx()).add(&c1.mul(&Poly::one())).add(&sx());
        let groups = p.collect_by(&|a| matches!(a, Atom::Param(_)));
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[&Monomial::one()], sx());
    }
}
