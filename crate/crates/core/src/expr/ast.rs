use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Serialize, Serializer};

use super::normal::{Factor, Poly};
use super::{Atom, ExprError, JetPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Ln,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Ln => "ln",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "exp" => Some(Func::Exp),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "ln" => Some(Func::Ln),
            _ => None,
        }
    }
}

/// Expression tree. Subtraction and division are encoded as `-1·b` and `b^-1`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Atom(Atom),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, i32),
    Func(Func, Box<Expr>),
}

impl Expr {
    pub fn num(c: f64) -> Self {
        Expr::Num(c)
    }

    pub fn atom(a: Atom) -> Self {
        Expr::Atom(a)
    }

    pub fn sx() -> Self {
        Expr::Atom(Atom::Sx)
    }

    pub fn sy() -> Self {
        Expr::Atom(Atom::Sy)
    }

    pub fn y() -> Self {
        Expr::Atom(Atom::Y)
    }

    /// `y^(kα)`; `k = 0` gives `y`.
    pub fn jet(k: u32) -> Self {
        if k == 0 {
            Expr::y()
        } else {
            Expr::Atom(Atom::Jet(k))
        }
    }

    pub fn param(name: &str) -> Self {
        Expr::Atom(Atom::param(name))
    }

    pub fn func(f: Func, arg: Expr) -> Self {
        Expr::Func(f, Box::new(arg))
    }

    pub fn exp(self) -> Self {
        Expr::func(Func::Exp, self)
    }

    pub fn sin(self) -> Self {
        Expr::func(Func::Sin, self)
    }

    pub fn cos(self) -> Self {
        Expr::func(Func::Cos, self)
    }

    pub fn ln(self) -> Self {
        Expr::func(Func::Ln, self)
    }

    pub fn powi(self, k: i32) -> Self {
        Expr::Pow(Box::new(self), k)
    }

    /// Canonical polynomial form.
    pub fn to_poly(&self) -> Poly {
        match self {
            Expr::Num(c) => Poly::constant(*c),
            Expr::Atom(a) => Poly::atom(a.clone()),
            Expr::Add(items) => items
                .iter()
                .fold(Poly::zero(), |acc, e| acc.add(&e.to_poly())),
            Expr::Mul(items) => items
                .iter()
                .fold(Poly::one(), |acc, e| acc.mul(&e.to_poly())),
            Expr::Pow(base, k) => base.to_poly().pow(*k),
            Expr::Func(f, arg) => {
                let a = arg.to_poly();
                match f {
                    Func::Exp => Poly::exp(&a),
                    Func::Sin => Poly::sin(&a),
                    Func::Cos => Poly::cos(&a),
                    Func::Ln => Poly::ln(&a),
                }
            }
        }
    }

    /// Normalized sum-of-products tree; `0` is `Num(0.0)`.
    pub fn simplify(&self) -> Expr {
        Expr::from(&self.to_poly())
    }

    /// Structural zero after normalization.
    pub fn is_zero_normal(&self) -> bool {
        self.to_poly().is_zero()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Expr::Num(_) => {}
            Expr::Atom(a) => {
                out.insert(a.clone());
            }
            Expr::Add(items) | Expr::Mul(items) => items.iter().for_each(|e| e.collect_atoms(out)),
            Expr::Pow(b, _) | Expr::Func(_, b) => b.collect_atoms(out),
        }
    }

    /// Highest jet order present, in one traversal.
    pub fn jet_order(&self) -> u32 {
        match self {
            Expr::Num(_) => 0,
            Expr::Atom(a) => a.jet_order().unwrap_or(0),
            Expr::Add(items) | Expr::Mul(items) => {
                items.iter().map(Expr::jet_order).max().unwrap_or(0)
            }
            Expr::Pow(b, _) | Expr::Func(_, b) => b.jet_order(),
        }
    }

    pub fn evaluate(&self, at: &JetPoint) -> Result<f64, ExprError> {
        Ok(match self {
            Expr::Num(c) => *c,
            Expr::Atom(a) => at
                .get(a)
                .ok_or_else(|| ExprError::UnboundAtom(a.to_string()))?,
            Expr::Add(items) => {
                let mut acc = 0.0;
                for e in items {
                    acc += e.evaluate(at)?;
                }
                acc
            }
            Expr::Mul(items) => {
                let mut acc = 1.0;
                for e in items {
                    acc *= e.evaluate(at)?;
                }
                acc
            }
            Expr::Pow(b, k) => {
                let v = b.evaluate(at)?;
                if *k < 0 && v == 0.0 {
                    return Err(ExprError::Domain("division by zero".into()));
                }
                v.powi(*k)
            }
            Expr::Func(f, arg) => {
                let v = arg.evaluate(at)?;
                match f {
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Ln if v <= 0.0 => {
                        return Err(ExprError::Domain(format!("ln of non-positive value {v}")))
                    }
                    Func::Ln => v.ln(),
                }
            }
        })
    }

    /// Replaces atoms for which `f` returns a value; the tree is not normalized.
    pub fn substitute(&self, f: &dyn Fn(&Atom) -> Option<Expr>) -> Expr {
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Atom(a) => f(a).unwrap_or_else(|| self.clone()),
            Expr::Add(items) => Expr::Add(items.iter().map(|e| e.substitute(f)).collect()),
            Expr::Mul(items) => Expr::Mul(items.iter().map(|e| e.substitute(f)).collect()),
            Expr::Pow(b, k) => Expr::Pow(Box::new(b.substitute(f)), *k),
            Expr::Func(func, arg) => Expr::Func(*func, Box::new(arg.substitute(f))),
        }
    }

    /// Leading numeric sign, used to print `a - b` instead of `a + -1*b`.
    fn negated(&self) -> Option<Expr> {
        match self {
            Expr::Num(c) if *c < 0.0 => Some(Expr::Num(-c)),
            Expr::Mul(items) => match items.first() {
                Some(Expr::Num(c)) if *c == -1.0 => {
                    let rest: Vec<Expr> = items[1..].to_vec();
                    Some(if rest.len() == 1 {
                        rest.into_iter().next().expect("one")
                    } else {
                        Expr::Mul(rest)
                    })
                }
                Some(Expr::Num(c)) if *c < 0.0 => {
                    let mut v = items.clone();
                    v[0] = Expr::Num(-c);
                    Some(Expr::Mul(v))
                }
                _ => None,
            },
            _ => None,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(_) => 1,
            Expr::Mul(_) => 2,
            Expr::Num(c) if *c < 0.0 => 2,
            Expr::Pow(..) => 3,
            _ => 4,
        }
    }
}

impl From<&Poly> for Expr {
    fn from(p: &Poly) -> Self {
        let mut terms: Vec<Expr> = Vec::new();
        for (m, c) in p.terms() {
            let mut factors: Vec<Expr> = Vec::new();
            for (f, k) in m.factors() {
                let base = match f {
                    Factor::Atom(a) => Expr::Atom(a.clone()),
                    Factor::Exp(a) => Expr::from(a).exp(),
                    Factor::Sin(a) => Expr::from(a).sin(),
                    Factor::Cos(a) => Expr::from(a).cos(),
                    Factor::Ln(a) => Expr::from(a).ln(),
                    Factor::Sum(a) => Expr::from(a),
                };
                factors.push(if k == 1 { base } else { base.powi(k) });
            }
            let term = match (factors.len(), c) {
                (0, c) => Expr::Num(c),
                (1, 1.0) => factors.pop().expect("one factor"),
                (_, 1.0) => Expr::Mul(factors),
                (_, c) => {
                    factors.insert(0, Expr::Num(c));
                    Expr::Mul(factors)
                }
            };
            terms.push(term);
        }
        match terms.len() {
            0 => Expr::Num(0.0),
            1 => terms.pop().expect("one term"),
            _ => Expr::Add(terms),
        }
    }
}

impl From<Poly> for Expr {
    fn from(p: Poly) -> Self {
        Expr::from(&p)
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Self {
        Expr::Num(c)
    }
}

impl From<Atom> for Expr {
    fn from(a: Atom) -> Self {
        Expr::Atom(a)
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => write!(f, "{c}"),
            Expr::Atom(a) => write!(f, "{a}"),
            Expr::Add(items) => {
                for (i, e) in items.iter().enumerate() {
                    match (i, e.negated()) {
                        (0, _) => write_wrapped(f, e, 2)?,
                        (_, Some(pos)) => {
                            f.write_str(" - ")?;
                            write_wrapped(f, &pos, 2)?;
                        }
                        (_, None) => {
                            f.write_str(" + ")?;
                            write_wrapped(f, e, 2)?;
                        }
                    }
                }
                Ok(())
            }
            Expr::Mul(items) => {
                let mut rest = items.as_slice();
                if let Some(Expr::Num(c)) = items.first() {
                    if *c == -1.0 && items.len() > 1 {
                        f.write_str("-")?;
                        rest = &items[1..];
                    } else {
                        write!(f, "{c}")?;
                        rest = &items[1..];
                        if !rest.is_empty() {
                            f.write_str("*")?;
                        }
                    }
                }
                for (i, e) in rest.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    write_wrapped(f, e, 3)?;
                }
                Ok(())
            }
            Expr::Pow(b, k) => {
                write_wrapped(f, b, 4)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Expr::Func(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, -rhs])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(vec![self, rhs])
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Mul(vec![self, rhs.powi(-1)])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Num(c) => Expr::Num(-c),
            e => Expr::Mul(vec![Expr::Num(-1.0), e]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_of_normal_forms() {
        let e = (Expr::num(2.0) * Expr::sx() + Expr::num(3.0) * Expr::sx()).simplify();
        assert_eq!(e.to_string(), "5*S(x)");
        let e = (Expr::jet(1) - Expr::sx() - Expr::sy()).simplify();
        assert_eq!(e.to_string(), "-S(x) - S(y) + y^(α)");
        assert_eq!(Expr::num(0.0).simplify().to_string(), "0");
        assert_eq!(
            (Expr::sx() / (Expr::sx() + Expr::y()))
                .simplify()
                .to_string(),
            "S(x)*(S(x) + y)^(-1)"
        );
    }

    #[test]
    fn simplify_examples() {
        let s = Expr::sx();
        let e = s.clone().sin().powi(2) + s.clone().cos().powi(2) - Expr::num(1.0);
        assert_eq!(e.simplify(), Expr::Num(0.0));
        assert_eq!((Expr::jet(1) - Expr::jet(1)).simplify(), Expr::Num(0.0));
    }

    #[test]
    fn evaluation() {
        let p = JetPoint::new().with(Atom::Sx, 0.3).with(Atom::Jet(1), 2.0);
        assert!(((Expr::jet(1) * Expr::sx()).evaluate(&p).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(
            Expr::sx()
                .cos()
                .evaluate(&JetPoint::new().with(Atom::Sx, 0.0))
                .unwrap(),
            1.0
        );
        assert!(matches!(
            Expr::y().evaluate(&p),
            Err(ExprError::UnboundAtom(_))
        ));
        assert!(matches!(
            Expr::sx()
                .powi(-1)
                .evaluate(&JetPoint::new().with(Atom::Sx, 0.0)),
            Err(ExprError::Domain(_))
        ));
    }
}
