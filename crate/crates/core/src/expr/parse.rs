//! Recursive-descent parser for the jet-expression grammar (`docs/grammar.md`).

use std::collections::BTreeSet;

use super::{Atom, Expr, ExprError, Func};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Alpha,
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Alpha => "`α`".into(),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit()
            || (c == '.' && chars.get(i + 1).is_some_and(|(_, d)| d.is_ascii_digit()))
        {
            let start = pos;
            let mut j = i;
            while j < chars.len() && (chars[j].1.is_ascii_digit() || chars[j].1 == '.') {
                j += 1;
            }
            // exponent only when digits follow
            if j < chars.len() && matches!(chars[j].1, 'e' | 'E') {
                let mut k = j + 1;
                if k < chars.len() && matches!(chars[k].1, '+' | '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].1.is_ascii_digit() {
                    j = k;
                    while j < chars.len() && chars[j].1.is_ascii_digit() {
                        j += 1;
                    }
                }
            }
            let end = chars.get(j).map_or(text.len(), |(p, _)| *p);
            let lit = &text[start..end];
            let v: f64 = lit.parse().map_err(|_| ExprError::Syntax {
                pos: start,
                found: format!("`{lit}`"),
                expected: vec!["number".into()],
            })?;
            out.push((start, Tok::Num(v)));
            i = j;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].1.is_ascii_alphanumeric() || chars[j].1 == '_') {
                j += 1;
            }
            let end = chars.get(j).map_or(text.len(), |(p, _)| *p);
            out.push((pos, Tok::Ident(text[pos..end].to_string())));
            i = j;
        } else if c == 'α' {
            out.push((pos, Tok::Alpha));
            i += 1;
        } else if "+-*/^()[],".contains(c) {
            out.push((pos, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ExprError::Syntax {
                pos,
                found: format!("`{c}`"),
                expected: vec!["operator".into(), "operand".into()],
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

/// Parser with a declared vocabulary of free constants and unknown functions.
///
/// Identifiers `c<digits>` are always constants.
#[derive(Clone, Debug, Default)]
pub struct Parser {
    params: BTreeSet<String>,
    unknowns: BTreeSet<String>,
}

impl Parser {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn param(mut self, name: &str) -> Self {
        self.params.insert(name.to_string());
        self
    }

    pub fn unknown(mut self, name: &str) -> Self {
        self.unknowns.insert(name.to_string());
        self
    }

    pub fn parse(&self, text: &str) -> Result<Expr, ExprError> {
        let toks = lex(text)?;
        let mut st = State {
            toks,
            i: 0,
            cfg: self,
        };
        let e = st.expr()?;
        st.expect_end()?;
        Ok(e)
    }
}

/// Parses with only the built-in vocabulary.
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    Parser::new().parse(text)
}

pub fn parse_with(text: &str, params: &[&str], unknowns: &[&str]) -> Result<Expr, ExprError> {
    let p = params.iter().fold(Parser::new(), |p, n| p.param(n));
    unknowns.iter().fold(p, |p, n| p.unknown(n)).parse(text)
}

struct State<'a> {
    toks: Vec<(usize, Tok)>,
    i: usize,
    cfg: &'a Parser,
}

const OPERAND: &[&str] = &["number", "identifier", "`(`", "`-`"];

impl State<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].1
    }

    fn pos(&self) -> usize {
        self.toks[self.i].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].1.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err(&self, expected: &[&str]) -> ExprError {
        ExprError::Syntax {
            pos: self.pos(),
            found: self.peek().describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&[&format!("`{c}`")]))
        }
    }

    fn expect_end(&self) -> Result<(), ExprError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.err(&["operator", "end of input"]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut items = vec![self.term()?];
        loop {
            if self.eat('+') {
                items.push(self.term()?);
            } else if self.eat('-') {
                items.push(-self.term()?);
            } else {
                break;
            }
        }
        Ok(if items.len() == 1 {
            items.pop().expect("one")
        } else {
            Expr::Add(items)
        })
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut items = vec![self.unary()?];
        loop {
            if self.eat('*') {
                items.push(self.unary()?);
            } else if self.eat('/') {
                items.push(self.unary()?.powi(-1));
            } else {
                break;
            }
        }
        Ok(if items.len() == 1 {
            items.pop().expect("one")
        } else {
            Expr::Mul(items)
        })
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let mut base = self.primary()?;
        while self.eat('^') {
            let k = self.exponent()?;
            base = base.powi(k);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64, ExprError> {
        match self.peek().clone() {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() < i32::MAX as f64 => {
                self.bump();
                Ok(v as i64)
            }
            _ => Err(self.err(&["integer"])),
        }
    }

    fn exponent(&mut self) -> Result<i32, ExprError> {
        if self.eat('(') {
            let neg = if self.eat('-') {
                true
            } else {
                self.eat('+');
                false
            };
            let k = self.integer()?;
            self.expect(')')?;
            Ok(if neg { -k } else { k } as i32)
        } else {
            Ok(self.integer()? as i32)
        }
    }

    /// After `y`: `^(α)`, `^(kα)` or the ASCII `^(ka)` spelling.
    fn jet_suffix(&mut self) -> Option<u32> {
        let save = self.i;
        if !self.eat('^') || !self.eat('(') {
            self.i = save;
            return None;
        }
        let k = match self.peek().clone() {
            Tok::Num(v) if v.fract() == 0.0 && v >= 1.0 => {
                self.bump();
                v as u32
            }
            _ => 1,
        };
        let alpha = match self.peek() {
            Tok::Alpha => true,
            Tok::Ident(s) => s == "a",
            _ => false,
        };
        if alpha {
            self.bump();
            if self.eat(')') {
                return Some(k);
            }
        }
        self.i = save;
        None
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                self.identifier(name, pos)
            }
            _ => Err(self.err(OPERAND)),
        }
    }

    fn identifier(&mut self, name: String, pos: usize) -> Result<Expr, ExprError> {
        if let Some(f) = Func::from_name(&name) {
            self.expect('(')?;
            let arg = self.expr()?;
            self.expect(')')?;
            return Ok(Expr::func(f, arg));
        }
        match name.as_str() {
            "pi" => return Ok(Expr::Num(std::f64::consts::PI)),
            "y" | "q" => {
                return Ok(match self.jet_suffix() {
                    Some(k) => Expr::jet(k),
                    None => Expr::y(),
                })
            }
            "S" => return self.staircase_atom(),
            "D" => return self.derivative_atom(),
            _ => {}
        }
        if self.cfg.unknowns.contains(&name) {
            return Ok(Expr::Atom(Atom::unknown(&name)));
        }
        let is_c_const = name.len() > 1
            && name.starts_with('c')
            && name[1..].bytes().all(|b| b.is_ascii_digit());
        if is_c_const || self.cfg.params.contains(&name) {
            return Ok(Expr::param(&name));
        }
        Err(ExprError::UnknownSymbol { pos, name })
    }

    fn staircase_atom(&mut self) -> Result<Expr, ExprError> {
        self.expect('(')?;
        let pos = self.pos();
        let Tok::Ident(v) = self.peek().clone() else {
            return Err(self.err(&["`x`", "`y`", "`t`", "`q`", "`x<digits>`"]));
        };
        self.bump();
        let atom = match v {
            v if v == "x" || v == "t" => Atom::Sx,
            v if v == "y" || v == "q" => Atom::Sy,
            v if v.len() > 1
                && v.starts_with('x')
                && v[1..].bytes().all(|b| b.is_ascii_digit()) =>
            {
                Atom::Coord(v[1..].parse().map_err(|_| ExprError::UnknownSymbol {
                    pos,
                    name: v.clone(),
                })?)
            }
            v => return Err(ExprError::UnknownSymbol { pos, name: v }),
        };
        self.expect(')')?;
        Ok(Expr::Atom(atom))
    }

    fn derivative_atom(&mut self) -> Result<Expr, ExprError> {
        self.expect('[')?;
        let pos = self.pos();
        let Tok::Ident(name) = self.peek().clone() else {
            return Err(self.err(&["identifier"]));
        };
        self.bump();
        self.expect(',')?;
        let k = self.integer()?;
        if k < 0 {
            return Err(self.err(&["non-negative integer"]));
        }
        self.expect(']')?;
        let k = k as u32;
        match name.as_str() {
            "y" | "q" => Ok(Expr::jet(k)),
            n if self.cfg.unknowns.contains(n) => Ok(Expr::Atom(Atom::Unknown(n.into(), k))),
            _ => Err(ExprError::UnknownSymbol { pos, name }),
        }
    }
}
