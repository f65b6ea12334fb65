//! Kripke-polynomial functor expressions and their concrete syntax.
//!
//! ```text
//! T ::= const(NAME) | Id | dual(T) | T + T | T * T | L T | U T
//!     | P | Pw | Pc | Pcw | CC
//! ```
//!
//! `*` binds tighter than `+`, both associate to the left, and the prefix
//! operators `L` and `U` bind tighter than either.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::order::FinPreorder;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctorExpr {
    /// Constant functor on a named preorder from the registry.
    Const {
        name: String,
        carrier: FinPreorder,
    },
    Id,
    /// `T(A^op)^op`.
    Dual(Box<FunctorExpr>),
    Sum(Box<FunctorExpr>, Box<FunctorExpr>),
    Prod(Box<FunctorExpr>, Box<FunctorExpr>),
    /// Lowersets ordered by inclusion.
    Low(Box<FunctorExpr>),
    /// Uppersets ordered by reverse inclusion.
    Up(Box<FunctorExpr>),
    /// All subsets with the Egli-Milner preorder.
    Pow,
    /// Finite subsets; identical to `Pow` on finite carriers.
    PowFin,
    /// Convex subsets of a poset with the Egli-Milner order.
    PowConvex,
    /// Convex hulls of finite subsets; identical to `PowConvex` on finite carriers.
    PowConvexFin,
    /// Connected components, discretely ordered. Does not preserve exact squares.
    ConnComp,
}

impl FunctorExpr {
    pub fn dual(t: FunctorExpr) -> Self {
        FunctorExpr::Dual(Box::new(t))
    }
    pub fn sum(s: FunctorExpr, t: FunctorExpr) -> Self {
        FunctorExpr::Sum(Box::new(s), Box::new(t))
    }
    pub fn prod(s: FunctorExpr, t: FunctorExpr) -> Self {
        FunctorExpr::Prod(Box::new(s), Box::new(t))
    }
    pub fn low(t: FunctorExpr) -> Self {
        FunctorExpr::Low(Box::new(t))
    }
    pub fn up(t: FunctorExpr) -> Self {
        FunctorExpr::Up(Box::new(t))
    }
    pub fn constant(name: &str, carrier: &FinPreorder) -> Self {
        FunctorExpr::Const {
            name: name.to_string(),
            carrier: carrier.clone(),
        }
    }

    /// Largest number of Low/Up/powerset layers on a path through the expression.
    pub fn layer_depth(&self) -> usize {
        use FunctorExpr::*;
        match self {
            Const { .. } | Id | ConnComp => 0,
            Pow | PowFin | PowConvex | PowConvexFin => 1,
            Dual(t) => t.layer_depth(),
            Low(t) | Up(t) => 1 + t.layer_depth(),
            Sum(s, t) | Prod(s, t) => s.layer_depth().max(t.layer_depth()),
        }
    }

    pub fn contains(&self, pred: &dyn Fn(&FunctorExpr) -> bool) -> bool {
        use FunctorExpr::*;
        pred(self)
            || match self {
                Dual(t) | Low(t) | Up(t) => t.contains(pred),
                Sum(s, t) | Prod(s, t) => s.contains(pred) || t.contains(pred),
                _ => false,
            }
    }

    pub fn uses_conn_comp(&self) -> bool {
        self.contains(&|t| matches!(t, FunctorExpr::ConnComp))
    }

    /// Whether the expression only accepts posets (it contains a convex powerset).
    pub fn needs_poset(&self) -> bool {
        self.contains(&|t| matches!(t, FunctorExpr::PowConvex | FunctorExpr::PowConvexFin))
    }

    fn precedence(&self) -> u8 {
        match self {
            FunctorExpr::Sum(..) => 0,
            FunctorExpr::Prod(..) => 1,
            FunctorExpr::Low(_) | FunctorExpr::Up(_) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use FunctorExpr::*;
        let wrap = |f: &mut fmt::Formatter<'_>, t: &FunctorExpr, min: u8| {
            if t.precedence() < min {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        };
        match self {
            Const { name, .. } => write!(f, "const({name})"),
            Id => f.write_str("Id"),
            Dual(t) => write!(f, "dual({t})"),
            Sum(s, t) => {
                wrap(f, s, 0)?;
                f.write_str(" + ")?;
                wrap(f, t, 1)
            }
            Prod(s, t) => {
                wrap(f, s, 1)?;
                f.write_str(" * ")?;
                wrap(f, t, 2)
            }
            Low(t) | Up(t) => {
                f.write_str(if matches!(self, Low(_)) { "L" } else { "U" })?;
                if t.precedence() < 2 {
                    write!(f, "({t})")
                } else {
                    write!(f, " {t}")
                }
            }
            Pow => f.write_str("P"),
            PowFin => f.write_str("Pw"),
            PowConvex => f.write_str("Pc"),
            PowConvexFin => f.write_str("Pcw"),
            ConnComp => f.write_str("CC"),
        }
    }
}

/// Named preorders available to `const(NAME)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Registry(BTreeMap<String, FinPreorder>);

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, carrier: FinPreorder) {
        self.0.insert(name.to_string(), carrier);
    }

    pub fn get(&self, name: &str) -> Option<&FinPreorder> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &FinPreorder)> {
        self.0.iter()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Open,
    Close,
    Plus,
    Star,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' | ')' | '+' | '*' => {
                chars.next();
                let tok = match c {
                    '(' => Tok::Open,
                    ')' => Tok::Close,
                    '+' => Tok::Plus,
                    _ => Tok::Star,
                };
                out.push((pos, tok));
            }
            c if is_word_char(c) => {
                let mut word = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if !is_word_char(c) {
                        break;
                    }
                    word.push(c);
                    chars.next();
                }
                out.push((pos, Tok::Word(word)));
            }
            other => {
                return Err(Error::Parse {
                    pos,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.')
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    registry: &'a Registry,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn sum(&mut self) -> Result<FunctorExpr> {
        let mut lhs = self.prod()?;
        while self.peek() == Some(&Tok::Plus) {
            self.at += 1;
            lhs = FunctorExpr::sum(lhs, self.prod()?);
        }
        Ok(lhs)
    }

    fn prod(&mut self) -> Result<FunctorExpr> {
        let mut lhs = self.prefix()?;
        while self.peek() == Some(&Tok::Star) {
            self.at += 1;
            lhs = FunctorExpr::prod(lhs, self.prefix()?);
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<FunctorExpr> {
        match self.peek() {
            Some(Tok::Word(w)) if w == "L" => {
                self.at += 1;
                Ok(FunctorExpr::low(self.prefix()?))
            }
            Some(Tok::Word(w)) if w == "U" => {
                self.at += 1;
                Ok(FunctorExpr::up(self.prefix()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<FunctorExpr> {
        let start = self.pos();
        match self.peek().cloned() {
            Some(Tok::Open) => {
                self.at += 1;
                let t = self.sum()?;
                self.expect(Tok::Close, "`)`")?;
                Ok(t)
            }
            Some(Tok::Word(w)) => {
                self.at += 1;
                match w.as_str() {
                    "Id" => Ok(FunctorExpr::Id),
                    "P" => Ok(FunctorExpr::Pow),
                    "Pw" => Ok(FunctorExpr::PowFin),
                    "Pc" => Ok(FunctorExpr::PowConvex),
                    "Pcw" => Ok(FunctorExpr::PowConvexFin),
                    "CC" => Ok(FunctorExpr::ConnComp),
                    "dual" => {
                        self.expect(Tok::Open, "`(` after `dual`")?;
                        let t = self.sum()?;
                        self.expect(Tok::Close, "`)`")?;
                        Ok(FunctorExpr::dual(t))
                    }
                    "const" => {
                        self.expect(Tok::Open, "`(` after `const`")?;
                        let name = match self.peek() {
                            Some(Tok::Word(n)) => n.clone(),
                            _ => return self.err("expected a constant name"),
                        };
                        self.at += 1;
                        self.expect(Tok::Close, "`)`")?;
                        let carrier = self
                            .registry
                            .get(&name)
                            .ok_or_else(|| Error::UnknownConst(name.clone()))?;
                        Ok(FunctorExpr::constant(&name, carrier))
                    }
                    other => Err(Error::Parse {
                        pos: start,
                        msg: format!("unknown functor `{other}`"),
                    }),
                }
            }
            Some(_) => self.err("expected a functor"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses the concrete syntax; `const(NAME)` is resolved against `registry`.
pub fn parse_functor(src: &str, registry: &Registry) -> Result<FunctorExpr> {
    let mut p = Parser {
        toks: tokenize(src)?,
        at: 0,
        end: src.len(),
        registry,
    };
    let t = p.sum()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use FunctorExpr::*;

    fn reg() -> Registry {
        let mut r = Registry::new();
        r.insert("X", FinPreorder::chain(["0", "1"]).unwrap());
        r
    }

    #[test]
    fn parses_examples() {
        let r = reg();
        assert_eq!(parse_functor("Id", &r).unwrap(), Id);
        let x = FunctorExpr::constant("X", r.get("X").unwrap());
        assert_eq!(
            parse_functor("L(Id + const(X))", &r).unwrap(),
            FunctorExpr::low(FunctorExpr::sum(Id, x))
        );
        assert_eq!(
            parse_functor("Pc * Id + Id", &r).unwrap(),
            FunctorExpr::sum(FunctorExpr::prod(PowConvex, Id), Id)
        );
        assert_eq!(
            parse_functor("L Id * U P", &r).unwrap(),
            FunctorExpr::prod(FunctorExpr::low(Id), FunctorExpr::up(Pow))
        );
    }

    #[test]
    fn errors_carry_positions() {
        let r = reg();
        assert_eq!(
            parse_functor("Id + ", &r).unwrap_err(),
            Error::Parse {
                pos: 5,
                msg: "unexpected end of input".into()
            }
        );
        assert!(matches!(
            parse_functor("Id $", &r),
            Err(Error::Parse { pos: 3, .. })
        ));
        assert!(matches!(
            parse_functor("Foo", &r),
            Err(Error::Parse { pos: 0, .. })
        ));
        assert_eq!(
            parse_functor("const(Y)", &r).unwrap_err(),
            Error::UnknownConst("Y".into())
        );
        assert!(matches!(
            parse_functor("(Id", &r),
            Err(Error::Parse { pos: 3, .. })
        ));
    }

    #[test]
    fn printer_round_trips() {
        let r = reg();
        for src in [
            "Id",
            "P + Pw * Pc",
            "(Id + Id) * Id",
            "Id + (Id + Id)",
            "Id * (Id * Id)",
            "L(Id + const(X))",
            "U L P",
            "dual(U Id) * CC",
            "L(Id * Id) + Pcw",
        ] {
            let t = parse_functor(src, &r).unwrap();
            let printed = t.to_string();
            assert_eq!(
                parse_functor(&printed, &r).unwrap(),
                t,
                "{src} -> {printed}"
            );
        }
    }

    #[test]
    fn layer_depths() {
        let r = reg();
        assert_eq!(parse_functor("Id + const(X)", &r).unwrap().layer_depth(), 0);
        assert_eq!(parse_functor("L P", &r).unwrap().layer_depth(), 2);
        assert_eq!(
            parse_functor("dual(P) * L Id", &r).unwrap().layer_depth(),
            1
        );
    }
}
