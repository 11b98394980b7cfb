//! A small prefix grammar for regions.
//!
//! ```text
//! expr := "all" | "support"
//!       | "ball(" num ")"                  open ball about the origin
//!       | "box(" lo1 "," hi1 ("," lo "," hi)* ")"   closed box
//!       | "interval(" a "," b ")"           closed interval in R
//!       | "halfspace(" n1 ("," n)* "," c ")"  {x : n·x > c}
//!       | "union(" expr ("," expr)* ")"
//!       | "intersect(" expr ("," expr)* ")"
//!       | "complement(" expr ")"
//! num  := decimal | integer "/" integer
//! ```
//!
//! `support` stands for the support of the spectral function under study and must be
//! supplied when a region is built. Display output is canonical, so parsing it back
//! yields the same expression.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::RegionSet;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("'{name}' takes {expected} arguments, found {found}")]
    Arity { name: String, expected: String, found: usize },
    #[error("region is {found}-dimensional but {expected} was required")]
    Dimension { expected: usize, found: usize },
    #[error("'support' used but no spectral support is available")]
    SupportUnavailable,
}

/// A literal number, kept exact when written as a ratio or an integer.
#[derive(Debug, Clone, Copy)]
pub enum Num {
    Ratio(i64, i64),
    Real(f64),
}

impl PartialEq for Num {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Num::Ratio(a, b), Num::Ratio(c, d)) => a == c && b == d,
            (Num::Real(a), Num::Real(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl Num {
    pub fn ratio(p: i64, q: i64) -> Option<Self> {
        if q == 0 {
            return None;
        }
        let g = gcd(p, q).max(1);
        let s = if q < 0 { -1 } else { 1 };
        Some(Num::Ratio(s * p / g, s * q / g))
    }

    pub fn real(v: f64) -> Self {
        if crate::math::floor(v) == v && v.abs() < 9.0e15 {
            Num::Ratio(v as i64, 1)
        } else {
            Num::Real(v)
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Num::Ratio(p, q) => p as f64 / q as f64,
            Num::Real(v) => v,
        }
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Num::Ratio(p, 1) => write!(f, "{}", p),
            Num::Ratio(p, q) => write!(f, "{}/{}", p, q),
            Num::Real(v) => write!(f, "{}", v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RegionExpr {
    All,
    Support,
    Ball(Num),
    Box(Vec<Num>),
    Interval(Num, Num),
    /// Normal coefficients followed by the offset.
    HalfSpace(Vec<Num>),
    Union(Vec<RegionExpr>),
    Intersect(Vec<RegionExpr>),
    Complement(Box<RegionExpr>),
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, name: &str, items: &[T]) -> fmt::Result {
    write!(f, "{}(", name)?;
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{}", it)?;
    }
    f.write_str(")")
}

impl fmt::Display for RegionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionExpr::All => f.write_str("all"),
            RegionExpr::Support => f.write_str("support"),
            RegionExpr::Ball(r) => write!(f, "ball({})", r),
            RegionExpr::Box(v) => write_list(f, "box", v),
            RegionExpr::Interval(a, b) => write!(f, "interval({},{})", a, b),
            RegionExpr::HalfSpace(v) => write_list(f, "halfspace", v),
            RegionExpr::Union(v) => write_list(f, "union", v),
            RegionExpr::Intersect(v) => write_list(f, "intersect", v),
            RegionExpr::Complement(e) => write!(f, "complement({})", e),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax { pos: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(|c: char| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c))
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| pred(c)) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn number(&mut self) -> Result<Num, ExprError> {
        let start = self.pos;
        let tok = self.take_while(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E' | '/'));
        if tok.is_empty() {
            return self.err("expected a number");
        }
        let bad = || ExprError::Syntax { pos: start, message: format!("malformed number '{}'", tok) };
        if let Some((p, q)) = tok.split_once('/') {
            let p: i64 = p.parse().map_err(|_| bad())?;
            let q: i64 = q.parse().map_err(|_| bad())?;
            return Num::ratio(p, q).ok_or_else(bad);
        }
        if let Ok(i) = tok.parse::<i64>() {
            return Ok(Num::Ratio(i, 1));
        }
        let v: f64 = tok.parse().map_err(|_| bad())?;
        if !v.is_finite() {
            return Err(bad());
        }
        Ok(Num::real(v))
    }

    fn args<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T, ExprError>) -> Result<Vec<T>, ExprError> {
        self.expect('(')?;
        let mut out = alloc::vec![item(self)?];
        while self.peek() == Some(',') {
            self.pos += 1;
            out.push(item(self)?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn expr(&mut self) -> Result<RegionExpr, ExprError> {
        let name = self.take_while(|c| c.is_ascii_alphabetic() || c == '_');
        let arity = |name: &str, expected: &str, found: usize| ExprError::Arity {
            name: name.to_string(),
            expected: expected.to_string(),
            found,
        };
        Ok(match name {
            "all" => RegionExpr::All,
            "support" => RegionExpr::Support,
            "ball" => {
                let v = self.args(Self::number)?;
                if v.len() != 1 {
                    return Err(arity(name, "1", v.len()));
                }
                RegionExpr::Ball(v[0])
            }
            "box" => {
                let v = self.args(Self::number)?;
                if v.len() % 2 != 0 {
                    return Err(arity(name, "an even number of", v.len()));
                }
                RegionExpr::Box(v)
            }
            "interval" => {
                let v = self.args(Self::number)?;
                if v.len() != 2 {
                    return Err(arity(name, "2", v.len()));
                }
                RegionExpr::Interval(v[0], v[1])
            }
            "halfspace" => {
                let v = self.args(Self::number)?;
                if v.len() < 2 {
                    return Err(arity(name, "at least 2", v.len()));
                }
                RegionExpr::HalfSpace(v)
            }
            "union" => RegionExpr::Union(self.args(Self::expr)?),
            "intersect" => RegionExpr::Intersect(self.args(Self::expr)?),
            "complement" => {
                let mut v = self.args(Self::expr)?;
                if v.len() != 1 {
                    return Err(arity(name, "1", v.len()));
                }
                RegionExpr::Complement(Box::new(v.remove(0)))
            }
            "" => return self.err("expected a region name"),
            other => return self.err(format!("unknown region '{}'", other)),
        })
    }
}

impl FromStr for RegionExpr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s, pos: 0 };
        let e = p.expr()?;
        if p.peek().is_some() {
            return p.err("trailing input");
        }
        Ok(e)
    }
}

impl RegionExpr {
    pub fn parse(s: &str) -> Result<Self, ExprError> {
        s.parse()
    }

    /// Canonical text of `s`, for comparing region expressions.
    pub fn canonical(s: &str) -> Result<String, ExprError> {
        Ok(Self::parse(s)?.to_string())
    }

    /// Dimension fixed by the expression itself, if any.
    pub fn inferred_dim(&self) -> Option<usize> {
        match self {
            RegionExpr::All | RegionExpr::Support | RegionExpr::Ball(_) => None,
            RegionExpr::Box(v) => Some(v.len() / 2),
            RegionExpr::Interval(..) => Some(1),
            RegionExpr::HalfSpace(v) => Some(v.len() - 1),
            RegionExpr::Union(v) | RegionExpr::Intersect(v) => v.iter().find_map(|e| e.inferred_dim()),
            RegionExpr::Complement(e) => e.inferred_dim(),
        }
    }

    /// Build the region in `R^dim`; `support` resolves the `support` keyword.
    pub fn build(&self, dim: usize, support: Option<&RegionSet>) -> Result<RegionSet, ExprError> {
        if let Some(found) = self.inferred_dim() {
            if found != dim {
                return Err(ExprError::Dimension { expected: dim, found });
            }
        }
        let vals = |v: &[Num]| v.iter().map(Num::value).collect::<Vec<f64>>();
        let region = match self {
            RegionExpr::All => RegionSet::all(dim),
            RegionExpr::Support => support.cloned().ok_or(ExprError::SupportUnavailable)?,
            RegionExpr::Ball(r) => RegionSet::ball(dim, r.value()),
            RegionExpr::Box(v) => {
                let v = vals(v);
                let lo: Vec<f64> = v.iter().step_by(2).copied().collect();
                let hi: Vec<f64> = v.iter().skip(1).step_by(2).copied().collect();
                RegionSet::boxed(&lo, &hi)
            }
            RegionExpr::Interval(a, b) => RegionSet::interval_union(&[(a.value(), b.value())]),
            RegionExpr::HalfSpace(v) => {
                let v = vals(v);
                RegionSet::half_space(&v[..v.len() - 1], v[v.len() - 1])
            }
            RegionExpr::Union(v) | RegionExpr::Intersect(v) => {
                let union = matches!(self, RegionExpr::Union(_));
                let mut acc = v[0].build(dim, support)?;
                for e in &v[1..] {
                    let next = e.build(dim, support)?;
                    acc = if union { acc.union(&next) } else { acc.intersection(&next) };
                }
                acc
            }
            RegionExpr::Complement(e) => e.build(dim, support)?.complement(),
        };
        Ok(region.with_label(self.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints_canonically() {
        let e = RegionExpr::parse(" union( interval(-0.5, -2/7), interval(4/14,0.5) ) ").unwrap();
        assert_eq!(e.to_string(), "union(interval(-0.5,-2/7),interval(2/7,0.5))");
        assert_eq!(RegionExpr::parse(&e.to_string()).unwrap(), e);
        assert_eq!(RegionExpr::canonical("halfspace(1.0, 0)").unwrap(), "halfspace(1,0)");
    }

    #[test]
    fn builds_membership() {
        let g = RegionExpr::parse("intersect(box(-1,1,-1,1),complement(ball(0.5)))").unwrap();
        let r = g.build(2, None).unwrap();
        assert!(r.contains(&[0.9, 0.0]));
        assert!(!r.contains(&[0.1, 0.1]));
        assert!(!r.contains(&[1.5, 0.0]));
        let rat = RegionExpr::parse("interval(2/7,1/2)").unwrap().build(1, None).unwrap();
        assert!(rat.contains(&[2.0 / 7.0]) && !rat.contains(&[0.28]));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(RegionExpr::parse("ball(1,2)"), Err(ExprError::Arity { .. })));
        assert!(matches!(RegionExpr::parse("blob(1)"), Err(ExprError::Syntax { .. })));
        assert!(matches!(RegionExpr::parse("all)"), Err(ExprError::Syntax { .. })));
        assert!(matches!(RegionExpr::parse("interval(1/0,2)"), Err(ExprError::Syntax { .. })));
        let e = RegionExpr::parse("interval(0,1)").unwrap();
        assert!(matches!(e.build(2, None), Err(ExprError::Dimension { .. })));
        assert!(matches!(RegionExpr::All.build(1, None).map(|_| ()), Ok(())));
        assert_eq!(RegionExpr::Support.build(1, None).unwrap_err(), ExprError::SupportUnavailable);
    }
}
