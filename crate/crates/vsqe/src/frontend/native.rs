//! The native format: a textual mirror of the formula constructors with
//! explicit De Bruijn indices.
//!
//! Grammar (optional outer parentheses around any formula):
//!
//! ```text
//! formula ::= TrueF | FalseF
//!           | Atom ( rel ( poly ) )
//!           | And formula formula | Or formula formula
//!           | Neg formula | ExQ formula | AllQ formula
//! rel     ::= Less | Eq | Leq | Neq
//! poly    ::= [-] term { (+|-) term }
//! term    ::= factor { * factor }
//! factor  ::= Const rat | Var nat | ( poly ) [^ nat]
//! rat     ::= [-] nat [/ nat]
//! ```
//!
//! [`print_native`] emits the canonical rendering (sum of monomials in
//! descending order); parsing it back is the identity.

use std::str::FromStr;

use num::BigInt;

use crate::formula::{Formula, Rel};
use crate::frontend::{ParseError, Pos, Problem, SourceFormat};
use crate::polyarith::{Polynomial, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Word(String),
    Num(String),
    Punct(char),
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let pos = Pos { line, col };
        let bump = |c: char, line: &mut usize, col: &mut usize| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        match ch {
            c if c.is_whitespace() => {
                chars.next();
                bump(c, &mut line, &mut col);
            }
            ';' => {
                for c in chars.by_ref() {
                    bump(c, &mut line, &mut col);
                    if c == '\n' {
                        break;
                    }
                }
            }
            '(' => {
                chars.next();
                bump(ch, &mut line, &mut col);
                toks.push((Tok::LParen, pos));
            }
            ')' => {
                chars.next();
                bump(ch, &mut line, &mut col);
                toks.push((Tok::RParen, pos));
            }
            '+' | '-' | '*' | '^' | '/' => {
                chars.next();
                bump(ch, &mut line, &mut col);
                toks.push((Tok::Punct(ch), pos));
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                        bump(d, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Num(s), pos));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                        bump(d, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Word(s), pos));
            }
            c => return Err(pos.error(format!("unexpected character `{c}`"))),
        }
    }
    Ok(toks)
}

struct Cursor {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(t) if t == tok => Ok(()),
            other => Err(pos.error(format!("expected {:?}, found {:?}", tok, other))),
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Num(s)) => s
                .parse::<u64>()
                .map_err(|_| pos.error(format!("number `{s}` out of range"))),
            other => Err(pos.error(format!("expected a number, found {:?}", other))),
        }
    }

    fn bigint(&mut self) -> Result<BigInt, ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Num(s)) => {
                BigInt::from_str(&s).map_err(|_| pos.error(format!("bad integer `{s}`")))
            }
            other => Err(pos.error(format!("expected a number, found {:?}", other))),
        }
    }
}

fn parse_rat(c: &mut Cursor) -> Result<Rat, ParseError> {
    let negative = matches!(c.peek(), Some(Tok::Punct('-')));
    if negative {
        c.next();
    }
    let num = c.bigint()?;
    let den = if matches!(c.peek(), Some(Tok::Punct('/'))) {
        c.next();
        let pos = c.pos();
        let d = c.bigint()?;
        if d == BigInt::from(0) {
            return Err(pos.error("zero denominator"));
        }
        d
    } else {
        BigInt::from(1)
    };
    let r = Rat::new(num, den);
    Ok(if negative { -r } else { r })
}

fn parse_factor(c: &mut Cursor) -> Result<Polynomial, ParseError> {
    let pos = c.pos();
    match c.next() {
        Some(Tok::Word(w)) if w == "Const" => Ok(Polynomial::constant(parse_rat(c)?)),
        Some(Tok::Word(w)) if w == "Var" => {
            let i = c.nat()?;
            Ok(Polynomial::var(i as usize))
        }
        Some(Tok::LParen) => {
            let inner = parse_poly(c)?;
            c.expect(Tok::RParen)?;
            if matches!(c.peek(), Some(Tok::Punct('^'))) {
                c.next();
                let pos = c.pos();
                let e = c.nat()?;
                let e = u32::try_from(e).map_err(|_| pos.error("exponent out of range"))?;
                Ok(inner.pow(e))
            } else {
                Ok(inner)
            }
        }
        other => Err(pos.error(format!(
            "expected Const, Var, or a parenthesized polynomial, found {:?}",
            other
        ))),
    }
}

fn parse_term(c: &mut Cursor) -> Result<Polynomial, ParseError> {
    let mut p = parse_factor(c)?;
    while matches!(c.peek(), Some(Tok::Punct('*'))) {
        c.next();
        p = p * parse_factor(c)?;
    }
    Ok(p)
}

fn parse_poly(c: &mut Cursor) -> Result<Polynomial, ParseError> {
    let negative = matches!(c.peek(), Some(Tok::Punct('-')));
    if negative {
        c.next();
    }
    let mut p = parse_term(c)?;
    if negative {
        p = -p;
    }
    loop {
        match c.peek() {
            Some(Tok::Punct('+')) => {
                c.next();
                p = p + parse_term(c)?;
            }
            Some(Tok::Punct('-')) => {
                c.next();
                p = p - parse_term(c)?;
            }
            _ => return Ok(p),
        }
    }
}

fn rel_from_name(name: &str) -> Option<Rel> {
    match name {
        "Less" => Some(Rel::Less),
        "Eq" => Some(Rel::Eq),
        "Leq" => Some(Rel::Leq),
        "Neq" => Some(Rel::Neq),
        _ => None,
    }
}

fn parse_formula(c: &mut Cursor) -> Result<Formula, ParseError> {
    let pos = c.pos();
    match c.next() {
        Some(Tok::LParen) => {
            let f = parse_formula(c)?;
            c.expect(Tok::RParen)?;
            Ok(f)
        }
        Some(Tok::Word(w)) => match w.as_str() {
            "TrueF" => Ok(Formula::True),
            "FalseF" => Ok(Formula::False),
            "Neg" => Ok(Formula::neg(parse_formula(c)?)),
            "ExQ" => Ok(Formula::exq(parse_formula(c)?)),
            "AllQ" => Ok(Formula::allq(parse_formula(c)?)),
            "And" => {
                let a = parse_formula(c)?;
                let b = parse_formula(c)?;
                Ok(Formula::and(a, b))
            }
            "Or" => {
                let a = parse_formula(c)?;
                let b = parse_formula(c)?;
                Ok(Formula::or(a, b))
            }
            "Atom" => {
                c.expect(Tok::LParen)?;
                let rel_pos = c.pos();
                let rel = match c.next() {
                    Some(Tok::Word(r)) => rel_from_name(&r)
                        .ok_or_else(|| rel_pos.error(format!("unknown relation `{r}`")))?,
                    other => {
                        return Err(rel_pos.error(format!("expected a relation, found {:?}", other)))
                    }
                };
                c.expect(Tok::LParen)?;
                let p = parse_poly(c)?;
                c.expect(Tok::RParen)?;
                c.expect(Tok::RParen)?;
                Ok(Formula::atom(rel, p))
            }
            other => Err(pos.error(format!("unknown constructor `{other}`"))),
        },
        other => Err(pos.error(format!("expected a formula, found {:?}", other))),
    }
}

/// Parses one formula in the native format.
pub fn parse_formula_text(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let end = toks.last().map_or(Pos { line: 1, col: 1 }, |(_, p)| *p);
    let mut c = Cursor { toks, at: 0, end };
    let formula = parse_formula(&mut c)?;
    if c.peek().is_some() {
        return Err(c.pos().error("trailing input after the formula"));
    }
    Ok(formula)
}

/// Parses one formula in the native format into a decision problem. Free
/// De Bruijn indices, if any, are existentially closed so the problem is a
/// sentence.
pub fn parse_native(name: &str, text: &str) -> Result<Problem, ParseError> {
    let mut formula = parse_formula_text(text)?;
    for _ in 0..free_var_bound(&formula) {
        formula = Formula::exq(formula);
    }
    Ok(Problem {
        name: name.to_string(),
        formula,
        expected: None,
        source_format: SourceFormat::Native,
    })
}

/// One above the largest free De Bruijn index (0 for closed formulas).
pub fn free_var_bound(f: &Formula) -> usize {
    let mut bound = 0usize;
    f.map_polys(&mut |depth, p| {
        for v in p.variables() {
            if v >= depth {
                bound = bound.max(v - depth + 1);
            }
        }
        p.clone()
    });
    bound
}

/// Canonical native rendering; inverse of [`parse_native`].
pub fn print_native(f: &Formula) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let p = parse_native("t", "(ExQ (Atom (Eq (Var 0))))").unwrap();
        assert_eq!(
            p.formula,
            Formula::exq(Formula::atom(Rel::Eq, Polynomial::var(0)))
        );
        let p = parse_native("t", "(TrueF)").unwrap();
        assert_eq!(p.formula, Formula::True);
        assert_eq!(parse_native("t", "TrueF").unwrap().formula, Formula::True);
    }

    #[test]
    fn sample_formula_round_trips() {
        // forall x. ((exists y. x*a = y^2*b) /\ not (forall y. 5x^2 <= y))
        let text = "AllQ (And (ExQ (Atom (Eq (Var 1 * Var 2 - (Var 0)^2 * Var 3))))
         (Neg (AllQ (Atom (Leq (Const 5 * (Var 1)^2 - Var 0))))))";
        let f = parse_formula_text(text).unwrap();
        let printed = print_native(&f);
        assert_eq!(parse_formula_text(&printed).unwrap(), f);
        // as a problem, the free symbols a and b get closed off
        let p = parse_native("t", text).unwrap();
        assert_eq!(p.formula, Formula::exq(Formula::exq(f)));
    }

    #[test]
    fn rationals_and_signs() {
        // a free variable is closed off automatically
        let p = parse_native("t", "Atom (Less (Const 1/2 * Var 0 - Const 3))").unwrap();
        assert_eq!(free_var_bound(&p.formula), 0);
        let p = parse_native("t", "ExQ (Atom (Less (Const 1/2 * Var 0 - Const 3)))").unwrap();
        let expect = Formula::exq(Formula::atom(
            Rel::Less,
            Polynomial::var(0).scale(&crate::polyarith::ratio(1, 2)) - Polynomial::from_int(3),
        ));
        assert_eq!(p.formula, expect);
        // leading minus and negative constants
        let p = parse_native("t", "ExQ (Atom (Leq (-Var 0 + Const -2)))").unwrap();
        let expect = Formula::exq(Formula::atom(
            Rel::Leq,
            -Polynomial::var(0) - Polynomial::from_int(2),
        ));
        assert_eq!(p.formula, expect);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_native("t", "(Bogus)").unwrap_err();
        assert_eq!((e.line, e.col), (1, 2));
        assert!(e.message.contains("Bogus"));
        let e = parse_native("t", "And TrueF").unwrap_err();
        assert!(e.message.contains("expected a formula"));
        let e = parse_native("t", "TrueF TrueF").unwrap_err();
        assert!(e.message.contains("trailing"));
    }
}
