//! SMT-LIB 2 subset frontend.
//!
//! Supported: `set-logic` (ignored), `set-info` (`:status` captured as the
//! expected answer), `declare-const`/nullary `declare-fun` of sort `Real`,
//! `assert`, `check-sat`, `exit`. Terms may use `and`, `or`, `not`, `=>`,
//! the comparisons `= < <= > >=`, arithmetic `+ - *`, `exists`/`forall`
//! over `Real`, integer and decimal literals (read as exact rationals).
//! Division and `^` are rejected; expand powers to multiplications.
//!
//! The problem formula is the conjunction of all assertions, existentially
//! closed over the declared constants in declaration order, outermost
//! first.

use num::BigInt;
use std::str::FromStr;

use crate::formula::{Formula, Rel};
use crate::frontend::{ParseError, Pos, Problem, SourceFormat};
use crate::polyarith::{Polynomial, Rat};

#[derive(Debug, Clone)]
enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }
}

fn lex_sexprs(text: &str) -> Result<Vec<SExpr>, ParseError> {
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut top: Vec<SExpr> = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    macro_rules! bump {
        ($c:expr) => {
            if $c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        };
    }
    while let Some(&ch) = chars.peek() {
        let pos = Pos { line, col };
        match ch {
            c if c.is_whitespace() => {
                chars.next();
                bump!(c);
            }
            ';' => {
                for c in chars.by_ref() {
                    bump!(c);
                    if c == '\n' {
                        break;
                    }
                }
            }
            '(' => {
                chars.next();
                bump!(ch);
                stack.push((std::mem::take(&mut top), pos));
            }
            ')' => {
                chars.next();
                bump!(ch);
                let Some((parent, open_pos)) = stack.pop() else {
                    return Err(pos.error("unmatched `)`"));
                };
                let list = SExpr::List(std::mem::replace(&mut top, parent), open_pos);
                top.push(list);
            }
            '"' | '|' => {
                let quote = ch;
                chars.next();
                bump!(ch);
                let mut s = String::new();
                let mut closed = false;
                for c in chars.by_ref() {
                    bump!(c);
                    if c == quote {
                        closed = true;
                        break;
                    }
                    s.push(c);
                }
                if !closed {
                    return Err(pos.error("unterminated quoted atom"));
                }
                top.push(SExpr::Atom(s, pos));
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                    bump!(c);
                }
                top.push(SExpr::Atom(s, pos));
            }
        }
    }
    if let Some((_, open_pos)) = stack.pop() {
        return Err(open_pos.error("unclosed `(`"));
    }
    Ok(top)
}

/// Exact rational from an integer or decimal literal, e.g. `0.1` = 1/10.
fn parse_numeral(s: &str) -> Option<Rat> {
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s),
    };
    if digits.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty()
        || !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(&joined).ok()?;
    let den = BigInt::from(10u8).pow(frac_part.len() as u32);
    Some(Rat::new(num * BigInt::from(sign), den))
}

/// Bound symbols, innermost last; the De Bruijn index of a symbol is its
/// distance from the end of the scope stack.
struct Scope {
    names: Vec<String>,
}

impl Scope {
    fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().rev().position(|n| n == name)
    }
}

fn parse_term(e: &SExpr, scope: &Scope) -> Result<Polynomial, ParseError> {
    match e {
        SExpr::Atom(s, pos) => {
            if let Some(r) = parse_numeral(s) {
                return Ok(Polynomial::constant(r));
            }
            match scope.index_of(s) {
                Some(i) => Ok(Polynomial::var(i)),
                None => Err(pos.error(format!("unknown symbol `{s}`"))),
            }
        }
        SExpr::List(items, pos) => {
            let Some(SExpr::Atom(op, op_pos)) = items.first() else {
                return Err(pos.error("expected an operator"));
            };
            let args: Result<Vec<Polynomial>, ParseError> =
                items[1..].iter().map(|a| parse_term(a, scope)).collect();
            match op.as_str() {
                "+" => {
                    let args = args?;
                    if args.is_empty() {
                        return Err(op_pos.error("`+` needs at least one argument"));
                    }
                    Ok(args.into_iter().fold(Polynomial::zero(), |a, b| a + b))
                }
                "*" => {
                    let args = args?;
                    if args.is_empty() {
                        return Err(op_pos.error("`*` needs at least one argument"));
                    }
                    Ok(args.into_iter().fold(Polynomial::one(), |a, b| a * b))
                }
                "-" => {
                    let mut args = args?;
                    match args.len() {
                        0 => Err(op_pos.error("`-` needs at least one argument")),
                        1 => Ok(-args.remove(0)),
                        _ => {
                            let first = args.remove(0);
                            Ok(args.into_iter().fold(first, |a, b| a - b))
                        }
                    }
                }
                "/" => Err(op_pos.error(
                    "division is not supported; rewrite the problem without `/`",
                )),
                "^" => Err(op_pos.error(
                    "`^` is not supported; expand powers to multiplications",
                )),
                other => Err(op_pos.error(format!("unsupported term operator `{other}`"))),
            }
        }
    }
}

/// Chainable comparison: adjacent argument pairs, normalized to one of the
/// four relations with right-hand side 0.
fn comparison(rel_of: impl Fn(&Polynomial, &Polynomial) -> Formula, args: &[Polynomial]) -> Formula {
    Formula::and_all(args.windows(2).map(|w| rel_of(&w[0], &w[1])))
}

fn parse_bindings(e: &SExpr, scope: &mut Scope) -> Result<usize, ParseError> {
    let SExpr::List(bindings, pos) = e else {
        return Err(e.pos().error("expected a binding list"));
    };
    if bindings.is_empty() {
        return Err(pos.error("empty binding list"));
    }
    for b in bindings {
        let SExpr::List(pair, bpos) = b else {
            return Err(b.pos().error("expected a (name Real) binding"));
        };
        match pair.as_slice() {
            [SExpr::Atom(name, _), SExpr::Atom(sort, sort_pos)] => {
                if sort != "Real" {
                    return Err(sort_pos.error(format!("unsupported sort `{sort}`")));
                }
                scope.names.push(name.clone());
            }
            _ => return Err(bpos.error("expected a (name Real) binding")),
        }
    }
    Ok(bindings.len())
}

fn parse_formula(e: &SExpr, scope: &mut Scope) -> Result<Formula, ParseError> {
    match e {
        SExpr::Atom(s, pos) => match s.as_str() {
            "true" => Ok(Formula::True),
            "false" => Ok(Formula::False),
            other => Err(pos.error(format!("expected a formula, found `{other}`"))),
        },
        SExpr::List(items, pos) => {
            let Some(SExpr::Atom(op, op_pos)) = items.first() else {
                return Err(pos.error("expected a connective or predicate"));
            };
            let args = &items[1..];
            let terms = |scope: &Scope| -> Result<Vec<Polynomial>, ParseError> {
                args.iter().map(|a| parse_term(a, scope)).collect()
            };
            match op.as_str() {
                "and" => {
                    let fs: Result<Vec<_>, _> =
                        args.iter().map(|a| parse_formula(a, scope)).collect();
                    Ok(Formula::and_all(fs?))
                }
                "or" => {
                    let fs: Result<Vec<_>, _> =
                        args.iter().map(|a| parse_formula(a, scope)).collect();
                    Ok(Formula::or_all(fs?))
                }
                "not" => match args {
                    [a] => Ok(Formula::neg(parse_formula(a, scope)?)),
                    _ => Err(op_pos.error("`not` takes exactly one argument")),
                },
                "=>" => {
                    if args.len() < 2 {
                        return Err(op_pos.error("`=>` needs at least two arguments"));
                    }
                    let fs: Result<Vec<_>, _> =
                        args.iter().map(|a| parse_formula(a, scope)).collect();
                    let mut fs = fs?;
                    let mut out = fs.pop().expect("nonempty");
                    while let Some(premise) = fs.pop() {
                        out = Formula::or(Formula::neg(premise), out);
                    }
                    Ok(out)
                }
                "=" => {
                    let ts = terms(scope)?;
                    if ts.len() < 2 {
                        return Err(op_pos.error("`=` needs at least two arguments"));
                    }
                    Ok(comparison(|a, b| Formula::atom(Rel::Eq, a - b), &ts))
                }
                "<" => {
                    let ts = terms(scope)?;
                    if ts.len() < 2 {
                        return Err(op_pos.error("`<` needs at least two arguments"));
                    }
                    Ok(comparison(|a, b| Formula::atom(Rel::Less, a - b), &ts))
                }
                "<=" => {
                    let ts = terms(scope)?;
                    if ts.len() < 2 {
                        return Err(op_pos.error("`<=` needs at least two arguments"));
                    }
                    Ok(comparison(|a, b| Formula::atom(Rel::Leq, a - b), &ts))
                }
                ">" => {
                    let ts = terms(scope)?;
                    if ts.len() < 2 {
                        return Err(op_pos.error("`>` needs at least two arguments"));
                    }
                    Ok(comparison(|a, b| Formula::atom(Rel::Less, b - a), &ts))
                }
                ">=" => {
                    let ts = terms(scope)?;
                    if ts.len() < 2 {
                        return Err(op_pos.error("`>=` needs at least two arguments"));
                    }
                    Ok(comparison(|a, b| Formula::atom(Rel::Leq, b - a), &ts))
                }
                "exists" | "forall" => {
                    let [bindings, body] = args else {
                        return Err(op_pos.error(format!(
                            "`{op}` takes a binding list and a body"
                        )));
                    };
                    let n = parse_bindings(bindings, scope)?;
                    let mut f = parse_formula(body, scope)?;
                    scope.names.truncate(scope.names.len() - n);
                    for _ in 0..n {
                        f = if op == "exists" {
                            Formula::exq(f)
                        } else {
                            Formula::allq(f)
                        };
                    }
                    Ok(f)
                }
                other => Err(op_pos.error(format!("unsupported connective `{other}`"))),
            }
        }
    }
}

/// Parses an SMT-LIB script into a closed decision problem.
pub fn parse_smtlib(name: &str, text: &str) -> Result<Problem, ParseError> {
    let forms = lex_sexprs(text)?;
    let mut constants: Vec<String> = Vec::new();
    let mut asserts: Vec<SExpr> = Vec::new();
    let mut expected: Option<bool> = None;
    for form in &forms {
        let SExpr::List(items, pos) = form else {
            return Err(form.pos().error("expected a command"));
        };
        let Some(SExpr::Atom(cmd, cmd_pos)) = items.first() else {
            return Err(pos.error("expected a command"));
        };
        match cmd.as_str() {
            "set-logic" | "check-sat" | "exit" => {}
            "set-info" => {
                if let [_, SExpr::Atom(key, _), SExpr::Atom(value, vpos)] = items.as_slice() {
                    if key == ":status" {
                        expected = match value.as_str() {
                            "sat" => Some(true),
                            "unsat" => Some(false),
                            "unknown" => None,
                            other => {
                                return Err(vpos.error(format!("unknown status `{other}`")))
                            }
                        };
                    }
                }
            }
            "declare-const" => match items.as_slice() {
                [_, SExpr::Atom(n, _), SExpr::Atom(sort, spos)] => {
                    if sort != "Real" {
                        return Err(spos.error(format!("unsupported sort `{sort}`")));
                    }
                    constants.push(n.clone());
                }
                _ => return Err(pos.error("expected (declare-const name Real)")),
            },
            "declare-fun" => match items.as_slice() {
                [_, SExpr::Atom(n, _), SExpr::List(params, ppos), SExpr::Atom(sort, spos)] => {
                    if !params.is_empty() {
                        return Err(ppos.error("only nullary declare-fun is supported"));
                    }
                    if sort != "Real" {
                        return Err(spos.error(format!("unsupported sort `{sort}`")));
                    }
                    constants.push(n.clone());
                }
                _ => return Err(pos.error("expected (declare-fun name () Real)")),
            },
            "assert" => match items.as_slice() {
                [_, body] => asserts.push(body.clone()),
                _ => return Err(pos.error("`assert` takes exactly one argument")),
            },
            other => return Err(cmd_pos.error(format!("unsupported command `{other}`"))),
        }
    }
    // Declaration order, outermost first: the scope stack starts with the
    // constants in order, so the last-declared one is innermost.
    let mut scope = Scope {
        names: constants.clone(),
    };
    let body = Formula::and_all(
        asserts
            .iter()
            .map(|a| parse_formula(a, &mut scope))
            .collect::<Result<Vec<_>, _>>()?,
    );
    let mut formula = body;
    for _ in 0..constants.len() {
        formula = Formula::exq(formula);
    }
    debug_assert_eq!(super::native::free_var_bound(&formula), 0);
    Ok(Problem {
        name: name.to_string(),
        formula,
        expected,
        source_format: SourceFormat::Smtlib,
    })
}
