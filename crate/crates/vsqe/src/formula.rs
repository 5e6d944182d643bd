//! De Bruijn-indexed first-order formulas over normalized polynomial sign
//! atoms, with quantifier-free evaluation, negation normal form, and index
//! shifting.
//!
//! Atoms always have the shape `p ~ 0` with `~` one of `<`, `=`, `<=`, `!=`;
//! source-level `p = q` is stored as `p - q = 0`. Variable 0 under a
//! quantifier is the bound variable.

use std::fmt;

use num::{Signed, Zero};

use crate::polyarith::{Polynomial, PolyError, Rat, Valuation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Less,
    Eq,
    Leq,
    Neq,
}

impl Rel {
    /// Sign test of `value ~ 0`.
    pub fn holds(self, value: &Rat) -> bool {
        match self {
            Rel::Less => value.is_negative(),
            Rel::Eq => value.is_zero(),
            Rel::Leq => !value.is_positive(),
            Rel::Neq => !value.is_zero(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rel::Less => "Less",
            Rel::Eq => "Eq",
            Rel::Leq => "Leq",
            Rel::Neq => "Neq",
        }
    }
}

/// Normalized sign condition `poly ~ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub rel: Rel,
    pub poly: Polynomial,
}

impl Atom {
    pub fn new(rel: Rel, poly: Polynomial) -> Self {
        Atom { rel, poly }
    }

    /// Dual atom under logical negation: the relation flips and, for the
    /// order relations, the polynomial is negated.
    pub fn negate(&self) -> Atom {
        match self.rel {
            Rel::Less => Atom::new(Rel::Leq, -&self.poly),
            Rel::Eq => Atom::new(Rel::Neq, self.poly.clone()),
            Rel::Leq => Atom::new(Rel::Less, -&self.poly),
            Rel::Neq => Atom::new(Rel::Eq, self.poly.clone()),
        }
    }
}

/// Truth of an atom under a valuation.
pub fn aeval(at: &Atom, v: &Valuation) -> bool {
    at.rel.holds(&at.poly.insertion(v))
}

/// A univariate quadratic sign condition: coefficients of `a x^2 + b x + c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniAtom {
    pub rel: Rel,
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
}

impl UniAtom {
    pub fn new(rel: Rel, a: Rat, b: Rat, c: Rat) -> Self {
        UniAtom { rel, a, b, c }
    }

    /// The corresponding multivariate atom in variable 0.
    pub fn to_atom(&self) -> Atom {
        let x = Polynomial::var(0);
        let poly = x.pow(2).scale(&self.a) + x.scale(&self.b) + Polynomial::constant(self.c.clone());
        Atom::new(self.rel, poly)
    }

    /// Truth of the sign condition at the real point `x`.
    pub fn holds_at(&self, x: &Rat) -> bool {
        let value = &self.a * x * x + &self.b * x + &self.c;
        self.rel.holds(&value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Neg(Box<Formula>),
    ExQ(Box<Formula>),
    AllQ(Box<Formula>),
}

impl Formula {
    pub fn atom(rel: Rel, poly: Polynomial) -> Formula {
        Formula::Atom(Atom::new(rel, poly))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn neg(f: Formula) -> Formula {
        Formula::Neg(Box::new(f))
    }

    pub fn exq(f: Formula) -> Formula {
        Formula::ExQ(Box::new(f))
    }

    pub fn allq(f: Formula) -> Formula {
        Formula::AllQ(Box::new(f))
    }

    /// Conjunction of a sequence; empty input is `True`.
    pub fn and_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = fs.into_iter();
        match it.next() {
            None => Formula::True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Disjunction of a sequence; empty input is `False`.
    pub fn or_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = fs.into_iter();
        match it.next() {
            None => Formula::False,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Neg(g) => g.is_quantifier_free(),
            Formula::ExQ(_) | Formula::AllQ(_) => false,
        }
    }

    pub fn quantifier_count(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 0,
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.quantifier_count() + b.quantifier_count()
            }
            Formula::Neg(g) => g.quantifier_count(),
            Formula::ExQ(g) | Formula::AllQ(g) => 1 + g.quantifier_count(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.node_count() + b.node_count(),
            Formula::Neg(g) | Formula::ExQ(g) | Formula::AllQ(g) => 1 + g.node_count(),
        }
    }

    pub fn contains_neg(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => false,
            Formula::And(a, b) | Formula::Or(a, b) => a.contains_neg() || b.contains_neg(),
            Formula::Neg(_) => true,
            Formula::ExQ(g) | Formula::AllQ(g) => g.contains_neg(),
        }
    }

    /// Applies `f` to every polynomial, tracking binder depth.
    pub fn map_polys(&self, f: &mut impl FnMut(usize, &Polynomial) -> Polynomial) -> Formula {
        self.map_polys_at(0, f)
    }

    fn map_polys_at(
        &self,
        depth: usize,
        f: &mut impl FnMut(usize, &Polynomial) -> Polynomial,
    ) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(at) => Formula::atom(at.rel, f(depth, &at.poly)),
            Formula::And(a, b) => {
                Formula::and(a.map_polys_at(depth, f), b.map_polys_at(depth, f))
            }
            Formula::Or(a, b) => Formula::or(a.map_polys_at(depth, f), b.map_polys_at(depth, f)),
            Formula::Neg(g) => Formula::neg(g.map_polys_at(depth, f)),
            Formula::ExQ(g) => Formula::exq(g.map_polys_at(depth + 1, f)),
            Formula::AllQ(g) => Formula::allq(g.map_polys_at(depth + 1, f)),
        }
    }

    /// Replaces every atom with a formula, tracking binder depth. The
    /// substitution machinery in the VS core is built on this.
    pub fn map_atoms(
        &self,
        f: &mut impl FnMut(usize, &Atom) -> Result<Formula, crate::vsub::VsError>,
    ) -> Result<Formula, crate::vsub::VsError> {
        self.map_atoms_at(0, f)
    }

    fn map_atoms_at(
        &self,
        depth: usize,
        f: &mut impl FnMut(usize, &Atom) -> Result<Formula, crate::vsub::VsError>,
    ) -> Result<Formula, crate::vsub::VsError> {
        Ok(match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(at) => f(depth, at)?,
            Formula::And(a, b) => Formula::and(
                a.map_atoms_at(depth, f)?,
                b.map_atoms_at(depth, f)?,
            ),
            Formula::Or(a, b) => Formula::or(
                a.map_atoms_at(depth, f)?,
                b.map_atoms_at(depth, f)?,
            ),
            Formula::Neg(g) => Formula::neg(g.map_atoms_at(depth, f)?),
            Formula::ExQ(g) => Formula::exq(g.map_atoms_at(depth + 1, f)?),
            Formula::AllQ(g) => Formula::allq(g.map_atoms_at(depth + 1, f)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("eval_qf applied to a quantified formula")]
    QuantifiedInput,
}

/// Standard Boolean semantics over [`aeval`]; errors on quantifiers.
pub fn eval_qf(f: &Formula, v: &Valuation) -> Result<bool, EvalError> {
    match f {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Atom(at) => Ok(aeval(at, v)),
        Formula::And(a, b) => Ok(eval_qf(a, v)? && eval_qf(b, v)?),
        Formula::Or(a, b) => Ok(eval_qf(a, v)? || eval_qf(b, v)?),
        Formula::Neg(g) => Ok(!eval_qf(g, v)?),
        Formula::ExQ(_) | Formula::AllQ(_) => Err(EvalError::QuantifiedInput),
    }
}

/// Negation normal form: no `Neg` nodes remain; negation is absorbed into
/// atoms via the dual relation and into quantifiers by duality.
pub fn nnf(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::And(a, b) => Formula::and(nnf(a), nnf(b)),
        Formula::Or(a, b) => Formula::or(nnf(a), nnf(b)),
        Formula::ExQ(g) => Formula::exq(nnf(g)),
        Formula::AllQ(g) => Formula::allq(nnf(g)),
        Formula::Neg(g) => nnf_neg(g),
    }
}

fn nnf_neg(f: &Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Atom(at) => Formula::Atom(at.negate()),
        Formula::And(a, b) => Formula::or(nnf_neg(a), nnf_neg(b)),
        Formula::Or(a, b) => Formula::and(nnf_neg(a), nnf_neg(b)),
        Formula::Neg(g) => nnf(g),
        Formula::ExQ(g) => Formula::allq(nnf_neg(g)),
        Formula::AllQ(g) => Formula::exq(nnf_neg(g)),
    }
}

/// Shifts free variables `>= d` (relative to binding depth) up by `a`.
pub fn lift_formula(f: &Formula, d: usize, a: usize) -> Formula {
    f.map_polys(&mut |depth, p| p.lift_poly(d + depth, a))
}

/// Inverse shift; errors when a live variable sits in the vacated band.
pub fn lower_formula(f: &Formula, d: usize, a: usize) -> Result<Formula, PolyError> {
    let mut err = None;
    let out = f.map_polys(&mut |depth, p| match p.lower_poly(d + depth, a) {
        Ok(q) => q,
        Err(e) => {
            err.get_or_insert(e);
            p.clone()
        }
    });
    match err {
        None => Ok(out),
        Some(e) => Err(e),
    }
}

/// True iff the free variable `var` (adjusted for binding depth) occurs in
/// any polynomial of the formula.
pub fn mentions_var(f: &Formula, var: usize) -> bool {
    fn go(f: &Formula, var: usize) -> bool {
        match f {
            Formula::True | Formula::False => false,
            Formula::Atom(at) => at.poly.mentions(var),
            Formula::And(a, b) | Formula::Or(a, b) => go(a, var) || go(b, var),
            Formula::Neg(g) => go(g, var),
            Formula::ExQ(g) | Formula::AllQ(g) => go(g, var + 1),
        }
    }
    go(f, var)
}

/// Renames free variable `from` to `to` throughout; `to` (depth-adjusted)
/// must be unused.
pub fn rename_free_var(f: &Formula, from: usize, to: usize) -> Formula {
    f.map_polys(&mut |depth, p| p.rename_var(from + depth, to + depth))
}

/// Pretty-printer in the paper's constructor notation, e.g.
/// `AllQ (And (ExQ (Atom (Eq (Var 0)))) TrueF)`.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "TrueF"),
            Formula::False => write!(f, "FalseF"),
            Formula::Atom(at) => write!(f, "Atom ({} ({}))", at.rel.name(), at.poly),
            Formula::And(a, b) => write!(f, "And ({}) ({})", a, b),
            Formula::Or(a, b) => write!(f, "Or ({}) ({})", a, b),
            Formula::Neg(g) => write!(f, "Neg ({})", g),
            Formula::ExQ(g) => write!(f, "ExQ ({})", g),
            Formula::AllQ(g) => write!(f, "AllQ ({})", g),
        }
    }
}
