//! Structural preprocessing: simplification by constant folding, pushing
//! universal quantifiers inward, factoring powers of a variable out of
//! atoms, the modified disjunctive normal form, and pulling existential
//! binders up through conjunctions.

use crate::formula::{lift_formula, lower_formula, mentions_var, Atom, Formula, Rel};
use crate::polyarith::Polynomial;

/// One disjunct of the modified DNF: a conjunction of atoms and opaque
/// context formulas (quantified or disjunctive subformulas kept whole),
/// under `n_pulled` existential binders hoisted out by [`reach_under`].
/// The hoisted binders are innermost, so a variable bound just outside the
/// disjunct has index `n_pulled` inside it.
#[derive(Debug, Clone, PartialEq)]
pub struct Disjunct {
    pub n_pulled: usize,
    pub atoms: Vec<Atom>,
    pub ctx: Vec<Formula>,
}

impl Disjunct {
    pub fn conjunction(&self) -> Formula {
        Formula::and_all(
            self.atoms
                .iter()
                .cloned()
                .map(Formula::Atom)
                .chain(self.ctx.iter().cloned()),
        )
    }
}

/// Splits a conjunction into atoms and opaque context entries. `True`
/// conjuncts are dropped; anything that is not an atom or a conjunction is
/// kept whole in `ctx`.
fn absorb(f: &Formula, atoms: &mut Vec<Atom>, ctx: &mut Vec<Formula>) {
    match f {
        Formula::True => {}
        Formula::And(a, b) => {
            absorb(a, atoms, ctx);
            absorb(b, atoms, ctx);
        }
        Formula::Atom(at) => atoms.push(at.clone()),
        other => ctx.push(other.clone()),
    }
}

/// Modified disjunctive normal form: distributes conjunction over
/// disjunction but treats quantified subformulas as atomic, leaving them in
/// the context of each disjunct. Expects negation normal form.
pub fn to_modified_dnf(f: &Formula) -> Vec<Disjunct> {
    match f {
        Formula::False => Vec::new(),
        Formula::Or(a, b) => {
            let mut out = to_modified_dnf(a);
            out.extend(to_modified_dnf(b));
            out
        }
        Formula::And(a, b) => {
            let left = to_modified_dnf(a);
            let right = to_modified_dnf(b);
            let mut out = Vec::with_capacity(left.len() * right.len());
            for l in &left {
                for r in &right {
                    let mut atoms = l.atoms.clone();
                    atoms.extend(r.atoms.iter().cloned());
                    let mut ctx = l.ctx.clone();
                    ctx.extend(r.ctx.iter().cloned());
                    out.push(Disjunct {
                        n_pulled: 0,
                        atoms,
                        ctx,
                    });
                }
            }
            out
        }
        other => {
            let mut atoms = Vec::new();
            let mut ctx = Vec::new();
            absorb(other, &mut atoms, &mut ctx);
            vec![Disjunct {
                n_pulled: 0,
                atoms,
                ctx,
            }]
        }
    }
}

/// Pulls existential binders sitting in the context up over the
/// conjunction: `A /\ exists z. B` becomes `exists z. (A' /\ B)` with `A`
/// lifted past the new innermost binder. Bodies of pulled binders are split
/// and absorbed; freshly exposed existentials are pulled in turn.
pub fn reach_under(d: &Disjunct) -> Disjunct {
    let mut out = d.clone();
    loop {
        let Some(pos) = out.ctx.iter().position(|f| matches!(f, Formula::ExQ(_))) else {
            return out;
        };
        let Formula::ExQ(body) = out.ctx.remove(pos) else {
            unreachable!();
        };
        for at in &mut out.atoms {
            at.poly = at.poly.lift_poly(0, 1);
        }
        for f in &mut out.ctx {
            *f = lift_formula(f, 0, 1);
        }
        absorb(&body, &mut out.atoms, &mut out.ctx);
        out.n_pulled += 1;
    }
}

/// Pushes universal quantifiers inward: over conjunctions they split,
/// vacuous binders are dropped (lowering the body), and over a disjunction
/// with one side free of the bound variable the quantifier narrows to the
/// other side. Iterates to a fixed point.
pub fn push_forall(f: &Formula) -> Formula {
    let mut cur = f.clone();
    loop {
        let next = push_forall_step(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn drop_binder(body: &Formula) -> Formula {
    lower_formula(body, 0, 1).expect("body does not mention the bound variable")
}

fn push_forall_step(f: &Formula) -> Formula {
    match f {
        Formula::And(a, b) => Formula::and(push_forall_step(a), push_forall_step(b)),
        Formula::Or(a, b) => Formula::or(push_forall_step(a), push_forall_step(b)),
        Formula::Neg(g) => Formula::neg(push_forall_step(g)),
        Formula::ExQ(body) => Formula::exq(push_forall_step(body)),
        Formula::AllQ(body) => {
            let body = push_forall_step(body);
            match body {
                Formula::And(a, b) => Formula::and(Formula::allq(*a), Formula::allq(*b)),
                ref b if !mentions_var(b, 0) => drop_binder(b),
                Formula::Or(a, b) if !mentions_var(&a, 0) => {
                    Formula::or(drop_binder(&a), Formula::allq(*b))
                }
                Formula::Or(a, b) if !mentions_var(&b, 0) => {
                    Formula::or(Formula::allq(*a), drop_binder(&b))
                }
                other => Formula::allq(other),
            }
        }
        leaf => leaf.clone(),
    }
}

/// Factors the largest power of `var` out of the atom: with `p = var^n * q`
/// and `n >= 1`, rewrites the atom into a sign-equivalent combination of
/// atoms over `q` and `var` alone. Returns the atom unchanged when no
/// useful factoring exists (including the already-linear case `c * var`).
pub fn unpower(var: usize, at: &Atom) -> Formula {
    let p = &at.poly;
    if p.is_zero() {
        return Formula::Atom(at.clone());
    }
    let n = p.min_exponent(var);
    if n == 0 {
        return Formula::Atom(at.clone());
    }
    let q = p.strip_power(var, n);
    if n == 1 && q.as_constant().is_some() {
        return Formula::Atom(at.clone());
    }
    let x = Polynomial::var(var);
    let even = n % 2 == 0;
    match at.rel {
        Rel::Eq => Formula::or(
            Formula::atom(Rel::Eq, x),
            Formula::atom(Rel::Eq, q),
        ),
        Rel::Neq => Formula::and(
            Formula::atom(Rel::Neq, x),
            Formula::atom(Rel::Neq, q),
        ),
        Rel::Less if even => Formula::and(
            Formula::atom(Rel::Less, q),
            Formula::atom(Rel::Neq, x),
        ),
        Rel::Less => Formula::or(
            Formula::and(
                Formula::atom(Rel::Less, q.clone()),
                Formula::atom(Rel::Less, -&x),
            ),
            Formula::and(
                Formula::atom(Rel::Less, -&q),
                Formula::atom(Rel::Less, x),
            ),
        ),
        Rel::Leq if even => Formula::or(
            Formula::atom(Rel::Leq, q),
            Formula::atom(Rel::Eq, x),
        ),
        Rel::Leq => Formula::or(
            Formula::atom(Rel::Eq, q.clone()),
            Formula::or(
                Formula::and(
                    Formula::atom(Rel::Less, q.clone()),
                    Formula::atom(Rel::Leq, -&x),
                ),
                Formula::and(
                    Formula::atom(Rel::Less, -&q),
                    Formula::atom(Rel::Leq, x),
                ),
            ),
        ),
    }
}

/// Applies [`unpower`] across the whole formula, revisiting the produced
/// atoms until none can be factored further.
pub fn unpower_all(f: &Formula) -> Formula {
    f.map_atoms(&mut |_, at| Ok(unpower_atom(at)))
        .expect("unpower does not fail")
}

fn unpower_atom(at: &Atom) -> Formula {
    for var in at.poly.variables() {
        let out = unpower(var, at);
        if !matches!(&out, Formula::Atom(a) if a == at) {
            return unpower_all(&out);
        }
    }
    Formula::Atom(at.clone())
}

fn collect_conj(f: &Formula, out: &mut Vec<Formula>) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::And(a, b) => collect_conj(a, out) && collect_conj(b, out),
        other => {
            if !out.contains(other) {
                out.push(other.clone());
            }
            true
        }
    }
}

fn collect_disj(f: &Formula, out: &mut Vec<Formula>) -> bool {
    match f {
        Formula::False => true,
        Formula::True => false,
        Formula::Or(a, b) => collect_disj(a, out) && collect_disj(b, out),
        other => {
            if !out.contains(other) {
                out.push(other.clone());
            }
            true
        }
    }
}

/// Bottom-up simplification: folds atoms with constant polynomials to
/// truth values, flattens and deduplicates conjunctions and disjunctions,
/// short-circuits on identities, cancels double negation, and collapses
/// quantifiers over decided bodies. Idempotent.
pub fn simpfm(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(at) => match at.poly.as_constant() {
            Some(c) => {
                if at.rel.holds(&c) {
                    Formula::True
                } else {
                    Formula::False
                }
            }
            None => f.clone(),
        },
        Formula::And(a, b) => {
            let sa = simpfm(a);
            let sb = simpfm(b);
            let mut parts = Vec::new();
            if collect_conj(&sa, &mut parts) && collect_conj(&sb, &mut parts) {
                Formula::and_all(parts)
            } else {
                Formula::False
            }
        }
        Formula::Or(a, b) => {
            let sa = simpfm(a);
            let sb = simpfm(b);
            let mut parts = Vec::new();
            if collect_disj(&sa, &mut parts) && collect_disj(&sb, &mut parts) {
                Formula::or_all(parts)
            } else {
                Formula::True
            }
        }
        Formula::Neg(g) => match simpfm(g) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(at) => Formula::Atom(at.negate()),
            Formula::Neg(inner) => *inner,
            other => Formula::neg(other),
        },
        Formula::ExQ(body) => match simpfm(body) {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            other => Formula::exq(other),
        },
        Formula::AllQ(body) => match simpfm(body) {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            other => Formula::allq(other),
        },
    }
}

/// First equality atom whose polynomial has degree 1 or 2 in `var` and a
/// coefficient that is a nonzero constant, so the all-coefficients-zero
/// case is impossible and the equality split needs no degenerate branch.
pub fn find_lucky(var: usize, atoms: &[Atom]) -> Option<usize> {
    atoms.iter().position(|at| {
        at.rel == Rel::Eq && {
            let d = at.poly.degree_in(var);
            (1..=2).contains(&d)
                && (0..=2).any(|i| {
                    at.poly
                        .isolate_coefficient(var, i)
                        .as_constant()
                        .is_some_and(|c| !num::Zero::is_zero(&c))
                })
        }
    })
}
