//! Top-level elimination algorithms and the extensible single-quantifier
//! driver. Quantifiers are processed innermost-first; universal binders go
//! through the duality `forall x. F == not exists x. not F`; a step that
//! cannot fire leaves its quantifier intact, so every algorithm degrades
//! gracefully to a partially simplified residual.

use std::str::FromStr;
use std::time::Instant;

use crate::formula::{mentions_var, nnf, Atom, Formula, Rel};
use crate::transform::{
    find_lucky, push_forall, reach_under, simpfm, to_modified_dnf, unpower_all,
};
use crate::vsub::{elim_var, elim_var_equality, elim_var_lucky};

/// Single-quantifier elimination step: given the target variable's index,
/// the atoms of one conjunction, and its opaque context formulas, either
/// produces an equivalent formula no longer mentioning the variable or
/// declines. Must preserve the existential truth of the conjunction.
pub type StepFn<'a> = dyn FnMut(usize, &[Atom], &[Formula]) -> Option<Formula> + 'a;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Lucky,
    Equality,
    Equality3,
    General,
    General3,
    Leg,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Lucky => "lucky",
            Algorithm::Equality => "equality",
            Algorithm::Equality3 => "equality3",
            Algorithm::General => "general",
            Algorithm::General3 => "general3",
            Algorithm::Leg => "leg",
        }
    }

    pub fn all() -> [Algorithm; 6] {
        [
            Algorithm::Lucky,
            Algorithm::Equality,
            Algorithm::Equality3,
            Algorithm::General,
            Algorithm::General3,
            Algorithm::Leg,
        ]
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::all()
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}` (expected one of lucky, equality, equality3, general, general3, leg)"))
    }
}

/// Outcome of one algorithm run.
#[derive(Debug, Clone)]
pub struct QeReport {
    pub algorithm: String,
    pub result: Formula,
    /// Set iff the result folded to a Boolean constant.
    pub decided: Option<bool>,
    /// Number of full elimination passes executed.
    pub rounds: usize,
    pub duration_ms: u128,
    /// Whether the general step ever declined because the disjunct carried
    /// quantified context, which its theorem does not cover.
    pub general_ctx_gated: bool,
}

/// Removes every quantifier whose bound variable does not occur in its
/// body, lowering the indices underneath.
pub fn clear_quantifiers(f: &Formula) -> Formula {
    match f {
        Formula::And(a, b) => Formula::and(clear_quantifiers(a), clear_quantifiers(b)),
        Formula::Or(a, b) => Formula::or(clear_quantifiers(a), clear_quantifiers(b)),
        Formula::Neg(g) => Formula::neg(clear_quantifiers(g)),
        Formula::ExQ(body) | Formula::AllQ(body) => {
            let inner = clear_quantifiers(body);
            if mentions_var(&inner, 0) {
                match f {
                    Formula::ExQ(_) => Formula::exq(inner),
                    _ => Formula::allq(inner),
                }
            } else {
                crate::formula::lower_formula(&inner, 0, 1)
                    .expect("bound variable is unmentioned")
            }
        }
        leaf => leaf.clone(),
    }
}

/// The standard preprocessing pipeline applied under each quantifier.
pub fn default_opt(f: &Formula) -> Formula {
    simpfm(&unpower_all(&push_forall(&nnf(f))))
}

fn expired(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() >= d)
}

/// Lifts a single-quantifier step to all quantifiers of a formula,
/// innermost first. Each existential body is preprocessed, split into
/// modified DNF, reached-under, stepped per disjunct, and refolded;
/// universal quantifiers are handled by local duality. Failed steps leave
/// their quantifier intact, and the result never has more quantifiers than
/// the input.
pub fn qe_dnf(
    opt: &dyn Fn(&Formula) -> Formula,
    step: &mut StepFn,
    f: &Formula,
    deadline: Option<Instant>,
) -> Formula {
    let walked = walk(opt, step, &opt(f), deadline);
    clear_quantifiers(&simpfm(&walked))
}

fn walk(
    opt: &dyn Fn(&Formula) -> Formula,
    step: &mut StepFn,
    f: &Formula,
    deadline: Option<Instant>,
) -> Formula {
    match f {
        Formula::And(a, b) => Formula::and(
            walk(opt, step, a, deadline),
            walk(opt, step, b, deadline),
        ),
        Formula::Or(a, b) => Formula::or(
            walk(opt, step, a, deadline),
            walk(opt, step, b, deadline),
        ),
        Formula::Neg(g) => Formula::neg(walk(opt, step, g, deadline)),
        Formula::ExQ(body) => {
            let inner = walk(opt, step, body, deadline);
            process_ex(opt, step, &inner, deadline)
        }
        Formula::AllQ(body) => {
            let inner = walk(opt, step, body, deadline);
            let dual = process_ex(opt, step, &nnf(&Formula::neg(inner)), deadline);
            simpfm(&nnf(&Formula::neg(dual)))
        }
        leaf => leaf.clone(),
    }
}

/// Eliminates the binder of `exists x. body` where possible. Works
/// disjunct by disjunct: eligible disjuncts lose the variable, ineligible
/// ones are re-closed over their own existential. Falls back to the
/// unsplit formula when no disjunct made progress or splitting would
/// increase the quantifier count.
fn process_ex(
    opt: &dyn Fn(&Formula) -> Formula,
    step: &mut StepFn,
    body: &Formula,
    deadline: Option<Instant>,
) -> Formula {
    let body = opt(body);
    let baseline = clear_quantifiers(&simpfm(&Formula::exq(body.clone())));
    if matches!(baseline, Formula::True | Formula::False) || expired(deadline) {
        return baseline;
    }
    let mut progressed = false;
    let mut outs = Vec::new();
    for d in to_modified_dnf(&body) {
        let d = reach_under(&d);
        let var = d.n_pulled;
        let inner = match step(var, &d.atoms, &d.ctx) {
            Some(out) => {
                debug_assert!(!mentions_var(&out, var), "step left the variable live");
                progressed = true;
                out
            }
            None => d.conjunction(),
        };
        // Rebuild the binder block: the pulled binders innermost, the
        // target variable's binder outermost; dead binders fall away.
        let mut wrapped = inner;
        for _ in 0..=d.n_pulled {
            wrapped = Formula::exq(wrapped);
        }
        outs.push(clear_quantifiers(&simpfm(&wrapped)));
    }
    if !progressed {
        return baseline;
    }
    let result = simpfm(&Formula::or_all(outs));
    if result.quantifier_count() > baseline.quantifier_count() {
        baseline
    } else {
        result
    }
}

fn eligible_equality(var: usize, atoms: &[Atom]) -> Option<usize> {
    // Prefer a lucky target: its degenerate branch folds away entirely.
    find_lucky(var, atoms).or_else(|| {
        atoms.iter().position(|at| {
            at.rel == Rel::Eq && (1..=2).contains(&at.poly.degree_in(var))
        })
    })
}

fn lucky_step(var: usize, atoms: &[Atom], ctx: &[Formula]) -> Option<Formula> {
    let target = find_lucky(var, atoms)?;
    elim_var_lucky(var, atoms, ctx, target).ok()
}

fn equality_step(var: usize, atoms: &[Atom], ctx: &[Formula]) -> Option<Formula> {
    let target = eligible_equality(var, atoms)?;
    elim_var_equality(var, atoms, ctx, target).ok()
}

fn general_step(
    var: usize,
    atoms: &[Atom],
    ctx: &[Formula],
    gated: &mut bool,
) -> Option<Formula> {
    if !ctx.is_empty() {
        // The general theorem requires a quantifier-free conjunction: the
        // -inf and off-root substitutions are not pointwise sound under
        // inner binders.
        *gated = true;
        return None;
    }
    elim_var(var, atoms, &[]).ok()
}

#[derive(Clone, Copy)]
enum StepKind {
    Lucky,
    Equality,
    General,
}

fn one_pass(
    kind: StepKind,
    f: &Formula,
    deadline: Option<Instant>,
    gated: &mut bool,
) -> Formula {
    let mut step = |var: usize, atoms: &[Atom], ctx: &[Formula]| match kind {
        StepKind::Lucky => lucky_step(var, atoms, ctx),
        StepKind::Equality => equality_step(var, atoms, ctx),
        StepKind::General => general_step(var, atoms, ctx, gated),
    };
    qe_dnf(&default_opt, &mut step, f, deadline)
}

/// Runs the named algorithm against a wall-clock deadline. On timeout the
/// partially processed formula is returned; the report's `decided` field
/// distinguishes real answers from residuals.
pub fn run(algorithm: Algorithm, f: &Formula, deadline: Option<Instant>) -> QeReport {
    let start = Instant::now();
    let schedule: &[StepKind] = match algorithm {
        Algorithm::Lucky => &[StepKind::Lucky],
        Algorithm::Equality => &[StepKind::Equality],
        Algorithm::Equality3 => &[StepKind::Equality; 3],
        Algorithm::General => &[StepKind::General],
        Algorithm::General3 => &[StepKind::General; 3],
        Algorithm::Leg => &[StepKind::Lucky, StepKind::Equality, StepKind::General],
    };
    let mut gated = false;
    let mut cur = f.clone();
    let mut rounds = 0;
    for &kind in schedule {
        cur = one_pass(kind, &cur, deadline, &mut gated);
        rounds += 1;
    }
    let decided = match cur {
        Formula::True => Some(true),
        Formula::False => Some(false),
        _ => None,
    };
    QeReport {
        algorithm: algorithm.name().to_string(),
        result: cur,
        decided,
        rounds,
        duration_ms: start.elapsed().as_millis(),
        general_ctx_gated: gated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyarith::Polynomial;

    fn x(i: usize) -> Polynomial {
        Polynomial::var(i)
    }

    fn eq(p: Polynomial) -> Formula {
        Formula::atom(Rel::Eq, p)
    }

    fn less(p: Polynomial) -> Formula {
        Formula::atom(Rel::Less, p)
    }

    #[test]
    fn clear_quantifiers_examples() {
        // vacuous binder drops with lowering
        let f = Formula::exq(eq(x(1)));
        assert_eq!(clear_quantifiers(&f), eq(x(0)));
        // live binder stays
        let f = Formula::exq(eq(x(0)));
        assert_eq!(clear_quantifiers(&f), f);
        // constant body
        assert_eq!(clear_quantifiers(&Formula::allq(Formula::True)), Formula::True);
    }

    #[test]
    fn vs_equality_examples() {
        // exists x. x - 3 = 0
        let f = Formula::exq(eq(x(0) - Polynomial::from_int(3)));
        let r = run(Algorithm::Equality, &f, None);
        assert_eq!(r.result, Formula::True);
        assert_eq!(r.decided, Some(true));
        assert_eq!(r.rounds, 1);

        // exists x. x^2 + 1 = 0
        let f = Formula::exq(eq(x(0).pow(2) + Polynomial::one()));
        let r = run(Algorithm::Equality, &f, None);
        assert_eq!(r.result, Formula::False);

        // exists x. x^2 + y = 0: quantifier-free residual equivalent to y <= 0
        let f = Formula::exq(eq(x(0).pow(2) + x(1)));
        let r = run(Algorithm::Equality, &f, None);
        assert!(r.result.is_quantifier_free());
        for (y, expect) in [(-4i64, true), (0, true), (3, false)] {
            let v = crate::polyarith::Valuation::from_ints(&[y]);
            assert_eq!(crate::formula::eval_qf(&r.result, &v).unwrap(), expect);
        }
    }

    #[test]
    fn vs_general_examples() {
        // exists x. (x < 0 /\ -x < 0)
        let f = Formula::exq(Formula::and(less(x(0)), less(-x(0))));
        let r = run(Algorithm::General, &f, None);
        assert_eq!(r.result, Formula::False);

        // exists x. x != 0: true via the -inf branch
        let f = Formula::exq(Formula::atom(Rel::Neq, x(0)));
        let r = run(Algorithm::General, &f, None);
        assert_eq!(r.result, Formula::True);

        // degree 3 with no common factor: the quantifier survives
        let f = Formula::exq(eq(x(0).pow(3) + x(0) - Polynomial::one()));
        let r = run(Algorithm::General, &f, None);
        assert_eq!(r.decided, None);
        assert_eq!(r.result.quantifier_count(), 1);
    }

    #[test]
    fn vs_lucky_examples() {
        // exists x. x^2 - 2 = 0: the constant -2 makes the atom lucky
        let f = Formula::exq(eq(x(0).pow(2) - Polynomial::from_int(2)));
        let r = run(Algorithm::Lucky, &f, None);
        assert_eq!(r.result, Formula::True);

        // no lucky atom: exists x. x*y + z = 0 stays put under lucky alone
        let f = Formula::exq(eq(x(0) * x(1) + x(2)));
        let r = run(Algorithm::Lucky, &f, None);
        assert_eq!(r.decided, None);
        assert_eq!(r.result.quantifier_count(), 1);
        // ... while the closed variant falls to the equality step
        let closed = Formula::exq(Formula::exq(f.clone()));
        let r = run(Algorithm::Equality, &closed, None);
        assert_eq!(r.result, Formula::True);

        // quantifier-free input is only simplified
        let f = Formula::and(Formula::True, less(x(0)));
        let r = run(Algorithm::Lucky, &f, None);
        assert_eq!(r.result, less(x(0)));
    }

    #[test]
    fn vs_leg_nested_quantifiers() {
        // exists x. (x = 0 /\ exists y. x y^3 + y = 0)
        let inner = eq(x(1) * x(0).pow(3) + x(0));
        let f = Formula::exq(Formula::and(eq(x(0)), Formula::exq(inner)));
        let r = run(Algorithm::Leg, &f, None);
        assert_eq!(r.result, Formula::True);
        assert_eq!(r.rounds, 3);

        // exists x. x^2 + 1 <= 0
        let f = Formula::exq(Formula::atom(Rel::Leq, x(0).pow(2) + Polynomial::one()));
        let r = run(Algorithm::Leg, &f, None);
        assert_eq!(r.result, Formula::False);

        // decided input is a fixed point
        let r = run(Algorithm::Leg, &Formula::True, None);
        assert_eq!(r.result, Formula::True);
    }

    #[test]
    fn forall_by_duality() {
        // forall x. x^2 >= 0, written as -x^2 <= 0
        let f = Formula::allq(Formula::atom(Rel::Leq, -x(0).pow(2)));
        let r = run(Algorithm::General, &f, None);
        assert_eq!(r.result, Formula::True);

        // forall x. x < 1 is false
        let f = Formula::allq(less(x(0) - Polynomial::one()));
        let r = run(Algorithm::General, &f, None);
        assert_eq!(r.result, Formula::False);
    }

    #[test]
    fn general_ctx_gate_is_recorded() {
        // exists x. (x < y /\ forall z. z^3 + z + x <= 0): the cubic keeps
        // the universal alive, and the quantified context then blocks the
        // general step on that disjunct.
        let ctx_forall = Formula::allq(Formula::atom(Rel::Leq, x(0).pow(3) + x(0) + x(1)));
        let f = Formula::exq(Formula::and(less(x(0) - x(1)), ctx_forall));
        let r = run(Algorithm::General, &f, None);
        assert!(r.general_ctx_gated);
        // monotone progress still holds
        assert!(r.result.quantifier_count() <= f.quantifier_count());
    }

    #[test]
    fn timeout_returns_residual() {
        let f = Formula::exq(eq(x(0)));
        let past = Instant::now() - std::time::Duration::from_millis(1);
        let r = run(Algorithm::Equality, &f, Some(past));
        // the pass still terminates and returns something equivalent
        assert!(r.result == Formula::True || r.result.quantifier_count() <= 1);
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::all() {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("nope".parse::<Algorithm>().is_err());
    }
}
