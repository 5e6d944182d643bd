//! The virtual substitution core: fraction substitution, square-root
//! substitution with its four-way case split, negative-infinity and
//! infinitesimal substitution, sample-point collection, and the `elim_var`
//! drivers.
//!
//! All substitutions rewrite an atom into an equivalent quantifier-free
//! formula in the base language; the substituted term (a fraction, a root
//! expression, `-inf`, or `r + eps`) is never materialized.

use crate::formula::{Atom, Formula, Rel};
use crate::polyarith::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VsError {
    #[error("degree {degree} in variable {var} exceeds the quadratic limit")]
    DegreeTooHigh { var: usize, degree: u32 },
}

/// Root of a linear polynomial: the value `num / den`. Neither component
/// mentions the target variable; emitters guard with `den != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinRoot {
    pub num: Polynomial,
    pub den: Polynomial,
}

/// Root of a quadratic polynomial: the value `(a + b * sqrt(c)) / d`.
/// Emitters guard with `c >= 0` and `d != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadRoot {
    pub a: Polynomial,
    pub b: Polynomial,
    pub c: Polynomial,
    pub d: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Root {
    Lin(LinRoot),
    Quad(QuadRoot),
}

impl Root {
    fn lifted(&self, amount: usize) -> Root {
        match self {
            Root::Lin(r) => Root::Lin(LinRoot {
                num: r.num.lift_poly(0, amount),
                den: r.den.lift_poly(0, amount),
            }),
            Root::Quad(r) => Root::Quad(QuadRoot {
                a: r.a.lift_poly(0, amount),
                b: r.b.lift_poly(0, amount),
                c: r.c.lift_poly(0, amount),
                d: r.d.lift_poly(0, amount),
            }),
        }
    }
}

/// A representative sample point for one interval or root of the target
/// variable's number line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SamplePoint {
    NegInfinity,
    Exact(Root),
    Epsilon(Root),
}

/// A sample point together with the side conditions under which it denotes
/// an actual root (`b != 0`, `a != 0 && disc >= 0`, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardedPoint {
    pub guard: Formula,
    pub point: SamplePoint,
}

/// Virtually substitutes the fraction `a / b` for `var` into `at`.
///
/// With `d` the degree of the atom's polynomial in `var` and `c_i` its
/// coefficients, emits `sum_i c_i * a^i * b^(d-i)`, additionally multiplied
/// by `b^(d mod 2)` for the order relations so the inequality direction is
/// preserved under a possibly negative denominator.
pub fn linear_substitution(var: usize, a: &Polynomial, b: &Polynomial, at: &Atom) -> Formula {
    let d = at.poly.degree_in(var);
    if d == 0 {
        return Formula::Atom(at.clone());
    }
    let mut sum = Polynomial::zero();
    for i in 0..=d {
        let coeff = at.poly.isolate_coefficient(var, i);
        sum = sum + coeff * a.pow(i) * b.pow(d - i);
    }
    let needs_parity_fix = matches!(at.rel, Rel::Less | Rel::Leq);
    if needs_parity_fix && d % 2 == 1 {
        sum = sum * b;
    }
    Formula::atom(at.rel, sum)
}

/// Quantifier-free equivalent of `(A + B * sqrt(c)) ~ 0`, intended under the
/// side condition `c >= 0` (conjoined by callers).
pub fn sqrt_case_split(a: &Polynomial, b: &Polynomial, c: &Polynomial, rel: Rel) -> Formula {
    let ab = a * b;
    let a2 = a.pow(2);
    let b2c = b.pow(2) * c;
    // A^2 - B^2 c and its negation
    let diff = &a2 - &b2c;
    let neg_diff = &b2c - &a2;
    match rel {
        // A + B sqrt(c) = 0  <->  AB <= 0 /\ A^2 - B^2 c = 0
        Rel::Eq => Formula::and(
            Formula::atom(Rel::Leq, ab),
            Formula::atom(Rel::Eq, diff),
        ),
        // A + B sqrt(c) < 0  <->  (A<0 /\ B^2 c - A^2 < 0) \/ (B<=0 /\ (A<0 \/ A^2 - B^2 c < 0))
        Rel::Less => Formula::or(
            Formula::and(
                Formula::atom(Rel::Less, a.clone()),
                Formula::atom(Rel::Less, neg_diff),
            ),
            Formula::and(
                Formula::atom(Rel::Leq, b.clone()),
                Formula::or(
                    Formula::atom(Rel::Less, a.clone()),
                    Formula::atom(Rel::Less, diff),
                ),
            ),
        ),
        // A + B sqrt(c) <= 0  <->  (A<=0 /\ B^2 c - A^2 <= 0) \/ (B<=0 /\ A^2 - B^2 c <= 0)
        Rel::Leq => Formula::or(
            Formula::and(
                Formula::atom(Rel::Leq, a.clone()),
                Formula::atom(Rel::Leq, neg_diff),
            ),
            Formula::and(
                Formula::atom(Rel::Leq, b.clone()),
                Formula::atom(Rel::Leq, diff),
            ),
        ),
        // A + B sqrt(c) != 0  <->  -AB < 0 \/ A^2 - B^2 c != 0
        Rel::Neq => Formula::or(
            Formula::atom(Rel::Less, -ab),
            Formula::atom(Rel::Neq, diff),
        ),
    }
}

/// Virtually substitutes `(a + b * sqrt(c)) / d` for `var` into `at`,
/// intended under `d != 0 /\ c >= 0`.
///
/// Staged: first the fraction `(a + b * var) / d` is normalized in (reusing
/// `var` to stand for `sqrt(c)`), then even and odd powers of `var` are
/// collected into `A + B * sqrt(c)`, and finally the square root is removed
/// by the four-way case split.
pub fn quadratic_sub(
    var: usize,
    a: &Polynomial,
    b: &Polynomial,
    c: &Polynomial,
    d: &Polynomial,
    at: &Atom,
) -> Formula {
    let deg = at.poly.degree_in(var);
    if deg == 0 {
        return Formula::Atom(at.clone());
    }
    // Stage 1: normalize the fraction with numerator a + b * var, where the
    // reused var now stands for sqrt(c).
    let numerator = a + &(b * Polynomial::var(var));
    let mut p1 = Polynomial::zero();
    for i in 0..=deg {
        let coeff = at.poly.isolate_coefficient(var, i);
        p1 = p1 + coeff * numerator.pow(i) * d.pow(deg - i);
    }
    let needs_parity_fix = matches!(at.rel, Rel::Less | Rel::Leq);
    if needs_parity_fix && deg % 2 == 1 {
        p1 = p1 * d;
    }
    // Stage 2: split even and odd powers of sqrt(c).
    let deg2 = p1.degree_in(var);
    let mut even = Polynomial::zero();
    let mut odd = Polynomial::zero();
    for i in 0..=deg2 {
        let coeff = p1.isolate_coefficient(var, i) * c.pow(i / 2);
        if i % 2 == 0 {
            even = even + coeff;
        } else {
            odd = odd + coeff;
        }
    }
    // Stage 3: eliminate the square root.
    sqrt_case_split(&even, &odd, c, at.rel)
}

fn quadratic_coeffs(var: usize, at: &Atom) -> Result<(Polynomial, Polynomial, Polynomial), VsError> {
    let degree = at.poly.degree_in(var);
    if degree > 2 {
        return Err(VsError::DegreeTooHigh { var, degree });
    }
    Ok((
        at.poly.isolate_coefficient(var, 2),
        at.poly.isolate_coefficient(var, 1),
        at.poly.isolate_coefficient(var, 0),
    ))
}

/// Formula over `var`-free polynomials equivalent to "`at` holds for all
/// sufficiently negative `var`". Requires degree at most 2 in `var`.
pub fn subst_neg_infinity(var: usize, at: &Atom) -> Result<Formula, VsError> {
    let (a, b, c) = quadratic_coeffs(var, at)?;
    Ok(neg_infinity_formula(at.rel, &a, &b, &c))
}

fn neg_infinity_formula(rel: Rel, a: &Polynomial, b: &Polynomial, c: &Polynomial) -> Formula {
    let eq_form = |a: &Polynomial, b: &Polynomial, c: &Polynomial| {
        Formula::and(
            Formula::atom(Rel::Eq, a.clone()),
            Formula::and(
                Formula::atom(Rel::Eq, b.clone()),
                Formula::atom(Rel::Eq, c.clone()),
            ),
        )
    };
    // Sign at -inf is dominated by the leading coefficient:
    // a < 0 \/ (a = 0 /\ (b > 0 \/ (b = 0 /\ c < 0)))
    let less_form = |a: &Polynomial, b: &Polynomial, c: &Polynomial| {
        Formula::or(
            Formula::atom(Rel::Less, a.clone()),
            Formula::and(
                Formula::atom(Rel::Eq, a.clone()),
                Formula::or(
                    Formula::atom(Rel::Less, -b),
                    Formula::and(
                        Formula::atom(Rel::Eq, b.clone()),
                        Formula::atom(Rel::Less, c.clone()),
                    ),
                ),
            ),
        )
    };
    match rel {
        Rel::Eq => eq_form(a, b, c),
        Rel::Less => less_form(a, b, c),
        Rel::Leq => Formula::or(eq_form(a, b, c), less_form(a, b, c)),
        Rel::Neq => Formula::or(
            Formula::atom(Rel::Neq, a.clone()),
            Formula::or(
                Formula::atom(Rel::Neq, b.clone()),
                Formula::atom(Rel::Neq, c.clone()),
            ),
        ),
    }
}

/// Substitutes the exact root value into the atom.
pub fn subst_root(var: usize, root: &Root, at: &Atom) -> Formula {
    match root {
        Root::Lin(r) => linear_substitution(var, &r.num, &r.den, at),
        Root::Quad(r) => quadratic_sub(var, &r.a, &r.b, &r.c, &r.d, at),
    }
}

/// Formula equivalent to "`at` holds on `(r, r + delta]` for some positive
/// `delta`". Requires degree at most 2 in `var`; the root's components must
/// not mention `var`.
pub fn subst_epsilon(var: usize, root: &Root, at: &Atom) -> Result<Formula, VsError> {
    let (a, b, c) = quadratic_coeffs(var, at)?;
    let zero_poly_form = |rel: Rel| {
        // On an interval, p = 0 (resp. p != 0 for Neq) reduces to the
        // coefficient conditions: only the zero polynomial vanishes on
        // infinitely many points.
        match rel {
            Rel::Eq => Formula::and(
                Formula::atom(Rel::Eq, a.clone()),
                Formula::and(
                    Formula::atom(Rel::Eq, b.clone()),
                    Formula::atom(Rel::Eq, c.clone()),
                ),
            ),
            Rel::Neq => Formula::or(
                Formula::atom(Rel::Neq, a.clone()),
                Formula::or(
                    Formula::atom(Rel::Neq, b.clone()),
                    Formula::atom(Rel::Neq, c.clone()),
                ),
            ),
            _ => unreachable!(),
        }
    };
    Ok(match at.rel {
        Rel::Eq => zero_poly_form(Rel::Eq),
        Rel::Neq => zero_poly_form(Rel::Neq),
        Rel::Less => less_epsilon(var, root, &at.poly),
        Rel::Leq => Formula::or(zero_poly_form(Rel::Eq), less_epsilon(var, root, &at.poly)),
    })
}

/// The infinitesimal recurrence:
/// `(p < 0)[r + eps] = (p < 0)[r] \/ ((p = 0)[r] /\ (dp/dx < 0)[r + eps])`,
/// bottoming out at degree 0 where the atom is its own substitution.
fn less_epsilon(var: usize, root: &Root, p: &Polynomial) -> Formula {
    if p.degree_in(var) == 0 {
        return Formula::atom(Rel::Less, p.clone());
    }
    let at_r_less = subst_root(var, root, &Atom::new(Rel::Less, p.clone()));
    let at_r_eq = subst_root(var, root, &Atom::new(Rel::Eq, p.clone()));
    Formula::or(
        at_r_less,
        Formula::and(at_r_eq, less_epsilon(var, root, &p.derivative(var))),
    )
}

/// Collects the guarded candidate roots of every atom, partitioned into
/// exact sample points (from `=` and `<=` atoms) and off-root sample points
/// (from `<` and `!=` atoms).
pub fn collect_roots(
    var: usize,
    atoms: &[Atom],
) -> Result<(Vec<GuardedPoint>, Vec<GuardedPoint>), VsError> {
    let mut exact = Vec::new();
    let mut eps = Vec::new();
    for at in atoms {
        let degree = at.poly.degree_in(var);
        if degree > 2 {
            return Err(VsError::DegreeTooHigh { var, degree });
        }
        if degree == 0 {
            // Constant in var: empty root set (covers the zero polynomial).
            continue;
        }
        let a = at.poly.isolate_coefficient(var, 2);
        let b = at.poly.isolate_coefficient(var, 1);
        let c = at.poly.isolate_coefficient(var, 0);
        let dest: &mut Vec<GuardedPoint> = match at.rel {
            Rel::Eq | Rel::Leq => &mut exact,
            Rel::Less | Rel::Neq => &mut eps,
        };
        let is_eps = matches!(at.rel, Rel::Less | Rel::Neq);
        let mut push = |guard: Formula, root: Root| {
            let point = if is_eps {
                SamplePoint::Epsilon(root)
            } else {
                SamplePoint::Exact(root)
            };
            dest.push(GuardedPoint { guard, point });
        };
        // Linear root -c / b under a = 0 /\ b != 0.
        let lin_guard = Formula::and(
            Formula::atom(Rel::Eq, a.clone()),
            Formula::atom(Rel::Neq, b.clone()),
        );
        push(
            lin_guard,
            Root::Lin(LinRoot {
                num: -&c,
                den: b.clone(),
            }),
        );
        // Quadratic roots (-b +- sqrt(disc)) / (2a) under a != 0 /\ disc >= 0.
        if !a.is_zero() {
            let disc = b.pow(2) - a.scale(&crate::polyarith::rat(4)) * &c;
            let quad_guard = Formula::and(
                Formula::atom(Rel::Neq, a.clone()),
                Formula::atom(Rel::Leq, -&disc),
            );
            let two_a = a.scale(&crate::polyarith::rat(2));
            for sign in [1i64, -1] {
                push(
                    quad_guard.clone(),
                    Root::Quad(QuadRoot {
                        a: -&b,
                        b: Polynomial::from_int(sign),
                        c: disc.clone(),
                        d: two_a.clone(),
                    }),
                );
            }
        }
    }
    Ok((exact, eps))
}

/// Maps the substitution of a sample point over every atom of a formula,
/// adjusting the target variable and lifting root components under binders.
pub fn subst_point(var: usize, point: &SamplePoint, f: &Formula) -> Result<Formula, VsError> {
    f.map_atoms(&mut |depth, at| match point {
        SamplePoint::NegInfinity => subst_neg_infinity(var + depth, at),
        SamplePoint::Exact(root) => Ok(subst_root(var + depth, &root.lifted(depth), at)),
        SamplePoint::Epsilon(root) => subst_epsilon(var + depth, &root.lifted(depth), at),
    })
}

fn check_degrees(var: usize, atoms: &[Atom], ctx: &[Formula]) -> Result<(), VsError> {
    for at in atoms {
        let degree = at.poly.degree_in(var);
        if degree > 2 {
            return Err(VsError::DegreeTooHigh { var, degree });
        }
    }
    for f in ctx {
        let mut bad = None;
        f.map_polys(&mut |depth, p| {
            let degree = p.degree_in(var + depth);
            if degree > 2 && bad.is_none() {
                bad = Some(VsError::DegreeTooHigh {
                    var: var + depth,
                    degree,
                });
            }
            p.clone()
        });
        if let Some(e) = bad {
            return Err(e);
        }
    }
    Ok(())
}

fn conjunction(atoms: &[Atom], ctx: &[Formula]) -> Formula {
    Formula::and_all(
        atoms
            .iter()
            .cloned()
            .map(Formula::Atom)
            .chain(ctx.iter().cloned()),
    )
}

/// The general VS driver: replaces `exists var. (atoms /\ ctx)` by the
/// disjunction of the formula at `-inf`, at every guarded exact root, and at
/// every guarded off-root. The target variable does not occur in the result.
pub fn elim_var(var: usize, atoms: &[Atom], ctx: &[Formula]) -> Result<Formula, VsError> {
    check_degrees(var, atoms, ctx)?;
    let conj = conjunction(atoms, ctx);
    let mut branches = vec![subst_point(var, &SamplePoint::NegInfinity, &conj)?];
    let (exact, eps) = collect_roots(var, atoms)?;
    for gp in exact.iter().chain(eps.iter()) {
        branches.push(Formula::and(
            gp.guard.clone(),
            subst_point(var, &gp.point, &conj)?,
        ));
    }
    Ok(Formula::or_all(branches))
}

/// Equality VS on the EQ atom at `target`: the three-way case split on the
/// target's coefficients. The linear and quadratic branches eliminate `var`;
/// the degenerate all-zero branch retains an existential over the residual
/// conjunction.
pub fn elim_var_equality(
    var: usize,
    atoms: &[Atom],
    ctx: &[Formula],
    target: usize,
) -> Result<Formula, VsError> {
    let at = &atoms[target];
    debug_assert_eq!(at.rel, Rel::Eq);
    let (a, b, c) = quadratic_coeffs(var, at)?;
    let conj = conjunction(atoms, ctx);

    // Degenerate branch: all coefficients vanish, so the target atom is
    // uninformative; keep an existential over the residual conjunction. The
    // retained binder is rebuilt locally: lift everything by one and move
    // the (now unused) image of `var` onto the fresh binder's index 0.
    let residual = crate::formula::rename_free_var(
        &crate::formula::lift_formula(&conj, 0, 1),
        var + 1,
        0,
    );
    let degenerate = Formula::and(
        Formula::atom(Rel::Eq, a.clone()),
        Formula::and(
            Formula::atom(Rel::Eq, b.clone()),
            Formula::and(Formula::atom(Rel::Eq, c.clone()), Formula::exq(residual)),
        ),
    );

    let (linear, quadratic) = equality_branches(var, &a, &b, &c, &conj)?;
    Ok(Formula::or(degenerate, Formula::or(linear, quadratic)))
}

/// The linear and quadratic branches shared by equality VS and lucky VS.
fn equality_branches(
    var: usize,
    a: &Polynomial,
    b: &Polynomial,
    c: &Polynomial,
    conj: &Formula,
) -> Result<(Formula, Formula), VsError> {
    // Linear: a = 0 /\ b != 0 /\ F[var := -c/b]
    let lin_root = Root::Lin(LinRoot {
        num: -c,
        den: b.clone(),
    });
    let linear = Formula::and(
        Formula::atom(Rel::Eq, a.clone()),
        Formula::and(
            Formula::atom(Rel::Neq, b.clone()),
            subst_point(var, &SamplePoint::Exact(lin_root), conj)?,
        ),
    );
    // Quadratic: a != 0 /\ disc >= 0 /\ (F[r+] \/ F[r-])
    let disc = b.pow(2) - a.scale(&crate::polyarith::rat(4)) * c;
    let two_a = a.scale(&crate::polyarith::rat(2));
    let mut root_subs = Vec::new();
    for sign in [1i64, -1] {
        let root = Root::Quad(QuadRoot {
            a: -b,
            b: Polynomial::from_int(sign),
            c: disc.clone(),
            d: two_a.clone(),
        });
        root_subs.push(subst_point(var, &SamplePoint::Exact(root), conj)?);
    }
    let quadratic = Formula::and(
        Formula::atom(Rel::Neq, a.clone()),
        Formula::and(
            Formula::atom(Rel::Leq, -&disc),
            Formula::or_all(root_subs),
        ),
    );
    Ok((linear, quadratic))
}

/// Lucky VS: like equality VS but without the degenerate branch, applicable
/// when some coefficient of the target atom is a nonzero constant.
pub fn elim_var_lucky(
    var: usize,
    atoms: &[Atom],
    ctx: &[Formula],
    target: usize,
) -> Result<Formula, VsError> {
    let at = &atoms[target];
    debug_assert_eq!(at.rel, Rel::Eq);
    let (a, b, c) = quadratic_coeffs(var, at)?;
    let conj = conjunction(atoms, ctx);
    let (linear, quadratic) = equality_branches(var, &a, &b, &c, &conj)?;
    Ok(Formula::or(linear, quadratic))
}
