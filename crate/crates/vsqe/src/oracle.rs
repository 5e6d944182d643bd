//! Independent ground-truth machinery for tests: exact arithmetic in
//! quadratic extensions of the rationals, Cauchy-style root bounds, and a
//! brute-force sign-table decision procedure for closed univariate
//! conjunctions. Deliberately shares no code with the substitution core so
//! equivalence tests are non-circular.

use std::cmp::Ordering;

use num::{BigInt, One, Signed, Zero};

use crate::formula::{Rel, UniAtom};
use crate::polyarith::{rat, Polynomial, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("zero polynomial has no root bound")]
    ZeroPolynomial,
    #[error("polynomial is not univariate in variable 0")]
    NotUnivariate,
    #[error("degree {0} exceeds the quadratic limit")]
    DegreeTooHigh(u32),
}

fn sgn(r: &Rat) -> i32 {
    match r.cmp(&Rat::zero()) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

/// Exact square root of a nonnegative rational, when it is one.
fn rat_sqrt_exact(r: &Rat) -> Option<Rat> {
    debug_assert!(!r.is_negative());
    let (p, q) = (r.numer(), r.denom());
    let sp = p.sqrt();
    let sq = q.sqrt();
    if &(&sp * &sp) == p && &(&sq * &sq) == q {
        Some(Rat::new(sp, sq))
    } else {
        None
    }
}

/// Rational lower approximation of `sqrt(r)` with error at most `2^-k`.
fn rat_sqrt_approx(r: &Rat, k: u32) -> Rat {
    debug_assert!(!r.is_negative());
    // sqrt(p/q) = sqrt(p q)/q; scale by 4^k before the integer square root.
    let n: BigInt = r.numer() * r.denom();
    let t = (n << (2 * k)).sqrt();
    Rat::new(t, r.denom() << k)
}

/// Sign of `a + b * sqrt(c)` for `c >= 0`, by sign-aware squaring.
fn two_term_sign(a: &Rat, b: &Rat, c: &Rat) -> i32 {
    if b.is_zero() || c.is_zero() {
        return sgn(a);
    }
    if a.is_zero() {
        return sgn(b);
    }
    let (sa, sb) = (sgn(a), sgn(b));
    if sa == sb {
        return sa;
    }
    sa * sgn(&(a * a - b * b * c))
}

/// Sign of `p + q * sqrt(c1) + r * sqrt(c2)`: one more squaring reduces to
/// the two-term case, since `(p + r sqrt(c2))^2` stays in the same
/// extension field.
fn three_term_sign(p: &Rat, q: &Rat, c1: &Rat, r: &Rat, c2: &Rat) -> i32 {
    if q.is_zero() || c1.is_zero() {
        return two_term_sign(p, r, c2);
    }
    if r.is_zero() || c2.is_zero() {
        return two_term_sign(p, q, c1);
    }
    if c1 == c2 {
        return two_term_sign(p, &(q + r), c1);
    }
    let s = two_term_sign(p, r, c2);
    let sq = sgn(q);
    if s == 0 {
        return sq;
    }
    if s == sq {
        return s;
    }
    // s and q sqrt(c1) have opposite signs: the sum takes the sign of the
    // larger magnitude, decided by (p + r sqrt(c2))^2 - q^2 c1.
    s * two_term_sign(&(p * p + r * r * c2 - q * q * c1), &(rat(2) * p * r), c2)
}

/// An element `(a + b * sqrt(c)) / d` of a real quadratic extension of the
/// rationals. Canonical: `d > 0`, and `b = c = 0` whenever the value is
/// rational (in particular when `c` is a rational square).
#[derive(Debug, Clone)]
pub struct QuadNum {
    a: Rat,
    b: Rat,
    c: Rat,
    d: Rat,
}

impl QuadNum {
    pub fn new(a: Rat, b: Rat, c: Rat, d: Rat) -> QuadNum {
        assert!(!c.is_negative(), "negative radicand");
        assert!(!d.is_zero(), "zero denominator");
        let (mut a, mut b, mut c, mut d) = (a, b, c, d);
        if d.is_negative() {
            a = -a;
            b = -b;
            d = -d;
        }
        if b.is_zero() || c.is_zero() {
            b = Rat::zero();
            c = Rat::zero();
        } else if let Some(s) = rat_sqrt_exact(&c) {
            a = a + &b * s;
            b = Rat::zero();
            c = Rat::zero();
        }
        QuadNum { a, b, c, d }
    }

    pub fn from_rat(r: Rat) -> QuadNum {
        QuadNum::new(r, Rat::zero(), Rat::zero(), Rat::one())
    }

    pub fn as_rat(&self) -> Option<Rat> {
        if self.b.is_zero() {
            Some(&self.a / &self.d)
        } else {
            None
        }
    }

    pub fn sign(&self) -> i32 {
        two_term_sign(&self.a, &self.b, &self.c)
    }

    pub fn add_rat(&self, r: &Rat) -> QuadNum {
        QuadNum::new(
            &self.a + r * &self.d,
            self.b.clone(),
            self.c.clone(),
            self.d.clone(),
        )
    }

    pub fn mul_rat(&self, r: &Rat) -> QuadNum {
        QuadNum::new(&self.a * r, &self.b * r, self.c.clone(), self.d.clone())
    }

    /// Squaring stays inside the same extension field.
    pub fn square(&self) -> QuadNum {
        QuadNum::new(
            &self.a * &self.a + &self.b * &self.b * &self.c,
            rat(2) * &self.a * &self.b,
            self.c.clone(),
            &self.d * &self.d,
        )
    }

    /// Sum of two elements with compatible radicands (either side rational,
    /// or the same `c`).
    fn add(&self, other: &QuadNum) -> QuadNum {
        let (c, b1, b2) = if self.b.is_zero() {
            (other.c.clone(), Rat::zero(), other.b.clone())
        } else if other.b.is_zero() {
            (self.c.clone(), self.b.clone(), Rat::zero())
        } else {
            assert_eq!(self.c, other.c, "incompatible radicands");
            (self.c.clone(), self.b.clone(), other.b.clone())
        };
        QuadNum::new(
            &self.a * &other.d + &other.a * &self.d,
            b1 * &other.d + b2 * &self.d,
            c,
            &self.d * &other.d,
        )
    }

    /// Rational approximation with error at most `2^-k`.
    fn approx(&self, k: u32) -> Rat {
        if self.b.is_zero() {
            return &self.a / &self.d;
        }
        // |b/d| <= 2^m for m the bit length of ceil(|b/d|).
        let scale = (&self.b / &self.d).abs();
        let m = (scale.numer() / scale.denom() + BigInt::one()).bits() as u32;
        let root = rat_sqrt_approx(&self.c, k + m + 1);
        (&self.a + &self.b * root) / &self.d
    }
}

/// Exact trichotomy for quadratic extension elements, including
/// cross-radicand comparison by at most two sign-aware squarings.
pub fn quad_compare(x: &QuadNum, y: &QuadNum) -> Ordering {
    // x - y = (P + Q sqrt(c_x) + R sqrt(c_y)) / (d_x d_y) with both
    // denominators positive by canonicity.
    let p = &x.a * &y.d - &y.a * &x.d;
    let q = &x.b * &y.d;
    let r = -(&y.b * &x.d);
    match three_term_sign(&p, &q, &x.c, &r, &y.c) {
        s if s < 0 => Ordering::Less,
        0 => Ordering::Equal,
        _ => Ordering::Greater,
    }
}

impl PartialEq for QuadNum {
    fn eq(&self, other: &Self) -> bool {
        quad_compare(self, other) == Ordering::Equal
    }
}

impl Eq for QuadNum {}

impl PartialOrd for QuadNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(quad_compare(self, other))
    }
}

impl Ord for QuadNum {
    fn cmp(&self, other: &Self) -> Ordering {
        quad_compare(self, other)
    }
}

/// Truth of the sign condition at the (possibly irrational) point `x`.
pub fn uni_atom_holds_quad(at: &UniAtom, x: &QuadNum) -> bool {
    let value = x
        .square()
        .mul_rat(&at.a)
        .add(&x.mul_rat(&at.b))
        .add(&QuadNum::from_rat(at.c.clone()));
    let s = value.sign();
    match at.rel {
        Rel::Less => s < 0,
        Rel::Eq => s == 0,
        Rel::Leq => s <= 0,
        Rel::Neq => s != 0,
    }
}

/// The real roots of `a x^2 + b x + c`, exactly. The zero polynomial
/// reports no roots (its root set has no boundary points).
pub fn quadratic_roots(a: &Rat, b: &Rat, c: &Rat) -> Vec<QuadNum> {
    if a.is_zero() {
        if b.is_zero() {
            return Vec::new();
        }
        return vec![QuadNum::from_rat(-c / b)];
    }
    let disc = b * b - rat(4) * a * c;
    if disc.is_negative() {
        return Vec::new();
    }
    let two_a = rat(2) * a;
    let mut out = vec![
        QuadNum::new(-b, Rat::one(), disc.clone(), two_a.clone()),
        QuadNum::new(-b, -Rat::one(), disc, two_a),
    ];
    out.sort();
    out.dedup();
    out
}

fn univariate_coeffs(p: &Polynomial) -> Result<Vec<Rat>, OracleError> {
    if p.variables().iter().any(|&v| v != 0) {
        return Err(OracleError::NotUnivariate);
    }
    let deg = p.degree_in(0);
    Ok((0..=deg)
        .map(|i| {
            p.isolate_coefficient(0, i)
                .as_constant()
                .expect("univariate coefficient")
        })
        .collect())
}

/// A rational strictly below every real root of every input polynomial,
/// via the Cauchy bound `-(1 + max |c_i| / |lead|)` per polynomial,
/// minimized over the inputs, minus one. Root-free polynomials contribute
/// the conventional bound `-1`.
pub fn below_all_roots(polys: &[Polynomial]) -> Result<Rat, OracleError> {
    let mut bound = -Rat::one();
    for p in polys {
        if p.is_zero() {
            return Err(OracleError::ZeroPolynomial);
        }
        let coeffs = univariate_coeffs(p)?;
        let (lead, rest) = coeffs.split_last().expect("nonzero polynomial");
        if rest.is_empty() {
            continue; // constant: no roots
        }
        let max_ratio = rest
            .iter()
            .map(|c| (c / lead).abs())
            .max()
            .expect("nonempty coefficient list");
        let b = -(Rat::one() + max_ratio);
        bound = bound.min(b);
    }
    Ok(bound - Rat::one())
}

/// A rational strictly between `x` and `y` (requires `x < y`): midpoints of
/// ever finer rational approximations, each candidate verified exactly.
pub fn rational_between(x: &QuadNum, y: &QuadNum) -> Rat {
    debug_assert!(x < y);
    for k in 2.. {
        let m = (x.approx(k) + y.approx(k)) / rat(2);
        let m_num = QuadNum::from_rat(m.clone());
        if *x < m_num && m_num < *y {
            return m;
        }
    }
    unreachable!()
}

/// A rational strictly below `x`.
pub fn rational_below(x: &QuadNum) -> Rat {
    let mut cand = x.approx(2) - rat(2);
    while QuadNum::from_rat(cand.clone()) >= *x {
        cand -= Rat::one();
    }
    cand
}

/// A rational strictly above `x`.
pub fn rational_above(x: &QuadNum) -> Rat {
    let mut cand = x.approx(2) + rat(2);
    while QuadNum::from_rat(cand.clone()) <= *x {
        cand += Rat::one();
    }
    cand
}

/// Whether some real satisfies every sign condition simultaneously, by the
/// exhaustive sign table: every root of every atom, one rational sample in
/// each open interval between consecutive roots, and one beyond each end.
/// Exact, since each polynomial is sign-invariant between its roots.
pub fn decide_closed_conjunction(atoms: &[UniAtom]) -> bool {
    // Constant atoms hold everywhere or nowhere; the zero polynomial
    // satisfies = and <=, falsifies < and !=.
    for at in atoms {
        if at.a.is_zero() && at.b.is_zero() && !at.rel.holds(&at.c) {
            return false;
        }
    }
    let mut roots: Vec<QuadNum> = atoms
        .iter()
        .flat_map(|at| quadratic_roots(&at.a, &at.b, &at.c))
        .collect();
    roots.sort();
    roots.dedup();

    let mut samples: Vec<QuadNum> = Vec::new();
    if roots.is_empty() {
        samples.push(QuadNum::from_rat(Rat::zero()));
    } else {
        samples.push(QuadNum::from_rat(rational_below(&roots[0])));
        for w in roots.windows(2) {
            samples.push(QuadNum::from_rat(rational_between(&w[0], &w[1])));
        }
        samples.push(QuadNum::from_rat(rational_above(
            roots.last().expect("nonempty"),
        )));
        samples.extend(roots);
    }
    samples
        .iter()
        .any(|x| atoms.iter().all(|at| uni_atom_holds_quad(at, x)))
}

/// A positive rational `delta` such that no input polynomial has a root in
/// `(r, r + delta]`: one when no root lies strictly above `r`, otherwise
/// `1, 1/2, 1/4, ...` halved until `r + delta` falls strictly below the
/// least greater root.
pub fn epsilon_witness(r: &QuadNum, polys: &[Polynomial]) -> Result<Rat, OracleError> {
    let mut next: Option<QuadNum> = None;
    for p in polys {
        let coeffs = univariate_coeffs(p)?;
        if coeffs.len() > 3 {
            return Err(OracleError::DegreeTooHigh(coeffs.len() as u32 - 1));
        }
        let get = |i: usize| coeffs.get(i).cloned().unwrap_or_else(Rat::zero);
        for root in quadratic_roots(&get(2), &get(1), &get(0)) {
            if root > *r && next.as_ref().is_none_or(|n| root < *n) {
                next = Some(root);
            }
        }
    }
    let Some(next) = next else {
        return Ok(Rat::one());
    };
    let mut delta = Rat::one();
    while r.add_rat(&delta) >= next {
        delta /= rat(2);
    }
    Ok(delta)
}
