//! Exact sparse multivariate polynomial arithmetic over the rationals.
//!
//! Variables are De Bruijn indices (`usize`). A polynomial is a finite map
//! from monomials to nonzero rational coefficients; the zero polynomial is
//! the empty map. Monomials are ordered graded-lexicographically so that
//! iteration order (and therefore printing and test output) is deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigRational, One, Signed, Zero};

/// Exact rational scalar used throughout the engine.
pub type Rat = BigRational;

/// Convenience constructor for small rational constants.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// `n / d` as an exact rational.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    /// `lower_poly(d, a, p)` was asked to lower a variable inside `[d, d+a)`.
    #[error("cannot lower live variable {var}: it lies in the forbidden interval [{low}, {high})")]
    LoweredLiveVariable { var: usize, low: usize, high: usize },
}

/// A power product of variables. Exponents are strictly positive; a variable
/// absent from the map has exponent zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exponents: BTreeMap<usize, u32>,
}

impl Monomial {
    /// The empty power product (the monomial `1`).
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(index: usize) -> Self {
        let mut exponents = BTreeMap::new();
        exponents.insert(index, 1);
        Monomial { exponents }
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.exponents.get(&var).copied().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.exponents.values().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.exponents.keys().copied()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exponents = self.exponents.clone();
        for (&v, &e) in &other.exponents {
            *exponents.entry(v).or_insert(0) += e;
        }
        Monomial { exponents }
    }

    /// Removes `var` entirely from the power product.
    pub fn without(&self, var: usize) -> Monomial {
        let mut exponents = self.exponents.clone();
        exponents.remove(&var);
        Monomial { exponents }
    }

    /// Sets the exponent of `var`, dropping the entry when `exp == 0`.
    pub fn with_exponent(&self, var: usize, exp: u32) -> Monomial {
        let mut exponents = self.exponents.clone();
        if exp == 0 {
            exponents.remove(&var);
        } else {
            exponents.insert(var, exp);
        }
        Monomial { exponents }
    }

    fn map_vars(&self, mut f: impl FnMut(usize) -> usize) -> Monomial {
        let mut exponents = BTreeMap::new();
        for (&v, &e) in &self.exponents {
            *exponents.entry(f(v)).or_insert(0) += e;
        }
        Monomial { exponents }
    }
}

// Graded lexicographic order: total degree first, then lexicographic with
// lower variable indices weighing more.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut a = self.exponents.iter();
        let mut b = other.exponents.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                // Fewer remaining entries means the next variable index is
                // "infinite", so it loses the lexicographic comparison.
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((va, ea)), Some((vb, eb))) => {
                    // Smaller index first; the monomial with the smaller
                    // leading variable is lexicographically greater.
                    match va.cmp(vb) {
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => match ea.cmp(eb) {
                            Ordering::Equal => {}
                            ord => return ord,
                        },
                    }
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Invariant: no stored coefficient is zero; all constructors and operations
/// re-canonicalize.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rat>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn from_int(n: i64) -> Self {
        Polynomial::constant(rat(n))
    }

    pub fn var(index: usize) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::var(index), Rat::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the polynomial mentions no variables (including the
    /// zero polynomial, which is the constant `0`).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        let mut out = Polynomial::zero();
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Max exponent of `var` over all monomials; 0 for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms
            .keys()
            .map(|m| m.exponent(var))
            .max()
            .unwrap_or(0)
    }

    /// The coefficient polynomial `c_i` with `p = sum_i c_i * var^i`.
    /// Never mentions `var`; returns 0 when `i` exceeds the degree.
    pub fn isolate_coefficient(&self, var: usize, i: u32) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            if m.exponent(var) == i {
                out.add_term(m.without(var), c.clone());
            }
        }
        out
    }

    /// `[c_0, ..., c_d]` with `d = degree_in(var)`; reconstructs `self` as
    /// `sum_i c_i * var^i`.
    pub fn nested_decompose(&self, var: usize) -> Vec<Polynomial> {
        let d = self.degree_in(var);
        (0..=d).map(|i| self.isolate_coefficient(var, i)).collect()
    }

    /// Formal partial derivative with respect to `var`.
    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e > 0 {
                out.add_term(m.with_exponent(var, e - 1), c * rat(e as i64));
            }
        }
        out
    }

    /// Exact value of the polynomial under the valuation.
    pub fn insertion(&self, v: &Valuation) -> Rat {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for var in m.vars() {
                let x = v.get(var);
                term *= num::pow::pow(x, m.exponent(var) as usize);
            }
            acc += term;
        }
        acc
    }

    /// Substitutes the valuation into every variable except `keep`, leaving a
    /// polynomial univariate in `keep`.
    pub fn partial_insertion(&self, v: &Valuation, keep: usize) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            for var in m.vars() {
                if var != keep {
                    let x = v.get(var);
                    coeff *= num::pow::pow(x, m.exponent(var) as usize);
                }
            }
            out.add_term(
                Monomial::one().with_exponent(keep, m.exponent(keep)),
                coeff,
            );
        }
        out
    }

    /// Shifts every variable index `>= d` up by `a`.
    pub fn lift_poly(&self, d: usize, a: usize) -> Polynomial {
        if a == 0 {
            return self.clone();
        }
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.map_vars(|v| if v >= d { v + a } else { v }), c.clone());
        }
        out
    }

    /// Inverse of [`lift_poly`]: shifts every variable index `>= d + a` down
    /// by `a`. Errors if any variable lies in `[d, d+a)`.
    pub fn lower_poly(&self, d: usize, a: usize) -> Result<Polynomial, PolyError> {
        if a == 0 {
            return Ok(self.clone());
        }
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            for v in m.vars() {
                if v >= d && v < d + a {
                    return Err(PolyError::LoweredLiveVariable {
                        var: v,
                        low: d,
                        high: d + a,
                    });
                }
            }
            out.add_term(m.map_vars(|v| if v >= d + a { v - a } else { v }), c.clone());
        }
        Ok(out)
    }

    /// Renames `from` to `to`. `to` must not occur in the polynomial.
    pub fn rename_var(&self, from: usize, to: usize) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            debug_assert_eq!(m.exponent(to), 0, "rename target already in use");
            out.add_term(m.map_vars(|v| if v == from { to } else { v }), c.clone());
        }
        out
    }

    pub fn mentions(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(var) > 0)
    }

    /// Minimum exponent of `var` across monomials; 0 for the zero polynomial.
    pub fn min_exponent(&self, var: usize) -> u32 {
        self.terms
            .keys()
            .map(|m| m.exponent(var))
            .min()
            .unwrap_or(0)
    }

    /// Divides out `var^n`; caller guarantees every monomial carries it.
    pub fn strip_power(&self, var: usize, n: u32) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            debug_assert!(m.exponent(var) >= n);
            out.add_term(m.with_exponent(var, m.exponent(var) - n), c.clone());
        }
        out
    }

    /// All variable indices mentioned anywhere in the polynomial.
    pub fn variables(&self) -> Vec<usize> {
        let mut vars: Vec<usize> = self.terms.keys().flat_map(|m| m.vars()).collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }
        impl $trait<Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                self.$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Debug rendering in `Var i` / `Const c` notation, descending monomial order.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "Const 0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(format!("Const {}", abs));
            }
            for v in m.vars() {
                let e = m.exponent(v);
                if e == 1 {
                    factors.push(format!("Var {}", v));
                } else {
                    factors.push(format!("(Var {})^{}", v, e));
                }
            }
            write!(f, "{}", factors.join(" * "))?;
        }
        Ok(())
    }
}

/// Finite assignment of rationals to variables 0, 1, ...; indices past the
/// end read as 0.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Valuation {
    values: Vec<Rat>,
}

impl Valuation {
    pub fn new(values: Vec<Rat>) -> Self {
        Valuation { values }
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Valuation::new(values.iter().map(|&n| rat(n)).collect())
    }

    pub fn get(&self, index: usize) -> Rat {
        self.values.get(index).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// New valuation with the value for variable 0 pushed in front;
    /// previous entries shift up by one.
    pub fn push_front(&self, x: Rat) -> Valuation {
        let mut values = Vec::with_capacity(self.values.len() + 1);
        values.push(x);
        values.extend(self.values.iter().cloned());
        Valuation { values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Polynomial {
        Polynomial::var(0)
    }
    fn y() -> Polynomial {
        Polynomial::var(1)
    }

    #[test]
    fn add_cancels_to_constant() {
        // (x + 1) + (-x) = 1
        let p = x() + Polynomial::one();
        let q = -x();
        assert_eq!(p + q, Polynomial::one());
    }

    #[test]
    fn add_identity_and_merge() {
        let p = &x() * &y();
        assert_eq!(Polynomial::zero() + p.clone(), p);
        let x2y = x().pow(2) * y();
        assert_eq!(&x2y + &x2y, x2y.scale(&rat(2)));
    }

    #[test]
    fn mul_difference_of_squares() {
        let p = x() + Polynomial::one();
        let q = x() - Polynomial::one();
        assert_eq!(p * q, x().pow(2) - Polynomial::one());
    }

    #[test]
    fn mul_annihilator_and_identity() {
        let p = x().pow(2) + y();
        assert_eq!(&p * &Polynomial::zero(), Polynomial::zero());
        assert_eq!(&p * &Polynomial::one(), p);
    }

    #[test]
    fn pow_square_binomial() {
        let p = (x() + Polynomial::one()).pow(2);
        let expect = x().pow(2) + x().scale(&rat(2)) + Polynomial::one();
        assert_eq!(p, expect);
        assert_eq!(x().pow(0), Polynomial::one());
        assert_eq!(Polynomial::zero().pow(3), Polynomial::zero());
    }

    #[test]
    fn degree_in_examples() {
        let p = x().pow(2) * y() + x();
        assert_eq!(p.degree_in(0), 2);
        assert_eq!(p.degree_in(1), 1);
        assert_eq!(Polynomial::zero().degree_in(0), 0);
    }

    #[test]
    fn isolate_coefficient_examples() {
        // 3x^2 y + 2x + y
        let p = (x().pow(2) * y()).scale(&rat(3)) + x().scale(&rat(2)) + y();
        assert_eq!(p.isolate_coefficient(0, 2), y().scale(&rat(3)));
        assert_eq!(p.isolate_coefficient(0, 0), y());
        assert_eq!(p.isolate_coefficient(0, 7), Polynomial::zero());
        assert_eq!(
            Polynomial::zero().isolate_coefficient(0, 1),
            Polynomial::zero()
        );
    }

    #[test]
    fn nested_decompose_examples() {
        let p = x().pow(2) * y() + x() + Polynomial::one();
        assert_eq!(
            p.nested_decompose(0),
            vec![Polynomial::one(), Polynomial::one(), y()]
        );
        assert_eq!(Polynomial::zero().nested_decompose(0), vec![Polynomial::zero()]);
        assert_eq!(y().nested_decompose(0), vec![y()]);
    }

    #[test]
    fn reconstruction_from_decomposition() {
        let p = (x().pow(2) * y()).scale(&rat(3)) - x() * y().pow(2) + Polynomial::from_int(7);
        let coeffs = p.nested_decompose(0);
        let mut rebuilt = Polynomial::zero();
        for (i, c) in coeffs.iter().enumerate() {
            rebuilt = rebuilt + c * x().pow(i as u32);
        }
        assert_eq!(rebuilt, p);
    }

    #[test]
    fn derivative_examples() {
        let p = x().pow(2) + x() * y() + Polynomial::from_int(3);
        assert_eq!(p.derivative(0), x().scale(&rat(2)) + y());
        assert_eq!(Polynomial::from_int(5).derivative(0), Polynomial::zero());
        assert_eq!(x().derivative(0), Polynomial::one());
    }

    #[test]
    fn insertion_examples() {
        // [1, 2] into x0 + x1^2 = 5
        let p = x() + y().pow(2);
        assert_eq!(p.insertion(&Valuation::from_ints(&[1, 2])), rat(5));
        // short valuation reads as 0
        assert_eq!(Polynomial::var(3).insertion(&Valuation::default()), rat(0));
        assert_eq!(
            Polynomial::from_int(7).insertion(&Valuation::from_ints(&[1])),
            rat(7)
        );
    }

    #[test]
    fn partial_insertion_examples() {
        // [_, 3] into x0^2 x1 + x1, keep x0 -> 3 x0^2 + 3
        let p = x().pow(2) * y() + y();
        let v = Valuation::from_ints(&[0, 3]);
        assert_eq!(
            p.partial_insertion(&v, 0),
            x().pow(2).scale(&rat(3)) + Polynomial::from_int(3)
        );
        let only_keep = x().pow(2) + x();
        assert_eq!(only_keep.partial_insertion(&v, 0), only_keep);
        let prod = x() * y();
        assert_eq!(
            prod.partial_insertion(&Valuation::from_ints(&[0]), 1),
            Polynomial::zero()
        );
    }

    #[test]
    fn lift_lower_examples() {
        let p = x() * y();
        assert_eq!(p.lift_poly(1, 1), x() * Polynomial::var(2));
        assert_eq!(p.lift_poly(0, 0), p);
        assert_eq!(
            (x() + y()).lift_poly(0, 2),
            Polynomial::var(2) + Polynomial::var(3)
        );
        let q = Polynomial::var(1) + Polynomial::var(2).pow(2);
        assert_eq!(q.lower_poly(0, 1).unwrap(), x() + y().pow(2));
        assert_eq!(q.lower_poly(0, 0).unwrap(), q);
        assert!(matches!(
            x().lower_poly(0, 1),
            Err(PolyError::LoweredLiveVariable { var: 0, .. })
        ));
    }

    #[test]
    fn display_paper_notation() {
        let p = x().pow(2).scale(&rat(5)) - y();
        assert_eq!(p.to_string(), "Const 5 * (Var 0)^2 - Var 1");
        assert_eq!(Polynomial::zero().to_string(), "Const 0");
    }
}
