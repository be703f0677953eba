//! Multivariate polynomials with exact rational coefficients.
//!
//! Variables are the manifold coordinates, the formal isotopy time `u`,
//! integer lattice parameters (used when deck words are kept symbolic) and
//! free named parameters such as the `a, b, e, f` of a linear symplectic form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::rational::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// Manifold coordinate by index.
    Coord(usize),
    /// Formal isotopy time, distinct from any coordinate named `t`.
    Time,
    /// Integer deck-word exponent.
    Lattice(usize),
    /// Free symbolic parameter.
    Param(Arc<str>),
}

impl Var {
    pub fn param(name: &str) -> Var {
        Var::Param(Arc::from(name))
    }

    pub fn is_coord(&self) -> bool {
        matches!(self, Var::Coord(_))
    }
}

/// Sorted `(variable, exponent)` pairs with positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn degree_of(&self, v: &Var) -> u32 {
        self.0.iter().find(|(w, _)| w == v).map_or(0, |(_, e)| *e)
    }

    pub fn degree_where(&self, pred: impl Fn(&Var) -> bool) -> u32 {
        self.0.iter().filter(|(v, _)| pred(v)).map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Splits off the power of `v`.
    fn without(&self, v: &Var) -> (u32, Monomial) {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut exp = 0;
        for (w, e) in &self.0 {
            if w == v {
                exp = *e;
            } else {
                rest.push((w.clone(), *e));
            }
        }
        (exp, Monomial(rest))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PolyScalar {
    terms: BTreeMap<Monomial, Rational>,
}

impl PolyScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(crate::rational::q(n))
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Monomial::var(v), Rational::one())
    }

    pub fn coord(i: usize) -> Self {
        Self::var(Var::Coord(i))
    }

    pub fn time() -> Self {
        Self::var(Var::Time)
    }

    pub fn param(name: &str) -> Self {
        Self::var(Var::param(name))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The value if the polynomial has no variables at all.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn depends_on(&self, pred: impl Fn(&Var) -> bool) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|(v, _)| pred(v)))
    }

    /// Largest total degree in the variables selected by `pred`.
    pub fn degree_where(&self, pred: impl Fn(&Var) -> bool) -> u32 {
        self.terms.keys().map(|m| m.degree_where(&pred)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, v: &Var) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.without(v);
            if e == 0 {
                continue;
            }
            let mut m2 = rest;
            if e > 1 {
                m2 = m2.mul(&Monomial(vec![(v.clone(), e - 1)]));
            }
            out.add_term(m2, c * Rational::from_integer(e.into()));
        }
        out
    }

    /// Definite integral of `v` over `[0, 1]`.
    pub fn integrate_unit(&self, v: &Var) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.without(v);
            out.add_term(rest, c / Rational::from_integer((e + 1).into()));
        }
        out
    }

    /// Simultaneous substitution `v -> values[v]`; unmapped variables stay.
    pub fn substitute(&self, values: &BTreeMap<Var, PolyScalar>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut term = Self::constant(c.clone());
            let mut kept = Monomial::one();
            for (v, e) in &m.0 {
                match values.get(v) {
                    Some(p) => term = &term * &p.pow(*e),
                    None => kept = kept.mul(&Monomial(vec![(v.clone(), *e)])),
                }
            }
            for (m2, c2) in term.terms {
                out.add_term(m2.mul(&kept), c2);
            }
        }
        out
    }

    pub fn substitute_var(&self, v: &Var, value: &PolyScalar) -> Self {
        let mut map = BTreeMap::new();
        map.insert(v.clone(), value.clone());
        self.substitute(&map)
    }

    /// Writes `self = Σ coeff_v · v + rest` for the variables selected by
    /// `pred`, provided `self` has degree at most one in them jointly.
    pub fn linear_split(
        &self,
        pred: impl Fn(&Var) -> bool,
    ) -> Option<(BTreeMap<Var, PolyScalar>, PolyScalar)> {
        let mut coeffs: BTreeMap<Var, PolyScalar> = BTreeMap::new();
        let mut rest = Self::zero();
        for (m, c) in &self.terms {
            let selected: Vec<&(Var, u32)> = m.0.iter().filter(|(v, _)| pred(v)).collect();
            match selected.as_slice() {
                [] => rest.add_term(m.clone(), c.clone()),
                [(v, 1)] => {
                    let (_, other) = m.without(v);
                    coeffs.entry(v.clone()).or_default().add_term(other, c.clone());
                }
                _ => return None,
            }
        }
        coeffs.retain(|_, p| !p.is_zero());
        Some((coeffs, rest))
    }

    pub fn fmt_with(&self, name: &dyn Fn(&Var) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c < &Rational::zero();
            let mag = if negative { -c.clone() } else { c.clone() };
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .map(|(v, e)| if *e == 1 { name(v) } else { format!("{}^{}", name(v), e) })
                .collect();
            if m.is_one() {
                out.push_str(&format_rational(&mag));
            } else {
                if !mag.is_one() {
                    out.push_str(&format_rational(&mag));
                    out.push('*');
                }
                out.push_str(&vars.join("*"));
            }
        }
        out
    }
}

pub fn default_var_name(v: &Var) -> String {
    match v {
        Var::Coord(i) => format!("x{i}"),
        Var::Time => "u".to_string(),
        Var::Lattice(i) => format!("n{i}"),
        Var::Param(p) => p.to_string(),
    }
}

impl fmt::Display for PolyScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&default_var_name))
    }
}

impl From<Rational> for PolyScalar {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl<'a> Add<&'a PolyScalar> for &'a PolyScalar {
    type Output = PolyScalar;
    fn add(self, rhs: &PolyScalar) -> PolyScalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a PolyScalar> for &'a PolyScalar {
    type Output = PolyScalar;
    fn sub(self, rhs: &PolyScalar) -> PolyScalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a PolyScalar> for &'a PolyScalar {
    type Output = PolyScalar;
    fn mul(self, rhs: &PolyScalar) -> PolyScalar {
        let mut out = PolyScalar::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &PolyScalar {
    type Output = PolyScalar;
    fn neg(self) -> PolyScalar {
        PolyScalar {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl AddAssign<&PolyScalar> for PolyScalar {
    fn add_assign(&mut self, rhs: &PolyScalar) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&PolyScalar> for PolyScalar {
    fn sub_assign(&mut self, rhs: &PolyScalar) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr<PolyScalar> for PolyScalar {
            type Output = PolyScalar;
            fn $f(self, rhs: PolyScalar) -> PolyScalar {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&PolyScalar> for PolyScalar {
            type Output = PolyScalar;
            fn $f(self, rhs: &PolyScalar) -> PolyScalar {
                (&self).$f(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for PolyScalar {
    type Output = PolyScalar;
    fn neg(self) -> PolyScalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    fn s() -> PolyScalar {
        PolyScalar::coord(0)
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let p = &s() - &s();
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn product_and_derivative() {
        let u = PolyScalar::time();
        let p = &(&s() + &u) * &(&s() - &u);
        assert_eq!(p.derivative(&Var::Coord(0)), s().scale(&q(2)));
        assert_eq!(p.derivative(&Var::Time), u.scale(&q(-2)));
    }

    #[test]
    fn unit_integral_in_time() {
        // ∫_0^1 (3u^2 + s u) du = 1 + s/2
        let u = PolyScalar::time();
        let p = &u.pow(2).scale(&q(3)) + &(&s() * &u);
        let expected = &PolyScalar::one() + &s().scale(&frac(1, 2));
        assert_eq!(p.integrate_unit(&Var::Time), expected);
    }

    #[test]
    fn substitution_composes() {
        let p = &s().pow(2) + &PolyScalar::param("a");
        let mut map = BTreeMap::new();
        map.insert(Var::Coord(0), &s() + &PolyScalar::one());
        let r = p.substitute(&map);
        let expected = &(&(&s().pow(2) + &s().scale(&q(2))) + &PolyScalar::one()) + &PolyScalar::param("a");
        assert_eq!(r, expected);
    }

    #[test]
    fn linear_split_detects_bilinear_terms() {
        let m = PolyScalar::var(Var::Lattice(0));
        let y = PolyScalar::coord(3);
        let p = &(&m * &y) + &PolyScalar::coord(2);
        assert!(p.linear_split(|v| v.is_coord() || matches!(v, Var::Lattice(_))).is_none());
        let (coeffs, rest) = p.linear_split(|v| v.is_coord()).unwrap();
        assert_eq!(coeffs[&Var::Coord(3)], m);
        assert!(rest.is_zero());
    }

    #[test]
    fn display_is_readable() {
        let p = &s().scale(&frac(-1, 2)) + &PolyScalar::one();
        assert_eq!(p.to_string(), "1 - 1/2*x0");
    }
}
