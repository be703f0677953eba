use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{default_var_name, PolyScalar, Var};
use crate::rational::Rational;

use super::{canonical_order, VecField};

/// Which 1-forms the index tuples of a [`DiffForm`] refer to.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basis {
    /// `dx_0, …, dx_{n-1}`.
    Coordinate,
    /// The invariant coframe of the named model.
    Frame(Arc<str>),
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Coordinate => f.write_str("coordinate"),
            Basis::Frame(name) => write!(f, "frame({name})"),
        }
    }
}

/// A homogeneous differential form with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffForm {
    dim: usize,
    degree: usize,
    basis: Basis,
    terms: BTreeMap<Vec<usize>, PolyScalar>,
}

impl DiffForm {
    pub fn zero(dim: usize, degree: usize, basis: Basis) -> Self {
        Self { dim, degree, basis, terms: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, basis: Basis, f: PolyScalar) -> Self {
        let mut out = Self::zero(dim, 0, basis);
        out.add_term(Vec::new(), f);
        out
    }

    /// The basis 1-form with index `i`.
    pub fn basis_one_form(dim: usize, i: usize, basis: Basis) -> Self {
        Self::monomial(dim, basis, &[i], PolyScalar::one()).expect("single index is canonical")
    }

    /// `coeff · e^{indices[0]} ∧ e^{indices[1]} ∧ …` in any index order.
    pub fn monomial(dim: usize, basis: Basis, indices: &[usize], coeff: PolyScalar) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad + 1 });
        }
        let mut out = Self::zero(dim, indices.len(), basis);
        if let Some((sorted, sign)) = canonical_order(indices) {
            out.add_term(sorted, if sign < 0 { -coeff } else { coeff });
        }
        Ok(out)
    }

    pub fn from_terms(
        dim: usize,
        degree: usize,
        basis: Basis,
        terms: impl IntoIterator<Item = (Vec<usize>, PolyScalar)>,
    ) -> Result<Self> {
        let mut out = Self::zero(dim, degree, basis.clone());
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(Error::BadDimension(format!(
                    "term {idx:?} has degree {} in a {degree}-form",
                    idx.len()
                )));
            }
            out = out.add(&Self::monomial(dim, basis.clone(), &idx, c)?)?;
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &PolyScalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, indices: &[usize]) -> PolyScalar {
        self.terms.get(indices).cloned().unwrap_or_default()
    }

    pub(crate) fn add_term(&mut self, idx: Vec<usize>, c: PolyScalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(idx).or_default();
        *entry += &c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    fn check_compatible(&self, other: &DiffForm) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch(format!("{} vs {}", self.basis, other.basis)));
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn add(&self, other: &DiffForm) -> Result<DiffForm> {
        self.check_compatible(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::BadDimension(format!(
                "cannot add a {}-form and a {}-form",
                self.degree, other.degree
            )));
        }
        let mut out = if self.is_zero() { other.clone() } else { self.clone() };
        let rhs = if self.is_zero() { None } else { Some(other) };
        if let Some(rhs) = rhs {
            for (idx, c) in &rhs.terms {
                out.add_term(idx.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DiffForm) -> Result<DiffForm> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffForm {
        self.map_coefficients(|c| -c)
    }

    pub fn scale(&self, r: &Rational) -> DiffForm {
        self.map_coefficients(|c| c.scale(r))
    }

    pub fn scale_poly(&self, p: &PolyScalar) -> DiffForm {
        self.map_coefficients(|c| c * p)
    }

    pub fn map_coefficients(&self, mut f: impl FnMut(&PolyScalar) -> PolyScalar) -> DiffForm {
        let mut out = Self::zero(self.dim, self.degree, self.basis.clone());
        for (idx, c) in &self.terms {
            out.add_term(idx.clone(), f(c));
        }
        out
    }

    pub fn wedge(&self, other: &DiffForm) -> Result<DiffForm> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.dim, self.degree + other.degree, self.basis.clone());
        for (i1, c1) in &self.terms {
            for (i2, c2) in &other.terms {
                let joined: Vec<usize> = i1.iter().chain(i2).copied().collect();
                if let Some((idx, sign)) = canonical_order(&joined) {
                    let c = c1 * c2;
                    out.add_term(idx, if sign < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative in the coordinate basis. Frame-basis forms go
    /// through [`super::Coframe::d`].
    pub fn d(&self) -> Result<DiffForm> {
        if self.basis != Basis::Coordinate {
            return Err(Error::BasisMismatch(format!(
                "plain d needs the coordinate basis, got {}; use the coframe",
                self.basis
            )));
        }
        let mut out = Self::zero(self.dim, self.degree + 1, Basis::Coordinate);
        for (idx, c) in &self.terms {
            for j in 0..self.dim {
                let dc = c.derivative(&Var::Coord(j));
                if dc.is_zero() {
                    continue;
                }
                let mut joined = vec![j];
                joined.extend_from_slice(idx);
                if let Some((sorted, sign)) = canonical_order(&joined) {
                    out.add_term(sorted, if sign < 0 { -dc } else { dc });
                }
            }
        }
        Ok(out)
    }

    /// Interior product `ι(X)` in the coordinate basis; a 0-form maps to zero.
    pub fn interior(&self, x: &VecField) -> Result<DiffForm> {
        if self.basis != Basis::Coordinate {
            return Err(Error::BasisMismatch(format!(
                "interior product needs the coordinate basis, got {}",
                self.basis
            )));
        }
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.dim() });
        }
        if self.degree == 0 {
            return Ok(Self::zero(self.dim, 0, Basis::Coordinate));
        }
        let mut out = Self::zero(self.dim, self.degree - 1, Basis::Coordinate);
        for (idx, c) in &self.terms {
            for (pos, &i) in idx.iter().enumerate() {
                let xi = x.component(i);
                if xi.is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(pos);
                let term = c * xi;
                out.add_term(rest, if pos % 2 == 1 { -term } else { term });
            }
        }
        Ok(out)
    }

    /// Applies a substitution to every coefficient.
    pub fn substitute(&self, values: &BTreeMap<Var, PolyScalar>) -> DiffForm {
        self.map_coefficients(|c| c.substitute(values))
    }

    /// True when every coefficient is free of coordinates and of `u`
    /// (symbolic parameters are allowed).
    pub fn has_constant_coefficients(&self) -> bool {
        self.terms
            .values()
            .all(|c| !c.depends_on(|v| matches!(v, Var::Coord(_) | Var::Time)))
    }

    /// Coefficient vector over the canonical degree-`k` monomial order; only
    /// meaningful for constant-coefficient forms.
    pub fn coefficient_vector(&self) -> Vec<PolyScalar> {
        super::index_tuples(self.dim, self.degree)
            .iter()
            .map(|idx| self.coefficient(idx))
            .collect()
    }

    /// Human-readable rendering with the given basis 1-form and variable names.
    pub fn render(&self, one_form_names: &[String], var_name: &dyn Fn(&Var) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(idx, c)| {
                let mono = if idx.is_empty() {
                    String::new()
                } else {
                    idx.iter().map(|&i| one_form_names[i].as_str()).collect::<Vec<_>>().join("∧")
                };
                let coeff = c.fmt_with(var_name);
                match (mono.is_empty(), coeff.as_str()) {
                    (true, _) => coeff,
                    (false, "1") => mono,
                    (false, "-1") => format!("-{mono}"),
                    (false, _) if c.num_terms() > 1 => format!("({coeff})·{mono}"),
                    (false, _) => format!("{coeff}·{mono}"),
                }
            })
            .collect();
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.basis {
            Basis::Coordinate => "dx",
            Basis::Frame(_) => "e",
        };
        let names: Vec<String> = (0..self.dim).map(|i| format!("{prefix}{i}")).collect();
        f.write_str(&self.render(&names, &default_var_name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn c(i: usize) -> DiffForm {
        DiffForm::basis_one_form(4, i, Basis::Coordinate)
    }

    #[test]
    fn disjoint_wedge_is_positive() {
        let a = c(0).wedge(&c(1)).unwrap();
        let b = c(2).wedge(&c(3)).unwrap();
        let top = a.wedge(&b).unwrap();
        assert_eq!(top.coefficient(&[0, 1, 2, 3]), PolyScalar::one());
        assert_eq!(top.degree(), 4);
    }

    #[test]
    fn wedge_with_repeat_vanishes() {
        assert!(c(1).wedge(&c(1)).unwrap().is_zero());
    }

    #[test]
    fn d_of_constant_one_form_is_zero() {
        assert!(c(0).d().unwrap().is_zero());
    }

    #[test]
    fn d_of_gamma() {
        // γ = dx − s·dy  ⇒  dγ = −ds∧dy
        let gamma = c(2).sub(&c(3).scale_poly(&PolyScalar::coord(0))).unwrap();
        let expected = DiffForm::monomial(4, Basis::Coordinate, &[0, 3], PolyScalar::from_int(-1)).unwrap();
        assert_eq!(gamma.d().unwrap(), expected);
    }

    #[test]
    fn interior_of_zero_form_is_zero() {
        let f = DiffForm::scalar(4, Basis::Coordinate, PolyScalar::from_int(3));
        assert!(f.interior(&VecField::coordinate(4, 0)).unwrap().is_zero());
    }

    #[test]
    fn mismatched_bases_are_rejected() {
        let fr = DiffForm::basis_one_form(4, 0, Basis::Frame(Arc::from("kt")));
        assert!(matches!(c(0).wedge(&fr), Err(Error::BasisMismatch(_))));
    }

    #[test]
    fn monomial_reorders_with_sign() {
        let f = DiffForm::monomial(4, Basis::Coordinate, &[3, 1], PolyScalar::from_int(2)).unwrap();
        assert_eq!(f.coefficient(&[1, 3]), PolyScalar::constant(q(-2)));
    }
}
