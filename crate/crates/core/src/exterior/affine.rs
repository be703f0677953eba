use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::poly::{PolyScalar, Var};
use crate::rational::Rational;

use super::{Basis, DiffForm, VecField};

/// `p ↦ L p + b` with exact rational entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    linear: Matrix,
    translation: Vec<Rational>,
}

impl AffineMap {
    pub fn new(linear: Matrix, translation: Vec<Rational>) -> Result<Self> {
        let n = translation.len();
        if linear.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: linear.len() });
        }
        if let Some(row) = linear.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
        Ok(Self { linear, translation })
    }

    pub fn identity(n: usize) -> Self {
        Self { linear: linalg::identity(n), translation: vec![Rational::zero(); n] }
    }

    pub fn translation_by(v: Vec<Rational>) -> Self {
        Self { linear: linalg::identity(v.len()), translation: v }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn linear(&self) -> &Matrix {
        &self.linear
    }

    pub fn translation(&self) -> &[Rational] {
        &self.translation
    }

    pub fn apply(&self, p: &[Rational]) -> Vec<Rational> {
        linalg::mat_vec(&self.linear, p)
            .into_iter()
            .zip(&self.translation)
            .map(|(a, b)| a + b)
            .collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        let linear = linalg::mat_mul(&self.linear, &inner.linear);
        let translation = self.apply(&inner.translation);
        AffineMap { linear, translation }
    }

    pub fn determinant(&self) -> Rational {
        linalg::determinant(&self.linear)
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        let inv = linalg::inverse(&self.linear).ok_or(Error::SingularMap)?;
        let translation = linalg::mat_vec(&inv, &self.translation).into_iter().map(|x| -x).collect();
        Ok(AffineMap { linear: inv, translation })
    }

    pub fn pow(&self, k: i64) -> Result<AffineMap> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut acc = AffineMap::identity(self.dim());
        for _ in 0..k.unsigned_abs() {
            acc = base.compose(&acc);
        }
        Ok(acc)
    }

    pub fn is_identity(&self) -> bool {
        *self == AffineMap::identity(self.dim())
    }

    /// Coordinate substitution `x_i ↦ (L x + b)_i`.
    pub fn substitution(&self) -> BTreeMap<Var, PolyScalar> {
        PolyAffine::from(self).substitution()
    }

    /// True when `L − I` is nilpotent.
    pub fn is_unipotent(&self) -> bool {
        let n = self.dim();
        let mut nil = self.linear.clone();
        for (i, row) in nil.iter_mut().enumerate() {
            row[i] -= Rational::one();
        }
        is_nilpotent(&nil, n)
    }

    /// `φ*a` for a coordinate-basis form.
    pub fn pullback(&self, a: &DiffForm) -> Result<DiffForm> {
        if a.basis() != &Basis::Coordinate {
            return Err(Error::BasisMismatch(format!("pullback needs the coordinate basis, got {}", a.basis())));
        }
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: a.dim() });
        }
        if self.determinant().is_zero() {
            return Err(Error::SingularMap);
        }
        let n = self.dim();
        let images: Vec<DiffForm> = (0..n)
            .map(|i| {
                let terms = (0..n)
                    .filter(|&j| !self.linear[i][j].is_zero())
                    .map(|j| (vec![j], PolyScalar::constant(self.linear[i][j].clone())));
                DiffForm::from_terms(n, 1, Basis::Coordinate, terms).expect("valid 1-form")
            })
            .collect();
        let sub = self.substitution();
        let mut out = DiffForm::zero(n, a.degree(), Basis::Coordinate);
        for (idx, c) in a.terms() {
            let mut piece = DiffForm::scalar(n, Basis::Coordinate, c.substitute(&sub));
            for &i in idx {
                piece = piece.wedge(&images[i])?;
            }
            out = out.add(&piece)?;
        }
        Ok(out)
    }

    /// The affine field `X` with `exp(X, 1) = self`, defined for unipotent maps.
    pub fn logarithm(&self) -> Result<VecField> {
        let n = self.dim();
        // augmented nilpotent part N = M − I of size n + 1
        let mut nil = linalg::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                nil[i][j] = self.linear[i][j].clone() - if i == j { Rational::one() } else { Rational::zero() };
            }
            nil[i][n] = self.translation[i].clone();
        }
        if !is_nilpotent(&nil, n + 1) {
            return Err(Error::NotNilpotent);
        }
        let mut log = linalg::zeros(n + 1, n + 1);
        let mut power = nil.clone();
        for j in 1..=n + 1 {
            let coeff = Rational::new(if j % 2 == 1 { 1.into() } else { (-1).into() }, (j as i64).into());
            for r in 0..=n {
                for c in 0..=n {
                    log[r][c] += &power[r][c] * &coeff;
                }
            }
            power = linalg::mat_mul(&power, &nil);
        }
        let comps = (0..n)
            .map(|i| {
                let mut p = PolyScalar::constant(log[i][n].clone());
                for j in 0..n {
                    p += &PolyScalar::coord(j).scale(&log[i][j]);
                }
                p
            })
            .collect();
        Ok(VecField::new(comps))
    }
}

fn is_nilpotent(a: &Matrix, n: usize) -> bool {
    let mut p = a.clone();
    for _ in 1..n {
        if linalg::is_zero_matrix(&p) {
            return true;
        }
        p = linalg::mat_mul(&p, a);
    }
    linalg::is_zero_matrix(&p)
}

/// An affine map whose entries are polynomials (in time, lattice exponents
/// or parameters); used for symbolic flows and deck words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyAffine {
    pub linear: Vec<Vec<PolyScalar>>,
    pub translation: Vec<PolyScalar>,
}

impl PolyAffine {
    pub fn identity(n: usize) -> Self {
        let linear = (0..n)
            .map(|i| (0..n).map(|j| if i == j { PolyScalar::one() } else { PolyScalar::zero() }).collect())
            .collect();
        Self { linear, translation: vec![PolyScalar::zero(); n] }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyAffine) -> PolyAffine {
        let n = self.dim();
        let mut linear = vec![vec![PolyScalar::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    linear[i][j] += &(&self.linear[i][k] * &inner.linear[k][j]);
                }
            }
        }
        let translation = self.apply(&inner.translation);
        PolyAffine { linear, translation }
    }

    pub fn apply(&self, p: &[PolyScalar]) -> Vec<PolyScalar> {
        (0..self.dim())
            .map(|i| {
                let mut acc = self.translation[i].clone();
                for (j, pj) in p.iter().enumerate() {
                    acc += &(&self.linear[i][j] * pj);
                }
                acc
            })
            .collect()
    }

    pub fn substitution(&self) -> BTreeMap<Var, PolyScalar> {
        let coords: Vec<PolyScalar> = (0..self.dim()).map(PolyScalar::coord).collect();
        self.apply(&coords)
            .into_iter()
            .enumerate()
            .map(|(i, p)| (Var::Coord(i), p))
            .collect()
    }

    /// Converts back to a rational map when no entry carries variables.
    pub fn to_rational(&self) -> Option<AffineMap> {
        let linear = self
            .linear
            .iter()
            .map(|r| r.iter().map(PolyScalar::as_constant).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        let translation = self.translation.iter().map(PolyScalar::as_constant).collect::<Option<Vec<_>>>()?;
        AffineMap::new(linear, translation).ok()
    }

    /// The flow of the nilpotent affine field `X(p) = A p + c` at a symbolic
    /// time: `exp(tA) p + (Σ_k t^{k+1} A^k / (k+1)!) c`.
    pub fn flow(a: &Matrix, c: &[Rational], time: &PolyScalar) -> PolyAffine {
        let n = c.len();
        let mut out = PolyAffine::identity(n);
        for row in out.linear.iter_mut() {
            for e in row.iter_mut() {
                *e = PolyScalar::zero();
            }
        }
        let mut power = linalg::identity(n);
        let mut fact = Rational::one();
        let mut t_pow = PolyScalar::one();
        for k in 0..=n {
            // A^k t^k / k!
            let lin_coeff = t_pow.scale(&fact.recip());
            let ac = linalg::mat_vec(&power, c);
            let next_fact = &fact * Rational::from_integer(((k + 1) as i64).into());
            let tr_coeff = (&t_pow * time).scale(&next_fact.recip());
            for i in 0..n {
                for j in 0..n {
                    if !power[i][j].is_zero() {
                        out.linear[i][j] += &lin_coeff.scale(&power[i][j]);
                    }
                }
                if !ac[i].is_zero() {
                    out.translation[i] += &tr_coeff.scale(&ac[i]);
                }
            }
            power = linalg::mat_mul(&power, a);
            fact = next_fact;
            t_pow = &t_pow * time;
            if linalg::is_zero_matrix(&power) {
                break;
            }
        }
        out
    }
}

impl From<&AffineMap> for PolyAffine {
    fn from(m: &AffineMap) -> Self {
        PolyAffine {
            linear: m
                .linear
                .iter()
                .map(|r| r.iter().cloned().map(PolyScalar::constant).collect())
                .collect(),
            translation: m.translation.iter().cloned().map(PolyScalar::constant).collect(),
        }
    }
}

/// Exact time-`time` map of the flow of an affine field with nilpotent linear part.
pub fn exp_affine_field(x: &VecField, time: &Rational) -> Result<AffineMap> {
    let (a, c) = x.affine_parts()?;
    if !is_nilpotent(&a, x.dim()) {
        return Err(Error::NotNilpotent);
    }
    let flow = PolyAffine::flow(&a, &c, &PolyScalar::constant(time.clone()));
    Ok(flow.to_rational().expect("constant time gives a rational map"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    fn kt_s_generator() -> AffineMap {
        let mut lin = linalg::identity(4);
        lin[2][3] = q(1);
        AffineMap::new(lin, vec![q(1), q(0), q(0), q(0)]).unwrap()
    }

    #[test]
    fn exp_of_translation_field() {
        let x = VecField::constant(&[q(2), q(-1), frac(1, 3), q(0)]);
        let m = exp_affine_field(&x, &q(1)).unwrap();
        assert_eq!(m, AffineMap::translation_by(vec![q(2), q(-1), frac(1, 3), q(0)]));
        assert!(exp_affine_field(&VecField::zero(4), &frac(7, 3)).unwrap().is_identity());
    }

    #[test]
    fn exp_of_sheared_generator() {
        // X = ∂s − s∂x − ∂y  ⇒  (s+1, t, x−s−1/2, y−1)
        let s = PolyScalar::coord(0);
        let x = VecField::new(vec![PolyScalar::one(), PolyScalar::zero(), -s, PolyScalar::from_int(-1)]);
        let m = exp_affine_field(&x, &q(1)).unwrap();
        let mut lin = linalg::identity(4);
        lin[2][0] = q(-1);
        assert_eq!(m, AffineMap::new(lin, vec![q(1), q(0), frac(-1, 2), q(-1)]).unwrap());
    }

    #[test]
    fn exp_refuses_non_nilpotent() {
        let x = VecField::new(vec![PolyScalar::coord(0)]);
        assert_eq!(exp_affine_field(&x, &q(1)), Err(Error::NotNilpotent));
    }

    #[test]
    fn logarithm_inverts_exp() {
        let g = kt_s_generator();
        let x = g.logarithm().unwrap();
        assert_eq!(exp_affine_field(&x, &q(1)).unwrap(), g);
        assert_eq!(exp_affine_field(&x, &q(-3)).unwrap(), g.pow(-3).unwrap());
    }

    #[test]
    fn pullback_of_singular_map_fails() {
        let m = AffineMap::new(linalg::zeros(2, 2), vec![q(0), q(0)]).unwrap();
        let f = DiffForm::basis_one_form(2, 0, Basis::Coordinate);
        assert_eq!(m.pullback(&f), Err(Error::SingularMap));
    }

    #[test]
    fn inverse_composes_to_identity() {
        let g = kt_s_generator();
        assert!(g.compose(&g.inverse().unwrap()).is_identity());
        assert!(g.is_unipotent());
    }
}
