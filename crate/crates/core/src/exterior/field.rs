use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::poly::{PolyScalar, Var};
use crate::rational::Rational;

use super::AffineMap;

/// `Σ X_i ∂/∂x_i` with polynomial components (which may depend on `u`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VecField {
    components: Vec<PolyScalar>,
}

impl VecField {
    pub fn new(components: Vec<PolyScalar>) -> Self {
        Self { components }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(vec![PolyScalar::zero(); dim])
    }

    /// `∂/∂x_i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.components[i] = PolyScalar::one();
        v
    }

    pub fn constant(values: &[Rational]) -> Self {
        Self::new(values.iter().cloned().map(PolyScalar::constant).collect())
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[PolyScalar] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &PolyScalar {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(PolyScalar::is_zero)
    }

    pub fn add(&self, other: &VecField) -> Result<VecField> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(Self::new(self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect()))
    }

    pub fn scale(&self, r: &Rational) -> VecField {
        Self::new(self.components.iter().map(|c| c.scale(r)).collect())
    }

    pub fn scale_poly(&self, p: &PolyScalar) -> VecField {
        Self::new(self.components.iter().map(|c| c * p).collect())
    }

    pub fn substitute(&self, values: &BTreeMap<Var, PolyScalar>) -> VecField {
        Self::new(self.components.iter().map(|c| c.substitute(values)).collect())
    }

    pub fn depends_on_time(&self) -> bool {
        self.components.iter().any(|c| c.depends_on(|v| *v == Var::Time))
    }

    /// `g_* X`, i.e. `p ↦ Dg · X(g⁻¹(p))`.
    pub fn pushforward(&self, g: &AffineMap) -> Result<VecField> {
        if g.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: g.dim() });
        }
        let inv = g.inverse()?;
        let back = inv.substitution();
        let moved: Vec<PolyScalar> = self.components.iter().map(|c| c.substitute(&back)).collect();
        let out = (0..self.dim())
            .map(|i| {
                let mut acc = PolyScalar::zero();
                for (j, m) in moved.iter().enumerate() {
                    acc += &m.scale(&g.linear()[i][j]);
                }
                acc
            })
            .collect();
        Ok(Self::new(out))
    }

    /// Splits an affine field `X(p) = A p + b` with rational entries.
    pub fn affine_parts(&self) -> Result<(Vec<Vec<Rational>>, Vec<Rational>)> {
        let n = self.dim();
        let mut a = vec![vec![Rational::default(); n]; n];
        let mut b = Vec::with_capacity(n);
        for (i, c) in self.components.iter().enumerate() {
            let bad = || Error::NotAffine(format!("component {i} is `{c}`"));
            let (coeffs, rest) = c.linear_split(Var::is_coord).ok_or_else(bad)?;
            for (v, coeff) in coeffs {
                let Var::Coord(j) = v else { unreachable!("split on coordinates") };
                if j >= n {
                    return Err(bad());
                }
                a[i][j] = coeff.as_constant().ok_or_else(bad)?;
            }
            b.push(rest.as_constant().ok_or_else(bad)?);
        }
        Ok((a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn pushforward_by_shear() {
        // (s, t, x, y) ↦ (s+1, t, x+y, y) pushes ∂y forward to ∂y + ∂x
        let mut lin = crate::linalg::identity(4);
        lin[2][3] = q(1);
        let g = AffineMap::new(lin, vec![q(1), q(0), q(0), q(0)]).unwrap();
        let pushed = VecField::coordinate(4, 3).pushforward(&g).unwrap();
        let expected = VecField::coordinate(4, 3).add(&VecField::coordinate(4, 2)).unwrap();
        assert_eq!(pushed, expected);
        assert_eq!(VecField::coordinate(4, 2).pushforward(&g).unwrap(), VecField::coordinate(4, 2));
    }

    #[test]
    fn affine_parts_reject_quadratic_and_time() {
        let s = PolyScalar::coord(0);
        assert!(VecField::new(vec![&s * &s, PolyScalar::zero()]).affine_parts().is_err());
        assert!(VecField::new(vec![PolyScalar::time(), PolyScalar::zero()]).affine_parts().is_err());
        let (a, b) = VecField::new(vec![PolyScalar::one(), s.clone()]).affine_parts().unwrap();
        assert_eq!(a[1][0], q(1));
        assert_eq!(b, vec![q(1), q(0)]);
    }
}
