use num_traits::Signed;

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoordConstraint {
    Free,
    Fixed(Rational),
    /// `|x − center| < radius`.
    Band { center: Rational, radius: Rational },
}

/// A product region in the universal cover, one constraint per coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoordRegion {
    constraints: Vec<CoordConstraint>,
}

impl CoordRegion {
    pub fn new(constraints: Vec<CoordConstraint>) -> Result<Self> {
        if !constraints.iter().any(|c| matches!(c, CoordConstraint::Free)) {
            return Err(Error::BadDimension("a region needs at least one free coordinate".into()));
        }
        for c in &constraints {
            if let CoordConstraint::Band { radius, .. } = c {
                if !radius.is_positive() {
                    return Err(Error::BadDimension(format!("band radius {radius} must be positive")));
                }
            }
        }
        Ok(Self { constraints })
    }

    /// Free everywhere except the listed fixed coordinates.
    pub fn fixing(dim: usize, fixed: &[(usize, Rational)]) -> Result<Self> {
        let mut c = vec![CoordConstraint::Free; dim];
        for (i, v) in fixed {
            c[*i] = CoordConstraint::Fixed(v.clone());
        }
        Self::new(c)
    }

    pub fn dim(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[CoordConstraint] {
        &self.constraints
    }

    pub fn free_coordinates(&self) -> Vec<usize> {
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c, CoordConstraint::Free))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        self.constraints.iter().zip(p).all(|(c, x)| match c {
            CoordConstraint::Free => true,
            CoordConstraint::Fixed(v) => x == v,
            CoordConstraint::Band { center, radius } => (x - center).abs() < *radius,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    #[test]
    fn needs_a_free_coordinate() {
        assert!(CoordRegion::new(vec![CoordConstraint::Fixed(q(0))]).is_err());
        assert!(CoordRegion::new(vec![CoordConstraint::Band { center: q(0), radius: q(0) }, CoordConstraint::Free]).is_err());
    }

    #[test]
    fn membership() {
        let r = CoordRegion::new(vec![
            CoordConstraint::Band { center: q(0), radius: frac(1, 8) },
            CoordConstraint::Fixed(q(1)),
            CoordConstraint::Free,
        ])
        .unwrap();
        assert!(r.contains(&[frac(1, 10), q(1), q(7)]));
        assert!(!r.contains(&[frac(1, 8), q(1), q(7)]));
        assert_eq!(r.free_coordinates(), vec![2]);
    }
}
