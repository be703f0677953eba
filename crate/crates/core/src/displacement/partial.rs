use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exterior::AffineMap;

use super::{Certificate, DisplacementVerdict, Polyhedron};

/// A diffeomorphism known only on `domain`, where it agrees with `rule` and
/// leaves the `preserved` coordinates unchanged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialAffineMap {
    rule: AffineMap,
    domain: Polyhedron,
    preserved: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

impl PartialAffineMap {
    pub fn new(rule: AffineMap, domain: Polyhedron, mut preserved: Vec<usize>) -> Result<Self> {
        let n = rule.dim();
        if domain.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: domain.dim() });
        }
        preserved.sort_unstable();
        preserved.dedup();
        for &i in &preserved {
            if i >= n {
                return Err(Error::BadDimension(format!("preserved coordinate {i} out of range")));
            }
            let row = &rule.linear()[i];
            let fixed = rule.translation()[i].is_zero()
                && row.iter().enumerate().all(|(j, c)| if j == i { c.is_one() } else { c.is_zero() });
            if !fixed {
                return Err(Error::Precondition(format!("rule moves preserved coordinate {i}")));
            }
        }
        Ok(Self { rule, domain, preserved })
    }

    pub fn rule(&self) -> &AffineMap {
        &self.rule
    }

    pub fn domain(&self) -> &Polyhedron {
        &self.domain
    }

    pub fn preserved(&self) -> &[usize] {
        &self.preserved
    }
}

/// Image (`Forward`) or preimage (`Inverse`) of `region` under `f`, refusing
/// whenever the computation would leave the known domain.
pub fn apply_partial(f: &PartialAffineMap, region: &Polyhedron, direction: Direction) -> Result<Polyhedron> {
    let (source, result) = match direction {
        Direction::Forward => (region.clone(), region.image(&f.rule)?),
        Direction::Inverse => {
            let pre = region.preimage(&f.rule)?;
            (pre.clone(), pre)
        }
    };
    if let Some((c, point)) = source.first_escape(&f.domain)? {
        let names: Vec<String> = (0..f.domain.dim()).map(|i| format!("x{i}")).collect();
        return Err(Error::DomainError(format!(
            "constraint {} fails at {}",
            c.render(&names),
            render_point(&point)
        )));
    }
    Ok(result)
}

pub(crate) fn render_point(p: &[crate::rational::Rational]) -> String {
    let parts: Vec<String> = p.iter().map(crate::rational::format_rational).collect();
    format!("({})", parts.join(", "))
}

/// Decides whether `φ⁻¹f⁻¹(V₀)` and `f⁻¹φ⁻¹(V₀)` meet, on the cover.
pub fn commutator_displacement(phi: &AffineMap, f: &PartialAffineMap, v0: &Polyhedron) -> Result<DisplacementVerdict> {
    let n = v0.dim();
    if phi.dim() != n || f.rule.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: phi.dim().max(f.rule.dim()) });
    }
    if v0.is_empty() {
        return Ok(DisplacementVerdict::inconclusive("region", "V0 is empty"));
    }
    if !v0.is_subset_of(&f.domain)? {
        return Ok(DisplacementVerdict::inconclusive("domain", "V0 is not contained in the domain of f"));
    }
    let b = match apply_partial(f, v0, Direction::Inverse) {
        Ok(b) => b,
        Err(Error::DomainError(msg)) => return Ok(DisplacementVerdict::inconclusive("inverse", msg)),
        Err(e) => return Err(e),
    };
    let a = b.preimage(phi)?;
    let c = v0.preimage(phi)?;

    let pa = a.project(&f.preserved);
    let pc = c.project(&f.preserved);
    if pa.intersect(&pc)?.is_empty() {
        return Ok(DisplacementVerdict::disjoint(Certificate::Separation {
            coordinates: f.preserved.clone(),
            first: pa,
            second: pc,
        }));
    }

    let image = f.domain.image(&f.rule)?;
    if c.is_subset_of(&image)? {
        // f⁻¹(C) lies in the domain, where f is the rule
        let d = c.preimage(&f.rule)?;
        return Ok(match a.intersect(&d)?.feasible_point() {
            Some(point) => DisplacementVerdict::intersects(Certificate::Witness { point }),
            None => DisplacementVerdict::disjoint(Certificate::Separation {
                coordinates: (0..n).collect(),
                first: a,
                second: d,
            }),
        });
    }
    let known = c.preimage(&f.rule)?.intersect(&f.domain)?;
    if let Some(point) = a.intersect(&known)?.feasible_point() {
        return Ok(DisplacementVerdict::intersects(Certificate::Witness { point }));
    }
    Ok(DisplacementVerdict::inconclusive(
        "witness",
        "projections overlap and f⁻¹(φ⁻¹(V0)) leaves the known domain",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::displacement::Outcome;
    use crate::flux::phi_abc;
    use crate::linalg;
    use crate::rational::{frac, q, Rational};

    fn shear(beta: &Rational, c: &Rational) -> AffineMap {
        let mut lin = linalg::identity(4);
        lin[2][3] = -c.clone();
        AffineMap::new(lin, vec![q(0), q(0), beta.clone(), q(0)]).unwrap()
    }

    fn flow_y(eps: &Rational, tau: &Rational) -> (PartialAffineMap, Polyhedron) {
        let half = eps / q(2);
        let domain = Polyhedron::universe(4).with_band(0, &q(0), &half).with_band(2, &q(0), &half);
        let rule = AffineMap::translation_by(vec![q(0), q(0), q(0), -tau.clone()]);
        let f = PartialAffineMap::new(rule, domain.clone(), vec![0, 2]).unwrap();
        let v0 = domain.with_interval(3, q(0), tau / q(2), true);
        (f, v0)
    }

    #[test]
    fn preserved_coordinates_must_be_fixed() {
        let rule = AffineMap::translation_by(vec![q(1), q(0)]);
        assert!(PartialAffineMap::new(rule.clone(), Polyhedron::universe(2), vec![1]).is_ok());
        assert!(matches!(
            PartialAffineMap::new(rule, Polyhedron::universe(2), vec![0]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn inverse_shift_of_v0() {
        let (f, v0) = flow_y(&frac(1, 4), &q(1));
        let b = apply_partial(&f, &v0, Direction::Inverse).unwrap();
        let r = b.coordinate_range(3);
        assert_eq!(r.lower.unwrap().value, q(1));
        assert_eq!(r.upper.unwrap().value, frac(3, 2));
    }

    #[test]
    fn leaving_the_domain_is_an_error() {
        let (f, _) = flow_y(&frac(1, 4), &q(1));
        let wide = Polyhedron::universe(4).with_band(0, &q(0), &q(1));
        match apply_partial(&f, &wide, Direction::Forward) {
            Err(Error::DomainError(msg)) => assert!(msg.contains("x0")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shear_separates_above_threshold() {
        let eps = frac(1, 4);
        let (f, v0) = flow_y(&eps, &q(1));
        let v = commutator_displacement(&shear(&frac(1, 3), &q(1)), &f, &v0).unwrap();
        assert_eq!(v.outcome, Outcome::Disjoint);
        let Certificate::Separation { coordinates, first, second } = v.certificate else { panic!() };
        assert_eq!(coordinates, vec![0, 2]);
        assert!(first.intersect(&second).unwrap().is_empty());
    }

    #[test]
    fn shear_below_threshold_is_inconclusive() {
        let (f, v0) = flow_y(&frac(1, 4), &frac(1, 4));
        let v = commutator_displacement(&shear(&frac(1, 3), &q(1)), &f, &v0).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
    }

    #[test]
    fn identity_maps_intersect() {
        let v0 = Polyhedron::universe(4).with_interval(3, q(0), q(1), true);
        let f = PartialAffineMap::new(AffineMap::identity(4), Polyhedron::universe(4), vec![0, 1, 2, 3]).unwrap();
        let v = commutator_displacement(&phi_abc(&q(0), &q(0), &q(0)), &f, &v0).unwrap();
        assert_eq!(v.outcome, Outcome::Intersects);
        let Certificate::Witness { point } = v.certificate else { panic!() };
        assert!(v0.contains(&point));
    }
}
