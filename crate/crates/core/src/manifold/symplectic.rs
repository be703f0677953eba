use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exterior::DiffForm;
use crate::poly::{PolyScalar, Var};
use crate::rational::Rational;

use super::{CoordConstraint, CoordRegion, ManifoldModel};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticReport {
    pub closed: bool,
    pub nondegenerate: bool,
    /// `v` with `ω^m = m!·v·Ω₀`; symbolic when `ω` carries parameters.
    pub volume: PolyScalar,
}

fn factorial(m: usize) -> Rational {
    (1..=m).map(|k| Rational::from_integer(k.into())).product()
}

fn coordinate_two_form(omega: &DiffForm, model: &ManifoldModel) -> Result<DiffForm> {
    if omega.degree() != 2 {
        return Err(Error::BadDimension(format!("expected a 2-form, got degree {}", omega.degree())));
    }
    model.coframe().to_coordinate(omega)
}

pub fn is_symplectic(omega: &DiffForm, model: &ManifoldModel) -> Result<SymplecticReport> {
    let n = model.dim();
    if n % 2 != 0 {
        return Err(Error::BadDimension(format!("odd dimension {n}")));
    }
    let w = coordinate_two_form(omega, model)?;
    for (i, g) in model.generators().iter().enumerate() {
        if g.pullback(&w)? != w {
            return Err(Error::NotInvariant(format!(
                "form is not preserved by generator {}",
                model.pi1().labels[i]
            )));
        }
    }
    let closed = w.d()?.is_zero();
    let m = n / 2;
    let mut power = DiffForm::scalar(n, w.basis().clone(), PolyScalar::one());
    for _ in 0..m {
        power = power.wedge(&w)?;
    }
    let top: Vec<usize> = (0..n).collect();
    let omega0 = model.volume_form().coefficient(&top).as_constant().expect("validated constant volume");
    let volume = power.coefficient(&top).scale(&(factorial(m) * omega0).recip());
    if volume.depends_on(|v| matches!(v, Var::Coord(_) | Var::Time)) {
        return Err(Error::NotHomogeneous(format!(
            "volume density `{}` is not constant",
            model.render_poly(&volume)
        )));
    }
    Ok(SymplecticReport { closed, nondegenerate: !volume.is_zero(), volume })
}

/// True when `ω` vanishes on the coordinate subtorus with the given fixed
/// values, after substituting them.
pub fn is_lagrangian(region: &CoordRegion, omega: &DiffForm, model: &ManifoldModel) -> Result<bool> {
    let n = model.dim();
    if region.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: region.dim() });
    }
    let free = region.free_coordinates();
    if 2 * free.len() != n {
        return Err(Error::BadDimension(format!(
            "a Lagrangian needs {} free coordinates, found {}",
            n / 2,
            free.len()
        )));
    }
    let mut values = BTreeMap::new();
    for (i, c) in region.constraints().iter().enumerate() {
        match c {
            CoordConstraint::Free => {}
            CoordConstraint::Fixed(v) => {
                values.insert(Var::Coord(i), PolyScalar::constant(v.clone()));
            }
            CoordConstraint::Band { .. } => {
                return Err(Error::BadDimension(format!("coordinate {} is a band, not fixed", model.coordinates()[i])));
            }
        }
    }
    let w = coordinate_two_form(omega, model)?.substitute(&values);
    let vanishes = w.terms().all(|(idx, c)| !idx.iter().all(|i| free.contains(i)) || c.is_zero());
    Ok(vanishes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::Basis;
    use crate::manifold::{kodaira_thurston, torus4};
    use crate::rational::{frac, q};

    fn standard(model: &ManifoldModel) -> DiffForm {
        let terms = [(vec![0, 1], PolyScalar::one()), (vec![2, 3], PolyScalar::one())];
        DiffForm::from_terms(model.dim(), 2, Basis::Coordinate, terms).unwrap()
    }

    fn abef(model: &ManifoldModel, a: PolyScalar, b: PolyScalar, e: PolyScalar, f: PolyScalar) -> DiffForm {
        // a γ∧ds + b γ∧dy + e ds∧dt + f dy∧dt
        let fb = model.frame_basis();
        DiffForm::from_terms(4, 2, fb, [(vec![2, 0], a), (vec![2, 3], b), (vec![0, 1], e), (vec![3, 1], f)]).unwrap()
    }

    #[test]
    fn standard_form_has_unit_volume() {
        let kt = kodaira_thurston();
        let r = is_symplectic(&standard(&kt), &kt).unwrap();
        assert!(r.closed && r.nondegenerate);
        assert_eq!(r.volume, PolyScalar::one());
    }

    #[test]
    fn symbolic_abef_volume() {
        let kt = kodaira_thurston();
        let p = PolyScalar::param;
        let r = is_symplectic(&abef(&kt, p("a"), p("b"), p("e"), p("f")), &kt).unwrap();
        assert!(r.closed);
        assert_eq!(r.volume, &p("b") * &p("e") - &p("a") * &p("f"));
    }

    #[test]
    fn degenerate_abef() {
        let kt = kodaira_thurston();
        let c = |n| PolyScalar::from_int(n);
        let r = is_symplectic(&abef(&kt, c(1), c(2), c(2), c(4)), &kt).unwrap();
        assert!(!r.nondegenerate);
    }

    #[test]
    fn ds_dx_is_not_invariant_on_kt() {
        let kt = kodaira_thurston();
        let w = DiffForm::monomial(4, Basis::Coordinate, &[0, 2], PolyScalar::one()).unwrap();
        assert!(matches!(is_symplectic(&w, &kt), Err(Error::NotInvariant(_))));
    }

    #[test]
    fn torus_pfaffian() {
        let t = torus4();
        let a = [[0, 1, 2, 3], [0, 0, 5, 7], [0, 0, 0, 11], [0, 0, 0, 0]];
        let terms = (0..4).flat_map(|i| (i + 1..4).map(move |j| (vec![i, j], PolyScalar::from_int(a[i][j]))));
        let w = DiffForm::from_terms(4, 2, Basis::Coordinate, terms).unwrap();
        let r = is_symplectic(&w, &t).unwrap();
        assert_eq!(r.volume, PolyScalar::from_int(1 * 11 - 2 * 7 + 3 * 5));
    }

    #[test]
    fn lagrangian_tori() {
        let kt = kodaira_thurston();
        let ty = CoordRegion::fixing(4, &[(1, q(0)), (3, q(0))]).unwrap();
        assert!(is_lagrangian(&ty, &standard(&kt), &kt).unwrap());
        let sx = CoordRegion::fixing(4, &[(0, q(0)), (2, q(0))]).unwrap();
        let c = |n| PolyScalar::constant(n);
        for f in [q(0), q(1), frac(-2, 3)] {
            let w = abef(&kt, c(q(1)), c(q(2)), c(q(3)), c(f.clone()));
            assert_eq!(is_lagrangian(&sx, &w, &kt).unwrap(), f == q(0));
        }
        let one = CoordRegion::fixing(4, &[(0, q(0))]).unwrap();
        assert!(matches!(is_lagrangian(&one, &standard(&kt), &kt), Err(Error::BadDimension(_))));
    }
}
