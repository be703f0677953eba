use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exterior::{exp_affine_field, DiffForm, VecField};
use crate::linalg::{self, column_hermite, solve_integer, IntMatrix};
use crate::manifold::{field_descends, is_symplectic, CeComplex, Cohomology, FieldDescent, ManifoldModel};
use crate::rational::Rational;

use super::{flux_field, poincare_dual};

/// A loop of symplectomorphisms given by its generating field, with the
/// π₁ element (exponent vector over the lattice generators) traced by a
/// point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopSpec {
    pub label: String,
    pub field: VecField,
    pub class: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifiedLoop {
    pub label: String,
    /// Frame-basis flux.
    pub flux: DiffForm,
    /// Image of the loop's class in H₁.
    pub h1_class: Vec<BigInt>,
    /// Whether the time-1 flow was checked against the deck element.
    pub closure_checked: bool,
}

/// The flux subgroup bracketed from both sides: loops whose fluxes are
/// verified to lie in Γ, and the superset allowed by the commutative square.
#[derive(Clone, Debug)]
pub struct FluxLattice {
    pub h1_labels: Vec<String>,
    pub volume: Rational,
    /// Hermite basis of the image of the centre in H₁.
    pub center_image: Vec<Vec<BigInt>>,
    /// `vol·PD(h)` for each centre image generator.
    pub targets: Vec<DiffForm>,
    /// One solution of `x ∧ [ω] = vol·PD(h)` per centre image generator.
    pub particular: Vec<DiffForm>,
    /// Basis of the kernel of `∧[ω]` on H¹.
    pub kernel: Vec<DiffForm>,
    pub verified: Vec<VerifiedLoop>,
    omega: DiffForm,
    complex: CeComplex,
    h1: Cohomology,
    h3: Cohomology,
}

/// Result of testing a class against a [`FluxLattice`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeMembership {
    /// Integer coefficients over the verified generators, when they exist.
    pub coefficients: Option<Vec<BigInt>>,
    /// Whether `v ∧ [ω]` lies in the lattice spanned by the `vol·PD(h)`.
    pub within_constraint: bool,
}

impl FluxLattice {
    pub fn generators(&self) -> Vec<DiffForm> {
        self.verified.iter().map(|v| v.flux.clone()).collect()
    }

    pub fn omega(&self) -> &DiffForm {
        &self.omega
    }

    pub fn h1_representatives(&self) -> &[DiffForm] {
        &self.h1.representatives
    }

    /// Coordinates of a closed invariant 1-form over the H¹ representatives.
    pub fn h1_coordinates(&self, v: &DiffForm) -> Result<Vec<Rational>> {
        self.complex.class_of(v, &self.h1)
    }

    /// Coordinates of a closed invariant 3-form over the H³ representatives.
    pub fn h3_coordinates(&self, v: &DiffForm) -> Result<Vec<Rational>> {
        self.complex.class_of(v, &self.h3)
    }

    /// True when `∧[ω]` is injective on H¹.
    pub fn wedge_injective(&self) -> bool {
        self.kernel.is_empty()
    }
}

fn combine(reps: &[DiffForm], coeffs: &[Rational], like: &DiffForm) -> DiffForm {
    let mut out = DiffForm::zero(like.dim(), like.degree(), like.basis().clone());
    for (r, c) in reps.iter().zip(coeffs) {
        if !c.is_zero() {
            out = out.add(&r.scale(c)).expect("same basis");
        }
    }
    out
}

fn int_to_rational(v: &[BigInt]) -> Vec<Rational> {
    v.iter().map(|x| Rational::from_integer(x.clone())).collect()
}

pub fn flux_lattice(model: &ManifoldModel, omega: &DiffForm, loops: &[LoopSpec]) -> Result<FluxLattice> {
    if model.dim() != 4 {
        // the (n−1)! factor of the square is taken to be 1
        return Err(Error::BadDimension(format!("flux lattice is implemented for dimension 4, got {}", model.dim())));
    }
    let report = is_symplectic(omega, model)?;
    if !report.closed || !report.nondegenerate {
        return Err(Error::Precondition("ω must be closed and nondegenerate".into()));
    }
    let volume = report
        .volume
        .as_constant()
        .ok_or_else(|| Error::Precondition("flux lattice needs a form with rational coefficients".into()))?;
    let complex = CeComplex::new(model.coframe())?;
    let omega_f = model.coframe().to_frame(omega)?;
    complex.vector(&omega_f)?;
    let h1 = complex.cohomology(1);
    let h3 = complex.cohomology(3);

    // (i) image of the centre in H₁
    let r = model.h1_rank();
    let images: Vec<Vec<BigInt>> = model.pi1().center.iter().map(|c| model.to_h1(c)).collect();
    let a: IntMatrix = (0..r).map(|i| images.iter().map(|g| g[i].clone()).collect()).collect();
    let hnf = column_hermite(&a, images.len());
    let center_image: Vec<Vec<BigInt>> =
        (0..hnf.pivots.len()).map(|j| (0..r).map(|i| hnf.h[i][j].clone()).collect()).collect();

    // (ii) solve x ∧ [ω] = vol·PD(h) over H¹
    let wedge_cols: Vec<Vec<Rational>> = h1
        .representatives
        .iter()
        .map(|rep| complex.class_of(&rep.wedge(&omega_f)?, &h3))
        .collect::<Result<_>>()?;
    let wedge = linalg::transpose_cols(&wedge_cols, h3.betti);
    let kernel: Vec<DiffForm> = linalg::kernel(&wedge, h1.betti)
        .iter()
        .map(|k| combine(&h1.representatives, k, &h1.representatives[0]))
        .collect();
    let mut targets = Vec::new();
    let mut particular = Vec::new();
    for h in &center_image {
        let target = poincare_dual(&int_to_rational(h), model)?.scale(&volume);
        let class = complex.class_of(&target, &h3)?;
        let (x, _) = linalg::solve(&wedge, &class, h1.betti).ok_or_else(|| {
            Error::DiagramViolation(format!("no class x in H¹ with x ∧ [ω] = {}", model.render(&target)))
        })?;
        particular.push(combine(&h1.representatives, &x, &h1.representatives[0]));
        targets.push(target);
    }

    // (iii) loops
    let center_cols: Vec<Vec<Rational>> = model
        .pi1()
        .center
        .iter()
        .map(|c| c.iter().map(|&x| Rational::from_integer(x.into())).collect())
        .collect();
    let center_matrix = linalg::transpose_cols(&center_cols, model.dim());
    let mut verified = Vec::new();
    for l in loops {
        verified.push(verify_loop(model, &omega_f, &volume, l, &center_matrix, center_cols.len(), &complex, &h3)?);
    }
    Ok(FluxLattice {
        h1_labels: model.h1_labels(),
        volume,
        center_image,
        targets,
        particular,
        kernel,
        verified,
        omega: omega_f,
        complex,
        h1,
        h3,
    })
}

#[allow(clippy::too_many_arguments)]
fn verify_loop(
    model: &ManifoldModel,
    omega: &DiffForm,
    volume: &Rational,
    l: &LoopSpec,
    center_matrix: &linalg::Matrix,
    center_count: usize,
    complex: &CeComplex,
    h3: &Cohomology,
) -> Result<VerifiedLoop> {
    if l.class.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: l.class.len() });
    }
    if let FieldDescent::No { generator, .. } = field_descends(&l.field, model)? {
        return Err(Error::Precondition(format!(
            "field of loop {} is not preserved by generator {}",
            l.label,
            model.pi1().labels[generator]
        )));
    }
    let class_q: Vec<Rational> = l.class.iter().map(|&x| Rational::from_integer(x.into())).collect();
    if solve_integer(center_matrix, &class_q, center_count).is_none() {
        return Err(Error::DiagramViolation(format!("class of loop {} is not central", l.label)));
    }
    let mut closure_checked = false;
    if !l.field.depends_on_time() {
        if let Ok(time_one) = exp_affine_field(&l.field, &Rational::from_integer(1.into())) {
            if time_one != model.deck_element(&l.class)? {
                return Err(Error::DiagramViolation(format!(
                    "time-1 map of loop {} is not the deck element of its class",
                    l.label
                )));
            }
            closure_checked = true;
        }
    }
    let flux = flux_field(&l.field, omega, model)?;
    if !flux.invariant {
        return Err(Error::NotInvariant(format!("flux of loop {} is not an invariant form", l.label)));
    }
    let h1_class = model.to_h1(&l.class);
    let lhs = complex.class_of(&flux.form.wedge(omega)?, h3)?;
    let target = poincare_dual(&int_to_rational(&h1_class), model)?.scale(volume);
    let rhs = complex.class_of(&target, h3)?;
    if lhs != rhs {
        return Err(Error::DiagramViolation(format!(
            "flux({}) ∧ [ω] = {} differs from vol·PD = {} in H³",
            l.label,
            model.render(&flux.form.wedge(omega)?),
            model.render(&target)
        )));
    }
    Ok(VerifiedLoop { label: l.label.clone(), flux: flux.form, h1_class, closure_checked })
}

pub fn in_flux_lattice(v: &DiffForm, gamma: &FluxLattice) -> Result<LatticeMembership> {
    if v.degree() != 1 {
        return Err(Error::BadDimension(format!("expected a 1-form, got degree {}", v.degree())));
    }
    let cls = gamma.h1_coordinates(v)?;
    let gens: Vec<Vec<Rational>> =
        gamma.verified.iter().map(|g| gamma.h1_coordinates(&g.flux)).collect::<Result<_>>()?;
    let m = linalg::transpose_cols(&gens, cls.len());
    let coefficients = solve_integer(&m, &cls, gens.len()).map(|(x, _)| x);
    let framed = gamma.complex.coframe().to_frame(v)?;
    let image = gamma.h3_coordinates(&framed.wedge(&gamma.omega)?)?;
    let targets: Vec<Vec<Rational>> =
        gamma.targets.iter().map(|t| gamma.h3_coordinates(t)).collect::<Result<_>>()?;
    let tm = linalg::transpose_cols(&targets, image.len());
    let within_constraint = solve_integer(&tm, &image, targets.len()).is_some();
    Ok(LatticeMembership { coefficients, within_constraint })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{abef_form, kt_loops, standard_form, torus_form, torus_loops};
    use crate::manifold::{kodaira_thurston, torus4};
    use crate::poly::PolyScalar;
    use crate::rational::{frac, q};

    fn one_form(model: &ManifoldModel, c: [Rational; 4]) -> DiffForm {
        let terms = c.into_iter().enumerate().map(|(i, x)| (vec![i], PolyScalar::constant(x)));
        DiffForm::from_terms(4, 1, model.frame_basis(), terms).unwrap()
    }

    #[test]
    fn standard_kt_flux_lattice() {
        let kt = kodaira_thurston();
        let g = flux_lattice(&kt, &standard_form(&kt), &kt_loops()).unwrap();
        let names: Vec<String> = g.generators().iter().map(|f| kt.render(f)).collect();
        assert_eq!(names, vec!["ds", "dy"]);
        assert_eq!(g.center_image, vec![vec![BigInt::from(0), BigInt::from(1), BigInt::from(0)]]);
        assert_eq!(g.particular.iter().map(|p| kt.render(p)).collect::<Vec<_>>(), vec!["-ds"]);
        assert_eq!(g.kernel.iter().map(|p| kt.render(p)).collect::<Vec<_>>(), vec!["dy"]);
        assert!(g.verified.iter().all(|v| v.closure_checked));

        let sum = in_flux_lattice(&one_form(&kt, [q(1), q(0), q(0), q(1)]), &g).unwrap();
        assert_eq!(sum.coefficients, Some(vec![BigInt::from(1), BigInt::from(1)]));
        assert!(sum.within_constraint);
        let half = in_flux_lattice(&one_form(&kt, [frac(1, 2), q(0), q(0), q(0)]), &g).unwrap();
        assert_eq!(half.coefficients, None);
        let dt = in_flux_lattice(&one_form(&kt, [q(0), q(1), q(0), q(0)]), &g).unwrap();
        assert_eq!(dt, LatticeMembership { coefficients: None, within_constraint: false });
        // the diagram alone does not constrain the dy direction
        let third_dy = in_flux_lattice(&one_form(&kt, [q(0), q(0), q(0), frac(1, 3)]), &g).unwrap();
        assert_eq!(third_dy, LatticeMembership { coefficients: None, within_constraint: true });
    }

    #[test]
    fn abef_flux_lattice() {
        let kt = kodaira_thurston();
        let abef = [1, 2, 3, 4].map(PolyScalar::from_int);
        let g = flux_lattice(&kt, &abef_form(&kt, &abef), &kt_loops()).unwrap();
        let gens: Vec<String> = g.generators().iter().map(|f| kt.render(f)).collect();
        assert_eq!(gens, vec!["3·ds + 4·dy", "ds + 2·dy"]);
        assert_eq!(g.volume, q(2 * 3 - 4));
    }

    #[test]
    fn torus_flux_lattice() {
        let t = torus4();
        let a: Vec<Vec<PolyScalar>> = [[0, 1, 2, 3], [0, 0, 5, 7], [0, 0, 0, 11], [0; 4]]
            .iter()
            .map(|r| r.iter().map(|&x| PolyScalar::from_int(x)).collect())
            .collect();
        let g = flux_lattice(&t, &torus_form(&t, &a), &torus_loops()).unwrap();
        assert!(g.wedge_injective());
        let gens: Vec<String> = g.generators().iter().map(|f| t.render(f)).collect();
        assert_eq!(gens[0], "dx2 + 2·dx3 + 3·dx4");
        assert_eq!(gens[1], "-dx1 + 5·dx3 + 7·dx4");
    }

    #[test]
    fn wrong_loop_class_violates_the_square() {
        let kt = kodaira_thurston();
        let mut loops = kt_loops();
        loops[0].class = vec![0, 1, 0, 0];
        // closure check catches it first
        assert!(matches!(
            flux_lattice(&kt, &standard_form(&kt), &loops),
            Err(Error::DiagramViolation(_))
        ));
        // a time-dependent field skips the closure check, so the square must catch it
        let mut comps = vec![PolyScalar::zero(); 4];
        comps[1] = PolyScalar::time().scale(&q(-2));
        loops[0].field = VecField::new(comps);
        let err = flux_lattice(&kt, &standard_form(&kt), &loops).unwrap_err();
        assert!(matches!(err, Error::DiagramViolation(ref m) if m.contains("H³")), "{err:?}");
    }
}
