//! Flux of symplectic vector fields, isotopies and affine maps, Poincaré
//! duality on the invariant frame, and the flux subgroup bracketed by the
//! evaluation / flux commutative square.

mod families;
mod lattice;

pub use families::{
    abef_form, kt_loops, phi_abc, phi_abc_linear, phi_abc_linear_field, standard_form, torus_form, torus_loops,
};
pub use lattice::{flux_lattice, in_flux_lattice, FluxLattice, LatticeMembership, LoopSpec, VerifiedLoop};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exterior::{AffineMap, DiffForm, VecField};
use crate::linalg;
use crate::manifold::{map_descends, ManifoldModel, MapDescent};
use crate::poly::{PolyScalar, Var};
use crate::rational::Rational;

/// Isotopy used by [`flux_of_map`].
pub const ISOTOPY_CONVENTION: &str =
    "straight-line affine interpolation φ^u = (1-u)·id + u·φ of linear part and translation, u ∈ [0,1]";

/// Sign convention used by [`poincare_dual`].
pub const PD_CONVENTION: &str = "PD(h) = ι(V_h)Ω₀ with V_h the invariant frame field of h";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FluxValue {
    /// Frame-basis form when `invariant`, coordinate-basis otherwise.
    pub form: DiffForm,
    /// Whether the coefficients are constant in the invariant frame.
    pub invariant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapFlux {
    pub value: FluxValue,
    /// `X_u = (d/du φ^u) ∘ (φ^u)⁻¹`.
    pub generating_field: VecField,
    pub isotopy: &'static str,
}

fn check_closed(omega: &DiffForm, model: &ManifoldModel) -> Result<DiffForm> {
    if omega.degree() != 2 {
        return Err(Error::BadDimension(format!("expected a 2-form, got degree {}", omega.degree())));
    }
    let w = model.coframe().to_coordinate(omega)?;
    if !w.d()?.is_zero() {
        return Err(Error::NotClosed);
    }
    Ok(w)
}

/// `∫₀¹ ι(X_u) ω du`; for a `u`-independent field this is `ι(X)ω`.
pub fn flux_field(x: &VecField, omega: &DiffForm, model: &ManifoldModel) -> Result<FluxValue> {
    if x.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: x.dim() });
    }
    let w = check_closed(omega, model)?;
    let integrated = w.interior(x)?.map_coefficients(|c| c.integrate_unit(&Var::Time));
    let framed = model.coframe().to_frame(&integrated)?;
    Ok(if framed.has_constant_coefficients() {
        FluxValue { form: framed, invariant: true }
    } else {
        FluxValue { form: integrated, invariant: false }
    })
}

/// Generating field of the straight-line isotopy from the identity to `φ`.
/// With `L = I + N`, `N` nilpotent, `(φ^u)⁻¹(p) = Σ_k (−uN)^k (p − u b)`
/// and `X_u(p) = N (φ^u)⁻¹(p) + b`.
pub fn interpolation_field(phi: &AffineMap) -> Result<VecField> {
    let n = phi.dim();
    if !phi.is_unipotent() {
        return Err(Error::BadIsotopy(
            "straight-line interpolation is only handled for unipotent linear parts".into(),
        ));
    }
    let mut nil = phi.linear().clone();
    for (i, row) in nil.iter_mut().enumerate() {
        row[i] -= Rational::from_integer(1.into());
    }
    let u = PolyScalar::time();
    let b: Vec<PolyScalar> = phi.translation().iter().cloned().map(PolyScalar::constant).collect();
    let shifted: Vec<PolyScalar> = (0..n).map(|i| &PolyScalar::coord(i) - &(&u * &b[i])).collect();
    let mut inv = shifted.clone();
    let mut term = shifted;
    let minus_u = -&u;
    for _ in 1..n {
        term = poly_mat_vec(&nil, &term).into_iter().map(|p| &p * &minus_u).collect();
        if term.iter().all(PolyScalar::is_zero) {
            break;
        }
        for (acc, t) in inv.iter_mut().zip(&term) {
            *acc += t;
        }
    }
    let x: Vec<PolyScalar> = poly_mat_vec(&nil, &inv).into_iter().zip(&b).map(|(p, bi)| &p + bi).collect();
    Ok(VecField::new(x))
}

fn poly_mat_vec(a: &linalg::Matrix, v: &[PolyScalar]) -> Vec<PolyScalar> {
    a.iter()
        .map(|row| {
            let mut acc = PolyScalar::zero();
            for (aij, vj) in row.iter().zip(v) {
                if !aij.is_zero() {
                    acc += &vj.scale(aij);
                }
            }
            acc
        })
        .collect()
}

/// Flux of a descending affine symplectomorphism along the straight-line
/// isotopy from the identity.
pub fn flux_of_map(phi: &AffineMap, omega: &DiffForm, model: &ManifoldModel, bound: i64) -> Result<MapFlux> {
    match map_descends(phi, model, bound)? {
        MapDescent::Yes(_) => {}
        MapDescent::No { generator, reason, .. } => {
            return Err(Error::Precondition(format!(
                "map does not descend (generator {}): {reason}",
                model.pi1().labels[generator]
            )))
        }
        MapDescent::Inconclusive { generator, bound, .. } => {
            return Err(Error::Precondition(format!(
                "no deck witness for generator {} within bound {bound}",
                model.pi1().labels[generator]
            )))
        }
    }
    let field = interpolation_field(phi)?;
    let value = flux_field(&field, omega, model)?;
    Ok(MapFlux { value, generating_field: field, isotopy: ISOTOPY_CONVENTION })
}

/// `ι(V_h)Ω₀` in the frame basis, `h` given over the H₁ basis of the model.
pub fn poincare_dual(h: &[Rational], model: &ManifoldModel) -> Result<DiffForm> {
    let basis = model.h1_basis();
    if h.len() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), found: h.len() });
    }
    let fields = model.coframe().dual_fields();
    let mut v = VecField::zero(model.dim());
    for (hi, &gen) in h.iter().zip(basis) {
        if !hi.is_zero() {
            v = v.add(&fields[gen].scale(hi))?;
        }
    }
    let pd = model.volume_form().interior(&v)?;
    model.coframe().change_basis(&pd, &model.frame_basis())
}

/// The invariant field `X` with `ι(X)ω = α`, for invariant `α` and a
/// nondegenerate invariant `ω` with rational coefficients.
pub fn symplectic_dual(alpha: &DiffForm, omega: &DiffForm, model: &ManifoldModel) -> Result<VecField> {
    if alpha.degree() != 1 {
        return Err(Error::BadDimension(format!("expected a 1-form, got degree {}", alpha.degree())));
    }
    let n = model.dim();
    let w = check_closed(omega, model)?;
    let constant = |a: &DiffForm, what: &str| -> Result<Vec<Rational>> {
        let framed = model.coframe().to_frame(a)?;
        (0..n)
            .map(|i| framed.coefficient(&[i]).as_constant())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::NotInvariant(format!("{what} has non-constant frame coefficients")))
    };
    let target = constant(alpha, "α")?;
    let fields = model.coframe().dual_fields();
    let mut columns = Vec::with_capacity(n);
    for e in &fields {
        columns.push(constant(&w.interior(e)?, "ω")?);
    }
    let m = linalg::transpose_cols(&columns, n);
    let (x, kernel) = linalg::solve(&m, &target, n).ok_or_else(|| Error::Precondition("ω is degenerate".into()))?;
    if !kernel.is_empty() {
        return Err(Error::Precondition("ω is degenerate".into()));
    }
    let mut out = VecField::zero(n);
    for (xi, e) in x.iter().zip(&fields) {
        if !xi.is_zero() {
            out = out.add(&e.scale(xi))?;
        }
    }
    Ok(out)
}
