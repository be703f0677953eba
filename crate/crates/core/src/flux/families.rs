use crate::exterior::{AffineMap, Basis, DiffForm, VecField};
use crate::linalg;
use crate::manifold::ManifoldModel;
use crate::poly::PolyScalar;
use crate::rational::Rational;

use super::LoopSpec;

/// `dx₁∧dx₂ + dx₃∧dx₄` in coordinates (`ds∧dt + dx∧dy` on KT).
pub fn standard_form(model: &ManifoldModel) -> DiffForm {
    let terms = [(vec![0, 1], PolyScalar::one()), (vec![2, 3], PolyScalar::one())];
    DiffForm::from_terms(model.dim(), 2, Basis::Coordinate, terms).expect("4-dimensional model")
}

/// `a γ∧ds + b γ∧dy + e ds∧dt + f dy∧dt` in the KT frame.
pub fn abef_form(model: &ManifoldModel, abef: &[PolyScalar; 4]) -> DiffForm {
    let [a, b, e, f] = abef.clone();
    let terms = [(vec![2, 0], a), (vec![2, 3], b), (vec![0, 1], e), (vec![3, 1], f)];
    DiffForm::from_terms(model.dim(), 2, model.frame_basis(), terms).expect("4-dimensional model")
}

/// `Σ_{i<j} a_ij dx_i∧dx_j`; entries on or below the diagonal are ignored.
pub fn torus_form(model: &ManifoldModel, a: &[Vec<PolyScalar>]) -> DiffForm {
    let n = model.dim();
    let terms = (0..n).flat_map(|i| (i + 1..n).map(move |j| (vec![i, j], a[i][j].clone())));
    DiffForm::from_terms(n, 2, Basis::Coordinate, terms).expect("square coefficient table")
}

/// `φ_θ = (s, t−θ, x, y)` and `ψ_θ = (s, t, x+θ, y)`.
pub fn kt_loops() -> Vec<LoopSpec> {
    let mut neg_t = vec![PolyScalar::zero(); 4];
    neg_t[1] = PolyScalar::from_int(-1);
    vec![
        LoopSpec { label: "phi".into(), field: VecField::new(neg_t), class: vec![0, -1, 0, 0] },
        LoopSpec { label: "psi".into(), field: VecField::coordinate(4, 2), class: vec![0, 0, 1, 0] },
    ]
}

/// Rotation loops along each torus coordinate.
pub fn torus_loops() -> Vec<LoopSpec> {
    (0..4)
        .map(|i| {
            let mut class = vec![0; 4];
            class[i] = 1;
            LoopSpec { label: format!("phi{}", i + 1), field: VecField::coordinate(4, i), class }
        })
        .collect()
}

/// `(s, t, x, y) ↦ (s+c, t−α, x+β, y)`.
pub fn phi_abc(alpha: &Rational, beta: &Rational, c: &Rational) -> AffineMap {
    let zero = Rational::from_integer(0.into());
    AffineMap::translation_by(vec![c.clone(), -alpha.clone(), beta.clone(), zero])
}

/// `(s, t, x, y) ↦ (s+bc, t−α, x+β−acs, y−ac)`.
pub fn phi_abc_linear(a: &Rational, b: &Rational, alpha: &Rational, beta: &Rational, c: &Rational) -> AffineMap {
    let mut lin = linalg::identity(4);
    let ac = a * c;
    lin[2][0] = -ac.clone();
    AffineMap::new(lin, vec![b * c, -alpha.clone(), beta.clone(), -ac]).expect("square")
}

/// `bc ∂s − α ∂t + (β − acs) ∂x − ac ∂y`, parameters `[a, b, α, β, c]`.
pub fn phi_abc_linear_field(p: &[PolyScalar; 5]) -> VecField {
    let [a, b, alpha, beta, c] = p;
    let ac = a * c;
    VecField::new(vec![b * c, -alpha, beta - &(&ac * &PolyScalar::coord(0)), -&ac])
}
