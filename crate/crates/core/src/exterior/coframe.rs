use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{PolyScalar, Var};

use super::{canonical_order, Basis, DiffForm, VecField};

/// An invariant coframe `e^i = Σ_j C_ij dx_j` together with its inverse and
/// the structure derivatives `d e^i` written in the frame basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coframe {
    name: Arc<str>,
    dim: usize,
    frame: Vec<DiffForm>,
    matrix: Vec<Vec<PolyScalar>>,
    inverse: Vec<Vec<PolyScalar>>,
    structure: Vec<DiffForm>,
}

impl Coframe {
    /// Builds a coframe from coordinate-basis 1-forms. The structure
    /// derivatives are computed; when `declared` is given it must agree.
    pub fn new(name: &str, frame: Vec<DiffForm>, declared: Option<Vec<DiffForm>>) -> Result<Self> {
        let dim = frame.len();
        for (i, f) in frame.iter().enumerate() {
            if f.basis() != &Basis::Coordinate || f.degree() != 1 || f.dim() != dim {
                return Err(Error::InvalidModel(format!(
                    "coframe entry {i} must be a coordinate-basis 1-form on R^{dim}"
                )));
            }
        }
        let matrix: Vec<Vec<PolyScalar>> = frame
            .iter()
            .map(|f| (0..dim).map(|j| f.coefficient(&[j])).collect())
            .collect();
        let det = poly_determinant(&matrix);
        let det_value = det
            .as_constant()
            .filter(|d| !num_traits::Zero::is_zero(d))
            .ok_or_else(|| Error::DegenerateFrame(format!("coframe determinant `{det}` is not a nonzero constant")))?;
        let inverse: Vec<Vec<PolyScalar>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| cofactor(&matrix, j, i).scale(&det_value.recip()))
                    .collect()
            })
            .collect();
        let mut cf = Coframe {
            name: Arc::from(name),
            dim,
            frame,
            matrix,
            inverse,
            structure: Vec::new(),
        };
        let computed = cf
            .frame
            .iter()
            .map(|f| f.d().and_then(|df| cf.to_frame(&df)))
            .collect::<Result<Vec<_>>>()?;
        if let Some(declared) = declared {
            if declared.len() != dim {
                return Err(Error::InvalidModel(format!("expected {dim} structure derivatives")));
            }
            for (i, (c, d)) in computed.iter().zip(&declared).enumerate() {
                if c != d {
                    return Err(Error::InvalidModel(format!(
                        "declared d(e{i}) = {d} disagrees with the computed {c}"
                    )));
                }
            }
        }
        cf.structure = computed;
        Ok(cf)
    }

    /// The coordinate coframe `dx_0, …, dx_{n-1}` under a frame tag.
    pub fn standard(name: &str, dim: usize) -> Self {
        let frame = (0..dim).map(|i| DiffForm::basis_one_form(dim, i, Basis::Coordinate)).collect();
        Self::new(name, frame, None).expect("the identity coframe is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basis(&self) -> Basis {
        Basis::Frame(self.name.clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Frame 1-forms in the coordinate basis.
    pub fn frame_forms(&self) -> &[DiffForm] {
        &self.frame
    }

    /// `d e^i` in the frame basis.
    pub fn structure(&self) -> &[DiffForm] {
        &self.structure
    }

    /// True when every `d e^i` has constant coefficients in the frame basis.
    pub fn has_constant_structure(&self) -> bool {
        self.structure.iter().all(DiffForm::has_constant_coefficients)
    }

    /// The frame vector fields `E_i`, dual to `e^j`.
    pub fn dual_fields(&self) -> Vec<VecField> {
        // e^j(E_i) = Σ_k C_jk E_i^k = δ_ij  ⇒  E_i^k = (C⁻¹)_{ki}
        (0..self.dim)
            .map(|i| VecField::new((0..self.dim).map(|k| self.inverse[k][i].clone()).collect()))
            .collect()
    }

    fn check_owned(&self, a: &DiffForm) -> Result<()> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: a.dim() });
        }
        match a.basis() {
            Basis::Coordinate => Ok(()),
            b if *b == self.basis() => Ok(()),
            other => Err(Error::BasisMismatch(format!("{other} is not {}", self.basis()))),
        }
    }

    /// Rewrites a form over `target`, substituting each basis 1-form by its
    /// expression in the other basis.
    pub fn change_basis(&self, a: &DiffForm, target: &Basis) -> Result<DiffForm> {
        self.check_owned(a)?;
        if target != &Basis::Coordinate && *target != self.basis() {
            return Err(Error::BasisMismatch(format!("{target} is not {}", self.basis())));
        }
        if a.basis() == target {
            return Ok(a.clone());
        }
        // image of each source basis 1-form in the target basis
        let images: Vec<DiffForm> = if *target == Basis::Coordinate {
            self.frame.clone()
        } else {
            (0..self.dim)
                .map(|j| {
                    let terms = (0..self.dim).map(|i| (vec![i], self.inverse[j][i].clone()));
                    DiffForm::from_terms(self.dim, 1, target.clone(), terms).expect("valid 1-form")
                })
                .collect()
        };
        let mut out = DiffForm::zero(self.dim, a.degree(), target.clone());
        for (idx, c) in a.terms() {
            let mut piece = DiffForm::scalar(self.dim, target.clone(), c.clone());
            for &i in idx {
                piece = piece.wedge(&images[i])?;
            }
            out = out.add(&piece)?;
        }
        Ok(out)
    }

    pub fn to_frame(&self, a: &DiffForm) -> Result<DiffForm> {
        self.change_basis(a, &self.basis())
    }

    pub fn to_coordinate(&self, a: &DiffForm) -> Result<DiffForm> {
        self.change_basis(a, &Basis::Coordinate)
    }

    /// Exterior derivative in either basis. In the frame basis it uses
    /// `d(f e^I) = df ∧ e^I + f d(e^I)` with the structure derivatives.
    pub fn d(&self, a: &DiffForm) -> Result<DiffForm> {
        self.check_owned(a)?;
        if a.basis() == &Basis::Coordinate {
            return a.d();
        }
        let basis = self.basis();
        let mut out = DiffForm::zero(self.dim, a.degree() + 1, basis.clone());
        for (idx, c) in a.terms() {
            let mono = DiffForm::monomial(self.dim, basis.clone(), idx, PolyScalar::one())?;
            // df in the frame basis
            let mut df = DiffForm::zero(self.dim, 1, basis.clone());
            for j in 0..self.dim {
                let dc = c.derivative(&Var::Coord(j));
                if dc.is_zero() {
                    continue;
                }
                for i in 0..self.dim {
                    let coeff = &dc * &self.inverse[j][i];
                    df = df.add(&DiffForm::monomial(self.dim, basis.clone(), &[i], coeff)?)?;
                }
            }
            out = out.add(&df.wedge(&mono)?)?;
            out = out.add(&self.d_monomial(idx)?.scale_poly(c))?;
        }
        Ok(out)
    }

    /// `d(e^{i_1} ∧ … ∧ e^{i_k})` by the graded Leibniz rule.
    fn d_monomial(&self, idx: &[usize]) -> Result<DiffForm> {
        let basis = self.basis();
        let mut out = DiffForm::zero(self.dim, idx.len() + 1, basis.clone());
        for (pos, &i) in idx.iter().enumerate() {
            let before = DiffForm::monomial(self.dim, basis.clone(), &idx[..pos], PolyScalar::one())?;
            let after = DiffForm::monomial(self.dim, basis.clone(), &idx[pos + 1..], PolyScalar::one())?;
            let piece = before.wedge(&self.structure[i])?.wedge(&after)?;
            out = if pos % 2 == 0 { out.add(&piece)? } else { out.sub(&piece)? };
        }
        Ok(out)
    }

    /// `ι(X) a` for a form in either basis; the result keeps the input basis.
    pub fn interior(&self, x: &VecField, a: &DiffForm) -> Result<DiffForm> {
        self.check_owned(a)?;
        let coord = self.to_coordinate(a)?;
        let out = coord.interior(x)?;
        self.change_basis(&out, a.basis())
    }

    /// Equality after conversion to the coordinate basis.
    pub fn forms_equal(&self, a: &DiffForm, b: &DiffForm) -> Result<bool> {
        Ok(self.to_coordinate(a)? == self.to_coordinate(b)?)
    }
}

fn poly_determinant(m: &[Vec<PolyScalar>]) -> PolyScalar {
    let n = m.len();
    if n == 0 {
        return PolyScalar::one();
    }
    // Leibniz expansion; coframes are small
    let mut total = PolyScalar::zero();
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let (_, sign) = canonical_order(p).expect("permutation has no repeats");
        let mut term = PolyScalar::one();
        for (i, &j) in p.iter().enumerate() {
            term = &term * &m[i][j];
            if term.is_zero() {
                return;
            }
        }
        total = if sign < 0 { &total - &term } else { &total + &term };
    });
    total
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

fn cofactor(m: &[Vec<PolyScalar>], row: usize, col: usize) -> PolyScalar {
    let minor: Vec<Vec<PolyScalar>> = m
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect())
        .collect();
    let d = poly_determinant(&minor);
    if (row + col) % 2 == 1 {
        -d
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kt() -> Coframe {
        let c = |i| DiffForm::basis_one_form(4, i, Basis::Coordinate);
        let gamma = c(2).sub(&c(3).scale_poly(&PolyScalar::coord(0))).unwrap();
        Coframe::new("kt", vec![c(0), c(1), gamma, c(3)], None).unwrap()
    }

    #[test]
    fn structure_of_gamma() {
        let cf = kt();
        let expected = DiffForm::monomial(4, cf.basis(), &[0, 3], PolyScalar::from_int(-1)).unwrap();
        assert_eq!(cf.structure()[2], expected);
        assert!(cf.structure()[0].is_zero());
        assert!(cf.has_constant_structure());
    }

    #[test]
    fn dx_in_frame_basis() {
        let cf = kt();
        let dx = DiffForm::basis_one_form(4, 2, Basis::Coordinate);
        let f = cf.to_frame(&dx).unwrap();
        let expected = DiffForm::basis_one_form(4, 2, cf.basis())
            .add(&DiffForm::monomial(4, cf.basis(), &[3], PolyScalar::coord(0)).unwrap())
            .unwrap();
        assert_eq!(f, expected);
    }

    #[test]
    fn degenerate_coframe_is_rejected() {
        let c = |i| DiffForm::basis_one_form(2, i, Basis::Coordinate);
        let err = Coframe::new("bad", vec![c(0), c(0)], None).unwrap_err();
        assert!(matches!(err, Error::DegenerateFrame(_)));
        // s·ds is invertible only away from s = 0
        let s_ds = c(0).scale_poly(&PolyScalar::coord(0));
        assert!(matches!(Coframe::new("bad", vec![s_ds, c(1)], None), Err(Error::DegenerateFrame(_))));
    }

    #[test]
    fn declared_structure_is_checked() {
        let c = |i| DiffForm::basis_one_form(4, i, Basis::Coordinate);
        let gamma = c(2).sub(&c(3).scale_poly(&PolyScalar::coord(0))).unwrap();
        let frame_zero = DiffForm::zero(4, 2, Basis::Frame(Arc::from("kt")));
        let wrong = vec![frame_zero.clone(); 4];
        assert!(matches!(
            Coframe::new("kt", vec![c(0), c(1), gamma, c(3)], Some(wrong)),
            Err(Error::InvalidModel(_))
        ));
    }

    #[test]
    fn dual_fields_pair_to_identity() {
        let cf = kt();
        let duals = cf.dual_fields();
        for (i, e) in cf.frame_forms().iter().enumerate() {
            for (j, field) in duals.iter().enumerate() {
                let pairing = e.interior(field).unwrap().coefficient(&[]);
                let expected = if i == j { PolyScalar::one() } else { PolyScalar::zero() };
                assert_eq!(pairing, expected);
            }
        }
    }
}
