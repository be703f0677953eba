use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exterior::{index_tuples, Basis, Coframe, DiffForm};
use crate::linalg::{self, Matrix};
use crate::poly::PolyScalar;
use crate::rational::Rational;

use super::ManifoldModel;

/// The Chevalley–Eilenberg complex: constant-coefficient frame forms with
/// the differential induced by the structure derivatives.
#[derive(Clone, Debug)]
pub struct CeComplex {
    coframe: Coframe,
    tuples: Vec<Vec<Vec<usize>>>,
    /// `differentials[k]` maps degree `k` to degree `k+1` (rows × cols).
    differentials: Vec<Matrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cohomology {
    pub degree: usize,
    pub betti: usize,
    /// Closed frame forms whose classes form a basis.
    pub representatives: Vec<DiffForm>,
}

impl CeComplex {
    pub fn new(coframe: &Coframe) -> Result<Self> {
        let n = coframe.dim();
        for (i, s) in coframe.structure().iter().enumerate() {
            if s.terms().any(|(_, c)| c.as_constant().is_none()) {
                return Err(Error::InvalidModel(format!(
                    "structure derivative of frame 1-form {i} is not constant"
                )));
            }
        }
        let tuples: Vec<Vec<Vec<usize>>> = (0..=n).map(|k| index_tuples(n, k)).collect();
        let basis = coframe.basis();
        let mut differentials = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let rows = if k < n { tuples[k + 1].len() } else { 0 };
            let mut m = linalg::zeros(rows, tuples[k].len());
            if k < n {
                for (j, idx) in tuples[k].iter().enumerate() {
                    let mono = DiffForm::monomial(n, basis.clone(), idx, PolyScalar::one())?;
                    let image = coframe.d(&mono)?;
                    for (i, target) in tuples[k + 1].iter().enumerate() {
                        m[i][j] = image.coefficient(target).as_constant().expect("constant structure");
                    }
                }
            }
            differentials.push(m);
        }
        Ok(Self { coframe: coframe.clone(), tuples, differentials })
    }

    pub fn dim(&self) -> usize {
        self.coframe.dim()
    }

    pub fn coframe(&self) -> &Coframe {
        &self.coframe
    }

    pub fn differential(&self, k: usize) -> &Matrix {
        &self.differentials[k]
    }

    fn width(&self, k: usize) -> usize {
        self.tuples[k].len()
    }

    /// Coefficients of a form over the canonical frame monomials of its
    /// degree; coordinate-basis input is converted first.
    pub fn vector(&self, a: &DiffForm) -> Result<Vec<Rational>> {
        let framed = self.coframe.to_frame(a)?;
        self.tuples[framed.degree()]
            .iter()
            .map(|idx| {
                let c = framed.coefficient(idx);
                c.as_constant().ok_or_else(|| {
                    Error::NotInvariant(format!("coefficient `{c}` is not a rational constant in the frame basis"))
                })
            })
            .collect()
    }

    pub fn form(&self, k: usize, v: &[Rational]) -> DiffForm {
        let terms = self.tuples[k]
            .iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(idx, c)| (idx.clone(), PolyScalar::constant(c.clone())));
        DiffForm::from_terms(self.dim(), k, self.coframe.basis(), terms).expect("canonical tuples")
    }

    fn image_columns(&self, k: usize) -> Vec<Vec<Rational>> {
        if k == 0 {
            return Vec::new();
        }
        let d = &self.differentials[k - 1];
        (0..self.width(k - 1)).map(|j| d.iter().map(|row| row[j].clone()).collect()).collect()
    }

    fn is_closed_vector(&self, k: usize, v: &[Rational]) -> bool {
        linalg::mat_vec(&self.differentials[k], v).iter().all(Zero::is_zero)
    }

    /// `H^k` with representatives chosen greedily: closed unit monomials in
    /// canonical order first, then kernel vectors.
    pub fn cohomology(&self, k: usize) -> Cohomology {
        let w = self.width(k);
        let mut span = self.image_columns(k);
        let mut rank = linalg::rank(&linalg::transpose_cols(&span, w));
        let mut reps = Vec::new();
        let units = (0..w).map(|i| {
            let mut e = vec![Rational::zero(); w];
            e[i] = Rational::from_integer(1.into());
            e
        });
        let kernel = linalg::kernel(&self.differentials[k], w);
        for cand in units.filter(|e| self.is_closed_vector(k, e)).chain(kernel) {
            span.push(cand.clone());
            let r = linalg::rank(&linalg::transpose_cols(&span, w));
            if r > rank {
                rank = r;
                reps.push(cand);
            } else {
                span.pop();
            }
        }
        Cohomology {
            degree: k,
            betti: reps.len(),
            representatives: reps.iter().map(|v| self.form(k, v)).collect(),
        }
    }

    fn ensure_closed(&self, k: usize, v: &[Rational]) -> Result<()> {
        if !self.is_closed_vector(k, v) {
            return Err(Error::NotClosed);
        }
        Ok(())
    }

    /// Coordinates of `[a]` over the given representatives of `H^k`.
    pub fn class_of(&self, a: &DiffForm, h: &Cohomology) -> Result<Vec<Rational>> {
        let v = self.vector(a)?;
        self.ensure_closed(a.degree(), &v)?;
        let k = a.degree();
        if h.degree != k {
            return Err(Error::DimensionMismatch { expected: h.degree, found: k });
        }
        let mut cols: Vec<Vec<Rational>> =
            h.representatives.iter().map(|r| self.vector(r)).collect::<Result<_>>()?;
        cols.extend(self.image_columns(k));
        let m = linalg::transpose_cols(&cols, self.width(k));
        let (x, _) = linalg::solve(&m, &v, cols.len()).expect("representatives and exact forms span the closed forms");
        Ok(x[..h.betti].to_vec())
    }

    /// A primitive of `a` when it is exact, `None` when its class is nonzero.
    pub fn primitive(&self, a: &DiffForm) -> Result<Option<DiffForm>> {
        let v = self.vector(a)?;
        self.ensure_closed(a.degree(), &v)?;
        let k = a.degree();
        if k == 0 {
            return Ok(if v.iter().all(Zero::is_zero) { Some(DiffForm::zero(self.dim(), 0, self.coframe.basis())) } else { None });
        }
        Ok(linalg::solve(&self.differentials[k - 1], &v, self.width(k - 1)).map(|(x, _)| self.form(k - 1, &x)))
    }
}

pub fn ce_cohomology(model: &ManifoldModel, k: usize) -> Result<Cohomology> {
    if k > model.dim() {
        return Err(Error::BadDimension(format!("degree {k} exceeds dimension {}", model.dim())));
    }
    Ok(CeComplex::new(model.coframe())?.cohomology(k))
}

/// `Some(primitive)` when `a` is exact in the invariant complex.
pub fn is_exact(a: &DiffForm, model: &ManifoldModel) -> Result<Option<DiffForm>> {
    if a.basis() != &Basis::Coordinate && a.basis() != &model.frame_basis() {
        return Err(Error::BasisMismatch(format!("{} is not a basis of {}", a.basis(), model.name())));
    }
    CeComplex::new(model.coframe())?.primitive(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{kodaira_thurston, torus4};
    use crate::rational::q;

    fn frame(model: &ManifoldModel, idx: &[usize], c: i64) -> DiffForm {
        DiffForm::monomial(model.dim(), model.frame_basis(), idx, PolyScalar::from_int(c)).unwrap()
    }

    #[test]
    fn kt_betti_numbers() {
        let kt = kodaira_thurston();
        let betti: Vec<usize> = (0..=4).map(|k| ce_cohomology(&kt, k).unwrap().betti).collect();
        assert_eq!(betti, vec![1, 3, 4, 3, 1]);
        let h1 = ce_cohomology(&kt, 1).unwrap();
        let names: Vec<String> = h1.representatives.iter().map(|r| kt.render(r)).collect();
        assert_eq!(names, vec!["ds", "dt", "dy"]);
    }

    #[test]
    fn torus_betti_numbers_are_binomial() {
        let t = torus4();
        let betti: Vec<usize> = (0..=4).map(|k| ce_cohomology(&t, k).unwrap().betti).collect();
        assert_eq!(betti, vec![1, 4, 6, 4, 1]);
    }

    #[test]
    fn dy_ds_dt_is_exact() {
        let kt = kodaira_thurston();
        let target = frame(&kt, &[3, 0, 1], 1);
        let p = is_exact(&target, &kt).unwrap().expect("exact");
        assert_eq!(kt.coframe().d(&p).unwrap(), target);
        assert!(is_exact(&frame(&kt, &[0], 1), &kt).unwrap().is_none());
        let zero = DiffForm::zero(4, 2, kt.frame_basis());
        assert_eq!(is_exact(&zero, &kt).unwrap(), Some(DiffForm::zero(4, 1, kt.frame_basis())));
    }

    #[test]
    fn non_closed_input_is_rejected() {
        let kt = kodaira_thurston();
        assert!(matches!(is_exact(&frame(&kt, &[2], 1), &kt), Err(Error::NotClosed)));
    }

    #[test]
    fn class_coordinates() {
        let kt = kodaira_thurston();
        let cx = CeComplex::new(kt.coframe()).unwrap();
        let h2 = cx.cohomology(2);
        // ds∧dy is exact, so 2 ds∧dt + ds∧dy has class 2[ds∧dt]
        let a = frame(&kt, &[0, 1], 2).add(&frame(&kt, &[0, 3], 1)).unwrap();
        assert_eq!(cx.class_of(&a, &h2).unwrap(), vec![q(2), q(0), q(0), q(0)]);
    }
}
