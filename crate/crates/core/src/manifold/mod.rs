//! Compact quotients `R^n / Γ` by lattices of unipotent affine maps, with an
//! invariant coframe and the fundamental-group data needed by the flux
//! computations.

mod cohomology;
mod descent;
mod presets;
mod region;
mod symplectic;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use cohomology::{ce_cohomology, is_exact, CeComplex, Cohomology};
pub use descent::{field_descends, map_descends, DeckWitness, FieldDescent, MapDescent, DEFAULT_SEARCH_BOUND};
pub use presets::{kodaira_thurston, preset, torus4, PRESET_NAMES};
pub use region::{CoordConstraint, CoordRegion};
pub use symplectic::{is_lagrangian, is_symplectic, SymplecticReport};

use crate::error::{Error, Result};
use crate::exterior::{AffineMap, Basis, Coframe, DiffForm, PolyAffine};
use crate::linalg::LatticeQuotient;
use crate::poly::{PolyScalar, Var};

/// Fundamental-group data supplied with a model. Vectors are exponent
/// vectors over the lattice generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi1Data {
    pub labels: Vec<String>,
    pub center: Vec<Vec<i64>>,
    pub commutator: Vec<Vec<i64>>,
}

/// Raw ingredients of a model, validated by [`ManifoldModel::new`].
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub name: String,
    pub coordinates: Vec<String>,
    pub frame_names: Vec<String>,
    /// Frame 1-forms in the coordinate basis.
    pub coframe: Vec<DiffForm>,
    /// Optional declared `d e^i` (frame basis); checked against the computed ones.
    pub structure: Option<Vec<DiffForm>>,
    /// Deck generators; generator `i` corresponds to frame direction `i`.
    pub generators: Vec<AffineMap>,
    /// Coordinate-basis top form giving the fundamental domain volume 1.
    pub volume: DiffForm,
    pub pi1: Pi1Data,
}

#[derive(Clone, Debug)]
pub struct ManifoldModel {
    name: String,
    coordinates: Vec<String>,
    frame_names: Vec<String>,
    coframe: Coframe,
    generators: Vec<AffineMap>,
    volume: DiffForm,
    pi1: Pi1Data,
    homology: LatticeQuotient,
}

impl ManifoldModel {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        let n = spec.coordinates.len();
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        if spec.coframe.len() != n || spec.frame_names.len() != n {
            return bad(format!("expected {n} coframe entries and frame names"));
        }
        if spec.generators.len() != n {
            return bad(format!("expected {n} lattice generators, got {}", spec.generators.len()));
        }
        if spec.pi1.labels.len() != n {
            return bad("one π₁ label per generator is required".into());
        }
        let coframe = Coframe::new(&spec.name, spec.coframe, spec.structure)?;
        for (i, g) in spec.generators.iter().enumerate() {
            if g.dim() != n {
                return bad(format!("generator {i} acts on R^{}", g.dim()));
            }
            if g.determinant().is_zero() {
                return bad(format!("generator {i} is singular"));
            }
            if !g.is_unipotent() {
                return bad(format!("generator {i} is not unipotent"));
            }
            for (j, e) in coframe.frame_forms().iter().enumerate() {
                if &g.pullback(e)? != e {
                    return Err(Error::NotInvariant(format!(
                        "frame 1-form {} is not preserved by generator {}",
                        spec.frame_names[j], spec.pi1.labels[i]
                    )));
                }
            }
        }
        let volume = spec.volume;
        if volume.basis() != &Basis::Coordinate || volume.degree() != n || volume.dim() != n {
            return bad("volume must be a coordinate-basis top form".into());
        }
        if volume.is_zero() || !volume.has_constant_coefficients() {
            return bad("volume must be a nonzero constant top form".into());
        }
        for (i, g) in spec.generators.iter().enumerate() {
            if g.pullback(&volume)? != volume {
                return Err(Error::NotInvariant(format!("volume form not preserved by generator {i}")));
            }
        }
        for v in spec.pi1.center.iter().chain(&spec.pi1.commutator) {
            if v.len() != n {
                return bad(format!("π₁ vector {v:?} must have {n} entries"));
            }
        }
        let commutator: Vec<Vec<BigInt>> = spec
            .pi1
            .commutator
            .iter()
            .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let homology = LatticeQuotient::new(n, &commutator).map_err(|(row, pivot)| {
            Error::Torsion(format!("commutator lattice has Hermite pivot {pivot} in row {row}"))
        })?;
        Ok(Self {
            name: spec.name,
            coordinates: spec.coordinates,
            frame_names: spec.frame_names,
            coframe,
            generators: spec.generators,
            volume,
            pi1: spec.pi1,
            homology,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.coordinates.len()
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coordinates
    }

    pub fn frame_names(&self) -> &[String] {
        &self.frame_names
    }

    pub fn coordinate_form_names(&self) -> Vec<String> {
        self.coordinates.iter().map(|c| format!("d{c}")).collect()
    }

    pub fn coframe(&self) -> &Coframe {
        &self.coframe
    }

    pub fn frame_basis(&self) -> Basis {
        self.coframe.basis()
    }

    pub fn generators(&self) -> &[AffineMap] {
        &self.generators
    }

    pub fn volume_form(&self) -> &DiffForm {
        &self.volume
    }

    pub fn pi1(&self) -> &Pi1Data {
        &self.pi1
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coordinates.iter().position(|c| c == name)
    }

    /// Variable naming for rendering: coordinates by model name.
    pub fn var_name(&self, v: &Var) -> String {
        match v {
            Var::Coord(i) if *i < self.dim() => self.coordinates[*i].clone(),
            other => crate::poly::default_var_name(other),
        }
    }

    pub fn render(&self, a: &DiffForm) -> String {
        let names = match a.basis() {
            Basis::Coordinate => self.coordinate_form_names(),
            Basis::Frame(_) => self.frame_names.clone(),
        };
        a.render(&names, &|v| self.var_name(v))
    }

    pub fn render_poly(&self, p: &PolyScalar) -> String {
        p.fmt_with(&|v| self.var_name(v))
    }

    /// `g_n^{e_n} ∘ … ∘ g_1^{e_1}` (the first generator acts first).
    pub fn deck_element(&self, exponents: &[i64]) -> Result<AffineMap> {
        if exponents.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: exponents.len() });
        }
        let mut acc = AffineMap::identity(self.dim());
        for (g, &e) in self.generators.iter().zip(exponents) {
            acc = g.pow(e)?.compose(&acc);
        }
        Ok(acc)
    }

    /// The deck word with symbolic exponents `Var::Lattice(i)`.
    pub fn symbolic_deck_element(&self) -> Result<PolyAffine> {
        let mut acc = PolyAffine::identity(self.dim());
        for (i, g) in self.generators.iter().enumerate() {
            let log = g.logarithm()?;
            let (a, c) = log.affine_parts()?;
            let power = PolyAffine::flow(&a, &c, &PolyScalar::var(Var::Lattice(i)));
            acc = power.compose(&acc);
        }
        Ok(acc)
    }

    /// True when every generator and its inverse has integer entries, so all
    /// deck transformations are integral affine maps.
    pub fn has_integral_lattice(&self) -> bool {
        self.generators.iter().all(|g| {
            let det = g.determinant();
            det.abs().is_one() && is_integral(g)
        })
    }

    /// Basis of `H_1(M; Z)`: generator indices surviving modulo commutators.
    pub fn h1_basis(&self) -> &[usize] {
        self.homology.basis_rows()
    }

    pub fn h1_rank(&self) -> usize {
        self.homology.quotient_dim()
    }

    pub fn h1_labels(&self) -> Vec<String> {
        self.h1_basis().iter().map(|&i| self.pi1.labels[i].clone()).collect()
    }

    /// Hurewicz image of a π₁ element (exponent vector) in the H₁ basis.
    pub fn to_h1(&self, element: &[i64]) -> Vec<BigInt> {
        let v: Vec<BigInt> = element.iter().map(|&x| BigInt::from(x)).collect();
        self.homology.project(&v)
    }
}

pub(crate) fn is_integral(m: &AffineMap) -> bool {
    m.linear().iter().flatten().chain(m.translation()).all(crate::rational::is_integer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn presets_validate() {
        for name in PRESET_NAMES {
            let m = preset(name).unwrap();
            assert_eq!(m.dim(), 4);
            assert!(m.has_integral_lattice());
        }
    }

    #[test]
    fn kt_deck_element_matches_group_law() {
        // ρ_{mnkℓ}(s,t,x,y) = (s+m, t+n, x+k+m y, y+ℓ)
        let kt = kodaira_thurston();
        let g = kt.deck_element(&[2, -1, 3, 5]).unwrap();
        let p = vec![q(1), q(2), q(3), q(4)];
        assert_eq!(g.apply(&p), vec![q(3), q(1), q(3 + 3 + 2 * 4), q(9)]);
    }

    #[test]
    fn symbolic_deck_element_specializes() {
        let kt = kodaira_thurston();
        let sym = kt.symbolic_deck_element().unwrap();
        let exps = [3i64, -2, 1, -4];
        let values = exps
            .iter()
            .enumerate()
            .map(|(i, &e)| (Var::Lattice(i), PolyScalar::from_int(e)))
            .collect();
        let specialized = PolyAffine {
            linear: sym.linear.iter().map(|r| r.iter().map(|p| p.substitute(&values)).collect()).collect(),
            translation: sym.translation.iter().map(|p| p.substitute(&values)).collect(),
        };
        assert_eq!(specialized.to_rational().unwrap(), kt.deck_element(&exps).unwrap());
    }

    #[test]
    fn kt_first_homology() {
        let kt = kodaira_thurston();
        assert_eq!(kt.h1_labels(), vec!["s", "t", "y"]);
        let zero = vec![BigInt::from(0); 3];
        assert_eq!(kt.to_h1(&[0, 0, 1, 0]), zero);
    }

    #[test]
    fn non_invariant_frame_is_rejected() {
        let kt = kodaira_thurston();
        let mut spec = presets::kodaira_thurston_spec();
        // replace γ by dx: not invariant under the s-generator
        spec.coframe[2] = DiffForm::basis_one_form(4, 2, Basis::Coordinate);
        assert!(matches!(ManifoldModel::new(spec), Err(Error::NotInvariant(_))));
        assert_eq!(kt.name(), "kodaira-thurston");
    }
}
