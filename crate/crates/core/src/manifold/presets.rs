use crate::error::{Error, Result};
use crate::exterior::{AffineMap, Basis, DiffForm};
use crate::linalg;
use crate::poly::PolyScalar;
use crate::rational::q;

use super::{ManifoldModel, ModelSpec, Pi1Data};

pub const PRESET_NAMES: [&str; 2] = ["kodaira-thurston", "torus4"];

pub fn preset(name: &str) -> Result<ManifoldModel> {
    match name {
        "kodaira-thurston" | "kt" => Ok(kodaira_thurston()),
        "torus4" | "t4" => Ok(torus4()),
        other => Err(Error::InvalidModel(format!(
            "unknown preset `{other}` (known: {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

fn unit_translation(n: usize, i: usize) -> AffineMap {
    let mut v = vec![q(0); n];
    v[i] = q(1);
    AffineMap::translation_by(v)
}

fn coordinate_volume(n: usize) -> DiffForm {
    let idx: Vec<usize> = (0..n).collect();
    DiffForm::monomial(n, Basis::Coordinate, &idx, PolyScalar::one()).expect("valid top form")
}

pub(crate) fn kodaira_thurston_spec() -> ModelSpec {
    let c = |i| DiffForm::basis_one_form(4, i, Basis::Coordinate);
    // γ = dx − s dy
    let gamma = c(2).sub(&c(3).scale_poly(&PolyScalar::coord(0))).expect("same basis");
    // (s, t, x, y) ↦ (s+1, t, x+y, y)
    let mut shear = linalg::identity(4);
    shear[2][3] = q(1);
    let s_gen = AffineMap::new(shear, vec![q(1), q(0), q(0), q(0)]).expect("square");
    let labels = ["s", "t", "x", "y"].map(String::from).to_vec();
    ModelSpec {
        name: "kodaira-thurston".into(),
        coordinates: labels.clone(),
        frame_names: ["ds", "dt", "γ", "dy"].map(String::from).to_vec(),
        coframe: vec![c(0), c(1), gamma, c(3)],
        structure: None,
        generators: vec![s_gen, unit_translation(4, 1), unit_translation(4, 2), unit_translation(4, 3)],
        volume: coordinate_volume(4),
        pi1: Pi1Data {
            labels,
            center: vec![vec![0, 1, 0, 0], vec![0, 0, 1, 0]],
            commutator: vec![vec![0, 0, 1, 0]],
        },
    }
}

/// `R^4 / G` with `ρ_{mnkℓ}(s,t,x,y) = (s+m, t+n, x+k+m y, y+ℓ)` and
/// invariant coframe `ds, dt, γ = dx − s dy, dy`.
pub fn kodaira_thurston() -> ManifoldModel {
    ManifoldModel::new(kodaira_thurston_spec()).expect("preset is valid")
}

pub(crate) fn torus4_spec() -> ModelSpec {
    let labels: Vec<String> = (1..=4).map(|i| format!("x{i}")).collect();
    ModelSpec {
        name: "torus4".into(),
        coordinates: labels.clone(),
        frame_names: labels.iter().map(|l| format!("d{l}")).collect(),
        coframe: (0..4).map(|i| DiffForm::basis_one_form(4, i, Basis::Coordinate)).collect(),
        structure: None,
        generators: (0..4).map(|i| unit_translation(4, i)).collect(),
        volume: coordinate_volume(4),
        pi1: Pi1Data {
            labels,
            center: (0..4).map(|i| (0..4).map(|j| i64::from(i == j)).collect()).collect(),
            commutator: Vec::new(),
        },
    }
}

/// The standard torus `R^4 / Z^4`.
pub fn torus4() -> ManifoldModel {
    ManifoldModel::new(torus4_spec()).expect("preset is valid")
}
