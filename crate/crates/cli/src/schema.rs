//! JSON documents accepted by the command line.
//!
//! Every number is a string holding an integer, `p/q`, or (where symbols are
//! allowed) a polynomial expression. Decimal notation is rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Task parameters. Which fields are read depends on the task.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// Values substituted for free symbols in every expression.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<FormDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loops: Option<LoopsDoc>,
    /// Classes tested for membership modulo the flux subgroup.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<FormDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<FormDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second: Option<FormDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Vec<RegionEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partial: Option<PartialDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<Vec<ConstraintDoc>>,
    /// exterior-eval: d, wedge, interior, pullback, to-frame, to-coordinate,
    /// exp, primitive, poincare-dual, symplectic-dual.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<String>,
    /// H₁ class over the model's H₁ basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<Vec<String>>,
}

/// A differential form, either explicit or from a named family.
///
/// Families: `standard`; `abef` with `params = [a, b, e, f]`; `torus` with
/// the upper triangle of `matrix`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    /// `frame` (default) or `coordinate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<TermDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub indices: Vec<IndexDoc>,
    pub coeff: String,
}

/// A basis 1-form by position or by name (`ds`, `γ`, `dx1`, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndexDoc {
    Position(usize),
    Name(String),
}

/// Components in the coordinate basis; `u` is the isotopy parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDoc {
    pub components: Vec<String>,
}

/// `p ↦ matrix·p + translation`, or a named family: `identity`, `phi-abc`
/// with `params = [α, β, c]`, `phi-abc-linear` with `[a, b, α, β, c]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LoopsDoc {
    /// `"preset"`: the model's built-in loops.
    Preset(String),
    List(Vec<LoopDoc>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopDoc {
    pub label: String,
    pub field: FieldDoc,
    /// Exponent vector over the lattice generators.
    pub class: Vec<i64>,
}

/// One coordinate of a product region; unlisted coordinates are free.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionEntry {
    pub coord: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<String>,
}

/// `lower < expr < upper` (`≤` when `strict` is false); either side may be
/// omitted. `expr` is linear in the coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintDoc {
    pub expr: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<String>,
    #[serde(default = "strict_default")]
    pub strict: bool,
}

fn strict_default() -> bool {
    true
}

/// A map known on `domain`, fixing the `preserved` coordinates everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialDoc {
    pub rule: MapDoc,
    pub domain: Vec<ConstraintDoc>,
    pub preserved: Vec<String>,
}

/// A model given in full instead of by preset name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub name: String,
    pub coordinates: Vec<String>,
    pub frame_names: Vec<String>,
    /// Frame 1-forms in the coordinate basis.
    pub coframe: Vec<FormDoc>,
    pub generators: Vec<MapDoc>,
    /// Coefficient of `dx_1∧…∧dx_n` giving the fundamental domain volume 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<String>,
    pub pi1: Pi1Doc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pi1Doc {
    pub labels: Vec<String>,
    pub center: Vec<Vec<i64>>,
    #[serde(default)]
    pub commutator: Vec<Vec<i64>>,
}
