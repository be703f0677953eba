//! Conversion between JSON documents and library objects.

use std::collections::BTreeMap;

use nilflux_core::displacement::{Constraint, PartialAffineMap, Polyhedron};
use nilflux_core::exterior::{AffineMap, Basis, DiffForm, VecField};
use nilflux_core::flux::{abef_form, kt_loops, phi_abc, phi_abc_linear, standard_form, torus_form, torus_loops, LoopSpec};
use nilflux_core::manifold::{preset, CoordConstraint, CoordRegion, ManifoldModel, ModelSpec, Pi1Data};
use nilflux_core::poly::{PolyScalar, Var};
use nilflux_core::rational::{format_rational, Rational};
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::expr::parse_poly;
use crate::schema::{
    ConstraintDoc, FieldDoc, FormDoc, IndexDoc, LoopsDoc, MapDoc, ModelDoc, PartialDoc, RegionEntry,
};

/// A loaded model plus the parameter values in force.
pub struct Context {
    pub model: ManifoldModel,
    params: BTreeMap<Var, PolyScalar>,
}

fn usage(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::usage(format!("{path}: {msg}"))
}

/// Resolves a preset name or reads a model document from disk.
pub fn load_model(name_or_path: &str) -> Result<ManifoldModel, CliError> {
    if let Ok(m) = preset(name_or_path) {
        return Ok(m);
    }
    let text = std::fs::read_to_string(name_or_path).map_err(|e| {
        CliError::usage(format!(
            "--model: `{name_or_path}` is neither a preset ({}) nor a readable file: {e}",
            nilflux_core::manifold::PRESET_NAMES.join(", ")
        ))
    })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let doc: ModelDoc = serde_path_to_error::deserialize(de)
        .map_err(|e| CliError::usage(format!("model document: {}: {}", e.path(), e.inner())))?;
    model_from_doc(&doc)
}

pub fn model_from_doc(doc: &ModelDoc) -> Result<ManifoldModel, CliError> {
    let n = doc.coordinates.len();
    let coords = doc.coordinates.clone();
    let resolve = move |name: &str| coords.iter().position(|c| c == name).map(Var::Coord);
    let poly = |text: &str, path: &str| -> Result<PolyScalar, CliError> {
        let p = parse_poly(text, &resolve).map_err(|e| usage(path, e))?;
        if p.depends_on(|v| matches!(v, Var::Param(_) | Var::Time)) {
            return Err(usage(path, format!("`{text}` may only use coordinates")));
        }
        Ok(p)
    };
    let mut coframe = Vec::new();
    for (i, f) in doc.coframe.iter().enumerate() {
        let path = format!("coframe[{i}]");
        let terms = f.terms.as_ref().ok_or_else(|| usage(&path, "terms are required"))?;
        let mut out = DiffForm::zero(n, 1, Basis::Coordinate);
        for (j, t) in terms.iter().enumerate() {
            let tp = format!("{path}.terms[{j}]");
            let idx = match t.indices.as_slice() {
                [IndexDoc::Position(k)] if *k < n => *k,
                [IndexDoc::Name(name)] => doc
                    .coordinates
                    .iter()
                    .position(|c| format!("d{c}") == *name)
                    .ok_or_else(|| usage(&tp, format!("unknown coordinate 1-form `{name}`")))?,
                _ => return Err(usage(&tp, "a single coordinate index is required")),
            };
            let c = poly(&t.coeff, &format!("{tp}.coeff"))?;
            out = out.add(&DiffForm::basis_one_form(n, idx, Basis::Coordinate).scale_poly(&c)).map_err(CliError::from)?;
        }
        coframe.push(out);
    }
    let mut generators = Vec::new();
    for (i, g) in doc.generators.iter().enumerate() {
        generators.push(rational_map(g, n, &format!("generators[{i}]"), &|t, p| {
            poly(t, p)?.as_constant().ok_or_else(|| usage(p, "expected a rational"))
        })?);
    }
    let vol = match &doc.volume {
        Some(v) => poly(v, "volume")?.as_constant().ok_or_else(|| usage("volume", "expected a rational"))?,
        None => Rational::from_integer(1.into()),
    };
    let idx: Vec<usize> = (0..n).collect();
    let volume = DiffForm::monomial(n, Basis::Coordinate, &idx, PolyScalar::constant(vol)).map_err(CliError::from)?;
    let spec = ModelSpec {
        name: doc.name.clone(),
        coordinates: doc.coordinates.clone(),
        frame_names: doc.frame_names.clone(),
        coframe,
        structure: None,
        generators,
        volume,
        pi1: Pi1Data {
            labels: doc.pi1.labels.clone(),
            center: doc.pi1.center.clone(),
            commutator: doc.pi1.commutator.clone(),
        },
    };
    ManifoldModel::new(spec).map_err(CliError::from)
}

fn rational_map(
    doc: &MapDoc,
    n: usize,
    path: &str,
    rat: &dyn Fn(&str, &str) -> Result<Rational, CliError>,
) -> Result<AffineMap, CliError> {
    if let Some(family) = &doc.family {
        let params = doc.params.clone().unwrap_or_default();
        let vals: Vec<Rational> = params
            .iter()
            .enumerate()
            .map(|(i, p)| rat(p, &format!("{path}.params[{i}]")))
            .collect::<Result<_, _>>()?;
        let want = |k: usize| {
            if vals.len() == k {
                Ok(())
            } else {
                Err(usage(&format!("{path}.params"), format!("family `{family}` takes {k} parameters")))
            }
        };
        return match family.as_str() {
            "identity" => {
                want(0)?;
                Ok(AffineMap::identity(n))
            }
            "phi-abc" | "phi-abc-linear" if n != 4 => Err(usage(path, "family needs a 4-dimensional model")),
            "phi-abc" => {
                want(3)?;
                Ok(phi_abc(&vals[0], &vals[1], &vals[2]))
            }
            "phi-abc-linear" => {
                want(5)?;
                Ok(phi_abc_linear(&vals[0], &vals[1], &vals[2], &vals[3], &vals[4]))
            }
            other => Err(usage(&format!("{path}.family"), format!("unknown map family `{other}`"))),
        };
    }
    let matrix = match &doc.matrix {
        Some(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(usage(&format!("{path}.matrix"), format!("expected a {n}×{n} matrix")));
            }
            rows.iter()
                .enumerate()
                .map(|(i, r)| {
                    r.iter()
                        .enumerate()
                        .map(|(j, x)| rat(x, &format!("{path}.matrix[{i}][{j}]")))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?
        }
        None => nilflux_core::linalg::identity(n),
    };
    let translation = match &doc.translation {
        Some(t) if t.len() == n => t
            .iter()
            .enumerate()
            .map(|(i, x)| rat(x, &format!("{path}.translation[{i}]")))
            .collect::<Result<Vec<_>, _>>()?,
        Some(_) => return Err(usage(&format!("{path}.translation"), format!("expected {n} entries"))),
        None => vec![Rational::zero(); n],
    };
    AffineMap::new(matrix, translation).map_err(|e| usage(path, e))
}

impl Context {
    pub fn new(model: ManifoldModel, parameters: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let mut ctx = Self { model, params: BTreeMap::new() };
        let mut params = BTreeMap::new();
        for (name, value) in parameters {
            let path = format!("parameters.{name}");
            if ctx.model.coord_index(name).is_some() {
                return Err(usage(&path, "a parameter may not shadow a coordinate"));
            }
            let p = ctx.poly(value, &path)?;
            if p.depends_on(|v| matches!(v, Var::Coord(_) | Var::Time)) {
                return Err(usage(&path, "parameter values may not mention coordinates"));
            }
            params.insert(Var::param(name), p);
        }
        ctx.params = params;
        Ok(ctx)
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// Coordinates by name, `u` as the isotopy parameter, parameter values
    /// substituted.
    pub fn poly(&self, text: &str, path: &str) -> Result<PolyScalar, CliError> {
        let resolve = |name: &str| match self.model.coord_index(name) {
            Some(i) => Some(Var::Coord(i)),
            None if name == "u" => Some(Var::Time),
            None => None,
        };
        let p = parse_poly(text, &resolve).map_err(|e| usage(path, e))?;
        Ok(if self.params.is_empty() { p } else { p.substitute(&self.params) })
    }

    pub fn rational(&self, text: &str, path: &str) -> Result<Rational, CliError> {
        let p = self.poly(text, path)?;
        p.as_constant().ok_or_else(|| {
            let free: Vec<String> = p.vars().iter().map(|v| self.model.var_name(v)).collect();
            usage(path, format!("`{text}` must be a rational number here (free: {})", free.join(", ")))
        })
    }

    fn basis_of(&self, doc: &FormDoc, path: &str) -> Result<Basis, CliError> {
        match doc.basis.as_deref() {
            None | Some("frame") => Ok(self.model.frame_basis()),
            Some("coordinate") => Ok(Basis::Coordinate),
            Some(other) => Err(usage(&format!("{path}.basis"), format!("unknown basis `{other}`"))),
        }
    }

    fn one_form_names(&self, basis: &Basis) -> Vec<String> {
        match basis {
            Basis::Coordinate => self.model.coordinate_form_names(),
            Basis::Frame(_) => self.model.frame_names().to_vec(),
        }
    }

    pub fn form(&self, doc: &FormDoc, path: &str) -> Result<DiffForm, CliError> {
        let n = self.dim();
        if let Some(family) = &doc.family {
            let params = doc.params.clone().unwrap_or_default();
            return match family.as_str() {
                "standard" => {
                    self.need_dim4(path)?;
                    Ok(standard_form(&self.model))
                }
                "abef" => {
                    self.need_kt(path)?;
                    if params.len() != 4 {
                        return Err(usage(&format!("{path}.params"), "abef takes [a, b, e, f]"));
                    }
                    let p: Vec<PolyScalar> = params
                        .iter()
                        .enumerate()
                        .map(|(i, t)| self.poly(t, &format!("{path}.params[{i}]")))
                        .collect::<Result<_, _>>()?;
                    Ok(abef_form(&self.model, &[p[0].clone(), p[1].clone(), p[2].clone(), p[3].clone()]))
                }
                "torus" => {
                    let rows = doc.matrix.as_ref().ok_or_else(|| usage(path, "torus family needs `matrix`"))?;
                    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                        return Err(usage(&format!("{path}.matrix"), format!("expected a {n}×{n} table")));
                    }
                    let a: Vec<Vec<PolyScalar>> = rows
                        .iter()
                        .enumerate()
                        .map(|(i, r)| {
                            r.iter()
                                .enumerate()
                                .map(|(j, t)| self.poly(t, &format!("{path}.matrix[{i}][{j}]")))
                                .collect::<Result<Vec<_>, _>>()
                        })
                        .collect::<Result<_, _>>()?;
                    Ok(torus_form(&self.model, &a))
                }
                other => Err(usage(&format!("{path}.family"), format!("unknown form family `{other}`"))),
            };
        }
        let basis = self.basis_of(doc, path)?;
        let names = self.one_form_names(&basis);
        let terms = doc.terms.as_ref().ok_or_else(|| usage(path, "either `family` or `terms` is required"))?;
        let degree = match (doc.degree, terms.first()) {
            (Some(k), _) => k,
            (None, Some(t)) => t.indices.len(),
            (None, None) => return Err(usage(&format!("{path}.degree"), "degree is required for an empty form")),
        };
        if degree > n {
            return Err(usage(&format!("{path}.degree"), format!("degree {degree} exceeds dimension {n}")));
        }
        let mut out = DiffForm::zero(n, degree, basis.clone());
        for (j, t) in terms.iter().enumerate() {
            let tp = format!("{path}.terms[{j}]");
            if t.indices.len() != degree {
                return Err(usage(&format!("{tp}.indices"), format!("expected {degree} indices")));
            }
            let idx: Vec<usize> = t
                .indices
                .iter()
                .map(|i| match i {
                    IndexDoc::Position(k) if *k < n => Ok(*k),
                    IndexDoc::Position(k) => Err(usage(&tp, format!("index {k} out of range"))),
                    IndexDoc::Name(name) => names
                        .iter()
                        .position(|m| m == name)
                        .ok_or_else(|| usage(&tp, format!("unknown basis 1-form `{name}` (known: {})", names.join(", ")))),
                })
                .collect::<Result<_, _>>()?;
            let c = self.poly(&t.coeff, &format!("{tp}.coeff"))?;
            let term = DiffForm::monomial(n, basis.clone(), &idx, c).map_err(|e| usage(&tp, e))?;
            out = out.add(&term).map_err(CliError::from)?;
        }
        Ok(out)
    }

    fn need_dim4(&self, path: &str) -> Result<(), CliError> {
        if self.dim() == 4 {
            Ok(())
        } else {
            Err(usage(path, "family needs a 4-dimensional model"))
        }
    }

    fn need_kt(&self, path: &str) -> Result<(), CliError> {
        self.need_dim4(path)?;
        if self.model.frame_names().len() == 4 && self.model.frame_names()[2] == "γ" {
            Ok(())
        } else {
            Err(usage(path, "family needs the Kodaira–Thurston frame"))
        }
    }

    pub fn field(&self, doc: &FieldDoc, path: &str) -> Result<VecField, CliError> {
        if doc.components.len() != self.dim() {
            return Err(usage(&format!("{path}.components"), format!("expected {} components", self.dim())));
        }
        let comps = doc
            .components
            .iter()
            .enumerate()
            .map(|(i, t)| self.poly(t, &format!("{path}.components[{i}]")))
            .collect::<Result<_, _>>()?;
        Ok(VecField::new(comps))
    }

    pub fn map(&self, doc: &MapDoc, path: &str) -> Result<AffineMap, CliError> {
        rational_map(doc, self.dim(), path, &|t, p| self.rational(t, p))
    }

    pub fn region(&self, entries: &[RegionEntry], path: &str) -> Result<CoordRegion, CliError> {
        let mut c = vec![CoordConstraint::Free; self.dim()];
        for (k, e) in entries.iter().enumerate() {
            let p = format!("{path}[{k}]");
            let i = self
                .model
                .coord_index(&e.coord)
                .ok_or_else(|| usage(&format!("{p}.coord"), format!("unknown coordinate `{}`", e.coord)))?;
            c[i] = match (&e.fixed, &e.center, &e.radius) {
                (Some(v), None, None) => CoordConstraint::Fixed(self.rational(v, &format!("{p}.fixed"))?),
                (None, center, Some(r)) => CoordConstraint::Band {
                    center: match center {
                        Some(x) => self.rational(x, &format!("{p}.center"))?,
                        None => Rational::zero(),
                    },
                    radius: self.rational(r, &format!("{p}.radius"))?,
                },
                _ => return Err(usage(&p, "give either `fixed` or `radius` (with optional `center`)")),
            };
        }
        CoordRegion::new(c).map_err(|e| usage(path, e))
    }

    pub fn polyhedron(&self, docs: &[ConstraintDoc], path: &str) -> Result<Polyhedron, CliError> {
        let n = self.dim();
        let mut poly = Polyhedron::universe(n);
        for (k, d) in docs.iter().enumerate() {
            let p = format!("{path}[{k}]");
            let expr = self.poly(&d.expr, &format!("{p}.expr"))?;
            let (coeffs, rest) = expr
                .linear_split(|v| v.is_coord())
                .ok_or_else(|| usage(&format!("{p}.expr"), "expression must be linear in the coordinates"))?;
            let mut a = vec![Rational::zero(); n];
            for (v, c) in coeffs {
                let Var::Coord(i) = v else { unreachable!("coordinate split") };
                a[i] = c.as_constant().ok_or_else(|| usage(&format!("{p}.expr"), "coefficients must be rational"))?;
            }
            let shift = rest.as_constant().ok_or_else(|| usage(&format!("{p}.expr"), "constant term must be rational"))?;
            if d.lower.is_none() && d.upper.is_none() {
                return Err(usage(&p, "a constraint needs `lower` or `upper`"));
            }
            if let Some(u) = &d.upper {
                let u = self.rational(u, &format!("{p}.upper"))?;
                poly.add(Constraint::new(a.clone(), u - &shift, d.strict)).map_err(CliError::from)?;
            }
            if let Some(l) = &d.lower {
                let l = self.rational(l, &format!("{p}.lower"))?;
                poly.add(Constraint::new(a.iter().map(|x| -x).collect(), &shift - l, d.strict))
                    .map_err(CliError::from)?;
            }
        }
        Ok(poly)
    }

    pub fn partial(&self, doc: &PartialDoc, path: &str) -> Result<PartialAffineMap, CliError> {
        let rule = self.map(&doc.rule, &format!("{path}.rule"))?;
        let domain = self.polyhedron(&doc.domain, &format!("{path}.domain"))?;
        let preserved = doc
            .preserved
            .iter()
            .enumerate()
            .map(|(k, c)| {
                self.model
                    .coord_index(c)
                    .ok_or_else(|| usage(&format!("{path}.preserved[{k}]"), format!("unknown coordinate `{c}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if preserved.is_empty() {
            return Err(usage(&format!("{path}.preserved"), "at least one preserved coordinate is required"));
        }
        PartialAffineMap::new(rule, domain, preserved).map_err(|e| usage(path, e))
    }

    pub fn loops(&self, doc: Option<&LoopsDoc>, path: &str) -> Result<Vec<LoopSpec>, CliError> {
        match doc {
            None => self.preset_loops(path),
            Some(LoopsDoc::Preset(p)) if p == "preset" => self.preset_loops(path),
            Some(LoopsDoc::Preset(other)) => Err(usage(path, format!("unknown loop set `{other}`"))),
            Some(LoopsDoc::List(list)) => list
                .iter()
                .enumerate()
                .map(|(k, l)| {
                    let p = format!("{path}[{k}]");
                    if l.class.len() != self.dim() {
                        return Err(usage(&format!("{p}.class"), format!("expected {} exponents", self.dim())));
                    }
                    Ok(LoopSpec {
                        label: l.label.clone(),
                        field: self.field(&l.field, &format!("{p}.field"))?,
                        class: l.class.clone(),
                    })
                })
                .collect(),
        }
    }

    fn preset_loops(&self, path: &str) -> Result<Vec<LoopSpec>, CliError> {
        match self.model.name() {
            "kodaira-thurston" => Ok(kt_loops()),
            "torus4" => Ok(torus_loops()),
            other => Err(usage(path, format!("model `{other}` has no preset loops; list them explicitly"))),
        }
    }

    // ---- output ----

    pub fn poly_text(&self, p: &PolyScalar) -> String {
        self.model.render_poly(p)
    }

    pub fn form_json(&self, a: &DiffForm) -> Value {
        let basis = match a.basis() {
            Basis::Coordinate => "coordinate",
            Basis::Frame(_) => "frame",
        };
        let terms: Vec<Value> = a
            .terms()
            .map(|(idx, c)| json!({ "indices": idx, "coeff": self.poly_text(c) }))
            .collect();
        json!({
            "degree": a.degree(),
            "basis": basis,
            "terms": terms,
            "text": self.model.render(a),
        })
    }

    pub fn field_json(&self, x: &VecField) -> Value {
        let comps: Vec<String> = x.components().iter().map(|c| self.poly_text(c)).collect();
        json!({ "components": comps })
    }

    pub fn field_text(&self, x: &VecField) -> String {
        let parts: Vec<String> = x
            .components()
            .iter()
            .zip(self.model.coordinates())
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, name)| {
                let t = self.poly_text(c);
                match t.as_str() {
                    "1" => format!("∂{name}"),
                    "-1" => format!("-∂{name}"),
                    _ if c.num_terms() > 1 => format!("({t})·∂{name}"),
                    _ => format!("{t}·∂{name}"),
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }

    pub fn map_json(&self, g: &AffineMap) -> Value {
        let matrix: Vec<Vec<String>> = g.linear().iter().map(|r| r.iter().map(format_rational).collect()).collect();
        let translation: Vec<String> = g.translation().iter().map(format_rational).collect();
        json!({ "matrix": matrix, "translation": translation, "text": self.map_text(g) })
    }

    pub fn map_text(&self, g: &AffineMap) -> String {
        let coords: Vec<PolyScalar> = (0..self.dim()).map(PolyScalar::coord).collect();
        let image: Vec<String> = (0..self.dim())
            .map(|i| {
                let mut acc = PolyScalar::constant(g.translation()[i].clone());
                for (j, c) in coords.iter().enumerate() {
                    acc += &c.scale(&g.linear()[i][j]);
                }
                self.poly_text(&acc)
            })
            .collect();
        format!("({}) ↦ ({})", self.model.coordinates().join(", "), image.join(", "))
    }

    pub fn polyhedron_json(&self, p: &Polyhedron) -> Value {
        let docs: Vec<Value> = p
            .constraints()
            .iter()
            .map(|c| {
                let mut expr = PolyScalar::zero();
                for (i, a) in c.coeffs.iter().enumerate() {
                    expr += &PolyScalar::coord(i).scale(a);
                }
                json!({ "expr": self.poly_text(&expr), "upper": format_rational(&c.rhs), "strict": c.strict })
            })
            .collect();
        Value::Array(docs)
    }

    pub fn polyhedron_text(&self, p: &Polyhedron) -> String {
        format!("{{{}}}", p.render(self.model.coordinates()).join(", "))
    }

    pub fn point_json(&self, x: &[Rational]) -> Value {
        Value::Array(x.iter().map(|r| Value::String(format_rational(r))).collect())
    }

    pub fn point_text(&self, x: &[Rational]) -> String {
        let parts: Vec<String> = x.iter().map(format_rational).collect();
        format!("({})", parts.join(", "))
    }
}
