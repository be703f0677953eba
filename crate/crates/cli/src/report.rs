use serde::Serialize;
use serde_json::{json, Value};

use nilflux_core::flux::{ISOTOPY_CONVENTION, PD_CONVENTION};
use nilflux_core::manifold::ManifoldModel;

/// One task's output: the echoed input, the computed result, the data needed
/// to re-check it, and the sign conventions in force.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub task: String,
    pub model: String,
    pub input: Value,
    pub result: Value,
    pub certificates: Value,
    pub conventions: Value,
    #[serde(skip)]
    pub lines: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} on {}\n", self.task, self.model);
        for l in &self.lines {
            out.push_str("  ");
            out.push_str(l);
            out.push('\n');
        }
        out
    }
}

pub fn conventions(model: &ManifoldModel, bound: i64) -> Value {
    let names = model.coordinate_form_names();
    json!({
        "isotopy": ISOTOPY_CONVENTION,
        "poincare_dual": PD_CONVENTION,
        "orientation": format!("Ω₀ = {}", names.join("∧")),
        "deck_word": "exponent vector e acts as g_n^{e_n} ∘ … ∘ g_1^{e_1}",
        "frame": model.frame_names(),
        "search_bound": bound,
    })
}
