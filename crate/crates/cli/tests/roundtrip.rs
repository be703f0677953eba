//! Machine-readable report sections re-parse into the values they describe.

use nilflux_cli::schema::{FieldDoc, FormDoc, JobConfig};
use nilflux_cli::{run_job, Task};
use serde_json::{json, Value};

fn job(task: Task, config: Value) -> Value {
    let config: JobConfig = serde_json::from_value(config).unwrap();
    serde_json::to_value(run_job(task, "kodaira-thurston", &config, 8).unwrap()).unwrap()
}

fn without_text(v: &Value) -> Value {
    let mut v = v.clone();
    v.as_object_mut().unwrap().remove("text");
    v
}

#[test]
fn forms_reparse_to_themselves() {
    let omega = json!({ "family": "abef", "params": ["a", "b", "e", "f"] });
    let r = job(Task::Flux, json!({ "omega": omega, "field": { "components": ["b*c", "-alpha", "beta - a*c*s", "-a*c"] } }));
    let flux = &r["result"]["flux"];
    let doc: FormDoc = serde_json::from_value(without_text(flux)).unwrap();
    let again = job(Task::ExteriorEval, json!({ "operation": "to-frame", "form": doc }));
    assert_eq!(&again["result"]["form"], flux);
}

#[test]
fn fields_reparse_to_themselves() {
    let r = job(
        Task::ExteriorEval,
        json!({ "operation": "symplectic-dual", "omega": { "family": "abef", "params": ["1", "2", "3", "4"] },
                "form": { "terms": [{ "indices": ["dt"], "coeff": "1" }] } }),
    );
    let field = &r["result"]["field"];
    let doc: FieldDoc = serde_json::from_value(field.clone()).unwrap();
    let check = job(
        Task::ExteriorEval,
        json!({ "operation": "interior", "field": doc,
                "form": { "family": "abef", "params": ["1", "2", "3", "4"] } }),
    );
    assert_eq!(check["result"]["form"]["text"], "dt");
}

#[test]
fn maps_reparse_to_themselves() {
    let r = job(
        Task::ExteriorEval,
        json!({ "operation": "exp", "field": { "components": ["2", "-1", "1 - s", "-1"] }, "time": "1/3" }),
    );
    let map = &r["result"]["map"];
    let again = job(
        Task::ExteriorEval,
        json!({ "operation": "pullback", "map": without_text(map), "form": { "family": "standard" } }),
    );
    let first = job(
        Task::ExteriorEval,
        json!({ "operation": "pullback", "map": { "matrix": map["matrix"], "translation": map["translation"] },
                "form": { "family": "standard" } }),
    );
    assert_eq!(again, first);
}

#[test]
fn polyhedra_reparse_to_themselves() {
    let cfg = |v0: Value| {
        json!({
            "map": { "family": "identity" },
            "partial": { "rule": { "translation": ["0", "0", "0", "-1"] },
                         "domain": [{ "expr": "s", "lower": "-1", "upper": "1" }],
                         "preserved": ["s", "x"] },
            "v0": v0
        })
    };
    let r = job(Task::DisplaceCommutator, cfg(json!([
        { "expr": "s", "lower": "-1/2", "upper": "1/2" },
        { "expr": "s + x", "lower": "-1/2", "upper": "1/2" },
        { "expr": "y", "lower": "0", "upper": "1/2", "strict": false }
    ])));
    let pre = r["certificates"]["preimage_v0"].clone();
    let again = job(Task::DisplaceCommutator, cfg(pre.clone()));
    let twice = job(Task::DisplaceCommutator, cfg(again["input"]["v0"].clone()));
    assert_eq!(again["input"]["v0"], pre);
    assert_eq!(again["result"], twice["result"]);
}
