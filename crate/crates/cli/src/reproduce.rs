//! Named reproduction cases: each runs a fixed list of jobs, evaluates a few
//! checks on the reports, and compares the whole bundle against a stored
//! artifact byte for byte.

use serde_json::{json, Value};

use crate::error::CliError;
use crate::schema::JobConfig;
use crate::tasks::Task;

pub const CASES: &[&str] = &[
    "theorem-flux",
    "lemma-cohomology",
    "lemma-phiabc",
    "lemma-phiabclinear",
    "lemma-fluxlinear",
    "torus-flux",
    "case-1",
    "case-2",
    "case-3a",
    "case-3b",
    "linear-case-1",
    "linear-case-2",
    "linear-case-3",
];

/// Search bound used by every reproduction job.
pub const BOUND: i64 = 8;

pub fn expected(id: &str) -> Option<&'static str> {
    Some(match id {
        "theorem-flux" => include_str!("../expected/theorem-flux.json"),
        "lemma-cohomology" => include_str!("../expected/lemma-cohomology.json"),
        "lemma-phiabc" => include_str!("../expected/lemma-phiabc.json"),
        "lemma-phiabclinear" => include_str!("../expected/lemma-phiabclinear.json"),
        "lemma-fluxlinear" => include_str!("../expected/lemma-fluxlinear.json"),
        "torus-flux" => include_str!("../expected/torus-flux.json"),
        "case-1" => include_str!("../expected/case-1.json"),
        "case-2" => include_str!("../expected/case-2.json"),
        "case-3a" => include_str!("../expected/case-3a.json"),
        "case-3b" => include_str!("../expected/case-3b.json"),
        "linear-case-1" => include_str!("../expected/linear-case-1.json"),
        "linear-case-2" => include_str!("../expected/linear-case-2.json"),
        "linear-case-3" => include_str!("../expected/linear-case-3.json"),
        _ => return None,
    })
}

const KT: &str = "kodaira-thurston";

type Check = (&'static str, fn(&[Value]) -> bool);

fn at<'a>(reports: &'a [Value], k: usize, pointer: &str) -> &'a Value {
    reports.get(k).and_then(|r| r.pointer(pointer)).unwrap_or(&Value::Null)
}

fn text(reports: &[Value], k: usize, pointer: &str) -> String {
    at(reports, k, pointer).as_str().unwrap_or_default().to_string()
}

fn texts(reports: &[Value], k: usize, pointer: &str, field: &str) -> Vec<String> {
    at(reports, k, pointer)
        .as_array()
        .map(|a| a.iter().map(|v| v.pointer(field).and_then(Value::as_str).unwrap_or_default().to_string()).collect())
        .unwrap_or_default()
}

fn standard() -> Value {
    json!({ "family": "standard" })
}

fn abef(p: [&str; 4]) -> Value {
    json!({ "family": "abef", "params": p })
}

fn one_form(name: &str, coeff: &str) -> Value {
    json!({ "terms": [{ "indices": [name], "coeff": coeff }] })
}

fn fixing(a: &str, b: &str) -> Value {
    json!([{ "coord": a, "fixed": "0" }, { "coord": b, "fixed": "0" }])
}

fn shear_commutator(tau: &str) -> Value {
    json!({
        "map": {
            "matrix": [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "-1"], ["0", "0", "0", "1"]],
            "translation": ["0", "0", "1/3", "0"]
        },
        "partial": {
            "rule": { "translation": ["0", "0", "0", format!("-{tau}")] },
            "domain": [
                { "expr": "s", "lower": "-1/8", "upper": "1/8" },
                { "expr": "x", "lower": "-1/8", "upper": "1/8" }
            ],
            "preserved": ["s", "x"]
        },
        "v0": [
            { "expr": "s", "lower": "-1/8", "upper": "1/8" },
            { "expr": "x", "lower": "-1/8", "upper": "1/8" },
            { "expr": "y", "lower": "0", "upper": format!("{tau}/2") }
        ]
    })
}

fn case(id: &str) -> Option<(Vec<(Task, &'static str, Value)>, Vec<Check>)> {
    Some(match id {
        "theorem-flux" => (
            vec![
                (
                    Task::FluxSubgroup,
                    KT,
                    json!({
                        "omega": standard(),
                        "loops": "preset",
                        "members": [one_form("ds", "1"), one_form("dy", "1"), one_form("ds", "1/2"), one_form("dt", "1")]
                    }),
                ),
                (Task::ExteriorEval, KT, json!({ "operation": "poincare-dual", "class": ["0", "1", "0"] })),
                (
                    Task::ExteriorEval,
                    KT,
                    json!({
                        "operation": "primitive",
                        "form": { "terms": [{ "indices": ["dy", "ds", "dt"], "coeff": "1" }] }
                    }),
                ),
            ],
            vec![
                ("verified generators are ds and dy", |r| texts(r, 0, "/result/generators", "/flux/text") == ["ds", "dy"]),
                ("the kernel of wedge with omega is spanned by dy", |r| {
                    texts(r, 0, "/result/diagram/kernel", "/text") == ["dy"]
                }),
                ("ds and dy are lattice members, ds/2 and dt are not", |r| {
                    let m = at(r, 0, "/result/members");
                    m[0]["coefficients"] == json!(["1", "0"])
                        && m[1]["coefficients"] == json!(["0", "1"])
                        && m[2]["coefficients"].is_null()
                        && m[3]["coefficients"].is_null()
                        && m[3]["within_constraint"] == json!(false)
                }),
                ("PD of the t loop is -γ∧dy∧ds", |r| text(r, 1, "/result/form/text") == "-ds∧γ∧dy"),
                ("dy∧ds∧dt is exact with a checked primitive", |r| {
                    at(r, 2, "/result/exact") == &json!(true)
                        && at(r, 2, "/certificates/d_primitive_equals_form") == &json!(true)
                }),
            ],
        ),
        "lemma-cohomology" => (
            vec![(Task::Cohomology, KT, json!({}))],
            vec![
                ("betti numbers are 1, 3, 4, 3, 1", |r| {
                    let b: Vec<Value> = at(r, 0, "/result/groups").as_array().into_iter().flatten().map(|g| g["betti"].clone()).collect();
                    b == [json!(1), json!(3), json!(4), json!(3), json!(1)]
                }),
                ("representatives are closed", |r| at(r, 0, "/certificates/representatives_closed") == &json!(true)),
                ("H¹ is spanned by ds, dt, dy", |r| {
                    texts(r, 0, "/result/groups/1/representatives", "/text") == ["ds", "dt", "dy"]
                }),
            ],
        ),
        "lemma-phiabc" => (
            vec![
                (
                    Task::Flux,
                    KT,
                    json!({ "omega": standard(), "map": { "family": "phi-abc", "params": ["1/2", "1/3", "1/5"] } }),
                ),
                (
                    Task::Flux,
                    KT,
                    json!({ "omega": standard(), "field": { "components": ["c", "-alpha", "beta", "0"] } }),
                ),
                (Task::CheckDescent, KT, json!({ "map": { "family": "phi-abc", "params": ["1/2", "1/3", "1/5"] } })),
                (
                    Task::ExteriorEval,
                    KT,
                    json!({
                        "operation": "pullback",
                        "form": standard(),
                        "map": { "family": "phi-abc", "params": ["1/2", "1/3", "1/5"] }
                    }),
                ),
            ],
            vec![
                ("flux of the map is ds/2 + dy/3 + dt/5", |r| text(r, 0, "/result/flux/text") == "1/2·ds + 1/5·dt + 1/3·dy"),
                ("symbolic flux is alpha·ds + c·dt + beta·dy", |r| text(r, 1, "/result/flux/text") == "alpha·ds + c·dt + beta·dy"),
                ("the map descends", |r| at(r, 2, "/result/descends") == &json!("yes")),
                ("the map preserves omega", |r| text(r, 3, "/result/form/text") == "ds∧dt + dx∧dy"),
            ],
        ),
        "lemma-phiabclinear" => {
            let omega = abef(["1", "2", "3", "4"]);
            let field = json!({ "components": ["b*c", "-alpha", "beta - a*c*s", "-a*c"] });
            let params = json!({ "a": "1", "b": "2", "alpha": "1/2", "beta": "1/3", "c": "1/5" });
            let params0 = json!({ "a": "0", "b": "2", "alpha": "1/2", "beta": "1/3", "c": "1/5" });
            (
                vec![
                    (Task::Flux, KT, json!({ "parameters": params, "omega": omega, "field": field })),
                    (Task::ExteriorEval, KT, json!({ "parameters": params, "operation": "exp", "field": field, "time": "1" })),
                    (
                        Task::Flux,
                        KT,
                        json!({ "omega": omega, "map": { "family": "phi-abc-linear", "params": ["1", "2", "1/2", "1/3", "1/5"] } }),
                    ),
                    (
                        Task::Flux,
                        KT,
                        json!({ "parameters": params0, "omega": abef(["0", "2", "3", "4"]), "field": field }),
                    ),
                    (
                        Task::Flux,
                        KT,
                        json!({
                            "omega": abef(["0", "2", "3", "4"]),
                            "map": { "family": "phi-abc-linear", "params": ["0", "2", "1/2", "1/3", "1/5"] }
                        }),
                    ),
                    (
                        Task::Flux,
                        KT,
                        json!({ "omega": abef(["a", "b", "e", "f"]), "field": field }),
                    ),
                ],
                vec![
                    ("flux of the stated field is the stated class", |r| {
                        text(r, 0, "/result/flux/text") == "11/6·ds + 2/5·dt + 8/3·dy"
                    }),
                    ("the time-one flow differs from the stated map by -abc²/2 in x", |r| {
                        text(r, 1, "/result/map/translation/2") == "22/75"
                    }),
                    ("flux of the stated map picks up (abc²/2)(a·ds + b·dy)", |r| {
                        text(r, 2, "/result/flux/text") == "281/150·ds + 2/5·dt + 206/75·dy"
                    }),
                    ("with a = 0 field and map fluxes agree", |r| {
                        let f = text(r, 3, "/result/flux/text");
                        f == text(r, 4, "/result/flux/text") && f == "3/2·ds + 6/5·dt + 8/3·dy"
                    }),
                    ("the symbolic field flux is invariant", |r| at(r, 5, "/result/invariant") == &json!(true)),
                ],
            )
        }
        "lemma-fluxlinear" => (
            vec![
                (Task::FluxSubgroup, KT, json!({ "omega": abef(["1", "2", "3", "4"]), "loops": "preset" })),
                (
                    Task::Flux,
                    KT,
                    json!({ "omega": abef(["a", "b", "e", "f"]), "field": { "components": ["0", "-1", "0", "0"] } }),
                ),
                (
                    Task::Flux,
                    KT,
                    json!({ "omega": abef(["a", "b", "e", "f"]), "field": { "components": ["0", "0", "1", "0"] } }),
                ),
            ],
            vec![
                ("verified generators are e·ds + f·dy and a·ds + b·dy at (1,2,3,4)", |r| {
                    texts(r, 0, "/result/generators", "/flux/text") == ["3·ds + 4·dy", "ds + 2·dy"]
                }),
                ("symbolic flux of the t loop is e·ds + f·dy", |r| text(r, 1, "/result/flux/text") == "e·ds + f·dy"),
                ("symbolic flux of the x loop is a·ds + b·dy", |r| text(r, 2, "/result/flux/text") == "a·ds + b·dy"),
            ],
        ),
        "torus-flux" => {
            let omega = json!({
                "family": "torus",
                "matrix": [["0", "1", "2", "3"], ["0", "0", "4", "5"], ["0", "0", "0", "6"], ["0", "0", "0", "0"]]
            });
            (
                vec![
                    (Task::FluxSubgroup, "torus4", json!({ "omega": omega, "loops": "preset" })),
                    (Task::CheckSymplectic, "torus4", json!({ "omega": omega })),
                ],
                vec![
                    ("verified generators are the rows of the coefficient table", |r| {
                        texts(r, 0, "/result/generators", "/flux/text")
                            == [
                                "dx2 + 2·dx3 + 3·dx4",
                                "-dx1 + 4·dx3 + 5·dx4",
                                "-2·dx1 - 4·dx2 + 6·dx4",
                                "-3·dx1 - 5·dx2 - 6·dx3",
                            ]
                    }),
                    ("wedge with omega is injective", |r| at(r, 0, "/result/wedge_injective") == &json!(true)),
                    ("volume is the Pfaffian 1·6 - 2·5 + 3·4", |r| at(r, 1, "/result/volume") == &json!("8")),
                ],
            )
        }
        "case-1" => (
            vec![
                (Task::CheckLagrangian, KT, json!({ "omega": standard(), "region": fixing("t", "y") })),
                (
                    Task::DisplaceQuotient,
                    KT,
                    json!({ "map": { "family": "phi-abc", "params": ["1/2", "0", "0"] }, "region": fixing("t", "y") }),
                ),
                (
                    Task::DisplaceQuotient,
                    KT,
                    json!({ "map": { "family": "identity" }, "region": fixing("t", "y") }),
                ),
            ],
            vec![
                ("L = {t=0, y=0} is Lagrangian", |r| at(r, 0, "/result/lagrangian") == &json!(true)),
                ("the t shift by 1/2 disjoins L", |r| at(r, 1, "/result/outcome") == &json!("disjoint")),
                ("the identity does not", |r| at(r, 2, "/result/outcome") == &json!("intersects")),
            ],
        ),
        "case-2" => (
            vec![
                (Task::CheckLagrangian, KT, json!({ "omega": standard(), "region": fixing("s", "x") })),
                (
                    Task::DisplaceQuotient,
                    KT,
                    json!({ "map": { "family": "phi-abc", "params": ["0", "1/2", "0"] }, "region": fixing("s", "x") }),
                ),
            ],
            vec![
                ("L = {s=0, x=0} is Lagrangian", |r| at(r, 0, "/result/lagrangian") == &json!(true)),
                ("the x shift by 1/2 disjoins L", |r| at(r, 1, "/result/outcome") == &json!("disjoint")),
            ],
        ),
        "case-3a" => (
            vec![(
                Task::DisplaceQuotient,
                KT,
                json!({ "map": { "family": "phi-abc", "params": ["0", "0", "1/2"] }, "region": fixing("s", "x") }),
            )],
            vec![("the s shift by 1/2 disjoins {s=0, x=0}", |r| at(r, 0, "/result/outcome") == &json!("disjoint"))],
        ),
        "case-3b" => (
            vec![
                (Task::DisplaceCommutator, KT, shear_commutator("1")),
                (Task::DisplaceCommutator, KT, shear_commutator("1/4")),
            ],
            vec![
                ("the commutator displaces V0 at τ = 1", |r| at(r, 0, "/result/outcome") == &json!("disjoint")),
                ("f⁻¹(V0) is τ < y < 3τ/2", |r| {
                    let y = at(r, 0, "/result/preimage_box/3");
                    y["lower"] == json!({ "value": "1", "strict": true }) && y["upper"] == json!({ "value": "3/2", "strict": true })
                }),
                ("below the threshold 2ε/|c| the check is inconclusive", |r| {
                    at(r, 1, "/result/outcome") == &json!("inconclusive")
                }),
            ],
        ),
        "linear-case-1" => (
            vec![
                (
                    Task::ExteriorEval,
                    KT,
                    json!({ "operation": "symplectic-dual", "omega": abef(["1", "2", "3", "4"]), "form": one_form("dt", "1") }),
                ),
                (Task::CheckDescent, KT, json!({ "field": { "components": ["1", "0", "-1/2*s", "-1/2"] } })),
                (
                    Task::DisplaceQuotient,
                    KT,
                    json!({
                        "map": { "family": "phi-abc-linear", "params": ["1", "2", "1/2", "1/3", "1/5"] },
                        "region": [{ "coord": "t", "radius": "1/8" }]
                    }),
                ),
            ],
            vec![
                ("ι(X)ω = dt for X = (b∂s - a∂y - as∂x)/(be - af)", |r| {
                    at(r, 0, "/result/field/components") == &json!(["1", "0", "-1/2*s", "-1/2"])
                }),
                ("X descends", |r| at(r, 1, "/result/descends") == &json!("yes")),
                ("the map disjoins the band |t| < 1/8", |r| at(r, 2, "/result/outcome") == &json!("disjoint")),
            ],
        ),
        "linear-case-2" => (
            vec![
                (Task::CheckLagrangian, KT, json!({ "omega": abef(["1", "2", "3", "4"]), "region": fixing("s", "y") })),
                (Task::CheckDescent, KT, json!({ "field": { "components": ["0", "0", "0", "-1"] } })),
                (Task::DisplaceCommutator, KT, shear_commutator("1")),
            ],
            vec![
                ("L = {s=0, y=0} is Lagrangian", |r| at(r, 0, "/result/lagrangian") == &json!(true)),
                ("the generator of the cover isotopy does not descend", |r| at(r, 1, "/result/descends") == &json!("no")),
                ("on the cover the commutator displaces V0 at τ = 1", |r| {
                    at(r, 2, "/result/outcome") == &json!("disjoint")
                }),
            ],
        ),
        "linear-case-3" => (
            vec![
                (Task::CheckLagrangian, KT, json!({ "omega": abef(["1", "2", "3", "0"]), "region": fixing("s", "x") })),
                (Task::CheckLagrangian, KT, json!({ "omega": abef(["1", "2", "3", "1"]), "region": fixing("s", "x") })),
                (
                    Task::DisplaceQuotient,
                    KT,
                    json!({
                        "map": { "family": "phi-abc-linear", "params": ["1", "2", "0", "1/2", "0"] },
                        "region": fixing("s", "x")
                    }),
                ),
            ],
            vec![
                ("L = {s=0, x=0} is Lagrangian when f = 0", |r| at(r, 0, "/result/lagrangian") == &json!(true)),
                ("and not when f = 1", |r| at(r, 1, "/result/lagrangian") == &json!(false)),
                ("the x shift by 1/2 disjoins L", |r| at(r, 2, "/result/outcome") == &json!("disjoint")),
            ],
        ),
        _ => return None,
    })
}

pub fn unknown_case(id: &str) -> CliError {
    CliError::usage(format!("unknown case `{id}`; known cases: {}", CASES.join(", ")))
}

/// Runs every job of a case and returns the bundle as pretty JSON with a
/// trailing newline, plus the per-check results.
pub fn run(id: &str) -> Result<(String, Vec<(&'static str, bool)>), CliError> {
    let (jobs, checks) = case(id).ok_or_else(|| unknown_case(id))?;
    let mut reports = Vec::new();
    for (task, model, config) in jobs {
        let config: JobConfig = serde_json::from_value(config)
            .map_err(|e| CliError::internal(format!("case `{id}` has a malformed job: {e}")))?;
        let report = crate::run_job(task, model, &config, BOUND)?;
        reports.push(serde_json::to_value(&report).expect("report serializes"));
    }
    let results: Vec<(&'static str, bool)> = checks.iter().map(|(name, f)| (*name, f(&reports))).collect();
    let bundle = json!({
        "case": id,
        "reports": reports,
        "checks": results.iter().map(|(n, ok)| json!({ "name": n, "pass": ok })).collect::<Vec<_>>(),
    });
    let mut text = serde_json::to_string_pretty(&bundle).expect("bundle serializes");
    text.push('\n');
    Ok((text, results))
}

#[derive(Debug)]
pub struct Verdict {
    pub checks: Vec<(&'static str, bool)>,
    pub matches_expected: bool,
    pub bundle: String,
}

impl Verdict {
    pub fn pass(&self) -> bool {
        self.matches_expected && self.checks.iter().all(|(_, ok)| *ok)
    }
}

pub fn reproduce(id: &str) -> Result<Verdict, CliError> {
    let want = expected(id).ok_or_else(|| unknown_case(id))?;
    let (bundle, checks) = run(id)?;
    Ok(Verdict { checks, matches_expected: bundle == want, bundle })
}
