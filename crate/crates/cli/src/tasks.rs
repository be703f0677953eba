use nilflux_core::displacement::{apply_partial, commutator_displacement, quotient_disjoint, Certificate, Direction, DisplacementVerdict, Outcome};
use nilflux_core::exterior::{exp_affine_field, Basis, DiffForm};
use nilflux_core::flux::{flux_field, flux_lattice, flux_of_map, in_flux_lattice, poincare_dual, symplectic_dual};
use nilflux_core::manifold::{ce_cohomology, field_descends, is_exact, is_lagrangian, is_symplectic, map_descends, FieldDescent, MapDescent};
use nilflux_core::rational::format_rational;
use serde_json::{json, Value};

use crate::context::Context;
use crate::error::CliError;
use crate::report::{conventions, Report};
use crate::schema::JobConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Task {
    Cohomology,
    FluxSubgroup,
    Flux,
    CheckSymplectic,
    CheckLagrangian,
    CheckDescent,
    DisplaceQuotient,
    DisplaceCommutator,
    ExteriorEval,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Cohomology => "cohomology",
            Task::FluxSubgroup => "flux-subgroup",
            Task::Flux => "flux",
            Task::CheckSymplectic => "check-symplectic",
            Task::CheckLagrangian => "check-lagrangian",
            Task::CheckDescent => "check-descent",
            Task::DisplaceQuotient => "displace-quotient",
            Task::DisplaceCommutator => "displace-commutator",
            Task::ExteriorEval => "exterior-eval",
        }
    }
}

struct Out {
    result: Value,
    certificates: Value,
    lines: Vec<String>,
}

fn need<'a, T>(value: &'a Option<T>, field: &str) -> Result<&'a T, CliError> {
    value.as_ref().ok_or_else(|| CliError::usage(format!("config.{field}: required for this task")))
}

pub fn run_task(task: Task, ctx: &Context, config: &JobConfig, bound: i64) -> Result<Report, CliError> {
    let out = match task {
        Task::Cohomology => cohomology(ctx, config)?,
        Task::FluxSubgroup => flux_subgroup(ctx, config)?,
        Task::Flux => flux(ctx, config, bound)?,
        Task::CheckSymplectic => check_symplectic(ctx, config)?,
        Task::CheckLagrangian => check_lagrangian(ctx, config)?,
        Task::CheckDescent => check_descent(ctx, config, bound)?,
        Task::DisplaceQuotient => displace_quotient(ctx, config, bound)?,
        Task::DisplaceCommutator => displace_commutator(ctx, config)?,
        Task::ExteriorEval => exterior_eval(ctx, config)?,
    };
    Ok(Report {
        task: task.name().into(),
        model: ctx.model.name().into(),
        input: serde_json::to_value(config).expect("config serializes"),
        result: out.result,
        certificates: out.certificates,
        conventions: conventions(&ctx.model, bound),
        lines: out.lines,
    })
}

fn cohomology(ctx: &Context, config: &JobConfig) -> Result<Out, CliError> {
    let n = ctx.dim();
    let degrees: Vec<usize> = match config.degree {
        Some(k) if k > n => return Err(CliError::usage(format!("config.degree: {k} exceeds dimension {n}"))),
        Some(k) => vec![k],
        None => (0..=n).collect(),
    };
    let mut groups = Vec::new();
    let mut closed = Vec::new();
    let mut lines = Vec::new();
    for k in degrees {
        let h = ce_cohomology(&ctx.model, k)?;
        let reps: Vec<Value> = h.representatives.iter().map(|r| ctx.form_json(r)).collect();
        let texts: Vec<String> = h.representatives.iter().map(|r| ctx.model.render(r)).collect();
        for r in &h.representatives {
            closed.push(ctx.model.coframe().d(r)?.is_zero());
        }
        lines.push(format!("H^{k}: betti {}  basis [{}]", h.betti, texts.join(", ")));
        groups.push(json!({ "degree": k, "betti": h.betti, "representatives": reps }));
    }
    Ok(Out {
        result: json!({ "groups": groups }),
        certificates: json!({ "representatives_closed": closed.iter().all(|c| *c) }),
        lines,
    })
}

fn bigints(v: &[num_bigint::BigInt]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

fn flux_subgroup(ctx: &Context, config: &JobConfig) -> Result<Out, CliError> {
    let omega = ctx.form(need(&config.omega, "omega")?, "config.omega")?;
    let loops = ctx.loops(config.loops.as_ref(), "config.loops")?;
    let fl = flux_lattice(&ctx.model, &omega, &loops)?;
    let render = |forms: &[DiffForm]| -> Vec<String> { forms.iter().map(|f| ctx.model.render(f)).collect() };
    let mut lines = vec![
        format!("H₁ basis: {}", fl.h1_labels.join(", ")),
        format!("volume: {}", format_rational(&fl.volume)),
        format!("verified generators: {{{}}}", render(&fl.generators()).join(", ")),
        format!("diagram particular solutions: [{}]", render(&fl.particular).join(", ")),
        format!("kernel of ∧[ω] on H¹: [{}]", render(&fl.kernel).join(", ")),
    ];
    let mut members = Vec::new();
    for (k, m) in config.members.iter().flatten().enumerate() {
        let v = ctx.form(m, &format!("config.members[{k}]"))?;
        let mem = in_flux_lattice(&v, &fl)?;
        let coeffs = mem.coefficients.as_ref().map(|c| bigints(c));
        lines.push(format!(
            "member {}: {} (diagram constraint {})",
            ctx.model.render(&v),
            match &mem.coefficients {
                Some(c) => format!("in verified lattice with coefficients {}", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")),
                None => "not in verified lattice".into(),
            },
            if mem.within_constraint { "satisfied" } else { "violated" }
        ));
        members.push(json!({
            "form": ctx.form_json(&v),
            "coefficients": coeffs,
            "within_constraint": mem.within_constraint,
        }));
    }
    let generators: Vec<Value> = fl
        .verified
        .iter()
        .map(|v| json!({ "loop": v.label, "flux": ctx.form_json(&v.flux) }))
        .collect();
    let loops_cert: Vec<Value> = fl
        .verified
        .iter()
        .map(|v| json!({ "loop": v.label, "h1_class": bigints(&v.h1_class), "closure_checked": v.closure_checked }))
        .collect();
    let jsons = |forms: &[DiffForm]| -> Vec<Value> { forms.iter().map(|f| ctx.form_json(f)).collect() };
    Ok(Out {
        result: json!({
            "h1_basis": fl.h1_labels,
            "volume": format_rational(&fl.volume),
            "generators": generators,
            "diagram": {
                "center_image": fl.center_image.iter().map(|r| bigints(r)).collect::<Vec<_>>(),
                "particular": jsons(&fl.particular),
                "kernel": jsons(&fl.kernel),
            },
            "wedge_injective": fl.wedge_injective(),
            "members": members,
        }),
        certificates: json!({
            "loops": loops_cert,
            "targets": jsons(&fl.targets),
            "omega": ctx.form_json(fl.omega()),
        }),
        lines,
    })
}

fn flux(ctx: &Context, config: &JobConfig, bound: i64) -> Result<Out, CliError> {
    let omega = ctx.form(need(&config.omega, "omega")?, "config.omega")?;
    match (&config.field, &config.map) {
        (Some(f), None) => {
            let x = ctx.field(f, "config.field")?;
            let v = flux_field(&x, &omega, &ctx.model)?;
            Ok(Out {
                result: json!({ "flux": ctx.form_json(&v.form), "invariant": v.invariant }),
                certificates: json!({ "field": ctx.field_json(&x) }),
                lines: vec![
                    format!("X = {}", ctx.field_text(&x)),
                    format!("flux = {}{}", ctx.model.render(&v.form), if v.invariant { "" } else { " (not invariant)" }),
                ],
            })
        }
        (None, Some(m)) => {
            let phi = ctx.map(m, "config.map")?;
            let f = flux_of_map(&phi, &omega, &ctx.model, bound)?;
            Ok(Out {
                result: json!({
                    "flux": ctx.form_json(&f.value.form),
                    "invariant": f.value.invariant,
                    "isotopy": f.isotopy,
                }),
                certificates: json!({ "map": ctx.map_json(&phi), "generating_field": ctx.field_json(&f.generating_field) }),
                lines: vec![
                    format!("φ: {}", ctx.map_text(&phi)),
                    format!("X_u = {}", ctx.field_text(&f.generating_field)),
                    format!("flux = {}", ctx.model.render(&f.value.form)),
                ],
            })
        }
        _ => Err(CliError::usage("config: give exactly one of `field` and `map`")),
    }
}

fn check_symplectic(ctx: &Context, config: &JobConfig) -> Result<Out, CliError> {
    let omega = ctx.form(need(&config.omega, "omega")?, "config.omega")?;
    let r = is_symplectic(&omega, &ctx.model)?;
    let vol = ctx.poly_text(&r.volume);
    Ok(Out {
        result: json!({ "closed": r.closed, "nondegenerate": r.nondegenerate, "volume": vol }),
        certificates: json!({ "omega": ctx.form_json(&omega) }),
        lines: vec![
            format!("ω = {}", ctx.model.render(&omega)),
            format!("closed: {}  nondegenerate: {}  volume: {vol}", r.closed, r.nondegenerate),
        ],
    })
}

fn check_lagrangian(ctx: &Context, config: &JobConfig) -> Result<Out, CliError> {
    let omega = ctx.form(need(&config.omega, "omega")?, "config.omega")?;
    let region = ctx.region(need(&config.region, "region")?, "config.region")?;
    let lag = is_lagrangian(&region, &omega, &ctx.model)?;
    Ok(Out {
        result: json!({ "lagrangian": lag }),
        certificates: json!({ "omega": ctx.form_json(&omega) }),
        lines: vec![format!("Lagrangian: {lag}")],
    })
}

fn check_descent(ctx: &Context, config: &JobConfig, bound: i64) -> Result<Out, CliError> {
    let labels = &ctx.model.pi1().labels;
    match (&config.map, &config.field) {
        (Some(m), None) => {
            let phi = ctx.map(m, "config.map")?;
            Ok(match map_descends(&phi, &ctx.model, bound)? {
                MapDescent::Yes(ws) => {
                    let words: Vec<Value> = ws
                        .iter()
                        .map(|w| json!({ "generator": labels[w.generator], "word": w.word }))
                        .collect();
                    let lines = ws
                        .iter()
                        .map(|w| format!("φ∘g_{}∘φ⁻¹ = deck word {:?}", labels[w.generator], w.word))
                        .collect();
                    Out { result: json!({ "descends": "yes" }), certificates: json!({ "witnesses": words }), lines }
                }
                MapDescent::No { generator, residual, reason } => Out {
                    result: json!({ "descends": "no" }),
                    certificates: json!({ "generator": labels[generator], "conjugate": ctx.map_json(&residual), "reason": reason }),
                    lines: vec![format!("does not descend: generator {} ({reason})", labels[generator])],
                },
                MapDescent::Inconclusive { generator, residual, bound } => Out {
                    result: json!({ "descends": "inconclusive" }),
                    certificates: json!({ "generator": labels[generator], "conjugate": ctx.map_json(&residual), "bound": bound }),
                    lines: vec![format!("inconclusive: no deck word for generator {} within |e| <= {bound}", labels[generator])],
                },
            })
        }
        (None, Some(f)) => {
            let x = ctx.field(f, "config.field")?;
            Ok(match field_descends(&x, &ctx.model)? {
                FieldDescent::Yes => Out {
                    result: json!({ "descends": "yes" }),
                    certificates: json!({}),
                    lines: vec![format!("X = {} descends", ctx.field_text(&x))],
                },
                FieldDescent::No { generator, pushforward } => Out {
                    result: json!({ "descends": "no" }),
                    certificates: json!({ "generator": labels[generator], "pushforward": ctx.field_json(&pushforward) }),
                    lines: vec![format!(
                        "X = {} does not descend: pushed forward by generator {} it becomes {}",
                        ctx.field_text(&x),
                        labels[generator],
                        ctx.field_text(&pushforward)
                    )],
                },
            })
        }
        _ => Err(CliError::usage("config: give exactly one of `map` and `field`")),
    }
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Disjoint => "disjoint",
        Outcome::Intersects => "intersects",
        Outcome::Inconclusive => "inconclusive",
    }
}

fn verdict(ctx: &Context, v: &DisplacementVerdict) -> (Value, Vec<String>) {
    let coords = ctx.model.coordinates();
    let mut lines = vec![format!("verdict: {}", outcome_name(v.outcome))];
    let cert = match &v.certificate {
        Certificate::Separation { coordinates, first, second } => {
            let names: Vec<&str> = coordinates.iter().map(|&i| coords[i].as_str()).collect();
            lines.push(format!("separated on ({}):", names.join(", ")));
            lines.push(format!("  {}", ctx.polyhedron_text(first)));
            lines.push(format!("  {}", ctx.polyhedron_text(second)));
            json!({
                "kind": "separation",
                "coordinates": names,
                "first": ctx.polyhedron_json(first),
                "second": ctx.polyhedron_json(second),
            })
        }
        Certificate::Witness { point } => {
            lines.push(format!("witness {}", ctx.point_text(point)));
            json!({ "kind": "witness", "point": ctx.point_json(point) })
        }
        Certificate::QuotientWitness { p, q, word } => {
            let w: Vec<String> = word.iter().map(|x| x.to_string()).collect();
            lines.push(format!("φ(p) = g(q) with p = {}, q = {}, deck word [{}]", ctx.point_text(p), ctx.point_text(q), w.join(", ")));
            json!({ "kind": "quotient-witness", "p": ctx.point_json(p), "q": ctx.point_json(q), "word": w })
        }
        Certificate::Obstruction { reason } => {
            lines.push(format!("obstruction: {reason}"));
            json!({ "kind": "obstruction", "reason": reason })
        }
        Certificate::FailedStep { step, detail } => {
            lines.push(format!("failed step {step}: {detail}"));
            json!({ "kind": "failed-step", "step": step, "detail": detail })
        }
    };
    (cert, lines)
}

fn displace_quotient(ctx: &Context, config: &JobConfig, bound: i64) -> Result<Out, CliError> {
    let phi = ctx.map(need(&config.map, "map")?, "config.map")?;
    let region = ctx.region(need(&config.region, "region")?, "config.region")?;
    let v = quotient_disjoint(&phi, &region, &ctx.model, bound)?;
    let (cert, mut lines) = verdict(ctx, &v);
    lines.insert(0, format!("φ: {}", ctx.map_text(&phi)));
    Ok(Out { result: json!({ "outcome": outcome_name(v.outcome) }), certificates: cert, lines })
}

fn displace_commutator(ctx: &Context, config: &JobConfig) -> Result<Out, CliError> {
    let phi = ctx.map(need(&config.map, "map")?, "config.map")?;
    let f = ctx.partial(need(&config.partial, "partial")?, "config.partial")?;
    let v0 = ctx.polyhedron(need(&config.v0, "v0")?, "config.v0")?;
    let v = commutator_displacement(&phi, &f, &v0)?;
    let (cert, mut lines) = verdict(ctx, &v);
    lines.insert(0, format!("V0 = {}", ctx.polyhedron_text(&v0)));
    let coords = ctx.model.coordinates();
    let bound_json = |b: &Option<nilflux_core::displacement::Bound>| {
        b.as_ref().map(|b| json!({ "value": format_rational(&b.value), "strict": b.strict }))
    };
    let boxes = |p: &nilflux_core::displacement::Polyhedron| -> Vec<Value> {
        (0..ctx.dim())
            .map(|i| {
                let r = p.coordinate_range(i);
                json!({ "coord": coords[i], "lower": bound_json(&r.lower), "upper": bound_json(&r.upper) })
            })
            .collect()
    };
    let (preimage, preimage_box) = match apply_partial(&f, &v0, Direction::Inverse) {
        Ok(b) => {
            lines.insert(1, format!("f⁻¹(V0) = {}", ctx.polyhedron_text(&b)));
            (ctx.polyhedron_json(&b), Value::Array(boxes(&b)))
        }
        Err(e) => (Value::String(e.to_string()), Value::Null),
    };
    Ok(Out {
        result: json!({ "outcome": outcome_name(v.outcome), "v0_box": boxes(&v0), "preimage_box": preimage_box }),
        certificates: json!({ "verdict": cert, "preimage_v0": preimage }),
        lines,
    })
}

fn exterior_eval(ctx: &Context, config: &JobConfig) -> Result<Out, CliError> {
    let op = need(&config.operation, "operation")?.as_str();
    let cf = ctx.model.coframe();
    let form = |field: &str| -> Result<DiffForm, CliError> {
        let doc = match field {
            "form" => need(&config.form, "form")?,
            "second" => need(&config.second, "second")?,
            _ => need(&config.omega, "omega")?,
        };
        ctx.form(doc, &format!("config.{field}"))
    };
    let single = |a: DiffForm, lines: Vec<String>| Out {
        result: json!({ "form": ctx.form_json(&a) }),
        certificates: json!({}),
        lines: [lines, vec![format!("= {}", ctx.model.render(&a))]].concat(),
    };
    match op {
        "d" => {
            let a = form("form")?;
            Ok(single(cf.d(&a)?, vec![format!("d({})", ctx.model.render(&a))]))
        }
        "wedge" => {
            let a = form("form")?;
            let b = cf.change_basis(&form("second")?, a.basis())?;
            Ok(single(a.wedge(&b)?, vec![format!("({}) ∧ ({})", ctx.model.render(&a), ctx.model.render(&b))]))
        }
        "interior" => {
            let a = form("form")?;
            let x = ctx.field(need(&config.field, "field")?, "config.field")?;
            Ok(single(cf.interior(&x, &a)?, vec![format!("ι({}) {}", ctx.field_text(&x), ctx.model.render(&a))]))
        }
        "pullback" => {
            let a = form("form")?;
            let g = ctx.map(need(&config.map, "map")?, "config.map")?;
            let pulled = g.pullback(&cf.to_coordinate(&a)?)?;
            let out = match a.basis() {
                Basis::Frame(_) => cf.to_frame(&pulled)?,
                Basis::Coordinate => pulled,
            };
            Ok(single(out, vec![format!("φ*({}) with φ: {}", ctx.model.render(&a), ctx.map_text(&g))]))
        }
        "to-frame" => Ok(single(cf.to_frame(&form("form")?)?, vec![])),
        "to-coordinate" => Ok(single(cf.to_coordinate(&form("form")?)?, vec![])),
        "exp" => {
            let x = ctx.field(need(&config.field, "field")?, "config.field")?;
            let t = match &config.time {
                Some(t) => ctx.rational(t, "config.time")?,
                None => nilflux_core::rational::q(1),
            };
            let g = exp_affine_field(&x, &t)?;
            Ok(Out {
                result: json!({ "map": ctx.map_json(&g) }),
                certificates: json!({}),
                lines: vec![format!("exp({}·({})) = {}", format_rational(&t), ctx.field_text(&x), ctx.map_text(&g))],
            })
        }
        "primitive" => {
            let a = form("form")?;
            let p = is_exact(&a, &ctx.model)?;
            let mut lines = vec![format!("{} exact: {}", ctx.model.render(&a), p.is_some())];
            let prim = p.as_ref().map(|p| {
                lines.push(format!("primitive {}", ctx.model.render(p)));
                ctx.form_json(p)
            });
            let check = match &p {
                Some(p) => Some(cf.forms_equal(&cf.d(p)?, &a)?),
                None => None,
            };
            Ok(Out {
                result: json!({ "exact": p.is_some(), "primitive": prim }),
                certificates: json!({ "d_primitive_equals_form": check }),
                lines,
            })
        }
        "poincare-dual" => {
            let class = need(&config.class, "class")?;
            let h = class
                .iter()
                .enumerate()
                .map(|(i, c)| ctx.rational(c, &format!("config.class[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let labels = ctx.model.h1_labels();
            Ok(single(poincare_dual(&h, &ctx.model)?, vec![format!("PD over H₁ basis ({})", labels.join(", "))]))
        }
        "symplectic-dual" => {
            let omega = form("omega")?;
            let a = form("form")?;
            let x = symplectic_dual(&a, &omega, &ctx.model)?;
            let back = cf.to_frame(&cf.to_coordinate(&omega)?.interior(&x)?)?;
            Ok(Out {
                result: json!({ "field": ctx.field_json(&x) }),
                certificates: json!({ "interior": ctx.form_json(&back) }),
                lines: vec![
                    format!("ι(X)ω = {} for X = {}", ctx.model.render(&a), ctx.field_text(&x)),
                ],
            })
        }
        other => Err(CliError::usage(format!(
            "config.operation: unknown operation `{other}` (known: d, wedge, interior, pullback, to-frame, to-coordinate, exp, primitive, poincare-dual, symplectic-dual)"
        ))),
    }
}
