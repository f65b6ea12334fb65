//! Subcommand implementations. Each returns a report, or a message for
//! usage and input errors (exit code 2).

use std::io::Read;
use std::path::Path;

use relift::coalg::{model_check, simulation_gfp};
use relift::exact::{catalog_square, exactness_witness, is_exact_by_relations, CatalogInput};
use relift::functor::{
    check_bcc, lift_relation, parse_functor, BccConfig, Detail, FunctorExpr, Registry,
};
use relift::{compose_rel, Caps, Error, LaxSquare, MonotoneRelation, SquareKind};
use serde_json::{json, Value};

use crate::dto::{
    build_registry, from_value, ArtifactKind, CatalogRequestDto, CoalgebraDto, FormulaDto, Load,
    LoadError, MapDto, PreorderDto, RelationDto, SpanDto, SquareDto,
};
use crate::report::Report;
use crate::{Command, Global};

type Outcome = Result<Report, String>;

pub fn run(cmd: &Command, g: &Global) -> Outcome {
    let caps = caps(g);
    match cmd {
        Command::Validate { file } => validate(file, g, &caps),
        Command::Compose { first, second } => compose(first, second),
        Command::Lift { functor, relation } => lift(functor, relation, g, &caps),
        Command::ExactCheck { square } => exact_check(square),
        Command::BccCheck {
            functor,
            samples,
            law_samples,
        } => bcc_check(functor, *samples, *law_samples, g, &caps),
        Command::Simulate { first, second } => simulate(first, second, g, &caps),
        Command::Modelcheck { coalgebra, formula } => modelcheck(coalgebra, formula, g, &caps),
        Command::Catalog { request } => catalog(request),
    }
}

fn caps(g: &Global) -> Caps {
    let mut caps = Caps::default();
    if let Some(c) = g.cap {
        caps.max_carrier = c;
    }
    caps
}

fn read_json(path: &Path) -> Result<Value, String> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| format!("cannot read stdin: {e}"))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?
    };
    serde_json::from_str(&text).map_err(|e| format!("{}: invalid JSON: {e}", path.display()))
}

fn load<T>(path: &Path, what: &str, build: impl FnOnce(Value) -> Load<T>) -> Result<T, String> {
    let v = read_json(path)?;
    build(v).map_err(|e| format!("{}: {what}: {e}", path.display()))
}

fn registry(g: &Global) -> Result<Registry, String> {
    match &g.registry {
        None => Ok(Registry::new()),
        Some(p) => load(p, "registry", build_registry),
    }
}

fn functor(src: &str, g: &Global) -> Result<FunctorExpr, String> {
    parse_functor(src, &registry(g)?).map_err(|e| format!("functor `{src}`: {e}"))
}

fn relation(path: &Path) -> Result<MonotoneRelation, String> {
    load(path, "relation", |v| {
        from_value::<RelationDto>("relation", v)?.build()
    })
}

fn lib(e: Error) -> String {
    e.to_string()
}

fn pairs_lines(r: &MonotoneRelation) -> Vec<String> {
    r.pairs()
        .into_iter()
        .map(|(b, a)| format!("  {b} <- {a}"))
        .collect()
}

fn relation_report(rep: &mut Report, r: &MonotoneRelation) {
    rep.count("related_pairs", r.matrix().count());
    rep.line("related pairs (dst <- src):");
    rep.lines.extend(pairs_lines(r));
}

fn validate(file: &Path, g: &Global, caps: &Caps) -> Outcome {
    let v = read_json(file)?;
    let kind = ArtifactKind::detect(&v)
        .ok_or_else(|| format!("{}: cannot tell which artifact this is", file.display()))?;
    let mut rep = Report::new("validate");
    let reg = if kind == ArtifactKind::Coalgebra {
        registry(g)?
    } else {
        Registry::new()
    };
    let checked: Load<Value> = (|| {
        Ok(match kind {
            ArtifactKind::Preorder => {
                let p = from_value::<PreorderDto>("preorder", v)?.build()?;
                json!({ "elements": p.len(), "poset": p.is_poset() })
            }
            ArtifactKind::Map => {
                let f = from_value::<MapDto>("map", v)?.build()?;
                json!({ "order_embedding": f.is_order_embedding(), "absolutely_dense": f.is_absolutely_dense() })
            }
            ArtifactKind::Relation => {
                let r = from_value::<RelationDto>("relation", v)?.build()?;
                json!({ "related_pairs": r.matrix().count() })
            }
            ArtifactKind::Span => {
                let s = from_value::<SpanDto>("span", v)?.build()?;
                json!({ "fibration": s.fibration_defect().is_none(), "defect": s.fibration_defect() })
            }
            ArtifactKind::Square => {
                let sq = from_value::<SquareDto>("square", v)?.build()?;
                json!({ "vertex": sq.vertex().len(), "exact": exactness_witness(&sq).is_none() })
            }
            ArtifactKind::Coalgebra => {
                let c = from_value::<CoalgebraDto>("coalgebra", v)?.build(&reg, caps)?;
                json!({ "states": c.carrier().len(), "functor": c.functor().to_string() })
            }
            ArtifactKind::Formula => {
                let phi = from_value::<FormulaDto>("formula", v)?.build();
                json!({ "modal_depth": phi.modal_depth(), "formula": phi.to_string() })
            }
            ArtifactKind::Catalog => {
                let req = from_value::<CatalogRequestDto>("catalog request", v)?;
                for m in [
                    Some(&req.f),
                    req.g.as_ref(),
                    req.u.as_ref(),
                    req.j.as_ref(),
                    req.h.as_ref(),
                    req.l.as_ref(),
                ]
                .into_iter()
                .flatten()
                {
                    m.build()?;
                }
                json!({})
            }
        })
    })();
    let checked = checked.map_err(|e| match e {
        LoadError::Malformed(m) => Err(format!("{}: {m}", file.display())),
        LoadError::Invalid(e) => Ok(e),
    });
    let mut result = json!({ "kind": kind.name() });
    rep.line(format!("kind: {}", kind.name()));
    match checked {
        Ok(summary) => {
            for (k, v) in summary.as_object().into_iter().flatten() {
                rep.line(format!("{k}: {v}"));
                result[k] = v.clone();
            }
            rep.result = result;
        }
        Err(Err(usage)) => return Err(usage),
        Err(Ok(invalid)) => {
            rep.result = result;
            rep.line(format!("invalid: {invalid}"));
            rep.fail(json!({ "error": invalid.to_string() }));
        }
    }
    Ok(rep)
}

fn compose(first: &Path, second: &Path) -> Outcome {
    let r = relation(first)?;
    let s = relation(second)?;
    let sr = compose_rel(&s, &r).map_err(lib)?;
    let mut rep = Report::new("compose");
    relation_report(&mut rep, &sr);
    rep.result = json!(RelationDto::from_relation(&sr));
    Ok(rep)
}

fn lift(src: &str, path: &Path, g: &Global, caps: &Caps) -> Outcome {
    let t = functor(src, g)?;
    let r = relation(path)?;
    let lifted = lift_relation(&t, &r, caps).map_err(lib)?;
    let mut rep = Report::new("lift");
    rep.count("src_elements", lifted.src.len());
    rep.count("dst_elements", lifted.dst.len());
    relation_report(&mut rep, &lifted.relation);
    let mut result = json!({
        "functor": t.to_string(),
        "relation": RelationDto::from_relation(&lifted.relation),
    });
    if t.uses_conn_comp() {
        let note = "connected components do not lift functorially; shown for reference only";
        rep.message = Some(note.into());
        result["warning"] = json!(note);
    }
    rep.result = result;
    Ok(rep)
}

fn square_counterexample(sq: &LaxSquare) -> Option<Value> {
    exactness_witness(sq).map(|w| {
        json!({
            "a": w.a,
            "b": w.b,
            "hom": w.hom,
            "witnessed": !w.hom,
        })
    })
}

fn exact_check(path: &Path) -> Outcome {
    let dto = load(path, "square", |v| from_value::<SquareDto>("square", v))?;
    let mut rep = Report::new("exact-check");
    let sq = match dto.build() {
        Ok(sq) => sq,
        Err(LoadError::Invalid(Error::NotLax(at))) => {
            rep.line(format!("not lax at `{at}`"));
            rep.result = json!({ "lax": false, "exact": false });
            rep.fail(json!({ "not_lax_at": at }));
            return Ok(rep);
        }
        Err(e) => return Err(format!("{}: square: {e}", path.display())),
    };
    rep.count("vertex", sq.vertex().len());
    let by_relations = is_exact_by_relations(&sq);
    match square_counterexample(&sq) {
        None => {
            rep.line("exact");
            rep.result = json!({ "lax": true, "exact": true, "exact_by_relations": by_relations });
        }
        Some(cx) => {
            rep.line(format!(
                "not exact at a = {}, b = {}: hom is {} but the vertex says {}",
                cx["a"], cx["b"], cx["hom"], cx["witnessed"]
            ));
            rep.result = json!({ "lax": true, "exact": false, "exact_by_relations": by_relations });
            rep.fail(cx);
        }
    }
    Ok(rep)
}

fn bcc_check(src: &str, samples: usize, law_samples: usize, g: &Global, caps: &Caps) -> Outcome {
    let t = functor(src, g)?;
    let cfg = BccConfig {
        seed: g.seed,
        max_size: g.max_size,
        samples,
        law_samples,
        caps: *caps,
    };
    let bcc = check_bcc(&t, &cfg).map_err(lib)?;
    let mut rep = Report::new("bcc-check");
    rep.seed = Some(g.seed);
    rep.count("squares_checked", bcc.squares.checked);
    rep.count("squares_passed", bcc.squares.passed);
    rep.count("squares_skipped", bcc.squares.skipped);
    rep.count("laws_checked", bcc.laws.checked);
    rep.count("laws_passed", bcc.laws.passed);
    rep.count("laws_skipped", bcc.laws.skipped);
    rep.count("failures", bcc.failures);
    rep.line(format!("functor: {}", bcc.functor));
    rep.line(format!("verdict: {}", bcc.verdict()));
    let mut result = json!({
        "functor": bcc.functor,
        "max_size": bcc.max_size,
        "verdict": bcc.verdict(),
    });
    if t.uses_conn_comp() {
        let note = "connected components do not lift functorially and are expected to fail";
        rep.line(format!("note: {note}"));
        result["warning"] = json!(note);
    }
    rep.result = result;
    if let Some(cx) = bcc.counterexample {
        rep.line(format!("first counterexample: {} ({})", cx.case, cx.kind));
        let detail = match &cx.detail {
            Detail::NotExact {
                square,
                image,
                witness,
            } => {
                rep.line(format!(
                    "  image square not exact at a = {}, b = {} (hom {})",
                    witness.a, witness.b, witness.hom
                ));
                let mut d = json!({
                    "type": "not-exact",
                    "square": SquareDto::from_square(square),
                    "image": SquareDto::from_square(image),
                    "witness": { "a": witness.a, "b": witness.b, "hom": witness.hom },
                });
                if cx.kind == SquareKind::Embedding.name() {
                    let emb = image.f().is_order_embedding();
                    rep.line(format!(
                        "  image of the embedding is an order-embedding: {emb}"
                    ));
                    d["image_is_order_embedding"] = json!(emb);
                }
                d
            }
            Detail::NotLax { square, at } => {
                rep.line(format!("  image square not lax at `{at}`"));
                json!({ "type": "not-lax", "square": SquareDto::from_square(square), "at": at })
            }
            Detail::Law { law, relations } => {
                rep.line(format!("  law fails: {law}"));
                json!({
                    "type": "law",
                    "law": law,
                    "relations": relations.iter().map(RelationDto::from_relation).collect::<Vec<_>>(),
                })
            }
        };
        rep.fail(json!({ "case": cx.case, "kind": cx.kind, "detail": detail }));
    }
    Ok(rep)
}

fn coalgebra(path: &Path, reg: &Registry, caps: &Caps) -> Result<relift::Coalgebra, String> {
    load(path, "coalgebra", |v| {
        from_value::<CoalgebraDto>("coalgebra", v)?.build(reg, caps)
    })
}

fn simulate(first: &Path, second: &Path, g: &Global, caps: &Caps) -> Outcome {
    let reg = registry(g)?;
    let c1 = coalgebra(first, &reg, caps)?;
    let c2 = coalgebra(second, &reg, caps)?;
    let r = simulation_gfp(&c1, &c2, caps).map_err(lib)?;
    let mut rep = Report::new("simulate");
    rep.count("related_pairs", r.matrix().count());
    rep.line("simulating pairs (second <- first):");
    rep.lines.extend(pairs_lines(&r));
    rep.result = json!({
        "relation": RelationDto::from_relation(&r),
        "pairs": r.pairs().into_iter().map(|(x2, x1)| json!({ "second": x2, "first": x1 })).collect::<Vec<_>>(),
    });
    Ok(rep)
}

fn modelcheck(coalg: &Path, formula: &Path, g: &Global, caps: &Caps) -> Outcome {
    let reg = registry(g)?;
    let c = coalgebra(coalg, &reg, caps)?;
    let phi = load(formula, "formula", |v| {
        Ok(from_value::<FormulaDto>("formula", v)?.build())
    })?;
    let sat = model_check(&c, &phi, caps).map_err(lib)?;
    let states: Vec<&str> = sat.iter().map(|i| c.carrier().id(i)).collect();
    let mut rep = Report::new("modelcheck");
    rep.count("states", c.carrier().len());
    rep.count("satisfying", states.len());
    rep.line(format!("formula: {phi}"));
    rep.line(format!("satisfied at: {{{}}}", states.join(", ")));
    rep.result = json!({ "formula": phi.to_string(), "satisfied": states });
    Ok(rep)
}

fn catalog(path: &Path) -> Outcome {
    let req = load(path, "catalog request", |v| {
        from_value::<CatalogRequestDto>("catalog request", v)
    })?;
    let build = |m: &Option<MapDto>| -> Result<Option<relift::MonotoneMap>, String> {
        m.as_ref()
            .map(|m| {
                m.build()
                    .map_err(|e| format!("{}: catalog request: {e}", path.display()))
            })
            .transpose()
    };
    let f = build(&Some(req.f.clone()))?.expect("f is required");
    let (g, u, j, h, l) = (
        build(&req.g)?,
        build(&req.u)?,
        build(&req.j)?,
        build(&req.h)?,
        build(&req.l)?,
    );

    let mut inputs = vec![
        CatalogInput::YonedaLeft(f.clone()),
        CatalogInput::YonedaRight(f.clone()),
        CatalogInput::Embedding(f.clone()),
        CatalogInput::AbsDense(f.clone()),
    ];
    if let Some(g) = &g {
        inputs.push(CatalogInput::Comma(f.clone(), g.clone()));
        inputs.push(CatalogInput::OpComma(f.clone(), g.clone()));
    }
    let u = u.or_else(|| f.find_right_adjoint());
    if let Some(u) = &u {
        inputs.push(CatalogInput::AdjunctionUnit {
            f: f.clone(),
            u: u.clone(),
        });
        inputs.push(CatalogInput::AdjunctionCounit {
            f: f.clone(),
            u: u.clone(),
        });
        if let Some(j) = &j {
            inputs.push(CatalogInput::RelativeAdjoint {
                f: f.clone(),
                u: u.clone(),
                j: j.clone(),
            });
        }
    }
    if let (Some(h), Some(j), Some(l)) = (&h, &j, &l) {
        inputs.push(CatalogInput::AbsoluteKan {
            h: h.clone(),
            j: j.clone(),
            l: l.clone(),
        });
    }

    let mut rep = Report::new("catalog");
    let mut squares = Vec::new();
    let mut omitted = Vec::new();
    for input in &inputs {
        let kind = input.kind().name();
        match catalog_square(input) {
            Ok(sq) if exactness_witness(&sq).is_none() => {
                rep.line(format!("{kind}: exact"));
                squares.push(json!({ "kind": kind, "square": SquareDto::from_square(&sq) }));
            }
            Ok(_) => omitted.push(json!({ "kind": kind, "reason": "not exact" })),
            Err(e) => omitted.push(json!({ "kind": kind, "reason": e.to_string() })),
        }
    }
    for o in &omitted {
        rep.line(format!(
            "{}: omitted ({})",
            o["kind"].as_str().unwrap_or(""),
            o["reason"].as_str().unwrap_or("")
        ));
    }
    rep.count("emitted", squares.len());
    rep.count("omitted", omitted.len());
    rep.result = json!({ "squares": squares, "omitted": omitted });
    Ok(rep)
}
