use std::collections::BTreeMap;
use std::path::Path;

use orepi_core::center::{central_candidates, check_central_set, is_central, spanning_check, CentralSet};
use orepi_core::exactnum::{parse_expr, parse::zeta_level, Coeff, Field};
use orepi_core::identities::{check_paper_identity, LemmaId};
use orepi_core::matrep::{
    multilinear_identity_search, quantum_plane_rep, standard_coefficients, Mat, MatAlgebra,
};
use orepi_core::pidecide::{
    self, verify_center_witness, verify_witness, NamedElement, QPlaneWitness, Verdict, Witness, WitnessKind,
};
use orepi_core::presentation::{build_family, parse_univariate, FamilySpec, FamilyTag, FreePoly, Presentation};
use orepi_core::rewrite::{normal_form, overlap_check, PairKind};
use serde_json::{json, Value};

use crate::doc::PresentationDoc;
use crate::report::Check;
use crate::{Instance, UsageError};

pub type Outcome = Result<(Vec<Check>, Option<Value>), UsageError>;

/// A resolved instance: the presentation and, when known, the family spec.
struct Resolved {
    p: Presentation,
    spec: Option<FamilySpec>,
}

impl Resolved {
    fn spec(&self) -> Result<&FamilySpec, UsageError> {
        self.spec.as_ref().ok_or_else(|| UsageError("this command needs a family instance".into()))
    }
}

fn split_param(s: &str) -> Result<(String, String), UsageError> {
    let (k, v) = s.split_once('=').ok_or_else(|| UsageError(format!("parameter `{s}` is not name=expr")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// Picks a field for parameter expressions: rational functions in the free symbols,
/// otherwise the smallest cyclotomic field containing every `zN`, otherwise Q.
pub fn infer_field(exprs: &[&str], poly_var: Option<&str>) -> Result<Field, UsageError> {
    let mut symbols: Vec<String> = Vec::new();
    let mut level = 1u32;
    let mut has_zeta = false;
    for e in exprs {
        for s in parse_expr(e)?.symbols() {
            if Some(s.as_str()) == poly_var {
                continue;
            }
            if let Some(n) = zeta_level(&s) {
                has_zeta = true;
                level = num_integer::lcm(level, n);
            } else if !symbols.contains(&s) {
                symbols.push(s);
            }
        }
    }
    match (symbols.is_empty(), has_zeta) {
        (false, true) => Err(UsageError("mixing symbols and roots of unity needs an explicit --field".into())),
        (false, false) => Ok(Field::ratfunc(&symbols)?),
        (true, true) => Ok(Field::cyclotomic(level)?),
        (true, false) => Ok(Field::rational()),
    }
}

fn resolve(inst: &Instance) -> Result<Resolved, UsageError> {
    if let Some(path) = &inst.file {
        if !inst.params.is_empty() || inst.f.is_some() || inst.q.is_some() || inst.field.is_some() {
            return Err(UsageError("--file cannot be combined with instance parameters".into()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        let doc: PresentationDoc = serde_json::from_str(&text)?;
        let p = doc.to_presentation().map_err(UsageError)?;
        let spec = p.spec().cloned();
        return Ok(Resolved { p, spec });
    }
    let tag: FamilyTag = inst
        .family
        .as_deref()
        .ok_or_else(|| UsageError("either --family or --file is required".into()))?
        .parse()?;
    let mut raw: Vec<(String, String)> = inst.params.iter().map(|s| split_param(s)).collect::<Result<_, _>>()?;
    if let Some(q) = &inst.q {
        if raw.iter().any(|(k, _)| k == "q") {
            return Err(UsageError("q given twice".into()));
        }
        raw.push(("q".into(), q.clone()));
    }
    let field = match &inst.field {
        Some(s) => Field::parse_spec(s)?,
        None => {
            let mut exprs: Vec<&str> = raw.iter().map(|(_, v)| v.as_str()).collect();
            if let Some(f) = &inst.f {
                exprs.push(f);
            }
            infer_field(&exprs, Some("t"))?
        }
    };
    let mut params = BTreeMap::new();
    for (k, v) in &raw {
        let c = field.parse(v).map_err(|e| UsageError(format!("parameter `{k}`: {e}")))?;
        if params.insert(k.clone(), c).is_some() {
            return Err(UsageError(format!("parameter `{k}` given twice")));
        }
    }
    let f = match &inst.f {
        Some(s) => Some(parse_univariate(&field, s, "t")?),
        None => None,
    };
    let spec = FamilySpec::from_named(tag, &field, &params, f)?;
    let p = build_family(&spec)?;
    Ok(Resolved { p, spec: Some(spec) })
}

fn render(p: &Presentation, f: &FreePoly) -> String {
    p.render(f)
}

fn named(p: &Presentation, e: &NamedElement) -> Value {
    json!({ "name": e.name, "element": render(p, &e.poly) })
}

pub fn families() -> Outcome {
    let checks = FamilyTag::ALL
        .iter()
        .map(|&t| {
            let params = match t {
                FamilyTag::WeylMalt | FamilyTag::WeylAJ => "q1..qn, lij for i < j".to_string(),
                FamilyTag::Bqf => "q, f(t)".to_string(),
                _ => t.param_names().join(", "),
            };
            let lemmas: Vec<&str> = LemmaId::for_family(t).iter().map(|l| l.name()).collect();
            let detail = if lemmas.is_empty() {
                format!("params: {params}")
            } else {
                format!("params: {params}; lemmas: {}", lemmas.join(", "))
            };
            Check::pass(t.name(), detail)
        })
        .collect();
    Ok((checks, None))
}

pub fn build(inst: &Instance, out: Option<&Path>) -> Outcome {
    let r = resolve(inst)?;
    let doc = PresentationDoc::from_presentation(&r.p);
    let value = serde_json::to_value(&doc)?;
    if let Some(path) = out {
        let text = serde_json::to_string_pretty(&doc)?;
        std::fs::write(path, text + "\n").map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    }
    let orient = r.p.validate_orientation();
    let mut checks = Vec::new();
    let detail = match orient.rules.iter().find(|c| !c.pass) {
        None => format!("{} rules decrease in the term order", orient.rules.len()),
        Some(c) => format!("rule {} is not oriented: {}", c.lhs, c.offending.clone().unwrap_or_default()),
    };
    checks.push(Check::new("orientation", orient.pass, detail));
    Ok((checks, Some(value)))
}

pub fn normalize(inst: &Instance, exprs: &[String]) -> Outcome {
    let r = resolve(inst)?;
    let mut checks = Vec::new();
    let mut out = Vec::new();
    for e in exprs {
        let poly = r.p.parse_poly(e).map_err(|err| UsageError(format!("`{e}`: {err}")))?;
        match normal_form(&r.p, &poly) {
            Ok(nf) => {
                let s = render(&r.p, nf.as_free());
                out.push(json!({ "input": e, "normal_form": s }));
                checks.push(Check::pass(e.clone(), s));
            }
            Err(err) => checks.push(Check::error(e.clone(), err.to_string())),
        }
    }
    Ok((checks, Some(Value::Array(out))))
}

pub fn identity_check(inst: &Instance, lemmas: &[String], n_max: u32) -> Outcome {
    let r = resolve(inst)?;
    let ids: Vec<LemmaId> = if lemmas.is_empty() {
        let tag = r.p.family().ok_or_else(|| UsageError("--lemma is required without a family".into()))?;
        let ids = LemmaId::for_family(tag);
        if ids.is_empty() {
            return Err(UsageError(format!("no lemmas are recorded for {tag}")));
        }
        ids
    } else {
        lemmas.iter().map(|s| s.parse::<LemmaId>()).collect::<Result<_, _>>().map_err(UsageError)?
    };
    let mut checks = Vec::new();
    for id in ids {
        match check_paper_identity(id, &r.p, n_max) {
            Ok(rep) => {
                for rec in rep.records {
                    let name = format!("{id} n={} {}", rec.n, rec.label);
                    let mut c = if rec.pass {
                        Check::pass(name, "both sides have the same normal form")
                    } else {
                        Check::new(name, false, "normal forms differ")
                    };
                    if !rec.pass {
                        c = c.with_witness(json!({ "residual": render(&r.p, &rec.residual) }));
                    }
                    checks.push(c);
                }
            }
            Err(e) => checks.push(Check::error(id.name(), e.to_string())),
        }
    }
    Ok((checks, None))
}

fn set_checks(p: &Presentation, set: &CentralSet) -> Vec<Check> {
    let failures = match check_central_set(p, set) {
        Ok(f) => f,
        Err(e) => return vec![Check::error("centrality", e.to_string())],
    };
    set.elements
        .iter()
        .map(|el| {
            let detail = render(p, el.element.as_free());
            match failures.iter().find(|(n, _)| n == &el.name) {
                None => Check::pass(el.name.clone(), detail),
                Some((_, c)) => {
                    let (g, res) = c.witness.clone().expect("failure carries a witness");
                    Check::new(el.name.clone(), false, detail)
                        .with_witness(json!({ "generator": g, "residual": render(p, res.as_free()) }))
                }
            }
        })
        .collect()
}

pub fn central_check(inst: &Instance, elements: &[String]) -> Outcome {
    let r = resolve(inst)?;
    if elements.is_empty() {
        let spec = r.spec()?;
        return Ok(match central_candidates(spec) {
            Ok(set) => {
                let note = set.note.clone();
                (set_checks(&r.p, &set), if note.is_empty() { None } else { Some(json!({ "note": note })) })
            }
            Err(e) => (vec![Check::error("candidates", e.to_string())], None),
        });
    }
    let mut checks = Vec::new();
    for e in elements {
        let poly = r.p.parse_poly(e).map_err(|err| UsageError(format!("`{e}`: {err}")))?;
        checks.push(match is_central(&r.p, &poly) {
            Ok(c) if c.central => Check::pass(e.clone(), "central"),
            Ok(c) => {
                let (g, res) = c.witness.expect("failure carries a witness");
                Check::new(e.clone(), false, format!("does not commute with {g}"))
                    .with_witness(json!({ "generator": g, "residual": render(&r.p, res.as_free()) }))
            }
            Err(err) => Check::error(e.clone(), err.to_string()),
        });
    }
    Ok((checks, None))
}

fn witness_json(p: &Presentation, w: &Witness) -> Value {
    match w {
        Witness::Center { set, caps } => json!({
            "type": "center",
            "elements": set.elements.iter().map(|e| json!({
                "name": e.name,
                "element": render(p, e.element.as_free()),
                "condition": e.condition,
            })).collect::<Vec<_>>(),
            "caps": caps,
        }),
        Witness::QPlane(q) => json!({
            "type": "quantum_plane",
            "kind": format!("{:?}", q.kind),
            "a": named(p, &q.a),
            "b": named(p, &q.b),
            "param": q.param.to_string(),
            "normal": q.normal.as_ref().map(|e| named(p, e)),
            "twists": q.twists.iter().map(|(g, c)| json!({ "generator": g, "coeff": c.to_string() })).collect::<Vec<_>>(),
            "shift": q.shift.as_ref().map(|e| named(p, e)),
        }),
    }
}

pub fn pi_decide(inst: &Instance, verify: bool) -> Outcome {
    let r = resolve(inst)?;
    let spec = r.spec()?;
    let v = match pidecide::pi_decide(spec) {
        Ok(v) => v,
        Err(e) => return Ok((vec![Check::error("verdict", e.to_string())], None)),
    };
    let result = json!({
        "verdict": v.verdict.to_string(),
        "reason_code": v.reason.code(),
        "reason": v.reason.to_string(),
        "witness": v.witness.as_ref().map(|w| witness_json(&r.p, w)),
    });
    let mut checks = vec![Check::pass("verdict", format!("{}: {}", v.verdict, v.reason))];
    if verify {
        match (&v.verdict, &v.witness) {
            (Verdict::PI, Some(Witness::Center { set, caps })) => {
                checks.extend(set_checks(&r.p, set));
                if caps.is_some() {
                    checks.push(match verify_center_witness(spec, set, caps.as_deref()) {
                        Ok((_, Some(s))) => span_check(&s),
                        Ok((_, None)) => Check::error("spanning", "no spanning report"),
                        Err(e) => Check::error("spanning", e.to_string()),
                    });
                }
            }
            (Verdict::NotPI, Some(Witness::QPlane(w))) => {
                checks.push(match verify_witness(spec, w) {
                    Ok(ok) => Check::new("witness", ok, witness_detail(w)),
                    Err(e) => Check::error("witness", e.to_string()),
                });
            }
            _ => {}
        }
    }
    Ok((checks, Some(result)))
}

fn witness_detail(w: &QPlaneWitness) -> String {
    let (a, b, q) = (&w.a.name, &w.b.name, &w.param);
    match w.kind {
        WitnessKind::Subalgebra => format!("subalgebra: {b} {a} = {q} {a} {b}"),
        WitnessKind::Quotient => {
            let n = w.normal.as_ref().map(|e| e.name.as_str()).unwrap_or("?");
            format!("quotient by {n}: {b} {a} = {q} {a} {b}")
        }
        WitnessKind::JordanShift => {
            let d = w.shift.as_ref().map(|e| e.name.as_str()).unwrap_or("?");
            format!("shift: {a} {b} = ({q} {b} + {d}) {a}, {a} {d} = {q} {d} {a}")
        }
    }
}

fn span_check(s: &orepi_core::center::SpanReport) -> Check {
    let detail = format!("degree {}: rank {} of {} irreducible words", s.degree, s.rank, s.monomials);
    let c = Check::new("spanning", s.spans, detail);
    match &s.first_missing {
        Some(m) => c.with_witness(json!({ "first_missing": m })),
        None => c,
    }
}

pub fn confluence(inst: &Instance) -> Outcome {
    let r = resolve(inst)?;
    let rep = match overlap_check(&r.p) {
        Ok(rep) => rep,
        Err(e) => return Ok((vec![Check::error("confluence", e.to_string())], None)),
    };
    let checks = rep
        .pairs
        .iter()
        .map(|c| {
            let kind = match c.kind {
                PairKind::Overlap => "overlap",
                PairKind::Containment => "containment",
            };
            let name = format!("{kind} {}", r.p.render_word(&c.word));
            let detail = format!("rules {} and {}", c.rules.0, c.rules.1);
            let check = Check::new(name, c.residual.is_zero(), detail);
            if c.residual.is_zero() {
                check
            } else {
                check.with_witness(json!({
                    "left": render(&r.p, c.nf_a.as_free()),
                    "right": render(&r.p, c.nf_b.as_free()),
                    "residual": render(&r.p, &c.residual),
                }))
            }
        })
        .collect();
    Ok((checks, Some(json!({ "confluent": rep.confluent, "pairs": rep.pairs.len() }))))
}

pub fn spanning(inst: &Instance, caps: &[u32], degree: Option<u32>) -> Outcome {
    let r = resolve(inst)?;
    let spec = r.spec()?;
    let set = match central_candidates(spec) {
        Ok(s) => s,
        Err(e) => return Ok((vec![Check::error("candidates", e.to_string())], None)),
    };
    let caps: Vec<u32> = if caps.is_empty() {
        let v = pidecide::pi_decide(spec).map_err(|e| UsageError(format!("{e}; pass --caps explicitly")))?;
        match v.central_set().and_then(|(_, c)| c) {
            Some(c) => c.to_vec(),
            None => return Err(UsageError("the decider attaches no caps here; pass --caps".into())),
        }
    } else {
        caps.to_vec()
    };
    let check = match spanning_check(&r.p, &set, &caps, degree) {
        Ok(s) => span_check(&s),
        Err(e) => Check::error("spanning", e.to_string()),
    };
    Ok((vec![check], Some(json!({ "caps": caps, "central": set.names() }))))
}

fn mat_json(m: &Mat) -> Value {
    Value::Array(
        m.rows()
            .iter()
            .map(|row| Value::Array(row.iter().map(|c| Value::String(c.to_string())).collect()))
            .collect(),
    )
}

pub fn matrep(n: usize, q: Option<&str>, field: Option<&str>) -> Outcome {
    if n == 0 {
        return Err(UsageError("--n must be positive".into()));
    }
    let default_q = format!("z{n}");
    let q_src = q.unwrap_or(&default_q);
    let field = match field {
        Some(s) => Field::parse_spec(s)?,
        None => infer_field(&[q_src], None)?,
    };
    let q: Coeff = field.parse(q_src)?;
    let alg = match quantum_plane_rep(n, &q) {
        Ok(a) => a,
        Err(e) => return Ok((vec![Check::error("representation", e.to_string())], None)),
    };
    let (x, y) = (&alg.generators()[0].1, &alg.generators()[1].1);
    let lhs = y.mul(x);
    let rhs = x.mul(y).scale(&q);
    let checks = vec![Check::new("yx = q xy", lhs == rhs, format!("{n}x{n} matrices over {field}"))];
    let gens: serde_json::Map<String, Value> =
        alg.generators().iter().map(|(name, m)| (name.clone(), mat_json(m))).collect();
    Ok((checks, Some(json!({ "q": q.to_string(), "generators": gens }))))
}

pub fn identity_search(n: usize, degree: usize, field: &str) -> Outcome {
    if n == 0 || degree == 0 {
        return Err(UsageError("--n and --degree must be positive".into()));
    }
    let field = Field::parse_spec(field)?;
    let alg = MatAlgebra::full(&field, n);
    let space = match multilinear_identity_search(&alg, degree) {
        Ok(s) => s,
        Err(e) => return Ok((vec![Check::error("search", e.to_string())], None)),
    };
    let s = standard_coefficients(&field, degree);
    let has_s = space.contains(&s);
    // Amitsur-Levitzki: s_d vanishes on M_n exactly when d >= 2n.
    let expect = degree >= 2 * n;
    let checks = vec![
        Check::pass("dimension", format!("{} multilinear identities of degree {degree} on M_{n}", space.dim())),
        Check::new(
            format!("s_{degree}"),
            has_s == expect,
            format!("standard polynomial {} an identity", if has_s { "is" } else { "is not" }),
        ),
    ];
    let perms: Vec<String> = space
        .perms
        .iter()
        .map(|p| p.iter().map(|i| format!("x{}", i + 1)).collect::<Vec<_>>().join(""))
        .collect();
    let basis: Vec<Value> = space
        .basis
        .iter()
        .map(|v| {
            let terms: serde_json::Map<String, Value> = perms
                .iter()
                .zip(v)
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m.clone(), Value::String(c.to_string())))
                .collect();
            Value::Object(terms)
        })
        .collect();
    Ok((checks, Some(json!({ "dimension": space.dim(), "basis": basis }))))
}
