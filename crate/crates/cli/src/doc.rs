//! Presentation file format.

use std::collections::BTreeMap;

use orepi_core::exactnum::Field;
use orepi_core::presentation::{
    build_family, parse_univariate, render_univariate, FamilySpec, FamilyTag, FreePoly, Metadata, Presentation,
    RewriteRule, Word,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDoc {
    /// `Q`, `cyclo:N`, `ratfunc:p,q`, `gf:p` or `gf:p:poly`.
    pub spec: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub coeff: String,
    pub word: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleDoc {
    pub lhs: Vec<String>,
    pub rhs: Vec<TermDoc>,
}

/// Optional family record; when present the rules must match the built family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub tag: String,
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationDoc {
    pub field: FieldDoc,
    pub generators: Vec<String>,
    pub weights: Vec<u32>,
    pub precedence: Vec<String>,
    pub rules: Vec<RuleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyDoc>,
}

fn word_names(p: &Presentation, w: &[u8]) -> Vec<String> {
    w.iter().map(|&g| p.generators()[g as usize].clone()).collect()
}

impl PresentationDoc {
    pub fn from_presentation(p: &Presentation) -> PresentationDoc {
        let rules = p
            .rules()
            .iter()
            .map(|r| RuleDoc {
                lhs: word_names(p, &r.lhs),
                rhs: r
                    .rhs
                    .terms()
                    .map(|(w, c)| TermDoc { coeff: c.to_string(), word: word_names(p, w) })
                    .collect(),
            })
            .collect();
        let family = p.spec().map(|spec| {
            let mut params = BTreeMap::new();
            for (k, c) in spec.named_params() {
                params.insert(k, c.to_string());
            }
            let f = match spec {
                FamilySpec::Bqf { f, .. } => Some(render_univariate(f, "t")),
                _ => None,
            };
            FamilyDoc { tag: spec.tag().name().to_string(), params, f }
        });
        PresentationDoc {
            field: FieldDoc { spec: p.field().to_string() },
            generators: p.generators().to_vec(),
            weights: p.weights().to_vec(),
            precedence: p.precedence(),
            rules,
            family,
        }
    }

    pub fn to_presentation(&self) -> Result<Presentation, String> {
        let field = Field::parse_spec(&self.field.spec).map_err(|e| e.to_string())?;
        let word = |names: &[String]| -> Result<Word, String> {
            names
                .iter()
                .map(|n| {
                    self.generators
                        .iter()
                        .position(|g| g == n)
                        .map(|i| i as u8)
                        .ok_or_else(|| format!("unknown generator `{n}`"))
                })
                .collect()
        };
        let mut rules = Vec::with_capacity(self.rules.len());
        for r in &self.rules {
            let mut rhs = FreePoly::zero(&field);
            for t in &r.rhs {
                let c = field.parse(&t.coeff).map_err(|e| format!("coefficient `{}`: {e}", t.coeff))?;
                rhs = rhs.add(&FreePoly::term(c, word(&t.word)?));
            }
            rules.push(RewriteRule { lhs: word(&r.lhs)?, rhs });
        }
        let p = Presentation::new(field.clone(), self.generators.clone(), self.weights.clone(), &self.precedence, rules)
            .map_err(|e| e.to_string())?;
        let Some(fam) = &self.family else {
            return Ok(p);
        };
        let spec = fam.to_spec(&field)?;
        let built = build_family(&spec).map_err(|e| e.to_string())?;
        if built != p {
            return Err(format!("rules do not match the {} family with the given parameters", fam.tag));
        }
        Ok(p.with_metadata(Metadata { family: Some(spec.tag()), params: spec.params_echo(), spec: Some(spec) }))
    }
}

impl FamilyDoc {
    pub fn to_spec(&self, field: &Field) -> Result<FamilySpec, String> {
        let tag: FamilyTag = self.tag.parse().map_err(|e: orepi_core::presentation::PresentationError| e.to_string())?;
        let mut params = BTreeMap::new();
        for (k, v) in &self.params {
            params.insert(k.clone(), field.parse(v).map_err(|e| format!("parameter `{k}`: {e}"))?);
        }
        let f = match &self.f {
            Some(s) => Some(parse_univariate(field, s, "t").map_err(|e| e.to_string())?),
            None => None,
        };
        FamilySpec::from_named(tag, field, &params, f).map_err(|e| e.to_string())
    }
}
