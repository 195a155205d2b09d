//! Algebra presentations: ordered generators with weights, a declared precedence,
//! and oriented rewrite rules `lhs word -> formal polynomial`.

mod families;
mod poly;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use smallvec::SmallVec;
use thiserror::Error;

use crate::exactnum::{parse_expr, Coeff, Expr, Field, NumError};

pub use families::{build_family, parse_univariate, render_univariate, BiQuadData, FamilySpec, FamilyTag};
pub use poly::{FreePoly, NCPoly};

/// Index of a generator in its presentation's generator list.
pub type GenId = u8;

/// A word in the generators; the empty word is the unit monomial.
pub type Word = SmallVec<[GenId; 24]>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("parameter {0} must be nonzero")]
    ZeroParameter(String),
    #[error("down-up algebra with beta = 0 is not noetherian")]
    DownUpNotNoetherian,
    #[error("lambda matrix is not multiplicatively antisymmetric: {0}")]
    NonAntisymmetricLambda(String),
    #[error("rule orientation failure: {0}")]
    OrientationFailure(String),
    #[error("invalid presentation: {0}")]
    Invalid(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewriteRule {
    pub lhs: Word,
    pub rhs: FreePoly,
}

/// Family tag and parameter echo carried along for reports.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Metadata {
    pub family: Option<FamilyTag>,
    pub params: Vec<(String, String)>,
    /// The instance this presentation was built from, when built by [`build_family`].
    pub spec: Option<FamilySpec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleCheck {
    pub rule: usize,
    pub lhs: String,
    pub pass: bool,
    /// First rhs term that is not below the lhs.
    pub offending: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientationReport {
    pub pass: bool,
    pub rules: Vec<RuleCheck>,
}

pub struct Presentation {
    field: Field,
    generators: Vec<String>,
    weights: Vec<u32>,
    /// Precedence rank per generator (0 is the smallest).
    rank: Vec<u8>,
    rules: Vec<RewriteRule>,
    meta: Metadata,
    quad_index: Vec<Option<u32>>,
    long_index: HashMap<Word, u32>,
    long_lens: Vec<usize>,
    oriented: bool,
    confluent: OnceLock<bool>,
}

impl Clone for Presentation {
    fn clone(&self) -> Self {
        let confluent = OnceLock::new();
        if let Some(&c) = self.confluent.get() {
            let _ = confluent.set(c);
        }
        Presentation {
            field: self.field.clone(),
            generators: self.generators.clone(),
            weights: self.weights.clone(),
            rank: self.rank.clone(),
            rules: self.rules.clone(),
            meta: self.meta.clone(),
            quad_index: self.quad_index.clone(),
            long_index: self.long_index.clone(),
            long_lens: self.long_lens.clone(),
            oriented: self.oriented,
            confluent,
        }
    }
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.generators == other.generators
            && self.weights == other.weights
            && self.rank == other.rank
            && self.rules == other.rules
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Presentation over {} with generators {:?}", self.field, self.generators)?;
        for r in &self.rules {
            writeln!(f, "  {} -> {}", self.render_word(&r.lhs), self.render(&r.rhs))?;
        }
        Ok(())
    }
}

impl Presentation {
    /// Builds and structurally validates a presentation. `precedence` lists generator
    /// names from smallest to largest. Orientation is checked but not enforced here;
    /// see [`Presentation::validate_orientation`].
    pub fn new(
        field: Field,
        generators: Vec<String>,
        weights: Vec<u32>,
        precedence: &[String],
        rules: Vec<RewriteRule>,
    ) -> Result<Presentation, PresentationError> {
        let invalid = |m: String| PresentationError::Invalid(m);
        let n = generators.len();
        if n == 0 || n > GenId::MAX as usize {
            return Err(invalid(format!("generator count {n} out of range")));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.is_empty() || generators[..i].contains(g) {
                return Err(invalid(format!("generator names must be unique and nonempty: `{g}`")));
            }
        }
        if weights.len() != n || weights.iter().any(|&w| w == 0) {
            return Err(invalid("weights must be positive, one per generator".into()));
        }
        if precedence.len() != n {
            return Err(invalid("precedence must list every generator once".into()));
        }
        let mut rank = vec![u8::MAX; n];
        for (r, name) in precedence.iter().enumerate() {
            let i = generators
                .iter()
                .position(|g| g == name)
                .ok_or_else(|| invalid(format!("unknown generator `{name}` in precedence")))?;
            if rank[i] != u8::MAX {
                return Err(invalid(format!("generator `{name}` repeated in precedence")));
            }
            rank[i] = r as u8;
        }
        let mut quad_index = vec![None; n * n];
        let mut long_index = HashMap::new();
        for (k, r) in rules.iter().enumerate() {
            if r.lhs.len() < 2 {
                return Err(invalid(format!("rule {k}: lhs must have length at least 2")));
            }
            if r.lhs.iter().any(|&g| g as usize >= n) {
                return Err(invalid(format!("rule {k}: generator index out of range")));
            }
            if r.rhs.field() != &field {
                return Err(NumError::CtxMismatch(r.rhs.field().to_string(), field.to_string()).into());
            }
            for (w, _) in r.rhs.terms() {
                if w.iter().any(|&g| g as usize >= n) {
                    return Err(invalid(format!("rule {k}: rhs generator index out of range")));
                }
            }
            let dup = if r.lhs.len() == 2 {
                let slot = &mut quad_index[r.lhs[0] as usize * n + r.lhs[1] as usize];
                slot.replace(k as u32).is_some()
            } else {
                long_index.insert(r.lhs.clone(), k as u32).is_some()
            };
            if dup {
                return Err(invalid(format!("rule {k}: duplicate lhs")));
            }
        }
        let mut long_lens: Vec<usize> = long_index.keys().map(|w| w.len()).collect();
        long_lens.sort_unstable();
        long_lens.dedup();
        let mut p = Presentation {
            field,
            generators,
            weights,
            rank,
            rules,
            meta: Metadata::default(),
            quad_index,
            long_index,
            long_lens,
            oriented: false,
            confluent: OnceLock::new(),
        };
        p.oriented = p.validate_orientation().pass;
        Ok(p)
    }

    pub fn with_metadata(mut self, meta: Metadata) -> Self {
        self.meta = meta;
        self
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn metadata(&self) -> &Metadata {
        &self.meta
    }

    pub fn spec(&self) -> Option<&FamilySpec> {
        self.meta.spec.as_ref()
    }

    pub fn family(&self) -> Option<FamilyTag> {
        self.meta.family
    }

    pub fn is_oriented(&self) -> bool {
        self.oriented
    }

    /// Generator names from smallest to largest precedence.
    pub fn precedence(&self) -> Vec<String> {
        let mut idx: Vec<usize> = (0..self.generators.len()).collect();
        idx.sort_by_key(|&i| self.rank[i]);
        idx.into_iter().map(|i| self.generators[i].clone()).collect()
    }

    pub fn gen_id(&self, name: &str) -> Option<GenId> {
        self.generators.iter().position(|g| g == name).map(|i| i as GenId)
    }

    /// Generator id by name; panics on unknown names (for family-internal use).
    pub fn g(&self, name: &str) -> GenId {
        self.gen_id(name).unwrap_or_else(|| panic!("no generator `{name}`"))
    }

    pub fn word_of(&self, names: &[&str]) -> Word {
        names.iter().map(|n| self.g(n)).collect()
    }

    pub fn weight(&self, w: &[GenId]) -> u32 {
        w.iter().map(|&g| self.weights[g as usize]).sum()
    }

    /// Term order: total weight, then length, then left-lexicographic by precedence.
    pub fn cmp_words(&self, a: &[GenId], b: &[GenId]) -> Ordering {
        self.weight(a)
            .cmp(&self.weight(b))
            .then(a.len().cmp(&b.len()))
            .then_with(|| {
                for (x, y) in a.iter().zip(b) {
                    let o = self.rank[*x as usize].cmp(&self.rank[*y as usize]);
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                Ordering::Equal
            })
    }

    /// Sort key realizing the term order.
    pub fn order_key(&self, w: &[GenId]) -> OrderKey {
        OrderKey {
            weight: self.weight(w),
            ranks: w.iter().map(|&g| self.rank[g as usize]).collect(),
        }
    }

    pub fn word_from_key(&self, key: &OrderKey) -> Word {
        let mut inv = vec![0 as GenId; self.rank.len()];
        for (g, &r) in self.rank.iter().enumerate() {
            inv[r as usize] = g as GenId;
        }
        key.ranks.iter().map(|&r| inv[r as usize]).collect()
    }

    /// The rule whose lhs occurs at the leftmost position of `w`, with that position.
    pub fn find_redex(&self, w: &[GenId]) -> Option<(usize, usize)> {
        let n = self.generators.len();
        for i in 0..w.len() {
            if i + 1 < w.len() {
                if let Some(k) = self.quad_index[w[i] as usize * n + w[i + 1] as usize] {
                    return Some((i, k as usize));
                }
            }
            for &len in &self.long_lens {
                if i + len > w.len() {
                    break;
                }
                if let Some(&k) = self.long_index.get(&w[i..i + len]) {
                    return Some((i, k as usize));
                }
            }
        }
        None
    }

    pub fn is_irreducible(&self, w: &[GenId]) -> bool {
        self.find_redex(w).is_none()
    }

    pub fn validate_orientation(&self) -> OrientationReport {
        let rules: Vec<RuleCheck> = self
            .rules
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let offending = r
                    .rhs
                    .terms()
                    .find(|(w, _)| self.cmp_words(w, &r.lhs) != Ordering::Less)
                    .map(|(w, c)| format!("{} * {}", c, self.render_word(w)));
                RuleCheck {
                    rule: k,
                    lhs: self.render_word(&r.lhs),
                    pass: offending.is_none(),
                    offending,
                }
            })
            .collect();
        OrientationReport { pass: rules.iter().all(|r| r.pass), rules }
    }

    /// Pairs (i, j) of rules where lhs_j occurs inside lhs_i (i ≠ j).
    pub fn lhs_containments(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.rules.iter().enumerate() {
            for (j, b) in self.rules.iter().enumerate() {
                if i != j && b.lhs.len() <= a.lhs.len() && a.lhs.windows(b.lhs.len()).any(|s| s == &b.lhs[..]) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub(crate) fn confluence_cache(&self) -> &OnceLock<bool> {
        &self.confluent
    }

    pub fn render_word(&self, w: &[GenId]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < w.len() {
            let mut j = i;
            while j < w.len() && w[j] == w[i] {
                j += 1;
            }
            let name = &self.generators[w[i] as usize];
            if j - i == 1 {
                parts.push(name.clone());
            } else {
                parts.push(format!("{name}^{}", j - i));
            }
            i = j;
        }
        parts.join("*")
    }

    /// Renders a polynomial in the expression grammar, largest term first.
    pub fn render(&self, p: &FreePoly) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let mut terms: Vec<(&Word, &Coeff)> = p.terms().collect();
        terms.sort_by(|a, b| self.cmp_words(b.0, a.0));
        terms
            .into_iter()
            .map(|(w, c)| {
                let cs = c.to_string();
                let cs = if cs.contains([' ', '/']) { format!("({cs})") } else { cs };
                if w.is_empty() {
                    cs
                } else if c.is_one() {
                    self.render_word(w)
                } else {
                    format!("{cs}*{}", self.render_word(w))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Evaluates an expression whose identifiers are generator names or field symbols.
    pub fn eval(&self, e: &Expr) -> Result<FreePoly, PresentationError> {
        let f = &self.field;
        Ok(match e {
            Expr::Int(n) => FreePoly::constant(f.from_bigint(n)),
            Expr::Sym(s) => match self.gen_id(s) {
                Some(g) => FreePoly::word(f, [g].into_iter().collect()),
                None => FreePoly::constant(f.symbol(s)?),
            },
            Expr::Neg(a) => self.eval(a)?.neg(),
            Expr::Add(a, b) => self.eval(a)?.add(&self.eval(b)?),
            Expr::Sub(a, b) => self.eval(a)?.sub(&self.eval(b)?),
            Expr::Mul(a, b) => self.eval(a)?.mul(&self.eval(b)?),
            Expr::Div(a, b) => {
                let d = self.eval(b)?;
                let c = d.as_scalar().ok_or_else(|| {
                    PresentationError::Invalid("division by a non-scalar element".into())
                })?;
                self.eval(a)?.scale(&c.inv()?)
            }
            Expr::Pow(a, k) => {
                let base = self.eval(a)?;
                if *k < 0 {
                    let c = base.as_scalar().ok_or_else(|| {
                        PresentationError::Invalid("negative power of a non-scalar element".into())
                    })?;
                    FreePoly::constant(c.pow(*k)?)
                } else {
                    base.pow(*k as u32)
                }
            }
        })
    }

    pub fn parse_poly(&self, s: &str) -> Result<FreePoly, PresentationError> {
        self.eval(&parse_expr(s)?)
    }
}

/// Sort key for the term order; the derived ordering compares weight, then length,
/// then precedence ranks left to right.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderKey {
    weight: u32,
    ranks: SmallVec<[u8; 24]>,
}

impl Ord for OrderKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .cmp(&other.weight)
            .then(self.ranks.len().cmp(&other.ranks.len()))
            .then_with(|| self.ranks.cmp(&other.ranks))
    }
}

impl PartialOrd for OrderKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
