//! Constructors for the built-in algebra families.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{FreePoly, Metadata, Presentation, PresentationError, RewriteRule, Word};
use crate::exactnum::{parse_expr, Coeff, Expr, Field, NumError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyTag {
    Bh,
    Hpq,
    M2,
    UqB2,
    WeylMalt,
    WeylAJ,
    BiQuad3,
    ThreeCyclic,
    DownUp,
    Bqf,
    QuantumPlane,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 11] = [
        FamilyTag::Bh,
        FamilyTag::Hpq,
        FamilyTag::M2,
        FamilyTag::UqB2,
        FamilyTag::WeylMalt,
        FamilyTag::WeylAJ,
        FamilyTag::BiQuad3,
        FamilyTag::ThreeCyclic,
        FamilyTag::DownUp,
        FamilyTag::Bqf,
        FamilyTag::QuantumPlane,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::Bh => "Bh",
            FamilyTag::Hpq => "Hpq",
            FamilyTag::M2 => "M2",
            FamilyTag::UqB2 => "UqB2",
            FamilyTag::WeylMalt => "WeylMalt",
            FamilyTag::WeylAJ => "WeylAJ",
            FamilyTag::BiQuad3 => "BiQuad3",
            FamilyTag::ThreeCyclic => "ThreeCyclic",
            FamilyTag::DownUp => "DownUp",
            FamilyTag::Bqf => "Bqf",
            FamilyTag::QuantumPlane => "QuantumPlane",
        }
    }

    /// Scalar parameter names accepted by [`FamilySpec::from_named`]. Weyl families take
    /// `q1..qn` and `l<i><j>` for i < j instead; `Bqf` takes `q` plus its polynomial.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            FamilyTag::Bh => &["h"],
            FamilyTag::Hpq => &["p", "q"],
            FamilyTag::M2 => &["alpha", "beta"],
            FamilyTag::UqB2 | FamilyTag::QuantumPlane | FamilyTag::Bqf => &["q"],
            FamilyTag::WeylMalt | FamilyTag::WeylAJ => &[],
            FamilyTag::BiQuad3 => &BIQUAD_NAMES,
            FamilyTag::ThreeCyclic => &["q", "alpha", "beta", "gamma"],
            FamilyTag::DownUp => &["alpha", "beta", "gamma"],
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyTag {
    type Err = PresentationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyTag::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| PresentationError::Invalid(format!("unknown family `{s}`")))
    }
}

const BIQUAD_NAMES: [&str; 15] = [
    "q1", "q2", "q3", "a", "b", "c", "alpha", "beta", "gamma", "lambda", "mu", "nu", "b1", "b2", "b3",
];

/// Data of a three-generator bi-quadratic algebra:
/// `x2x1 - q1 x1x2 = a x1 + b x2 + c x3 + b1`, and rows two and three likewise for
/// `x3x1` (with `q2`) and `x3x2` (with `q3`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiQuadData {
    pub q: [Coeff; 3],
    pub a: [[Coeff; 3]; 3],
    pub b: [Coeff; 3],
}

impl BiQuadData {
    /// All-zero tails with the given q's.
    pub fn diagonal(q: [Coeff; 3]) -> BiQuadData {
        let z = q[0].field().zero();
        BiQuadData {
            a: std::array::from_fn(|_| std::array::from_fn(|_| z.clone())),
            b: std::array::from_fn(|_| z.clone()),
            q,
        }
    }

    /// Values in the order q1 q2 q3 a b c alpha beta gamma lambda mu nu b1 b2 b3.
    pub fn flat(&self) -> Vec<Coeff> {
        let mut v: Vec<Coeff> = self.q.to_vec();
        for row in &self.a {
            v.extend(row.iter().cloned());
        }
        v.extend(self.b.iter().cloned());
        v
    }

    pub fn from_flat(v: &[Coeff]) -> BiQuadData {
        assert_eq!(v.len(), 15);
        BiQuadData {
            q: std::array::from_fn(|i| v[i].clone()),
            a: std::array::from_fn(|r| std::array::from_fn(|c| v[3 + 3 * r + c].clone())),
            b: std::array::from_fn(|i| v[12 + i].clone()),
        }
    }
}

/// A family tag together with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Bh { h: Coeff },
    Hpq { p: Coeff, q: Coeff },
    M2 { alpha: Coeff, beta: Coeff },
    UqB2 { q: Coeff },
    /// `lambda` is the full n×n matrix.
    WeylMalt { q: Vec<Coeff>, lambda: Vec<Vec<Coeff>> },
    WeylAJ { q: Vec<Coeff>, lambda: Vec<Vec<Coeff>> },
    BiQuad3(BiQuadData),
    ThreeCyclic { q: Coeff, alpha: Coeff, beta: Coeff, gamma: Coeff },
    DownUp { alpha: Coeff, beta: Coeff, gamma: Coeff },
    /// `f` lists coefficients of f(t) from the constant term up.
    Bqf { q: Coeff, f: Vec<Coeff> },
    QuantumPlane { q: Coeff },
}

impl FamilySpec {
    pub fn tag(&self) -> FamilyTag {
        match self {
            FamilySpec::Bh { .. } => FamilyTag::Bh,
            FamilySpec::Hpq { .. } => FamilyTag::Hpq,
            FamilySpec::M2 { .. } => FamilyTag::M2,
            FamilySpec::UqB2 { .. } => FamilyTag::UqB2,
            FamilySpec::WeylMalt { .. } => FamilyTag::WeylMalt,
            FamilySpec::WeylAJ { .. } => FamilyTag::WeylAJ,
            FamilySpec::BiQuad3(_) => FamilyTag::BiQuad3,
            FamilySpec::ThreeCyclic { .. } => FamilyTag::ThreeCyclic,
            FamilySpec::DownUp { .. } => FamilyTag::DownUp,
            FamilySpec::Bqf { .. } => FamilyTag::Bqf,
            FamilySpec::QuantumPlane { .. } => FamilyTag::QuantumPlane,
        }
    }

    /// Named scalar parameters in a fixed order (Bqf's polynomial appears as `f`).
    pub fn named_params(&self) -> Vec<(String, Coeff)> {
        let n = |s: &str, c: &Coeff| (s.to_string(), c.clone());
        match self {
            FamilySpec::Bh { h } => vec![n("h", h)],
            FamilySpec::Hpq { p, q } => vec![n("p", p), n("q", q)],
            FamilySpec::M2 { alpha, beta } => vec![n("alpha", alpha), n("beta", beta)],
            FamilySpec::UqB2 { q } | FamilySpec::QuantumPlane { q } | FamilySpec::Bqf { q, .. } => {
                vec![n("q", q)]
            }
            FamilySpec::WeylMalt { q, lambda } | FamilySpec::WeylAJ { q, lambda } => {
                let mut v: Vec<(String, Coeff)> =
                    q.iter().enumerate().map(|(i, c)| (format!("q{}", i + 1), c.clone())).collect();
                for i in 0..q.len() {
                    for j in i + 1..q.len() {
                        v.push((format!("l{}{}", i + 1, j + 1), lambda[i][j].clone()));
                    }
                }
                v
            }
            FamilySpec::BiQuad3(d) => {
                BIQUAD_NAMES.iter().zip(d.flat()).map(|(s, c)| (s.to_string(), c)).collect()
            }
            FamilySpec::ThreeCyclic { q, alpha, beta, gamma } => {
                vec![n("q", q), n("alpha", alpha), n("beta", beta), n("gamma", gamma)]
            }
            FamilySpec::DownUp { alpha, beta, gamma } => {
                vec![n("alpha", alpha), n("beta", beta), n("gamma", gamma)]
            }
        }
    }

    pub fn field(&self) -> Field {
        self.named_params()[0].1.field().clone()
    }

    /// Parameter echo for reports; Bqf's polynomial is rendered in `t`.
    pub fn params_echo(&self) -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> =
            self.named_params().into_iter().map(|(k, c)| (k, c.to_string())).collect();
        if let FamilySpec::Bqf { f, .. } = self {
            v.push(("f".into(), render_univariate(f, "t")));
        }
        v
    }

    /// Builds a spec from named parameter values. Missing BiQuad3 tail entries
    /// default to zero; every other parameter is required.
    pub fn from_named(
        tag: FamilyTag,
        field: &Field,
        params: &BTreeMap<String, Coeff>,
        f: Option<Vec<Coeff>>,
    ) -> Result<FamilySpec, PresentationError> {
        let get = |name: &str| -> Result<Coeff, PresentationError> {
            params
                .get(name)
                .cloned()
                .ok_or_else(|| PresentationError::Invalid(format!("missing parameter `{name}`")))
        };
        let allowed: Vec<String> = match tag {
            FamilyTag::WeylMalt | FamilyTag::WeylAJ => Vec::new(),
            _ => tag.param_names().iter().map(|s| s.to_string()).collect(),
        };
        if !matches!(tag, FamilyTag::WeylMalt | FamilyTag::WeylAJ) {
            if let Some(k) = params.keys().find(|k| !allowed.contains(k)) {
                return Err(PresentationError::Invalid(format!("unexpected parameter `{k}` for {tag}")));
            }
        }
        for c in params.values() {
            if c.field() != field {
                return Err(NumError::CtxMismatch(c.field().to_string(), field.to_string()).into());
            }
        }
        Ok(match tag {
            FamilyTag::Bh => FamilySpec::Bh { h: get("h")? },
            FamilyTag::Hpq => FamilySpec::Hpq { p: get("p")?, q: get("q")? },
            FamilyTag::M2 => FamilySpec::M2 { alpha: get("alpha")?, beta: get("beta")? },
            FamilyTag::UqB2 => FamilySpec::UqB2 { q: get("q")? },
            FamilyTag::QuantumPlane => FamilySpec::QuantumPlane { q: get("q")? },
            FamilyTag::ThreeCyclic => FamilySpec::ThreeCyclic {
                q: get("q")?,
                alpha: get("alpha")?,
                beta: get("beta")?,
                gamma: get("gamma")?,
            },
            FamilyTag::DownUp => FamilySpec::DownUp {
                alpha: get("alpha")?,
                beta: get("beta")?,
                gamma: get("gamma")?,
            },
            FamilyTag::Bqf => FamilySpec::Bqf {
                q: get("q")?,
                f: f.ok_or_else(|| PresentationError::Invalid("Bqf needs a polynomial f".into()))?,
            },
            FamilyTag::BiQuad3 => {
                let mut v = Vec::with_capacity(15);
                for (i, name) in BIQUAD_NAMES.iter().enumerate() {
                    v.push(match params.get(*name) {
                        Some(c) => c.clone(),
                        None if i >= 3 => field.zero(),
                        None => return Err(PresentationError::Invalid(format!("missing parameter `{name}`"))),
                    });
                }
                FamilySpec::BiQuad3(BiQuadData::from_flat(&v))
            }
            FamilyTag::WeylMalt | FamilyTag::WeylAJ => {
                let mut n = 0;
                while params.contains_key(&format!("q{}", n + 1)) {
                    n += 1;
                }
                if n == 0 {
                    return Err(PresentationError::Invalid("Weyl families need q1..qn".into()));
                }
                let mut expected: Vec<String> = (1..=n).map(|i| format!("q{i}")).collect();
                let mut lambda = vec![vec![field.one(); n]; n];
                for i in 0..n {
                    for j in i + 1..n {
                        let name = format!("l{}{}", i + 1, j + 1);
                        let l = get(&name)?;
                        lambda[j][i] = if l.is_zero() { field.zero() } else { l.inv()? };
                        lambda[i][j] = l;
                        expected.push(name);
                    }
                }
                if let Some(k) = params.keys().find(|k| !expected.contains(k)) {
                    return Err(PresentationError::Invalid(format!("unexpected parameter `{k}` for {tag}")));
                }
                let q = (1..=n).map(|i| get(&format!("q{i}"))).collect::<Result<Vec<_>, _>>()?;
                if tag == FamilyTag::WeylMalt {
                    FamilySpec::WeylMalt { q, lambda }
                } else {
                    FamilySpec::WeylAJ { q, lambda }
                }
            }
        })
    }
}

/// Renders coefficients (constant term first) as a polynomial in `var`.
pub fn render_univariate(f: &[Coeff], var: &str) -> String {
    let parts: Vec<String> = f
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| {
            let mono = match j {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{j}"),
            };
            let cs = c.to_string();
            let cs = if cs.contains([' ', '/']) { format!("({cs})") } else { cs };
            match (j, c.is_one()) {
                (0, _) => cs,
                (_, true) => mono,
                _ => format!("{cs}*{mono}"),
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Parses a univariate polynomial in `var` with coefficients in `field`.
pub fn parse_univariate(field: &Field, s: &str, var: &str) -> Result<Vec<Coeff>, PresentationError> {
    fn trim(mut v: Vec<Coeff>) -> Vec<Coeff> {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        v
    }
    fn mul(a: &[Coeff], b: &[Coeff], f: &Field) -> Vec<Coeff> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![f.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
        trim(out)
    }
    fn add(a: &[Coeff], b: &[Coeff], f: &Field) -> Vec<Coeff> {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| {
                    let x = a.get(i).cloned().unwrap_or_else(|| f.zero());
                    let y = b.get(i).cloned().unwrap_or_else(|| f.zero());
                    x + y
                })
                .collect(),
        )
    }
    fn ev(e: &Expr, f: &Field, var: &str) -> Result<Vec<Coeff>, PresentationError> {
        let scalar = |v: &[Coeff]| -> Option<Coeff> {
            match v.len() {
                0 => Some(f.zero()),
                1 => Some(v[0].clone()),
                _ => None,
            }
        };
        Ok(match e {
            Expr::Int(n) => trim(vec![f.from_bigint(n)]),
            Expr::Sym(s) if s == var => vec![f.zero(), f.one()],
            Expr::Sym(s) => trim(vec![f.symbol(s)?]),
            Expr::Neg(a) => ev(a, f, var)?.into_iter().map(|c| -c).collect(),
            Expr::Add(a, b) => add(&ev(a, f, var)?, &ev(b, f, var)?, f),
            Expr::Sub(a, b) => {
                let nb: Vec<Coeff> = ev(b, f, var)?.into_iter().map(|c| -c).collect();
                add(&ev(a, f, var)?, &nb, f)
            }
            Expr::Mul(a, b) => mul(&ev(a, f, var)?, &ev(b, f, var)?, f),
            Expr::Div(a, b) => {
                let d = scalar(&ev(b, f, var)?)
                    .ok_or_else(|| PresentationError::Invalid(format!("cannot divide by a polynomial in {var}")))?;
                let di = d.inv()?;
                ev(a, f, var)?.into_iter().map(|c| c * &di).collect()
            }
            Expr::Pow(a, k) => {
                let base = ev(a, f, var)?;
                if *k < 0 {
                    let c = scalar(&base).ok_or_else(|| {
                        PresentationError::Invalid(format!("negative power of a polynomial in {var}"))
                    })?;
                    trim(vec![c.pow(*k)?])
                } else {
                    let mut out = vec![f.one()];
                    for _ in 0..*k {
                        out = mul(&out, &base, f);
                    }
                    out
                }
            }
        })
    }
    ev(&parse_expr(s)?, field, var)
}

struct Builder<'a> {
    field: &'a Field,
    names: Vec<String>,
    rules: Vec<RewriteRule>,
}

impl<'a> Builder<'a> {
    fn new(field: &'a Field, names: &[&str]) -> Self {
        Builder { field, names: names.iter().map(|s| s.to_string()).collect(), rules: Vec::new() }
    }

    fn w(&self, word: &[&str]) -> Word {
        word.iter()
            .map(|n| self.names.iter().position(|g| g == n).expect("known generator") as u8)
            .collect()
    }

    fn rule(&mut self, lhs: &[&str], rhs: Vec<(Coeff, Vec<&str>)>) {
        let rhs = FreePoly::from_terms(self.field, rhs.into_iter().map(|(c, w)| (c, self.w(&w))));
        let lhs = self.w(lhs);
        self.rules.push(RewriteRule { lhs, rhs });
    }

    fn finish(self, weights: Vec<u32>, precedence: &[&str]) -> Result<Presentation, PresentationError> {
        let prec: Vec<String> = precedence.iter().map(|s| s.to_string()).collect();
        Presentation::new(self.field.clone(), self.names, weights, &prec, self.rules)
    }
}

fn nonzero(name: &str, c: &Coeff) -> Result<(), PresentationError> {
    if c.is_zero() {
        Err(PresentationError::ZeroParameter(name.into()))
    } else {
        Ok(())
    }
}

fn check_field(spec: &FamilySpec) -> Result<Field, PresentationError> {
    let field = spec.field();
    let mut all: Vec<Coeff> = spec.named_params().into_iter().map(|(_, c)| c).collect();
    match spec {
        FamilySpec::Bqf { f, .. } => all.extend(f.iter().cloned()),
        FamilySpec::WeylMalt { lambda, .. } | FamilySpec::WeylAJ { lambda, .. } => {
            all.extend(lambda.iter().flatten().cloned())
        }
        _ => {}
    }
    for c in all {
        if c.field() != &field {
            return Err(NumError::CtxMismatch(c.field().to_string(), field.to_string()).into());
        }
    }
    Ok(field)
}

fn check_lambda(q: &[Coeff], lambda: &[Vec<Coeff>]) -> Result<(), PresentationError> {
    let n = q.len();
    if n == 0 {
        return Err(PresentationError::Invalid("Weyl families need n >= 1".into()));
    }
    if lambda.len() != n || lambda.iter().any(|r| r.len() != n) {
        return Err(PresentationError::NonAntisymmetricLambda(format!("lambda must be {n}x{n}")));
    }
    for (i, qi) in q.iter().enumerate() {
        nonzero(&format!("q{}", i + 1), qi)?;
    }
    for i in 0..n {
        if !lambda[i][i].is_one() {
            return Err(PresentationError::NonAntisymmetricLambda(format!("lambda_{0}{0} != 1", i + 1)));
        }
        for j in i + 1..n {
            nonzero(&format!("l{}{}", i + 1, j + 1), &lambda[i][j])?;
            nonzero(&format!("l{}{}", j + 1, i + 1), &lambda[j][i])?;
            if !(&lambda[i][j] * &lambda[j][i]).is_one() {
                return Err(PresentationError::NonAntisymmetricLambda(format!(
                    "lambda_{0}{1} * lambda_{1}{0} != 1",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

/// Builds the oriented presentation of a family instance.
pub fn build_family(spec: &FamilySpec) -> Result<Presentation, PresentationError> {
    let field = check_field(spec)?;
    let f = &field;
    let one = f.one();
    let pres = match spec {
        FamilySpec::Bh { h } => {
            nonzero("h", h)?;
            let mut b = Builder::new(f, &["x1", "x2", "y1", "y2"]);
            let mh = -h;
            b.rule(&["x2", "x1"], vec![(-&one, vec!["x1", "x2"])]);
            b.rule(&["y2", "y1"], vec![(-&one, vec!["y1", "y2"])]);
            b.rule(
                &["y1", "x1"],
                vec![(h.clone(), vec!["x1", "y1"]), (h.clone(), vec!["x2", "y1"]), (h.clone(), vec!["x1", "y2"])],
            );
            b.rule(&["y1", "x2"], vec![(h.clone(), vec!["x1", "y2"])]);
            b.rule(&["y2", "x1"], vec![(h.clone(), vec!["x2", "y1"])]);
            b.rule(
                &["y2", "x2"],
                vec![(mh.clone(), vec!["x2", "y1"]), (mh, vec!["x1", "y2"]), (h.clone(), vec!["x2", "y2"])],
            );
            b.finish(vec![1; 4], &["x1", "x2", "y1", "y2"])?
        }
        FamilySpec::Hpq { p, q } => {
            nonzero("p", p)?;
            nonzero("q", q)?;
            let mut b = Builder::new(f, &["t", "x", "y"]);
            b.rule(&["x", "t"], vec![(p.clone(), vec!["t", "x"])]);
            b.rule(&["y", "t"], vec![(p.inv()?, vec!["t", "y"])]);
            b.rule(&["y", "x"], vec![(q.clone(), vec!["x", "y"]), (one.clone(), vec!["t"])]);
            b.finish(vec![1; 3], &["t", "x", "y"])?
        }
        FamilySpec::M2 { alpha, beta } => {
            nonzero("alpha", alpha)?;
            nonzero("beta", beta)?;
            let ai = alpha.inv()?;
            let mut b = Builder::new(f, &["X11", "X12", "X21", "X22"]);
            b.rule(&["X12", "X11"], vec![(alpha.clone(), vec!["X11", "X12"])]);
            b.rule(&["X21", "X11"], vec![(beta.clone(), vec!["X11", "X21"])]);
            b.rule(&["X21", "X12"], vec![(beta * &ai, vec!["X12", "X21"])]);
            b.rule(&["X22", "X11"], vec![(one.clone(), vec!["X11", "X22"]), (beta - &ai, vec!["X12", "X21"])]);
            b.rule(&["X22", "X12"], vec![(beta.clone(), vec!["X12", "X22"])]);
            b.rule(&["X22", "X21"], vec![(alpha.clone(), vec!["X21", "X22"])]);
            b.finish(vec![1; 4], &["X11", "X12", "X21", "X22"])?
        }
        FamilySpec::UqB2 { q } => {
            nonzero("q", q)?;
            let q2 = q.pow(2)?;
            let qm2 = q.pow(-2)?;
            let mut b = Builder::new(f, &["z", "e3", "e1", "e2"]);
            for e in ["e3", "e1", "e2"] {
                b.rule(&[e, "z"], vec![(one.clone(), vec!["z", e])]);
            }
            b.rule(&["e1", "e3"], vec![(qm2.clone(), vec!["e3", "e1"])]);
            b.rule(&["e2", "e1"], vec![(qm2.clone(), vec!["e1", "e2"]), (-&qm2, vec!["e3"])]);
            b.rule(&["e2", "e3"], vec![(q2, vec!["e3", "e2"]), (one.clone(), vec!["z"])]);
            b.finish(vec![1; 4], &["z", "e3", "e1", "e2"])?
        }
        FamilySpec::WeylMalt { q, lambda } | FamilySpec::WeylAJ { q, lambda } => {
            check_lambda(q, lambda)?;
            let malt = matches!(spec, FamilySpec::WeylMalt { .. });
            let n = q.len();
            let xs: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            let ys: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
            let mut gens: Vec<&str> = Vec::new();
            let mut prec: Vec<&str> = Vec::new();
            for i in 0..n {
                gens.extend([xs[i].as_str(), ys[i].as_str()]);
                prec.extend([ys[i].as_str(), xs[i].as_str()]);
            }
            let mut b = Builder::new(f, &gens);
            for j in 0..n {
                for i in 0..j {
                    let l = &lambda[i][j];
                    let li = l.inv()?;
                    let (xx, xy) = if malt { (&q[i] * l, &q[i] * l) } else { (l.clone(), l.clone()) };
                    // x_i x_j = xx x_j x_i, x_i y_j = l^-1 y_j x_i, y_i y_j = l y_j y_i,
                    // y_i x_j = xy^-1 x_j y_i.
                    b.rule(&[&xs[j], &xs[i]], vec![(xx.inv()?, vec![&xs[i], &xs[j]])]);
                    b.rule(&[&ys[j], &xs[i]], vec![(l.clone(), vec![&xs[i], &ys[j]])]);
                    b.rule(&[&ys[j], &ys[i]], vec![(li, vec![&ys[i], &ys[j]])]);
                    b.rule(&[&xs[j], &ys[i]], vec![(xy, vec![&ys[i], &xs[j]])]);
                }
                let mut rhs = vec![(q[j].clone(), vec![ys[j].as_str(), xs[j].as_str()]), (one.clone(), vec![])];
                if malt {
                    for k in 0..j {
                        rhs.push((&q[k] - &one, vec![ys[k].as_str(), xs[k].as_str()]));
                    }
                }
                b.rule(&[&xs[j], &ys[j]], rhs);
            }
            b.finish(vec![1; 2 * n], &prec)?
        }
        FamilySpec::BiQuad3(d) => {
            for (i, qi) in d.q.iter().enumerate() {
                nonzero(&format!("q{}", i + 1), qi)?;
            }
            let mut b = Builder::new(f, &["x1", "x2", "x3"]);
            let lhs = [["x2", "x1"], ["x3", "x1"], ["x3", "x2"]];
            for (r, l) in lhs.iter().enumerate() {
                let mut rhs = vec![(d.q[r].clone(), vec![l[1], l[0]])];
                for (k, g) in ["x1", "x2", "x3"].iter().enumerate() {
                    rhs.push((d.a[r][k].clone(), vec![*g]));
                }
                rhs.push((d.b[r].clone(), vec![]));
                b.rule(l, rhs);
            }
            b.finish(vec![1; 3], &["x1", "x2", "x3"])?
        }
        FamilySpec::ThreeCyclic { q, alpha, beta, gamma } => {
            nonzero("q", q)?;
            let q2 = q.pow(2)?;
            let qm2 = q.pow(-2)?;
            let mut b = Builder::new(f, &["x", "y", "z"]);
            b.rule(&["y", "x"], vec![(qm2.clone(), vec!["x", "y"]), (-(&qm2 * alpha), vec![])]);
            b.rule(&["z", "x"], vec![(q2.clone(), vec!["x", "z"]), (-(&q2 * beta), vec![])]);
            b.rule(&["z", "y"], vec![(qm2.clone(), vec!["y", "z"]), (-(&qm2 * gamma), vec![])]);
            b.finish(vec![1; 3], &["x", "y", "z"])?
        }
        FamilySpec::DownUp { alpha, beta, gamma } => {
            if beta.is_zero() {
                return Err(PresentationError::DownUpNotNoetherian);
            }
            let mut b = Builder::new(f, &["u", "d"]);
            b.rule(
                &["d", "u", "u"],
                vec![
                    (alpha.clone(), vec!["u", "d", "u"]),
                    (beta.clone(), vec!["u", "u", "d"]),
                    (gamma.clone(), vec!["u"]),
                ],
            );
            b.rule(
                &["d", "d", "u"],
                vec![
                    (alpha.clone(), vec!["d", "u", "d"]),
                    (beta.clone(), vec!["u", "d", "d"]),
                    (gamma.clone(), vec!["d"]),
                ],
            );
            b.finish(vec![1; 2], &["u", "d"])?
        }
        FamilySpec::Bqf { q, f: fc } => {
            nonzero("q", q)?;
            let deg = fc.iter().rposition(|c| !c.is_zero()).unwrap_or(0) as u32;
            let mut b = Builder::new(f, &["v", "u", "w"]);
            let fv = |g: &'static str| -> Vec<(Coeff, Vec<&'static str>)> {
                fc.iter().enumerate().map(|(j, c)| (c.clone(), vec![g; j])).collect()
            };
            b.rule(&["u", "v"], vec![(q.clone(), vec!["v", "u"])]);
            let mut r = vec![(q.inv()?, vec!["v", "w"])];
            r.extend(fv("u"));
            b.rule(&["w", "v"], r);
            let mut r = vec![(q.clone(), vec!["u", "w"])];
            r.extend(fv("v"));
            b.rule(&["w", "u"], r);
            b.finish(vec![1, 1, deg.max(1)], &["v", "u", "w"])?
        }
        FamilySpec::QuantumPlane { q } => {
            nonzero("q", q)?;
            let mut b = Builder::new(f, &["x", "y"]);
            b.rule(&["y", "x"], vec![(q.clone(), vec!["x", "y"])]);
            b.finish(vec![1; 2], &["x", "y"])?
        }
    };
    let rep = pres.validate_orientation();
    if !rep.pass {
        let bad = rep.rules.iter().find(|r| !r.pass).expect("failing rule");
        return Err(PresentationError::OrientationFailure(format!(
            "{} -> {}",
            bad.lhs,
            bad.offending.clone().unwrap_or_default()
        )));
    }
    Ok(pres.with_metadata(Metadata { family: Some(spec.tag()), params: spec.params_echo(), spec: Some(spec.clone()) }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qf() -> Field {
        Field::ratfunc(&["p", "q"]).unwrap()
    }

    #[test]
    fn hpq_shape() {
        let f = qf();
        let spec = FamilySpec::Hpq { p: f.param("p").unwrap(), q: f.param("q").unwrap() };
        let p = build_family(&spec).unwrap();
        assert_eq!(p.generators(), ["t", "x", "y"]);
        assert_eq!(p.rules().len(), 3);
        let r = &p.rules()[2];
        assert_eq!(p.render_word(&r.lhs), "y*x");
        assert_eq!(p.render(&r.rhs), "q*x*y + t");
    }

    #[test]
    fn downup_beta_zero_rejected() {
        let f = Field::rational();
        let spec = FamilySpec::DownUp { alpha: f.int(1), beta: f.zero(), gamma: f.int(1) };
        assert_eq!(build_family(&spec).unwrap_err(), PresentationError::DownUpNotNoetherian);
    }

    #[test]
    fn m2_has_six_rules() {
        let f = Field::ratfunc(&["alpha", "beta"]).unwrap();
        let spec = FamilySpec::M2 { alpha: f.param("alpha").unwrap(), beta: f.param("beta").unwrap() };
        let p = build_family(&spec).unwrap();
        assert_eq!(p.generators().len(), 4);
        assert_eq!(p.rules().len(), 6);
    }

    #[test]
    fn zero_parameters_rejected() {
        let f = Field::rational();
        let spec = FamilySpec::Hpq { p: f.zero(), q: f.int(2) };
        assert_eq!(build_family(&spec).unwrap_err(), PresentationError::ZeroParameter("p".into()));
    }

    #[test]
    fn lambda_must_be_antisymmetric() {
        let f = Field::rational();
        let q = vec![f.int(2), f.int(3)];
        let lambda = vec![vec![f.one(), f.int(2)], vec![f.int(2), f.one()]];
        assert!(matches!(
            build_family(&FamilySpec::WeylMalt { q, lambda }),
            Err(PresentationError::NonAntisymmetricLambda(_))
        ));
    }

    #[test]
    fn bqf_weight_follows_degree() {
        let f = Field::ratfunc(&["q"]).unwrap();
        let fc = parse_univariate(&f, "t^3", "t").unwrap();
        let p = build_family(&FamilySpec::Bqf { q: f.param("q").unwrap(), f: fc }).unwrap();
        assert_eq!(p.weights(), [1, 1, 3]);
        assert!(p.validate_orientation().pass);
    }

    #[test]
    fn univariate_parsing() {
        let f = Field::rational();
        let v = parse_univariate(&f, "t + t^5 - 2", "t").unwrap();
        assert_eq!(v.len(), 6);
        assert_eq!(v[0], f.int(-2));
        assert_eq!(render_univariate(&v, "t"), "-2 + t + t^5");
        assert!(parse_univariate(&f, "t^2", "t").unwrap()[2].is_one());
    }

    #[test]
    fn every_family_builds_deterministically() {
        let f = Field::cyclotomic(12).unwrap();
        for tag in FamilyTag::ALL {
            let spec = sample_spec(tag, &f);
            let a = build_family(&spec).unwrap();
            let b = build_family(&spec).unwrap();
            assert_eq!(a, b, "{tag}");
            assert_eq!(a.family(), Some(tag));
        }
    }

    fn sample_spec(tag: FamilyTag, f: &Field) -> FamilySpec {
        let z = f.zeta(12).unwrap();
        let mut m = BTreeMap::new();
        let names: Vec<String> = match tag {
            FamilyTag::WeylMalt | FamilyTag::WeylAJ => vec!["q1".into(), "q2".into(), "l12".into()],
            _ => tag.param_names().iter().map(|s| s.to_string()).collect(),
        };
        for (i, n) in names.iter().enumerate() {
            m.insert(n.clone(), z.pow(i as i64 + 1).unwrap());
        }
        FamilySpec::from_named(tag, f, &m, Some(vec![f.zero(), f.one()])).unwrap()
    }
}
