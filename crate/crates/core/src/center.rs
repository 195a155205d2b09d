//! Central elements: centrality tests, per-family candidates, the down-up
//! automorphism analysis and finite-over-center spanning checks.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::exactnum::cyclo::lcm;
use crate::exactnum::prime_factors;
use crate::exactnum::{Coeff, Field, FieldKind, NumError};
use crate::linalg::{kernel, SparseEchelon};
use crate::presentation::{
    build_family, FamilySpec, FamilyTag, FreePoly, GenId, NCPoly, Presentation, PresentationError, Word,
};
use crate::rewrite::{is_confluent, normal_form, RewriteError};

/// Largest exponent searched for relations `mu^i lambda^j = 1` when a root is not
/// a root of unity.
pub const EIGEN_SEARCH_BOUND: u64 = 8;

/// Hard ceiling for the default spanning degree.
pub const SPANNING_DEGREE_CEILING: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CenterError {
    #[error("presentation is not confluent; normal forms are not unique")]
    NonConfluentPresentation,
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(Unmet),
    #[error("the roots of t^2 - alpha t - beta are not available in the field; pass them explicitly")]
    RootsRequired,
    #[error("supplied roots do not satisfy lambda + mu = alpha and lambda mu = -beta")]
    InvalidRoots,
    #[error("beta = 0: the down-up algebra is not noetherian")]
    BetaZero,
    #[error("the linear part is not invertible")]
    NotAutomorphism,
    #[error("no center condition holds; the center is trivial")]
    TrivialCenter,
    #[error("expected a {expected} instance, got {found}")]
    FamilyMismatch { expected: String, found: String },
    #[error("{expected} exponent caps expected, got {found}")]
    CapsMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Why a family's central candidates are unavailable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Unmet {
    NotRootOfUnity(String),
    OrderTooSmall { param: String, order: u64, min: u64 },
    /// `pq = 1` in `H_{p,q}`, or `q^2 = 1` in the 3-cyclic algebra.
    Degenerate(String),
    /// Some `j` in the support of `f` violates both divisibility routes.
    Support(String),
    /// The characteristic-p alternative `p | n` can never hold: orders of roots of
    /// unity in characteristic p are prime to p.
    VacuousCharPCase,
    NoCandidates(FamilyTag),
}

impl fmt::Display for Unmet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unmet::NotRootOfUnity(p) => write!(f, "{p} is not a root of unity"),
            Unmet::OrderTooSmall { param, order, min } => {
                write!(f, "{param} has order {order}, at least {min} is required")
            }
            Unmet::Degenerate(s) => write!(f, "{s}"),
            Unmet::Support(s) => write!(f, "{s}"),
            Unmet::VacuousCharPCase => {
                write!(f, "the alternative p | n is vacuous in characteristic p and the support condition fails")
            }
            Unmet::NoCandidates(t) => write!(f, "no central candidates are known for {t}"),
        }
    }
}

fn unmet(u: Unmet) -> CenterError {
    CenterError::HypothesisNotMet(u)
}

/// Outcome of a centrality test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Centrality {
    pub central: bool,
    /// First generator `g` with `a g - g a != 0`, and that residual.
    pub witness: Option<(String, NCPoly)>,
}

/// Tests whether `a` commutes with every generator.
pub fn is_central(p: &Presentation, a: &FreePoly) -> Result<Centrality, CenterError> {
    if !is_confluent(p)? {
        return Err(CenterError::NonConfluentPresentation);
    }
    central_residual(p, a)
}

/// [`is_central`] without the confluence check, for callers that already did it.
pub fn central_residual(p: &Presentation, a: &FreePoly) -> Result<Centrality, CenterError> {
    let f = p.field();
    for (i, name) in p.generators().iter().enumerate() {
        let g = FreePoly::word(f, Word::from_slice(&[i as GenId]));
        let r = normal_form(p, &a.mul(&g).sub(&g.mul(a)))?;
        if !r.is_zero() {
            return Ok(Centrality { central: false, witness: Some((name.clone(), r)) });
        }
    }
    Ok(Centrality { central: true, witness: None })
}

/// A candidate central element with the parameter condition it is claimed under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralElement {
    pub name: String,
    pub element: NCPoly,
    pub condition: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralSet {
    pub family: Option<FamilyTag>,
    pub elements: Vec<CentralElement>,
    pub note: String,
}

impl CentralSet {
    pub fn names(&self) -> Vec<&str> {
        self.elements.iter().map(|e| e.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&NCPoly> {
        self.elements.iter().find(|e| e.name == name).map(|e| &e.element)
    }

    fn push(&mut self, p: &Presentation, name: String, raw: &FreePoly, condition: &str) -> Result<(), CenterError> {
        let element = normal_form(p, raw)?;
        if self.elements.iter().any(|e| e.element == element) {
            return Ok(());
        }
        self.elements.push(CentralElement { name, element, condition: condition.to_string() });
        Ok(())
    }
}

/// Checks every element of `set` for centrality; returns the names that fail.
pub fn check_central_set(p: &Presentation, set: &CentralSet) -> Result<Vec<(String, Centrality)>, CenterError> {
    if !is_confluent(p)? {
        return Err(CenterError::NonConfluentPresentation);
    }
    let mut bad = Vec::new();
    for e in &set.elements {
        let c = central_residual(p, &e.element)?;
        if !c.central {
            bad.push((e.name.clone(), c));
        }
    }
    Ok(bad)
}

fn gen(p: &Presentation, name: &str) -> FreePoly {
    FreePoly::word(p.field(), p.word_of(&[name]))
}

fn word(p: &Presentation, names: &[&str]) -> FreePoly {
    FreePoly::word(p.field(), p.word_of(names))
}

fn order_of(name: &str, c: &Coeff) -> Result<u64, CenterError> {
    c.root_of_unity_order()?.ok_or_else(|| unmet(Unmet::NotRootOfUnity(name.to_string())))
}

fn mismatch(expected: &str, spec: &FamilySpec) -> CenterError {
    CenterError::FamilyMismatch { expected: expected.into(), found: spec.tag().to_string() }
}

/// Support of a coefficient list.
pub fn support(f: &[Coeff]) -> Vec<u64> {
    f.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, _)| j as u64).collect()
}

/// The known central elements of a family instance at roots of unity.
pub fn central_candidates(spec: &FamilySpec) -> Result<CentralSet, CenterError> {
    let p = build_family(spec)?;
    let mut set = CentralSet { family: Some(spec.tag()), elements: Vec::new(), note: String::new() };
    match spec {
        FamilySpec::Bh { h } => {
            let l = order_of("h", h)?;
            let u = word(&p, &["x1", "x2"]);
            let v = word(&p, &["y1", "y2"]);
            let s = word(&p, &["x1", "x1"]).add(&word(&p, &["x2", "x2"]));
            let t = word(&p, &["y1", "y1"]).add(&word(&p, &["y2", "y2"]));
            let cond = format!("h^{l} = 1; u = x1*x2, s = x1^2 + x2^2, v = y1*y2, t = y1^2 + y2^2");
            let l2 = 2 * l as u32;
            set.push(&p, format!("u^{l2}"), &u.pow(l2), &cond)?;
            set.push(&p, format!("s^{l}"), &s.pow(l as u32), &cond)?;
            set.push(&p, format!("v^{l2}"), &v.pow(l2), &cond)?;
            set.push(&p, format!("t^{l}"), &t.pow(l as u32), &cond)?;
            set.note = "powers of the quadratic elements u, s, v, t".into();
        }
        FamilySpec::Hpq { p: pp, q } => {
            if (pp * q).is_one() {
                return Err(unmet(Unmet::Degenerate("pq = 1".into())));
            }
            let n = order_of("p", pp)?;
            let m = order_of("q", q)?;
            let cond = format!("p^{n} = 1, q^{m} = 1, pq != 1");
            let e = (m * n) as u32;
            set.push(&p, format!("x^{e}"), &gen(&p, "x").pow(e), &cond)?;
            set.push(&p, format!("y^{e}"), &gen(&p, "y").pow(e), &cond)?;
            set.push(&p, format!("t^{n}"), &gen(&p, "t").pow(n as u32), &cond)?;
            set.note = "x^(mn), y^(mn), t^n with n = ord p, m = ord q".into();
        }
        FamilySpec::M2 { alpha, beta } => {
            let l = lcm(order_of("alpha", alpha)?, order_of("beta", beta)?) as u32;
            let cond = format!("alpha^{l} = beta^{l} = 1");
            for g in ["X11", "X12", "X21", "X22"] {
                set.push(&p, format!("{g}^{l}"), &gen(&p, g).pow(l), &cond)?;
            }
            set.note = "l-th powers of the generators".into();
        }
        FamilySpec::UqB2 { q } => {
            let l = order_of("q", q)?;
            if l < 5 {
                return Err(unmet(Unmet::OrderTooSmall { param: "q".into(), order: l, min: 5 }));
            }
            let cond = format!("q primitive {l}-th root of unity");
            set.push(&p, "z".into(), &gen(&p, "z"), "always")?;
            for g in ["e1", "e2", "e3"] {
                set.push(&p, format!("{g}^{l}"), &gen(&p, g).pow(l as u32), &cond)?;
            }
            set.note = "z and the l-th powers of e1, e2, e3".into();
        }
        FamilySpec::WeylMalt { q, lambda } | FamilySpec::WeylAJ { q, lambda } => {
            let l = weyl_order(q, lambda)? as u32;
            let cond = format!("all q_i and lambda_ij are {l}-th roots of unity, q_i != 1");
            for i in 1..=q.len() {
                for g in [format!("x{i}"), format!("y{i}")] {
                    set.push(&p, format!("{g}^{l}"), &gen(&p, &g).pow(l), &cond)?;
                }
            }
            set.note = "l-th powers of the generators, l the lcm of the parameter orders".into();
        }
        FamilySpec::ThreeCyclic { q, .. } => {
            let q2 = q.pow(2)?;
            if q2.is_one() {
                return Err(unmet(Unmet::Degenerate("q^2 = 1".into())));
            }
            let l = order_of("q^2", &q2)? as u32;
            let cond = format!("q^2 != 1 is a primitive {l}-th root of unity");
            for g in ["x", "y", "z"] {
                set.push(&p, format!("{g}^{l}"), &gen(&p, g).pow(l), &cond)?;
            }
            set.note = "l-th powers of x, y, z with l = ord q^2".into();
        }
        FamilySpec::DownUp { .. } => return downup_center_generators(spec, None),
        FamilySpec::Bqf { q, f } => bqf_candidates(&p, q, f, &mut set)?,
        FamilySpec::QuantumPlane { q } => {
            let n = order_of("q", q)? as u32;
            let cond = format!("q^{n} = 1");
            set.push(&p, format!("x^{n}"), &gen(&p, "x").pow(n), &cond)?;
            set.push(&p, format!("y^{n}"), &gen(&p, "y").pow(n), &cond)?;
            set.note = "n-th powers of x and y".into();
        }
        FamilySpec::BiQuad3(_) => return Err(unmet(Unmet::NoCandidates(FamilyTag::BiQuad3))),
    }
    Ok(set)
}

/// `lcm` of the orders of all `q_i` and `lambda_ij`; each `q_i` must differ from 1.
pub fn weyl_order(q: &[Coeff], lambda: &[Vec<Coeff>]) -> Result<u64, CenterError> {
    let mut l = 1;
    for (i, qi) in q.iter().enumerate() {
        if qi.is_one() {
            return Err(unmet(Unmet::Degenerate(format!("q{} = 1", i + 1))));
        }
        l = lcm(l, order_of(&format!("q{}", i + 1), qi)?);
    }
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            l = lcm(l, order_of(&format!("l{}{}", i + 1, j + 1), &lambda[i][j])?);
        }
    }
    Ok(l)
}

/// Which divisibility conditions on `supp(f)` hold for a root of unity of order `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BqfRoutes {
    /// `n | j` for every `j` in the support.
    pub support_divisible: bool,
    /// `n` divides no `j + 1` with `j` in the support.
    pub shifted_indivisible: bool,
}

pub fn bqf_routes(n: u64, f: &[Coeff]) -> BqfRoutes {
    let s = support(f);
    BqfRoutes {
        support_divisible: s.iter().all(|j| j % n == 0),
        shifted_indivisible: s.iter().all(|j| (j + 1) % n != 0),
    }
}

fn bqf_candidates(p: &Presentation, q: &Coeff, f: &[Coeff], set: &mut CentralSet) -> Result<(), CenterError> {
    let n = order_of("q", q)?;
    let r = bqf_routes(n, f);
    let field = p.field();
    if field.characteristic() > 0 {
        if !r.shifted_indivisible {
            return Err(unmet(Unmet::VacuousCharPCase));
        }
    } else if n < 2 {
        return Err(unmet(Unmet::OrderTooSmall { param: "q".into(), order: n, min: 2 }));
    } else if !r.support_divisible && !r.shifted_indivisible {
        return Err(unmet(Unmet::Support(format!(
            "{n} divides j + 1 for some j in supp(f) and does not divide every j"
        ))));
    }
    let e = n as u32;
    if r.support_divisible && field.characteristic() == 0 {
        let cond = format!("q primitive {n}-th root of unity, {n} | j for all j in supp(f)");
        let fu = poly_in(p, f, "u");
        let fv = poly_in(p, f, "v");
        set.push(p, "f(u)".into(), &fu, &cond)?;
        set.push(p, "f(v)".into(), &fv, &cond)?;
        set.push(p, format!("w^{n}"), &gen(p, "w").pow(e), &cond)?;
    }
    if r.shifted_indivisible {
        let cond = format!("q primitive {n}-th root of unity, {n} divides no j + 1 with j in supp(f)");
        set.push(p, format!("u^{n}"), &gen(p, "u").pow(e), &cond)?;
        set.push(p, format!("v^{n}"), &gen(p, "v").pow(e), &cond)?;
    }
    set.note = "powers of u, v, w and f(u), f(v) by the divisibility pattern of supp(f)".into();
    Ok(())
}

fn poly_in(p: &Presentation, f: &[Coeff], g: &str) -> FreePoly {
    let x = gen(p, g);
    let mut acc = FreePoly::zero(p.field());
    for (j, c) in f.iter().enumerate() {
        if !c.is_zero() {
            acc = acc.add(&x.pow(j as u32).scale(c));
        }
    }
    acc
}

/// Commutative polynomial in `x`, `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly {
    field: Field,
    terms: BTreeMap<(u32, u32), Coeff>,
}

impl BiPoly {
    pub fn zero(field: &Field) -> Self {
        BiPoly { field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(c: Coeff) -> Self {
        let mut p = BiPoly::zero(c.field());
        p.add_term((0, 0), c);
        p
    }

    /// `a x + b y + c`.
    pub fn linear(a: &Coeff, b: &Coeff, c: &Coeff) -> Self {
        let mut p = BiPoly::zero(a.field());
        p.add_term((1, 0), a.clone());
        p.add_term((0, 1), b.clone());
        p.add_term((0, 0), c.clone());
        p
    }

    pub fn monomial(field: &Field, a: u32, b: u32) -> Self {
        let mut p = BiPoly::zero(field);
        p.add_term((a, b), field.one());
        p
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Coeff)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    pub fn coeff(&self, a: u32, b: u32) -> Coeff {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(|| self.field.zero())
    }

    fn add_term(&mut self, m: (u32, u32), c: Coeff) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(|| c.field().zero());
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, o: &BiPoly) -> BiPoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &BiPoly) -> BiPoly {
        self.add(&o.scale(&-self.field.one()))
    }

    pub fn scale(&self, c: &Coeff) -> BiPoly {
        let mut r = BiPoly::zero(&self.field);
        for (m, x) in &self.terms {
            r.add_term(*m, x * c);
        }
        r
    }

    pub fn mul(&self, o: &BiPoly) -> BiPoly {
        let mut r = BiPoly::zero(&self.field);
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &o.terms {
                r.add_term((a + c, b + d), x * y);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> BiPoly {
        let mut r = BiPoly::constant(self.field.one());
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Substitutes noncommutative elements for `x` and `y`; they must commute for the
    /// result to be well defined.
    pub fn substitute(&self, x: &FreePoly, y: &FreePoly) -> FreePoly {
        let mut acc = FreePoly::zero(&self.field);
        for ((a, b), c) in &self.terms {
            acc = acc.add(&x.pow(*a).mul(&y.pow(*b)).scale(c));
        }
        acc
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for ((a, b), c) in self.terms.iter().rev() {
            let mut mono = Vec::new();
            for (v, e) in [("x", a), ("y", b)] {
                match e {
                    0 => {}
                    1 => mono.push(v.to_string()),
                    _ => mono.push(format!("{v}^{e}")),
                }
            }
            let m = mono.join("*");
            parts.push(match (m.is_empty(), c.is_one()) {
                (true, _) => format!("({c})"),
                (false, true) => m,
                (false, false) => format!("({c})*{m}"),
            });
        }
        parts.join(" + ")
    }
}

/// An automorphism of `k[x, y]` with affine images of `x` and `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineAuto {
    /// `phi(x) = l[0][0] x + l[0][1] y + t[0]`, `phi(y) = l[1][0] x + l[1][1] y + t[1]`.
    pub linear: [[Coeff; 2]; 2],
    pub translation: [Coeff; 2],
}

impl AffineAuto {
    pub fn new(linear: [[Coeff; 2]; 2], translation: [Coeff; 2]) -> Result<Self, CenterError> {
        let det = &(&linear[0][0] * &linear[1][1]) - &(&linear[0][1] * &linear[1][0]);
        if det.is_zero() {
            return Err(CenterError::NotAutomorphism);
        }
        Ok(AffineAuto { linear, translation })
    }

    /// `phi(x) = y`, `phi(y) = alpha y + beta x + gamma`.
    pub fn downup(alpha: &Coeff, beta: &Coeff, gamma: &Coeff) -> Result<Self, CenterError> {
        if beta.is_zero() {
            return Err(CenterError::BetaZero);
        }
        let f = alpha.field();
        AffineAuto::new([[f.zero(), f.one()], [beta.clone(), alpha.clone()]], [f.zero(), gamma.clone()])
    }

    pub fn field(&self) -> &Field {
        self.linear[0][0].field()
    }

    /// Image of `x` (`i = 0`) or `y` (`i = 1`).
    pub fn image(&self, i: usize) -> BiPoly {
        BiPoly::linear(&self.linear[i][0], &self.linear[i][1], &self.translation[i])
    }

    pub fn apply(&self, f: &BiPoly) -> BiPoly {
        let (px, py) = (self.image(0), self.image(1));
        let mut acc = BiPoly::zero(self.field());
        for ((a, b), c) in f.terms() {
            acc = acc.add(&px.pow(*a).mul(&py.pow(*b)).scale(c));
        }
        acc
    }

    /// `self` applied after `other`, as maps on `k[x, y]`.
    pub fn after(&self, other: &AffineAuto) -> AffineAuto {
        let f = self.field();
        let mut linear = [[f.zero(), f.zero()], [f.zero(), f.zero()]];
        let mut translation = [f.zero(), f.zero()];
        for i in 0..2 {
            for l in 0..2 {
                linear[i][l] = &(&other.linear[i][0] * &self.linear[0][l]) + &(&other.linear[i][1] * &self.linear[1][l]);
            }
            translation[i] = &(&(&other.linear[i][0] * &self.translation[0])
                + &(&other.linear[i][1] * &self.translation[1]))
                + &other.translation[i];
        }
        AffineAuto { linear, translation }
    }

    pub fn pow(&self, m: u64) -> AffineAuto {
        let f = self.field();
        let mut acc = AffineAuto {
            linear: [[f.one(), f.zero()], [f.zero(), f.one()]],
            translation: [f.zero(), f.zero()],
        };
        let mut base = self.clone();
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                acc = base.after(&acc);
            }
            base = base.after(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.linear[0][0].is_one()
            && self.linear[1][1].is_one()
            && self.linear[0][1].is_zero()
            && self.linear[1][0].is_zero()
            && self.translation.iter().all(|t| t.is_zero())
    }

    /// True when `self^m = id` and no `self^(m/r)` with `r` a prime factor of `m` is.
    pub fn has_exact_order(&self, m: u64) -> bool {
        m >= 1 && self.pow(m).is_identity() && prime_factors(m).iter().all(|r| !self.pow(m / r).is_identity())
    }
}

/// Case tags for an automorphism of infinite order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InfiniteCase {
    DistinctRootsNotUnity,
    Lambda1GammaNonzero,
    RepeatedRootJordanBlock,
    RepeatedRoot1,
}

impl fmt::Display for InfiniteCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InfiniteCase::DistinctRootsNotUnity => "DistinctRootsNotUnity",
            InfiniteCase::Lambda1GammaNonzero => "Lambda1GammaNonzero",
            InfiniteCase::RepeatedRootJordanBlock => "RepeatedRootJordanBlock",
            InfiniteCase::RepeatedRoot1 => "RepeatedRoot1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderVerdict {
    Finite(u64),
    Infinite(InfiniteCase),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderResult {
    pub verdict: OrderVerdict,
    pub lambda: Coeff,
    pub mu: Coeff,
    pub lambda_order: Option<u64>,
    pub mu_order: Option<u64>,
}

/// Roots of `t^2 - alpha t - beta` found in the field, with `lambda = 1` whenever 1
/// is a root.
pub fn downup_roots(alpha: &Coeff, beta: &Coeff) -> Option<(Coeff, Coeff)> {
    let f = alpha.field();
    let one = f.one();
    let is_root = |r: &Coeff| (&(&(r * r) - &(alpha * r)) - beta).is_zero();
    if is_root(&one) {
        return Some((one.clone(), alpha - &one));
    }
    if f.characteristic() != 2 {
        let disc = &(alpha * alpha) + &(&f.int(4) * beta);
        if let Some(s) = disc.sqrt() {
            let half = f.int(2).inv().ok()?;
            return Some((&(alpha + &s) * &half, &(alpha - &s) * &half));
        }
    }
    if let FieldKind::Cyclotomic(n) = f.kind() {
        let l = lcm(2, *n as u64) as u32;
        let z = f.zeta(l).ok()?;
        let mut r = f.one();
        for _ in 0..l {
            if is_root(&r) {
                return Some((r.clone(), alpha - &r));
            }
            r = &r * &z;
        }
    }
    None
}

fn resolve_roots(
    alpha: &Coeff,
    beta: &Coeff,
    roots: Option<(Coeff, Coeff)>,
) -> Result<(Coeff, Coeff), CenterError> {
    if beta.is_zero() {
        return Err(CenterError::BetaZero);
    }
    match roots {
        Some((l, m)) => {
            if &l + &m != *alpha || &l * &m != -beta {
                return Err(CenterError::InvalidRoots);
            }
            // Keep the convention that a root equal to 1 is called lambda.
            Ok(if m.is_one() && !l.is_one() { (m, l) } else { (l, m) })
        }
        None => downup_roots(alpha, beta).ok_or(CenterError::RootsRequired),
    }
}

/// Order of the down-up automorphism `phi(x) = y`, `phi(y) = alpha y + beta x + gamma`.
///
/// Finite verdicts are re-checked by iterating `phi`. In positive characteristic every
/// such automorphism over a finite field has finite order, found by iteration.
pub fn gwa_auto_order(
    alpha: &Coeff,
    beta: &Coeff,
    gamma: &Coeff,
    roots: Option<(Coeff, Coeff)>,
) -> Result<OrderResult, CenterError> {
    let (lambda, mu) = resolve_roots(alpha, beta, roots)?;
    let phi = AffineAuto::downup(alpha, beta, gamma)?;
    let lo = lambda.root_of_unity_order()?;
    let mo = mu.root_of_unity_order()?;
    let verdict = if alpha.field().characteristic() > 0 {
        let p = alpha.field().characteristic() as u64;
        let big = lcm(lo.unwrap_or(1), mo.unwrap_or(1)) * p * p;
        if !phi.pow(big).is_identity() {
            return Err(CenterError::RootsRequired);
        }
        let mut m = big;
        for r in prime_factors(big) {
            while m % r == 0 && phi.pow(m / r).is_identity() {
                m /= r;
            }
        }
        OrderVerdict::Finite(m)
    } else if lambda == mu {
        if lambda.is_one() {
            OrderVerdict::Infinite(InfiniteCase::RepeatedRoot1)
        } else {
            OrderVerdict::Infinite(InfiniteCase::RepeatedRootJordanBlock)
        }
    } else if lambda.is_one() && !gamma.is_zero() {
        OrderVerdict::Infinite(InfiniteCase::Lambda1GammaNonzero)
    } else {
        match (lo, mo) {
            (Some(a), Some(b)) => OrderVerdict::Finite(lcm(a, b)),
            _ => OrderVerdict::Infinite(InfiniteCase::DistinctRootsNotUnity),
        }
    };
    if let OrderVerdict::Finite(m) = verdict {
        assert!(phi.has_exact_order(m), "case analysis disagrees with iteration at m = {m}");
    }
    Ok(OrderResult { verdict, lambda, mu, lambda_order: lo, mu_order: mo })
}

/// Basis of the polynomials of degree at most `d` fixed by `phi`.
pub fn fixed_polynomials(phi: &AffineAuto, d: u32) -> Vec<BiPoly> {
    let f = phi.field();
    let monos: Vec<(u32, u32)> = (0..=d).flat_map(|t| (0..=t).map(move |a| (a, t - a))).collect();
    let index: HashMap<(u32, u32), usize> = monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut rows = vec![vec![f.zero(); monos.len()]; monos.len()];
    for (j, &(a, b)) in monos.iter().enumerate() {
        let m = BiPoly::monomial(f, a, b);
        let diff = phi.apply(&m).sub(&m);
        for (mono, c) in diff.terms() {
            rows[index[mono]][j] = c.clone();
        }
    }
    kernel(f, &rows, monos.len())
        .into_iter()
        .map(|v| {
            let mut p = BiPoly::zero(f);
            for (i, c) in v.into_iter().enumerate() {
                p.add_term(monos[i], c);
            }
            p
        })
        .collect()
}

/// `omega_r = beta (r - 1) x + r (r - 1) y + gamma r`, an eigenvector of the
/// down-up automorphism with eigenvalue `r` for either root `r`.
pub fn omega(alpha: &Coeff, beta: &Coeff, gamma: &Coeff, r: &Coeff) -> BiPoly {
    let _ = alpha;
    let one = r.field().one();
    BiPoly::linear(&(beta * &(r - &one)), &(r * &(r - &one)), &(gamma * r))
}

/// Images of `x = ud` and `y = du` in a down-up presentation.
pub fn downup_xy(p: &Presentation) -> (FreePoly, FreePoly) {
    (word(p, &["u", "d"]), word(p, &["d", "u"]))
}

/// Generators of the center of a down-up algebra, written in `u` and `d`.
pub fn downup_center_generators(
    spec: &FamilySpec,
    roots: Option<(Coeff, Coeff)>,
) -> Result<CentralSet, CenterError> {
    let FamilySpec::DownUp { alpha, beta, gamma } = spec else {
        return Err(mismatch("DownUp", spec));
    };
    let p = build_family(spec)?;
    let ord = gwa_auto_order(alpha, beta, gamma, roots)?;
    let (lambda, mu) = (ord.lambda.clone(), ord.mu.clone());
    let f = alpha.field();
    let one = f.one();
    let (x, y) = downup_xy(&p);
    let mut set = CentralSet { family: Some(FamilyTag::DownUp), elements: Vec::new(), note: String::new() };
    let add = |set: &mut CentralSet, name: String, b: &BiPoly, cond: &str| -> Result<(), CenterError> {
        set.push(&p, name, &b.substitute(&x, &y), cond)
    };
    let m = match ord.verdict {
        OrderVerdict::Finite(m) => Some(m),
        OrderVerdict::Infinite(_) => None,
    };

    if f.characteristic() > 0 {
        let phi = AffineAuto::downup(alpha, beta, gamma)?;
        for b in fixed_polynomials(&phi, 2) {
            if b.degree().unwrap_or(0) > 0 {
                add(&mut set, format!("fixed[{}]", b.render()), &b, "fixed by phi")?;
            }
        }
        set.note = "fixed polynomials of degree <= 2 and the m-th powers of u, d".into();
    } else if lambda != mu && !lambda.is_one() {
        // Eigen-coordinates: phi(omega1) = mu omega1, phi(omega2) = lambda omega2.
        let w1 = omega(alpha, beta, gamma, &mu);
        let w2 = omega(alpha, beta, gamma, &lambda);
        let bi = ord.mu_order.unwrap_or(EIGEN_SEARCH_BOUND);
        let bj = ord.lambda_order.unwrap_or(EIGEN_SEARCH_BOUND);
        let mut found: Vec<(u64, u64)> = Vec::new();
        for i in 0..=bi {
            for j in 0..=bj {
                if (i, j) == (0, 0) || found.iter().any(|&(a, b)| a <= i && b <= j) {
                    continue;
                }
                if (&mu.pow(i as i64)? * &lambda.pow(j as i64)?).is_one() {
                    found.push((i, j));
                }
            }
        }
        for (i, j) in found {
            let b = w1.pow(i as u32).mul(&w2.pow(j as u32));
            add(&mut set, format!("omega1^{i}*omega2^{j}"), &b, "mu^i lambda^j = 1")?;
        }
        set.note = format!(
            "omega1 = {}, omega2 = {} with x = ud, y = du",
            w1.render(),
            w2.render()
        );
    } else if lambda != mu {
        // lambda = 1: phi(omega1) = omega1 + gamma and phi(omega2) = mu omega2.
        let w1 = BiPoly::linear(beta, &one, &f.zero());
        let w2 = BiPoly::linear(&-&one, &one, &(gamma / &(alpha - &f.int(2))));
        if gamma.is_zero() {
            add(&mut set, "omega1".into(), &w1, "lambda = 1, gamma = 0")?;
        }
        if let Some(k) = ord.mu_order {
            add(&mut set, format!("omega2^{k}"), &w2.pow(k as u32), "lambda = 1, mu a root of unity")?;
        }
        set.note = format!("omega1 = {}, omega2 = {} with x = ud, y = du", w1.render(), w2.render());
    } else if !lambda.is_one() {
        // Repeated root mu != 1: phi(omega) = mu omega.
        let w = BiPoly::linear(&(&(beta + beta) + alpha), &(alpha - &f.int(2)), &(gamma + gamma));
        if let Some(k) = ord.mu_order {
            add(&mut set, format!("omega^{k}"), &w.pow(k as u32), "repeated root, a root of unity")?;
        }
        set.note = format!("omega = {} with x = ud, y = du", w.render());
    } else if gamma.is_zero() {
        let w = BiPoly::linear(&-&one, &one, &f.zero());
        add(&mut set, "omega1".into(), &w, "lambda = mu = 1, gamma = 0")?;
        set.note = "omega1 = -x + y = du - ud".into();
    } else {
        // lambda = mu = 1 with gamma != 0: a quadratic Casimir-type fixed element.
        let phi = AffineAuto::downup(alpha, beta, gamma)?;
        if let Some(b) = fixed_polynomials(&phi, 2).into_iter().find(|b| b.degree() == Some(2)) {
            add(&mut set, "casimir".into(), &b, "lambda = mu = 1, gamma != 0")?;
            set.note = format!("casimir = {} with x = ud, y = du", b.render());
        }
    }
    if let Some(m) = m {
        let cond = format!("phi^{m} = id");
        set.push(&p, format!("u^{m}"), &gen(&p, "u").pow(m as u32), &cond)?;
        set.push(&p, format!("d^{m}"), &gen(&p, "d").pow(m as u32), &cond)?;
    }
    if set.elements.is_empty() {
        return Err(CenterError::TrivialCenter);
    }
    Ok(set)
}

/// Basis of the central elements spanned by irreducible words of weight at most `d`,
/// constants excluded.
pub fn central_subspace(p: &Presentation, d: u32) -> Result<Vec<NCPoly>, CenterError> {
    if !is_confluent(p)? {
        return Err(CenterError::NonConfluentPresentation);
    }
    let f = p.field();
    let words: Vec<Word> = irreducible_words(p, d).into_iter().filter(|w| !w.is_empty()).collect();
    let mut rows_of: HashMap<(usize, Word), usize> = HashMap::new();
    let mut cols: Vec<Vec<(usize, Coeff)>> = Vec::new();
    for w in &words {
        let a = FreePoly::word(f, w.clone());
        let mut col = Vec::new();
        for g in 0..p.generators().len() {
            let gp = FreePoly::word(f, Word::from_slice(&[g as GenId]));
            let r = normal_form(p, &a.mul(&gp).sub(&gp.mul(&a)))?;
            for (rw, c) in r.terms() {
                let n = rows_of.len();
                let row = *rows_of.entry((g, rw.clone())).or_insert(n);
                col.push((row, c.clone()));
            }
        }
        cols.push(col);
    }
    let mut rows = vec![vec![f.zero(); words.len()]; rows_of.len()];
    for (j, col) in cols.iter().enumerate() {
        for (r, c) in col {
            rows[*r][j] = c.clone();
        }
    }
    let mut out = Vec::new();
    for v in kernel(f, &rows, words.len()) {
        let mut acc = FreePoly::zero(f);
        for (j, c) in v.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&FreePoly::word(f, words[j].clone()).scale(c));
            }
        }
        out.push(normal_form(p, &acc)?);
    }
    Ok(out)
}

/// Outcome of a spanning check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanReport {
    pub spans: bool,
    pub degree: u32,
    /// Irreducible words of weight at most `degree`.
    pub monomials: usize,
    /// Dimension of the span of the central-times-residual products.
    pub rank: usize,
    pub first_missing: Option<String>,
}

/// Irreducible words of weight at most `d`, shortest first.
pub fn irreducible_words(p: &Presentation, d: u32) -> Vec<Word> {
    let mut out = vec![Word::new()];
    let mut frontier = vec![Word::new()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for w in &frontier {
            for g in 0..p.generators().len() as GenId {
                let mut v = w.clone();
                v.push(g);
                if p.weight(&v) <= d && p.is_irreducible(&v) {
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Default degree bound for [`spanning_check`].
pub fn default_span_degree(caps: &[u32]) -> u32 {
    (2 * caps.iter().copied().max().unwrap_or(0) + 2).min(SPANNING_DEGREE_CEILING)
}

fn poly_weight(p: &Presentation, a: &FreePoly) -> u32 {
    a.terms().map(|(w, _)| p.weight(w)).max().unwrap_or(0)
}

/// Decides whether every irreducible word of weight at most `d` lies in the span of
/// `c * m`, with `c` a product of the central elements and `m` an irreducible word
/// whose exponent of generator `i` is below `caps[i]`.
pub fn spanning_check(
    p: &Presentation,
    centrals: &CentralSet,
    caps: &[u32],
    d: Option<u32>,
) -> Result<SpanReport, CenterError> {
    if caps.len() != p.generators().len() {
        return Err(CenterError::CapsMismatch { expected: p.generators().len(), found: caps.len() });
    }
    if !is_confluent(p)? {
        return Err(CenterError::NonConfluentPresentation);
    }
    let d = d.unwrap_or_else(|| default_span_degree(caps));
    let words = irreducible_words(p, d);
    let mut index: HashMap<Word, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let residual: Vec<&Word> = words
        .iter()
        .filter(|w| (0..caps.len()).all(|g| (w.iter().filter(|&&x| x as usize == g).count() as u32) < caps[g]))
        .collect();

    let gens: Vec<(FreePoly, u32)> = centrals
        .elements
        .iter()
        .map(|e| (e.element.as_free().clone(), poly_weight(p, &e.element)))
        .filter(|(_, w)| *w > 0)
        .collect();
    let mut products: Vec<(FreePoly, u32)> = Vec::new();
    let mut stack: Vec<(FreePoly, u32, usize)> = vec![(FreePoly::one(p.field()), 0, 0)];
    while let Some((c, w, start)) = stack.pop() {
        for (i, (g, gw)) in gens.iter().enumerate().skip(start) {
            if w + gw <= d {
                let next = normal_form(p, &c.mul(g))?.into_inner();
                stack.push((next, w + gw, i));
            }
        }
        products.push((c, w));
    }

    let mut ech = SparseEchelon::new();
    let mut extra = words.len();
    for (c, cw) in &products {
        for m in &residual {
            if cw + p.weight(m) > d {
                continue;
            }
            let prod = normal_form(p, &c.mul(&FreePoly::word(p.field(), (*m).clone())))?;
            let mut v = BTreeMap::new();
            for (w, x) in prod.terms() {
                let col = *index.entry(w.clone()).or_insert_with(|| {
                    extra += 1;
                    extra - 1
                });
                v.insert(col, x.clone());
            }
            ech.insert(v);
        }
    }
    let mut first_missing = None;
    for (i, w) in words.iter().enumerate() {
        let mut v = BTreeMap::new();
        v.insert(i, p.field().one());
        if !ech.reduce(v).is_empty() {
            first_missing = Some(p.render_word(w));
            break;
        }
    }
    Ok(SpanReport {
        spans: first_missing.is_none(),
        degree: d,
        monomials: words.len(),
        rank: ech.rank(),
        first_missing,
    })
}
