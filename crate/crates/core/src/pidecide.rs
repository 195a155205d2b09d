//! PI deciders per family with checkable witnesses for both verdicts.

use std::fmt;

use thiserror::Error;

use crate::center::{
    bqf_routes, central_candidates, central_residual, downup_xy, gwa_auto_order, omega, spanning_check, weyl_order,
    BiPoly, CenterError, CentralElement, CentralSet, OrderVerdict, SpanReport,
};
use crate::exactnum::cyclo::lcm;
use crate::exactnum::{Coeff, NumError};
use crate::identities::{cyc3_e, theta, weyl_z, IdentityError};
use crate::presentation::{build_family, FamilySpec, FamilyTag, FreePoly, NCPoly, Presentation, PresentationError};
use crate::rewrite::{normal_form, RewriteError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PiError {
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("witness belongs to {witness}, spec is {spec}")]
    FamilyMismatch { witness: FamilyTag, spec: FamilyTag },
    #[error(transparent)]
    Center(#[from] CenterError),
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    PI,
    NotPI,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::PI => "PI",
            Verdict::NotPI => "NotPI",
            Verdict::Unknown => "Unknown",
        })
    }
}

/// The equivalent conditions characterizing PI down-up algebras. Only the first two
/// are evaluated; the rest are listed for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DownUpCondition {
    /// The roots of `t^2 - alpha t - beta` are distinct roots of unity, both != 1 if
    /// `gamma != 0`.
    DistinctRootsOfUnity,
    /// The automorphism `phi` of `k[x, y]` has finite order.
    FiniteOrderAutomorphism,
    FiniteOverCenter,
    Fbn,
    PiAlgebra,
}

impl DownUpCondition {
    pub const ALL: &'static [DownUpCondition] = &[
        DownUpCondition::DistinctRootsOfUnity,
        DownUpCondition::FiniteOrderAutomorphism,
        DownUpCondition::FiniteOverCenter,
        DownUpCondition::Fbn,
        DownUpCondition::PiAlgebra,
    ];
}

/// Which criterion produced a verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reason {
    /// Every parameter that governs the family is a root of unity.
    RootsOfUnity,
    /// A parameter is not a root of unity, exhibited by a quantum-plane witness.
    NotRootOfUnity(String),
    /// Down-up: both evaluated conditions agree.
    DownUp { holds: bool, evaluated: Vec<DownUpCondition> },
    /// `B_q(f)`: `n | j` for every `j` in the support.
    BqfSupportDivisible,
    /// `B_q(f)`: `n` divides no `j + 1` with `j` in the support.
    BqfShiftedIndivisible,
    /// `B_q(f)`: `n | (j + 1)` for some `j` while `n` does not divide every `j`.
    BqfGap,
    /// `B_q(f)` at `q = 1`.
    BqfTrivialQ,
    /// `U_q^+(B_2)` at `q^4 = 1`; the central-power argument needs order at least 3.
    SmallOrder(u64),
    /// `U_q^+(B_2)` at order 3, decided by verified central powers.
    EmpiricalCenter(u64),
    /// No PI criterion is known for the family.
    NoCriterion,
}

impl Reason {
    pub fn code(&self) -> &'static str {
        match self {
            Reason::RootsOfUnity => "roots-of-unity",
            Reason::NotRootOfUnity(_) => "not-root-of-unity",
            Reason::DownUp { .. } => "downup-conditions",
            Reason::BqfSupportDivisible => "bqf-support-divisible",
            Reason::BqfShiftedIndivisible => "bqf-shifted-support-indivisible",
            Reason::BqfGap => "bqf-gap",
            Reason::BqfTrivialQ => "bqf-q-equals-1",
            Reason::SmallOrder(_) => "small-order",
            Reason::EmpiricalCenter(_) => "empirical-center",
            Reason::NoCriterion => "no-criterion",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::RootsOfUnity => write!(f, "all governing parameters are roots of unity"),
            Reason::NotRootOfUnity(p) => write!(f, "{p} is not a root of unity"),
            Reason::DownUp { holds, evaluated } => {
                let names: Vec<String> = evaluated.iter().map(|c| format!("{c:?}")).collect();
                write!(f, "{} {}", names.join(" and "), if *holds { "hold" } else { "fail" })
            }
            Reason::BqfSupportDivisible => write!(f, "n divides every exponent in supp(f)"),
            Reason::BqfShiftedIndivisible => write!(f, "n divides no j + 1 with j in supp(f)"),
            Reason::BqfGap => write!(f, "n divides some j + 1 and not every j; no criterion applies"),
            Reason::BqfTrivialQ => write!(f, "q = 1; no criterion applies"),
            Reason::SmallOrder(l) => write!(f, "q has order {l} with q^4 = 1; no criterion applies"),
            Reason::EmpiricalCenter(l) => write!(f, "q has order {l}; z and e_i^{l} verified central"),
            Reason::NoCriterion => write!(f, "no PI criterion is known for this family"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedElement {
    pub name: String,
    pub poly: FreePoly,
}

impl NamedElement {
    fn new(name: impl Into<String>, poly: FreePoly) -> Self {
        NamedElement { name: name.into(), poly }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WitnessKind {
    /// `b a = param a b` holds in the algebra.
    Subalgebra,
    /// `normal` is a normal element and `b a - param a b` is a multiple of it.
    Quotient,
    /// `a omega = (param omega + shift) a` and `a shift = param shift a` with
    /// `shift != 0`; in characteristic zero this yields unbounded growth of the
    /// commutator chain and rules out a polynomial identity.
    JordanShift,
}

/// Evidence that an algebra contains or maps onto a quantum plane with a parameter
/// that is not a root of unity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPlaneWitness {
    pub family: FamilyTag,
    pub kind: WitnessKind,
    pub a: NamedElement,
    pub b: NamedElement,
    pub param: Coeff,
    pub normal: Option<NamedElement>,
    /// For [`WitnessKind::Quotient`]: `normal * g = c * g * normal` per generator `g`.
    pub twists: Vec<(String, Coeff)>,
    pub shift: Option<NamedElement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Center { set: CentralSet, caps: Option<Vec<u32>> },
    QPlane(QPlaneWitness),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiVerdict {
    pub verdict: Verdict,
    pub reason: Reason,
    pub witness: Option<Witness>,
}

impl PiVerdict {
    fn pi(reason: Reason, set: CentralSet, caps: Option<Vec<u32>>) -> Self {
        PiVerdict { verdict: Verdict::PI, reason, witness: Some(Witness::Center { set, caps }) }
    }

    fn not_pi(reason: Reason, w: QPlaneWitness) -> Self {
        PiVerdict { verdict: Verdict::NotPI, reason, witness: Some(Witness::QPlane(w)) }
    }

    fn unknown(reason: Reason) -> Self {
        PiVerdict { verdict: Verdict::Unknown, reason, witness: None }
    }

    pub fn central_set(&self) -> Option<(&CentralSet, Option<&[u32]>)> {
        match &self.witness {
            Some(Witness::Center { set, caps }) => Some((set, caps.as_deref())),
            _ => None,
        }
    }

    pub fn qplane(&self) -> Option<&QPlaneWitness> {
        match &self.witness {
            Some(Witness::QPlane(w)) => Some(w),
            _ => None,
        }
    }
}

fn gen(p: &Presentation, name: &str) -> FreePoly {
    FreePoly::word(p.field(), p.word_of(&[name]))
}

fn named(p: &Presentation, name: &str) -> NamedElement {
    NamedElement::new(name, gen(p, name))
}

fn is_root(c: &Coeff) -> Result<Option<u64>, PiError> {
    Ok(c.root_of_unity_order()?)
}

fn precondition(s: impl Into<String>) -> PiError {
    PiError::PreconditionViolation(s.into())
}

fn subalgebra(p: &Presentation, a: NamedElement, b: NamedElement, param: Coeff) -> QPlaneWitness {
    QPlaneWitness {
        family: p.family().expect("family presentation"),
        kind: WitnessKind::Subalgebra,
        a,
        b,
        param,
        normal: None,
        twists: Vec::new(),
        shift: None,
    }
}

/// Decides the PI property of a family instance.
pub fn pi_decide(spec: &FamilySpec) -> Result<PiVerdict, PiError> {
    let p = build_family(spec)?;
    let f = p.field().clone();
    match spec {
        FamilySpec::Bh { h } => match is_root(h)? {
            Some(l) => {
                let l = l as u32;
                Ok(PiVerdict::pi(Reason::RootsOfUnity, central_candidates(spec)?, Some(vec![2 * l, 4 * l, 2 * l, 4 * l])))
            }
            None => {
                let u = NamedElement::new("x1*x2", FreePoly::word(&f, p.word_of(&["x1", "x2"])));
                let w = subalgebra(&p, u, named(&p, "y1"), -&(h * h));
                Ok(PiVerdict::not_pi(Reason::NotRootOfUnity("h".into()), w))
            }
        },
        FamilySpec::Hpq { p: pp, q } => {
            if (pp * q).is_one() {
                return Err(precondition("pq = 1"));
            }
            match (is_root(pp)?, is_root(q)?) {
                (Some(n), Some(m)) => {
                    let e = (m * n) as u32;
                    Ok(PiVerdict::pi(Reason::RootsOfUnity, central_candidates(spec)?, Some(vec![n as u32, e, e])))
                }
                (_, None) => {
                    let w = QPlaneWitness {
                        family: FamilyTag::Hpq,
                        kind: WitnessKind::Quotient,
                        a: named(&p, "x"),
                        b: named(&p, "y"),
                        param: q.clone(),
                        normal: Some(named(&p, "t")),
                        twists: vec![("t".into(), f.one()), ("x".into(), pp.inv()?), ("y".into(), pp.clone())],
                        shift: None,
                    };
                    Ok(PiVerdict::not_pi(Reason::NotRootOfUnity("q".into()), w))
                }
                (None, Some(_)) => {
                    let w = QPlaneWitness {
                        family: FamilyTag::Hpq,
                        kind: WitnessKind::Quotient,
                        a: named(&p, "x"),
                        b: named(&p, "y"),
                        param: pp.inv()?,
                        normal: Some(NamedElement::new("theta", theta(&p)?)),
                        twists: vec![("t".into(), f.one()), ("x".into(), q.clone()), ("y".into(), q.inv()?)],
                        shift: None,
                    };
                    Ok(PiVerdict::not_pi(Reason::NotRootOfUnity("p".into()), w))
                }
            }
        }
        FamilySpec::M2 { alpha, beta } => match (is_root(alpha)?, is_root(beta)?) {
            (Some(a), Some(b)) => {
                let l = lcm(a, b) as u32;
                Ok(PiVerdict::pi(Reason::RootsOfUnity, central_candidates(spec)?, Some(vec![l; 4])))
            }
            (None, _) => {
                let w = subalgebra(&p, named(&p, "X11"), named(&p, "X12"), alpha.clone());
                Ok(PiVerdict::not_pi(Reason::NotRootOfUnity("alpha".into()), w))
            }
            (Some(_), None) => {
                let w = subalgebra(&p, named(&p, "X11"), named(&p, "X21"), beta.clone());
                Ok(PiVerdict::not_pi(Reason::NotRootOfUnity("beta".into()), w))
            }
        },
        FamilySpec::UqB2 { q } => decide_uqb2(spec, &p, q),
        FamilySpec::WeylMalt { q, lambda } | FamilySpec::WeylAJ { q, lambda } => {
            decide_weyl(spec, &p, q, lambda)
        }
        FamilySpec::ThreeCyclic { q, .. } => {
            let q2 = q.pow(2)?;
            if q2.is_one() {
                return Err(precondition("q^2 = 1"));
            }
            match is_root(&q2)? {
                Some(l) => {
                    let l = l as u32;
                    Ok(PiVerdict::pi(Reason::RootsOfUnity, central_candidates(spec)?, Some(vec![l; 3])))
                }
                None => {
                    let e = NamedElement::new("e", cyc3_e(&p)?);
                    let w = subalgebra(&p, named(&p, "z"), e, q2.inv()?);
                    Ok(PiVerdict::not_pi(Reason::NotRootOfUnity("q^2".into()), w))
                }
            }
        }
        FamilySpec::DownUp { alpha, beta, gamma } => decide_downup(spec, &p, alpha, beta, gamma),
        FamilySpec::Bqf { q, f: coeffs } => decide_bqf(spec, &p, q, coeffs),
        FamilySpec::QuantumPlane { q } => match is_root(q)? {
            Some(n) => {
                let n = n as u32;
                Ok(PiVerdict::pi(Reason::RootsOfUnity, central_candidates(spec)?, Some(vec![n, n])))
            }
            None => {
                let w = subalgebra(&p, named(&p, "x"), named(&p, "y"), q.clone());
                Ok(PiVerdict::not_pi(Reason::NotRootOfUnity("q".into()), w))
            }
        },
        FamilySpec::BiQuad3(_) => Ok(PiVerdict::unknown(Reason::NoCriterion)),
    }
}

fn decide_uqb2(spec: &FamilySpec, p: &Presentation, q: &Coeff) -> Result<PiVerdict, PiError> {
    let Some(l) = is_root(q)? else {
        let w = subalgebra(p, named(p, "e3"), named(p, "e1"), q.pow(-2)?);
        return Ok(PiVerdict::not_pi(Reason::NotRootOfUnity("q".into()), w));
    };
    let e = l as u32;
    let caps = vec![1, e, e, e];
    if l >= 5 {
        return Ok(PiVerdict::pi(Reason::RootsOfUnity, central_candidates(spec)?, Some(caps)));
    }
    if l == 3 {
        let mut set = CentralSet { family: Some(FamilyTag::UqB2), elements: Vec::new(), note: String::new() };
        let cond = "q primitive 3rd root of unity, centrality verified by normal forms";
        for (name, poly) in [
            ("z".to_string(), gen(p, "z")),
            ("e1^3".to_string(), gen(p, "e1").pow(3)),
            ("e2^3".to_string(), gen(p, "e2").pow(3)),
            ("e3^3".to_string(), gen(p, "e3").pow(3)),
        ] {
            let element = normal_form(p, &poly)?;
            if !central_residual(p, &element)?.central {
                return Ok(PiVerdict::unknown(Reason::SmallOrder(l)));
            }
            set.elements.push(CentralElement { name, element, condition: cond.into() });
        }
        set.note = "z and the cubes of e1, e2, e3".into();
        return Ok(PiVerdict::pi(Reason::EmpiricalCenter(l), set, Some(caps)));
    }
    Ok(PiVerdict::unknown(Reason::SmallOrder(l)))
}

fn decide_weyl(spec: &FamilySpec, p: &Presentation, q: &[Coeff], lambda: &[Vec<Coeff>]) -> Result<PiVerdict, PiError> {
    let n = q.len();
    for (i, qi) in q.iter().enumerate() {
        if qi.is_one() {
            return Err(precondition(format!("q{} = 1", i + 1)));
        }
    }
    if let Ok(l) = weyl_order(q, lambda) {
        let l = l as u32;
        return Ok(PiVerdict::pi(Reason::RootsOfUnity, central_candidates(spec)?, Some(vec![l; 2 * n])));
    }
    for i in 0..n {
        for j in i + 1..n {
            let lij = &lambda[i][j];
            if is_root(lij)?.is_none() {
                let (yi, yj) = (format!("y{}", i + 1), format!("y{}", j + 1));
                let w = subalgebra(p, named(p, &yj), named(p, &yi), lij.clone());
                return Ok(PiVerdict::not_pi(Reason::NotRootOfUnity(format!("l{}{}", i + 1, j + 1)), w));
            }
        }
    }
    let malt = matches!(spec, FamilySpec::WeylMalt { .. });
    for (i, qi) in q.iter().enumerate() {
        if is_root(qi)?.is_some() {
            continue;
        }
        let reason = Reason::NotRootOfUnity(format!("q{}", i + 1));
        // x_i x_j = q_i lambda_ij x_j x_i needs a later index j.
        if malt && i + 1 < n {
            let (xi, xj) = (format!("x{}", i + 1), format!("x{}", i + 2));
            let w = subalgebra(p, named(p, &xj), named(p, &xi), qi * &lambda[i][i + 1]);
            return Ok(PiVerdict::not_pi(reason, w));
        }
        let z = NamedElement::new(format!("z{}", i + 1), weyl_z(p, i + 1));
        let w = subalgebra(p, named(p, &format!("x{}", i + 1)), z, qi.inv()?);
        return Ok(PiVerdict::not_pi(reason, w));
    }
    unreachable!("weyl_order failed although every parameter is a root of unity")
}

fn decide_downup(
    spec: &FamilySpec,
    p: &Presentation,
    alpha: &Coeff,
    beta: &Coeff,
    gamma: &Coeff,
) -> Result<PiVerdict, PiError> {
    let ord = gwa_auto_order(alpha, beta, gamma, None)?;
    let (l, m) = (&ord.lambda, &ord.mu);
    let distinct = l != m && ord.lambda_order.is_some() && ord.mu_order.is_some();
    let cond5 = distinct && (gamma.is_zero() || (!l.is_one() && !m.is_one()));
    let finite = matches!(ord.verdict, OrderVerdict::Finite(_));
    let char0 = p.field().characteristic() == 0;
    if char0 && cond5 != finite {
        return Err(precondition(format!(
            "root condition ({cond5}) and automorphism order ({finite}) disagree"
        )));
    }
    let reason = |holds| Reason::DownUp {
        holds,
        evaluated: vec![DownUpCondition::DistinctRootsOfUnity, DownUpCondition::FiniteOrderAutomorphism],
    };
    if let OrderVerdict::Finite(k) = ord.verdict {
        let set = crate::center::downup_center_generators(spec, Some((l.clone(), m.clone())))?;
        // k[x, y] is spanned over the fixed ring by monomials of degree below
        // ord(lambda) + ord(mu) - 1, and x = ud, y = du each use one u and one d.
        let caps = match (ord.lambda_order, ord.mu_order) {
            (Some(a), Some(b)) if char0 => Some(vec![(a + b + k - 2) as u32; 2]),
            _ => None,
        };
        return Ok(PiVerdict::pi(reason(true), set, caps));
    }
    let f = p.field();
    let one = f.one();
    let (x, y) = downup_xy(p);
    let el = |name: &str, b: &BiPoly| NamedElement::new(format!("{name} = {}", b.render()), b.substitute(&x, &y));
    let d = named(p, "d");
    for r in [m, l] {
        if r.root_of_unity_order()?.is_none() {
            let w = el("omega", &omega(alpha, beta, gamma, r));
            return Ok(PiVerdict::not_pi(reason(false), subalgebra(p, w, d, r.clone())));
        }
    }
    let zero = f.zero();
    let (om, delta, r) = if l == m && l.is_one() && gamma.is_zero() {
        (BiPoly::linear(&zero, &one, &zero), BiPoly::linear(&-&one, &one, &zero), one.clone())
    } else if l == m && l.is_one() {
        (BiPoly::linear(&-&one, &one, gamma), BiPoly::constant(gamma.clone()), one.clone())
    } else if l == m {
        let two = f.int(2);
        let dl = BiPoly::linear(&(&(beta + beta) + alpha), &(alpha - &two), &(gamma + gamma));
        (BiPoly::linear(&-&two, &two, &zero), dl, m.clone())
    } else {
        (BiPoly::linear(beta, &one, &zero), BiPoly::constant(gamma.clone()), one.clone())
    };
    let w = QPlaneWitness {
        family: FamilyTag::DownUp,
        kind: WitnessKind::JordanShift,
        a: d,
        b: el("omega", &om),
        param: r,
        normal: None,
        twists: Vec::new(),
        shift: Some(el("delta", &delta)),
    };
    Ok(PiVerdict::not_pi(reason(false), w))
}

fn decide_bqf(spec: &FamilySpec, p: &Presentation, q: &Coeff, coeffs: &[Coeff]) -> Result<PiVerdict, PiError> {
    let char_p = p.field().characteristic() > 0;
    let Some(n) = is_root(q)? else {
        let w = subalgebra(p, named(p, "v"), named(p, "u"), q.clone());
        return Ok(PiVerdict::not_pi(Reason::NotRootOfUnity("q".into()), w));
    };
    let routes = bqf_routes(n, coeffs);
    if char_p {
        if !routes.shifted_indivisible {
            return Err(precondition("characteristic p requires n to divide no j + 1 with j in supp(f)"));
        }
        return Ok(PiVerdict::pi(Reason::BqfShiftedIndivisible, central_candidates(spec)?, None));
    }
    if n == 1 {
        return Ok(PiVerdict::unknown(Reason::BqfTrivialQ));
    }
    let e = n as u32;
    if routes.support_divisible {
        let set = central_candidates(spec)?;
        return Ok(PiVerdict::pi(Reason::BqfSupportDivisible, set, Some(vec![e, e, e])));
    }
    if routes.shifted_indivisible {
        let mut set = central_candidates(spec)?;
        let caps = bound_w(p, &mut set, e)?;
        return Ok(PiVerdict::pi(Reason::BqfShiftedIndivisible, set, caps));
    }
    Ok(PiVerdict::unknown(Reason::BqfGap))
}

/// Searches low degrees for a central element whose top `w`-power bounds `w`
/// exponents, and keeps it only when the spanning check then passes.
fn bound_w(p: &Presentation, set: &mut CentralSet, n: u32) -> Result<Option<Vec<u32>>, PiError> {
    let d = 2 * n * p.weight(&p.word_of(&["w"]));
    if d > crate::center::SPANNING_DEGREE_CEILING {
        return Ok(None);
    }
    let w = p.word_of(&["w"])[0];
    for c in crate::center::central_subspace(p, d)? {
        let Some(k) = c.terms().filter(|(word, _)| word.iter().all(|&g| g == w)).map(|(word, _)| word.len()).max()
        else {
            continue;
        };
        if c.terms().any(|(word, _)| word.iter().filter(|&&g| g == w).count() > k) {
            continue;
        }
        let mut trial = set.clone();
        trial.elements.push(CentralElement {
            name: format!("c_w{k}"),
            element: c,
            condition: "found by central subspace search".into(),
        });
        let caps = vec![n, n, k as u32];
        if spanning_check(p, &trial, &caps, None)?.spans {
            *set = trial;
            return Ok(Some(caps));
        }
    }
    Ok(None)
}

/// Residuals of every relation a witness asserts; all zero iff the witness holds.
pub fn witness_residuals(p: &Presentation, w: &QPlaneWitness) -> Result<Vec<(String, NCPoly)>, PiError> {
    let f = p.field();
    let (a, b) = (&w.a.poly, &w.b.poly);
    let mut out = Vec::new();
    match w.kind {
        WitnessKind::Subalgebra => {
            let r = normal_form(p, &b.mul(a).sub(&a.mul(b).scale(&w.param)))?;
            out.push((format!("{} {} - ({}) {} {}", w.b.name, w.a.name, w.param, w.a.name, w.b.name), r));
        }
        WitnessKind::Quotient => {
            let nrm = w.normal.as_ref().ok_or_else(|| precondition("quotient witness without a normal element"))?;
            for (g, c) in &w.twists {
                let gp = gen(p, g);
                let r = normal_form(p, &nrm.poly.mul(&gp).sub(&gp.mul(&nrm.poly).scale(c)))?;
                out.push((format!("{} {g} - ({c}) {g} {}", nrm.name, nrm.name), r));
            }
            // b a - param a b must be a scalar multiple of the normal element.
            let rel = normal_form(p, &b.mul(a).sub(&a.mul(b).scale(&w.param)))?;
            let n = normal_form(p, &nrm.poly)?;
            let r = match n.terms().next() {
                Some((word, c)) => {
                    let k = rel.coeff(word).try_div(c)?;
                    normal_form(p, &rel.sub(&n.scale(&k)))?
                }
                None => rel,
            };
            out.push((format!("{} {} - ({}) {} {} mod {}", w.b.name, w.a.name, w.param, w.a.name, w.b.name, nrm.name), r));
        }
        WitnessKind::JordanShift => {
            let delta = w.shift.as_ref().ok_or_else(|| precondition("shift witness without a shift element"))?;
            let rhs = b.scale(&w.param).add(&delta.poly).mul(a);
            out.push((format!("{} omega - (r omega + delta) {}", w.a.name, w.a.name), normal_form(p, &a.mul(b).sub(&rhs))?));
            let r2 = normal_form(p, &a.mul(&delta.poly).sub(&delta.poly.mul(a).scale(&w.param)))?;
            out.push((format!("{} delta - r delta {}", w.a.name, w.a.name), r2));
            if f.characteristic() != 0 || normal_form(p, &delta.poly)?.is_zero() {
                return Err(precondition("shift witnesses need characteristic 0 and a nonzero shift"));
            }
        }
    }
    Ok(out)
}

/// Re-checks a witness against a freshly built presentation of `spec`.
pub fn verify_witness(spec: &FamilySpec, w: &QPlaneWitness) -> Result<bool, PiError> {
    if spec.tag() != w.family {
        return Err(PiError::FamilyMismatch { witness: w.family, spec: spec.tag() });
    }
    let p = build_family(spec)?;
    Ok(witness_residuals(&p, w)?.iter().all(|(_, r)| r.is_zero()))
}

/// Runs the checks a PI verdict promises: centrality of every element and, when caps
/// are attached, the spanning check at the default degree.
pub fn verify_center_witness(
    spec: &FamilySpec,
    set: &CentralSet,
    caps: Option<&[u32]>,
) -> Result<(bool, Option<SpanReport>), PiError> {
    let p = build_family(spec)?;
    let central = crate::center::check_central_set(&p, set)?.is_empty();
    let span = match caps {
        Some(c) => Some(spanning_check(&p, set, c, None)?),
        None => None,
    };
    Ok((central, span))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Field;
    use crate::presentation::parse_univariate;

    #[test]
    fn hpq_theta_quotient() {
        let f = Field::cyclotomic(3).unwrap();
        let spec = FamilySpec::Hpq { p: f.int(2), q: f.zeta(3).unwrap() };
        let v = pi_decide(&spec).unwrap();
        assert_eq!(v.verdict, Verdict::NotPI);
        let w = v.qplane().unwrap();
        assert_eq!(w.kind, WitnessKind::Quotient);
        assert_eq!(w.normal.as_ref().unwrap().name, "theta");
        assert_eq!(w.param, f.ratio(1, 2));
        assert!(verify_witness(&spec, w).unwrap());
    }

    #[test]
    fn bqf_gap_is_unknown() {
        let f = Field::cyclotomic(3).unwrap();
        let t8 = parse_univariate(&f, "t^8", "t").unwrap();
        let v = pi_decide(&FamilySpec::Bqf { q: f.zeta(3).unwrap(), f: t8 }).unwrap();
        assert_eq!(v.verdict, Verdict::Unknown);
        assert_eq!(v.reason, Reason::BqfGap);
    }

    #[test]
    fn sl2_shift_witness() {
        let f = Field::rational();
        let spec = FamilySpec::DownUp { alpha: f.int(2), beta: f.int(-1), gamma: f.int(1) };
        let v = pi_decide(&spec).unwrap();
        assert_eq!(v.verdict, Verdict::NotPI);
        let w = v.qplane().unwrap();
        assert_eq!(w.kind, WitnessKind::JordanShift);
        assert!(verify_witness(&spec, w).unwrap());
    }

    #[test]
    fn witness_family_must_match() {
        let f = Field::ratfunc(&["q"]).unwrap();
        let q = f.param("q").unwrap();
        let v = pi_decide(&FamilySpec::QuantumPlane { q: q.clone() }).unwrap();
        let err = verify_witness(&FamilySpec::UqB2 { q }, v.qplane().unwrap()).unwrap_err();
        assert!(matches!(err, PiError::FamilyMismatch { .. }));
    }

    #[test]
    fn uqb2_small_orders() {
        let f = Field::cyclotomic(12).unwrap();
        let at = |n| pi_decide(&FamilySpec::UqB2 { q: f.zeta(n).unwrap() }).unwrap();
        assert_eq!(at(3).verdict, Verdict::PI);
        assert_eq!(at(4).verdict, Verdict::Unknown);
        assert_eq!(at(2).verdict, Verdict::Unknown);
        assert_eq!(at(6).verdict, Verdict::PI);
    }
}
