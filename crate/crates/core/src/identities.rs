//! q-calculus and closed-form commutation identities for the built-in families,
//! checked against the rewriting engine.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::exactnum::{Coeff, Field, NumError};
use crate::presentation::{BiQuadData, FamilySpec, FamilyTag, FreePoly, Presentation};
use crate::rewrite::{normal_form, RewriteError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("p must be nonzero")]
    ZeroP,
    #[error("q-factorial [{0}]! vanishes")]
    QFactorialVanishes(u32),
    #[error("{id}: n = {n} outside the range {min}..={max}")]
    RangeError { id: LemmaId, n: u32, min: u32, max: u32 },
    #[error("{id} belongs to {expected}, presentation is {found}")]
    FamilyMismatch { id: LemmaId, expected: FamilyTag, found: String },
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// `[k]_q = 1 + q + ... + q^(k-1)`.
pub fn q_number(k: u32, q: &Coeff) -> Coeff {
    let mut acc = q.field().zero();
    let mut pw = q.field().one();
    for _ in 0..k {
        acc = &acc + &pw;
        pw = &pw * q;
    }
    acc
}

/// `[n]_{p,q} = sum_{i<n} q^i p^-(n-1-i)`, so that `[1] = 1` and
/// `[n+1] = q^n + p^-1 [n]`.
pub fn pq_number(n: u32, p: &Coeff, q: &Coeff) -> Result<Coeff, IdentityError> {
    if p.is_zero() {
        return Err(IdentityError::ZeroP);
    }
    let pi = p.inv()?;
    let mut out = q.field().zero();
    for i in 0..n {
        out = &out + &(&q.pow((n - 1 - i) as i64)? * &pi.pow(i as i64)?);
    }
    Ok(out)
}

pub fn q_factorial(k: u32, q: &Coeff) -> Coeff {
    (1..=k).fold(q.field().one(), |acc, i| &acc * &q_number(i, q))
}

pub fn gauss_binomial(k: u32, i: u32, q: &Coeff) -> Result<Coeff, IdentityError> {
    if i > k {
        return Ok(q.field().zero());
    }
    for m in [i, k - i] {
        if q_factorial(m, q).is_zero() {
            return Err(IdentityError::QFactorialVanishes(m));
        }
    }
    let den = &q_factorial(i, q) * &q_factorial(k - i, q);
    Ok(q_factorial(k, q).try_div(&den)?)
}

macro_rules! lemma_ids {
    ($($v:ident => $s:literal),* $(,)?) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum LemmaId { $($v),* }

        impl LemmaId {
            pub const ALL: &'static [LemmaId] = &[$(LemmaId::$v),*];

            pub fn name(self) -> &'static str {
                match self { $(LemmaId::$v => $s),* }
            }
        }
    };
}

lemma_ids! {
    BhCommute => "Bh.commute",
    HYxn => "H.yxn",
    HYnx => "H.ynx",
    HThetaRel => "H.theta_rel",
    M2K1 => "M2.k1",
    M2K2 => "M2.k2",
    M2PowerTable => "M2.power_table",
    UqB2I => "UqB2.i",
    UqB2Ii => "UqB2.ii",
    UqB2Iii => "UqB2.iii",
    UqB2Iv => "UqB2.iv",
    WeylXky => "Weyl.xky",
    WeylXyk => "Weyl.xyk",
    WeylZiNormal => "Weyl.zi_normal",
    Cyc3I => "Cyc3.i",
    Cyc3Ii => "Cyc3.ii",
    Cyc3Iii => "Cyc3.iii",
    Cyc3Iv => "Cyc3.iv",
    Cyc3V => "Cyc3.v",
    Cyc3Vi => "Cyc3.vi",
    Cyc3ERel => "Cyc3.e_rel",
    BqfDeltaUk => "Bqf.delta_uk",
    BqfDeltaVk => "Bqf.delta_vk",
    BqfWuk => "Bqf.wuk",
    BqfWvk => "Bqf.wvk",
    BqfWku => "Bqf.wku",
}

impl LemmaId {
    pub fn family(self) -> FamilyTag {
        use LemmaId::*;
        match self {
            BhCommute => FamilyTag::Bh,
            HYxn | HYnx | HThetaRel => FamilyTag::Hpq,
            M2K1 | M2K2 | M2PowerTable => FamilyTag::M2,
            UqB2I | UqB2Ii | UqB2Iii | UqB2Iv => FamilyTag::UqB2,
            WeylXky | WeylXyk | WeylZiNormal => FamilyTag::WeylMalt,
            Cyc3I | Cyc3Ii | Cyc3Iii | Cyc3Iv | Cyc3V | Cyc3Vi | Cyc3ERel => FamilyTag::ThreeCyclic,
            BqfDeltaUk | BqfDeltaVk | BqfWuk | BqfWvk | BqfWku => FamilyTag::Bqf,
        }
    }

    /// Smallest admissible exponent.
    pub fn min_n(self) -> u32 {
        if self == LemmaId::UqB2Iv {
            2
        } else {
            1
        }
    }

    /// Relations with no exponent (normality statements) only admit n = 1.
    pub fn max_n(self) -> u32 {
        match self {
            LemmaId::HThetaRel | LemmaId::WeylZiNormal | LemmaId::Cyc3ERel => 1,
            _ => u32::MAX,
        }
    }

    /// Lemmas tied to one family instance and indexed by an exponent.
    pub fn for_family(tag: FamilyTag) -> Vec<LemmaId> {
        LemmaId::ALL.iter().copied().filter(|l| l.family() == tag).collect()
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        LemmaId::ALL
            .iter()
            .copied()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown lemma `{s}`"))
    }
}

/// One displayed equation at one exponent: `lhs = rhs` in the algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityInstance {
    pub label: String,
    pub lhs: FreePoly,
    pub rhs: FreePoly,
}

struct Ctx<'a> {
    p: &'a Presentation,
    f: Field,
}

impl<'a> Ctx<'a> {
    fn g(&self, name: &str) -> FreePoly {
        FreePoly::word(&self.f, self.p.word_of(&[name]))
    }

    fn c(&self, c: Coeff) -> FreePoly {
        FreePoly::constant(c)
    }

    fn eq(&self, label: impl Into<String>, lhs: FreePoly, rhs: FreePoly) -> IdentityInstance {
        IdentityInstance { label: label.into(), lhs, rhs }
    }
}

/// `theta = (1 - pq) yx - t` in `H_{p,q}`.
pub fn theta(p: &Presentation) -> Result<FreePoly, IdentityError> {
    let Some(FamilySpec::Hpq { p: pp, q }) = p.spec() else {
        return Err(mismatch(LemmaId::HThetaRel, p));
    };
    let cx = Ctx { p, f: p.field().clone() };
    let k = &cx.f.one() - &(pp * q);
    Ok(cx.g("y").mul(&cx.g("x")).scale(&k).sub(&cx.g("t")))
}

/// `z_i = x_i y_i - y_i x_i` in a Weyl family, with `z_0 = 1`.
pub fn weyl_z(p: &Presentation, i: usize) -> FreePoly {
    let f = p.field();
    if i == 0 {
        return FreePoly::one(f);
    }
    let (x, y) = (format!("x{i}"), format!("y{i}"));
    let xy = FreePoly::word(f, p.word_of(&[&x, &y]));
    let yx = FreePoly::word(f, p.word_of(&[&y, &x]));
    xy.sub(&yx)
}

/// `e = xz - q^2 beta / (q^2 - 1)` in the 3-cyclic algebra; needs `q^2 != 1`.
pub fn cyc3_e(p: &Presentation) -> Result<FreePoly, IdentityError> {
    let Some(FamilySpec::ThreeCyclic { q, beta, .. }) = p.spec() else {
        return Err(mismatch(LemmaId::Cyc3ERel, p));
    };
    let q2 = q.pow(2)?;
    let den = &q2 - &q.field().one();
    if den.is_zero() {
        return Err(IdentityError::Hypothesis("q^2 = 1".into()));
    }
    let cx = Ctx { p, f: p.field().clone() };
    let k = (&q2 * beta).try_div(&den)?;
    Ok(cx.g("x").mul(&cx.g("z")).sub(&cx.c(k)))
}

/// `B_k` and `C_k` of the `U_q^+(B_2)` power identities, by their recurrences.
pub fn uqb2_bc(k: u32, q: &Coeff) -> Result<(Coeff, Coeff), IdentityError> {
    let (mut b, mut c) = (q.field().one(), q.field().zero());
    let q2 = q.pow(2)?;
    let qm2 = q.pow(-2)?;
    for j in 1..k.max(1) {
        let nb = &(&q2 * &b) + &q.pow(-2 * j as i64)?;
        c = &(&qm2 * &b) + &c;
        b = nb;
    }
    Ok((b, c))
}

/// `c_a = sum_{i<a} q^{2i}` and `d_a = sum_{i<a} q^{-2i}`.
pub fn cyc3_cd(a: u32, q: &Coeff) -> Result<(Coeff, Coeff), IdentityError> {
    Ok((q_number(a, &q.pow(2)?), q_number(a, &q.pow(-2)?)))
}

fn mismatch(id: LemmaId, p: &Presentation) -> IdentityError {
    IdentityError::FamilyMismatch {
        id,
        expected: id.family(),
        found: p.family().map(|t| t.to_string()).unwrap_or_else(|| "a custom presentation".into()),
    }
}

/// The equations of lemma `id` at exponent `n`, with right sides built from closed
/// forms only.
pub fn oracle_rhs(id: LemmaId, p: &Presentation, n: u32) -> Result<Vec<IdentityInstance>, IdentityError> {
    if p.family() != Some(id.family()) || p.spec().is_none() {
        return Err(mismatch(id, p));
    }
    if n < id.min_n() || n > id.max_n() {
        return Err(IdentityError::RangeError { id, n, min: id.min_n(), max: id.max_n() });
    }
    let cx = Ctx { p, f: p.field().clone() };
    let spec = p.spec().expect("checked");
    let one = cx.f.one();
    let k = n as i64;
    let g = |s: &str| cx.g(s);
    let pw = |s: &str, e: u32| cx.g(s).pow(e);
    let mut out = Vec::new();
    use LemmaId::*;
    match (id, spec) {
        (BhCommute, FamilySpec::Bh { h }) => {
            let u = g("x1").mul(&g("x2"));
            let s = pw("x1", 2).add(&pw("x2", 2));
            let v = g("y1").mul(&g("y2"));
            let t = pw("y1", 2).add(&pw("y2", 2));
            let h2 = h.pow(2)?;
            let cu = (-&h2).pow(k)?;
            let cs = h2.pow(k)?;
            let cv = (-&h2).pow(-k)?;
            let ct = h2.pow(-k)?;
            for i in ["y1", "y2"] {
                let un = u.pow(n);
                out.push(cx.eq(format!("{i}*u^{n}"), g(i).mul(&un), un.mul(&g(i)).scale(&cu)));
                let sn = s.pow(n);
                out.push(cx.eq(format!("{i}*s^{n}"), g(i).mul(&sn), sn.mul(&g(i)).scale(&cs)));
            }
            for j in ["x1", "x2"] {
                let vn = v.pow(n);
                out.push(cx.eq(format!("{j}*v^{n}"), g(j).mul(&vn), vn.mul(&g(j)).scale(&cv)));
                let tn = t.pow(n);
                out.push(cx.eq(format!("{j}*t^{n}"), g(j).mul(&tn), tn.mul(&g(j)).scale(&ct)));
            }
        }
        (HYxn | HYnx, FamilySpec::Hpq { p: pp, q }) => {
            let c = pq_number(n, pp, q)?;
            let qn = q.pow(k)?;
            if id == HYxn {
                let rhs = pw("x", n).mul(&g("y")).scale(&qn).add(&pw("x", n - 1).mul(&g("t")).scale(&c));
                out.push(cx.eq(format!("y*x^{n}"), g("y").mul(&pw("x", n)), rhs));
            } else {
                let rhs = g("x").mul(&pw("y", n)).scale(&qn).add(&g("t").mul(&pw("y", n - 1)).scale(&c));
                out.push(cx.eq(format!("y^{n}*x"), pw("y", n).mul(&g("x")), rhs));
            }
        }
        (HThetaRel, FamilySpec::Hpq { q, .. }) => {
            let th = theta(p)?;
            out.push(cx.eq("theta*x", th.mul(&g("x")), g("x").mul(&th).scale(q)));
            out.push(cx.eq("theta*y", th.mul(&g("y")), g("y").mul(&th).scale(&q.inv()?)));
            out.push(cx.eq("theta*t", th.mul(&g("t")), g("t").mul(&th)));
        }
        (M2K1 | M2K2, FamilySpec::M2 { alpha, beta }) => {
            let ab = alpha * beta;
            let x12x21 = g("X12").mul(&g("X21"));
            if id == M2K1 {
                let c = &alpha.inv()? * &(&ab.pow(k)? - &one);
                let rhs = g("X11").mul(&pw("X22", n)).add(&x12x21.mul(&pw("X22", n - 1)).scale(&c));
                out.push(cx.eq(format!("X22^{n}*X11"), pw("X22", n).mul(&g("X11")), rhs));
            } else {
                let c = beta * &(&one - &ab.pow(-k)?);
                let rhs = pw("X11", n).mul(&g("X22")).add(&x12x21.mul(&pw("X11", n - 1)).scale(&c));
                out.push(cx.eq(format!("X22*X11^{n}"), g("X22").mul(&pw("X11", n)), rhs));
            }
        }
        (M2PowerTable, FamilySpec::M2 { alpha, beta }) => {
            let ai = alpha.inv()?;
            let bi = beta.inv()?;
            // (left generator, powered generator, base of the scalar, power goes right)
            let table: [(&str, &str, Coeff, bool); 10] = [
                ("X11", "X12", ai.clone(), false),
                ("X22", "X12", beta.clone(), false),
                ("X21", "X12", beta * &ai, false),
                ("X11", "X21", bi.clone(), false),
                ("X22", "X21", alpha.clone(), false),
                ("X12", "X21", alpha * &bi, false),
                ("X11", "X12", ai, true),
                ("X11", "X21", bi, true),
                ("X22", "X12", beta.clone(), true),
                ("X22", "X21", alpha.clone(), true),
            ];
            for (a, b, base, left_power) in table {
                let c = base.pow(k)?;
                if left_power {
                    out.push(cx.eq(
                        format!("{a}^{n}*{b}"),
                        pw(a, n).mul(&g(b)),
                        g(b).mul(&pw(a, n)).scale(&c),
                    ));
                } else {
                    out.push(cx.eq(
                        format!("{a}*{b}^{n}"),
                        g(a).mul(&pw(b, n)),
                        pw(b, n).mul(&g(a)).scale(&c),
                    ));
                }
            }
        }
        (UqB2I | UqB2Ii | UqB2Iii | UqB2Iv, FamilySpec::UqB2 { q }) => {
            let q2 = q.pow(2)?;
            let qm2 = q.pow(-2)?;
            match id {
                UqB2I => {
                    let rhs = pw("e3", n)
                        .mul(&g("e2"))
                        .scale(&q.pow(2 * k)?)
                        .add(&g("z").mul(&pw("e3", n - 1)).scale(&q_number(n, &q2)));
                    out.push(cx.eq(format!("e2*e3^{n}"), g("e2").mul(&pw("e3", n)), rhs));
                }
                UqB2Ii => {
                    let rhs = g("e3")
                        .mul(&pw("e2", n))
                        .scale(&q.pow(2 * k)?)
                        .add(&g("z").mul(&pw("e2", n - 1)).scale(&q_number(n, &q2)));
                    out.push(cx.eq(format!("e2^{n}*e3"), pw("e2", n).mul(&g("e3")), rhs));
                }
                UqB2Iii => {
                    let c = -(&qm2 * &q_number(n, &q.pow(-4)?));
                    let rhs =
                        pw("e1", n).mul(&g("e2")).scale(&q.pow(-2 * k)?).add(&g("e3").mul(&pw("e1", n - 1)).scale(&c));
                    out.push(cx.eq(format!("e2*e1^{n}"), g("e2").mul(&pw("e1", n)), rhs));
                }
                _ => {
                    let (b, c) = uqb2_bc(n, q)?;
                    let rhs = g("e1")
                        .mul(&pw("e2", n))
                        .scale(&q.pow(-2 * k)?)
                        .sub(&g("e3").mul(&pw("e2", n - 1)).scale(&(&qm2 * &b)))
                        .sub(&g("z").mul(&pw("e2", n - 2)).scale(&c));
                    out.push(cx.eq(format!("e2^{n}*e1"), pw("e2", n).mul(&g("e1")), rhs));
                }
            }
        }
        (WeylXky | WeylXyk, FamilySpec::WeylMalt { q, .. }) => {
            for (i, qi) in q.iter().enumerate() {
                let (x, y) = (format!("x{}", i + 1), format!("y{}", i + 1));
                let s = q_number(n, qi);
                let qn = qi.pow(k)?;
                let zprev = weyl_z(p, i);
                if id == WeylXky {
                    let rhs = g(&y).mul(&pw(&x, n)).scale(&qn).add(&zprev.mul(&pw(&x, n - 1)).scale(&s));
                    out.push(cx.eq(format!("{x}^{n}*{y}"), pw(&x, n).mul(&g(&y)), rhs));
                } else {
                    let rhs = pw(&y, n).mul(&g(&x)).scale(&qn).add(&zprev.mul(&pw(&y, n - 1)).scale(&s));
                    out.push(cx.eq(format!("{x}*{y}^{n}"), g(&x).mul(&pw(&y, n)), rhs));
                }
            }
        }
        (WeylZiNormal, FamilySpec::WeylMalt { q, .. }) => {
            let m = q.len();
            for i in 1..=m {
                let zi = weyl_z(p, i);
                for j in 1..=m {
                    let (x, y) = (format!("x{j}"), format!("y{j}"));
                    let (cxj, cyj) = if i < j { (one.clone(), one.clone()) } else { (q[j - 1].inv()?, q[j - 1].clone()) };
                    out.push(cx.eq(format!("z{i}*{x}"), zi.mul(&g(&x)), g(&x).mul(&zi).scale(&cxj)));
                    out.push(cx.eq(format!("z{i}*{y}"), zi.mul(&g(&y)), g(&y).mul(&zi).scale(&cyj)));
                    if j != i {
                        let zj = weyl_z(p, j);
                        out.push(cx.eq(format!("z{i}*z{j}"), zi.mul(&zj), zj.mul(&zi)));
                    }
                }
            }
        }
        (Cyc3I | Cyc3Ii | Cyc3Iii | Cyc3Iv | Cyc3V | Cyc3Vi, FamilySpec::ThreeCyclic { q, alpha, beta, gamma }) => {
            let (ca, da) = cyc3_cd(n, q)?;
            let up = q.pow(2 * k)?;
            let down = q.pow(-2 * k)?;
            let q2 = q.pow(2)?;
            let qm2 = q.pow(-2)?;
            // x^a b = scale * b x^a + c * x^(a-1)
            let (a, b, sc, c) = match id {
                Cyc3I => ("x", "y", up, &ca * alpha),
                Cyc3Ii => ("y", "x", down, -(&(&qm2 * &da) * alpha)),
                Cyc3Iii => ("x", "z", down, &da * beta),
                Cyc3Iv => ("z", "x", up, -(&(&q2 * &ca) * beta)),
                Cyc3V => ("y", "z", up, &ca * gamma),
                _ => ("z", "y", down, -(&(&qm2 * &da) * gamma)),
            };
            let rhs = g(b).mul(&pw(a, n)).scale(&sc).add(&pw(a, n - 1).scale(&c));
            out.push(cx.eq(format!("{a}^{n}*{b}"), pw(a, n).mul(&g(b)), rhs));
        }
        (Cyc3ERel, FamilySpec::ThreeCyclic { q, .. }) => {
            let e = cyc3_e(p)?;
            out.push(cx.eq("e*z", e.mul(&g("z")), g("z").mul(&e).scale(&q.pow(-2)?)));
        }
        (BqfDeltaUk | BqfDeltaVk | BqfWuk | BqfWvk | BqfWku, FamilySpec::Bqf { q, f }) => {
            let qinv = q.inv()?;
            // sum_j [n]_{r^(j+1)} c_j a^j b^(n-1)
            let delta = |a: &str, b: &str, r: &Coeff| -> Result<FreePoly, IdentityError> {
                let mut acc = FreePoly::zero(&cx.f);
                for (j, cj) in f.iter().enumerate() {
                    if cj.is_zero() {
                        continue;
                    }
                    let c = cj * &q_number(n, &r.pow(j as i64 + 1)?);
                    acc = acc.add(&pw(a, j as u32).mul(&pw(b, n - 1)).scale(&c));
                }
                Ok(acc)
            };
            match id {
                BqfDeltaUk | BqfWuk => {
                    let d = delta("v", "u", q)?;
                    let sigma = pw("u", n).mul(&g("w")).scale(&q.pow(k)?);
                    let lhs = g("w").mul(&pw("u", n));
                    if id == BqfDeltaUk {
                        out.push(cx.eq(format!("delta(u^{n})"), lhs.sub(&sigma), d));
                    } else {
                        out.push(cx.eq(format!("w*u^{n}"), lhs, sigma.add(&d)));
                    }
                }
                BqfDeltaVk | BqfWvk => {
                    let d = delta("u", "v", &qinv)?;
                    let sigma = pw("v", n).mul(&g("w")).scale(&q.pow(-k)?);
                    let lhs = g("w").mul(&pw("v", n));
                    if id == BqfDeltaVk {
                        out.push(cx.eq(format!("delta(v^{n})"), lhs.sub(&sigma), d));
                    } else {
                        out.push(cx.eq(format!("w*v^{n}"), lhs, sigma.add(&d)));
                    }
                }
                _ => {
                    let fv = f
                        .iter()
                        .enumerate()
                        .fold(FreePoly::zero(&cx.f), |acc, (j, c)| acc.add(&pw("v", j as u32).scale(c)));
                    let mut rhs = g("u").mul(&pw("w", n)).scale(&q.pow(k)?);
                    for i in 0..n {
                        let term = pw("w", n - 1 - i).mul(&fv).mul(&pw("w", i)).scale(&q.pow(i as i64)?);
                        rhs = rhs.add(&term);
                    }
                    out.push(cx.eq(format!("w^{n}*u"), pw("w", n).mul(&g("u")), rhs));
                }
            }
        }
        _ => return Err(mismatch(id, p)),
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityRecord {
    pub n: u32,
    pub label: String,
    pub pass: bool,
    /// `NF(lhs) - NF(rhs)`; zero on a pass.
    pub residual: FreePoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub id: LemmaId,
    pub records: Vec<IdentityRecord>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }
}

/// Compares engine normal forms of both sides for every exponent in range up to `n_max`.
pub fn check_paper_identity(id: LemmaId, p: &Presentation, n_max: u32) -> Result<IdentityReport, IdentityError> {
    let mut records = Vec::new();
    for n in id.min_n()..=n_max.min(id.max_n()) {
        for inst in oracle_rhs(id, p, n)? {
            let l = normal_form(p, &inst.lhs)?;
            let r = normal_form(p, &inst.rhs)?;
            let residual = l.sub(&r);
            records.push(IdentityRecord { n, label: inst.label, pass: residual.is_zero(), residual });
        }
    }
    Ok(IdentityReport { id, records })
}

/// The ten consistency conditions for a three-generator bi-quadratic algebra, as
/// values that must all vanish. Conditions 7 and 9 are in the form that matches
/// a direct expansion of the `x3 x2 x1` overlap.
pub fn biquad_conditions(d: &BiQuadData) -> Vec<Coeff> {
    let [q1, q2, q3] = &d.q;
    let [[a, b, c], [al, be, ga], [la, mu, nu]] = &d.a;
    let [b1, b2, b3] = &d.b;
    let one = q1.field().one();
    let m = |x: &Coeff, y: &Coeff| x * y;
    let s = |x: &Coeff, y: &Coeff| x - y;
    let om = |x: &Coeff| &one - x;
    vec![
        s(&m(&om(q3), al), &m(&om(q2), mu)),
        s(&m(&om(q3), a), &m(&om(q1), nu)),
        s(&m(&om(q2), b), &m(&om(q1), ga)),
        m(&om(&m(q1, q2)), la),
        m(&s(q1, q3), be),
        m(&om(&m(q2, q3)), c),
        &(&(&m(&s(&m(&om(q3), al), mu), a) + &m(&(b + &m(q1, ga)), la)) - &m(nu, al))
            + &m(&s(&m(q1, q2), &one), b3),
        &(&(&m(&s(a, nu), be) + &m(&m(q1, ga), mu)) - &m(&m(q3, al), b)) + &m(&s(q1, q3), b2),
        &(&(&(&m(a, ga) + &m(&m(&s(q1, &one), nu), ga)) + &m(b, nu)) - &m(&(mu + &m(q3, al)), c))
            + &m(&om(&m(q2, q3)), b1),
        &(&(-&m(&(mu + &m(q3, al)), b1)) + &m(&s(a, nu), b2)) + &m(&(b + &m(q1, ga)), b3),
    ]
}

fn random_q<R: Rng>(f: &Field, rng: &mut R) -> Coeff {
    let num = rng.gen_range(2..=9);
    let den = rng.gen_range(1..=4);
    let sign = if rng.gen_bool(0.25) { -1 } else { 1 };
    f.ratio(sign * num, den)
}

fn random_small<R: Rng>(f: &Field, rng: &mut R) -> Coeff {
    f.ratio(rng.gen_range(-6..=6), rng.gen_range(1..=3))
}

/// A random instance satisfying all ten conditions with nonzero tails.
///
/// Picks generic q's (so lambda, beta and c are forced to zero), random a, b and
/// alpha, then solves the linear conditions for mu, nu, gamma and the triangular ones
/// for b1, b2, b3.
pub fn biquad_consistent<R: Rng>(f: &Field, rng: &mut R) -> BiQuadData {
    let one = f.one();
    loop {
        let q: [Coeff; 3] = std::array::from_fn(|_| random_q(f, rng));
        let [q1, q2, q3] = &q;
        let degenerate = [q1 - &one, q2 - &one, &(q1 * q2) - &one, q1 - q3, &(q2 * q3) - &one]
            .iter()
            .any(|c| c.is_zero());
        if degenerate {
            continue;
        }
        let (a, b, al) = (random_small(f, rng), random_small(f, rng), random_small(f, rng));
        let mu = &(&(&one - q3) * &al) / &(&one - q2);
        let nu = &(&(&one - q3) * &a) / &(&one - q1);
        let ga = &(&(&one - q2) * &b) / &(&one - q1);
        let b3 = &(&(&(&(&one - q3) * &a) * &al) - &(&(&a * &mu) + &(&al * &nu))) / &(&one - &(q1 * q2));
        let b2 = &(&(&(q3 * &al) * &b) - &(&(q1 * &ga) * &mu)) / &(q1 - q3);
        let b1 = -&(&(&(&(&a * &ga) + &(&(&(q1 - &one) * &nu) * &ga)) + &(&b * &nu)) / &(&one - &(q2 * q3)));
        let z = f.zero();
        let d = BiQuadData {
            q: q.clone(),
            a: [[a, b, z.clone()], [al, z.clone(), ga], [z, mu, nu]],
            b: [b1, b2, b3],
        };
        debug_assert!(biquad_conditions(&d).iter().all(|c| c.is_zero()));
        return d;
    }
}

/// A consistent instance with one entry perturbed so that at least one condition
/// fails. `kind` selects the entry (taken mod 9): b1, b2, b3, mu, nu, gamma,
/// lambda, beta, c.
pub fn biquad_violating<R: Rng>(f: &Field, rng: &mut R, kind: usize) -> BiQuadData {
    loop {
        let mut d = biquad_consistent(f, rng);
        let bump = f.ratio(rng.gen_range(1..=5), rng.gen_range(1..=3));
        let slot = match kind % 9 {
            0 => &mut d.b[0],
            1 => &mut d.b[1],
            2 => &mut d.b[2],
            3 => &mut d.a[2][1],
            4 => &mut d.a[2][2],
            5 => &mut d.a[1][2],
            6 => &mut d.a[2][0],
            7 => &mut d.a[1][1],
            _ => &mut d.a[0][2],
        };
        *slot = &*slot + &bump;
        if biquad_conditions(&d).iter().any(|c| !c.is_zero()) {
            return d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::build_family;
    use crate::rewrite::is_confluent;

    #[test]
    fn q_numbers() {
        let z3 = Field::cyclotomic(3).unwrap();
        assert!(q_number(0, &z3.one()).is_zero());
        assert!(q_number(3, &z3.zeta(3).unwrap()).is_zero());
        assert_eq!(q_number(4, &Field::rational().one()), Field::rational().int(4));
    }

    #[test]
    fn pq_numbers() {
        let f = Field::ratfunc(&["p", "q"]).unwrap();
        let (p, q) = (f.param("p").unwrap(), f.param("q").unwrap());
        assert!(pq_number(1, &p, &q).unwrap().is_one());
        assert_eq!(pq_number(2, &p, &q).unwrap(), &q + &p.inv().unwrap());
        for n in 1..6 {
            let lhs = pq_number(n + 1, &p, &q).unwrap();
            let rhs = &q.pow(n as i64).unwrap() + &(&p.inv().unwrap() * &pq_number(n, &p, &q).unwrap());
            assert_eq!(lhs, rhs);
        }
        let c = Field::cyclotomic(6).unwrap();
        assert!(pq_number(6, &c.zeta(2).unwrap(), &c.zeta(3).unwrap()).unwrap().is_zero());
        assert_eq!(pq_number(3, &q.inv().unwrap(), &q).unwrap(), &f.int(3) * &q.pow(2).unwrap());
        assert_eq!(pq_number(2, &f.zero(), &q).unwrap_err(), IdentityError::ZeroP);
    }

    #[test]
    fn binomials() {
        let f = Field::ratfunc(&["q"]).unwrap();
        let q = f.param("q").unwrap();
        let expect = &(&f.one() + &q) * &(&(&f.one() + &q) + &q.pow(2).unwrap());
        assert_eq!(q_factorial(3, &q), expect);
        assert_eq!(gauss_binomial(2, 1, &q).unwrap(), &f.one() + &q);
        assert!(gauss_binomial(5, 0, &q).unwrap().is_one());
        let z = Field::cyclotomic(3).unwrap();
        assert_eq!(gauss_binomial(4, 3, &z.zeta(3).unwrap()).unwrap_err(), IdentityError::QFactorialVanishes(3));
    }

    #[test]
    fn uqb2_coefficients() {
        let f = Field::ratfunc(&["q"]).unwrap();
        let q = f.param("q").unwrap();
        let (b2, c2) = uqb2_bc(2, &q).unwrap();
        assert_eq!(c2, q.pow(-2).unwrap());
        assert_eq!(b2, &q.pow(2).unwrap() + &q.pow(-2).unwrap());
        // closed form (q^2k - q^-2k)/(q^2 - q^-2)
        for k in 1..6 {
            let (b, _) = uqb2_bc(k, &q).unwrap();
            let num = &q.pow(2 * k as i64).unwrap() - &q.pow(-2 * k as i64).unwrap();
            let den = &q.pow(2).unwrap() - &q.pow(-2).unwrap();
            assert_eq!(b, &num / &den);
        }
    }

    #[test]
    fn base_cases_match_relations() {
        let f = Field::ratfunc(&["p", "q"]).unwrap();
        let p = build_family(&FamilySpec::Hpq { p: f.param("p").unwrap(), q: f.param("q").unwrap() }).unwrap();
        let inst = &oracle_rhs(LemmaId::HYxn, &p, 1).unwrap()[0];
        assert_eq!(p.render(&inst.lhs), "y*x");
        assert_eq!(p.render(&inst.rhs), "q*x*y + t");
        assert!(matches!(oracle_rhs(LemmaId::M2K1, &p, 1), Err(IdentityError::FamilyMismatch { .. })));
        assert!(matches!(oracle_rhs(LemmaId::HThetaRel, &p, 2), Err(IdentityError::RangeError { .. })));
    }

    #[test]
    fn hpq_identities_hold() {
        let f = Field::ratfunc(&["p", "q"]).unwrap();
        let p = build_family(&FamilySpec::Hpq { p: f.param("p").unwrap(), q: f.param("q").unwrap() }).unwrap();
        for id in LemmaId::for_family(FamilyTag::Hpq) {
            let rep = check_paper_identity(id, &p, 6).unwrap();
            assert!(rep.all_pass(), "{id}: {:?}", rep.records.iter().find(|r| !r.pass));
        }
    }

    #[test]
    fn uqb2_identities_hold() {
        let f = Field::ratfunc(&["q"]).unwrap();
        let p = build_family(&FamilySpec::UqB2 { q: f.param("q").unwrap() }).unwrap();
        for id in LemmaId::for_family(FamilyTag::UqB2) {
            let rep = check_paper_identity(id, &p, 5).unwrap();
            assert!(rep.all_pass(), "{id}: {:?}", rep.records.iter().find(|r| !r.pass));
        }
    }

    #[test]
    fn cyc3_identities_hold() {
        let f = Field::ratfunc(&["q", "alpha", "beta", "gamma"]).unwrap();
        let par = |s| f.param(s).unwrap();
        let spec = FamilySpec::ThreeCyclic { q: par("q"), alpha: par("alpha"), beta: par("beta"), gamma: par("gamma") };
        let p = build_family(&spec).unwrap();
        let inst = &oracle_rhs(LemmaId::Cyc3I, &p, 1).unwrap()[0];
        assert_eq!(normal_form(&p, &inst.rhs).unwrap(), normal_form(&p, &p.parse_poly("q^2*y*x + alpha").unwrap()).unwrap());
        for id in LemmaId::for_family(FamilyTag::ThreeCyclic) {
            let rep = check_paper_identity(id, &p, 4).unwrap();
            assert!(rep.all_pass(), "{id}: {:?}", rep.records.iter().find(|r| !r.pass));
        }
    }

    #[test]
    fn biquad_generators() {
        use rand::SeedableRng;
        let f = Field::rational();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for kind in 0..9 {
            let d = biquad_consistent(&f, &mut rng);
            assert!(biquad_conditions(&d).iter().all(|c| c.is_zero()));
            assert!(is_confluent(&build_family(&FamilySpec::BiQuad3(d)).unwrap()).unwrap());
            let v = biquad_violating(&f, &mut rng, kind);
            assert!(!is_confluent(&build_family(&FamilySpec::BiQuad3(v)).unwrap()).unwrap());
        }
    }
}
