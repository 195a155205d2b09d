//! Exact coefficient fields: Q, cyclotomic fields Q(ζ_N), rational-function fields
//! Q(p, q, ...) and small Galois fields GF(p^k).
//!
//! A [`Field`] is a cheap shared handle; every [`Coeff`] carries the field it lives in.
//! Operator impls panic on mixed contexts (a programming error), while the `try_*`
//! methods report [`NumError::CtxMismatch`].

pub mod cyclo;
mod galois;
pub mod mpoly;
pub mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use cyclo::QPoly;
use mpoly::{join_signed, MPoly};
pub use galois::prime_factors;
pub use parse::{parse_expr, Expr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("coefficient contexts differ: {0} vs {1}")]
    CtxMismatch(String, String),
    #[error("root-of-unity order requested for zero")]
    ZeroInput,
    #[error("denominator vanishes under the specialization")]
    DenominatorVanishes,
    #[error("parameter `{0}` has no assigned value")]
    UnassignedParameter(String),
    #[error("symbol `{0}` is not available in field {1}")]
    UnknownSymbol(String, String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rational,
    Cyclotomic(u32),
    RatFunc(Vec<String>),
    /// Monic modulus, constant term first.
    Galois { p: u32, modulus: Vec<u32> },
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Rational => write!(f, "Q"),
            FieldKind::Cyclotomic(n) => write!(f, "cyclo:{n}"),
            FieldKind::RatFunc(names) => write!(f, "ratfunc:{}", names.join(",")),
            FieldKind::Galois { p, modulus } => {
                write!(f, "gf:{p}:{}", render_gf(modulus, "g"))
            }
        }
    }
}

#[derive(Debug)]
struct FieldCtx {
    kind: FieldKind,
    /// Φ_N as a rational polynomial for cyclotomic fields.
    modulus_q: QPoly,
}

/// Shared handle to a coefficient field.
#[derive(Clone)]
pub struct Field(Arc<FieldCtx>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.kind == other.0.kind
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.0.kind)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.kind.fmt(f)
    }
}

impl Field {
    fn from_kind(kind: FieldKind, modulus_q: QPoly) -> Field {
        Field(Arc::new(FieldCtx { kind, modulus_q }))
    }

    pub fn rational() -> Field {
        Field::from_kind(FieldKind::Rational, vec![])
    }

    pub fn cyclotomic(n: u32) -> Result<Field, NumError> {
        if n == 0 {
            return Err(NumError::InvalidField("cyclotomic level must be at least 1".into()));
        }
        let phi = cyclo::cyclotomic_poly(n)
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        Ok(Field::from_kind(FieldKind::Cyclotomic(n), phi))
    }

    pub fn ratfunc<S: AsRef<str>>(names: &[S]) -> Result<Field, NumError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            let valid = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid || parse::zeta_level(n).is_some() {
                return Err(NumError::InvalidField(format!("bad parameter name `{n}`")));
            }
            if names[..i].contains(n) {
                return Err(NumError::InvalidField(format!("duplicate parameter `{n}`")));
            }
        }
        Ok(Field::from_kind(FieldKind::RatFunc(names), vec![]))
    }

    /// GF(p^k) from an integer modulus (constant term first); it is made monic and
    /// checked for irreducibility.
    pub fn galois(p: u32, modulus: &[i64]) -> Result<Field, NumError> {
        if !galois::is_prime(p) || p > galois::MAX_PRIME {
            return Err(NumError::InvalidField(format!(
                "characteristic must be a prime at most {}, got {p}",
                galois::MAX_PRIME
            )));
        }
        let m = galois::normalize_modulus(modulus, p)
            .ok_or_else(|| NumError::InvalidField("zero modulus".into()))?;
        let k = m.len() - 1;
        if k == 0 || k > galois::MAX_DEGREE {
            return Err(NumError::InvalidField(format!(
                "extension degree must be between 1 and {}, got {k}",
                galois::MAX_DEGREE
            )));
        }
        if !galois::is_irreducible(&m, p) {
            return Err(NumError::InvalidField(format!(
                "modulus {} is reducible over GF({p})",
                render_gf(&m, "g")
            )));
        }
        Ok(Field::from_kind(FieldKind::Galois { p, modulus: m }, vec![]))
    }

    /// Prime field GF(p).
    pub fn prime_field(p: u32) -> Result<Field, NumError> {
        Field::galois(p, &[0, 1])
    }

    /// Parses `Q`, `cyclo:N`, `ratfunc:p,q,...`, `gf:p` or `gf:p:poly` (poly in `g`).
    pub fn parse_spec(spec: &str) -> Result<Field, NumError> {
        let spec = spec.trim();
        let bad = || NumError::InvalidField(format!("unrecognized field spec `{spec}`"));
        if spec == "Q" || spec == "QQ" || spec == "rational" {
            return Ok(Field::rational());
        }
        let (head, rest) = spec.split_once(':').ok_or_else(bad)?;
        match head {
            "cyclo" => Field::cyclotomic(rest.trim().parse().map_err(|_| bad())?),
            "ratfunc" => {
                let names: Vec<&str> = rest.split(',').map(str::trim).collect();
                Field::ratfunc(&names)
            }
            "gf" => {
                let (p, poly) = match rest.split_once(':') {
                    Some((p, poly)) => (p, Some(poly)),
                    None => (rest, None),
                };
                let p: u32 = p.trim().parse().map_err(|_| bad())?;
                match poly {
                    None => Field::prime_field(p),
                    Some(poly) => Field::galois(p, &parse_int_poly(poly, "g")?),
                }
            }
            _ => Err(bad()),
        }
    }

    pub fn kind(&self) -> &FieldKind {
        &self.0.kind
    }

    pub fn characteristic(&self) -> u32 {
        match &self.0.kind {
            FieldKind::Galois { p, .. } => *p,
            _ => 0,
        }
    }

    /// Number of elements for Galois fields.
    pub fn order(&self) -> Option<u64> {
        match &self.0.kind {
            FieldKind::Galois { p, modulus } => Some((*p as u64).pow(modulus.len() as u32 - 1)),
            _ => None,
        }
    }

    pub fn param_names(&self) -> &[String] {
        match &self.0.kind {
            FieldKind::RatFunc(names) => names,
            _ => &[],
        }
    }


    fn coeff(&self, val: Val) -> Coeff {
        Coeff { field: self.clone(), val }
    }

    pub fn zero(&self) -> Coeff {
        let val = match &self.0.kind {
            FieldKind::Rational => Val::Rat(BigRational::zero()),
            FieldKind::Cyclotomic(_) => {
                Val::Cyc(vec![BigRational::zero(); self.0.modulus_q.len() - 1])
            }
            FieldKind::RatFunc(n) => Val::Frac(MPoly::zero(n.len()), MPoly::one(n.len())),
            FieldKind::Galois { modulus, .. } => Val::Gf(vec![0; modulus.len() - 1]),
        };
        self.coeff(val)
    }

    pub fn one(&self) -> Coeff {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> Coeff {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Coeff {
        let val = match &self.0.kind {
            FieldKind::Rational => Val::Rat(BigRational::from_integer(n.clone())),
            FieldKind::Cyclotomic(_) => {
                let mut v = vec![BigRational::zero(); self.0.modulus_q.len() - 1];
                v[0] = BigRational::from_integer(n.clone());
                Val::Cyc(v)
            }
            FieldKind::RatFunc(names) => {
                Val::Frac(MPoly::constant(n.clone(), names.len()), MPoly::one(names.len()))
            }
            FieldKind::Galois { p, modulus } => {
                let r = n.mod_floor(&BigInt::from(*p)).to_i64().unwrap();
                Val::Gf(galois::from_int(r, modulus.len() - 1, *p))
            }
        };
        self.coeff(val)
    }

    pub fn from_rational(&self, r: &BigRational) -> Result<Coeff, NumError> {
        let num = self.from_bigint(r.numer());
        let den = self.from_bigint(r.denom());
        num.try_div(&den)
    }

    /// `ratio(a, b)` is a/b; panics when b maps to zero in the field.
    pub fn ratio(&self, a: i64, b: i64) -> Coeff {
        self.from_rational(&BigRational::new(a.into(), b.into()))
            .expect("denominator is nonzero in the field")
    }

    /// ζ_n as an element of this field: ζ_M^{M/n} inside Q(ζ_M), also allowing
    /// n | 2M for odd M via ζ_{2M} = −ζ_M^{(M+1)/2}.
    pub fn zeta(&self, n: u32) -> Result<Coeff, NumError> {
        let missing = || NumError::UnknownSymbol(format!("z{n}"), self.to_string());
        match n {
            0 => return Err(missing()),
            1 => return Ok(self.one()),
            2 => return Ok(-self.one()),
            _ => {}
        }
        let FieldKind::Cyclotomic(m) = self.0.kind else {
            return Err(missing());
        };
        let x = self.cyc_x();
        if m % n == 0 {
            return Ok(x.pow_u(m as u64 / n as u64));
        }
        if m % 2 == 1 && (2 * m) % n == 0 {
            let z2m = -x.pow_u((m as u64 + 1) / 2);
            return Ok(z2m.pow_u(2 * m as u64 / n as u64));
        }
        Err(missing())
    }

    fn cyc_x(&self) -> Coeff {
        let d = self.0.modulus_q.len() - 1;
        let mut v = vec![BigRational::zero(); d];
        let padded: QPoly = vec![BigRational::zero(), BigRational::one()];
        let r = cyclo::q_reduce(&padded, &self.0.modulus_q);
        v[..r.len()].clone_from_slice(&r);
        self.coeff(Val::Cyc(v))
    }

    /// The named parameter of a rational-function field.
    pub fn param(&self, name: &str) -> Result<Coeff, NumError> {
        let names = self.param_names();
        let i = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| NumError::UnknownSymbol(name.into(), self.to_string()))?;
        let n = names.len();
        Ok(self.coeff(Val::Frac(MPoly::var(i, n), MPoly::one(n))))
    }

    /// The class of `g` in GF(p)[g]/(m).
    pub fn gf_generator(&self) -> Result<Coeff, NumError> {
        let FieldKind::Galois { p, modulus } = &self.0.kind else {
            return Err(NumError::UnknownSymbol("g".into(), self.to_string()));
        };
        let k = modulus.len() - 1;
        let mut v = vec![0; k];
        if k == 1 {
            // g reduces to −m₀ in the prime field.
            v[0] = (p - modulus[0]) % p;
        } else {
            v[1] = 1;
        }
        Ok(self.coeff(Val::Gf(v)))
    }

    /// Resolves an identifier of the coefficient grammar.
    pub fn symbol(&self, name: &str) -> Result<Coeff, NumError> {
        if let Some(n) = parse::zeta_level(name) {
            return self.zeta(n);
        }
        match &self.0.kind {
            FieldKind::RatFunc(_) => self.param(name),
            FieldKind::Galois { .. } if name == "g" => self.gf_generator(),
            _ => Err(NumError::UnknownSymbol(name.into(), self.to_string())),
        }
    }

    pub fn eval(&self, e: &Expr) -> Result<Coeff, NumError> {
        Ok(match e {
            Expr::Int(n) => self.from_bigint(n),
            Expr::Sym(s) => self.symbol(s)?,
            Expr::Neg(a) => -self.eval(a)?,
            Expr::Add(a, b) => self.eval(a)? + self.eval(b)?,
            Expr::Sub(a, b) => self.eval(a)? - self.eval(b)?,
            Expr::Mul(a, b) => self.eval(a)? * self.eval(b)?,
            Expr::Div(a, b) => self.eval(a)?.try_div(&self.eval(b)?)?,
            Expr::Pow(a, k) => self.eval(a)?.pow(*k)?,
        })
    }

    /// Parses a coefficient expression in this field.
    pub fn parse(&self, s: &str) -> Result<Coeff, NumError> {
        self.eval(&parse_expr(s)?)
    }
}

/// Parses an expression in the single variable `var` with integer coefficients.
fn parse_int_poly(s: &str, var: &str) -> Result<Vec<i64>, NumError> {
    let f = Field::ratfunc(&[var])?;
    let c = f.parse(s)?;
    let Val::Frac(n, d) = &c.val else { unreachable!() };
    if !d.is_one() {
        return Err(NumError::Parse(format!("`{s}` is not a polynomial")));
    }
    let deg = n.terms().map(|(m, _)| m[0]).max().unwrap_or(0) as usize;
    let mut out = vec![0i64; deg + 1];
    for (m, c) in n.terms() {
        out[m[0] as usize] = c
            .to_i64()
            .ok_or_else(|| NumError::Parse("coefficient too large".into()))?;
    }
    Ok(out)
}

fn render_gf(v: &[u32], var: &str) -> String {
    let mut parts = Vec::new();
    for (i, &c) in v.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let body = match (i, c) {
            (0, c) => c.to_string(),
            (1, 1) => var.to_string(),
            (1, c) => format!("{c}*{var}"),
            (i, 1) => format!("{var}^{i}"),
            (i, c) => format!("{c}*{var}^{i}"),
        };
        parts.push((false, body));
    }
    if parts.is_empty() {
        return "0".into();
    }
    join_signed(&parts)
}

#[derive(Clone, Debug)]
enum Val {
    Rat(BigRational),
    Cyc(Vec<BigRational>),
    Frac(MPoly, MPoly),
    Gf(Vec<u32>),
}

/// An element of an exact coefficient field.
#[derive(Clone)]
pub struct Coeff {
    field: Field,
    val: Val,
}

fn frac_normalize(n: MPoly, d: MPoly) -> (MPoly, MPoly) {
    let nv = n.nvars();
    if n.is_zero() {
        return (MPoly::zero(nv), MPoly::one(nv));
    }
    let (mut n, mut d) = (n, d);
    let mn = n.min_mono();
    let md = d.min_mono();
    let g: mpoly::Mono = mn.iter().zip(md.iter()).map(|(a, b)| *a.min(b)).collect();
    if g.iter().any(|&e| e > 0) {
        n = n.div_mono(&g);
        d = d.div_mono(&g);
    }
    let mut c = n.content().gcd(&d.content());
    if !d.leading_positive() {
        c = -c;
    }
    if !c.is_one() {
        n = n.div_int(&c);
        d = d.div_int(&c);
    }
    if d.num_terms() > 1 {
        if let Some(q) = n.div_exact(&d) {
            return (q, MPoly::one(nv));
        }
        if n.num_terms() > 1 {
            if let Some(q) = d.div_exact(&n) {
                let (one, q) = if q.leading_positive() {
                    (MPoly::one(nv), q)
                } else {
                    (MPoly::one(nv).neg(), q.neg())
                };
                return (one, q);
            }
        }
    }
    (n, d)
}

fn rat_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| BigRational::new(sn, sd))
}

impl Coeff {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.val {
            Val::Rat(r) => r.is_zero(),
            Val::Cyc(v) => v.iter().all(|c| c.is_zero()),
            Val::Frac(n, _) => n.is_zero(),
            Val::Gf(v) => galois::is_zero(v),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.val {
            Val::Rat(r) => r.is_one(),
            Val::Cyc(v) => v[0].is_one() && v[1..].iter().all(|c| c.is_zero()),
            Val::Frac(n, d) => n == d,
            Val::Gf(v) => galois::is_one(v),
        }
    }

    fn check(&self, other: &Coeff) -> Result<(), NumError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(NumError::CtxMismatch(self.field.to_string(), other.field.to_string()))
        }
    }

    fn add_same(&self, other: &Coeff) -> Coeff {
        let val = match (&self.val, &other.val) {
            (Val::Rat(a), Val::Rat(b)) => Val::Rat(a + b),
            (Val::Cyc(a), Val::Cyc(b)) => Val::Cyc(a.iter().zip(b).map(|(x, y)| x + y).collect()),
            (Val::Frac(n1, d1), Val::Frac(n2, d2)) => {
                let (n, d) = if d1 == d2 {
                    (n1.add(n2), d1.clone())
                } else if d1.is_one() {
                    (n1.mul(d2).add(n2), d2.clone())
                } else if d2.is_one() {
                    (n1.add(&n2.mul(d1)), d1.clone())
                } else {
                    (n1.mul(d2).add(&n2.mul(d1)), d1.mul(d2))
                };
                let (n, d) = frac_normalize(n, d);
                Val::Frac(n, d)
            }
            (Val::Gf(a), Val::Gf(b)) => Val::Gf(galois::add(a, b, self.field.characteristic())),
            _ => unreachable!("values of one field share a representation"),
        };
        self.field.coeff(val)
    }

    fn mul_same(&self, other: &Coeff) -> Coeff {
        let val = match (&self.val, &other.val) {
            (Val::Rat(a), Val::Rat(b)) => Val::Rat(a * b),
            (Val::Cyc(a), Val::Cyc(b)) => {
                let m = &self.field.0.modulus_q;
                Val::Cyc(cyclo::q_reduce(&cyclo::q_mul(a, b), m))
            }
            (Val::Frac(n1, d1), Val::Frac(n2, d2)) => {
                let (n, d) = frac_normalize(n1.mul(n2), d1.mul(d2));
                Val::Frac(n, d)
            }
            (Val::Gf(a), Val::Gf(b)) => {
                let FieldKind::Galois { p, modulus } = &self.field.0.kind else { unreachable!() };
                Val::Gf(galois::mul(a, b, modulus, *p))
            }
            _ => unreachable!("values of one field share a representation"),
        };
        self.field.coeff(val)
    }

    fn neg_val(&self) -> Coeff {
        let val = match &self.val {
            Val::Rat(a) => Val::Rat(-a),
            Val::Cyc(a) => Val::Cyc(a.iter().map(|x| -x).collect()),
            Val::Frac(n, d) => Val::Frac(n.neg(), d.clone()),
            Val::Gf(a) => Val::Gf(galois::neg(a, self.field.characteristic())),
        };
        self.field.coeff(val)
    }

    pub fn try_add(&self, other: &Coeff) -> Result<Coeff, NumError> {
        self.check(other)?;
        Ok(self.add_same(other))
    }

    pub fn try_sub(&self, other: &Coeff) -> Result<Coeff, NumError> {
        self.check(other)?;
        Ok(self.add_same(&other.neg_val()))
    }

    pub fn try_mul(&self, other: &Coeff) -> Result<Coeff, NumError> {
        self.check(other)?;
        Ok(self.mul_same(other))
    }

    pub fn try_div(&self, other: &Coeff) -> Result<Coeff, NumError> {
        self.check(other)?;
        Ok(self.mul_same(&other.inv()?))
    }

    pub fn try_eq(&self, other: &Coeff) -> Result<bool, NumError> {
        self.check(other)?;
        Ok(self.val_eq(other))
    }

    fn val_eq(&self, other: &Coeff) -> bool {
        match (&self.val, &other.val) {
            (Val::Rat(a), Val::Rat(b)) => a == b,
            (Val::Cyc(a), Val::Cyc(b)) => a == b,
            (Val::Frac(n1, d1), Val::Frac(n2, d2)) => {
                (n1 == n2 && d1 == d2) || n1.mul(d2) == n2.mul(d1)
            }
            (Val::Gf(a), Val::Gf(b)) => a == b,
            _ => false,
        }
    }

    pub fn inv(&self) -> Result<Coeff, NumError> {
        if self.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        let val = match &self.val {
            Val::Rat(a) => Val::Rat(a.recip()),
            Val::Cyc(a) => {
                let m = &self.field.0.modulus_q;
                Val::Cyc(cyclo::q_inv_mod(a, m).ok_or(NumError::DivisionByZero)?)
            }
            Val::Frac(n, d) => {
                let (n, d) = frac_normalize(d.clone(), n.clone());
                Val::Frac(n, d)
            }
            Val::Gf(a) => {
                let FieldKind::Galois { p, modulus } = &self.field.0.kind else { unreachable!() };
                let q = self.field.order().unwrap();
                Val::Gf(galois::pow(a, q - 2, modulus, *p))
            }
        };
        Ok(self.field.coeff(val))
    }

    fn pow_u(&self, e: u64) -> Coeff {
        let mut result = self.field.one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_same(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_same(&base);
            }
        }
        result
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn pow(&self, e: i64) -> Result<Coeff, NumError> {
        if e >= 0 {
            Ok(self.pow_u(e as u64))
        } else {
            Ok(self.inv()?.pow_u(e.unsigned_abs()))
        }
    }

    /// Least m ≥ 1 with a^m = 1, or `None` when `a` is not a root of unity.
    pub fn root_of_unity_order(&self) -> Result<Option<u64>, NumError> {
        if self.is_zero() {
            return Err(NumError::ZeroInput);
        }
        let one = self.field.one();
        match &self.field.0.kind {
            FieldKind::Rational | FieldKind::RatFunc(_) => {
                if self.val_eq(&one) {
                    Ok(Some(1))
                } else if self.val_eq(&-one) {
                    Ok(Some(2))
                } else {
                    Ok(None)
                }
            }
            FieldKind::Cyclotomic(n) => {
                let l = cyclo::lcm(2, *n as u64);
                Ok(cyclo::divisors(l).into_iter().find(|&m| self.pow_u(m).is_one()))
            }
            FieldKind::Galois { .. } => {
                let mut m = self.field.order().unwrap() - 1;
                for r in galois::prime_factors(m) {
                    while m % r == 0 && self.pow_u(m / r).is_one() {
                        m /= r;
                    }
                }
                Ok(Some(m))
            }
        }
    }

    /// The value as a rational number when it lies in the prime subfield of a
    /// characteristic-zero field.
    pub fn to_rational(&self) -> Option<BigRational> {
        match &self.val {
            Val::Rat(r) => Some(r.clone()),
            Val::Cyc(v) => v[1..].iter().all(|c| c.is_zero()).then(|| v[0].clone()),
            Val::Frac(n, d) => {
                let (n, d) = (n.as_constant()?, d.as_constant()?);
                Some(BigRational::new(n, d))
            }
            Val::Gf(_) => None,
        }
    }

    /// An exact square root in the same field when one is found.
    ///
    /// Rationals and constant rational functions use integer square roots; cyclotomic
    /// values are searched in the form r·ζ^k with r rational; Galois fields are
    /// searched exhaustively when small.
    pub fn sqrt(&self) -> Option<Coeff> {
        if self.is_zero() {
            return Some(self.clone());
        }
        match &self.field.0.kind {
            FieldKind::Rational | FieldKind::RatFunc(_) => {
                let s = rat_sqrt(&self.to_rational()?)?;
                self.field.from_rational(&s).ok()
            }
            FieldKind::Cyclotomic(n) => {
                let l = 2 * cyclo::lcm(2, *n as u64) as u32;
                let z = self.field.zeta(l).or_else(|_| self.field.zeta(l / 2)).ok()?;
                let mut zk = self.field.one();
                for _ in 0..l {
                    let r = self.mul_same(&zk.mul_same(&zk).inv().ok()?);
                    if let Some(s) = r.to_rational().as_ref().and_then(rat_sqrt) {
                        return Some(self.field.from_rational(&s).ok()?.mul_same(&zk));
                    }
                    zk = zk.mul_same(&z);
                }
                None
            }
            FieldKind::Galois { p, modulus } => {
                let size = self.field.order()?;
                if size > 1 << 20 {
                    return None;
                }
                let k = modulus.len() - 1;
                (0..size).find_map(|idx| {
                    let mut v = vec![0u32; k];
                    let mut x = idx;
                    for c in v.iter_mut() {
                        *c = (x % *p as u64) as u32;
                        x /= *p as u64;
                    }
                    let c = self.field.coeff(Val::Gf(v));
                    c.mul_same(&c).val_eq(self).then_some(c)
                })
            }
        }
    }

    /// Evaluates a rational-function value at an assignment of its parameters into
    /// `target`. Rational values embed into any target; other values only map to
    /// their own field.
    pub fn specialize(
        &self,
        target: &Field,
        assignment: &BTreeMap<String, Coeff>,
    ) -> Result<Coeff, NumError> {
        for v in assignment.values() {
            if v.field != *target {
                return Err(NumError::CtxMismatch(v.field.to_string(), target.to_string()));
            }
        }
        match &self.val {
            Val::Frac(n, d) => {
                let names = self.field.param_names();
                let values: Vec<Coeff> = names
                    .iter()
                    .map(|name| {
                        assignment
                            .get(name)
                            .cloned()
                            .ok_or_else(|| NumError::UnassignedParameter(name.clone()))
                    })
                    .collect::<Result<_, _>>()?;
                let den = eval_mpoly(d, &values, target);
                if den.is_zero() {
                    return Err(NumError::DenominatorVanishes);
                }
                Ok(eval_mpoly(n, &values, target).mul_same(&den.inv()?))
            }
            Val::Rat(r) => target.from_rational(r),
            _ if self.field == *target => Ok(self.clone()),
            _ => Err(NumError::CtxMismatch(self.field.to_string(), target.to_string())),
        }
    }
}

fn eval_mpoly(p: &MPoly, values: &[Coeff], target: &Field) -> Coeff {
    let mut acc = target.zero();
    for (m, c) in p.terms() {
        let mut t = target.from_bigint(c);
        for (v, &e) in values.iter().zip(m.iter()) {
            if e > 0 {
                t = t.mul_same(&v.pow_u(e as u64));
            }
        }
        acc = acc.add_same(&t);
    }
    acc
}

impl PartialEq for Coeff {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.val_eq(other)
    }
}

impl Eq for Coeff {}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.val {
            Val::Rat(r) => write!(f, "{r}"),
            Val::Cyc(v) => {
                let FieldKind::Cyclotomic(n) = self.field.0.kind else { unreachable!() };
                let mut parts = Vec::new();
                for (i, c) in v.iter().enumerate().rev() {
                    if c.is_zero() {
                        continue;
                    }
                    let a = c.abs();
                    let sym = match i {
                        0 => String::new(),
                        1 => format!("z{n}"),
                        _ => format!("z{n}^{i}"),
                    };
                    let body = if sym.is_empty() {
                        a.to_string()
                    } else if a.is_one() {
                        sym
                    } else {
                        format!("{a}*{sym}")
                    };
                    parts.push((c.is_negative(), body));
                }
                if parts.is_empty() {
                    write!(f, "0")
                } else {
                    write!(f, "{}", join_signed(&parts))
                }
            }
            Val::Frac(n, d) => {
                let names = self.field.param_names();
                let ns = n.render(names);
                if d.is_one() {
                    write!(f, "{ns}")
                } else {
                    let ns = if n.num_terms() > 1 { format!("({ns})") } else { ns };
                    write!(f, "{ns}/({})", d.render(names))
                }
            }
            Val::Gf(v) => write!(f, "{}", render_gf(v, "g")),
        }
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in {}", self.field)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Coeff> for &Coeff {
            type Output = Coeff;
            fn $m(self, rhs: &Coeff) -> Coeff {
                if let Err(e) = self.check(rhs) {
                    panic!("{e}");
                }
                #[allow(clippy::redundant_closure_call)]
                ($body)(self, rhs)
            }
        }
        impl $tr<Coeff> for Coeff {
            type Output = Coeff;
            fn $m(self, rhs: Coeff) -> Coeff {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Coeff> for Coeff {
            type Output = Coeff;
            fn $m(self, rhs: &Coeff) -> Coeff {
                (&self).$m(rhs)
            }
        }
        impl $tr<Coeff> for &Coeff {
            type Output = Coeff;
            fn $m(self, rhs: Coeff) -> Coeff {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a: &Coeff, b: &Coeff| a.add_same(b));
binop!(Sub, sub, |a: &Coeff, b: &Coeff| a.add_same(&b.neg_val()));
binop!(Mul, mul, |a: &Coeff, b: &Coeff| a.mul_same(b));
binop!(Div, div, |a: &Coeff, b: &Coeff| a
    .mul_same(&b.inv().expect("division by zero coefficient")));

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        self.neg_val()
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        self.neg_val()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta4_squared_is_minus_one() {
        let f = Field::cyclotomic(4).unwrap();
        let z = f.zeta(4).unwrap();
        assert_eq!(&z * &z, f.int(-1));
    }

    #[test]
    fn fraction_equality_by_cross_multiplication() {
        let f = Field::ratfunc(&["q"]).unwrap();
        let a = f.parse("(q^2-1)/(q-1)").unwrap();
        assert_eq!(a, f.parse("q+1").unwrap());
    }

    #[test]
    fn rational_inverse() {
        let f = Field::rational();
        assert_eq!(f.ratio(2, 3).inv().unwrap(), f.ratio(3, 2));
        assert_eq!(f.zero().inv(), Err(NumError::DivisionByZero));
    }

    #[test]
    fn orders() {
        let c6 = Field::cyclotomic(6).unwrap();
        assert_eq!(c6.parse("z6^3").unwrap().root_of_unity_order(), Ok(Some(2)));
        let q = Field::rational();
        assert_eq!(q.int(2).root_of_unity_order(), Ok(None));
        assert_eq!(q.zero().root_of_unity_order(), Err(NumError::ZeroInput));
        let c3 = Field::cyclotomic(3).unwrap();
        assert_eq!(c3.parse("-z3").unwrap().root_of_unity_order(), Ok(Some(6)));
        let r = Field::ratfunc(&["q"]).unwrap();
        assert_eq!(r.parse("q").unwrap().root_of_unity_order(), Ok(None));
        assert_eq!(r.parse("q/q*(-1)").unwrap().root_of_unity_order(), Ok(Some(2)));
    }

    #[test]
    fn galois_orders_divide_group_order() {
        let f = Field::parse_spec("gf:3:g^2+1").unwrap();
        let g = f.gf_generator().unwrap();
        assert_eq!(g.root_of_unity_order(), Ok(Some(4)));
        assert_eq!(f.int(2).root_of_unity_order(), Ok(Some(2)));
        assert!(Field::parse_spec("gf:5:g^2+1").is_err());
    }

    #[test]
    fn specializations() {
        let r = Field::ratfunc(&["p", "q"]).unwrap();
        let c3 = Field::cyclotomic(3).unwrap();
        let z = c3.zeta(3).unwrap();
        let mut asg = BTreeMap::new();
        asg.insert("q".to_string(), z.clone());
        asg.insert("p".to_string(), z.inv().unwrap());
        let a = r.parse("(q^2-1)/(q-1)").unwrap();
        assert_eq!(a.specialize(&c3, &asg).unwrap(), &z + c3.one());
        let b = r.parse("1/(q-p^-1)").unwrap();
        assert_eq!(b.specialize(&c3, &asg), Err(NumError::DenominatorVanishes));
        let only_q: BTreeMap<_, _> = [("q".to_string(), c3.int(2))].into();
        assert_eq!(
            r.parse("q").unwrap().specialize(&c3, &only_q),
            Err(NumError::UnassignedParameter("p".into()))
        );
    }

    #[test]
    fn embedded_roots_for_odd_levels() {
        let c3 = Field::cyclotomic(3).unwrap();
        let z6 = c3.zeta(6).unwrap();
        assert_eq!(z6.root_of_unity_order(), Ok(Some(6)));
        assert_eq!(z6.pow(2).unwrap(), c3.zeta(3).unwrap());
        assert!(c3.zeta(4).is_err());
    }

    #[test]
    fn display_round_trips() {
        for (spec, text) in [
            ("cyclo:5", "3/2*z5^3 - z5 + 7"),
            ("ratfunc:p,q", "(p^2*q - 3)/(q^2 + p)"),
            ("gf:3:g^2+1", "2*g + 1"),
            ("Q", "-5/7"),
        ] {
            let f = Field::parse_spec(spec).unwrap();
            let c = f.parse(text).unwrap();
            assert_eq!(f.parse(&c.to_string()).unwrap(), c, "{spec}: {c}");
        }
    }

    #[test]
    fn square_roots() {
        let q = Field::rational();
        assert_eq!(q.ratio(9, 4).sqrt(), Some(q.ratio(3, 2)));
        assert_eq!(q.int(2).sqrt(), None);
        let c4 = Field::cyclotomic(4).unwrap();
        let s = c4.int(-4).sqrt().unwrap();
        assert_eq!(&s * &s, c4.int(-4));
        let c3 = Field::cyclotomic(3).unwrap();
        let d = c3.parse("4*z3").unwrap();
        let s = d.sqrt().unwrap();
        assert_eq!(&s * &s, d);
    }

    #[test]
    fn mixed_contexts_are_reported() {
        let a = Field::rational().one();
        let b = Field::cyclotomic(3).unwrap().one();
        assert!(matches!(a.try_add(&b), Err(NumError::CtxMismatch(..))));
    }
}
