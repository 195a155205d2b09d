//! Normal forms with respect to a presentation's rules, products, commutators and
//! critical-pair (diamond lemma) analysis.

use std::collections::HashMap;

use thiserror::Error;

use crate::exactnum::{Coeff, NumError};
use crate::presentation::{FreePoly, NCPoly, Presentation, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("presentation rules are not oriented; rewriting might not terminate")]
    Unoriented,
}

fn check_ctx(p: &Presentation, a: &FreePoly) -> Result<(), RewriteError> {
    if a.field() != p.field() {
        return Err(NumError::CtxMismatch(a.field().to_string(), p.field().to_string()).into());
    }
    Ok(())
}

/// Rewrites to an irreducible representative; unique when the presentation is
/// confluent.
///
/// Words are normalized right to left: with `m` already irreducible, every redex of
/// `g·m` starts at the first letter, and the normal forms of such products are
/// memoized for the duration of the call.
pub fn normal_form(p: &Presentation, input: &FreePoly) -> Result<NCPoly, RewriteError> {
    check_ctx(p, input)?;
    if !p.is_oriented() {
        return Err(RewriteError::Unoriented);
    }
    let mut nf = Normalizer { p, cache: HashMap::new() };
    let mut out = FreePoly::zero(p.field());
    for (w, c) in input.terms() {
        let r = nf.word_times(w, &Word::new());
        for (rw, rc) in r.terms() {
            out.add_term(rw.clone(), c * rc);
        }
    }
    Ok(NCPoly::from_normalized(out))
}

struct Normalizer<'a> {
    p: &'a Presentation,
    cache: HashMap<Word, FreePoly>,
}

impl Normalizer<'_> {
    /// Normal form of `prefix · tail` for an irreducible `tail`.
    fn word_times(&mut self, prefix: &[u8], tail: &[u8]) -> FreePoly {
        let f = self.p.field();
        let mut acc = FreePoly::word(f, tail.iter().copied().collect());
        for &g in prefix.iter().rev() {
            let mut next = FreePoly::zero(f);
            for (m, c) in acc.terms() {
                let r = self.gen_times(g, m);
                for (rw, rc) in r.terms() {
                    next.add_term(rw.clone(), c * rc);
                }
            }
            acc = next;
        }
        acc
    }

    /// Normal form of `g · m` for an irreducible `m`.
    fn gen_times(&mut self, g: u8, m: &[u8]) -> FreePoly {
        let mut key: Word = Word::with_capacity(m.len() + 1);
        key.push(g);
        key.extend_from_slice(m);
        if let Some(r) = self.cache.get(&key) {
            return r.clone();
        }
        let f = self.p.field();
        let out = match self.p.find_redex(&key) {
            None => FreePoly::word(f, key.clone()),
            Some((pos, k)) => {
                debug_assert_eq!(pos, 0, "redex inside an irreducible word");
                let rule = &self.p.rules()[k];
                let tail: Word = key[rule.lhs.len()..].iter().copied().collect();
                let mut acc = FreePoly::zero(f);
                for (rw, rc) in rule.rhs.terms() {
                    let r = self.word_times(rw, &tail);
                    for (w, c) in r.terms() {
                        acc.add_term(w.clone(), rc * c);
                    }
                }
                acc
            }
        };
        self.cache.insert(key, out.clone());
        out
    }
}

/// Normal form of an expression in the generator/coefficient grammar.
pub fn normal_form_str(p: &Presentation, s: &str) -> Result<NCPoly, Box<dyn std::error::Error>> {
    Ok(normal_form(p, &p.parse_poly(s)?)?)
}

pub fn multiply(p: &Presentation, a: &FreePoly, b: &FreePoly) -> Result<NCPoly, RewriteError> {
    check_ctx(p, a)?;
    check_ctx(p, b)?;
    normal_form(p, &a.mul(b))
}

/// Normal form of `ab - λ ba`.
pub fn q_commutator(p: &Presentation, a: &FreePoly, b: &FreePoly, lambda: &Coeff) -> Result<NCPoly, RewriteError> {
    check_ctx(p, a)?;
    check_ctx(p, b)?;
    if lambda.field() != p.field() {
        return Err(NumError::CtxMismatch(lambda.field().to_string(), p.field().to_string()).into());
    }
    normal_form(p, &a.mul(b).sub(&b.mul(a).scale(lambda)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    /// A proper suffix of the first lhs equals a prefix of the second.
    Overlap,
    /// The second lhs occurs inside the first.
    Containment,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPair {
    pub kind: PairKind,
    pub rules: (usize, usize),
    pub word: Word,
    pub reduct_a: FreePoly,
    pub reduct_b: FreePoly,
    pub nf_a: NCPoly,
    pub nf_b: NCPoly,
    /// `nf_a - nf_b`, a combination of irreducible words.
    pub residual: FreePoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfluenceReport {
    pub pairs: Vec<CriticalPair>,
    pub confluent: bool,
}

impl ConfluenceReport {
    pub fn failures(&self) -> impl Iterator<Item = &CriticalPair> {
        self.pairs.iter().filter(|c| !c.residual.is_zero())
    }
}

fn splice(field: &crate::exactnum::Field, pre: &[u8], mid: &FreePoly, post: &[u8]) -> FreePoly {
    FreePoly::from_terms(
        field,
        mid.terms().map(|(w, c)| {
            let mut nw: Word = pre.iter().copied().collect();
            nw.extend_from_slice(w);
            nw.extend_from_slice(post);
            (c.clone(), nw)
        }),
    )
}

/// Enumerates overlap and containment ambiguities and resolves each both ways.
pub fn overlap_check(p: &Presentation) -> Result<ConfluenceReport, RewriteError> {
    if !p.is_oriented() {
        return Err(RewriteError::Unoriented);
    }
    let f = p.field();
    let rules = p.rules();
    let mut pairs = Vec::new();
    for (i, ri) in rules.iter().enumerate() {
        for (j, rj) in rules.iter().enumerate() {
            let (a, b) = (&ri.lhs, &rj.lhs);
            for k in 1..a.len().min(b.len()) {
                if a[a.len() - k..] != b[..k] {
                    continue;
                }
                let mut word = a.clone();
                word.extend_from_slice(&b[k..]);
                let reduct_a = splice(f, &[], &ri.rhs, &b[k..]);
                let reduct_b = splice(f, &a[..a.len() - k], &rj.rhs, &[]);
                pairs.push(resolve(p, PairKind::Overlap, (i, j), word, reduct_a, reduct_b)?);
            }
            if i != j && b.len() <= a.len() {
                for s in 0..=a.len() - b.len() {
                    if a[s..s + b.len()] != b[..] {
                        continue;
                    }
                    let reduct_a = ri.rhs.clone();
                    let reduct_b = splice(f, &a[..s], &rj.rhs, &a[s + b.len()..]);
                    pairs.push(resolve(p, PairKind::Containment, (i, j), a.clone(), reduct_a, reduct_b)?);
                }
            }
        }
    }
    let confluent = pairs.iter().all(|c| c.residual.is_zero());
    let _ = p.confluence_cache().set(confluent);
    Ok(ConfluenceReport { pairs, confluent })
}

fn resolve(
    p: &Presentation,
    kind: PairKind,
    rules: (usize, usize),
    word: Word,
    reduct_a: FreePoly,
    reduct_b: FreePoly,
) -> Result<CriticalPair, RewriteError> {
    let nf_a = normal_form(p, &reduct_a)?;
    let nf_b = normal_form(p, &reduct_b)?;
    let residual = nf_a.sub(&nf_b);
    Ok(CriticalPair { kind, rules, word, reduct_a, reduct_b, nf_a, nf_b, residual })
}

/// Cached confluence flag.
pub fn is_confluent(p: &Presentation) -> Result<bool, RewriteError> {
    if let Some(&c) = p.confluence_cache().get() {
        return Ok(c);
    }
    Ok(overlap_check(p)?.confluent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Field;
    use crate::presentation::{build_family, FamilySpec, RewriteRule};

    fn hpq() -> Presentation {
        let f = Field::ratfunc(&["p", "q"]).unwrap();
        build_family(&FamilySpec::Hpq { p: f.param("p").unwrap(), q: f.param("q").unwrap() }).unwrap()
    }

    fn nf(p: &Presentation, s: &str) -> String {
        p.render(&normal_form_str(p, s).unwrap())
    }

    #[test]
    fn hpq_examples() {
        let p = hpq();
        assert_eq!(nf(&p, "y*x"), "q*x*y + t");
        let lhs = normal_form_str(&p, "y*x^2").unwrap();
        let rhs = normal_form_str(&p, "q^2*x^2*y + (q + p^-1)*x*t").unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(nf(&p, "x"), "x");
    }

    #[test]
    fn hpq_confluent() {
        let p = hpq();
        let rep = overlap_check(&p).unwrap();
        assert!(rep.confluent);
        // y*x*t is the only ambiguity.
        assert_eq!(rep.pairs.len(), 1);
        assert_eq!(p.render_word(&rep.pairs[0].word), "y*x*t");
        let expect = normal_form_str(&p, "q*t*x*y + t^2").unwrap();
        // The two sides agree with the hand expansion up to the t/x ordering.
        let target = normal_form(&p, &expect).unwrap();
        assert_eq!(rep.pairs[0].nf_a, target);
    }

    #[test]
    fn commutators() {
        let p = hpq();
        let f = p.field().clone();
        let x = p.parse_poly("x").unwrap();
        let y = p.parse_poly("y").unwrap();
        assert!(q_commutator(&p, &x, &x, &f.one()).unwrap().is_zero());
        assert_eq!(p.render(&q_commutator(&p, &y, &x, &f.param("q").unwrap()).unwrap()), "t");
    }

    #[test]
    fn containment_pairs_are_found() {
        let f = Field::rational();
        let g: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let w = |v: &[u8]| -> Word { v.iter().copied().collect() };
        // ba -> ab and bba -> a: the first lhs sits inside the second.
        let r1 = RewriteRule { lhs: w(&[1, 0]), rhs: FreePoly::word(&f, w(&[0, 1])) };
        let r2 = RewriteRule { lhs: w(&[1, 1, 0]), rhs: FreePoly::word(&f, w(&[0])) };
        let p = Presentation::new(f, g.clone(), vec![1, 1], &g, vec![r1, r2]).unwrap();
        let rep = overlap_check(&p).unwrap();
        let c: Vec<_> = rep.pairs.iter().filter(|c| c.kind == PairKind::Containment).collect();
        assert_eq!(c.len(), 1);
        assert!(!rep.confluent);
    }

    #[test]
    fn unoriented_presentation_rejected() {
        let f = Field::rational();
        let g: Vec<String> = ["x", "y"].iter().map(|s| s.to_string()).collect();
        let rule = RewriteRule {
            lhs: [0, 1].into_iter().collect(),
            rhs: FreePoly::word(&f, [1, 0, 0].into_iter().collect()),
        };
        let p = Presentation::new(f.clone(), g.clone(), vec![1, 1], &g, vec![rule]).unwrap();
        assert_eq!(normal_form(&p, &FreePoly::one(&f)).unwrap_err(), RewriteError::Unoriented);
    }
}
