use std::collections::BTreeMap;
use std::ops::Deref;

use super::Word;
use crate::exactnum::{Coeff, Field, NumError};

/// Element of the free algebra: a finite sum of coefficient × word. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreePoly {
    field: Field,
    terms: BTreeMap<Word, Coeff>,
}

impl FreePoly {
    pub fn zero(field: &Field) -> FreePoly {
        FreePoly { field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn one(field: &Field) -> FreePoly {
        FreePoly::constant(field.one())
    }

    pub fn constant(c: Coeff) -> FreePoly {
        FreePoly::term(c, Word::new())
    }

    pub fn word(field: &Field, w: Word) -> FreePoly {
        FreePoly::term(field.one(), w)
    }

    pub fn term(c: Coeff, w: Word) -> FreePoly {
        let mut p = FreePoly::zero(c.field());
        if !c.is_zero() {
            p.terms.insert(w, c);
        }
        p
    }

    /// Builds a polynomial from (coefficient, word) pairs, combining repeats.
    pub fn from_terms<I: IntoIterator<Item = (Coeff, Word)>>(field: &Field, it: I) -> FreePoly {
        let mut p = FreePoly::zero(field);
        for (c, w) in it {
            p.add_term(w, c);
        }
        p
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Coeff)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Word, Coeff> {
        self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &[u8]) -> Coeff {
        self.terms.get(w).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// The value if this is a scalar multiple of the empty word (zero included).
    pub fn as_scalar(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(self.field.zero()),
            1 => self.terms.get(&Word::new()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, w: Word, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn try_add(&self, other: &FreePoly) -> Result<FreePoly, NumError> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &FreePoly) -> Result<FreePoly, NumError> {
        self.check(other)?;
        let mut out = FreePoly::zero(&self.field);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.add_term(w, ca * cb);
            }
        }
        Ok(out)
    }

    fn check(&self, other: &FreePoly) -> Result<(), NumError> {
        if self.field != other.field {
            return Err(NumError::CtxMismatch(self.field.to_string(), other.field.to_string()));
        }
        Ok(())
    }

    /// Sum; panics on mixed fields.
    pub fn add(&self, other: &FreePoly) -> FreePoly {
        self.try_add(other).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn sub(&self, other: &FreePoly) -> FreePoly {
        self.add(&other.neg())
    }

    /// Free (concatenation) product; panics on mixed fields.
    pub fn mul(&self, other: &FreePoly) -> FreePoly {
        self.try_mul(other).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn neg(&self) -> FreePoly {
        FreePoly {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Coeff) -> FreePoly {
        if c.is_zero() {
            return FreePoly::zero(&self.field);
        }
        FreePoly {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(w, d)| (w.clone(), d * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> FreePoly {
        let mut out = FreePoly::one(&self.field);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Coefficient-wise [`Coeff::specialize`] into `target`.
    pub fn specialize(&self, target: &Field, assignment: &BTreeMap<String, Coeff>) -> Result<FreePoly, NumError> {
        let mut out = FreePoly::zero(target);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.specialize(target, assignment)?);
        }
        Ok(out)
    }

    /// Largest word present with respect to a caller-supplied order.
    pub fn max_word_by<F>(&self, mut cmp: F) -> Option<&Word>
    where
        F: FnMut(&Word, &Word) -> std::cmp::Ordering,
    {
        self.terms.keys().max_by(|a, b| cmp(a, b))
    }
}

/// A polynomial whose every word is irreducible for the presentation that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NCPoly(FreePoly);

impl NCPoly {
    pub(crate) fn from_normalized(p: FreePoly) -> NCPoly {
        NCPoly(p)
    }

    pub fn into_inner(self) -> FreePoly {
        self.0
    }

    pub fn as_free(&self) -> &FreePoly {
        &self.0
    }
}

impl Deref for NCPoly {
    type Target = FreePoly;
    fn deref(&self) -> &FreePoly {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[u8]) -> Word {
        v.iter().copied().collect()
    }

    #[test]
    fn cancellation_drops_terms() {
        let f = Field::rational();
        let a = FreePoly::term(f.int(3), w(&[0, 1]));
        let b = FreePoly::term(f.int(-3), w(&[0, 1]));
        assert!(a.add(&b).is_zero());
    }

    #[test]
    fn concatenation_product() {
        let f = Field::rational();
        let x = FreePoly::word(&f, w(&[0]));
        let y = FreePoly::word(&f, w(&[1]));
        let s = x.add(&y);
        let sq = s.mul(&s);
        assert_eq!(sq.num_terms(), 4);
        assert_eq!(sq.coeff(&[1, 0]), f.one());
        assert_eq!(x.pow(3).coeff(&[0, 0, 0]), f.one());
    }

    #[test]
    fn mixed_fields_error() {
        let a = FreePoly::one(&Field::rational());
        let b = FreePoly::one(&Field::cyclotomic(3).unwrap());
        assert!(a.try_add(&b).is_err());
    }
}
