//! Sparse multivariate polynomials with arbitrary-precision integer coefficients.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

pub type Mono = SmallVec<[u32; 4]>;

/// A polynomial in `nvars` commuting variables over the integers.
///
/// Keys are exponent vectors of length `nvars`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Mono, BigInt>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(c: BigInt, nvars: usize) -> Self {
        let mut p = MPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(SmallVec::from_elem(0, nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        MPoly::constant(BigInt::one(), nvars)
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        let mut m: Mono = SmallVec::from_elem(0, nvars);
        m[i] = 1;
        let mut p = MPoly::zero(nvars);
        p.terms.insert(m, BigInt::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if the polynomial has no variable part.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    fn add_term(&mut self, m: Mono, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), -c.clone());
        }
        r
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut r = MPoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m: Mono = m1.iter().zip(m2.iter()).map(|(a, b)| a + b).collect();
                r.add_term(m, c1 * c2);
            }
        }
        r
    }

    pub fn scale(&self, c: &BigInt) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut result = MPoly::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Gcd of all coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Componentwise minimum of all exponent vectors.
    pub fn min_mono(&self) -> Mono {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return SmallVec::from_elem(0, self.nvars);
        };
        let mut m = first.clone();
        for k in it {
            for (a, b) in m.iter_mut().zip(k.iter()) {
                *a = (*a).min(*b);
            }
        }
        m
    }

    pub fn div_mono(&self, d: &Mono) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.iter().zip(d.iter()).map(|(a, b)| a - b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn div_int(&self, d: &BigInt) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c / d)).collect(),
        }
    }

    /// Lex-leading term (the map order on exponent vectors is lexicographic).
    pub fn leading(&self) -> Option<(&Mono, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / d` when it exists with integer coefficients.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        let (dm, dc) = d.leading()?;
        let mut rem = self.clone();
        let mut quot = MPoly::zero(self.nvars);
        // Bounded by the number of monomials that can appear below the start.
        let mut budget = 10_000usize;
        while let Some((rm, rc)) = rem.leading() {
            budget = budget.checked_sub(1)?;
            if rm.iter().zip(dm.iter()).any(|(a, b)| a < b) {
                return None;
            }
            let (q, r) = rc.div_rem(dc);
            if !r.is_zero() {
                return None;
            }
            let qm: Mono = rm.iter().zip(dm.iter()).map(|(a, b)| a - b).collect();
            let mut t = MPoly::zero(self.nvars);
            t.terms.insert(qm.clone(), q.clone());
            rem = rem.sub(&t.mul(d));
            quot.add_term(qm, q);
        }
        Some(quot)
    }

    /// Whether the lex-leading coefficient is positive.
    pub fn leading_positive(&self) -> bool {
        self.leading().is_some_and(|(_, c)| c.is_positive())
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            let neg = c.is_negative();
            let a = c.abs();
            let body = if factors.is_empty() {
                a.to_string()
            } else if a.is_one() {
                factors.join("*")
            } else {
                format!("{}*{}", a, factors.join("*"))
            };
            parts.push((neg, body));
        }
        join_signed(&parts)
    }
}

/// Joins signed terms as `a + b - c`, with a leading `-` when the first term is negative.
pub(crate) fn join_signed(parts: &[(bool, String)]) -> String {
    let mut s = String::new();
    for (i, (neg, body)) in parts.iter().enumerate() {
        if i == 0 {
            if *neg {
                s.push('-');
            }
        } else {
            s.push_str(if *neg { " - " } else { " + " });
        }
        s.push_str(body);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> MPoly {
        MPoly::var(0, 1)
    }

    #[test]
    fn exact_division_of_difference_of_squares() {
        let one = MPoly::one(1);
        let num = q().pow(2).sub(&one);
        let den = q().sub(&one);
        assert_eq!(num.div_exact(&den), Some(q().add(&one)));
        assert_eq!(den.div_exact(&num), None);
    }

    #[test]
    fn render_signs() {
        let one = MPoly::one(1);
        let p = one.sub(&q().pow(2).scale(&BigInt::from(3)));
        assert_eq!(p.render(&["q".to_string()]), "-3*q^2 + 1");
    }
}
