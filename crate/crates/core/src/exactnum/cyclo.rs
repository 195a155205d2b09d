//! Dense univariate polynomial helpers over Q used by the cyclotomic field.
//!
//! Polynomials are coefficient vectors, constant term first, with no trailing zeros
//! (the zero polynomial is the empty vector).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub(crate) fn trim<T: Zero>(v: &mut Vec<T>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Φ_n with integer coefficients via Φ_n = (x^n − 1) / ∏_{d | n, d < n} Φ_d.
pub fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            num = int_div_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

/// Exact division by a monic integer polynomial.
fn int_div_exact(a: &[BigInt], m: &[BigInt]) -> Vec<BigInt> {
    let dm = m.len() - 1;
    let mut rem = a.to_vec();
    if rem.len() <= dm {
        return vec![];
    }
    let mut q = vec![BigInt::zero(); rem.len() - dm];
    for i in (0..q.len()).rev() {
        let c = rem[i + dm].clone();
        if c.is_zero() {
            continue;
        }
        for (j, mj) in m.iter().enumerate() {
            rem[i + j] -= &c * mj;
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    trim(&mut q);
    q
}

pub fn euler_phi(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub(crate) type QPoly = Vec<BigRational>;

pub(crate) fn q_mul(a: &[BigRational], b: &[BigRational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    trim(&mut r);
    r
}

fn q_sub(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let n = a.len().max(b.len());
    let mut r: QPoly = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x - y
        })
        .collect();
    trim(&mut r);
    r
}

/// Quotient and remainder of `a` by nonzero `b`.
pub(crate) fn q_divrem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut rem = a.to_vec();
    trim(&mut rem);
    if rem.len() <= db {
        return (vec![], rem);
    }
    let mut q = vec![BigRational::zero(); rem.len() - db];
    while rem.len() > db {
        let shift = rem.len() - 1 - db;
        let c = rem.last().unwrap() / &lead;
        for (j, bj) in b.iter().enumerate() {
            rem[shift + j] -= &c * bj;
        }
        q[shift] = c;
        rem.pop();
        trim(&mut rem);
    }
    trim(&mut q);
    (q, rem)
}

/// Reduces `a` modulo `m` and pads to length `deg m`.
pub(crate) fn q_reduce(a: &[BigRational], m: &[BigRational]) -> QPoly {
    let (_, mut r) = q_divrem(a, m);
    r.resize(m.len() - 1, BigRational::zero());
    r
}

/// Inverse of `a` modulo the irreducible `m`, or `None` when `a ≡ 0`.
pub(crate) fn q_inv_mod(a: &[BigRational], m: &[BigRational]) -> Option<QPoly> {
    let mut a = a.to_vec();
    trim(&mut a);
    if a.is_empty() {
        return None;
    }
    // Extended Euclid tracking only the coefficient of `a`.
    let (mut r0, mut r1) = (m.to_vec(), a);
    let (mut s0, mut s1): (QPoly, QPoly) = (vec![], vec![BigRational::one()]);
    while !r1.is_empty() {
        let (q, r) = q_divrem(&r0, &r1);
        let s = q_sub(&s0, &q_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    if r0.len() != 1 {
        return None;
    }
    let c = r0[0].clone();
    let inv: QPoly = s0.iter().map(|x| x / &c).collect();
    Some(q_reduce(&inv, m))
}
