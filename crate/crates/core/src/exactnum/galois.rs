//! Arithmetic in GF(p^k) = GF(p)[g]/(m(g)) for small p and k.

pub const MAX_PRIME: u32 = 101;
pub const MAX_DEGREE: usize = 6;

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn pmod(x: i64, p: u32) -> u32 {
    x.rem_euclid(p as i64) as u32
}

pub fn inv_mod(a: u32, p: u32) -> Option<u32> {
    if a % p == 0 {
        return None;
    }
    Some(pow_mod(a as u64, (p - 2) as u64, p as u64) as u32)
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Monic modulus normalized from arbitrary integer coefficients (constant term first).
pub fn normalize_modulus(coeffs: &[i64], p: u32) -> Option<Vec<u32>> {
    let mut m: Vec<u32> = coeffs.iter().map(|&c| pmod(c, p)).collect();
    while m.last() == Some(&0) {
        m.pop();
    }
    let lead = *m.last()?;
    let inv = inv_mod(lead, p)?;
    Some(m.iter().map(|&c| (c as u64 * inv as u64 % p as u64) as u32).collect())
}

/// Remainder of `a` by the monic `m` over GF(p).
fn rem_monic(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut r: Vec<u64> = a.iter().map(|&x| x as u64).collect();
    let p64 = p as u64;
    while r.len() > dm {
        let c = r.pop().unwrap() % p64;
        if c != 0 {
            let shift = r.len() - dm;
            for j in 0..dm {
                r[shift + j] = (r[shift + j] + p64 * p64 - c * m[j] as u64 % p64) % p64;
            }
        }
    }
    let mut out: Vec<u32> = r.iter().map(|&x| (x % p64) as u32).collect();
    out.resize(dm, 0);
    out
}

/// Irreducibility by exhaustive trial division with every monic polynomial of degree ≤ k/2.
pub fn is_irreducible(m: &[u32], p: u32) -> bool {
    let k = m.len() - 1;
    if k <= 1 {
        return k == 1;
    }
    for d in 1..=k / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut f = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                f.push((x % p as u64) as u32);
                x /= p as u64;
            }
            f.push(1);
            if rem_monic(m, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

pub fn add(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| (x + y) % p).collect()
}

pub fn neg(a: &[u32], p: u32) -> Vec<u32> {
    a.iter().map(|x| (p - x) % p).collect()
}

pub fn mul(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|x| x as u32).collect();
    rem_monic(&prod, m, p)
}

pub fn pow(a: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
    let k = m.len() - 1;
    let mut r = vec![0; k];
    r[0] = 1 % p;
    let mut b = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            r = mul(&r, &b, m, p);
        }
        b = mul(&b, &b, m, p);
        e >>= 1;
    }
    r
}

pub fn is_zero(a: &[u32]) -> bool {
    a.iter().all(|&c| c == 0)
}

pub fn is_one(a: &[u32]) -> bool {
    a[0] == 1 && a[1..].iter().all(|&c| c == 0)
}

pub fn from_int(x: i64, k: usize, p: u32) -> Vec<u32> {
    let mut v = vec![0; k];
    v[0] = pmod(x, p);
    v
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
