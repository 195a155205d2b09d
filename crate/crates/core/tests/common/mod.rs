#![allow(dead_code)]

use orepi_core::exactnum::{Coeff, Field};
use orepi_core::identities::biquad_consistent;
use orepi_core::presentation::{build_family, parse_univariate, FamilySpec, FreePoly, GenId, Presentation, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn params(f: &Field, names: &[&str]) -> Vec<Coeff> {
    names.iter().map(|n| f.param(n).unwrap()).collect()
}

pub fn weyl_lambda(f: &Field, l: &[Coeff]) -> Vec<Vec<Coeff>> {
    let n = if l.is_empty() { 1 } else { ((1.0 + (1.0 + 8.0 * l.len() as f64).sqrt()) / 2.0).round() as usize };
    let mut out = vec![vec![f.one(); n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            out[i][j] = l[k].clone();
            out[j][i] = l[k].inv().unwrap();
            k += 1;
        }
    }
    out
}

/// One instance of every family constructor, with symbolic parameters where the
/// arithmetic stays small.
pub fn zoo() -> Vec<FamilySpec> {
    let sym = |names: &[&str]| {
        let f = Field::ratfunc(names).unwrap();
        let v = params(&f, names);
        (f, v)
    };
    let q = Field::rational();
    let mut out = Vec::new();
    let (_, v) = sym(&["h"]);
    out.push(FamilySpec::Bh { h: v[0].clone() });
    let (_, v) = sym(&["p", "q"]);
    out.push(FamilySpec::Hpq { p: v[0].clone(), q: v[1].clone() });
    let (_, v) = sym(&["alpha", "beta"]);
    out.push(FamilySpec::M2 { alpha: v[0].clone(), beta: v[1].clone() });
    let (_, v) = sym(&["q"]);
    out.push(FamilySpec::UqB2 { q: v[0].clone() });
    let (f, v) = sym(&["q1", "q2", "l12"]);
    out.push(FamilySpec::WeylMalt { q: v[..2].to_vec(), lambda: weyl_lambda(&f, &v[2..]) });
    out.push(FamilySpec::WeylAJ { q: v[..2].to_vec(), lambda: weyl_lambda(&f, &v[2..]) });
    let (_, v) = sym(&["q", "alpha", "beta", "gamma"]);
    out.push(FamilySpec::ThreeCyclic { q: v[0].clone(), alpha: v[1].clone(), beta: v[2].clone(), gamma: v[3].clone() });
    out.push(FamilySpec::DownUp { alpha: q.ratio(2, 3), beta: q.int(5), gamma: q.int(1) });
    let (f, v) = sym(&["q"]);
    out.push(FamilySpec::Bqf { q: v[0].clone(), f: parse_univariate(&f, "t + t^2", "t").unwrap() });
    out.push(FamilySpec::QuantumPlane { q: v[0].clone() });
    out.push(FamilySpec::BiQuad3(biquad_consistent(&q, &mut rng(7))));
    out
}

pub fn zoo_presentations() -> Vec<Presentation> {
    zoo().iter().map(|s| build_family(s).unwrap()).collect()
}

pub fn random_coeff<R: Rng>(f: &Field, rng: &mut R) -> Coeff {
    let mut n = rng.gen_range(-3..=3);
    if n == 0 {
        n = 1;
    }
    f.ratio(n, rng.gen_range(1..=2))
}

pub fn random_word<R: Rng>(p: &Presentation, rng: &mut R, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(0..p.generators().len()) as GenId).collect()
}

/// A formal, usually non-reduced, element of the free algebra.
pub fn random_poly<R: Rng>(p: &Presentation, rng: &mut R, max_terms: usize, max_len: usize) -> FreePoly {
    let f = p.field();
    let mut acc = FreePoly::zero(f);
    for _ in 0..rng.gen_range(1..=max_terms) {
        acc.add_term(random_word(p, rng, max_len), random_coeff(f, rng));
    }
    acc
}
