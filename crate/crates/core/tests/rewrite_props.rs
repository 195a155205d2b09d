mod common;

use std::collections::BTreeMap;

use common::{random_poly, rng, zoo, zoo_presentations};
use orepi_core::exactnum::Field;
use orepi_core::presentation::{build_family, FamilySpec, FamilyTag, FreePoly, Presentation};
use orepi_core::rewrite::{is_confluent, multiply, normal_form, overlap_check};
use proptest::prelude::*;
use rand::Rng;

fn pick(seed: u64) -> (Presentation, rand_chacha::ChaCha8Rng) {
    let ps = zoo_presentations();
    let i = (seed % ps.len() as u64) as usize;
    (ps[i].clone(), rng(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn normal_form_is_idempotent(seed in any::<u64>()) {
        let (p, mut r) = pick(seed);
        let a = random_poly(&p, &mut r, 3, 4);
        let n = normal_form(&p, &a).unwrap();
        prop_assert_eq!(normal_form(&p, &n).unwrap(), n.clone());
        prop_assert!(n.terms().all(|(w, _)| p.is_irreducible(w)));
    }

    #[test]
    fn normal_form_is_linear(seed in any::<u64>()) {
        let (p, mut r) = pick(seed);
        let a = random_poly(&p, &mut r, 3, 4);
        let b = random_poly(&p, &mut r, 3, 4);
        let c = common::random_coeff(p.field(), &mut r);
        let lhs = normal_form(&p, &a.add(&b.scale(&c))).unwrap();
        let rhs = normal_form(&p, &a).unwrap().add(&normal_form(&p, &b).unwrap().scale(&c));
        prop_assert_eq!(lhs.into_inner(), rhs);
    }

    #[test]
    fn multiplication_is_associative(seed in any::<u64>()) {
        let (p, mut r) = pick(seed);
        let a = random_poly(&p, &mut r, 2, 3);
        let b = random_poly(&p, &mut r, 2, 3);
        let c = random_poly(&p, &mut r, 2, 3);
        let left = multiply(&p, &multiply(&p, &a, &b).unwrap(), &c).unwrap();
        let right = multiply(&p, &a, &multiply(&p, &b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn bh_normal_forms_keep_degree(seed in any::<u64>(), len in 1usize..7) {
        let f = Field::ratfunc(&["h"]).unwrap();
        let p = build_family(&FamilySpec::Bh { h: f.param("h").unwrap() }).unwrap();
        let mut r = rng(seed);
        let w: orepi_core::presentation::Word = (0..len).map(|_| r.gen_range(0..4u8)).collect();
        let n = normal_form(&p, &FreePoly::word(&f, w)).unwrap();
        prop_assert!(n.terms().all(|(v, _)| v.len() == len));
    }

    #[test]
    fn specialization_commutes_with_normal_form(seed in any::<u64>()) {
        let sym = Field::ratfunc(&["p", "q"]).unwrap();
        let num = Field::cyclotomic(6).unwrap();
        let (zp, zq) = (num.zeta(2).unwrap(), num.zeta(3).unwrap());
        let ps = build_family(&FamilySpec::Hpq { p: sym.param("p").unwrap(), q: sym.param("q").unwrap() }).unwrap();
        let pn = build_family(&FamilySpec::Hpq { p: zp.clone(), q: zq.clone() }).unwrap();
        let at: BTreeMap<String, _> = [("p".to_string(), zp), ("q".to_string(), zq)].into();
        let mut r = rng(seed);
        let a = random_poly(&ps, &mut r, 3, 5);
        let via_sym = normal_form(&ps, &a).unwrap().specialize(&num, &at).unwrap();
        let via_num = normal_form(&pn, &a.specialize(&num, &at).unwrap()).unwrap();
        prop_assert_eq!(via_sym, via_num.into_inner());
    }
}

#[test]
fn every_constructor_is_confluent() {
    for p in zoo_presentations() {
        let rep = overlap_check(&p).unwrap();
        assert!(rep.confluent, "{:?} has failing pairs", p.family());
    }
}

#[test]
fn construction_is_deterministic() {
    for (a, b) in zoo().iter().zip(zoo()) {
        assert_eq!(build_family(a).unwrap(), build_family(&b).unwrap());
    }
}

#[test]
fn left_sides_are_the_inversions() {
    for p in zoo_presentations() {
        let mut lhs: Vec<Vec<u8>> = p.rules().iter().map(|r| r.lhs.to_vec()).collect();
        lhs.sort();
        let mut expect: Vec<Vec<u8>> = if p.family() == Some(FamilyTag::DownUp) {
            vec![p.word_of(&["d", "d", "u"]).to_vec(), p.word_of(&["d", "u", "u"]).to_vec()]
        } else {
            let n = p.generators().len() as u8;
            (0..n).flat_map(|a| (0..n).map(move |b| vec![a, b])).filter(|w| p.cmp_words(&w[..1], &w[1..]).is_gt()).collect()
        };
        expect.sort();
        assert_eq!(lhs, expect, "{:?}", p.family());
    }
}

#[test]
fn confluence_survives_specialization() {
    let f = Field::cyclotomic(5).unwrap();
    let p = build_family(&FamilySpec::UqB2 { q: f.zeta(5).unwrap() }).unwrap();
    assert!(is_confluent(&p).unwrap());
}
