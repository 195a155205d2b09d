use orepi_core::exactnum::{Coeff, Field};
use orepi_core::identities::{check_paper_identity, oracle_rhs, LemmaId};
use orepi_core::presentation::{build_family, parse_univariate, FamilySpec, FamilyTag, Presentation};
use orepi_core::rewrite::{is_confluent, normal_form};

const N_MAX: u32 = 8;

fn assert_lemmas(p: &Presentation, ids: &[LemmaId], n_max: u32) {
    for &id in ids {
        let rep = check_paper_identity(id, p, n_max).unwrap();
        assert!(!rep.records.is_empty());
        if let Some(bad) = rep.records.iter().find(|r| !r.pass) {
            panic!("{id} n={} {}: residual {}", bad.n, bad.label, p.render(&bad.residual));
        }
    }
}

fn ratfunc(names: &[&str]) -> (Field, impl Fn(&str) -> Coeff) {
    let f = Field::ratfunc(names).unwrap();
    let g = f.clone();
    (f, move |s: &str| g.param(s).unwrap())
}

#[test]
fn hpq_powers_up_to_eight() {
    let (_, v) = ratfunc(&["p", "q"]);
    let p = build_family(&FamilySpec::Hpq { p: v("p"), q: v("q") }).unwrap();
    assert_lemmas(&p, &LemmaId::for_family(FamilyTag::Hpq), N_MAX);
}

#[test]
fn yx2_matches_hand_expansion() {
    let (_, v) = ratfunc(&["p", "q"]);
    let p = build_family(&FamilySpec::Hpq { p: v("p"), q: v("q") }).unwrap();
    let inst = &oracle_rhs(LemmaId::HYxn, &p, 2).unwrap()[0];
    let hand = p.parse_poly("q^2*x^2*y + (q + p^-1)*x*t").unwrap();
    assert_eq!(normal_form(&p, &inst.rhs).unwrap(), normal_form(&p, &hand).unwrap());
}

#[test]
fn m2_lemma_and_power_table() {
    let (_, v) = ratfunc(&["alpha", "beta"]);
    let p = build_family(&FamilySpec::M2 { alpha: v("alpha"), beta: v("beta") }).unwrap();
    assert_lemmas(&p, &LemmaId::for_family(FamilyTag::M2), N_MAX);
    let table = oracle_rhs(LemmaId::M2PowerTable, &p, 3).unwrap();
    assert_eq!(table.len(), 10);
}

#[test]
fn uqb2_all_four_parts() {
    let (_, v) = ratfunc(&["q"]);
    let p = build_family(&FamilySpec::UqB2 { q: v("q") }).unwrap();
    assert_lemmas(&p, &LemmaId::for_family(FamilyTag::UqB2), N_MAX);
    assert!(oracle_rhs(LemmaId::UqB2Iv, &p, 1).is_err());
}

fn weyl(n: usize) -> Presentation {
    let mut names: Vec<String> = (1..=n).map(|i| format!("q{i}")).collect();
    for i in 1..=n {
        for j in i + 1..=n {
            names.push(format!("l{i}{j}"));
        }
    }
    let f = Field::ratfunc(&names).unwrap();
    let q: Vec<Coeff> = (1..=n).map(|i| f.param(&format!("q{i}")).unwrap()).collect();
    let mut lambda = vec![vec![f.one(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let l = f.param(&format!("l{}{}", i + 1, j + 1)).unwrap();
            lambda[j][i] = l.inv().unwrap();
            lambda[i][j] = l;
        }
    }
    build_family(&FamilySpec::WeylMalt { q, lambda }).unwrap()
}

#[test]
fn weyl_power_identities_n2() {
    let p = weyl(2);
    assert!(is_confluent(&p).unwrap());
    assert_lemmas(&p, &[LemmaId::WeylXky, LemmaId::WeylXyk], N_MAX);
}

#[test]
fn weyl_zi_normality() {
    for n in [2, 3] {
        let p = weyl(n);
        assert_lemmas(&p, &[LemmaId::WeylZiNormal], 1);
    }
}

#[test]
fn three_cyclic_identities() {
    let (_, v) = ratfunc(&["q", "alpha", "beta", "gamma"]);
    let spec = FamilySpec::ThreeCyclic { q: v("q"), alpha: v("alpha"), beta: v("beta"), gamma: v("gamma") };
    let p = build_family(&spec).unwrap();
    assert_lemmas(&p, &LemmaId::for_family(FamilyTag::ThreeCyclic), N_MAX);
}

#[test]
fn bqf_identities_for_sample_polynomials() {
    let (f, v) = ratfunc(&["q"]);
    for poly in ["t", "t^2", "t + t^5"] {
        let coeffs = parse_univariate(&f, poly, "t").unwrap();
        let p = build_family(&FamilySpec::Bqf { q: v("q"), f: coeffs }).unwrap();
        assert_lemmas(&p, &LemmaId::for_family(FamilyTag::Bqf), N_MAX);
    }
}

#[test]
fn bh_commutation_powers() {
    let (_, v) = ratfunc(&["h"]);
    let p = build_family(&FamilySpec::Bh { h: v("h") }).unwrap();
    assert_lemmas(&p, &[LemmaId::BhCommute], N_MAX);
}

#[test]
fn lemma_names_round_trip() {
    for &id in LemmaId::ALL {
        assert_eq!(id.name().parse::<LemmaId>().unwrap(), id);
    }
    assert!("H.nope".parse::<LemmaId>().is_err());
}
