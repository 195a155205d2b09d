mod common;

use common::weyl_lambda;
use orepi_core::center::*;
use orepi_core::exactnum::cyclo::lcm;
use orepi_core::exactnum::{Coeff, Field};
use orepi_core::presentation::{build_family, FamilySpec, FreePoly, Presentation};
use orepi_core::rewrite::multiply;
use proptest::prelude::*;

fn all_central(spec: &FamilySpec, set: &CentralSet) -> Result<Presentation, TestCaseError> {
    let p = build_family(spec).unwrap();
    let bad = check_central_set(&p, set).unwrap();
    prop_assert!(bad.is_empty(), "{:?}: {:?} not central", spec.tag(), bad.iter().map(|b| &b.0).collect::<Vec<_>>());
    Ok(p)
}

/// `zeta_n^k` inside `Q(zeta_N)`.
fn root(f: &Field, n: u32, k: u32) -> Coeff {
    f.zeta(n).unwrap().pow(k as i64).unwrap()
}

fn coeff_list(f: &Field, mask: u8, len: usize) -> Vec<Coeff> {
    (0..len).map(|j| if mask >> j & 1 == 1 { f.int(j as i64 + 1) } else { f.zero() }).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hpq_and_m2_candidates_are_central(a in 1u32..5, b in 1u32..5, i in 1u32..5, j in 1u32..5) {
        let f = Field::cyclotomic(lcm(a as u64, b as u64) as u32).unwrap();
        let (x, y) = (root(&f, a, i), root(&f, b, j));
        let hpq = FamilySpec::Hpq { p: x.clone(), q: y.clone() };
        match central_candidates(&hpq) {
            Ok(set) => { all_central(&hpq, &set)?; }
            Err(CenterError::HypothesisNotMet(_)) => prop_assert!((&x * &y).is_one()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
        let m2 = FamilySpec::M2 { alpha: x, beta: y };
        let set = central_candidates(&m2).unwrap();
        let p = all_central(&m2, &set)?;
        // Closure under products and sums.
        let (s, t) = (set.elements[0].element.as_free(), set.elements[3].element.as_free());
        prop_assert!(is_central(&p, &multiply(&p, s, t).unwrap()).unwrap().central);
        prop_assert!(is_central(&p, &s.add(t)).unwrap().central);
    }

    #[test]
    fn small_family_candidates_are_central(n in 2u32..7, k in 1u32..7, c in prop::array::uniform3(-2i64..3)) {
        let f = Field::cyclotomic(n).unwrap();
        let q = root(&f, n, k);
        let specs = vec![
            FamilySpec::QuantumPlane { q: q.clone() },
            FamilySpec::ThreeCyclic { q: q.clone(), alpha: f.int(c[0]), beta: f.int(c[1]), gamma: f.int(c[2]) },
            FamilySpec::WeylMalt { q: vec![q.clone(), q.pow(-1).unwrap()], lambda: weyl_lambda(&f, &[q.clone()]) },
            FamilySpec::WeylAJ { q: vec![q.clone(), q.clone()], lambda: weyl_lambda(&f, &[q.pow(2).unwrap()]) },
        ];
        for spec in specs {
            match central_candidates(&spec) {
                Ok(set) => { all_central(&spec, &set)?; }
                Err(CenterError::HypothesisNotMet(_)) => {}
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }

    #[test]
    fn bqf_candidates_are_central(n in 2u32..5, mask in 1u8..32) {
        let f = Field::cyclotomic(n).unwrap();
        let spec = FamilySpec::Bqf { q: f.zeta(n).unwrap(), f: coeff_list(&f, mask, 5) };
        match central_candidates(&spec) {
            Ok(set) => { all_central(&spec, &set)?; }
            Err(CenterError::HypothesisNotMet(Unmet::Support(_))) => {
                let r = bqf_routes(n as u64, &coeff_list(&f, mask, 5));
                prop_assert!(!r.support_divisible && !r.shifted_indivisible);
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn downup_generators_are_central(a in prop::sample::select(vec![1u32, 2, 3, 4, 6, 12]), i in 0u32..6, b in prop::sample::select(vec![1u32, 2, 3, 4, 6]), j in 0u32..6, g in -1i64..2) {
        let f = Field::cyclotomic(12).unwrap();
        let (l, m) = (root(&f, a, i), root(&f, b, j));
        let spec = FamilySpec::DownUp { alpha: &l + &m, beta: -(&l * &m), gamma: f.int(g) };
        match downup_center_generators(&spec, Some((l, m))) {
            Ok(set) => { all_central(&spec, &set)?; }
            Err(CenterError::TrivialCenter) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn finite_orders_are_exact(a in prop::sample::select(vec![1u32, 2, 3, 4, 6, 12]), i in 0u32..6, b in prop::sample::select(vec![1u32, 2, 3, 4, 6]), j in 0u32..6, g in -1i64..2) {
        let f = Field::cyclotomic(12).unwrap();
        let (l, m) = (root(&f, a, i), root(&f, b, j));
        let (alpha, beta, gamma) = (&l + &m, -(&l * &m), f.int(g));
        let r = gwa_auto_order(&alpha, &beta, &gamma, Some((l, m))).unwrap();
        let phi = AffineAuto::downup(&alpha, &beta, &gamma).unwrap();
        match r.verdict {
            OrderVerdict::Finite(k) => {
                prop_assert!(phi.pow(k).is_identity());
                for d in (1..k).filter(|d| k % d == 0) {
                    prop_assert!(!phi.pow(d).is_identity());
                }
            }
            OrderVerdict::Infinite(_) => {
                for k in 1..=24 {
                    prop_assert!(!phi.pow(k).is_identity());
                }
            }
        }
    }

    #[test]
    fn fixed_polynomials_are_fixed(a in -3i64..4, b in prop::sample::select(vec![-2i64, -1, 1, 2, 3]), g in -2i64..3, d in 0u32..4) {
        let f = Field::rational();
        let phi = AffineAuto::downup(&f.int(a), &f.int(b), &f.int(g)).unwrap();
        for p in fixed_polynomials(&phi, d) {
            prop_assert_eq!(phi.apply(&p), p);
        }
    }
}

#[test]
fn infinite_order_instances_never_span() {
    let f = Field::rational();
    for (a, b, g) in [(2, -1, 0), (2, -1, 1), (0, 1, 1), (1, 2, 0), (-2, -1, 0)] {
        let spec = FamilySpec::DownUp { alpha: f.int(a), beta: f.int(b), gamma: f.int(g) };
        let r = gwa_auto_order(&f.int(a), &f.int(b), &f.int(g), None).unwrap();
        assert!(matches!(r.verdict, OrderVerdict::Infinite(_)));
        let p = build_family(&spec).unwrap();
        let set = downup_center_generators(&spec, None).unwrap_or(CentralSet {
            family: None,
            elements: vec![],
            note: String::new(),
        });
        for cu in 1..=4 {
            for cd in 1..=4 {
                for d in [5, 6] {
                    let rep = spanning_check(&p, &set, &[cu, cd], Some(d)).unwrap();
                    assert!(!rep.spans, "({a},{b},{g}) caps ({cu},{cd}) D={d}");
                }
            }
        }
    }
}

#[test]
fn char_p_first_case() {
    // q = 2 has order 3 in GF(7); order 3 divides no j + 1 for j in {0, 1, 3}.
    let f = Field::prime_field(7).unwrap();
    let coeffs = vec![f.int(1), f.int(2), f.zero(), f.int(5)];
    let spec = FamilySpec::Bqf { q: f.int(2), f: coeffs };
    let set = central_candidates(&spec).unwrap();
    assert_eq!(set.names(), ["u^3", "v^3"]);
    let p = build_family(&spec).unwrap();
    assert!(check_central_set(&p, &set).unwrap().is_empty());

    let spec = FamilySpec::Bqf { q: f.int(2), f: vec![f.zero(), f.zero(), f.one()] };
    assert_eq!(
        central_candidates(&spec).unwrap_err(),
        CenterError::HypothesisNotMet(Unmet::VacuousCharPCase)
    );
}

#[test]
fn char_p_sign_case_fails_first_hypothesis() {
    // q = -1 has order 2 in GF(3) and 2 | (1 + 1), so u^2 picks up [2]_{q^2} v u = 2 v u.
    let f = Field::prime_field(3).unwrap();
    let spec = FamilySpec::Bqf { q: f.int(-1), f: vec![f.zero(), f.one()] };
    assert!(central_candidates(&spec).is_err());
    let p = build_family(&spec).unwrap();
    let u2 = FreePoly::word(&f, p.word_of(&["u", "u"]));
    let c = is_central(&p, &u2).unwrap();
    let (g, r) = c.witness.unwrap();
    assert_eq!(g, "w");
    assert_eq!(p.render(&r), p.render(&p.parse_poly("v*u").unwrap().scale(&f.int(-2))));
}
