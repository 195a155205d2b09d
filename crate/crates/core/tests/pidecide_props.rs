mod common;

use common::weyl_lambda;
use orepi_core::center::bqf_routes;
use orepi_core::exactnum::{Coeff, Field};
use orepi_core::pidecide::*;
use orepi_core::presentation::FamilySpec;
use proptest::prelude::*;

/// A root of unity of order `n` or, for `n = 0`, the integer 2.
fn param(f: &Field, n: u32) -> Coeff {
    if n == 0 {
        f.int(2)
    } else {
        f.zeta(n).unwrap()
    }
}

fn check_coherent(spec: &FamilySpec) -> Result<Verdict, TestCaseError> {
    let v = match pi_decide(spec) {
        Ok(v) => v,
        Err(PiError::PreconditionViolation(_)) => return Ok(Verdict::Unknown),
        Err(e) => return Err(TestCaseError::fail(e.to_string())),
    };
    match v.verdict {
        Verdict::PI => {
            let (set, caps) = v.central_set().expect("PI carries a central set");
            let (central, span) = verify_center_witness(spec, set, caps).unwrap();
            prop_assert!(central, "{:?}", spec.tag());
            if let Some(s) = span {
                prop_assert!(s.spans, "{:?} misses {:?}", spec.tag(), s.first_missing);
            }
        }
        Verdict::NotPI => {
            let w = v.qplane().expect("NotPI carries a witness");
            prop_assert!(verify_witness(spec, w).unwrap());
            if w.kind == WitnessKind::JordanShift {
                prop_assert!(w.shift.as_ref().is_some_and(|d| !d.poly.is_zero()));
            } else {
                prop_assert_eq!(w.param.root_of_unity_order().unwrap(), None);
            }
        }
        Verdict::Unknown => prop_assert!(v.witness.is_none()),
    }
    Ok(v.verdict)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn verdicts_are_coherent(a in prop::sample::select(vec![0u32, 2, 3, 6]), b in prop::sample::select(vec![0u32, 3, 6])) {
        let f = Field::cyclotomic(6).unwrap();
        let (x, y) = (param(&f, a), param(&f, b));
        let specs = vec![
            FamilySpec::Bh { h: x.clone() },
            FamilySpec::Hpq { p: x.clone(), q: y.clone() },
            FamilySpec::M2 { alpha: x.clone(), beta: y.clone() },
            FamilySpec::QuantumPlane { q: x.clone() },
            FamilySpec::ThreeCyclic { q: y.clone(), alpha: f.one(), beta: f.int(2), gamma: f.int(-1) },
            FamilySpec::WeylMalt { q: vec![y.clone(), y.clone()], lambda: weyl_lambda(&f, &[x.clone()]) },
            FamilySpec::Bqf { q: x.clone(), f: vec![f.zero(), f.one(), f.zero(), f.int(2)] },
            FamilySpec::DownUp { alpha: &x + &y, beta: -(&x * &y), gamma: f.int(a as i64 % 2) },
        ];
        for s in &specs {
            check_coherent(s)?;
        }
    }

    #[test]
    fn hq_matches_root_of_unity(n in prop::sample::select(vec![0u32, 3, 4, 5, 8, 10, 12]), k in 1u32..12) {
        let f = Field::cyclotomic(120).unwrap();
        let q = if n == 0 { f.int(k as i64 + 1) } else { f.zeta(n).unwrap().pow(k as i64).unwrap() };
        prop_assume!(!(&q * &q).is_one());
        let v = pi_decide(&FamilySpec::Hpq { p: q.clone(), q: q.clone() }).unwrap();
        let root = q.root_of_unity_order().unwrap().is_some();
        prop_assert_eq!(v.verdict == Verdict::PI, root);
        prop_assert_eq!(v.verdict == Verdict::NotPI, !root);
    }

    #[test]
    fn bqf_routes_never_disagree(n in 2u32..7, mask in 0u8..64) {
        let f = Field::cyclotomic(n).unwrap();
        let coeffs: Vec<Coeff> = (0..6).map(|j| if mask >> j & 1 == 1 { f.one() } else { f.zero() }).collect();
        let routes = bqf_routes(n as u64, &coeffs);
        let v = pi_decide(&FamilySpec::Bqf { q: f.zeta(n).unwrap(), f: coeffs }).unwrap();
        if routes.support_divisible || routes.shifted_indivisible {
            prop_assert_eq!(v.verdict, Verdict::PI);
        } else {
            prop_assert_eq!(v.verdict, Verdict::Unknown);
        }
        if routes.support_divisible {
            prop_assert_eq!(v.reason, Reason::BqfSupportDivisible);
        }
    }
}
