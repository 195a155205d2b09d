use orepi_core::exactnum::{Coeff, Field};
use orepi_core::matrep::*;
use proptest::prelude::*;

fn mat(f: &Field, e: &[i64]) -> Mat {
    let n = (e.len() as f64).sqrt() as usize;
    Mat::from_rows(e.chunks(n).map(|r| r.iter().map(|&x| f.int(x)).collect()).collect()).unwrap()
}

fn m2_identities(d: usize) -> IdentitySpace {
    multilinear_identity_search(&MatAlgebra::full(&Field::rational(), 2), d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn identities_vanish_off_the_basis(e in prop::collection::vec(-5i64..6, 16)) {
        thread_local!(static SPACE: IdentitySpace = m2_identities(4));
        let f = Field::rational();
        let mats: Vec<Mat> = e.chunks(4).map(|c| mat(&f, c)).collect();
        SPACE.with(|s| -> Result<(), TestCaseError> {
            for v in &s.basis {
                prop_assert!(multilinear_eval(v, &s.perms, &mats).unwrap().is_zero());
            }
            Ok(())
        })?;
    }

    #[test]
    fn standard_polynomial_alternates(e in prop::collection::vec(-5i64..6, 12), i in 0usize..3, j in 0usize..3) {
        prop_assume!(i != j);
        let f = Field::rational();
        let mut mats: Vec<Mat> = e.chunks(4).map(|c| mat(&f, c)).collect();
        let s = standard_poly_eval(&mats).unwrap();
        mats.swap(i, j);
        prop_assert_eq!(standard_poly_eval(&mats).unwrap(), s.scale(&f.int(-1)));
    }
}

#[test]
fn no_identity_of_degree_three_on_m2() {
    assert_eq!(m2_identities(3).dim(), 0);
}

#[test]
fn s4_spans_the_degree_four_identities_of_m2() {
    let s = m2_identities(4);
    assert!(s.dim() >= 1);
    assert!(s.contains(&standard_coefficients(&Field::rational(), 4)));
}

#[test]
fn s4_on_matrix_units() {
    let f = Field::rational();
    let units: Vec<Mat> = MatAlgebra::full(&f, 2).generators().iter().map(|(_, m)| m.clone()).collect();
    assert!(standard_poly_eval(&units).unwrap().is_zero());
}

#[test]
fn amitsur_levitzki_on_quantum_plane_reps() {
    for (n, q) in [(1usize, Field::rational().one()), (2, Field::rational().int(-1))] {
        let alg = quantum_plane_rep(n, &q).unwrap();
        let basis = alg.span_basis();
        let d = 2 * n;
        let mut tuple = vec![0usize; d];
        loop {
            let mats: Vec<Mat> = tuple.iter().map(|&i| basis[i].clone()).collect();
            assert!(standard_poly_eval(&mats).unwrap().is_zero());
            let Some(k) = (0..d).find(|&k| tuple[k] + 1 < basis.len()) else { break };
            tuple[k] += 1;
            tuple[..k].iter_mut().for_each(|t| *t = 0);
        }
        let space = multilinear_identity_search(&alg, d).unwrap();
        assert!(space.contains(&standard_coefficients(alg.field(), d)));
    }
}

#[test]
fn quantum_plane_relations() {
    for n in 1..=4u32 {
        let f = Field::cyclotomic(n).unwrap();
        let q: Coeff = f.zeta(n).unwrap();
        let alg = quantum_plane_rep(n as usize, &q).unwrap();
        let (x, y) = (alg.gen("x").unwrap(), alg.gen("y").unwrap());
        assert_eq!(y.mul(x), x.mul(y).scale(&q));
    }
}
