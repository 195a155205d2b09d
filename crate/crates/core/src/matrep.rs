//! Exact matrix algebras: quantum-plane representations at roots of unity, the
//! standard polynomial and brute-force multilinear identity search.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::exactnum::{Coeff, Field, NumError};
use crate::linalg::{kernel, rank, SparseEchelon};

/// Largest degree accepted by [`multilinear_identity_search`].
pub const MAX_SEARCH_DEGREE: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatError {
    #[error("{q} is not a primitive {n}-th root of unity")]
    NotPrimitiveRoot { q: String, n: u64 },
    #[error("matrices must be square of one size over one field")]
    SizeMismatch,
    #[error("degree {0} exceeds the search limit {MAX_SEARCH_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("generator relation fails: {0}")]
    RelationFails(String),
    #[error("at least one matrix is required")]
    Empty,
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Square matrix over a coefficient field, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    n: usize,
    data: Vec<Coeff>,
}

impl Mat {
    pub fn zero(f: &Field, n: usize) -> Self {
        Mat { n, data: vec![f.zero(); n * n] }
    }

    pub fn identity(f: &Field, n: usize) -> Self {
        let mut m = Mat::zero(f, n);
        for i in 0..n {
            m.set(i, i, f.one());
        }
        m
    }

    /// Matrix unit `e_ij`.
    pub fn unit(f: &Field, n: usize, i: usize, j: usize) -> Self {
        let mut m = Mat::zero(f, n);
        m.set(i, j, f.one());
        m
    }

    pub fn from_rows(rows: Vec<Vec<Coeff>>) -> Result<Self, MatError> {
        let n = rows.len();
        if n == 0 {
            return Err(MatError::Empty);
        }
        let f = rows[0][0].field().clone();
        if rows.iter().any(|r| r.len() != n || r.iter().any(|c| c.field() != &f)) {
            return Err(MatError::SizeMismatch);
        }
        Ok(Mat { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        self.data[0].field()
    }

    pub fn get(&self, i: usize, j: usize) -> &Coeff {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, c: Coeff) {
        self.data[i * self.n + j] = c;
    }

    pub fn entries(&self) -> &[Coeff] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<Coeff>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let n = self.n;
        let mut r = Mat::zero(self.field(), n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        r.data[i * n + j] = &r.data[i * n + j] + &(a * b);
                    }
                }
            }
        }
        r
    }

    pub fn add(&self, o: &Mat) -> Mat {
        Mat { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        Mat { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Coeff) -> Mat {
        Mat { n: self.n, data: self.data.iter().map(|a| a * c).collect() }
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|c| c.to_string()).join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

fn same_shape(mats: &[Mat]) -> Result<(), MatError> {
    let first = mats.first().ok_or(MatError::Empty)?;
    if mats.iter().any(|m| m.n != first.n || m.field() != first.field()) {
        return Err(MatError::SizeMismatch);
    }
    Ok(())
}

/// A finite-dimensional algebra given by named generator matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatAlgebra {
    field: Field,
    n: usize,
    gens: Vec<(String, Mat)>,
}

impl MatAlgebra {
    pub fn new(gens: Vec<(String, Mat)>) -> Result<Self, MatError> {
        let mats: Vec<Mat> = gens.iter().map(|(_, m)| m.clone()).collect();
        same_shape(&mats)?;
        Ok(MatAlgebra { field: mats[0].field().clone(), n: mats[0].n, gens })
    }

    /// The full matrix algebra `M_n`, generated by its matrix units.
    pub fn full(f: &Field, n: usize) -> Self {
        let gens = (0..n)
            .cartesian_product(0..n)
            .map(|(i, j)| (format!("e{}{}", i + 1, j + 1), Mat::unit(f, n, i, j)))
            .collect();
        MatAlgebra { field: f.clone(), n, gens }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[(String, Mat)] {
        &self.gens
    }

    pub fn gen(&self, name: &str) -> Option<&Mat> {
        self.gens.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    /// Linear basis of the unital subalgebra spanned by products of generators.
    pub fn span_basis(&self) -> Vec<Mat> {
        let mut ech = SparseEchelon::new();
        let mut basis = Vec::new();
        let mut frontier = vec![Mat::identity(&self.field, self.n)];
        let as_vec = |m: &Mat| -> BTreeMap<usize, Coeff> {
            m.data.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect()
        };
        while let Some(m) = frontier.pop() {
            if !ech.insert(as_vec(&m)) {
                continue;
            }
            for (_, g) in &self.gens {
                frontier.push(m.mul(g));
            }
            basis.push(m);
        }
        basis
    }
}

/// `x` acts as the cyclic shift and `y` as `diag(1, q, ..., q^(n-1))`, so `yx = q xy`.
pub fn quantum_plane_rep(n: usize, q: &Coeff) -> Result<MatAlgebra, MatError> {
    if q.root_of_unity_order()? != Some(n as u64) {
        return Err(MatError::NotPrimitiveRoot { q: q.to_string(), n: n as u64 });
    }
    let f = q.field();
    let mut x = Mat::zero(f, n);
    let mut y = Mat::zero(f, n);
    for i in 0..n {
        x.set((i + 1) % n, i, f.one());
        y.set(i, i, q.pow(i as i64)?);
    }
    if y.mul(&x) != x.mul(&y).scale(q) {
        return Err(MatError::RelationFails("y x = q x y".into()));
    }
    MatAlgebra::new(vec![("x".into(), x), ("y".into(), y)])
}

/// Permutations of `0..d` in lexicographic order.
pub fn permutations(d: usize) -> Vec<Vec<usize>> {
    (0..d).permutations(d).collect()
}

pub fn sign(perm: &[usize]) -> i64 {
    let inversions = perm.iter().tuple_combinations().filter(|(a, b)| a > b).count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Coefficients of `s_d` against [`permutations`]`(d)`.
pub fn standard_coefficients(f: &Field, d: usize) -> Vec<Coeff> {
    permutations(d).iter().map(|p| f.int(sign(p))).collect()
}

/// `sum_sigma c_sigma A_sigma(1) ... A_sigma(d)`.
pub fn multilinear_eval(coeffs: &[Coeff], perms: &[Vec<usize>], mats: &[Mat]) -> Result<Mat, MatError> {
    same_shape(mats)?;
    if perms.iter().any(|p| p.len() != mats.len()) || coeffs.len() != perms.len() {
        return Err(MatError::SizeMismatch);
    }
    let f = mats[0].field();
    let mut acc = Mat::zero(f, mats[0].n);
    for (c, p) in coeffs.iter().zip(perms) {
        if c.is_zero() {
            continue;
        }
        let mut prod = mats[p[0]].clone();
        for &i in &p[1..] {
            prod = prod.mul(&mats[i]);
        }
        acc = acc.add(&prod.scale(c));
    }
    Ok(acc)
}

/// The standard polynomial `s_k` evaluated on `k` matrices.
pub fn standard_poly_eval(mats: &[Mat]) -> Result<Mat, MatError> {
    same_shape(mats)?;
    let d = mats.len();
    multilinear_eval(&standard_coefficients(mats[0].field(), d), &permutations(d), mats)
}

/// Multilinear identities of degree `d`, as coefficient vectors over [`permutations`]`(d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentitySpace {
    pub degree: usize,
    pub perms: Vec<Vec<usize>>,
    pub basis: Vec<Vec<Coeff>>,
}

impl IdentitySpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[Coeff]) -> bool {
        let mut rows = self.basis.clone();
        let r = rank(&rows, self.perms.len());
        rows.push(v.to_vec());
        rank(&rows, self.perms.len()) == r
    }
}

/// Solves for every multilinear polynomial of degree `d` that vanishes on all
/// tuples drawn from a linear basis of the algebra; by multilinearity these are
/// exactly the multilinear identities.
pub fn multilinear_identity_search(alg: &MatAlgebra, d: usize) -> Result<IdentitySpace, MatError> {
    if d > MAX_SEARCH_DEGREE {
        return Err(MatError::DegreeTooLarge(d));
    }
    let perms = permutations(d);
    let basis = alg.span_basis();
    let mut ech = SparseEchelon::new();
    let mut rows = Vec::new();
    'tuples: for tuple in (0..d).map(|_| 0..basis.len()).multi_cartesian_product() {
        let products: Vec<Mat> = perms
            .iter()
            .map(|p| {
                let mut m = basis[tuple[p[0]]].clone();
                for &i in &p[1..] {
                    m = m.mul(&basis[tuple[i]]);
                }
                m
            })
            .collect();
        for e in 0..alg.n * alg.n {
            let row: BTreeMap<usize, Coeff> = products
                .iter()
                .enumerate()
                .filter(|(_, m)| !m.data[e].is_zero())
                .map(|(j, m)| (j, m.data[e].clone()))
                .collect();
            if ech.insert(row.clone()) {
                let mut dense = vec![alg.field.zero(); perms.len()];
                for (j, c) in row {
                    dense[j] = c;
                }
                rows.push(dense);
                if rows.len() == perms.len() {
                    break 'tuples;
                }
            }
        }
    }
    let basis = kernel(&alg.field, &rows, perms.len());
    Ok(IdentitySpace { degree: d, perms, basis })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_of_transposition() {
        assert_eq!(sign(&[1, 0, 2]), -1);
        assert_eq!(sign(&[1, 2, 0]), 1);
    }

    #[test]
    fn s2_is_the_commutator() {
        let f = Field::rational();
        let a = Mat::from_rows(vec![vec![f.int(1), f.int(2)], vec![f.int(3), f.int(4)]]).unwrap();
        let b = Mat::from_rows(vec![vec![f.int(0), f.int(1)], vec![f.int(5), f.int(-1)]]).unwrap();
        let s = standard_poly_eval(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(s, a.mul(&b).sub(&b.mul(&a)));
        assert!(standard_poly_eval(&[Mat::identity(&f, 2), a.clone()]).unwrap().is_zero());
        assert!(standard_poly_eval(&[a.clone(), a]).unwrap().is_zero());
    }

    #[test]
    fn sign_flip_rep() {
        let f = Field::rational();
        let alg = quantum_plane_rep(2, &f.int(-1)).unwrap();
        assert_eq!(alg.gen("x").unwrap().rows(), vec![vec![f.zero(), f.one()], vec![f.one(), f.zero()]]);
        assert_eq!(alg.span_basis().len(), 4);
        assert!(matches!(quantum_plane_rep(3, &f.int(-1)), Err(MatError::NotPrimitiveRoot { .. })));
    }

    #[test]
    fn size_mismatch() {
        let f = Field::rational();
        let r = standard_poly_eval(&[Mat::identity(&f, 2), Mat::identity(&f, 3)]);
        assert_eq!(r, Err(MatError::SizeMismatch));
        assert_eq!(
            multilinear_identity_search(&MatAlgebra::full(&f, 1), 6).unwrap_err(),
            MatError::DegreeTooLarge(6)
        );
    }
}
