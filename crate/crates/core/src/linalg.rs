//! Dense exact linear algebra over a [`Coeff`] field.

use crate::exactnum::{Coeff, Field};

/// Reduced row echelon form in place; returns the pivot column of each nonzero row.
pub fn rref(rows: &mut Vec<Vec<Coeff>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = &*x - &(&factor * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[Vec<Coeff>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of { v : M v = 0 } for the matrix with the given rows.
pub fn kernel(field: &Field, rows: &[Vec<Coeff>], ncols: usize) -> Vec<Vec<Coeff>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![field.zero(); ncols];
        v[free] = field.one();
        for (row, &pc) in m.iter().zip(&pivots) {
            if !row[free].is_zero() {
                v[pc] = -&row[free];
            }
        }
        basis.push(v);
    }
    basis
}

/// Incrementally maintained echelon basis of sparse vectors indexed by `usize`
/// columns. Each stored vector is normalized to leading coefficient one, and its
/// pivot is its largest column.
pub struct SparseEchelon {
    rows: std::collections::BTreeMap<usize, std::collections::BTreeMap<usize, Coeff>>,
}

impl Default for SparseEchelon {
    fn default() -> Self {
        Self::new()
    }
}

impl SparseEchelon {
    pub fn new() -> Self {
        SparseEchelon { rows: Default::default() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Reduces `v` against the basis; returns the remainder (empty if in the span).
    pub fn reduce(&self, mut v: std::collections::BTreeMap<usize, Coeff>) -> std::collections::BTreeMap<usize, Coeff> {
        let mut done = std::collections::BTreeMap::new();
        while let Some((&c, _)) = v.iter().next_back() {
            let val = v.remove(&c).expect("present");
            match self.rows.get(&c) {
                Some(row) => {
                    for (&k, x) in row.range(..c) {
                        let e = v.entry(k).or_insert_with(|| val.field().zero());
                        *e = &*e - &(&val * x);
                        if e.is_zero() {
                            v.remove(&k);
                        }
                    }
                }
                None => {
                    done.insert(c, val);
                }
            }
        }
        done
    }

    /// Inserts `v`; returns true if it enlarged the span.
    pub fn insert(&mut self, v: std::collections::BTreeMap<usize, Coeff>) -> bool {
        let r = self.reduce(v);
        let Some((&c, lead)) = r.iter().next_back() else {
            return false;
        };
        let inv = lead.inv().expect("nonzero");
        let row = r.iter().map(|(&k, x)| (k, x * &inv)).collect();
        self.rows.insert(c, row);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_rank_one() {
        let f = Field::rational();
        let rows = vec![vec![f.int(1), f.int(2), f.int(3)], vec![f.int(2), f.int(4), f.int(6)]];
        assert_eq!(rank(&rows, 3), 1);
        let k = kernel(&f, &rows, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let dot = (0..3).fold(f.zero(), |acc, i| acc + &rows[0][i] * &v[i]);
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn sparse_echelon_membership() {
        let f = Field::rational();
        let mut e = SparseEchelon::new();
        let v = |pairs: &[(usize, i64)]| pairs.iter().map(|&(k, x)| (k, f.int(x))).collect();
        assert!(e.insert(v(&[(0, 1), (2, 1)])));
        assert!(e.insert(v(&[(1, 1), (2, 1)])));
        assert!(!e.insert(v(&[(0, 1), (1, -1)])));
        assert!(e.reduce(v(&[(0, 2), (2, 2)])).is_empty());
        assert_eq!(e.rank(), 2);
    }
}
