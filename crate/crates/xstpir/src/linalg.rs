//! Dense matrices and Gaussian elimination over a finite field: rank, row
//! bases, leftmost-pivot column selection, null spaces, and left-system
//! solving. Everything is exact.

// index loops read better than iterator chains for elimination code
#![allow(clippy::needless_range_loop)]

use crate::gf::{FieldElement, FieldParams};

/// Row-major matrix of field elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols));
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[FieldElement] {
        &self.data
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, idx.len());
        for r in 0..self.rows {
            for (k, &c) in idx.iter().enumerate() {
                out.set(r, k, self.get(r, c));
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn rank(&self, field: &FieldParams) -> usize {
        let mut red = RowReducer::new(self.cols);
        for r in 0..self.rows {
            red.absorb(self.row(r).to_vec(), field);
        }
        red.rank()
    }
}

/// Incremental row-echelon reducer. Rows are absorbed one at a time; the
/// independent ones are kept normalized (pivot 1, pivots strictly increasing
/// by column), so the reducer holds a row basis of everything seen so far.
pub struct RowReducer {
    cols: usize,
    pivots: Vec<(usize, Vec<FieldElement>)>,
}

impl RowReducer {
    pub fn new(cols: usize) -> RowReducer {
        RowReducer {
            cols,
            pivots: Vec::new(),
        }
    }

    /// Reduces `row` against the stored basis; keeps it when independent.
    /// Returns true iff the row enlarged the span.
    pub fn absorb(&mut self, mut row: Vec<FieldElement>, field: &FieldParams) -> bool {
        assert_eq!(row.len(), self.cols);
        for (pc, prow) in &self.pivots {
            let c = row[*pc];
            if c.is_zero() {
                continue;
            }
            for (x, p) in row.iter_mut().zip(prow.iter()) {
                *x = field.sub(*x, field.mul(c, *p));
            }
        }
        let Some(pc) = row.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = field.inv(row[pc]).expect("pivot entry is nonzero");
        for x in row.iter_mut() {
            *x = field.mul(*x, inv);
        }
        let at = self.pivots.partition_point(|(c, _)| *c < pc);
        self.pivots.insert(at, (pc, row));
        true
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// The basis rows, ordered by pivot column.
    pub fn into_matrix(self) -> Matrix {
        let cols = self.cols;
        let rows: Vec<_> = self.pivots.into_iter().map(|(_, r)| r).collect();
        if rows.is_empty() {
            Matrix::zeros(0, cols)
        } else {
            Matrix::from_rows(rows)
        }
    }
}

/// Greedy leftmost pivot columns: the lexicographically first set of column
/// indices on which the matrix attains its full rank.
pub fn pivot_columns(mat: &Matrix, field: &FieldParams) -> Vec<usize> {
    let mut work = mat.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..work.cols() {
        if r == work.rows() {
            break;
        }
        let Some(pr) = (r..work.rows()).find(|&i| !work.get(i, c).is_zero()) else {
            continue;
        };
        for k in 0..work.cols() {
            let tmp = work.get(r, k);
            work.set(r, k, work.get(pr, k));
            work.set(pr, k, tmp);
        }
        let inv = field.inv(work.get(r, c)).expect("pivot is nonzero");
        for k in c..work.cols() {
            work.set(r, k, field.mul(work.get(r, k), inv));
        }
        for i in 0..work.rows() {
            if i == r || work.get(i, c).is_zero() {
                continue;
            }
            let f = work.get(i, c);
            for k in c..work.cols() {
                let v = field.sub(work.get(i, k), field.mul(f, work.get(r, k)));
                work.set(i, k, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solves `c · M = rhs` for a matrix `M` with independent rows. Returns
/// `Ok(None)` when `rhs` lies outside the row space.
pub fn solve_left(
    mat: &Matrix,
    rhs: &[FieldElement],
    field: &FieldParams,
) -> Option<Vec<FieldElement>> {
    assert_eq!(rhs.len(), mat.cols());
    let r = mat.rows();
    // augmented system M^T · c^T = rhs^T
    let mut aug = Matrix::zeros(mat.cols(), r + 1);
    for i in 0..mat.cols() {
        for j in 0..r {
            aug.set(i, j, mat.get(j, i));
        }
        aug.set(i, r, rhs[i]);
    }
    let mut row = 0;
    let mut pivot_of_col = vec![usize::MAX; r];
    for c in 0..r {
        let Some(pr) = (row..aug.rows()).find(|&i| !aug.get(i, c).is_zero()) else {
            continue;
        };
        for k in 0..=r {
            let tmp = aug.get(row, k);
            aug.set(row, k, aug.get(pr, k));
            aug.set(pr, k, tmp);
        }
        let inv = field.inv(aug.get(row, c)).expect("pivot is nonzero");
        for k in c..=r {
            aug.set(row, k, field.mul(aug.get(row, k), inv));
        }
        for i in 0..aug.rows() {
            if i == row || aug.get(i, c).is_zero() {
                continue;
            }
            let f = aug.get(i, c);
            for k in c..=r {
                let v = field.sub(aug.get(i, k), field.mul(f, aug.get(row, k)));
                aug.set(i, k, v);
            }
        }
        pivot_of_col[c] = row;
        row += 1;
    }
    // rows past the pivots must have zero rhs, otherwise inconsistent
    for i in row..aug.rows() {
        if !aug.get(i, r).is_zero() {
            return None;
        }
    }
    let mut sol = vec![FieldElement::ZERO; r];
    for c in 0..r {
        // independent rows of M mean every column gets a pivot
        debug_assert_ne!(pivot_of_col[c], usize::MAX);
        sol[c] = aug.get(pivot_of_col[c], r);
    }
    Some(sol)
}

/// Basis of the right null space `{ y : M · y = 0 }`.
pub fn null_space(mat: &Matrix, field: &FieldParams) -> Vec<Vec<FieldElement>> {
    let mut red = RowReducer::new(mat.cols());
    for r in 0..mat.rows() {
        red.absorb(mat.row(r).to_vec(), field);
    }
    // back-eliminate so each pivot column is zero in all other basis rows
    let rref = {
        let mut rows: Vec<(usize, Vec<FieldElement>)> = red.pivots;
        for i in (0..rows.len()).rev() {
            let (pc, prow) = rows[i].clone();
            for (_, other) in rows.iter_mut().take(i) {
                let c = other[pc];
                if c.is_zero() {
                    continue;
                }
                for (x, p) in other.iter_mut().zip(prow.iter()) {
                    *x = field.sub(*x, field.mul(c, *p));
                }
            }
        }
        rows
    };
    let pivot_cols: Vec<usize> = rref.iter().map(|(c, _)| *c).collect();
    let mut basis = Vec::new();
    for free in 0..mat.cols() {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![FieldElement::ZERO; mat.cols()];
        v[free] = FieldElement::ONE;
        for (pc, prow) in &rref {
            v[*pc] = field.neg(prow[free]);
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldParams;

    fn m(field: &FieldParams, rows: &[&[u64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| field.embed(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_of_vandermonde() {
        let f7 = FieldParams::new(7, 1).unwrap();
        let mat = m(
            &f7,
            &[
                &[1, 1, 1, 1],
                &[1, 2, 3, 4],
                &[1, 4, 2, 2], // squares mod 7
            ],
        );
        assert_eq!(mat.rank(&f7), 3);
    }

    #[test]
    fn rank_detects_dependence() {
        let f5 = FieldParams::new(5, 1).unwrap();
        let mat = m(&f5, &[&[1, 2, 3], &[0, 1, 4], &[1, 3, 2]]); // row3 = row1 + row2
        assert_eq!(mat.rank(&f5), 2);
    }

    #[test]
    fn pivot_columns_are_leftmost() {
        let f5 = FieldParams::new(5, 1).unwrap();
        let mat = m(&f5, &[&[0, 1, 2, 3], &[0, 2, 4, 2]]);
        assert_eq!(pivot_columns(&mat, &f5), vec![1, 3]);
    }

    #[test]
    fn solve_left_roundtrip_and_inconsistency() {
        let f11 = FieldParams::new(11, 1).unwrap();
        let mat = m(&f11, &[&[1, 2, 3, 4], &[0, 1, 7, 2]]);
        let c = vec![f11.embed(5), f11.embed(9)];
        let rhs: Vec<_> = (0..4)
            .map(|j| {
                let mut acc = FieldElement::ZERO;
                for (i, &ci) in c.iter().enumerate() {
                    acc = f11.add(acc, f11.mul(ci, mat.get(i, j)));
                }
                acc
            })
            .collect();
        assert_eq!(solve_left(&mat, &rhs, &f11), Some(c));

        let mut bad = rhs;
        bad[3] = f11.add(bad[3], f11.one());
        assert_eq!(solve_left(&mat, &bad, &f11), None);
    }

    #[test]
    fn null_space_vectors_annihilate() {
        let f7 = FieldParams::new(7, 1).unwrap();
        let mat = m(&f7, &[&[1, 1, 0, 3], &[0, 1, 1, 5]]);
        let basis = null_space(&mat, &f7);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            for r in 0..mat.rows() {
                let mut acc = FieldElement::ZERO;
                for c in 0..mat.cols() {
                    acc = f7.add(acc, f7.mul(mat.get(r, c), v[c]));
                }
                assert!(acc.is_zero());
            }
        }
    }
}
