//! Dense exact linear algebra over the rational function field Q(v).
//!
//! Everything here is desk-scale Gaussian elimination with deterministic
//! pivoting (first nonzero entry in column order).

use crate::arith::RationalFunc;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<RationalFunc>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![RationalFunc::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = RationalFunc::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<RationalFunc>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &RationalFunc {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut RationalFunc {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[RationalFunc] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.at(i, j) == self.at(j, i)))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.at(i, k).is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    if other.at(k, j).is_zero() {
                        continue;
                    }
                    let t = self.at(i, k).mul(other.at(k, j));
                    *out.at_mut(i, j) = out.at(i, j).add(&t);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[RationalFunc]) -> Vec<RationalFunc> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = RationalFunc::zero();
                for j in 0..self.cols {
                    if !self.at(i, j).is_zero() && !x[j].is_zero() {
                        acc = acc.add(&self.at(i, j).mul(&x[j]));
                    }
                }
                acc
            })
            .collect()
    }

    /// Row echelon reduction in place; returns the pivot column of each
    /// pivot row (rank = returned length).
    fn echelon(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    let a = self.at(p, j).clone();
                    let b = self.at(r, j).clone();
                    *self.at_mut(p, j) = b;
                    *self.at_mut(r, j) = a;
                }
            }
            let inv = self.at(r, c).inv().expect("nonzero pivot");
            for j in c..self.cols {
                *self.at_mut(r, j) = self.at(r, j).mul(&inv);
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let f = self.at(i, c).clone();
                    for j in c..self.cols {
                        let t = f.mul(self.at(r, j));
                        *self.at_mut(i, j) = self.at(i, j).sub(&t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.echelon().len()
    }

    pub fn invert(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::Math("cannot invert a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, n + i) = RationalFunc::one();
        }
        let pivots = aug.echelon();
        if pivots.len() != n || pivots.iter().enumerate().any(|(k, &c)| c != k) {
            return Err(Error::Math("matrix is singular".into()));
        }
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                *out.at_mut(i, j) = aug.at(i, n + j).clone();
            }
        }
        Ok(out)
    }

    /// Solve `A x = b`. Returns `Ok(None)` when the system is inconsistent
    /// and an error when it is consistent but underdetermined.
    pub fn solve(&self, b: &[RationalFunc]) -> Result<Option<Vec<RationalFunc>>> {
        assert_eq!(self.rows, b.len());
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, self.cols) = b[i].clone();
        }
        let pivots = aug.echelon();
        if pivots.last() == Some(&self.cols) {
            return Ok(None); // inconsistent
        }
        if pivots.len() < self.cols {
            return Err(Error::Math("linear system is underdetermined".into()));
        }
        let mut x = vec![RationalFunc::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.at(r, self.cols).clone();
        }
        Ok(Some(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::LaurentPoly;

    fn rf(pairs: &[(i64, i64)]) -> RationalFunc {
        RationalFunc::from_laurent(LaurentPoly::from_terms(pairs))
    }

    #[test]
    fn rank_and_inverse() {
        let m = Matrix::from_rows(vec![
            vec![rf(&[(1, 1)]), rf(&[(0, 1)])],
            vec![rf(&[(0, 1)]), rf(&[(-1, 1)])],
        ]);
        assert_eq!(m.rank(), 1);
        let m2 = Matrix::from_rows(vec![
            vec![rf(&[(1, 1)]), rf(&[(0, 1)])],
            vec![rf(&[(0, 1)]), rf(&[(1, 1)])],
        ]);
        assert_eq!(m2.rank(), 2);
        let inv = m2.invert().unwrap();
        assert_eq!(m2.mul(&inv), Matrix::identity(2));
    }

    #[test]
    fn solve_systems() {
        let m = Matrix::from_rows(vec![
            vec![rf(&[(0, 1)]), rf(&[(0, 1)])],
            vec![rf(&[(0, 1)]), rf(&[(0, -1)])],
        ]);
        let b = vec![rf(&[(1, 2)]), rf(&[(0, 0)])];
        let x = m.solve(&b).unwrap().unwrap();
        assert_eq!(x[0], rf(&[(1, 1)]));
        assert_eq!(x[1], rf(&[(1, 1)]));
        // inconsistent
        let m = Matrix::from_rows(vec![vec![rf(&[(0, 1)])], vec![rf(&[(0, 1)])]]);
        assert!(m.solve(&[rf(&[(0, 1)]), rf(&[(0, 2)])]).unwrap().is_none());
    }
}
