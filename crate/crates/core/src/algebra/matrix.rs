//! Dense matrices over an exact field, with Gaussian elimination for rank,
//! nullspace, determinants, and linear solves. No pivoting heuristics are
//! needed: arithmetic is exact, so any nonzero pivot works.

use super::scalar::{FieldDesc, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: FieldDesc,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize, field: FieldDesc) -> Self {
        Matrix { rows, cols, field, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(n: usize, field: FieldDesc) -> Self {
        let mut m = Matrix::zero(n, n, field);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Scalar>], cols: usize, field: FieldDesc) -> Self {
        let mut m = Matrix::zero(rows.len(), cols, field);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged row");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_columns(cols: &[Vec<Scalar>]) -> Self {
        let ncols = cols.len();
        let nrows = cols[0].len();
        let field = cols[0][0].field();
        let mut m = Matrix::zero(nrows, ncols, field);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), nrows, "ragged column");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Rescales a rational row to a primitive integer row (no-op over a
    /// prime field); row scaling preserves rank, nullspace, and solutions.
    fn primitivize_row(&mut self, r: usize) {
        if self.field != FieldDesc::Rational {
            return;
        }
        use num_bigint::BigInt;
        use num_integer::Integer;
        use num_traits::{One, Signed, Zero};
        let mut lcm = BigInt::one();
        let mut gcd = BigInt::zero();
        for j in 0..self.cols {
            if let Scalar::Q(q) = self.get(r, j) {
                if !q.is_zero() {
                    lcm = lcm.lcm(q.denom());
                    gcd = gcd.gcd(q.numer());
                }
            }
        }
        if gcd.is_zero() || (gcd.is_one() && lcm.is_one()) {
            return;
        }
        let scale = Scalar::Q(num_rational::BigRational::new(lcm, gcd.abs()));
        for j in 0..self.cols {
            let v = self.get(r, j).mul(&scale);
            self.set(r, j, v);
        }
    }

    /// In-place forward elimination to (non-reduced) row echelon form;
    /// returns the pivot columns. Rational rows are kept as primitive
    /// integer rows and updated fraction-free, which keeps entries small.
    fn echelonize(&mut self) -> Vec<usize> {
        for r in 0..self.rows {
            self.primitivize_row(r);
        }
        let weight = |s: &Scalar| -> u64 {
            match s {
                Scalar::Fp { .. } => 0,
                Scalar::Q(q) => q.numer().bits() + q.denom().bits(),
            }
        };
        let mut pivots = Vec::new();
        let mut row = 0;
        // single-step fraction-free elimination: the division by the previous
        // pivot is exact and keeps integer entries at minor size
        let mut prev_pivot = self.field.one();
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pivot_row) = (row..self.rows)
                .filter(|&r| !self.get(r, col).is_zero())
                .min_by_key(|&r| weight(self.get(r, col)))
            else {
                continue;
            };
            self.swap_rows(row, pivot_row);
            let pivot = self.get(row, col).clone();
            let prev_inv = prev_pivot.inv().expect("previous pivot is nonzero");
            for r in row + 1..self.rows {
                let factor = self.get(r, col).clone();
                for j in col..self.cols {
                    let v = self
                        .get(r, j)
                        .mul(&pivot)
                        .sub(&self.get(row, j).mul(&factor))
                        .mul(&prev_inv);
                    self.set(r, j, v);
                }
            }
            prev_pivot = pivot;
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.echelonize().len()
    }

    pub fn nullspace_dim(&self) -> usize {
        self.cols - self.rank()
    }

    /// Back-substitution through an echelonized copy: assigns the free
    /// columns and solves the pivot columns bottom up.
    fn back_substitute(
        work: &Matrix,
        pivots: &[usize],
        assign: impl Fn(usize) -> Scalar,
    ) -> Vec<Scalar> {
        let field = work.field;
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut x = vec![field.zero(); work.cols];
        for c in 0..work.cols {
            if !pivot_set.contains(&c) {
                x[c] = assign(c);
            }
        }
        for (r, &c) in pivots.iter().enumerate().rev() {
            let mut acc = field.zero();
            for j in c + 1..work.cols {
                if !x[j].is_zero() {
                    acc = acc.add(&work.get(r, j).mul(&x[j]));
                }
            }
            x[c] = acc.neg().div(work.get(r, c)).expect("pivot is nonzero");
        }
        x
    }

    /// A basis of the right nullspace.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let mut work = self.clone();
        let pivots = work.echelonize();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let vec = Matrix::back_substitute(&work, &pivots, |c| {
                if c == free {
                    self.field.one()
                } else {
                    self.field.zero()
                }
            });
            basis.push(vec);
        }
        basis
    }

    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut work = self.clone();
        let mut det = self.field.one();
        for col in 0..work.cols {
            let Some(pivot_row) = (col..work.rows).find(|&r| !work.get(r, col).is_zero()) else {
                return self.field.zero();
            };
            if pivot_row != col {
                work.swap_rows(col, pivot_row);
                det = det.neg();
            }
            let pivot = work.get(col, col).clone();
            det = det.mul(&pivot);
            let inv = pivot.inv().expect("pivot is nonzero");
            for r in col + 1..work.rows {
                if work.get(r, col).is_zero() {
                    continue;
                }
                let factor = work.get(r, col).mul(&inv);
                for j in col..work.cols {
                    let v = work.get(r, j).sub(&work.get(col, j).mul(&factor));
                    work.set(r, j, v);
                }
            }
        }
        det
    }

    /// Solves `self * x = rhs` when the matrix has full column rank and the
    /// system is consistent; `None` otherwise.
    pub fn solve(&self, rhs: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(rhs.len(), self.rows);
        let mut work = Matrix::zero(self.rows, self.cols + 1, self.field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                work.set(i, j, self.get(i, j).clone());
            }
            work.set(i, self.cols, rhs[i].clone());
        }
        let pivots = work.echelonize();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        if pivots.len() < self.cols {
            return None; // underdetermined
        }
        // the augmented column plays the role of a -1-weighted free variable
        let x = Matrix::back_substitute(&work, &pivots, |c| {
            if c == self.cols {
                self.field.from_i64(-1)
            } else {
                self.field.zero()
            }
        });
        Some(x[..self.cols].to_vec())
    }
}

/// Exact dimension of the solution space of a homogeneous system. An empty
/// row list leaves the whole ambient space.
pub fn nullspace_dimension(rows: &[Vec<Scalar>], ambient: usize, field: FieldDesc) -> usize {
    if rows.is_empty() {
        return ambient;
    }
    Matrix::from_rows(rows, ambient, field).nullspace_dim()
}
