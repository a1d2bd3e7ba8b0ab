//! Dense row-major matrices over a [`Field`] and the elimination kernels
//! every other module builds on.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::field::{Field, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Reduced row-echelon form plus the pivot column of each nonzero row.
#[derive(Debug, Clone)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// `None` when the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Option<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<Scalar>]) -> Matrix {
        Matrix::from_fn(rows, columns.len(), |r, c| columns[c][r].clone())
    }

    pub fn diagonal(field: &Field, entries: &[Scalar]) -> Matrix {
        let n = entries.len();
        Matrix::from_fn(n, n, |r, c| if r == c { entries[r].clone() } else { field.zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn map(&self, f: impl FnMut(&Scalar) -> Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    /// Panics on shape mismatch; callers check shapes first.
    pub fn add(&self, field: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "matrix add shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| field.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, field: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "matrix sub shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| field.sub(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, field: &Field, c: &Scalar) -> Matrix {
        self.map(|a| field.mul(a, c))
    }

    pub fn mul(&self, field: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix mul shape mismatch");
        Matrix::from_fn(self.rows, other.cols, |r, c| {
            (0..self.cols).fold(field.zero(), |acc, k| {
                field.add(&acc, &field.mul(self.get(r, k), other.get(k, c)))
            })
        })
    }

    pub fn mul_vec(&self, field: &Field, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows).map(|r| field.dot(self.row(r), v)).collect()
    }

    /// Row vector times matrix: `vᵀ M`.
    pub fn vec_mul(&self, field: &Field, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.rows, v.len(), "vector-matrix shape mismatch");
        (0..self.cols)
            .map(|c| {
                (0..self.rows).fold(field.zero(), |acc, r| {
                    field.add(&acc, &field.mul(&v[r], self.get(r, c)))
                })
            })
            .collect()
    }

    pub fn pow(&self, field: &Field, mut k: u64) -> Matrix {
        assert!(self.is_square(), "pow of non-square matrix");
        let mut acc = Matrix::identity(field, self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(field, &base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(field, &base);
            }
        }
        acc
    }

    /// `self - c·I`.
    pub fn shift(&self, field: &Field, c: &Scalar) -> Matrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let v = field.sub(m.get(i, i), c);
            m.set(i, i, v);
        }
        m
    }

    pub fn approx_eq(&self, field: &Field, other: &Matrix) -> bool {
        self.shape() == other.shape() && self.data.iter().zip(&other.data).all(|(a, b)| field.eq(a, b))
    }

    pub fn is_zero(&self, field: &Field) -> bool {
        self.data.iter().all(|a| field.is_zero(a))
    }

    pub fn is_identity(&self, field: &Field) -> bool {
        self.is_square() && self.approx_eq(field, &Matrix::identity(field, self.rows))
    }

    pub fn is_upper_triangular(&self, field: &Field) -> bool {
        (0..self.rows).all(|r| (0..r.min(self.cols)).all(|c| field.is_zero(self.get(r, c))))
    }

    pub fn is_lower_triangular(&self, field: &Field) -> bool {
        (0..self.rows).all(|r| (r + 1..self.cols).all(|c| field.is_zero(self.get(r, c))))
    }

    /// Largest absolute row sum, as f64. Used for scale-aware pivot thresholds.
    pub fn max_row_norm(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|x| x.to_f64().abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Reduced row-echelon form. Exact fields pivot on the first nonzero
    /// entry; reals pivot on the largest magnitude and treat entries below
    /// `tolerance × max row norm` as zero.
    pub fn rref(&self, field: &Field) -> Rref {
        let mut m = self.clone();
        let threshold = field.tolerance() * self.max_row_norm();
        let is_negligible = |x: &Scalar| match x {
            Scalar::Real(v) => v.abs() <= threshold,
            _ => field.is_zero(x),
        };
        let mut pivots = Vec::new();
        let mut prow = 0;
        for col in 0..m.cols {
            if prow == m.rows {
                break;
            }
            let candidate = match field {
                Field::Real { .. } => (prow..m.rows)
                    .max_by(|&a, &b| m.get(a, col).to_f64().abs().total_cmp(&m.get(b, col).to_f64().abs()))
                    .filter(|&r| !is_negligible(m.get(r, col))),
                _ => (prow..m.rows).find(|&r| !field.is_zero(m.get(r, col))),
            };
            let Some(r) = candidate else {
                for rr in prow..m.rows {
                    m.set(rr, col, field.zero());
                }
                continue;
            };
            m.swap_rows(prow, r);
            let inv = field.inv(m.get(prow, col)).expect("pivot is nonzero");
            for c in col..m.cols {
                let v = field.mul(m.get(prow, c), &inv);
                m.set(prow, c, v);
            }
            for rr in 0..m.rows {
                if rr == prow {
                    continue;
                }
                let factor = m.get(rr, col).clone();
                if field.is_zero(&factor) && field.is_exact() {
                    continue;
                }
                for c in col..m.cols {
                    let v = field.sub(m.get(rr, c), &field.mul(&factor, m.get(prow, c)));
                    m.set(rr, c, v);
                }
                m.set(rr, col, field.zero());
            }
            pivots.push(col);
            prow += 1;
        }
        Rref { matrix: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Rank. Over `Q` this runs fraction-free (Bareiss) elimination on the
    /// integer-scaled rows; other fields use [`Matrix::rref`].
    pub fn rank(&self, field: &Field) -> usize {
        match field {
            Field::Rational => bareiss(self.integer_rows()).0,
            _ => self.rref(field).pivots.len(),
        }
    }

    /// Determinant (square matrices only). Fraction-free over `Q`.
    pub fn det(&self, field: &Field) -> Scalar {
        assert!(self.is_square(), "determinant of non-square matrix");
        if self.rows == 0 {
            return field.one();
        }
        match field {
            Field::Rational => {
                let (rows, scale) = self.integer_rows_with_scale();
                match bareiss(rows).1 {
                    Some(d) => Scalar::Rational(num_rational::BigRational::new(d, scale)),
                    None => field.zero(),
                }
            }
            _ => {
                // Gaussian elimination with partial pivoting; no tolerance is
                // applied to pivots so small determinants survive.
                let mut m = self.clone();
                let mut det = field.one();
                let n = m.rows;
                for col in 0..n {
                    let pivot = match field {
                        Field::Real { .. } => (col..n)
                            .max_by(|&a, &b| m.get(a, col).to_f64().abs().total_cmp(&m.get(b, col).to_f64().abs()))
                            .filter(|&r| m.get(r, col).to_f64() != 0.0),
                        _ => (col..n).find(|&r| !field.is_zero(m.get(r, col))),
                    };
                    let Some(p) = pivot else {
                        return field.zero();
                    };
                    if p != col {
                        m.swap_rows(p, col);
                        det = field.neg(&det);
                    }
                    let pv = m.get(col, col).clone();
                    det = field.mul(&det, &pv);
                    let inv = match &pv {
                        Scalar::Real(x) => Scalar::Real(1.0 / x),
                        _ => field.inv(&pv).expect("pivot is nonzero"),
                    };
                    for r in col + 1..n {
                        let factor = field.mul(m.get(r, col), &inv);
                        for c in col..n {
                            let v = field.sub(m.get(r, c), &field.mul(&factor, m.get(col, c)));
                            m.set(r, c, v);
                        }
                    }
                }
                det
            }
        }
    }

    /// Basis of the right null space `{x : Mx = 0}`, one vector per free
    /// column, free variable set to one.
    pub fn nullspace(&self, field: &Field) -> Vec<Vec<Scalar>> {
        let Rref { matrix, pivots } = self.rref(field);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![field.zero(); self.cols];
                v[fc] = field.one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = field.neg(matrix.get(row, fc));
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self, field: &Field) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, |r, c| {
            if c < n {
                self.get(r, c).clone()
            } else if c - n == r {
                field.one()
            } else {
                field.zero()
            }
        });
        let Rref { matrix, pivots } = aug.rref(field);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Matrix::from_fn(n, n, |r, c| matrix.get(r, c + n).clone()))
    }

    /// One solution of `Mx = b` (free variables zero), or `None`.
    pub fn solve(&self, field: &Field, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(self.rows, b.len(), "right-hand side length mismatch");
        let aug = Matrix::from_fn(self.rows, self.cols + 1, |r, c| {
            if c < self.cols {
                self.get(r, c).clone()
            } else {
                b[r].clone()
            }
        });
        let Rref { matrix, pivots } = aug.rref(field);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![field.zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = matrix.get(row, self.cols).clone();
        }
        Some(x)
    }

    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        self.integer_rows_with_scale().0
    }

    // Each row multiplied by the lcm of its denominators; returns the product
    // of those multipliers as well.
    fn integer_rows_with_scale(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let mut scale = BigInt::one();
        let rows = (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let lcm = row.iter().fold(BigInt::one(), |acc, s| match s {
                    Scalar::Rational(q) => acc.lcm(q.denom()),
                    _ => acc,
                });
                scale *= &lcm;
                row.iter()
                    .map(|s| match s {
                        Scalar::Rational(q) => q.numer() * (&lcm / q.denom()),
                        _ => unreachable!("integer scaling is only used over Q"),
                    })
                    .collect()
            })
            .collect();
        (rows, scale)
    }
}

/// Fraction-free Gaussian elimination on an integer matrix. Returns the
/// rank and, for square input, the determinant (`None` when singular).
pub(crate) fn bareiss(mut a: Vec<Vec<BigInt>>) -> (usize, Option<BigInt>) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let square = rows == cols;
    let mut prev = BigInt::one();
    let mut sign = 1i8;
    let mut prow = 0;
    for col in 0..cols {
        if prow == rows {
            break;
        }
        let Some(p) = (prow..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        if p != prow {
            a.swap(p, prow);
            sign = -sign;
        }
        for r in prow + 1..rows {
            for c in col + 1..cols {
                let num = &a[prow][col] * &a[r][c] - &a[r][col] * &a[prow][c];
                debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                a[r][c] = num / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[prow][col].clone();
        prow += 1;
    }
    let det = (square && prow == rows).then(|| {
        let d = if rows == 0 {
            BigInt::one()
        } else {
            a[rows - 1][cols - 1].clone()
        };
        if sign < 0 {
            -d
        } else {
            d
        }
    });
    (prow, det)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Field::Rational.from_i64(n)
    }

    fn qm(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()).unwrap()
    }

    // Cofactor expansion, used as an independent determinant oracle.
    fn cofactor_det(f: &Field, m: &Matrix) -> Scalar {
        let n = m.rows();
        if n == 1 {
            return m.get(0, 0).clone();
        }
        let mut acc = f.zero();
        for c in 0..n {
            let minor = Matrix::from_fn(n - 1, n - 1, |r, cc| {
                m.get(r + 1, if cc < c { cc } else { cc + 1 }).clone()
            });
            let term = f.mul(m.get(0, c), &cofactor_det(f, &minor));
            acc = if c % 2 == 0 {
                f.add(&acc, &term)
            } else {
                f.sub(&acc, &term)
            };
        }
        acc
    }

    #[test]
    fn determinant_examples() {
        let f = Field::Rational;
        let a3 = qm(&[&[5, -6, -6], &[-1, 4, 2], &[3, -6, -4]]);
        assert_eq!(a3.det(&f), q(4));
        assert_eq!(cofactor_det(&f, &a3), q(4));
        assert_eq!(Matrix::identity(&f, 4).det(&f), q(1));
        assert_eq!(qm(&[&[1, 2], &[0, 0]]).det(&f), q(0));
        let frac = Matrix::from_rows(vec![
            vec![f.from_ratio(1, 2).unwrap(), q(1)],
            vec![q(3), f.from_ratio(2, 3).unwrap()],
        ])
        .unwrap();
        assert_eq!(frac.det(&f), f.from_ratio(-8, 3).unwrap());
    }

    #[test]
    fn determinant_agrees_with_cofactor_expansion() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for field in [Field::Rational, Field::Prime(7)] {
            for _ in 0..100 {
                let n = rng.gen_range(1..=5);
                let m = Matrix::from_fn(n, n, |_, _| field.from_i64(rng.gen_range(-4..=4)));
                assert_eq!(m.det(&field), cofactor_det(&field, &m));
            }
        }
    }

    #[test]
    fn nullspace_and_rank() {
        let f = Field::Rational;
        let shifted = qm(&[&[3, -6, -6], &[-1, 2, 2], &[3, -6, -6]]);
        let ns = shifted.nullspace(&f);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(shifted.mul_vec(&f, v).iter().all(|x| f.is_zero(x)));
        }
        assert!(Matrix::identity(&f, 3).nullspace(&f).is_empty());
        assert_eq!(Matrix::identity(&f, 3).rank(&f), 3);
        assert_eq!(qm(&[&[1, 2], &[2, 4]]).rank(&f), 1);
        assert_eq!(qm(&[&[0, 0, 0]]).rank(&f), 0);
    }

    #[test]
    fn inverse_examples() {
        let f = Field::Rational;
        let inv = qm(&[&[1, 2], &[0, 2]]).inverse(&f).unwrap();
        let expect = Matrix::from_rows(vec![vec![q(1), q(-1)], vec![q(0), f.from_ratio(1, 2).unwrap()]]).unwrap();
        assert_eq!(inv, expect);
        assert!(qm(&[&[1, 1], &[1, 1]]).inverse(&f).is_none());
    }

    #[test]
    fn solve_two_by_two() {
        let f = Field::Rational;
        // columns (1,0) and (1,1); (2,3) = -1·(1,0) + 3·(1,1)
        let m = qm(&[&[1, 1], &[0, 1]]);
        assert_eq!(m.solve(&f, &[q(2), q(3)]).unwrap(), vec![q(-1), q(3)]);
        assert!(qm(&[&[1, 1], &[1, 1]]).solve(&f, &[q(1), q(2)]).is_none());
    }

    #[test]
    fn real_rank_uses_tolerance() {
        let f = Field::default_real();
        let m = Matrix::from_rows(vec![
            vec![Scalar::Real(1.0), Scalar::Real(2.0)],
            vec![Scalar::Real(2.0), Scalar::Real(4.0 + 1e-13)],
        ])
        .unwrap();
        assert_eq!(m.rank(&f), 1);
    }
}
