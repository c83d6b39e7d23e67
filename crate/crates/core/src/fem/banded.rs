//! Square band matrices and banded LU with partial pivoting.

use crate::error::{Error, Result};

/// Relative pivot threshold below which a system is declared singular.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// Square matrix with `lower` sub-diagonals and `upper` super-diagonals,
/// stored row by row: row `i` holds columns `i - lower ..= i + upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    dim: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(dim: usize, lower: usize, upper: usize) -> Self {
        BandedMatrix {
            dim,
            lower,
            upper,
            data: vec![0.0; dim * (lower + upper + 1)],
        }
    }

    pub fn identity(dim: usize, lower: usize, upper: usize) -> Self {
        let mut m = BandedMatrix::zeros(dim, lower, upper);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Band of a dense row-major matrix; entries outside the band must be zero.
    pub fn from_dense(rows: &[Vec<f64>], lower: usize, upper: usize) -> Result<Self> {
        let dim = rows.len();
        let mut m = BandedMatrix::zeros(dim, lower, upper);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InconsistentInput(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if m.in_band(i, j) {
                    m.set(i, j, v);
                } else if v != 0.0 {
                    return Err(Error::InconsistentInput(format!(
                        "entry ({i}, {j}) lies outside the band"
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.lower
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.upper
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.dim && j < self.dim && j + self.lower >= i && j <= i + self.upper
    }

    fn index(&self, i: usize, j: usize) -> usize {
        i * self.width() + (j + self.lower - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.index(i, j)]
        } else {
            0.0
        }
    }

    /// Panics if `(i, j)` is outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let k = self.index(i, j);
        self.data[k] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let k = self.index(i, j);
        self.data[k] += value;
    }

    /// Column indices stored for row `i`, clipped to the matrix.
    pub fn row_columns(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.lower)..(i + self.upper + 1).min(self.dim)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row_columns(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> BandedMatrix {
        let mut t = BandedMatrix::zeros(self.dim, self.upper, self.lower);
        for i in 0..self.dim {
            for j in self.row_columns(i) {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// `self + alpha * other`; both operands must share the band layout.
    pub fn add_scaled(&self, alpha: f64, other: &BandedMatrix) -> Result<BandedMatrix> {
        if self.dim != other.dim || self.lower != other.lower || self.upper != other.upper {
            return Err(Error::InconsistentInput(
                "band layouts differ in add_scaled".into(),
            ));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + alpha * b)
            .collect();
        Ok(BandedMatrix {
            data,
            ..self.clone()
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Nonzero-pattern triplets `(i, j, value)` inside the band.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row_columns(i).map(move |j| (i, j, self.get(i, j))))
    }

    /// Banded LU factorization with partial pivoting.
    pub fn factor(&self) -> Result<BandedLu> {
        BandedLu::new(self)
    }
}

/// LU factors of a [`BandedMatrix`]. `U` has bandwidth `lower + upper`
/// because row interchanges push entries to the right.
#[derive(Debug, Clone)]
pub struct BandedLu {
    dim: usize,
    lower: usize,
    width: usize,
    upper_factor: Vec<f64>,
    multipliers: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    fn new(matrix: &BandedMatrix) -> Result<Self> {
        let n = matrix.dim;
        let (m1, m2) = (matrix.lower, matrix.upper);
        let mm = m1 + m2 + 1;
        let scale = matrix.max_abs();
        // row i of `a` starts at column i - m1; left-justify the first m1 rows
        let mut a = matrix.data.clone();
        let mut l = m1;
        for i in 0..m1.min(n) {
            for j in (m1 - i)..mm {
                a[i * mm + j - l] = a[i * mm + j];
            }
            l -= 1;
            for j in (mm - l - 1)..mm {
                a[i * mm + j] = 0.0;
            }
        }
        let mut multipliers = vec![0.0; n * m1];
        let mut pivots = vec![0; n];
        let mut l = m1;
        for k in 0..n {
            let mut pivot = a[k * mm];
            let mut p = k;
            if l < n {
                l += 1;
            }
            for j in k + 1..l {
                if a[j * mm].abs() > pivot.abs() {
                    pivot = a[j * mm];
                    p = j;
                }
            }
            pivots[k] = p;
            if !(pivot.abs() > PIVOT_TOLERANCE * scale) {
                return Err(Error::SingularSystem {
                    row: k,
                    pivot,
                    scale,
                });
            }
            if p != k {
                for j in 0..mm {
                    a.swap(k * mm + j, p * mm + j);
                }
            }
            for i in k + 1..l {
                let factor = a[i * mm] / a[k * mm];
                multipliers[k * m1 + i - k - 1] = factor;
                for j in 1..mm {
                    a[i * mm + j - 1] = a[i * mm + j] - factor * a[k * mm + j];
                }
                a[i * mm + mm - 1] = 0.0;
            }
        }
        Ok(BandedLu {
            dim: n,
            lower: m1,
            width: mm,
            upper_factor: a,
            multipliers,
            pivots,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut b = rhs.to_vec();
        self.solve_in_place(&mut b);
        b
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, m1, mm) = (self.dim, self.lower, self.width);
        assert_eq!(b.len(), n);
        let mut l = m1;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            if l < n {
                l += 1;
            }
            for j in k + 1..l {
                b[j] -= self.multipliers[k * m1 + j - k - 1] * b[k];
            }
        }
        let mut l = 1;
        for i in (0..n).rev() {
            let mut sum = b[i];
            for k in 1..l {
                sum -= self.upper_factor[i * mm + k] * b[k + i];
            }
            b[i] = sum / self.upper_factor[i * mm];
            if l < mm {
                l += 1;
            }
        }
    }
}

/// Solves `matrix * x = rhs` by banded LU with partial pivoting.
pub fn solve_banded(matrix: &BandedMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != matrix.dim() {
        return Err(Error::InconsistentInput(format!(
            "rhs has length {}, matrix dimension is {}",
            rhs.len(),
            matrix.dim()
        )));
    }
    Ok(matrix.factor()?.solve(rhs))
}

/// Max-norm of `matrix * x - rhs`.
pub fn residual_norm(matrix: &BandedMatrix, x: &[f64], rhs: &[f64]) -> f64 {
    matrix
        .matvec(x)
        .iter()
        .zip(rhs)
        .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve() {
        let m = BandedMatrix::identity(3, 1, 1);
        assert_eq!(solve_banded(&m, &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn tridiagonal_example() {
        let m = BandedMatrix::from_dense(
            &[
                vec![2.0, -1.0, 0.0],
                vec![-1.0, 2.0, -1.0],
                vec![0.0, -1.0, 2.0],
            ],
            1,
            1,
        )
        .unwrap();
        let x = solve_banded(&m, &[1.0, 0.0, 1.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pivoting_is_required() {
        // zero leading entry forces a row interchange
        let m = BandedMatrix::from_dense(
            &[
                vec![0.0, 1.0, 0.0, 0.0],
                vec![1.0, 0.0, 2.0, 0.0],
                vec![0.0, 3.0, 1.0, 1.0],
                vec![0.0, 0.0, 1.0, 4.0],
            ],
            1,
            1,
        )
        .unwrap();
        let x_true = [1.0, -2.0, 0.5, 3.0];
        let rhs = m.matvec(&x_true);
        let x = solve_banded(&m, &rhs).unwrap();
        for (a, b) in x.iter().zip(x_true) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn asymmetric_bands() {
        let n = 9;
        let mut m = BandedMatrix::zeros(n, 3, 1);
        for i in 0..n {
            for j in m.row_columns(i) {
                let v = if i == j { 0.1 } else { 1.0 + (i * 7 + j * 3) as f64 % 5.0 };
                m.set(i, j, v);
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let rhs = m.matvec(&x_true);
        let x = solve_banded(&m, &rhs).unwrap();
        assert!(residual_norm(&m, &x, &rhs) < 1e-12);
        let t = m.transpose();
        assert_eq!((t.lower_bandwidth(), t.upper_bandwidth()), (1, 3));
        assert_eq!(t.get(4, 2), m.get(2, 4));
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = BandedMatrix::from_dense(&[vec![1.0, 2.0], vec![2.0, 4.0]], 1, 1).unwrap();
        assert!(matches!(
            solve_banded(&m, &[1.0, 1.0]),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn out_of_band_dense_entry_rejected() {
        let dense = vec![vec![1.0, 0.0, 5.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert!(BandedMatrix::from_dense(&dense, 1, 1).is_err());
    }
}
