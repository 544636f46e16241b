//! Row-major matrices over a prime field, exact linear solving, and the
//! Cauchy/Vandermonde decoding matrix for cross-subspace alignment.

use crate::field::{FieldElement, PrimeField};
use crate::{Error, Result};

/// A dense matrix over `F_q`, stored row-major with explicit dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zero(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    /// Builds a matrix from rows of integers, reducing each mod q.
    pub fn from_rows(field: PrimeField, rows: &[Vec<u64>]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&v| v % field.order()))
            .collect();
        Ok(Matrix { field, rows: height, cols: width, data })
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.field.elem(self.data[r * self.cols + c])
    }

    pub fn set(&mut self, r: usize, c: usize, value: u64) {
        self.data[r * self.cols + c] = value % self.field.order();
    }

    /// Raw residues in row-major order.
    pub fn values(&self) -> &[u64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.data[r * self.cols + c]).collect()
    }

    /// Copy of the row range `[r0, r1)` as its own matrix.
    pub fn row_slice(&self, r0: usize, r1: usize) -> Matrix {
        assert!(r0 <= r1 && r1 <= self.rows, "row range out of bounds");
        Matrix {
            field: self.field,
            rows: r1 - r0,
            cols: self.cols,
            data: self.data[r0 * self.cols..r1 * self.cols].to_vec(),
        }
    }

    /// Stacks blocks vertically; every block must share the column count.
    pub fn vstack(field: PrimeField, blocks: &[&Matrix]) -> Result<Matrix> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::DimensionMismatch("vstack column mismatch".into()));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            data.extend_from_slice(&b.data);
        }
        Ok(Matrix { field, rows, cols, data })
    }

    pub fn scale(&self, factor: FieldElement) -> Matrix {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = (self.field.elem(*v) * factor).value();
        }
        out
    }

    /// Matrix product, exact in `F_q`.
    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "({}x{}) * ({}x{})",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let q = self.field.order();
        let mut out = Matrix::zero(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as u128;
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let cur = out.data[i * rhs.cols + j] as u128;
                    out.data[i * rhs.cols + j] =
                        ((cur + a * rhs.data[k * rhs.cols + j] as u128) % q as u128) as u64;
                }
            }
        }
        Ok(out)
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch("entrywise product shape".into()));
        }
        let mut out = self.clone();
        for (v, w) in out.data.iter_mut().zip(&rhs.data) {
            *v = (self.field.elem(*v) * self.field.elem(*w)).value();
        }
        Ok(out)
    }
}

impl std::ops::Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape");
        let mut out = self.clone();
        for (v, w) in out.data.iter_mut().zip(&rhs.data) {
            *v = (self.field.elem(*v) + self.field.elem(*w)).value();
        }
        out
    }
}

/// Exact Gauss-Jordan elimination on `a | rhs...` with first-nonzero
/// pivoting. Accepts overdetermined systems (rows >= cols): extra equations
/// are checked for consistency instead of being dropped, so a corrupted
/// share vector surfaces as an error rather than a silently wrong decode.
pub(crate) fn eliminate(a: &Matrix, rhs: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
    let (n_rows, n_cols) = (a.rows(), a.cols());
    if n_rows < n_cols {
        return Err(Error::DimensionMismatch(
            "underdetermined system (rows < cols)".into(),
        ));
    }
    for (i, b) in rhs.iter().enumerate() {
        if b.len() != n_rows {
            return Err(Error::DimensionMismatch(format!(
                "rhs {i} has length {} for {n_rows} equations",
                b.len()
            )));
        }
    }
    let field = a.field();
    let width = n_cols + rhs.len();
    let mut work: Vec<Vec<FieldElement>> = (0..n_rows)
        .map(|r| {
            let mut row: Vec<FieldElement> =
                a.row(r).iter().map(|&v| field.elem(v)).collect();
            row.extend(rhs.iter().map(|b| field.elem(b[r])));
            row
        })
        .collect();

    for col in 0..n_cols {
        let pivot = (col..n_rows)
            .find(|&r| !work[r][col].is_zero())
            .ok_or(Error::SingularSystem)?;
        work.swap(col, pivot);
        let inv = work[col][col].inverse().expect("pivot is non-zero");
        for v in work[col].iter_mut() {
            *v = *v * inv;
        }
        for r in 0..n_rows {
            if r != col && !work[r][col].is_zero() {
                let factor = work[r][col];
                for c in col..width {
                    let delta = factor * work[col][c];
                    work[r][c] = work[r][c] - delta;
                }
            }
        }
    }
    // Leftover equations must have been eliminated to zero on both sides.
    for row in work.iter().skip(n_cols) {
        if row.iter().any(|v| !v.is_zero()) {
            return Err(Error::InconsistentSystem);
        }
    }
    Ok((0..rhs.len())
        .map(|i| (0..n_cols).map(|r| work[r][n_cols + i].value()).collect())
        .collect())
}

/// Solves the square system `coeffs * x = rhs` exactly, or reports that the
/// system is singular.
pub fn solve_linear_system(coeffs: &Matrix, rhs: &[FieldElement]) -> Result<Vec<FieldElement>> {
    if coeffs.rows() != coeffs.cols() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square system, got {}x{}",
            coeffs.rows(),
            coeffs.cols()
        )));
    }
    let field = coeffs.field();
    let column: Vec<u64> = rhs.iter().map(|v| v.value()).collect();
    let solved = eliminate(coeffs, &[column])?;
    Ok(solved[0].iter().map(|&v| field.elem(v)).collect())
}

/// The decoding matrix of cross-subspace alignment: row `n` is
///
/// ```text
/// [ 1/(f_1+a_n), ..., 1/(f_S+a_n), 1, a_n, a_n^2, ..., a_n^(X-1) ]
/// ```
///
/// for evaluation points `a_n` and code constants `f_s`, where `X` is the
/// total number of noise terms protecting both inputs. With distinct `f_s`,
/// distinct `a_n`, and `a_n + f_s` never zero, the matrix is invertible;
/// construction verifies that explicitly rather than trusting the algebra.
#[derive(Clone, Debug)]
pub struct CsaDecodeMatrix {
    matrix: Matrix,
    f_consts: Vec<u64>,
    alphas: Vec<u64>,
    x_total: usize,
}

impl CsaDecodeMatrix {
    pub fn build(
        field: PrimeField,
        f_consts: &[u64],
        alphas: &[u64],
        x_total: usize,
    ) -> Result<Self> {
        let s = f_consts.len();
        let n = alphas.len();
        if s + x_total != n {
            return Err(Error::InvalidConfig(format!(
                "need S + X_total = N, got {s} + {x_total} != {n}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidConfig("empty decoding matrix".into()));
        }
        let q = field.order();
        let reduced_f: Vec<u64> = f_consts.iter().map(|&f| f % q).collect();
        let reduced_a: Vec<u64> = alphas.iter().map(|&a| a % q).collect();
        for (i, &f) in reduced_f.iter().enumerate() {
            if reduced_f[..i].contains(&f) {
                return Err(Error::InvalidConfig(format!("duplicate code constant f = {f}")));
            }
        }
        for (i, &a) in reduced_a.iter().enumerate() {
            if reduced_a[..i].contains(&a) {
                return Err(Error::InvalidConfig(format!("duplicate evaluation point {a}")));
            }
        }
        for &a in &reduced_a {
            for &f in &reduced_f {
                if (a + f) % q == 0 {
                    return Err(Error::InvalidConfig(format!(
                        "evaluation point {a} collides with -f for f = {f}"
                    )));
                }
            }
        }
        let mut matrix = Matrix::zero(field, n, n);
        for (row, &a) in reduced_a.iter().enumerate() {
            let alpha = field.elem(a);
            for (colum, &f) in reduced_f.iter().enumerate() {
                let denom = field.elem(f) + alpha;
                matrix.set(row, colum, denom.inverse()?.value());
            }
            for t in 0..x_total {
                matrix.set(row, s + t, alpha.pow(t as u64).value());
            }
        }
        // Invertibility is expected from the structure; verify anyway.
        eliminate(&matrix, &[])?;
        Ok(CsaDecodeMatrix {
            matrix,
            f_consts: reduced_f,
            alphas: reduced_a,
            x_total,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn f_consts(&self) -> &[u64] {
        &self.f_consts
    }

    pub fn alphas(&self) -> &[u64] {
        &self.alphas
    }

    pub fn x_total(&self) -> usize {
        self.x_total
    }

    /// Number of desired-product coordinates (the leading columns).
    pub fn batch_size(&self) -> usize {
        self.f_consts.len()
    }

    /// Solves `M * u = answers` for each right-hand side column.
    pub fn solve(&self, rhs: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
        eliminate(&self.matrix, rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::sharing::keyed_uniform;
    use proptest::prelude::*;

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn solves_worked_two_by_two() {
        let field = f(5);
        let coeffs = Matrix::from_rows(field, &[vec![2, 1], vec![4, 1]]).unwrap();
        let rhs = [field.elem(0), field.elem(2)];
        let x = solve_linear_system(&coeffs, &rhs).unwrap();
        assert_eq!(x.iter().map(|v| v.value()).collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn identity_system_returns_rhs() {
        let field = f(7);
        let coeffs = Matrix::identity(field, 3);
        let rhs = [field.elem(4), field.elem(0), field.elem(6)];
        let x = solve_linear_system(&coeffs, &rhs).unwrap();
        assert_eq!(x, rhs.to_vec());
    }

    #[test]
    fn singular_system_is_reported() {
        let field = f(5);
        let coeffs = Matrix::from_rows(field, &[vec![1, 1], vec![2, 2]]).unwrap();
        let rhs = [field.elem(1), field.elem(2)];
        assert_eq!(solve_linear_system(&coeffs, &rhs), Err(Error::SingularSystem));
    }

    #[test]
    fn overdetermined_consistent_and_inconsistent() {
        let field = f(7);
        let a = Matrix::from_rows(field, &[vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let good = eliminate(&a, &[vec![2, 3, 5]]).unwrap();
        assert_eq!(good, vec![vec![2, 3]]);
        assert_eq!(eliminate(&a, &[vec![2, 3, 6]]), Err(Error::InconsistentSystem));
    }

    #[test]
    fn csa_matrix_worked_example() {
        let m = CsaDecodeMatrix::build(f(5), &[1], &[2, 3], 1).unwrap();
        assert_eq!(m.matrix().row(0), &[2, 1]);
        assert_eq!(m.matrix().row(1), &[4, 1]);
    }

    #[test]
    fn csa_matrix_with_two_noise_columns() {
        let m = CsaDecodeMatrix::build(f(7), &[1], &[2, 3, 4], 2).unwrap();
        assert_eq!(m.matrix().row(0), &[5, 1, 2]);
        assert_eq!(m.matrix().row(1), &[2, 1, 3]);
        assert_eq!(m.matrix().row(2), &[3, 1, 4]);
    }

    #[test]
    fn csa_matrix_rejects_pole_collision() {
        // alpha = -f makes 1/(f+alpha) undefined; the builder must say so.
        let err = CsaDecodeMatrix::build(f(5), &[1], &[4, 2], 1).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)), "{err}");
    }

    #[test]
    fn csa_matrix_rejects_duplicates_and_bad_shape() {
        assert!(CsaDecodeMatrix::build(f(11), &[1, 1], &[2, 3, 4], 1).is_err());
        assert!(CsaDecodeMatrix::build(f(11), &[1], &[2, 2, 3], 2).is_err());
        assert!(CsaDecodeMatrix::build(f(11), &[1], &[2, 3], 2).is_err());
    }

    #[test]
    fn csa_matrix_never_singular_over_random_valid_draws() {
        // Ten thousand random (f, alpha) draws across several small fields;
        // construction must always succeed, i.e. the matrix is invertible.
        let mut state = 0xABCDEF12345u64;
        let mut draw = |bound: u64| {
            state = state.wrapping_add(0x9E3779B97F4A7C15);
            keyed_uniform(state, [0, 0, 0, 0], bound)
        };
        let fields = [f(11), f(13), f(101), f(257)];
        let mut trials = 0;
        while trials < 10_000 {
            let field = fields[draw(4) as usize];
            let q = field.order();
            let n = 2 + draw(4) as usize; // N in 2..=5
            let x_total = draw(n as u64 - 1) as usize + 1; // at least one secret
            let s = n - x_total;
            if s == 0 {
                continue;
            }
            let mut pool: Vec<u64> = Vec::new();
            while pool.len() < n + s {
                let v = draw(q);
                if !pool.contains(&v) {
                    pool.push(v);
                }
            }
            let f_consts: Vec<u64> = pool[..s].to_vec();
            let alphas: Vec<u64> = pool[s..]
                .iter()
                .copied()
                .filter(|&a| f_consts.iter().all(|&fc| (a + fc) % q != 0))
                .collect();
            if alphas.len() < n {
                continue;
            }
            CsaDecodeMatrix::build(field, &f_consts, &alphas[..n], x_total)
                .expect("valid points must give an invertible matrix");
            trials += 1;
        }
    }

    proptest! {
        #[test]
        fn solve_inverts_matvec(seed in any::<u64>(), n in 1usize..6) {
            let field = f(101);
            let q = field.order();
            let mut a = Matrix::zero(field, n, n);
            let mut x = Vec::with_capacity(n);
            for i in 0..n {
                x.push(field.elem(keyed_uniform(seed, [1, i as u64, 0, 0], q)));
                for j in 0..n {
                    a.set(i, j, keyed_uniform(seed, [2, i as u64, j as u64, 0], q));
                }
            }
            let x_col = Matrix::from_rows(field, &x.iter().map(|v| vec![v.value()]).collect::<Vec<_>>()).unwrap();
            let b = a.matmul(&x_col).unwrap();
            let rhs: Vec<_> = (0..n).map(|i| b.get(i, 0)).collect();
            match solve_linear_system(&a, &rhs) {
                Ok(solved) => prop_assert_eq!(solved, x),
                Err(Error::SingularSystem) => {} // a genuinely singular draw
                Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
            }
        }

        #[test]
        fn matmul_is_associative(seed in any::<u64>()) {
            let field = f(11);
            let q = field.order();
            let gen = |tag: u64, r: usize, c: usize| {
                let mut m = Matrix::zero(field, r, c);
                for i in 0..r {
                    for j in 0..c {
                        m.set(i, j, keyed_uniform(seed, [tag, i as u64, j as u64, 0], q));
                    }
                }
                m
            };
            let a = gen(1, 2, 3);
            let b = gen(2, 3, 2);
            let c = gen(3, 2, 2);
            let lhs = a.matmul(&b).unwrap().matmul(&c).unwrap();
            let rhs = a.matmul(&b.matmul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
