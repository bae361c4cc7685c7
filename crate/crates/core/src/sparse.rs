//! Compressed sparse row storage for complex matrices.
//!
//! Only the handful of operations the operator assembly needs are provided:
//! linear combinations, products, Kronecker products, adjoints and the
//! max-norm distances the symmetry checks are phrased in.

use ndarray::{Array1, Array2};
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T: Real> {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<Complex<T>>,
}

impl<T: Real> SparseMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal((0..n).map(|_| Complex::one()))
    }

    pub fn from_diagonal<I: IntoIterator<Item = Complex<T>>>(diag: I) -> Self {
        let values: Vec<Complex<T>> = diag.into_iter().collect();
        let n = values.len();
        Self::from_triplets(n, n, values.into_iter().enumerate().map(|(i, v)| (i, i, v)))
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are
    /// summed; entries that sum to exactly zero are dropped.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Complex<T>)>,
    {
        let mut rows: Vec<Vec<(usize, Complex<T>)>> = vec![Vec::new(); nrows];
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            rows[r].push((c, v));
        }
        let mut out = Self::zeros(nrows, ncols);
        out.indptr.clear();
        out.indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let mut iter = row.into_iter().peekable();
            while let Some((c, mut v)) = iter.next() {
                while let Some(&(c2, v2)) = iter.peek() {
                    if c2 != c {
                        break;
                    }
                    v = v + v2;
                    iter.next();
                }
                if !v.is_zero() {
                    out.indices.push(c);
                    out.values.push(v);
                }
            }
            out.indptr.push(out.indices.len());
        }
        out
    }

    /// Converts a dense matrix, keeping exactly nonzero entries.
    pub fn from_dense(dense: &Array2<Complex<T>>) -> Self {
        let (nrows, ncols) = dense.dim();
        Self::from_triplets(
            nrows,
            ncols,
            dense
                .indexed_iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|((r, c), v)| (r, c, *v)),
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex<T>)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// Stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex<T>)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        let span = self.indptr[r]..self.indptr[r + 1];
        match self.indices[span.clone()].binary_search(&c) {
            Ok(pos) => self.values[span.start + pos],
            Err(_) => Complex::zero(),
        }
    }

    pub fn map_values<F: Fn(Complex<T>) -> Complex<T>>(&self, f: F) -> Self {
        Self::from_triplets(
            self.nrows,
            self.ncols,
            self.triplets().map(|(r, c, v)| (r, c, f(v))),
        )
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map_values(|v| v * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map_values(|v| v * s)
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map_values(|v| v.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.triplets().map(|(r, c, v)| (c, r, v)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.triplets().map(|(r, c, v)| (c, r, v.conj())),
        )
    }

    /// `alpha * self + beta * other`.
    pub fn axpby(&self, alpha: Complex<T>, other: &Self, beta: Complex<T>) -> Self {
        assert_eq!(
            (self.nrows, self.ncols),
            (other.nrows, other.ncols),
            "shape mismatch in linear combination"
        );
        Self::from_triplets(
            self.nrows,
            self.ncols,
            self.triplets()
                .map(|(r, c, v)| (r, c, v * alpha))
                .chain(other.triplets().map(|(r, c, v)| (r, c, v * beta))),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpby(Complex::one(), other, Complex::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpby(Complex::one(), other, -Complex::<T>::one())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "shape mismatch in product");
        let mut acc = vec![Complex::<T>::zero(); other.ncols];
        let mut touched = vec![false; other.ncols];
        let mut cols: Vec<usize> = Vec::new();
        let mut out = Self::zeros(self.nrows, other.ncols);
        out.indptr.clear();
        out.indptr.push(0);
        for r in 0..self.nrows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !touched[c] {
                        touched[c] = true;
                        cols.push(c);
                    }
                    acc[c] = acc[c] + a * b;
                }
            }
            cols.sort_unstable();
            for &c in &cols {
                if !acc[c].is_zero() {
                    out.indices.push(c);
                    out.values.push(acc[c]);
                }
                acc[c] = Complex::zero();
                touched[c] = false;
            }
            cols.clear();
            out.indptr.push(out.indices.len());
        }
        out
    }

    /// Kronecker product `self ⊗ other`; `self` indexes the slow factor.
    pub fn kron(&self, other: &Self) -> Self {
        let nrows = self.nrows * other.nrows;
        let ncols = self.ncols * other.ncols;
        Self::from_triplets(
            nrows,
            ncols,
            self.triplets().flat_map(|(r1, c1, v1)| {
                other.triplets().map(move |(r2, c2, v2)| {
                    (r1 * other.nrows + r2, c1 * other.ncols + c2, v1 * v2)
                })
            }),
        )
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(x.len(), self.ncols, "shape mismatch in matrix-vector product");
        (0..self.nrows)
            .map(|r| self.row(r).fold(Complex::zero(), |acc, (c, v)| acc + v * x[c]))
            .collect()
    }

    /// `y = self * x`, with `x` and `y` stored as columns of dense blocks.
    pub fn mul_block(&self, x: &Array2<Complex<T>>) -> Array2<Complex<T>> {
        assert_eq!(x.nrows(), self.ncols, "shape mismatch in block product");
        let mut y = Array2::zeros((self.nrows, x.ncols()));
        for r in 0..self.nrows {
            let mut out = y.row_mut(r);
            for (c, v) in self.row(r) {
                out.scaled_add(v, &x.row(c));
            }
        }
        y
    }

    pub fn to_dense(&self) -> Array2<Complex<T>> {
        let mut dense = Array2::zeros((self.nrows, self.ncols));
        for (r, c, v) in self.triplets() {
            dense[[r, c]] = v;
        }
        dense
    }

    pub fn diagonal(&self) -> Array1<Complex<T>> {
        let n = self.nrows.min(self.ncols);
        Array1::from_iter((0..n).map(|i| self.get(i, i)))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// Largest `|Re|` over all entries.
    pub fn max_abs_re(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.re.abs()))
    }

    /// Largest `|Im|` over all entries.
    pub fn max_abs_im(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.im.abs()))
    }

    /// `max |self - other|` over all entries.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.sub(other).max_abs()
    }
}
