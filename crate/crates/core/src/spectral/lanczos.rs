//! Block Lanczos with full reorthogonalization.
//!
//! Kramers partners are exactly degenerate, so a single-vector Krylov space
//! only ever sees one vector of each pair. A block of two starting vectors
//! resolves both. Every new block is orthogonalized twice against the whole
//! basis, which keeps the projected matrix block tridiagonal to rounding and
//! rules out ghost eigenvalues.

use ndarray::{s, Array1, Array2, ArrayView1, Axis};
use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::SparseMatrix;

#[derive(Clone, Debug)]
pub struct LanczosConfig {
    /// Vectors per block; at least 2.
    pub block_size: usize,
    /// Largest Krylov basis before giving up.
    pub max_basis: usize,
    /// Convergence threshold on the Ritz residual, relative to `1 + |θ|`.
    pub tol: f64,
    /// Ritz values are recomputed every this many blocks.
    pub check_every: usize,
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self {
            block_size: 2,
            max_basis: 2000,
            tol: 1e-11,
            check_every: 10,
            seed: 0x5eed,
        }
    }
}

pub(crate) struct LanczosOutput<T: Real> {
    pub values: Vec<T>,
    pub vectors: Array2<Complex<T>>,
}

fn dotc<T: Real>(a: ArrayView1<Complex<T>>, b: ArrayView1<Complex<T>>) -> Complex<T> {
    a.iter()
        .zip(b.iter())
        .fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y)
}

fn norm<T: Real>(a: ArrayView1<Complex<T>>) -> T {
    a.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt()
}

/// Removes the components of `w` along the first `used` columns of `basis`
/// (stored as rows of `basis` for locality), twice.
fn orthogonalize<T: Real>(basis: &Array2<Complex<T>>, used: usize, w: &mut Array1<Complex<T>>) {
    for _ in 0..2 {
        for q in basis.rows().into_iter().take(used) {
            let c = dotc(q, w.view());
            if !c.is_zero() {
                w.scaled_add(-c, &q);
            }
        }
    }
}

/// Lowest `k` eigenpairs of a Hermitian sparse matrix.
pub(crate) fn block_lanczos<T: Real>(
    h: &SparseMatrix<T>,
    k: usize,
    config: &LanczosConfig,
) -> Result<LanczosOutput<T>> {
    let n = h.nrows();
    let p = config.block_size;
    if p < 2 {
        return Err(Error::Precondition(format!(
            "block size {p} is below the minimum of 2"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::Precondition(format!(
            "cannot compute {k} eigenpairs of a {n}-dimensional operator"
        )));
    }
    let max_basis = config.max_basis.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let scale = h.max_abs().max(T::one()) * T::from_usize(n).unwrap();
    let breakdown = T::epsilon().sqrt() * T::epsilon().sqrt() * T::lit(1e3) * scale;

    // Krylov basis vectors stored as rows.
    let mut basis = Array2::<Complex<T>>::zeros((max_basis + p, n));
    // Projected matrix, Hermitian block tridiagonal.
    let mut proj = Array2::<Complex<T>>::zeros((max_basis + p, max_basis + p));
    let mut used = 0usize;

    let random_vector = |rng: &mut ChaCha8Rng| -> Array1<Complex<T>> {
        Array1::from_shape_fn(n, |_| {
            Complex::new(
                T::lit(rng.random_range(-1.0..1.0)),
                T::lit(rng.random_range(-1.0..1.0)),
            )
        })
    };

    // Orthonormal starting block.
    while used < p.min(n) {
        let mut w = random_vector(&mut rng);
        orthogonalize(&basis, used, &mut w);
        let nw = norm(w.view());
        if nw > T::zero() {
            basis.row_mut(used).assign(&w.mapv(|x| x / nw));
            used += 1;
        }
    }
    let mut block_start = 0usize;
    let mut blocks = 0usize;
    let mut next_check = config.check_every.max(1);

    loop {
        let block_end = used;
        let width = block_end - block_start;
        let v = basis.slice(s![block_start..block_end, ..]).t().to_owned();
        let hv = h.mul_block(&v);
        for a in 0..width {
            for b in 0..width {
                proj[[block_start + a, block_start + b]] =
                    dotc(basis.row(block_start + a), hv.column(b));
            }
        }

        // Next block: H V_j orthogonalized against everything so far.
        let next_start = used;
        if used < max_basis {
            for b in 0..width {
                let mut w = hv.column(b).to_owned();
                orthogonalize(&basis, used, &mut w);
                let mut nw = norm(w.view());
                if nw <= breakdown {
                    // Invariant subspace in this direction; continue the
                    // basis with a fresh random vector.
                    w = random_vector(&mut rng);
                    orthogonalize(&basis, used, &mut w);
                    nw = norm(w.view());
                    if nw <= breakdown {
                        continue;
                    }
                }
                basis.row_mut(used).assign(&w.mapv(|x| x / nw));
                used += 1;
            }
        }
        for row in next_start..used {
            for b in 0..width {
                let c = dotc(basis.row(row), hv.column(b));
                proj[[row, block_start + b]] = c;
                proj[[block_start + b, row]] = c.conj();
            }
        }
        blocks += 1;

        let done_growing = used == next_start || used >= max_basis;
        let m = block_end;
        if m >= k && (blocks >= next_check || done_growing) {
            // Checks thin out geometrically; each costs a dense solve of size m.
            next_check = blocks + config.check_every.max(blocks / 4);
            let t = proj.slice(s![..m, ..m]).to_owned();
            let (theta, svecs) = T::dense_eigh(&t, true)?;
            let svecs = svecs.expect("requested eigenvectors");
            // H Q s − θ Q s = Q_next C s_tail, C the coupling to the next block.
            let coupling = proj.slice(s![next_start..used, block_start..block_end]);
            let converged = (0..k).all(|i| {
                let tail = svecs.slice(s![block_start..block_end, i]);
                let r = coupling
                    .rows()
                    .into_iter()
                    .map(|row| {
                        row.iter()
                            .zip(tail.iter())
                            .fold(Complex::<T>::zero(), |acc, (c, x)| acc + *c * *x)
                            .norm_sqr()
                    })
                    .sum::<T>()
                    .sqrt();
                r.to_f64_lossy() <= config.tol * (1.0 + theta[i].abs().to_f64_lossy())
            });
            let exact = m == n;
            if converged || exact || (done_growing && block_end == used) {
                let mut vectors = Array2::<Complex<T>>::zeros((n, k));
                for (row, qrow) in basis.slice(s![..m, ..]).axis_iter(Axis(0)).enumerate() {
                    for c in 0..k {
                        let coeff = svecs[[row, c]];
                        if !coeff.is_zero() {
                            vectors.column_mut(c).scaled_add(coeff, &qrow);
                        }
                    }
                }
                let values = theta[..k].to_vec();
                if !(converged || exact) {
                    // Basis exhausted: the next block was never formed, so
                    // measure the residuals directly.
                    let hx = h.mul_block(&vectors);
                    for (i, &lambda) in values.iter().enumerate() {
                        let r = norm((&hx.column(i) - &vectors.column(i).mapv(|x| x * lambda)).view());
                        if r.to_f64_lossy() > config.tol * (1.0 + lambda.abs().to_f64_lossy()) {
                            return Err(Error::Solver(format!(
                                "block Lanczos did not converge {k} eigenpairs within a basis of {used} vectors (residual {r:e} at eigenvalue {lambda})"
                            )));
                        }
                    }
                }
                return Ok(LanczosOutput { values, vectors });
            }
        }
        block_start = block_end;
    }
}
