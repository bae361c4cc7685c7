//! Involutions, antiunitary operators and the commutation residuals that
//! decide reality preservation and time-reversal symmetry.
//!
//! An involution `j` is stored as an index permutation followed by entrywise
//! conjugation, `j v = P conj(v)`. An antiunitary `θ` is stored as a unitary
//! matrix `U` with `θ v = U conj(v)`. In that form `θ A = A θ` becomes the
//! matrix identity `A U = U conj(A)`, and `θ² = U conj(U)`.

use ndarray::Array2;
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::operators::{pauli, HermitianOperator};
use crate::scalar::{cr, Real};
use crate::sparse::SparseMatrix;

/// Antilinear involution `v ↦ P conj(v)` for a self-inverse permutation `P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    perm: Vec<usize>,
}

impl Involution {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        for (i, &p) in perm.iter().enumerate() {
            if p >= n {
                return Err(Error::InvalidInvolution(format!(
                    "index {p} out of range for dimension {n}"
                )));
            }
            if perm[p] != i {
                return Err(Error::InvalidInvolution(format!(
                    "permutation does not square to the identity at index {i}"
                )));
            }
        }
        Ok(Self { perm })
    }

    /// Pure conjugation in the occupation basis.
    pub fn conjugation(dim: usize) -> Self {
        Self {
            perm: (0..dim).collect(),
        }
    }

    /// `x ↦ −x` on a grid of `grid_len` points, identity on the Fock factor.
    pub fn grid_reflection(grid_len: usize, fock_dim: usize) -> Self {
        let perm = (0..grid_len * fock_dim)
            .map(|i| {
                let (g, f) = (i / fock_dim, i % fock_dim);
                (grid_len - 1 - g) * fock_dim + f
            })
            .collect();
        Self { perm }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Permutation matrix with `(P v)[perm[i]] = v[i]`.
    pub fn matrix<T: Real>(&self) -> SparseMatrix<T> {
        SparseMatrix::from_triplets(
            self.dim(),
            self.dim(),
            self.perm.iter().enumerate().map(|(i, &p)| (p, i, Complex::one())),
        )
    }

    pub fn apply<T: Real>(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![Complex::zero(); v.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            out[p] = v[i].conj();
        }
        out
    }

    /// `max |j φ − φ|`; zero exactly for j-real vectors.
    pub fn reality_defect<T: Real>(&self, v: &[Complex<T>]) -> T {
        self.apply(v)
            .iter()
            .zip(v)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }
}

/// Antiunitary `θ v = U conj(v)`.
#[derive(Clone, Debug)]
pub struct AntiunitaryOperator<T: Real> {
    u: SparseMatrix<T>,
    sign: i8,
}

impl<T: Real> AntiunitaryOperator<T> {
    /// Validates unitarity and that `θ² = U conj(U) = ±1`.
    pub fn new(u: SparseMatrix<T>) -> Result<Self> {
        let n = u.nrows();
        if !u.is_square() {
            return Err(Error::Antiunitary("U must be square".into()));
        }
        let id = SparseMatrix::identity(n);
        let unitarity = u.adjoint().matmul(&u).max_abs_diff(&id);
        if !(unitarity <= T::exact_tol()) {
            return Err(Error::Antiunitary(format!(
                "U is not unitary: max |U†U − 1| = {unitarity:e}"
            )));
        }
        let square = u.matmul(&u.conj());
        let plus = square.max_abs_diff(&id);
        let minus = square.add(&id).max_abs();
        let sign = if plus <= T::exact_tol() {
            1
        } else if minus <= T::exact_tol() {
            -1
        } else {
            return Err(Error::Antiunitary(format!(
                "θ² is not ±1: distances {plus:e} (to +1), {minus:e} (to −1)"
            )));
        };
        Ok(Self { u, sign })
    }

    pub fn u(&self) -> &SparseMatrix<T> {
        &self.u
    }

    /// `s` in `θ² = s·1`.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let conj: Vec<Complex<T>> = v.iter().map(|x| x.conj()).collect();
        self.u.mul_vec(&conj)
    }

    /// `θ` applied to every column of a dense block.
    pub fn apply_block(&self, v: &Array2<Complex<T>>) -> Array2<Complex<T>> {
        self.u.mul_block(&v.mapv(|x| x.conj()))
    }
}

/// `θ = σ₂^{⊗N} ⊗ j`, the time reversal for `N` spin-1/2 factors.
pub fn make_theta<T: Real>(j: &Involution, spins: usize) -> Result<AntiunitaryOperator<T>> {
    if spins == 0 {
        return Err(Error::Precondition("at least one spin factor is required".into()));
    }
    let sigma2 = &pauli::<T>()[1];
    let mut u = SparseMatrix::identity(1);
    for _ in 0..spins {
        u = u.kron(sigma2);
    }
    let theta = AntiunitaryOperator::new(u.kron(&j.matrix()))?;
    let expected = if spins % 2 == 0 { 1 } else { -1 };
    if theta.sign != expected {
        return Err(Error::Antiunitary(format!(
            "θ² sign {} differs from (−1)^{spins}",
            theta.sign
        )));
    }
    Ok(theta)
}

/// `max |A P − P conj(A)|`, the matrix form of `‖a j − j a‖`.
pub fn reality_residual<T: Real>(a: &SparseMatrix<T>, j: &Involution) -> Result<T> {
    if a.nrows() != j.dim() || a.ncols() != j.dim() {
        return Err(Error::Dimension(format!(
            "operator of size {}x{} against an involution of dimension {}",
            a.nrows(),
            a.ncols(),
            j.dim()
        )));
    }
    let p = j.matrix();
    Ok(a.matmul(&p).max_abs_diff(&p.matmul(&a.conj())))
}

/// Residual and the membership decision at the exact-identity threshold.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Membership {
    pub residual: f64,
    pub threshold: f64,
    pub member: bool,
}

pub fn is_reality_preserving<T: Real>(a: &SparseMatrix<T>, j: &Involution) -> Result<Membership> {
    let residual = reality_residual(a, j)?;
    Ok(Membership {
        residual: residual.to_f64_lossy(),
        threshold: T::exact_tol().to_f64_lossy(),
        member: residual <= T::exact_tol(),
    })
}

/// `max |H U − U conj(H)|`.
pub fn check_commutes<T: Real>(h: &HermitianOperator<T>, theta: &AntiunitaryOperator<T>) -> Result<T> {
    commutation_residual(h.matrix(), theta)
}

pub fn commutation_residual<T: Real>(
    h: &SparseMatrix<T>,
    theta: &AntiunitaryOperator<T>,
) -> Result<T> {
    if h.nrows() != theta.dim() {
        return Err(Error::Dimension(format!(
            "operator of dimension {} against θ of dimension {}",
            h.nrows(),
            theta.dim()
        )));
    }
    Ok(h.matmul(theta.u()).max_abs_diff(&theta.u().matmul(&h.conj())))
}

/// Dense counterpart of [`commutation_residual`], for functions of `H`.
pub fn commutation_residual_dense<T: Real>(
    f: &Array2<Complex<T>>,
    theta: &AntiunitaryOperator<T>,
) -> Result<T> {
    let n = f.nrows();
    if n != theta.dim() || f.ncols() != n {
        return Err(Error::Dimension(format!(
            "{}x{} matrix against θ of dimension {}",
            n,
            f.ncols(),
            theta.dim()
        )));
    }
    // (F U)[:, c] = Σ_k F[:, k] U[k, c]; (U conj F)[r, :] = Σ_k U[r, k] conj(F[k, :]).
    let mut fu = Array2::<Complex<T>>::zeros((n, n));
    let mut ucf = Array2::<Complex<T>>::zeros((n, n));
    for (r, c, v) in theta.u().triplets() {
        fu.column_mut(c).scaled_add(v, &f.column(r));
        let conj_row = f.row(c).mapv(|x| x.conj());
        ucf.row_mut(r).scaled_add(v, &conj_row);
    }
    Ok(fu
        .iter()
        .zip(ucf.iter())
        .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm())))
}

/// Outcome of checking that real combinations and products stay in `𝔄_j`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ClosureOutcome {
    pub combination_residual: f64,
    pub product_residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Checks `α a + β b` and `a b` for reality preservation.
///
/// The coefficients are complex so that the real-linearity of `𝔄_j` can be
/// probed: a nonreal coefficient generally breaks membership.
pub fn algebra_closure_test<T: Real>(
    a: &SparseMatrix<T>,
    b: &SparseMatrix<T>,
    alpha: Complex<T>,
    beta: Complex<T>,
    j: &Involution,
) -> Result<ClosureOutcome> {
    for (name, op) in [("a", a), ("b", b)] {
        let r = reality_residual(op, j)?;
        if !(r <= T::exact_tol()) {
            return Err(Error::Precondition(format!(
                "{name} is not reality preserving (residual {r:e})"
            )));
        }
    }
    let combination = reality_residual(&a.axpby(alpha, b, beta), j)?;
    let product = reality_residual(&a.matmul(b), j)?;
    let tol = T::exact_tol();
    Ok(ClosureOutcome {
        combination_residual: combination.to_f64_lossy(),
        product_residual: product.to_f64_lossy(),
        threshold: tol.to_f64_lossy(),
        pass: combination <= tol && product <= tol,
    })
}

/// `H + strength·(σ₃ ⊗ 1)`: breaks time reversal, used as a negative control.
pub fn sigma3_probe<T: Real>(h: &HermitianOperator<T>, strength: T) -> Result<HermitianOperator<T>> {
    let n = h.dim();
    if n % 2 != 0 {
        return Err(Error::Dimension(format!(
            "σ₃ probe needs an even dimension, got {n}"
        )));
    }
    let half = n / 2;
    let probe = SparseMatrix::from_diagonal(
        (0..n).map(|i| cr(if i < half { strength } else { -strength })),
    );
    HermitianOperator::new(h.matrix().add(&probe), h.space())
}
