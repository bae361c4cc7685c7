//! Scalar abstraction shared by every module.
//!
//! All assembly, symmetry and spectral code is written against [`Real`], so
//! the same routines run in `f32` and `f64`. Thresholds that the checks
//! compare against come from the scalar type as well: an identity that is
//! exact in rational arithmetic is declared to hold when its floating-point
//! residual is at most [`Real::exact_tol`].

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use ndarray::Array2;
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

use crate::error::{Error, Result};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Max-norm residual below which an exact identity is considered to hold.
    fn exact_tol() -> Self;

    /// Dense Hermitian eigendecomposition, eigenvalues ascending.
    ///
    /// Eigenvectors are returned as the columns of the second element when
    /// `vectors` is set.
    fn dense_eigh(
        matrix: &Array2<Complex<Self>>,
        vectors: bool,
    ) -> Result<(Vec<Self>, Option<Array2<Complex<Self>>>)>;

    /// Converts an `f64` literal. Every literal used by this crate is
    /// representable in both supported types, so this never fails.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_real {
    ($t:ty, $tol:expr) => {
        impl Real for $t {
            #[inline]
            fn exact_tol() -> Self {
                $tol
            }

            fn dense_eigh(
                matrix: &Array2<Complex<Self>>,
                vectors: bool,
            ) -> Result<(Vec<Self>, Option<Array2<Complex<Self>>>)> {
                let n = matrix.nrows();
                if matrix.ncols() != n {
                    return Err(Error::Dimension(format!(
                        "eigendecomposition of a {}x{} matrix",
                        n,
                        matrix.ncols()
                    )));
                }
                if n == 0 {
                    return Ok((Vec::new(), vectors.then(|| Array2::zeros((0, 0)))));
                }
                let m = faer::Mat::<Complex<$t>>::from_fn(n, n, |i, j| matrix[[i, j]]);
                if vectors {
                    let evd = m
                        .self_adjoint_eigen(faer::Side::Lower)
                        .map_err(|e| Error::Solver(format!("dense eigensolver: {e:?}")))?;
                    let s = evd.S();
                    let u = evd.U();
                    let values = (0..n).map(|i| s[i].re).collect();
                    let vecs = Array2::from_shape_fn((n, n), |(i, j)| u[(i, j)]);
                    Ok((values, Some(vecs)))
                } else {
                    let values = m
                        .self_adjoint_eigenvalues(faer::Side::Lower)
                        .map_err(|e| Error::Solver(format!("dense eigensolver: {e:?}")))?;
                    Ok((values, None))
                }
            }
        }
    };
}

impl_real!(f64, 1e-12);
impl_real!(f32, 1e-4);

/// Complex scalar over a [`Real`].
pub type Cplx<T> = Complex<T>;

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn ci<T: Real>(im: T) -> Complex<T> {
    Complex::new(T::zero(), im)
}
