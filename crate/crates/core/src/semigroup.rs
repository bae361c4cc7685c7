//! Real functions of a Hermitian operator and the identities they satisfy
//! under time reversal.
//!
//! `f(H)` is formed from the full spectral decomposition, `V f(Λ) V†`. For
//! the fixed-momentum Hamiltonian the time-reversal symmetry forces the
//! spin-resolved vacuum expectation `⟨x⊗Ω, f(H) x⊗Ω⟩` to be proportional to
//! `‖x‖²`, and the same holds with `Ω` replaced by any `j`-real Fock vector.

use ndarray::{Array1, Array2};
use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{HermitianOperator, SpaceTag};
use crate::scalar::{cr, Real};
use crate::spectral::{diagonalize_dense, Eigenpairs, SpectralResult, DENSE_LIMIT};
use crate::symmetry::{check_commutes, commutation_residual_dense, make_theta, AntiunitaryOperator, Involution};

/// The supported family of real functions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionTag<T> {
    /// `e^{−tλ}`, `t ≥ 0`.
    ExpNegT { t: T },
    /// `(λ + c)^{−1}`, requires `H + c` positive definite.
    Resolvent { shift: T },
    /// `1` for `λ < threshold`, else `0`.
    IndicatorBelow { threshold: T },
}

impl<T: Real> FunctionTag<T> {
    pub fn eval(&self, lambda: T) -> T {
        match *self {
            FunctionTag::ExpNegT { t } => (-t * lambda).exp(),
            FunctionTag::Resolvent { shift } => (lambda + shift).recip(),
            FunctionTag::IndicatorBelow { threshold } => {
                if lambda < threshold {
                    T::one()
                } else {
                    T::zero()
                }
            }
        }
    }

    fn validate(&self, lowest: Option<T>) -> Result<()> {
        match *self {
            FunctionTag::ExpNegT { t } if !(t >= T::zero()) => Err(Error::Precondition(format!(
                "semigroup parameter t = {t} must be non-negative"
            ))),
            FunctionTag::Resolvent { shift } => match lowest {
                Some(l) if !(l + shift > T::lit(1e-10)) => Err(Error::Precondition(format!(
                    "resolvent shift {shift} leaves H + c singular (lowest eigenvalue {l})"
                ))),
                _ => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FunctionOfOperator<T: Real> {
    pub tag: FunctionTag<T>,
    pub matrix: Array2<Complex<T>>,
}

impl<T: Real> FunctionOfOperator<T> {
    /// `max |F − F†|`.
    pub fn hermiticity_defect(&self) -> T {
        let m = &self.matrix;
        let mut worst = T::zero();
        for ((r, c), v) in m.indexed_iter() {
            worst = worst.max((*v - m[[c, r]].conj()).norm());
        }
        worst
    }

    /// `max |F H − H F|`.
    pub fn commutator_with(&self, h: &HermitianOperator<T>) -> T {
        let hd = h.matrix().to_dense();
        let d = self.matrix.dot(&hd) - hd.dot(&self.matrix);
        d.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }
}

/// `f(H)` for a Hermitian operator of at most [`DENSE_LIMIT`] rows.
pub fn apply_function<T: Real>(h: &HermitianOperator<T>, tag: FunctionTag<T>) -> Result<FunctionOfOperator<T>> {
    if h.dim() > DENSE_LIMIT {
        return Err(Error::Precondition(format!(
            "functional calculus needs a dense decomposition; dimension {} exceeds {DENSE_LIMIT}",
            h.dim()
        )));
    }
    if let FunctionTag::ExpNegT { t } = tag {
        tag.validate(None)?;
        if t == T::zero() {
            return Ok(FunctionOfOperator {
                tag,
                matrix: Array2::from_diag(&Array1::from_elem(h.dim(), cr(T::one()))),
            });
        }
    }
    let spectrum = diagonalize_dense(h, Eigenpairs::All)?;
    apply_function_from(&spectrum, tag)
}

/// `f(H)` from a precomputed full decomposition.
pub fn apply_function_from<T: Real>(
    spectrum: &SpectralResult<T>,
    tag: FunctionTag<T>,
) -> Result<FunctionOfOperator<T>> {
    tag.validate(spectrum.eigenvalues.first().copied())?;
    let v = &spectrum.eigenvectors;
    let mut scaled = v.clone();
    for (mut col, &lambda) in scaled.columns_mut().into_iter().zip(&spectrum.eigenvalues) {
        let f = cr(tag.eval(lambda));
        col.mapv_inplace(|x| x * f);
    }
    let v_adj = v.t().mapv(|x| x.conj());
    let matrix = scaled.dot(&v_adj);
    let out = FunctionOfOperator { tag, matrix };
    let defect = out.hermiticity_defect();
    if !(defect <= T::exact_tol() * T::lit(10.0)) {
        return Err(Error::Solver(format!(
            "f(H) is not Hermitian to 1e-11: defect {defect:e}"
        )));
    }
    Ok(out)
}

fn require_commutes<T: Real>(h: &HermitianOperator<T>, theta: &AntiunitaryOperator<T>) -> Result<()> {
    let r = check_commutes(h, theta)?;
    if !(r <= T::exact_tol()) {
        return Err(Error::Precondition(format!(
            "H does not commute with θ (residual {r:e})"
        )));
    }
    Ok(())
}

/// `max |f(H) U − U conj(f(H))|`.
pub fn theta_function_commutes<T: Real>(
    h: &HermitianOperator<T>,
    theta: &AntiunitaryOperator<T>,
    tag: FunctionTag<T>,
) -> Result<T> {
    require_commutes(h, theta)?;
    let f = apply_function(h, tag)?;
    commutation_residual_dense(&f.matrix, theta)
}

/// Spin-resolved vacuum expectations of `e^{−tH(P)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HiroshimaSpohn {
    pub t: f64,
    /// `|⟨u₁, e^{−tH} u₂⟩|`.
    pub offdiag: f64,
    /// `|⟨u₁, e^{−tH} u₁⟩ − ⟨u₂, e^{−tH} u₂⟩|`.
    pub diag_gap: f64,
    /// The common diagonal value `a(t)`.
    pub a_t: f64,
    /// `max_x |⟨x⊗Ω, e^{−tH} x⊗Ω⟩ − a(t)‖x‖²|` over the random spinors.
    pub max_spinor_gap: f64,
    pub spinors_tested: usize,
}

fn fock_dim_of(space: SpaceTag) -> Result<usize> {
    match space {
        SpaceTag::SpinFock { fock_dim } => Ok(fock_dim),
        other => Err(Error::Precondition(format!(
            "expected an operator on spin⊗fock, got {other}"
        ))),
    }
}

fn random_spinor<T: Real>(rng: &mut ChaCha8Rng) -> [Complex<T>; 2] {
    let mut draw = || T::lit(rng.random_range(-1.0..1.0));
    [Complex::new(draw(), draw()), Complex::new(draw(), draw())]
}

/// `(x₁ φ, x₂ φ)`.
fn spinor_product<T: Real>(x: &[Complex<T>; 2], phi: &[Complex<T>]) -> Array1<Complex<T>> {
    let d = phi.len();
    Array1::from_shape_fn(2 * d, |i| x[i / d] * phi[i % d])
}

fn quadratic_form<T: Real>(f: &Array2<Complex<T>>, v: &Array1<Complex<T>>) -> Complex<T> {
    let fv = f.dot(v);
    v.iter()
        .zip(fv.iter())
        .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
}

/// Number of random spinors drawn by the spinor checks.
pub const SPINOR_SAMPLES: usize = 10;

pub fn hiroshima_spohn_check<T: Real>(h: &HermitianOperator<T>, t: T, seed: u64) -> Result<HiroshimaSpohn> {
    let fock_dim = fock_dim_of(h.space())?;
    let f = apply_function(h, FunctionTag::ExpNegT { t })?;
    hiroshima_spohn_from(&f, fock_dim, t, seed)
}

/// Same as [`hiroshima_spohn_check`] from an already computed `e^{−tH}`.
pub fn hiroshima_spohn_from<T: Real>(
    f: &FunctionOfOperator<T>,
    fock_dim: usize,
    t: T,
    seed: u64,
) -> Result<HiroshimaSpohn> {
    let m = &f.matrix;
    let (u1, u2) = (0, fock_dim);
    let d11 = m[[u1, u1]];
    let d22 = m[[u2, u2]];
    let a_t = d11.re;
    let mut vacuum = vec![Complex::<T>::zero(); fock_dim];
    vacuum[0] = cr(T::one());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    for _ in 0..SPINOR_SAMPLES {
        let x = random_spinor::<T>(&mut rng);
        let norm2 = x[0].norm_sqr() + x[1].norm_sqr();
        let value = quadratic_form(m, &spinor_product(&x, &vacuum));
        worst = worst.max((value - cr(a_t * norm2)).norm());
    }
    Ok(HiroshimaSpohn {
        t: t.to_f64_lossy(),
        offdiag: m[[u1, u2]].norm().to_f64_lossy(),
        diag_gap: (d11 - d22).norm().to_f64_lossy(),
        a_t: a_t.to_f64_lossy(),
        max_spinor_gap: worst.to_f64_lossy(),
        spinors_tested: SPINOR_SAMPLES,
    })
}

/// Gaps in `⟨x⊗φ, f(H) x⊗φ⟩ = ‖x‖² ⟨e₁⊗φ, f(H) e₁⊗φ⟩ = ‖x‖² ⟨e₂⊗φ, f(H) e₂⊗φ⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JrealGaps {
    /// `max_x |⟨x⊗φ, f x⊗φ⟩ − ‖x‖² ⟨e₁⊗φ, f e₁⊗φ⟩|`.
    pub spinor_gap: f64,
    /// `|⟨e₁⊗φ, f e₁⊗φ⟩ − ⟨e₂⊗φ, f e₂⊗φ⟩|`.
    pub diag_gap: f64,
    /// `|⟨e₁⊗φ, f e₂⊗φ⟩|`.
    pub offdiag: f64,
    pub value: f64,
}

pub fn jreal_generalization_check<T: Real>(
    h: &HermitianOperator<T>,
    j: &Involution,
    tag: FunctionTag<T>,
    phi: &[Complex<T>],
    seed: u64,
) -> Result<JrealGaps> {
    let fock_dim = fock_dim_of(h.space())?;
    if phi.len() != fock_dim || j.dim() != fock_dim {
        return Err(Error::Dimension(format!(
            "φ has length {} and j dimension {} on a Fock space of dimension {fock_dim}",
            phi.len(),
            j.dim()
        )));
    }
    let defect = j.reality_defect(phi);
    if !(defect <= T::exact_tol()) {
        return Err(Error::Precondition(format!(
            "φ is not j-real: max |jφ − φ| = {defect:e}"
        )));
    }
    let theta = make_theta(j, 1)?;
    require_commutes(h, &theta)?;
    let f = apply_function(h, tag)?;
    jreal_gaps_from(&f, phi, seed)
}

/// The gaps of [`jreal_generalization_check`] from an already computed
/// `f(H)` on `ℂ² ⊗ Fock`. `φ` is taken to be `j`-real.
pub fn jreal_gaps_from<T: Real>(f: &FunctionOfOperator<T>, phi: &[Complex<T>], seed: u64) -> Result<JrealGaps> {
    if f.matrix.nrows() != 2 * phi.len() {
        return Err(Error::Dimension(format!(
            "f(H) has {} rows; expected twice the length {} of φ",
            f.matrix.nrows(),
            phi.len()
        )));
    }
    let e1 = [cr(T::one()), Complex::zero()];
    let e2 = [Complex::zero(), cr(T::one())];
    let v1 = spinor_product(&e1, phi);
    let v2 = spinor_product(&e2, phi);
    let g11 = quadratic_form(&f.matrix, &v1);
    let g22 = quadratic_form(&f.matrix, &v2);
    let g12 = v1
        .iter()
        .zip(f.matrix.dot(&v2).iter())
        .fold(Complex::<T>::zero(), |acc, (a, b)| acc + a.conj() * b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    for _ in 0..SPINOR_SAMPLES {
        let x = random_spinor::<T>(&mut rng);
        let norm2 = x[0].norm_sqr() + x[1].norm_sqr();
        let value = quadratic_form(&f.matrix, &spinor_product(&x, phi));
        worst = worst.max((value - g11 * norm2).norm());
    }
    Ok(JrealGaps {
        spinor_gap: worst.to_f64_lossy(),
        diag_gap: (g11 - g22).norm().to_f64_lossy(),
        offdiag: g12.norm().to_f64_lossy(),
        value: g11.re.to_f64_lossy(),
    })
}

/// `max |e^{−(s+t)H} − e^{−sH} e^{−tH}|`.
pub fn semigroup_defect<T: Real>(h: &HermitianOperator<T>, s: T, t: T) -> Result<T> {
    semigroup_defect_from(&diagonalize_dense(h, Eigenpairs::All)?, s, t)
}

pub fn semigroup_defect_from<T: Real>(spectrum: &SpectralResult<T>, s: T, t: T) -> Result<T> {
    let joint = apply_function_from(spectrum, FunctionTag::ExpNegT { t: s + t })?;
    let fs = apply_function_from(spectrum, FunctionTag::ExpNegT { t: s })?;
    let ft = apply_function_from(spectrum, FunctionTag::ExpNegT { t })?;
    let product = fs.matrix.dot(&ft.matrix);
    Ok(joint
        .matrix
        .iter()
        .zip(product.iter())
        .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::SparseMatrix;

    fn diag(values: &[f64]) -> HermitianOperator<f64> {
        HermitianOperator::plain(SparseMatrix::from_diagonal(values.iter().map(|&x| cr(x)))).unwrap()
    }

    #[test]
    fn exp_at_zero_is_identity() {
        let h = diag(&[0.3, -1.0, 2.0]);
        let f = apply_function(&h, FunctionTag::ExpNegT { t: 0.0 }).unwrap();
        assert_eq!(f.matrix, Array2::from_diag(&Array1::from_elem(3, cr(1.0))));
    }

    #[test]
    fn exp_of_diagonal() {
        let h = diag(&[0.0, 2.0]);
        let f = apply_function(&h, FunctionTag::ExpNegT { t: 1.0 }).unwrap();
        assert!((f.matrix[[0, 0]] - cr(1.0)).norm() < 1e-15);
        assert!((f.matrix[[1, 1]] - cr((-2.0f64).exp())).norm() < 1e-15);
        assert!(f.matrix[[0, 1]].norm() < 1e-15);
    }

    #[test]
    fn singular_resolvent_rejected() {
        let h = diag(&[-1.0, 2.0]);
        assert!(matches!(
            apply_function(&h, FunctionTag::Resolvent { shift: 1.0 }),
            Err(Error::Precondition(_))
        ));
        assert!(apply_function(&h, FunctionTag::Resolvent { shift: 1.5 }).is_ok());
        assert!(apply_function(&h, FunctionTag::ExpNegT { t: -1.0 }).is_err());
    }

    #[test]
    fn indicator_projects() {
        let h = diag(&[0.0, 0.0, 1.0, 3.0]);
        let f = apply_function(&h, FunctionTag::IndicatorBelow { threshold: 0.5 }).unwrap();
        let trace: f64 = (0..4).map(|i| f.matrix[[i, i]].re).sum();
        assert!((trace - 2.0).abs() < 1e-14);
    }
}
