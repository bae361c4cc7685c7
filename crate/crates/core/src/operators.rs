//! Hermitian operators on the truncated spaces and the Hamiltonian builders.
//!
//! Index layouts:
//!
//! * `Fock`: the occupation basis of [`FockBasis`].
//! * `SpinFock`: `ℂ² ⊗ Fock`, spin-up block first, so a state is
//!   `(ψ_up, ψ_down)`.
//! * `SpinGridFock`: `ℂ² ⊗ grid ⊗ Fock`, spin block outermost, grid point
//!   next, photon occupation fastest.
//! * `NSpinFock`: `(ℂ²)^{⊗N} ⊗ Fock`, spin 1 most significant, Fock last.

use std::fmt;
use std::io::Write;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fock::{cross, norm, FockBasis, ModeSet, Vec3};
use crate::scalar::{ci, cr, Real};
use crate::sparse::SparseMatrix;

/// Which space an operator acts on, with the factor dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceTag {
    Fock { fock_dim: usize },
    SpinFock { fock_dim: usize },
    SpinGridFock { grid_len: usize, fock_dim: usize },
    NSpinFock { spins: usize, fock_dim: usize },
    /// A bare matrix space, e.g. `𝔥` handed to the spin-block builder.
    Plain { dim: usize },
}

impl SpaceTag {
    pub fn dim(&self) -> usize {
        match *self {
            SpaceTag::Fock { fock_dim } => fock_dim,
            SpaceTag::SpinFock { fock_dim } => 2 * fock_dim,
            SpaceTag::SpinGridFock { grid_len, fock_dim } => 2 * grid_len * fock_dim,
            SpaceTag::NSpinFock { spins, fock_dim } => (1usize << spins) * fock_dim,
            SpaceTag::Plain { dim } => dim,
        }
    }

    /// The space with one spin-1/2 factor prepended.
    fn with_spin(&self) -> SpaceTag {
        match *self {
            SpaceTag::Fock { fock_dim } => SpaceTag::SpinFock { fock_dim },
            other => SpaceTag::Plain {
                dim: 2 * other.dim(),
            },
        }
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceTag::Fock { .. } => write!(f, "fock"),
            SpaceTag::SpinFock { .. } => write!(f, "spin⊗fock"),
            SpaceTag::SpinGridFock { .. } => write!(f, "spin⊗grid⊗fock"),
            SpaceTag::NSpinFock { spins, .. } => write!(f, "spin^{spins}⊗fock"),
            SpaceTag::Plain { .. } => write!(f, "plain"),
        }
    }
}

/// A Hermitian matrix together with the space it acts on.
///
/// Construction fails unless `max |H − H†| ≤ T::exact_tol()`.
#[derive(Clone, Debug)]
pub struct HermitianOperator<T: Real> {
    matrix: SparseMatrix<T>,
    space: SpaceTag,
}

impl<T: Real> HermitianOperator<T> {
    pub fn new(matrix: SparseMatrix<T>, space: SpaceTag) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != space.dim() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix tagged as {space} of dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                space.dim()
            )));
        }
        let residual = matrix.max_abs_diff(&matrix.adjoint());
        if !(residual <= T::exact_tol()) {
            return Err(Error::NotHermitian {
                residual: residual.to_f64_lossy(),
                tol: T::exact_tol().to_f64_lossy(),
            });
        }
        Ok(Self { matrix, space })
    }

    pub fn plain(matrix: SparseMatrix<T>) -> Result<Self> {
        let dim = matrix.nrows();
        Self::new(matrix, SpaceTag::Plain { dim })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn space(&self) -> SpaceTag {
        self.space
    }

    pub fn matrix(&self) -> &SparseMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> SparseMatrix<T> {
        self.matrix
    }

    /// Real linear combination `alpha·self + beta·other`; stays Hermitian.
    pub fn combine(&self, alpha: T, other: &Self, beta: T) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::Dimension(format!(
                "cannot combine operators on {} and {}",
                self.space, other.space
            )));
        }
        Self::new(self.matrix.axpby(cr(alpha), &other.matrix, cr(beta)), self.space)
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            matrix: self.matrix.scale_real(c),
            space: self.space,
        }
    }

    /// Writes `row col re im` per stored entry, 17 significant digits.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> Result<()> {
        for (r, c, v) in self.matrix.triplets() {
            writeln!(
                out,
                "{} {} {:.16e} {:.16e}",
                r,
                c,
                v.re.to_f64_lossy(),
                v.im.to_f64_lossy()
            )?;
        }
        Ok(())
    }
}

/// Ladder operators and the quadratic field observables on a Fock basis.
#[derive(Clone, Debug)]
pub struct FieldOperators<T: Real> {
    pub fock_dim: usize,
    pub modes: ModeSet<T>,
    /// Occupation of each basis state, kept for the diagonal observables.
    pub occupations: Vec<Vec<u32>>,
    pub a: Vec<SparseMatrix<T>>,
    pub adag: Vec<SparseMatrix<T>>,
    /// Field energy `Σ |k_m| a†_m a_m`.
    pub hf: SparseMatrix<T>,
    /// Field momentum `Σ k_m a†_m a_m`, per Cartesian component.
    pub pf: [SparseMatrix<T>; 3],
    /// Vector potential at the origin.
    pub a0: [SparseMatrix<T>; 3],
    /// Magnetic field at the origin.
    pub b0: [SparseMatrix<T>; 3],
}

pub fn build_field_operators<T: Real>(
    basis: &FockBasis,
    modes: &ModeSet<T>,
) -> Result<FieldOperators<T>> {
    if basis.mode_count() != modes.len() {
        return Err(Error::Dimension(format!(
            "basis has {} modes but the mode set has {}",
            basis.mode_count(),
            modes.len()
        )));
    }
    let dim = basis.dim();
    let mut a = Vec::with_capacity(modes.len());
    let mut adag = Vec::with_capacity(modes.len());
    for m in 0..modes.len() {
        let lower = SparseMatrix::from_triplets(
            dim,
            dim,
            (0..dim).filter_map(|col| {
                let n = basis.state(col).0[m];
                basis
                    .shifted(col, m, -1)
                    .map(|row| (row, col, cr(T::from_u32(n).unwrap().sqrt())))
            }),
        );
        adag.push(lower.adjoint());
        a.push(lower);
    }

    let occupations: Vec<Vec<u32>> = basis.states().iter().map(|s| s.0.clone()).collect();
    let number_weighted = |weights: &dyn Fn(usize) -> T| {
        SparseMatrix::from_diagonal(occupations.iter().map(|occ| {
            cr(occ
                .iter()
                .enumerate()
                .map(|(m, &n)| weights(m) * T::from_u32(n).unwrap())
                .sum::<T>())
        }))
    };
    let ms = modes.modes();
    let hf = number_weighted(&|m| ms[m].omega());
    let pf = [0, 1, 2].map(|alpha| number_weighted(&|m| ms[m].k[alpha]));

    let g = modes.couplings();
    let mut a0 = [0, 1, 2].map(|_| SparseMatrix::zeros(dim, dim));
    let mut b0 = [0, 1, 2].map(|_| SparseMatrix::zeros(dim, dim));
    for m in 0..modes.len() {
        let quadrature = a[m].add(&adag[m]);
        let momentum = a[m].sub(&adag[m]);
        let curl = cross(&ms[m].k, &ms[m].eps);
        for alpha in 0..3 {
            a0[alpha] = a0[alpha].axpby(
                Complex::one(),
                &quadrature,
                cr(g[m] * ms[m].eps[alpha]),
            );
            b0[alpha] = b0[alpha].axpby(Complex::one(), &momentum, ci(g[m] * curl[alpha]));
        }
    }

    Ok(FieldOperators {
        fock_dim: dim,
        modes: modes.clone(),
        occupations,
        a,
        adag,
        hf,
        pf,
        a0,
        b0,
    })
}

impl<T: Real> FieldOperators<T> {
    pub fn space(&self) -> SpaceTag {
        SpaceTag::Fock {
            fock_dim: self.fock_dim,
        }
    }

    /// Wraps one of the field matrices as a Hermitian Fock-space operator.
    pub fn hermitian(&self, m: &SparseMatrix<T>) -> Result<HermitianOperator<T>> {
        HermitianOperator::new(m.clone(), self.space())
    }
}

/// `H₀ = diag(A, A)` plus `σ·B` on `ℂ² ⊗ 𝔥`.
#[derive(Clone, Debug)]
pub struct SpinBlockSpec<T: Real> {
    pub a: HermitianOperator<T>,
    pub b: [HermitianOperator<T>; 3],
}

/// Assembles `[[A + g B3, g (B1 − i B2)], [g (B1 + i B2), A − g B3]]`.
pub fn build_spin_block<T: Real>(spec: &SpinBlockSpec<T>, g_spin: T) -> Result<HermitianOperator<T>> {
    let space = spec.a.space();
    for b in &spec.b {
        if b.space() != space {
            return Err(Error::Dimension(format!(
                "spin block A acts on {space} (dim {}) but B acts on {} (dim {})",
                spec.a.dim(),
                b.space(),
                b.dim()
            )));
        }
    }
    let g = cr(g_spin);
    let one = Complex::<T>::one();
    let [b1, b2, b3] = [0, 1, 2].map(|i| spec.b[i].matrix());
    let a = spec.a.matrix();
    let up_up = a.axpby(one, b3, g);
    let down_down = a.axpby(one, b3, -g);
    let up_down = b1.axpby(g, b2, -ci::<T>(T::one()) * g);
    let down_up = b1.axpby(g, b2, ci::<T>(T::one()) * g);
    let matrix = block2(&up_up, &up_down, &down_up, &down_down);
    HermitianOperator::new(matrix, space.with_spin())
}

pub(crate) fn block2<T: Real>(
    a: &SparseMatrix<T>,
    b: &SparseMatrix<T>,
    c: &SparseMatrix<T>,
    d: &SparseMatrix<T>,
) -> SparseMatrix<T> {
    let n = a.nrows();
    SparseMatrix::from_triplets(
        2 * n,
        2 * n,
        a.triplets()
            .chain(b.triplets().map(|(r, col, v)| (r, col + n, v)))
            .chain(c.triplets().map(|(r, col, v)| (r + n, col, v)))
            .chain(d.triplets().map(|(r, col, v)| (r + n, col + n, v))),
    )
}

/// Strength of the `σ·B` term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpinCoupling<T> {
    /// `e/2`, the coefficient in front of `σ·B(0)` in the fixed-momentum
    /// Hamiltonian.
    HalfCharge,
    Value(T),
}

impl<T: Real> SpinCoupling<T> {
    pub fn resolve(&self, e: T) -> T {
        match *self {
            SpinCoupling::HalfCharge => e * T::lit(0.5),
            SpinCoupling::Value(g) => g,
        }
    }
}

/// `½ Σ_α M_α² ` for Hermitian `M_α`.
fn half_sum_of_squares<T: Real>(ms: &[SparseMatrix<T>; 3]) -> SparseMatrix<T> {
    let half = cr(T::lit(0.5));
    let n = ms[0].nrows();
    ms.iter().fold(SparseMatrix::zeros(n, n), |acc, m| {
        acc.axpby(Complex::one(), &m.matmul(m), half)
    })
}

/// Spinless part of the fixed-momentum Hamiltonian,
/// `½ (P − P_f + e A(0))² + H_f`.
pub fn spinless_momentum_hamiltonian<T: Real>(
    field: &FieldOperators<T>,
    p: Vec3<T>,
    e: T,
) -> Result<HermitianOperator<T>> {
    let dim = field.fock_dim;
    let id = SparseMatrix::identity(dim);
    let m = [0, 1, 2].map(|alpha| {
        id.scale_real(p[alpha])
            .sub(&field.pf[alpha])
            .axpby(Complex::one(), &field.a0[alpha], cr(e))
    });
    let kinetic = half_sum_of_squares(&m);
    HermitianOperator::new(kinetic.add(&field.hf), field.space())
}

/// Fixed total momentum Pauli-Fierz Hamiltonian on `ℂ² ⊗ Fock`.
pub fn build_hp<T: Real>(
    field: &FieldOperators<T>,
    p: Vec3<T>,
    e: T,
    g_spin: SpinCoupling<T>,
) -> Result<HermitianOperator<T>> {
    let a = spinless_momentum_hamiltonian(field, p, e)?;
    let b = [0, 1, 2].map(|alpha| field.hermitian(&field.b0[alpha]));
    let [b1, b2, b3] = b;
    let spec = SpinBlockSpec {
        a,
        b: [b1?, b2?, b3?],
    };
    build_spin_block(&spec, g_spin.resolve(e))
}

/// Uniform 1-D lattice, symmetric about the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec<T: Real> {
    points: Vec<T>,
    spacing: T,
}

impl<T: Real> GridSpec<T> {
    /// `{−L·h, …, −h, 0, h, …, L·h}`.
    pub fn symmetric(half_width: usize, spacing: T) -> Result<Self> {
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "spacing {spacing} must be positive"
            )));
        }
        let l = half_width as i64;
        let points = (-l..=l)
            .map(|i| T::from_i64(i).unwrap() * spacing)
            .collect();
        Ok(Self { points, spacing })
    }

    /// Accepts explicit coordinates; they must be uniformly spaced and
    /// closed under `x ↦ −x`.
    pub fn from_points(points: Vec<T>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid("need at least two grid points".into()));
        }
        let n = points.len();
        for i in 0..n {
            if points[i] != -points[n - 1 - i] {
                return Err(Error::InvalidGrid(format!(
                    "grid is not symmetric about 0: x[{i}] = {} but x[{}] = {}",
                    points[i],
                    n - 1 - i,
                    points[n - 1 - i]
                )));
            }
        }
        let spacing = points[1] - points[0];
        if !(spacing > T::zero()) {
            return Err(Error::InvalidGrid("grid points must increase".into()));
        }
        let tol = T::lit(1e3) * T::epsilon() * spacing;
        if points.windows(2).any(|w| ((w[1] - w[0]) - spacing).abs() > tol) {
            return Err(Error::InvalidGrid("grid spacing is not uniform".into()));
        }
        Ok(Self { points, spacing })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// Index of `−x_i`.
    pub fn mirror(&self, i: usize) -> usize {
        self.points.len() - 1 - i
    }

    /// Whether `V(−x) = V(x)` holds exactly on the grid.
    pub fn is_even(&self, potential: &[T]) -> bool {
        (0..potential.len()).all(|i| potential[i] == potential[self.mirror(i)])
    }

    /// `−i d/dx` by central differences with zero boundary values.
    pub fn momentum(&self) -> SparseMatrix<T> {
        let n = self.len();
        let c = T::one() / (T::lit(2.0) * self.spacing);
        SparseMatrix::from_triplets(
            n,
            n,
            (0..n.saturating_sub(1)).flat_map(|i| [(i, i + 1, ci(-c)), (i + 1, i, ci(c))]),
        )
    }
}

/// Output of the grid builder.
#[derive(Clone, Debug)]
pub struct GridHamiltonian<T: Real> {
    pub hamiltonian: HermitianOperator<T>,
    /// `false` when the potential breaks `x ↦ −x`, in which case the
    /// time-reversal commutation is expected to fail.
    pub potential_is_even: bool,
}

/// Mode sum `Σ_m c_m (e^{i k_z x} a_m + s · e^{−i k_z x} a†_m)` placed on
/// the diagonal grid blocks of `grid ⊗ Fock`.
fn local_field<T: Real>(
    field: &FieldOperators<T>,
    grid: &GridSpec<T>,
    coefficient: impl Fn(usize) -> Complex<T>,
    sign: T,
) -> SparseMatrix<T> {
    let fock = field.fock_dim;
    let n = grid.len() * fock;
    let ms = field.modes.modes();
    let mut triplets = Vec::new();
    for (gi, &x) in grid.points().iter().enumerate() {
        let offset = gi * fock;
        for m in 0..ms.len() {
            let c = coefficient(m);
            if c.is_zero() {
                continue;
            }
            let phase = Complex::from_polar(T::one(), ms[m].k[2] * x);
            for (r, col, v) in field.a[m].triplets() {
                triplets.push((offset + r, offset + col, c * phase * v));
            }
            for (r, col, v) in field.adag[m].triplets() {
                triplets.push((offset + r, offset + col, c * phase.conj() * v * sign));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, triplets)
}

/// Pauli-Fierz Hamiltonian with the electron on a symmetric 1-D grid along
/// the z axis: `½ (−i∇ + e A(x))² + g σ·B(x) + V(x) + H_f`.
pub fn build_hpf_grid<T: Real>(
    field: &FieldOperators<T>,
    grid: &GridSpec<T>,
    potential: &[T],
    e: T,
    g_spin: SpinCoupling<T>,
) -> Result<GridHamiltonian<T>> {
    if potential.len() != grid.len() {
        return Err(Error::InvalidGrid(format!(
            "potential table has {} entries for {} grid points",
            potential.len(),
            grid.len()
        )));
    }
    let fock = field.fock_dim;
    let fock_id = SparseMatrix::identity(fock);
    let grid_id = SparseMatrix::identity(grid.len());
    let ms = field.modes.modes();
    let g = field.modes.couplings();

    let vector_potential =
        [0, 1, 2].map(|alpha| local_field(field, grid, |m| cr(g[m] * ms[m].eps[alpha]), T::one()));
    let magnetic = [0, 1, 2].map(|alpha| {
        local_field(
            field,
            grid,
            |m| ci(g[m] * cross(&ms[m].k, &ms[m].eps)[alpha]),
            -T::one(),
        )
    });

    let mut m = vector_potential.map(|a| a.scale_real(e));
    m[2] = m[2].add(&grid.momentum().kron(&fock_id));
    let kinetic = half_sum_of_squares(&m);
    let v = SparseMatrix::from_diagonal(potential.iter().map(|&x| cr(x))).kron(&fock_id);
    let hf = grid_id.kron(&field.hf);
    let space = SpaceTag::Plain {
        dim: grid.len() * fock,
    };
    let a = HermitianOperator::new(kinetic.add(&v).add(&hf), space)?;
    let [b1, b2, b3] = magnetic.map(|b| HermitianOperator::new(b, space));
    let spin = build_spin_block(
        &SpinBlockSpec {
            a,
            b: [b1?, b2?, b3?],
        },
        g_spin.resolve(e),
    )?;
    let hamiltonian = HermitianOperator::new(
        spin.into_matrix(),
        SpaceTag::SpinGridFock {
            grid_len: grid.len(),
            fock_dim: fock,
        },
    )?;
    Ok(GridHamiltonian {
        hamiltonian,
        potential_is_even: grid.is_even(potential),
    })
}

/// Pauli matrices `σ₁, σ₂, σ₃`.
pub fn pauli<T: Real>() -> [SparseMatrix<T>; 3] {
    let o = T::one();
    [
        SparseMatrix::from_triplets(2, 2, [(0, 1, cr(o)), (1, 0, cr(o))]),
        SparseMatrix::from_triplets(2, 2, [(0, 1, ci(-o)), (1, 0, ci(o))]),
        SparseMatrix::from_triplets(2, 2, [(0, 0, cr(o)), (1, 1, cr(-o))]),
    ]
}

/// `σ_α` acting on spin `l` (0-based) of `spins` spin-1/2 factors.
pub fn spin_operator<T: Real>(spins: usize, l: usize, alpha: usize) -> SparseMatrix<T> {
    let sigma = &pauli::<T>()[alpha];
    let left = SparseMatrix::identity(1usize << l);
    let right = SparseMatrix::identity(1usize << (spins - l - 1));
    left.kron(sigma).kron(&right)
}

/// Largest `2^N · D` accepted by [`build_hn_toy`].
pub const DEFAULT_OPERATOR_CAP: usize = 1 << 20;

/// `N` spins coupled to the field at the origin:
/// `Σ_l (e/2) σ^{(l)}·B(0) + H_f + ½ Σ_α (e A_α(0))²`.
pub fn build_hn_toy<T: Real>(
    field: &FieldOperators<T>,
    spins: usize,
    e: T,
) -> Result<HermitianOperator<T>> {
    if spins == 0 {
        return Err(Error::Precondition("at least one spin is required".into()));
    }
    let dim = 1u128
        .checked_shl(spins as u32)
        .unwrap_or(u128::MAX)
        .saturating_mul(field.fock_dim as u128);
    if spins >= 64 || dim > DEFAULT_OPERATOR_CAP as u128 {
        return Err(Error::DimensionCap {
            dim,
            cap: DEFAULT_OPERATOR_CAP,
        });
    }
    let scaled_a = field.a0.clone().map(|a| a.scale_real(e));
    let fock_part = half_sum_of_squares(&scaled_a).add(&field.hf);
    let mut h = SparseMatrix::identity(1usize << spins).kron(&fock_part);
    let g = cr(e * T::lit(0.5));
    for l in 0..spins {
        for alpha in 0..3 {
            let term = spin_operator::<T>(spins, l, alpha).kron(&field.b0[alpha]);
            h = h.axpby(Complex::one(), &term, g);
        }
    }
    HermitianOperator::new(
        h,
        SpaceTag::NSpinFock {
            spins,
            fock_dim: field.fock_dim,
        },
    )
}

/// Norm of a 3-vector, re-exported for callers building momenta.
pub fn vec_norm<T: Real>(v: &Vec3<T>) -> T {
    norm(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_modes, enumerate_basis};

    fn unit_mode_field(n_max: u32) -> FieldOperators<f64> {
        let w = 2.0 * (2.0 * std::f64::consts::PI).powi(3);
        let modes = build_modes(&[([0.0, 0.0, 1.0], w)])
            .unwrap()
            .truncated(1)
            .unwrap();
        let basis = enumerate_basis(1, n_max).unwrap();
        build_field_operators(&basis, &modes).unwrap()
    }

    #[test]
    fn ladder_action() {
        let f = unit_mode_field(2);
        assert_eq!(f.a[0].get(0, 1), cr(1.0));
        assert_eq!(f.a[0].get(1, 2), cr(2f64.sqrt()));
        assert_eq!(f.a[0].nnz(), 2);
        assert_eq!(f.adag[0], f.a[0].adjoint());
    }

    #[test]
    fn vacuum_has_zero_field_energy() {
        let f = unit_mode_field(3);
        let omega = f.hf.mul_vec(&[cr(1.0), cr(0.0), cr(0.0), cr(0.0)]);
        assert!(omega.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn single_mode_vector_potential() {
        // Hand-built 3x3 truncation: a = [[0,1,0],[0,0,√2],[0,0,0]].
        let s2 = 2f64.sqrt();
        let a_plus_adag = [[0.0, 1.0, 0.0], [1.0, 0.0, s2], [0.0, s2, 0.0]];
        let f = unit_mode_field(2);
        // ε = (1,0,0), g = 1
        for r in 0..3 {
            for c in 0..3 {
                assert!((f.a0[0].get(r, c) - cr(a_plus_adag[r][c])).norm() < 1e-15);
                assert!(f.a0[1].get(r, c).norm() < 1e-15);
                assert!(f.a0[2].get(r, c).norm() < 1e-15);
            }
        }
        assert_eq!(f.a0[0].get(0, 1), cr(1.0));
        // k × ε = ẑ × x̂ = ŷ, so only B0_y survives: i (a − a†).
        assert_eq!(f.b0[1].get(0, 1), ci(1.0));
        assert_eq!(f.b0[1].get(1, 0), ci(-1.0));
        assert!(f.b0[0].max_abs() == 0.0 && f.b0[2].max_abs() == 0.0);
    }

    #[test]
    fn spin_block_examples() {
        let scalar = |x: f64| {
            HermitianOperator::plain(SparseMatrix::from_triplets(1, 1, [(0, 0, cr(x))])).unwrap()
        };
        let zero = SparseMatrix::<f64>::zeros(1, 1);
        let spec = SpinBlockSpec {
            a: HermitianOperator::plain(zero.clone()).unwrap(),
            b: [scalar(0.0), scalar(0.0), scalar(1.0)],
        };
        let h = build_spin_block(&spec, 1.0).unwrap().matrix().to_dense();
        assert_eq!(h[[0, 0]], cr(1.0));
        assert_eq!(h[[1, 1]], cr(-1.0));
        assert!(h[[0, 1]].is_zero());

        let spec = SpinBlockSpec {
            a: HermitianOperator::plain(zero).unwrap(),
            b: [scalar(1.0), scalar(1.0), scalar(1.0)],
        };
        let h = build_spin_block(&spec, 1.0).unwrap().matrix().to_dense();
        assert_eq!(h[[0, 1]], Complex::new(1.0, -1.0));
        assert_eq!(h[[1, 0]], Complex::new(1.0, 1.0));
        // Eigenvalues of [[a, b], [b̄, −a]] are ±sqrt(a² + |b|²).
        let det = -(h[[0, 0]].re * h[[1, 1]].re) + h[[0, 1]].norm_sqr();
        assert!((det.sqrt() - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn spin_block_rejects_mismatch() {
        let one = HermitianOperator::plain(SparseMatrix::<f64>::identity(1)).unwrap();
        let two = HermitianOperator::plain(SparseMatrix::<f64>::identity(2)).unwrap();
        let spec = SpinBlockSpec {
            a: one.clone(),
            b: [one.clone(), two, one],
        };
        assert!(matches!(
            build_spin_block(&spec, 1.0),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn hermiticity_gate() {
        let m = SparseMatrix::<f64>::from_triplets(2, 2, [(0, 1, cr(1.0))]);
        assert!(matches!(
            HermitianOperator::plain(m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn free_hamiltonian_is_diagonal() {
        let f = unit_mode_field(2);
        let h = build_hp(&f, [0.0, 0.0, 0.0], 0.0, SpinCoupling::HalfCharge).unwrap();
        let d: Vec<f64> = h.matrix().diagonal().iter().map(|v| v.re).collect();
        assert_eq!(d, vec![0.0, 1.5, 4.0, 0.0, 1.5, 4.0]);
        assert_eq!(h.matrix().nnz(), 4);

        let h = build_hp(&f, [0.0, 0.0, 1.0], 0.0, SpinCoupling::HalfCharge).unwrap();
        let d: Vec<f64> = h.matrix().diagonal().iter().map(|v| v.re).collect();
        // (1 − n)²/2 + n for n = 0, 1, 2
        assert_eq!(d, vec![0.5, 1.0, 2.5, 0.5, 1.0, 2.5]);
    }

    #[test]
    fn grid_momentum_is_hermitian_and_antisymmetric() {
        let g = GridSpec::symmetric(3, 0.5).unwrap();
        let p = g.momentum();
        assert_eq!(p, p.adjoint());
        assert_eq!(p.get(0, 1), ci(-1.0));
        assert_eq!(g.points()[0], -1.5);
        assert!(GridSpec::from_points(vec![-1.0, 0.0, 2.0]).is_err());
        assert!(GridSpec::from_points(vec![-1.0, 0.0, 1.0]).is_ok());
    }

    #[test]
    fn export_format() {
        let f = unit_mode_field(1);
        let h = f.hermitian(&f.a0[0]).unwrap();
        let mut buf = Vec::new();
        h.write_triplets(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "0 1 1.0000000000000000e0 0.0000000000000000e0\n1 0 1.0000000000000000e0 0.0000000000000000e0\n"
        );
    }
}
