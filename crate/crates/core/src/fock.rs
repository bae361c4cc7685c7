//! Discretized photon modes and the truncated occupation-number basis.
//!
//! The continuum field is replaced by a caller-supplied quadrature: a list
//! of wave vectors with volume weights. Each wave vector carries two real
//! transverse polarizations. The bosonic Fock space over those modes is
//! truncated by total photon number, `Σ n_m ≤ n_max`, and enumerated in
//! graded lexicographic order so that the vacuum is always state `0`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default ceiling on the number of basis states.
pub const DEFAULT_DIMENSION_CAP: usize = 1 << 20;

pub type Vec3<T> = [T; 3];

pub(crate) fn dot<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm<T: Real>(a: &Vec3<T>) -> T {
    dot(a, a).sqrt()
}

fn scaled<T: Real>(a: &Vec3<T>, s: T) -> Vec3<T> {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Transverse polarization pair for a nonzero wave vector.
///
/// Off the z axis `ε1 = (k × ẑ)/|k × ẑ|` and `ε2 = k̂ × ε1`; on the axis
/// (either direction) the pair is `(x̂, ŷ)`.
pub fn polarizations<T: Real>(k: &Vec3<T>) -> (Vec3<T>, Vec3<T>) {
    let z = [T::zero(), T::zero(), T::one()];
    let kz = cross(k, &z);
    let kz_norm = norm(&kz);
    if kz_norm == T::zero() {
        return (
            [T::one(), T::zero(), T::zero()],
            [T::zero(), T::one(), T::zero()],
        );
    }
    let e1 = scaled(&kz, kz_norm.recip());
    let khat = scaled(k, norm(k).recip());
    (e1, cross(&khat, &e1))
}

/// One photon mode: wave vector, polarization label and quadrature weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode<T: Real> {
    pub k: Vec3<T>,
    /// Polarization label, 1 or 2.
    pub polarization: u8,
    pub weight: T,
    pub eps: Vec3<T>,
}

impl<T: Real> Mode<T> {
    /// `ω = |k|`.
    pub fn omega(&self) -> T {
        norm(&self.k)
    }

    /// `g = sqrt(w / (2 (2π)³ |k|))`.
    pub fn coupling(&self) -> T {
        let two_pi = T::lit(2.0) * T::PI();
        (self.weight / (T::lit(2.0) * two_pi.powi(3) * self.omega())).sqrt()
    }

    fn validate(&self, tol: T) -> Result<()> {
        let k_norm = self.omega();
        if !(k_norm > T::zero()) || !k_norm.is_finite() {
            return Err(Error::InvalidMode(format!(
                "wave vector {:?} must be finite and nonzero",
                self.k
            )));
        }
        if !(self.weight > T::zero()) || !self.weight.is_finite() {
            return Err(Error::InvalidMode(format!(
                "quadrature weight {} must be positive and finite",
                self.weight
            )));
        }
        if self.polarization != 1 && self.polarization != 2 {
            return Err(Error::InvalidMode(format!(
                "polarization label {} is not 1 or 2",
                self.polarization
            )));
        }
        if (norm(&self.eps) - T::one()).abs() > tol {
            return Err(Error::InvalidMode(format!(
                "polarization {:?} is not a unit vector",
                self.eps
            )));
        }
        if (dot(&self.eps, &self.k) / k_norm).abs() > tol {
            return Err(Error::InvalidMode(format!(
                "polarization {:?} is not transverse to k = {:?}",
                self.eps, self.k
            )));
        }
        Ok(())
    }
}

/// An ordered, validated collection of modes with their couplings.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSet<T: Real> {
    modes: Vec<Mode<T>>,
    couplings: Vec<T>,
}

impl<T: Real> ModeSet<T> {
    /// Validates modes supplied directly (e.g. after a rotation, or a
    /// single-polarization subset). Modes sharing a wave vector must have
    /// orthogonal polarizations.
    pub fn from_modes(modes: Vec<Mode<T>>) -> Result<Self> {
        let tol = T::lit(1e3) * T::epsilon();
        if modes.is_empty() {
            return Err(Error::InvalidMode("mode set is empty".into()));
        }
        for m in &modes {
            m.validate(tol)?;
        }
        for (i, a) in modes.iter().enumerate() {
            for b in &modes[i + 1..] {
                if a.k == b.k && dot(&a.eps, &b.eps).abs() > tol {
                    return Err(Error::InvalidMode(format!(
                        "polarizations {:?} and {:?} at k = {:?} are not orthogonal",
                        a.eps, b.eps, a.k
                    )));
                }
            }
        }
        let couplings = modes.iter().map(Mode::coupling).collect();
        Ok(Self { modes, couplings })
    }

    pub fn modes(&self) -> &[Mode<T>] {
        &self.modes
    }

    pub fn couplings(&self) -> &[T] {
        &self.couplings
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Keeps the first `count` modes.
    pub fn truncated(&self, count: usize) -> Result<Self> {
        if count == 0 || count > self.len() {
            return Err(Error::InvalidMode(format!(
                "cannot keep {count} of {} modes",
                self.len()
            )));
        }
        Self::from_modes(self.modes[..count].to_vec())
    }

    /// Applies a rotation matrix (rows) to every wave vector and polarization.
    pub fn rotated(&self, rotation: &[Vec3<T>; 3]) -> Result<Self> {
        let apply = |v: &Vec3<T>| -> Vec3<T> {
            [dot(&rotation[0], v), dot(&rotation[1], v), dot(&rotation[2], v)]
        };
        Self::from_modes(
            self.modes
                .iter()
                .map(|m| Mode {
                    k: apply(&m.k),
                    polarization: m.polarization,
                    weight: m.weight,
                    eps: apply(&m.eps),
                })
                .collect(),
        )
    }
}

/// Builds both polarizations for every `(k, weight)` quadrature node.
pub fn build_modes<T: Real>(kpoints: &[(Vec3<T>, T)]) -> Result<ModeSet<T>> {
    let mut modes = Vec::with_capacity(2 * kpoints.len());
    for (k, weight) in kpoints {
        if !(norm(k) > T::zero()) {
            return Err(Error::InvalidMode(format!("wave vector {k:?} is zero")));
        }
        if !(*weight > T::zero()) {
            return Err(Error::InvalidMode(format!(
                "quadrature weight {weight} at k = {k:?} is not positive"
            )));
        }
        let (e1, e2) = polarizations(k);
        for (polarization, eps) in [(1, e1), (2, e2)] {
            modes.push(Mode {
                k: *k,
                polarization,
                weight: *weight,
                eps,
            });
        }
    }
    ModeSet::from_modes(modes)
}

/// Photon counts, one per mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationState(pub Vec<u32>);

impl OccupationState {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.iter().all(|&n| n == 0)
    }
}

/// Truncated occupation basis in graded lexicographic order.
#[derive(Clone, Debug)]
pub struct FockBasis {
    mode_count: usize,
    n_max: u32,
    states: Vec<OccupationState>,
    index: HashMap<OccupationState, usize>,
}

/// `C(n, k)` in `u128`, saturating on overflow.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `C(mode_count + n_max, mode_count)`.
pub fn basis_dimension(mode_count: usize, n_max: u32) -> u128 {
    binomial(mode_count as u64 + n_max as u64, mode_count as u64)
}

pub fn enumerate_basis(mode_count: usize, n_max: u32) -> Result<FockBasis> {
    enumerate_basis_capped(mode_count, n_max, DEFAULT_DIMENSION_CAP)
}

pub fn enumerate_basis_capped(mode_count: usize, n_max: u32, cap: usize) -> Result<FockBasis> {
    if mode_count == 0 {
        return Err(Error::InvalidMode("at least one mode is required".into()));
    }
    let dim = basis_dimension(mode_count, n_max);
    if dim > cap as u128 {
        return Err(Error::DimensionCap { dim, cap });
    }
    let mut states = Vec::with_capacity(dim as usize);
    let mut current = vec![0u32; mode_count];
    for total in 0..=n_max {
        compositions(&mut current, 0, total, &mut states);
    }
    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(FockBasis {
        mode_count,
        n_max,
        states,
        index,
    })
}

/// Appends all compositions of `remaining` into `current[pos..]`, ascending
/// lexicographically.
fn compositions(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<OccupationState>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(OccupationState(current.to_vec()));
        current[pos] = 0;
        return;
    }
    for n in 0..=remaining {
        current[pos] = n;
        compositions(current, pos + 1, remaining - n, out);
    }
    current[pos] = 0;
}

impl FockBasis {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn states(&self) -> &[OccupationState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &OccupationState {
        &self.states[i]
    }

    pub fn index_of(&self, state: &OccupationState) -> Option<usize> {
        self.index.get(state).copied()
    }

    /// Index of the state `state + delta·e_mode`, if it lies in the basis.
    pub fn shifted(&self, i: usize, mode: usize, delta: i32) -> Option<usize> {
        let mut s = self.states[i].clone();
        let n = s.0[mode] as i64 + delta as i64;
        if n < 0 {
            return None;
        }
        s.0[mode] = n as u32;
        self.index_of(&s)
    }
}
