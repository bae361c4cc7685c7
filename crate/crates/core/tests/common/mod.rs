//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use kramers_core::fock::{build_modes, enumerate_basis};
use kramers_core::operators::{build_field_operators, build_hp, SpinCoupling};
use kramers_core::symmetry::make_theta;
use kramers_core::{c64, AntiunitaryOperator, FieldOperators, HermitianOperator, Involution, ModeSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Weight that gives a mode of wave vector length `k` the coupling `g`.
pub fn weight_for(k: f64, g: f64) -> f64 {
    2.0 * (2.0 * PI).powi(3) * k * g * g
}

pub fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.map(|x| x / n);
        }
    }
}

/// `m` modes from random k-points with `|k| ∈ [0.3, 1.5]` and couplings in
/// `[0.2, 1]`.
pub fn random_modes(rng: &mut ChaCha8Rng, m: usize) -> ModeSet {
    let kpoints: Vec<([f64; 3], f64)> = (0..m.div_ceil(2))
        .map(|_| {
            let len = rng.random_range(0.3..1.5);
            let g = rng.random_range(0.2..1.0);
            (random_unit(rng).map(|x| x * len), weight_for(len, g))
        })
        .collect();
    build_modes(&kpoints).unwrap().truncated(m).unwrap()
}

pub fn random_momentum(rng: &mut ChaCha8Rng, max_norm: f64) -> [f64; 3] {
    let r = rng.random_range(0.0..max_norm);
    random_unit(rng).map(|x| x * r)
}

#[derive(Clone, Debug)]
pub struct MomentumCase {
    pub modes: ModeSet,
    pub n_max: u32,
    pub e: f64,
    pub p: [f64; 3],
}

/// `M ≤ 3`, `N_max ≤ 3`, `e ∈ [0, 1]`, `|P| ≤ 2`.
pub fn random_case(seed: u64) -> MomentumCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(1..=3);
    MomentumCase {
        modes: random_modes(&mut rng, m),
        n_max: rng.random_range(1..=3),
        e: rng.random_range(0.0..=1.0),
        p: random_momentum(&mut rng, 2.0),
    }
}

pub struct Built {
    pub field: FieldOperators,
    pub h: HermitianOperator,
    pub j: Involution,
    pub theta: AntiunitaryOperator,
}

pub fn build(case: &MomentumCase) -> Built {
    let basis = enumerate_basis(case.modes.len(), case.n_max).unwrap();
    let field = build_field_operators(&basis, &case.modes).unwrap();
    let h = build_hp(&field, case.p, case.e, SpinCoupling::HalfCharge).unwrap();
    let j = Involution::conjugation(field.fock_dim);
    let theta = make_theta(&j, 1).unwrap();
    Built { field, h, j, theta }
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<c64> {
    (0..n)
        .map(|_| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

pub fn inner(u: &[c64], v: &[c64]) -> c64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[c64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations on its real
/// `2n × 2n` embedding, each eigenvalue appearing twice there.
///
/// Slow and simple, independent of the library's solvers.
pub fn jacobi_eigenvalues(h: &HermitianOperator) -> Vec<f64> {
    let d = h.matrix().to_dense();
    let n = d.nrows();
    let m = 2 * n;
    let mut a = vec![vec![0.0; m]; m];
    for r in 0..n {
        for c in 0..n {
            let z = d[[r, c]];
            a[r][c] = z.re;
            a[r + n][c + n] = z.re;
            a[r][c + n] = -z.im;
            a[r + n][c] = z.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..m).map(|i| a[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    eig.into_iter().step_by(2).collect()
}
