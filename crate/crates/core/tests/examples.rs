mod common;

use common::*;
use kramers_core::fock::{build_modes, enumerate_basis};
use kramers_core::operators::{
    build_field_operators, build_hn_toy, build_hp, build_hpf_grid, build_spin_block, SpinCoupling,
};
use kramers_core::semigroup::{
    apply_function, hiroshima_spohn_check, jreal_generalization_check, theta_function_commutes, FunctionTag,
};
use kramers_core::spectral::{
    cluster, diagonalize_dense, diagonalize_iterative, eigenvalues_dense, kramers_report, Eigenpairs,
    KramersVerdict, LanczosConfig,
};
use kramers_core::symmetry::{algebra_closure_test, check_commutes, make_theta, reality_residual, sigma3_probe};
use kramers_core::{c64, Error, GridSpec, HermitianOperator, Involution, SparseMatrix, SpinBlockSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn single_mode(n_max: u32) -> kramers_core::FieldOperators {
    let modes = build_modes(&[([0.0, 0.0, 1.0], weight_for(1.0, 1.0))]).unwrap().truncated(1).unwrap();
    let basis = enumerate_basis(1, n_max).unwrap();
    build_field_operators(&basis, &modes).unwrap()
}

fn two_mode_case(e: f64, p: [f64; 3]) -> MomentumCase {
    let kpoints = [([0.3, -0.4, 0.8], weight_for(0.943_398_113_205_660_4, 0.7))];
    MomentumCase {
        modes: build_modes(&kpoints).unwrap(),
        n_max: 2,
        e,
        p,
    }
}

#[test]
fn dense_solver_agrees_with_jacobi() {
    for seed in 0..4 {
        let h = build(&random_case(seed)).h;
        let dense = eigenvalues_dense(&h).unwrap();
        let oracle = jacobi_eigenvalues(&h);
        for (a, b) in dense.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-10, "seed {seed}: {a} vs {b}");
        }
    }
}

#[test]
fn free_single_mode_spectrum() {
    let field = single_mode(2);
    for (p, want) in [([0.0; 3], [0.0, 0.0, 1.5, 1.5, 4.0, 4.0]), ([0.0, 0.0, 1.0], [0.5, 0.5, 1.0, 1.0, 2.5, 2.5])] {
        let h = build_hp(&field, p, 0.0, SpinCoupling::HalfCharge).unwrap();
        let got = eigenvalues_dense(&h).unwrap();
        for (a, b) in got.iter().zip(want) {
            assert!((a - b).abs() <= 1e-12, "{got:?}");
        }
    }
}

/// `e = 0`, `V = 0`: lattice kinetic energy plus field energy, each level
/// doubled by spin. The central difference with zero boundaries has
/// eigenvalues `cos(πk/(n+1))/h`.
#[test]
fn free_grid_spectrum_is_a_tensor_sum() {
    let field = single_mode(2);
    let grid = GridSpec::symmetric(3, 0.5).unwrap();
    let n = grid.len();
    let built = build_hpf_grid(&field, &grid, &vec![0.0; n], 0.0, SpinCoupling::HalfCharge).unwrap();
    let kinetic: Vec<f64> = (1..=n)
        .map(|k| 0.5 * ((std::f64::consts::PI * k as f64 / (n + 1) as f64).cos() / 0.5).powi(2))
        .collect();
    let mut want = Vec::new();
    for t in &kinetic {
        for photons in 0..=2 {
            want.extend([t + photons as f64; 2]);
        }
    }
    want.sort_by(f64::total_cmp);
    let got = eigenvalues_dense(&built.hamiltonian).unwrap();
    assert_eq!(got.len(), want.len());
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
    }
}

#[test]
fn odd_potential_breaks_commutation() {
    let field = single_mode(2);
    let grid = GridSpec::symmetric(4, 0.5).unwrap();
    let theta = make_theta(&Involution::grid_reflection(grid.len(), field.fock_dim), 1).unwrap();
    let even: Vec<f64> = grid.points().iter().map(|x| x * x).collect();
    let odd: Vec<f64> = grid.points().to_vec();
    let h_even = build_hpf_grid(&field, &grid, &even, 0.3, SpinCoupling::HalfCharge).unwrap();
    let h_odd = build_hpf_grid(&field, &grid, &odd, 0.3, SpinCoupling::HalfCharge).unwrap();
    assert!(h_even.potential_is_even && !h_odd.potential_is_even);
    assert!(check_commutes(&h_even.hamiltonian, &theta).unwrap() <= 1e-12);
    let r = check_commutes(&h_odd.hamiltonian, &theta).unwrap();
    // V(x) − V(−x) = 2x peaks at the grid edge, x = 2.
    assert!((r - 4.0).abs() <= 1e-12, "{r}");
    let report = kramers_report(&h_odd.hamiltonian, &theta, 1e-8).unwrap();
    assert!(matches!(report.verdict, KramersVerdict::NotAsserted(_)));
}

/// `H(P = 0) − H_1 = ½ P_f² − ½ e (P_f·A + A·P_f)` on each spin block.
#[test]
fn one_spin_model_matches_zero_momentum() {
    let b = build(&two_mode_case(0.6, [0.0; 3]));
    let toy = build_hn_toy(&b.field, 1, 0.6).unwrap();
    let f = &b.field;
    let mut cross_terms = SparseMatrix::zeros(f.fock_dim, f.fock_dim);
    for alpha in 0..3 {
        let pf2 = f.pf[alpha].matmul(&f.pf[alpha]);
        let mixed = f.pf[alpha].matmul(&f.a0[alpha]).add(&f.a0[alpha].matmul(&f.pf[alpha]));
        cross_terms = cross_terms.add(&pf2.scale_real(0.5)).sub(&mixed.scale_real(0.5 * 0.6));
    }
    let expected = SparseMatrix::identity(2).kron(&cross_terms);
    let diff = b.h.matrix().sub(toy.matrix());
    assert!(diff.max_abs_diff(&expected) <= 1e-13);
}

#[test]
fn n_spin_signs_and_degeneracy() {
    let field = single_mode(2);
    let j = Involution::conjugation(field.fock_dim);
    for (spins, sign) in [(1, -1), (2, 1), (3, -1), (4, 1)] {
        let theta = make_theta::<f64>(&j, spins).unwrap();
        assert_eq!(theta.sign(), sign);
        // U conj(U) = sign · 1.
        let u = theta.u();
        let square = u.matmul(&u.conj());
        let id = SparseMatrix::identity(u.nrows()).scale_real(sign as f64);
        assert!(square.max_abs_diff(&id) <= 1e-12);
    }
    let h3 = build_hn_toy(&field, 3, 0.4).unwrap();
    assert_eq!(h3.dim(), 24);
    let report = kramers_report(&h3, &make_theta(&j, 3).unwrap(), 1e-8).unwrap();
    assert!(report.holds(), "{:?}", report.verdict);

    let h2 = build_hn_toy(&field, 2, 0.4).unwrap();
    let report = kramers_report(&h2, &make_theta(&j, 2).unwrap(), 1e-8).unwrap();
    assert!(!report.assertion_enabled);
    assert!(matches!(report.verdict, KramersVerdict::NotAsserted(_)));
}

#[test]
fn two_mode_report_example() {
    let b = build(&two_mode_case(0.5, [0.0, 0.0, 0.3]));
    let report = kramers_report(&b.h, &b.theta, 1e-8).unwrap();
    assert!(report.all_even());
    assert!(report.max_pairing <= 1e-10);
    assert!(report.max_partner_residual <= 1e-9);
    assert!(report.holds());
}

/// `diag(A, A)` with `A` real symmetric and non-degenerate: pairs exactly.
#[test]
fn block_doubling_gives_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 12;
    let mut triplets = Vec::new();
    for r in 0..n {
        for c in r..n {
            let v = rng.random_range(-1.0..1.0);
            triplets.push((r, c, c64::new(v, 0.0)));
            if r != c {
                triplets.push((c, r, c64::new(v, 0.0)));
            }
        }
    }
    let a = HermitianOperator::plain(SparseMatrix::from_triplets(n, n, triplets)).unwrap();
    let zero = HermitianOperator::plain(SparseMatrix::zeros(n, n)).unwrap();
    let h = build_spin_block(
        &SpinBlockSpec {
            a,
            b: [zero.clone(), zero.clone(), zero],
        },
        1.0,
    )
    .unwrap();
    let theta = make_theta(&Involution::conjugation(n), 1).unwrap();
    let report = kramers_report(&h, &theta, 1e-8).unwrap();
    assert!(report.clusters.iter().all(|d| d.cluster.multiplicity == 2));
    assert!(report.holds());
}

#[test]
fn sigma3_probe_breaks_pairs() {
    let b = build(&two_mode_case(0.5, [0.0, 0.0, 0.3]));
    let probe = sigma3_probe(&b.h, 0.5).unwrap();
    assert!((check_commutes(&probe, &b.theta).unwrap() - 1.0).abs() <= 1e-12);
    let report = kramers_report(&probe, &b.theta, 1e-8).unwrap();
    assert!(report.odd_clusters > 0);
    assert!(matches!(report.verdict, KramersVerdict::NotAsserted(_)));
}

#[test]
fn lanczos_matches_dense_on_random_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(300);
    let n = 300;
    let mut triplets = Vec::new();
    for r in 0..n {
        triplets.push((r, r, c64::new(rng.random_range(-5.0..5.0), 0.0)));
        for c in r + 1..n {
            let v = c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            triplets.push((r, c, v));
            triplets.push((c, r, v.conj()));
        }
    }
    let h = HermitianOperator::plain(SparseMatrix::from_triplets(n, n, triplets)).unwrap();
    let dense = eigenvalues_dense(&h).unwrap();
    let iterative = diagonalize_iterative(&h, 10, &LanczosConfig::default()).unwrap();
    for (a, b) in iterative.eigenvalues.iter().zip(&dense) {
        assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
    }
}

#[test]
fn lanczos_resolves_kramers_pairs() {
    let b = build(&random_case(17));
    let dense = eigenvalues_dense(&b.h).unwrap();
    let k = 6.min(b.h.dim());
    let iterative = diagonalize_iterative(&b.h, k, &LanczosConfig::default()).unwrap();
    for (a, b) in iterative.eigenvalues.iter().zip(&dense) {
        assert!((a - b).abs() <= 1e-9);
    }
    let clusters = cluster(&iterative.eigenvalues, 1e-8).unwrap();
    assert!(clusters.iter().all(|c| c.multiplicity % 2 == 0), "{clusters:?}");
}

#[test]
fn ground_projection_trace() {
    let b = build(&two_mode_case(0.5, [0.1, 0.0, 0.3]));
    let spectrum = diagonalize_dense(&b.h, Eigenpairs::All).unwrap();
    let report = kramers_report(&b.h, &b.theta, 1e-8).unwrap();
    let ground = &report.clusters[0].cluster;
    let threshold = spectrum.eigenvalues[0] + 0.5 * 1e-8;
    let f = apply_function(&b.h, FunctionTag::IndicatorBelow { threshold }).unwrap();
    let trace: f64 = (0..b.h.dim()).map(|i| f.matrix[[i, i]].re).sum();
    assert!((trace - ground.multiplicity as f64).abs() <= 1e-10);
}

#[test]
fn function_examples() {
    let b = build(&two_mode_case(0.5, [0.0, 0.2, 0.0]));
    let lowest = eigenvalues_dense(&b.h).unwrap()[0];
    let exp = theta_function_commutes(&b.h, &b.theta, FunctionTag::ExpNegT { t: 1.0 }).unwrap();
    let res = theta_function_commutes(&b.h, &b.theta, FunctionTag::Resolvent { shift: 1.0 - lowest }).unwrap();
    let one = theta_function_commutes(&b.h, &b.theta, FunctionTag::ExpNegT { t: 0.0 }).unwrap();
    assert!(exp <= 1e-10 && res <= 1e-10);
    assert_eq!(one, 0.0);

    let probe = sigma3_probe(&b.h, 0.5).unwrap();
    assert!(matches!(
        theta_function_commutes(&probe, &b.theta, FunctionTag::ExpNegT { t: 1.0 }),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn hiroshima_spohn_examples() {
    let b = build(&two_mode_case(0.8, [0.2, -0.1, 0.5]));
    for t in [0.1, 1.0, 10.0] {
        let r = hiroshima_spohn_check(&b.h, t, 9).unwrap();
        assert!(r.offdiag <= 1e-12 && r.diag_gap <= 1e-12, "{r:?}");
        assert!(r.max_spinor_gap <= 1e-10);
    }
    let r = hiroshima_spohn_check(&b.h, 0.0, 9).unwrap();
    assert_eq!(r.a_t, 1.0);
}

#[test]
fn jreal_examples() {
    let b = build(&two_mode_case(0.8, [0.2, -0.1, 0.5]));
    let d = b.field.fock_dim;
    let s = std::f64::consts::FRAC_1_SQRT_2;

    let mut vacuum = vec![c64::new(0.0, 0.0); d];
    vacuum[0] = c64::new(1.0, 0.0);
    let tag = FunctionTag::ExpNegT { t: 1.0 };
    let gaps = jreal_generalization_check(&b.h, &b.j, tag, &vacuum, 4).unwrap();
    let hs = hiroshima_spohn_check(&b.h, 1.0, 4).unwrap();
    assert!((gaps.value - hs.a_t).abs() <= 1e-14);
    assert!((gaps.spinor_gap - hs.max_spinor_gap).abs() <= 1e-14);

    let mut phi = vec![c64::new(0.0, 0.0); d];
    phi[0] = c64::new(s, 0.0);
    phi[2] = c64::new(s, 0.0);
    let lowest = eigenvalues_dense(&b.h).unwrap()[0];
    let gaps = jreal_generalization_check(&b.h, &b.j, FunctionTag::Resolvent { shift: 1.0 - lowest }, &phi, 4).unwrap();
    assert!(gaps.spinor_gap <= 1e-10 && gaps.diag_gap <= 1e-10 && gaps.offdiag <= 1e-10);

    let mut complex_phi = vec![c64::new(0.0, 0.0); d];
    complex_phi[0] = c64::new(s, 0.0);
    complex_phi[1] = c64::new(0.0, s);
    assert!(matches!(
        jreal_generalization_check(&b.h, &b.j, tag, &complex_phi, 4),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn closure_examples() {
    let b = build(&two_mode_case(0.5, [0.0; 3]));
    let f = &b.field;
    let ax = &f.a0[0];
    let pass = algebra_closure_test(ax, &f.hf, c64::new(2.0, 0.0), c64::new(-3.0, 0.0), &b.j).unwrap();
    assert!(pass.pass);
    assert_eq!(pass.product_residual, 0.0);
    let zero = SparseMatrix::zeros(f.fock_dim, f.fock_dim);
    let complex = algebra_closure_test(ax, &zero, c64::new(0.0, 1.0), c64::new(0.0, 0.0), &b.j).unwrap();
    assert!(!complex.pass);
    assert_eq!(complex.combination_residual, 2.0 * ax.max_abs());
    assert!(matches!(
        algebra_closure_test(&f.b0[0], ax, c64::new(1.0, 0.0), c64::new(1.0, 0.0), &b.j),
        Err(Error::Precondition(_))
    ));
    for m in f.a.iter().chain(&f.a0).chain(&f.pf).chain([&f.hf]) {
        assert_eq!(reality_residual(m, &b.j).unwrap(), 0.0);
    }
}
