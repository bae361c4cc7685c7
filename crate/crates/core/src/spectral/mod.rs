//! Diagonalization, eigenvalue clustering and the Kramers report.
//!
//! Exact degeneracy is only decidable relative to a scale. Eigenvalues are
//! grouped by transitive gap merging: consecutive values closer than `gap`
//! share a cluster. A cluster is *resolved* when its distance to both
//! neighbours is at least ten times its own spread; multiplicities are only
//! asserted for resolved clusters.

mod lanczos;

use ndarray::{s, Array2};
use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::HermitianOperator;
use crate::scalar::Real;
use crate::symmetry::{check_commutes, AntiunitaryOperator};

pub use lanczos::LanczosConfig;

/// Largest dimension handled by the dense solver in [`diagonalize`].
pub const DENSE_LIMIT: usize = 4096;

/// Default clustering gap.
pub const DEFAULT_GAP: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dense,
    Iterative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Eigenpairs {
    All,
    Lowest(usize),
}

/// Eigenvalues in ascending order with orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct SpectralResult<T: Real> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Array2<Complex<T>>,
    pub method: Method,
}

impl<T: Real> SpectralResult<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `max_i ‖H v_i − λ_i v_i‖ / (1 + |λ_i|)`.
    pub fn max_relative_residual(&self, h: &HermitianOperator<T>) -> T {
        let hv = h.matrix().mul_block(&self.eigenvectors);
        (0..self.len())
            .map(|i| {
                let lambda = self.eigenvalues[i];
                let r = hv
                    .column(i)
                    .iter()
                    .zip(self.eigenvectors.column(i).iter())
                    .map(|(a, b)| (*a - *b * lambda).norm_sqr())
                    .sum::<T>()
                    .sqrt();
                r / (T::one() + lambda.abs())
            })
            .fold(T::zero(), T::max)
    }

    /// `max |V†V − 1|`.
    pub fn orthonormality_defect(&self) -> T {
        let v = &self.eigenvectors;
        let gram = v.t().mapv(|x| x.conj()).dot(v);
        gram.indexed_iter().fold(T::zero(), |worst, ((a, b), g)| {
            let target = if a == b { T::one() } else { T::zero() };
            worst.max((*g - Complex::new(target, T::zero())).norm())
        })
    }
}

fn residual_tol<T: Real>() -> T {
    T::exact_tol() * T::lit(1e3)
}

fn orthonormality_tol<T: Real>() -> T {
    T::exact_tol() * T::lit(1e2)
}

/// Dense up to [`DENSE_LIMIT`], block Lanczos beyond it.
pub fn diagonalize<T: Real>(h: &HermitianOperator<T>, which: Eigenpairs) -> Result<SpectralResult<T>> {
    if h.dim() <= DENSE_LIMIT {
        diagonalize_dense(h, which)
    } else {
        let k = match which {
            Eigenpairs::Lowest(k) => k,
            Eigenpairs::All => {
                return Err(Error::Precondition(format!(
                    "all eigenpairs of a {}-dimensional operator exceed the dense limit {DENSE_LIMIT}",
                    h.dim()
                )))
            }
        };
        diagonalize_iterative(h, k, &LanczosConfig::default())
    }
}

pub fn diagonalize_dense<T: Real>(
    h: &HermitianOperator<T>,
    which: Eigenpairs,
) -> Result<SpectralResult<T>> {
    let (values, vectors) = T::dense_eigh(&h.matrix().to_dense(), true)?;
    let vectors = vectors.expect("requested eigenvectors");
    let k = match which {
        Eigenpairs::All => values.len(),
        Eigenpairs::Lowest(k) => k.min(values.len()),
    };
    let result = SpectralResult {
        eigenvalues: values[..k].to_vec(),
        eigenvectors: vectors.slice(s![.., ..k]).to_owned(),
        method: Method::Dense,
    };
    validate(h, result)
}

/// Eigenvalues only, dense.
pub fn eigenvalues_dense<T: Real>(h: &HermitianOperator<T>) -> Result<Vec<T>> {
    Ok(T::dense_eigh(&h.matrix().to_dense(), false)?.0)
}

pub fn diagonalize_iterative<T: Real>(
    h: &HermitianOperator<T>,
    k: usize,
    config: &LanczosConfig,
) -> Result<SpectralResult<T>> {
    let out = lanczos::block_lanczos(h.matrix(), k, config)?;
    validate(
        h,
        SpectralResult {
            eigenvalues: out.values,
            eigenvectors: out.vectors,
            method: Method::Iterative,
        },
    )
}

fn validate<T: Real>(h: &HermitianOperator<T>, result: SpectralResult<T>) -> Result<SpectralResult<T>> {
    let residual = result.max_relative_residual(h);
    if !(residual <= residual_tol()) {
        return Err(Error::Solver(format!(
            "eigenpair residual {residual:e} exceeds {:e}",
            residual_tol::<T>()
        )));
    }
    let defect = result.orthonormality_defect();
    if !(defect <= orthonormality_tol()) {
        return Err(Error::Solver(format!(
            "eigenvector orthonormality defect {defect:e} exceeds {:e}",
            orthonormality_tol::<T>()
        )));
    }
    Ok(result)
}

/// A maximal run of eigenvalues with consecutive gaps at most `gap`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cluster {
    pub mean: f64,
    pub multiplicity: usize,
    /// `max − min` inside the cluster.
    pub spread: f64,
    /// Index of the first eigenvalue of the cluster.
    pub start: usize,
}

/// Groups ascending eigenvalues by transitive gap merging.
pub fn cluster<T: Real>(eigs: &[T], gap: T) -> Result<Vec<Cluster>> {
    if !(gap > T::zero()) {
        return Err(Error::Precondition(format!("cluster gap {gap} must be positive")));
    }
    if eigs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Precondition("eigenvalues must be ascending".into()));
    }
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=eigs.len() {
        if i == eigs.len() || eigs[i] - eigs[i - 1] > gap {
            if i > start {
                let run = &eigs[start..i];
                let mean = run.iter().copied().sum::<T>() / T::from_usize(run.len()).unwrap();
                clusters.push(Cluster {
                    mean: mean.to_f64_lossy(),
                    multiplicity: run.len(),
                    spread: (run[run.len() - 1] - run[0]).to_f64_lossy(),
                    start,
                });
            }
            start = i;
        }
    }
    Ok(clusters)
}

/// Pass thresholds embedded in every [`DegeneracyReport`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KramersThresholds {
    pub commutator: f64,
    pub pairing: f64,
    pub partner: f64,
    /// Required ratio of surrounding gap to cluster spread.
    pub isolation: f64,
}

impl Default for KramersThresholds {
    fn default() -> Self {
        Self {
            commutator: 1e-12,
            pairing: 1e-9,
            partner: 1e-8,
            isolation: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterDiagnostics {
    #[serde(flatten)]
    pub cluster: Cluster,
    /// `max |⟨φ, θφ⟩|` over the cluster's eigenvectors.
    pub pairing: f64,
    /// `max ‖θφ − Π θφ‖`, `Π` the projector onto the cluster eigenspace.
    pub partner_residual: f64,
    /// Distance to the nearest neighbouring cluster; `None` for a lone cluster.
    pub isolation_gap: Option<f64>,
    pub resolved: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum KramersVerdict {
    /// Every cluster has even multiplicity and pairs under `θ`.
    Holds,
    Violated(String),
    /// Preconditions fail; diagnostics are reported but nothing is asserted.
    NotAsserted(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegeneracyReport {
    pub dim: usize,
    pub gap: f64,
    pub theta_sign: i8,
    pub commutator_residual: f64,
    pub clusters: Vec<ClusterDiagnostics>,
    pub odd_clusters: usize,
    pub max_multiplicity: usize,
    pub max_pairing: f64,
    pub max_partner_residual: f64,
    pub thresholds: KramersThresholds,
    pub assertion_enabled: bool,
    pub verdict: KramersVerdict,
}

impl DegeneracyReport {
    pub fn holds(&self) -> bool {
        self.verdict == KramersVerdict::Holds
    }

    pub fn all_even(&self) -> bool {
        self.odd_clusters == 0
    }
}

pub fn kramers_report<T: Real>(
    h: &HermitianOperator<T>,
    theta: &AntiunitaryOperator<T>,
    gap: T,
) -> Result<DegeneracyReport> {
    let spectrum = diagonalize_dense(h, Eigenpairs::All)?;
    kramers_report_from(h, theta, &spectrum, gap, KramersThresholds::default())
}

/// Builds the report from an already computed full spectrum.
pub fn kramers_report_from<T: Real>(
    h: &HermitianOperator<T>,
    theta: &AntiunitaryOperator<T>,
    spectrum: &SpectralResult<T>,
    gap: T,
    thresholds: KramersThresholds,
) -> Result<DegeneracyReport> {
    if spectrum.len() != h.dim() {
        return Err(Error::Precondition(format!(
            "Kramers report needs the full spectrum ({} of {} eigenpairs given)",
            spectrum.len(),
            h.dim()
        )));
    }
    let commutator = check_commutes(h, theta)?.to_f64_lossy();
    let clusters = cluster(&spectrum.eigenvalues, gap)?;
    let v = &spectrum.eigenvectors;
    let theta_v = theta.apply_block(v);

    let mut diagnostics = Vec::with_capacity(clusters.len());
    for c in &clusters {
        let cols = c.start..c.start + c.multiplicity;
        let block = v.slice(s![.., cols.clone()]);
        let mut pairing = 0.0f64;
        let mut partner = 0.0f64;
        for col in cols {
            let phi = v.column(col);
            let tphi = theta_v.column(col);
            let overlap = phi
                .iter()
                .zip(tphi.iter())
                .fold(Complex::<T>::zero(), |acc, (a, b)| acc + a.conj() * b);
            pairing = pairing.max(overlap.norm().to_f64_lossy());
            // Component of θφ outside the cluster eigenspace.
            let mut rest = tphi.to_owned();
            for q in block.columns() {
                let c = q
                    .iter()
                    .zip(rest.iter())
                    .fold(Complex::<T>::zero(), |acc, (a, b)| acc + a.conj() * b);
                rest.scaled_add(-c, &q);
            }
            let r = rest.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt();
            partner = partner.max(r.to_f64_lossy());
        }
        let eig = &spectrum.eigenvalues;
        let first = c.start;
        let last = c.start + c.multiplicity - 1;
        let below = (first > 0).then(|| (eig[first] - eig[first - 1]).to_f64_lossy());
        let above = (last + 1 < eig.len()).then(|| (eig[last + 1] - eig[last]).to_f64_lossy());
        let isolation_gap = below.into_iter().chain(above).reduce(f64::min);
        diagnostics.push(ClusterDiagnostics {
            cluster: c.clone(),
            pairing,
            partner_residual: partner,
            isolation_gap,
            resolved: isolation_gap.is_none_or(|g| g >= thresholds.isolation * c.spread),
        });
    }

    let odd_clusters = diagnostics
        .iter()
        .filter(|d| d.cluster.multiplicity % 2 == 1)
        .count();
    let max_multiplicity = diagnostics
        .iter()
        .map(|d| d.cluster.multiplicity)
        .max()
        .unwrap_or(0);
    let max_pairing = diagnostics.iter().map(|d| d.pairing).fold(0.0, f64::max);
    let max_partner = diagnostics
        .iter()
        .map(|d| d.partner_residual)
        .fold(0.0, f64::max);

    let sign = theta.sign();
    let verdict = if sign != -1 {
        KramersVerdict::NotAsserted(format!("θ² = {sign:+}1; degeneracy requires θ² = −1"))
    } else if !(commutator <= thresholds.commutator) {
        KramersVerdict::NotAsserted(format!(
            "commutator residual {commutator:e} exceeds {:e}",
            thresholds.commutator
        ))
    } else if let Some(d) = diagnostics.iter().find(|d| !d.resolved) {
        KramersVerdict::Violated(format!(
            "cluster at {} is not resolved (isolation {:e} < {} × spread {:e})",
            d.cluster.mean, d.isolation_gap.unwrap_or(f64::NAN), thresholds.isolation, d.cluster.spread
        ))
    } else if odd_clusters > 0 {
        let d = diagnostics
            .iter()
            .find(|d| d.cluster.multiplicity % 2 == 1)
            .expect("counted above");
        KramersVerdict::Violated(format!(
            "{odd_clusters} cluster(s) with odd multiplicity, first at {} (×{})",
            d.cluster.mean, d.cluster.multiplicity
        ))
    } else if !(max_pairing <= thresholds.pairing) {
        KramersVerdict::Violated(format!(
            "max |<φ, θφ>| = {max_pairing:e} exceeds {:e}",
            thresholds.pairing
        ))
    } else if !(max_partner <= thresholds.partner) {
        KramersVerdict::Violated(format!(
            "θ leaves a cluster eigenspace by {max_partner:e} > {:e}",
            thresholds.partner
        ))
    } else {
        KramersVerdict::Holds
    };

    Ok(DegeneracyReport {
        dim: h.dim(),
        gap: gap.to_f64_lossy(),
        theta_sign: sign,
        commutator_residual: commutator,
        clusters: diagnostics,
        odd_clusters,
        max_multiplicity,
        max_pairing,
        max_partner_residual: max_partner,
        thresholds,
        assertion_enabled: sign == -1 && commutator <= thresholds.commutator,
        verdict,
    })
}
