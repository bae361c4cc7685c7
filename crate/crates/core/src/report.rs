//! Report records and their on-disk forms.
//!
//! Every asserted pass carries the measured value next to its threshold so a
//! report can be audited without rerunning it. Field order is fixed by the
//! struct definitions, which keeps the JSON byte-stable for a given config
//! and seed; only `wall_time_s` varies between runs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;
use crate::operators::SpaceTag;
use crate::semigroup::{HiroshimaSpohn, JrealGaps};
use crate::spectral::{Cluster, DegeneracyReport};
use crate::symmetry::ClosureOutcome;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A negative control that failed, as it must.
    ExpectedFailure,
    /// Hypotheses not met; diagnostics only.
    NotAsserted,
}

impl Status {
    pub fn is_ok(self) -> bool {
        self != Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: Status,
    pub measured: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckOutcome {
    /// `Pass` when `measured ≤ threshold`, else `Fail`.
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            status: if measured <= threshold {
                Status::Pass
            } else {
                Status::Fail
            },
            measured,
            threshold,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HamiltonianInfo {
    pub kind: String,
    pub space: SpaceTag,
    pub dim: usize,
    pub fock_dim: usize,
    pub modes: usize,
    pub nnz: usize,
    pub spin_coupling: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential_is_even: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaInfo {
    pub spin_factors: usize,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionResidual {
    pub function: String,
    pub parameter: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemigroupSection {
    pub theta_commutation: Vec<FunctionResidual>,
    pub threshold: f64,
    pub ground_projection_trace: f64,
    pub ground_multiplicity: usize,
    pub semigroup_law_defect: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub hiroshima_spohn: Vec<HiroshimaSpohn>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JrealEntry {
    pub vector: String,
    pub function: String,
    #[serde(flatten)]
    pub gaps: JrealGaps,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Relation {
    pub name: String,
    /// `commutes` (`j a = a j`) or `anticommutes` (`j a = −a j`).
    pub relation: String,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgebraSection {
    pub relations: Vec<Relation>,
    pub closure: Vec<ClosureOutcome>,
    /// `i·A(0)_x`: must leave the real algebra.
    pub imaginary_multiple: ClosureOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NegativeControl {
    pub probe: String,
    pub strength: f64,
    pub commutation_residual: f64,
    pub odd_clusters: usize,
    pub kramers: crate::spectral::KramersVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRecord {
    pub schema_version: u32,
    pub artifact_version: String,
    pub seed: u64,
    pub config: RunConfig,
    pub hamiltonian: HamiltonianInfo,
    pub theta: ThetaInfo,
    pub commutation: CheckOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kramers: Option<DegeneracyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semigroup: Option<SemigroupSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jreal: Option<Vec<JrealEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negative_control: Option<NegativeControl>,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
    pub wall_time_s: f64,
}

impl ReportRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(self.to_json()?.as_bytes())?;
        out.write_all(b"\n")?;
        Ok(())
    }

    /// Clusters of the Kramers report, if one was produced.
    pub fn clusters(&self) -> Vec<Cluster> {
        self.kramers
            .as_ref()
            .map(|k| k.clusters.iter().map(|d| d.cluster.clone()).collect())
            .unwrap_or_default()
    }
}

/// `mean,multiplicity,spread`, ascending by mean.
pub fn write_clusters_csv(path: &Path, clusters: &[Cluster]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["mean", "multiplicity", "spread"])?;
    for c in clusters {
        w.write_record([
            format!("{:.17e}", c.mean),
            c.multiplicity.to_string(),
            format!("{:.17e}", c.spread),
        ])?;
    }
    w.flush()?;
    Ok(())
}
