//! Run configuration, read from TOML.
//!
//! ```toml
//! n_max = 2
//! e = 0.5
//! p = [0.0, 0.0, 0.3]
//! g_spin = "half-e"          # or a number
//! n_spins = 1
//! checks = ["kramers", "semigroup"]
//! gap = 1e-8
//! t_values = [0.1, 1.0, 10.0]
//! seed = 7
//!
//! [modes]
//! kpoints = [[0.0, 0.0, 1.0, 496.1], [0.6, 0.0, 0.8, 1.0]]   # kx, ky, kz, weight
//! # file = "modes.csv"       # alternatively: rows kx,ky,kz,weight
//! # count = 3                # keep the first `count` modes
//!
//! [grid]                     # optional: electron on a 1-D lattice
//! half_width = 4
//! spacing = 0.5
//! potential = "quadratic"    # or "linear", "zero", or an explicit table
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{build_modes, ModeSet, Vec3};
use crate::operators::{GridSpec, SpinCoupling};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Kramers,
    Semigroup,
    Jreal,
    Algebra,
    NegativeControl,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GSpin {
    Named(String),
    Value(f64),
}

impl Default for GSpin {
    fn default() -> Self {
        GSpin::Named("half-e".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kpoints: Option<Vec<[f64; 4]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Potential {
    Named(String),
    Table(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: usize,
    pub spacing: f64,
    #[serde(default = "default_potential")]
    pub potential: Potential,
}

fn default_potential() -> Potential {
    Potential::Named("zero".into())
}

fn default_gap() -> f64 {
    crate::spectral::DEFAULT_GAP
}

fn default_spins() -> i64 {
    1
}

fn default_t_values() -> Vec<f64> {
    vec![0.1, 1.0, 10.0]
}

fn default_checks() -> Vec<Check> {
    vec![Check::Kramers]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub modes: ModesConfig,
    pub n_max: i64,
    #[serde(default)]
    pub p: [f64; 3],
    #[serde(default)]
    pub e: f64,
    #[serde(default)]
    pub g_spin: GSpin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default = "default_spins")]
    pub n_spins: i64,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
    #[serde(default = "default_gap")]
    pub gap: f64,
    #[serde(default = "default_t_values")]
    pub t_values: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative mode-file paths resolve against its directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let (Some(file), Some(dir)) = (cfg.modes.file.as_mut(), path.parent()) {
            if file.is_relative() {
                *file = dir.join(&*file);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_max < 0 {
            return bad(format!("n_max = {} must be ≥ 0", self.n_max));
        }
        if self.n_max > u32::MAX as i64 {
            return bad(format!("n_max = {} is out of range", self.n_max));
        }
        if self.n_spins < 1 {
            return bad(format!("n_spins = {} must be ≥ 1", self.n_spins));
        }
        if !(self.gap > 0.0) || !self.gap.is_finite() {
            return bad(format!("gap = {} must be positive and finite", self.gap));
        }
        if !self.e.is_finite() || self.p.iter().any(|x| !x.is_finite()) {
            return bad("e and p must be finite".into());
        }
        if let GSpin::Value(g) = self.g_spin {
            if !g.is_finite() {
                return bad(format!("g_spin = {g} must be finite"));
            }
        }
        if let GSpin::Named(name) = &self.g_spin {
            if name != "half-e" {
                return bad(format!("g_spin = \"{name}\": expected a number or \"half-e\""));
            }
        }
        if self.t_values.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return bad("t_values must be finite and non-negative".into());
        }
        match (&self.modes.kpoints, &self.modes.file) {
            (None, None) => return bad("[modes] needs either `kpoints` or `file`".into()),
            (Some(_), Some(_)) => return bad("[modes] takes `kpoints` or `file`, not both".into()),
            (Some(rows), None) => {
                if rows.iter().flatten().any(|x| !x.is_finite()) {
                    return bad("k-point rows must be finite".into());
                }
            }
            _ => {}
        }
        if self.modes.count == Some(0) {
            return bad("modes.count must be at least 1".into());
        }
        if let Some(grid) = &self.grid {
            if self.n_spins != 1 {
                return bad("the grid Hamiltonian carries a single spin; set n_spins = 1".into());
            }
            if !(grid.spacing > 0.0) || !grid.spacing.is_finite() {
                return bad(format!("grid.spacing = {} must be positive", grid.spacing));
            }
            if let Potential::Table(t) = &grid.potential {
                if t.len() != 2 * grid.half_width + 1 {
                    return bad(format!(
                        "grid.potential has {} entries; expected 2·half_width + 1 = {}",
                        t.len(),
                        2 * grid.half_width + 1
                    ));
                }
            }
            if let Potential::Named(n) = &grid.potential {
                if !matches!(n.as_str(), "zero" | "quadratic" | "linear") {
                    return bad(format!(
                        "grid.potential = \"{n}\": expected \"zero\", \"quadratic\", \"linear\" or a table"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn n_max(&self) -> u32 {
        self.n_max as u32
    }

    pub fn spins(&self) -> usize {
        self.n_spins as usize
    }

    pub fn spin_coupling(&self) -> SpinCoupling<f64> {
        match self.g_spin {
            GSpin::Value(g) => SpinCoupling::Value(g),
            GSpin::Named(_) => SpinCoupling::HalfCharge,
        }
    }

    pub fn has(&self, check: Check) -> bool {
        self.checks.contains(&check)
    }

    pub fn kpoints(&self) -> Result<Vec<(Vec3<f64>, f64)>> {
        let rows = match (&self.modes.kpoints, &self.modes.file) {
            (Some(rows), _) => rows.clone(),
            (None, Some(path)) => read_kpoint_file(path)?,
            (None, None) => return Err(Error::Config("no k-points given".into())),
        };
        Ok(rows.into_iter().map(|r| ([r[0], r[1], r[2]], r[3])).collect())
    }

    pub fn mode_set(&self) -> Result<ModeSet<f64>> {
        let modes = build_modes(&self.kpoints()?)?;
        match self.modes.count {
            Some(c) => modes.truncated(c),
            None => Ok(modes),
        }
    }

    /// Grid and potential table, if a grid is configured.
    pub fn grid_spec(&self) -> Result<Option<(GridSpec<f64>, Vec<f64>)>> {
        let Some(grid) = &self.grid else {
            return Ok(None);
        };
        let spec = GridSpec::symmetric(grid.half_width, grid.spacing)?;
        let table = match &grid.potential {
            Potential::Table(t) => t.clone(),
            Potential::Named(n) => spec
                .points()
                .iter()
                .map(|&x| match n.as_str() {
                    "quadratic" => x * x,
                    "linear" => x,
                    _ => 0.0,
                })
                .collect(),
        };
        Ok(Some((spec, table)))
    }
}

/// Rows `kx,ky,kz,weight`; blank lines and `#` comments are skipped.
fn read_kpoint_file(path: &Path) -> Result<Vec<[f64; 4]>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Config(format!("cannot read mode file {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 4 {
            return Err(Error::Config(format!(
                "{}: row {} has {} fields, expected kx,ky,kz,weight",
                path.display(),
                line + 1,
                record.len()
            )));
        }
        let mut row = [0.0; 4];
        for (slot, field) in row.iter_mut().zip(record.iter()) {
            *slot = field.parse().map_err(|_| {
                Error::Config(format!(
                    "{}: row {}: `{field}` is not a number",
                    path.display(),
                    line + 1
                ))
            })?;
        }
        rows.push(row);
    }
    Ok(rows)
}
