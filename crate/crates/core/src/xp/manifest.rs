//! Run manifests: everything needed to reproduce a run's CSVs, and nothing
//! that changes between identical runs (no timestamps, no timings).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind, ModelKind};
use crate::device::RegimeReport;
use crate::error::{Error, Result};

/// Largest fidelity change tolerated between a run and its refined copy.
pub const CONVERGENCE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    /// `|F(n_max) − F(n_max + 5)|`; `None` when no cavity is simulated.
    pub fock_cutoff_delta: Option<f64>,
    pub fock_cutoffs: Option<[usize; 2]>,
    /// `|F(h) − F(h/2)|` for the RK4 step `h`.
    pub step_halving_delta: Option<f64>,
    pub steps: Option<usize>,
    pub tolerance: f64,
    /// What the deltas were measured on.
    pub probe: String,
}

impl Convergence {
    pub fn none(probe: &str) -> Self {
        Self {
            fock_cutoff_delta: None,
            fock_cutoffs: None,
            step_halving_delta: None,
            steps: None,
            tolerance: CONVERGENCE_TOL,
            probe: probe.into(),
        }
    }

    pub fn pass(&self) -> bool {
        [self.fock_cutoff_delta, self.step_halving_delta]
            .into_iter()
            .flatten()
            .all(|d| d <= self.tolerance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: ExperimentKind,
    pub version: String,
    pub config: ExperimentConfig,
    pub model: ModelKind,
    pub seed: u64,
    /// Noise seeds actually drawn, in sample order.
    pub noise_seeds: Vec<u64>,
    pub regime: RegimeReport,
    /// `δT/2π` when integral.
    pub frame_periods: Option<i64>,
    pub convergence: Convergence,
    pub summary: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}
