//! Experiment harness: configuration, named figure reproductions, CSV and
//! SVG output, and run manifests.

pub mod config;
mod experiments;
pub mod manifest;
pub mod plot;
pub mod runs;
pub mod table;

use std::fs;
use std::path::Path;

pub use config::{ExperimentConfig, ExperimentKind, GateChoice, Grid, ModelKind, Overrides};
pub use experiments::{design, run_experiment, DesignReport, GateDesign};
pub use manifest::{Convergence, Manifest, CONVERGENCE_TOL};
pub use plot::{emit_plot, PlotSpec, PlotStyle};
pub use table::{emit_csv, read_csv, Table};

use crate::error::{Error, Result};

/// One CSV (and optionally its plot) produced by an experiment.
#[derive(Debug, Clone)]
pub struct Output {
    /// File stem; the CSV is `<name>.csv`, the plot `<name>.svg`.
    pub name: String,
    pub table: Table,
    pub plot: Option<PlotSpec>,
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub manifest: Manifest,
    pub outputs: Vec<Output>,
}

impl SimResult {
    pub fn output(&self, name: &str) -> Option<&Table> {
        self.outputs.iter().find(|o| o.name == name).map(|o| &o.table)
    }

    /// `Err(Convergence)` when a refinement moved the result by more than
    /// the tolerance. Outputs are still valid to write.
    pub fn status(&self) -> Result<()> {
        let c = &self.manifest.convergence;
        if c.pass() {
            Ok(())
        } else {
            Err(Error::Convergence(format!(
                "fock delta {:?}, step delta {:?} exceed {:e} ({})",
                c.fock_cutoff_delta, c.step_halving_delta, c.tolerance, c.probe
            )))
        }
    }

    /// Writes every CSV, plot and `manifest.json` into `dir`. Files are
    /// written one after another from this thread only.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for o in &self.outputs {
            emit_csv(&o.table, &dir.join(format!("{}.csv", o.name)))?;
            if let Some(spec) = &o.plot {
                emit_plot(&o.table, spec, &dir.join(format!("{}.svg", o.name)))?;
            }
        }
        self.manifest.write(&dir.join("manifest.json"))
    }
}
