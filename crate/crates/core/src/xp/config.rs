//! Experiment configuration: a flat `key = value` TOML file layered over the
//! built-in defaults, then command-line overrides.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::device::SystemParams;
use crate::error::{Error, Result};
use crate::path::{GateKind, GateSpec};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Fields,
    GatesEffective,
    GatesFull,
    Systematic,
    AwgnSamples,
    AwgnSweep,
    Decoherence,
    Phases,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Fields,
        ExperimentKind::GatesEffective,
        ExperimentKind::GatesFull,
        ExperimentKind::Systematic,
        ExperimentKind::AwgnSamples,
        ExperimentKind::AwgnSweep,
        ExperimentKind::Decoherence,
        ExperimentKind::Phases,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Fields => "fields",
            ExperimentKind::GatesEffective => "gates_effective",
            ExperimentKind::GatesFull => "gates_full",
            ExperimentKind::Systematic => "systematic",
            ExperimentKind::AwgnSamples => "awgn_samples",
            ExperimentKind::AwgnSweep => "awgn_sweep",
            ExperimentKind::Decoherence => "decoherence",
            ExperimentKind::Phases => "phases",
        }
    }

    /// Figure identifier used by `reproduce`.
    pub fn figure(self) -> &'static str {
        match self {
            ExperimentKind::Fields => "fig2",
            ExperimentKind::GatesEffective => "fig3a",
            ExperimentKind::GatesFull => "fig3b",
            ExperimentKind::Systematic => "fig4",
            ExperimentKind::AwgnSamples => "fig5a",
            ExperimentKind::AwgnSweep => "fig5b",
            ExperimentKind::Decoherence => "fig6",
            ExperimentKind::Phases => "phases",
        }
    }

    /// Accepts either the experiment name or the figure identifier.
    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s || k.figure() == s)
    }

    pub fn is_sweep(self) -> bool {
        matches!(
            self,
            ExperimentKind::Systematic
                | ExperimentKind::AwgnSamples
                | ExperimentKind::AwgnSweep
                | ExperimentKind::Decoherence
        )
    }

    fn default_gates(self) -> Vec<GateKind> {
        match self {
            ExperimentKind::AwgnSamples | ExperimentKind::AwgnSweep | ExperimentKind::Decoherence => {
                vec![GateKind::Not]
            }
            _ => vec![GateKind::PiPhase, GateKind::Not, GateKind::Hadamard],
        }
    }

    fn default_model(self) -> ModelKind {
        match self {
            ExperimentKind::GatesFull | ExperimentKind::Decoherence => ModelKind::Full,
            _ => ModelKind::Effective,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Two-level model on the dressed basis.
    Effective,
    /// Qutrit ⊗ truncated cavity.
    Full,
}

impl ModelKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "effective" => Some(ModelKind::Effective),
            "full" => Some(ModelKind::Full),
            _ => None,
        }
    }
}

/// A gate as `(θ, Θ_g)`; named gates carry their textbook target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateChoice {
    pub kind: GateKind,
    pub theta: f64,
    pub theta_g: f64,
}

impl GateChoice {
    pub fn named(kind: GateKind) -> Option<Self> {
        let g = GateSpec::by_kind(kind)?;
        Some(Self {
            kind,
            theta: g.theta,
            theta_g: g.theta_g,
        })
    }

    pub fn spec(&self) -> GateSpec {
        match GateSpec::by_kind(self.kind) {
            Some(g) if g.theta == self.theta && g.theta_g == self.theta_g => g,
            _ => GateSpec::from_angles(self.theta, self.theta_g),
        }
    }

    pub fn label(&self) -> &'static str {
        self.kind.label()
    }
}

/// Inclusive uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => vec![],
            1 => vec![self.min],
            n => (0..n)
                .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.points == 0 || !self.min.is_finite() || !self.max.is_finite() || self.max < self.min {
            return Err(Error::Config(format!("{name}: need finite min <= max and at least one point")));
        }
        Ok(())
    }
}

/// Fully resolved configuration. Serialized verbatim into the manifest, and
/// accepted back from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub params: SystemParams,
    pub gates: Vec<GateChoice>,
    pub chi0: f64,
    pub model: ModelKind,
    /// Systematic error applied to single runs.
    pub epsilon: f64,
    /// Noise level for single runs and `awgn_samples`.
    pub snr_db: f64,
    pub seed: u64,
    /// Seeds per stochastic point.
    pub samples: usize,
    pub epsilon_grid: Grid,
    pub snr_grid: Grid,
    /// Maximum `(Γ_d, Γ_s, Γ_κ)` in kHz.
    pub rate_max_khz: [f64; 3],
    pub rate_points: usize,
    pub rates_angular: bool,
    /// Fixed RK4 step count; `None` picks the per-model default.
    pub steps: Option<usize>,
    pub fast: bool,
    pub force: bool,
}

/// Effective-model RK4 steps; halving the step changes F̄ by ~1e-11.
pub const EFFECTIVE_STEPS: usize = 8000;
/// Fock cutoff used for the master equation unless overridden.
pub const DECOHERENCE_N_MAX: usize = 12;

/// Keys accepted in a config file. Frequencies are linear (Hz) and
/// multiplied by 2π on load.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    lambda_hz: Option<f64>,
    delta_hz: Option<f64>,
    #[serde(rename = "Delta_hz")]
    big_delta_hz: Option<f64>,
    alpha0: Option<f64>,
    #[serde(rename = "T_us")]
    t_us: Option<f64>,
    n_max: Option<usize>,
    omega0_hz: Option<f64>,
    omega_ge_hz: Option<f64>,
    omega_ef_hz: Option<f64>,
    theta: Option<f64>,
    theta_g_rad: Option<f64>,
    chi0: Option<f64>,

    experiment: Option<String>,
    gate: Option<String>,
    model: Option<String>,
    epsilon: Option<f64>,
    snr_db: Option<f64>,
    seed: Option<u64>,
    samples: Option<usize>,
    epsilon_min: Option<f64>,
    epsilon_max: Option<f64>,
    epsilon_points: Option<usize>,
    snr_min_db: Option<f64>,
    snr_max_db: Option<f64>,
    snr_points: Option<usize>,
    gamma_d_max_khz: Option<f64>,
    gamma_s_max_khz: Option<f64>,
    gamma_kappa_max_khz: Option<f64>,
    rate_points: Option<usize>,
    rates_angular: Option<bool>,
    steps: Option<usize>,
    fast: Option<bool>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub experiment: Option<ExperimentKind>,
    pub seed: Option<u64>,
    pub n_max: Option<usize>,
    pub steps: Option<usize>,
    pub force: bool,
    pub rates_angular: bool,
    pub fast: bool,
}

impl ExperimentConfig {
    /// Defaults for `kind` with no file and no overrides.
    pub fn defaults(kind: ExperimentKind) -> Self {
        Self::resolve_raw(RawConfig::default(), &Overrides {
            experiment: Some(kind),
            ..Overrides::default()
        })
        .expect("defaults are valid")
    }

    pub fn from_toml_str(text: &str, ov: &Overrides) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::resolve_raw(raw, ov)
    }

    /// Reads a TOML config, or a `manifest.json` from an earlier run (whose
    /// resolved config is reused as is, with overrides applied on top).
    pub fn load(path: &Path, ov: &Overrides) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if path.extension().is_some_and(|e| e == "json") {
            let v: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let cfg = v.get("config").cloned().unwrap_or(v);
            let mut cfg: Self =
                serde_json::from_value(cfg).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            cfg.apply(ov);
            cfg.validate()?;
            return Ok(cfg);
        }
        Self::from_toml_str(&text, ov)
    }

    fn apply(&mut self, ov: &Overrides) {
        if let Some(k) = ov.experiment {
            self.experiment = k;
        }
        if let Some(s) = ov.seed {
            self.seed = s;
        }
        if let Some(n) = ov.n_max {
            self.params.n_max = n;
        }
        if ov.steps.is_some() {
            self.steps = ov.steps;
        }
        self.force |= ov.force;
        self.rates_angular |= ov.rates_angular;
        self.fast |= ov.fast;
    }

    fn resolve_raw(raw: RawConfig, ov: &Overrides) -> Result<Self> {
        let experiment = match (ov.experiment, raw.experiment.as_deref()) {
            (Some(k), _) => k,
            (None, Some(s)) => {
                ExperimentKind::parse(s).ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))?
            }
            (None, None) => ExperimentKind::GatesEffective,
        };
        let fast = ov.fast || raw.fast.unwrap_or(false);

        let mut params = SystemParams::nominal();
        let hz = |v: Option<f64>, d: f64| v.map_or(d, |x| TWO_PI * x);
        params.lambda = hz(raw.lambda_hz, params.lambda);
        params.delta = hz(raw.delta_hz, params.delta);
        params.big_delta = hz(raw.big_delta_hz, params.big_delta);
        params.omega0 = hz(raw.omega0_hz, params.omega0);
        params.omega_ge = hz(raw.omega_ge_hz, params.omega_ge);
        params.omega_ef = hz(raw.omega_ef_hz, params.omega_ef);
        params.alpha0 = raw.alpha0.unwrap_or(params.alpha0);
        params.duration = raw.t_us.map_or(params.duration, |t| t * 1e-6);
        let default_n = if experiment == ExperimentKind::Decoherence {
            DECOHERENCE_N_MAX
        } else {
            params.n_max
        };
        params.n_max = ov.n_max.or(raw.n_max).unwrap_or(default_n);

        let gates = resolve_gates(experiment, raw.gate.as_deref(), raw.theta, raw.theta_g_rad)?;
        let model = match raw.model.as_deref() {
            Some(s) => ModelKind::parse(s).ok_or_else(|| Error::Config(format!("unknown model {s:?}")))?,
            None => experiment.default_model(),
        };

        let cfg = Self {
            experiment,
            params,
            gates,
            chi0: raw.chi0.unwrap_or(1.0),
            model,
            epsilon: raw.epsilon.unwrap_or(0.0),
            snr_db: raw.snr_db.unwrap_or(10.0),
            seed: ov.seed.or(raw.seed).unwrap_or(0),
            samples: raw.samples.unwrap_or(if fast { 10 } else { 50 }),
            epsilon_grid: Grid {
                min: raw.epsilon_min.unwrap_or(-0.2),
                max: raw.epsilon_max.unwrap_or(0.2),
                points: raw.epsilon_points.unwrap_or(if fast { 11 } else { 81 }),
            },
            snr_grid: Grid {
                min: raw.snr_min_db.unwrap_or(5.0),
                max: raw.snr_max_db.unwrap_or(20.0),
                points: raw.snr_points.unwrap_or(16),
            },
            rate_max_khz: [
                raw.gamma_d_max_khz.unwrap_or(50.0),
                raw.gamma_s_max_khz.unwrap_or(50.0),
                raw.gamma_kappa_max_khz.unwrap_or(10.0),
            ],
            rate_points: raw.rate_points.unwrap_or(if fast { 3 } else { 6 }),
            rates_angular: ov.rates_angular || raw.rates_angular.unwrap_or(false),
            steps: ov.steps.or(raw.steps),
            fast,
            force: ov.force,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.gates.is_empty() {
            return Err(Error::Config("no gate selected".into()));
        }
        if !self.chi0.is_finite() || !self.epsilon.is_finite() || self.snr_db.is_nan() {
            return Err(Error::Config("chi0, epsilon and snr_db must be numbers".into()));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        self.epsilon_grid.validate("epsilon grid")?;
        self.snr_grid.validate("snr grid")?;
        if self.rate_points < 2 {
            return Err(Error::Config("rate_points must be at least 2".into()));
        }
        if self.rate_max_khz.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
            return Err(Error::Config("rate maxima must be non-negative".into()));
        }
        if self.experiment == ExperimentKind::Decoherence && self.model != ModelKind::Full {
            return Err(Error::Config("decoherence runs only with model = \"full\"".into()));
        }
        if self.steps == Some(0) {
            return Err(Error::Config("steps must be positive".into()));
        }
        Ok(())
    }

    /// Output subdirectory used by `reproduce all`.
    pub fn subdir(&self, root: &Path) -> PathBuf {
        root.join(self.experiment.figure())
    }
}

fn resolve_gates(
    kind: ExperimentKind,
    gate: Option<&str>,
    theta: Option<f64>,
    theta_g: Option<f64>,
) -> Result<Vec<GateChoice>> {
    let kinds = match gate {
        None => kind.default_gates(),
        Some("all") => vec![GateKind::PiPhase, GateKind::Not, GateKind::Hadamard],
        Some(s) => vec![GateKind::parse(s).ok_or_else(|| Error::Config(format!("unknown gate {s:?}")))?],
    };
    if theta.is_some() || theta_g.is_some() {
        // explicit angles define a single custom gate
        let base = kinds
            .first()
            .and_then(|k| GateChoice::named(*k))
            .unwrap_or(GateChoice::named(GateKind::Not).expect("named"));
        let g = GateChoice {
            kind: GateKind::Custom,
            theta: theta.unwrap_or(base.theta),
            theta_g: theta_g.unwrap_or(base.theta_g),
        };
        if !g.theta.is_finite() || !g.theta_g.is_finite() {
            return Err(Error::Config("theta and theta_g_rad must be finite".into()));
        }
        return Ok(vec![g]);
    }
    kinds
        .into_iter()
        .map(|k| GateChoice::named(k).ok_or_else(|| Error::Config("custom gate needs theta and theta_g_rad".into())))
        .collect()
}
