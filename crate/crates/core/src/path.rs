//! Geometric evolution paths built by invariant-based reverse engineering.
//!
//! The two-level effective dynamics lives on `{|+,g⟩, |0̃,e⟩}` (basis tag
//! [`BasisTag::Effective2`], index 0 = `|+,g⟩`, index 1 = `|0̃,e⟩`) with
//! `H_e = ½(Ω_x σ_x + Ω_y σ_y)`. The invariant
//! `I = sinγ₁ sinγ₂ σ_x + sinγ₁ cosγ₂ σ_y + cosγ₁ σ_z` fixes the controls;
//! the system follows the eigenvector `|φ₋⟩` and picks up the phase
//! `μ₋ = θ_d⁻ + θ_g⁻`.
//!
//! `γ₂(t) = −Θ_g ξ(t) + γ̃₂(t)` where `ξ` steps from 0 to 1 at `T/2` and
//! `γ̃₂ = c·sinᵖγ₁` (the error-nulling design is `c = 4χ₀/3`, `p = 3`).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use ndarray::{array, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{BasisTag, ComplexOperator, StateVector};
use crate::quadrature::integrate;

/// Absolute tolerance for phase quadratures, in radians.
pub const PHASE_TOL: f64 = 1e-9;

/// Default number of uniform samples for exported control fields.
pub const DEFAULT_SAMPLES: usize = 4001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    PiPhase,
    Not,
    Hadamard,
    Custom,
}

impl GateKind {
    pub fn label(self) -> &'static str {
        match self {
            GateKind::PiPhase => "pi_phase",
            GateKind::Not => "not",
            GateKind::Hadamard => "hadamard",
            GateKind::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "pi_phase" | "pi" => Some(GateKind::PiPhase),
            "not" | "NOT" => Some(GateKind::Not),
            "hadamard" | "h" => Some(GateKind::Hadamard),
            "custom" => Some(GateKind::Custom),
            _ => None,
        }
    }
}

/// A logical gate: the dressed-state angle `θ`, the geometric phase `Θ_g`
/// and the 2×2 target on `{|𝕆⟩, |𝟙⟩}`.
#[derive(Debug, Clone)]
pub struct GateSpec {
    pub kind: GateKind,
    pub theta: f64,
    pub theta_g: f64,
    pub target: ComplexOperator,
}

fn logical(m: Array2<C64>) -> ComplexOperator {
    ComplexOperator::new(BasisTag::Logical, m).expect("2x2")
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

impl GateSpec {
    /// `U_π = |𝕆⟩⟨𝕆| − |𝟙⟩⟨𝟙|` with `(θ, Θ_g) = (π, π)`.
    pub fn pi_phase() -> Self {
        Self {
            kind: GateKind::PiPhase,
            theta: PI,
            theta_g: PI,
            target: logical(array![[c(1.0), c(0.0)], [c(0.0), c(-1.0)]]),
        }
    }

    /// `U_NOT = |𝕆⟩⟨𝟙| + |𝟙⟩⟨𝕆|` with `(θ, Θ_g) = (π/4, π)`.
    pub fn not() -> Self {
        Self {
            kind: GateKind::Not,
            theta: PI / 4.0,
            theta_g: PI,
            target: logical(array![[c(0.0), c(1.0)], [c(1.0), c(0.0)]]),
        }
    }

    /// `(U_π + U_NOT)/√2` with `(θ, Θ_g) = (π/8, π)`.
    pub fn hadamard() -> Self {
        let s = FRAC_1_SQRT_2;
        Self {
            kind: GateKind::Hadamard,
            theta: PI / 8.0,
            theta_g: PI,
            target: logical(array![[c(s), c(s)], [c(s), c(-s)]]),
        }
    }

    pub fn custom(theta: f64, theta_g: f64, target: ComplexOperator) -> Result<Self> {
        if target.basis() != BasisTag::Logical {
            return Err(Error::BasisMismatch {
                expected: BasisTag::Logical,
                found: target.basis(),
            });
        }
        if target.unitarity_defect() > 1e-12 {
            return Err(Error::invalid("target gate is not unitary"));
        }
        Ok(Self {
            kind: GateKind::Custom,
            theta,
            theta_g,
            target,
        })
    }

    /// Custom gate whose target is the gate the path itself produces.
    pub fn from_angles(theta: f64, theta_g: f64) -> Self {
        let target = gate_unitary_from_angles(theta, theta_g);
        Self {
            kind: GateKind::Custom,
            theta,
            theta_g,
            target,
        }
    }

    pub fn by_kind(kind: GateKind) -> Option<Self> {
        match kind {
            GateKind::PiPhase => Some(Self::pi_phase()),
            GateKind::Not => Some(Self::not()),
            GateKind::Hadamard => Some(Self::hadamard()),
            GateKind::Custom => None,
        }
    }

    /// Dressed states `|+⟩ = cosθ|𝕆⟩ + sinθ|𝟙⟩`, `|−⟩ = sinθ|𝕆⟩ − cosθ|𝟙⟩`
    /// as logical-basis coefficients.
    pub fn dressed(&self) -> ([f64; 2], [f64; 2]) {
        dressed(self.theta)
    }
}

pub(crate) fn dressed(theta: f64) -> ([f64; 2], [f64; 2]) {
    let (s, co) = theta.sin_cos();
    ([co, s], [s, -co])
}

/// The smooth part of `γ₂`: `γ̃₂ = amplitude · sin^power(γ₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseProfile {
    pub amplitude: f64,
    pub power: u32,
}

impl PhaseProfile {
    pub const NONE: PhaseProfile = PhaseProfile {
        amplitude: 0.0,
        power: 0,
    };

    /// Profile that makes `χ = γ₂ + 2μ₋` equal to `Θ_gξ + χ₀(2γ₁ − sin2γ₁)`.
    pub fn error_nulling(chi0: f64) -> Self {
        Self {
            amplitude: 4.0 * chi0 / 3.0,
            power: 3,
        }
    }

    fn is_zero(&self) -> bool {
        self.amplitude == 0.0 || self.power == 0
    }

    fn value(&self, g1: f64) -> f64 {
        if self.power == 0 {
            return 0.0;
        }
        self.amplitude * g1.sin().powi(self.power as i32)
    }

    /// `dγ̃₂/dt`.
    fn rate(&self, g1: f64, g1_dot: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let p = self.power as i32;
        self.amplitude * p as f64 * g1.sin().powi(p - 1) * g1.cos() * g1_dot
    }

    /// `(dγ̃₂/dt)·tanγ₁`, written without the `1/cosγ₁` factor.
    fn rate_times_tan(&self, g1: f64, g1_dot: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let p = self.power as i32;
        self.amplitude * p as f64 * g1.sin().powi(p) * g1_dot
    }
}

/// `γ₁(t) = π sin²(πt/T)`.
pub fn gamma1(t: f64, duration: f64) -> Result<f64> {
    check_time(t, duration)?;
    Ok(gamma1_unchecked(t, duration))
}

/// Designed `γ₂(t) = −Θ_g ξ(t) + (4/3) sin³γ₁(t)`.
pub fn gamma2(t: f64, duration: f64, theta_g: f64) -> Result<f64> {
    check_time(t, duration)?;
    let g1 = gamma1_unchecked(t, duration);
    Ok(-theta_g * step(t, duration) + PhaseProfile::error_nulling(1.0).value(g1))
}

fn check_time(t: f64, duration: f64) -> Result<()> {
    if !(0.0..=duration).contains(&t) || t.is_nan() {
        return Err(Error::TimeOutOfRange { t, duration });
    }
    Ok(())
}

fn gamma1_unchecked(t: f64, duration: f64) -> f64 {
    let s = (PI * t / duration).sin();
    PI * s * s
}

fn gamma1_dot(t: f64, duration: f64) -> f64 {
    PI * PI / duration * (2.0 * PI * t / duration).sin()
}

fn step(t: f64, duration: f64) -> f64 {
    if t < 0.5 * duration {
        0.0
    } else {
        1.0
    }
}

/// A complete gate path: `γ₁`, `γ₂`, and the controls derived from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricPath {
    duration: f64,
    theta_g: f64,
    chi0: f64,
    profile: PhaseProfile,
    sample_count: usize,
}

impl GeometricPath {
    /// Error-nulling path for geometric phase `theta_g` and integer `chi0`.
    pub fn designed(duration: f64, theta_g: f64, chi0: f64) -> Result<Self> {
        Self::with_profile(duration, theta_g, chi0, PhaseProfile::error_nulling(chi0))
    }

    /// Reference path with `γ̃₂ ≡ 0`: same gate, no error nulling.
    pub fn reference(duration: f64, theta_g: f64) -> Result<Self> {
        Self::with_profile(duration, theta_g, 0.0, PhaseProfile::NONE)
    }

    pub fn with_profile(duration: f64, theta_g: f64, chi0: f64, profile: PhaseProfile) -> Result<Self> {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::invalid(format!("gate time must be positive, got {duration}")));
        }
        Ok(Self {
            duration,
            theta_g,
            chi0,
            profile,
            sample_count: DEFAULT_SAMPLES,
        })
    }

    pub fn with_samples(mut self, sample_count: usize) -> Self {
        self.sample_count = sample_count.max(2);
        self
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn theta_g(&self) -> f64 {
        self.theta_g
    }

    pub fn chi0(&self) -> f64 {
        self.chi0
    }

    pub fn profile(&self) -> PhaseProfile {
        self.profile
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn gamma1(&self, t: f64) -> Result<f64> {
        gamma1(t, self.duration)
    }

    pub fn gamma1_dot(&self, t: f64) -> Result<f64> {
        check_time(t, self.duration)?;
        Ok(gamma1_dot(t, self.duration))
    }

    /// `γ₂(t)`; at `t = T/2` the post-step branch is returned.
    pub fn gamma2(&self, t: f64) -> Result<f64> {
        check_time(t, self.duration)?;
        Ok(self.gamma2_unchecked(t))
    }

    fn gamma2_unchecked(&self, t: f64) -> f64 {
        let g1 = gamma1_unchecked(t, self.duration);
        -self.theta_g * step(t, self.duration) + self.profile.value(g1)
    }

    /// Smooth part of `dγ₂/dt` (the step at `T/2` is excluded).
    pub fn gamma2_rate(&self, t: f64) -> Result<f64> {
        check_time(t, self.duration)?;
        Ok(self
            .profile
            .rate(gamma1_unchecked(t, self.duration), gamma1_dot(t, self.duration)))
    }

    /// `(Ω_x, Ω_y)` in rad/s.
    pub fn control_fields(&self, t: f64) -> Result<(f64, f64)> {
        check_time(t, self.duration)?;
        Ok(self.fields_unchecked(t))
    }

    pub(crate) fn fields_unchecked(&self, t: f64) -> (f64, f64) {
        let g1 = gamma1_unchecked(t, self.duration);
        let g1d = gamma1_dot(t, self.duration);
        let g2 = self.gamma2_unchecked(t);
        let g2d_tan = self.profile.rate_times_tan(g1, g1d);
        let (s2, c2) = g2.sin_cos();
        let ox = -(g1d * c2 - g2d_tan * s2);
        let oy = g1d * s2 + g2d_tan * c2;
        (ox, oy)
    }

    /// `Ω₀ = (Ω_x + iΩ_y)/2`.
    pub fn omega0(&self, t: f64) -> C64 {
        let (ox, oy) = self.fields_unchecked(t.clamp(0.0, self.duration));
        C64::new(0.5 * ox, 0.5 * oy)
    }

    pub fn sample_times(&self) -> Vec<f64> {
        let n = self.sample_count;
        (0..n)
            .map(|i| self.duration * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn samples(&self) -> FieldSamples {
        let times = self.sample_times();
        let (omega_x, omega_y) = times.iter().map(|&t| self.fields_unchecked(t)).unzip();
        FieldSamples {
            times,
            omega_x,
            omega_y,
        }
    }

    /// Rows `(t_us, γ₁, γ₂, Ω_x, Ω_y)` on the sample grid.
    pub fn table(&self) -> Vec<[f64; 5]> {
        self.sample_times()
            .into_iter()
            .map(|t| {
                let (ox, oy) = self.fields_unchecked(t);
                [
                    t * 1e6,
                    gamma1_unchecked(t, self.duration),
                    self.gamma2_unchecked(t),
                    ox,
                    oy,
                ]
            })
            .collect()
    }

    fn theta_d_rate(&self, t: f64) -> f64 {
        // γ̇₂ sin²γ₁ / (2cosγ₁) = (γ̇₂ tanγ₁) sinγ₁ / 2
        let g1 = gamma1_unchecked(t, self.duration);
        let g1d = gamma1_dot(t, self.duration);
        0.5 * self.profile.rate_times_tan(g1, g1d) * g1.sin()
    }

    fn theta_g_rate(&self, t: f64) -> f64 {
        let g1 = gamma1_unchecked(t, self.duration);
        let g1d = gamma1_dot(t, self.duration);
        let s = (0.5 * g1).sin();
        -self.profile.rate(g1, g1d) * s * s
    }
}

/// Sampled control fields on a uniform grid, linearly interpolated between
/// samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSamples {
    pub times: Vec<f64>,
    pub omega_x: Vec<f64>,
    pub omega_y: Vec<f64>,
}

impl FieldSamples {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0) - self.times.first().copied().unwrap_or(0.0)
    }

    pub fn is_uniform(&self) -> bool {
        if self.times.len() < 2 {
            return false;
        }
        let dt = (self.times[self.times.len() - 1] - self.times[0]) / (self.times.len() - 1) as f64;
        self.times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs())
    }

    pub fn fields_at(&self, t: f64) -> (f64, f64) {
        let n = self.times.len();
        if n == 1 {
            return (self.omega_x[0], self.omega_y[0]);
        }
        let t0 = self.times[0];
        let dt = (self.times[n - 1] - t0) / (n - 1) as f64;
        let u = ((t - t0) / dt).clamp(0.0, (n - 1) as f64);
        let i = (u.floor() as usize).min(n - 2);
        let w = u - i as f64;
        (
            self.omega_x[i] * (1.0 - w) + self.omega_x[i + 1] * w,
            self.omega_y[i] * (1.0 - w) + self.omega_y[i + 1] * w,
        )
    }
}

/// Source of `Ω₀(t)` for drive synthesis and effective dynamics.
#[derive(Debug, Clone, PartialEq)]
pub enum ControlEnvelope {
    Analytic(GeometricPath),
    Sampled(FieldSamples),
}

impl ControlEnvelope {
    pub fn fields(&self, t: f64) -> (f64, f64) {
        match self {
            ControlEnvelope::Analytic(p) => p.fields_unchecked(t.clamp(0.0, p.duration())),
            ControlEnvelope::Sampled(s) => s.fields_at(t),
        }
    }

    pub fn omega0(&self, t: f64) -> C64 {
        let (ox, oy) = self.fields(t);
        C64::new(0.5 * ox, 0.5 * oy)
    }

    pub fn duration(&self) -> f64 {
        match self {
            ControlEnvelope::Analytic(p) => p.duration(),
            ControlEnvelope::Sampled(s) => s.duration(),
        }
    }
}

/// Dynamic, geometric and total Lewis–Riesenfeld phase of the `|φ₋⟩` path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub t: f64,
    pub theta_d_minus: f64,
    pub theta_g_minus: f64,
    pub mu_minus: f64,
}

/// Phases accumulated along `|φ₋⟩` up to time `t`.
///
/// The smooth parts are integrated by adaptive Gauss–Kronrod; the `−Θ_g`
/// step of `γ₂` at `T/2` contributes `−Θ_g sin²γ₁/(2cosγ₁)` to `θ_d⁻` and
/// `+Θ_g sin²(γ₁/2)` to `θ_g⁻`, both evaluated at `T/2`.
pub fn lr_phases(path: &GeometricPath, t: f64) -> Result<PhaseRecord> {
    check_time(t, path.duration)?;
    let half = 0.5 * path.duration;
    let segments: &[(f64, f64)] = if t <= half { &[(0.0, t)] } else { &[(0.0, half), (half, t)] };
    let mut theta_d = 0.0;
    let mut theta_g = 0.0;
    for &(a, b) in segments {
        theta_d += integrate(|s| path.theta_d_rate(s), a, b, PHASE_TOL)?.value;
        theta_g += integrate(|s| path.theta_g_rate(s), a, b, PHASE_TOL)?.value;
    }
    if t >= half {
        let g1 = gamma1_unchecked(half, path.duration);
        let jump = -path.theta_g;
        theta_d += jump * g1.sin().powi(2) / (2.0 * g1.cos());
        theta_g += -jump * (0.5 * g1).sin().powi(2);
    }
    Ok(PhaseRecord {
        t,
        theta_d_minus: theta_d,
        theta_g_minus: theta_g,
        mu_minus: theta_d + theta_g,
    })
}

fn effective2(m: Array2<C64>) -> ComplexOperator {
    ComplexOperator::new(BasisTag::Effective2, m).expect("2x2")
}

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// `σ_x = |+,g⟩⟨0̃,e| + |0̃,e⟩⟨+,g|`.
pub fn sigma_x() -> ComplexOperator {
    effective2(array![[ZERO, ONE], [ONE, ZERO]])
}

/// `σ_y = i|+,g⟩⟨0̃,e| − i|0̃,e⟩⟨+,g|`.
pub fn sigma_y() -> ComplexOperator {
    effective2(array![[ZERO, I], [-I, ZERO]])
}

/// `σ_z = |0̃,e⟩⟨0̃,e| − |+,g⟩⟨+,g|`.
pub fn sigma_z() -> ComplexOperator {
    effective2(array![[-ONE, ZERO], [ZERO, ONE]])
}

/// `I(γ₁, γ₂) = sinγ₁sinγ₂ σ_x + sinγ₁cosγ₂ σ_y + cosγ₁ σ_z`.
pub fn invariant_op(gamma1: f64, gamma2: f64) -> ComplexOperator {
    let (s1, c1) = gamma1.sin_cos();
    let (s2, c2) = gamma2.sin_cos();
    let m = sigma_x().matrix() * c(s1 * s2) + sigma_y().matrix() * c(s1 * c2) + sigma_z().matrix() * c(c1);
    effective2(m)
}

/// Eigenvectors `(|φ₊⟩, |φ₋⟩)` of the invariant (eigenvalues `+1`, `−1`).
pub fn invariant_eigenvectors(gamma1: f64, gamma2: f64) -> (StateVector, StateVector) {
    let (s, co) = (0.5 * gamma1).sin_cos();
    let plus = array![I * C64::from_polar(1.0, -gamma2) * s, c(co)];
    let minus = array![c(co), I * C64::from_polar(1.0, gamma2) * s];
    (
        StateVector::new(BasisTag::Effective2, plus).expect("2"),
        StateVector::new(BasisTag::Effective2, minus).expect("2"),
    )
}

/// `H_e = ½(Ω_x σ_x + Ω_y σ_y)` on the two-level effective basis.
pub fn effective2_hamiltonian(omega_x: f64, omega_y: f64) -> ComplexOperator {
    let m = sigma_x().matrix() * c(0.5 * omega_x) + sigma_y().matrix() * c(0.5 * omega_y);
    effective2(m)
}

/// Systematic-error sensitivity `Q_g = |∫₀ᵀ e^{iχ} γ̇₁ sin²γ₁ dt|²` with
/// `χ = γ₂ + 2μ₋`.
pub fn sensitivity_qg(path: &GeometricPath) -> Result<f64> {
    let half = 0.5 * path.duration;
    let mut failure = None;
    let mut total = C64::new(0.0, 0.0);
    for (a, b) in [(0.0, half), (half, path.duration)] {
        let est = integrate(
            |t| {
                // Evaluate χ on the side of the step that owns this interval.
                let tt = if b <= half { t.min(half * (1.0 - 1e-15)) } else { t };
                let mu = match lr_phases(path, tt) {
                    Ok(r) => r.mu_minus,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                };
                let chi = path.gamma2_unchecked(tt) + 2.0 * mu;
                let g1 = gamma1_unchecked(tt, path.duration);
                C64::from_polar(1.0, chi) * (gamma1_dot(tt, path.duration) * g1.sin().powi(2))
            },
            a,
            b,
            PHASE_TOL,
        )?;
        total += est.value;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(total.norm_sqr())
}

/// `U_g = e^{iΘ_g}|+⟩⟨+| + |−⟩⟨−|` on `{|𝕆⟩, |𝟙⟩}`.
pub fn gate_unitary(gate: &GateSpec) -> ComplexOperator {
    gate_unitary_from_angles(gate.theta, gate.theta_g)
}

fn gate_unitary_from_angles(theta: f64, theta_g: f64) -> ComplexOperator {
    let (p, m) = dressed(theta);
    let ph = C64::from_polar(1.0, theta_g);
    let u = Array2::from_shape_fn((2, 2), |(i, j)| ph * (p[i] * p[j]) + c(m[i] * m[j]));
    logical(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    const T: f64 = 5e-6;

    #[test]
    fn gamma1_values() {
        assert_eq!(gamma1(0.0, T).unwrap(), 0.0);
        assert!((gamma1(T / 2.0, T).unwrap() - PI).abs() < 1e-15);
        assert!((gamma1(T / 4.0, T).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!(gamma1(1.01 * T, T).is_err());
        assert!(gamma1(-1e-12, T).is_err());
    }

    #[test]
    fn gamma2_values() {
        assert_eq!(gamma2(0.0, T, PI).unwrap(), 0.0);
        let end = gamma2(T, T, PI).unwrap();
        assert!((end + PI).abs() < 1e-12);
        assert!(((end - PI).rem_euclid(2.0 * PI)).abs() < 1e-12);
        assert!((gamma2(T / 4.0, T, PI).unwrap() - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn gamma1_symmetric() {
        for i in 0..=4000 {
            let t = T * i as f64 / 4000.0;
            let a = gamma1(t, T).unwrap();
            let b = gamma1(T - t, T).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma2_single_step() {
        let p = GeometricPath::designed(T, PI, 1.0).unwrap();
        let n = 4000;
        let mut jumps = vec![];
        for i in 0..n {
            let a = p.gamma2(T * i as f64 / n as f64).unwrap();
            let b = p.gamma2(T * (i + 1) as f64 / n as f64).unwrap();
            if (b - a).abs() > 0.1 {
                jumps.push((i, b - a));
            }
        }
        assert_eq!(jumps.len(), 1);
        assert_eq!(jumps[0].0, n / 2 - 1);
        assert!((jumps[0].1 + PI).abs() < 1e-6);
    }

    #[test]
    fn fields_vanish_at_ends_and_middle() {
        let p = GeometricPath::designed(T, PI, 1.0).unwrap();
        for t in [0.0, T / 2.0, T] {
            let (x, y) = p.control_fields(t).unwrap();
            assert!(x.abs() < 1e-6 && y.abs() < 1e-6, "t = {t}: {x} {y}");
        }
        let before = p.control_fields(T / 2.0 * (1.0 - 1e-9)).unwrap();
        let after = p.control_fields(T / 2.0 * (1.0 + 1e-9)).unwrap();
        assert!((before.0.hypot(before.1) - after.0.hypot(after.1)).abs() < 1e-2);
    }

    #[test]
    fn fields_match_unsubstituted_form() {
        // Oracle: central differences of γ₁, γ₂ in the raw tanγ₁ expression.
        let p = GeometricPath::designed(T, PI, 1.0).unwrap();
        let t = T / 8.0;
        let h = T * 1e-6;
        let g1 = p.gamma1(t).unwrap();
        let g2 = p.gamma2(t).unwrap();
        let g1d = (p.gamma1(t + h).unwrap() - p.gamma1(t - h).unwrap()) / (2.0 * h);
        let g2d = (p.gamma2(t + h).unwrap() - p.gamma2(t - h).unwrap()) / (2.0 * h);
        let ox = -(g1d * g2.cos() - g2d * g1.tan() * g2.sin());
        let oy = g1d * g2.sin() + g2d * g1.tan() * g2.cos();
        let (x, y) = p.control_fields(t).unwrap();
        assert!(((x - ox) / ox).abs() < 1e-6, "{x} vs {ox}");
        assert!(((y - oy) / oy).abs() < 1e-6, "{y} vs {oy}");
    }

    #[test]
    fn fields_finite_at_quarter_turn() {
        let p = GeometricPath::designed(T, PI, 1.0).unwrap();
        let (x, y) = p.control_fields(T / 4.0).unwrap();
        assert!(x.is_finite() && y.is_finite());
    }

    #[test]
    fn phases_at_endpoints() {
        let p = GeometricPath::designed(T, PI, 1.0).unwrap();
        let r0 = lr_phases(&p, 0.0).unwrap();
        assert_eq!((r0.theta_d_minus, r0.theta_g_minus), (0.0, 0.0));
        let r = lr_phases(&p, T).unwrap();
        assert!(r.theta_d_minus.abs() < 1e-6);
        assert!((r.theta_g_minus - PI).abs() < 1e-6);
        assert_eq!(r.mu_minus, r.theta_d_minus + r.theta_g_minus);
    }

    #[test]
    fn invariant_special_cases() {
        assert!(invariant_op(0.0, 0.7).sub(&sigma_z()).unwrap().frobenius_norm() < 1e-15);
        assert!(invariant_op(PI / 2.0, 0.0).sub(&sigma_y()).unwrap().frobenius_norm() < 1e-15);
        for (a, b) in [(0.3, 1.2), (2.0, -0.4), (PI, 3.0)] {
            let ev = invariant_op(a, b).hermitian_eigenvalues();
            assert!((ev[0] + 1.0).abs() < 1e-13 && (ev[1] - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn eigenvectors_diagonalize_invariant() {
        for (a, b) in [(0.3, 1.2), (2.0, -0.4), (PI / 2.0, 0.0)] {
            let inv = invariant_op(a, b);
            let (p, m) = invariant_eigenvectors(a, b);
            let ip = inv.apply(&p).unwrap();
            let im = inv.apply(&m).unwrap();
            assert!(ip.add(&p.scale(c(-1.0))).unwrap().norm() < 1e-14);
            assert!(im.add(&m).unwrap().norm() < 1e-14);
        }
    }

    #[test]
    fn qg_vanishes_for_design() {
        for chi0 in [1.0, 2.0] {
            let p = GeometricPath::designed(T, PI, chi0).unwrap();
            assert!(sensitivity_qg(&p).unwrap() < 1e-6);
        }
    }

    #[test]
    fn qg_positive_for_reference() {
        // Oracle: with γ̃₂ ≡ 0, χ = Θ_g ξ(t) and each half contributes
        // ±∫₀^π sin²u du = ±π/2, so Q_g = (π/2)² |1 − e^{iΘ_g}|².
        let p = GeometricPath::reference(T, PI).unwrap();
        let q = sensitivity_qg(&p).unwrap();
        assert!((q - PI * PI).abs() < 1e-7, "{q}");
    }

    #[test]
    fn qg_nonzero_off_design_amplitude() {
        // Only integer χ₀ cancels the first-order term.
        let p = GeometricPath::designed(T, PI, 0.5).unwrap();
        assert!(sensitivity_qg(&p).unwrap() > 1e-2);
    }

    #[test]
    fn gate_unitary_against_table() {
        let u = gate_unitary(&GateSpec::pi_phase());
        assert!((u.get(0, 0) + ONE).norm() < 1e-15 && (u.get(1, 1) - ONE).norm() < 1e-15);
        let u = gate_unitary(&GateSpec::not());
        assert!((u.get(0, 1) + ONE).norm() < 1e-15 && u.get(0, 0).norm() < 1e-15);
        for theta in [0.1, 0.9, 2.5] {
            let u = gate_unitary_from_angles(theta, 0.0);
            assert!(u.sub(&ComplexOperator::identity(BasisTag::Logical)).unwrap().frobenius_norm() < 1e-15);
        }
    }
}
