use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind, GateChoice, Grid, ModelKind, EFFECTIVE_STEPS};
use super::manifest::{Convergence, Manifest, CONVERGENCE_TOL};
use super::plot::PlotSpec;
use super::runs::{
    decoherence_fidelity, designed_path, drive_for, effective_gate, full_gate, pure_transfer_fidelity, GateRun,
};
use super::table::Table;
use super::{Output, SimResult};
use crate::device::{regime_check, DriveSpec, SystemParams};
use crate::error::{Error, Result};
use crate::evolver::{with_awgn, with_systematic_error, DecoherenceRates};
use crate::metrics::{fit_exponential, fit_polynomial};
use crate::path::{lr_phases, ControlEnvelope, GateSpec, GeometricPath};

const TWO_PI: f64 = 2.0 * PI;
const PHASE_POINTS: usize = 201;
/// Extra photons kept when checking the Fock cutoff (12 → 17, 20 → 25).
const CUTOFF_MARGIN: usize = 5;

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    gates: Vec<(GateChoice, GateSpec)>,
    summary: BTreeMap<String, f64>,
    noise_seeds: Vec<u64>,
}

impl Ctx<'_> {
    fn p(&self) -> &SystemParams {
        &self.cfg.params
    }

    fn steps_effective(&self) -> usize {
        self.cfg.steps.unwrap_or(EFFECTIVE_STEPS)
    }

    fn note(&mut self, key: impl Into<String>, v: f64) {
        self.summary.insert(key.into(), v);
    }
}

/// Runs one experiment end to end. Sweep points are evaluated on the rayon
/// pool and collected in grid order, so outputs do not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SimResult> {
    cfg.validate()?;
    let gates: Vec<(GateChoice, GateSpec)> = cfg.gates.iter().map(|g| (*g, g.spec())).collect();

    let p = cfg.params;
    let first = &gates[0].1;
    let path = designed_path(&p, first, cfg.chi0)?;
    let spec = drive_for(&p, first, &path)?;
    let regime = regime_check(&p, &spec);
    if !regime.pass && !cfg.force {
        let names: Vec<String> = regime
            .failures()
            .iter()
            .map(|r| format!("{} = {:.3e} not in [{:.3e}, {:.3e}]", r.name, r.value.abs(), r.low, r.high))
            .collect();
        return Err(Error::Regime(format!("varsigma = {:.3e}; {}", regime.varsigma, names.join("; "))));
    }

    let mut ctx = Ctx {
        cfg,
        gates,
        summary: BTreeMap::new(),
        noise_seeds: Vec::new(),
    };
    let (outputs, convergence) = match cfg.experiment {
        ExperimentKind::Fields => fields(&mut ctx)?,
        ExperimentKind::Phases => phases(&mut ctx)?,
        ExperimentKind::GatesEffective => gates_run(&mut ctx, ModelKind::Effective)?,
        ExperimentKind::GatesFull => gates_run(&mut ctx, ModelKind::Full)?,
        ExperimentKind::Systematic => systematic(&mut ctx)?,
        ExperimentKind::AwgnSamples => awgn_samples(&mut ctx)?,
        ExperimentKind::AwgnSweep => awgn_sweep(&mut ctx)?,
        ExperimentKind::Decoherence => decoherence(&mut ctx)?,
    };

    let mut files = Vec::new();
    for o in &outputs {
        files.push(format!("{}.csv", o.name));
        if o.plot.is_some() {
            files.push(format!("{}.svg", o.name));
        }
    }
    let manifest = Manifest {
        experiment: cfg.experiment,
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        model: cfg.model,
        seed: cfg.seed,
        noise_seeds: ctx.noise_seeds,
        regime,
        frame_periods: p.frame_periods(),
        convergence,
        summary: ctx.summary,
        outputs: files,
    };
    Ok(SimResult { manifest, outputs })
}

type Produced = (Vec<Output>, Convergence);

fn fields(ctx: &mut Ctx) -> Result<Produced> {
    let p = *ctx.p();
    let path = designed_path(&p, &ctx.gates[0].1, ctx.cfg.chi0)?;
    let mut t = Table::new(["t_us", "gamma1_rad", "gamma2_rad", "omega_x_rad_per_s", "omega_y_rad_per_s"]);
    let mut peak: f64 = 0.0;
    for row in path.table() {
        peak = peak.max(row[3].hypot(row[4]));
        t.push(row.to_vec())?;
    }
    ctx.note("peak_field_MHz", peak / TWO_PI / 1e6);
    let plot = PlotSpec::line(
        "control fields",
        "t_us",
        &["omega_x_rad_per_s", "omega_y_rad_per_s"],
        "Omega (rad/s)",
    );
    Ok((
        vec![Output {
            name: "fields".into(),
            table: t,
            plot: Some(plot),
        }],
        Convergence::none("analytic fields; no propagation"),
    ))
}

fn phases(ctx: &mut Ctx) -> Result<Produced> {
    let p = *ctx.p();
    let path = designed_path(&p, &ctx.gates[0].1, ctx.cfg.chi0)?;
    let mut t = Table::new(["t_us", "theta_d_minus_rad", "theta_g_minus_rad"]);
    for i in 0..PHASE_POINTS {
        let s = p.duration * i as f64 / (PHASE_POINTS - 1) as f64;
        let r = lr_phases(&path, s)?;
        t.push(vec![s * 1e6, r.theta_d_minus, r.theta_g_minus])?;
    }
    let end = lr_phases(&path, p.duration)?;
    ctx.note("theta_d_minus_T", end.theta_d_minus);
    ctx.note("theta_g_minus_T", end.theta_g_minus);
    let plot = PlotSpec::line("phases", "t_us", &["theta_d_minus_rad", "theta_g_minus_rad"], "phase (rad)");
    Ok((
        vec![Output {
            name: "phases".into(),
            table: t,
            plot: Some(plot),
        }],
        Convergence::none("adaptive quadrature; no propagation"),
    ))
}

/// One gate run under either model. `envelope` replaces the analytic
/// envelope (AWGN); `scale` is `1 + ε`.
fn gate_run(
    p: &SystemParams,
    model: ModelKind,
    gate: &GateSpec,
    path: &GeometricPath,
    spec: Option<&DriveSpec>,
    envelope: Option<ControlEnvelope>,
    scale: f64,
    steps: Option<usize>,
) -> Result<GateRun> {
    let env = envelope.unwrap_or_else(|| ControlEnvelope::Analytic(path.clone()));
    match model {
        ModelKind::Effective => effective_gate(env, scale, gate, steps.unwrap_or(EFFECTIVE_STEPS)),
        ModelKind::Full => {
            let base = match spec {
                Some(s) => s.clone(),
                None => drive_for(p, gate, path)?,
            };
            let spec = with_systematic_error(&base, scale - 1.0).with_envelope(env);
            full_gate(p, &spec, gate, steps)
        }
    }
}

/// Step-halving and (full model) cutoff deltas on the nominal first gate.
fn gate_convergence(ctx: &Ctx, model: ModelKind, nominal: &GateRun) -> Result<Convergence> {
    let p = *ctx.p();
    let gate = &ctx.gates[0].1;
    let path = designed_path(&p, gate, ctx.cfg.chi0)?;
    let f0 = nominal.final_fidelity();
    let fine = gate_run(&p, model, gate, &path, None, None, 1.0, Some(2 * nominal.steps))?;
    let mut c = Convergence {
        fock_cutoff_delta: None,
        fock_cutoffs: None,
        step_halving_delta: Some((fine.final_fidelity() - f0).abs()),
        steps: Some(nominal.steps),
        tolerance: CONVERGENCE_TOL,
        probe: format!("F_avg(T) of {} gate, eps = 0, {model:?} model", gate.kind.label()),
    };
    if model == ModelKind::Full {
        let big = SystemParams {
            n_max: p.n_max + CUTOFF_MARGIN,
            ..p
        };
        let wide = gate_run(&big, model, gate, &path, None, None, 1.0, ctx.cfg.steps)?;
        c.fock_cutoff_delta = Some((wide.final_fidelity() - f0).abs());
        c.fock_cutoffs = Some([p.n_max, big.n_max]);
    }
    Ok(c)
}

fn gate_columns(ctx: &Ctx, prefix: &str) -> Vec<String> {
    ctx.gates.iter().map(|(g, _)| format!("{prefix}_{}", g.label())).collect()
}

fn gates_run(ctx: &mut Ctx, model: ModelKind) -> Result<Produced> {
    let p = *ctx.p();
    let scale = 1.0 + ctx.cfg.epsilon;
    let steps = match model {
        ModelKind::Effective => Some(ctx.steps_effective()),
        ModelKind::Full => ctx.cfg.steps,
    };
    let chi0 = ctx.cfg.chi0;
    let runs: Vec<GateRun> = ctx
        .gates
        .par_iter()
        .map(|(_, g)| {
            let path = designed_path(&p, g, chi0)?;
            gate_run(&p, model, g, &path, None, None, scale, steps)
        })
        .collect::<Result<_>>()?;

    let cols = gate_columns(ctx, "F_avg");
    let mut t = Table::new(std::iter::once("t_us".to_string()).chain(cols.iter().cloned()));
    for k in 0..runs[0].trace.times.len() {
        let mut row = vec![runs[0].trace.times[k] * 1e6];
        row.extend(runs.iter().map(|r| r.trace.values[k]));
        t.push(row)?;
    }
    for (c, r) in cols.iter().zip(&runs) {
        ctx.note(format!("{c}_T"), r.final_fidelity());
    }
    let conv = if ctx.cfg.epsilon == 0.0 {
        gate_convergence(ctx, model, &runs[0])?
    } else {
        let path = designed_path(&p, &ctx.gates[0].1, chi0)?;
        let nominal = gate_run(&p, model, &ctx.gates[0].1, &path, None, None, 1.0, steps)?;
        gate_convergence(ctx, model, &nominal)?
    };
    let name = match model {
        ModelKind::Effective => "gates_effective",
        ModelKind::Full => "gates_full",
    };
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let plot = PlotSpec::line(name, "t_us", &refs, "average gate fidelity");
    Ok((
        vec![Output {
            name: name.into(),
            table: t,
            plot: Some(plot),
        }],
        conv,
    ))
}

/// Curvature of `1 − F̄(ε)` at zero from a quartic least-squares fit.
fn curvature(eps: &[f64], f: &[f64]) -> Option<f64> {
    if eps.len() < 3 {
        return None;
    }
    let pts: Vec<(f64, f64)> = eps.iter().zip(f).map(|(e, v)| (*e, 1.0 - v)).collect();
    let deg = 4.min(eps.len() - 1);
    fit_polynomial(&pts, deg).ok().map(|c| c[2])
}

fn systematic(ctx: &mut Ctx) -> Result<Produced> {
    let p = *ctx.p();
    let model = ctx.cfg.model;
    let eps = ctx.cfg.epsilon_grid.values();
    let chi0 = ctx.cfg.chi0;
    let steps = match model {
        ModelKind::Effective => Some(ctx.steps_effective()),
        ModelKind::Full => ctx.cfg.steps,
    };
    // designed path, and for the effective model the γ̃₂ ≡ 0 reference
    let variants: &[bool] = match model {
        ModelKind::Effective => &[false, true],
        ModelKind::Full => &[false],
    };
    let mut setups = Vec::new();
    for &reference in variants {
        for (_, g) in &ctx.gates {
            let path = if reference {
                GeometricPath::reference(p.duration, g.theta_g)?
            } else {
                designed_path(&p, g, chi0)?
            };
            let spec = match model {
                ModelKind::Full => Some(drive_for(&p, g, &path)?),
                ModelKind::Effective => None,
            };
            setups.push((g.clone(), path, spec));
        }
    }
    let jobs: Vec<(usize, f64)> = (0..setups.len()).flat_map(|s| eps.iter().map(move |e| (s, *e))).collect();
    let values: Vec<f64> = jobs
        .par_iter()
        .map(|&(s, e)| {
            let (g, path, spec) = &setups[s];
            gate_run(&p, model, g, path, spec.as_ref(), None, 1.0 + e, steps).map(|r| r.final_fidelity())
        })
        .collect::<Result<_>>()?;

    let mut cols = gate_columns(ctx, "F_avg");
    if variants.len() == 2 {
        cols.extend(gate_columns(ctx, "F_ref"));
    }
    let n = eps.len();
    let mut t = Table::new(std::iter::once("epsilon".to_string()).chain(cols.iter().cloned()));
    for (i, e) in eps.iter().enumerate() {
        let mut row = vec![*e];
        row.extend((0..setups.len()).map(|s| values[s * n + i]));
        t.push(row)?;
    }
    for (s, c) in cols.iter().enumerate() {
        let col = &values[s * n..(s + 1) * n];
        let (imax, fmax) = col.iter().enumerate().fold((0, f64::NEG_INFINITY), |a, (i, v)| {
            if *v > a.1 {
                (i, *v)
            } else {
                a
            }
        });
        ctx.note(format!("{c}_argmax_epsilon"), eps[imax]);
        ctx.note(format!("{c}_max"), fmax);
        ctx.note(format!("{c}_min"), col.iter().copied().fold(f64::INFINITY, f64::min));
        if let Some(k) = curvature(&eps, col) {
            ctx.note(format!("{c}_curvature"), k);
        }
    }
    if variants.len() == 2 {
        let labels: Vec<&str> = ctx.gates.iter().map(|(g, _)| g.label()).collect();
        for label in labels {
            let d = ctx.summary.get(&format!("F_avg_{label}_curvature")).copied();
            let r = ctx.summary.get(&format!("F_ref_{label}_curvature")).copied();
            if let (Some(d), Some(r)) = (d, r) {
                if d != 0.0 {
                    ctx.note(format!("curvature_ratio_{label}"), r / d.abs());
                }
            }
        }
    }

    let path = designed_path(&p, &ctx.gates[0].1, chi0)?;
    let nominal = gate_run(&p, model, &ctx.gates[0].1, &path, None, None, 1.0, steps)?;
    let conv = gate_convergence(ctx, model, &nominal)?;
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let plot = PlotSpec::line("systematic error", "epsilon", &refs, "average gate fidelity at T");
    Ok((
        vec![Output {
            name: "systematic".into(),
            table: t,
            plot: Some(plot),
        }],
        conv,
    ))
}

fn noisy_run(ctx: &Ctx, snr_db: f64, seed: u64) -> Result<f64> {
    let p = *ctx.p();
    let g = &ctx.gates[0].1;
    let path = designed_path(&p, g, ctx.cfg.chi0)?;
    let noisy = with_awgn(&path.samples(), snr_db, seed)?;
    let steps = match ctx.cfg.model {
        ModelKind::Effective => Some(ctx.steps_effective()),
        ModelKind::Full => ctx.cfg.steps,
    };
    let scale = 1.0 + ctx.cfg.epsilon;
    gate_run(&p, ctx.cfg.model, g, &path, None, Some(ControlEnvelope::Sampled(noisy)), scale, steps)
        .map(|r| r.final_fidelity())
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (m, 0.0);
    }
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, var.sqrt())
}

/// Convergence of a noisy run: step halving on the first seed.
fn noisy_convergence(ctx: &Ctx, snr_db: f64) -> Result<Convergence> {
    let p = *ctx.p();
    let g = &ctx.gates[0].1;
    let path = designed_path(&p, g, ctx.cfg.chi0)?;
    let noisy = with_awgn(&path.samples(), snr_db, ctx.cfg.seed)?;
    let env = || Some(ControlEnvelope::Sampled(noisy.clone()));
    let model = ctx.cfg.model;
    let scale = 1.0 + ctx.cfg.epsilon;
    let coarse = match model {
        ModelKind::Effective => gate_run(&p, model, g, &path, None, env(), scale, Some(ctx.steps_effective()))?,
        ModelKind::Full => gate_run(&p, model, g, &path, None, env(), scale, ctx.cfg.steps)?,
    };
    let fine = gate_run(&p, model, g, &path, None, env(), scale, Some(2 * coarse.steps))?;
    let mut c = Convergence {
        fock_cutoff_delta: None,
        fock_cutoffs: None,
        step_halving_delta: Some((fine.final_fidelity() - coarse.final_fidelity()).abs()),
        steps: Some(coarse.steps),
        tolerance: CONVERGENCE_TOL,
        probe: format!("F_avg(T), {} gate, R_N = {snr_db} dB, seed {}, {model:?} model", g.kind.label(), ctx.cfg.seed),
    };
    if model == ModelKind::Full {
        let big = SystemParams {
            n_max: p.n_max + CUTOFF_MARGIN,
            ..p
        };
        let wide = gate_run(&big, model, g, &path, None, env(), scale, ctx.cfg.steps)?;
        c.fock_cutoff_delta = Some((wide.final_fidelity() - coarse.final_fidelity()).abs());
        c.fock_cutoffs = Some([p.n_max, big.n_max]);
    }
    Ok(c)
}

fn awgn_samples(ctx: &mut Ctx) -> Result<Produced> {
    let snr = ctx.cfg.snr_db;
    let seeds: Vec<u64> = (0..ctx.cfg.samples as u64).map(|i| ctx.cfg.seed.wrapping_add(i)).collect();
    let shared: &Ctx = ctx;
    let f: Vec<f64> = seeds.par_iter().map(|&s| noisy_run(shared, snr, s)).collect::<Result<_>>()?;
    let mut t = Table::new(["sample_index", "F_avg"]);
    for (i, v) in f.iter().enumerate() {
        t.push(vec![i as f64, *v])?;
    }
    let lo = f.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (m, sd) = mean_std(&f);
    let conv = noisy_convergence(ctx, snr)?;
    ctx.noise_seeds = seeds;
    ctx.note("F_min", lo);
    ctx.note("F_max", hi);
    ctx.note("F_spread", hi - lo);
    ctx.note("F_mean", m);
    ctx.note("F_std", sd);
    ctx.note("snr_db", snr);
    let plot = PlotSpec::line("AWGN samples", "sample_index", &["F_avg"], "average gate fidelity at T");
    Ok((
        vec![Output {
            name: "awgn_samples".into(),
            table: t,
            plot: Some(plot),
        }],
        conv,
    ))
}

fn awgn_sweep(ctx: &mut Ctx) -> Result<Produced> {
    let snrs = ctx.cfg.snr_grid.values();
    // common random numbers: sample i uses the same seed at every R_N
    let seeds: Vec<u64> = (0..ctx.cfg.samples as u64).map(|i| ctx.cfg.seed.wrapping_add(i)).collect();
    let jobs: Vec<(f64, u64)> = snrs.iter().flat_map(|r| seeds.iter().map(move |s| (*r, *s))).collect();
    let shared: &Ctx = ctx;
    let f: Vec<f64> = jobs.par_iter().map(|&(r, s)| noisy_run(shared, r, s)).collect::<Result<_>>()?;
    let m = seeds.len();
    let mut t = Table::new(["snr_db", "F_mean", "F_std"]);
    let mut pts = Vec::new();
    for (j, r) in snrs.iter().enumerate() {
        let (mean, sd) = mean_std(&f[j * m..(j + 1) * m]);
        t.push(vec![*r, mean, sd])?;
        pts.push((*r, mean));
    }
    let fit = fit_exponential(&pts)?;
    let mut ft = Table::new(["a", "b", "c", "rms", "b_identifiable"]);
    ft.push(vec![fit.a, fit.b, fit.c, fit.rms, if fit.b_identifiable { 1.0 } else { 0.0 }])?;
    let conv = noisy_convergence(ctx, snrs[0])?;
    ctx.noise_seeds = seeds;
    ctx.note("fit_a", fit.a);
    ctx.note("fit_b", fit.b);
    ctx.note("fit_c", fit.c);
    ctx.note("fit_rms", fit.rms);
    let plot = PlotSpec::errorbar("AWGN sweep", "snr_db", "F_mean", "F_std", "average gate fidelity at T");
    Ok((
        vec![
            Output {
                name: "awgn_sweep".into(),
                table: t,
                plot: Some(plot),
            },
            Output {
                name: "awgn_fit".into(),
                table: ft,
                plot: None,
            },
        ],
        conv,
    ))
}

fn decoherence(ctx: &mut Ctx) -> Result<Produced> {
    let p = *ctx.p();
    let g = ctx.gates[0].1.clone();
    let path = designed_path(&p, &g, ctx.cfg.chi0)?;
    let base = drive_for(&p, &g, &path)?;
    let spec = with_systematic_error(&base, ctx.cfg.epsilon);
    let fr = Grid {
        min: 0.0,
        max: 1.0,
        points: ctx.cfg.rate_points,
    }
    .values();
    let max = ctx.cfg.rate_max_khz;
    let angular = ctx.cfg.rates_angular;
    let steps = ctx.cfg.steps;

    // the all-zero point is shared by the three sweeps
    let mut jobs: Vec<[f64; 3]> = vec![[0.0; 3]];
    for ch in 0..3 {
        for &x in fr.iter().filter(|x| **x != 0.0) {
            let mut r = [0.0; 3];
            r[ch] = x * max[ch];
            jobs.push(r);
        }
    }
    let f: Vec<f64> = jobs
        .par_iter()
        .map(|r| {
            let rates = DecoherenceRates::from_khz(r[0], r[1], r[2], angular)?;
            decoherence_fidelity(&p, &spec, &rates, steps)
        })
        .collect::<Result<_>>()?;

    let names = ["F_g_dephasing", "F_g_relaxation", "F_g_photon_loss"];
    let mut t = Table::new(std::iter::once("rate_fraction").chain(names));
    let nz = fr.iter().filter(|x| **x != 0.0).count();
    for (i, x) in fr.iter().enumerate() {
        let mut row = vec![*x];
        for ch in 0..3 {
            let v = if *x == 0.0 {
                f[0]
            } else {
                let k = fr[..i].iter().filter(|y| **y != 0.0).count();
                f[1 + ch * nz + k]
            };
            row.push(v);
        }
        t.push(row)?;
    }
    ctx.note("F_g_zero_rates", f[0]);
    for (ch, n) in names.iter().enumerate() {
        ctx.note(format!("{n}_at_max"), f[ch * nz + nz]);
        ctx.note(format!("{n}_max_rate_khz"), max[ch]);
    }
    // echo the maxima in both unit readings
    let used = DecoherenceRates::from_khz(max[0], max[1], max[2], angular)?;
    let other = DecoherenceRates::from_khz(max[0], max[1], max[2], !angular)?;
    for (tag, r) in [("used", used), ("alternative", other)] {
        ctx.note(format!("gamma_d_max_per_s_{tag}"), r.gamma_d);
        ctx.note(format!("gamma_s_max_per_s_{tag}"), r.gamma_s);
        ctx.note(format!("gamma_kappa_max_per_s_{tag}"), r.gamma_kappa);
    }

    // closed-system proxy: refining a master-equation run costs minutes
    let f0 = pure_transfer_fidelity(&p, &spec, steps)?;
    let model = crate::device::JointModel::new(p, spec.clone())?;
    let grid = super::runs::full_grid(&p, &model, steps);
    let fine = pure_transfer_fidelity(&p, &spec, Some(2 * grid.steps))?;
    let big = SystemParams {
        n_max: p.n_max + CUTOFF_MARGIN,
        ..p
    };
    let big_spec = with_systematic_error(&drive_for(&big, &g, &path)?, ctx.cfg.epsilon);
    let wide = pure_transfer_fidelity(&big, &big_spec, steps)?;
    let conv = Convergence {
        fock_cutoff_delta: Some((wide - f0).abs()),
        fock_cutoffs: Some([p.n_max, big.n_max]),
        step_halving_delta: Some((fine - f0).abs()),
        steps: Some(grid.steps),
        tolerance: CONVERGENCE_TOL,
        probe: format!("closed-system |<1,g|psi(T)>|^2 for the {} gate", g.kind.label()),
    };
    let plot = PlotSpec::line("decoherence", "rate_fraction", &names, "F_g(T)");
    Ok((
        vec![Output {
            name: "decoherence".into(),
            table: t,
            plot: Some(plot),
        }],
        conv,
    ))
}

/// Design summary for one gate; frequencies are quoted as `ω/2π` in Hz.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GateDesign {
    pub gate: GateChoice,
    pub chi0: f64,
    pub sensitivity_qg: f64,
    pub sensitivity_qg_reference: f64,
    pub theta_d_minus_t: f64,
    pub theta_g_minus_t: f64,
    pub omega_hz: f64,
    pub omega_tilde_hz: f64,
    pub delta_p_hz: [f64; 3],
    pub beta: [f64; 3],
    pub weights: [f64; 3],
    pub peak_tone_hz: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DesignReport {
    pub params: SystemParams,
    pub frame_periods: Option<i64>,
    pub gates: Vec<GateDesign>,
    pub regime: crate::device::RegimeReport,
}

/// Path, phase and drive-synthesis summary for every configured gate.
pub fn design(cfg: &ExperimentConfig) -> Result<DesignReport> {
    cfg.validate()?;
    let p = cfg.params;
    let mut gates = Vec::new();
    let mut regime = None;
    for choice in &cfg.gates {
        let g = choice.spec();
        let path = designed_path(&p, &g, cfg.chi0)?;
        let reference = GeometricPath::reference(p.duration, g.theta_g)?;
        let spec = drive_for(&p, &g, &path)?;
        let end = lr_phases(&path, p.duration)?;
        if regime.is_none() {
            regime = Some(regime_check(&p, &spec));
        }
        gates.push(GateDesign {
            gate: *choice,
            chi0: cfg.chi0,
            sensitivity_qg: crate::path::sensitivity_qg(&path)?,
            sensitivity_qg_reference: crate::path::sensitivity_qg(&reference)?,
            theta_d_minus_t: end.theta_d_minus,
            theta_g_minus_t: end.theta_g_minus,
            omega_hz: spec.omega / TWO_PI,
            omega_tilde_hz: spec.omega_tilde / TWO_PI,
            delta_p_hz: spec.delta_p.map(|d| d / TWO_PI),
            beta: spec.beta,
            weights: spec.weights,
            peak_tone_hz: spec.peak_tone_amplitude(4001) / TWO_PI,
        });
    }
    Ok(DesignReport {
        params: p,
        frame_periods: p.frame_periods(),
        gates,
        regime: regime.expect("at least one gate"),
    })
}
