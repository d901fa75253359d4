//! Figure presets and 1-D/2-D parameter grids of propagation or
//! steady-state runs.
//!
//! Grid points are independent; `run_sweep` evaluates them with a
//! deterministic, order-preserving parallel map, so the resulting grid is
//! bitwise identical for any worker count. Per-point failures are recorded
//! in the grid instead of aborting the sweep.

use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

use crate::model::{ChirpedDrive, DriveSignal, MeanFieldState, SystemParams};
use crate::propagation::propagate;
use crate::steady::steady_state;

/// Sweepable parameters (closed set).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisParam {
    Kappa,
    CouplingA,
    CouplingB,
    /// Varies the dispersive strength as `ratio * coupling_b` with the
    /// dissipative strength held at its base value.
    RatioAOverB,
    Beta,
    Delta,
    Chi0,
    Alpha,
    T0,
    NTh,
    Gamma,
}

impl AxisParam {
    pub fn name(&self) -> &'static str {
        match self {
            AxisParam::Kappa => "kappa",
            AxisParam::CouplingA => "coupling_a",
            AxisParam::CouplingB => "coupling_b",
            AxisParam::RatioAOverB => "ratio_a_over_b",
            AxisParam::Beta => "beta",
            AxisParam::Delta => "delta",
            AxisParam::Chi0 => "chi0",
            AxisParam::Alpha => "alpha",
            AxisParam::T0 => "t0",
            AxisParam::NTh => "n_th",
            AxisParam::Gamma => "gamma",
        }
    }

    /// True for parameters that live on the chirped drive.
    fn needs_chirp(&self) -> bool {
        matches!(
            self,
            AxisParam::Beta | AxisParam::Chi0 | AxisParam::Alpha | AxisParam::T0
        )
    }
}

impl FromStr for AxisParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kappa" => Ok(AxisParam::Kappa),
            "coupling_a" => Ok(AxisParam::CouplingA),
            "coupling_b" => Ok(AxisParam::CouplingB),
            "ratio_a_over_b" => Ok(AxisParam::RatioAOverB),
            "beta" => Ok(AxisParam::Beta),
            "delta" => Ok(AxisParam::Delta),
            "chi0" => Ok(AxisParam::Chi0),
            "alpha" => Ok(AxisParam::Alpha),
            "t0" => Ok(AxisParam::T0),
            "n_th" => Ok(AxisParam::NTh),
            "gamma" => Ok(AxisParam::Gamma),
            other => Err(format!("unknown sweep parameter `{other}`")),
        }
    }
}

impl fmt::Display for AxisParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One sweep axis: a parameter and its grid values.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: AxisParam,
    pub values: Vec<f64>,
}

/// Quantity recorded at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// Final `n_phonon` of a propagation run.
    PhononAtTEnd,
    SteadyTotal,
    SteadySigmaEq,
    SteadySBac,
}

impl Observable {
    pub fn name(&self) -> &'static str {
        match self {
            Observable::PhononAtTEnd => "phonon_at_t_end",
            Observable::SteadyTotal => "steady_total",
            Observable::SteadySigmaEq => "steady_sigma_eq",
            Observable::SteadySBac => "steady_s_bac",
        }
    }

    pub fn is_steady(&self) -> bool {
        !matches!(self, Observable::PhononAtTEnd)
    }
}

impl FromStr for Observable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "phonon_at_t_end" => Ok(Observable::PhononAtTEnd),
            "steady_total" => Ok(Observable::SteadyTotal),
            "steady_sigma_eq" => Ok(Observable::SteadySigmaEq),
            "steady_s_bac" => Ok(Observable::SteadySBac),
            other => Err(format!("unknown observable `{other}`")),
        }
    }
}

/// A complete sweep description: base system, axes and observable.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub params: SystemParams,
    pub drive: DriveSignal,
    pub mf0: MeanFieldState,
    pub t_end: f64,
    pub dt: f64,
    pub sample_every: usize,
    /// One or two axes; row-major order with the first axis outermost.
    pub axes: Vec<SweepAxis>,
    pub observable: Observable,
    /// Steady-state target amplitude, required by the steady observables.
    pub target_a: Option<Complex64>,
    /// When set, `chi0 = scale * hypot(alpha, beta)` is re-derived after
    /// axis values are applied (unless `chi0` itself is an axis), keeping
    /// the pulse amplitude tied to the sweep rates as the figure captions
    /// define it.
    pub chi0_scale: Option<f64>,
}

/// Row-major grid of observable values; failed points carry the error name
/// of the underlying run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub axes: Vec<SweepAxis>,
    pub values: Vec<Result<f64, String>>,
}

fn coords_of(axes: &[SweepAxis], idx: usize) -> Vec<f64> {
    match axes {
        [axis] => vec![axis.values[idx]],
        [outer, inner] => vec![
            outer.values[idx / inner.values.len()],
            inner.values[idx % inner.values.len()],
        ],
        _ => unreachable!("sweep has {} axes", axes.len()),
    }
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Axis coordinates of the row-major point `idx`.
    pub fn coords(&self, idx: usize) -> Vec<f64> {
        coords_of(&self.axes, idx)
    }
}

/// Named parameter sets transcribed from the reference figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigurePreset {
    Fig1,
    Fig2,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig4a,
    Fig4b,
    Fig4c,
    Fig4d,
}

impl FigurePreset {
    pub const ALL: [FigurePreset; 9] = [
        FigurePreset::Fig1,
        FigurePreset::Fig2,
        FigurePreset::Fig3a,
        FigurePreset::Fig3b,
        FigurePreset::Fig3c,
        FigurePreset::Fig4a,
        FigurePreset::Fig4b,
        FigurePreset::Fig4c,
        FigurePreset::Fig4d,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FigurePreset::Fig1 => "fig1",
            FigurePreset::Fig2 => "fig2",
            FigurePreset::Fig3a => "fig3a",
            FigurePreset::Fig3b => "fig3b",
            FigurePreset::Fig3c => "fig3c",
            FigurePreset::Fig4a => "fig4a",
            FigurePreset::Fig4b => "fig4b",
            FigurePreset::Fig4c => "fig4c",
            FigurePreset::Fig4d => "fig4d",
        }
    }
}

impl FromStr for FigurePreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FigurePreset::ALL
            .iter()
            .find(|p| p.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown preset `{s}`"))
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + i as f64 * (hi - lo) / (n - 1) as f64)
        .collect()
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

const KAPPA_GRID: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];

/// Full parameter set of a reference figure as a ready-to-run sweep.
///
/// Axis ranges that the figures leave unnumbered are inferred from the
/// regions highlighted in the accompanying text: ratio 0..10, sweep
/// strength -0.2..0.2, detuning -1.5..1.
pub fn figure_preset(preset: FigurePreset) -> SweepSpec {
    let chirp = |scale: f64, alpha: f64, beta: f64, t0: f64| {
        DriveSignal::Chirped(ChirpedDrive {
            chi0: scale * alpha.hypot(beta),
            alpha,
            beta,
            t0,
        })
    };
    let fig4_params = |delta: f64| SystemParams {
        delta,
        kappa: 0.3,
        gamma: 1e-6,
        coupling_a: 0.0,
        coupling_b: 2e-4,
        n_th: 50.0,
    };
    let fig3_params = |delta: f64, coupling_a: f64, coupling_b: f64| SystemParams {
        delta,
        kappa: 0.3,
        gamma: 1e-6,
        coupling_a,
        coupling_b,
        n_th: 50.0,
    };
    let steady_axes = vec![SweepAxis {
        param: AxisParam::Kappa,
        values: KAPPA_GRID.to_vec(),
    }];
    let ratio_axis = SweepAxis {
        param: AxisParam::RatioAOverB,
        values: linspace(0.0, 10.0, 41),
    };
    let beta_axis = SweepAxis {
        param: AxisParam::Beta,
        values: linspace(-0.2, 0.2, 41),
    };
    let delta_axis = SweepAxis {
        param: AxisParam::Delta,
        values: linspace(-1.5, 1.0, 51),
    };

    let mut spec = SweepSpec {
        params: fig4_params(-1.0),
        drive: chirp(1.5, 0.15, 0.05, 30.0),
        mf0: MeanFieldState::new(real(200.0), Complex64::ZERO),
        t_end: 70.0,
        dt: 1e-3,
        sample_every: 100,
        axes: Vec::new(),
        observable: Observable::PhononAtTEnd,
        target_a: None,
        chi0_scale: Some(1.5),
    };

    match preset {
        FigurePreset::Fig1 => {
            spec.params = SystemParams {
                delta: -1.0,
                kappa: 0.01,
                gamma: 1e-5,
                coupling_a: 0.0,
                coupling_b: 2e-4,
                n_th: 100.0,
            };
            spec.drive = chirp(0.5, 0.14, 0.04, 40.0);
            spec.mf0 = MeanFieldState::new(real(200.0), Complex64::ZERO);
            spec.t_end = 120.0;
            spec.chi0_scale = Some(0.5);
            spec.axes = vec![SweepAxis {
                param: AxisParam::Kappa,
                values: vec![0.01],
            }];
        }
        FigurePreset::Fig2 => {
            spec.params = SystemParams {
                delta: 0.5,
                kappa: 0.5,
                gamma: 1e-6,
                coupling_a: 0.0,
                coupling_b: 2e-4,
                n_th: 50.0,
            };
            spec.mf0 = MeanFieldState::new(real(1000.0), Complex64::ZERO);
            spec.axes = vec![SweepAxis {
                param: AxisParam::Kappa,
                values: KAPPA_GRID.to_vec(),
            }];
        }
        FigurePreset::Fig3a => {
            spec.params = fig3_params(-1.0, 2e-4, 0.0);
            spec.drive = DriveSignal::Constant {
                omega0: Complex64::ZERO,
            };
            spec.chi0_scale = None;
            spec.mf0 = MeanFieldState::new(Complex64::ZERO, Complex64::ZERO);
            spec.axes = steady_axes;
            spec.observable = Observable::SteadyTotal;
            spec.target_a = Some(real(1000.0));
        }
        FigurePreset::Fig3b | FigurePreset::Fig3c => {
            let delta = if preset == FigurePreset::Fig3b { -1.0 } else { 0.5 };
            spec.params = fig3_params(delta, 0.0, 2e-4);
            spec.drive = DriveSignal::Constant {
                omega0: Complex64::ZERO,
            };
            spec.chi0_scale = None;
            spec.mf0 = MeanFieldState::new(Complex64::ZERO, Complex64::ZERO);
            spec.axes = steady_axes;
            spec.observable = if preset == FigurePreset::Fig3c {
                Observable::SteadySigmaEq
            } else {
                Observable::SteadyTotal
            };
            spec.target_a = Some(real(1000.0));
        }
        FigurePreset::Fig4a => {
            spec.axes = vec![ratio_axis, beta_axis];
        }
        FigurePreset::Fig4b => {
            spec.axes = vec![ratio_axis, delta_axis];
        }
        FigurePreset::Fig4c => {
            // No-chirp counterpart of fig4b: constant drive matching the
            // chirp peak amplitude.
            let chi0 = 1.5 * 0.15f64.hypot(0.05);
            spec.drive = DriveSignal::Constant {
                omega0: real(-2.0 / 2e-4 * chi0),
            };
            spec.chi0_scale = None;
            spec.axes = vec![ratio_axis, delta_axis];
        }
        FigurePreset::Fig4d => {
            spec.axes = vec![beta_axis, delta_axis];
        }
    }
    spec
}

/// Base system of `spec` with the axis values at `coords` applied.
pub fn apply_point(spec: &SweepSpec, coords: &[f64]) -> (SystemParams, DriveSignal) {
    let mut params = spec.params;
    let mut drive = spec.drive;
    let mut chi0_pinned = false;

    for (axis, &value) in spec.axes.iter().zip(coords) {
        match axis.param {
            AxisParam::Kappa => params.kappa = value,
            AxisParam::CouplingA => params.coupling_a = value,
            AxisParam::CouplingB => params.coupling_b = value,
            AxisParam::RatioAOverB => params.coupling_a = value * spec.params.coupling_b,
            AxisParam::Delta => params.delta = value,
            AxisParam::NTh => params.n_th = value,
            AxisParam::Gamma => params.gamma = value,
            AxisParam::Beta | AxisParam::Chi0 | AxisParam::Alpha | AxisParam::T0 => {
                let DriveSignal::Chirped(ref mut chirp) = drive else {
                    unreachable!("chirp axis validated against drive kind in run_sweep");
                };
                match axis.param {
                    AxisParam::Beta => chirp.beta = value,
                    AxisParam::Alpha => chirp.alpha = value,
                    AxisParam::T0 => chirp.t0 = value,
                    AxisParam::Chi0 => {
                        chirp.chi0 = value;
                        chi0_pinned = true;
                    }
                    _ => unreachable!(),
                }
            }
        }
    }

    if let (Some(scale), DriveSignal::Chirped(ref mut chirp), false) =
        (spec.chi0_scale, &mut drive, chi0_pinned)
    {
        chirp.chi0 = scale * chirp.alpha.hypot(chirp.beta);
    }

    (params, drive)
}

fn evaluate_point(spec: &SweepSpec, coords: &[f64]) -> Result<f64, String> {
    let (params, drive) = apply_point(spec, coords);
    let result = match spec.observable {
        Observable::PhononAtTEnd => propagate(
            &params,
            &drive,
            &spec.mf0,
            spec.t_end,
            spec.dt,
            spec.sample_every,
        )
        .map(|traj| traj.last().n_phonon),
        steady_obs => {
            let target = spec.target_a.expect("steady observable requires target_a");
            steady_state(&params, target).map(|res| match steady_obs {
                Observable::SteadyTotal => res.n_total,
                Observable::SteadySigmaEq => res.sigma_eq,
                Observable::SteadySBac => res.s_bac,
                Observable::PhononAtTEnd => unreachable!(),
            })
        }
    };
    result.map_err(|e| e.name().to_string())
}

/// Evaluate the observable at every grid point.
///
/// The reduction is deterministic in grid order: the produced grid is
/// identical for any `workers >= 1`.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> SweepGrid {
    assert!(workers >= 1, "workers must be >= 1");
    assert!(
        (1..=2).contains(&spec.axes.len()),
        "sweep needs one or two axes"
    );
    for axis in &spec.axes {
        assert!(!axis.values.is_empty(), "axis {} has no values", axis.param);
        assert!(
            axis.values.iter().all(|v| v.is_finite()),
            "axis {} has non-finite values",
            axis.param
        );
        assert!(
            !axis.param.needs_chirp() || matches!(spec.drive, DriveSignal::Chirped(_)),
            "axis {} requires a chirped drive",
            axis.param
        );
    }
    if spec.observable.is_steady() {
        assert!(
            spec.target_a.is_some(),
            "steady observable requires target_a"
        );
    }

    let n: usize = spec.axes.iter().map(|a| a.values.len()).product();
    let eval = |idx: usize| evaluate_point(spec, &coords_of(&spec.axes, idx));

    let values: Vec<Result<f64, String>> = if workers == 1 {
        (0..n).map(eval).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("failed to build sweep thread pool");
        pool.install(|| (0..n).into_par_iter().map(eval).collect())
    };

    SweepGrid {
        axes: spec.axes.clone(),
        values,
    }
}
