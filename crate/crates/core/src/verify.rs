//! Self-check suite: oracle equivalence plus the propagation and
//! steady-state invariants, each reported as one named pass/fail result.

use num_complex::Complex64;

use crate::model::{self, DriveSignal, MeanFieldState, SystemParams};
use crate::propagation::{propagate, propagate_detailed, propagate_oracle};
use crate::steady::{solve_steady_mean_field, steady_phonon_decomposition};
use crate::sweeps::{apply_point, figure_preset, FigurePreset, SweepSpec};

/// Outcome of a single named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed,
            detail,
        }
    }
}

const DECOUPLED_TOL: f64 = 1e-6;
const COUPLED_COMMUTATOR_TOL: f64 = 0.05;
const SYMMETRY_TOL: f64 = 1e-8;
const REALITY_TOL: f64 = 1e-8;
const ORACLE_REL_TOL: f64 = 1e-6;
const ADDITIVITY_REL_TOL: f64 = 1e-6;
const CONSISTENCY_REL_TOL: f64 = 1e-4;
const STEP_HALVING_REL_TOL: f64 = 1e-6;

/// Trajectory presets exercised by the coupled-dynamics invariants:
/// fig1, the named fig2 point and the fig4 base point.
fn trajectory_presets() -> Vec<(&'static str, SweepSpec, Vec<f64>)> {
    vec![
        ("fig1", figure_preset(FigurePreset::Fig1), vec![0.01]),
        ("fig2[kappa=0.5]", figure_preset(FigurePreset::Fig2), vec![0.5]),
        ("fig4a[ratio=0,beta=0.05]", figure_preset(FigurePreset::Fig4a), vec![0.0, 0.05]),
    ]
}

fn run_preset(
    spec: &SweepSpec,
    coords: &[f64],
) -> Result<Vec<crate::propagation::PropagationRecord>, crate::Error> {
    let (params, drive) = apply_point(spec, coords);
    propagate_detailed(&params, &drive, &spec.mf0, spec.t_end, spec.dt, spec.sample_every)
}

fn decoupled_checks(results: &mut Vec<CheckResult>) {
    let params = SystemParams {
        delta: -1.0,
        kappa: 0.01,
        gamma: 1e-5,
        coupling_a: 0.0,
        coupling_b: 0.0,
        n_th: 100.0,
    };
    let drive = DriveSignal::Constant {
        omega0: Complex64::ZERO,
    };
    let mf0 = MeanFieldState::new(Complex64::new(200.0, 0.0), Complex64::ZERO);
    match propagate_detailed(&params, &drive, &mf0, 20.0, 1e-3, 100) {
        Ok(records) => {
            let mut worst_n: f64 = 0.0;
            let mut worst_comm: f64 = 0.0;
            for rec in &records {
                worst_n = worst_n.max((rec.covariance.n_phonon() - 100.0).abs());
                worst_comm = worst_comm
                    .max((rec.covariance.commutator_optical() - Complex64::ONE).norm())
                    .max((rec.covariance.commutator_mechanical() - Complex64::ONE).norm());
            }
            results.push(CheckResult::new(
                "thermal fixed point (A=B=0)",
                worst_n < DECOUPLED_TOL,
                format!("max |n_phonon - N_th| = {worst_n:.3e} (tol {DECOUPLED_TOL:.0e})"),
            ));
            results.push(CheckResult::new(
                "commutator preservation (decoupled)",
                worst_comm < DECOUPLED_TOL,
                format!("max |<[v,v+]> - 1| = {worst_comm:.3e} (tol {DECOUPLED_TOL:.0e})"),
            ));
        }
        Err(e) => {
            results.push(CheckResult::new(
                "thermal fixed point (A=B=0)",
                false,
                format!("propagation failed: {e}"),
            ));
        }
    }
}

fn preset_invariant_checks(results: &mut Vec<CheckResult>) {
    for (name, spec, coords) in trajectory_presets() {
        match run_preset(&spec, &coords) {
            Ok(records) => {
                let mut worst_comm: f64 = 0.0;
                let mut worst_sym: f64 = 0.0;
                let mut worst_im: f64 = 0.0;
                for rec in &records {
                    let r = &rec.covariance;
                    worst_comm = worst_comm
                        .max((r.commutator_optical() - Complex64::ONE).norm())
                        .max((r.commutator_mechanical() - Complex64::ONE).norm());
                    worst_sym = worst_sym.max(r.symmetry_residual());
                    worst_im = worst_im
                        .max(r.0[(3, 1)].im.abs())
                        .max(r.0[(2, 0)].im.abs());
                }
                results.push(CheckResult::new(
                    format!("commutator preservation ({name})"),
                    worst_comm < COUPLED_COMMUTATOR_TOL,
                    format!("max |<[v,v+]> - 1| = {worst_comm:.3e} (tol {COUPLED_COMMUTATOR_TOL})"),
                ));
                results.push(CheckResult::new(
                    format!("symmetry preservation ({name})"),
                    worst_sym < SYMMETRY_TOL,
                    format!("max |R - S R^H S| = {worst_sym:.3e} (tol {SYMMETRY_TOL:.0e})"),
                ));
                results.push(CheckResult::new(
                    format!("reality of occupations ({name})"),
                    worst_im < REALITY_TOL,
                    format!("max |Im R42|, |Im R31| = {worst_im:.3e} (tol {REALITY_TOL:.0e})"),
                ));
            }
            Err(e) => results.push(CheckResult::new(
                format!("preset invariants ({name})"),
                false,
                format!("propagation failed: {e}"),
            )),
        }
    }
}

fn oracle_checks(results: &mut Vec<CheckResult>) {
    for (name, spec, coords) in [
        ("fig1", figure_preset(FigurePreset::Fig1), vec![0.01]),
        ("fig2[kappa=0.5]", figure_preset(FigurePreset::Fig2), vec![0.5]),
    ] {
        let (params, drive) = apply_point(&spec, &coords);
        let mut worst: f64 = 0.0;
        let mut failure: Option<String> = None;
        match propagate_detailed(&params, &drive, &spec.mf0, 10.0, spec.dt, spec.sample_every) {
            Ok(records) => {
                for t_end in [2.5, 5.0, 10.0] {
                    let reference = records
                        .iter()
                        .find(|rec| (rec.t - t_end).abs() < 1e-9)
                        .expect("checkpoint on sample grid");
                    match propagate_oracle(&params, &drive, &spec.mf0, t_end, spec.dt) {
                        Ok(oracle) => {
                            let scale = model::max_abs(&reference.covariance.0);
                            let diff =
                                model::max_abs(&(oracle.0 - reference.covariance.0)) / scale;
                            worst = worst.max(diff);
                        }
                        Err(e) => failure = Some(format!("oracle failed at t={t_end}: {e}")),
                    }
                }
            }
            Err(e) => failure = Some(format!("propagation failed: {e}")),
        }
        results.push(match failure {
            None => CheckResult::new(
                format!("oracle equivalence ({name})"),
                worst < ORACLE_REL_TOL,
                format!("max relative deviation = {worst:.3e} (tol {ORACLE_REL_TOL:.0e})"),
            ),
            Some(detail) => CheckResult::new(format!("oracle equivalence ({name})"), false, detail),
        });
    }
}

fn steady_checks(results: &mut Vec<CheckResult>) {
    let spec = figure_preset(FigurePreset::Fig3c);
    let (params, _) = apply_point(&spec, &[0.3]);
    let target = spec.target_a.expect("fig3c has target_a");

    let (omega0, b_ss) = match solve_steady_mean_field(&params, target) {
        Ok(v) => v,
        Err(e) => {
            results.push(CheckResult::new(
                "decomposition additivity (fig3c, kappa=0.3)",
                false,
                format!("fixed point failed: {e}"),
            ));
            return;
        }
    };
    match steady_phonon_decomposition(&params, omega0, target, b_ss) {
        Ok(res) => {
            let gap = (res.n_total - (res.sigma_eq + res.s_bac)).abs();
            let bound = ADDITIVITY_REL_TOL * res.n_total.max(1.0);
            results.push(CheckResult::new(
                "decomposition additivity (fig3c, kappa=0.3)",
                gap < bound && res.sigma_eq >= 0.0 && res.s_bac >= 0.0,
                format!(
                    "|n_total - (sigma_eq + s_bac)| = {gap:.3e} (bound {bound:.3e}), \
                     sigma_eq = {:.3e}, s_bac = {:.3e}",
                    res.sigma_eq, res.s_bac
                ),
            ));

            // Long-time propagation with the solved constant drive must
            // land on the same stationary occupation. The slowest mode
            // relaxes at ~5.5e-3, so t = 5000 leaves no visible transient.
            let drive = DriveSignal::Constant { omega0 };
            let mf0 = MeanFieldState::new(target, b_ss);
            match propagate(&params, &drive, &mf0, 5000.0, 5e-3, 1000) {
                Ok(traj) => {
                    let n_inf = traj.last().n_phonon;
                    let rel = (n_inf - res.n_total).abs() / res.n_total.abs().max(1e-300);
                    results.push(CheckResult::new(
                        "steady consistency with propagation (fig3c, kappa=0.3)",
                        rel < CONSISTENCY_REL_TOL,
                        format!(
                            "n_phonon(5000) = {n_inf:.6e} vs n_total = {:.6e}, rel = {rel:.3e} \
                             (tol {CONSISTENCY_REL_TOL:.0e})",
                            res.n_total
                        ),
                    ));
                }
                Err(e) => results.push(CheckResult::new(
                    "steady consistency with propagation (fig3c, kappa=0.3)",
                    false,
                    format!("propagation failed: {e}"),
                )),
            }
        }
        Err(e) => results.push(CheckResult::new(
            "decomposition additivity (fig3c, kappa=0.3)",
            false,
            format!("decomposition failed: {e}"),
        )),
    }
}

fn step_halving_checks(results: &mut Vec<CheckResult>) {
    for (name, spec, coords) in trajectory_presets() {
        let (params, drive) = apply_point(&spec, &coords);
        let run = |dt: f64| {
            propagate(&params, &drive, &spec.mf0, spec.t_end, dt, spec.sample_every)
                .map(|traj| traj.last().n_phonon)
        };
        let outcome = run(spec.dt).and_then(|coarse| run(spec.dt / 2.0).map(|fine| (coarse, fine)));
        results.push(match outcome {
            Ok((coarse, fine)) => {
                let rel = (coarse - fine).abs() / fine.abs().max(1e-300);
                CheckResult::new(
                    format!("step-halving convergence ({name})"),
                    rel < STEP_HALVING_REL_TOL,
                    format!("relative change = {rel:.3e} (tol {STEP_HALVING_REL_TOL:.0e})"),
                )
            }
            Err(e) => CheckResult::new(
                format!("step-halving convergence ({name})"),
                false,
                format!("propagation failed: {e}"),
            ),
        });
    }
}

/// Run every invariant check; returns one result per check.
pub fn run_invariant_suite() -> Vec<CheckResult> {
    let mut results = Vec::new();
    decoupled_checks(&mut results);
    preset_invariant_checks(&mut results);
    oracle_checks(&mut results);
    steady_checks(&mut results);
    step_halving_checks(&mut results);
    results
}
