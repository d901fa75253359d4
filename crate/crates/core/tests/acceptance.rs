//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (run with `--nocapture` to see the lines for passing tests).
//!
//! Three checks encode reference-figure claims that the model, as
//! cross-validated against an independent integrator and an independent
//! stationary-state solver, reproduces only qualitatively; they fail with
//! small, stable margins and are kept failing rather than loosened:
//!   - criterion 4: the +/-beta profiles agree only to 7-80%, not 2%
//!     (the sweep direction relative to the detuning matters);
//!   - criterion 5: the chirped fig1 floor is ~0.28, so bath reheating
//!     over the [80, 120] window forces max/min ~ 1.13 > 1.10;
//!   - criterion 6: the fig3a occupation minimum sits at kappa ~ 0.125,
//!     below the first grid point, so the 5-point grid is monotone;
//!   - criterion 8: the fig2 strong-pulse run drives B|<a>| to order one,
//!     where the linearized noise model stops preserving commutators.

use num_complex::Complex64;
use std::sync::OnceLock;
use std::time::Instant;

use optocool::model::DriveSignal;
use optocool::propagation::{propagate, propagate_detailed, propagate_oracle};
use optocool::sweeps::{apply_point, figure_preset, run_sweep, FigurePreset, SweepSpec};
use optocool::{model, run_invariant_suite, Trajectory};

fn report(criterion: &str, passed: bool, detail: &str) -> bool {
    println!(
        "criterion {criterion} {}: {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    passed
}

fn preset_trajectory(spec: &SweepSpec, coords: &[f64]) -> Trajectory {
    let (params, drive) = apply_point(spec, coords);
    propagate(&params, &drive, &spec.mf0, spec.t_end, spec.dt, spec.sample_every)
        .expect("preset propagation")
}

#[test]
fn criterion_1_fig2_named_point() {
    let start = Instant::now();
    let spec = figure_preset(FigurePreset::Fig2);
    let traj = preset_trajectory(&spec, &[0.5]);
    let n70 = traj.last().n_phonon;
    let elapsed = start.elapsed().as_secs_f64();
    let passed = (n70 - 1.6).abs() <= 0.5 && elapsed < 10.0;
    let ok = report(
        "1",
        passed,
        &format!("fig2 kappa=0.5: n_phonon(70) = {n70:.4} (expected 1.6 +/- 0.5), runtime {elapsed:.2} s (< 10 s)"),
    );
    assert!(ok);
}

#[test]
fn criterion_2_fig2_monotone_in_kappa() {
    let spec = figure_preset(FigurePreset::Fig2);
    let grid = run_sweep(&spec, 1);
    let values: Vec<f64> = grid
        .values
        .iter()
        .map(|v| *v.as_ref().expect("fig2 point"))
        .collect();
    let strictly_decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let ok = report(
        "2",
        strictly_decreasing,
        &format!("fig2 n_phonon(70) over kappa grid = {values:.4?} (strictly decreasing)"),
    );
    assert!(ok);
}

/// fig4a column at A/B = 0: (beta, n_phonon(70)) for
/// beta in {-0.18, -0.14, -0.10, 0, 0.10, 0.14, 0.18}.
fn fig4a_column() -> &'static Vec<(f64, f64)> {
    static DATA: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    DATA.get_or_init(|| {
        let betas = [-0.18, -0.14, -0.10, 0.0, 0.10, 0.14, 0.18];
        let mut spec = figure_preset(FigurePreset::Fig4a);
        spec.axes[0].values = vec![0.0];
        spec.axes[1].values = betas.to_vec();
        let grid = run_sweep(&spec, 1);
        betas
            .iter()
            .zip(&grid.values)
            .map(|(&b, v)| (b, *v.as_ref().expect("fig4a point")))
            .collect()
    })
}

fn column_value(beta: f64) -> f64 {
    fig4a_column()
        .iter()
        .find(|(b, _)| (*b - beta).abs() < 1e-12)
        .expect("sampled beta")
        .1
}

#[test]
fn criterion_3_fig4a_cooling_region() {
    let sampled = [0.10, -0.10, 0.14, -0.14, 0.18, -0.18];
    let n0 = column_value(0.0);
    let mut all_cooled = true;
    let mut zero_is_worst = true;
    let mut detail = format!("n(beta=0) = {n0:.4};");
    for beta in sampled {
        let n = column_value(beta);
        all_cooled &= n < 1.3;
        zero_is_worst &= n0 > n;
        detail.push_str(&format!(" n({beta:+.2}) = {n:.4}"));
    }
    let ok = report(
        "3",
        all_cooled && zero_is_worst,
        &format!("{detail} (all < 1.3 and below the beta=0 value)"),
    );
    assert!(ok);
}

#[test]
fn criterion_4_fig4a_symmetry() {
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for beta in [0.10, 0.14, 0.18] {
        let plus = column_value(beta);
        let minus = column_value(-beta);
        let rel = (plus - minus).abs() / plus.max(minus);
        worst = worst.max(rel);
        detail.push_str(&format!(
            "|beta|={beta:.2}: n(+)={plus:.4} n(-)={minus:.4} rel dev {:.1}%; ",
            100.0 * rel
        ));
    }
    let ok = report(
        "4",
        worst <= 0.02,
        &format!("{detail}worst {:.1}% (bound 2%)", 100.0 * worst),
    );
    assert!(ok);
}

fn window_ratio(traj: &Trajectory, t_lo: f64, t_hi: f64) -> f64 {
    let window: Vec<f64> = traj
        .samples
        .iter()
        .filter(|s| s.t >= t_lo && s.t <= t_hi)
        .map(|s| s.n_phonon)
        .collect();
    assert!(window.len() > 100, "window poorly sampled");
    let max = window.iter().cloned().fold(f64::MIN, f64::max);
    let min = window.iter().cloned().fold(f64::MAX, f64::min);
    max / min
}

#[test]
fn criterion_5_fig1_stabilization() {
    let spec = figure_preset(FigurePreset::Fig1);
    let chirped = preset_trajectory(&spec, &[0.01]);
    let ratio_chirped = window_ratio(&chirped, 80.0, 120.0);

    // No-chirp comparison: constant drive matching the chirp peak
    // -(2/B) chi0 (A = 0 for this preset).
    let (params, DriveSignal::Chirped(chirp)) = apply_point(&spec, &[0.01]) else {
        panic!("fig1 is chirped");
    };
    let constant = DriveSignal::Constant {
        omega0: Complex64::new(-2.0 / params.coupling_b * chirp.chi0, 0.0),
    };
    let no_chirp = propagate(&params, &constant, &spec.mf0, spec.t_end, spec.dt, spec.sample_every)
        .expect("no-chirp run");
    let ratio_constant = window_ratio(&no_chirp, 80.0, 120.0);

    let ok = report(
        "5",
        ratio_chirped < 1.10 && ratio_constant > 1.5,
        &format!(
            "chirped max/min on [80,120] = {ratio_chirped:.4} (bound < 1.10), \
             no-chirp = {ratio_constant:.4} (bound > 1.5)"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_6_fig3_trends() {
    let sigma: Vec<f64> = run_sweep(&figure_preset(FigurePreset::Fig3c), 1)
        .values
        .iter()
        .map(|v| *v.as_ref().expect("fig3c point"))
        .collect();
    let sigma_decreasing = sigma.windows(2).all(|w| w[1] < w[0]);

    let total: Vec<f64> = run_sweep(&figure_preset(FigurePreset::Fig3a), 1)
        .values
        .iter()
        .map(|v| *v.as_ref().expect("fig3a point"))
        .collect();
    let interior_min = (1..total.len() - 1).any(|i| {
        total[i] < total[0] && total[i] < total[total.len() - 1]
    }) && total.windows(2).any(|w| w[1] < w[0])
        && total.windows(2).any(|w| w[1] > w[0]);

    let ok = report(
        "6",
        sigma_decreasing && interior_min,
        &format!(
            "fig3c sigma_eq = {sigma:.5?} (strictly decreasing: {sigma_decreasing}); \
             fig3a n_total = {total:.5?} (interior minimum: {interior_min})"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_7_oracle_equivalence() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (spec, coords) in [
        (figure_preset(FigurePreset::Fig1), vec![0.01]),
        (figure_preset(FigurePreset::Fig2), vec![0.5]),
    ] {
        let (params, drive) = apply_point(&spec, &coords);
        let records =
            propagate_detailed(&params, &drive, &spec.mf0, 10.0, spec.dt, spec.sample_every)
                .expect("propagation");
        for t_end in [2.5, 5.0, 10.0] {
            let reference = records
                .iter()
                .find(|rec| (rec.t - t_end).abs() < 1e-9)
                .expect("checkpoint");
            let oracle = propagate_oracle(&params, &drive, &spec.mf0, t_end, spec.dt)
                .expect("oracle");
            let scale = model::max_abs(&reference.covariance.0);
            worst = worst.max(model::max_abs(&(oracle.0 - reference.covariance.0)) / scale);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = report(
        "7",
        worst < 1e-6 && elapsed < 5.0,
        &format!(
            "max relative deviation over fig1/fig2 on t in [0,10] = {worst:.3e} (tol 1e-6), \
             runtime {elapsed:.2} s (< 5 s)"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_8_invariant_suite() {
    let results = run_invariant_suite();
    let mut all_passed = true;
    for r in &results {
        println!(
            "  {} {}: {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
        all_passed &= r.passed;
    }
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name.as_str())
        .collect();
    let ok = report(
        "8",
        all_passed,
        &format!("{} checks, failing: {failed:?}", results.len()),
    );
    assert!(ok);
}

#[test]
fn criterion_9_sweep_determinism() {
    // Library level: bitwise-identical grids for different worker counts.
    let mut spec = figure_preset(FigurePreset::Fig4a);
    spec.axes[0].values = vec![0.0, 5.0];
    spec.axes[1].values = vec![-0.1, 0.0, 0.1];
    spec.t_end = 5.0;
    let serial = run_sweep(&spec, 1);
    let parallel = run_sweep(&spec, 8);
    let grids_identical = serial == parallel;

    // CLI level: byte-identical CSV files for -j 1 and -j 8.
    let bin = env!("CARGO_BIN_EXE_optocool");
    let dir = std::env::temp_dir().join(format!("optocool-acc9-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let out1 = dir.join("j1.csv");
    let out8 = dir.join("j8.csv");
    for (jobs, out) in [("1", &out1), ("8", &out8)] {
        let status = std::process::Command::new(bin)
            .args([
                "sweep",
                "--preset",
                "fig2",
                "--axis",
                "kappa=0.3,0.5",
                "-j",
                jobs,
                "-o",
            ])
            .arg(out)
            .status()
            .expect("run sweep");
        assert!(status.success(), "sweep -j {jobs} failed");
    }
    let bytes_identical =
        std::fs::read(&out1).expect("j1.csv") == std::fs::read(&out8).expect("j8.csv");
    let _ = std::fs::remove_dir_all(&dir);

    let ok = report(
        "9",
        grids_identical && bytes_identical,
        &format!("grids identical: {grids_identical}, CSV bytes identical: {bytes_identical}"),
    );
    assert!(ok);
}

#[test]
fn fig4d_spot_check() {
    // Note to criteria 3-4: beta = 0.125 cools below 1.3 at both detuning
    // pockets of the fig4d plane.
    let spec = figure_preset(FigurePreset::Fig4d);
    let mut detail = String::new();
    let mut passed = true;
    for delta in [-1.0, 0.4] {
        let (params, drive) = apply_point(&spec, &[0.125, delta]);
        let traj = propagate(&params, &drive, &spec.mf0, spec.t_end, spec.dt, spec.sample_every)
            .expect("fig4d point");
        let n = traj.last().n_phonon;
        passed &= n < 1.3;
        detail.push_str(&format!("delta={delta:+.1}: n(70) = {n:.4}; "));
    }
    let ok = report("3-4 note (fig4d)", passed, &format!("{detail}(both < 1.3)"));
    assert!(ok);
}

#[test]
fn steady_example_decoupled_drive() {
    // Decoupled resonant inversion: Omega0 = i kappa a / 2.
    let params = optocool::SystemParams {
        delta: 0.0,
        kappa: 0.3,
        gamma: 1e-6,
        coupling_a: 0.0,
        coupling_b: 0.0,
        n_th: 0.0,
    };
    let (omega0, b_ss) =
        optocool::solve_steady_mean_field(&params, Complex64::new(1000.0, 0.0)).unwrap();
    assert!((omega0 - Complex64::new(0.0, 150.0)).norm() < 1e-9);
    assert!(b_ss.norm() < 1e-12);
}
