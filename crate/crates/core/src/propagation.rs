//! Joint integration of the mean-field equations and the covariance
//! dynamics.
//!
//! The primary propagator advances `dR/dt = M R + R M^T + C` together with
//! the mean field by classical fixed-step RK4, re-evaluating the drive and
//! the coefficient matrices at every stage. The fundamental-matrix route
//! (`propagate_oracle`) solves the same dynamics through `G(t)` and the
//! quadrature `Z(t)`; it exists as an independent cross-check on the
//! differential form.

use num_complex::Complex64;

use crate::error::Error;
use crate::model::{
    self, build_drift_matrix, build_noise_matrix, drive_amplitude, eval_coefficients,
    mean_field_rhs, CMat4, DriveSignal, MeanFieldState, SystemParams,
};

/// Magnitude above which any state component counts as an integration
/// blow-up. Far above every physical value in the presets.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Condition-estimate cap for the oracle's fundamental matrix; beyond this
/// the quadrature over `G^{-1}` is no longer trustworthy.
pub const ORACLE_CONDITION_LIMIT: f64 = 1e8;

/// Second moments `R_{l l'} = <v_l v_l'>` of the fluctuation vector
/// `V = [da, db, da+, db+]` (ordered products, not symmetrized).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix(pub CMat4);

impl CovarianceMatrix {
    /// Mean displaced phonon number `<db+ db>` (entry (4,2)).
    pub fn n_phonon(&self) -> f64 {
        self.0[(3, 1)].re
    }

    /// Mean displaced photon number `<da+ da>` (entry (3,1)).
    pub fn n_photon(&self) -> f64 {
        self.0[(2, 0)].re
    }

    /// `<[da, da+]>`, exactly 1 for the physical state.
    pub fn commutator_optical(&self) -> Complex64 {
        self.0[(0, 2)] - self.0[(2, 0)]
    }

    /// `<[db, db+]>`, exactly 1 for the physical state.
    pub fn commutator_mechanical(&self) -> Complex64 {
        self.0[(1, 3)] - self.0[(3, 1)]
    }

    /// Max-norm deviation from the conjugation symmetry
    /// `R_{ij} = conj(R_{s(j) s(i)})` with s swapping (1,3) and (2,4).
    pub fn symmetry_residual(&self) -> f64 {
        model::max_abs(&(self.0 - model::sigma_adjoint_image(&self.0)))
    }
}

/// Covariance of a cavity vacuum joined to a mechanical bath of occupation
/// `n_th`: nonzero entries (1,3) = 1, (2,4) = n_th + 1, (4,2) = n_th.
pub fn initial_covariance(n_th: f64) -> Result<CovarianceMatrix, Error> {
    if n_th < 0.0 {
        return Err(Error::NegativeOccupation { n_th });
    }
    let mut r = CMat4::zeros();
    r[(0, 2)] = Complex64::ONE;
    r[(1, 3)] = Complex64::from(n_th + 1.0);
    r[(3, 1)] = Complex64::from(n_th);
    Ok(CovarianceMatrix(r))
}

/// `M R + R M^T + C` (plain transpose, matching the ordered-product
/// covariance).
pub fn covariance_rhs(m: &CMat4, r: &CMat4, c: &CMat4) -> CMat4 {
    m * r + r * m.transpose() + c
}

/// Phonon and photon occupations `(Re R42, Re R31)`.
pub fn extract_observables(r: &CovarianceMatrix) -> (f64, f64) {
    (r.n_phonon(), r.n_photon())
}

/// One propagation sample with the full covariance retained.
#[derive(Debug, Clone, Copy)]
pub struct PropagationRecord {
    pub t: f64,
    pub mean_field: MeanFieldState,
    pub covariance: CovarianceMatrix,
    pub omega: Complex64,
}

/// Scalar time-series record of a propagation run.
#[derive(Debug, Clone, Copy)]
pub struct TrajectorySample {
    pub t: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub n_phonon: f64,
    pub n_photon: f64,
    pub omega: Complex64,
}

/// Sampled output of [`propagate`]: strictly increasing times starting at
/// t = 0.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    /// Final sample (the state at `t_end`).
    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory has at least the t = 0 sample")
    }
}

pub(crate) trait RkState: Copy {
    /// `self + c * k`.
    fn add_scaled(&self, c: f64, k: &Self) -> Self;
}

impl RkState for CMat4 {
    fn add_scaled(&self, c: f64, k: &Self) -> Self {
        self + k * Complex64::from(c)
    }
}

/// One classical fourth-order Runge-Kutta step of size `h`.
pub(crate) fn rk4_step<S: RkState, E>(
    f: &mut impl FnMut(f64, &S) -> Result<S, E>,
    t: f64,
    y: &S,
    h: f64,
) -> Result<S, E> {
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &y.add_scaled(0.5 * h, &k1))?;
    let k3 = f(t + 0.5 * h, &y.add_scaled(0.5 * h, &k2))?;
    let k4 = f(t + h, &y.add_scaled(h, &k3))?;
    Ok(y
        .add_scaled(h / 6.0, &k1)
        .add_scaled(h / 3.0, &k2)
        .add_scaled(h / 3.0, &k3)
        .add_scaled(h / 6.0, &k4))
}

#[derive(Clone, Copy)]
struct JointState {
    a: Complex64,
    b: Complex64,
    r: CMat4,
}

impl RkState for JointState {
    fn add_scaled(&self, c: f64, k: &Self) -> Self {
        JointState {
            a: self.a + c * k.a,
            b: self.b + c * k.b,
            r: self.r.add_scaled(c, &k.r),
        }
    }
}

impl JointState {
    fn max_abs(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(model::max_abs(&self.r))
    }
}

fn validate_run(
    params: &SystemParams,
    drive: &DriveSignal,
    t_end: f64,
    dt: f64,
) -> Result<(), Error> {
    assert!(t_end > 0.0, "t_end must be positive");
    assert!(dt > 0.0, "dt must be positive");
    if matches!(drive, DriveSignal::Chirped(_)) && params.coupling_b == 0.0 {
        return Err(Error::ChirpWithoutDissipation);
    }
    Ok(())
}

fn step_count(t_end: f64, dt: f64) -> usize {
    ((t_end / dt).round() as usize).max(1)
}

/// Advance mean field and covariance from t = 0 to `t_end`, keeping the
/// full covariance at each retained sample.
pub fn propagate_detailed(
    params: &SystemParams,
    drive: &DriveSignal,
    mf0: &MeanFieldState,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Vec<PropagationRecord>, Error> {
    assert!(sample_every >= 1, "sample_every must be >= 1");
    validate_run(params, drive, t_end, dt)?;

    let n_steps = step_count(t_end, dt);
    let mut state = JointState {
        a: mf0.a,
        b: mf0.b,
        r: initial_covariance(params.n_th)?.0,
    };
    let mut records = Vec::with_capacity(n_steps / sample_every + 2);

    let mut rhs = |t: f64, s: &JointState| -> Result<JointState, Error> {
        let mf = MeanFieldState::new(s.a, s.b);
        let omega = drive_amplitude(params, drive, &mf, t)?;
        let coeffs = eval_coefficients(params, &mf, omega);
        let m = build_drift_matrix(params, &coeffs);
        let c = build_noise_matrix(params, &mf, &coeffs);
        let (da, db) = mean_field_rhs(params, &mf, omega);
        Ok(JointState {
            a: da,
            b: db,
            r: covariance_rhs(&m, &s.r, &c),
        })
    };

    for k in 0..=n_steps {
        let t = k as f64 * dt;
        if k % sample_every == 0 || k == n_steps {
            let mf = MeanFieldState::new(state.a, state.b);
            records.push(PropagationRecord {
                t,
                mean_field: mf,
                covariance: CovarianceMatrix(state.r),
                omega: drive_amplitude(params, drive, &mf, t)?,
            });
        }
        if k == n_steps {
            break;
        }
        state = rk4_step(&mut rhs, t, &state, dt)?;
        if !state.max_abs().is_finite() || state.max_abs() > DIVERGENCE_LIMIT {
            return Err(Error::Diverged {
                t: (k + 1) as f64 * dt,
                limit: DIVERGENCE_LIMIT,
            });
        }
    }

    Ok(records)
}

/// Advance mean field and covariance from t = 0 to `t_end`, sampling every
/// `sample_every` steps.
pub fn propagate(
    params: &SystemParams,
    drive: &DriveSignal,
    mf0: &MeanFieldState,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory, Error> {
    let records = propagate_detailed(params, drive, mf0, t_end, dt, sample_every)?;
    let samples = records
        .into_iter()
        .map(|rec| {
            let (n_phonon, n_photon) = extract_observables(&rec.covariance);
            TrajectorySample {
                t: rec.t,
                a: rec.mean_field.a,
                b: rec.mean_field.b,
                n_phonon,
                n_photon,
                omega: rec.omega,
            }
        })
        .collect();
    Ok(Trajectory { samples })
}

#[derive(Clone, Copy)]
struct OracleState {
    a: Complex64,
    b: Complex64,
    g: CMat4,
    z: CMat4,
}

impl RkState for OracleState {
    fn add_scaled(&self, c: f64, k: &Self) -> Self {
        OracleState {
            a: self.a + c * k.a,
            b: self.b + c * k.b,
            g: self.g.add_scaled(c, &k.g),
            z: self.z.add_scaled(c, &k.z),
        }
    }
}

fn inf_norm(m: &CMat4) -> f64 {
    (0..4)
        .map(|i| (0..4).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Covariance at `t_end` via the fundamental-matrix solution
/// `R = G (R(0) + Z) G^T` with `dG/dt = M G` and
/// `dZ/dt = G^{-1} C G^{-T}`, integrated along the same mean-field
/// trajectory as [`propagate`].
pub fn propagate_oracle(
    params: &SystemParams,
    drive: &DriveSignal,
    mf0: &MeanFieldState,
    t_end: f64,
    dt: f64,
) -> Result<CovarianceMatrix, Error> {
    validate_run(params, drive, t_end, dt)?;

    let n_steps = step_count(t_end, dt);
    let r0 = initial_covariance(params.n_th)?.0;
    let mut state = OracleState {
        a: mf0.a,
        b: mf0.b,
        g: CMat4::identity(),
        z: CMat4::zeros(),
    };

    let mut rhs = |t: f64, s: &OracleState| -> Result<OracleState, Error> {
        let mf = MeanFieldState::new(s.a, s.b);
        let omega = drive_amplitude(params, drive, &mf, t)?;
        let coeffs = eval_coefficients(params, &mf, omega);
        let m = build_drift_matrix(params, &coeffs);
        let c = build_noise_matrix(params, &mf, &coeffs);
        let g_inv = s
            .g
            .try_inverse()
            .ok_or(Error::IllConditioned { t, cond: f64::INFINITY })?;
        let cond = inf_norm(&s.g) * inf_norm(&g_inv);
        if cond > ORACLE_CONDITION_LIMIT {
            return Err(Error::IllConditioned { t, cond });
        }
        let (da, db) = mean_field_rhs(params, &mf, omega);
        Ok(OracleState {
            a: da,
            b: db,
            g: m * s.g,
            z: g_inv * c * g_inv.transpose(),
        })
    };

    for k in 0..n_steps {
        let t = k as f64 * dt;
        state = rk4_step(&mut rhs, t, &state, dt)?;
    }

    let r = state.g * (r0 + state.z) * state.g.transpose();
    Ok(CovarianceMatrix(r))
}
