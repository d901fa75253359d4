//! Physical parameter space and model coefficient functions.
//!
//! Everything is expressed in units of the mechanical frequency: rates and
//! detunings are divided by `omega_m`, times are multiplied by it. The
//! mechanical frequency itself is therefore fixed to 1 and carries no field.

use nalgebra::SMatrix;
use num_complex::Complex64;

use crate::error::Error;

/// 4x4 complex matrix over the fluctuation vector `[da, db, da+, db+]`.
pub type CMat4 = SMatrix<Complex64, 4, 4>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Static physical rates and couplings, all in units of the mechanical
/// frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Drive detuning from the cavity resonance.
    pub delta: f64,
    /// Cavity damping rate, >= 0.
    pub kappa: f64,
    /// Mechanical damping rate, >= 0.
    pub gamma: f64,
    /// Dispersive coupling strength (dimensionless).
    pub coupling_a: f64,
    /// Dissipative coupling strength (dimensionless).
    pub coupling_b: f64,
    /// Mechanical bath occupation, >= 0.
    pub n_th: f64,
}

/// Pulse envelope and frequency-sweep parameters of a chirped drive.
///
/// The amplitude follows a sech envelope of rate `alpha` centred at `t0`,
/// and the instantaneous frequency sweeps as `beta * tanh(alpha (t - t0))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpedDrive {
    /// Peak envelope amplitude, > 0.
    pub chi0: f64,
    /// Envelope rate, > 0.
    pub alpha: f64,
    /// Frequency-sweep strength.
    pub beta: f64,
    /// Pulse centre time.
    pub t0: f64,
}

/// Drive specification: either a constant amplitude or a chirped pulse
/// imposed through the drive constraint (see [`drive_amplitude`]).
///
/// A chirped drive requires `coupling_b != 0` in the paired
/// [`SystemParams`]; the constraint is otherwise unsolvable for the
/// amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveSignal {
    Constant { omega0: Complex64 },
    Chirped(ChirpedDrive),
}

/// Classical amplitudes of the cavity and mechanical modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldState {
    pub a: Complex64,
    pub b: Complex64,
}

impl MeanFieldState {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    /// Largest component magnitude, used by the divergence guard.
    pub fn max_abs(&self) -> f64 {
        self.a.norm().max(self.b.norm())
    }
}

/// Values of the four coefficient functions entering the drift and noise
/// matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub f1: Complex64,
    pub f2: Complex64,
    /// Real for all real-parameter inputs.
    pub f3: Complex64,
    pub f4: Complex64,
}

/// Evaluate the coefficient functions at the given mean field and drive
/// amplitude.
pub fn eval_coefficients(
    params: &SystemParams,
    mf: &MeanFieldState,
    omega: Complex64,
) -> CoefficientSet {
    let SystemParams {
        delta,
        kappa,
        coupling_a: a,
        coupling_b: b,
        ..
    } = *params;
    let re_b = mf.b.re;

    let f1 = I * delta + I * 2.0 * a * kappa * re_b - 0.5 * kappa - kappa * b * re_b;
    let f2 = I * a * kappa * mf.a - 0.5 * kappa * b * mf.a - I * 0.5 * b * omega;
    let f3 = Complex64::from(kappa.sqrt() * (1.0 + b * re_b));
    let f4 = I * a * kappa * mf.a.conj() - I * 0.5 * b * omega.conj();

    CoefficientSet { f1, f2, f3, f4 }
}

/// Drift matrix of the fluctuation vector `[da, db, da+, db+]`.
pub fn build_drift_matrix(params: &SystemParams, coeffs: &CoefficientSet) -> CMat4 {
    let CoefficientSet { f1, f2, f4, .. } = *coeffs;
    let g2 = 0.5 * params.gamma;
    let zero = Complex64::ZERO;

    CMat4::from_row_slice(&[
        f1,
        f2,
        zero,
        f2,
        f4,
        Complex64::new(-g2, -1.0),
        -f4.conj(),
        zero,
        zero,
        f2.conj(),
        f1.conj(),
        f2.conj(),
        -f4,
        zero,
        f4.conj(),
        Complex64::new(-g2, 1.0),
    ])
}

/// Markovian noise-correlation matrix of the fluctuation forces.
///
/// The (4,2) entry uses a `kappa` prefactor on the backaction term, which
/// keeps the bosonic commutator `<[db, db+]>` exactly preserved along the
/// flow; the `c42-paper-literal` feature switches it to `sqrt(kappa)` for
/// comparison.
pub fn build_noise_matrix(
    params: &SystemParams,
    mf: &MeanFieldState,
    coeffs: &CoefficientSet,
) -> CMat4 {
    let SystemParams {
        kappa,
        gamma,
        coupling_b: b,
        n_th,
        ..
    } = *params;
    let f3 = coeffs.f3;
    let sqrt_k = kappa.sqrt();
    let half_b = 0.5 * b;
    let abs_a_sq = mf.a.norm_sqr();
    let bac = 0.25 * b * b * kappa * abs_a_sq;
    let c42_k = if cfg!(feature = "c42-paper-literal") {
        sqrt_k
    } else {
        kappa
    };
    let bac_42 = 0.25 * b * b * c42_k * abs_a_sq;
    let zero = Complex64::ZERO;

    let mut c = CMat4::zeros();
    c[(0, 1)] = -f3 * half_b * sqrt_k * mf.a;
    c[(0, 2)] = Complex64::from(f3.norm_sqr());
    c[(0, 3)] = f3 * half_b * sqrt_k * mf.a;
    c[(1, 1)] = Complex64::from(-bac);
    c[(1, 2)] = half_b * sqrt_k * f3.conj() * mf.a.conj();
    c[(1, 3)] = Complex64::from(bac + gamma * (n_th + 1.0));
    c[(3, 1)] = Complex64::from(bac_42 + gamma * n_th);
    c[(3, 2)] = -half_b * sqrt_k * f3.conj() * mf.a.conj();
    c[(3, 3)] = Complex64::from(-bac);
    debug_assert_eq!(c[(2, 0)], zero);
    c
}

/// Right-hand sides of the mean-field equations for `<a>` and `<b>`.
pub fn mean_field_rhs(
    params: &SystemParams,
    mf: &MeanFieldState,
    omega: Complex64,
) -> (Complex64, Complex64) {
    let SystemParams {
        delta,
        kappa,
        gamma,
        coupling_a: a,
        coupling_b: b,
        ..
    } = *params;
    let re_b = mf.b.re;

    let da = I * delta * mf.a + I * 2.0 * a * kappa * re_b * mf.a
        - kappa * b * re_b * mf.a
        - I * omega
        - I * b * re_b * omega
        - 0.5 * kappa * mf.a;
    let db = -I * mf.b + I * a * kappa * mf.a.norm_sqr()
        - 0.5 * gamma * mf.b
        - I * 0.5 * b * (omega * mf.a.conj() + omega.conj() * mf.a);

    (da, db)
}

/// `ln(cosh(x))` without overflow for large `|x|`.
fn ln_cosh(x: f64) -> f64 {
    let ax = x.abs();
    ax + (-2.0 * ax).exp().ln_1p() - std::f64::consts::LN_2
}

/// Instantaneous envelope `chi(t)`, accumulated phase `phi(t)` and sweep
/// `dphi/dt` of a chirped pulse.
///
/// The phase integration constant is fixed by `phi(t0) = 0`.
pub fn chirp_envelope(drive: &ChirpedDrive, t: f64) -> (f64, f64, f64) {
    let x = drive.alpha * (t - drive.t0);
    let chi = drive.chi0 / x.cosh();
    let phidot = drive.beta * x.tanh();
    let phi = drive.beta / drive.alpha * ln_cosh(x);
    (chi, phi, phidot)
}

/// Drive amplitude at time `t`.
///
/// The constant variant passes through. The chirped variant solves the
/// drive constraint `A kappa <a> - Omega B/2 = chi e^{i phi}` for the
/// amplitude at the instantaneous mean field, which requires B != 0.
pub fn drive_amplitude(
    params: &SystemParams,
    drive: &DriveSignal,
    mf: &MeanFieldState,
    t: f64,
) -> Result<Complex64, Error> {
    match drive {
        DriveSignal::Constant { omega0 } => Ok(*omega0),
        DriveSignal::Chirped(chirp) => {
            if params.coupling_b == 0.0 {
                return Err(Error::ChirpWithoutDissipation);
            }
            let (chi, phi, _) = chirp_envelope(chirp, t);
            let target = chi * Complex64::cis(phi);
            Ok(2.0 / params.coupling_b * (params.coupling_a * params.kappa * mf.a - target))
        }
    }
}

/// Index swap (1<->3, 2<->4) underlying the conjugation symmetries of the
/// drift, noise and covariance matrices.
pub(crate) const SIGMA_SWAP: [usize; 4] = [2, 3, 0, 1];

/// Adjoint-style image of `m` under the index swap: entry (i, j) maps to
/// the conjugate of entry (s(j), s(i)). Covariance and noise matrices
/// satisfy `m == sigma_adjoint_image(m)`.
pub(crate) fn sigma_adjoint_image(m: &CMat4) -> CMat4 {
    CMat4::from_fn(|i, j| m[(SIGMA_SWAP[j], SIGMA_SWAP[i])].conj())
}

/// Largest entry magnitude of a matrix.
pub fn max_abs(m: &CMat4) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}
