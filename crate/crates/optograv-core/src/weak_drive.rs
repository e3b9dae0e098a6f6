//! Quantum Fisher information in the weak-drive, compensated-gravity limit.
//!
//! With `eta` and `G'` small the system stays within `{|00>, |01>, |10>, |11>}`
//! (cavity, mechanics) and evolves under the non-Hermitian Hamiltonian
//! `H - (i/2) Σ r_k c_k† c_k`. Fixing `p00 = 1` and asking the other three
//! amplitudes to be stationary gives a 3x3 linear system.

use alloc::vec::Vec;
#[allow(unused_imports)] // float math without std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64, I};
use crate::model::{self, BuildOptions, Dims, Drives};
use crate::params::{Coupling, SystemParams};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakDriveLimits {
    pub eta: f64,
    pub net_drive: f64,
}

impl Default for WeakDriveLimits {
    fn default() -> Self {
        Self {
            eta: 0.05,
            net_drive: 0.05,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeakDriveWarning {
    StrongDrive { eta: f64 },
    UncompensatedGravity { net_drive: f64 },
}

pub fn check_limits(p: &SystemParams, limits: &WeakDriveLimits) -> Vec<WeakDriveWarning> {
    let mut w = Vec::new();
    if p.eta.abs() > limits.eta {
        w.push(WeakDriveWarning::StrongDrive { eta: p.eta });
    }
    if p.net_drive().abs() > limits.net_drive {
        w.push(WeakDriveWarning::UncompensatedGravity {
            net_drive: p.net_drive(),
        });
    }
    w
}

/// Non-Hermitian Hamiltonian on the two-level truncation, basis order
/// `|00>, |01>, |10>, |11>` with the cavity index first.
pub fn effective_hamiltonian(p: &SystemParams) -> Result<CMat> {
    let drives = Drives {
        single_photon: true,
        two_photon: false,
        mechanical_parametric: false,
        external_force: true,
    };
    let ops = model::build_hamiltonian(p, Dims::two_mode(2, 2), drives, &BuildOptions::default())?;
    let mut h = ops.hamiltonian.to_dense();
    for ch in &ops.channels {
        let cdc = ch.op.adjoint().matmul(&ch.op).to_dense();
        h = h.sub(&cdc.scale(I * (0.5 * ch.rate)));
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AmplitudeMethod {
    /// Exact solution of the truncated stationarity conditions.
    LinearSolve,
    /// Leading-order expressions in `eta` and `G'`.
    ClosedForm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeState {
    /// `[p00, p01, p10, p11]`, unnormalised with `p00 = 1`.
    pub amplitudes: [C64; 4],
    pub method: AmplitudeMethod,
    /// Largest stationarity residual over `|01>, |10>, |11>`.
    pub residual: f64,
    pub warnings: Vec<WeakDriveWarning>,
}

impl AmplitudeState {
    /// Normalised cavity state `p00 |0> + p10 |1>`.
    pub fn cavity_state(&self) -> [C64; 2] {
        let [p00, _, p10, _] = self.amplitudes;
        let n = (p00.norm_sqr() + p10.norm_sqr()).sqrt();
        [p00 / n, p10 / n]
    }
}

pub fn steady_amplitudes(
    p: &SystemParams,
    method: AmplitudeMethod,
    limits: &WeakDriveLimits,
) -> Result<AmplitudeState> {
    p.validate()?;
    let h = effective_hamiltonian(p)?;
    let amplitudes = match method {
        AmplitudeMethod::LinearSolve => {
            let a = CMat::from_fn(3, 3, |i, j| h[(i + 1, j + 1)]);
            let rhs: Vec<C64> = (1..4).map(|i| -h[(i, 0)]).collect();
            let x = linalg::solve(&a, &rhs)?;
            [C64::new(1.0, 0.0), x[0], x[1], x[2]]
        }
        AmplitudeMethod::ClosedForm => closed_form_amplitudes(p)?,
    };
    let residual = (1..4)
        .map(|i| (0..4).map(|j| h[(i, j)] * amplitudes[j]).sum::<C64>().norm())
        .fold(0.0, f64::max);
    Ok(AmplitudeState {
        amplitudes,
        method,
        residual,
        warnings: check_limits(p, limits),
    })
}

fn closed_form_amplitudes(p: &SystemParams) -> Result<[C64; 4]> {
    let (k, ga, gb, wb, eta) = (p.kappa, p.gamma_a, p.gamma_b, p.omega_b, p.eta);
    let gp = p.net_drive();
    let one = C64::new(1.0, 0.0);
    match p.coupling() {
        Coupling::Nonreciprocal => {
            let s = C64::new(2.0 * k + ga + gb, wb);
            let num = eta * C64::new(wb, -gb) * s;
            let den = C64::new(gb, wb) * (s * (k + ga) - 2.0 * gp * k);
            Ok([one, C64::new(0.0, 0.0), num / den, C64::new(0.0, 0.0)])
        }
        Coupling::Reciprocal => {
            let wgb = C64::new(wb, -gb);
            let p01 = -gp / wgb;
            let q = C64::new(k * k + ga * (ga + gb), ga * wb);
            let p10 = eta * (gp * k - wgb * C64::new(wb, -(ga + gb))) / (wgb * q);
            let p11 = k * eta / q;
            Ok([one, p01, p10, p11])
        }
        Coupling::Intermediate => Err(Error::RegimeMismatch(
            "closed-form amplitudes need lambda = 0 or lambda = kappa",
        )),
    }
}

/// Fisher information of a normalised pure state family from its
/// derivative: `4 (<dψ|dψ> - |<ψ|dψ>|²)`.
pub fn pure_state_qfi(psi: &[C64], dpsi: &[C64]) -> f64 {
    let dd: f64 = dpsi.iter().map(|z| z.norm_sqr()).sum();
    let overlap: C64 = psi.iter().zip(dpsi).map(|(a, b)| a.conj() * b).sum();
    4.0 * (dd - overlap.norm_sqr())
}

/// Leading-order QFI with respect to `g`: the nonreciprocal or reciprocal
/// closed form depending on the coupling.
pub fn closed_form_qfi(p: &SystemParams) -> Option<f64> {
    let (k, ga, gb, wb, eta, m) = (p.kappa, p.gamma_a, p.gamma_b, p.omega_b, p.eta, p.mass);
    let tilt = p.theta_tilt.cos().powi(2);
    match p.coupling() {
        Coupling::Nonreciprocal => {
            let s = 2.0 * k + ga + gb;
            Some(
                tilt * 8.0 * k * k * eta * eta * m
                    / (wb * (k + ga).powi(4) * (s * s + wb * wb)),
            )
        }
        Coupling::Reciprocal => {
            let q = k * k + ga * ga + ga * gb;
            Some(
                tilt * 2.0 * k * k * eta * eta * m
                    / (wb * (wb * wb + gb * gb) * (q * q + ga * ga * wb * wb)),
            )
        }
        Coupling::Intermediate => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QfiReport {
    pub coupling: Coupling,
    pub closed_form: Option<f64>,
    /// From the exact truncated amplitudes by central differences in `g`.
    pub numeric: f64,
    /// Relative change of `numeric` when the step grows tenfold.
    pub step_sensitivity: f64,
    pub warnings: Vec<WeakDriveWarning>,
}

impl QfiReport {
    pub fn relative_difference(&self) -> Option<f64> {
        self.closed_form.map(|c| (self.numeric - c) / c)
    }

    /// Cramér-Rao bound `1 / sqrt(F)`.
    pub fn delta_g_bound(&self) -> f64 {
        1.0 / self.numeric.sqrt()
    }
}

pub const DEFAULT_QFI_STEP: f64 = 1e-5;

pub fn numeric_qfi(p: &SystemParams, rel_step: f64) -> Result<f64> {
    let h = rel_step * p.g.abs().max(1.0);
    let limits = WeakDriveLimits::default();
    let state = |g: f64| -> Result<[C64; 2]> {
        let q = SystemParams { g, ..*p };
        Ok(steady_amplitudes(&q, AmplitudeMethod::LinearSolve, &limits)?.cavity_state())
    };
    let psi = state(p.g)?;
    let plus = state(p.g + h)?;
    let minus = state(p.g - h)?;
    let dpsi: Vec<C64> = plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect();
    Ok(pure_state_qfi(&psi, &dpsi))
}

pub fn qfi(p: &SystemParams, limits: &WeakDriveLimits) -> Result<QfiReport> {
    p.validate()?;
    let numeric = numeric_qfi(p, DEFAULT_QFI_STEP)?;
    let coarse = numeric_qfi(p, 10.0 * DEFAULT_QFI_STEP)?;
    Ok(QfiReport {
        coupling: p.coupling(),
        closed_form: closed_form_qfi(p),
        numeric,
        step_sensitivity: ((coarse - numeric) / numeric).abs(),
        warnings: check_limits(p, limits),
    })
}

/// Closed-form precision advantage `sqrt(F_nr / F_r)`.
pub fn precision_ratio(p: &SystemParams) -> f64 {
    let nr = closed_form_qfi(&p.nonreciprocal()).expect("nonreciprocal closed form");
    let r = closed_form_qfi(&p.reciprocal()).expect("reciprocal closed form");
    (nr / r).sqrt()
}

/// Small-`kappa` limit of [`precision_ratio`], `2 sqrt(ω_b² + γ_b²) / γ_a`.
pub fn precision_ratio_limit(p: &SystemParams) -> f64 {
    2.0 * p.omega_b.hypot(p.gamma_b) / p.gamma_a
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioPoint {
    pub kappa: f64,
    pub gamma_a: f64,
    pub ratio: f64,
}

/// [`precision_ratio`] over a `kappa` × `gamma_a` grid, `kappa` varying
/// fastest.
pub fn ratio_sweep(p: &SystemParams, kappas: &[f64], gammas: &[f64]) -> Vec<RatioPoint> {
    let mut out = Vec::with_capacity(kappas.len() * gammas.len());
    for &gamma_a in gammas {
        for &kappa in kappas {
            let q = SystemParams {
                kappa,
                gamma_a,
                ..*p
            };
            out.push(RatioPoint {
                kappa,
                gamma_a,
                ratio: precision_ratio(&q),
            });
        }
    }
    out
}

/// `gamma_a` in `[lo, hi]` at which the precision ratio crosses 1.
pub fn ratio_boundary(p: &SystemParams, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
    let f = |ga: f64| precision_ratio(&SystemParams { gamma_a: ga, ..*p }) - 1.0;
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    if fa.signum() == f(b).signum() {
        return Err(Error::InvalidParameter {
            name: "bracket",
            reason: "ratio does not cross 1 inside the bracket",
        });
    }
    while (b - a) > rel_tol * b.abs() {
        let m = 0.5 * (a + b);
        if f(m).signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Log-spaced grid including both ends.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}
