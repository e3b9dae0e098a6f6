//! Classical steady states of the cavity and mechanical amplitudes.
//!
//! Every regime reduces to one structure. The mechanical amplitude follows
//! linearly from its source `S = G' - (kappa - lambda) |alpha|²`; its real
//! part shifts the cavity by the phase `P = k_P S`; the cavity amplitude is
//! then
//!
//! ```text
//! alpha = -i eta (x - i (P - chi)) / (x² + P² - chi²),   x = gamma_a + lambda.
//! ```
//!
//! In the nonreciprocal case `P` does not depend on `|alpha|²` and the
//! solution is closed form. Otherwise `|alpha|²` solves a cubic (`chi = 0`)
//! or quintic, and the root reached by continuation from `eta = 0` is kept.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)] // float math without std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fluctuations;
use crate::linalg::{C64, I};
use crate::params::{Coupling, SystemParams};
use crate::poly;

/// Drives closer than this fraction to their instability threshold are
/// refused.
pub const CRITICAL_MARGIN: f64 = 1e-6;

/// Normalised residual below which a steady state counts as converged.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    NonreciprocalSingle,
    ReciprocalSingle,
    NonreciprocalTwoPhoton,
    ReciprocalTwoPhoton,
    NonreciprocalParametric,
    ReciprocalParametric,
}

impl Regime {
    pub const ALL: [Regime; 6] = [
        Regime::NonreciprocalSingle,
        Regime::ReciprocalSingle,
        Regime::NonreciprocalTwoPhoton,
        Regime::ReciprocalTwoPhoton,
        Regime::NonreciprocalParametric,
        Regime::ReciprocalParametric,
    ];

    pub fn classify(p: &SystemParams) -> Result<Self> {
        let nonreciprocal = match p.coupling() {
            Coupling::Nonreciprocal => true,
            Coupling::Reciprocal => false,
            Coupling::Intermediate => {
                return Err(Error::RegimeMismatch(
                    "mean field is defined for lambda = 0 or lambda = kappa",
                ))
            }
        };
        let regime = match (p.chi != 0.0, p.upsilon != 0.0, nonreciprocal) {
            (true, true, _) => {
                return Err(Error::UnsupportedDrive(
                    "two-photon and mechanical parametric drives together",
                ))
            }
            (false, false, true) => Regime::NonreciprocalSingle,
            (false, false, false) => Regime::ReciprocalSingle,
            (true, false, true) => Regime::NonreciprocalTwoPhoton,
            (true, false, false) => Regime::ReciprocalTwoPhoton,
            (false, true, true) => Regime::NonreciprocalParametric,
            (false, true, false) => Regime::ReciprocalParametric,
        };
        Ok(regime)
    }

    pub fn coupling(self) -> Coupling {
        match self {
            Regime::NonreciprocalSingle
            | Regime::NonreciprocalTwoPhoton
            | Regime::NonreciprocalParametric => Coupling::Nonreciprocal,
            _ => Coupling::Reciprocal,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::NonreciprocalSingle => "nonreciprocal-single",
            Regime::ReciprocalSingle => "reciprocal-single",
            Regime::NonreciprocalTwoPhoton => "nonreciprocal-two-photon",
            Regime::ReciprocalTwoPhoton => "reciprocal-two-photon",
            Regime::NonreciprocalParametric => "nonreciprocal-parametric",
            Regime::ReciprocalParametric => "reciprocal-parametric",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or(Error::InvalidParameter {
                name: "regime",
                reason: "unknown regime name",
            })
    }
}

/// Candidate photon number with its linear stability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub photon_number: f64,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanFieldState {
    pub regime: Regime,
    pub alpha: C64,
    pub beta: C64,
    /// Cavity phase shift `P` imprinted by the mechanical displacement.
    pub phase: f64,
    /// Every admissible self-consistent photon number, ascending.
    pub roots: Vec<Root>,
    pub converged: bool,
    pub residual: f64,
}

impl MeanFieldState {
    pub fn photon_number(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// `<a + a†>`.
    pub fn homodyne_mean(&self) -> f64 {
        2.0 * self.alpha.re
    }

    pub fn is_bistable(&self) -> bool {
        self.roots.iter().filter(|r| r.stable).count() > 1
    }
}

/// `P = slope * (G' - (kappa - lambda) n)`; returns `slope`.
pub fn phase_slope(p: &SystemParams) -> Result<f64> {
    let gb = p.mechanical_decay();
    let denom = gb * gb + p.omega_b * p.omega_b - p.upsilon * p.upsilon;
    let threshold = p.mechanical_parametric_threshold();
    if p.upsilon.abs() >= threshold * (1.0 - CRITICAL_MARGIN) {
        return Err(Error::Critical {
            ratio: p.upsilon.abs() / threshold,
        });
    }
    Ok(2.0 * (p.kappa + p.lambda) * (p.omega_b - p.upsilon) / denom)
}

/// Phase as a function of the photon number, `P(n) = p0 + p1 n`.
pub fn phase_line(p: &SystemParams) -> Result<(f64, f64)> {
    let k = phase_slope(p)?;
    Ok((k * p.net_drive(), -k * (p.kappa - p.lambda)))
}

/// Amplitudes consistent with a given photon number.
pub fn amplitudes_at(p: &SystemParams, photon_number: f64) -> Result<(C64, C64, f64)> {
    let (p0, p1) = phase_line(p)?;
    let phase = p0 + p1 * photon_number;
    let x = p.cavity_decay();
    let alpha = cavity_amplitude(x, phase, p.chi, p.eta);
    let source = p.net_drive() - (p.kappa - p.lambda) * photon_number;
    let gb = p.mechanical_decay();
    let denom = gb * gb + p.omega_b * p.omega_b - p.upsilon * p.upsilon;
    let beta = C64::new(p.upsilon - p.omega_b, -gb) * (source / denom);
    Ok((alpha, beta, phase))
}

fn cavity_amplitude(x: f64, phase: f64, chi: f64, eta: f64) -> C64 {
    let det = x * x + phase * phase - chi * chi;
    -I * eta * C64::new(x, -(phase - chi)) / det
}

/// Residuals of both amplitude equations, normalised by the drive scale.
pub fn residual(p: &SystemParams, alpha: C64, beta: C64) -> f64 {
    let x = p.cavity_decay();
    let gb = p.mechanical_decay();
    let shift = 2.0 * (p.kappa + p.lambda) * beta.re;
    let ra = alpha * C64::new(-x, shift) - I * p.chi * alpha.conj() - I * p.eta;
    let rb = beta * C64::new(-gb, -p.omega_b) - I * p.upsilon * beta.conj() - I * p.net_drive()
        + I * (p.kappa - p.lambda) * alpha.norm_sqr();
    let scale = 1.0f64.max(p.eta.abs()).max(p.net_drive().abs());
    ra.norm().max(rb.norm()) / scale
}

/// Instability threshold of the two-photon drive at a given phase.
pub fn two_photon_threshold(p: &SystemParams, phase: f64) -> f64 {
    p.cavity_decay().hypot(phase)
}

/// Steady state for whatever regime the parameters describe.
pub fn steady_state(p: &SystemParams) -> Result<MeanFieldState> {
    solve(p, true)
}

/// Like [`steady_state`] but without the critical-margin refusal, for
/// locating thresholds and reporting unstable points. Only the closed-form
/// nonreciprocal case is meaningful past the threshold.
pub fn formal_state(p: &SystemParams) -> Result<MeanFieldState> {
    solve(p, false)
}

fn expect_regime(p: &SystemParams, allowed: &[Regime]) -> Result<()> {
    let r = Regime::classify(p)?;
    if allowed.contains(&r) {
        Ok(())
    } else {
        Err(Error::RegimeMismatch("parameters describe a different regime"))
    }
}

pub fn steady_nonreciprocal_single(p: &SystemParams) -> Result<MeanFieldState> {
    expect_regime(p, &[Regime::NonreciprocalSingle])?;
    steady_state(p)
}

pub fn steady_reciprocal_single(p: &SystemParams) -> Result<MeanFieldState> {
    expect_regime(p, &[Regime::ReciprocalSingle])?;
    steady_state(p)
}

pub fn steady_two_photon(p: &SystemParams) -> Result<MeanFieldState> {
    expect_regime(p, &[Regime::NonreciprocalTwoPhoton, Regime::ReciprocalTwoPhoton])?;
    steady_state(p)
}

pub fn steady_parametric(p: &SystemParams) -> Result<MeanFieldState> {
    expect_regime(p, &[Regime::NonreciprocalParametric, Regime::ReciprocalParametric])?;
    steady_state(p)
}

fn solve(p: &SystemParams, refuse_critical: bool) -> Result<MeanFieldState> {
    p.validate()?;
    let regime = Regime::classify(p)?;
    let (p0, p1) = phase_line(p)?;
    let x = p.cavity_decay();
    let chi = p.chi;

    let candidates: Vec<f64> = if p1 == 0.0 {
        let det = x * x + p0 * p0 - chi * chi;
        if refuse_critical && chi.abs() >= two_photon_threshold(p, p0) * (1.0 - CRITICAL_MARGIN) {
            return Err(Error::Critical {
                ratio: chi.abs() / two_photon_threshold(p, p0),
            });
        }
        if det == 0.0 {
            return Err(Error::Critical { ratio: 1.0 });
        }
        vec![cavity_amplitude(x, p0, chi, p.eta).norm_sqr()]
    } else {
        self_consistent_roots(x, p0, p1, chi, p.eta)
            .into_iter()
            .filter(|&n| {
                let ph = p0 + p1 * n;
                let ratio = chi.abs() / x.hypot(ph);
                !refuse_critical || ratio < 1.0 - CRITICAL_MARGIN
            })
            .collect()
    };
    if candidates.is_empty() {
        return Err(Error::NoPhysicalRoot);
    }

    let mut roots = Vec::with_capacity(candidates.len());
    for &n in &candidates {
        let (alpha, beta, phase) = amplitudes_at(p, n)?;
        let trial = MeanFieldState {
            regime,
            alpha,
            beta,
            phase,
            roots: Vec::new(),
            converged: true,
            residual: 0.0,
        };
        let stable = fluctuations::max_growth_rate(p, &trial)? < 0.0;
        roots.push(Root {
            photon_number: n,
            stable,
        });
    }
    let chosen = candidates[0];
    let (alpha, beta, phase) = amplitudes_at(p, chosen)?;
    let res = residual(p, alpha, beta);
    Ok(MeanFieldState {
        regime,
        alpha,
        beta,
        phase,
        roots,
        converged: res < RESIDUAL_TOLERANCE,
        residual: res,
    })
}

/// Non-negative photon numbers `n` with `n (x² + P² - chi²)² = eta² (x² + (P - chi)²)`
/// and `x² + P² > chi²`, where `P = p0 + p1 n`.
fn self_consistent_roots(x: f64, p0: f64, p1: f64, chi: f64, eta: f64) -> Vec<f64> {
    let det = [x * x + p0 * p0 - chi * chi, 2.0 * p0 * p1, p1 * p1];
    let q = p0 - chi;
    let num = [x * x + q * q, 2.0 * q * p1, p1 * p1];
    let eta2 = eta * eta;
    let coeffs = if chi == 0.0 {
        // det == num > 0, so it divides out.
        let mut c = shift(&det);
        c[0] -= eta2;
        c
    } else {
        let mut c = shift(&mul(&det, &det));
        for (k, v) in num.iter().enumerate() {
            c[k] -= eta2 * v;
        }
        c
    };
    let hi = poly::root_bound(&coeffs);
    poly::real_roots_in(&coeffs, 0.0, hi)
        .into_iter()
        .filter(|&n| poly::eval(&det, n) > 0.0)
        .collect()
}

fn shift(c: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0];
    out.extend_from_slice(c);
    out
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Large-drive photon number of the reciprocal single-photon cubic,
/// `2 G' / (3 kappa) + (eta / (k_P kappa))^(2/3)`.
pub fn reciprocal_large_drive_photon_number(p: &SystemParams) -> Result<f64> {
    let k = phase_slope(&p.reciprocal())?.abs();
    Ok(2.0 * p.net_drive() / (3.0 * p.kappa) + (p.eta / (k * p.kappa)).powf(2.0 / 3.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nr() -> SystemParams {
        SystemParams::default()
    }

    #[test]
    fn nonreciprocal_single_matches_closed_form() {
        let p = nr();
        let s = steady_nonreciprocal_single(&p).unwrap();
        let g1 = p.nonreciprocal_phase();
        let x = p.gamma_a + p.kappa;
        let want = -I * p.eta / C64::new(x, g1);
        assert!((s.alpha - want).norm() < 1e-14);
        let gb = p.gamma_b + p.kappa;
        let beta = -I * p.net_drive() / C64::new(gb, p.omega_b);
        assert!((s.beta - beta).norm() < 1e-14);
        assert!(s.converged && s.residual < 1e-14);
        assert_eq!(s.roots.len(), 1);
    }

    #[test]
    fn reciprocal_cubic_is_self_consistent() {
        let mut p = nr().reciprocal();
        p.eta = 50.0;
        let s = steady_reciprocal_single(&p).unwrap();
        assert!(s.converged, "residual {}", s.residual);
        let n = s.photon_number();
        let c1 = 2.0 * p.kappa * p.omega_b / (p.gamma_b.powi(2) + p.omega_b.powi(2));
        let phi = c1 * (p.net_drive() - p.kappa * n);
        assert!((n * (p.gamma_a.powi(2) + phi * phi) - p.eta.powi(2)).abs() < 1e-9 * p.eta.powi(2));
    }

    #[test]
    fn large_drive_asymptote() {
        let mut p = nr().reciprocal();
        p.eta = 1e6;
        let s = steady_reciprocal_single(&p).unwrap();
        let n = s.photon_number();
        let asym = reciprocal_large_drive_photon_number(&p).unwrap();
        assert!(((n - asym) / n).abs() < 1e-2, "{n} vs {asym}");
    }

    #[test]
    fn regime_mismatch_is_reported() {
        let p = nr();
        assert!(matches!(
            steady_reciprocal_single(&p),
            Err(Error::RegimeMismatch(_))
        ));
        let mut q = p;
        q.lambda = 0.1;
        assert!(matches!(steady_state(&q), Err(Error::RegimeMismatch(_))));
    }

    #[test]
    fn two_photon_at_threshold_is_refused() {
        let mut p = nr();
        let chi_c = two_photon_threshold(&p, p.nonreciprocal_phase());
        p.chi = chi_c;
        assert!(matches!(steady_two_photon(&p), Err(Error::Critical { .. })));
        p.chi = chi_c * (1.0 - 1e-3);
        assert!(steady_two_photon(&p).unwrap().converged);
        p.chi = chi_c * 1.01;
        assert!(formal_state(&p).is_ok());
    }

    #[test]
    fn parametric_threshold_uses_mechanical_decay() {
        let mut p = nr();
        p.upsilon = p.mechanical_parametric_threshold();
        assert!(matches!(steady_parametric(&p), Err(Error::Critical { .. })));
        p.upsilon *= 0.99;
        let s = steady_parametric(&p).unwrap();
        assert!(s.converged);
    }

    #[test]
    fn regime_names_round_trip() {
        for r in Regime::ALL {
            assert_eq!(r.name().parse::<Regime>().unwrap(), r);
        }
        assert!("bogus".parse::<Regime>().is_err());
    }

    #[test]
    fn zero_drive_gives_empty_cavity() {
        let mut p = nr().reciprocal();
        p.eta = 0.0;
        let s = steady_state(&p).unwrap();
        assert_eq!(s.photon_number(), 0.0);
    }
}
