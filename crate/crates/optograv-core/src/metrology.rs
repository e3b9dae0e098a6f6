//! Homodyne error budget for the gravity estimate.
//!
//! The estimator reads `M = a + a†`. Its sensitivity is
//! `δg = sqrt(1 + 2 <δa†δa>) / |∂<M>/∂g|`, with the signal obtained by
//! differentiating `<M> = 2 Re alpha` directly.

use alloc::vec::Vec;
#[allow(unused_imports)] // float math without std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fluctuations::{self, power_law_fit, Covariance, PowerLaw};
use crate::mean_field::{self, MeanFieldState, Regime};
use crate::params::SystemParams;

/// Closed forms that assume `kappa |alpha|² << G'` are reported only while
/// that ratio stays below this value.
pub const VALIDITY_LIMIT: f64 = 0.1;

/// Default relative step for finite-difference susceptibilities.
pub const DEFAULT_REL_STEP: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Closed-form susceptibility, Lyapunov noise.
    Analytic,
    /// Finite-difference susceptibility through the mean-field solver,
    /// Lyapunov noise.
    LinearizedNumeric,
    /// Moments of the full master-equation steady state.
    OracleNumeric,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Analytic => "analytic",
            Provenance::LinearizedNumeric => "linearized-numeric",
            Provenance::OracleNumeric => "oracle-numeric",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetrologyReport {
    pub regime: Regime,
    pub provenance: Provenance,
    /// `|∂<M>/∂g|`.
    pub signal: f64,
    /// `1 + 2 <δa†δa>`.
    pub noise_var: f64,
    /// Full variance of `a + a†`, including `2 Re <δa δa>`.
    pub quadrature_variance: f64,
    pub delta_g: f64,
    /// `kappa |alpha|² / |G'|`.
    pub validity_ratio: f64,
    /// Weak-coupling closed form, withheld when `validity_ratio` exceeds
    /// [`VALIDITY_LIMIT`] or the regime has none.
    pub closed_form_delta_g: Option<f64>,
}

impl MetrologyReport {
    /// Uncertainty of the gravity coupling `G`; independent of how `g` and
    /// the mass combine into it.
    pub fn delta_coupling(&self, p: &SystemParams) -> f64 {
        self.delta_g * p.coupling_per_g()
    }
}

/// Signed `∂<M>/∂g` by implicit differentiation of the mean-field solution.
pub fn susceptibility(p: &SystemParams, s: &MeanFieldState) -> Result<f64> {
    let x = p.cavity_decay();
    let chi = p.chi;
    let eta = p.eta;
    let ph = s.phase;
    let q = ph - chi;
    let det = x * x + ph * ph - chi * chi;
    let dm_dphase = -2.0 * eta * (x * x - q * q) / (det * det);
    let slope = mean_field::phase_slope(p)?;
    // d|alpha|²/dP along the cavity solution.
    let dn_dphase = 2.0 * eta * eta * (q * det - 2.0 * ph * (x * x + q * q)) / (det * det * det);
    let feedback = 1.0 + slope * (p.kappa - p.lambda) * dn_dphase;
    Ok(dm_dphase * slope * p.net_drive_per_g() / feedback)
}

/// Signed `∂<M>/∂g` by central differences through the mean-field solver.
pub fn susceptibility_numeric(p: &SystemParams, rel_step: f64) -> Result<f64> {
    let h = rel_step * p.g.abs().max(f64::MIN_POSITIVE);
    let at = |g: f64| -> Result<f64> {
        let q = SystemParams { g, ..*p };
        Ok(mean_field::steady_state(&q)?.homodyne_mean())
    };
    Ok((at(p.g + h)? - at(p.g - h)?) / (2.0 * h))
}

pub fn validity_ratio(p: &SystemParams, s: &MeanFieldState) -> f64 {
    let d = p.net_drive().abs();
    if d == 0.0 {
        f64::INFINITY
    } else {
        p.kappa * s.photon_number() / d
    }
}

pub fn uncertainty(p: &SystemParams, provenance: Provenance) -> Result<MetrologyReport> {
    if p.g == 0.0 {
        return Err(Error::DegenerateEstimand);
    }
    let s = mean_field::steady_state(p)?;
    let cov = fluctuations::steady_covariance(p, &s)?;
    let signal = match provenance {
        Provenance::Analytic => susceptibility(p, &s)?,
        Provenance::LinearizedNumeric => susceptibility_numeric(p, DEFAULT_REL_STEP)?,
        Provenance::OracleNumeric => {
            return Err(Error::RegimeMismatch(
                "oracle estimates come from the master-equation solver",
            ))
        }
    }
    .abs();
    Ok(report_from(p, &s, &cov, provenance, signal))
}

fn report_from(
    p: &SystemParams,
    s: &MeanFieldState,
    cov: &Covariance,
    provenance: Provenance,
    signal: f64,
) -> MetrologyReport {
    let noise_var = 1.0 + 2.0 * cov.photon_fluctuation();
    let validity = validity_ratio(p, s);
    let closed = if validity <= VALIDITY_LIMIT {
        match s.regime {
            Regime::NonreciprocalSingle => Some(closed_form::weak_coupling_nonreciprocal(p)),
            Regime::ReciprocalSingle => Some(closed_form::weak_coupling_reciprocal(p)),
            _ => None,
        }
    } else {
        None
    };
    MetrologyReport {
        regime: s.regime,
        provenance,
        signal,
        noise_var,
        quadrature_variance: cov.quadrature_variance(),
        delta_g: if signal == 0.0 {
            f64::INFINITY
        } else {
            noise_var.sqrt() / signal
        },
        validity_ratio: validity,
        closed_form_delta_g: closed,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub nonreciprocal: MetrologyReport,
    pub reciprocal: MetrologyReport,
    /// `δg_nr / δg_r`.
    pub ratio: f64,
    pub closed_form_ratio: Option<f64>,
}

/// Compares the two couplings at otherwise identical parameters.
pub fn regime_ratio(p: &SystemParams, provenance: Provenance) -> Result<RatioReport> {
    let nonreciprocal = uncertainty(&p.nonreciprocal(), provenance)?;
    let reciprocal = uncertainty(&p.reciprocal(), provenance)?;
    let closed_form_ratio = match (nonreciprocal.closed_form_delta_g, reciprocal.closed_form_delta_g) {
        (Some(a), Some(b)) => Some(a / b),
        _ => None,
    };
    Ok(RatioReport {
        ratio: nonreciprocal.delta_g / reciprocal.delta_g,
        nonreciprocal,
        reciprocal,
        closed_form_ratio,
    })
}

/// Power laws of the two-photon regime against `chi_c² - chi²`.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalScaling {
    pub signal: PowerLaw,
    /// `<δa†δa>`.
    pub noise: PowerLaw,
    pub delta_g: PowerLaw,
    /// `(chi_c² - chi², signal, <δa†δa>, delta_g)` per sample.
    pub samples: Vec<[f64; 4]>,
}

/// Scans the two-photon drive at the given fractions of its nonreciprocal
/// threshold `sqrt((γ_a + κ)² + G1²)` and fits each quantity.
pub fn critical_scaling(p: &SystemParams, fractions: &[f64]) -> Result<CriticalScaling> {
    if fractions.len() < 4 {
        return Err(Error::InsufficientPoints {
            needed: 4,
            got: fractions.len(),
        });
    }
    let base = SystemParams { chi: 0.0, ..p.nonreciprocal() };
    let (phase, _) = mean_field::phase_line(&base)?;
    let chi_c = mean_field::two_photon_threshold(&base, phase);
    let mut samples = Vec::with_capacity(fractions.len());
    for &f in fractions {
        let q = SystemParams { chi: f * chi_c, ..base };
        let r = uncertainty(&q, Provenance::Analytic)?;
        let s = mean_field::steady_two_photon(&q)?;
        let n = fluctuations::steady_covariance(&q, &s)?.photon_fluctuation();
        samples.push([chi_c * chi_c - q.chi * q.chi, r.signal, n, r.delta_g]);
    }
    let fit = |k: usize| {
        let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s[0], s[k])).collect();
        power_law_fit(&pts)
    };
    Ok(CriticalScaling {
        signal: fit(1)?,
        noise: fit(2)?,
        delta_g: fit(3)?,
        samples,
    })
}

/// Reference expressions for limiting regimes.
pub mod closed_form {
    #[allow(unused_imports)]
    use num_traits::Float;
    use crate::params::SystemParams;

    /// Reciprocal weak-coupling uncertainty `2 g (γ_a² + G1²) / (η G1)`.
    pub fn weak_coupling_reciprocal(p: &SystemParams) -> f64 {
        2.0 * weak_coupling_nonreciprocal(p)
    }

    /// Nonreciprocal weak-coupling uncertainty `g (γ_a² + G1²) / (η G1)`.
    pub fn weak_coupling_nonreciprocal(p: &SystemParams) -> f64 {
        let g1 = p.nonreciprocal_phase();
        p.g * (p.gamma_a * p.gamma_a + g1 * g1) / (p.eta * g1)
    }

    /// Linearized nonreciprocal photon fluctuation, `kappa n / (kappa + γ_a)`.
    pub fn nonreciprocal_photon_fluctuation(p: &SystemParams, photon_number: f64) -> f64 {
        p.kappa * photon_number / (p.kappa + p.gamma_a)
    }

    /// Large-drive noise coefficient in its grouped rational form.
    pub fn saturation_noise_coefficient(p: &SystemParams) -> f64 {
        let (k, ga, gb) = (p.kappa, p.gamma_a, p.gamma_b);
        let s = 2.0 * k + ga + gb;
        let w = p.omega_b + p.theta_tilt;
        let base = (k + gb) * (s * s + w * w);
        k * (base + 4.0 * k * (k + gb) * s + 8.0 * k * k * s) / ((k + ga) * base)
    }

    /// Nonreciprocal uncertainty as `eta -> ∞` for a noise coefficient
    /// `zeta = <δa†δa> / |alpha|²`.
    pub fn nonreciprocal_saturation(p: &SystemParams, zeta: f64) -> f64 {
        let x = p.gamma_a + p.kappa;
        let g1 = p.nonreciprocal_phase();
        let gb = p.gamma_b + p.kappa;
        let dg1 = 4.0 * p.kappa * p.omega_b * p.net_drive_per_g() / (gb * gb + p.omega_b * p.omega_b);
        let a = x * x + g1 * g1;
        (2.0 * zeta).sqrt() * a.powf(1.5) / (2.0 * dg1.abs() * (x * x - g1 * g1).abs())
    }

    /// Mechanical parametric phase factor `4 kappa G' (υ - ω_b) / ((γ_b+κ)² + ω_b² - υ²)`.
    pub fn parametric_phase(p: &SystemParams) -> f64 {
        let gb = p.gamma_b + p.kappa;
        4.0 * p.kappa * p.net_drive() * (p.upsilon - p.omega_b)
            / (gb * gb + p.omega_b * p.omega_b - p.upsilon * p.upsilon)
    }

    /// `|∂<M>/∂g|` of the nonreciprocal parametric regime with the gravity
    /// drive fully compensated, `2 η |∂_g G2| / (γ_a + κ)²`.
    pub fn compensated_parametric_susceptibility(p: &SystemParams) -> f64 {
        let gb = p.gamma_b + p.kappa;
        let x = p.gamma_a + p.kappa;
        let dg2 = 4.0 * p.kappa * p.net_drive_per_g() * (p.upsilon - p.omega_b)
            / (gb * gb + p.omega_b * p.omega_b - p.upsilon * p.upsilon);
        2.0 * p.eta * dg2.abs() / (x * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_scaling_exponents() {
        let p = SystemParams {
            g: 30.0,
            eta: 10.0,
            ..SystemParams::default()
        };
        let c = critical_scaling(&p, &[0.9, 0.99, 0.999, 0.9999]).unwrap();
        assert!((c.signal.exponent + 2.0).abs() < 0.05, "{:?}", c.signal);
        assert!((c.noise.exponent + 3.0).abs() < 0.1, "{:?}", c.noise);
        assert!((c.delta_g.exponent - 0.5).abs() < 0.05, "{:?}", c.delta_g);
    }

    #[test]
    fn analytic_and_numeric_susceptibilities_agree() {
        let cases = [
            SystemParams::default(),
            SystemParams {
                eta: 40.0,
                ..SystemParams::default()
            }
            .reciprocal(),
            SystemParams {
                chi: 0.8,
                g: 5.0,
                ..SystemParams::default()
            },
            SystemParams {
                chi: 0.3,
                eta: 5.0,
                ..SystemParams::default()
            }
            .reciprocal(),
            SystemParams {
                upsilon: 15.0,
                force: 0.4,
                ..SystemParams::default()
            },
            SystemParams {
                upsilon: 10.0,
                eta: 3.0,
                ..SystemParams::default()
            }
            .reciprocal(),
        ];
        for p in cases {
            let s = mean_field::steady_state(&p).unwrap();
            let a = susceptibility(&p, &s).unwrap();
            let n = susceptibility_numeric(&p, DEFAULT_REL_STEP).unwrap();
            assert!(((a - n) / a).abs() < 1e-6, "{:?}: {a} vs {n}", s.regime);
        }
    }

    #[test]
    fn direct_differentiation_doubles_the_textbook_weak_drive_form() {
        let p = SystemParams::default();
        let s = mean_field::steady_state(&p).unwrap();
        let g1 = p.nonreciprocal_phase();
        let x = p.gamma_a + p.kappa;
        let textbook = p.eta * g1 * (x * x - g1 * g1) / (p.g * (x * x + g1 * g1).powi(2));
        let a = susceptibility(&p, &s).unwrap();
        assert!((a.abs() / textbook - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_gravity_is_degenerate() {
        let p = SystemParams {
            g: 0.0,
            ..SystemParams::default()
        };
        assert_eq!(
            uncertainty(&p, Provenance::Analytic),
            Err(Error::DegenerateEstimand)
        );
    }

    #[test]
    fn closed_forms_withheld_outside_validity() {
        let p = SystemParams {
            eta: 0.05,
            ..SystemParams::default()
        };
        let r = uncertainty(&p, Provenance::Analytic).unwrap();
        assert!(r.validity_ratio < VALIDITY_LIMIT);
        assert!(r.closed_form_delta_g.is_some());
        let q = SystemParams {
            eta: 20.0,
            ..SystemParams::default()
        };
        let r = uncertainty(&q, Provenance::Analytic).unwrap();
        assert!(r.validity_ratio > VALIDITY_LIMIT);
        assert!(r.closed_form_delta_g.is_none());
    }

    #[test]
    fn compensated_parametric_signal_matches_closed_form() {
        let mut p = SystemParams {
            upsilon: 18.0,
            ..SystemParams::default()
        };
        p.force = p.gravity_coupling();
        let s = mean_field::steady_state(&p).unwrap();
        let a = susceptibility(&p, &s).unwrap().abs();
        let c = closed_form::compensated_parametric_susceptibility(&p);
        assert!(((a - c) / c).abs() < 1e-12);
    }

    #[test]
    fn oracle_provenance_is_not_computed_here() {
        let p = SystemParams::default();
        assert!(uncertainty(&p, Provenance::OracleNumeric).is_err());
    }
}
