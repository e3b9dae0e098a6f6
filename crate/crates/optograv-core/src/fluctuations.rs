//! Linearized quantum fluctuations about a mean-field steady state.
//!
//! The fluctuation vector is `(δa, δa†, δb, δb†)`. Its drift matrix `M` and
//! the input-noise correlations `D` give the steady second moments
//! `C_ij = <A_i A_j†>` through `M C + C M† + D = 0`.

use alloc::vec::Vec;

#[allow(unused_imports)] // float math without std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, Lu, C64, I};
use crate::mean_field::{self, MeanFieldState};
use crate::params::{Coupling, SystemParams};

/// Index map sending each fluctuation to its adjoint.
pub const ADJOINT_SWAP: [usize; 4] = [1, 0, 3, 2];

#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    pub drift: CMat,
    pub noise: CMat,
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn build_drift(p: &SystemParams, s: &MeanFieldState) -> CMat {
    let (k, l) = (p.kappa, p.lambda);
    let x = p.cavity_decay();
    let gb = p.mechanical_decay();
    let alpha = s.alpha;
    let shift = 2.0 * (k + l) * s.beta.re;
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = C64::new(-x, shift);
    m[(0, 1)] = -I * p.chi;
    m[(0, 2)] = I * (k + l) * alpha;
    m[(0, 3)] = m[(0, 2)];
    m[(2, 2)] = C64::new(-gb, -p.omega_b);
    m[(2, 3)] = -I * p.upsilon;
    m[(2, 0)] = I * (k - l) * alpha.conj();
    m[(2, 1)] = I * (k - l) * alpha;
    for i in [0, 2] {
        for j in 0..4 {
            let v = m[(i, j)].conj();
            m[(ADJOINT_SWAP[i], ADJOINT_SWAP[j])] = v;
        }
    }
    m
}

/// `<ξ_i ξ_j†>` for the vacuum inputs on the cavity, mechanics and the
/// dissipative channel.
pub fn build_noise(p: &SystemParams, s: &MeanFieldState) -> CMat {
    let ra = (2.0 * p.gamma_a).sqrt();
    let rb = (2.0 * p.gamma_b).sqrt();
    let rl = (2.0 * p.lambda).sqrt();
    let alpha = s.alpha;
    // Columns: a_in, a_in†, b_in, b_in†, z_in, z_in†.
    let mut k = CMat::zeros(4, 6);
    k[(0, 0)] = re(ra);
    k[(0, 4)] = -I * rl * alpha;
    k[(0, 5)] = -I * rl * alpha;
    k[(1, 1)] = re(ra);
    k[(1, 4)] = I * rl * alpha.conj();
    k[(1, 5)] = I * rl * alpha.conj();
    k[(2, 2)] = re(rb);
    k[(2, 4)] = re(rl);
    k[(3, 3)] = re(rb);
    k[(3, 5)] = re(rl);
    let mut vacuum = CMat::zeros(6, 6);
    for i in [0, 2, 4] {
        vacuum[(i, i)] = re(1.0);
    }
    k.matmul(&vacuum).matmul(&k.adjoint())
}

pub fn linearize(p: &SystemParams, s: &MeanFieldState) -> LinearSystem {
    LinearSystem {
        drift: build_drift(p, s),
        noise: build_noise(p, s),
    }
}

pub fn eigenvalues(p: &SystemParams, s: &MeanFieldState) -> Result<Vec<C64>> {
    linalg::eigenvalues(&build_drift(p, s))
}

/// Largest real part of the drift spectrum; negative means stable.
pub fn max_growth_rate(p: &SystemParams, s: &MeanFieldState) -> Result<f64> {
    Ok(eigenvalues(p, s)?
        .iter()
        .fold(f64::NEG_INFINITY, |m, z| m.max(z.re)))
}

/// Drift spectrum of the nonreciprocal regimes, where the mechanics does
/// not feel the cavity and the spectrum splits into two blocks.
pub fn nonreciprocal_eigenvalues(p: &SystemParams, s: &MeanFieldState) -> Result<[C64; 4]> {
    if p.coupling() != Coupling::Nonreciprocal {
        return Err(Error::RegimeMismatch("closed-form spectrum needs lambda = kappa"));
    }
    let x = p.cavity_decay();
    let gb = p.mechanical_decay();
    let ra = re(p.chi * p.chi - s.phase * s.phase).sqrt();
    let rb = re(p.upsilon * p.upsilon - p.omega_b * p.omega_b).sqrt();
    Ok([re(-x) + ra, re(-x) - ra, re(-gb) + rb, re(-gb) - rb])
}

/// Solves `M C + C M† + D = 0` through its Kronecker form.
pub fn solve_lyapunov(m: &CMat, d: &CMat) -> Result<CMat> {
    let n = m.rows();
    let id = CMat::identity(n);
    let op = id.kron(m).add(&m.conj().kron(&id));
    let rhs: Vec<C64> = d.vec_cols().iter().map(|z| -z).collect();
    let x = Lu::new(&op)?.solve(&rhs);
    Ok(CMat::unvec_cols(&x, n, n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Covariance {
    /// `C_ij = <A_i A_j†>` over `(δa, δa†, δb, δb†)`.
    pub matrix: CMat,
}

impl Covariance {
    /// `<δa† δa>`.
    pub fn photon_fluctuation(&self) -> f64 {
        self.matrix[(1, 1)].re
    }

    /// `<δa δa>`.
    pub fn anomalous(&self) -> C64 {
        self.matrix[(0, 1)]
    }

    /// `<δb† δb>`.
    pub fn phonon_fluctuation(&self) -> f64 {
        self.matrix[(3, 3)].re
    }

    /// Variance of `a + a†` including the anomalous moment.
    pub fn quadrature_variance(&self) -> f64 {
        1.0 + 2.0 * self.photon_fluctuation() + 2.0 * self.anomalous().re
    }
}

pub fn steady_covariance(p: &SystemParams, s: &MeanFieldState) -> Result<Covariance> {
    let sys = linearize(p, s);
    let growth = linalg::eigenvalues(&sys.drift)?
        .iter()
        .fold(f64::NEG_INFINITY, |m, z| m.max(z.re));
    if growth >= 0.0 {
        return Err(Error::Critical { ratio: f64::INFINITY });
    }
    Ok(Covariance {
        matrix: solve_lyapunov(&sys.drift, &sys.noise)?,
    })
}

/// `y = prefactor * x^exponent`, fitted by least squares in log-log space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLaw {
    pub exponent: f64,
    pub prefactor: f64,
}

pub fn power_law_fit(points: &[(f64, f64)]) -> Result<PowerLaw> {
    if points.len() < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            got: points.len(),
        });
    }
    if points.iter().any(|&(x, y)| !(x > 0.0) || !(y > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: "power-law fit needs positive data",
        });
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: "abscissae must differ",
        });
    }
    let exponent = sxy / sxx;
    Ok(PowerLaw {
        exponent,
        prefactor: (my - exponent * mx).exp(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseScaling {
    /// Fit of `<δa†δa>` against `chi_c² - chi²`.
    pub fit: PowerLaw,
    /// `(chi_c² - chi², <δa†δa>)` per sample.
    pub samples: Vec<(f64, f64)>,
}

/// Photon-fluctuation growth as the two-photon drive approaches threshold,
/// nonreciprocal coupling only.
pub fn critical_noise_scaling(p: &SystemParams, chis: &[f64]) -> Result<NoiseScaling> {
    if chis.len() < 4 {
        return Err(Error::InsufficientPoints {
            needed: 4,
            got: chis.len(),
        });
    }
    if p.coupling() != Coupling::Nonreciprocal {
        return Err(Error::RegimeMismatch("noise scaling needs lambda = kappa"));
    }
    let mut samples = Vec::with_capacity(chis.len());
    for &chi in chis {
        let q = SystemParams { chi, ..*p };
        let s = mean_field::steady_two_photon(&q)?;
        let chi_c = mean_field::two_photon_threshold(&q, s.phase);
        let cov = steady_covariance(&q, &s)?;
        samples.push((chi_c * chi_c - chi * chi, cov.photon_fluctuation()));
    }
    Ok(NoiseScaling {
        fit: power_law_fit(&samples)?,
        samples,
    })
}

/// Two-photon drive at which the linearized dynamics turns unstable,
/// bracketed in `[lo, hi]` and located by bisection.
pub fn stability_frontier(p: &SystemParams, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
    let growth = |chi: f64| -> Result<f64> {
        let q = SystemParams { chi, ..*p };
        let s = mean_field::formal_state(&q)?;
        max_growth_rate(&q, &s)
    };
    let (mut a, mut b) = (lo, hi);
    let ga = growth(a)?;
    let gb = growth(b)?;
    if !(ga < 0.0 && gb >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "bracket",
            reason: "needs a stable lower end and an unstable upper end",
        });
    }
    for _ in 0..200 {
        if (b - a) <= rel_tol * b.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let mid = 0.5 * (a + b);
        if growth(mid)? < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Departure of `<δa δa†> - <δa† δa>` from 1.
pub fn commutator_defect(c: &Covariance) -> f64 {
    (c.matrix[(0, 0)].re - c.matrix[(1, 1)].re - 1.0).abs()
}

pub fn drift_residual(m: &CMat, c: &CMat, d: &CMat) -> f64 {
    m.matmul(c).add(&c.matmul(&m.adjoint())).add(d).max_abs()
}
