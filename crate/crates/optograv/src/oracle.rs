//! Full master-equation reference solutions on truncated Fock spaces.
//!
//! Nothing here linearizes: steady states come from the Liouvillian null
//! space (sparse LU with one row replaced by the trace constraint) or from
//! explicit time evolution, and every moment is a trace against the
//! resulting density matrix.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Side;
use log::debug;

use optograv_core::fluctuations;
use optograv_core::linalg::{CMat, C64};
use optograv_core::mean_field::{self, Regime};
use optograv_core::metrology::{MetrologyReport, Provenance};
use optograv_core::model::{
    self, AuxiliaryMode, BuildOptions, Dims, Drives, FockOperatorSet, Warning,
};
use optograv_core::sparse::CsrMat;
use optograv_core::SystemParams;

use crate::error::{OracleError, OracleResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SteadyMethod {
    #[default]
    NullSpace,
    TimeEvolution,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleOptions {
    pub method: SteadyMethod,
    /// Bound on `max |L rho| / max |L|` accepted from either method.
    pub residual_tolerance: f64,
    /// Largest population allowed in the top Fock level of any mode.
    pub truncation_tolerance: f64,
    pub max_time: f64,
    pub build: BuildOptions,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            method: SteadyMethod::NullSpace,
            residual_tolerance: 1e-9,
            truncation_tolerance: 1e-3,
            max_time: 1e4,
            build: BuildOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteadyDensity {
    pub dims: Dims,
    pub rho: CMat,
    pub method: SteadyMethod,
    /// `max |L rho| / max |L|`.
    pub residual: f64,
    /// Population of the highest Fock level of each mode.
    pub top_populations: Vec<f64>,
    pub truncation_ok: bool,
    pub warnings: Vec<Warning>,
}

impl SteadyDensity {
    pub fn expectation(&self, op: &CsrMat) -> C64 {
        op.trace_product(&self.rho)
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.rho.sub(&self.rho.adjoint()).max_abs()
    }

    pub fn min_eigenvalue(&self) -> OracleResult<f64> {
        Ok(hermitian_eigenvalues(&self.rho)?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }

    /// Reduced state of the listed modes (0 cavity, 1 mechanics, 2 auxiliary).
    pub fn reduced(&self, keep: &[usize]) -> CMat {
        partial_trace(&self.rho, &self.dims.modes(), keep)
    }

    /// Checks trace, hermiticity and positivity to `tol`.
    pub fn check_physical(&self, tol: f64) -> OracleResult<()> {
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(OracleError::Unphysical("trace differs from one"));
        }
        if self.hermiticity_defect() > tol {
            return Err(OracleError::Unphysical("density matrix is not Hermitian"));
        }
        if self.min_eigenvalue()? < -tol {
            return Err(OracleError::Unphysical("density matrix has a negative eigenvalue"));
        }
        Ok(())
    }
}

fn to_faer(m: &CMat) -> Mat<c64> {
    Mat::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub fn hermitian_eigenvalues(m: &CMat) -> OracleResult<Vec<f64>> {
    let h = to_faer(&hermitian_part(m));
    h.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| OracleError::Eigen(format!("{e:?}")))
}

/// Eigenvalues (ascending) and eigenvectors as columns.
pub fn hermitian_eigen(m: &CMat) -> OracleResult<(Vec<f64>, CMat)> {
    let h = to_faer(&hermitian_part(m));
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| OracleError::Eigen(format!("{e:?}")))?;
    let n = m.rows();
    let s = evd.S();
    let u = evd.U();
    let vals = (0..n).map(|i| s[i].re).collect();
    let vecs = CMat::from_fn(n, n, |i, j| u[(i, j)]);
    Ok((vals, vecs))
}

fn hermitian_part(m: &CMat) -> CMat {
    m.add(&m.adjoint()).scale(C64::new(0.5, 0.0))
}

/// Partial trace for tensor order mode 0 ⊗ mode 1 ⊗ ...
pub fn partial_trace(rho: &CMat, dims: &[usize], keep: &[usize]) -> CMat {
    let n: usize = dims.iter().product();
    assert_eq!(rho.rows(), n);
    let kept: usize = keep.iter().map(|&k| dims[k]).product();
    let digits = |mut idx: usize| -> Vec<usize> {
        let mut d = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            d[k] = idx % dims[k];
            idx /= dims[k];
        }
        d
    };
    let compose = |d: &[usize]| keep.iter().fold(0, |acc, &k| acc * dims[k] + d[k]);
    let mut out = CMat::zeros(kept, kept);
    for i in 0..n {
        let di = digits(i);
        for j in 0..n {
            let dj = digits(j);
            let traced_match = (0..dims.len())
                .filter(|k| !keep.contains(k))
                .all(|k| di[k] == dj[k]);
            if traced_match {
                out[(compose(&di), compose(&dj))] += rho[(i, j)];
            }
        }
    }
    out
}

pub fn trace_distance(a: &CMat, b: &CMat) -> OracleResult<f64> {
    Ok(0.5 * hermitian_eigenvalues(&a.sub(b))?.iter().map(|x| x.abs()).sum::<f64>())
}

pub fn steady_state(ops: &FockOperatorSet, opts: &OracleOptions) -> OracleResult<SteadyDensity> {
    let l = model::build_liouvillian(ops);
    let n = ops.hilbert_dim();
    debug!("liouvillian: dim {} nnz {}", n * n, l.nnz());
    let vec_rho = match opts.method {
        SteadyMethod::NullSpace => null_space(&l, n)?,
        SteadyMethod::TimeEvolution => {
            let t_min = 20.0 / slowest_rate(ops);
            evolve_to_steady(&l, n, t_min, opts)?
        }
    };
    let mut rho = CMat::unvec_cols(&vec_rho, n, n);
    let tr = rho.trace();
    rho = rho.scale(C64::new(1.0, 0.0) / tr);
    let residual = l
        .matvec(&rho.vec_cols())
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()))
        / l.max_abs();
    if residual > opts.residual_tolerance {
        return Err(OracleError::Residual(residual));
    }
    debug!("steady residual {residual:.2e}");
    let top_populations = top_level_populations(&rho, &ops.dims.modes());
    let truncation_ok = top_populations
        .iter()
        .all(|&p| p < opts.truncation_tolerance);
    Ok(SteadyDensity {
        dims: ops.dims,
        rho,
        method: opts.method,
        residual,
        top_populations,
        truncation_ok,
        warnings: ops.warnings.clone(),
    })
}

fn slowest_rate(ops: &FockOperatorSet) -> f64 {
    ops.channels
        .iter()
        .map(|c| c.rate)
        .filter(|&r| r > 0.0)
        .fold(f64::INFINITY, f64::min)
        .min(1e6)
}

fn top_level_populations(rho: &CMat, dims: &[usize]) -> Vec<f64> {
    (0..dims.len())
        .map(|k| {
            let r = partial_trace(rho, dims, &[k]);
            r[(dims[k] - 1, dims[k] - 1)].re
        })
        .collect()
}

fn null_space(l: &CsrMat, n: usize) -> OracleResult<Vec<C64>> {
    let n2 = n * n;
    let mut trips: Vec<Triplet<usize, usize, c64>> = l
        .iter()
        .filter(|&(i, _, _)| i != 0)
        .map(|(i, j, v)| Triplet::new(i, j, v))
        .collect();
    for k in 0..n {
        trips.push(Triplet::new(0, k + n * k, c64::new(1.0, 0.0)));
    }
    let mat = SparseColMat::<usize, c64>::try_new_from_triplets(n2, n2, &trips)
        .map_err(|e| OracleError::Factorization(format!("{e:?}")))?;
    let lu = mat
        .sp_lu()
        .map_err(|e| OracleError::Factorization(format!("{e:?}")))?;
    let rhs = Col::<c64>::from_fn(n2, |i| if i == 0 { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) });
    let x = lu.solve(&rhs);
    let out: Vec<C64> = (0..n2).map(|i| x[i]).collect();
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(OracleError::Factorization("non-finite solution".into()));
    }
    Ok(out)
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand-Prince integration of `d rho/dt = L rho` from the
/// vacuum, at least to `t_min` and then until the relative residual drops
/// below the tolerance.
fn evolve_to_steady(
    l: &CsrMat,
    n: usize,
    t_min: f64,
    opts: &OracleOptions,
) -> OracleResult<Vec<C64>> {
    let n2 = n * n;
    let mut y = vec![C64::new(0.0, 0.0); n2];
    y[0] = C64::new(1.0, 0.0);
    let (rtol, atol) = (1e-11, 1e-13);
    let scale = l.max_abs();
    let mut h = 1e-3 / scale.max(1.0);
    let mut t = 0.0;
    let mut k: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n2]; 7];
    let mut stage = vec![C64::new(0.0, 0.0); n2];
    let mut steps = 0usize;
    l.matvec_into(&y, &mut k[0]);
    while t < opts.max_time {
        for s in 1..7 {
            for i in 0..n2 {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += kj[i] * (h * A[s][j]);
                }
                stage[i] = acc;
            }
            l.matvec_into(&stage, &mut k[s]);
        }
        let mut err = 0.0f64;
        let mut y_new = vec![C64::new(0.0, 0.0); n2];
        for i in 0..n2 {
            let mut y5 = y[i];
            let mut e = C64::new(0.0, 0.0);
            for s in 0..7 {
                y5 += k[s][i] * (h * B5[s]);
                e += k[s][i] * (h * (B5[s] - B4[s]));
            }
            let tol = atol + rtol * y[i].norm().max(y5.norm());
            err = err.max(e.norm() / tol);
            y_new[i] = y5;
        }
        if err <= 1.0 {
            t += h;
            y = y_new;
            // First-same-as-last: the seventh stage is L y_new.
            k.swap(0, 6);
            steps += 1;
            let resid = k[0].iter().fold(0.0f64, |m, z| m.max(z.norm()));
            if t >= t_min && resid < 0.1 * opts.residual_tolerance * scale {
                debug!("time evolution converged at t = {t:.3} after {steps} steps");
                return Ok(y);
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Err(OracleError::NoConvergence("time evolution reached the time limit"))
}

pub fn steady_for_params(
    p: &SystemParams,
    dims: Dims,
    opts: &OracleOptions,
) -> OracleResult<(FockOperatorSet, SteadyDensity)> {
    let ops = model::build_hamiltonian(p, dims, Drives::from_params(p), &opts.build)?;
    let sd = steady_state(&ops, opts)?;
    Ok((ops, sd))
}

/// Mean and variance of the homodyne quadrature `a + a†`.
pub fn homodyne_moments(ops: &FockOperatorSet, sd: &SteadyDensity) -> (f64, f64) {
    let x = ops.quadrature();
    let x2 = x.matmul(&x);
    let mean = sd.expectation(&x).re;
    let second = sd.expectation(&x2).re;
    (mean, second - mean * mean)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison {
    pub oracle: f64,
    pub linearized: f64,
}

impl Comparison {
    pub fn relative_difference(&self) -> f64 {
        ((self.oracle - self.linearized) / self.oracle).abs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearizedCheck {
    /// `|<a> - alpha| / |alpha|`.
    pub amplitude_difference: f64,
    pub photon_number: Comparison,
    pub homodyne_mean: Comparison,
    pub quadrature_variance: Comparison,
    pub truncation_ok: bool,
}

/// Compares the master-equation moments with mean field plus linearized
/// fluctuations.
pub fn compare_with_linearized(
    p: &SystemParams,
    dims: Dims,
    opts: &OracleOptions,
) -> OracleResult<LinearizedCheck> {
    let s = mean_field::steady_state(p)?;
    let cov = fluctuations::steady_covariance(p, &s)?;
    let (ops, sd) = steady_for_params(p, dims, opts)?;
    let n = sd.expectation(&ops.photon_number()).re;
    let (mean, var) = homodyne_moments(&ops, &sd);
    let a = sd.expectation(&ops.a);
    Ok(LinearizedCheck {
        amplitude_difference: (a - s.alpha).norm() / s.alpha.norm(),
        photon_number: Comparison {
            oracle: n,
            linearized: s.photon_number() + cov.photon_fluctuation(),
        },
        homodyne_mean: Comparison {
            oracle: mean,
            linearized: s.homodyne_mean(),
        },
        quadrature_variance: Comparison {
            oracle: var,
            linearized: cov.quadrature_variance(),
        },
        truncation_ok: sd.truncation_ok,
    })
}

/// Homodyne uncertainty from master-equation moments, with the signal by
/// central differences in `g`.
pub fn oracle_uncertainty(
    p: &SystemParams,
    dims: Dims,
    rel_step: f64,
    opts: &OracleOptions,
) -> OracleResult<MetrologyReport> {
    if p.g == 0.0 {
        return Err(optograv_core::Error::DegenerateEstimand.into());
    }
    let regime = Regime::classify(p)?;
    let h = rel_step * p.g.abs();
    let mean_at = |g: f64| -> OracleResult<f64> {
        let q = SystemParams { g, ..*p };
        let (ops, sd) = steady_for_params(&q, dims, opts)?;
        Ok(homodyne_moments(&ops, &sd).0)
    };
    let signal = ((mean_at(p.g + h)? - mean_at(p.g - h)?) / (2.0 * h)).abs();
    let (ops, sd) = steady_for_params(p, dims, opts)?;
    let (_, var) = homodyne_moments(&ops, &sd);
    let n = sd.expectation(&ops.photon_number()).re;
    let drive = p.net_drive().abs();
    Ok(MetrologyReport {
        regime,
        provenance: Provenance::OracleNumeric,
        signal,
        noise_var: var,
        quadrature_variance: var,
        delta_g: var.sqrt() / signal,
        validity_ratio: if drive == 0.0 { f64::INFINITY } else { p.kappa * n / drive },
        closed_form_delta_g: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleQfi {
    /// Symmetric-logarithmic-derivative formula on the reduced cavity state.
    pub sld: f64,
    /// Second difference of the Uhlmann fidelity.
    pub fidelity: f64,
    /// Most negative eigenvalue clamped to zero before square roots.
    pub clamped: f64,
}

/// Quantum Fisher information of the reduced cavity steady state with
/// respect to `g`.
pub fn numeric_qfi(
    p: &SystemParams,
    dims: Dims,
    step: f64,
    opts: &OracleOptions,
) -> OracleResult<OracleQfi> {
    let cavity = |g: f64| -> OracleResult<CMat> {
        let q = SystemParams { g, ..*p };
        let (_, sd) = steady_for_params(&q, dims, opts)?;
        Ok(sd.reduced(&[0]))
    };
    let r0 = cavity(p.g)?;
    let rp = cavity(p.g + step)?;
    let rm = cavity(p.g - step)?;
    let drho = rp.sub(&rm).scale(C64::new(0.5 / step, 0.0));

    let (vals, vecs) = hermitian_eigen(&r0)?;
    let d = vecs.adjoint().matmul(&drho).matmul(&vecs);
    let floor = 1e-14;
    let mut sld = 0.0;
    for i in 0..vals.len() {
        for j in 0..vals.len() {
            let s = vals[i] + vals[j];
            if s > floor {
                sld += 2.0 * d[(i, j)].norm_sqr() / s;
            }
        }
    }

    let (f, clamp_a) = fidelity(&rm, &rp)?;
    let clamped = clamp_a.min(vals.iter().cloned().fold(0.0, f64::min));
    if clamped < 0.0 {
        debug!("qfi: clamped eigenvalue {clamped:e}");
    }
    let fisher_fid = 8.0 * (1.0 - f.sqrt()) / (2.0 * step).powi(2);
    Ok(OracleQfi {
        sld,
        fidelity: fisher_fid,
        clamped,
    })
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(a) b sqrt(a)))²` and the most negative
/// eigenvalue met on the way.
pub fn fidelity(a: &CMat, b: &CMat) -> OracleResult<(f64, f64)> {
    let (va, ua) = hermitian_eigen(a)?;
    let mut clamp = va.iter().cloned().fold(0.0, f64::min);
    let n = va.len();
    let sqrt_diag = CMat::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(va[i].max(0.0).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let sa = ua.matmul(&sqrt_diag).matmul(&ua.adjoint());
    let inner = sa.matmul(b).matmul(&sa);
    let vi = hermitian_eigenvalues(&inner)?;
    clamp = clamp.min(vi.iter().cloned().fold(0.0, f64::min));
    let tr: f64 = vi.iter().map(|x| x.max(0.0).sqrt()).sum();
    Ok((tr * tr, clamp))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EliminationReport {
    pub trace_distance: f64,
    pub effective_lambda: f64,
    pub warnings: Vec<Warning>,
}

/// Trace distance between the (cavity, mechanics) state of the three-mode
/// model and the two-mode model with the eliminated rate.
pub fn validate_adiabatic_elimination(
    p: &SystemParams,
    aux: &AuxiliaryMode,
    dims: Dims,
    opts: &OracleOptions,
) -> OracleResult<EliminationReport> {
    let drives = Drives::from_params(p);
    let three = model::build_three_mode_model(p, aux, dims, drives, &opts.build)?;
    let full = steady_state(&three, opts)?;
    let reduced = full.reduced(&[0, 1]);
    let lambda = aux.effective_lambda();
    let two_params = SystemParams { lambda, ..*p };
    let two = model::build_hamiltonian(
        &two_params,
        Dims::two_mode(dims.cavity, dims.mechanics),
        drives,
        &opts.build,
    )?;
    let reference = steady_state(&two, opts)?;
    Ok(EliminationReport {
        trace_distance: trace_distance(&reduced, &reference.rho)?,
        effective_lambda: lambda,
        warnings: three.warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakDriveProjection {
    /// Closed-form amplitudes against the no-jump conditional state.
    pub no_jump_distance: f64,
    /// Closed-form amplitudes against the steady density restricted to
    /// `|00>, |01>, |10>, |11>` and renormalised.
    pub projected_distance: f64,
    /// Weight of the steady density inside that subspace.
    pub subspace_weight: f64,
}

fn pure_projector(amps: &[C64; 4]) -> CMat {
    let n = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let v: Vec<C64> = amps.iter().map(|z| z / n).collect();
    CMat::from_fn(4, 4, |i, j| v[i] * v[j].conj())
}

/// Trace distances from the leading-order weak-drive amplitudes to the two
/// candidate exact states.
pub fn weak_drive_projection(
    p: &SystemParams,
    dims: Dims,
    opts: &OracleOptions,
) -> OracleResult<WeakDriveProjection> {
    use optograv_core::weak_drive::{self, AmplitudeMethod, WeakDriveLimits};
    let limits = WeakDriveLimits::default();
    let closed = weak_drive::steady_amplitudes(p, AmplitudeMethod::ClosedForm, &limits)?;
    let no_jump = weak_drive::steady_amplitudes(p, AmplitudeMethod::LinearSolve, &limits)?;
    let reference = pure_projector(&closed.amplitudes);

    let ops = model::build_hamiltonian(
        p,
        dims,
        Drives::from_params(p).with_external_force(),
        &opts.build,
    )?;
    let sd = steady_state(&ops, opts)?;
    let db = dims.mechanics;
    let idx = [0, 1, db, db + 1];
    let sub = CMat::from_fn(4, 4, |i, j| sd.rho[(idx[i], idx[j])]);
    let weight = sub.trace().re;
    let projected = sub.scale(C64::new(1.0 / weight, 0.0));
    Ok(WeakDriveProjection {
        no_jump_distance: trace_distance(&reference, &pure_projector(&no_jump.amplitudes))?,
        projected_distance: trace_distance(&reference, &projected)?,
        subspace_weight: weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SystemParams {
        SystemParams {
            eta: 0.3,
            g: 0.3,
            ..SystemParams::default()
        }
    }

    #[test]
    fn null_space_state_is_physical() {
        let (_, sd) = steady_for_params(&small(), Dims::two_mode(4, 4), &OracleOptions::default()).unwrap();
        sd.check_physical(1e-10).unwrap();
        assert!(sd.residual < 1e-10);
    }

    #[test]
    fn methods_agree() {
        let p = small();
        let dims = Dims::two_mode(3, 3);
        let (_, a) = steady_for_params(&p, dims, &OracleOptions::default()).unwrap();
        let opts = OracleOptions {
            method: SteadyMethod::TimeEvolution,
            ..OracleOptions::default()
        };
        let (_, b) = steady_for_params(&p, dims, &opts).unwrap();
        assert!(trace_distance(&a.rho, &b.rho).unwrap() < 1e-6);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let ra = CMat::from_fn(2, 2, |i, j| C64::new(if i == j { 0.5 + 0.2 * i as f64 } else { 0.1 }, 0.0));
        let rb = CMat::from_fn(3, 3, |i, j| C64::new(if i == j { [0.2, 0.3, 0.5][i] } else { 0.0 }, 0.0));
        let rho = ra.kron(&rb);
        let back = partial_trace(&rho, &[2, 3], &[0]);
        assert!(back.sub(&ra).max_abs() < 1e-15);
        let back_b = partial_trace(&rho, &[2, 3], &[1]);
        assert!(back_b.sub(&rb.scale(ra.trace())).max_abs() < 1e-15);
    }

    #[test]
    fn fidelity_of_identical_states_is_one() {
        let (_, sd) = steady_for_params(&small(), Dims::two_mode(3, 3), &OracleOptions::default()).unwrap();
        let r = sd.reduced(&[0]);
        let (f, _) = fidelity(&r, &r).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }
}
