//! Truncated Fock-space operators, Hamiltonians and Liouvillians.
//!
//! Mode order in tensor products is cavity ⊗ mechanics ⊗ auxiliary, so the
//! cavity index is the most significant. Liouvillians act on column-stacked
//! density matrices: `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // float math without std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{C64, I};
use crate::params::{Coupling, SystemParams};
use crate::sparse::CsrMat;

pub const DEFAULT_HILBERT_CAP: usize = 400;

/// Auxiliary damping must exceed the two-mode rates by this factor before
/// its elimination is trusted.
pub const AUXILIARY_SEPARATION: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dims {
    pub cavity: usize,
    pub mechanics: usize,
    pub auxiliary: Option<usize>,
}

impl Dims {
    pub fn two_mode(cavity: usize, mechanics: usize) -> Self {
        Self {
            cavity,
            mechanics,
            auxiliary: None,
        }
    }

    pub fn three_mode(cavity: usize, mechanics: usize, auxiliary: usize) -> Self {
        Self {
            cavity,
            mechanics,
            auxiliary: Some(auxiliary),
        }
    }

    pub fn modes(&self) -> Vec<usize> {
        let mut v = vec![self.cavity, self.mechanics];
        v.extend(self.auxiliary);
        v
    }

    pub fn total(&self) -> usize {
        self.modes().iter().product()
    }

    pub fn check(&self, cap: usize) -> Result<()> {
        if self.modes().iter().any(|&d| d < 2) {
            return Err(Error::InvalidParameter {
                name: "dims",
                reason: "every mode needs at least two levels",
            });
        }
        let n = self
            .modes()
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .unwrap_or(usize::MAX);
        if n > cap {
            return Err(Error::DimensionOverflow { requested: n, cap });
        }
        Ok(())
    }
}

/// Which coherent drives appear in the Hamiltonian. Gravity is always on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Drives {
    pub single_photon: bool,
    pub two_photon: bool,
    pub mechanical_parametric: bool,
    pub external_force: bool,
}

impl Drives {
    pub fn single_photon() -> Self {
        Self {
            single_photon: true,
            ..Self::default()
        }
    }

    pub fn with_two_photon(mut self) -> Self {
        self.two_photon = true;
        self
    }

    pub fn with_mechanical_parametric(mut self) -> Self {
        self.mechanical_parametric = true;
        self
    }

    pub fn with_external_force(mut self) -> Self {
        self.external_force = true;
        self
    }

    /// Switches on every drive whose amplitude is nonzero.
    pub fn from_params(p: &SystemParams) -> Self {
        Self {
            single_photon: p.eta != 0.0,
            two_photon: p.chi != 0.0,
            mechanical_parametric: p.upsilon != 0.0,
            external_force: p.force != 0.0,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.two_photon && self.mechanical_parametric {
            return Err(Error::UnsupportedDrive(
                "two-photon and mechanical parametric drives together",
            ));
        }
        Ok(())
    }
}

/// Normalisation of the Lindblad dissipators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DissipatorConvention {
    /// `2 γ D[c]`, matching amplitude decay `γ` in the Langevin equations.
    #[default]
    Langevin,
    /// `γ D[c]`.
    Literal,
}

impl DissipatorConvention {
    pub fn factor(self) -> f64 {
        match self {
            Self::Langevin => 2.0,
            Self::Literal => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuildOptions {
    pub convention: DissipatorConvention,
    pub hilbert_cap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            convention: DissipatorConvention::Langevin,
            hilbert_cap: DEFAULT_HILBERT_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Warning {
    /// `lambda` is neither 0 nor `kappa`.
    UnverifiedCoupling,
    /// Auxiliary damping is not well separated from the two-mode rates.
    SlowAuxiliary { ratio: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelKind {
    Cavity,
    Mechanics,
    Dissipative,
    Auxiliary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollapseChannel {
    pub kind: ChannelKind,
    /// Prefactor of `D[op]` in the master equation.
    pub rate: f64,
    pub op: CsrMat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockOperatorSet {
    pub dims: Dims,
    pub a: CsrMat,
    pub b: CsrMat,
    pub c: Option<CsrMat>,
    pub hamiltonian: CsrMat,
    pub channels: Vec<CollapseChannel>,
    pub warnings: Vec<Warning>,
}

impl FockOperatorSet {
    pub fn hilbert_dim(&self) -> usize {
        self.hamiltonian.rows()
    }

    pub fn photon_number(&self) -> CsrMat {
        self.a.adjoint().matmul(&self.a)
    }

    pub fn phonon_number(&self) -> CsrMat {
        self.b.adjoint().matmul(&self.b)
    }

    /// Homodyne quadrature `a + a†`.
    pub fn quadrature(&self) -> CsrMat {
        self.a.add(&self.a.adjoint())
    }
}

/// Lowering operator of one mode.
pub fn lowering(dim: usize) -> CsrMat {
    let t = (1..dim)
        .map(|k| (k - 1, k, C64::new((k as f64).sqrt(), 0.0)))
        .collect();
    CsrMat::from_triplets(dim, dim, t)
}

fn embed(mode_dims: &[usize], which: usize, op: &CsrMat) -> CsrMat {
    mode_dims
        .iter()
        .enumerate()
        .map(|(k, &d)| if k == which { op.clone() } else { CsrMat::identity(d) })
        .reduce(|acc, m| acc.kron(&m))
        .expect("at least one mode")
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

struct ModeOps {
    a: CsrMat,
    b: CsrMat,
    c: Option<CsrMat>,
    n: CsrMat,
    x_b: CsrMat,
}

fn mode_ops(dims: Dims) -> ModeOps {
    let md = dims.modes();
    let a = embed(&md, 0, &lowering(dims.cavity));
    let b = embed(&md, 1, &lowering(dims.mechanics));
    let c = dims.auxiliary.map(|d| embed(&md, 2, &lowering(d)));
    let n = a.adjoint().matmul(&a);
    let x_b = b.add(&b.adjoint());
    ModeOps { a, b, c, n, x_b }
}

fn two_mode_hamiltonian(p: &SystemParams, drives: Drives, o: &ModeOps) -> CsrMat {
    let bd = o.b.adjoint();
    let mut h = bd.matmul(&o.b).scale(real(p.omega_b));
    h = h.sub(&o.n.matmul(&o.x_b).scale(real(p.kappa)));
    let mut linear = p.gravity_coupling() * p.theta_tilt.cos();
    if drives.external_force {
        linear -= p.force;
    }
    h = h.add(&o.x_b.scale(real(linear)));
    if drives.single_photon {
        h = h.add(&o.a.add(&o.a.adjoint()).scale(real(p.eta)));
    }
    if drives.two_photon {
        let a2 = o.a.matmul(&o.a);
        h = h.add(&a2.add(&a2.adjoint()).scale(real(0.5 * p.chi)));
    }
    if drives.mechanical_parametric {
        let b2 = o.b.matmul(&o.b);
        h = h.add(&b2.add(&b2.adjoint()).scale(real(0.5 * p.upsilon)));
    }
    h
}

/// Two-mode model with the dissipative channel `z = i a†a + b` at rate
/// `lambda`.
pub fn build_hamiltonian(
    p: &SystemParams,
    dims: Dims,
    drives: Drives,
    opts: &BuildOptions,
) -> Result<FockOperatorSet> {
    p.validate()?;
    drives.check()?;
    if dims.auxiliary.is_some() {
        return Err(Error::InvalidParameter {
            name: "dims",
            reason: "use build_three_mode_model for an auxiliary mode",
        });
    }
    dims.check(opts.hilbert_cap)?;
    let o = mode_ops(dims);
    let h = two_mode_hamiltonian(p, drives, &o);
    let f = opts.convention.factor();
    let mut channels = vec![
        CollapseChannel {
            kind: ChannelKind::Cavity,
            rate: f * p.gamma_a,
            op: o.a.clone(),
        },
        CollapseChannel {
            kind: ChannelKind::Mechanics,
            rate: f * p.gamma_b,
            op: o.b.clone(),
        },
    ];
    if p.lambda > 0.0 {
        channels.push(CollapseChannel {
            kind: ChannelKind::Dissipative,
            rate: f * p.lambda,
            op: o.n.scale(I).add(&o.b),
        });
    }
    let mut warnings = Vec::new();
    if p.coupling() == Coupling::Intermediate {
        warnings.push(Warning::UnverifiedCoupling);
    }
    Ok(FockOperatorSet {
        dims,
        a: o.a,
        b: o.b,
        c: None,
        hamiltonian: h,
        channels,
        warnings,
    })
}

/// How the mechanics exchanges excitations with the auxiliary mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AuxiliaryCoupling {
    /// `nu = i mu`: the auxiliary mode couples to `mu (a†a - i b)`, which
    /// eliminates to `D[z]`.
    #[default]
    Matched,
    /// `nu = omega - i gamma` with `lambda = mu² / (omega² + gamma²)`.
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuxiliaryMode {
    /// Photon-number coupling to the auxiliary mode.
    pub mu: f64,
    pub omega: f64,
    pub gamma: f64,
    pub coupling: AuxiliaryCoupling,
}

impl AuxiliaryMode {
    /// Auxiliary mode at `omega = 0` whose elimination yields rate `lambda`.
    pub fn for_lambda(lambda: f64, gamma: f64, coupling: AuxiliaryCoupling) -> Self {
        let mu = match coupling {
            AuxiliaryCoupling::Matched => (lambda * gamma).sqrt(),
            AuxiliaryCoupling::Literal => (lambda * gamma * gamma).sqrt(),
        };
        Self {
            mu,
            omega: 0.0,
            gamma,
            coupling,
        }
    }

    /// Coefficient of `b† c` in the Hamiltonian.
    pub fn exchange(&self) -> C64 {
        match self.coupling {
            AuxiliaryCoupling::Matched => C64::new(0.0, self.mu),
            AuxiliaryCoupling::Literal => C64::new(self.omega, -self.gamma),
        }
    }

    pub fn effective_lambda(&self) -> f64 {
        let d = self.gamma * self.gamma + self.omega * self.omega;
        match self.coupling {
            AuxiliaryCoupling::Matched => self.gamma * self.mu * self.mu / d,
            AuxiliaryCoupling::Literal => self.mu * self.mu / d,
        }
    }
}

/// Three-mode model whose auxiliary mode generates the dissipative channel.
/// `p.lambda` is ignored.
pub fn build_three_mode_model(
    p: &SystemParams,
    aux: &AuxiliaryMode,
    dims: Dims,
    drives: Drives,
    opts: &BuildOptions,
) -> Result<FockOperatorSet> {
    p.validate()?;
    drives.check()?;
    if dims.auxiliary.is_none() {
        return Err(Error::InvalidParameter {
            name: "dims",
            reason: "three-mode model needs an auxiliary dimension",
        });
    }
    if !(aux.gamma > 0.0) || !aux.mu.is_finite() || !aux.omega.is_finite() {
        return Err(Error::InvalidParameter {
            name: "auxiliary",
            reason: "needs positive damping and finite couplings",
        });
    }
    dims.check(opts.hilbert_cap)?;
    let o = mode_ops(dims);
    let c = o.c.clone().expect("auxiliary dimension checked");
    let cd = c.adjoint();
    let nu = aux.exchange();
    let mut h = two_mode_hamiltonian(p, drives, &o);
    h = h.add(&cd.matmul(&c).scale(real(aux.omega)));
    h = h.add(&o.n.matmul(&c.add(&cd)).scale(real(aux.mu)));
    h = h.add(&o.b.adjoint().matmul(&c).scale(nu));
    h = h.add(&o.b.matmul(&cd).scale(nu.conj()));
    let f = opts.convention.factor();
    let channels = vec![
        CollapseChannel {
            kind: ChannelKind::Cavity,
            rate: f * p.gamma_a,
            op: o.a.clone(),
        },
        CollapseChannel {
            kind: ChannelKind::Mechanics,
            rate: f * p.gamma_b,
            op: o.b.clone(),
        },
        CollapseChannel {
            kind: ChannelKind::Auxiliary,
            rate: f * aux.gamma,
            op: c.clone(),
        },
    ];
    let ratio = aux.gamma / p.gamma_a.max(p.gamma_b);
    let mut warnings = Vec::new();
    if ratio < AUXILIARY_SEPARATION {
        warnings.push(Warning::SlowAuxiliary { ratio });
    }
    Ok(FockOperatorSet {
        dims,
        a: o.a,
        b: o.b,
        c: Some(c),
        hamiltonian: h,
        channels,
        warnings,
    })
}

/// Liouvillian superoperator on column-stacked density matrices.
pub fn build_liouvillian(ops: &FockOperatorSet) -> CsrMat {
    let n = ops.hilbert_dim();
    let id = CsrMat::identity(n);
    let h = &ops.hamiltonian;
    let mut l = id.kron(h).sub(&h.transpose().kron(&id)).scale(-I);
    for ch in &ops.channels {
        if ch.rate == 0.0 {
            continue;
        }
        let cdc = ch.op.adjoint().matmul(&ch.op);
        let jump = ch.op.conj().kron(&ch.op);
        let anti = id.kron(&cdc).add(&cdc.transpose().kron(&id)).scale(real(0.5));
        l = l.add(&jump.sub(&anti).scale(real(ch.rate)));
    }
    l
}
