//! Physical parameters, in units where the mechanical damping is the
//! natural rate scale (`gamma_b = 1`) unless the caller picks otherwise.

#[allow(unused_imports)] // float math without std
use num_traits::Float;

use crate::error::{Error, Result};

/// How the dissipative channel relates to the coherent photon-phonon
/// coupling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coupling {
    /// `lambda == kappa`: the phonon is blind to the photon.
    Nonreciprocal,
    /// `lambda == 0`: ordinary radiation-pressure coupling.
    Reciprocal,
    /// Any other `lambda`; only the builders and the oracle accept it.
    Intermediate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    /// Mechanical frequency.
    pub omega_b: f64,
    /// Coherent photon-phonon coupling.
    pub kappa: f64,
    /// Rate of the engineered dissipative channel.
    pub lambda: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    /// Single-photon drive amplitude.
    pub eta: f64,
    /// Two-photon (optical parametric) drive.
    pub chi: f64,
    /// Mechanical parametric drive.
    pub upsilon: f64,
    pub mass: f64,
    /// Gravitational acceleration, the estimand.
    pub g: f64,
    pub theta_tilt: f64,
    /// External force on the mechanical mode, entering as `-force (b + b†)`.
    pub force: f64,
}

impl Default for SystemParams {
    /// Nonreciprocal point with `omega_b = 20`, unit rates and a mass
    /// chosen so that the gravity coupling equals `g`.
    fn default() -> Self {
        Self {
            omega_b: 20.0,
            kappa: 0.5,
            lambda: 0.5,
            gamma_a: 1.0,
            gamma_b: 1.0,
            eta: 1.0,
            chi: 0.0,
            upsilon: 0.0,
            mass: 40.0,
            g: 1.0,
            theta_tilt: 0.0,
            force: 0.0,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_b", self.omega_b),
            ("kappa", self.kappa),
            ("lambda", self.lambda),
            ("gamma_a", self.gamma_a),
            ("gamma_b", self.gamma_b),
            ("eta", self.eta),
            ("chi", self.chi),
            ("upsilon", self.upsilon),
            ("mass", self.mass),
            ("g", self.g),
            ("theta_tilt", self.theta_tilt),
            ("force", self.force),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be finite",
                });
            }
        }
        let positive = [
            ("gamma_a", self.gamma_a),
            ("gamma_b", self.gamma_b),
            ("omega_b", self.omega_b),
            ("mass", self.mass),
        ];
        for (name, v) in positive {
            if v <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be positive",
                });
            }
        }
        if self.kappa < 0.0 {
            return Err(Error::InvalidParameter {
                name: "kappa",
                reason: "must be non-negative",
            });
        }
        if self.lambda < 0.0 {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: "must be non-negative",
            });
        }
        Ok(())
    }

    pub fn coupling(&self) -> Coupling {
        if self.lambda == self.kappa {
            Coupling::Nonreciprocal
        } else if self.lambda == 0.0 {
            Coupling::Reciprocal
        } else {
            Coupling::Intermediate
        }
    }

    pub fn nonreciprocal(mut self) -> Self {
        self.lambda = self.kappa;
        self
    }

    pub fn reciprocal(mut self) -> Self {
        self.lambda = 0.0;
        self
    }

    /// `d(gravity_coupling)/dg`: `sqrt(m / (2 omega_b))`.
    pub fn coupling_per_g(&self) -> f64 {
        (self.mass / (2.0 * self.omega_b)).sqrt()
    }

    /// Linear gravity drive on the mechanical mode, `g sqrt(m / 2 omega_b)`.
    pub fn gravity_coupling(&self) -> f64 {
        self.g * self.coupling_per_g()
    }

    /// Net linear drive on the mechanical mode after tilt and the
    /// compensating force.
    pub fn net_drive(&self) -> f64 {
        self.gravity_coupling() * self.theta_tilt.cos() - self.force
    }

    /// `d(net_drive)/dg` at fixed force.
    pub fn net_drive_per_g(&self) -> f64 {
        self.coupling_per_g() * self.theta_tilt.cos()
    }

    /// Cavity amplitude decay including the dissipative channel.
    pub fn cavity_decay(&self) -> f64 {
        self.gamma_a + self.lambda
    }

    /// Mechanical amplitude decay including the dissipative channel.
    pub fn mechanical_decay(&self) -> f64 {
        self.gamma_b + self.lambda
    }

    /// Mean-field phase factor the mechanical displacement imprints on the
    /// cavity in the nonreciprocal single-photon regime.
    pub fn nonreciprocal_phase(&self) -> f64 {
        let gb = self.gamma_b + self.kappa;
        4.0 * self.net_drive() * self.kappa * self.omega_b / (gb * gb + self.omega_b * self.omega_b)
    }

    /// Threshold of the mechanical parametric drive, `sqrt(Γ_b² + ω_b²)`.
    pub fn mechanical_parametric_threshold(&self) -> f64 {
        self.mechanical_decay().hypot(self.omega_b)
    }
}
