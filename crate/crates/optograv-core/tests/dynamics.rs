//! Steady states checked against direct time integration.

use num_complex::Complex64 as C;
use optograv_core::fluctuations::{self, Covariance};
use optograv_core::mean_field;
use optograv_core::{CMat, SystemParams};

fn rk4<T: Clone>(
    mut y: T,
    dt: f64,
    steps: usize,
    f: impl Fn(&T) -> T,
    axpy: impl Fn(&T, f64, &T) -> T,
) -> T {
    for _ in 0..steps {
        let k1 = f(&y);
        let k2 = f(&axpy(&y, 0.5 * dt, &k1));
        let k3 = f(&axpy(&y, 0.5 * dt, &k2));
        let k4 = f(&axpy(&y, dt, &k3));
        let incr = axpy(&axpy(&axpy(&k1, 2.0, &k2), 2.0, &k3), 1.0, &k4);
        y = axpy(&y, dt / 6.0, &incr);
    }
    y
}

/// Classical amplitude equations written out independently of the crate.
fn amplitude_rhs(p: &SystemParams, y: &[C; 2]) -> [C; 2] {
    let i = C::new(0.0, 1.0);
    let [a, b] = *y;
    let (k, l) = (p.kappa, p.lambda);
    let drive = p.mass.sqrt() / (2.0 * p.omega_b).sqrt() * p.g * p.theta_tilt.cos() - p.force;
    let da = -(p.gamma_a + l) * a + i * 2.0 * (k + l) * b.re * a - i * p.chi * a.conj() - i * p.eta;
    let db = -(p.gamma_b + l) * b - i * p.omega_b * b - i * p.upsilon * b.conj() - i * drive
        + i * (k - l) * a.norm_sqr();
    [da, db]
}

fn integrate_amplitudes(p: &SystemParams, t: f64) -> [C; 2] {
    let dt = 1e-3;
    rk4(
        [C::new(0.0, 0.0); 2],
        dt,
        (t / dt) as usize,
        |y| amplitude_rhs(p, y),
        |y, h, k| [y[0] + k[0] * h, y[1] + k[1] * h],
    )
}

#[test]
fn mean_field_matches_integrated_amplitudes() {
    let base = SystemParams::default();
    let cases = [
        base,
        SystemParams { eta: 5.0, g: 2.0, ..base },
        SystemParams { eta: 2.0, ..base }.reciprocal(),
        SystemParams { chi: 0.9, ..base },
        SystemParams { chi: 0.5, eta: 0.7, ..base }.reciprocal(),
        SystemParams { upsilon: 12.0, force: 0.3, ..base },
        SystemParams { theta_tilt: 0.4, kappa: 0.2, lambda: 0.2, ..base },
    ];
    for p in cases {
        let s = mean_field::steady_state(&p).unwrap();
        let [a, b] = integrate_amplitudes(&p, 60.0);
        assert!((s.alpha - a).norm() < 1e-7 * (1.0 + a.norm()), "{p:?}: {} vs {a}", s.alpha);
        assert!((s.beta - b).norm() < 1e-7 * (1.0 + b.norm()), "{p:?}: {} vs {b}", s.beta);
    }
}

#[test]
fn covariance_matches_integrated_moment_equation() {
    let base = SystemParams::default();
    for p in [
        base,
        SystemParams { chi: 0.8, ..base },
        SystemParams { eta: 1.5, ..base }.reciprocal(),
        SystemParams { upsilon: 10.0, ..base },
    ] {
        let s = mean_field::steady_state(&p).unwrap();
        let sys = fluctuations::linearize(&p, &s);
        let (m, d) = (sys.drift, sys.noise);
        let mh = m.adjoint();
        let c = rk4(
            CMat::zeros(4, 4),
            1e-3,
            60_000,
            |c| m.matmul(c).add(&c.matmul(&mh)).add(&d),
            |y, h, k| y.add(&k.scale(C::new(h, 0.0))),
        );
        let cov: Covariance = fluctuations::steady_covariance(&p, &s).unwrap();
        let err = c.sub(&cov.matrix).max_abs();
        assert!(err < 1e-7 * (1.0 + c.max_abs()), "{p:?}: {err:e}");
    }
}
