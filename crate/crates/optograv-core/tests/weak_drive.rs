use num_complex::Complex64 as C;
use optograv_core::weak_drive::{self, AmplitudeMethod, WeakDriveLimits};
use optograv_core::SystemParams;

fn weak(kappa: f64, gamma_a: f64) -> SystemParams {
    let p = SystemParams {
        kappa,
        lambda: kappa,
        gamma_a,
        eta: 0.01,
        g: 1.0,
        ..SystemParams::default()
    };
    SystemParams {
        force: p.gravity_coupling(),
        ..p
    }
}

#[test]
fn pure_state_qfi_of_a_rotation_is_four() {
    let t = 0.3f64;
    let psi = [C::new(t.cos(), 0.0), C::new(t.sin(), 0.0)];
    let dpsi = [C::new(-t.sin(), 0.0), C::new(t.cos(), 0.0)];
    assert!((weak_drive::pure_state_qfi(&psi, &dpsi) - 4.0).abs() < 1e-14);
    // A global phase carries no information.
    let phase = [psi[0] * C::new(0.0, 1.0), psi[1] * C::new(0.0, 1.0)];
    assert!(weak_drive::pure_state_qfi(&psi, &phase).abs() < 1e-14);
}

/// The cavity amplitude `p10` of the closed form has the explicit
/// derivative `p10 * 2 kappa / (s (kappa + γ_a) - 2 G' kappa)` in `G'`;
/// at `p00 = 1` and small `p10` the QFI is `4 |dp10/dg|²` to leading order.
#[test]
fn nonreciprocal_qfi_matches_amplitude_derivative() {
    for (kappa, gamma_a) in [(0.3, 2.0), (0.1, 1.0), (0.5, 0.5)] {
        let p = weak(kappa, gamma_a);
        let cf = weak_drive::steady_amplitudes(&p, AmplitudeMethod::ClosedForm, &WeakDriveLimits::default())
            .unwrap();
        let p10 = cf.amplitudes[2];
        let s = C::new(2.0 * kappa + gamma_a + p.gamma_b, p.omega_b);
        let dp10 = p10 * 2.0 * kappa / (s * (kappa + gamma_a) - 2.0 * p.net_drive() * kappa) * p.net_drive_per_g();
        let expected = 4.0 * dp10.norm_sqr();
        let numeric = weak_drive::numeric_qfi(&p, 1e-5).unwrap();
        assert!(((numeric - expected) / expected).abs() < 0.05, "{numeric} vs {expected}");
        let closed = weak_drive::closed_form_qfi(&p).unwrap();
        assert!(((closed - expected) / expected).abs() < 0.05, "{closed} vs {expected}");
    }
}

#[test]
fn closed_and_solved_amplitudes_agree_for_nonreciprocal_coupling() {
    let p = weak(0.2, 1.0);
    let lim = WeakDriveLimits::default();
    let a = weak_drive::steady_amplitudes(&p, AmplitudeMethod::ClosedForm, &lim).unwrap();
    let b = weak_drive::steady_amplitudes(&p, AmplitudeMethod::LinearSolve, &lim).unwrap();
    assert!((a.amplitudes[2] - b.amplitudes[2]).norm() < 0.03 * b.amplitudes[2].norm());
}

#[test]
fn precision_ratio_golden_values() {
    // sqrt of the ratio of the two closed forms, evaluated independently.
    let cases = [
        (20.0, 0.01, 1.0, 1.0, 39.25693955376225),
        (20.0, 0.5, 0.5, 1.0, 19.969453596007),
        (20.0, 1.0, 3.0, 1.0, 7.359562933428922),
        (20.0, 5.0, 0.1, 1.0, 1.6956794852401356),
        (10.0, 0.2, 2.0, 0.5, 8.19580679529738),
    ];
    for (omega_b, kappa, gamma_a, gamma_b, golden) in cases {
        let p = SystemParams {
            omega_b,
            kappa,
            gamma_a,
            gamma_b,
            ..SystemParams::default()
        };
        let r = weak_drive::precision_ratio(&p);
        assert!(((r - golden) / golden).abs() < 1e-12, "{r} vs {golden}");
    }
}

#[test]
fn precision_ratio_approaches_its_small_kappa_limit() {
    let p = SystemParams {
        kappa: 1e-4,
        ..SystemParams::default()
    };
    let r = weak_drive::precision_ratio(&p);
    let limit = weak_drive::precision_ratio_limit(&p);
    assert!(((r - limit) / limit).abs() < 0.01);
    assert!((limit - 2.0 * 401f64.sqrt()).abs() < 1e-12);
}

#[test]
fn uncompensated_gravity_and_strong_drive_warn() {
    let p = SystemParams {
        eta: 1.0,
        ..SystemParams::default()
    };
    let r = weak_drive::qfi(&p, &WeakDriveLimits::default()).unwrap();
    assert_eq!(r.warnings.len(), 2);
}
