//! Acceptance criteria, one verdict line each. Exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use optograv::commands;
use optograv::config::RunConfig;
use optograv::oracle::{self, OracleOptions};
use optograv_core::fluctuations;
use optograv_core::mean_field;
use optograv_core::metrology::{self, closed_form, Provenance};
use optograv_core::model::{AuxiliaryCoupling, AuxiliaryMode, Dims};
use optograv_core::weak_drive;
use optograv_core::{CMat, SystemParams};

struct Verdict {
    pass: bool,
    detail: String,
}

type Outcome = Result<Verdict, String>;

fn verdict(pass: bool, detail: String) -> Outcome {
    Ok(Verdict { pass, detail })
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Unit mechanical damping, `omega_b = 20`, mass chosen so that `G = g`.
fn base() -> SystemParams {
    SystemParams {
        omega_b: 20.0,
        gamma_b: 1.0,
        gamma_a: 1.0,
        kappa: 0.5,
        lambda: 0.5,
        mass: 40.0,
        ..SystemParams::default()
    }
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn regime_ratio() -> Outcome {
    let p = SystemParams {
        kappa: 0.05,
        lambda: 0.05,
        eta: 2.0,
        g: 1.0,
        ..base()
    };
    let r = metrology::regime_ratio(&p, Provenance::Analytic).map_err(err)?;
    let validity = r.nonreciprocal.validity_ratio.max(r.reciprocal.validity_ratio);
    let in_range = (0.48..=0.52).contains(&r.ratio);
    verdict(
        validity < 0.01 && in_range,
        format!("R = {:.4} (want [0.48, 0.52]), validity kappa|alpha|^2/G = {validity:.3} (want < 0.01)", r.ratio),
    )
}

fn reciprocal_blindness() -> Outcome {
    let p = SystemParams { g: 1.0, ..base() }.reciprocal();
    let mut values = Vec::new();
    for eta in [1e2, 1e3, 1e4, 1e5] {
        let q = SystemParams { eta, ..p };
        let s = mean_field::steady_state(&q).map_err(err)?;
        values.push(metrology::susceptibility(&q, &s).map_err(err)?.abs());
    }
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let drop = values[3] / values[0];
    verdict(
        decreasing && drop < 1e-3,
        format!("|dM/dg| = {}, final/initial = {drop:.3e} (want < 1e-3)", sci(&values)),
    )
}

fn nonreciprocal_saturation() -> Outcome {
    let p = SystemParams { g: 1.0, ..base() };
    let at = |eta: f64| {
        metrology::uncertainty(&SystemParams { eta, ..p }, Provenance::Analytic).map(|r| r.delta_g)
    };
    let d3 = at(1e3).map_err(err)?;
    let d5 = at(1e5).map_err(err)?;
    let zeta = closed_form::saturation_noise_coefficient(&p);
    let closed = closed_form::nonreciprocal_saturation(&p, zeta);
    let agree = rel(d3, d5);
    let vs_closed = rel(d5, closed);
    verdict(
        agree < 0.01 && vs_closed < 0.05,
        format!("dg(1e3) = {d3:.5}, dg(1e5) = {d5:.5}, spread {agree:.1e}; closed form {closed:.5}, off by {vs_closed:.3}"),
    )
}

fn two_photon_scaling() -> Outcome {
    let p = SystemParams {
        g: 30.0,
        eta: 10.0,
        ..base()
    };
    let c = metrology::critical_scaling(&p, &commands::CRITICAL_FRACTIONS).map_err(err)?;
    let (s, n, d) = (c.signal.exponent, c.noise.exponent, c.delta_g.exponent);
    verdict(
        (s + 2.0).abs() <= 0.05 && (n + 3.0).abs() <= 0.1 && (d - 0.5).abs() <= 0.05,
        format!("slopes: signal {s:.4}, noise {n:.4}, dg {d:.4}"),
    )
}

fn stability_frontier() -> Outcome {
    let p = SystemParams { g: 1.0, ..base() };
    let x = p.gamma_a + p.kappa;
    let g1 = p.nonreciprocal_phase();
    let expected = x.hypot(g1);
    let found = fluctuations::stability_frontier(&p, 0.0, 2.0 * expected, 1e-13).map_err(err)?;
    let e = rel(found, expected);
    verdict(e < 1e-9, format!("chi_c = {found:.12}, expected {expected:.12}, rel {e:.1e}"))
}

fn expm(m: &CMat) -> CMat {
    let norm = m.max_abs() * m.rows() as f64;
    let squarings = norm.log2().ceil().max(0.0) as i32 + 4;
    let a = m.scale(C::new(0.5f64.powi(squarings), 0.0));
    let mut term = CMat::identity(m.rows());
    let mut sum = term.clone();
    for k in 1..20 {
        term = term.matmul(&a).scale(C::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

/// `∫ e^{Mt} D e^{M†t} dt` by composite Simpson's rule.
fn kernel_integral(m: &CMat, d: &CMat, slowest: f64) -> CMat {
    let h = 2.5e-4;
    let t_end = 18.0 / slowest;
    let steps = 2 * ((t_end / h / 2.0).ceil() as usize);
    let step = expm(&m.scale(C::new(h, 0.0)));
    let mut phi = CMat::identity(m.rows());
    let mut acc = CMat::zeros(m.rows(), m.rows());
    for k in 0..=steps {
        let w = if k == 0 || k == steps {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc = acc.add(&phi.matmul(d).matmul(&phi.adjoint()).scale(C::new(w, 0.0)));
        phi = phi.matmul(&step);
    }
    acc.scale(C::new(h / 3.0, 0.0))
}

fn lyapunov_vs_kernel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 10 {
        let kappa = rng.random_range(0.1..1.0);
        let mut p = SystemParams {
            omega_b: rng.random_range(5.0..30.0),
            kappa,
            lambda: if rng.random_bool(0.5) { kappa } else { 0.0 },
            gamma_a: rng.random_range(0.3..2.0),
            gamma_b: rng.random_range(0.3..2.0),
            eta: rng.random_range(0.5..5.0),
            g: rng.random_range(0.5..3.0),
            ..base()
        };
        if p.lambda > 0.0 {
            let (phase, _) = mean_field::phase_line(&p).map_err(err)?;
            p.chi = rng.random_range(0.0..0.8) * mean_field::two_photon_threshold(&p, phase);
        }
        let Ok(s) = mean_field::steady_state(&p) else { continue };
        let growth = fluctuations::max_growth_rate(&p, &s).map_err(err)?;
        if growth > -0.05 {
            continue;
        }
        let sys = fluctuations::linearize(&p, &s);
        let lyap = fluctuations::steady_covariance(&p, &s).map_err(err)?.photon_fluctuation();
        let kernel = kernel_integral(&sys.drift, &sys.noise, -growth)[(1, 1)].re;
        worst = worst.max(rel(kernel, lyap));
        done += 1;
    }
    verdict(worst < 1e-6, format!("worst relative gap over 10 points {worst:.2e}"))
}

fn parametric_null_result() -> Outcome {
    let p = SystemParams { g: 1.0, ..base() };
    let uc = p.mechanical_parametric_threshold();
    let sus = |q: &SystemParams| -> Result<f64, String> {
        let s = mean_field::steady_state(q).map_err(err)?;
        Ok(metrology::susceptibility(q, &s).map_err(err)?.abs())
    };
    let at0 = sus(&p)?;
    let near = sus(&SystemParams { upsilon: 0.999 * uc, ..p })?;
    let vanish = near / at0;

    let compensated = SystemParams {
        force: p.gravity_coupling(),
        ..p
    };
    let mut dgs = Vec::new();
    for gap in weak_drive::log_space(1e-2, 1e-3, 5) {
        let q = SystemParams {
            upsilon: (1.0 - gap) * uc,
            ..compensated
        };
        dgs.push(metrology::uncertainty(&q, Provenance::Analytic).map_err(err)?.delta_g);
    }
    let (lo, hi) = dgs.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    let spread = hi / lo - 1.0;
    verdict(
        vanish < 1e-3 && spread < 0.05,
        format!("signal(0.999 u_c)/signal(0) = {vanish:.3} (want < 1e-3); with F = G dg spread {spread:.3} over the last decade (want < 0.05)"),
    )
}

fn compensated_weak(kappa: f64, gamma_a: f64, nonreciprocal: bool) -> SystemParams {
    let p = SystemParams {
        kappa,
        lambda: if nonreciprocal { kappa } else { 0.0 },
        gamma_a,
        eta: 0.01,
        g: 1.0,
        ..base()
    };
    SystemParams {
        force: p.gravity_coupling(),
        ..p
    }
}

const QFI_POINTS: [(f64, f64); 5] = [(0.3, 2.0), (0.1, 1.0), (0.01, 1.0), (0.5, 0.5), (1.0, 3.0)];

fn weak_drive_qfi() -> Outcome {
    let mut nr = Vec::new();
    let mut r = Vec::new();
    for (kappa, gamma_a) in QFI_POINTS {
        for (nonreciprocal, out) in [(true, &mut nr), (false, &mut r)] {
            let p = compensated_weak(kappa, gamma_a, nonreciprocal);
            let numeric = weak_drive::numeric_qfi(&p, weak_drive::DEFAULT_QFI_STEP).map_err(err)?;
            let closed = weak_drive::closed_form_qfi(&p).ok_or("no closed form")?;
            out.push(numeric / closed);
        }
    }
    let ok = |v: &[f64]| v.iter().all(|x| (x - 1.0).abs() < 0.05);
    verdict(
        ok(&nr) && ok(&r),
        format!("numeric/closed nonreciprocal [{}], reciprocal [{}]", sci(&nr), sci(&r)),
    )
}

fn fig2_grid() -> Outcome {
    let table = commands::fig2(&RunConfig::default()).map_err(err)?;
    let (ik, ig, ir) = (
        table.column("kappa").ok_or("kappa")?,
        table.column("gamma_a").ok_or("gamma_a")?,
        table.column("R_w").ok_or("R_w")?,
    );
    let num = |v: &optograv::output::Value| match v {
        optograv::output::Value::Num(x) => *x,
        _ => f64::NAN,
    };
    let n = table.rows.len();
    let above = table.rows.iter().filter(|r| num(&r[ir]) > 1.0).count();
    let fraction = above as f64 / n as f64;
    let mut worst = 0.0f64;
    let mut checked = 0;
    for row in &table.rows {
        let (k, ga) = (num(&row[ik]), num(&row[ig]));
        let p = SystemParams {
            kappa: k,
            gamma_a: ga,
            ..base()
        };
        if k <= 0.0101 * ga.min(p.gamma_b) {
            worst = worst.max(rel(num(&row[ir]), weak_drive::precision_ratio_limit(&p)));
            checked += 1;
        }
    }
    verdict(
        n == 2500 && fraction > 0.5 && checked > 0 && worst < 0.1,
        format!("{n} points, fraction R_w > 1 = {fraction:.3}; {checked} small-kappa points within {worst:.4} of the limit"),
    )
}

fn oracle_cross_validation() -> Outcome {
    let points = [
        SystemParams { kappa: 0.1, lambda: 0.1, eta: 0.1, g: 0.1, ..base() },
        SystemParams { kappa: 0.05, lambda: 0.05, eta: 0.05, g: 0.2, ..base() },
        SystemParams { omega_b: 10.0, kappa: 0.1, lambda: 0.1, gamma_a: 2.0, eta: 0.1, g: 0.5, ..base() },
        SystemParams { kappa: 0.02, lambda: 0.02, gamma_a: 0.5, eta: 0.1, g: 0.1, ..base() },
        SystemParams { kappa: 0.2, lambda: 0.2, gamma_b: 0.5, eta: 0.08, g: 0.3, ..base() },
    ];
    let opts = OracleOptions::default();
    let mut worst = 0.0f64;
    for p in &points {
        let c = oracle::compare_with_linearized(p, Dims::two_mode(10, 10), &opts).map_err(err)?;
        worst = worst
            .max(c.photon_number.relative_difference())
            .max(c.homodyne_mean.relative_difference())
            .max(c.quadrature_variance.relative_difference());
    }
    let p = points[0];
    let dims = Dims::three_mode(3, 3, 3);
    let at = |ratio: f64| {
        let aux = AuxiliaryMode::for_lambda(p.kappa, ratio * p.gamma_a.max(p.gamma_b), AuxiliaryCoupling::Matched);
        oracle::validate_adiabatic_elimination(&p, &aux, dims, &opts).map(|r| r.trace_distance)
    };
    let d50 = at(50.0).map_err(err)?;
    let d500 = at(500.0).map_err(err)?;
    verdict(
        worst < 0.05 && d500 < d50,
        format!("worst moment gap {worst:.2e} (want < 0.05); elimination distance {d50:.2e} at 50, {d500:.2e} at 500"),
    )
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "regime ratio R = 1/2", Duration::from_secs(1), regime_ratio),
        (2, "reciprocal large-drive blindness", Duration::from_secs(1), reciprocal_blindness),
        (3, "nonreciprocal large-drive saturation", Duration::from_secs(1), nonreciprocal_saturation),
        (4, "two-photon critical scaling", Duration::from_secs(5), two_photon_scaling),
        (5, "two-photon stability frontier", Duration::from_secs(1), stability_frontier),
        (6, "Lyapunov vs exponential kernel", Duration::from_secs(10), lyapunov_vs_kernel),
        (7, "parametric null result", Duration::from_secs(5), parametric_null_result),
        (8, "weak-drive QFI closed forms", Duration::from_secs(5), weak_drive_qfi),
        (9, "precision-ratio grid", Duration::from_secs(30), fig2_grid),
        (10, "oracle cross-validation", Duration::from_secs(300), oracle_cross_validation),
    ];
    let mut failed = 0;
    for (n, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(v) => (v.pass && took <= budget, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let timing = if took <= budget { "" } else { " [over time budget]" };
        println!(
            "{} criterion {n}: {name}: {detail} ({:.2}s){timing}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
        if !pass {
            failed += 1;
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
