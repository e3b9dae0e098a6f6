//! Subcommand bodies. Each turns a [`RunConfig`] into a [`Table`].

use log::{info, warn};
use rayon::prelude::*;
use thiserror::Error;

use optograv_core::fluctuations;
use optograv_core::mean_field::{self, MeanFieldState, Regime};
use optograv_core::metrology::{self, Provenance};
use optograv_core::model::{AuxiliaryCoupling, AuxiliaryMode, Dims};
use optograv_core::weak_drive::{self, WeakDriveLimits, WeakDriveWarning};
use optograv_core::{Error as CoreError, SystemParams};

use crate::config::{ConfigError, RunConfig, PARAM_NAMES};
use crate::oracle::{self, OracleOptions, SteadyMethod};
use crate::output::{Table, Value};
use crate::OracleError;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver failure: {0}")]
    Solver(#[from] CoreError),
    #[error("oracle failure: {0}")]
    Oracle(#[from] OracleError),
}

pub type CommandResult<T> = Result<T, CommandError>;

fn param_columns() -> Vec<String> {
    PARAM_NAMES.iter().map(|s| s.to_string()).collect()
}

fn param_values(p: &SystemParams) -> Vec<Value> {
    PARAM_NAMES
        .iter()
        .map(|n| crate::config::param_value(p, n).expect("known parameter").into())
        .collect()
}

fn columns(extra: &[&str]) -> Vec<String> {
    let mut c = param_columns();
    c.extend(extra.iter().map(|s| s.to_string()));
    c
}

fn run_points<F>(cfg: &RunConfig, f: F) -> CommandResult<Vec<Vec<Value>>>
where
    F: Fn(&SystemParams) -> CommandResult<Vec<Value>> + Sync,
{
    let points = cfg.points()?;
    info!("{} parameter points", points.len());
    points.par_iter().map(&f).collect()
}

const STEADY_COLUMNS: [&str; 25] = [
    "regime",
    "alpha_re",
    "alpha_im",
    "beta_re",
    "beta_im",
    "photon_number",
    "phase",
    "roots",
    "stable",
    "max_growth_rate",
    "eig0_re",
    "eig0_im",
    "eig1_re",
    "eig1_im",
    "eig2_re",
    "eig2_im",
    "eig3_re",
    "eig3_im",
    "residual",
    "photon_fluctuation",
    "anomalous_re",
    "anomalous_im",
    "phonon_fluctuation",
    "quadrature_variance",
    "converged",
];

const ORACLE_STEADY_COLUMNS: [&str; 5] = [
    "oracle_photon_number",
    "oracle_homodyne_mean",
    "oracle_variance",
    "oracle_residual",
    "oracle_truncation_ok",
];

/// Mean-field state, or the formal solution past a threshold.
fn state_or_formal(p: &SystemParams) -> CommandResult<Option<MeanFieldState>> {
    match mean_field::steady_state(p) {
        Ok(s) => Ok(Some(s)),
        Err(CoreError::Critical { .. }) | Err(CoreError::NoPhysicalRoot) => {
            match mean_field::formal_state(p) {
                Ok(s) => Ok(Some(s)),
                Err(CoreError::Critical { .. }) | Err(CoreError::NoPhysicalRoot) => Ok(None),
                Err(e) => Err(e.into()),
            }
        }
        Err(e) => Err(e.into()),
    }
}

fn steady_row(cfg: &RunConfig, p: &SystemParams) -> CommandResult<Vec<Value>> {
    let regime = Regime::classify(p)?;
    let mut row = param_values(p);
    row.push(regime.name().into());
    let state = state_or_formal(p)?;
    match &state {
        None => {
            row.extend((0..7).map(|_| Value::Empty));
            row.push(false.into());
            row.extend((0..STEADY_COLUMNS.len() - 9).map(|_| Value::Empty));
        }
        Some(s) => {
            let eig = fluctuations::eigenvalues(p, s)?;
            let growth = eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            let stable = growth < 0.0;
            row.extend([
                s.alpha.re.into(),
                s.alpha.im.into(),
                s.beta.re.into(),
                s.beta.im.into(),
                s.photon_number().into(),
                s.phase.into(),
                s.roots.len().into(),
                stable.into(),
                growth.into(),
            ]);
            for z in &eig {
                row.push(z.re.into());
                row.push(z.im.into());
            }
            row.push(s.residual.into());
            if stable {
                let c = fluctuations::steady_covariance(p, s)?;
                row.extend([
                    c.photon_fluctuation().into(),
                    c.anomalous().re.into(),
                    c.anomalous().im.into(),
                    c.phonon_fluctuation().into(),
                    c.quadrature_variance().into(),
                ]);
            } else {
                row.extend((0..5).map(|_| Value::Empty));
            }
            row.push(s.converged.into());
        }
    }
    if cfg.oracle {
        let (ops, sd) = oracle::steady_for_params(p, cfg.dims, &OracleOptions::default())?;
        let (mean, var) = oracle::homodyne_moments(&ops, &sd);
        row.extend([
            sd.expectation(&ops.photon_number()).re.into(),
            mean.into(),
            var.into(),
            sd.residual.into(),
            sd.truncation_ok.into(),
        ]);
    }
    Ok(row)
}

pub fn steady(cfg: &RunConfig) -> CommandResult<Table> {
    let mut cols = columns(&STEADY_COLUMNS);
    if cfg.oracle {
        cols.extend(ORACLE_STEADY_COLUMNS.iter().map(|s| s.to_string()));
    }
    let mut table = Table::new("steady/1", cols);
    for row in run_points(cfg, |p| steady_row(cfg, p))? {
        table.push(row);
    }
    Ok(table)
}

pub const REGIME_RATIO_POINT: [(&str, f64); 7] = [
    ("omega_b", 20.0),
    ("gamma_b", 1.0),
    ("gamma_a", 1.0),
    ("kappa", 0.05),
    ("eta", 2.0),
    ("g", 1.0),
    ("mass", 40.0),
];

pub const TWO_PHOTON_SCALING_POINT: [(&str, f64); 7] = [
    ("omega_b", 20.0),
    ("gamma_b", 1.0),
    ("gamma_a", 1.0),
    ("kappa", 0.5),
    ("eta", 10.0),
    ("g", 30.0),
    ("mass", 40.0),
];

pub const CRITICAL_FRACTIONS: [f64; 4] = [0.9, 0.99, 0.999, 0.9999];

const UNCERTAINTY_COLUMNS: [&str; 9] = [
    "regime",
    "provenance",
    "signal",
    "noise_var",
    "quadrature_variance",
    "delta_g",
    "delta_coupling",
    "validity_ratio",
    "closed_form_delta_g",
];

fn uncertainty_row(cfg: &RunConfig, p: &SystemParams) -> CommandResult<Vec<Value>> {
    let r = metrology::uncertainty(p, Provenance::Analytic)?;
    let mut row = param_values(p);
    row.extend([
        r.regime.name().into(),
        r.provenance.name().into(),
        r.signal.into(),
        r.noise_var.into(),
        r.quadrature_variance.into(),
        r.delta_g.into(),
        r.delta_coupling(p).into(),
        r.validity_ratio.into(),
        r.closed_form_delta_g.into(),
    ]);
    if cfg.oracle {
        let o = oracle::oracle_uncertainty(p, cfg.dims, 1e-4, &OracleOptions::default())?;
        row.extend([o.signal.into(), o.quadrature_variance.into(), o.delta_g.into()]);
    }
    Ok(row)
}

pub fn uncertainty(cfg: &RunConfig) -> CommandResult<Table> {
    match cfg.preset.as_deref() {
        None => {
            let mut cols = columns(&UNCERTAINTY_COLUMNS);
            if cfg.oracle {
                cols.extend(["oracle_signal", "oracle_variance", "oracle_delta_g"].map(String::from));
            }
            let mut table = Table::new("uncertainty/1", cols);
            for row in run_points(cfg, |p| uncertainty_row(cfg, p))? {
                table.push(row);
            }
            Ok(table)
        }
        Some("regime-ratio") => {
            let mut cfg = cfg.clone();
            cfg.preset_defaults(&REGIME_RATIO_POINT);
            let mut table = Table::new(
                "regime-ratio/1",
                columns(&[
                    "ratio",
                    "closed_form_ratio",
                    "delta_g_nonreciprocal",
                    "delta_g_reciprocal",
                    "validity_nonreciprocal",
                    "validity_reciprocal",
                ]),
            );
            let rows = run_points(&cfg, |p| {
                let r = metrology::regime_ratio(p, Provenance::Analytic)?;
                let mut row = param_values(p);
                row.extend([
                    r.ratio.into(),
                    r.closed_form_ratio.into(),
                    r.nonreciprocal.delta_g.into(),
                    r.reciprocal.delta_g.into(),
                    r.nonreciprocal.validity_ratio.into(),
                    r.reciprocal.validity_ratio.into(),
                ]);
                Ok(row)
            })?;
            for row in rows {
                table.push(row);
            }
            Ok(table)
        }
        Some("two-photon-scaling") => {
            let mut cfg = cfg.clone();
            cfg.preset_defaults(&TWO_PHOTON_SCALING_POINT);
            let mut table = Table::new(
                "two-photon-scaling/1",
                columns(&[
                    "signal_exponent",
                    "noise_exponent",
                    "delta_g_exponent",
                    "signal_prefactor",
                    "noise_prefactor",
                    "delta_g_prefactor",
                ]),
            );
            let rows = run_points(&cfg, |p| {
                let c = metrology::critical_scaling(p, &CRITICAL_FRACTIONS)?;
                let mut row = param_values(p);
                row.extend([
                    c.signal.exponent.into(),
                    c.noise.exponent.into(),
                    c.delta_g.exponent.into(),
                    c.signal.prefactor.into(),
                    c.noise.prefactor.into(),
                    c.delta_g.prefactor.into(),
                ]);
                Ok(row)
            })?;
            for row in rows {
                table.push(row);
            }
            Ok(table)
        }
        Some(other) => Err(ConfigError::BadValue {
            key: "preset".into(),
            value: other.into(),
            reason: "expected regime-ratio or two-photon-scaling",
        }
        .into()),
    }
}

pub const FIG2_KAPPA: (f64, f64) = (0.01, 5.0);
pub const FIG2_GAMMA_A: (f64, f64) = (0.1, 10.0);
pub const FIG2_POINTS: usize = 50;

/// Precision-ratio grid, `kappa` varying fastest. Sweep axes on `kappa` or
/// `gamma_a` replace the default log grids.
pub fn fig2(cfg: &RunConfig) -> CommandResult<Table> {
    let axis = |name: &str, (lo, hi): (f64, f64)| {
        cfg.sweeps
            .iter()
            .find(|a| a.name == name)
            .map(|a| a.values())
            .unwrap_or_else(|| weak_drive::log_space(lo, hi, FIG2_POINTS))
    };
    let kappas = axis("kappa", FIG2_KAPPA);
    let gammas = axis("gamma_a", FIG2_GAMMA_A);
    let base = cfg.params;
    base.validate().map_err(ConfigError::from)?;
    let rows: Vec<Vec<weak_drive::RatioPoint>> = gammas
        .par_iter()
        .map(|&ga| weak_drive::ratio_sweep(&base, &kappas, &[ga]))
        .collect();
    let mut table = Table::new("fig2/1", vec!["kappa".into(), "gamma_a".into(), "R_w".into()]);
    table.schema_column = false;
    for pt in rows.into_iter().flatten() {
        table.push(vec![pt.kappa.into(), pt.gamma_a.into(), pt.ratio.into()]);
    }
    Ok(table)
}

fn warning_text(w: &[WeakDriveWarning]) -> Value {
    if w.is_empty() {
        return Value::Empty;
    }
    w.iter()
        .map(|w| match w {
            WeakDriveWarning::StrongDrive { .. } => "strong-drive",
            WeakDriveWarning::UncompensatedGravity { .. } => "uncompensated-gravity",
        })
        .collect::<Vec<_>>()
        .join(";")
        .into()
}

pub fn qfi(cfg: &RunConfig) -> CommandResult<Table> {
    let mut cols = columns(&[
        "closed_form",
        "numeric",
        "relative_difference",
        "step_sensitivity",
        "delta_g_bound",
        "precision_ratio",
        "warnings",
    ]);
    if cfg.oracle {
        cols.extend(["oracle_sld", "oracle_fidelity", "oracle_clamped"].map(String::from));
    }
    let mut table = Table::new("qfi/1", cols);
    let limits = WeakDriveLimits::default();
    let rows = run_points(cfg, |p| {
        let r = weak_drive::qfi(p, &limits)?;
        for w in &r.warnings {
            warn!("{w:?}");
        }
        let mut row = param_values(p);
        row.extend([
            r.closed_form.into(),
            r.numeric.into(),
            r.relative_difference().into(),
            r.step_sensitivity.into(),
            r.delta_g_bound().into(),
            weak_drive::precision_ratio(p).into(),
            warning_text(&r.warnings),
        ]);
        if cfg.oracle {
            let step = 1e-3 * p.g.abs().max(1e-3);
            let o = oracle::numeric_qfi(p, cfg.dims, step, &OracleOptions::default())?;
            row.extend([o.sld.into(), o.fidelity.into(), o.clamped.into()]);
        }
        Ok(row)
    })?;
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

/// Weak-drive point used by `validate` for parameters the user left alone.
pub const VALIDATE_POINT: [(&str, f64); 4] = [("eta", 0.05), ("g", 0.1), ("kappa", 0.1), ("mass", 40.0)];

pub const CROSS_TOLERANCE: f64 = 0.05;
pub const TRUNCATION_TOLERANCE: f64 = 0.01;
pub const DUAL_METHOD_TOLERANCE: f64 = 1e-6;
pub const PHYSICALITY_TOLERANCE: f64 = 1e-9;
pub const ELIMINATION_TOLERANCE: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value < tolerance,
        }
    }
}

fn validate_point(cfg: &RunConfig, p: &SystemParams) -> CommandResult<Vec<Check>> {
    let opts = OracleOptions::default();
    let dims = Dims::two_mode(cfg.dims.cavity, cfg.dims.mechanics);
    let mut checks = Vec::new();

    let (_, sd) = oracle::steady_for_params(p, dims, &opts)?;
    let trace_err = (sd.trace().re - 1.0).abs().max(sd.trace().im.abs());
    checks.push(Check::below("trace", trace_err, PHYSICALITY_TOLERANCE));
    checks.push(Check::below("hermiticity", sd.hermiticity_defect(), PHYSICALITY_TOLERANCE));
    checks.push(Check::below("negativity", (-sd.min_eigenvalue()?).max(0.0), PHYSICALITY_TOLERANCE));
    checks.push(Check::below(
        "top_level_population",
        sd.top_populations.iter().cloned().fold(0.0, f64::max),
        opts.truncation_tolerance,
    ));

    let lin = oracle::compare_with_linearized(p, dims, &opts)?;
    checks.push(Check::below("photon_number", lin.photon_number.relative_difference(), CROSS_TOLERANCE));
    checks.push(Check::below("homodyne_mean", lin.homodyne_mean.relative_difference(), CROSS_TOLERANCE));
    checks.push(Check::below(
        "homodyne_variance",
        lin.quadrature_variance.relative_difference(),
        CROSS_TOLERANCE,
    ));

    let doubled = Dims::two_mode(2 * dims.cavity, 2 * dims.mechanics);
    let big = oracle::compare_with_linearized(p, doubled, &OracleOptions {
        build: optograv_core::model::BuildOptions {
            hilbert_cap: usize::MAX,
            ..opts.build
        },
        ..opts
    })?;
    let drift = |a: f64, b: f64| ((a - b) / b).abs();
    checks.push(Check::below(
        "truncation_photon_number",
        drift(lin.photon_number.oracle, big.photon_number.oracle),
        TRUNCATION_TOLERANCE,
    ));
    checks.push(Check::below(
        "truncation_homodyne_variance",
        drift(lin.quadrature_variance.oracle, big.quadrature_variance.oracle),
        TRUNCATION_TOLERANCE,
    ));

    let small = Dims::two_mode(4, 4);
    let (_, a) = oracle::steady_for_params(p, small, &opts)?;
    let te = OracleOptions {
        method: SteadyMethod::TimeEvolution,
        ..opts
    };
    let (_, b) = oracle::steady_for_params(p, small, &te)?;
    checks.push(Check::below(
        "dual_method_trace_distance",
        oracle::trace_distance(&a.rho, &b.rho)?,
        DUAL_METHOD_TOLERANCE,
    ));

    if p.lambda > 0.0 {
        let three = Dims::three_mode(
            cfg.dims.cavity.min(3),
            cfg.dims.mechanics.min(3),
            cfg.dims.auxiliary.unwrap_or(3),
        );
        let gmax = p.gamma_a.max(p.gamma_b);
        let at = |ratio: f64| -> CommandResult<f64> {
            let aux = AuxiliaryMode::for_lambda(p.lambda, ratio * gmax, AuxiliaryCoupling::Matched);
            Ok(oracle::validate_adiabatic_elimination(p, &aux, three, &opts)?.trace_distance)
        };
        let d50 = at(50.0)?;
        let d500 = at(500.0)?;
        checks.push(Check::below("elimination_distance_ratio_50", d50, ELIMINATION_TOLERANCE));
        checks.push(Check {
            name: "elimination_distance_decreases".into(),
            value: d500 / d50,
            tolerance: 1.0,
            pass: d500 < d50,
        });
    }
    Ok(checks)
}

/// Oracle cross-checks at every parameter point. The second value is true
/// when any tolerance is breached.
pub fn validate(cfg: &RunConfig) -> CommandResult<(Table, bool)> {
    let mut cfg = cfg.clone();
    cfg.preset_defaults(&VALIDATE_POINT);
    let points = cfg.points()?;
    let results: Vec<(SystemParams, Vec<Check>)> = points
        .par_iter()
        .map(|p| validate_point(&cfg, p).map(|c| (*p, c)))
        .collect::<CommandResult<_>>()?;
    let mut table = Table::new("validate/1", columns(&["check", "value", "tolerance", "pass"]));
    let mut breach = false;
    for (p, checks) in results {
        for c in checks {
            if !c.pass {
                warn!("check {} failed: {:e} vs {:e}", c.name, c.value, c.tolerance);
                breach = true;
            }
            let mut row = param_values(&p);
            row.extend([c.name.into(), c.value.into(), c.tolerance.into(), c.pass.into()]);
            table.push(row);
        }
    }
    Ok((table, breach))
}
