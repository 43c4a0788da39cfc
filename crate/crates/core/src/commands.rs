//! The `run`, `sweep` and `oracle` commands.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::{
    classify_termination, default_c2, total_energies, AnalysisError, Classification, ControlParams,
};
use crate::config::{ConfigError, RunConfig};
use crate::field::MapField;
use crate::flow::{run_flow, FlowConfig, FlowError, Termination};
use crate::geometry::{GeometryError, NilmanifoldGrid};
use crate::initial::{make_initial_map, InitialError};
use crate::io::{write_snapshot, write_timeseries, FormatError, Snapshot};
use crate::operators::energy_densities;
use crate::oracle::{mode_decay, spectral_oracle, OracleError};
use crate::target::TargetManifold;
use crate::{Grid, Map, Outcome, Params};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Initial(#[from] InitialError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CommandError + '_ {
    move |source| CommandError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// A configuration resolved against its constructed initial map.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub grid: Grid,
    pub target: TargetManifold,
    pub initial: Map,
    pub params: Params,
    pub flow: FlowConfig<f64>,
    /// Whether `C2` came from the curvature default rather than the config.
    pub c2_default: bool,
    /// `sup e` of the initial map.
    pub initial_sup_e: f64,
}

pub fn prepare(config: &RunConfig) -> Result<Prepared, CommandError> {
    let grid = NilmanifoldGrid::new(config.m, config.resolution)?;
    let target = config.target;
    let initial = make_initial_map(&grid, &target, &config.initial, config.seed)?;
    let initial_sup_e = energy_densities(&grid, &initial).total.sup();
    let d = config.control.d.unwrap_or(initial_sup_e);
    let c2 = config.control.c2.unwrap_or_else(|| default_c2(&target));
    let params = match config.control.s {
        Some(s) => ControlParams::new(d, config.control.c1, c2, s)?,
        None => ControlParams::with_default_window(d, config.control.c1, c2)?,
    };
    let rho_max = config.flow.rho_max.unwrap_or(if initial_sup_e > 0.0 {
        1e4 * initial_sup_e
    } else {
        f64::INFINITY
    });
    let flow = FlowConfig {
        cfl_factor: config.flow.cfl,
        t_max: config.flow.t_max,
        tol_tau: config.flow.tol_tau,
        rho_max,
        cadence: config.flow.cadence,
    };
    flow.validate()?;
    Ok(Prepared {
        grid,
        target,
        initial,
        params,
        flow,
        c2_default: config.control.c2.is_none(),
        initial_sup_e,
    })
}

/// Convention ledger written at the top of every output.
pub fn convention_lines(config: &RunConfig, prepared: &Prepared, dt: f64) -> Vec<String> {
    let p = &prepared.params;
    vec![
        "crflow time series".to_string(),
        "levi_factor = 2 (dtheta(X, JX) = 2 for X = d/dx + y d/dt)".to_string(),
        "energy_convention = E = int e dV, E = E_b + E_0, e_b = |d_b u|^2 / 2 in the X/sqrt2, Y/sqrt2 frame".to_string(),
        format!(
            "control: D = {}, C1 = {}, C2 = {} ({}), s = {}",
            p.d,
            p.c1,
            p.c2,
            if prepared.c2_default { "default" } else { "config" },
            p.s
        ),
        format!(
            "grid: m = {}, N = {}, target = {}, family = {}, lambda = {}, seed = {}",
            config.m,
            config.resolution,
            config.target,
            config.initial.family.name(),
            config.initial.lambda,
            config.seed
        ),
        format!(
            "flow: dt = {dt}, cfl = {}, t_max = {}, tol_tau = {}, rho_max = {}, cadence = {}",
            prepared.flow.cfl_factor, prepared.flow.t_max, prepared.flow.tol_tau, prepared.flow.rho_max, prepared.flow.cadence
        ),
    ]
}

fn create(path: &Path) -> Result<BufWriter<File>, CommandError> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn save_snapshot(
    path: &Path,
    config: &RunConfig,
    t: f64,
    field: &MapField<f64>,
) -> Result<(), CommandError> {
    let mut w = create(path)?;
    let snap = Snapshot {
        m: config.m,
        resolution: config.resolution,
        t,
        field: field.clone(),
    };
    write_snapshot(&mut w, &snap)?;
    w.flush().map_err(io_err(path))
}

fn save_timeseries(
    path: &Path,
    comments: &[String],
    outcome: &Outcome,
) -> Result<(), CommandError> {
    let mut w = create(path)?;
    write_timeseries(&mut w, comments, &outcome.reports).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

fn fmt_opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "n/a".into())
}

pub fn summary_text(
    config: &RunConfig,
    prepared: &Prepared,
    outcome: &Outcome,
    c: &Classification<f64>,
) -> String {
    let mut s = String::new();
    for line in convention_lines(config, prepared, outcome.dt) {
        let _ = writeln!(s, "# {line}");
    }
    let e0 = outcome.reports.first();
    let _ = writeln!(s, "termination = {}", c.termination);
    let _ = writeln!(s, "steps = {}", c.steps);
    let _ = writeln!(s, "final_time = {}", c.final_time);
    let _ = writeln!(s, "final_sup_tau = {}", c.final_sup_tau);
    let _ = writeln!(s, "initial_E_b = {}", fmt_opt(e0.map(|r| r.e_b)));
    let _ = writeln!(s, "initial_sup_e = {}", prepared.initial_sup_e);
    let _ = writeln!(s, "rho = {}", c.rho);
    let _ = writeln!(
        s,
        "m_at_least_2 = {}",
        prepared.grid.within_existence_hypothesis()
    );
    let _ = writeln!(
        s,
        "existence_horizon = {}",
        crate::analysis::existence_horizon(&prepared.params)
    );
    let _ = writeln!(s, "density_bound_samples = {}", c.bound_samples);
    let _ = writeln!(s, "density_bound_holds = {}", c.bound_holds);
    let _ = writeln!(s, "tail_sup_ut_decreasing = {}", c.tail_ut_decreasing);
    let _ = writeln!(s, "x0 = {}", fmt_opt(c.x0));
    let _ = writeln!(s, "rho_below_x0 = {}", fmt_opt(c.rho_below_x0));
    let _ = writeln!(s, "blowup_time = {}", fmt_opt(c.blowup_time));
    let _ = writeln!(s, "bochner_violations = {}", c.bochner_violations);
    let _ = writeln!(
        s,
        "max_vertical_control_ratio = {}",
        fmt_opt(c.max_vertical_ratio)
    );
    s
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub outcome: Outcome,
    pub classification: Classification<f64>,
    pub summary: String,
}

/// Run one flow and write `timeseries.csv`, `initial.snap`, `final.snap`, `summary.txt`.
pub fn command_run(config: &RunConfig, out: &Path) -> Result<RunResult, CommandError> {
    let prepared = prepare(config)?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    save_snapshot(&out.join("initial.snap"), config, 0.0, &prepared.initial)?;
    let outcome = run_flow(
        &prepared.grid,
        &prepared.target,
        prepared.initial.clone(),
        &prepared.flow,
        &prepared.params,
    )?;
    let classification = classify_termination(&outcome, &prepared.params);
    save_timeseries(
        &out.join("timeseries.csv"),
        &convention_lines(config, &prepared, outcome.dt),
        &outcome,
    )?;
    save_snapshot(
        &out.join("final.snap"),
        config,
        outcome.final_state.t,
        &outcome.final_state.u,
    )?;
    let summary = summary_text(config, &prepared, &outcome, &classification);
    let path = out.join("summary.txt");
    fs::write(&path, &summary).map_err(io_err(&path))?;
    Ok(RunResult {
        outcome,
        classification,
        summary,
    })
}

/// `A:B:K`: `K` evenly spaced values from `A` to `B` inclusive.
pub fn parse_lambda_grid(spec: &str) -> Result<Vec<f64>, CommandError> {
    let usage = || {
        CommandError::Usage(format!(
            "lambda grid must be A:B:K with A <= B and K >= 1 (got {spec:?})"
        ))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(usage());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| usage())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| usage())?;
    let k: usize = parts[2].trim().parse().map_err(|_| usage())?;
    if k == 0 || !(a <= b) || !(a >= 0.0) || !b.is_finite() || (k == 1 && a != b) {
        return Err(usage());
    }
    if k == 1 {
        return Ok(vec![a]);
    }
    Ok((0..k)
        .map(|i| (a * (k - 1 - i) as f64 + b * i as f64) / (k - 1) as f64)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub initial_e_b: f64,
    pub initial_sup_e: f64,
    pub d: f64,
    pub c2: f64,
    pub termination: Termination,
    pub steps: usize,
    pub final_time: f64,
    pub final_sup_tau: f64,
    pub rho: f64,
    pub max_vertical_ratio: Option<f64>,
    pub bound_holds: bool,
    pub bound_samples: usize,
    pub tail_ut_decreasing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Largest `λ` of the converged prefix.
    pub lambda_star: Option<f64>,
    pub e_b_star: Option<f64>,
    /// Smallest `λ` that did not converge.
    pub first_failure: Option<f64>,
    /// Whether the classes form a converged prefix followed by failures only.
    pub monotone: bool,
}

pub const SWEEP_COLUMNS: &str = "lambda,E_b_initial,sup_e_initial,D,C2,termination,steps,final_t,final_sup_tau,rho,max_vertical_control_ratio,density_bound_holds,density_bound_samples,tail_sup_ut_decreasing";

/// Rerun the flow from scratch for each `λ`; writes `sweep.csv`,
/// `sweep_summary.txt` and one `lambda_<i>/timeseries.csv` per row.
pub fn command_sweep(
    config: &RunConfig,
    lambdas: &[f64],
    out: &Path,
) -> Result<SweepResult, CommandError> {
    if lambdas.is_empty() || lambdas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(CommandError::Usage(
            "lambda grid must be strictly increasing".into(),
        ));
    }
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut rows = Vec::with_capacity(lambdas.len());
    for (i, &lambda) in lambdas.iter().enumerate() {
        let mut cfg = config.clone();
        cfg.initial.lambda = lambda;
        let prepared = prepare(&cfg)?;
        let initial_e_b = total_energies(&prepared.grid, &prepared.initial).horizontal;
        let outcome = run_flow(
            &prepared.grid,
            &prepared.target,
            prepared.initial.clone(),
            &prepared.flow,
            &prepared.params,
        )?;
        let c = classify_termination(&outcome, &prepared.params);
        let dir = out.join(format!("lambda_{i}"));
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        save_timeseries(
            &dir.join("timeseries.csv"),
            &convention_lines(&cfg, &prepared, outcome.dt),
            &outcome,
        )?;
        rows.push(SweepRow {
            lambda,
            initial_e_b,
            initial_sup_e: prepared.initial_sup_e,
            d: prepared.params.d,
            c2: prepared.params.c2,
            termination: c.termination,
            steps: c.steps,
            final_time: c.final_time,
            final_sup_tau: c.final_sup_tau,
            rho: c.rho,
            max_vertical_ratio: c.max_vertical_ratio,
            bound_holds: c.bound_holds,
            bound_samples: c.bound_samples,
            tail_ut_decreasing: c.tail_ut_decreasing,
        });
    }
    let prefix = rows
        .iter()
        .take_while(|r| r.termination == Termination::Converged)
        .count();
    let lambda_star = prefix.checked_sub(1).map(|i| rows[i].lambda);
    let e_b_star = prefix.checked_sub(1).map(|i| rows[i].initial_e_b);
    let first_failure = rows.get(prefix).map(|r| r.lambda);
    let monotone = rows[prefix..]
        .iter()
        .all(|r| r.termination != Termination::Converged);
    let result = SweepResult {
        rows,
        lambda_star,
        e_b_star,
        first_failure,
        monotone,
    };

    let path = out.join("sweep.csv");
    let mut w = create(&path)?;
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(
            w,
            "# crflow sweep: family = {}, target = {}, m = {}, N = {}",
            config.initial.family.name(),
            config.target,
            config.m,
            config.resolution
        )?;
        writeln!(w, "{SWEEP_COLUMNS}")?;
        for r in &result.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.lambda,
                r.initial_e_b,
                r.initial_sup_e,
                r.d,
                r.c2,
                r.termination,
                r.steps,
                r.final_time,
                r.final_sup_tau,
                r.rho,
                r.max_vertical_ratio
                    .map(|v| v.to_string())
                    .unwrap_or_default(),
                r.bound_holds,
                r.bound_samples,
                r.tail_ut_decreasing
            )?;
        }
        w.flush()
    };
    write(&mut w).map_err(io_err(&path))?;
    let path = out.join("sweep_summary.txt");
    fs::write(&path, sweep_summary(&result)).map_err(io_err(&path))?;
    Ok(result)
}

pub fn sweep_summary(result: &SweepResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "lambda_star = {}", fmt_opt(result.lambda_star));
    let _ = writeln!(s, "E_b_at_lambda_star = {}", fmt_opt(result.e_b_star));
    let _ = writeln!(
        s,
        "first_non_converged_lambda = {}",
        fmt_opt(result.first_failure)
    );
    let _ = writeln!(s, "classes_monotone = {}", result.monotone);
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    pub t: f64,
    pub steps: usize,
    pub dt: f64,
    pub decay: f64,
    pub sup_error: f64,
}

/// Integrate a flat single-mode configuration to time `t` and compare with
/// the closed-form solution.
pub fn command_oracle(config: &RunConfig, t: f64) -> Result<OracleComparison, CommandError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(CommandError::Usage(format!(
            "--t must be finite and > 0 (got {t})"
        )));
    }
    let prepared = prepare(config)?;
    let exact = spectral_oracle(&prepared.grid, &prepared.target, &config.initial, t)?;
    let flow = FlowConfig {
        t_max: t,
        tol_tau: f64::MIN_POSITIVE,
        rho_max: f64::INFINITY,
        ..prepared.flow
    };
    let outcome = run_flow(
        &prepared.grid,
        &prepared.target,
        prepared.initial,
        &flow,
        &prepared.params,
    )?;
    let modes = crate::initial::mode_vector(&prepared.grid, &config.initial)?;
    Ok(OracleComparison {
        t: outcome.final_state.t,
        steps: outcome.final_state.step_count,
        dt: outcome.dt,
        decay: mode_decay(&modes, t),
        sup_error: outcome.final_state.u.sup_distance(&exact),
    })
}
