//! Projected explicit-Euler integration of `∂_t u = τ(u)`.

use thiserror::Error;

use crate::analysis::{ControlParams, EnergyReport, Monitor, Sample};
use crate::field::MapField;
use crate::geometry::NilmanifoldGrid;
use crate::operators::{energy_densities, stencil_abs_sum, sub_laplacian, EnergyDensities};
use crate::scalar::Scalar;
use crate::target::TargetManifold;

#[derive(Debug, Error, PartialEq)]
pub enum FlowError {
    #[error("invalid flow setting {key}: {reason}")]
    InvalidConfig { key: &'static str, reason: String },
    #[error("non-finite values after step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },
    #[error("initial map has {got} components, target {target} needs {want}")]
    ShapeMismatch {
        got: usize,
        want: usize,
        target: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig<T> {
    pub cfl_factor: T,
    pub t_max: T,
    pub tol_tau: T,
    /// Density threshold for declaring blow-up; may be infinite.
    pub rho_max: T,
    /// Steps between energy reports.
    pub cadence: usize,
}

impl<T: Scalar> FlowConfig<T> {
    pub fn validate(&self) -> Result<(), FlowError> {
        let bad = |key, reason: &str| {
            Err(FlowError::InvalidConfig {
                key,
                reason: reason.to_string(),
            })
        };
        if !(self.cfl_factor > T::zero() && self.cfl_factor <= T::one()) {
            return bad("cfl", "must lie in (0, 1]");
        }
        if !(self.t_max > T::zero()) || !self.t_max.is_finite() {
            return bad("t_max", "must be finite and > 0");
        }
        if !(self.tol_tau > T::zero()) {
            return bad("tol_tau", "must be > 0");
        }
        if !(self.rho_max > T::zero()) {
            return bad("rho_max", "must be > 0");
        }
        if self.cadence == 0 {
            return bad("cadence", "must be >= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState<T> {
    pub u: MapField<T>,
    pub t: T,
    pub step_count: usize,
}

impl<T: Scalar> FlowState<T> {
    pub fn new(u: MapField<T>) -> Self {
        Self {
            u,
            t: T::zero(),
            step_count: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    Blowup,
    Timeout,
}

impl Termination {
    pub fn label(self) -> &'static str {
        match self {
            Termination::Converged => "CONVERGED",
            Termination::Blowup => "BLOWUP",
            Termination::Timeout => "TIMEOUT",
        }
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

fn tension_with<T: Scalar>(
    grid: &NilmanifoldGrid<T>,
    target: &TargetManifold,
    u: &MapField<T>,
    densities: Option<&EnergyDensities<T>>,
) -> MapField<T> {
    let mut tau = sub_laplacian(grid, u);
    if target.is_sphere() {
        let owned;
        let dens = match densities {
            Some(d) => d,
            None => {
                owned = energy_densities(grid, u);
                &owned
            }
        };
        let nc = u.n_amb;
        for p in 0..grid.len() {
            let two_eb = T::lit(2.0) * dens.horizontal.values[p];
            for c in 0..nc {
                tau.values[p * nc + c] = tau.values[p * nc + c] + two_eb * u.values[p * nc + c];
            }
        }
    }
    tau
}

/// `Δ_b u` on flat tori; `Δ_b u + 2 e_b(u) u` on unit spheres.
pub fn tension_field<T: Scalar>(
    grid: &NilmanifoldGrid<T>,
    target: &TargetManifold,
    u: &MapField<T>,
) -> MapField<T> {
    tension_with(grid, target, u, None)
}

/// `cfl · h² / max_p Σ|stencil coefficients of h² Δ_b|`.
pub fn cfl_timestep<T: Scalar>(grid: &NilmanifoldGrid<T>, cfl_factor: T) -> T {
    let h = grid.spacing();
    let s = (0..grid.len()).fold(T::zero(), |a, p| a.max(stencil_abs_sum(grid, p)));
    cfl_factor * h * h / s
}

fn advance<T: Scalar>(
    target: &TargetManifold,
    u: &MapField<T>,
    tau: &MapField<T>,
    dt: T,
) -> MapField<T> {
    let mut next = u.axpy(dt, tau);
    target.project(&mut next);
    next
}

/// One projected Euler step.
pub fn step<T: Scalar>(
    grid: &NilmanifoldGrid<T>,
    target: &TargetManifold,
    state: &mut FlowState<T>,
    dt: T,
) -> Result<(), FlowError> {
    let tau = tension_field(grid, target, &state.u);
    let next = advance(target, &state.u, &tau, dt);
    state.step_count += 1;
    state.t = state.t + dt;
    if !next.is_finite() {
        return Err(FlowError::NonFinite {
            step: state.step_count,
            t: state.t.to_f64_lossy(),
        });
    }
    state.u = next;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct FlowOutcome<T> {
    pub reports: Vec<EnergyReport<T>>,
    pub termination: Termination,
    pub final_state: FlowState<T>,
    /// Time at which the density threshold was crossed or values went non-finite.
    pub blowup_time: Option<T>,
    pub dt: T,
}

/// Integrate until convergence, blow-up or timeout.
///
/// Reports are taken at step 0, every `cadence` steps and at termination.
/// Each report carries the realized velocity `(Π(u + dt τ) − u)/dt` of the
/// step leaving the sampled state.
pub fn run_flow<T: Scalar>(
    grid: &NilmanifoldGrid<T>,
    target: &TargetManifold,
    initial: MapField<T>,
    config: &FlowConfig<T>,
    params: &ControlParams<T>,
) -> Result<FlowOutcome<T>, FlowError> {
    config.validate()?;
    if initial.n_amb != target.ambient_dim() {
        return Err(FlowError::ShapeMismatch {
            got: initial.n_amb,
            want: target.ambient_dim(),
            target: target.to_string(),
        });
    }
    let dt_cfl = cfl_timestep(grid, config.cfl_factor);
    let t_end = config.t_max * (T::one() - T::lit(8.0) * T::epsilon());
    let mut monitor = Monitor::new(grid, *params);
    let mut state = FlowState::new(initial);
    let mut blowup_time = None;

    loop {
        let sampled = state.step_count % config.cadence == 0;
        let dens = if sampled || target.is_sphere() {
            Some(energy_densities(grid, &state.u))
        } else {
            None
        };
        let tau = tension_with(grid, target, &state.u, dens.as_ref());
        let sup_tau = tau.sup_norm();

        let mut termination = if !(state.u.is_finite() && tau.is_finite()) {
            blowup_time = Some(state.t);
            Some(Termination::Blowup)
        } else if sup_tau < config.tol_tau {
            Some(Termination::Converged)
        } else if state.t >= t_end {
            Some(Termination::Timeout)
        } else {
            None
        };
        if termination.is_none() {
            if let Some(d) = &dens {
                if d.total.max() > config.rho_max {
                    blowup_time = Some(state.t);
                    termination = Some(Termination::Blowup);
                }
            }
        }

        let dt = if termination.is_some() {
            dt_cfl
        } else {
            dt_cfl.min(config.t_max - state.t)
        };
        let next = advance(target, &state.u, &tau, dt);

        if sampled || termination.is_some() {
            let dens = match dens {
                Some(d) => d,
                None => energy_densities(grid, &state.u),
            };
            let velocity = next.axpy(-T::one(), &state.u).scaled(T::one() / dt);
            monitor.observe(Sample {
                step: state.step_count,
                t: state.t,
                densities: &dens,
                sup_tau,
                velocity: &velocity,
            });
        }

        if let Some(termination) = termination {
            return Ok(FlowOutcome {
                reports: monitor.into_reports(),
                termination,
                final_state: state,
                blowup_time,
                dt: dt_cfl,
            });
        }
        state.u = next;
        state.t = state.t + dt;
        state.step_count += 1;
    }
}
