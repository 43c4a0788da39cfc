//! Energy reports, runtime residual monitors and the gradient oracle.

use super::{comparison_bounds, threshold_constants, ControlParams};
use crate::field::{MapField, ScalarField};
use crate::flow::{tension_field, FlowOutcome, Termination};
use crate::geometry::NilmanifoldGrid;
use crate::operators::{
    energy_densities, energy_densities_with, sub_laplacian_scalar, EnergyDensities,
};
use crate::scalar::Scalar;
use crate::target::TargetManifold;

/// `c_B` in `tol_B = c_B (h² + Δt)(sup|Δ_b e| + sup|∂_t e|)`.
pub const BOCHNER_TOLERANCE_FACTOR: f64 = 10.0;

/// `(E, E_b, E_0)` with `E = ∫ e dV`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energies<T> {
    pub total: T,
    pub horizontal: T,
    pub vertical: T,
}

fn energies_of<T: Scalar>(grid: &NilmanifoldGrid<T>, d: &EnergyDensities<T>) -> Energies<T> {
    Energies {
        total: d.total.integral(grid),
        horizontal: d.horizontal.integral(grid),
        vertical: d.vertical.integral(grid),
    }
}

pub fn total_energies<T: Scalar>(grid: &NilmanifoldGrid<T>, u: &MapField<T>) -> Energies<T> {
    energies_of(grid, &energy_densities(grid, u))
}

/// One row of the time series.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport<T> {
    pub step: usize,
    pub t: T,
    pub energy: T,
    pub e_b: T,
    pub e_0: T,
    pub sup_e: T,
    pub sup_e_b: T,
    pub sup_e_0: T,
    pub sup_tau: T,
    pub sup_ut: T,
    /// `∫ |u_t|² dV` of the sampled velocity.
    pub ut_sq_integral: T,
    /// Running supremum of `sup e` up to this report.
    pub rho: T,
    pub dissipation_residual: Option<T>,
    pub bochner_min_residual: Option<T>,
    pub bochner_tol: Option<T>,
    pub g_bound: Option<T>,
    pub vertical_control_ratio: Option<T>,
    pub mean_value_ratio: Option<T>,
}

/// Snapshot handed to the monitor at a report step.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a, T> {
    pub step: usize,
    pub t: T,
    pub densities: &'a EnergyDensities<T>,
    pub sup_tau: T,
    pub velocity: &'a MapField<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BochnerResidual<T> {
    pub field: ScalarField<T>,
    pub min: T,
    pub tol: T,
}

/// `r = Δ_b e − (e − e_prev)/dt + C1 e + C2 e²` at the later sample.
pub fn bochner_residual<T: Scalar>(
    grid: &NilmanifoldGrid<T>,
    e_prev: &ScalarField<T>,
    e_next: &ScalarField<T>,
    dt: T,
    params: &ControlParams<T>,
) -> BochnerResidual<T> {
    let lap = sub_laplacian_scalar(grid, e_next);
    let mut sup_dt = T::zero();
    let values: Vec<T> = (0..grid.len())
        .map(|p| {
            let e = e_next.values[p];
            let de = (e - e_prev.values[p]) / dt;
            sup_dt = sup_dt.max(de.abs());
            lap.values[p] - de + params.c1 * e + params.c2 * e * e
        })
        .collect();
    let h = grid.spacing();
    let tol = T::lit(BOCHNER_TOLERANCE_FACTOR) * (h * h + dt) * (lap.sup() + sup_dt);
    let field = ScalarField { values };
    let min = field.min();
    BochnerResidual { field, min, tol }
}

/// `∫_a^b w(s) f(s) ds` for samples `(s_i, f_i)` of a piecewise-linear `f`,
/// by the trapezoid rule on the sample intervals clipped to `[a, b]`.
pub fn integrate_samples<T: Scalar>(samples: &[(T, T)], a: T, b: T, w: impl Fn(T) -> T) -> T {
    let mut acc = T::zero();
    for pair in samples.windows(2) {
        let ((s0, f0), (s1, f1)) = (pair[0], pair[1]);
        let lo = s0.max(a);
        let hi = s1.min(b);
        if !(hi > lo) {
            continue;
        }
        let lerp = |s: T| f0 + (f1 - f0) * (s - s0) / (s1 - s0);
        acc = acc + T::lit(0.5) * (hi - lo) * (w(lo) * lerp(lo) + w(hi) * lerp(hi));
    }
    acc
}

/// Accumulates reports and evaluates the window monitors.
#[derive(Debug)]
pub struct Monitor<'g, T> {
    grid: &'g NilmanifoldGrid<T>,
    params: ControlParams<T>,
    reports: Vec<EnergyReport<T>>,
    prev_density: Option<ScalarField<T>>,
    /// `(t, E)` and `(t, E_0)` per report.
    energy_trace: Vec<(T, T)>,
    vertical_trace: Vec<(T, T)>,
    rho: T,
}

impl<'g, T: Scalar> Monitor<'g, T> {
    pub fn new(grid: &'g NilmanifoldGrid<T>, params: ControlParams<T>) -> Self {
        Self {
            grid,
            params,
            reports: Vec::new(),
            prev_density: None,
            energy_trace: Vec::new(),
            vertical_trace: Vec::new(),
            rho: T::zero(),
        }
    }

    pub fn reports(&self) -> &[EnergyReport<T>] {
        &self.reports
    }

    pub fn into_reports(self) -> Vec<EnergyReport<T>> {
        self.reports
    }

    pub fn observe(&mut self, sample: Sample<'_, T>) -> &EnergyReport<T> {
        let grid = self.grid;
        let d = sample.densities;
        let en = energies_of(grid, d);
        let sup_e = d.total.sup();
        self.rho = self.rho.max(sup_e);
        let t = sample.t;
        let ut_sq = sample
            .velocity
            .norms()
            .values
            .iter()
            .fold(T::zero(), |a, &v| a + v * v)
            * grid.cell_weight();

        let (dissipation, bochner) = match self.reports.last() {
            Some(prev) if t > prev.t => {
                let span = t - prev.t;
                let eb0 = self.reports[0].e_b;
                let rate = (en.horizontal - prev.e_b) / span;
                let flux = T::lit(0.5) * (ut_sq + prev.ut_sq_integral);
                let dis = (rate + flux).abs() / eb0.max(T::one());
                let b = self
                    .prev_density
                    .as_ref()
                    .map(|e_prev| bochner_residual(grid, e_prev, &d.total, span, &self.params));
                (Some(dis), b)
            }
            _ => (None, None),
        };

        self.energy_trace.push((t, en.total));
        self.vertical_trace.push((t, en.vertical));
        let s = self.params.s;
        let (vertical_ratio, mean_ratio) = if t >= s && t > T::zero() {
            let eb0 = self.reports.first().map_or(en.horizontal, |r| r.e_b);
            let num = integrate_samples(&self.vertical_trace, t - s, t, |_| T::one());
            let denom = (T::one() + self.rho) * eb0;
            let vertical = if num == T::zero() {
                Some(T::zero())
            } else if denom > T::zero() {
                Some(num / denom)
            } else {
                None
            };
            let k = self.params.c1 + self.params.c2 * self.rho;
            let mass = integrate_samples(&self.energy_trace, t - s, t, |r| (k * (t - r)).exp());
            let mean = if mass > T::zero() {
                Some(sup_e / mass)
            } else if sup_e == T::zero() {
                Some(T::zero())
            } else {
                None
            };
            (vertical, mean)
        } else {
            (None, None)
        };

        self.reports.push(EnergyReport {
            step: sample.step,
            t,
            energy: en.total,
            e_b: en.horizontal,
            e_0: en.vertical,
            sup_e,
            sup_e_b: d.horizontal.sup(),
            sup_e_0: d.vertical.sup(),
            sup_tau: sample.sup_tau,
            sup_ut: sample.velocity.sup_norm(),
            ut_sq_integral: ut_sq,
            rho: self.rho,
            dissipation_residual: dissipation,
            bochner_min_residual: bochner.as_ref().map(|b| b.min),
            bochner_tol: bochner.as_ref().map(|b| b.tol),
            g_bound: comparison_bounds(&self.params, t).g,
            vertical_control_ratio: vertical_ratio,
            mean_value_ratio: mean_ratio,
        });
        self.prev_density = Some(d.total.clone());
        self.reports.last().expect("just pushed")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheck<T> {
    /// `[E_b(Π(u+δv)) − E_b(Π(u−δv))]/(2δ)`.
    pub finite_difference: T,
    /// `−∫⟨τ(u), v⟩ dV`.
    pub analytic: T,
    pub relative_error: T,
}

pub fn gradient_check<T: Scalar>(
    grid: &NilmanifoldGrid<T>,
    target: &TargetManifold,
    u: &MapField<T>,
    v: &MapField<T>,
    delta: T,
) -> GradientCheck<T> {
    gradient_check_with(
        grid,
        target,
        u,
        v,
        delta,
        T::lit(crate::operators::HORIZONTAL_DENSITY_FACTOR),
    )
}

/// Gradient check against an energy with the given horizontal density factor.
pub fn gradient_check_with<T: Scalar>(
    grid: &NilmanifoldGrid<T>,
    target: &TargetManifold,
    u: &MapField<T>,
    v: &MapField<T>,
    delta: T,
    horizontal_factor: T,
) -> GradientCheck<T> {
    let e_b = |w: MapField<T>| {
        let mut w = w;
        target.project(&mut w);
        energy_densities_with(grid, &w, horizontal_factor)
            .horizontal
            .integral(grid)
    };
    let fd = (e_b(u.axpy(delta, v)) - e_b(u.axpy(-delta, v))) / (T::lit(2.0) * delta);
    let analytic = -tension_field(grid, target, u).inner(v, grid);
    let scale = fd.abs().max(analytic.abs());
    let relative_error = if scale == T::zero() {
        T::zero()
    } else {
        (fd - analytic).abs() / scale
    };
    GradientCheck {
        finite_difference: fd,
        analytic,
        relative_error,
    }
}

/// Run label plus the bound annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification<T> {
    pub termination: Termination,
    pub steps: usize,
    pub final_time: T,
    pub final_sup_tau: T,
    pub rho: T,
    /// Reports with `t < T_0` that were compared against `g(t)`.
    pub bound_samples: usize,
    /// Whether `sup e ≤ g(t)` held at all of them.
    pub bound_holds: bool,
    /// `sup|u_t|` nonincreasing over the last reports.
    pub tail_ut_decreasing: bool,
    pub x0: Option<T>,
    pub rho_below_x0: Option<bool>,
    pub blowup_time: Option<T>,
    pub bochner_violations: usize,
    pub max_vertical_ratio: Option<T>,
}

const TAIL_REPORTS: usize = 5;

pub fn classify_termination<T: Scalar>(
    outcome: &FlowOutcome<T>,
    params: &ControlParams<T>,
) -> Classification<T> {
    let reports = &outcome.reports;
    let slack = T::one() + T::lit(1e-12);
    let mut bound_samples = 0;
    let mut bound_holds = true;
    for r in reports {
        if let Some(g) = comparison_bounds(params, r.t).g {
            bound_samples += 1;
            bound_holds &= r.sup_e <= g * slack;
        }
    }
    let tail = &reports[reports.len().saturating_sub(TAIL_REPORTS)..];
    let tail_ut_decreasing = tail.windows(2).all(|w| w[1].sup_ut <= w[0].sup_ut);
    let rho = reports.iter().fold(T::zero(), |a, r| a.max(r.sup_e));
    let x0 = threshold_constants(params).ok().map(|th| th.x0);
    let bochner_violations = reports
        .iter()
        .filter(
            |r| matches!((r.bochner_min_residual, r.bochner_tol), (Some(m), Some(tol)) if m < -tol),
        )
        .count();
    let max_vertical_ratio = reports
        .iter()
        .filter_map(|r| r.vertical_control_ratio)
        .fold(None, |a: Option<T>, v| Some(a.map_or(v, |a| a.max(v))));
    let last = reports.last();
    Classification {
        termination: outcome.termination,
        steps: outcome.final_state.step_count,
        final_time: outcome.final_state.t,
        final_sup_tau: last.map_or(T::zero(), |r| r.sup_tau),
        rho,
        bound_samples,
        bound_holds,
        tail_ut_decreasing,
        x0,
        rho_below_x0: x0.map(|x| rho < x),
        blowup_time: outcome.blowup_time,
        bochner_violations,
        max_vertical_ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{run_flow, FlowConfig};
    use std::f64::consts::PI;

    fn grid(n: usize) -> NilmanifoldGrid<f64> {
        NilmanifoldGrid::new(1, n).unwrap()
    }

    fn equator(g: &NilmanifoldGrid<f64>) -> MapField<f64> {
        MapField::from_fn(g, 3, |z| {
            vec![(2.0 * PI * z[0]).cos(), (2.0 * PI * z[0]).sin(), 0.0]
        })
    }

    #[test]
    fn equator_energies() {
        for n in [16, 32] {
            let g = grid(n);
            let en = total_energies(&g, &equator(&g));
            let h = 1.0 / n as f64;
            assert!((en.horizontal - 2.0 * PI * PI).abs() < 2.0 * PI.powi(4) * h * h / 3.0 + 1e-12);
            assert_eq!(en.vertical, 0.0);
            assert_eq!(en.total, en.horizontal + en.vertical);
        }
    }

    #[test]
    fn energies_are_quadratic() {
        let g = grid(8);
        let u = MapField::from_fn(&g, 1, |z| {
            vec![(2.0 * PI * (z[2] - z[0] * z[1])).sin() * z[0].cos()]
        });
        let a = total_energies(&g, &u);
        let b = total_energies(&g, &u.scaled(3.0));
        assert!((b.total - 9.0 * a.total).abs() < 1e-12 * b.total);
        assert!((b.horizontal - 9.0 * a.horizontal).abs() < 1e-12 * b.horizontal);
        assert!((b.vertical - 9.0 * a.vertical).abs() < 1e-12 * b.vertical);
        assert_eq!(
            total_energies(&g, &MapField::constant(&g, &[2.0])).total,
            0.0
        );
    }

    #[test]
    fn window_integral_of_a_constant_density() {
        // φ ≡ c on a volume-2 manifold over a window of length 1
        let c = 0.7;
        let samples: Vec<_> = (0..=20).map(|i| (0.1 * i as f64, 2.0 * c)).collect();
        let mass = integrate_samples(&samples, 1.0, 2.0, |_| 1.0);
        assert!((c / mass - 0.5).abs() < 1e-14);
    }

    #[test]
    fn window_integral_interpolates_inside_intervals() {
        let samples: [(f64, f64); 3] = [(0.0, 0.0), (1.0, 1.0), (3.0, 3.0)];
        assert!(
            (integrate_samples(&samples, 0.5, 2.0, |_| 1.0) - (4.0 - 0.25) / 2.0).abs() < 1e-15
        );
        assert_eq!(integrate_samples(&samples, 5.0, 6.0, |_| 1.0), 0.0);
    }

    #[test]
    fn zero_variation_gives_zero_error() {
        let g = grid(8);
        let u = equator(&g);
        let check = gradient_check(
            &g,
            &TargetManifold::sphere(2),
            &u,
            &MapField::zeros(&g, 3),
            1e-4,
        );
        assert_eq!(check.relative_error, 0.0);
        assert_eq!(check.analytic, 0.0);
    }

    #[test]
    fn equator_is_critical() {
        let g = grid(16);
        let u = equator(&g);
        // tangent variation along e3 with t-dependence
        let v = MapField::from_fn(&g, 3, |z| {
            vec![0.0, 0.0, (2.0 * PI * (z[2] - z[0] * z[1])).cos()]
        });
        let check = gradient_check(&g, &TargetManifold::sphere(2), &u, &v, 1e-4);
        assert!(check.analytic.abs() < 1e-10);
        assert!(check.finite_difference.abs() < 1e-6);
    }

    #[test]
    fn report_consistency() {
        let g = grid(8);
        let target = TargetManifold::sphere(2);
        let mut u = MapField::from_fn(&g, 3, |z| {
            vec![
                0.2 * (2.0 * PI * z[0]).sin(),
                0.1 * (2.0 * PI * (z[2] - z[0] * z[1])).cos(),
                1.0,
            ]
        });
        target.project(&mut u);
        let cfg = FlowConfig {
            cfl_factor: 0.9,
            t_max: 0.2,
            tol_tau: 1e-4,
            rho_max: f64::INFINITY,
            cadence: 5,
        };
        let params = ControlParams::new(2.0, 0.0, 4.0, 0.003).unwrap();
        let out = run_flow(&g, &target, u, &cfg, &params).unwrap();
        let mut rho = 0.0f64;
        for r in &out.reports {
            assert!((r.energy - r.e_b - r.e_0).abs() <= 1e-14 * r.energy);
            rho = rho.max(r.sup_e);
            assert_eq!(r.rho, rho);
        }
        let c = classify_termination(&out, &params);
        assert_eq!(c.rho, rho);
        assert!(c.bound_samples > 0 && c.bound_holds);
        assert!(out
            .reports
            .iter()
            .skip(1)
            .all(|r| r.dissipation_residual.is_some()));
        assert!(out.reports.iter().any(|r| r.mean_value_ratio.is_some()));
    }
}
