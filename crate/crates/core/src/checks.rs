//! Self-checks behind `crflow check`.

use std::f64::consts::PI;
use std::time::Instant;

use crate::analysis::{
    comparison_bounds, gradient_check, gradient_check_with, threshold_constants, ControlParams,
};
use crate::field::MapField;
use crate::field::ScalarField;
use crate::flow::{cfl_timestep, run_flow, step, tension_field, FlowConfig, FlowState};
use crate::geometry::{wrap_index, Axis, NilmanifoldGrid, Step};
use crate::initial::{lattice_bump, Family, InitialSpec};
use crate::io::{read_snapshot, write_snapshot, Snapshot};
use crate::operators::{commutator_defect, sub_laplacian_scalar};
use crate::oracle::spectral_oracle;
use crate::target::TargetManifold;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn grid(m: usize, n: usize) -> NilmanifoldGrid<f64> {
    NilmanifoldGrid::new(m, n).expect("valid grid")
}

/// A smooth sphere-valued map with `t` dependence and a tangent variation.
pub fn smooth_sphere_pair(g: &NilmanifoldGrid<f64>) -> (MapField<f64>, MapField<f64>) {
    let m = g.cr_dim();
    let s2 = TargetManifold::sphere(2);
    let mut u = MapField::from_fn(g, 3, |z| {
        vec![
            0.4 * (2.0 * PI * z[0]).sin() + 0.3 * lattice_bump(z, m),
            0.3 * (2.0 * PI * z[1]).cos(),
            1.0,
        ]
    });
    s2.project(&mut u);
    let w = MapField::from_fn(g, 3, |z| {
        vec![
            (2.0 * PI * (z[0] + z[1])).cos(),
            lattice_bump(z, m),
            (2.0 * PI * z[1]).sin(),
        ]
    });
    let mut v = w.clone();
    for p in 0..g.len() {
        let dot: f64 = (0..3).map(|c| w.at(p)[c] * u.at(p)[c]).sum();
        for c in 0..3 {
            v.at_mut(p)[c] = w.at(p)[c] - dot * u.at(p)[c];
        }
    }
    (u, v)
}

fn check(name: &'static str, f: impl FnOnce() -> (bool, String)) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = f();
    CheckResult {
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn flat_mode_error(n: usize, t: f64) -> f64 {
    let g = grid(1, n);
    let target = TargetManifold::torus(1);
    let spec = InitialSpec::new(Family::TorusMode, 1.0);
    let initial = crate::initial::make_initial_map(&g, &target, &spec, 0).expect("flat mode");
    let exact = spectral_oracle(&g, &target, &spec, t).expect("flat oracle");
    let cfg = FlowConfig {
        cfl_factor: 0.5,
        t_max: t,
        tol_tau: f64::MIN_POSITIVE,
        rho_max: f64::INFINITY,
        cadence: 1000,
    };
    let params = ControlParams::with_default_window(1.0, 0.0, 1.0).expect("params");
    let out = run_flow(&g, &target, initial, &cfg, &params).expect("flow");
    out.final_state.u.sup_distance(&exact)
}

pub fn quick_checks() -> Vec<CheckResult> {
    vec![
        check("lattice wraps", || {
            let a = wrap_index(8, 1, &[7, 3, 5], Axis::X(0), Step::Forward);
            let b = wrap_index(8, 1, &[2, 7, 5], Axis::Y(0), Step::Forward);
            (
                a == [0, 3, 0] && b == [2, 0, 3],
                format!("(7,3,5)+x -> {a:?}, (2,7,5)+y -> {b:?}"),
            )
        }),
        check("total volume", || {
            let (v1, v2) = (grid(1, 4).total_volume(), grid(2, 4).total_volume());
            (
                (v1 - 2.0).abs() < 1e-12 && (v2 - 8.0).abs() < 1e-12,
                format!("m=1: {v1}, m=2: {v2}"),
            )
        }),
        check("time step anchor", || {
            let dt = cfl_timestep(&grid(1, 16), 0.5);
            let c = 15.0 / 16.0;
            let want = 0.5 / (256.0 * (4.0 + 4.0 * c * c + 2.0 * c));
            ((dt - want).abs() < 1e-16, format!("dt = {dt:e}"))
        }),
        check("fixed points", || {
            let g = grid(1, 16);
            let s2 = TargetManifold::sphere(2);
            let c = tension_field(&g, &s2, &MapField::constant(&g, &[0.6, 0.0, 0.8])).sup_norm();
            let eq = MapField::from_fn(&g, 3, |z| {
                vec![(2.0 * PI * z[0]).cos(), (2.0 * PI * z[0]).sin(), 0.0]
            });
            let e = tension_field(&g, &s2, &eq).sup_norm();
            (
                c == 0.0 && e < 1e-10,
                format!("constant {c:e}, equator {e:e}"),
            )
        }),
        check("gradient consistency", || {
            let g = grid(1, 16);
            let (u, v) = smooth_sphere_pair(&g);
            let r = gradient_check(&g, &TargetManifold::sphere(2), &u, &v, 1e-4);
            (
                r.relative_error < 1e-3,
                format!("relative error {:e}", r.relative_error),
            )
        }),
        check("gradient gate catches a wrong density factor", || {
            let g = grid(1, 16);
            let (u, v) = smooth_sphere_pair(&g);
            let r = gradient_check_with(&g, &TargetManifold::sphere(2), &u, &v, 1e-4, 0.3);
            (
                r.relative_error > 1e-3,
                format!("relative error with factor 0.3: {:e}", r.relative_error),
            )
        }),
        check("threshold formulas", || {
            let p = ControlParams::new(1.0, 0.0, 1.0, 0.1).expect("params");
            let th = threshold_constants(&p).expect("thresholds");
            let g = comparison_bounds(&p, th.t0_double).g.unwrap_or(f64::NAN);
            let ok = (th.s_max - 1.0 / 6.0).abs() < 1e-15 && (g - 2.0).abs() < 1e-14;
            (ok, format!("s_max = {}, g(t0) = {g}", th.s_max))
        }),
        check("sphere constraint", || {
            let g = grid(1, 8);
            let s2 = TargetManifold::sphere(2);
            let (u, _) = smooth_sphere_pair(&g);
            let mut state = FlowState::new(u);
            let dt = cfl_timestep(&g, 0.9);
            let mut worst = 0.0f64;
            for _ in 0..20 {
                step(&g, &s2, &mut state, dt).expect("finite step");
                worst = worst.max(s2.constraint_defect(&state.u));
            }
            (
                worst < 4.0 * f64::EPSILON,
                format!("max ||u|-1| = {worst:e}"),
            )
        }),
        check("snapshot round trip", || {
            let g = grid(1, 6);
            let (u, _) = smooth_sphere_pair(&g);
            let snap = Snapshot {
                m: 1,
                resolution: 6,
                t: 0.1,
                field: u,
            };
            let mut a = Vec::new();
            write_snapshot(&mut a, &snap).expect("write");
            let back = read_snapshot(a.as_slice()).expect("read");
            let mut b = Vec::new();
            write_snapshot(&mut b, &back).expect("write");
            (a == b, format!("{} bytes", a.len()))
        }),
        check("flat oracle, short time", || {
            let err = flat_mode_error(16, 0.01);
            (err < 1e-2, format!("sup error {err:e} at N=16, t=0.01"))
        }),
    ]
}

pub fn full_checks() -> Vec<CheckResult> {
    let mut out = quick_checks();
    out.push(check(
        "sub-Laplacian second order on t-dependent data",
        || {
            let errs: Vec<f64> = [16, 32]
                .iter()
                .map(|&n| {
                    let g = grid(1, n);
                    let f = ScalarField::from_fn(&g, |z| lattice_bump(z, 1));
                    let lap = sub_laplacian_scalar(&g, &f);
                    let exact = ScalarField::from_fn(&g, bump_sub_laplacian);
                    lap.values
                        .iter()
                        .zip(&exact.values)
                        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
                })
                .collect();
            let ratio = errs[0] / errs[1];
            (
                ratio > 3.3 && ratio < 4.7,
                format!(
                    "errors {:.3e} and {:.3e}, ratio {ratio:.2}",
                    errs[0], errs[1]
                ),
            )
        },
    ));
    out.push(check(
        "commutator defect second order in the interior",
        || {
            let d: Vec<_> = [16, 32]
                .iter()
                .map(|&n| {
                    let g = grid(1, n);
                    commutator_defect(&g, &MapField::from_fn(&g, 1, |z| vec![lattice_bump(z, 1)]))
                })
                .collect();
            let (ri, rl) = (d[0].interior_sup / d[1].interior_sup, d[0].l1 / d[1].l1);
            let ok = ri > 3.3 && ri < 4.7 && rl > 3.3 && rl < 4.7;
            (
                ok,
                format!(
                    "interior ratio {ri:.2}, L1 ratio {rl:.2}, face ratio {:.2}",
                    d[0].sup / d[1].sup
                ),
            )
        },
    ));
    out.push(check("flat oracle refinement", || {
        let (a, b) = (flat_mode_error(32, 0.1), flat_mode_error(64, 0.1));
        (
            a <= 1e-2 && a / b > 3.3 && a / b < 4.7,
            format!("N=32: {a:e}, N=64: {b:e}, ratio {:.2}", a / b),
        )
    }));
    out.push(check("dissipation identity", || {
        let g = grid(1, 32);
        let target = TargetManifold::torus(1);
        let u = MapField::from_fn(&g, 1, |z| vec![(2.0 * PI * z[0]).sin()]);
        let cfg = FlowConfig {
            cfl_factor: 0.5,
            t_max: 0.1,
            tol_tau: 1e-4,
            rho_max: f64::INFINITY,
            cadence: 1,
        };
        let params = ControlParams::with_default_window(2.0 * PI * PI, 0.0, 1.0).expect("params");
        let r = run_flow(&g, &target, u, &cfg, &params).expect("flow");
        let worst = r
            .reports
            .iter()
            .filter_map(|r| r.dissipation_residual)
            .fold(0.0f64, f64::max);
        let bochner = r.reports.iter().all(|r| {
            matches!((r.bochner_min_residual, r.bochner_tol), (Some(m), Some(t)) if m >= -t)
                || r.bochner_tol.is_none()
        });
        (
            worst <= 0.02 && bochner,
            format!("max residual {worst:e}, Bochner within tolerance: {bochner}"),
        )
    }));
    out
}

/// Analytic sub-Laplacian of [`lattice_bump`] for `m = 1`.
fn bump_sub_laplacian(z: &[f64]) -> f64 {
    let s2 = 0.15f64 * 0.15;
    let psi = |s: f64| (-(s - 0.5).powi(2) / (2.0 * s2)).exp();
    let psi2 = |s: f64| psi(s) * ((s - 0.5).powi(2) / (s2 * s2) - 1.0 / s2);
    (-3..=3)
        .map(|n| {
            let n = n as f64;
            let s = z[0] + n;
            let phase = 2.0 * PI * (z[2] - 2.0 * n * z[1] - z[0] * z[1]);
            0.5 * (psi2(s) - 16.0 * PI * PI * s * s * psi(s)) * phase.cos()
        })
        .sum()
}

pub fn run_checks(level: Level) -> Vec<CheckResult> {
    match level {
        Level::Quick => quick_checks(),
        Level::Full => full_checks(),
    }
}
