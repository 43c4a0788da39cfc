//! Initial-data families.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::MapField;
use crate::flow::cfl_timestep;
use crate::geometry::NilmanifoldGrid;
use crate::operators::sub_laplacian;
use crate::target::TargetManifold;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Constant,
    TorusMode,
    Equator,
    BumpAveraged,
    SmoothedNoise,
}

impl FromStr for Family {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(match s {
            "constant" => Family::Constant,
            "torus_mode" => Family::TorusMode,
            "equator" => Family::Equator,
            "bump_averaged" => Family::BumpAveraged,
            "smoothed_noise" => Family::SmoothedNoise,
            _ => return Err(()),
        })
    }
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Constant => "constant",
            Family::TorusMode => "torus_mode",
            Family::Equator => "equator",
            Family::BumpAveraged => "bump_averaged",
            Family::SmoothedNoise => "smoothed_noise",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialSpec {
    pub family: Family,
    /// Amplitude; ignored by `constant` and `equator`.
    pub lambda: f64,
    /// Base point; defaults to the last ambient axis on spheres, the origin on tori.
    pub base: Option<Vec<f64>>,
    /// Integer wave vector over `(x¹, y¹, …, x^m, y^m)`; defaults to `(1, 0, …)`.
    pub modes: Option<Vec<i64>>,
    pub smoothing_steps: usize,
}

impl InitialSpec {
    pub fn new(family: Family, lambda: f64) -> Self {
        Self {
            family,
            lambda,
            base: None,
            modes: None,
            smoothing_steps: 20,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum InitialError {
    #[error("family {family} is not available for target {target}")]
    Unsupported {
        family: &'static str,
        target: String,
    },
    #[error("base point: {0}")]
    BadBase(String),
    #[error("modes: expected {expected} integers, got {got}")]
    BadModes { expected: usize, got: usize },
}

pub fn base_point(target: &TargetManifold, spec: &InitialSpec) -> Result<Vec<f64>, InitialError> {
    let n = target.ambient_dim();
    let mut a = match &spec.base {
        Some(b) if b.len() != n => {
            return Err(InitialError::BadBase(format!(
                "expected {n} components, got {}",
                b.len()
            )))
        }
        Some(b) => b.clone(),
        None if target.is_sphere() => {
            let mut v = vec![0.0; n];
            v[n - 1] = 1.0;
            v
        }
        None => vec![0.0; n],
    };
    if target.is_sphere() {
        let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(InitialError::BadBase(
                "sphere base point must be nonzero".into(),
            ));
        }
        target.project_point(&mut a);
    }
    Ok(a)
}

/// Orthonormal directions tangent to the target at `a` (at most two).
fn tangent_directions(target: &TargetManifold, a: &[f64]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for axis in 0..n {
        if dirs.len() == 2.min(target.dim()) {
            break;
        }
        let mut v = vec![0.0; n];
        v[axis] = 1.0;
        let mut against: Vec<&[f64]> = dirs.iter().map(|d| d.as_slice()).collect();
        if target.is_sphere() {
            against.push(a);
        }
        for w in against {
            let dot: f64 = v.iter().zip(w).map(|(x, y)| x * y).sum();
            for (vi, wi) in v.iter_mut().zip(w) {
                *vi -= dot * wi;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            dirs.push(v.iter().map(|x| x / norm).collect());
        }
    }
    dirs
}

pub fn mode_vector(
    grid: &NilmanifoldGrid<f64>,
    spec: &InitialSpec,
) -> Result<Vec<i64>, InitialError> {
    let len = 2 * grid.cr_dim();
    match &spec.modes {
        Some(k) if k.len() != len => Err(InitialError::BadModes {
            expected: len,
            got: k.len(),
        }),
        Some(k) => Ok(k.clone()),
        None => {
            let mut k = vec![0; len];
            k[0] = 1;
            Ok(k)
        }
    }
}

/// The unprojected mode function `Φ(z) = sin θ d₁ + cos θ d₂`, `θ = 2π k·(x, y)`,
/// together with the base point it perturbs.
pub fn torus_mode_profile(
    grid: &NilmanifoldGrid<f64>,
    target: &TargetManifold,
    spec: &InitialSpec,
) -> Result<(Vec<f64>, MapField<f64>), InitialError> {
    let a = base_point(target, spec)?;
    let k = mode_vector(grid, spec)?;
    let dirs = tangent_directions(target, &a);
    let m = grid.cr_dim();
    let phi = MapField::from_fn(grid, a.len(), |z| {
        let theta = 2.0 * PI * (0..2 * m).map(|i| k[i] as f64 * z[i]).sum::<f64>();
        let mut out = vec![0.0; a.len()];
        for (d, w) in dirs.iter().zip([theta.sin(), theta.cos()]) {
            for (o, di) in out.iter_mut().zip(d) {
                *o += w * di;
            }
        }
        out
    });
    Ok((a, phi))
}

/// Lattice-invariant bump with genuine `t` dependence:
/// `Σ_n Π_α ψ(x_α + n_α) · cos 2π(t − Σ_α (2 n_α + x_α) y_α)`, `ψ` a narrow Gaussian.
pub fn lattice_bump(z: &[f64], m: usize) -> f64 {
    const REACH: i64 = 3;
    let psi = |s: f64| (-(s - 0.5).powi(2) / (2.0 * 0.15f64.powi(2))).exp();
    let t = z[2 * m];
    let count = (2 * REACH + 1).pow(m as u32);
    (0..count)
        .map(|mut code| {
            let mut weight = 1.0;
            let mut phase = t;
            for alpha in 0..m {
                let n = (code % (2 * REACH + 1) - REACH) as f64;
                code /= 2 * REACH + 1;
                let (x, y) = (z[2 * alpha], z[2 * alpha + 1]);
                weight *= psi(x + n);
                phase -= (2.0 * n + x) * y;
            }
            weight * (2.0 * PI * phase).cos()
        })
        .sum()
}

fn smoothed_noise(
    grid: &NilmanifoldGrid<f64>,
    n_amb: usize,
    steps: usize,
    seed: u64,
) -> MapField<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = MapField {
        n_amb,
        values: (0..grid.len() * n_amb)
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect(),
    };
    let dt = cfl_timestep(grid, 0.5);
    for _ in 0..steps {
        u = u.axpy(dt, &sub_laplacian(grid, &u));
    }
    u
}

pub fn make_initial_map(
    grid: &NilmanifoldGrid<f64>,
    target: &TargetManifold,
    spec: &InitialSpec,
    seed: u64,
) -> Result<MapField<f64>, InitialError> {
    let n_amb = target.ambient_dim();
    let unsupported = || InitialError::Unsupported {
        family: spec.family.name(),
        target: target.to_string(),
    };
    let mut u = match spec.family {
        Family::Constant => MapField::constant(grid, &base_point(target, spec)?),
        Family::TorusMode => {
            let (a, phi) = torus_mode_profile(grid, target, spec)?;
            MapField::constant(grid, &a).axpy(spec.lambda, &phi)
        }
        Family::Equator => {
            if !target.is_sphere() {
                return Err(unsupported());
            }
            MapField::from_fn(grid, n_amb, |z| {
                let mut v = vec![0.0; n_amb];
                v[0] = (2.0 * PI * z[0]).cos();
                v[1] = (2.0 * PI * z[0]).sin();
                v
            })
        }
        Family::BumpAveraged => {
            let a = base_point(target, spec)?;
            let dirs = tangent_directions(target, &a);
            let m = grid.cr_dim();
            MapField::from_fn(grid, n_amb, |z| {
                let f = spec.lambda * lattice_bump(z, m);
                a.iter().zip(&dirs[0]).map(|(ai, di)| ai + f * di).collect()
            })
        }
        Family::SmoothedNoise => {
            let a = base_point(target, spec)?;
            let noise = smoothed_noise(grid, n_amb, spec.smoothing_steps, seed);
            MapField::constant(grid, &a).axpy(spec.lambda, &noise)
        }
    };
    target.project(&mut u);
    Ok(u)
}
