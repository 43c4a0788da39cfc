//! Closed-form solution of the flat-target flow for single-mode data.
//!
//! On `t`-independent data the sub-Laplacian is half the flat Laplacian of
//! the `2m`-torus, so `a + λΦ` with `Φ` of wave vector `k` evolves as
//! `a + λ e^{−2π²|k|² t} Φ`.

use thiserror::Error;

use crate::field::MapField;
use crate::geometry::NilmanifoldGrid;
use crate::initial::{mode_vector, torus_mode_profile, Family, InitialError, InitialSpec};
use crate::target::TargetManifold;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("the closed-form solution needs a flat torus target (got {0})")]
    CurvedTarget(String),
    #[error("the closed-form solution needs t-independent single-mode data (got family {0})")]
    UnsupportedFamily(&'static str),
    #[error(transparent)]
    Initial(#[from] InitialError),
}

/// `e^{−2π²|k|² t}`.
pub fn mode_decay(modes: &[i64], t: f64) -> f64 {
    let k2: i64 = modes.iter().map(|k| k * k).sum();
    (-2.0 * std::f64::consts::PI.powi(2) * k2 as f64 * t).exp()
}

pub fn spectral_oracle(
    grid: &NilmanifoldGrid<f64>,
    target: &TargetManifold,
    spec: &InitialSpec,
    t: f64,
) -> Result<MapField<f64>, OracleError> {
    if target.is_sphere() {
        return Err(OracleError::CurvedTarget(target.to_string()));
    }
    if spec.family != Family::TorusMode {
        return Err(OracleError::UnsupportedFamily(spec.family.name()));
    }
    let (a, phi) = torus_mode_profile(grid, target, spec)?;
    let amplitude = spec.lambda * mode_decay(&mode_vector(grid, spec)?, t);
    Ok(MapField::constant(grid, &a).axpy(amplitude, &phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::make_initial_map;

    #[test]
    fn zero_time_returns_the_initial_map() {
        let g = NilmanifoldGrid::new(1, 8).unwrap();
        let target = TargetManifold::torus(2);
        let spec = InitialSpec::new(Family::TorusMode, 0.4);
        let exact = spectral_oracle(&g, &target, &spec, 0.0).unwrap();
        assert_eq!(exact, make_initial_map(&g, &target, &spec, 0).unwrap());
    }

    #[test]
    fn decay_factor() {
        assert!((mode_decay(&[1, 0], 0.1) - 0.138_911_133_142_800_3).abs() < 1e-15);
        assert!(
            (mode_decay(&[1, 1, 0, 2], 0.01) - (-0.12 * std::f64::consts::PI.powi(2)).exp()).abs()
                < 1e-15
        );
    }

    #[test]
    fn rejects_other_inputs() {
        let g = NilmanifoldGrid::new(1, 8).unwrap();
        let spec = InitialSpec::new(Family::TorusMode, 0.4);
        assert!(matches!(
            spectral_oracle(&g, &TargetManifold::sphere(2), &spec, 0.1),
            Err(OracleError::CurvedTarget(_))
        ));
        let spec = InitialSpec::new(Family::BumpAveraged, 0.4);
        assert!(matches!(
            spectral_oracle(&g, &TargetManifold::torus(1), &spec, 0.1),
            Err(OracleError::UnsupportedFamily("bump_averaged"))
        ));
    }
}
