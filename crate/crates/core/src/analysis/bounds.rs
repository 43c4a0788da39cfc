//! Closed-form comparison and threshold calculus.
//!
//! The comparison function solves `g' = g (C1 + C2 g)`, `g(0) = D`:
//!
//! ```text
//! g(t) = C1 D e^{C1 t} / (C1 + C2 D − C2 D e^{C1 t}),
//! T_0  = (1/C1) log(1 + C1 / (D C2)),
//! ```
//!
//! with the `C1 → 0` limits `g = D / (1 − C2 D t)`, `T_0 = 1 / (C2 D)`.
//! The density threshold is the maximizer `x_0 = −½ + √(¼ + 1/(C2 s))` of
//! `φ(x) = e^{−C2 s x} x / (1 + x)`, valid for windows `s < 1/(D(4D+2)C2)`.

use super::AnalysisError;
use crate::scalar::Scalar;
use crate::target::TargetManifold;

/// Constants of the density-bound calculus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlParams<T> {
    /// Bound on the initial total energy density.
    pub d: T,
    /// Linear Bochner constant; zero on the flat model.
    pub c1: T,
    /// Quadratic Bochner constant.
    pub c2: T,
    /// Mean-value window length.
    pub s: T,
}

impl<T: Scalar> ControlParams<T> {
    pub fn new(d: T, c1: T, c2: T, s: T) -> Result<Self, AnalysisError> {
        let p = Self { d, c1, c2, s };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with `s` at half its admissible maximum (or 0.1 when the
    /// maximum is unbounded, i.e. `D = 0`).
    pub fn with_default_window(d: T, c1: T, c2: T) -> Result<Self, AnalysisError> {
        let s_max = window_bound(d, c2);
        let s = if s_max.is_finite() {
            s_max * T::lit(0.5)
        } else {
            T::lit(0.1)
        };
        Self::new(d, c1, c2, s)
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        let bad = |what: &str| Err(AnalysisError::InvalidParams(what.to_string()));
        if !(self.d >= T::zero()) || !self.d.is_finite() {
            return bad("D must be finite and >= 0");
        }
        if !(self.c1 >= T::zero()) || !self.c1.is_finite() {
            return bad("C1 must be finite and >= 0");
        }
        if !(self.c2 > T::zero()) || !self.c2.is_finite() {
            return bad("C2 must be finite and > 0");
        }
        if !(self.s > T::zero()) {
            return bad("s must be > 0");
        }
        let s_max = window_bound(self.d, self.c2);
        if self.s >= s_max {
            return Err(AnalysisError::WindowTooLarge {
                s: self.s.to_f64_lossy(),
                s_max: s_max.to_f64_lossy(),
            });
        }
        Ok(())
    }
}

/// Default quadratic constant for a target: `8κ · ½` with the ½ frame
/// normalization, or 1 on flat targets where the curvature term vanishes.
pub fn default_c2<T: Scalar>(target: &TargetManifold) -> T {
    let kappa: T = target.kappa();
    if kappa > T::zero() {
        T::lit(4.0) * kappa
    } else {
        T::one()
    }
}

/// `1 / (D (4D + 2) C2)`; infinite for `D = 0`.
pub fn window_bound<T: Scalar>(d: T, c2: T) -> T {
    T::one() / (d * (T::lit(4.0) * d + T::lit(2.0)) * c2)
}

/// Existence horizon and comparison value at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonBound<T> {
    pub horizon: T,
    /// `None` once `t ≥ T_0`: the bound has expired.
    pub g: Option<T>,
}

pub fn existence_horizon<T: Scalar>(params: &ControlParams<T>) -> T {
    let ControlParams { d, c1, c2, .. } = *params;
    if d == T::zero() {
        T::infinity()
    } else if c1 == T::zero() {
        T::one() / (c2 * d)
    } else {
        (c1 / (d * c2)).ln_1p() / c1
    }
}

pub fn comparison_bounds<T: Scalar>(params: &ControlParams<T>, t: T) -> ComparisonBound<T> {
    let horizon = existence_horizon(params);
    let ControlParams { d, c1, c2, .. } = *params;
    let g = if t >= horizon {
        None
    } else if d == T::zero() {
        Some(T::zero())
    } else if c1 == T::zero() {
        Some(d / (T::one() - c2 * d * t))
    } else {
        // C1 + C2 D − C2 D e^{C1 t} = C1 − C2 D (e^{C1 t} − 1)
        Some(c1 * d * (c1 * t).exp() / (c1 - c2 * d * (c1 * t).exp_m1()))
    };
    ComparisonBound { horizon, g }
}

/// `φ(x) = e^{−C2 s x} x / (1 + x)`.
pub fn phi<T: Scalar>(c2: T, s: T, x: T) -> T {
    (-c2 * s * x).exp() * x / (T::one() + x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds<T> {
    pub s_max: T,
    pub x0: T,
    pub phi_x0: T,
    /// First time with `g(t) = 2D`.
    pub t0_double: T,
}

pub fn threshold_constants<T: Scalar>(
    params: &ControlParams<T>,
) -> Result<Thresholds<T>, AnalysisError> {
    params.validate()?;
    let ControlParams { d, c1, c2, s } = *params;
    let quarter = T::lit(0.25);
    let x0 = -T::lit(0.5) + (quarter + T::one() / (c2 * s)).sqrt();
    let t0_double = if d == T::zero() {
        T::infinity()
    } else if c1 == T::zero() {
        T::one() / (T::lit(2.0) * c2 * d)
    } else {
        // e^{C1 t}(C1 + 2 C2 D) = 2 (C1 + C2 D)
        (c1 / (c1 + T::lit(2.0) * c2 * d)).ln_1p() / c1
    };
    Ok(Thresholds {
        s_max: window_bound(d, c2),
        x0,
        phi_x0: phi(c2, s, x0),
        t0_double,
    })
}
