use std::fmt;

use crate::field::MapField;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    /// Unit sphere `S^n ⊂ R^{n+1}`.
    UnitSphere,
    /// Flat torus `T^n`, represented through its `R^n` lift.
    FlatTorus,
}

/// Codomain of the flow, embedded in `R^{n_amb}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TargetManifold {
    kind: TargetKind,
    n: usize,
}

impl TargetManifold {
    pub fn sphere(n: usize) -> Self {
        assert!(n >= 1, "sphere dimension must be positive");
        Self {
            kind: TargetKind::UnitSphere,
            n,
        }
    }

    pub fn torus(n: usize) -> Self {
        assert!(n >= 1, "torus dimension must be positive");
        Self {
            kind: TargetKind::FlatTorus,
            n,
        }
    }

    pub fn kind(&self) -> TargetKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            TargetKind::UnitSphere => self.n + 1,
            TargetKind::FlatTorus => self.n,
        }
    }

    /// Upper bound for the sectional curvature.
    pub fn kappa<T: Scalar>(&self) -> T {
        match self.kind {
            TargetKind::UnitSphere => T::one(),
            TargetKind::FlatTorus => T::zero(),
        }
    }

    pub fn is_sphere(&self) -> bool {
        self.kind == TargetKind::UnitSphere
    }

    /// Nearest-point projection of one ambient vector onto the target.
    pub fn project_point<T: Scalar>(&self, v: &mut [T]) {
        if self.is_sphere() {
            let norm = v.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
            for x in v.iter_mut() {
                *x = *x / norm;
            }
        }
    }

    pub fn project<T: Scalar>(&self, u: &mut MapField<T>) {
        if self.is_sphere() {
            for chunk in u.values.chunks_mut(u.n_amb) {
                self.project_point(chunk);
            }
        }
    }

    /// `max_p ||u(p)| − 1|` for spheres, zero for tori.
    pub fn constraint_defect<T: Scalar>(&self, u: &MapField<T>) -> T {
        if self.is_sphere() {
            u.norms()
                .values
                .iter()
                .fold(T::zero(), |a, &r| a.max((r - T::one()).abs()))
        } else {
            T::zero()
        }
    }
}

impl fmt::Display for TargetManifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TargetKind::UnitSphere => write!(f, "S^{}", self.n),
            TargetKind::FlatTorus => write!(f, "T^{}", self.n),
        }
    }
}
