//! Grid-valued scalar and map fields.
//!
//! Point `p`, component `c` of a map field lives at `values[p * n_amb + c]`
//! (component fastest), which is also the snapshot byte order.

use crate::geometry::NilmanifoldGrid;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> ScalarField<T> {
    pub fn zeros(grid: &NilmanifoldGrid<T>) -> Self {
        Self {
            values: vec![T::zero(); grid.len()],
        }
    }

    pub fn from_fn(grid: &NilmanifoldGrid<T>, f: impl Fn(&[T]) -> T) -> Self {
        Self {
            values: (0..grid.len()).map(|p| f(&grid.coords(p))).collect(),
        }
    }

    pub fn sup(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &v| a.max(v.abs()))
    }

    pub fn max(&self) -> T {
        self.values.iter().fold(T::neg_infinity(), |a, &v| a.max(v))
    }

    pub fn min(&self) -> T {
        self.values.iter().fold(T::infinity(), |a, &v| a.min(v))
    }

    /// `∫_M f dV` with the grid cell weight, summed in index order.
    pub fn integral(&self, grid: &NilmanifoldGrid<T>) -> T {
        self.values.iter().fold(T::zero(), |a, &v| a + v) * grid.cell_weight()
    }

    pub fn as_map(&self) -> MapField<T> {
        MapField {
            n_amb: 1,
            values: self.values.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapField<T> {
    pub n_amb: usize,
    pub values: Vec<T>,
}

impl<T: Scalar> MapField<T> {
    pub fn zeros(grid: &NilmanifoldGrid<T>, n_amb: usize) -> Self {
        Self {
            n_amb,
            values: vec![T::zero(); grid.len() * n_amb],
        }
    }

    pub fn constant(grid: &NilmanifoldGrid<T>, point: &[T]) -> Self {
        let mut values = Vec::with_capacity(grid.len() * point.len());
        for _ in 0..grid.len() {
            values.extend_from_slice(point);
        }
        Self {
            n_amb: point.len(),
            values,
        }
    }

    /// Sample a lifted map at the chart coordinates of every grid point.
    pub fn from_fn(grid: &NilmanifoldGrid<T>, n_amb: usize, f: impl Fn(&[T]) -> Vec<T>) -> Self {
        let mut values = Vec::with_capacity(grid.len() * n_amb);
        for p in 0..grid.len() {
            let v = f(&grid.coords(p));
            assert_eq!(v.len(), n_amb, "map returned wrong component count");
            values.extend(v);
        }
        Self { n_amb, values }
    }

    pub fn n_points(&self) -> usize {
        self.values.len() / self.n_amb
    }

    #[inline]
    pub fn at(&self, p: usize) -> &[T] {
        &self.values[p * self.n_amb..(p + 1) * self.n_amb]
    }

    #[inline]
    pub fn at_mut(&mut self, p: usize) -> &mut [T] {
        &mut self.values[p * self.n_amb..(p + 1) * self.n_amb]
    }

    pub fn component(&self, c: usize) -> ScalarField<T> {
        ScalarField {
            values: self
                .values
                .iter()
                .skip(c)
                .step_by(self.n_amb)
                .copied()
                .collect(),
        }
    }

    /// Pointwise Euclidean norm.
    pub fn norms(&self) -> ScalarField<T> {
        ScalarField {
            values: self
                .values
                .chunks(self.n_amb)
                .map(|v| v.iter().fold(T::zero(), |a, &x| a + x * x).sqrt())
                .collect(),
        }
    }

    /// `sup_p |u(p)|`.
    pub fn sup_norm(&self) -> T {
        self.norms().max().max(T::zero())
    }

    /// `sup_p |u(p) − v(p)|`.
    pub fn sup_distance(&self, other: &MapField<T>) -> T {
        self.values
            .chunks(self.n_amb)
            .zip(other.values.chunks(other.n_amb))
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .fold(T::zero(), |s, (&x, &y)| s + (x - y) * (x - y))
                    .sqrt()
            })
            .fold(T::zero(), T::max)
    }

    /// `∫_M ⟨u, v⟩ dV`.
    pub fn inner(&self, other: &MapField<T>, grid: &NilmanifoldGrid<T>) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |a, (&x, &y)| a + x * y)
            * grid.cell_weight()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, s: T) -> MapField<T> {
        MapField {
            n_amb: self.n_amb,
            values: self.values.iter().map(|&v| v * s).collect(),
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: T, other: &MapField<T>) -> MapField<T> {
        MapField {
            n_amb: self.n_amb,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a + s * b)
                .collect(),
        }
    }
}
