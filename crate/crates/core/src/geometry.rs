//! The flat Heisenberg nilmanifold `Γ \ H^m` and its uniform grid.
//!
//! Coordinates are `(x¹, y¹, …, x^m, y^m, t)` with contact form
//! `θ = dt + Σ (x^α dy^α − y^α dx^α)`, so `dθ = 2 Σ dx^α ∧ dy^α`. The
//! horizontal frame is `X_α = ∂_{x^α} + y^α ∂_t`, `Y_α = ∂_{y^α} − x^α ∂_t`
//! with `J X_α = Y_α`, and the Reeb field is `ξ = ∂_t`.
//!
//! The integer lattice acts on the left by
//! `(a, b, c)·(x, y, t) = (x + a, y + b, t + c + b·x − a·y)`, which preserves
//! `θ` and every frame field. On the fundamental domain `[0, 1)^{2m+1}` this
//! means a step across the `x^α = 1` face lands on `x^α = 0` with the
//! `t`-index shifted by `+j_α`, and a step across `y^α = 1` lands on `y^α = 0`
//! shifted by `−i_α`.

use thiserror::Error;

use crate::scalar::Scalar;

/// Largest supported CR dimension.
pub const MAX_CR_DIM: usize = 2;
/// Smallest supported points-per-axis.
pub const MIN_RESOLUTION: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("m out of supported range {{1,2}} (got m={0})")]
    UnsupportedDimension(usize),
    #[error("resolution too small: N={0}, need N >= 4")]
    ResolutionTooSmall(usize),
    #[error("grid too large: N={n} in dimension {dim} exceeds 32-bit point indexing")]
    TooLarge { n: usize, dim: usize },
}

/// A coordinate axis of the chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// `x^α`, zero-based `α`.
    X(usize),
    /// `y^α`, zero-based `α`.
    Y(usize),
    T,
}

impl Axis {
    /// Position of this axis in the coordinate tuple `(x¹, y¹, …, t)`.
    pub fn position(self, m: usize) -> usize {
        match self {
            Axis::X(a) => 2 * a,
            Axis::Y(a) => 2 * a + 1,
            Axis::T => 2 * m,
        }
    }

    pub fn from_position(pos: usize, m: usize) -> Axis {
        if pos == 2 * m {
            Axis::T
        } else if pos % 2 == 0 {
            Axis::X(pos / 2)
        } else {
            Axis::Y(pos / 2)
        }
    }
}

/// Direction of a single grid step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    Forward,
    Backward,
}

impl Step {
    pub fn reverse(self) -> Step {
        match self {
            Step::Forward => Step::Backward,
            Step::Backward => Step::Forward,
        }
    }
}

/// A named left-invariant vector field of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameField {
    X(usize),
    Y(usize),
    Reeb,
}

/// Vector field whose coordinate coefficients are affine in the chart:
/// `V^k(z) = constant[k] + Σ_j linear[k][j] z_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineField<T> {
    pub constant: Vec<T>,
    pub linear: Vec<Vec<T>>,
}

impl<T: Scalar> AffineField<T> {
    pub fn eval(&self, z: &[T]) -> Vec<T> {
        self.constant
            .iter()
            .zip(&self.linear)
            .map(|(&c, row)| {
                c + row
                    .iter()
                    .zip(z)
                    .fold(T::zero(), |acc, (&a, &zj)| acc + a * zj)
            })
            .collect()
    }

    /// Lie bracket `[self, other]` evaluated at `z`.
    pub fn bracket_at(&self, other: &AffineField<T>, z: &[T]) -> Vec<T> {
        let u = self.eval(z);
        let v = other.eval(z);
        (0..u.len())
            .map(|k| {
                let mut acc = T::zero();
                for j in 0..u.len() {
                    acc = acc + u[j] * other.linear[k][j] - v[j] * self.linear[k][j];
                }
                acc
            })
            .collect()
    }
}

/// The flat pseudo-Hermitian structure on `H^m` in the chart above.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeisenbergModel {
    m: usize,
}

impl HeisenbergModel {
    pub fn new(m: usize) -> Result<Self, GeometryError> {
        if m == 0 || m > MAX_CR_DIM {
            return Err(GeometryError::UnsupportedDimension(m));
        }
        Ok(Self { m })
    }

    #[inline]
    pub fn cr_dim(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        2 * self.m + 1
    }

    /// Coefficients of `θ` in the coordinate coframe at `z`.
    pub fn contact_form<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        let mut theta = vec![T::zero(); self.dim()];
        for a in 0..self.m {
            theta[2 * a] = -z[2 * a + 1];
            theta[2 * a + 1] = z[2 * a];
        }
        theta[2 * self.m] = T::one();
        theta
    }

    /// `dθ(u, v) = 2 Σ_α (u^{x_α} v^{y_α} − u^{y_α} v^{x_α})`; constant in `z`.
    pub fn dtheta<T: Scalar>(&self, u: &[T], v: &[T]) -> T {
        let two = T::lit(2.0);
        (0..self.m).fold(T::zero(), |acc, a| {
            acc + two * (u[2 * a] * v[2 * a + 1] - u[2 * a + 1] * v[2 * a])
        })
    }

    pub fn frame_field<T: Scalar>(&self, f: FrameField) -> AffineField<T> {
        let d = self.dim();
        let mut constant = vec![T::zero(); d];
        let mut linear = vec![vec![T::zero(); d]; d];
        let t = 2 * self.m;
        match f {
            FrameField::X(a) => {
                constant[2 * a] = T::one();
                linear[t][2 * a + 1] = T::one();
            }
            FrameField::Y(a) => {
                constant[2 * a + 1] = T::one();
                linear[t][2 * a] = -T::one();
            }
            FrameField::Reeb => constant[t] = T::one(),
        }
        AffineField { constant, linear }
    }

    /// All frame fields in the order `X_1, Y_1, …, X_m, Y_m, ξ`.
    pub fn frame_fields(&self) -> Vec<FrameField> {
        let mut out = Vec::with_capacity(self.dim());
        for a in 0..self.m {
            out.push(FrameField::X(a));
            out.push(FrameField::Y(a));
        }
        out.push(FrameField::Reeb);
        out
    }

    /// `J` on a horizontal vector, read through its frame components
    /// (the `∂_{x^α}`, `∂_{y^α}` coefficients).
    pub fn complex_structure<T: Scalar>(&self, v: &[T], z: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim()];
        for a in 0..self.m {
            let cx = v[2 * a];
            let cy = v[2 * a + 1];
            // J(cx X + cy Y) = cx Y − cy X
            let xf = self.frame_field::<T>(FrameField::X(a)).eval(z);
            let yf = self.frame_field::<T>(FrameField::Y(a)).eval(z);
            for k in 0..out.len() {
                out[k] = out[k] + cx * yf[k] - cy * xf[k];
            }
        }
        out
    }

    /// Levi form `L_θ(U, V) = dθ(U, J V)` on the horizontal frame at `z`.
    pub fn levi_matrix<T: Scalar>(&self, z: &[T]) -> Vec<Vec<T>> {
        let horizontal: Vec<Vec<T>> = self.frame_fields()[..2 * self.m]
            .iter()
            .map(|&f| self.frame_field::<T>(f).eval(z))
            .collect();
        horizontal
            .iter()
            .map(|u| {
                horizontal
                    .iter()
                    .map(|v| self.dtheta(u, &self.complex_structure(v, z)))
                    .collect()
            })
            .collect()
    }

    /// Webster metric `g_θ = L_θ + θ ⊗ θ` in the full frame at `z`.
    pub fn webster_matrix<T: Scalar>(&self, z: &[T]) -> Vec<Vec<T>> {
        let frame: Vec<Vec<T>> = self
            .frame_fields()
            .iter()
            .map(|&f| self.frame_field::<T>(f).eval(z))
            .collect();
        let theta = self.contact_form(z);
        let pair = |v: &[T]| {
            v.iter()
                .zip(&theta)
                .fold(T::zero(), |a, (&x, &y)| a + x * y)
        };
        frame
            .iter()
            .map(|u| {
                frame
                    .iter()
                    // ξ lies in ker dθ, so the Levi part only sees horizontal components
                    .map(|v| self.dtheta(u, &self.complex_structure(v, z)) + pair(u) * pair(v))
                    .collect()
            })
            .collect()
    }
}

/// Twisted-periodic index step on the `N^{2m+1}` grid.
///
/// `index` is the multi-index `(i_1, j_1, …, i_m, j_m, k)` matching the
/// coordinate order.
pub fn wrap_index(n: usize, m: usize, index: &[usize], axis: Axis, step: Step) -> Vec<usize> {
    let mut out = index.to_vec();
    let t = 2 * m;
    let shift_t =
        |k: usize, by: isize| -> usize { (k as isize + by).rem_euclid(n as isize) as usize };
    match (axis, step) {
        (Axis::T, Step::Forward) => out[t] = shift_t(out[t], 1),
        (Axis::T, Step::Backward) => out[t] = shift_t(out[t], -1),
        (Axis::X(a), Step::Forward) => {
            if out[2 * a] + 1 == n {
                out[2 * a] = 0;
                out[t] = shift_t(out[t], out[2 * a + 1] as isize);
            } else {
                out[2 * a] += 1;
            }
        }
        (Axis::X(a), Step::Backward) => {
            if out[2 * a] == 0 {
                out[2 * a] = n - 1;
                out[t] = shift_t(out[t], -(out[2 * a + 1] as isize));
            } else {
                out[2 * a] -= 1;
            }
        }
        (Axis::Y(a), Step::Forward) => {
            if out[2 * a + 1] + 1 == n {
                out[2 * a + 1] = 0;
                out[t] = shift_t(out[t], -(out[2 * a] as isize));
            } else {
                out[2 * a + 1] += 1;
            }
        }
        (Axis::Y(a), Step::Backward) => {
            if out[2 * a + 1] == 0 {
                out[2 * a + 1] = n - 1;
                out[t] = shift_t(out[t], out[2 * a] as isize);
            } else {
                out[2 * a + 1] -= 1;
            }
        }
    }
    out
}

/// Uniform grid on the fundamental domain with precomputed neighbor table.
#[derive(Debug, Clone)]
pub struct NilmanifoldGrid<T> {
    model: HeisenbergModel,
    n: usize,
    h: T,
    n_points: usize,
    cell_weight: T,
    /// `neighbors[p * 2 * dim + 2 * axis + s]`, `s = 0` forward, `1` backward.
    neighbors: Vec<u32>,
    /// Horizontal chart values `(x¹, y¹, …)` per point.
    chart: Vec<T>,
    /// Linear-index offset of one step along each chart position.
    strides: Vec<usize>,
    /// Slot into `face_stencils` for points next to a face, `u32::MAX` for
    /// interior points whose neighbors are plain index offsets.
    face_slot: Vec<u32>,
    /// `STENCIL_POINTS` neighbors per `α` for every face point, stored in
    /// grid order so that sweeps read them sequentially.
    face_stencils: Vec<u32>,
}

/// Number of neighbors in one `α` block of the compact stencils.
pub const STENCIL_POINTS: usize = 14;

impl<T: Scalar> NilmanifoldGrid<T> {
    pub fn new(m: usize, n: usize) -> Result<Self, GeometryError> {
        let model = HeisenbergModel::new(m)?;
        if n < MIN_RESOLUTION {
            return Err(GeometryError::ResolutionTooSmall(n));
        }
        let dim = model.dim();
        let n_points = (0..dim)
            .try_fold(1usize, |acc, _| acc.checked_mul(n))
            .filter(|&p| p <= u32::MAX as usize)
            .ok_or(GeometryError::TooLarge { n, dim })?;

        let h = T::one() / T::from_usize_lossy(n);
        let factorial: usize = (1..=m).product();
        let cell_weight = T::from_usize_lossy((1usize << m) * factorial) * h.powi(dim as i32);

        let mut neighbors = vec![0u32; n_points * 2 * dim];
        let mut chart = vec![T::zero(); n_points * 2 * m];
        let mut interior = vec![false; n_points];
        let mut idx = vec![0usize; dim];
        for p in 0..n_points {
            interior[p] = idx.iter().all(|&i| i >= 1 && i + 1 < n);
            for pos in 0..dim {
                let axis = Axis::from_position(pos, m);
                for (s, step) in [Step::Forward, Step::Backward].into_iter().enumerate() {
                    let q = wrap_index(n, m, &idx, axis, step);
                    neighbors[p * 2 * dim + 2 * pos + s] = linear_index(n, &q) as u32;
                }
            }
            for c in 0..2 * m {
                chart[p * 2 * m + c] = T::from_usize_lossy(idx[c]) * h;
            }
            // odometer increment, last axis fastest
            for pos in (0..dim).rev() {
                idx[pos] += 1;
                if idx[pos] < n {
                    break;
                }
                idx[pos] = 0;
            }
        }

        let mut grid = Self {
            model,
            n,
            h,
            n_points,
            cell_weight,
            neighbors,
            chart,
            strides: (0..dim).map(|pos| n.pow((dim - 1 - pos) as u32)).collect(),
            face_slot: vec![u32::MAX; n_points],
            face_stencils: Vec::new(),
        };
        let mut slot = 0u32;
        for p in (0..n_points).filter(|&p| !interior[p]) {
            grid.face_slot[p] = slot;
            slot += 1;
            for alpha in 0..m {
                let block = grid.table_stencil(p, alpha);
                grid.face_stencils.extend(block.iter().map(|&q| q as u32));
            }
        }
        Ok(grid)
    }

    fn table_stencil(&self, p: usize, alpha: usize) -> [usize; STENCIL_POINTS] {
        use Step::{Backward as B, Forward as F};
        let nb = |q, axis, s| self.neighbor(q, axis, s);
        let (xa, ya) = (Axis::X(alpha), Axis::Y(alpha));
        let (xp, xm, yp, ym) = (nb(p, xa, F), nb(p, xa, B), nb(p, ya, F), nb(p, ya, B));
        [
            xp,
            xm,
            yp,
            ym,
            nb(p, Axis::T, F),
            nb(p, Axis::T, B),
            nb(xp, Axis::T, F),
            nb(xp, Axis::T, B),
            nb(xm, Axis::T, F),
            nb(xm, Axis::T, B),
            nb(yp, Axis::T, F),
            nb(yp, Axis::T, B),
            nb(ym, Axis::T, F),
            nb(ym, Axis::T, B),
        ]
    }

    /// Neighbors used by the compact stencils of the `α` block at `p`:
    /// `[x+, x−, y+, y−, t+, t−, x+t+, x+t−, x−t+, x−t−, y+t+, y+t−, y−t+, y−t−]`.
    #[inline]
    pub fn stencil_neighbors(&self, p: usize, alpha: usize) -> [usize; STENCIL_POINTS] {
        let slot = self.face_slot[p];
        if slot == u32::MAX {
            let (sx, sy) = (self.strides[2 * alpha], self.strides[2 * alpha + 1]);
            [
                p + sx,
                p - sx,
                p + sy,
                p - sy,
                p + 1,
                p - 1,
                p + sx + 1,
                p + sx - 1,
                p - sx + 1,
                p - sx - 1,
                p + sy + 1,
                p + sy - 1,
                p - sy + 1,
                p - sy - 1,
            ]
        } else {
            let start = (slot as usize * self.cr_dim() + alpha) * STENCIL_POINTS;
            let block = &self.face_stencils[start..start + STENCIL_POINTS];
            std::array::from_fn(|i| block[i] as usize)
        }
    }

    pub fn model(&self) -> &HeisenbergModel {
        &self.model
    }

    #[inline]
    pub fn cr_dim(&self) -> usize {
        self.model.cr_dim()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn spacing(&self) -> T {
        self.h
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn cell_weight(&self) -> T {
        self.cell_weight
    }

    /// `Σ cell_weight = 2^m m!`.
    pub fn total_volume(&self) -> T {
        self.cell_weight * T::from_usize_lossy(self.n_points)
    }

    /// Whether this grid lies inside the hypothesis `m ≥ 2` of the
    /// small-energy existence result.
    pub fn within_existence_hypothesis(&self) -> bool {
        self.cr_dim() >= 2
    }

    #[inline]
    pub fn neighbor(&self, p: usize, axis: Axis, step: Step) -> usize {
        let s = match step {
            Step::Forward => 0,
            Step::Backward => 1,
        };
        self.neighbors[p * 2 * self.dim() + 2 * axis.position(self.cr_dim()) + s] as usize
    }

    /// `x^α` at point `p` (zero-based `α`).
    #[inline]
    pub fn x(&self, p: usize, alpha: usize) -> T {
        self.chart[p * 2 * self.cr_dim() + 2 * alpha]
    }

    /// `y^α` at point `p` (zero-based `α`).
    #[inline]
    pub fn y(&self, p: usize, alpha: usize) -> T {
        self.chart[p * 2 * self.cr_dim() + 2 * alpha + 1]
    }

    pub fn multi_index(&self, mut p: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for pos in (0..self.dim()).rev() {
            idx[pos] = p % self.n;
            p /= self.n;
        }
        idx
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        linear_index(self.n, idx)
    }

    /// Chart coordinates of point `p`, all in `[0, 1)`.
    pub fn coords(&self, p: usize) -> Vec<T> {
        self.multi_index(p)
            .into_iter()
            .map(|i| T::from_usize_lossy(i) * self.h)
            .collect()
    }

    pub fn wrap(&self, idx: &[usize], axis: Axis, step: Step) -> Vec<usize> {
        wrap_index(self.n, self.cr_dim(), idx, axis, step)
    }

    /// Coordinate coefficients of `X_1, Y_1, …, X_m, Y_m, ξ` at point `p`.
    pub fn frame_coefficients(&self, p: usize) -> Vec<Vec<T>> {
        let z = self.coords(p);
        self.model
            .frame_fields()
            .into_iter()
            .map(|f| self.model.frame_field::<T>(f).eval(&z))
            .collect()
    }

    /// All coordinate axes in chart order.
    pub fn axes(&self) -> Vec<Axis> {
        (0..self.dim())
            .map(|pos| Axis::from_position(pos, self.cr_dim()))
            .collect()
    }
}

fn linear_index(n: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_grid_examples() {
        let g = NilmanifoldGrid::<f64>::new(1, 8).unwrap();
        assert_eq!(g.len(), 512);
        assert_eq!(g.spacing(), 0.125);
        assert_eq!(g.cell_weight(), 0.00390625);

        let g = NilmanifoldGrid::<f64>::new(2, 6).unwrap();
        assert_eq!(g.len(), 6usize.pow(5));
        assert!((g.cell_weight() - 8.0 / 6f64.powi(5)).abs() < 1e-18);

        assert_eq!(
            NilmanifoldGrid::<f64>::new(1, 3).unwrap_err(),
            GeometryError::ResolutionTooSmall(3)
        );
        let err = NilmanifoldGrid::<f64>::new(3, 8).unwrap_err();
        assert!(err.to_string().contains("m out of supported range {1,2}"));
        assert!(NilmanifoldGrid::<f64>::new(0, 8).is_err());
    }

    #[test]
    fn wrap_examples() {
        let w = |idx: [usize; 3], axis, step| wrap_index(8, 1, &idx, axis, step);
        assert_eq!(w([3, 3, 5], Axis::X(0), Step::Forward), vec![4, 3, 5]);
        // (1, y, t) is identified with (0, y, t + y)
        assert_eq!(w([7, 3, 5], Axis::X(0), Step::Forward), vec![0, 3, 0]);
        // (x, 1, t) is identified with (x, 0, t − x)
        assert_eq!(w([2, 7, 5], Axis::Y(0), Step::Forward), vec![2, 0, 3]);
        assert_eq!(w([2, 3, 7], Axis::T, Step::Forward), vec![2, 3, 0]);
    }

    #[test]
    fn wrap_forward_backward_is_identity_everywhere() {
        for (m, n) in [(1, 5), (2, 4)] {
            let g = NilmanifoldGrid::<f64>::new(m, n).unwrap();
            for p in 0..g.len() {
                for axis in g.axes() {
                    for step in [Step::Forward, Step::Backward] {
                        let q = g.neighbor(p, axis, step);
                        assert_eq!(g.neighbor(q, axis, step.reverse()), p);
                    }
                }
            }
        }
    }

    #[test]
    fn full_loop_along_x_shifts_t_by_y_index() {
        let g = NilmanifoldGrid::<f64>::new(1, 6).unwrap();
        for p in 0..g.len() {
            let idx = g.multi_index(p);
            let mut q = p;
            for _ in 0..6 {
                q = g.neighbor(q, Axis::X(0), Step::Forward);
            }
            let mut expect = idx.clone();
            expect[2] = (idx[2] + idx[1]) % 6;
            assert_eq!(g.multi_index(q), expect);
            // t loop is untwisted
            let mut r = p;
            for _ in 0..6 {
                r = g.neighbor(r, Axis::T, Step::Forward);
            }
            assert_eq!(r, p);
        }
    }

    #[test]
    fn x_and_t_steps_commute() {
        let g = NilmanifoldGrid::<f64>::new(2, 4).unwrap();
        for p in 0..g.len() {
            for axis in g.axes() {
                for s in [Step::Forward, Step::Backward] {
                    for st in [Step::Forward, Step::Backward] {
                        let a = g.neighbor(g.neighbor(p, axis, s), Axis::T, st);
                        let b = g.neighbor(g.neighbor(p, Axis::T, st), axis, s);
                        assert_eq!(a, b);
                    }
                }
            }
        }
    }

    #[test]
    fn total_volume() {
        assert_eq!(
            NilmanifoldGrid::<f64>::new(1, 16).unwrap().total_volume(),
            2.0
        );
        assert_eq!(
            NilmanifoldGrid::<f64>::new(2, 8).unwrap().total_volume(),
            8.0
        );
        let g = NilmanifoldGrid::<f64>::new(2, 6).unwrap();
        let summed: f64 = (0..g.len()).map(|_| g.cell_weight()).sum();
        assert!((summed - 8.0).abs() <= g.len() as f64 * f64::EPSILON * 8.0);
    }

    #[test]
    fn frame_readoff() {
        let g = NilmanifoldGrid::<f64>::new(1, 8).unwrap();
        let origin = g.linear_index(&[0, 0, 0]);
        assert_eq!(g.frame_coefficients(origin)[0], vec![1.0, 0.0, 0.0]);
        let p = g.linear_index(&[2, 4, 1]);
        let f = g.frame_coefficients(p);
        assert_eq!(f[0], vec![1.0, 0.0, 0.5]);
        assert_eq!(f[1], vec![0.0, 1.0, -0.25]);
        assert_eq!(f[2], vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn contact_form_annihilates_horizontal_frame_at_every_point() {
        let g = NilmanifoldGrid::<f64>::new(2, 4).unwrap();
        let model = g.model();
        for p in 0..g.len() {
            let theta = model.contact_form(&g.coords(p));
            let frame = g.frame_coefficients(p);
            let pair = |v: &Vec<f64>| v.iter().zip(&theta).map(|(a, b)| a * b).sum::<f64>();
            for v in &frame[..4] {
                assert_eq!(pair(v), 0.0);
            }
            assert_eq!(pair(&frame[4]), 1.0);
            // dθ(ξ, ·) = 0
            for v in &frame {
                assert_eq!(model.dtheta(&frame[4], v), 0.0);
            }
        }
    }

    #[test]
    fn levi_form_is_twice_identity() {
        let model = HeisenbergModel::new(2).unwrap();
        for z in [[0.0, 0.0, 0.0, 0.0, 0.0], [0.3, 0.9, 0.1, 0.5, 0.7]] {
            let l = model.levi_matrix(&z);
            for (i, row) in l.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    assert_eq!(v, if i == j { 2.0 } else { 0.0 });
                }
            }
            let g = model.webster_matrix(&z);
            assert_eq!(g[4][4], 1.0);
            assert_eq!(g[0][4], 0.0);
            assert_eq!(g[1][1], 2.0);
        }
    }

    #[test]
    fn frame_brackets() {
        let model = HeisenbergModel::new(2).unwrap();
        let z = [0.2, 0.7, 0.4, 0.1, 0.3];
        let fields = model.frame_fields();
        for (i, &a) in fields.iter().enumerate() {
            for &b in &fields[i + 1..] {
                let br = model
                    .frame_field::<f64>(a)
                    .bracket_at(&model.frame_field::<f64>(b), &z);
                let expected = match (a, b) {
                    (FrameField::X(p), FrameField::Y(q)) if p == q => {
                        vec![0.0, 0.0, 0.0, 0.0, -2.0]
                    }
                    _ => vec![0.0; 5],
                };
                assert_eq!(br, expected, "[{a:?}, {b:?}]");
            }
        }
    }
}
