//! Grids, gridded fields and the quadratures everything else is built on.
//!
//! All fields live on the cell centres of a uniform `n × n` grid covering
//! `[-L, L]²`. Values are stored row-major with the first index along `x₁`:
//! `values[i * n + j]` is the value at `(−L + (i+½)h, −L + (j+½)h)`.

use crate::error::{Error, Result};

/// A point of the plane.
pub type Point = [f64; 2];

/// Uniform square grid on `[-L, L]²` with `n` cells per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    half_width: f64,
    n: usize,
    spacing: f64,
}

impl GridSpec {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "L must be finite and > 0, got {half_width}"
            )));
        }
        if n < 16 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("n even, ≥ 16 required, got {n}")));
        }
        Ok(Self {
            half_width,
            n,
            spacing: 2.0 * half_width / n as f64,
        })
    }

    #[inline]
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.spacing * self.spacing
    }

    #[inline]
    #[allow(clippy::len_without_is_empty)] // grids are never empty
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    /// Coordinate of the `i`-th cell centre along either axis.
    #[inline]
    pub fn center(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.spacing
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> Point {
        [self.center(i), self.center(j)]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// Squared distance of cell `(i, j)` from the origin in units of `(h/2)²`.
    ///
    /// Integer valued, so ties between cells at the same radius are exact.
    #[inline]
    pub fn radius_key(&self, i: usize, j: usize) -> u64 {
        let a = 2 * i as i64 + 1 - self.n as i64;
        let b = 2 * j as i64 + 1 - self.n as i64;
        (a * a + b * b) as u64
    }

    /// The same lattice dilated by `factor` (half-width `factor·L`).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.half_width * factor, self.n)
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.n == other.n && self.half_width == other.half_width
    }

    pub fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                expected_n: self.n,
                expected_l: self.half_width,
                found_n: other.n,
                found_l: other.half_width,
            })
        }
    }

    /// Iterator over `(i, j, point)` in storage order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, Point)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).map(move |j| (i, j, self.point(i, j))))
    }
}

/// A real function sampled on the cell centres of a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
    time_tag: Option<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>, time_tag: Option<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::arg(format!(
                "expected {} values for an {}x{} grid, got {}",
                grid.len(),
                grid.n(),
                grid.n(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("ScalarField::new"));
        }
        Ok(Self { grid, values, time_tag })
    }

    pub(crate) fn from_parts(grid: GridSpec, values: Vec<f64>, time_tag: Option<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values, time_tag }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::from_parts(grid, vec![0.0; grid.len()], None)
    }

    /// Samples `f` at every cell centre.
    pub fn from_fn(grid: GridSpec, f: impl Fn(Point) -> f64) -> Self {
        let values = grid.cells().map(|(_, _, x)| f(x)).collect();
        Self::from_parts(grid, values, None)
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn time_tag(&self) -> Option<f64> {
        self.time_tag
    }

    pub fn with_time_tag(mut self, t: Option<f64>) -> Self {
        self.time_tag = t;
        self
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_parts(self.grid, self.values.iter().map(|&v| f(v)).collect(), self.time_tag)
    }

    /// `a·self + b·other`; keeps `self`'s time tag.
    pub fn axpby(&self, a: f64, other: &ScalarField, b: f64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Self::from_parts(self.grid, values, self.time_tag))
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.axpby(1.0, other, -1.0)
    }

    /// Bilinear interpolation at an arbitrary point; zero outside the grid.
    pub fn sample(&self, x: Point) -> f64 {
        bilinear(&self.grid, &self.values, x)
    }

    pub(crate) fn ensure_finite(self, op: &'static str) -> Result<Self> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(self)
        } else {
            Err(Error::NonFinite(op))
        }
    }
}

/// Two-component field on a grid (velocities `u` or `v`).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: GridSpec,
    u1: Vec<f64>,
    u2: Vec<f64>,
    time_tag: Option<f64>,
}

impl VectorField {
    pub fn new(grid: GridSpec, u1: Vec<f64>, u2: Vec<f64>) -> Result<Self> {
        if u1.len() != grid.len() || u2.len() != grid.len() {
            return Err(Error::arg("vector field component length does not match grid"));
        }
        if u1.iter().chain(&u2).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("VectorField::new"));
        }
        Ok(Self {
            grid,
            u1,
            u2,
            time_tag: None,
        })
    }

    pub(crate) fn from_parts(grid: GridSpec, u1: Vec<f64>, u2: Vec<f64>, time_tag: Option<f64>) -> Self {
        Self { grid, u1, u2, time_tag }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::from_parts(grid, vec![0.0; grid.len()], vec![0.0; grid.len()], None)
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(Point) -> Point) -> Self {
        let (u1, u2) = grid.cells().map(|(_, _, x)| f(x)).map(|u| (u[0], u[1])).unzip();
        Self::from_parts(grid, u1, u2, None)
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn u1(&self) -> &[f64] {
        &self.u1
    }

    #[inline]
    pub fn u2(&self) -> &[f64] {
        &self.u2
    }

    #[inline]
    pub fn time_tag(&self) -> Option<f64> {
        self.time_tag
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Point {
        let k = self.grid.index(i, j);
        [self.u1[k], self.u2[k]]
    }

    pub fn sample(&self, x: Point) -> Point {
        [bilinear(&self.grid, &self.u1, x), bilinear(&self.grid, &self.u2, x)]
    }

    /// Pointwise magnitude maximum.
    pub fn max_norm(&self) -> f64 {
        self.u1.iter().zip(&self.u2).fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    /// Centered-difference divergence on interior cells; the outermost ring is zero.
    pub fn divergence(&self) -> ScalarField {
        let n = self.grid.n();
        let h2 = 2.0 * self.grid.spacing();
        let mut div = vec![0.0; self.grid.len()];
        for i in 1..n - 1 {
            for j in 1..n - 1 {
                let k = self.grid.index(i, j);
                div[k] = (self.u1[k + n] - self.u1[k - n]) / h2 + (self.u2[k + 1] - self.u2[k - 1]) / h2;
            }
        }
        ScalarField::from_parts(self.grid, div, self.time_tag)
    }

    /// Centered-difference `∂₁u₂ − ∂₂u₁` on interior cells; the outermost ring is zero.
    pub fn curl(&self) -> ScalarField {
        let n = self.grid.n();
        let h2 = 2.0 * self.grid.spacing();
        let mut curl = vec![0.0; self.grid.len()];
        for i in 1..n - 1 {
            for j in 1..n - 1 {
                let k = self.grid.index(i, j);
                curl[k] = (self.u2[k + n] - self.u2[k - n]) / h2 - (self.u1[k + 1] - self.u1[k - 1]) / h2;
            }
        }
        ScalarField::from_parts(self.grid, curl, self.time_tag)
    }
}

/// Bilinear interpolation of cell-centred data with zero extension.
pub(crate) fn bilinear(grid: &GridSpec, values: &[f64], x: Point) -> f64 {
    let n = grid.n() as isize;
    let h = grid.spacing();
    let a = (x[0] + grid.half_width()) / h - 0.5;
    let b = (x[1] + grid.half_width()) / h - 0.5;
    if !(a > -1.0 && b > -1.0 && a < n as f64 && b < n as f64) {
        return 0.0;
    }
    let i0 = a.floor();
    let j0 = b.floor();
    let fa = a - i0;
    let fb = b - j0;
    let (i0, j0) = (i0 as isize, j0 as isize);
    let at = |i: isize, j: isize| -> f64 {
        if i < 0 || j < 0 || i >= n || j >= n {
            0.0
        } else {
            values[(i * n + j) as usize]
        }
    };
    (1.0 - fa) * ((1.0 - fb) * at(i0, j0) + fb * at(i0, j0 + 1))
        + fa * ((1.0 - fb) * at(i0 + 1, j0) + fb * at(i0 + 1, j0 + 1))
}

/// Midpoint quadrature of `∫ f dx`.
pub fn integrate(f: &ScalarField) -> f64 {
    f.grid.cell_area() * f.values.iter().sum::<f64>()
}

/// Midpoint quadrature of `∫ |x|² f dx`.
pub fn second_moment(f: &ScalarField) -> f64 {
    let g = &f.grid;
    let s: f64 = g
        .cells()
        .zip(&f.values)
        .map(|((_, _, x), v)| (x[0] * x[0] + x[1] * x[1]) * v)
        .sum();
    g.cell_area() * s
}

/// Discrete `L^p` norm; pass `f64::INFINITY` for the sup norm.
pub fn lp_norm(f: &ScalarField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::arg(format!("L^p norm needs p ≥ 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let area = f.grid.cell_area();
    if p == 1.0 {
        return Ok(area * f.values.iter().map(|v| v.abs()).sum::<f64>());
    }
    if p == 2.0 {
        return Ok((area * f.values.iter().map(|v| v * v).sum::<f64>()).sqrt());
    }
    // scale by the sup norm to keep |v|^p representable
    let m = f.max_abs();
    if m == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = f.values.iter().map(|v| (v.abs() / m).powf(p)).sum();
    Ok(m * (area * s).powf(1.0 / p))
}

/// `x ↦ λ² f(λx)`, the scaling symmetry of the vorticity equation.
///
/// Values are read back by bilinear interpolation on the same grid. A time
/// tag `t` becomes `t/λ²`.
pub fn rescale_solution(f: &ScalarField, lambda: f64) -> Result<ScalarField> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::arg(format!("scaling factor must be > 0, got {lambda}")));
    }
    let grid = f.grid;
    let l2 = lambda * lambda;
    let values = grid
        .cells()
        .map(|(_, _, x)| l2 * bilinear(&grid, &f.values, [lambda * x[0], lambda * x[1]]))
        .collect();
    ScalarField::from_parts(grid, values, f.time_tag.map(|t| t / l2)).ensure_finite("rescale_solution")
}
