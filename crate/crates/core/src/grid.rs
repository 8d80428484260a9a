//! Uniform periodic meshes in one or two dimensions.
//!
//! Nodes sit at `x_j = -extent/2 + j * spacing` on every axis, so the
//! primary domain is the half-open box `[-extent/2, extent/2)^dim`. Flat
//! node indices are row-major with the x axis slowest.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TdqmcError};

pub const MIN_POINTS_PER_AXIS: usize = 8;

/// A point in the simulation plane. One-dimensional runs use only `x`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Position(pub [f64; 2]);

impl Position {
    pub const fn x(x: f64) -> Self {
        Position([x, 0.0])
    }

    pub const fn xy(x: f64, y: f64) -> Self {
        Position([x, y])
    }

    #[inline]
    pub fn coord(&self, axis: usize) -> f64 {
        self.0[axis]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    extent: f64,
    points_per_axis: usize,
}

impl Grid {
    pub fn new(dim: usize, extent: f64, points_per_axis: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(TdqmcError::invalid("dim", format!("must be 1 or 2, got {dim}")));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(TdqmcError::invalid(
                "extent",
                format!("must be positive and finite, got {extent}"),
            ));
        }
        if points_per_axis < MIN_POINTS_PER_AXIS {
            return Err(TdqmcError::invalid(
                "points",
                format!("need at least {MIN_POINTS_PER_AXIS} points per axis, got {points_per_axis}"),
            ));
        }
        Ok(Grid {
            dim,
            extent,
            points_per_axis,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn extent(&self) -> f64 {
        self.extent
    }

    #[inline]
    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.extent / self.points_per_axis as f64
    }

    /// Integration weight of one node, `spacing^dim`.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total number of nodes, `points_per_axis^dim`.
    #[inline]
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.points_per_axis; self.dim]
    }

    #[inline]
    pub fn coordinate(&self, j: usize) -> f64 {
        -0.5 * self.extent + j as f64 * self.spacing()
    }

    /// Per-axis node indices of a flat index.
    #[inline]
    pub fn unflatten(&self, index: usize) -> [usize; 2] {
        let n = self.points_per_axis;
        match self.dim {
            1 => [index, 0],
            _ => [index / n, index % n],
        }
    }

    #[inline]
    pub fn flatten(&self, ix: usize, iy: usize) -> usize {
        match self.dim {
            1 => ix,
            _ => ix * self.points_per_axis + iy,
        }
    }

    pub fn node_position(&self, index: usize) -> Position {
        let [ix, iy] = self.unflatten(index);
        match self.dim {
            1 => Position::x(self.coordinate(ix)),
            _ => Position::xy(self.coordinate(ix), self.coordinate(iy)),
        }
    }

    pub fn node_positions(&self) -> impl Iterator<Item = Position> + '_ {
        (0..self.len()).map(move |i| self.node_position(i))
    }

    /// Maps a coordinate into `[-extent/2, extent/2)`.
    #[inline]
    pub fn wrap_coordinate(&self, x: f64) -> f64 {
        let half = 0.5 * self.extent;
        let mut w = x - self.extent * ((x + half) / self.extent).floor();
        if w >= half {
            w -= self.extent;
        }
        if w < -half {
            w = -half;
        }
        w
    }

    pub fn wrap_position(&self, r: Position) -> Position {
        let mut out = r;
        for axis in 0..self.dim {
            out.0[axis] = self.wrap_coordinate(r.0[axis]);
        }
        out
    }

    /// Shortest periodic image of a displacement along one axis.
    #[inline]
    pub fn min_image(&self, dx: f64) -> f64 {
        dx - self.extent * (dx / self.extent).round()
    }

    #[inline]
    pub fn distance_sq(&self, a: Position, b: Position) -> f64 {
        (0..self.dim)
            .map(|axis| {
                let d = self.min_image(a.0[axis] - b.0[axis]);
                d * d
            })
            .sum()
    }

    /// Lower-corner node indices and fractional offsets of the cell that
    /// contains `r` (after periodic wrap).
    #[inline]
    pub fn locate(&self, r: Position) -> ([usize; 2], [f64; 2]) {
        let n = self.points_per_axis;
        let h = self.spacing();
        let mut base = [0usize; 2];
        let mut frac = [0.0f64; 2];
        for axis in 0..self.dim {
            let u = (self.wrap_coordinate(r.0[axis]) + 0.5 * self.extent) / h;
            let f = u.floor();
            base[axis] = (f as usize).min(n - 1);
            frac[axis] = (u - f).clamp(0.0, 1.0);
        }
        (base, frac)
    }

    /// Nodes and multilinear weights of the cell containing `r`. The
    /// weights sum to one; unused slots (1D) carry zero weight.
    #[inline]
    pub fn cell_weights(&self, r: Position) -> [(usize, f64); 4] {
        let n = self.points_per_axis;
        let ([ix, iy], [fx, fy]) = self.locate(r);
        let ix1 = (ix + 1) % n;
        match self.dim {
            1 => [(ix, 1.0 - fx), (ix1, fx), (ix, 0.0), (ix, 0.0)],
            _ => {
                let iy1 = (iy + 1) % n;
                [
                    (self.flatten(ix, iy), (1.0 - fx) * (1.0 - fy)),
                    (self.flatten(ix1, iy), fx * (1.0 - fy)),
                    (self.flatten(ix, iy1), (1.0 - fx) * fy),
                    (self.flatten(ix1, iy1), fx * fy),
                ]
            }
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if dim == self.dim {
            Ok(())
        } else {
            Err(TdqmcError::DimensionMismatch {
                expected: self.dim,
                found: dim,
            })
        }
    }
}

/// Values that can be linearly interpolated between grid nodes.
pub trait Interpolant: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl Interpolant for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Interpolant for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
}

/// One scalar per grid node.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T = Complex64> {
    grid: Grid,
    values: Vec<T>,
}

pub type RealField = Field<f64>;

impl<T: Interpolant> Field<T> {
    pub fn new(grid: Grid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(TdqmcError::invalid(
                "values",
                format!("expected {} values, got {}", grid.len(), values.len()),
            ));
        }
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Field {
            grid,
            values: vec![T::zero(); grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(Position) -> T) -> Self {
        let values = grid.node_positions().map(&mut f).collect();
        Field { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Multilinear interpolation with periodic wraparound.
    pub fn interpolate(&self, r: Position) -> T {
        self.grid
            .cell_weights(r)
            .iter()
            .fold(T::zero(), |acc, &(node, w)| acc + self.values[node] * w)
    }
}

impl Field<Complex64> {
    pub fn from_real(field: &RealField) -> Self {
        Field {
            grid: field.grid,
            values: field.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    /// `sum |values|^2 * spacing^dim`.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn normalize(&mut self) -> f64 {
        let norm = self.norm_sq().sqrt();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            self.values.iter_mut().for_each(|v| *v *= inv);
        }
        norm
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.cell_volume()
    }

    pub fn density(&self) -> RealField {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| v.norm_sqr()).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }
}

impl Field<f64> {
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }
}
