//! The bounded planar frame every field and region lives on.
//!
//! The frame is split into `nx * ny` cells. Samples sit at cell centers and
//! cells are addressed by `(i, j)` with `i` along x and `j` along y; the flat
//! index is `j * nx + i`. The outermost ring of cells is the *border*: it stands
//! in for the neighborhood of infinity, so fields vanish there and open regions
//! never touch it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Frame {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        let frame = Frame { x_min, x_max, y_min, y_max, nx, ny };
        frame.validate()?;
        Ok(frame)
    }

    /// Square frame `[lo, hi]^2` with `n * n` cells.
    pub fn square(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(lo, hi, lo, hi, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        let coords = [self.x_min, self.x_max, self.y_min, self.y_max];
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Frame("non-finite frame coordinate".into()));
        }
        if !(self.x_min < self.x_max && self.y_min < self.y_max) {
            return Err(Error::Frame(format!(
                "degenerate extent [{}, {}] x [{}, {}]",
                self.x_min, self.x_max, self.y_min, self.y_max
            )));
        }
        if self.nx < MIN_CELLS || self.ny < MIN_CELLS {
            return Err(Error::Frame(format!(
                "need at least {MIN_CELLS} cells per axis, got {}x{}",
                self.nx, self.ny
            )));
        }
        if !(self.cell_width() > 0.0 && self.cell_height() > 0.0) {
            return Err(Error::Frame("cell size underflows".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn cell_width(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    #[inline]
    pub fn cell_height(&self) -> f64 {
        (self.y_max - self.y_min) / self.ny as f64
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.cell_width() * self.cell_height()
    }

    /// Smaller of the two cell sides.
    #[inline]
    pub fn min_cell(&self) -> f64 {
        self.cell_width().min(self.cell_height())
    }

    #[inline]
    pub fn cell_diagonal(&self) -> f64 {
        self.cell_width().hypot(self.cell_height())
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x_min + (i as f64 + 0.5) * self.cell_width(),
            self.y_min + (j as f64 + 0.5) * self.cell_height(),
        )
    }

    #[inline]
    pub fn is_border(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    /// Cell containing `(x, y)`, or `None` outside the frame.
    pub fn cell_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        if !(x >= self.x_min && x < self.x_max && y >= self.y_min && y < self.y_max) {
            return None;
        }
        let i = ((x - self.x_min) / self.cell_width()).floor() as usize;
        let j = ((y - self.y_min) / self.cell_height()).floor() as usize;
        Some((i.min(self.nx - 1), j.min(self.ny - 1)))
    }

    /// Whether the point lies strictly inside the frame.
    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x > self.x_min && x < self.x_max && y > self.y_min && y < self.y_max
    }

    /// Same frame at a different resolution.
    pub fn with_resolution(&self, nx: usize, ny: usize) -> Result<Self> {
        Self::new(self.x_min, self.x_max, self.y_min, self.y_max, nx, ny)
    }
}
