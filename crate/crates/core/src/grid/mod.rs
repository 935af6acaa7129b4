//! Periodic-grid representation of one-particle wave functions.
//!
//! Everything downstream (effective-equation steppers, energy functionals,
//! convergence studies) works on complex fields sampled on a periodic box
//! in one or three dimensions, with Fourier-multiplier operators applied
//! through the unitary DFT.

mod convolve;
mod field;
mod multiplier;
mod transform;

pub use convolve::{convolve, convolve_samples, KernelSpec, COULOMB_CELL_AVERAGE};
pub use field::{Field, NormKind};
pub use multiplier::{apply_multiplier, multiplier_table, multiplier_value, MultiplierKind};
pub use transform::{transform_forward, transform_inverse, SpectralField};
pub(crate) use transform::{forward_in_place as forward_values, inverse_in_place as inverse_values};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("unsupported dimension {0}; only 1 and 3 are supported")]
    UnsupportedDimension(usize),
    #[error("points per axis must be a power of two, got {0}")]
    PointsNotPowerOfTwo(usize),
    #[error("box length must be positive, got {0}")]
    NonPositiveBoxLength(f64),
    #[error("grid specs do not match")]
    GridMismatch,
    #[error("coulomb3d multiplier used without a declared zero-mode value")]
    UndeclaredZeroMode,
    #[error("coulomb3d multiplier requires a 3-dimensional grid")]
    CoulombNeedsThreeDimensions,
    #[error("custom multiplier table has {got} samples, grid has {expected}")]
    MultiplierTableMismatch { got: usize, expected: usize },
    #[error("kernel samples contain non-finite values")]
    NonFiniteKernel,
    #[error("field contains non-finite amplitudes")]
    NonFiniteField,
    #[error("multiplier {0} has no analytic dispersion value")]
    NoAnalyticValue(&'static str),
    #[error("regularized coulomb kernel with alpha = 0 is only defined on 3d grids")]
    BareCoulombNeedsThreeDimensions,
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad field record: {0}")]
    BadRecord(String),
}

/// Geometry of a periodic box sampled on a uniform grid.
///
/// Positions are centered, `x_j = (j - n/2) * spacing`, so the box is
/// `[-L/2, L/2)` per axis. Frequencies follow the usual DFT layout with
/// `xi_k = 2 pi k / L` for `k in [-n/2, n/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dimension: usize,
    points_per_axis: usize,
    box_length: f64,
}

impl GridSpec {
    pub fn new(dimension: usize, points_per_axis: usize, box_length: f64) -> Result<Self, GridError> {
        if dimension != 1 && dimension != 3 {
            return Err(GridError::UnsupportedDimension(dimension));
        }
        if points_per_axis < 2 || !points_per_axis.is_power_of_two() {
            return Err(GridError::PointsNotPowerOfTwo(points_per_axis));
        }
        if !(box_length > 0.0) || !box_length.is_finite() {
            return Err(GridError::NonPositiveBoxLength(box_length));
        }
        Ok(Self { dimension, points_per_axis, box_length })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.points_per_axis as f64
    }

    pub fn total_points(&self) -> usize {
        self.points_per_axis.pow(self.dimension as u32)
    }

    /// Quadrature weight of one grid cell, `spacing^dimension`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    pub fn box_volume(&self) -> f64 {
        self.box_length.powi(self.dimension as i32)
    }

    /// Centered coordinate of a single-axis index.
    pub fn coordinate(&self, index: usize) -> f64 {
        (index as f64 - (self.points_per_axis / 2) as f64) * self.spacing()
    }

    /// Minimum-image displacement of a single-axis index offset, in `[-L/2, L/2)`.
    pub fn displacement(&self, index: usize) -> f64 {
        let n = self.points_per_axis;
        let signed = if index <= n / 2 - 1 { index as isize } else { index as isize - n as isize };
        signed as f64 * self.spacing()
    }

    /// Angular frequency of a single-axis index in DFT layout.
    pub fn frequency(&self, index: usize) -> f64 {
        let n = self.points_per_axis;
        let signed = if index <= n / 2 - 1 { index as isize } else { index as isize - n as isize };
        2.0 * std::f64::consts::PI * signed as f64 / self.box_length
    }

    /// Per-axis frequency table in DFT layout.
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.points_per_axis).map(|k| self.frequency(k)).collect()
    }

    /// Largest |xi|^2 on the grid's frequency set.
    pub fn max_frequency_sq(&self) -> f64 {
        let nyq = std::f64::consts::PI / self.spacing();
        nyq * nyq * self.dimension as f64
    }

    /// Decompose a flat row-major index into per-axis indices.
    pub fn unravel(&self, flat: usize) -> [usize; 3] {
        let n = self.points_per_axis;
        match self.dimension {
            1 => [flat, 0, 0],
            _ => [flat / (n * n), (flat / n) % n, flat % n],
        }
    }

    /// Centered position of a flat index; only the first `dimension` entries are meaningful.
    pub fn position(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let mut out = [0.0; 3];
        for d in 0..self.dimension {
            out[d] = self.coordinate(idx[d]);
        }
        out
    }

    /// Squared |xi| of a flat spectral index.
    pub fn frequency_sq(&self, flat: usize) -> f64 {
        let idx = self.unravel(flat);
        let mut s = 0.0;
        for d in 0..self.dimension {
            let xi = self.frequency(idx[d]);
            s += xi * xi;
        }
        s
    }

    /// Squared minimum-image distance of a flat displacement index.
    pub fn displacement_sq(&self, flat: usize) -> f64 {
        let idx = self.unravel(flat);
        let mut s = 0.0;
        for d in 0..self.dimension {
            let r = self.displacement(idx[d]);
            s += r * r;
        }
        s
    }
}
