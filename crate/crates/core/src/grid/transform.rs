//! Unitary DFT between position and spectral samples.
//!
//! The convention is fixed globally: forward = DFT / sqrt(P), inverse =
//! IDFT * sqrt(P) / P, with P the total point count, so a round trip is the
//! identity and the plain vector norm is preserved in both directions.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::{Field, GridError, GridSpec};

/// Spectral samples of a [`Field`] under the unitary transform convention.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl SpectralField {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }


    /// l2 norm under the same cell-volume quadrature weight as position
    /// fields, so Parseval is an exact statement.
    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.cell_volume();
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * w).sqrt()
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

/// In-place unnormalized DFT along every axis of a row-major cube.
pub(crate) fn dft_all_axes(values: &mut [Complex64], grid: &GridSpec, direction: FftDirection) {
    let n = grid.points_per_axis();
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    match grid.dimension() {
        1 => fft.process_with_scratch(values, &mut scratch),
        _ => {
            // z axis: contiguous lines
            for line in values.chunks_exact_mut(n) {
                fft.process_with_scratch(line, &mut scratch);
            }
            // y axis: stride n
            let mut buf = vec![Complex64::default(); n];
            for ix in 0..n {
                let plane = ix * n * n;
                for iz in 0..n {
                    for iy in 0..n {
                        buf[iy] = values[plane + iy * n + iz];
                    }
                    fft.process_with_scratch(&mut buf, &mut scratch);
                    for iy in 0..n {
                        values[plane + iy * n + iz] = buf[iy];
                    }
                }
            }
            // x axis: stride n^2
            for iy in 0..n {
                for iz in 0..n {
                    let base = iy * n + iz;
                    for ix in 0..n {
                        buf[ix] = values[ix * n * n + base];
                    }
                    fft.process_with_scratch(&mut buf, &mut scratch);
                    for ix in 0..n {
                        values[ix * n * n + base] = buf[ix];
                    }
                }
            }
        }
    }
}

pub fn transform_forward(field: &Field) -> SpectralField {
    let grid = *field.grid();
    let mut values = field.values().to_vec();
    dft_all_axes(&mut values, &grid, FftDirection::Forward);
    let scale = 1.0 / (grid.total_points() as f64).sqrt();
    for v in &mut values {
        *v *= scale;
    }
    SpectralField { grid, values }
}

pub fn transform_inverse(spectral: &SpectralField) -> Field {
    let grid = spectral.grid;
    let mut values = spectral.values.clone();
    dft_all_axes(&mut values, &grid, FftDirection::Inverse);
    let scale = 1.0 / (grid.total_points() as f64).sqrt();
    for v in &mut values {
        *v *= scale;
    }
    Field::from_values(grid, values).expect("transform preserves finiteness")
}

/// Forward transform reusing the field's buffer; used by the steppers.
pub(crate) fn forward_in_place(values: &mut [Complex64], grid: &GridSpec) {
    dft_all_axes(values, grid, FftDirection::Forward);
    let scale = 1.0 / (grid.total_points() as f64).sqrt();
    for v in values {
        *v *= scale;
    }
}

pub(crate) fn inverse_in_place(values: &mut [Complex64], grid: &GridSpec) {
    dft_all_axes(values, grid, FftDirection::Inverse);
    let scale = 1.0 / (grid.total_points() as f64).sqrt();
    for v in values {
        *v *= scale;
    }
}

/// Guard for binary operations on two fields.
pub(crate) fn require_same_grid(a: &GridSpec, b: &GridSpec) -> Result<(), GridError> {
    if a == b {
        Ok(())
    } else {
        Err(GridError::GridMismatch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn wave(grid: &GridSpec, mode: usize) -> Field {
        Field::from_fn(grid, |x| Complex64::from_polar(1.0, grid.frequency(mode) * x[0]))
    }

    #[test]
    fn constant_field_concentrates_on_zero_mode() {
        let grid = GridSpec::new(1, 64, 8.0).unwrap();
        let c = Complex64::new(0.3, -0.2);
        let f = Field::constant(&grid, c);
        let spec = transform_forward(&f);
        let expected = c * (grid.total_points() as f64).sqrt();
        assert!((spec.values()[0] - expected).norm() < 1e-12);
        for v in &spec.values()[1..] {
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip_identity() {
        let grid = GridSpec::new(3, 8, 5.0).unwrap();
        let f = Field::from_fn(&grid, |x| {
            Complex64::new((x[0] + 0.3 * x[1]).sin(), (x[2] * 1.7).cos())
        });
        let back = transform_inverse(&transform_forward(&f));
        let num: f64 = f
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
        assert!((num / den).sqrt() < 1e-12);
    }

    #[test]
    fn plane_wave_hits_single_mode() {
        let grid = GridSpec::new(1, 32, 4.0).unwrap();
        let f = wave(&grid, 5);
        let spec = transform_forward(&f);
        for (k, v) in spec.values().iter().enumerate() {
            if k == 5 {
                assert!((v.norm() - (grid.total_points() as f64).sqrt()).abs() < 1e-10);
            } else {
                assert!(v.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn parseval_on_random_fields() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &(dim, n) in &[(1usize, 64usize), (3, 8)] {
            let grid = GridSpec::new(dim, n, 3.0).unwrap();
            let f = Field::from_values(
                grid,
                (0..grid.total_points())
                    .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                    .collect(),
            )
            .unwrap();
            let spec = transform_forward(&f);
            let a = f.norm(crate::grid::NormKind::L2);
            let b = spec.l2_norm();
            assert!((a - b).abs() / a < 1e-12, "parseval violated: {a} vs {b}");
        }
    }
}
