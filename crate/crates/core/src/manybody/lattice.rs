//! Periodic 1D lattice geometry and spectrally-defined one-body operators.
//!
//! The lattice mirrors the grid module's conventions (centered positions,
//! DFT frequency layout) but allows any site count, and its operators are
//! small dense matrices rather than multiplier tables.

use std::cell::RefCell;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::{multiplier_value, MultiplierKind};

use super::ManyBodyError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub sites: usize,
    pub box_length: f64,
}

impl Lattice {
    pub fn new(sites: usize, box_length: f64) -> Result<Self, ManyBodyError> {
        if sites < 2 || !(box_length > 0.0) {
            return Err(ManyBodyError::BadLattice { sites, box_length });
        }
        Ok(Self { sites, box_length })
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.sites as f64
    }

    /// Angular frequency of mode k in DFT layout.
    pub fn frequency(&self, k: usize) -> f64 {
        let m = self.sites;
        let signed = if k <= (m - 1) / 2 { k as isize } else { k as isize - m as isize };
        2.0 * std::f64::consts::PI * signed as f64 / self.box_length
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.sites).map(|k| self.frequency(k)).collect()
    }

    /// Centered coordinate of a site.
    pub fn coordinate(&self, site: usize) -> f64 {
        (site as f64 - (self.sites / 2) as f64) * self.spacing()
    }

    /// Minimum-image displacement of a site offset.
    pub fn displacement(&self, offset: usize) -> f64 {
        let m = self.sites;
        let signed =
            if offset <= (m - 1) / 2 { offset as isize } else { offset as isize - m as isize };
        signed as f64 * self.spacing()
    }

    /// Multiplier values on the lattice frequency set.
    pub fn multiplier_diag(&self, kind: &MultiplierKind) -> Result<Vec<f64>, ManyBodyError> {
        (0..self.sites)
            .map(|k| {
                let xi = self.frequency(k);
                multiplier_value(kind, xi * xi).map_err(ManyBodyError::from)
            })
            .collect()
    }

    /// Dense one-body operator F^dag diag(m(xi)) F; real symmetric since
    /// the multiplier is even in xi.
    pub fn multiplier_matrix(&self, kind: &MultiplierKind) -> Result<DMatrix<Complex64>, ManyBodyError> {
        let diag = self.multiplier_diag(kind)?;
        let m = self.sites;
        let mut out = DMatrix::<Complex64>::zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                let mut acc = Complex64::default();
                for (k, dk) in diag.iter().enumerate() {
                    let phase = self.frequency(k) * (self.coordinate(a) - self.coordinate(b));
                    acc += dk * Complex64::from_polar(1.0, phase);
                }
                out[(a, b)] = acc / m as f64;
            }
        }
        // clean the rounding-level imaginary residue, keeping exact hermiticity
        for a in 0..m {
            for b in 0..m {
                out[(a, b)] = Complex64::new(out[(a, b)].re, 0.0);
            }
        }
        for a in 0..m {
            for b in (a + 1)..m {
                let v = 0.5 * (out[(a, b)].re + out[(b, a)].re);
                out[(a, b)] = Complex64::new(v, 0.0);
                out[(b, a)] = Complex64::new(v, 0.0);
            }
        }
        Ok(out)
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

/// In-place unnormalized DFT of a lattice vector.
pub fn lattice_dft(values: &mut [Complex64], direction: FftDirection) {
    let fft = plan(values.len(), direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(values, &mut scratch);
}

/// Plain circular convolution sum_y kernel(x - y) density(y).
pub fn lattice_convolve(density: &[f64], kernel: &[f64]) -> Vec<f64> {
    let m = density.len();
    let mut d: Vec<Complex64> = density.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut k: Vec<Complex64> = kernel.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    lattice_dft(&mut d, FftDirection::Forward);
    lattice_dft(&mut k, FftDirection::Forward);
    for (dv, kv) in d.iter_mut().zip(&k) {
        *dv *= *kv;
    }
    lattice_dft(&mut d, FftDirection::Inverse);
    d.iter().map(|v| v.re / m as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplier_matrix_diagonalizes_plane_waves() {
        let lat = Lattice::new(6, 3.0).unwrap();
        let h = lat.multiplier_matrix(&MultiplierKind::Laplacian).unwrap();
        for k in 0..6 {
            let xi = lat.frequency(k);
            let wave: Vec<Complex64> = (0..6)
                .map(|a| Complex64::from_polar(1.0, xi * lat.coordinate(a)))
                .collect();
            for a in 0..6 {
                let mut acc = Complex64::default();
                for b in 0..6 {
                    acc += h[(a, b)] * wave[b];
                }
                assert!((acc - wave[a] * xi * xi).norm() < 1e-10, "mode {k}");
            }
        }
    }

    #[test]
    fn semirelativistic_matrix_is_symmetric_and_positive() {
        let lat = Lattice::new(9, 4.5).unwrap();
        let h = lat.multiplier_matrix(&MultiplierKind::SemiRelativistic).unwrap();
        for a in 0..9 {
            for b in 0..9 {
                assert_eq!(h[(a, b)], h[(b, a)]);
            }
        }
        // quadratic form against a random-ish real vector stays >= |v|^2
        let v: Vec<f64> = (0..9).map(|i| ((i * 7 + 3) % 5) as f64 - 2.0).collect();
        let mut quad = 0.0;
        let mut norm = 0.0;
        for a in 0..9 {
            norm += v[a] * v[a];
            for b in 0..9 {
                quad += v[a] * h[(a, b)].re * v[b];
            }
        }
        assert!(quad >= norm - 1e-9, "sqrt(1-lap) >= 1: {quad} vs {norm}");
    }

    #[test]
    fn convolution_against_direct_sum() {
        let density = [0.3, 0.1, 0.0, 0.2, 0.4];
        let kernel = [1.0, 0.5, 0.2, 0.2, 0.5];
        let conv = lattice_convolve(&density, &kernel);
        for x in 0..5 {
            let mut direct = 0.0;
            for y in 0..5 {
                direct += kernel[(x + 5 - y) % 5] * density[y];
            }
            assert!((conv[x] - direct).abs() < 1e-12);
        }
    }
}
