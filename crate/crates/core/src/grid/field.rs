//! Complex fields on a periodic grid, their norms, and the flat binary
//! snapshot record shared with the command line tools.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::transform::transform_forward;
use super::{GridError, GridSpec};

/// A complex one-particle wave function sampled on a [`GridSpec`].
#[derive(Debug, Clone)]
pub struct Field {
    grid: GridSpec,
    values: Vec<Complex64>,
}

/// Norm kinds computed spectrally from a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L2,
    /// Sobolev H^{1/2} norm, the l2 norm after the quarter multiplier.
    HHalf,
    H1,
    /// Quadratic form <f, sqrt(1 - lap) f>; a value, not a norm.
    KineticSr,
}

impl Field {
    pub fn from_values(grid: GridSpec, values: Vec<Complex64>) -> Result<Self, GridError> {
        if values.len() != grid.total_points() {
            return Err(GridError::GridMismatch);
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(GridError::NonFiniteField);
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        Self { grid: *grid, values: vec![Complex64::default(); grid.total_points()] }
    }

    pub fn constant(grid: &GridSpec, c: Complex64) -> Self {
        Self { grid: *grid, values: vec![c; grid.total_points()] }
    }

    /// Sample a function of the centered position.
    pub fn from_fn(grid: &GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.total_points())
            .map(|flat| {
                let pos = grid.position(flat);
                f(&pos[..grid.dimension()])
            })
            .collect();
        Self { grid: *grid, values }
    }

    /// Normalized Gaussian packet `exp(-|x-c|^2/(4 w^2) + i k.x)`.
    pub fn gaussian_packet(grid: &GridSpec, width: f64, center: &[f64], momentum: &[f64]) -> Self {
        let mut f = Self::from_fn(grid, |x| {
            let mut r2 = 0.0;
            let mut phase = 0.0;
            for d in 0..x.len() {
                let dx = x[d] - center.get(d).copied().unwrap_or(0.0);
                r2 += dx * dx;
                phase += momentum.get(d).copied().unwrap_or(0.0) * x[d];
            }
            Complex64::from_polar((-r2 / (4.0 * width * width)).exp(), phase)
        });
        f.normalize();
        f
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// |f|^2 per grid point.
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn max_density(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        self.norm(NormKind::L2)
    }

    /// Rescale to unit L2 norm. No-op on the zero field.
    pub fn normalize(&mut self) {
        let n = self.l2_norm();
        if n > 0.0 {
            let s = 1.0 / n;
            for v in &mut self.values {
                *v *= s;
            }
        }
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        let w = self.grid.cell_volume();
        match kind {
            NormKind::L2 => (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * w).sqrt(),
            NormKind::HHalf | NormKind::H1 | NormKind::KineticSr => {
                let spec = transform_forward(self);
                let mut acc = 0.0;
                for (flat, v) in spec.values().iter().enumerate() {
                    let xi2 = self.grid.frequency_sq(flat);
                    let m = match kind {
                        NormKind::HHalf | NormKind::KineticSr => (1.0 + xi2).sqrt(),
                        NormKind::H1 => 1.0 + xi2,
                        NormKind::L2 => unreachable!(),
                    };
                    acc += m * v.norm_sqr();
                }
                acc *= w;
                if kind == NormKind::KineticSr {
                    acc
                } else {
                    acc.sqrt()
                }
            }
        }
    }

    /// Spectral kinetic energy <f, m f> for a multiplier table.
    pub fn quadratic_form(&self, multiplier: &[f64]) -> f64 {
        let spec = transform_forward(self);
        let w = self.grid.cell_volume();
        spec.values()
            .iter()
            .zip(multiplier)
            .map(|(v, m)| m * v.norm_sqr())
            .sum::<f64>()
            * w
    }

    /// Write the flat binary record: u32 dimension, u32 points per axis,
    /// f64 box length, then row-major interleaved re/im little-endian f64.
    pub fn write_binary(&self, mut sink: impl Write) -> Result<(), GridError> {
        sink.write_all(&(self.grid.dimension() as u32).to_le_bytes())?;
        sink.write_all(&(self.grid.points_per_axis() as u32).to_le_bytes())?;
        sink.write_all(&self.grid.box_length().to_le_bytes())?;
        for v in &self.values {
            sink.write_all(&v.re.to_le_bytes())?;
            sink.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(mut source: impl Read) -> Result<Self, GridError> {
        let mut u32buf = [0u8; 4];
        let mut f64buf = [0u8; 8];
        source.read_exact(&mut u32buf)?;
        let dimension = u32::from_le_bytes(u32buf) as usize;
        source.read_exact(&mut u32buf)?;
        let points = u32::from_le_bytes(u32buf) as usize;
        source.read_exact(&mut f64buf)?;
        let box_length = f64::from_le_bytes(f64buf);
        let grid = GridSpec::new(dimension, points, box_length)
            .map_err(|e| GridError::BadRecord(e.to_string()))?;
        let mut values = Vec::with_capacity(grid.total_points());
        for _ in 0..grid.total_points() {
            source.read_exact(&mut f64buf)?;
            let re = f64::from_le_bytes(f64buf);
            source.read_exact(&mut f64buf)?;
            let im = f64::from_le_bytes(f64buf);
            values.push(Complex64::new(re, im));
        }
        Field::from_values(grid, values)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), GridError> {
        let file = std::fs::File::create(path)?;
        self.write_binary(std::io::BufWriter::new(file))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GridError> {
        let file = std::fs::File::open(path)?;
        Self::read_binary(std::io::BufReader::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_has_zero_norms() {
        let grid = GridSpec::new(1, 16, 4.0).unwrap();
        let f = Field::zeros(&grid);
        for kind in [NormKind::L2, NormKind::HHalf, NormKind::H1, NormKind::KineticSr] {
            assert_eq!(f.norm(kind), 0.0);
        }
    }

    #[test]
    fn normalized_constant_has_unit_h_half() {
        let grid = GridSpec::new(3, 8, 2.5).unwrap();
        let mut f = Field::constant(&grid, Complex64::new(2.0, 1.0));
        f.normalize();
        assert!((f.norm(NormKind::L2) - 1.0).abs() < 1e-12);
        assert!((f.norm(NormKind::HHalf) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plane_wave_h_half_matches_scalar_multiplier() {
        // normalized plane wave: h_half^2 = sqrt(1 + |xi0|^2)
        let grid = GridSpec::new(1, 64, 8.0).unwrap();
        let mode = 6;
        let xi0 = grid.frequency(mode);
        let mut f = Field::from_fn(&grid, |x| Complex64::from_polar(1.0, xi0 * x[0]));
        f.normalize();
        let h = f.norm(NormKind::HHalf);
        let expected = (1.0 + xi0 * xi0).sqrt();
        assert!((h * h - expected).abs() < 1e-10, "{} vs {expected}", h * h);
        // kinetic_sr is the same quadratic form
        assert!((f.norm(NormKind::KineticSr) - expected).abs() < 1e-10);
    }

    #[test]
    fn binary_record_round_trips_exactly() {
        let grid = GridSpec::new(1, 32, 7.5).unwrap();
        let f = Field::from_fn(&grid, |x| Complex64::new(x[0].sin(), x[0].cos() * 0.25));
        let mut buf = Vec::new();
        f.write_binary(&mut buf).unwrap();
        let g = Field::read_binary(buf.as_slice()).unwrap();
        assert_eq!(f.grid(), g.grid());
        for (a, b) in f.values().iter().zip(g.values()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn rejects_non_finite_values() {
        let grid = GridSpec::new(1, 16, 4.0).unwrap();
        let mut vals = vec![Complex64::default(); 16];
        vals[3] = Complex64::new(f64::NAN, 0.0);
        assert!(Field::from_values(grid, vals).is_err());
    }
}
