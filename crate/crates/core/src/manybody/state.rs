//! Normalized amplitude vectors over the symmetric basis.

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;

use super::{ManyBodyError, SymmetricBasis};

#[derive(Debug, Clone)]
pub struct ManyBodyState {
    basis: Arc<SymmetricBasis>,
    amplitudes: Vec<Complex64>,
}

impl ManyBodyState {
    /// Wrap amplitudes, requiring unit norm within 1e-10.
    pub fn new(basis: Arc<SymmetricBasis>, amplitudes: Vec<Complex64>) -> Result<Self, ManyBodyError> {
        if amplitudes.len() != basis.dim() {
            return Err(ManyBodyError::DimensionMismatch {
                got: amplitudes.len(),
                expected: basis.dim(),
            });
        }
        let norm = l2(&amplitudes);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(ManyBodyError::NotNormalized { norm });
        }
        Ok(Self { basis, amplitudes })
    }

    /// Wrap and rescale arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(
        basis: Arc<SymmetricBasis>,
        mut amplitudes: Vec<Complex64>,
    ) -> Result<Self, ManyBodyError> {
        if amplitudes.len() != basis.dim() {
            return Err(ManyBodyError::DimensionMismatch {
                got: amplitudes.len(),
                expected: basis.dim(),
            });
        }
        let norm = l2(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(ManyBodyError::NotNormalized { norm });
        }
        let s = 1.0 / norm;
        for a in &mut amplitudes {
            *a *= s;
        }
        Ok(Self { basis, amplitudes })
    }

    /// The factorized state phi^{(x) N}: amplitude on (n_1, ..., n_M) is
    /// sqrt(N!/prod n_i!) prod phi(i)^{n_i}.
    pub fn product(basis: Arc<SymmetricBasis>, orbital: &[Complex64]) -> Result<Self, ManyBodyError> {
        if orbital.len() != basis.sites() {
            return Err(ManyBodyError::DimensionMismatch {
                got: orbital.len(),
                expected: basis.sites(),
            });
        }
        let norm = l2(orbital);
        if (norm - 1.0).abs() > 1e-8 {
            return Err(ManyBodyError::NotNormalized { norm });
        }
        let n = basis.n_particles();
        let mut factorials = vec![1.0f64; n + 1];
        for i in 1..=n {
            factorials[i] = factorials[i - 1] * i as f64;
        }
        let mut amplitudes = Vec::with_capacity(basis.dim());
        for idx in 0..basis.dim() {
            let occ = basis.occupation(idx);
            let mut denom = 1.0;
            let mut amp = Complex64::new(1.0, 0.0);
            for (site, &count) in occ.iter().enumerate() {
                denom *= factorials[count as usize];
                amp *= orbital[site].powu(count as u32);
            }
            amplitudes.push(amp * (factorials[n] / denom).sqrt());
        }
        Self::normalized(basis, amplitudes)
    }

    pub fn basis(&self) -> &Arc<SymmetricBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2(&self.amplitudes)
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Flat binary snapshot: u32 particle count, u32 site count, then
    /// interleaved little-endian re/im amplitudes in basis order.
    pub fn write_binary(&self, mut sink: impl Write) -> Result<(), ManyBodyError> {
        sink.write_all(&(self.basis.n_particles() as u32).to_le_bytes())?;
        sink.write_all(&(self.basis.sites() as u32).to_le_bytes())?;
        for a in &self.amplitudes {
            sink.write_all(&a.re.to_le_bytes())?;
            sink.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(mut source: impl Read, cap: usize) -> Result<Self, ManyBodyError> {
        let mut u32buf = [0u8; 4];
        source.read_exact(&mut u32buf)?;
        let n = u32::from_le_bytes(u32buf) as usize;
        source.read_exact(&mut u32buf)?;
        let m = u32::from_le_bytes(u32buf) as usize;
        let basis = Arc::new(SymmetricBasis::with_cap(n, m, cap)?);
        let mut f64buf = [0u8; 8];
        let mut amplitudes = Vec::with_capacity(basis.dim());
        for _ in 0..basis.dim() {
            source.read_exact(&mut f64buf)?;
            let re = f64::from_le_bytes(f64buf);
            source.read_exact(&mut f64buf)?;
            let im = f64::from_le_bytes(f64buf);
            amplitudes.push(Complex64::new(re, im));
        }
        Self::new(basis, amplitudes)
    }
}

pub(crate) fn l2(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}
