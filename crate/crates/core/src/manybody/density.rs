//! Reduced density matrices by partial trace, and the distances used by
//! the convergence studies.
//!
//! The k-particle kernel gamma(x_1..x_k; x'_1..x'_k) is assembled from
//! B[m, tuple] = amplitude of a_{t_k} ... a_{t_1} |psi> on the (N-k)-boson
//! occupation m, as gamma = B^H B up to normalization: hermitian by
//! construction, trace normalized to 1.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::grid::MultiplierKind;

use super::{Lattice, ManyBodyError, ManyBodyState, SymmetricBasis};

/// Kernels larger than this many entries are rejected.
const MAX_KERNEL_ENTRIES: usize = 1 << 26;

#[derive(Debug, Clone)]
pub struct ReducedDensity {
    pub k: usize,
    pub sites: usize,
    /// Hermitian M^k x M^k kernel with unit trace.
    pub kernel: DMatrix<Complex64>,
}

impl ReducedDensity {
    pub fn dim(&self) -> usize {
        self.kernel.nrows()
    }

    /// Rank-one projector onto a normalized k-fold product orbital.
    pub fn pure_product(orbital: &[Complex64], k: usize) -> Self {
        let m = orbital.len();
        let dim = m.pow(k as u32);
        let mut vec = vec![Complex64::new(1.0, 0.0); dim];
        for (flat, v) in vec.iter_mut().enumerate() {
            let mut rest = flat;
            for _ in 0..k {
                *v *= orbital[rest % m];
                rest /= m;
            }
        }
        let mut kernel = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                kernel[(i, j)] = vec[i] * vec[j].conj();
            }
        }
        let trace: f64 = (0..dim).map(|i| kernel[(i, i)].re).sum();
        kernel /= Complex64::new(trace, 0.0);
        Self { k, sites: m, kernel }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.kernel[(i, i)].re).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.kernel
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Trace out the last slot, mapping a k-particle kernel to k-1.
    /// Independent of `reduce`; the two routes must agree.
    pub fn partial_trace_last(&self) -> Result<Self, ManyBodyError> {
        if self.k < 2 {
            return Err(ManyBodyError::BadReductionOrder { k: self.k, max: self.k });
        }
        let m = self.sites;
        let sub = self.dim() / m;
        let mut kernel = DMatrix::zeros(sub, sub);
        for i in 0..sub {
            for j in 0..sub {
                let mut acc = Complex64::default();
                for y in 0..m {
                    acc += self.kernel[(i * m + y, j * m + y)];
                }
                kernel[(i, j)] = acc;
            }
        }
        Ok(Self { k: self.k - 1, sites: m, kernel })
    }

    /// CSV export: a JSON metadata header line, then (row, col, re, im).
    pub fn to_csv(&self, n_particles: usize, time: f64) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "# {{\"N\": {}, \"M\": {}, \"k\": {}, \"t\": {:.16e}}}",
            n_particles, self.sites, self.k, time
        )
        .unwrap();
        out.push_str("row,col,re,im\n");
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                writeln!(
                    out,
                    "{},{},{:.16e},{:.16e}",
                    i,
                    j,
                    self.kernel[(i, j)].re,
                    self.kernel[(i, j)].im
                )
                .unwrap();
            }
        }
        out
    }
}

/// k-particle reduced density of a normalized state, trace normalized.
pub fn reduce(state: &ManyBodyState, k: usize) -> Result<ReducedDensity, ManyBodyError> {
    let basis = state.basis();
    let n = basis.n_particles();
    let m = basis.sites();
    if k == 0 || k > n {
        return Err(ManyBodyError::BadReductionOrder { k, max: n });
    }
    let tuple_count = m.checked_pow(k as u32).filter(|c| c * c <= MAX_KERNEL_ENTRIES);
    let tuple_count = match tuple_count {
        Some(c) => c,
        None => return Err(ManyBodyError::KernelTooLarge { k, sites: m }),
    };

    // B[row, tuple]: annihilate the tuple's sites in sequence
    let (rest_dim, rest_basis): (usize, Option<Arc<SymmetricBasis>>) = if k == n {
        (1, None)
    } else {
        let b = SymmetricBasis::with_cap(n - k, m, usize::MAX)?;
        (b.dim(), Some(Arc::new(b)))
    };
    let mut b = DMatrix::<Complex64>::zeros(rest_dim, tuple_count);
    let mut occ_buf = vec![0u8; m];
    for idx in 0..basis.dim() {
        let amp = state.amplitudes()[idx];
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let occ = basis.occupation(idx);
        'tuples: for tuple in 0..tuple_count {
            occ_buf.copy_from_slice(occ);
            let mut factor = 1.0f64;
            let mut rest = tuple;
            for _ in 0..k {
                let site = rest % m;
                rest /= m;
                if occ_buf[site] == 0 {
                    continue 'tuples;
                }
                factor *= occ_buf[site] as f64;
                occ_buf[site] -= 1;
            }
            let row = match &rest_basis {
                Some(rb) => rb.rank(&occ_buf),
                None => 0,
            };
            b[(row, tuple)] += amp * factor.sqrt();
        }
    }

    // gamma[x, x'] = sum_row B[row, x] conj(B[row, x']); fill the upper
    // triangle and mirror for exact hermiticity
    let mut kernel = DMatrix::<Complex64>::zeros(tuple_count, tuple_count);
    for x in 0..tuple_count {
        for xp in x..tuple_count {
            let mut acc = Complex64::default();
            for row in 0..rest_dim {
                acc += b[(row, x)] * b[(row, xp)].conj();
            }
            kernel[(x, xp)] = acc;
            kernel[(xp, x)] = acc.conj();
        }
    }
    let trace: f64 = (0..tuple_count).map(|i| kernel[(i, i)].re).sum();
    kernel /= Complex64::new(trace, 0.0);
    Ok(ReducedDensity { k, sites: m, kernel })
}

/// Trace-norm distance Tr |gamma - rho| via the hermitian eigendecomposition.
pub fn trace_distance(a: &ReducedDensity, b: &ReducedDensity) -> Result<f64, ManyBodyError> {
    if a.k != b.k || a.sites != b.sites {
        return Err(ManyBodyError::DimensionMismatch { got: b.dim(), expected: a.dim() });
    }
    let diff = &a.kernel - &b.kernel;
    Ok(diff.symmetric_eigen().eigenvalues.iter().map(|l| l.abs()).sum())
}

/// Energy-norm distance: conjugate the difference to |phi><phi| by the
/// sobolev-quarter lattice multiplier, then take the trace norm.
pub fn energy_norm_distance(
    gamma: &ReducedDensity,
    orbital: &[Complex64],
    lattice: &Lattice,
) -> Result<f64, ManyBodyError> {
    if gamma.k != 1 || gamma.sites != orbital.len() || gamma.sites != lattice.sites {
        return Err(ManyBodyError::DimensionMismatch {
            got: orbital.len(),
            expected: gamma.sites,
        });
    }
    let projector = ReducedDensity::pure_product(orbital, 1);
    let diff = &gamma.kernel - &projector.kernel;
    let s = lattice.multiplier_matrix(&MultiplierKind::SobolevQuarter)?;
    let sandwiched = &s * diff * &s;
    Ok(sandwiched.symmetric_eigen().eigenvalues.iter().map(|l| l.abs()).sum())
}

/// Tr (1 - lap)^{1/2} gamma on the lattice, the kinetic functional of a
/// one-particle density.
pub fn kinetic_of_density(gamma: &ReducedDensity, lattice: &Lattice) -> Result<f64, ManyBodyError> {
    if gamma.k != 1 || gamma.sites != lattice.sites {
        return Err(ManyBodyError::DimensionMismatch { got: gamma.sites, expected: lattice.sites });
    }
    let m = lattice.sites;
    let diag = lattice.multiplier_diag(&MultiplierKind::SobolevHalf)?;
    let scale = 1.0 / m as f64;
    let mut acc = 0.0;
    for (kmode, dk) in diag.iter().enumerate() {
        let xi = lattice.frequency(kmode);
        // (F gamma F^dag)_{kk}
        let mut val = Complex64::default();
        for a in 0..m {
            for bsite in 0..m {
                let phase = xi * (lattice.coordinate(bsite) - lattice.coordinate(a));
                val += gamma.kernel[(a, bsite)] * Complex64::from_polar(scale, phase);
            }
        }
        acc += dk * val.re;
    }
    Ok(acc)
}
