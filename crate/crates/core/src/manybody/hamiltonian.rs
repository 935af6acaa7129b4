//! Second-quantized action of the lattice Hamiltonian
//! H = sum_ij h_ij a+_i a_j + g [ sum_{a<b} v(a-b) n_a n_b
//!                               + sum_a v(0) n_a (n_a - 1)/2 ]
//! with g = kappa/N under mean-field coupling or a raw strength.
//!
//! The interaction is diagonal in the occupation basis; the one-body part
//! is realized exactly hermitian and stored as CSR when it fits, falling
//! back to a matrix-free sweep otherwise.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Lattice, ManyBodyError, ManyBodyState, SymmetricBasis};

/// Off-diagonal storage switches to matrix-free beyond this many entries.
const MAX_CSR_ENTRIES: usize = 40_000_000;

#[derive(Debug, Clone)]
pub enum CouplingRule {
    /// Pair strength kappa / N.
    MeanField { kappa: f64 },
    /// Pair strength used as given.
    Raw { lambda: f64 },
}

#[derive(Debug, Clone)]
pub struct LatticeModel {
    pub lattice: Lattice,
    pub n_particles: usize,
    /// Hermitian M x M one-body operator.
    pub one_body: DMatrix<Complex64>,
    /// Even pair potential on lattice displacements, length M.
    pub pair_potential: Vec<f64>,
    pub coupling: CouplingRule,
}

impl LatticeModel {
    pub fn new(
        lattice: Lattice,
        n_particles: usize,
        one_body: DMatrix<Complex64>,
        pair_potential: Vec<f64>,
        coupling: CouplingRule,
    ) -> Result<Self, ManyBodyError> {
        let m = lattice.sites;
        if one_body.nrows() != m || one_body.ncols() != m {
            return Err(ManyBodyError::DimensionMismatch { got: one_body.nrows(), expected: m });
        }
        let scale = one_body.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
        for a in 0..m {
            for b in 0..m {
                if (one_body[(a, b)] - one_body[(b, a)].conj()).norm() > 1e-12 * scale {
                    return Err(ManyBodyError::NotHermitian);
                }
            }
        }
        if pair_potential.len() != m {
            return Err(ManyBodyError::DimensionMismatch { got: pair_potential.len(), expected: m });
        }
        for d in 0..m {
            if (pair_potential[d] - pair_potential[(m - d) % m]).abs() > 1e-12 {
                return Err(ManyBodyError::PairPotentialNotEven { displacement: d });
            }
        }
        Ok(Self { lattice, n_particles, one_body, pair_potential, coupling })
    }

    /// The pair prefactor g.
    pub fn pair_strength(&self) -> f64 {
        match self.coupling {
            CouplingRule::MeanField { kappa } => kappa / self.n_particles as f64,
            CouplingRule::Raw { lambda } => lambda,
        }
    }
}

struct Csr {
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    values: Vec<Complex64>,
}

enum OffDiagonal {
    Stored(Csr),
    MatrixFree,
}

/// Hamiltonian prepared against a basis for repeated application.
pub struct HamiltonianOp {
    basis: Arc<SymmetricBasis>,
    one_body: DMatrix<Complex64>,
    diagonal: Vec<f64>,
    off_diagonal: OffDiagonal,
}

impl HamiltonianOp {
    pub fn new(basis: Arc<SymmetricBasis>, model: &LatticeModel) -> Result<Self, ManyBodyError> {
        if basis.sites() != model.lattice.sites || basis.n_particles() != model.n_particles {
            return Err(ManyBodyError::DimensionMismatch {
                got: basis.sites(),
                expected: model.lattice.sites,
            });
        }
        let dim = basis.dim();
        let m = basis.sites();
        let g = model.pair_strength();

        // interaction + one-body diagonal
        let mut diagonal = vec![0.0f64; dim];
        for idx in 0..dim {
            let occ = basis.occupation(idx);
            let mut d = 0.0;
            for a in 0..m {
                let na = occ[a] as f64;
                if occ[a] == 0 {
                    continue;
                }
                d += model.one_body[(a, a)].re * na;
                d += g * model.pair_potential[0] * na * (na - 1.0) / 2.0;
                for b in (a + 1)..m {
                    let nb = occ[b] as f64;
                    if occ[b] == 0 {
                        continue;
                    }
                    d += g * model.pair_potential[(b - a) % m] * na * nb;
                }
            }
            diagonal[idx] = d;
        }

        // off-diagonal hopping estimate: occupied sites times (m - 1)
        let mut nnz_estimate = 0usize;
        for idx in 0..dim {
            let occupied = basis.occupation(idx).iter().filter(|&&n| n > 0).count();
            nnz_estimate += occupied * (m - 1);
        }

        let off_diagonal = if nnz_estimate <= MAX_CSR_ENTRIES {
            let mut row_ptr = Vec::with_capacity(dim + 1);
            let mut cols = Vec::with_capacity(nnz_estimate);
            let mut values = Vec::with_capacity(nnz_estimate);
            row_ptr.push(0);
            let mut occ_buf = vec![0u8; m];
            for idx in 0..dim {
                let occ = basis.occupation(idx);
                occ_buf.copy_from_slice(occ);
                for i in 0..m {
                    if occ[i] == 0 {
                        continue;
                    }
                    for j in 0..m {
                        if j == i {
                            continue;
                        }
                        let h = model.one_body[(i, j)];
                        if h.re == 0.0 && h.im == 0.0 {
                            continue;
                        }
                        // row idx couples to the state with one particle
                        // moved from site i to site j
                        occ_buf[i] -= 1;
                        occ_buf[j] += 1;
                        let target = basis.rank(&occ_buf);
                        occ_buf[i] += 1;
                        occ_buf[j] -= 1;
                        let factor = ((occ[i] as f64) * (occ[j] as f64 + 1.0)).sqrt();
                        cols.push(target as u32);
                        values.push(h * factor);
                    }
                }
                row_ptr.push(cols.len());
            }
            OffDiagonal::Stored(Csr { row_ptr, cols, values })
        } else {
            OffDiagonal::MatrixFree
        };

        Ok(Self { basis, one_body: model.one_body.clone(), diagonal, off_diagonal })
    }

    pub fn basis(&self) -> &Arc<SymmetricBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// out = H in (unnormalized).
    pub fn apply(&self, input: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(input.len(), self.dim());
        for (o, (d, x)) in out.iter_mut().zip(self.diagonal.iter().zip(input)) {
            *o = d * x;
        }
        match &self.off_diagonal {
            OffDiagonal::Stored(csr) => {
                for row in 0..self.dim() {
                    let mut acc = Complex64::default();
                    for e in csr.row_ptr[row]..csr.row_ptr[row + 1] {
                        acc += csr.values[e] * input[csr.cols[e] as usize];
                    }
                    out[row] += acc;
                }
            }
            OffDiagonal::MatrixFree => {
                let m = self.basis.sites();
                let mut occ_buf = vec![0u8; m];
                for row in 0..self.dim() {
                    let occ = self.basis.occupation(row);
                    occ_buf.copy_from_slice(occ);
                    let mut acc = Complex64::default();
                    for i in 0..m {
                        if occ[i] == 0 {
                            continue;
                        }
                        for j in 0..m {
                            if j == i {
                                continue;
                            }
                            let h = self.one_body[(i, j)];
                            if h.re == 0.0 && h.im == 0.0 {
                                continue;
                            }
                            occ_buf[i] -= 1;
                            occ_buf[j] += 1;
                            let target = self.basis.rank(&occ_buf);
                            occ_buf[i] += 1;
                            occ_buf[j] -= 1;
                            let factor = ((occ[i] as f64) * (occ[j] as f64 + 1.0)).sqrt();
                            acc += h * factor * input[target];
                        }
                    }
                    out[row] += acc;
                }
            }
        }
    }

    /// Dense matrix form, for small-model diagnostics and oracles.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        let mut out = DMatrix::zeros(dim, dim);
        let mut unit = vec![Complex64::default(); dim];
        let mut col = vec![Complex64::default(); dim];
        for j in 0..dim {
            unit[j] = Complex64::new(1.0, 0.0);
            self.apply(&unit, &mut col);
            unit[j] = Complex64::default();
            for i in 0..dim {
                out[(i, j)] = col[i];
            }
        }
        out
    }

    /// Real expectation <s, H s>.
    pub fn expectation(&self, state: &ManyBodyState) -> f64 {
        let mut out = vec![Complex64::default(); self.dim()];
        self.apply(state.amplitudes(), &mut out);
        state
            .amplitudes()
            .iter()
            .zip(&out)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }
}

/// The second-quantized action on a state, as an unnormalized amplitude
/// vector.
pub fn apply_hamiltonian(
    state: &ManyBodyState,
    model: &LatticeModel,
) -> Result<Vec<Complex64>, ManyBodyError> {
    let op = HamiltonianOp::new(state.basis().clone(), model)?;
    let mut out = vec![Complex64::default(); op.dim()];
    op.apply(state.amplitudes(), &mut out);
    Ok(out)
}
