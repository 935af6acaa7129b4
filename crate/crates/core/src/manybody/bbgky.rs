//! Residual of the finite-N hierarchy linking gamma^(k) to gamma^(k+1):
//!
//! i d/dt gamma^(k) = sum_j [h_j, gamma^(k)]
//!                  + g sum_{i<j<=k} [v_ij, gamma^(k)]
//!                  + (N-k) g sum_{j<=k} Tr_{k+1} [v_{j,k+1}, gamma^(k+1)]
//!
//! evaluated with a centered difference in time against densities taken
//! from one propagated trajectory. Exact marginals satisfy it identically
//! in continuous time, so the defect is second order in dt.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{LatticeModel, ManyBodyError, ReducedDensity};

/// Frobenius norm of the hierarchy defect at the middle time.
pub fn bbgky_residual(
    model: &LatticeModel,
    gamma_prev: &ReducedDensity,
    gamma_mid: &ReducedDensity,
    gamma_next: &ReducedDensity,
    gamma_up: &ReducedDensity,
    dt: f64,
) -> Result<f64, ManyBodyError> {
    let k = gamma_mid.k;
    if gamma_prev.k != k || gamma_next.k != k || gamma_up.k != k + 1 {
        return Err(ManyBodyError::BadReductionOrder { k: gamma_up.k, max: k + 1 });
    }
    if k >= model.n_particles {
        return Err(ManyBodyError::BadReductionOrder { k, max: model.n_particles - 1 });
    }
    let rhs = hierarchy_rhs(model, gamma_mid, Some(gamma_up), model.pair_strength(), k)?;

    let dim = gamma_mid.dim();
    let mut defect = 0.0f64;
    let i = Complex64::new(0.0, 1.0);
    for r in 0..dim {
        for c in 0..dim {
            let dt_gamma =
                i * (gamma_next.kernel[(r, c)] - gamma_prev.kernel[(r, c)]) / (2.0 * dt);
            defect += (dt_gamma - rhs[(r, c)]).norm_sqr();
        }
    }
    Ok(defect.sqrt())
}

/// The right side of the hierarchy for a k-particle kernel.
///
/// `collision` supplies gamma^(k+1); with `None` the collision term is
/// dropped (the k = N von Neumann case). `pair_scale` multiplies both the
/// in-cluster pair commutators and the collision term.
pub(crate) fn hierarchy_rhs(
    model: &LatticeModel,
    gamma: &ReducedDensity,
    collision: Option<&ReducedDensity>,
    pair_scale: f64,
    k: usize,
) -> Result<DMatrix<Complex64>, ManyBodyError> {
    let m = model.lattice.sites;
    let dim = gamma.dim();
    let h = &model.one_body;
    let mut rhs = DMatrix::<Complex64>::zeros(dim, dim);

    // one-body commutators [h_j, gamma]
    for slot in 0..k {
        let stride = m.pow((k - 1 - slot) as u32);
        for r in 0..dim {
            let rs = (r / stride) % m;
            for c in 0..dim {
                let cs = (c / stride) % m;
                let mut acc = Complex64::default();
                for y in 0..m {
                    // (h_j gamma): replace slot coordinate of the row side
                    let r_y = r + (y as isize - rs as isize) as usize * stride;
                    acc += h[(rs, y)] * gamma.kernel[(r_y, c)];
                    // (gamma h_j): column side
                    let c_y = c + (y as isize - cs as isize) as usize * stride;
                    acc -= gamma.kernel[(r, c_y)] * h[(y, cs)];
                }
                rhs[(r, c)] += acc;
            }
        }
    }

    // position-diagonal pair commutators within the cluster
    if k >= 2 && pair_scale != 0.0 {
        for a in 0..k {
            for b in (a + 1)..k {
                let stride_a = m.pow((k - 1 - a) as u32);
                let stride_b = m.pow((k - 1 - b) as u32);
                for r in 0..dim {
                    let xa = (r / stride_a) % m;
                    let xb = (r / stride_b) % m;
                    let v_row = model.pair_potential[(xa + m - xb) % m];
                    for c in 0..dim {
                        let ya = (c / stride_a) % m;
                        let yb = (c / stride_b) % m;
                        let v_col = model.pair_potential[(ya + m - yb) % m];
                        rhs[(r, c)] += pair_scale * (v_row - v_col) * gamma.kernel[(r, c)];
                    }
                }
            }
        }
    }

    // collision term (N - k) g sum_j Tr_{k+1} [v_{j,k+1}, gamma^(k+1)]
    if let Some(up) = collision {
        let n = model.n_particles as f64;
        let prefactor = (n - k as f64) * pair_scale;
        if prefactor != 0.0 {
            for slot in 0..k {
                let stride = m.pow((k - 1 - slot) as u32);
                for r in 0..dim {
                    let xj = (r / stride) % m;
                    for c in 0..dim {
                        let yj = (c / stride) % m;
                        let mut acc = Complex64::default();
                        for y in 0..m {
                            let v_row = model.pair_potential[(xj + m - y) % m];
                            let v_col = model.pair_potential[(yj + m - y) % m];
                            // gamma^(k+1) kernel indices append the traced
                            // coordinate as the innermost digit
                            acc += (v_row - v_col) * up.kernel[(r * m + y, c * m + y)];
                        }
                        rhs[(r, c)] += prefactor * acc;
                    }
                }
            }
        }
    }

    // i d/dt gamma = [H, gamma] ... : the commutators above are [.,.]
    // already; nothing further. Caller compares against i d_t gamma.
    Ok(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::MultiplierKind;
    use crate::manybody::{
        propagate, reduce, CouplingRule, HamiltonianOp, Lattice, ManyBodyState, PropagateConfig,
        SymmetricBasis,
    };
    use std::sync::Arc;

    fn gaussian_pair(lattice: &Lattice, strength: f64, width: f64) -> Vec<f64> {
        (0..lattice.sites)
            .map(|d| {
                let r = lattice.displacement(d);
                strength * (-(r / width) * (r / width)).exp()
            })
            .collect()
    }

    fn residual_for_dt(model: &LatticeModel, psi0: &ManyBodyState, t_eval: f64, dt: f64, k: usize) -> f64 {
        let op = HamiltonianOp::new(psi0.basis().clone(), model).unwrap();
        let cfg = PropagateConfig::new(dt, 14, 1e-11);
        let prev = propagate(psi0, &op, t_eval - dt, &cfg).unwrap().state;
        let mid = propagate(psi0, &op, t_eval, &cfg).unwrap().state;
        let next = propagate(psi0, &op, t_eval + dt, &cfg).unwrap().state;
        let gp = reduce(&prev, k).unwrap();
        let gm = reduce(&mid, k).unwrap();
        let gn = reduce(&next, k).unwrap();
        let gu = reduce(&mid, k + 1).unwrap();
        bbgky_residual(model, &gp, &gm, &gn, &gu, dt).unwrap()
    }

    #[test]
    fn free_particle_residual_is_second_order() {
        // N=1: the von Neumann equation; collision carries prefactor N-k=0
        let lattice = Lattice::new(6, 6.0).unwrap();
        let one_body = lattice.multiplier_matrix(&MultiplierKind::Laplacian).unwrap();
        let model = LatticeModel::new(
            lattice,
            2,
            one_body,
            gaussian_pair(&lattice, 0.0, 1.0),
            CouplingRule::Raw { lambda: 0.0 },
        )
        .unwrap();
        let basis = Arc::new(SymmetricBasis::new(2, 6).unwrap());
        let mut orbital = vec![Complex64::default(); 6];
        for (i, o) in orbital.iter_mut().enumerate() {
            *o = Complex64::new((-((i as f64 - 2.5) / 1.2).powi(2)).exp(), 0.1 * i as f64);
        }
        let n = crate::manybody::state::l2(&orbital);
        for o in &mut orbital {
            *o /= n;
        }
        let psi = ManyBodyState::product(basis, &orbital).unwrap();
        let coarse = residual_for_dt(&model, &psi, 0.2, 0.05, 1);
        let fine = residual_for_dt(&model, &psi, 0.2, 0.025, 1);
        let ratio = coarse / fine;
        assert!(ratio > 3.0 && ratio < 5.5, "dt refinement ratio {ratio} (want ~4)");
    }

    #[test]
    fn eigenstate_residual_vanishes_to_tolerance() {
        let lattice = Lattice::new(5, 5.0).unwrap();
        let one_body = lattice.multiplier_matrix(&MultiplierKind::Laplacian).unwrap();
        let model = LatticeModel::new(
            lattice,
            3,
            one_body,
            gaussian_pair(&lattice, 1.5, 1.0),
            CouplingRule::MeanField { kappa: 1.0 },
        )
        .unwrap();
        let basis = Arc::new(SymmetricBasis::new(3, 5).unwrap());
        let op = HamiltonianOp::new(basis.clone(), &model).unwrap();
        let eig = op.to_dense().symmetric_eigen();
        let ground: Vec<Complex64> = (0..basis.dim()).map(|r| eig.eigenvectors[(r, 0)]).collect();
        let psi = ManyBodyState::normalized(basis, ground).unwrap();
        let r = residual_for_dt(&model, &psi, 0.2, 0.02, 1);
        assert!(r < 1e-7, "stationary residual {r:e}");
    }

    #[test]
    fn generic_three_boson_run_is_second_order() {
        let lattice = Lattice::new(5, 5.0).unwrap();
        let one_body = lattice.multiplier_matrix(&MultiplierKind::Laplacian).unwrap();
        let model = LatticeModel::new(
            lattice,
            3,
            one_body,
            gaussian_pair(&lattice, 2.0, 1.0),
            CouplingRule::MeanField { kappa: 1.2 },
        )
        .unwrap();
        let basis = Arc::new(SymmetricBasis::new(3, 5).unwrap());
        let mut orbital = vec![Complex64::default(); 5];
        for (i, o) in orbital.iter_mut().enumerate() {
            *o = Complex64::new((-((i as f64 - 2.0) / 1.1).powi(2)).exp(), 0.0);
        }
        let n = crate::manybody::state::l2(&orbital);
        for o in &mut orbital {
            *o /= n;
        }
        let psi = ManyBodyState::product(basis, &orbital).unwrap();
        for k in [1usize, 2] {
            let coarse = residual_for_dt(&model, &psi, 0.2, 0.05, k);
            let fine = residual_for_dt(&model, &psi, 0.2, 0.025, k);
            let ratio = coarse / fine;
            assert!(ratio > 3.0 && ratio < 5.5, "k={k}: ratio {ratio} (want ~4)");
        }
    }
}
