//! Short-iterative Lanczos propagation exp(-i H t).
//!
//! Each step builds a small Krylov basis with full reorthogonalization,
//! exponentiates the real symmetric tridiagonal projection, and renews
//! the state. The residual coupling out of the subspace,
//! beta_m |[exp(-i dt T)]_{m,1}|, serves as the per-step local error
//! estimate and aborts the run when it exceeds the tolerance.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::l2;
use super::{HamiltonianOp, ManyBodyError, ManyBodyState};

#[derive(Debug, Clone, Copy)]
pub struct PropagateConfig {
    pub dt: f64,
    pub krylov_dim: usize,
    /// Per-step local error budget.
    pub tolerance: f64,
}

impl PropagateConfig {
    pub fn new(dt: f64, krylov_dim: usize, tolerance: f64) -> Self {
        Self { dt, krylov_dim: krylov_dim.max(2), tolerance }
    }
}

#[derive(Debug)]
pub struct Propagation {
    pub state: ManyBodyState,
    /// Largest per-step local error estimate encountered.
    pub max_local_error: f64,
    pub steps: usize,
}

/// Propagate for time `t` in steps of `cfg.dt` (the last step shrinks to
/// land on `t` exactly).
pub fn propagate(
    state: &ManyBodyState,
    op: &HamiltonianOp,
    t: f64,
    cfg: &PropagateConfig,
) -> Result<Propagation, ManyBodyError> {
    if t == 0.0 {
        return Ok(Propagation { state: state.clone(), max_local_error: 0.0, steps: 0 });
    }
    let steps = (t / cfg.dt).ceil().max(1.0) as usize;
    let mut current = state.amplitudes().to_vec();
    let mut max_err = 0.0f64;
    let mut remaining = t;
    for _ in 0..steps {
        let dt = cfg.dt.min(remaining);
        let err = lanczos_step(&mut current, op, dt, cfg)?;
        max_err = max_err.max(err);
        remaining -= dt;
        // restore unit norm; the subspace exponential is unitary up to
        // the discarded residual
        let norm = l2(&current);
        let s = 1.0 / norm;
        for v in &mut current {
            *v *= s;
        }
    }
    Ok(Propagation {
        state: ManyBodyState::new(state.basis().clone(), current)?,
        max_local_error: max_err,
        steps,
    })
}

/// One Lanczos exponential step; returns the local error estimate.
fn lanczos_step(
    state: &mut Vec<Complex64>,
    op: &HamiltonianOp,
    dt: f64,
    cfg: &PropagateConfig,
) -> Result<f64, ManyBodyError> {
    let dim = state.len();
    let m = cfg.krylov_dim.min(dim);
    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut alphas: Vec<f64> = Vec::with_capacity(m);
    let mut betas: Vec<f64> = Vec::with_capacity(m);

    let norm0 = l2(state);
    let mut v0 = state.clone();
    for v in &mut v0 {
        *v /= norm0;
    }
    vectors.push(v0);

    let mut w = vec![Complex64::default(); dim];
    let mut happy = false;
    let mut final_beta = 0.0f64;
    for j in 0..m {
        op.apply(&vectors[j], &mut w);
        if j > 0 {
            let b = betas[j - 1];
            for (wv, pv) in w.iter_mut().zip(&vectors[j - 1]) {
                *wv -= b * pv;
            }
        }
        let alpha: f64 = vectors[j].iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        alphas.push(alpha);
        for (wv, pv) in w.iter_mut().zip(&vectors[j]) {
            *wv -= alpha * pv;
        }
        // full reorthogonalization, one pass in fixed order
        for prev in &vectors {
            let overlap: Complex64 = prev.iter().zip(&*w).map(|(a, b)| a.conj() * b).sum();
            for (wv, pv) in w.iter_mut().zip(prev) {
                *wv -= overlap * pv;
            }
        }
        let beta = l2(&w);
        if j + 1 == m {
            final_beta = beta;
            break;
        }
        if beta < 1e-12 {
            happy = true;
            break;
        }
        betas.push(beta);
        let mut next = w.clone();
        for v in &mut next {
            *v /= beta;
        }
        vectors.push(next);
    }

    let m_eff = alphas.len();
    let mut tri = DMatrix::<f64>::zeros(m_eff, m_eff);
    for j in 0..m_eff {
        tri[(j, j)] = alphas[j];
        if j + 1 < m_eff {
            tri[(j, j + 1)] = betas[j];
            tri[(j + 1, j)] = betas[j];
        }
    }
    let eig = tri.symmetric_eigen();
    // y = Q exp(-i dt diag) Q^T e_1
    let mut y = vec![Complex64::default(); m_eff];
    for (col, lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -dt * lambda);
        let q0 = eig.eigenvectors[(0, col)];
        for row in 0..m_eff {
            y[row] += eig.eigenvectors[(row, col)] * phase * q0;
        }
    }

    let local_error = if happy { 0.0 } else { final_beta * y[m_eff - 1].norm() * dt.abs() };
    if local_error > cfg.tolerance {
        return Err(ManyBodyError::KrylovTolerance {
            estimate: local_error,
            tolerance: cfg.tolerance,
        });
    }

    for v in state.iter_mut() {
        *v = Complex64::default();
    }
    for (j, vec) in vectors.iter().enumerate() {
        let c = y[j] * norm0;
        for (sv, bv) in state.iter_mut().zip(vec) {
            *sv += c * bv;
        }
    }
    Ok(local_error)
}
