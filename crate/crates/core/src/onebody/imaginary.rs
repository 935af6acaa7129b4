//! Trap ground states by imaginary-time gradient flow.
//!
//! The Strang structure is reused with decaying substeps
//! exp(-dt m / 2), exp(-dt W), exp(-dt m / 2), followed by
//! renormalization. Convergence is declared when the energy decrease per
//! step falls below the tolerance.

use num_complex::Complex64;

use crate::grid::{multiplier_table, Field};

use super::stepper::EffectivePotential;
use super::{energy, EvolutionModel, OneBodyError, StepperConfig};

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub field: Field,
    /// Energy after every accepted iteration, starting with the input's.
    pub energies: Vec<f64>,
    pub iterations: usize,
}

pub fn minimize_imaginary_time(
    model: &EvolutionModel,
    initial: &Field,
    cfg: &StepperConfig,
    tol: f64,
    max_iterations: usize,
) -> Result<MinimizeResult, OneBodyError> {
    let grid = *initial.grid();
    // no phase-wrap guard here: the decaying substeps are stable for any dt
    let potential = EffectivePotential::prepare(&grid, model)?;
    let dispersion = multiplier_table(&grid, &model.dispersion_kind())?;
    let half_decay: Vec<f64> =
        dispersion.iter().map(|m| (-0.5 * cfg.dt * m).exp()).collect();

    let mut state = initial.clone();
    state.normalize();
    let mut e_prev = energy(&state, model)?;
    let mut energies = vec![e_prev];
    let mut non_decreasing = 0usize;

    for iteration in 1..=max_iterations {
        let mut values = state.values().to_vec();
        decay(&mut values, &half_decay, &grid);
        let density: Vec<f64> = values.iter().map(|v| v.norm_sqr()).collect();
        let w = potential.eval(&density);
        for (v, wv) in values.iter_mut().zip(&w) {
            *v *= (-cfg.dt * wv).exp();
        }
        decay(&mut values, &half_decay, &grid);
        let mut next = Field::from_values(grid, values)?;
        next.normalize();

        let e = energy(&next, model)?;
        let decrease = e_prev - e;
        state = next;
        energies.push(e);
        e_prev = e;
        if decrease.abs() < tol {
            return Ok(MinimizeResult { field: state, energies, iterations: iteration });
        }
        if decrease < 0.0 {
            non_decreasing += 1;
            if non_decreasing >= 3 {
                return Err(OneBodyError::EnergyNotDecreasing(iteration));
            }
        } else {
            non_decreasing = 0;
        }
    }
    Err(OneBodyError::NoConvergence(max_iterations))
}

fn decay(values: &mut [Complex64], table: &[f64], grid: &crate::grid::GridSpec) {
    crate::grid::forward_values(values, grid);
    for (v, d) in values.iter_mut().zip(table) {
        *v *= *d;
    }
    crate::grid::inverse_values(values, grid);
}
