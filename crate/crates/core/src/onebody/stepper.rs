//! Strang splitting with an exact nonlinear phase substep.
//!
//! The nonlinear substep multiplies by exp(-i dt W) where W depends only
//! on |phi|, which that substep preserves, so every substep is an exact
//! isometry and mass is conserved to rounding. Interior dispersion
//! half-steps of consecutive steps are merged; states handed to observers
//! are always properly closed Strang states.

use num_complex::Complex64;

use crate::grid::{multiplier_table, Field, GridSpec, KernelSpec};

use super::{EvolutionModel, ModelKind, OneBodyError, StepperConfig};

enum Interaction {
    None,
    /// W = strength * (K * |phi|^2), K prepared as a spectral table.
    Convolution { strength: f64, table: Vec<f64> },
    /// W = coefficient * |phi|^2.
    Contact { coefficient: f64 },
}

/// Prepared instantaneous effective potential of a model on a grid.
pub(crate) struct EffectivePotential {
    grid: GridSpec,
    interaction: Interaction,
    v_ext: Option<Vec<f64>>,
}

impl EffectivePotential {
    pub(crate) fn prepare(grid: &GridSpec, model: &EvolutionModel) -> Result<Self, OneBodyError> {
        let interaction = match &model.kind {
            ModelKind::Linear => Interaction::None,
            ModelKind::Hartree { kappa, kernel } => {
                Interaction::Convolution { strength: *kappa, table: kernel.spectral_table(grid)? }
            }
            ModelKind::SrHartree { lambda, alpha } => {
                let kernel = KernelSpec::regularized_coulomb(grid, *alpha)?;
                Interaction::Convolution { strength: -lambda, table: kernel.spectral_table(grid)? }
            }
            ModelKind::Gp { coefficient } => Interaction::Contact { coefficient: *coefficient },
        };
        let v_ext = match &model.trap {
            Some(trap) => {
                if trap.samples().len() != grid.total_points() {
                    return Err(OneBodyError::TrapMismatch);
                }
                Some(trap.samples().to_vec())
            }
            None => None,
        };
        Ok(Self { grid: *grid, interaction, v_ext })
    }

    /// W for the current density, including the trap.
    pub(crate) fn eval(&self, density: &[f64]) -> Vec<f64> {
        let mut w = match &self.interaction {
            Interaction::None => vec![0.0; density.len()],
            Interaction::Convolution { strength, table } => {
                let mut conv = crate::grid::convolve_samples(density, table, &self.grid);
                for v in conv.iter_mut() {
                    *v *= strength;
                }
                conv
            }
            Interaction::Contact { coefficient } => {
                density.iter().map(|&d| coefficient * d).collect()
            }
        };
        if let Some(v_ext) = &self.v_ext {
            for (wv, ve) in w.iter_mut().zip(v_ext) {
                *wv += ve;
            }
        }
        w
    }
}

pub struct Stepper {
    grid: GridSpec,
    cfg: StepperConfig,
    dispersion: Vec<f64>,
    half_phase: Vec<Complex64>,
    full_phase: Vec<Complex64>,
    potential: EffectivePotential,
}

impl Stepper {
    pub fn new(
        grid: &GridSpec,
        model: &EvolutionModel,
        cfg: StepperConfig,
    ) -> Result<Self, OneBodyError> {
        let dispersion = multiplier_table(grid, &model.dispersion_kind())?;
        let max_multiplier = dispersion.iter().cloned().fold(0.0, f64::max);
        let product = cfg.dt * max_multiplier;
        if !(product < std::f64::consts::PI) {
            return Err(OneBodyError::PhaseWrapGuard { dt: cfg.dt, max_multiplier, product });
        }
        let potential = EffectivePotential::prepare(grid, model)?;
        let half_phase =
            dispersion.iter().map(|m| Complex64::from_polar(1.0, -0.5 * cfg.dt * m)).collect();
        let full_phase =
            dispersion.iter().map(|m| Complex64::from_polar(1.0, -cfg.dt * m)).collect();

        Ok(Self { grid: *grid, cfg, dispersion, half_phase, full_phase, potential })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.cfg.dt
    }

    pub fn dispersion_table(&self) -> &[f64] {
        &self.dispersion
    }

    /// Instantaneous effective potential W for the current density.
    pub(crate) fn effective_potential(&self, density: &[f64]) -> Vec<f64> {
        self.potential.eval(density)
    }

    /// One closed Strang step.
    pub fn evolve_step(&self, field: &Field) -> Result<Field, OneBodyError> {
        self.evolve(field, 1, |_, _| {})
    }

    /// `n_steps` Strang steps; `on_sample(step, state)` fires on every
    /// `steps_per_output`-th closed state (and not on the final one,
    /// which is returned).
    pub fn evolve(
        &self,
        field: &Field,
        n_steps: usize,
        mut on_sample: impl FnMut(usize, &Field),
    ) -> Result<Field, OneBodyError> {
        let norm = field.l2_norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(OneBodyError::NotNormalized { norm });
        }
        let mut values = field.values().to_vec();
        let mut last_finite = field.clone();

        // open: apply the leading dispersion half-step
        self.spectral_phase(&mut values, &self.half_phase);

        for step in 1..=n_steps {
            // exact nonlinear phase substep
            let density: Vec<f64> = values.iter().map(|v| v.norm_sqr()).collect();
            let w = self.effective_potential(&density);
            for (v, wv) in values.iter_mut().zip(&w) {
                *v *= Complex64::from_polar(1.0, -self.cfg.dt * wv);
            }

            let closing = step == n_steps || step % self.cfg.steps_per_output == 0;
            if closing {
                self.spectral_phase(&mut values, &self.half_phase);
                if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                    return Err(OneBodyError::NonFinite {
                        step,
                        last_finite: Box::new(last_finite),
                    });
                }
                let state = Field::from_values(self.grid, values.clone())?;
                if step == n_steps {
                    return Ok(state);
                }
                on_sample(step, &state);
                last_finite = state;
                // reopen for the next step
                self.spectral_phase(&mut values, &self.half_phase);
            } else {
                self.spectral_phase(&mut values, &self.full_phase);
                if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                    return Err(OneBodyError::NonFinite {
                        step,
                        last_finite: Box::new(last_finite),
                    });
                }
            }
        }
        unreachable!("loop returns on the final step")
    }

    fn spectral_phase(&self, values: &mut [Complex64], phase: &[Complex64]) {
        crate::grid::forward_values(values, &self.grid);
        for (v, p) in values.iter_mut().zip(phase) {
            *v *= p;
        }
        crate::grid::inverse_values(values, &self.grid);
    }
}
