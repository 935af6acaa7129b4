//! Effective one-particle evolution equations on the periodic grid:
//! the Hartree equation, its semi-relativistic variant with attractive
//! (optionally regularized) Coulomb self-interaction, and the
//! Gross-Pitaevskii equation, plus the free flow. One Strang stepper
//! drives all of them; imaginary time finds trap ground states; a scan
//! over rescaled trials brackets the critical coupling; a monitor flags
//! blow-up of the H^{1/2} norm.

mod blowup;
mod critical;
mod energy;
mod imaginary;
mod stepper;

pub use blowup::{monitor_blowup, regularization_alpha, BlowupVerdict};
pub use critical::{estimate_critical_coupling, rescaled_energy_tables, CriticalEstimate, TrialFamily};
pub use energy::energy;
pub use imaginary::{minimize_imaginary_time, MinimizeResult};
pub use stepper::Stepper;

use thiserror::Error;

use crate::grid::{Field, GridError, GridSpec, KernelSpec};

#[derive(Debug, Error)]
pub enum OneBodyError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(
        "phase-wrap guard violated: dt * max dispersion multiplier = {product} >= pi \
         (dt = {dt}, max multiplier = {max_multiplier})"
    )]
    PhaseWrapGuard { dt: f64, max_multiplier: f64, product: f64 },
    #[error("state norm is {norm}, not 1 within 1e-8")]
    NotNormalized { norm: f64 },
    #[error("non-finite amplitudes at step {step}; carrying last finite state")]
    NonFinite { step: usize, last_finite: Box<Field> },
    #[error("energy non-decreasing for 3 consecutive imaginary-time steps at iteration {0}; dt too large")]
    EnergyNotDecreasing(usize),
    #[error("imaginary time did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("mu = {mu} violates the grid resolution constraint (rescaled width {width} < {needed})")]
    MuResolution { mu: f64, width: f64, needed: f64 },
    #[error("mu = {mu} spreads the trial beyond the box (width {width} > {allowed})")]
    MuSpread { mu: f64, width: f64, allowed: f64 },
    #[error("criticality scan found no bracket: {0}")]
    BracketNotFound(String),
    #[error("regularization exponent beta must be positive, got {0}")]
    BadBeta(f64),
    #[error("trap samples do not match the grid")]
    TrapMismatch,
    #[error("gp coefficient derived from a repulsive potential must be non-negative, got {0}")]
    NegativeGpCoefficient(f64),
}

/// External trap sampled on the grid.
#[derive(Debug, Clone)]
pub struct TrapSpec {
    samples: Vec<f64>,
}

impl TrapSpec {
    pub fn from_samples(grid: &GridSpec, samples: Vec<f64>) -> Result<Self, OneBodyError> {
        if samples.len() != grid.total_points() {
            return Err(OneBodyError::TrapMismatch);
        }
        if !samples.iter().all(|v| v.is_finite()) {
            return Err(OneBodyError::Grid(GridError::NonFiniteKernel));
        }
        Ok(Self { samples })
    }

    /// Harmonic trap (omega^2/4) |x - center|^2; ground state energy
    /// d * omega / 2 in these units (hbar = 1, m = 1/2).
    pub fn harmonic(grid: &GridSpec, omega: f64, center: &[f64]) -> Self {
        let samples = (0..grid.total_points())
            .map(|flat| {
                let pos = grid.position(flat);
                let mut r2 = 0.0;
                for d in 0..grid.dimension() {
                    let dx = pos[d] - center.get(d).copied().unwrap_or(0.0);
                    r2 += dx * dx;
                }
                0.25 * omega * omega * r2
            })
            .collect();
        Self { samples }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

/// Which effective equation, with which coupling.
#[derive(Debug, Clone)]
pub enum ModelKind {
    /// Free Schroedinger flow.
    Linear,
    /// i phi' = -lap phi + kappa (V * |phi|^2) phi
    Hartree { kappa: f64, kernel: KernelSpec },
    /// i phi' = sqrt(1-lap) phi - lambda (1/(|.|+alpha) * |phi|^2) phi
    SrHartree { lambda: f64, alpha: f64 },
    /// i phi' = -lap phi + coefficient |phi|^2 phi, coefficient = 8 pi a0
    Gp { coefficient: f64 },
}

#[derive(Debug, Clone)]
pub struct EvolutionModel {
    pub kind: ModelKind,
    pub trap: Option<TrapSpec>,
}

impl EvolutionModel {
    pub fn linear() -> Self {
        Self { kind: ModelKind::Linear, trap: None }
    }

    pub fn hartree(kappa: f64, kernel: KernelSpec) -> Self {
        Self { kind: ModelKind::Hartree { kappa, kernel }, trap: None }
    }

    pub fn sr_hartree(lambda: f64, alpha: f64) -> Self {
        Self { kind: ModelKind::SrHartree { lambda, alpha }, trap: None }
    }

    pub fn gp(coefficient: f64) -> Self {
        Self { kind: ModelKind::Gp { coefficient }, trap: None }
    }

    /// Gross-Pitaevskii coupling from a scattering length: the evolution
    /// coefficient is 8 pi a0 (the functional's quartic term uses half).
    pub fn gp_from_scattering_length(a0: f64) -> Result<Self, OneBodyError> {
        if a0 < 0.0 {
            return Err(OneBodyError::NegativeGpCoefficient(8.0 * std::f64::consts::PI * a0));
        }
        Ok(Self::gp(8.0 * std::f64::consts::PI * a0))
    }

    pub fn with_trap(mut self, trap: TrapSpec) -> Self {
        self.trap = Some(trap);
        self
    }

    pub(crate) fn dispersion_kind(&self) -> crate::grid::MultiplierKind {
        match self.kind {
            ModelKind::SrHartree { .. } => crate::grid::MultiplierKind::SemiRelativistic,
            _ => crate::grid::MultiplierKind::Laplacian,
        }
    }
}

/// Strang stepping configuration. The scheme is always Strang splitting:
/// a half-step of the dispersion multiplier, an exact nonlinear phase
/// step, and another dispersion half-step.
#[derive(Debug, Clone, Copy)]
pub struct StepperConfig {
    pub dt: f64,
    pub steps_per_output: usize,
}

impl StepperConfig {
    pub fn new(dt: f64, steps_per_output: usize) -> Self {
        Self { dt, steps_per_output: steps_per_output.max(1) }
    }
}
