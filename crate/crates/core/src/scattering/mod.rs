//! Zero-energy scattering: solve (-lap + V/2) f = 0 for a repulsive radial
//! potential, extract the scattering length from the tail asymptote and,
//! independently, from the volume integral of V f, and verify the
//! N-scaling identity a0(N^2 V(N.)) = a0(V)/N.
//!
//! The radial substitution u(r) = r f(r) turns the equation into
//! u'' = V u / 2 with u(0) = 0, integrated outward by a classical
//! fixed-step fourth-order one-step method. Steps are split at the
//! potential's breakpoints with one-sided limits so discontinuous wells
//! (square well, truncated cores) keep full order.

use std::fmt::Write as _;

use thiserror::Error;

mod quadrature;
mod solver;

pub use solver::solve_zero_energy;

#[derive(Debug, Error)]
pub enum ScatteringError {
    #[error("potential must be repulsive; profile({r}) = {value} < 0")]
    NegativeProfile { r: f64, value: f64 },
    #[error("r_max = {r_max} does not clear the potential range hint {range_hint}")]
    RangeTooShort { r_max: f64, range_hint: f64 },
    #[error("step {step} does not resolve the potential (need at least {needed} points)")]
    StepTooCoarse { step: f64, needed: usize },
    #[error(
        "no linear asymptote within tolerance: tail slopes differ by {slope_defect:e} \
         (tolerance {tolerance:e}); the potential tail may decay too slowly"
    )]
    NoLinearAsymptote { slope_defect: f64, tolerance: f64 },
    #[error("quadrature not converged under step halving: |{fine} - {coarse}| = {defect:e}")]
    QuadratureNotConverged { fine: f64, coarse: f64, defect: f64 },
    #[error("sample table needs at least two strictly increasing radii")]
    BadSampleTable,
    #[error("scaling factor must be >= 1, got {0}")]
    BadScaleFactor(u32),
}

/// A repulsive, short-range radial potential.
#[derive(Debug, Clone)]
pub enum RadialPotential {
    /// V0 on [0, R), zero outside.
    SquareWell { height: f64, radius: f64 },
    /// height * exp(-r^2 / width^2)
    Gaussian { height: f64, width: f64 },
    /// strength / r^power outside the core radius, plateaued inside.
    InversePower { strength: f64, power: f64, core_radius: f64 },
    /// Piecewise-linear interpolation of (radius, value) samples; zero
    /// beyond the last sample.
    Samples { radii: Vec<f64>, values: Vec<f64> },
}

impl RadialPotential {
    /// Pointwise value; at a jump this is the right limit.
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Self::SquareWell { height, radius } => {
                if r < *radius {
                    *height
                } else {
                    0.0
                }
            }
            Self::Gaussian { height, width } => height * (-(r / width) * (r / width)).exp(),
            Self::InversePower { strength, power, core_radius } => {
                let rr = r.max(*core_radius);
                strength / rr.powf(*power)
            }
            Self::Samples { radii, values } => {
                if r <= radii[0] {
                    values[0]
                } else if r >= *radii.last().unwrap() {
                    0.0
                } else {
                    let i = radii.partition_point(|&x| x <= r) - 1;
                    let t = (r - radii[i]) / (radii[i + 1] - radii[i]);
                    values[i] * (1.0 - t) + values[i + 1] * t
                }
            }
        }
    }

    /// One-sided value at a breakpoint; identical to `eval` elsewhere.
    fn eval_limit(&self, r: f64, from_left: bool) -> f64 {
        match self {
            Self::SquareWell { height, radius } => {
                if r < *radius || (from_left && r == *radius) {
                    *height
                } else {
                    0.0
                }
            }
            _ => self.eval(r),
        }
    }

    /// Radii where the profile is not smooth; integration splits here.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::SquareWell { radius, .. } => vec![*radius],
            Self::Gaussian { .. } => vec![],
            Self::InversePower { core_radius, .. } => vec![*core_radius],
            Self::Samples { radii, .. } => radii.clone(),
        }
    }

    /// Radius beyond which the profile is negligible.
    pub fn range_hint(&self) -> f64 {
        match self {
            Self::SquareWell { radius, .. } => *radius,
            Self::Gaussian { width, .. } => 6.5 * width,
            Self::InversePower { strength, power, core_radius } => {
                // profile below 1e-12 of its plateau value
                let plateau = strength / core_radius.powf(*power);
                (strength / (1e-12 * plateau)).powf(1.0 / power)
            }
            Self::Samples { radii, .. } => *radii.last().unwrap(),
        }
    }

    /// Validate repulsiveness on a sampling grid.
    pub fn validate(&self, r_max: f64, step: f64) -> Result<(), ScatteringError> {
        if let Self::Samples { radii, values } = self {
            if radii.len() < 2
                || radii.len() != values.len()
                || radii.windows(2).any(|w| w[1] <= w[0])
            {
                return Err(ScatteringError::BadSampleTable);
            }
        }
        let n = (r_max / step).ceil() as usize;
        for i in 0..=n {
            let r = i as f64 * step;
            let v = self.eval(r);
            if v < 0.0 {
                return Err(ScatteringError::NegativeProfile { r, value: v });
            }
        }
        Ok(())
    }

    /// Check the short-range hypothesis on samples: r -> V(r) (1+r^2)^{sigma/2}
    /// must be non-increasing beyond the range hint.
    pub fn verify_short_range(&self, sigma: f64, r_max: f64, step: f64) -> bool {
        let start = self.range_hint().min(r_max * 0.5);
        let mut prev = f64::INFINITY;
        let mut r = start;
        while r <= r_max {
            let weighted = self.eval(r) * (1.0 + r * r).powf(sigma / 2.0);
            if weighted > prev + 1e-12 * prev.abs().max(1e-300) {
                return false;
            }
            prev = weighted;
            r += step;
        }
        true
    }

    /// The scaled potential V_N(r) = N^2 V(N r).
    pub fn scaled(&self, n: u32) -> Result<Self, ScatteringError> {
        if n < 1 {
            return Err(ScatteringError::BadScaleFactor(n));
        }
        let nf = n as f64;
        Ok(match self {
            Self::SquareWell { height, radius } => {
                Self::SquareWell { height: nf * nf * height, radius: radius / nf }
            }
            Self::Gaussian { height, width } => {
                Self::Gaussian { height: nf * nf * height, width: width / nf }
            }
            Self::InversePower { strength, power, core_radius } => Self::InversePower {
                strength: nf.powf(2.0 - power) * strength,
                power: *power,
                core_radius: core_radius / nf,
            },
            Self::Samples { radii, values } => Self::Samples {
                radii: radii.iter().map(|r| r / nf).collect(),
                values: values.iter().map(|v| nf * nf * v).collect(),
            },
        })
    }
}

/// Solution of the zero-energy scattering equation on a uniform radial grid.
#[derive(Debug, Clone)]
pub struct ScatteringSolution {
    /// Radii 0, step, ..., r_max.
    pub radial_grid: Vec<f64>,
    /// f(r) = u(r) / r, rescaled so f -> 1 at the tail.
    pub f_samples: Vec<f64>,
    /// Derivative samples of u (after rescaling); kept for quadrature.
    pub u_prime: Vec<f64>,
    /// Scattering length from the asymptotic linear fit.
    pub a0: f64,
    /// Max defect of the discrete ODE on the grid (5-point stencil,
    /// breakpoint-adjacent cells excluded).
    pub residual: f64,
}

impl ScatteringSolution {
    pub fn r_max(&self) -> f64 {
        *self.radial_grid.last().unwrap()
    }

    pub fn step(&self) -> f64 {
        self.radial_grid[1] - self.radial_grid[0]
    }

    /// Tabulate as CSV with columns r, f, V.
    pub fn to_csv(&self, potential: &RadialPotential) -> String {
        let mut out = String::from("r,f,V\n");
        for (&r, &f) in self.radial_grid.iter().zip(&self.f_samples) {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", r, f, potential.eval(r)).unwrap();
        }
        out
    }
}

/// The scattering length via (1/8 pi) * integral of V f over R^3,
/// computed by radial quadrature 4 pi * int r^2 V(r) f(r) dr.
pub fn scattering_length_integral(
    potential: &RadialPotential,
    solution: &ScatteringSolution,
) -> Result<f64, ScatteringError> {
    quadrature::integral_route(potential, solution)
}

/// Solve the scaled potential V_N from scratch and return its scattering
/// length; the integration window scales with 1/N so the solve resolves
/// the shrunk potential.
pub fn scaled_scattering_length(
    potential: &RadialPotential,
    n: u32,
    r_max: f64,
    step: f64,
) -> Result<ScatteringSolution, ScatteringError> {
    let scaled = potential.scaled(n)?;
    let nf = n as f64;
    solve_zero_energy(&scaled, r_max / nf, step / nf)
}
