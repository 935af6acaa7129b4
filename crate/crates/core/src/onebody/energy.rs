//! Energy functionals of the effective equations.
//!
//! Hartree: <phi, -lap phi> + (kappa/2) <V*rho, rho>
//! semi-relativistic: <phi, sqrt(1-lap) phi> - (lambda/2) <K_alpha*rho, rho>
//! Gross-Pitaevskii: <phi, -lap phi> + (c/2) int rho^2, with c the evolution
//! coefficient 8 pi a0, so the functional's quartic weight is 4 pi a0: the
//! self-interaction counts each pair once.

use crate::grid::{convolve_samples, multiplier_table, Field, KernelSpec};

use super::{EvolutionModel, ModelKind, OneBodyError};

pub fn energy(field: &Field, model: &EvolutionModel) -> Result<f64, OneBodyError> {
    let grid = field.grid();
    let w = grid.cell_volume();
    let kinetic = {
        let table = multiplier_table(grid, &model.dispersion_kind())?;
        field.quadratic_form(&table)
    };

    let density = field.density();
    let interaction = match &model.kind {
        ModelKind::Linear => 0.0,
        ModelKind::Hartree { kappa, kernel } => {
            let table = kernel.spectral_table(grid)?;
            let conv = convolve_samples(&density, &table, grid);
            0.5 * kappa * w * dot(&conv, &density)
        }
        ModelKind::SrHartree { lambda, alpha } => {
            let kernel = KernelSpec::regularized_coulomb(grid, *alpha)?;
            let table = kernel.spectral_table(grid)?;
            let conv = convolve_samples(&density, &table, grid);
            -0.5 * lambda * w * dot(&conv, &density)
        }
        ModelKind::Gp { coefficient } => {
            0.5 * coefficient * w * density.iter().map(|d| d * d).sum::<f64>()
        }
    };

    let trap = match &model.trap {
        Some(t) => {
            if t.samples().len() != grid.total_points() {
                return Err(OneBodyError::TrapMismatch);
            }
            w * dot(t.samples(), &density)
        }
        None => 0.0,
    };

    Ok(kinetic + interaction + trap)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::onebody::{Stepper, StepperConfig};
    use num_complex::Complex64;

    #[test]
    fn zero_field_has_zero_energy() {
        let grid = GridSpec::new(1, 32, 8.0).unwrap();
        let f = Field::zeros(&grid);
        assert_eq!(energy(&f, &EvolutionModel::gp(3.0)).unwrap(), 0.0);
        assert_eq!(energy(&f, &EvolutionModel::linear()).unwrap(), 0.0);
    }

    #[test]
    fn constant_field_gp_energy_is_quartic_over_volume() {
        // E = (c/2) * V * (1/V)^2 = 4 pi a0 / V for c = 8 pi a0
        let grid = GridSpec::new(3, 8, 5.0).unwrap();
        let a0 = 0.35;
        let model = EvolutionModel::gp_from_scattering_length(a0).unwrap();
        let mut f = Field::constant(&grid, Complex64::new(1.0, 0.0));
        f.normalize();
        let expected = 4.0 * std::f64::consts::PI * a0 / grid.box_volume();
        let e = energy(&f, &model).unwrap();
        assert!((e - expected).abs() < 1e-12 * expected, "{e} vs {expected}");
    }

    #[test]
    fn energy_drift_is_second_order_in_dt() {
        let grid = GridSpec::new(1, 64, 16.0).unwrap();
        let kernel = KernelSpec::gaussian(&grid, 1.5, 1.0);
        let model = EvolutionModel::hartree(2.0, kernel);
        let phi = Field::gaussian_packet(&grid, 1.0, &[0.0], &[1.0]);
        let drift = |dt: f64, steps: usize| {
            let stepper = Stepper::new(&grid, &model, StepperConfig::new(dt, 10)).unwrap();
            let e0 = energy(&phi, &model).unwrap();
            let mut max_drift = 0.0f64;
            let out = stepper
                .evolve(&phi, steps, |_, state| {
                    let e = energy(state, &model).unwrap();
                    max_drift = max_drift.max((e - e0).abs());
                })
                .unwrap();
            let e = energy(&out, &model).unwrap();
            max_drift.max((e - e0).abs())
        };
        let d1 = drift(8e-3, 250);
        let d2 = drift(4e-3, 500);
        let ratio = d1 / d2;
        assert!(ratio > 3.0 && ratio < 5.5, "energy drift ratio {ratio} (want ~4)");
    }
}
