//! Fourier-multiplier operators: Laplacian, relativistic dispersion,
//! Sobolev weights, Coulomb, and caller-supplied tables.

use num_complex::Complex64;

use super::transform::{forward_in_place, inverse_in_place};
use super::{Field, GridError, GridSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum MultiplierKind {
    /// |xi|^2
    Laplacian,
    /// sqrt(1 + |xi|^2), the relativistic dispersion.
    SemiRelativistic,
    /// (1 + |xi|^2)^{1/4}
    SobolevQuarter,
    /// (1 + |xi|^2)^{1/2}
    SobolevHalf,
    /// 4 pi / |xi|^2 with a declared value at xi = 0.
    Coulomb3d { zero_mode: Option<f64> },
    /// Caller-supplied samples over the grid's flat frequency set.
    Custom(Vec<f64>),
}

impl MultiplierKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Laplacian => "laplacian",
            Self::SemiRelativistic => "semirelativistic",
            Self::SobolevQuarter => "sobolev_quarter",
            Self::SobolevHalf => "sobolev_half",
            Self::Coulomb3d { .. } => "coulomb3d",
            Self::Custom(_) => "custom",
        }
    }
}

/// Analytic multiplier value at squared frequency |xi|^2.
///
/// Shared with the lattice operators of the many-body module so the
/// Laplacian and sqrt(1 - lap) analogs use one code path. Coulomb and
/// custom tables have no scalar form and are rejected.
pub fn multiplier_value(kind: &MultiplierKind, xi_sq: f64) -> Result<f64, GridError> {
    match kind {
        MultiplierKind::Laplacian => Ok(xi_sq),
        MultiplierKind::SemiRelativistic | MultiplierKind::SobolevHalf => Ok((1.0 + xi_sq).sqrt()),
        MultiplierKind::SobolevQuarter => Ok((1.0 + xi_sq).powf(0.25)),
        MultiplierKind::Coulomb3d { .. } => Err(GridError::NoAnalyticValue("coulomb3d")),
        MultiplierKind::Custom(_) => Err(GridError::NoAnalyticValue("custom")),
    }
}

/// Sample a multiplier over the grid's flat frequency set.
pub fn multiplier_table(grid: &GridSpec, kind: &MultiplierKind) -> Result<Vec<f64>, GridError> {
    match kind {
        MultiplierKind::Custom(samples) => {
            if samples.len() != grid.total_points() {
                return Err(GridError::MultiplierTableMismatch {
                    got: samples.len(),
                    expected: grid.total_points(),
                });
            }
            if !samples.iter().all(|m| m.is_finite()) {
                return Err(GridError::NonFiniteKernel);
            }
            Ok(samples.clone())
        }
        MultiplierKind::Coulomb3d { zero_mode } => {
            if grid.dimension() != 3 {
                return Err(GridError::CoulombNeedsThreeDimensions);
            }
            let zero = zero_mode.ok_or(GridError::UndeclaredZeroMode)?;
            Ok((0..grid.total_points())
                .map(|flat| {
                    let xi2 = grid.frequency_sq(flat);
                    if xi2 == 0.0 {
                        zero
                    } else {
                        4.0 * std::f64::consts::PI / xi2
                    }
                })
                .collect())
        }
        _ => (0..grid.total_points())
            .map(|flat| multiplier_value(kind, grid.frequency_sq(flat)))
            .collect(),
    }
}

/// Apply `prefactor * m(xi)` diagonally in the spectral basis.
pub fn apply_multiplier(
    field: &Field,
    kind: &MultiplierKind,
    prefactor: Complex64,
) -> Result<Field, GridError> {
    let table = multiplier_table(field.grid(), kind)?;
    let grid = *field.grid();
    let mut values = field.values().to_vec();
    forward_in_place(&mut values, &grid);
    for (v, m) in values.iter_mut().zip(&table) {
        *v *= prefactor * m;
    }
    inverse_in_place(&mut values, &grid);
    Field::from_values(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    #[test]
    fn semirelativistic_on_zero_field_is_zero() {
        let grid = GridSpec::new(1, 16, 4.0).unwrap();
        let out = apply_multiplier(&Field::zeros(&grid), &MultiplierKind::SemiRelativistic, ONE)
            .unwrap();
        assert!(out.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn laplacian_plane_wave_is_eigenfunction() {
        let grid = GridSpec::new(1, 32, 8.0).unwrap();
        let xi0 = grid.frequency(3);
        let f = Field::from_fn(&grid, |x| Complex64::from_polar(1.0, xi0 * x[0]));
        let out = apply_multiplier(&f, &MultiplierKind::Laplacian, ONE).unwrap();
        for (o, i) in out.values().iter().zip(f.values()) {
            assert!((o - i * xi0 * xi0).norm() < 1e-10);
        }
    }

    #[test]
    fn semirelativistic_plane_wave_matches_scalar_dispersion() {
        let grid = GridSpec::new(3, 8, 6.0).unwrap();
        // plane wave along x with mode 2
        let xi0 = grid.frequency(2);
        let f = Field::from_fn(&grid, |x| Complex64::from_polar(1.0, xi0 * x[0]));
        let out = apply_multiplier(&f, &MultiplierKind::SemiRelativistic, ONE).unwrap();
        let oracle = (1.0 + xi0 * xi0).sqrt();
        for (o, i) in out.values().iter().zip(f.values()) {
            assert!((o - i * oracle).norm() < 1e-10);
        }
    }

    #[test]
    fn coulomb_without_zero_mode_is_rejected() {
        let grid = GridSpec::new(3, 8, 6.0).unwrap();
        let f = Field::zeros(&grid);
        let err = apply_multiplier(&f, &MultiplierKind::Coulomb3d { zero_mode: None }, ONE);
        assert!(matches!(err, Err(GridError::UndeclaredZeroMode)));
        let err = apply_multiplier(
            &Field::zeros(&GridSpec::new(1, 8, 6.0).unwrap()),
            &MultiplierKind::Coulomb3d { zero_mode: Some(0.0) },
            ONE,
        );
        assert!(matches!(err, Err(GridError::CoulombNeedsThreeDimensions)));
    }

    #[test]
    fn multipliers_commute_and_compose_multiplicatively() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let grid = GridSpec::new(1, 64, 5.0).unwrap();
        let f = Field::from_values(
            grid,
            (0..64).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect(),
        )
        .unwrap();
        let a = MultiplierKind::SobolevQuarter;
        let b = MultiplierKind::Laplacian;
        let ab = apply_multiplier(&apply_multiplier(&f, &a, ONE).unwrap(), &b, ONE).unwrap();
        let ba = apply_multiplier(&apply_multiplier(&f, &b, ONE).unwrap(), &a, ONE).unwrap();
        // product table applied once
        let ta = multiplier_table(&grid, &a).unwrap();
        let tb = multiplier_table(&grid, &b).unwrap();
        let prod: Vec<f64> = ta.iter().zip(&tb).map(|(x, y)| x * y).collect();
        let once = apply_multiplier(&f, &MultiplierKind::Custom(prod), ONE).unwrap();
        let scale: f64 = ab.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..ab.values().len() {
            assert!((ab.values()[i] - ba.values()[i]).norm() < 1e-12 * scale);
            assert!((ab.values()[i] - once.values()[i]).norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn sobolev_quarter_squares_to_sobolev_half() {
        let grid = GridSpec::new(1, 16, 2.0).unwrap();
        let q = multiplier_table(&grid, &MultiplierKind::SobolevQuarter).unwrap();
        let h = multiplier_table(&grid, &MultiplierKind::SobolevHalf).unwrap();
        for (a, b) in q.iter().zip(&h) {
            assert!((a * a - b).abs() < 1e-14);
        }
    }
}
