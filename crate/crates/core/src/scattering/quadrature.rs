//! Radial quadrature of (1/8 pi) * int V f over R^3.
//!
//! Each radial cell is integrated by 4-point Gauss-Legendre with f
//! interpolated cubically from the solution samples and V evaluated
//! analytically; cells containing a potential breakpoint are split there.
//! Convergence is certified by recomputing on the half-resolution sample
//! subset.

use super::{RadialPotential, ScatteringError, ScatteringSolution};

const GL_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_86,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_86,
];

pub fn integral_route(
    potential: &RadialPotential,
    solution: &ScatteringSolution,
) -> Result<f64, ScatteringError> {
    let fine = weighted_integral(potential, solution, 1);
    let coarse = weighted_integral(potential, solution, 2);
    let defect = (fine - coarse).abs();
    if defect > 1e-6 * fine.abs().max(1e-9) {
        return Err(ScatteringError::QuadratureNotConverged { fine, coarse, defect });
    }
    Ok(0.5 * fine)
}

/// int r^2 V(r) f(r) dr over the solution grid, using every `stride`-th sample.
fn weighted_integral(
    potential: &RadialPotential,
    solution: &ScatteringSolution,
    stride: usize,
) -> f64 {
    let grid = &solution.radial_grid;
    let f = &solution.f_samples;
    let last = (grid.len() - 1) / stride;
    let h = (grid[stride] - grid[0]) * 1.0;
    let sample = |j: usize| (grid[j * stride], f[j * stride]);

    // cubic Lagrange through samples (i-1 .. i+2), clamped at the ends
    let interp = move |r: f64| -> f64 {
        let cell = ((r / h).floor() as usize).min(last - 1);
        let base = cell.saturating_sub(1).min(last.saturating_sub(3));
        let t = (r - sample(base).0) / h;
        let (f0, f1, f2, f3) =
            (sample(base).1, sample(base + 1).1, sample(base + 2).1, sample(base + 3).1);
        let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
        let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
        let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
        let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
        f0 * l0 + f1 * l1 + f2 * l2 + f3 * l3
    };

    let mut breakpoints: Vec<f64> = potential.breakpoints();
    breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let r_max = grid[last * stride];

    let mut total = 0.0;
    for cell in 0..last {
        let a = cell as f64 * h;
        let b = ((cell + 1) as f64 * h).min(r_max);
        let mut left = a;
        for &bp in &breakpoints {
            if bp > left + 1e-14 && bp < b - 1e-14 {
                total += gl_segment(potential, &interp, left, bp);
                left = bp;
            }
        }
        total += gl_segment(potential, &interp, left, b);
    }
    total
}

fn gl_segment(
    potential: &RadialPotential,
    interp: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (node, weight) in GL_NODES.iter().zip(&GL_WEIGHTS) {
        let r = mid + half * node;
        acc += weight * r * r * potential.eval(r) * interp(r);
    }
    acc * half
}
