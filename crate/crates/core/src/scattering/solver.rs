//! Outward integration of u'' = V u / 2 and the tail extraction of a0.

use super::{RadialPotential, ScatteringError, ScatteringSolution};

/// Minimum number of grid points the range hint must span.
const RESOLVE_POINTS: usize = 8;
/// Relative slope stability demanded of the tail fit before a0 is read off.
const SLOPE_TOLERANCE: f64 = 1e-6;
/// Fraction of [0, r_max] used as the asymptotic fit window.
const TAIL_FRACTION: f64 = 0.2;

pub fn solve_zero_energy(
    potential: &RadialPotential,
    r_max: f64,
    step: f64,
) -> Result<ScatteringSolution, ScatteringError> {
    potential.validate(r_max, step)?;
    let range = potential.range_hint().min(r_max);
    if range / step < RESOLVE_POINTS as f64 {
        return Err(ScatteringError::StepTooCoarse {
            step,
            needed: RESOLVE_POINTS,
        });
    }

    let n = (r_max / step).round().max(RESOLVE_POINTS as f64) as usize;
    let h = r_max / n as f64;
    let mut breakpoints: Vec<f64> =
        potential.breakpoints().into_iter().filter(|&b| b > 0.0 && b < r_max).collect();
    breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut u = vec![0.0f64; n + 1];
    let mut p = vec![0.0f64; n + 1];
    u[0] = 0.0;
    p[0] = 1.0;
    // a breakpoint closer than this to a segment boundary counts as being
    // exactly on it; the one-sided endpoint values below take over there
    let eps = 1e-9 * h;
    for i in 0..n {
        let a = i as f64 * h;
        let b = (i + 1) as f64 * h;
        // split the step at any breakpoint strictly inside it
        let mut left = a;
        let (mut cu, mut cp) = (u[i], p[i]);
        for &bp in &breakpoints {
            if bp > left + eps && bp < b - eps {
                let (nu, np) = rk4_segment(potential, &breakpoints, eps, left, bp, cu, cp);
                cu = nu;
                cp = np;
                left = bp;
            }
        }
        let (nu, np) = rk4_segment(potential, &breakpoints, eps, left, b, cu, cp);
        u[i + 1] = nu;
        p[i + 1] = np;
    }

    // asymptotic linear fit over the tail window
    let tail_start = ((1.0 - TAIL_FRACTION) * n as f64).floor() as usize;
    let (slope, intercept) = linear_fit(&u, tail_start, n, h);
    let half_start = (tail_start + n) / 2;
    let (slope_half, _) = linear_fit(&u, half_start, n, h);
    let slope_defect = if slope != 0.0 { (slope_half / slope - 1.0).abs() } else { f64::INFINITY };
    if !slope_defect.is_finite() || slope_defect > SLOPE_TOLERANCE || slope <= 0.0 {
        return Err(ScatteringError::NoLinearAsymptote {
            slope_defect,
            tolerance: SLOPE_TOLERANCE,
        });
    }
    let a0 = -intercept / slope;

    // rescale so u ~ r - a0, f = u / (slope r) -> 1
    let inv_s = 1.0 / slope;
    let radial_grid: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let mut f_samples = Vec::with_capacity(n + 1);
    f_samples.push(p[0] * inv_s);
    for i in 1..=n {
        f_samples.push(u[i] * inv_s / radial_grid[i]);
    }
    let u_prime: Vec<f64> = p.iter().map(|&x| x * inv_s).collect();

    // discrete ODE defect via the fourth-order 5-point stencil, skipping
    // cells whose stencil straddles a breakpoint
    let mut residual = 0.0f64;
    let inv12h2 = 1.0 / (12.0 * h * h);
    for i in 2..n.saturating_sub(1) {
        let r = radial_grid[i];
        if breakpoints.iter().any(|&bp| (bp - r).abs() < 2.5 * h) {
            continue;
        }
        let ui = u[i] * inv_s;
        let stencil = (-u[i - 2] * inv_s + 16.0 * u[i - 1] * inv_s - 30.0 * ui
            + 16.0 * u[i + 1] * inv_s
            - u[i + 2] * inv_s)
            * inv12h2;
        let defect = (stencil - 0.5 * potential.eval(r) * ui).abs();
        residual = residual.max(defect);
    }

    Ok(ScatteringSolution { radial_grid, f_samples, u_prime, a0, residual })
}

/// Potential value at a segment endpoint: snapped to the exact breakpoint
/// when within `eps`, with the limit taken from inside the segment.
fn endpoint_value(
    potential: &RadialPotential,
    breakpoints: &[f64],
    eps: f64,
    r: f64,
    from_left: bool,
) -> f64 {
    for &bp in breakpoints {
        if (r - bp).abs() <= eps {
            return potential.eval_limit(bp, from_left);
        }
    }
    potential.eval(r)
}

/// One classical fourth-order step of (u, p)' = (p, V u / 2) over [a, b],
/// with one-sided potential limits at the segment endpoints.
fn rk4_segment(
    potential: &RadialPotential,
    breakpoints: &[f64],
    eps: f64,
    a: f64,
    b: f64,
    u: f64,
    p: f64,
) -> (f64, f64) {
    let h = b - a;
    let va = endpoint_value(potential, breakpoints, eps, a, false);
    let vm = potential.eval(0.5 * (a + b));
    let vb = endpoint_value(potential, breakpoints, eps, b, true);

    let k1u = p;
    let k1p = 0.5 * va * u;
    let k2u = p + 0.5 * h * k1p;
    let k2p = 0.5 * vm * (u + 0.5 * h * k1u);
    let k3u = p + 0.5 * h * k2p;
    let k3p = 0.5 * vm * (u + 0.5 * h * k2u);
    let k4u = p + h * k3p;
    let k4p = 0.5 * vb * (u + h * k3u);

    (
        u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
        p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
    )
}

fn linear_fit(u: &[f64], start: usize, end: usize, h: f64) -> (f64, f64) {
    let m = (end - start + 1) as f64;
    let mut sr = 0.0;
    let mut su = 0.0;
    let mut srr = 0.0;
    let mut sru = 0.0;
    for i in start..=end {
        let r = i as f64 * h;
        sr += r;
        su += u[i];
        srr += r * r;
        sru += r * u[i];
    }
    let denom = m * srr - sr * sr;
    let slope = (m * sru - sr * su) / denom;
    let intercept = (su - slope * sr) / m;
    (slope, intercept)
}
