//! Modular periods: the AGM closed form for the elliptic family and the
//! first-return time of the modular flow for general polynomial level sets.

use crate::poly::Poly;

use super::SurfaceError;

/// π / AGM(1, √(1−t)): the modular period λ₀(t) of the elliptic family,
/// equal to π·F(1/2, 1/2, 1; t).
pub fn modular_period_elliptic(t: f64) -> Result<f64, SurfaceError> {
    if !(t > 0.0 && t < 1.0) {
        return Err(SurfaceError::ParameterOutOfRange(t));
    }
    Ok(std::f64::consts::PI / agm(1.0, (1.0 - t).sqrt()))
}

/// Arithmetic-geometric mean.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..60 {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        if (an - bn).abs() <= 1e-17 * an.abs() {
            return an;
        }
        a = an;
        b = bn;
    }
    a
}

/// Defining power series of F(1/2, 1/2, 1; t), summed adaptively. Converges
/// for |t| < 1; used as the independent oracle against the AGM value.
pub fn hypergeometric_series_half_half_one(t: f64) -> Result<f64, SurfaceError> {
    if !(t > 0.0 && t < 1.0) {
        return Err(SurfaceError::ParameterOutOfRange(t));
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for n in 0u64..200_000 {
        let ratio = (n as f64 + 0.5) / (n as f64 + 1.0);
        term *= ratio * ratio * t;
        sum += term;
        if term < 1e-18 * sum {
            return Ok(sum);
        }
    }
    Err(SurfaceError::SeriesDidNotConverge(t))
}

/// π·F(1/2,1/2,1;t) by the series.
pub fn modular_period_series(t: f64) -> Result<f64, SurfaceError> {
    Ok(std::f64::consts::PI * hypergeometric_series_half_half_one(t)?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum FlowOutcome {
    /// First-return time of the modular flow (positive).
    Period(f64),
    /// The trajectory left the working region or exhausted the time budget
    /// without returning: a non-compact component.
    NonCompact,
}

/// Integrate the modular vector field Z = (f_y, −f_x) from a seed near a
/// level-set component of {f = 0} and measure the first-return time across
/// the Poincaré section through the (projected) seed orthogonal to Z.
///
/// The integrator is an embedded Runge–Kutta–Fehlberg 4(5) pair with
/// adaptive steps; after every accepted step the state is projected back
/// onto the level set by a Newton step along ∇f.
pub fn modular_period_flow(f: &Poly, seed: [f64; 2]) -> Result<FlowOutcome, SurfaceError> {
    if f.nvars() != 2 {
        return Err(SurfaceError::NotAPlaneCurve(f.nvars()));
    }
    let fx = f.derivative(0);
    let fy = f.derivative(1);
    let field = |p: [f64; 2]| -> [f64; 2] { [fy.eval_f64(&p), -fx.eval_f64(&p)] };
    let project = |mut p: [f64; 2]| -> Option<[f64; 2]> {
        for _ in 0..50 {
            let v = f.eval_f64(&p);
            let g = [fx.eval_f64(&p), fy.eval_f64(&p)];
            let g2 = g[0] * g[0] + g[1] * g[1];
            if g2 < 1e-30 {
                return None;
            }
            if v.abs() < 1e-14 * (1.0 + g2.sqrt()) {
                return Some(p);
            }
            p = [p[0] - v * g[0] / g2, p[1] - v * g[1] / g2];
        }
        None
    };
    let start = project(seed).ok_or(SurfaceError::SeedProjectionFailed)?;
    let z0 = field(start);
    let z0n = (z0[0] * z0[0] + z0[1] * z0[1]).sqrt();
    if z0n < 1e-12 {
        return Err(SurfaceError::StationarySeed);
    }
    let normal = [z0[0] / z0n, z0[1] / z0n];
    let section = |p: [f64; 2]| -> f64 {
        normal[0] * (p[0] - start[0]) + normal[1] * (p[1] - start[1])
    };

    let mut p = start;
    let mut t = 0.0f64;
    let mut h = 1e-4 / z0n.max(1e-6);
    let tol = 1e-11;
    let max_time = 1.0e4;
    let escape = 1.0e3;
    let mut g_prev = 0.0f64;
    let mut left_section = false;
    for _ in 0..50_000_000u64 {
        if t > max_time {
            return Ok(FlowOutcome::NonCompact);
        }
        if p[0].abs() > escape || p[1].abs() > escape {
            return Ok(FlowOutcome::NonCompact);
        }
        let (p_new, err) = rkf45_step(&field, p, h);
        let scale = 1.0 + p[0].abs().max(p[1].abs());
        if err > tol * scale {
            h *= 0.5 * (tol * scale / err).powf(0.2).clamp(0.1, 1.0);
            continue;
        }
        let p_proj = project(p_new).unwrap_or(p_new);
        let t_new = t + h;
        let g_new = section(p_proj);
        if !left_section && g_new < -1e-9 {
            left_section = true;
        }
        if left_section && g_prev < 0.0 && g_new >= 0.0 {
            // refine the crossing by bisection on the step fraction
            let mut lo = 0.0f64;
            let mut hi = h;
            let base = p;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let (pm, _) = rkf45_step(&field, base, mid);
                let pm = project(pm).unwrap_or(pm);
                if section(pm) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let tc = 0.5 * (lo + hi);
            let (pc, _) = rkf45_step(&field, base, tc);
            let pc = project(pc).unwrap_or(pc);
            // the return of the 1-dimensional level-set flow is to the seed
            // itself; crossings of the section line far from the seed are
            // other strands of the same level set and are skipped
            let dist = ((pc[0] - start[0]).powi(2) + (pc[1] - start[1]).powi(2)).sqrt();
            let dir = field(pc);
            if dist <= 1e-3 * (1.0 + start[0].abs() + start[1].abs())
                && normal[0] * dir[0] + normal[1] * dir[1] > 0.0
            {
                return Ok(FlowOutcome::Period((t + tc).abs()));
            }
        }
        g_prev = g_new;
        p = p_proj;
        t = t_new;
        if err > 0.0 {
            h = (h * 0.9 * (tol * scale / err).powf(0.2).min(4.0)).min(0.05);
        } else {
            h = (h * 2.0).min(0.05);
        }
    }
    Ok(FlowOutcome::NonCompact)
}

/// One Runge–Kutta–Fehlberg 4(5) step; returns the 5th-order estimate and
/// the embedded error estimate.
fn rkf45_step(field: &impl Fn([f64; 2]) -> [f64; 2], p: [f64; 2], h: f64) -> ([f64; 2], f64) {
    let add = |a: [f64; 2], terms: &[(f64, [f64; 2])]| -> [f64; 2] {
        let mut out = a;
        for (c, k) in terms {
            out[0] += h * c * k[0];
            out[1] += h * c * k[1];
        }
        out
    };
    let k1 = field(p);
    let k2 = field(add(p, &[(1.0 / 4.0, k1)]));
    let k3 = field(add(p, &[(3.0 / 32.0, k1), (9.0 / 32.0, k2)]));
    let k4 = field(add(
        p,
        &[
            (1932.0 / 2197.0, k1),
            (-7200.0 / 2197.0, k2),
            (7296.0 / 2197.0, k3),
        ],
    ));
    let k5 = field(add(
        p,
        &[
            (439.0 / 216.0, k1),
            (-8.0, k2),
            (3680.0 / 513.0, k3),
            (-845.0 / 4104.0, k4),
        ],
    ));
    let k6 = field(add(
        p,
        &[
            (-8.0 / 27.0, k1),
            (2.0, k2),
            (-3544.0 / 2565.0, k3),
            (1859.0 / 4104.0, k4),
            (-11.0 / 40.0, k5),
        ],
    ));
    let order5 = add(
        p,
        &[
            (16.0 / 135.0, k1),
            (6656.0 / 12825.0, k3),
            (28561.0 / 56430.0, k4),
            (-9.0 / 50.0, k5),
            (2.0 / 55.0, k6),
        ],
    );
    let order4 = add(
        p,
        &[
            (25.0 / 216.0, k1),
            (1408.0 / 2565.0, k3),
            (2197.0 / 4104.0, k4),
            (-1.0 / 5.0, k5),
        ],
    );
    let err = ((order5[0] - order4[0]).powi(2) + (order5[1] - order4[1]).powi(2)).sqrt();
    (order5, err)
}
