//! Degree-one static Skyrmion: `u(0) = 0`, `u(inf) = pi`, found by shooting
//! on the origin slope.
//!
//! The profile solves the discrete static equation of the evolution scheme
//! exactly (node by node), so it is a stationary state of [`crate::accel`]
//! up to rounding.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{radial_derivative, radial_second_derivative, RadialGrid};
use crate::model::{accel, f_factor, face_radius, ModelParams};
use crate::state::FieldState;

/// Origin slopes scanned for an initial undershoot/overshoot bracket.
pub const SLOPE_SCAN: (f64, f64) = (0.1, 10.0);
const SCAN_POINTS: usize = 64;
/// The core has unit width in units of `alpha`; require this many nodes per unit.
pub const MIN_NODES_PER_CORE: f64 = 16.0;
const NEWTON_MAX_ITER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShotOutcome {
    /// Falls back before reaching pi.
    Undershoot,
    /// Crosses pi.
    Overshoot,
}

#[derive(Debug, Clone)]
pub struct StaticProfile {
    pub grid: RadialGrid,
    pub u: Vec<f64>,
    pub origin_slope: f64,
    pub alpha: f64,
    /// `|u(r_max) - pi|`
    pub boundary_residual: f64,
    /// Undershooting and overshooting slopes enclosing `origin_slope`.
    pub bracket: (f64, f64),
    pub bisection_steps: usize,
}

impl StaticProfile {
    pub fn bracket_width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }

    pub fn is_monotone(&self) -> bool {
        self.u.windows(2).all(|w| w[1] >= w[0])
    }

    pub fn as_state(&self) -> FieldState {
        FieldState::new(0.0, self.u.clone(), vec![0.0; self.u.len()])
    }

    /// Cubic interpolation of the profile at `r`, linear next to the ends and
    /// odd through the origin.
    pub fn interpolate(&self, r: f64) -> f64 {
        let h = self.grid.spacing();
        let x = r / h - 0.5;
        if x <= 0.0 {
            return self.u[0] * r / self.grid.r(0);
        }
        let i = (x.floor() as usize).min(self.u.len() - 2);
        let frac = x - i as f64;
        // cubic Lagrange where four points are available
        if i >= 1 && i + 2 < self.u.len() {
            let (p0, p1, p2, p3) = (self.u[i - 1], self.u[i], self.u[i + 1], self.u[i + 2]);
            let t = frac;
            return p1
                + 0.5
                    * t
                    * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
        }
        self.u[i] + frac * (self.u[i + 1] - self.u[i])
    }
}

/// Third-order coefficient of the origin expansion `u = a r + c3 r^3`.
pub fn origin_cubic_coefficient(a: f64, alpha: f64) -> f64 {
    let x = alpha * alpha * a * a;
    -a * a * a * (2.0 + x) / (15.0 * (1.0 + 2.0 * x))
}

/// Discrete static residual of the evolution scheme: `f(u) u_tt` with
/// `u_t = 0`, which approximates `f u_rr + (2/r) u_r - sin(2u)/r^2 (1 + alpha^2(sin^2 u/r^2 - u_r^2))`.
/// The last node has no outer face and is not meaningful.
pub fn static_residual(profile: &StaticProfile, alpha: f64) -> Result<Vec<f64>> {
    let params = ModelParams::skyrme(alpha)?;
    let a = accel(&profile.as_state(), &profile.grid, &params)?;
    Ok(profile
        .grid
        .nodes()
        .zip(a)
        .zip(&profile.u)
        .map(|((r, acc), &u)| f_factor(u, r, alpha) * acc)
        .collect())
}

/// The static equation evaluated nodewise with centered node derivatives;
/// measures how well the discrete profile approximates the continuum ODE.
pub fn continuum_static_residual(profile: &StaticProfile, alpha: f64) -> Vec<f64> {
    let ur = radial_derivative(&profile.u, &profile.grid);
    let urr = radial_second_derivative(&profile.u, &profile.grid);
    let a2 = alpha * alpha;
    profile
        .grid
        .nodes()
        .enumerate()
        .map(|(i, r)| {
            let u = profile.u[i];
            let s = u.sin();
            let inv_r2 = 1.0 / (r * r);
            f_factor(u, r, alpha) * urr[i] + 2.0 / r * ur[i]
                - (2.0 * u).sin() * inv_r2 * (1.0 + a2 * (s * s * inv_r2 - ur[i] * ur[i]))
        })
        .collect()
}

/// Marches the discrete static equation outward from the origin.
struct Marcher {
    h: f64,
    a2: f64,
    n: usize,
}

/// Flux `R^2 F D` and face term `R^2 F_u D^2` for the face at radius `big_r`.
#[inline]
fn face_terms(a2: f64, big_r: f64, ul: f64, ur: f64, h: f64) -> (f64, f64) {
    let inv_r2 = 1.0 / (big_r * big_r);
    let (s, c) = (0.5 * (ul + ur)).sin_cos();
    let d = (ur - ul) / h;
    let f = 1.0 + 2.0 * a2 * s * s * inv_r2;
    let f_u = 4.0 * a2 * s * c * inv_r2;
    (big_r * big_r * f * d, big_r * big_r * f_u * d * d)
}

impl Marcher {
    /// Fills `u` from `u[0]`, stopping early once the shot is classified when
    /// `classify` is set. Returns the classification, if any.
    fn run(&self, u: &mut [f64], classify: bool) -> Result<Option<ShotOutcome>> {
        let h = self.h;
        let a2 = self.a2;
        let (mut flux_in, mut q_in) = (0.0, 0.0);
        let mut outcome = None;
        for i in 0..self.n - 1 {
            let r = (i as f64 + 0.5) * h;
            let (s, c) = u[i].sin_cos();
            let dv = 4.0 * s * c * (1.0 + a2 * s * s / (r * r));
            // (2/h) flux_out - q_out/2 = target
            let target = 2.0 / h * flux_in + 0.5 * q_in + dv;
            let big_r = face_radius(i, h);
            let mut x = if i == 0 { 3.0 * u[0] } else { 2.0 * u[i] - u[i - 1] };
            let mut converged = false;
            for _ in 0..NEWTON_MAX_ITER {
                let (flux, q) = face_terms(a2, big_r, u[i], x, h);
                let g = 2.0 / h * flux - 0.5 * q - target;
                // derivative in x, with d(ubar)/dx = 1/2 and dD/dx = 1/h
                let inv_r2 = 1.0 / (big_r * big_r);
                let ubar = 0.5 * (u[i] + x);
                let d = (x - u[i]) / h;
                let f = 1.0 + 2.0 * a2 * ubar.sin().powi(2) * inv_r2;
                let f_u = 2.0 * a2 * (2.0 * ubar).sin() * inv_r2;
                let f_uu = 4.0 * a2 * (2.0 * ubar).cos() * inv_r2;
                let dflux = big_r * big_r * (0.5 * f_u * d + f / h);
                let dq = big_r * big_r * (0.5 * f_uu * d * d + 2.0 * f_u * d / h);
                let step = g / (2.0 / h * dflux - 0.5 * dq);
                x -= step;
                if !x.is_finite() {
                    break;
                }
                if step.abs() <= 1e-15 * x.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged || !x.is_finite() {
                return Err(Error::Diverged {
                    step: i,
                    t: 0.0,
                    reason: format!("static march did not converge at r = {}", face_radius(i, h) + 0.5 * h),
                });
            }
            u[i + 1] = x;
            let (flux, q) = face_terms(a2, big_r, u[i], x, h);
            flux_in = flux;
            q_in = q;
            if classify && outcome.is_none() {
                if x > PI {
                    outcome = Some(ShotOutcome::Overshoot);
                } else if x < u[i] {
                    outcome = Some(ShotOutcome::Undershoot);
                }
                if outcome.is_some() {
                    return Ok(outcome);
                }
            }
        }
        if !classify {
            return Ok(None);
        }
        // Reached r_max without crossing pi or turning back: look at the
        // growing far-field mode of pi - u, which behaves like a r + b / r^2.
        let n = self.n;
        let r = (n as f64 - 1.5) * h;
        let w = PI - u[n - 2];
        let wr = -(u[n - 1] - u[n - 3]) / (2.0 * h);
        let growing = (2.0 * w + r * wr) / (3.0 * r);
        Ok(Some(if growing > 0.0 {
            ShotOutcome::Undershoot
        } else {
            ShotOutcome::Overshoot
        }))
    }
}

fn start_value(a: f64, alpha: f64, r0: f64) -> f64 {
    a * r0 + origin_cubic_coefficient(a, alpha) * r0 * r0 * r0
}

/// Classifies the shot with origin slope `a`.
pub fn classify_slope(alpha: f64, grid: &RadialGrid, a: f64) -> Result<ShotOutcome> {
    let m = Marcher {
        h: grid.spacing(),
        a2: alpha * alpha,
        n: grid.len(),
    };
    let mut u = vec![0.0; grid.len()];
    u[0] = start_value(a, alpha, grid.r(0));
    Ok(m.run(&mut u, true)?.expect("classification requested"))
}

/// Shoots for the Skyrmion, bisecting on the origin slope until the
/// undershoot/overshoot bracket is narrower than `tolerance`.
pub fn shoot_skyrmion(alpha: f64, grid: &RadialGrid, tolerance: f64) -> Result<StaticProfile> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Skyrmion shooting needs alpha > 0, got {alpha}"
        )));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tolerance} must be positive")));
    }
    let limit = alpha / MIN_NODES_PER_CORE;
    if grid.spacing() > limit {
        return Err(Error::UnderResolved {
            h: grid.spacing(),
            limit,
            alpha,
        });
    }
    let (lo_scan, hi_scan) = SLOPE_SCAN;
    let ratio = (hi_scan / lo_scan).powf(1.0 / (SCAN_POINTS - 1) as f64);
    let mut prev: Option<(f64, ShotOutcome)> = None;
    let mut bracket = None;
    for k in 0..SCAN_POINTS {
        let a = lo_scan * ratio.powi(k as i32);
        let out = classify_slope(alpha, grid, a)?;
        if let Some((pa, ShotOutcome::Undershoot)) = prev {
            if out == ShotOutcome::Overshoot {
                bracket = Some((pa, a));
                break;
            }
        }
        prev = Some((a, out));
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::BracketNotFound {
        lo: lo_scan,
        hi: hi_scan,
    })?;
    let mut steps = 0;
    while hi - lo >= tolerance {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match classify_slope(alpha, grid, mid)? {
            ShotOutcome::Undershoot => lo = mid,
            ShotOutcome::Overshoot => hi = mid,
        }
        steps += 1;
    }
    let a = 0.5 * (lo + hi);
    let m = Marcher {
        h: grid.spacing(),
        a2: alpha * alpha,
        n: grid.len(),
    };
    let mut u = vec![0.0; grid.len()];
    u[0] = start_value(a, alpha, grid.r(0));
    m.run(&mut u, false)?;
    let boundary_residual = (u[u.len() - 1] - PI).abs();
    Ok(StaticProfile {
        grid: *grid,
        u,
        origin_slope: a,
        alpha,
        boundary_residual,
        bracket: (lo, hi),
        bisection_steps: steps,
    })
}

/// Largest `|residual|` over nodes `1..len-1`.
pub fn max_interior(residual: &[f64]) -> f64 {
    residual[1..residual.len() - 1].iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    #[test]
    fn vacua_have_zero_residual() {
        let g = build_grid(64, 8.0).unwrap();
        let mk = |v: f64| StaticProfile {
            grid: g,
            u: vec![v; 64],
            origin_slope: 0.0,
            alpha: 1.0,
            boundary_residual: 0.0,
            bracket: (0.0, 0.0),
            bisection_steps: 0,
        };
        assert!(static_residual(&mk(0.0), 1.0).unwrap().iter().all(|&v| v == 0.0));
        let r = static_residual(&mk(PI), 1.0).unwrap();
        assert!(max_interior(&r) < 1e-12, "{}", max_interior(&r));
        let r = continuum_static_residual(&mk(PI), 1.0);
        assert!(max_interior(&r) < 1e-12);
    }

    #[test]
    fn cubic_coefficient_balances_the_origin_expansion() {
        // residual of u = a r + c3 r^3 is O(r^3) near the origin
        let (a, alpha) = (2.0, 1.3);
        let c3 = origin_cubic_coefficient(a, alpha);
        let res = |r: f64| {
            let u = a * r + c3 * r.powi(3);
            let ur = a + 3.0 * c3 * r * r;
            let urr = 6.0 * c3 * r;
            let s = u.sin();
            f_factor(u, r, alpha) * urr + 2.0 / r * ur
                - (2.0 * u).sin() / (r * r) * (1.0 + alpha * alpha * (s * s / (r * r) - ur * ur))
        };
        let q = res(1e-2) / res(5e-3);
        assert!((q - 8.0).abs() < 0.1, "{q}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = build_grid(64, 8.0).unwrap(); // h = 0.125
        assert!(matches!(shoot_skyrmion(1.0, &g, 1e-8), Err(Error::UnderResolved { .. })));
        assert!(shoot_skyrmion(0.0, &g, 1e-8).is_err());
        let g = build_grid(1024, 8.0).unwrap();
        assert!(shoot_skyrmion(1.0, &g, 0.0).is_err());
    }

    #[test]
    fn coarse_shot_is_bracketed_and_monotone() {
        let g = build_grid(1024, 20.0).unwrap();
        let p = shoot_skyrmion(1.0, &g, 1e-9).unwrap();
        assert!(p.bracket_width() < 1e-9);
        assert!(p.bracket.0 <= p.origin_slope && p.origin_slope <= p.bracket.1);
        assert_eq!(classify_slope(1.0, &g, p.bracket.0).unwrap(), ShotOutcome::Undershoot);
        assert_eq!(classify_slope(1.0, &g, p.bracket.1).unwrap(), ShotOutcome::Overshoot);
        assert!(p.is_monotone());
        assert!((p.origin_slope - 2.007).abs() < 0.01, "{}", p.origin_slope);
        assert!(max_interior(&static_residual(&p, 1.0).unwrap()) < 1e-8);
    }
}
