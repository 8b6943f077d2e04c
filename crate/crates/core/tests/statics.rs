//! Skyrmion shooting against an independent continuum oracle.

use std::f64::consts::PI;

use skyrme_core::statics::{classify_slope, continuum_static_residual, ShotOutcome};
use skyrme_core::{build_grid, shoot_skyrmion};

/// Right-hand side of the continuum static equation as a first-order system.
fn rhs(r: f64, y: [f64; 2], alpha: f64) -> [f64; 2] {
    let [u, p] = y;
    let a2 = alpha * alpha;
    let s = u.sin();
    let f = 1.0 + 2.0 * a2 * s * s / (r * r);
    let bracket = 1.0 + a2 * (s * s / (r * r) - p * p);
    [p, ((2.0 * u).sin() / (r * r) * bracket - 2.0 * p / r) / f]
}

/// Classic RK4 on the continuum ODE from a series start at small r;
/// `true` for overshoot.
fn continuum_shot(a: f64, alpha: f64, r_end: f64, h: f64, profile: Option<&mut Vec<(f64, f64)>>) -> bool {
    let x = alpha * alpha * a * a;
    let c3 = -a * a * a * (2.0 + x) / (15.0 * (1.0 + 2.0 * x));
    let mut r = 1e-3;
    let mut y = [a * r + c3 * r * r * r, a + 3.0 * c3 * r * r];
    let mut out = profile;
    while r < r_end {
        let k1 = rhs(r, y, alpha);
        let y2 = [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]];
        let k2 = rhs(r + 0.5 * h, y2, alpha);
        let y3 = [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]];
        let k3 = rhs(r + 0.5 * h, y3, alpha);
        let y4 = [y[0] + h * k3[0], y[1] + h * k3[1]];
        let k4 = rhs(r + h, y4, alpha);
        for k in 0..2 {
            y[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        }
        r += h;
        if let Some(p) = out.as_deref_mut() {
            p.push((r, y[0]));
        }
        if y[0] > PI {
            return true;
        }
        if y[1] < 0.0 {
            return false;
        }
    }
    // far field: pi - u = A / r^2 + B r, and B > 0 means the shot falls short
    let (w, dw) = (PI - y[0], -y[1]);
    (2.0 * w + r * dw) / (3.0 * r) < 0.0
}

fn continuum_slope(alpha: f64) -> f64 {
    let (mut lo, mut hi) = (1.5 / alpha, 2.5 / alpha);
    for _ in 0..45 {
        let mid = 0.5 * (lo + hi);
        if continuum_shot(mid, alpha, 30.0 * alpha, 1e-3 * alpha, None) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn matches_continuum_shooting() {
    let oracle = continuum_slope(1.0);
    assert!((oracle - 2.0075).abs() < 1e-3, "oracle {oracle}");
    let grid = build_grid(8192, 50.0).unwrap();
    let profile = shoot_skyrmion(1.0, &grid, 1e-10).unwrap();
    assert!((profile.origin_slope - oracle).abs() < 2e-4, "{} vs {oracle}", profile.origin_slope);
    let mut path = Vec::new();
    continuum_shot(oracle, 1.0, 8.0, 1e-3, Some(&mut path));
    for target in [0.5, 1.0, 2.0, 4.0] {
        let &(r, u) = path.iter().min_by(|a, b| (a.0 - target).abs().total_cmp(&(b.0 - target).abs())).unwrap();
        let d = (profile.interpolate(r) - u).abs();
        assert!(d < 5e-4, "r = {r}: {} vs {u}", profile.interpolate(r));
    }
}

#[test]
fn brackets_certify_the_slope() {
    for alpha in [0.5f64, 1.0, 2.0] {
        let grid = build_grid(2048, 20.0 * alpha.max(1.0)).unwrap();
        let p = shoot_skyrmion(alpha, &grid, 1e-9).unwrap();
        let (lo, hi) = p.bracket;
        assert!(hi - lo < 1e-9 && lo <= p.origin_slope && p.origin_slope <= hi);
        assert_eq!(classify_slope(alpha, &grid, lo).unwrap(), ShotOutcome::Undershoot);
        assert_eq!(classify_slope(alpha, &grid, hi).unwrap(), ShotOutcome::Overshoot);
        // a* scales like 1/alpha
        assert!((p.origin_slope * alpha - 2.0075).abs() < 0.02, "alpha {alpha}: {}", p.origin_slope);
    }
}

#[test]
fn continuum_residual_converges_at_second_order() {
    let core_max = |cells: usize| {
        let grid = build_grid(cells, 50.0).unwrap();
        let p = shoot_skyrmion(1.0, &grid, 1e-11).unwrap();
        let res = continuum_static_residual(&p, 1.0);
        grid.nodes()
            .zip(res)
            .filter(|(r, _)| (0.5..=10.0).contains(r))
            .fold(0.0f64, |m, (_, v)| m.max(v.abs()))
    };
    let (coarse, fine) = (core_max(4096), core_max(8192));
    let order = (coarse / fine).log2();
    assert!(order >= 1.9, "order {order} ({coarse:e}, {fine:e})");
}
