//! Model parameters, the nonlinear coefficient functions and the `u_tt`
//! evaluators for the Skyrme and Adkins-Nappi equations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::state::FieldState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Skyrme,
    AdkinsNappi,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Skyrme => "skyrme",
            ModelKind::AdkinsNappi => "adkins-nappi",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub kind: ModelKind,
    /// Skyrme coupling (a length); unused by Adkins-Nappi.
    pub alpha: f64,
}

impl ModelParams {
    pub fn new(kind: ModelKind, alpha: f64) -> Result<Self> {
        match kind {
            ModelKind::Skyrme => Self::skyrme(alpha),
            ModelKind::AdkinsNappi => Ok(Self::adkins_nappi()),
        }
    }

    pub fn skyrme(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Skyrme coupling alpha = {alpha} must be positive"
            )));
        }
        Ok(Self {
            kind: ModelKind::Skyrme,
            alpha,
        })
    }

    pub fn adkins_nappi() -> Self {
        Self {
            kind: ModelKind::AdkinsNappi,
            alpha: 0.0,
        }
    }

    /// Skyrme equation with `alpha = 0`, i.e. the bare wave-map nonlinearity.
    /// Only meant for debugging; the static solver rejects it.
    pub fn wave_map_limit() -> Self {
        Self {
            kind: ModelKind::Skyrme,
            alpha: 0.0,
        }
    }
}

/// Quasilinear factor `1 + 2 alpha^2 sin^2(u) / r^2`; never below one.
#[inline]
pub fn f_factor(u: f64, r: f64, alpha: f64) -> f64 {
    let s = u.sin();
    1.0 + 2.0 * alpha * alpha * s * s / (r * r)
}

/// Below this magnitude `u - sin(u)cos(u)` is summed from its Taylor series.
pub const G1_SERIES_THRESHOLD: f64 = 0.05;

/// `u - sin(u) cos(u)`, accurate to a relative 1e-12 for all finite `u`.
///
/// The closed form `u - sin(2u)/2` cancels catastrophically near zero, where
/// the function behaves like `2u^3/3`; there the odd series through `u^11` is
/// used instead. The result is exactly odd in `u`.
#[inline]
pub fn stable_g1(u: f64) -> f64 {
    let a = u.abs();
    let g = if a < G1_SERIES_THRESHOLD {
        let x = a * a;
        a * x
            * (2.0 / 3.0
                + x * (-2.0 / 15.0 + x * (4.0 / 315.0 + x * (-2.0 / 2835.0 + x * (4.0 / 155925.0)))))
    } else {
        a - 0.5 * (2.0 * a).sin()
    };
    g.copysign(u)
}

/// Scratch space for [`accel_into`]; holds the face fluxes.
#[derive(Debug, Clone)]
pub struct AccelWorkspace {
    flux: Vec<f64>,
    face_q: Vec<f64>,
}

impl AccelWorkspace {
    pub fn new(grid: &RadialGrid) -> Self {
        Self {
            flux: vec![0.0; grid.len()],
            face_q: vec![0.0; grid.len()],
        }
    }
}

/// Static part of the energy density divided by `r^2` at a node:
/// `2 sin^2 u / r^2 + alpha^2 sin^4 u / r^4` (Skyrme) or
/// `2 sin^2 u / r^2 + g1(u)^2 / r^4` (Adkins-Nappi).
#[inline]
pub(crate) fn potential_bracket(params: &ModelParams, u: f64, r: f64) -> f64 {
    let inv_r2 = 1.0 / (r * r);
    let s = u.sin();
    let s2 = s * s;
    match params.kind {
        ModelKind::Skyrme => 2.0 * s2 * inv_r2 + params.alpha * params.alpha * s2 * s2 * inv_r2 * inv_r2,
        ModelKind::AdkinsNappi => {
            let g = stable_g1(u);
            2.0 * s2 * inv_r2 + g * g * inv_r2 * inv_r2
        }
    }
}

/// Kinetic factor multiplying `u_t^2` and `u_r^2` in the energy density.
#[inline]
pub(crate) fn kinetic_factor(params: &ModelParams, u: f64, r: f64) -> f64 {
    match params.kind {
        ModelKind::Skyrme => f_factor(u, r, params.alpha),
        ModelKind::AdkinsNappi => 1.0,
    }
}

/// Radius of the face between nodes `j` and `j + 1`.
#[inline]
pub(crate) fn face_radius(j: usize, h: f64) -> f64 {
    (j as f64 + 1.0) * h
}

/// `u_tt` for the state's model on every node.
pub fn accel(state: &FieldState, grid: &RadialGrid, params: &ModelParams) -> Result<Vec<f64>> {
    let mut out = vec![0.0; grid.len()];
    let mut ws = AccelWorkspace::new(grid);
    accel_into(&state.u, &state.ut, grid, params, &mut ws, &mut out).map_err(|i| {
        Error::Diverged {
            step: 0,
            t: state.t,
            reason: format!("non-finite acceleration at node {i}"),
        }
    })?;
    Ok(out)
}

/// Evaluates `u_tt` into `out`. On a non-finite result returns the offending node index.
///
/// The radial operator is discretized in flux form from the discrete
/// Lagrangian
/// `sum_i h r_i^2 f_i u_t,i^2 - sum_j h R_j^2 F_j D_j^2 - sum_i h r_i^2 V_i`
/// with face radii `R_j = (j + 1) h`, face gradients `D_j = (u_{j+1} - u_j)/h`
/// and `F_j = f` at the face average of `u`. The semi-discrete system then
/// conserves the matching discrete energy (see [`crate::diagnostics::energy`]).
/// The face behind the first node sits at `r = 0` and carries no flux, which is
/// the odd continuation through the origin; the last node has no outer face.
pub fn accel_into(
    u: &[f64],
    ut: &[f64],
    grid: &RadialGrid,
    params: &ModelParams,
    ws: &mut AccelWorkspace,
    out: &mut [f64],
) -> std::result::Result<(), usize> {
    let n = u.len();
    let h = grid.spacing();
    let a2 = params.alpha * params.alpha;
    let skyrme = params.kind == ModelKind::Skyrme;
    for j in 0..n - 1 {
        let big_r = face_radius(j, h);
        let inv_r2 = 1.0 / (big_r * big_r);
        let d = (u[j + 1] - u[j]) / h;
        if skyrme {
            let (s, c) = (0.5 * (u[j] + u[j + 1])).sin_cos();
            let f = 1.0 + 2.0 * a2 * s * s * inv_r2;
            let f_u = 4.0 * a2 * s * c * inv_r2;
            ws.flux[j] = big_r * big_r * f * d;
            ws.face_q[j] = big_r * big_r * f_u * d * d;
        } else {
            ws.flux[j] = big_r * big_r * d;
            ws.face_q[j] = 0.0;
        }
    }
    ws.flux[n - 1] = 0.0;
    ws.face_q[n - 1] = 0.0;
    let two_over_h = 2.0 / h;
    for i in 0..n {
        let r = (i as f64 + 0.5) * h;
        let r2 = r * r;
        let inv_r2 = 1.0 / r2;
        let (flux_in, q_in) = if i == 0 { (0.0, 0.0) } else { (ws.flux[i - 1], ws.face_q[i - 1]) };
        let div = two_over_h * (ws.flux[i] - flux_in);
        let (s, c) = u[i].sin_cos();
        let s2 = s * s;
        let sin2u = 2.0 * s * c;
        out[i] = if skyrme {
            let f = 1.0 + 2.0 * a2 * s2 * inv_r2;
            let f_u = 2.0 * a2 * sin2u * inv_r2;
            let dv = 2.0 * sin2u * (1.0 + a2 * s2 * inv_r2);
            (div - 0.5 * (ws.face_q[i] + q_in) - r2 * f_u * ut[i] * ut[i] - dv) / (2.0 * r2 * f)
        } else {
            // 1 - cos(2u) written as 2 sin^2(u) to keep small-u accuracy.
            let dv = 2.0 * sin2u + 4.0 * stable_g1(u[i]) * s2 * inv_r2;
            (div - dv) / (2.0 * r2)
        };
    }
    match out.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(i),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn f_factor_values() {
        assert_eq!(f_factor(0.0, 1.0, 1.0), 1.0);
        assert!((f_factor(FRAC_PI_2, 1.0, 1.0) - 3.0).abs() < 1e-15);
        assert!((f_factor(FRAC_PI_2, 2f64.sqrt(), 1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn g1_reference_values() {
        assert_eq!(stable_g1(0.0), 0.0);
        assert!((stable_g1(FRAC_PI_2) - FRAC_PI_2).abs() < 1e-15);
        // 50-digit reference values of u - sin(2u)/2.
        let cases = [
            (1e-4, 6.6666666533333333460317460246913580272566938268933e-13),
            (1e-3, 6.6666653333334603174532627868526535127424017438547e-10),
            (0.0499, 8.2793090784553454844751312757179780880109584010254e-5),
            (0.05, 8.3291676585923846592900794688986505042305991008856e-5),
            (0.3, 1.7678763302482321399527277170671046445055957502924e-2),
            (2.5, 2.9794621373315692344465772030779969866762307719823),
            (1e-8, 6.6666666666666665333333333333333345128728510258071e-25),
        ];
        for (u, want) in cases {
            let got = stable_g1(u);
            assert!(((got - want) / want).abs() < 1e-12, "u = {u}: {got} vs {want}");
        }
    }

    #[test]
    fn g1_continuous_across_threshold() {
        let below = stable_g1(G1_SERIES_THRESHOLD * (1.0 - 1e-12));
        let above = stable_g1(G1_SERIES_THRESHOLD);
        assert!(((below - above) / above).abs() < 1e-11);
    }

    proptest! {
        #[test]
        fn f_factor_at_least_one(u in -10.0f64..10.0, r in 1e-6f64..100.0, alpha in 1e-6f64..4.0) {
            prop_assert!(f_factor(u, r, alpha) >= 1.0);
        }

        #[test]
        fn g1_is_odd(u in -20.0f64..20.0) {
            prop_assert_eq!(stable_g1(-u), -stable_g1(u));
        }

        #[test]
        fn accel_is_odd(amp in -0.8f64..0.8, vel in -0.5f64..0.5, center in 1.0f64..4.0) {
            let g = build_grid(64, 8.0).unwrap();
            let u: Vec<f64> = g.nodes().map(|r| amp * r * (-(r - center).powi(2)).exp()).collect();
            let ut: Vec<f64> = g.nodes().map(|r| vel * r * (-(r - 2.0).powi(2)).exp()).collect();
            let pos = FieldState::new(0.0, u.clone(), ut.clone());
            let neg = FieldState::new(0.0, u.iter().map(|v| -v).collect(), ut.iter().map(|v| -v).collect());
            for params in [ModelParams::skyrme(1.3).unwrap(), ModelParams::adkins_nappi()] {
                let a = accel(&pos, &g, &params).unwrap();
                let b = accel(&neg, &g, &params).unwrap();
                for (x, y) in a.iter().zip(&b) {
                    prop_assert_eq!(*x, -*y);
                }
            }
        }
    }

    #[test]
    fn vacuum_states_are_stationary() {
        let g = build_grid(32, 4.0).unwrap();
        let zero = FieldState::zeros(&g);
        for params in [ModelParams::skyrme(1.0).unwrap(), ModelParams::adkins_nappi()] {
            assert!(accel(&zero, &g, &params).unwrap().iter().all(|&a| a == 0.0));
            let pi_state = FieldState::new(0.0, vec![PI; 32], vec![0.0; 32]);
            let a = accel(&pi_state, &g, &params).unwrap();
            // interior nodes only: the origin node sees the odd continuation
            for &v in &a[1..32] {
                assert!(v.abs() < 1e-12, "{v}");
            }
        }
    }

    #[test]
    fn skyrme_rejects_nonpositive_alpha() {
        assert!(ModelParams::skyrme(0.0).is_err());
        assert!(ModelParams::skyrme(-1.0).is_err());
        assert!(ModelParams::new(ModelKind::AdkinsNappi, -1.0).is_ok());
    }

    #[test]
    fn non_finite_acceleration_is_divergence() {
        let g = build_grid(16, 2.0).unwrap();
        let mut u = vec![0.0; 16];
        u[3] = f64::NAN;
        let s = FieldState::new(0.5, u, vec![0.0; 16]);
        match accel(&s, &g, &ModelParams::adkins_nappi()) {
            Err(Error::Diverged { .. }) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    /// Exact Skyrme `u_tt` for `u = A r exp(-r^2)`, `u_t = 0`, using closed-form derivatives.
    fn manufactured_skyrme_accel(amp: f64, r: f64) -> f64 {
        let e = (-r * r).exp();
        let u = amp * r * e;
        let ur = amp * (1.0 - 2.0 * r * r) * e;
        let urr = amp * (-6.0 * r + 4.0 * r * r * r) * e;
        let s = u.sin();
        let f = 1.0 + 2.0 * s * s / (r * r);
        urr + (2.0 / r * ur - (2.0 * u).sin() / (r * r) * (1.0 + (-ur * ur + s * s / (r * r)))) / f
    }

    #[test]
    fn manufactured_oracle_matches_symbolic_value() {
        // symbolic evaluation at r = 1, 50 digits
        let want = -0.22026439151735820290916970520699765198093620234897;
        assert!((manufactured_skyrme_accel(0.1, 1.0) - want).abs() < 1e-15);
    }

    #[test]
    fn accel_converges_at_second_order() {
        let params = ModelParams::skyrme(1.0).unwrap();
        let err = |cells: usize| {
            let g = build_grid(cells, 8.0).unwrap();
            let u: Vec<f64> = g.nodes().map(|r| 0.1 * r * (-r * r).exp()).collect();
            let s = FieldState::new(0.0, u, vec![0.0; cells]);
            let a = accel(&s, &g, &params).unwrap();
            let i = g.nearest_index(1.0);
            (a[i] - manufactured_skyrme_accel(0.1, g.r(i))).abs()
        };
        let e = [err(256), err(512), err(1024), err(2048), err(4096)];
        assert!(e[4] < 1e-6, "{e:?}");
        for w in e.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "{e:?}");
        }
    }

    #[test]
    fn small_amplitude_approaches_linear_operator() {
        let g = build_grid(128, 8.0).unwrap();
        let params = ModelParams::skyrme(1.0).unwrap();
        let shape: Vec<f64> = g.nodes().map(|r| r * (-(r - 3.0).powi(2)).exp()).collect();
        let vel: Vec<f64> = g.nodes().map(|r| r * (-(r - 2.5).powi(2)).exp()).collect();
        let at = |eps: f64| {
            let s = FieldState::new(
                0.0,
                shape.iter().map(|v| eps * v).collect(),
                vel.iter().map(|v| eps * v).collect(),
            );
            accel(&s, &g, &params).unwrap()
        };
        let lin = at(1e-8);
        let rem = |eps: f64| {
            at(eps)
                .iter()
                .zip(&lin)
                .map(|(a, l)| (a - eps / 1e-8 * l).abs())
                .fold(0.0, f64::max)
                / eps.powi(3)
        };
        let (a, b) = (rem(1e-2), rem(5e-3));
        assert!(a > 0.0 && (a / b - 1.0).abs() < 0.05, "{a} {b}");
    }
}
