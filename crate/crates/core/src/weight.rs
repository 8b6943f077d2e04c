//! Radial and space-time weight functions with closed-form derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weight `w(r, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Weight {
    /// `r^n`
    PowerLaw { n: f64 },
    /// `tanh((r + sigma t) / L)`
    TanhCone { scale: f64, sigma: f64 },
    /// `(1 + tanh((r + sigma t0 - sigma_tilde (t0 - t)) / L)) / 2`; the
    /// transition moves at speed `sigma_tilde`.
    HalfTanhShifted {
        scale: f64,
        sigma: f64,
        sigma_tilde: f64,
        t0: f64,
    },
    Constant { c: f64 },
}

/// `sech^2(x)` without overflow for large `|x|`.
#[inline]
pub fn sech2(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// Value and derivatives of a weight at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightEval {
    pub value: f64,
    pub dr: f64,
    pub drr: f64,
    pub dt: f64,
}

impl Weight {
    pub fn power(n: f64) -> Self {
        Weight::PowerLaw { n }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match *self {
            Weight::PowerLaw { n } if !n.is_finite() => bad(format!("power-law exponent {n} is not finite")),
            Weight::TanhCone { scale, sigma } if !(scale > 0.0 && scale.is_finite() && sigma.is_finite()) => {
                bad(format!("tanh cone needs scale > 0 (got {scale}) and finite sigma (got {sigma})"))
            }
            Weight::HalfTanhShifted {
                scale,
                sigma,
                sigma_tilde,
                t0,
            } if !(scale > 0.0 && scale.is_finite() && sigma.is_finite() && sigma_tilde.is_finite() && t0.is_finite()) => {
                bad(format!("shifted half-tanh needs scale > 0 (got {scale}) and finite parameters"))
            }
            Weight::Constant { c } if !c.is_finite() => bad(format!("constant weight {c} is not finite")),
            _ => Ok(()),
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        matches!(self, Weight::TanhCone { .. } | Weight::HalfTanhShifted { .. })
    }

    #[inline]
    fn tanh_arg(&self, r: f64, t: f64) -> Option<(f64, f64, f64)> {
        // (argument, 1 / L, d argument / dt)
        match *self {
            Weight::TanhCone { scale, sigma } => Some(((r + sigma * t) / scale, 1.0 / scale, sigma / scale)),
            Weight::HalfTanhShifted {
                scale,
                sigma,
                sigma_tilde,
                t0,
            } => Some((
                (r + sigma * t0 - sigma_tilde * (t0 - t)) / scale,
                1.0 / scale,
                sigma_tilde / scale,
            )),
            _ => None,
        }
    }

    pub fn eval(&self, r: f64, t: f64) -> WeightEval {
        match *self {
            Weight::PowerLaw { n } => {
                let v = r.powf(n);
                WeightEval {
                    value: v,
                    dr: n * v / r,
                    drr: n * (n - 1.0) * v / (r * r),
                    dt: 0.0,
                }
            }
            Weight::Constant { c } => WeightEval {
                value: c,
                dr: 0.0,
                drr: 0.0,
                dt: 0.0,
            },
            _ => {
                let (x, inv_l, xt) = self.tanh_arg(r, t).unwrap();
                let th = x.tanh();
                let s2 = sech2(x);
                // d/dx tanh = sech^2, d^2/dx^2 tanh = -2 tanh sech^2
                let (k, v) = match self {
                    Weight::TanhCone { .. } => (1.0, th),
                    _ => (0.5, 0.5 * (1.0 + th)),
                };
                WeightEval {
                    value: v,
                    dr: k * s2 * inv_l,
                    drr: -2.0 * k * th * s2 * inv_l * inv_l,
                    dt: k * s2 * xt,
                }
            }
        }
    }

    /// Short identifier safe for CSV column names and file names.
    pub fn label(&self) -> String {
        match *self {
            Weight::PowerLaw { n } => format!("r{n}"),
            Weight::TanhCone { scale, sigma } => format!("tanh_L{scale}_s{sigma}"),
            Weight::HalfTanhShifted {
                scale,
                sigma,
                sigma_tilde,
                t0,
            } => format!("halftanh_L{scale}_s{sigma}_st{sigma_tilde}_t{t0}"),
            Weight::Constant { c } => format!("const{c}"),
        }
    }

    #[inline]
    pub fn value(&self, r: f64, t: f64) -> f64 {
        self.eval(r, t).value
    }

    /// Evaluates the weight on every node at time `t`.
    pub fn sample(&self, nodes: &[f64], t: f64) -> Vec<WeightEval> {
        nodes.iter().map(|&r| self.eval(r, t)).collect()
    }
}

impl std::fmt::Display for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Weight::PowerLaw { n } => write!(f, "r^{n}"),
            Weight::TanhCone { scale, sigma } => write!(f, "tanh((r{sigma:+}t)/{scale})"),
            Weight::HalfTanhShifted {
                scale,
                sigma,
                sigma_tilde,
                t0,
            } => write!(f, "half-tanh(L={scale},sigma={sigma},sigma_tilde={sigma_tilde},t0={t0})"),
            Weight::Constant { c } => write!(f, "{c}"),
        }
    }
}
