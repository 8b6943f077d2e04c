//! Dynamical state `(u, u_t)` on the grid and the initial-data families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{radial_derivative, RadialGrid};

/// Snapshot of the field and its time derivative at time `t`.
///
/// The field is understood to be continued oddly through the origin, which
/// encodes `u(0) = 0` for degree-zero data.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub u: Vec<f64>,
    pub ut: Vec<f64>,
}

impl FieldState {
    pub fn new(t: f64, u: Vec<f64>, ut: Vec<f64>) -> Self {
        Self { t, u, ut }
    }

    pub fn zeros(grid: &RadialGrid) -> Self {
        Self::new(0.0, vec![0.0; grid.len()], vec![0.0; grid.len()])
    }

    /// Checks the array lengths against the grid and that every entry is finite.
    pub fn validate(&self, grid: &RadialGrid) -> Result<()> {
        if self.u.len() != grid.len() || self.ut.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "state arrays have lengths {}/{} but the grid has {} nodes",
                self.u.len(),
                self.ut.len(),
                grid.len()
            )));
        }
        if !self.t.is_finite() || self.u.iter().chain(&self.ut).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("state contains non-finite entries".into()));
        }
        Ok(())
    }

    pub fn linf_u(&self) -> f64 {
        self.u.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Same field with `u_t` negated, i.e. the time-reversed state.
    pub fn time_reversed(&self) -> Self {
        Self::new(self.t, self.u.clone(), self.ut.iter().map(|v| -v).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataFamily {
    /// `A r exp(-((r - r0)/w)^2)`
    GaussianShell,
    /// `A r max(0, 1 - ((r - r0)/w)^2)^3`, supported in `[r0 - w, r0 + w]`
    CompactBump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VelocityMode {
    /// `u_t = 0`
    TimeSymmetric,
    /// `u_t = -(u_r + u/r)`, the profile of a purely outgoing spherical wave.
    Outgoing,
}

/// Gaussian shells are treated as supported within this many widths of the
/// center; the profile there is below `exp(-36)` of its peak.
pub const GAUSSIAN_SUPPORT_WIDTHS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialDataSpec {
    pub family: DataFamily,
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub velocity: VelocityMode,
}

impl Default for InitialDataSpec {
    fn default() -> Self {
        Self {
            family: DataFamily::GaussianShell,
            amplitude: 0.1,
            center: 5.0,
            width: 1.0,
            velocity: VelocityMode::TimeSymmetric,
        }
    }
}

impl InitialDataSpec {
    pub fn profile(&self, r: f64) -> f64 {
        let x = (r - self.center) / self.width;
        match self.family {
            DataFamily::GaussianShell => self.amplitude * r * (-x * x).exp(),
            DataFamily::CompactBump => {
                let b = (1.0 - x * x).max(0.0);
                self.amplitude * r * b * b * b
            }
        }
    }

    /// Radius beyond which the data vanish (to double precision for Gaussians).
    pub fn support_radius(&self) -> f64 {
        match self.family {
            DataFamily::GaussianShell => self.center + GAUSSIAN_SUPPORT_WIDTHS * self.width,
            DataFamily::CompactBump => self.center + self.width,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("amplitude", self.amplitude),
            ("center", self.center),
            ("width", self.width),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("initial data {name} = {v} is not finite")));
            }
        }
        if self.width <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "initial data width = {} must be positive",
                self.width
            )));
        }
        Ok(())
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }
}

/// Samples the data on the grid at `t = 0`.
pub fn sample_initial_data(spec: &InitialDataSpec, grid: &RadialGrid) -> Result<FieldState> {
    spec.validate()?;
    let u: Vec<f64> = grid.nodes().map(|r| spec.profile(r)).collect();
    let ut = match spec.velocity {
        VelocityMode::TimeSymmetric => vec![0.0; grid.len()],
        VelocityMode::Outgoing => {
            let ur = radial_derivative(&u, grid);
            grid.nodes()
                .zip(ur.iter().zip(&u))
                .map(|(r, (d, v))| -(d + v / r))
                .collect()
        }
    };
    let state = FieldState::new(0.0, u, ut);
    state.validate(grid)?;
    Ok(state)
}
