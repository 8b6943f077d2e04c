//! Method-of-lines time stepping: classical RK4 on `(u, u_t)' = (u_t, u_tt)`
//! under a CFL-limited step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::model::{accel_into, AccelWorkspace, ModelParams};
use crate::state::FieldState;

pub const DEFAULT_CFL: f64 = 0.25;
pub const DEFAULT_MAX_LINF: f64 = 10.0;
/// Fraction of the outer grid covered by the optional sponge layer.
pub const SPONGE_FRACTION: f64 = 0.1;
/// Peak damping rate of the sponge, in units of one over the layer width.
pub const SPONGE_STRENGTH: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub cfl: f64,
    pub t_end: f64,
    pub observer_stride: usize,
    pub sponge: bool,
    pub max_linf: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            cfl: DEFAULT_CFL,
            t_end: 20.0,
            observer_stride: 1,
            sponge: false,
            max_linf: DEFAULT_MAX_LINF,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidParameter(format!("cfl = {} must lie in (0, 1]", self.cfl)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidParameter(format!("t_end = {} must be positive", self.t_end)));
        }
        if self.observer_stride == 0 {
            return Err(Error::InvalidParameter("observer_stride must be at least 1".into()));
        }
        if !(self.max_linf > 0.0) {
            return Err(Error::InvalidParameter(format!("max_linf = {} must be positive", self.max_linf)));
        }
        Ok(())
    }
}

/// Time step `cfl * h`; both equations propagate at unit speed.
pub fn cfl_dt(grid: &RadialGrid, cfl: f64) -> f64 {
    cfl * grid.spacing()
}

/// Reusable buffers for repeated RK4 steps on one grid.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: RadialGrid,
    params: ModelParams,
    max_linf: f64,
    ws: AccelWorkspace,
    stage_u: Vec<f64>,
    stage_v: Vec<f64>,
    k_u: Vec<f64>,
    k_v: Vec<f64>,
    acc_u: Vec<f64>,
    acc_v: Vec<f64>,
    sponge_rate: Option<Vec<f64>>,
}

impl Stepper {
    pub fn new(grid: &RadialGrid, params: &ModelParams, max_linf: f64) -> Self {
        let n = grid.len();
        Self {
            grid: *grid,
            params: *params,
            max_linf,
            ws: AccelWorkspace::new(grid),
            stage_u: vec![0.0; n],
            stage_v: vec![0.0; n],
            k_u: vec![0.0; n],
            k_v: vec![0.0; n],
            acc_u: vec![0.0; n],
            acc_v: vec![0.0; n],
            sponge_rate: None,
        }
    }

    /// Enables multiplicative damping of `u_t` on the outer [`SPONGE_FRACTION`] of the grid.
    pub fn with_sponge(mut self) -> Self {
        let r_max = self.grid.r_max();
        let width = SPONGE_FRACTION * r_max;
        let start = r_max - width;
        let kappa = SPONGE_STRENGTH / width;
        self.sponge_rate = Some(
            self.grid
                .nodes()
                .map(|r| {
                    let x = ((r - start) / width).max(0.0);
                    kappa * x * x
                })
                .collect(),
        );
        self
    }

    fn eval(&mut self, step: usize, t: f64) -> Result<()> {
        accel_into(
            &self.stage_u,
            &self.stage_v,
            &self.grid,
            &self.params,
            &mut self.ws,
            &mut self.k_v,
        )
        .map_err(|i| Error::Diverged {
            step,
            t,
            reason: format!("non-finite acceleration at node {i}"),
        })?;
        self.k_u.copy_from_slice(&self.stage_v);
        Ok(())
    }

    /// Advances `state` in place by `dt`; `step` only labels errors.
    pub fn advance(&mut self, state: &mut FieldState, dt: f64, step: usize) -> Result<()> {
        let n = state.u.len();
        let t = state.t;
        // stage 1
        self.stage_u.copy_from_slice(&state.u);
        self.stage_v.copy_from_slice(&state.ut);
        self.eval(step, t)?;
        for i in 0..n {
            self.acc_u[i] = self.k_u[i];
            self.acc_v[i] = self.k_v[i];
        }
        // stages 2 and 3
        for _ in 0..2 {
            for i in 0..n {
                self.stage_u[i] = state.u[i] + 0.5 * dt * self.k_u[i];
                self.stage_v[i] = state.ut[i] + 0.5 * dt * self.k_v[i];
            }
            self.eval(step, t + 0.5 * dt)?;
            for i in 0..n {
                self.acc_u[i] += 2.0 * self.k_u[i];
                self.acc_v[i] += 2.0 * self.k_v[i];
            }
        }
        // stage 4
        for i in 0..n {
            self.stage_u[i] = state.u[i] + dt * self.k_u[i];
            self.stage_v[i] = state.ut[i] + dt * self.k_v[i];
        }
        self.eval(step, t + dt)?;
        let sixth = dt / 6.0;
        for i in 0..n {
            state.u[i] += sixth * (self.acc_u[i] + self.k_u[i]);
            state.ut[i] += sixth * (self.acc_v[i] + self.k_v[i]);
        }
        if let Some(rate) = &self.sponge_rate {
            for (v, k) in state.ut.iter_mut().zip(rate) {
                *v *= (-k * dt).exp();
            }
        }
        state.t = t + dt;
        self.check(state, step)
    }

    fn check(&self, state: &FieldState, step: usize) -> Result<()> {
        for (i, (&u, &v)) in state.u.iter().zip(&state.ut).enumerate() {
            if !u.is_finite() || !v.is_finite() {
                return Err(Error::Diverged {
                    step,
                    t: state.t,
                    reason: format!("non-finite value at node {i}"),
                });
            }
            if u.abs() > self.max_linf {
                return Err(Error::Diverged {
                    step,
                    t: state.t,
                    reason: format!("|u| = {} exceeds the guard {} at node {i}", u.abs(), self.max_linf),
                });
            }
        }
        Ok(())
    }
}

/// One classical RK4 step; fails if the result is non-finite or exceeds `max_linf`.
pub fn rk4_step(
    state: &FieldState,
    grid: &RadialGrid,
    params: &ModelParams,
    dt: f64,
    max_linf: f64,
) -> Result<FieldState> {
    let mut next = state.clone();
    Stepper::new(grid, params, max_linf).advance(&mut next, dt, 0)?;
    Ok(next)
}

/// Produces a record from the state at each observation time.
pub trait Observer {
    type Record;
    fn observe(&mut self, state: &FieldState) -> Self::Record;
}

impl<R, F: FnMut(&FieldState) -> R> Observer for F {
    type Record = R;
    fn observe(&mut self, state: &FieldState) -> R {
        self(state)
    }
}

/// Observer keeping full copies of the state.
#[derive(Debug, Default, Clone, Copy)]
pub struct Snapshots;

impl Observer for Snapshots {
    type Record = FieldState;
    fn observe(&mut self, state: &FieldState) -> FieldState {
        state.clone()
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryRecord<R> {
    pub step: usize,
    pub t: f64,
    pub data: R,
}

#[derive(Debug, Clone)]
pub struct Trajectory<R> {
    pub records: Vec<TrajectoryRecord<R>>,
    pub final_state: FieldState,
    pub dt: f64,
    pub steps: usize,
    pub observer_stride: usize,
}

impl<R> Trajectory<R> {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    /// Spacing between records taken at full strides.
    pub fn record_spacing(&self) -> f64 {
        self.dt * self.observer_stride as f64
    }

    /// Records taken at exact multiples of the stride; excludes a trailing
    /// record that follows a shortened final step.
    pub fn uniform_records(&self) -> &[TrajectoryRecord<R>] {
        let n = self
            .records
            .iter()
            .take_while(|r| r.step % self.observer_stride == 0 && (r.step < self.steps || self.ends_on_full_step()))
            .count();
        &self.records[..n]
    }

    fn ends_on_full_step(&self) -> bool {
        let t0 = self.records.first().map_or(0.0, |r| r.t);
        let full = t0 + self.steps as f64 * self.dt;
        (full - self.final_state.t).abs() <= 1e-12 * full.abs().max(1.0)
    }
}

/// Steps `initial` to `config.t_end`, calling `observer` on the initial state,
/// every `observer_stride` steps and on the final state. The last step is
/// shortened so the run lands exactly on `t_end`.
pub fn evolve<O: Observer>(
    initial: &FieldState,
    grid: &RadialGrid,
    params: &ModelParams,
    config: &IntegratorConfig,
    observer: &mut O,
) -> Result<Trajectory<O::Record>> {
    initial.validate(grid)?;
    let stride = config.observer_stride.max(1);
    let dt = cfl_dt(grid, config.cfl);
    let t0 = initial.t;
    let mut state = initial.clone();
    let mut records = vec![TrajectoryRecord {
        step: 0,
        t: t0,
        data: observer.observe(&state),
    }];
    let total = config.t_end - t0;
    let steps = if total > 0.0 {
        ((total / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    } else {
        0
    };
    let mut stepper = Stepper::new(grid, params, config.max_linf);
    if config.sponge {
        stepper = stepper.with_sponge();
    }
    for k in 1..=steps {
        let target = if k == steps { config.t_end } else { t0 + k as f64 * dt };
        let this_dt = if k == steps { target - state.t } else { dt };
        stepper.advance(&mut state, this_dt, k)?;
        state.t = target;
        if k % stride == 0 || k == steps {
            records.push(TrajectoryRecord {
                step: k,
                t: state.t,
                data: observer.observe(&state),
            });
        }
    }
    Ok(Trajectory {
        records,
        final_state: state,
        dt,
        steps,
        observer_stride: stride,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::state::{sample_initial_data, DataFamily, InitialDataSpec, VelocityMode};

    #[test]
    fn cfl_examples() {
        let g = build_grid(100, 2.0).unwrap(); // h = 0.02
        assert!((cfl_dt(&g, 0.25) - 0.005).abs() < 1e-16);
        let g = build_grid(8, 4.0).unwrap(); // h = 0.5
        assert_eq!(cfl_dt(&g, 1.0), 0.5);
        let g = build_grid(8, 1.0).unwrap(); // h = 0.125
        assert_eq!(cfl_dt(&g, 0.5), 0.0625);
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = build_grid(64, 8.0).unwrap();
        let p = ModelParams::skyrme(1.0).unwrap();
        let s = rk4_step(&FieldState::zeros(&g), &g, &p, 0.03, 10.0).unwrap();
        assert_eq!(s.t, 0.03);
        assert!(s.u.iter().chain(&s.ut).all(|&v| v == 0.0));
    }

    #[test]
    fn unstable_step_trips_the_guard() {
        let g = build_grid(128, 16.0).unwrap();
        let p = ModelParams::skyrme(1.0).unwrap();
        let data = InitialDataSpec {
            amplitude: 0.05,
            ..InitialDataSpec::default()
        };
        let mut s = sample_initial_data(&data, &g).unwrap();
        let dt = cfl_dt(&g, 4.0);
        let mut stepper = Stepper::new(&g, &p, DEFAULT_MAX_LINF);
        let mut failed = None;
        for k in 1..=100 {
            if let Err(e) = stepper.advance(&mut s, dt, k) {
                failed = Some(e);
                break;
            }
        }
        assert!(matches!(failed, Some(Error::Diverged { .. })), "{failed:?}");
    }

    #[test]
    fn zero_end_time_keeps_only_initial_record() {
        let g = build_grid(32, 4.0).unwrap();
        let p = ModelParams::adkins_nappi();
        let cfg = IntegratorConfig {
            t_end: 0.0,
            ..Default::default()
        };
        let tr = evolve(&FieldState::zeros(&g), &g, &p, &cfg, &mut Snapshots).unwrap();
        assert_eq!(tr.records.len(), 1);
        assert_eq!(tr.steps, 0);
    }

    #[test]
    fn zero_data_for_ten_time_units() {
        let g = build_grid(64, 16.0).unwrap();
        let p = ModelParams::skyrme(1.0).unwrap();
        let cfg = IntegratorConfig {
            t_end: 10.0,
            observer_stride: 8,
            ..Default::default()
        };
        let tr = evolve(&FieldState::zeros(&g), &g, &p, &cfg, &mut |s: &FieldState| s.linf_u() + s.ut.iter().fold(0.0f64, |m, v| m.max(v.abs()))).unwrap();
        assert!(tr.records.iter().all(|r| r.data == 0.0));
        assert_eq!(tr.final_state.t, 10.0);
    }

    #[test]
    fn shortened_final_step_lands_on_t_end() {
        let g = build_grid(30, 3.0).unwrap(); // h = 0.1, dt = 0.025
        let p = ModelParams::adkins_nappi();
        let cfg = IntegratorConfig {
            t_end: 0.33,
            observer_stride: 3,
            ..Default::default()
        };
        let data = InitialDataSpec {
            family: DataFamily::CompactBump,
            amplitude: 0.01,
            center: 1.5,
            width: 0.5,
            velocity: VelocityMode::TimeSymmetric,
        };
        let s0 = sample_initial_data(&data, &g).unwrap();
        let tr = evolve(&s0, &g, &p, &cfg, &mut |s: &FieldState| s.t).unwrap();
        assert_eq!(tr.final_state.t, 0.33);
        assert_eq!(tr.steps, 14);
        let times = tr.times();
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*times.last().unwrap(), 0.33);
        // 0, 3, 6, 9, 12 and the final shortened step
        assert_eq!(tr.records.len(), 6);
        assert_eq!(tr.uniform_records().len(), 5);
    }
}
