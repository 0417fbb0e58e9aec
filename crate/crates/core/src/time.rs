//! Explicit low-storage Runge-Kutta time integration.

use crate::dg::{Dgsem, Solution, SourceFn};
use crate::error::DgError;
use crate::physics::NVAR;

/// Five-stage, fourth-order 2N-storage scheme of Carpenter and Kennedy.
pub const LSRK_A: [f64; 5] = [
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
];

pub const LSRK_B: [f64; 5] = [
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
];

pub const LSRK_C: [f64; 5] = [
    0.0,
    1432997174477.0 / 9575080441755.0,
    2526269341429.0 / 6820363962896.0,
    2006345519317.0 / 3224310063776.0,
    2802321613138.0 / 2924317926251.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeControls {
    pub cfl: f64,
    pub t_end: f64,
    /// Abort with an error after this many steps.
    pub max_steps: usize,
}

impl TimeControls {
    pub fn new(cfl: f64, t_end: f64) -> Result<Self, DgError> {
        let c = TimeControls {
            cfl,
            t_end,
            max_steps: usize::MAX,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), DgError> {
        if !(self.cfl > 0.0 && self.cfl.is_finite()) {
            return Err(DgError::TimeControls(format!("CFL must be positive, got {}", self.cfl)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(DgError::TimeControls(format!(
                "final time must be non-negative, got {}",
                self.t_end
            )));
        }
        Ok(())
    }
}

/// `dt = CFL min_d h_d / ((2N + 1) s_d)` with `s_d` the largest `|v_d| + c`.
pub fn compute_dt(speeds: [f64; 3], h: [f64; 3], degree: usize, cfl: f64) -> Result<f64, DgError> {
    let mut dt = f64::INFINITY;
    for d in 0..3 {
        if !(speeds[d] >= 0.0) {
            return Err(DgError::TimeControls(format!("invalid signal speed {}", speeds[d])));
        }
        dt = dt.min(cfl * h[d] / ((2 * degree + 1) as f64 * speeds[d]));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DgError::TimeControls(format!("time step is not positive and finite: {dt}")));
    }
    Ok(dt)
}

/// One step of the low-storage scheme. `du` is the second register; its
/// content on entry is irrelevant.
pub fn lsrk_step<R>(u: &mut Solution, t: f64, dt: f64, rhs: &mut R, k: &mut Solution, du: &mut Solution) -> Result<(), DgError>
where
    R: FnMut(&Solution, f64, &mut Solution) -> Result<(), DgError>,
{
    for s in 0..5 {
        rhs(u, t + LSRK_C[s] * dt, k)?;
        let (a, b) = (LSRK_A[s], LSRK_B[s]);
        for ((ui, di), ki) in u.data_mut().iter_mut().zip(du.data_mut()).zip(k.data()) {
            for c in 0..NVAR {
                di[c] = a * di[c] + dt * ki[c];
                ui[c] += b * di[c];
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunStats {
    pub steps: usize,
    pub t_final: f64,
}

/// Generic driver: advances `u` to `controls.t_end` with step sizes from
/// `dt_of`, landing exactly on the final time.
pub fn integrate_with<R, D, C>(
    u: &mut Solution,
    controls: &TimeControls,
    mut dt_of: D,
    mut rhs: R,
    mut callback: C,
) -> Result<RunStats, DgError>
where
    R: FnMut(&Solution, f64, &mut Solution) -> Result<(), DgError>,
    D: FnMut(&Solution) -> Result<f64, DgError>,
    C: FnMut(usize, f64, &Solution),
{
    controls.validate()?;
    let mut k = u.clone();
    let mut du = u.clone();
    let mut t = 0.0;
    let mut step = 0;
    while t < controls.t_end {
        if step >= controls.max_steps {
            return Err(DgError::TimeControls(format!(
                "step limit {} reached at t = {t}",
                controls.max_steps
            )));
        }
        let mut dt = dt_of(u)?;
        let last = t + dt >= controls.t_end * (1.0 - 1e-14);
        if last {
            dt = controls.t_end - t;
        }
        lsrk_step(u, t, dt, &mut rhs, &mut k, &mut du)?;
        step += 1;
        t = if last { controls.t_end } else { t + dt };
        if !u.is_finite() {
            return Err(DgError::NonFinite { step, time: t });
        }
        callback(step, t, u);
    }
    Ok(RunStats { steps: step, t_final: t })
}

/// Advances a DG solution with the CFL time step.
pub fn integrate<C>(
    dg: &Dgsem,
    u: &mut Solution,
    controls: &TimeControls,
    source: Option<&SourceFn>,
    callback: C,
) -> Result<RunStats, DgError>
where
    C: FnMut(usize, f64, &Solution),
{
    let mut ws = dg.workspace();
    let h = dg.mesh().h();
    let degree = dg.scheme().degree;
    integrate_with(
        u,
        controls,
        |u| compute_dt(dg.max_signal_speeds(u)?, h, degree, controls.cfl),
        |u, t, k| dg.rhs_with_source(u, t, source, k, &mut ws),
        callback,
    )
}
