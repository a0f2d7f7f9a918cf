//! Fixed-step simulation of the magnetically actuated rigid spacecraft under
//! each control law, and the exact sampled map of the linearized loop.

use std::time::Instant;

use nalgebra::{SVector, Vector4};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::attmath::{
    dcm_unchecked, kin_matrix_unchecked, normalize, skew, Mat3, Quaternion, Vec3,
};
use crate::avg::{g1_g2, AveragingConfig};
use crate::control::{
    continuous_output_fb, continuous_state_fb, output_fb_step, state_fb_dipole, ControlKind,
    ControllerConfig, ObserverState,
};
use crate::design::{FeedbackGains, InertiaSpec, StateGains};
use crate::error::{Error, Result};
use crate::geomag::{FieldModel, OrbitSpec};

/// Runs are aborted once `‖ω‖` exceeds this, rad/s.
pub const OMEGA_DIVERGENCE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttitudeState {
    pub q: Quaternion,
    pub omega: Vec3,
}

impl AttitudeState {
    fn pack(&self) -> SVector<f64, 7> {
        let q = self.q.to_vector4();
        SVector::<f64, 7>::from_column_slice(&[
            q[0],
            q[1],
            q[2],
            q[3],
            self.omega.x,
            self.omega.y,
            self.omega.z,
        ])
    }

    fn unpack(x: &SVector<f64, 7>) -> Self {
        AttitudeState {
            q: Quaternion::new(x[0], x[1], x[2], x[3]),
            omega: Vec3::new(x[4], x[5], x[6]),
        }
    }
}

/// Orbit field model and inertia with the inverse cached.
#[derive(Debug, Clone, Copy)]
pub struct Plant {
    field: FieldModel,
    j: Mat3,
    j_inv: Mat3,
}

impl Plant {
    pub fn new(orbit: &OrbitSpec, inertia: &InertiaSpec) -> Result<Self> {
        Ok(Plant {
            field: orbit.field_model(),
            j: inertia.j,
            j_inv: inertia.inverse()?,
        })
    }

    pub fn field_inertial(&self, t: f64) -> Vec3 {
        self.field.field(t)
    }

    pub fn field_body(&self, q: &Quaternion, t: f64) -> Vec3 {
        dcm_unchecked(q) * self.field.field(t)
    }

    /// `q̇ = W(q)ω`, `Jω̇ = −ω^×Jω − B^b(q,t)^× m`.
    pub fn rhs(&self, q: &Quaternion, omega: &Vec3, m: &Vec3, t: f64) -> (Vector4<f64>, Vec3) {
        let b_b = self.field_body(q, t);
        let qdot = kin_matrix_unchecked(q) * omega;
        let torque = -omega.cross(&(self.j * omega)) - skew(&b_b) * m;
        (qdot, self.j_inv * torque)
    }

    fn rhs_packed(&self, x: &SVector<f64, 7>, m: &Vec3, t: f64) -> SVector<f64, 7> {
        let s = AttitudeState::unpack(x);
        let (qd, wd) = self.rhs(&s.q, &s.omega, m, t);
        SVector::<f64, 7>::from_column_slice(&[qd[0], qd[1], qd[2], qd[3], wd.x, wd.y, wd.z])
    }

    /// One classical RK4 step with `m` held, without renormalizing `q`.
    pub fn rk4_step_raw(
        &self,
        state: &AttitudeState,
        m_held: &Vec3,
        t: f64,
        h: f64,
    ) -> AttitudeState {
        let x = state.pack();
        let next = rk4(&x, t, h, |x, t| self.rhs_packed(x, m_held, t));
        AttitudeState::unpack(&next)
    }

    /// One RK4 step with `m` held, followed by quaternion renormalization.
    pub fn rk4_step(
        &self,
        state: &AttitudeState,
        m_held: &Vec3,
        t: f64,
        h: f64,
    ) -> Result<AttitudeState> {
        let mut next = self.rk4_step_raw(state, m_held, t, h);
        next.q = normalize(&next.q)?;
        Ok(next)
    }
}

fn rk4<const N: usize>(
    x: &SVector<f64, N>,
    t: f64,
    h: f64,
    f: impl Fn(&SVector<f64, N>, f64) -> SVector<f64, N>,
) -> SVector<f64, N> {
    let k1 = f(x, t);
    let k2 = f(&(x + k1 * (h / 2.0)), t + h / 2.0);
    let k3 = f(&(x + k2 * (h / 2.0)), t + h / 2.0);
    let k4 = f(&(x + k3 * h), t + h);
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Right-hand side of the attitude equations for a given dipole `m`.
pub fn dynamics_rhs(
    q: &Quaternion,
    omega: &Vec3,
    m: &Vec3,
    t: f64,
    orbit: &OrbitSpec,
    inertia: &InertiaSpec,
) -> Result<(Vector4<f64>, Vec3)> {
    Ok(Plant::new(orbit, inertia)?.rhs(q, omega, m, t))
}

/// RK4 step with `m` held over `[t, t+h]`; `q` is renormalized afterwards.
pub fn rk4_step(
    state: &AttitudeState,
    m_held: &Vec3,
    t: f64,
    h: f64,
    orbit: &OrbitSpec,
    inertia: &InertiaSpec,
) -> Result<AttitudeState> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step h = {h} must be positive"
        )));
    }
    Plant::new(orbit, inertia)?.rk4_step(state, m_held, t, h)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub orbit: OrbitSpec,
    pub inertia: InertiaSpec,
    pub controller: ControllerConfig,
    pub q0: Quaternion,
    pub omega0: Vec3,
    pub t_final: f64,
    /// Integrator step, seconds.
    pub h: f64,
    /// Keep every `record_stride`-th integrator step (the final step is always kept).
    pub record_stride: usize,
    /// Observer initial state; defaults to `q0/(ελ)`.
    pub delta0: Option<Vector4<f64>>,
}

impl SimConfig {
    /// Integrator steps per sampling period, for ZOH controllers.
    pub fn steps_per_period(&self) -> Option<usize> {
        let t = self.controller.period?;
        self.controller
            .kind
            .is_zoh()
            .then(|| (t / self.h).round() as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.orbit.validate()?;
        self.inertia.validate()?;
        self.controller.validate()?;
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::Validation(format!(
                "step h = {} must be positive",
                self.h
            )));
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::Validation("t_final must be positive".into()));
        }
        if self.record_stride == 0 {
            return Err(Error::Validation("record_stride must be >= 1".into()));
        }
        if (self.q0.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::Validation("q0 must be a unit quaternion".into()));
        }
        if !self.omega0.iter().all(|v| v.is_finite()) {
            return Err(Error::Validation("omega0 must be finite".into()));
        }
        if self.controller.kind.is_zoh() {
            let t = self.controller.period.unwrap_or(f64::NAN);
            let ratio = t / self.h;
            if ratio.round() < 1.0 || (ratio - ratio.round()).abs() > 1e-9 * ratio {
                return Err(Error::Validation(format!(
                    "T = {t} s must be a positive integer multiple of h = {} s",
                    self.h
                )));
            }
            if self.t_final < t {
                return Err(Error::Validation("t_final must be >= T".into()));
            }
        }
        Ok(())
    }

    /// Deterministic SHA-256 of the configuration.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("SimConfig serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimSample {
    pub t: f64,
    pub q: Quaternion,
    pub omega: Vec3,
    /// Dipole applied over the step starting at `t`.
    pub m: Vec3,
    pub b_b: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<SimSample>,
    pub config_hash: String,
    pub wall_time_s: f64,
}

impl Trajectory {
    pub fn last(&self) -> Option<&SimSample> {
        self.samples.last()
    }
}

enum Law {
    ZohState {
        gains: StateGains,
        sub: usize,
    },
    ZohOutput {
        gains: crate::design::OutputGains,
        sub: usize,
        period: f64,
        obs: ObserverState,
    },
    ContState {
        gains: StateGains,
    },
    ContOutput {
        gains: crate::design::OutputGains,
        obs: ObserverState,
    },
}

fn check_finite(t: f64, last_valid_t: f64, s: &AttitudeState, extra: &[f64]) -> Result<()> {
    let finite = s.q.is_finite()
        && s.omega.iter().all(|v| v.is_finite())
        && extra.iter().all(|v| v.is_finite());
    if !finite {
        return Err(Error::Diverged {
            t,
            last_valid_t,
            reason: "non-finite state".into(),
        });
    }
    let w = s.omega.norm();
    if w > OMEGA_DIVERGENCE {
        return Err(Error::Diverged {
            t,
            last_valid_t,
            reason: format!("|omega| = {w:.3e} rad/s exceeds {OMEGA_DIVERGENCE}"),
        });
    }
    Ok(())
}

/// Simulates the closed loop from `cfg.q0`, `cfg.omega0` over `[0, t_final]`.
///
/// ZOH laws are evaluated at `t = kT` from the current state and `B^b(q(kT), kT)`;
/// the dipole is held for the next `T/h` integrator steps. Continuous laws
/// are evaluated at every RK4 stage, with the observer state integrated
/// alongside the attitude.
pub fn run_closed_loop(cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let clock = Instant::now();
    let plant = Plant::new(&cfg.orbit, &cfg.inertia)?;
    let eps = cfg.controller.epsilon;
    let n_steps = (cfg.t_final / cfg.h).round() as usize;
    let observer = |lambda: f64| ObserverState {
        delta: cfg
            .delta0
            .unwrap_or_else(|| ObserverState::matched(&cfg.q0, eps, lambda).delta),
    };
    let mut law = match (cfg.controller.kind, cfg.controller.gains) {
        (ControlKind::ZohState, FeedbackGains::State(gains)) => Law::ZohState {
            gains,
            sub: cfg.steps_per_period().unwrap_or(1),
        },
        (ControlKind::ZohOutput, FeedbackGains::Output(gains)) => Law::ZohOutput {
            gains,
            sub: cfg.steps_per_period().unwrap_or(1),
            period: cfg.controller.period.unwrap_or_default(),
            obs: observer(gains.lambda),
        },
        (ControlKind::ContinuousState, FeedbackGains::State(gains)) => Law::ContState { gains },
        (ControlKind::ContinuousOutput, FeedbackGains::Output(gains)) => Law::ContOutput {
            gains,
            obs: observer(gains.lambda),
        },
        _ => {
            return Err(Error::Validation(
                "controller kind and gains do not match".into(),
            ))
        }
    };

    let mut state = AttitudeState {
        q: normalize(&cfg.q0)?,
        omega: cfg.omega0,
    };
    let mut samples = Vec::with_capacity(n_steps / cfg.record_stride + 2);
    let mut m = Vec3::zeros();
    let mut last_valid_t = 0.0;

    for i in 0..=n_steps {
        let t = i as f64 * cfg.h;
        let b_b = plant.field_body(&state.q, t);
        match &mut law {
            Law::ZohState { gains, sub } => {
                if i % *sub == 0 {
                    m = state_fb_dipole(&state.q, &state.omega, &b_b, gains, eps);
                }
            }
            Law::ZohOutput {
                gains,
                sub,
                period,
                obs,
            } => {
                if i % *sub == 0 {
                    let (mk, next) = output_fb_step(obs, &state.q, &b_b, gains, eps, *period);
                    m = mk;
                    *obs = next;
                }
            }
            Law::ContState { gains } => {
                m = continuous_state_fb(&state.q, &state.omega, &b_b, gains, eps);
            }
            Law::ContOutput { gains, obs } => {
                m = continuous_output_fb(obs, &state.q, &b_b, gains, eps).0;
            }
        }
        if i % cfg.record_stride == 0 || i == n_steps {
            samples.push(SimSample {
                t,
                q: state.q,
                omega: state.omega,
                m,
                b_b,
            });
        }
        if i == n_steps {
            break;
        }

        let t_next = (i + 1) as f64 * cfg.h;
        let mut extra = [0.0; 4];
        match &mut law {
            Law::ZohState { .. } | Law::ZohOutput { .. } => {
                state = plant.rk4_step_raw(&state, &m, t, cfg.h);
            }
            Law::ContState { gains } => {
                let gains = *gains;
                let f = |x: &SVector<f64, 7>, tau: f64| {
                    let s = AttitudeState::unpack(x);
                    let b = plant.field_body(&s.q, tau);
                    let mm = continuous_state_fb(&s.q, &s.omega, &b, &gains, eps);
                    plant.rhs_packed(x, &mm, tau)
                };
                state = AttitudeState::unpack(&rk4(&state.pack(), t, cfg.h, f));
            }
            Law::ContOutput { gains, obs } => {
                let gains = *gains;
                let mut x = SVector::<f64, 11>::zeros();
                x.fixed_rows_mut::<7>(0).copy_from(&state.pack());
                x.fixed_rows_mut::<4>(7).copy_from(&obs.delta);
                let f = |x: &SVector<f64, 11>, tau: f64| {
                    let att: SVector<f64, 7> = x.fixed_rows::<7>(0).into();
                    let s = AttitudeState::unpack(&att);
                    let o = ObserverState {
                        delta: x.fixed_rows::<4>(7).into(),
                    };
                    let b = plant.field_body(&s.q, tau);
                    let (mm, ddot) = continuous_output_fb(&o, &s.q, &b, &gains, eps);
                    let base = plant.rhs_packed(&att, &mm, tau);
                    let mut out = SVector::<f64, 11>::zeros();
                    out.fixed_rows_mut::<7>(0).copy_from(&base);
                    out.fixed_rows_mut::<4>(7).copy_from(&ddot);
                    out
                };
                let next = rk4(&x, t, cfg.h, f);
                state = AttitudeState::unpack(&next.fixed_rows::<7>(0).into());
                obs.delta = next.fixed_rows::<4>(7).into();
                extra.copy_from_slice(obs.delta.as_slice());
            }
        }
        check_finite(t_next, last_valid_t, &state, &extra)?;
        state.q = normalize(&state.q).map_err(|_| Error::Diverged {
            t: t_next,
            last_valid_t,
            reason: "quaternion collapsed".into(),
        })?;
        last_valid_t = t_next;
    }

    Ok(Trajectory {
        samples,
        config_hash: cfg.hash(),
        wall_time_s: clock.elapsed().as_secs_f64(),
    })
}

/// Configuration of the linearized sampled-data loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearizedConfig {
    pub orbit: OrbitSpec,
    pub inertia: InertiaSpec,
    pub gains: StateGains,
    pub epsilon: f64,
    pub period: f64,
    pub qv0: Vec3,
    pub omega0: Vec3,
    pub steps: usize,
    pub averaging: AveragingConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearSample {
    pub k: usize,
    pub t: f64,
    pub qv: Vec3,
    pub omega: Vec3,
    pub m: Vec3,
}

/// Dipole of the linearized loop, `m = (B^i(kT)^×)ᵀ(ε²k₁q_v + εk₂ω)`.
pub fn linearized_dipole(
    b_i: &Vec3,
    qv: &Vec3,
    omega: &Vec3,
    gains: &StateGains,
    epsilon: f64,
) -> Vec3 {
    skew(b_i).transpose() * (qv * (epsilon * epsilon * gains.k1) + omega * (epsilon * gains.k2))
}

/// Iterates the exact sampled map of the linearized loop
///
/// `q_v⁺ = q_v + (T/2)ω − J⁻¹G₁m`, `ω⁺ = ω − J⁻¹G₂m`,
///
/// returning `steps + 1` samples starting at `k = 0`.
pub fn run_linearized_sampled(cfg: &LinearizedConfig) -> Result<Vec<LinearSample>> {
    cfg.orbit.validate()?;
    cfg.inertia.validate()?;
    cfg.averaging.validate()?;
    if !(cfg.period > 0.0) {
        return Err(Error::Validation("period must be positive".into()));
    }
    let j_inv = cfg.inertia.inverse()?;
    let model = cfg.orbit.field_model();
    let t = cfg.period;
    let mut qv = cfg.qv0;
    let mut omega = cfg.omega0;
    let mut out = Vec::with_capacity(cfg.steps + 1);
    for k in 0..=cfg.steps {
        let b = model.field(k as f64 * t);
        let m = linearized_dipole(&b, &qv, &omega, &cfg.gains, cfg.epsilon);
        out.push(LinearSample {
            k,
            t: k as f64 * t,
            qv,
            omega,
            m,
        });
        if k == cfg.steps {
            break;
        }
        let (g1, g2) = g1_g2(&cfg.orbit, k as i64, t, &cfg.averaging)?;
        qv = qv + omega * (t / 2.0) - j_inv * g1 * m;
        omega -= j_inv * g2 * m;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettleTolerance {
    pub omega: f64,
    pub qv: f64,
}

impl Default for SettleTolerance {
    fn default() -> Self {
        SettleTolerance {
            omega: 1e-4,
            qv: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// First time after which every sample stays within tolerance; `None` if never.
    pub settle_time: Option<f64>,
    pub max_dipole: f64,
    pub final_t: f64,
    pub final_omega_norm: f64,
    pub final_qv_norm: f64,
}

pub fn metrics(traj: &Trajectory, tol: &SettleTolerance) -> Result<Metrics> {
    let last = traj
        .last()
        .ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))?;
    let inside = |s: &SimSample| s.omega.norm() < tol.omega && s.q.qv.norm() < tol.qv;
    let settle_time = match traj.samples.iter().rposition(|s| !inside(s)) {
        None => Some(traj.samples[0].t),
        Some(i) if i + 1 < traj.samples.len() => Some(traj.samples[i + 1].t),
        Some(_) => None,
    };
    let max_dipole = traj.samples.iter().map(|s| s.m.norm()).fold(0.0, f64::max);
    Ok(Metrics {
        settle_time,
        max_dipole,
        final_t: last.t,
        final_omega_norm: last.omega.norm(),
        final_qv_norm: last.q.qv.norm(),
    })
}
