//! Magnetic control laws: continuous-time baselines and their
//! piecewise-constant (sample-and-hold) counterparts.

use nalgebra::Vector4;
use serde::{Deserialize, Serialize};

use crate::attmath::{kin_matrix_unchecked, skew, Quaternion, Vec3};
use crate::design::{positive, FeedbackGains, OutputGains, StateGains};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlKind {
    ContinuousState,
    ContinuousOutput,
    ZohState,
    ZohOutput,
}

impl ControlKind {
    pub fn is_zoh(self) -> bool {
        matches!(self, ControlKind::ZohState | ControlKind::ZohOutput)
    }

    pub fn is_output(self) -> bool {
        matches!(self, ControlKind::ContinuousOutput | ControlKind::ZohOutput)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ControlKind::ContinuousState => "continuous-state",
            ControlKind::ContinuousOutput => "continuous-output",
            ControlKind::ZohState => "zoh-state",
            ControlKind::ZohOutput => "zoh-output",
        }
    }
}

impl std::str::FromStr for ControlKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "continuous-state" => Ok(ControlKind::ContinuousState),
            "continuous-output" => Ok(ControlKind::ContinuousOutput),
            "zoh-state" => Ok(ControlKind::ZohState),
            "zoh-output" => Ok(ControlKind::ZohOutput),
            other => Err(Error::Validation(format!(
                "unknown controller kind '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    pub kind: ControlKind,
    /// Must be [`FeedbackGains::Output`] for the output-feedback kinds.
    pub gains: FeedbackGains,
    pub epsilon: f64,
    /// Sampling period `T`; required by the ZOH kinds.
    pub period: Option<f64>,
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        self.gains.validate()?;
        match (self.kind.is_output(), &self.gains) {
            (true, FeedbackGains::State(_)) => {
                return Err(Error::Validation(
                    "output-feedback controller requires alpha and lambda".into(),
                ))
            }
            (false, FeedbackGains::Output(_)) => {
                return Err(Error::Validation(
                    "state-feedback controller takes only k1 and k2".into(),
                ))
            }
            _ => {}
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Validation("epsilon must be >= 0".into()));
        }
        // δ(0) = q(0)/(ελ) and the observer leak both need ε > 0.
        if self.kind.is_output() {
            positive("epsilon", self.epsilon)?;
        }
        if self.kind.is_zoh() {
            match self.period {
                Some(t) => positive("T", t)?,
                None => return Err(Error::Validation("T required for ZOH controllers".into())),
            }
        }
        Ok(())
    }
}

/// Observer state `δ ∈ ℝ⁴` of the dynamic output feedback.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObserverState {
    pub delta: Vector4<f64>,
}

impl ObserverState {
    /// `δ(0) = q(0)/(ελ)`, which zeroes the filter error `q − ελδ` at start.
    pub fn matched(q: &Quaternion, epsilon: f64, lambda: f64) -> Self {
        ObserverState {
            delta: q.to_vector4() / (epsilon * lambda),
        }
    }
}

/// `m = (B_b^×)ᵀ v`, i.e. `v × B_b`.
fn dipole_from(v: &Vec3, b_b: &Vec3) -> Vec3 {
    skew(b_b).transpose() * v
}

/// Sampled static state feedback, `m = (B_b^×)ᵀ(ε²k₁q_v + εk₂ω)`, evaluated at
/// a sample instant and held by the caller until the next one.
pub fn state_fb_dipole(
    q: &Quaternion,
    omega: &Vec3,
    b_b: &Vec3,
    gains: &StateGains,
    epsilon: f64,
) -> Vec3 {
    let v = q.qv * (epsilon * epsilon * gains.k1) + omega * (epsilon * gains.k2);
    dipole_from(&v, b_b)
}

/// Continuous-time static state feedback; same law as [`state_fb_dipole`],
/// evaluated at every instant.
pub fn continuous_state_fb(
    q: &Quaternion,
    omega: &Vec3,
    b_b: &Vec3,
    gains: &StateGains,
    epsilon: f64,
) -> Vec3 {
    state_fb_dipole(q, omega, b_b, gains, epsilon)
}

fn output_dipole(
    e: &Vector4<f64>,
    q: &Quaternion,
    b_b: &Vec3,
    gains: &OutputGains,
    epsilon: f64,
) -> Vec3 {
    let w = kin_matrix_unchecked(q);
    let v = (q.qv * gains.k1 + w.transpose() * e * (gains.k2 * gains.alpha * gains.lambda))
        * (epsilon * epsilon);
    dipole_from(&v, b_b)
}

/// Continuous dynamic output feedback: returns `(m, δ̇)` with
/// `δ̇ = α(q − ελδ)`.
pub fn continuous_output_fb(
    state: &ObserverState,
    q: &Quaternion,
    b_b: &Vec3,
    gains: &OutputGains,
    epsilon: f64,
) -> (Vec3, Vector4<f64>) {
    let e = q.to_vector4() - state.delta * (epsilon * gains.lambda);
    let m = output_dipole(&e, q, b_b, gains, epsilon);
    (m, e * gains.alpha)
}

/// One sample of the piecewise-constant output feedback: the held dipole for
/// `[kT, (k+1)T)` and the forward-difference observer update
/// `δ⁺ = δ + Tα(q − ελδ)`.
pub fn output_fb_step(
    state: &ObserverState,
    q: &Quaternion,
    b_b: &Vec3,
    gains: &OutputGains,
    epsilon: f64,
    period: f64,
) -> (Vec3, ObserverState) {
    let (m, rate) = continuous_output_fb(state, q, b_b, gains, epsilon);
    let next = ObserverState {
        delta: state.delta + rate * period,
    };
    (m, next)
}
