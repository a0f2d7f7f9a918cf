//! Scenario files: a TOML document with one table per concern.
//!
//! ```toml
//! [orbit]
//! altitude_m = 450e3        # or radius_m
//! inclination_deg = 87.0
//! raan_deg = 0.0            # default 0
//! phase0_rad = 0.94         # default 0
//!
//! [spacecraft]
//! inertia = [[27.0, 0.0, 0.0], [0.0, 17.0, 0.0], [0.0, 0.0, 25.0]]
//!
//! [controller]
//! law = "zoh-state"         # zoh-state | zoh-output | continuous-state | continuous-output
//! k1 = 2e11
//! k2 = 3e11
//! epsilon = 1e-3
//! period_s = 20.0
//!
//! [initial]
//! q = [0.0, 0.0, 0.0, 1.0]
//! omega = [0.02, 0.02, -0.03]
//!
//! [simulation]
//! t_final_s = 56000.0
//! step_s = 0.1              # default period_s / 200
//! ```
//!
//! Optional `[design]` and `[averaging]` tables tune the `T*` scan and the
//! averaging estimator. Unknown keys are rejected.

use std::path::Path;

use nalgebra::Vector4;
use serde::{Deserialize, Serialize};

use crate::attmath::{Mat3, Quaternion, Vec3};
use crate::avg::{AveragingConfig, Estimator};
use crate::control::{ControlKind, ControllerConfig};
use crate::design::{DesignOptions, FeedbackGains, InertiaSpec, OutputGains, StateGains};
use crate::error::{Error, Result};
use crate::geomag::{OrbitSpec, EARTH_RADIUS_M, MU_DIPOLE, MU_EARTH};
use crate::sim::{SettleTolerance, SimConfig};

/// Integrator steps per sampling period when `step_s` is omitted.
pub const DEFAULT_STEPS_PER_PERIOD: f64 = 200.0;
/// Step used by continuous laws when neither `step_s` nor `period_s` is given.
pub const DEFAULT_CONTINUOUS_STEP: f64 = 0.1;
/// Horizon used when `t_final_s` is omitted, in orbital periods.
pub const DEFAULT_HORIZON_ORBITS: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub orbit: OrbitSection,
    pub spacecraft: SpacecraftSection,
    pub controller: ControllerSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub design: DesignSection,
    #[serde(default)]
    pub averaging: AveragingSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub altitude_m: Option<f64>,
    pub inclination_deg: f64,
    #[serde(default)]
    pub raan_deg: f64,
    #[serde(default)]
    pub phase0_rad: f64,
    #[serde(default = "default_mu_earth")]
    pub mu_earth: f64,
    #[serde(default = "default_mu_m")]
    pub mu_m: f64,
}

fn default_mu_earth() -> f64 {
    MU_EARTH
}

fn default_mu_m() -> f64 {
    MU_DIPOLE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacecraftSection {
    /// Inertia matrix rows, kg·m².
    pub inertia: [[f64; 3]; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSection {
    #[serde(default = "default_law")]
    pub law: ControlKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_s: Option<f64>,
    /// Observer initial state; defaults to `q(0)/(ελ)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta0: Option<[f64; 4]>,
}

fn default_law() -> ControlKind {
    ControlKind::ZohState
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(default = "default_q")]
    pub q: [f64; 4],
    #[serde(default)]
    pub omega: [f64; 3],
}

fn default_q() -> [f64; 4] {
    [0.0, 0.0, 0.0, 1.0]
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection {
            q: default_q(),
            omega: [0.0; 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settle_omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settle_qv: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    #[serde(default = "default_scan_step")]
    pub scan_step_s: f64,
    #[serde(default = "default_bisect_tol")]
    pub bisect_tol_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
}

fn default_scan_step() -> f64 {
    10.0
}

fn default_bisect_tol() -> f64 {
    1.0
}

impl Default for DesignSection {
    fn default() -> Self {
        DesignSection {
            scan_step_s: default_scan_step(),
            bisect_tol_s: default_bisect_tol(),
            t_max_s: None,
            margin: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AveragingSection {
    #[serde(default = "default_substeps")]
    pub quad_substeps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub avg_samples: Option<usize>,
    #[serde(default)]
    pub offset: i64,
    #[serde(default = "default_phase_nodes")]
    pub phase_nodes: usize,
    #[serde(default)]
    pub estimator: Estimator,
}

fn default_substeps() -> usize {
    AveragingConfig::default().quad_substeps
}

fn default_phase_nodes() -> usize {
    AveragingConfig::default().phase_nodes
}

impl Default for AveragingSection {
    fn default() -> Self {
        AveragingSection {
            quad_substeps: default_substeps(),
            avg_samples: None,
            offset: 0,
            phase_nodes: default_phase_nodes(),
            estimator: Estimator::default(),
        }
    }
}

/// Which averaged matrix a design run targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignKind {
    State,
    Output,
}

impl std::str::FromStr for DesignKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "state" => Ok(DesignKind::State),
            "output" => Ok(DesignKind::Output),
            other => Err(Error::Validation(format!(
                "unknown design kind '{other}' (expected state|output)"
            ))),
        }
    }
}

fn required(name: &str, v: Option<f64>) -> Result<f64> {
    match v {
        Some(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(Error::Validation(format!("{name} required and > 0"))),
    }
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Checks every invariant by building each typed configuration.
    pub fn validate(&self) -> Result<()> {
        self.orbit_spec()?.validate()?;
        self.inertia().validate()?;
        self.controller_config()?.validate()?;
        self.sim_config()?.validate()?;
        self.design_options().validate()?;
        let s = &self.simulation;
        for (name, v) in [("settle_omega", s.settle_omega), ("settle_qv", s.settle_qv)] {
            if let Some(x) = v {
                if !(x > 0.0) {
                    return Err(Error::Validation(format!("{name} must be > 0")));
                }
            }
        }
        Ok(())
    }

    pub fn orbit_spec(&self) -> Result<OrbitSpec> {
        let o = &self.orbit;
        let radius = match (o.radius_m, o.altitude_m) {
            (Some(r), None) => r,
            (None, Some(a)) => EARTH_RADIUS_M + a,
            (Some(_), Some(_)) => {
                return Err(Error::Validation(
                    "orbit: give either radius_m or altitude_m, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Validation(
                    "orbit: radius_m or altitude_m required".into(),
                ))
            }
        };
        let mut spec = OrbitSpec::circular(
            radius,
            o.inclination_deg.to_radians(),
            o.raan_deg.to_radians(),
            o.phase0_rad,
        );
        spec.mu_earth = o.mu_earth;
        spec.mu_m = o.mu_m;
        Ok(spec)
    }

    pub fn inertia(&self) -> InertiaSpec {
        let r = &self.spacecraft.inertia;
        InertiaSpec {
            j: Mat3::new(
                r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2],
            ),
        }
    }

    pub fn state_gains(&self) -> Result<StateGains> {
        Ok(StateGains {
            k1: required("k1", self.controller.k1)?,
            k2: required("k2", self.controller.k2)?,
        })
    }

    pub fn output_gains(&self) -> Result<OutputGains> {
        Ok(OutputGains {
            k1: required("k1", self.controller.k1)?,
            k2: required("k2", self.controller.k2)?,
            alpha: required("alpha", self.controller.alpha)?,
            lambda: required("lambda", self.controller.lambda)?,
        })
    }

    pub fn feedback_gains(&self, kind: DesignKind) -> Result<FeedbackGains> {
        Ok(match kind {
            DesignKind::State => FeedbackGains::State(self.state_gains()?),
            DesignKind::Output => FeedbackGains::Output(self.output_gains()?),
        })
    }

    /// Design kind implied by the configured control law.
    pub fn default_design_kind(&self) -> DesignKind {
        if self.controller.law.is_output() {
            DesignKind::Output
        } else {
            DesignKind::State
        }
    }

    pub fn period(&self) -> Result<f64> {
        required("period_s", self.controller.period_s)
    }

    pub fn epsilon(&self) -> Result<f64> {
        match self.controller.epsilon {
            Some(e) if e >= 0.0 && e.is_finite() => Ok(e),
            _ => Err(Error::Validation("epsilon required and >= 0".into())),
        }
    }

    pub fn controller_config(&self) -> Result<ControllerConfig> {
        let kind = self.controller.law;
        let gains = self.feedback_gains(self.default_design_kind())?;
        Ok(ControllerConfig {
            kind,
            gains,
            epsilon: self.epsilon()?,
            period: self.controller.period_s,
        })
    }

    pub fn step(&self) -> f64 {
        self.simulation.step_s.unwrap_or_else(|| {
            self.controller
                .period_s
                .map(|t| t / DEFAULT_STEPS_PER_PERIOD)
                .unwrap_or(DEFAULT_CONTINUOUS_STEP)
        })
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let orbit = self.orbit_spec()?;
        let t_final = self
            .simulation
            .t_final_s
            .unwrap_or_else(|| DEFAULT_HORIZON_ORBITS * orbit.period());
        Ok(SimConfig {
            orbit,
            inertia: self.inertia(),
            controller: self.controller_config()?,
            q0: Quaternion::from_array(self.initial.q),
            omega0: Vec3::from(self.initial.omega),
            t_final,
            h: self.step(),
            record_stride: self.simulation.record_stride.unwrap_or(1),
            delta0: self.controller.delta0.map(Vector4::from),
        })
    }

    pub fn settle_tolerance(&self) -> SettleTolerance {
        let d = SettleTolerance::default();
        SettleTolerance {
            omega: self.simulation.settle_omega.unwrap_or(d.omega),
            qv: self.simulation.settle_qv.unwrap_or(d.qv),
        }
    }

    pub fn averaging_config(&self) -> AveragingConfig {
        let a = &self.averaging;
        AveragingConfig {
            quad_substeps: a.quad_substeps,
            avg_samples: a.avg_samples,
            offset: a.offset,
            phase_nodes: a.phase_nodes,
            estimator: a.estimator,
        }
    }

    pub fn design_options(&self) -> DesignOptions {
        DesignOptions {
            scan_step: self.design.scan_step_s,
            bisect_tol: self.design.bisect_tol_s,
            t_max: self.design.t_max_s,
            margin: self.design.margin,
            averaging: self.averaging_config(),
        }
    }
}

/// Reads and validates a scenario file.
pub fn parse_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Scenario::from_toml_str(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}
