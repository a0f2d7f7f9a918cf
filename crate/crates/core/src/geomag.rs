//! Circular-orbit geometry and the dipole model of the geomagnetic field.

use std::f64::consts::PI;

use nalgebra::Rotation3;
use serde::{Deserialize, Serialize};

use crate::attmath::{dcm_from_quat, Mat3, Quaternion, Vec3};
use crate::error::{Error, Result};

pub const EARTH_RADIUS_M: f64 = 6.371e6;
pub const MU_EARTH: f64 = 3.986e14;
/// Total geomagnetic dipole strength, Wb·m.
pub const MU_DIPOLE: f64 = 7.746e15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSpec {
    pub radius_m: f64,
    pub incl_rad: f64,
    pub raan_rad: f64,
    pub phi0_rad: f64,
    pub mu_earth: f64,
    pub mu_m: f64,
    pub m_hat_i: Vec3,
}

impl OrbitSpec {
    /// Circular orbit with the default Earth constants and a dipole pointing along `−z`.
    pub fn circular(radius_m: f64, incl_rad: f64, raan_rad: f64, phi0_rad: f64) -> Self {
        OrbitSpec {
            radius_m,
            incl_rad,
            raan_rad,
            phi0_rad,
            mu_earth: MU_EARTH,
            mu_m: MU_DIPOLE,
            m_hat_i: Vec3::new(0.0, 0.0, -1.0),
        }
    }

    pub fn from_altitude(altitude_m: f64, incl_rad: f64, raan_rad: f64, phi0_rad: f64) -> Self {
        Self::circular(EARTH_RADIUS_M + altitude_m, incl_rad, raan_rad, phi0_rad)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.radius_m,
            self.incl_rad,
            self.raan_rad,
            self.phi0_rad,
            self.mu_earth,
            self.mu_m,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite || !self.m_hat_i.iter().all(|v| v.is_finite()) {
            return Err(Error::Validation("orbit parameters must be finite".into()));
        }
        if self.radius_m <= EARTH_RADIUS_M {
            return Err(Error::Validation(format!(
                "orbit radius {} m must exceed Earth radius {} m",
                self.radius_m, EARTH_RADIUS_M
            )));
        }
        if !(0.0..=PI).contains(&self.incl_rad) {
            return Err(Error::Validation(format!(
                "inclination {} rad must lie in [0, π]",
                self.incl_rad
            )));
        }
        if self.mu_m <= 0.0 || self.mu_earth <= 0.0 {
            return Err(Error::Validation(
                "mu_m and mu_earth must be positive".into(),
            ));
        }
        if (self.m_hat_i.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(
                "dipole direction must be a unit vector".into(),
            ));
        }
        Ok(())
    }

    /// Orbital rate `n = sqrt(μ_E / R³)`, rad/s.
    pub fn orbital_rate(&self) -> f64 {
        (self.mu_earth / self.radius_m.powi(3)).sqrt()
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.orbital_rate()
    }

    /// Equatorial field strength `μ_m / R³`, tesla.
    pub fn field_scale(&self) -> f64 {
        self.mu_m / self.radius_m.powi(3)
    }

    /// Rotation from orbital-plane coordinates to inertial: `R_z(Ω) R_x(incl)`.
    pub fn plane_to_inertial(&self) -> Mat3 {
        let rz = Rotation3::from_axis_angle(&Vec3::z_axis(), self.raan_rad);
        let rx = Rotation3::from_axis_angle(&Vec3::x_axis(), self.incl_rad);
        (rz * rx).into_inner()
    }

    /// Precomputes the orbit-dependent constants for repeated field evaluation.
    pub fn field_model(&self) -> FieldModel {
        FieldModel {
            rate: self.orbital_rate(),
            phi0: self.phi0_rad,
            rot: self.plane_to_inertial(),
            scale: self.field_scale(),
            m_hat: self.m_hat_i,
        }
    }
}

/// Inertial field evaluator with the orbit constants cached.
#[derive(Debug, Clone, Copy)]
pub struct FieldModel {
    rate: f64,
    phi0: f64,
    rot: Mat3,
    scale: f64,
    m_hat: Vec3,
}

impl FieldModel {
    pub fn position_unit(&self, t: f64) -> Vec3 {
        let (s, c) = (self.rate * t + self.phi0).sin_cos();
        self.rot * Vec3::new(c, s, 0.0)
    }

    pub fn field(&self, t: f64) -> Vec3 {
        let r = self.position_unit(t);
        (r * (3.0 * self.m_hat.dot(&r)) - self.m_hat) * self.scale
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

pub fn orbital_rate(spec: &OrbitSpec) -> f64 {
    spec.orbital_rate()
}

/// Unit position vector in the inertial frame at time `t`.
pub fn position_unit_inertial(spec: &OrbitSpec, t: f64) -> Vec3 {
    spec.field_model().position_unit(t)
}

/// Dipole field `B^i(t) = (μ_m/R³)[3(m̂ᵀr̂) r̂ − m̂]`, tesla.
pub fn field_inertial(spec: &OrbitSpec, t: f64) -> Vec3 {
    spec.field_model().field(t)
}

/// Body-frame field `B^b = C(q) B^i(t)`.
pub fn field_body(q: &Quaternion, spec: &OrbitSpec, t: f64) -> Result<Vec3> {
    Ok(dcm_from_quat(q)? * field_inertial(spec, t))
}
