//! Quaternion and rotation algebra.
//!
//! Quaternions are stored vector part first, `[q1 q2 q3 q4]` with `q4` the
//! scalar part, and represent the rotation of the body frame with respect to
//! the inertial frame. The target attitude is [`Quaternion::IDENTITY`].

use nalgebra::{Matrix3, Matrix4x3, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Tolerance on `|‖q‖ - 1|` accepted by operations that require a unit quaternion.
pub const UNIT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub qv: Vec3,
    pub q4: f64,
}

impl Quaternion {
    /// `q̄ = [0 0 0 1]`, body frame aligned with the inertial frame.
    pub const IDENTITY: Quaternion = Quaternion {
        qv: Vector3::new(0.0, 0.0, 0.0),
        q4: 1.0,
    };

    pub fn new(q1: f64, q2: f64, q3: f64, q4: f64) -> Self {
        Quaternion {
            qv: Vector3::new(q1, q2, q3),
            q4,
        }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.qv.x, self.qv.y, self.qv.z, self.q4]
    }

    pub fn from_vector4(v: &Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_vector4(self) -> Vector4<f64> {
        Vector4::new(self.qv.x, self.qv.y, self.qv.z, self.q4)
    }

    pub fn norm(&self) -> f64 {
        self.to_vector4().norm()
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    fn check_unit(&self) -> Result<()> {
        let n = self.norm();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::Domain(format!(
                "quaternion norm {n} is not within {UNIT_TOLERANCE} of 1"
            )));
        }
        Ok(())
    }
}

impl Default for Quaternion {
    fn default() -> Self {
        Quaternion::IDENTITY
    }
}

impl std::ops::Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion {
            qv: -self.qv,
            q4: -self.q4,
        }
    }
}

/// Cross-product matrix: `skew(a) * b == a × b`.
pub fn skew(a: &Vec3) -> Mat3 {
    Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// Attitude matrix `C(q) = (q4² − q_vᵀq_v) I + 2 q_v q_vᵀ − 2 q4 q_v^×`.
///
/// Maps inertial-frame components to body-frame components.
pub fn dcm_from_quat(q: &Quaternion) -> Result<Mat3> {
    q.check_unit()?;
    Ok(dcm_unchecked(q))
}

/// [`dcm_from_quat`] without the unit-norm check, for hot loops whose
/// quaternion is already known to be normalized.
pub(crate) fn dcm_unchecked(q: &Quaternion) -> Mat3 {
    let qv = &q.qv;
    let q4 = q.q4;
    Mat3::identity() * (q4 * q4 - qv.dot(qv)) + qv * qv.transpose() * 2.0 - skew(qv) * (2.0 * q4)
}

/// Kinematic matrix `W(q) = ½ [q4 I + q_v^× ; −q_vᵀ]`, so that `q̇ = W(q) ω`.
pub fn kin_matrix(q: &Quaternion) -> Result<Matrix4x3<f64>> {
    q.check_unit()?;
    Ok(kin_matrix_unchecked(q))
}

pub(crate) fn kin_matrix_unchecked(q: &Quaternion) -> Matrix4x3<f64> {
    let top = Mat3::identity() * q.q4 + skew(&q.qv);
    let mut w = Matrix4x3::zeros();
    w.fixed_view_mut::<3, 3>(0, 0).copy_from(&top);
    w.fixed_view_mut::<1, 3>(3, 0)
        .copy_from(&(-q.qv.transpose()));
    w * 0.5
}

/// Rescales `q` to unit norm. Fails for (near-)zero quaternions.
pub fn normalize(q: &Quaternion) -> Result<Quaternion> {
    let n = q.norm();
    if !(n > 1e-12) || !n.is_finite() {
        return Err(Error::Domain(format!(
            "cannot normalize quaternion of norm {n}"
        )));
    }
    Ok(Quaternion {
        qv: q.qv / n,
        q4: q.q4 / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn skew_explicit_entries() {
        let s = skew(&Vec3::new(1.0, 2.0, 3.0));
        let expected = Matrix3::new(0.0, -3.0, 2.0, 3.0, 0.0, -1.0, -2.0, 1.0, 0.0);
        assert_eq!(s, expected);
        assert_eq!(skew(&Vec3::zeros()), Mat3::zeros());
    }

    #[test]
    fn skew_is_cross_product() {
        let b = skew(&Vec3::x()) * Vec3::y();
        assert_eq!(b, Vec3::z());
    }

    #[test]
    fn dcm_identity_and_half_turn() {
        assert_eq!(
            dcm_from_quat(&Quaternion::IDENTITY).unwrap(),
            Mat3::identity()
        );
        let c = dcm_from_quat(&Quaternion::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(c, Mat3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0)));
    }

    #[test]
    fn dcm_rejects_non_unit() {
        let err = dcm_from_quat(&Quaternion::new(0.0, 0.0, 0.0, 1.1)).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn kin_matrix_at_identity() {
        let w = kin_matrix(&Quaternion::IDENTITY).unwrap();
        let mut expected = Matrix4x3::zeros();
        expected[(0, 0)] = 0.5;
        expected[(1, 1)] = 0.5;
        expected[(2, 2)] = 0.5;
        assert_eq!(w, expected);
    }

    #[test]
    fn kin_matrix_hand_value() {
        // ½[(0·I + e1^×)ω ; −e1ᵀω] with ω = e3 gives ½[e1 × e3 ; 0] = [0, −0.5, 0, 0].
        let w = kin_matrix(&Quaternion::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        let qdot = w * Vec3::z();
        assert_relative_eq!(qdot, Vector4::new(0.0, -0.5, 0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn normalize_cases() {
        let q = normalize(&Quaternion::new(0.0, 0.0, 0.0, 2.0)).unwrap();
        assert_eq!(q, Quaternion::IDENTITY);
        let q = normalize(&Quaternion::new(1.0, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!(q.to_array(), [0.5; 4]);
        let u = Quaternion::new(0.36, 0.48, 0.0, 0.8);
        let n = normalize(&u).unwrap();
        for (a, b) in u.to_array().iter().zip(n.to_array()) {
            assert!((a - b).abs() <= 1e-15);
        }
        assert!(normalize(&Quaternion::new(0.0, 0.0, 0.0, 1e-13)).is_err());
    }
}
