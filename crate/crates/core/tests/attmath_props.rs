use approx::assert_relative_eq;
use magzoh::attmath::{dcm_from_quat, kin_matrix, normalize, skew, Mat3, Quaternion, Vec3};
use proptest::prelude::*;

fn unit_quaternion() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("non-degenerate", |a| {
            a.iter().map(|x| x * x).sum::<f64>() > 1e-3
        })
        .prop_map(|a| normalize(&Quaternion::from_array(a)).unwrap())
}

fn vec3() -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-10.0f64..10.0).prop_map(Vec3::from)
}

proptest! {
    #[test]
    fn dcm_is_a_rotation(q in unit_quaternion()) {
        let c = dcm_from_quat(&q).unwrap();
        prop_assert!((c.transpose() * c - Mat3::identity()).abs().max() < 1e-12);
        prop_assert!((c.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn double_cover(q in unit_quaternion()) {
        let c1 = dcm_from_quat(&q).unwrap();
        let c2 = dcm_from_quat(&-q).unwrap();
        prop_assert!((c1 - c2).abs().max() < 1e-15);
    }

    #[test]
    fn kinematics_preserve_norm(q in unit_quaternion(), w in vec3()) {
        let qdot = kin_matrix(&q).unwrap() * w;
        prop_assert!(q.to_vector4().dot(&qdot).abs() < 1e-12 * (1.0 + w.norm()));
    }

    #[test]
    fn rotation_preserves_length(q in unit_quaternion(), v in vec3()) {
        let c = dcm_from_quat(&q).unwrap();
        prop_assert!(((c * v).norm() - v.norm()).abs() <= 1e-12 * (1.0 + v.norm()));
    }

    #[test]
    fn skew_matches_cross(a in vec3(), b in vec3()) {
        prop_assert!((skew(&a) * b - a.cross(&b)).norm() < 1e-12 * (1.0 + a.norm() * b.norm()));
        prop_assert!((skew(&a) + skew(&a).transpose()).abs().max() == 0.0);
    }

    #[test]
    fn dcm_fixes_rotation_axis(q in unit_quaternion()) {
        prop_assume!(q.qv.norm() > 1e-3);
        let c = dcm_from_quat(&q).unwrap();
        prop_assert!((c * q.qv - q.qv).norm() < 1e-12);
    }
}

#[test]
fn small_rotation_about_z() {
    // Frame rotation by θ about z: a fixed inertial x-axis appears at −θ in the body.
    let th: f64 = 0.3;
    let q = Quaternion::new(0.0, 0.0, (th / 2.0).sin(), (th / 2.0).cos());
    let c = dcm_from_quat(&q).unwrap();
    let x_body = c * Vec3::x();
    assert_relative_eq!(x_body, Vec3::new(th.cos(), -th.sin(), 0.0), epsilon = 1e-15);
}
