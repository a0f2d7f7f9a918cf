use std::f64::consts::PI;

use approx::assert_relative_eq;
use magzoh::attmath::{normalize, Quaternion, Vec3};
use magzoh::geomag::{field_body, field_inertial, orbital_rate, position_unit_inertial, OrbitSpec};
use proptest::prelude::*;

fn case_study() -> OrbitSpec {
    OrbitSpec::from_altitude(450e3, 87f64.to_radians(), 0.0, 0.94)
}

#[test]
fn case_study_rate_and_period() {
    let spec = case_study();
    assert_relative_eq!(spec.radius_m, 6.821e6);
    assert_relative_eq!(orbital_rate(&spec), 1.1207e-3, max_relative = 1e-4);
    // roughly 5600 s for this altitude
    assert!((spec.period() - 5600.0).abs() < 10.0);
}

#[test]
fn polar_orbit_stays_in_xz_plane() {
    let spec = OrbitSpec::from_altitude(450e3, PI / 2.0, 0.0, 0.0);
    let n = orbital_rate(&spec);
    for t in [0.0, 300.0, 1234.5, 4000.0] {
        let r = position_unit_inertial(&spec, t);
        assert_relative_eq!(
            r,
            Vec3::new((n * t).cos(), 0.0, (n * t).sin()),
            epsilon = 1e-14
        );
    }
}

#[test]
fn equatorial_field_magnitude() {
    let spec = case_study();
    let scale = spec.mu_m / spec.radius_m.powi(3);
    assert_relative_eq!(scale, 2.44e-5, max_relative = 5e-3);
}

proptest! {
    #[test]
    fn dipole_bounds(incl in 0.0f64..PI, raan in 0.0f64..(2.0 * PI), phi0 in -PI..PI, t in 0.0f64..1e5) {
        let spec = OrbitSpec::from_altitude(450e3, incl, raan, phi0);
        let scale = spec.mu_m / spec.radius_m.powi(3);
        let b = field_inertial(&spec, t).norm();
        prop_assert!(b >= scale * (1.0 - 1e-12) && b <= 2.0 * scale * (1.0 + 1e-12));
        prop_assert!((position_unit_inertial(&spec, t).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn body_field_norm(a in prop::array::uniform4(-1.0f64..1.0), t in 0.0f64..1e4) {
        prop_assume!(a.iter().map(|x| x * x).sum::<f64>() > 1e-3);
        let q = normalize(&Quaternion::from_array(a)).unwrap();
        let spec = case_study();
        let bi = field_inertial(&spec, t);
        let bb = field_body(&q, &spec, t).unwrap();
        prop_assert!((bb.norm() - bi.norm()).abs() <= 1e-12 * bi.norm());
    }

    #[test]
    fn period_of_field(t in 0.0f64..1e4) {
        let spec = case_study();
        let a = field_inertial(&spec, t);
        let b = field_inertial(&spec, t + spec.period());
        prop_assert!((a - b).norm() <= 1e-12 * a.norm());
    }
}
