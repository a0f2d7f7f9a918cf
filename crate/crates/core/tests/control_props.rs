use magzoh::attmath::{normalize, Quaternion, Vec3};
use magzoh::control::{continuous_output_fb, output_fb_step, state_fb_dipole, ObserverState};
use magzoh::design::{OutputGains, StateGains};
use nalgebra::Vector4;
use proptest::prelude::*;

const SG: StateGains = StateGains { k1: 2e11, k2: 3e11 };

fn unit_quaternion() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("non-degenerate", |a| {
            a.iter().map(|x| x * x).sum::<f64>() > 1e-3
        })
        .prop_map(|a| normalize(&Quaternion::from_array(a)).unwrap())
}

fn field() -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-5e-5f64..5e-5).prop_map(Vec3::from)
}

fn output_gains() -> impl Strategy<Value = OutputGains> {
    (0.1f64..5.0, 0.1f64..5.0).prop_map(|(alpha, lambda)| OutputGains {
        k1: 2e11,
        k2: 3e11,
        alpha,
        lambda,
    })
}

proptest! {
    #[test]
    fn state_torque_is_orthogonal_to_field(
        q in unit_quaternion(),
        w in prop::array::uniform3(-0.1f64..0.1),
        b in field(),
        eps in 1e-5f64..1e-2,
    ) {
        let m = state_fb_dipole(&q, &Vec3::from(w), &b, &SG, eps);
        let torque = m.cross(&b);
        prop_assert!(torque.dot(&b).abs() <= 1e-12 * torque.norm() * b.norm() + 1e-300);
        prop_assert!(m.dot(&b).abs() <= 1e-12 * m.norm() * b.norm() + 1e-300);
    }

    #[test]
    fn output_torque_is_orthogonal_to_field(
        q in unit_quaternion(),
        d in prop::array::uniform4(-1e3f64..1e3),
        b in field(),
        g in output_gains(),
        eps in 1e-5f64..1e-2,
    ) {
        let state = ObserverState { delta: Vector4::from(d) };
        let (m, _) = continuous_output_fb(&state, &q, &b, &g, eps);
        prop_assert!(m.dot(&b).abs() <= 1e-12 * m.norm() * b.norm() + 1e-300);
    }

    #[test]
    fn output_law_vanishes_at_equilibrium(b in field(), g in output_gains(), eps in 1e-5f64..1e-2) {
        let q = Quaternion::IDENTITY;
        let state = ObserverState::matched(&q, eps, g.lambda);
        let (m, next) = output_fb_step(&state, &q, &b, &g, eps, 20.0);
        prop_assert!(m.norm() <= 1e-12 * b.norm() * g.k1 * eps * eps);
        prop_assert!((next.delta - state.delta).norm() <= 1e-12 * state.delta.norm());
    }

    #[test]
    fn output_step_is_forward_euler(
        q in unit_quaternion(),
        d in prop::array::uniform4(-1e3f64..1e3),
        b in field(),
        g in output_gains(),
        t in 0.1f64..100.0,
    ) {
        let eps = 1e-4;
        let state = ObserverState { delta: Vector4::from(d) };
        let (m_c, rate) = continuous_output_fb(&state, &q, &b, &g, eps);
        let (m_d, next) = output_fb_step(&state, &q, &b, &g, eps, t);
        prop_assert_eq!(m_c, m_d);
        prop_assert_eq!(next.delta, state.delta + rate * t);
    }
}
