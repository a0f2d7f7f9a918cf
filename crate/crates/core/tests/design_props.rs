use magzoh::avg::{averaged_l, l_average_zero, AveragingConfig};
use magzoh::design::{
    build_as, design_sampling, epsilon_bound, find_tstar, limit_matrix, DesignOptions,
    FeedbackGains, InertiaSpec, OutputGains, StateGains,
};
use magzoh::geomag::OrbitSpec;
use magzoh::matan::{is_hurwitz, DenseMatrix};
use magzoh::Error;

fn case_study() -> OrbitSpec {
    OrbitSpec::from_altitude(450e3, 87f64.to_radians(), 0.0, 0.94)
}

fn inertia() -> InertiaSpec {
    InertiaSpec::diagonal(27.0, 17.0, 25.0)
}

fn state() -> FeedbackGains {
    FeedbackGains::State(StateGains { k1: 2e11, k2: 3e11 })
}

#[test]
fn limit_matrices_are_hurwitz_over_a_grid() {
    for incl in [5.0f64, 45.0, 87.0, 90.0, 120.0] {
        let spec = OrbitSpec::from_altitude(450e3, incl.to_radians(), 0.3, 0.94);
        for k1 in [1e10, 2e11, 5e12] {
            for k2 in [1e10, 3e11, 5e12] {
                let s = limit_matrix(
                    &spec,
                    &inertia(),
                    &FeedbackGains::State(StateGains { k1, k2 }),
                )
                .unwrap();
                assert!(
                    is_hurwitz(&s, None).unwrap(),
                    "state, incl {incl}, k1 {k1}, k2 {k2}"
                );
                for al in [(1.0, 1.0), (0.5, 4.0)] {
                    let g = FeedbackGains::Output(OutputGains {
                        k1,
                        k2,
                        alpha: al.0,
                        lambda: al.1,
                    });
                    let o = limit_matrix(&spec, &inertia(), &g).unwrap();
                    assert!(
                        is_hurwitz(&o, None).unwrap(),
                        "output, incl {incl}, k1 {k1}, k2 {k2}"
                    );
                }
            }
        }
    }
}

#[test]
fn case_study_matrix_is_hurwitz_at_twenty_seconds() {
    let spec = case_study();
    let lav = averaged_l(&spec, 20.0, &AveragingConfig::default()).unwrap();
    let a = build_as(&inertia(), &StateGains { k1: 2e11, k2: 3e11 }, &lav).unwrap();
    assert!(is_hurwitz(&a, None).unwrap());
    let (eps0, p) = epsilon_bound(&a, 20.0).unwrap();
    assert!(eps0 > 0.0);
    let res = &p * &a + a.transpose() * &p + DenseMatrix::identity(6, 6);
    assert!(res.norm() <= 1e-8);
}

#[test]
fn equatorial_orbit_fails_design() {
    let spec = OrbitSpec::from_altitude(450e3, 0.0, 0.0, 0.94);
    let err = find_tstar(&spec, &inertia(), &state(), &DesignOptions::default()).unwrap_err();
    assert!(matches!(err, Error::Assumption1Violated { .. }));
    assert!(err.to_string().contains("Assumption 1 violated"));
}

#[test]
fn bisection_is_consistent() {
    let spec = case_study();
    let opts = DesignOptions::default();
    let coarse = find_tstar(&spec, &inertia(), &state(), &opts).unwrap();
    let fine = find_tstar(
        &spec,
        &inertia(),
        &state(),
        &DesignOptions {
            bisect_tol: opts.bisect_tol / 2.0,
            ..opts
        },
    )
    .unwrap();
    assert!(
        (coarse - fine).abs() <= opts.bisect_tol,
        "{coarse} vs {fine}"
    );
}

#[test]
fn tstar_is_monotone_in_margin() {
    let spec = case_study();
    let mut last = f64::INFINITY;
    for margin in [0.0, 1e-3, 1e-2, 5e-2, 1e-1] {
        let t = find_tstar(
            &spec,
            &inertia(),
            &state(),
            &DesignOptions {
                margin: Some(margin),
                ..DesignOptions::default()
            },
        )
        .unwrap();
        assert!(t <= last, "margin {margin}: {t} > {last}");
        last = t;
    }
}

#[test]
fn period_beyond_tstar_is_rejected() {
    let err = design_sampling(
        &case_study(),
        &inertia(),
        &state(),
        2000.0,
        &DesignOptions::default(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::PeriodExceedsTstar { .. }));
    assert!(err.to_string().contains("T exceeds T*"));
}

#[test]
fn output_design_is_available() {
    let g = FeedbackGains::Output(OutputGains {
        k1: 2e11,
        k2: 3e11,
        alpha: 1.0,
        lambda: 3.0,
    });
    let d = design_sampling(
        &case_study(),
        &inertia(),
        &g,
        20.0,
        &DesignOptions::default(),
    )
    .unwrap();
    assert!(d.tstar > 20.0);
    assert!(d.eps0 > 0.0);
    assert_eq!(d.spectrum.len(), 10);
    assert!(d.spectrum.max_real() < 0.0);
}

#[test]
fn zero_limit_matches_small_period_matrix() {
    let spec = case_study();
    let l0 = l_average_zero(&spec);
    let l1 = averaged_l(&spec, 1.0, &AveragingConfig::default()).unwrap();
    let g = StateGains { k1: 2e11, k2: 3e11 };
    let a0 = build_as(&inertia(), &g, &l0).unwrap();
    let a1 = build_as(&inertia(), &g, &l1).unwrap();
    assert!((a0 - &a1).norm() <= 1e-3 * a1.norm());
}
