use magzoh::matan::{
    eigenvalues, is_hurwitz, min_eig_sym, solve_lyapunov, spectral_norm, DenseMatrix, Spectrum,
};
use nalgebra::{Complex, DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn square(max_n: usize) -> impl Strategy<Value = DenseMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-5.0f64..5.0, n * n).prop_map(move |v| DenseMatrix::from_vec(n, n, v))
    })
}

/// Smallest singular value of `A − λI`, computed in complex arithmetic.
fn min_singular_shifted(a: &DenseMatrix, lambda: Complex64) -> f64 {
    let n = a.nrows();
    let shifted = DMatrix::<Complex<f64>>::from_fn(n, n, |i, j| {
        Complex::new(a[(i, j)], 0.0)
            - if i == j {
                lambda
            } else {
                Complex::new(0.0, 0.0)
            }
    });
    shifted.singular_values().min()
}

fn stable_random(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let m = DenseMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let shift = eigenvalues(&m).unwrap().max_real() + rng.gen_range(0.05..1.0);
    m - DenseMatrix::identity(n, n) * shift
}

fn sorted(s: &Spectrum) -> Vec<Complex64> {
    let mut v: Vec<_> = s.iter().copied().collect();
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

#[test]
fn companion_polynomial_roots() {
    // (λ+1)(λ+2)(λ²+λ+1) = λ⁴ + 4λ³ + 6λ² + 5λ + 2
    let c = [2.0, 5.0, 6.0, 4.0];
    let mut a = DenseMatrix::zeros(4, 4);
    for i in 1..4 {
        a[(i, i - 1)] = 1.0;
    }
    for i in 0..4 {
        a[(i, 3)] = -c[i];
    }
    let got = sorted(&eigenvalues(&a).unwrap());
    let h = 3f64.sqrt() / 2.0;
    let want = [
        Complex64::new(-2.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(-0.5, -h),
        Complex64::new(-0.5, h),
    ];
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).norm() < 1e-10, "{g} vs {w}");
    }
}

#[test]
fn random_stable_lyapunov() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [2, 3, 6, 6, 8, 10] {
        let a = stable_random(&mut rng, n);
        assert!(is_hurwitz(&a, None).unwrap());
        let p = solve_lyapunov(&a).unwrap();
        let res = &p * &a + a.transpose() * &p + DenseMatrix::identity(n, n);
        assert!(res.norm() <= 1e-8, "residual {}", res.norm());
        assert!((&p - p.transpose()).abs().max() <= 1e-12 * p.norm());
        assert!(min_eig_sym(&p).unwrap() > 0.0);
    }
}

#[test]
fn norm_dominates_sampled_gains() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = DenseMatrix::from_fn(5, 5, |_, _| rng.gen_range(-1.0..1.0));
    let s = spectral_norm(&a);
    for _ in 0..100 {
        let x = DVector::from_fn(5, |_, _| rng.gen_range(-1.0..1.0));
        assert!((&a * &x).norm() / x.norm() <= s * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalue_certificate(a in square(10)) {
        let spec = eigenvalues(&a).unwrap();
        prop_assert_eq!(spec.len(), a.nrows());
        let scale = spectral_norm(&a).max(1e-300);
        for &l in spec.iter() {
            prop_assert!(min_singular_shifted(&a, l) <= 1e-8 * scale);
        }
    }

    #[test]
    fn conjugate_symmetry(a in square(8)) {
        let v = sorted(&eigenvalues(&a).unwrap());
        let mut conj: Vec<_> = v.iter().map(|z| z.conj()).collect();
        conj.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let tol = 1e-8 * (1.0 + spectral_norm(&a));
        for (x, y) in v.iter().zip(&conj) {
            prop_assert!((x - y).norm() <= tol);
        }
    }

    #[test]
    fn norm_is_homogeneous(a in square(6), c in -10.0f64..10.0) {
        let lhs = spectral_norm(&(&a * c));
        let rhs = c.abs() * spectral_norm(&a);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn gram_matrix_is_psd(b in square(6)) {
        let s = b.transpose() * &b;
        prop_assert!(min_eig_sym(&s).unwrap() >= -1e-12 * (1.0 + s.norm()));
    }
}
