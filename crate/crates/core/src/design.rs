//! Sampling-period selection: the averaged closed-loop matrices `A_s(T)` and
//! `A_o(T)`, the Hurwitz range `(0, T*)` and the gain-scaling bound `ε₀`.

use nalgebra::SVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attmath::{Mat3, Vec3};
use crate::avg::{assumption1_holds, averaged_l, l_average_zero, AveragingConfig};
use crate::error::{Error, Result};
use crate::geomag::OrbitSpec;
use crate::matan::{
    default_margin, eigenvalues, solve_lyapunov, spectral_norm, DenseMatrix, Spectrum,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InertiaSpec {
    pub j: Mat3,
}

impl InertiaSpec {
    pub fn diagonal(jx: f64, jy: f64, jz: f64) -> Self {
        InertiaSpec {
            j: Mat3::from_diagonal(&Vec3::new(jx, jy, jz)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.j.iter().all(|v| v.is_finite()) {
            return Err(Error::Validation("inertia entries must be finite".into()));
        }
        if (self.j - self.j.transpose()).norm() > 1e-12 * self.j.norm() {
            return Err(Error::Validation("inertia matrix must be symmetric".into()));
        }
        let min = self.j.symmetric_eigenvalues().min();
        if !(min > 0.0) {
            return Err(Error::Validation(
                "inertia matrix must be positive definite".into(),
            ));
        }
        Ok(())
    }

    pub fn inverse(&self) -> Result<Mat3> {
        self.j
            .try_inverse()
            .ok_or_else(|| Error::Singular("inertia matrix".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateGains {
    pub k1: f64,
    pub k2: f64,
}

impl StateGains {
    pub fn validate(&self) -> Result<()> {
        positive("k1", self.k1)?;
        positive("k2", self.k2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputGains {
    pub k1: f64,
    pub k2: f64,
    pub alpha: f64,
    pub lambda: f64,
}

impl OutputGains {
    pub fn validate(&self) -> Result<()> {
        positive("k1", self.k1)?;
        positive("k2", self.k2)?;
        positive("alpha", self.alpha)?;
        positive("lambda", self.lambda)
    }
}

pub(crate) fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "{name} required and > 0 (got {v})"
        )))
    }
}

/// Gains of either feedback structure, selecting `A_s` or `A_o`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FeedbackGains {
    State(StateGains),
    Output(OutputGains),
}

impl FeedbackGains {
    pub fn validate(&self) -> Result<()> {
        match self {
            FeedbackGains::State(g) => g.validate(),
            FeedbackGains::Output(g) => g.validate(),
        }
    }

    /// Averaged closed-loop matrix for the given `L_av`.
    pub fn averaged_matrix(&self, inertia: &InertiaSpec, lav: &Mat3) -> Result<DenseMatrix> {
        match self {
            FeedbackGains::State(g) => build_as(inertia, g, lav),
            FeedbackGains::Output(g) => build_ao(inertia, g, lav),
        }
    }
}

fn put(a: &mut DenseMatrix, r: usize, c: usize, block: &Mat3) {
    a.view_mut((r, c), (3, 3)).copy_from(block);
}

/// `A_s = [[0, ½I], [−k₁J⁻¹L_av, −k₂J⁻¹L_av]]` (6×6).
pub fn build_as(inertia: &InertiaSpec, g: &StateGains, lav: &Mat3) -> Result<DenseMatrix> {
    let jl = inertia.inverse()? * lav;
    let mut a = DenseMatrix::zeros(6, 6);
    put(&mut a, 0, 3, &(Mat3::identity() * 0.5));
    put(&mut a, 3, 0, &(jl * -g.k1));
    put(&mut a, 3, 3, &(jl * -g.k2));
    Ok(a)
}

/// `A_o` (10×10), state ordering `[z₁, z₂, z₃, z₄]` with `z₄` scalar.
pub fn build_ao(inertia: &InertiaSpec, g: &OutputGains, lav: &Mat3) -> Result<DenseMatrix> {
    let jl = inertia.inverse()? * lav;
    let al = g.alpha * g.lambda;
    let half = Mat3::identity() * 0.5;
    let mut a = DenseMatrix::zeros(10, 10);
    put(&mut a, 0, 3, &half);
    put(&mut a, 3, 0, &(jl * -g.k1));
    put(&mut a, 3, 6, &(jl * (-0.5 * g.k2 * al)));
    put(&mut a, 6, 3, &half);
    put(&mut a, 6, 6, &(Mat3::identity() * -al));
    a[(9, 9)] = -al;
    Ok(a)
}

/// `V₁(w) = k₁ w₁ᵀ L_av⁰ w₁ + ½ w₂ᵀ J w₂`.
pub fn lyapunov_v1(inertia: &InertiaSpec, g: &StateGains, l0: &Mat3, w: &SVector<f64, 6>) -> f64 {
    let w1: Vec3 = w.fixed_rows::<3>(0).into();
    let w2: Vec3 = w.fixed_rows::<3>(3).into();
    g.k1 * w1.dot(&(l0 * w1)) + 0.5 * w2.dot(&(inertia.j * w2))
}

/// `V₃(w) = k₁ w₁ᵀL⁰w₁ + ½ w₂ᵀJw₂ + ½ k₂αλ w₃ᵀL⁰w₃ + ½ w₄²`.
pub fn lyapunov_v3(inertia: &InertiaSpec, g: &OutputGains, l0: &Mat3, w: &SVector<f64, 10>) -> f64 {
    let w1: Vec3 = w.fixed_rows::<3>(0).into();
    let w2: Vec3 = w.fixed_rows::<3>(3).into();
    let w3: Vec3 = w.fixed_rows::<3>(6).into();
    let w4 = w[9];
    g.k1 * w1.dot(&(l0 * w1))
        + 0.5 * w2.dot(&(inertia.j * w2))
        + 0.5 * g.k2 * g.alpha * g.lambda * w3.dot(&(l0 * w3))
        + 0.5 * w4 * w4
}

/// `A⁰ = lim_{T→0} A(T)`, built from `L_av⁰`.
pub fn limit_matrix(
    spec: &OrbitSpec,
    inertia: &InertiaSpec,
    gains: &FeedbackGains,
) -> Result<DenseMatrix> {
    gains.averaged_matrix(inertia, &l_average_zero(spec))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignOptions {
    /// Coarse grid step of the `T*` scan, seconds.
    pub scan_step: f64,
    /// Bisection tolerance on `T*`, seconds.
    pub bisect_tol: f64,
    /// Upper end of the scan; `None` scans up to one orbital period.
    pub t_max: Option<f64>,
    /// Absolute Hurwitz margin; `None` uses `1e-9·‖A‖`.
    pub margin: Option<f64>,
    pub averaging: AveragingConfig,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            scan_step: 10.0,
            bisect_tol: 1.0,
            t_max: None,
            margin: None,
            averaging: AveragingConfig::default(),
        }
    }
}

impl DesignOptions {
    pub fn validate(&self) -> Result<()> {
        positive("scan_step", self.scan_step)?;
        positive("bisect_tol", self.bisect_tol)?;
        if let Some(t) = self.t_max {
            positive("t_max", t)?;
        }
        if let Some(m) = self.margin {
            if !(m >= 0.0) {
                return Err(Error::Validation("margin must be >= 0".into()));
            }
        }
        self.averaging.validate()
    }
}

/// Maximum real eigenvalue part of `A(T)` and the Hurwitz verdict.
fn hurwitz_at(
    spec: &OrbitSpec,
    inertia: &InertiaSpec,
    gains: &FeedbackGains,
    t: f64,
    opts: &DesignOptions,
) -> Result<bool> {
    let lav = averaged_l(spec, t, &opts.averaging)?;
    let a = gains.averaged_matrix(inertia, &lav)?;
    let margin = opts.margin.unwrap_or_else(|| default_margin(&a));
    Ok(eigenvalues(&a)?.max_real() < -margin)
}

/// Largest `T̂` such that `A(T)` is Hurwitz on every scanned `T ∈ (0, T̂]`.
///
/// The grid `scan_step, 2·scan_step, …` is evaluated until the first
/// non-Hurwitz point; the crossing is then refined by bisection to
/// `bisect_tol`.
pub fn find_tstar(
    spec: &OrbitSpec,
    inertia: &InertiaSpec,
    gains: &FeedbackGains,
    opts: &DesignOptions,
) -> Result<f64> {
    opts.validate()?;
    gains.validate()?;
    inertia.validate()?;
    let a1 = assumption1_holds(spec);
    if !a1.holds {
        return Err(Error::Assumption1Violated { margin: a1.margin });
    }
    let t_max = opts.t_max.unwrap_or_else(|| spec.period());
    let n_grid = (t_max / opts.scan_step).floor() as usize;
    if n_grid == 0 {
        return Err(Error::Validation("scan_step exceeds t_max".into()));
    }
    let batch = rayon::current_num_threads().max(1) * 4;

    let mut first_bad = None;
    let mut start = 1;
    while start <= n_grid && first_bad.is_none() {
        let end = (start + batch - 1).min(n_grid);
        let flags: Vec<Result<bool>> = (start..=end)
            .into_par_iter()
            .map(|i| hurwitz_at(spec, inertia, gains, i as f64 * opts.scan_step, opts))
            .collect();
        for (offset, flag) in flags.into_iter().enumerate() {
            if !flag? {
                first_bad = Some(start + offset);
                break;
            }
        }
        start = end + 1;
    }

    let Some(bad) = first_bad else {
        return Err(Error::Design(format!(
            "A(T) remains Hurwitz up to the scan limit {t_max} s; no crossing found"
        )));
    };
    if bad == 1 {
        return Err(Error::Design(format!(
            "A(T) is not Hurwitz at the smallest scanned T = {} s",
            opts.scan_step
        )));
    }
    let mut lo = (bad - 1) as f64 * opts.scan_step;
    let mut hi = bad as f64 * opts.scan_step;
    while hi - lo > opts.bisect_tol {
        let mid = 0.5 * (lo + hi);
        if hurwitz_at(spec, inertia, gains, mid, opts)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `ε₀ = 1 / (2 T ‖AᵀPA‖)` with `PA + AᵀP = −I`.
pub fn epsilon_bound(a: &DenseMatrix, t: f64) -> Result<(f64, DenseMatrix)> {
    positive("T", t)?;
    let p = solve_lyapunov(a)?;
    let apa = a.transpose() * &p * a;
    let eps0 = 1.0 / (2.0 * t * spectral_norm(&apa));
    Ok((eps0, p))
}

/// Result of the full sampling design at a chosen period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingDesign {
    pub period: f64,
    pub tstar: f64,
    pub p: DenseMatrix,
    pub eps0: f64,
    pub spectrum: Spectrum,
}

/// Assumption 1 → `T*` → `ε₀` at `period`.
pub fn design_sampling(
    spec: &OrbitSpec,
    inertia: &InertiaSpec,
    gains: &FeedbackGains,
    period: f64,
    opts: &DesignOptions,
) -> Result<SamplingDesign> {
    positive("T", period)?;
    let tstar = find_tstar(spec, inertia, gains, opts)?;
    if period >= tstar {
        return Err(Error::PeriodExceedsTstar { period, tstar });
    }
    let lav = averaged_l(spec, period, &opts.averaging)?;
    let a = gains.averaged_matrix(inertia, &lav)?;
    let spectrum = eigenvalues(&a)?;
    let (eps0, p) = epsilon_bound(&a, period)?;
    Ok(SamplingDesign {
        period,
        tstar,
        p,
        eps0,
        spectrum,
    })
}

/// Row-major nested array, for reports.
pub fn mat3_rows(m: &Mat3) -> [[f64; 3]; 3] {
    [
        [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
        [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
        [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matan::is_hurwitz;

    fn unit_inertia() -> InertiaSpec {
        InertiaSpec {
            j: Mat3::identity(),
        }
    }

    #[test]
    fn as_structure_and_identity_case() {
        let a = build_as(
            &unit_inertia(),
            &StateGains { k1: 1.0, k2: 1.0 },
            &Mat3::identity(),
        )
        .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert_eq!(a[(i, j)], 0.0);
                assert_eq!(a[(i, 3 + j)], 0.5 * e);
                assert_eq!(a[(3 + i, j)], -e);
                assert_eq!(a[(3 + i, 3 + j)], -e);
            }
        }
        assert!(is_hurwitz(&a, None).unwrap());

        let lav = Mat3::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0);
        let a = build_as(
            &InertiaSpec::diagonal(27.0, 17.0, 25.0),
            &StateGains { k1: 3.0, k2: 9.0 },
            &lav,
        )
        .unwrap();
        assert_eq!(
            a.view((0, 3), (3, 3)).clone_owned(),
            DenseMatrix::identity(3, 3) * 0.5
        );
    }

    #[test]
    fn ao_structure() {
        let g = OutputGains {
            k1: 1.0,
            k2: 1.0,
            alpha: 1.0,
            lambda: 1.0,
        };
        let a = build_ao(&unit_inertia(), &g, &Mat3::identity()).unwrap();
        assert_eq!(a[(9, 9)], -1.0);
        for i in 0..9 {
            assert_eq!(a[(9, i)], 0.0);
            assert_eq!(a[(i, 9)], 0.0);
        }
        assert!(is_hurwitz(&a, None).unwrap());

        let g = OutputGains {
            k1: 2.0,
            k2: 3.0,
            alpha: 0.7,
            lambda: 1.9,
        };
        let a = build_ao(&InertiaSpec::diagonal(2.0, 3.0, 4.0), &g, &Mat3::identity()).unwrap();
        assert_eq!(a[(9, 9)], -0.7 * 1.9);
    }

    #[test]
    fn singular_inertia_rejected() {
        let j = InertiaSpec { j: Mat3::zeros() };
        assert!(build_as(&j, &StateGains { k1: 1.0, k2: 1.0 }, &Mat3::identity()).is_err());
        assert!(j.validate().is_err());
    }

    #[test]
    fn epsilon_scales_inversely_with_period() {
        let a = build_as(
            &unit_inertia(),
            &StateGains { k1: 1.0, k2: 1.0 },
            &Mat3::identity(),
        )
        .unwrap();
        let (e1, p) = epsilon_bound(&a, 10.0).unwrap();
        let (e2, _) = epsilon_bound(&a, 20.0).unwrap();
        assert!((e1 / e2 - 2.0).abs() < 1e-12);
        let resid = &p * &a + a.transpose() * &p + DenseMatrix::identity(6, 6);
        assert!(resid.norm() <= 1e-8);
    }

    #[test]
    fn gains_validation_messages() {
        let err = StateGains { k1: 0.0, k2: 1.0 }.validate().unwrap_err();
        assert!(err.to_string().contains("k1 required and > 0"));
        assert!(OutputGains {
            k1: 1.0,
            k2: 1.0,
            alpha: -1.0,
            lambda: 1.0
        }
        .validate()
        .is_err());
    }
}
