//! Averaging of the sampled field: the held-input integrals `G₁`, `G₂`, the
//! per-sample matrix `L(k,T)`, its average `L_av(T)` and the `T → 0` limit
//! `L_av⁰`.
//!
//! Two estimators of `L_av(T)` are provided:
//!
//! * [`l_average`] is the literal sample mean over `k = s+1 … s+N`.
//! * [`l_average_phase`] averages uniformly over the orbital phase at which a
//!   sampling window starts. This is the limit of the sample mean whenever
//!   `T` is incommensurate with the orbital period, and it is a smooth
//!   function of `T`. The sample mean is not: for `T` close to a rational
//!   multiple of the orbit period (e.g. a quarter orbit), the samples `kT`
//!   visit only a handful of phases over any finite horizon.
//!
//! Design computations use the phase average by default
//! ([`Estimator::PhaseUniform`]).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attmath::{skew, Mat3, Vec3};
use crate::error::{Error, Result};
use crate::geomag::{FieldModel, OrbitSpec};
use crate::matan::{min_eig_sym, DenseMatrix};

/// Orbital periods covered by the default sample-mean horizon.
pub const DEFAULT_HORIZON_ORBITS: f64 = 40.0;
/// Simpson panels used for `L_av⁰`.
pub const ZERO_LIMIT_PANELS: usize = 4096;
/// Relative positive-definiteness tolerance for Assumption 1.
pub const PD_TOL: f64 = 1e-6;
/// Lower bound on Simpson panels per orbital period.
pub const MIN_PANELS_PER_ORBIT: f64 = 512.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    #[default]
    PhaseUniform,
    SampleMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragingConfig {
    /// Simpson panels per sampling interval. Long intervals get more, so
    /// that no panel is wider than `1/MIN_PANELS_PER_ORBIT` of an orbit.
    pub quad_substeps: usize,
    /// Number of samples `N` in the sample mean; `None` covers
    /// [`DEFAULT_HORIZON_ORBITS`] orbits.
    pub avg_samples: Option<usize>,
    /// Index shift `s` of the sample mean.
    pub offset: i64,
    /// Phase nodes for [`Estimator::PhaseUniform`].
    pub phase_nodes: usize,
    pub estimator: Estimator,
}

impl Default for AveragingConfig {
    fn default() -> Self {
        AveragingConfig {
            quad_substeps: 64,
            avg_samples: None,
            offset: 0,
            phase_nodes: 128,
            estimator: Estimator::PhaseUniform,
        }
    }
}

impl AveragingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.quad_substeps < 8 || !self.quad_substeps.is_multiple_of(2) {
            return Err(Error::Validation(format!(
                "quad_substeps = {} must be even and >= 8",
                self.quad_substeps
            )));
        }
        if self.avg_samples == Some(0) {
            return Err(Error::Validation("avg_samples must be >= 1".into()));
        }
        if self.phase_nodes < 8 {
            return Err(Error::Validation("phase_nodes must be >= 8".into()));
        }
        Ok(())
    }

    /// Simpson panels used over one sampling interval of length `t`.
    pub fn panels_for(&self, spec: &OrbitSpec, t: f64) -> usize {
        let by_spacing = (MIN_PANELS_PER_ORBIT * t / spec.period()).ceil() as usize;
        let n = self.quad_substeps.max(by_spacing);
        n + n % 2
    }

    /// Sample count for the sample mean at period `t`.
    pub fn samples_for(&self, spec: &OrbitSpec, t: f64) -> usize {
        self.avg_samples
            .unwrap_or_else(|| (DEFAULT_HORIZON_ORBITS * spec.period() / t).ceil() as usize)
            .max(1)
    }
}

fn check_period(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sampling period must be positive, got {t}"
        )));
    }
    Ok(())
}

/// Composite Simpson weights on `panels` (even) subintervals of unit length.
fn simpson_weight(i: usize, panels: usize) -> f64 {
    if i == 0 || i == panels {
        1.0
    } else if i % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// Vector integrals over `[a, a+T]`:
/// `(∫ ½(a+T−τ) B(τ) dτ, ∫ B(τ) dτ)`.
fn window_integrals(model: &FieldModel, a: f64, t: f64, panels: usize) -> (Vec3, Vec3) {
    let h = t / panels as f64;
    let mut g1 = Vec3::zeros();
    let mut g2 = Vec3::zeros();
    for i in 0..=panels {
        let tau = a + i as f64 * h;
        let w = simpson_weight(i, panels);
        let b = model.field(tau);
        g2 += b * w;
        g1 += b * (w * 0.5 * (a + t - tau));
    }
    let scale = h / 3.0;
    (g1 * scale, g2 * scale)
}

/// `G₁(k,T) = ∫_{kT}^{(k+1)T} ½((k+1)T − τ) B^i(τ)^× dτ`.
pub fn g1(spec: &OrbitSpec, k: i64, t: f64, cfg: &AveragingConfig) -> Result<Mat3> {
    check_period(t)?;
    let (v, _) = window_integrals(
        &spec.field_model(),
        k as f64 * t,
        t,
        cfg.panels_for(spec, t),
    );
    Ok(skew(&v))
}

/// `G₂(k,T) = ∫_{kT}^{(k+1)T} B^i(τ)^× dτ`.
pub fn g2(spec: &OrbitSpec, k: i64, t: f64, cfg: &AveragingConfig) -> Result<Mat3> {
    check_period(t)?;
    let (_, v) = window_integrals(
        &spec.field_model(),
        k as f64 * t,
        t,
        cfg.panels_for(spec, t),
    );
    Ok(skew(&v))
}

/// Both `G₁(k,T)` and `G₂(k,T)` from one quadrature pass.
pub fn g1_g2(spec: &OrbitSpec, k: i64, t: f64, cfg: &AveragingConfig) -> Result<(Mat3, Mat3)> {
    check_period(t)?;
    let (v1, v2) = window_integrals(
        &spec.field_model(),
        k as f64 * t,
        t,
        cfg.panels_for(spec, t),
    );
    Ok((skew(&v1), skew(&v2)))
}

/// `L` for a window starting at absolute time `start`:
/// `(G₂/T) (B^i(start)^×)ᵀ`.
fn l_window(model: &FieldModel, start: f64, t: f64, panels: usize) -> Mat3 {
    let (_, v2) = window_integrals(model, start, t, panels);
    skew(&(v2 / t)) * skew(&model.field(start)).transpose()
}

/// `L(k,T) = H₂(k,T) (B^i(kT)^×)ᵀ` with `H₂ = G₂/T`.
pub fn l_of_k(spec: &OrbitSpec, k: i64, t: f64, cfg: &AveragingConfig) -> Result<Mat3> {
    check_period(t)?;
    Ok(l_window(
        &spec.field_model(),
        k as f64 * t,
        t,
        cfg.panels_for(spec, t),
    ))
}

const CHUNK: usize = 1024;

/// Sample mean `(1/N) Σ_{k=s+1}^{s+N} L(k,T)`.
///
/// Partial sums over fixed chunks of `k` are reduced in index order, so the
/// result does not depend on the thread count.
pub fn l_average(spec: &OrbitSpec, t: f64, cfg: &AveragingConfig) -> Result<Mat3> {
    check_period(t)?;
    cfg.validate()?;
    let model = spec.field_model();
    let n = cfg.samples_for(spec, t);
    let panels = cfg.panels_for(spec, t);
    let first = cfg.offset + 1;
    let chunks: Vec<Mat3> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n);
            (lo..hi).fold(Mat3::zeros(), |acc, i| {
                let k = first + i as i64;
                acc + l_window(&model, k as f64 * t, t, panels)
            })
        })
        .collect();
    let total = chunks.iter().fold(Mat3::zeros(), |acc, m| acc + m);
    Ok(total / n as f64)
}

/// Phase-uniform average `(1/P) ∫₀^P (G₂(τ,T)/T) (B^i(τ)^×)ᵀ dτ`, where
/// `G₂(τ,T)` integrates over `[τ, τ+T]`.
///
/// The integrand is a trigonometric polynomial in the orbital phase, so the
/// equally spaced rectangle rule with `phase_nodes` points is exact up to
/// the inner quadrature error.
pub fn l_average_phase(spec: &OrbitSpec, t: f64, cfg: &AveragingConfig) -> Result<Mat3> {
    check_period(t)?;
    cfg.validate()?;
    let model = spec.field_model();
    let p = spec.period();
    let nodes = cfg.phase_nodes;
    let panels = cfg.panels_for(spec, t);
    let total = (0..nodes).fold(Mat3::zeros(), |acc, j| {
        let start = j as f64 * p / nodes as f64;
        acc + l_window(&model, start, t, panels)
    });
    Ok(total / nodes as f64)
}

/// `L_av(T)` using the estimator selected in `cfg`.
pub fn averaged_l(spec: &OrbitSpec, t: f64, cfg: &AveragingConfig) -> Result<Mat3> {
    match cfg.estimator {
        Estimator::PhaseUniform => l_average_phase(spec, t, cfg),
        Estimator::SampleMean => l_average(spec, t, cfg),
    }
}

/// `L_av⁰ = (n/2π) ∫₀^{2π/n} B^i(t)^× (B^i(t)^×)ᵀ dt`, exactly symmetric.
pub fn l_average_zero(spec: &OrbitSpec) -> Mat3 {
    let model = spec.field_model();
    let p = spec.period();
    let panels = ZERO_LIMIT_PANELS;
    let h = p / panels as f64;
    let mut acc = Mat3::zeros();
    for i in 0..=panels {
        let bx = skew(&model.field(i as f64 * h));
        acc += bx * bx.transpose() * simpson_weight(i, panels);
    }
    let l = acc * (h / 3.0 / p);
    (l + l.transpose()) * 0.5
}

/// Outcome of the positive-definiteness test on `L_av⁰`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assumption1 {
    pub holds: bool,
    pub min_eigenvalue: f64,
    pub trace: f64,
    /// `min_eigenvalue / (trace/3)`; compared against [`PD_TOL`].
    pub margin: f64,
}

pub fn assumption1_holds(spec: &OrbitSpec) -> Assumption1 {
    let l0 = l_average_zero(spec);
    let dense = DenseMatrix::from_column_slice(3, 3, l0.as_slice());
    let min_eigenvalue = min_eig_sym(&dense).unwrap_or(f64::NAN);
    let trace = l0.trace();
    let margin = min_eigenvalue / (trace / 3.0);
    Assumption1 {
        holds: margin > PD_TOL,
        min_eigenvalue,
        trace,
        margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn case_study() -> OrbitSpec {
        OrbitSpec::from_altitude(450e3, 87f64.to_radians(), 0.0, 0.94)
    }

    fn equatorial() -> OrbitSpec {
        OrbitSpec::from_altitude(450e3, 0.0, 0.0, 0.94)
    }

    #[test]
    fn constant_field_closed_forms() {
        let spec = equatorial();
        let cfg = AveragingConfig::default();
        let bx = skew(&Vec3::new(0.0, 0.0, spec.field_scale()));
        let t = 20.0;
        let g1m = g1(&spec, 3, t, &cfg).unwrap();
        let g2m = g2(&spec, 3, t, &cfg).unwrap();
        let tol = 1e-14 * bx.norm();
        assert!((g1m - bx * (t * t / 4.0)).norm() <= tol * t * t);
        assert!((g2m - bx * t).norm() <= tol * t);
        let l = l_of_k(&spec, 3, t, &cfg).unwrap();
        let expected = bx * bx.transpose();
        assert!((l - expected).norm() <= 1e-12 * expected.norm());
        assert!((l * Vec3::z()).norm() <= 1e-25);
    }

    #[test]
    fn rejects_non_positive_period() {
        let cfg = AveragingConfig::default();
        assert!(g1(&case_study(), 0, 0.0, &cfg).is_err());
        assert!(g2(&case_study(), 0, -1.0, &cfg).is_err());
        assert!(l_of_k(&case_study(), 0, 0.0, &cfg).is_err());
    }

    #[test]
    fn g2_antisymmetric() {
        let cfg = AveragingConfig::default();
        let m = g2(&case_study(), 7, 20.0, &cfg).unwrap();
        assert!((m + m.transpose()).norm() <= 1e-14 * m.norm());
    }

    #[test]
    fn equatorial_average_is_singular() {
        let spec = equatorial();
        let s2 = spec.field_scale().powi(2);
        let expected = Mat3::from_diagonal(&Vec3::new(s2, s2, 0.0));
        let l0 = l_average_zero(&spec);
        assert_relative_eq!(l0, expected, epsilon = 1e-12 * s2);
        let cfg = AveragingConfig {
            avg_samples: Some(50),
            ..Default::default()
        };
        for t in [1.0, 20.0, 700.0] {
            assert_relative_eq!(
                l_average(&spec, t, &cfg).unwrap(),
                expected,
                epsilon = 1e-12 * s2
            );
            assert_relative_eq!(
                l_average_phase(&spec, t, &cfg).unwrap(),
                expected,
                epsilon = 1e-12 * s2
            );
        }
        let a1 = assumption1_holds(&spec);
        assert!(!a1.holds);
    }

    #[test]
    fn assumption1_case_study() {
        let a1 = assumption1_holds(&case_study());
        assert!(a1.holds, "{a1:?}");
        assert!(a1.min_eigenvalue > 0.0);
    }

    #[test]
    fn config_validation() {
        let bad = AveragingConfig {
            quad_substeps: 7,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = AveragingConfig {
            quad_substeps: 6,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = AveragingConfig {
            avg_samples: Some(0),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(AveragingConfig::default().validate().is_ok());
    }
}
