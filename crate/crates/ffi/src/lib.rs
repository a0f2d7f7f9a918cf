//! C ABI over the `magzoh` toolkit.
//!
//! Scenarios, design reports and trajectories are exposed as opaque handles
//! that the caller releases with the matching `*_free` function. Every
//! fallible call returns an [`MzStatus`]; on failure the message is available
//! from [`mz_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use magzoh::avg::assumption1_holds;
use magzoh::cli::{cmd_design, parse_scenario, write_csv, DesignKind, DesignReport, Scenario};
use magzoh::geomag::{field_inertial, OrbitSpec};
use magzoh::sim::{run_closed_loop, Trajectory};
use magzoh::{Error, ErrorCategory};

/// Status codes. Values 2–4 coincide with the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MzStatus {
    Ok = 0,
    Failure = 1,
    Validation = 2,
    Design = 3,
    Diverged = 4,
    NullArgument = 5,
    InvalidUtf8 = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MzDesignKind {
    /// Follow the scenario's control law.
    Default = 0,
    State = 1,
    Output = 2,
}

/// Circular orbit parameters (SI units, radians).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MzOrbit {
    pub radius_m: f64,
    pub incl_rad: f64,
    pub raan_rad: f64,
    pub phi0_rad: f64,
    pub mu_earth: f64,
    pub mu_m: f64,
}

/// One trajectory row; same fields and order as the CSV output.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MzSample {
    pub t: f64,
    pub q: [f64; 4],
    pub omega: [f64; 3],
    pub m: [f64; 3],
    pub b_b: [f64; 3],
}

pub struct MzScenario {
    inner: Scenario,
}

pub struct MzDesignReport {
    inner: DesignReport,
}

pub struct MzTrajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> MzStatus {
    match err.category() {
        ErrorCategory::Validation => MzStatus::Validation,
        ErrorCategory::Design => MzStatus::Design,
        ErrorCategory::Divergence => MzStatus::Diverged,
        ErrorCategory::Numeric | ErrorCategory::Io => MzStatus::Failure,
    }
}

/// Runs `f`, converting errors and panics into a status plus last-error message.
fn guard(f: impl FnOnce() -> Result<(), (MzStatus, String)>) -> MzStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MzStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            MzStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (MzStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (MzStatus, String) {
    (MzStatus::NullArgument, format!("{name} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, (MzStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (MzStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next `mz_*` call on the same thread.
#[no_mangle]
pub extern "C" fn mz_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Loads and validates a scenario file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mz_scenario_load(
    path: *const c_char,
    out: *mut *mut MzScenario,
) -> MzStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = str_arg(path, "path")?;
        let inner = parse_scenario(Path::new(path)).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(MzScenario { inner }));
        Ok(())
    })
}

/// Parses and validates a scenario from TOML text.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mz_scenario_parse(
    text: *const c_char,
    out: *mut *mut MzScenario,
) -> MzStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = str_arg(text, "text")?;
        let inner = Scenario::from_toml_str(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(MzScenario { inner }));
        Ok(())
    })
}

/// # Safety
/// `scenario` must come from `mz_scenario_load`/`mz_scenario_parse` and not
/// have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn mz_scenario_free(scenario: *mut MzScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs the sampling design (Assumption 1, `T*`, `ε₀`) for a scenario.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mz_design_run(
    scenario: *const MzScenario,
    kind: MzDesignKind,
    out: *mut *mut MzDesignReport,
) -> MzStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let scenario = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let kind = match kind {
            MzDesignKind::Default => None,
            MzDesignKind::State => Some(DesignKind::State),
            MzDesignKind::Output => Some(DesignKind::Output),
        };
        let inner = cmd_design(&scenario.inner, kind).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(MzDesignReport { inner }));
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle or NULL (NaN is returned for NULL).
#[no_mangle]
pub unsafe extern "C" fn mz_design_tstar(report: *const MzDesignReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.tstar)
}

/// # Safety
/// `report` must be a live handle or NULL (NaN is returned for NULL).
#[no_mangle]
pub unsafe extern "C" fn mz_design_eps0(report: *const MzDesignReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.eps0)
}

/// # Safety
/// `report` must be a live handle or NULL (NaN is returned for NULL).
#[no_mangle]
pub unsafe extern "C" fn mz_design_period(report: *const MzDesignReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.period)
}

/// # Safety
/// `report` must be a live handle or NULL (NaN is returned for NULL).
#[no_mangle]
pub unsafe extern "C" fn mz_design_assumption1_margin(report: *const MzDesignReport) -> f64 {
    report
        .as_ref()
        .map_or(f64::NAN, |r| r.inner.assumption1_margin)
}

/// # Safety
/// `report` must be a live handle or NULL (0 is returned for NULL).
#[no_mangle]
pub unsafe extern "C" fn mz_design_spectrum_len(report: *const MzDesignReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.spectrum.len())
}

/// Eigenvalue `index` of the averaged matrix at the design period.
///
/// # Safety
/// `report` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mz_design_spectrum_get(
    report: *const MzDesignReport,
    index: usize,
    re: *mut f64,
    im: *mut f64,
) -> MzStatus {
    guard(|| {
        let report = report.as_ref().ok_or_else(|| null("report"))?;
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        let [r, i] = *report
            .inner
            .spectrum
            .get(index)
            .ok_or_else(|| (MzStatus::OutOfRange, format!("index {index} out of range")))?;
        *re = r;
        *im = i;
        Ok(())
    })
}

/// # Safety
/// `report` must come from `mz_design_run` and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn mz_design_free(report: *mut MzDesignReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Simulates the scenario's closed loop.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mz_simulate(
    scenario: *const MzScenario,
    out: *mut *mut MzTrajectory,
) -> MzStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let scenario = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let cfg = scenario.inner.sim_config().map_err(lib_err)?;
        let inner = run_closed_loop(&cfg).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(MzTrajectory { inner }));
        Ok(())
    })
}

/// # Safety
/// `traj` must be a live handle or NULL (0 is returned for NULL).
#[no_mangle]
pub unsafe extern "C" fn mz_trajectory_len(traj: *const MzTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.inner.samples.len())
}

/// # Safety
/// `traj` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mz_trajectory_sample(
    traj: *const MzTrajectory,
    index: usize,
    out: *mut MzSample,
) -> MzStatus {
    guard(|| {
        let traj = traj.as_ref().ok_or_else(|| null("traj"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = traj
            .inner
            .samples
            .get(index)
            .ok_or_else(|| (MzStatus::OutOfRange, format!("index {index} out of range")))?;
        *out = MzSample {
            t: s.t,
            q: s.q.to_array(),
            omega: s.omega.into(),
            m: s.m.into(),
            b_b: s.b_b.into(),
        };
        Ok(())
    })
}

/// Writes the trajectory as CSV (same layout as `magzoh simulate`).
///
/// # Safety
/// `traj` must be a live handle; `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mz_trajectory_write_csv(
    traj: *const MzTrajectory,
    path: *const c_char,
) -> MzStatus {
    guard(|| {
        let traj = traj.as_ref().ok_or_else(|| null("traj"))?;
        let path = str_arg(path, "path")?;
        let mut file = std::io::BufWriter::new(
            std::fs::File::create(path).map_err(|e| (MzStatus::Failure, format!("{path}: {e}")))?,
        );
        write_csv(&traj.inner, &mut file).map_err(lib_err)?;
        std::io::Write::flush(&mut file).map_err(|e| (MzStatus::Failure, e.to_string()))?;
        Ok(())
    })
}

/// # Safety
/// `traj` must come from `mz_simulate` and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn mz_trajectory_free(traj: *mut MzTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Orbit with default Earth constants for the given altitude and angles.
#[no_mangle]
pub extern "C" fn mz_orbit_from_altitude(
    altitude_m: f64,
    incl_rad: f64,
    raan_rad: f64,
    phi0_rad: f64,
) -> MzOrbit {
    let s = OrbitSpec::from_altitude(altitude_m, incl_rad, raan_rad, phi0_rad);
    MzOrbit {
        radius_m: s.radius_m,
        incl_rad: s.incl_rad,
        raan_rad: s.raan_rad,
        phi0_rad: s.phi0_rad,
        mu_earth: s.mu_earth,
        mu_m: s.mu_m,
    }
}

fn orbit_spec(o: &MzOrbit) -> Result<OrbitSpec, (MzStatus, String)> {
    let mut s = OrbitSpec::circular(o.radius_m, o.incl_rad, o.raan_rad, o.phi0_rad);
    s.mu_earth = o.mu_earth;
    s.mu_m = o.mu_m;
    s.validate().map_err(lib_err)?;
    Ok(s)
}

/// Inertial dipole field at time `t`, tesla, written to `out[0..3]`.
///
/// # Safety
/// `orbit` must point to a valid `MzOrbit`; `out` to three writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mz_field_inertial(
    orbit: *const MzOrbit,
    t: f64,
    out: *mut f64,
) -> MzStatus {
    guard(|| {
        let orbit = orbit.as_ref().ok_or_else(|| null("orbit"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let b = field_inertial(&orbit_spec(orbit)?, t);
        std::slice::from_raw_parts_mut(out, 3).copy_from_slice(b.as_slice());
        Ok(())
    })
}

/// Positive-definiteness test of the averaged field matrix for an orbit.
///
/// # Safety
/// `orbit` must point to a valid `MzOrbit`; `holds` and `margin` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mz_assumption1(
    orbit: *const MzOrbit,
    holds: *mut bool,
    margin: *mut f64,
) -> MzStatus {
    guard(|| {
        let orbit = orbit.as_ref().ok_or_else(|| null("orbit"))?;
        if holds.is_null() || margin.is_null() {
            return Err(null("holds/margin"));
        }
        let a1 = assumption1_holds(&orbit_spec(orbit)?);
        *holds = a1.holds;
        *margin = a1.margin;
        Ok(())
    })
}
