//! Command-line front end: `design`, `simulate` and `lav`.

mod output;
mod scenario;

pub use output::{write_csv, CSV_HEADER};
pub use scenario::{
    parse_scenario, AveragingSection, ControllerSection, DesignKind, DesignSection, InitialSection,
    OrbitSection, Scenario, SimulationSection, SpacecraftSection,
};

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::avg::{assumption1_holds, averaged_l, l_average_zero};
use crate::design::{design_sampling, mat3_rows};
use crate::error::{Error, ErrorCategory, Result};
use crate::matan::{eig_sym, DenseMatrix};
use crate::sim::{metrics, run_closed_loop, Metrics, Trajectory};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const DESIGN: i32 = 3;
    pub const DIVERGENCE: i32 = 4;
}

pub fn exit_code(err: &Error) -> i32 {
    match err.category() {
        ErrorCategory::Validation => exit::VALIDATION,
        ErrorCategory::Design => exit::DESIGN,
        ErrorCategory::Divergence => exit::DIVERGENCE,
        ErrorCategory::Numeric | ErrorCategory::Io => exit::FAILURE,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub kind: DesignKind,
    pub tstar: f64,
    pub period: f64,
    pub eps0: f64,
    /// Configured gain scaling, if any, and whether it respects `ε₀`.
    pub epsilon: Option<f64>,
    pub epsilon_within_bound: Option<bool>,
    pub assumption1_margin: f64,
    pub lav0_eigenvalues: [f64; 3],
    pub lav_at_period: [[f64; 3]; 3],
    /// Eigenvalues of the averaged matrix at `period`, as `[re, im]`.
    pub spectrum: Vec<[f64; 2]>,
}

impl DesignReport {
    pub fn is_finite(&self) -> bool {
        let scalars = [self.tstar, self.period, self.eps0, self.assumption1_margin];
        scalars.iter().all(|v| v.is_finite())
            && self.lav0_eigenvalues.iter().all(|v| v.is_finite())
            && self.lav_at_period.iter().flatten().all(|v| v.is_finite())
            && self.spectrum.iter().flatten().all(|v| v.is_finite())
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let kind = match self.kind {
            DesignKind::State => "state feedback",
            DesignKind::Output => "output feedback",
        };
        s.push_str(&format!("design ({kind})\n"));
        s.push_str(&format!(
            "  Assumption 1 margin : {:.6e}\n",
            self.assumption1_margin
        ));
        s.push_str(&format!(
            "  L_av0 eigenvalues   : [{:.6e}, {:.6e}, {:.6e}]\n",
            self.lav0_eigenvalues[0], self.lav0_eigenvalues[1], self.lav0_eigenvalues[2]
        ));
        s.push_str(&format!("  T*                  : {:.1} s\n", self.tstar));
        s.push_str(&format!("  T                   : {} s\n", self.period));
        s.push_str(&format!("  eps0                : {:.6e}\n", self.eps0));
        if let (Some(e), Some(ok)) = (self.epsilon, self.epsilon_within_bound) {
            let verdict = if ok { "within bound" } else { "EXCEEDS eps0" };
            s.push_str(&format!("  epsilon             : {e:.6e} ({verdict})\n"));
        }
        s.push_str("  spectrum of A(T)    :\n");
        for [re, im] in &self.spectrum {
            s.push_str(&format!("    {re:+.6e} {im:+.6e}i\n"));
        }
        s
    }
}

/// Assumption 1 → `T*` → `ε₀` at the scenario's sampling period.
pub fn cmd_design(scenario: &Scenario, kind: Option<DesignKind>) -> Result<DesignReport> {
    let kind = kind.unwrap_or_else(|| scenario.default_design_kind());
    let orbit = scenario.orbit_spec()?;
    let inertia = scenario.inertia();
    let gains = scenario.feedback_gains(kind)?;
    let period = scenario.period()?;
    let opts = scenario.design_options();

    let a1 = assumption1_holds(&orbit);
    if !a1.holds {
        return Err(Error::Assumption1Violated { margin: a1.margin });
    }
    let design = design_sampling(&orbit, &inertia, &gains, period, &opts)?;
    let l0 = l_average_zero(&orbit);
    let ev = eig_sym(&DenseMatrix::from_column_slice(3, 3, l0.as_slice()))?;
    let lav = averaged_l(&orbit, period, &opts.averaging)?;
    let epsilon = scenario.controller.epsilon;
    Ok(DesignReport {
        kind,
        tstar: design.tstar,
        period,
        eps0: design.eps0,
        epsilon,
        epsilon_within_bound: epsilon.map(|e| e <= design.eps0),
        assumption1_margin: a1.margin,
        lav0_eigenvalues: [ev[0], ev[1], ev[2]],
        lav_at_period: mat3_rows(&lav),
        spectrum: design.spectrum.iter().map(|z| [z.re, z.im]).collect(),
    })
}

/// Runs the configured closed loop and writes the CSV trajectory to `out`.
pub fn cmd_simulate(scenario: &Scenario, out: &Path) -> Result<(Trajectory, Metrics)> {
    let cfg = scenario.sim_config()?;
    let traj = run_closed_loop(&cfg)?;
    let file = File::create(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    let mut w = BufWriter::new(file);
    write_csv(&traj, &mut w)?;
    w.flush()?;
    let m = metrics(&traj, &scenario.settle_tolerance())?;
    Ok((traj, m))
}

pub fn metrics_summary(m: &Metrics) -> String {
    let settle = match m.settle_time {
        Some(t) => format!("{t:.1} s"),
        None => "not settled".to_string(),
    };
    format!(
        "simulation\n  final t      : {:.1} s\n  settle time  : {settle}\n  final |omega|: {:.6e} rad/s\n  final |q_v|  : {:.6e}\n  max |m|      : {:.6e} A m^2\n",
        m.final_t, m.final_omega_norm, m.final_qv_norm, m.max_dipole
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LavReport {
    pub period: f64,
    pub lav: [[f64; 3]; 3],
    pub lav0: [[f64; 3]; 3],
    pub lav0_eigenvalues: [f64; 3],
    pub min_eigenvalue: f64,
    /// `‖L_av(T) − L_av⁰‖ / ‖L_av⁰‖` (Frobenius).
    pub relative_gap: f64,
}

pub fn cmd_lav(scenario: &Scenario, period: Option<f64>) -> Result<LavReport> {
    let orbit = scenario.orbit_spec()?;
    let period = match period {
        Some(t) => t,
        None => scenario.period()?,
    };
    let lav = averaged_l(&orbit, period, &scenario.averaging_config())?;
    let l0 = l_average_zero(&orbit);
    let ev = eig_sym(&DenseMatrix::from_column_slice(3, 3, l0.as_slice()))?;
    Ok(LavReport {
        period,
        lav: mat3_rows(&lav),
        lav0: mat3_rows(&l0),
        lav0_eigenvalues: [ev[0], ev[1], ev[2]],
        min_eigenvalue: ev[0],
        relative_gap: (lav - l0).norm() / l0.norm(),
    })
}

impl LavReport {
    pub fn summary(&self) -> String {
        let fmt = |m: &[[f64; 3]; 3]| {
            m.iter()
                .map(|r| format!("    [{:+.9e} {:+.9e} {:+.9e}]\n", r[0], r[1], r[2]))
                .collect::<String>()
        };
        format!(
            "L_av(T) at T = {} s:\n{}L_av0:\n{}eigenvalues of L_av0: [{:.6e}, {:.6e}, {:.6e}]\nmin eigenvalue of L_av0: {:.6e}\nrelative gap |L_av(T) - L_av0| / |L_av0|: {:.3e}\n",
            self.period,
            fmt(&self.lav),
            fmt(&self.lav0),
            self.lav0_eigenvalues[0],
            self.lav0_eigenvalues[1],
            self.lav0_eigenvalues[2],
            self.min_eigenvalue,
            self.relative_gap
        )
    }
}
