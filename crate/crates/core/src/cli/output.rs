use std::io::Write;

use crate::error::Result;
use crate::sim::Trajectory;

pub const CSV_HEADER: &str = "t,q1,q2,q3,q4,wx,wy,wz,mx,my,mz,bbx,bby,bbz";

/// 17 significant digits; negative zero is printed as zero.
fn fmt(v: f64) -> String {
    format!("{:.16e}", v + 0.0)
}

/// Writes the trajectory in the fixed 14-column CSV layout.
pub fn write_csv<W: Write>(traj: &Trajectory, w: &mut W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for s in &traj.samples {
        let q = s.q.to_array();
        let row = [
            s.t, q[0], q[1], q[2], q[3], s.omega.x, s.omega.y, s.omega.z, s.m.x, s.m.y, s.m.z,
            s.b_b.x, s.b_b.y, s.b_b.z,
        ];
        let line: Vec<String> = row.iter().map(|v| fmt(*v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}
