//! CSV output: one header row, one line per record, shortest
//! round-trippable decimal text. Two runs of the same config produce
//! byte-identical files.

use std::io::{BufWriter, Write};
use std::path::Path;

use crate::{Error, Result};

use super::pipeline::TrajectoryRecord;

pub const CSV_HEADER: &str = "t,y,omega_true,omega_hat,theta_hat_1,theta_hat_2,theta_hat_3,\
                              theta_hat_4,theta_hat_5,theta1_hat,theta2_hat,delta,residual_z,q1,q2";

pub fn emit_csv(records: &[TrajectoryRecord], path: &Path) -> Result<()> {
    let io_err = |source| Error::Io { path: path.to_owned(), source };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    write_csv(records, &mut out).map_err(io_err)
}

pub fn write_csv(records: &[TrajectoryRecord], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        // f64 Display is the shortest representation that parses back exactly
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.t,
            r.y,
            r.omega_true,
            r.omega_hat,
            r.theta_hat[0],
            r.theta_hat[1],
            r.theta_hat[2],
            r.theta_hat[3],
            r.theta_hat[4],
            r.theta1_hat,
            r.theta2_hat,
            r.delta,
            r.residual_z,
            r.q1,
            r.q2,
        )?;
    }
    out.flush()
}
