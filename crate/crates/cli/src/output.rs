//! CSV writers. Floats are printed with 17 significant digits so that the
//! text round-trips to the same `f64`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use landau_core::diagnostics::DiagnosticsRecord;

use crate::error::{CliError, Result};

pub const DIAGNOSTICS_HEADER: &str = "t,mass,mom_x,mom_y,mom_z,energy,m4,entropy,rel_entropy,fisher,l2_to_maxwellian,min_f,negative_mass,e1,e2";
pub const CONVERGENCE_HEADER: &str = "P,L_over_N,max_e1,max_e2";

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn diagnostics_row(r: &DiagnosticsRecord) -> String {
    let m = &r.moments;
    let mut cols: Vec<String> = [
        r.t,
        m.mass,
        m.momentum[0],
        m.momentum[1],
        m.momentum[2],
        m.energy,
        m.m4,
        r.entropy,
        r.relative_entropy,
        r.fisher,
        r.l2_to_maxwellian,
        r.min_f,
        r.negative_mass,
    ]
    .iter()
    .map(|&x| fmt_float(x))
    .collect();
    match r.errors {
        Some((e1, e2)) => {
            cols.push(fmt_float(e1));
            cols.push(fmt_float(e2));
        }
        None => cols.extend([String::new(), String::new()]),
    }
    cols.join(",")
}

/// Line-oriented CSV file that flushes after every row, so a run that
/// aborts leaves every completed sample on disk.
pub struct CsvFile {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvFile {
    pub fn create(path: &Path, header: &str) -> Result<Self> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut csv = Self {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        };
        csv.line(header)?;
        Ok(csv)
    }

    pub fn line(&mut self, row: &str) -> Result<()> {
        writeln!(self.out, "{row}")
            .and_then(|_| self.out.flush())
            .map_err(|e| CliError::io(&self.path, e))
    }
}
