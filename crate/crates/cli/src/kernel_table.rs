//! Tabulation of the subordination kernel `K(t, τ)`.

use std::io::Write;
use std::path::Path;

use subdiff_core::transform_kernels::kernel_row;
use subdiff_core::{ContourSpec, MultiTermSpec};

use crate::error::{CliError, CliResult};
use crate::output::{format_f64, writer};

/// Kernel values on a rectangular grid, one row per `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub t: Vec<f64>,
    pub tau: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl KernelTable {
    pub fn compute(spec: &MultiTermSpec, contour: &ContourSpec, t: &[f64], tau: &[f64]) -> CliResult<Self> {
        let values = t
            .iter()
            .map(|&ti| kernel_row(spec, contour, ti, tau))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            t: t.to_vec(),
            tau: tau.to_vec(),
            values,
        })
    }

    pub fn min(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `n` equispaced nodes `k·end/n`, `k = 1..=n`.
pub fn open_grid(end: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| if k == n { end } else { k as f64 * end / n as f64 }).collect()
}

/// Writes the table as CSV. The header row is `t` followed by the `τ` nodes;
/// each data row is a `t` node followed by `K(t, τ_j)`; the last line is the
/// comment `# min,<value>`.
pub fn emit_kernel_table(
    spec: &MultiTermSpec,
    contour: &ContourSpec,
    t: &[f64],
    tau: &[f64],
    path: &Path,
) -> CliResult<KernelTable> {
    let table = KernelTable::compute(spec, contour, t, tau)?;
    let mut w = writer(path)?;
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let header = std::iter::once("t".to_owned()).chain(tau.iter().map(|v| format_f64(*v)));
    w.write_record(header).map_err(csv_err)?;
    for (ti, row) in table.t.iter().zip(&table.values) {
        let rec = std::iter::once(*ti).chain(row.iter().copied()).map(format_f64);
        w.write_record(rec).map_err(csv_err)?;
    }
    let mut file = w
        .into_inner()
        .map_err(|e| CliError::io(path, std::io::Error::other(e.to_string())))?;
    writeln!(file, "# min,{}", format_f64(table.min())).map_err(|e| CliError::io(path, e))?;
    Ok(table)
}
