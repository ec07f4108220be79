use std::io::Write;

use super::{resolvent_measure, transition_measure};
use crate::error::{Error, Result};
use crate::model::BoundaryModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableKind {
    Transition { t: f64 },
    Resolvent { lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelRow {
    pub t_or_lambda: f64,
    pub x: f64,
    pub y: f64,
    pub density: f64,
    pub atom0: f64,
    pub atom1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub descriptor: String,
    pub kind: TableKind,
    pub rows: Vec<KernelRow>,
}

/// Density and boundary atoms of the transition or resolvent measure from
/// `x`, at every `y` in `ys`.
pub fn kernel_table(model: &BoundaryModel, kind: TableKind, x: f64, ys: &[f64]) -> Result<KernelTable> {
    let (param, mu) = match kind {
        TableKind::Transition { t } => (t, transition_measure(model, t, x)?),
        TableKind::Resolvent { lambda } => (lambda, resolvent_measure(model, lambda, x)?),
    };
    let atom0 = mu.atom(0.0);
    let rows =
        ys.iter().map(|&y| KernelRow { t_or_lambda: param, x, y, density: mu.density(y), atom0, atom1: 0.0 }).collect();
    Ok(KernelTable { descriptor: model.descriptor(), kind, rows })
}

pub fn write_kernel_table<W: Write>(table: &KernelTable, mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Format(e.to_string());
    writeln!(out, "# model = {}", table.descriptor).map_err(io)?;
    match table.kind {
        TableKind::Transition { t } => writeln!(out, "# kind = transition, t = {t}"),
        TableKind::Resolvent { lambda } => writeln!(out, "# kind = resolvent, lambda = {lambda}"),
    }
    .map_err(io)?;
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(["t_or_lambda", "x", "y", "density", "atom0", "atom1"]).map_err(csv_err)?;
    for r in &table.rows {
        w.write_record([r.t_or_lambda, r.x, r.y, r.density, r.atom0, r.atom1].map(|v| v.to_string()))
            .map_err(csv_err)?;
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sticky_table_atom() {
        let m = BoundaryModel::sticky(1.0).unwrap();
        let t = kernel_table(&m, TableKind::Transition { t: 1.0 }, 0.0, &[0.0, 0.5, 1.0]).unwrap();
        assert!((t.rows[0].atom0 - 0.336_204_002_446_341).abs() < 1e-13);
        let mut buf = Vec::new();
        write_kernel_table(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# model = sticky(gamma=1)\n"));
        assert_eq!(text.lines().nth(2), Some("t_or_lambda,x,y,density,atom0,atom1"));
        assert_eq!(text.lines().count(), 6);
    }
}
