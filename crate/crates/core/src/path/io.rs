use std::io::{Read, Write};

use super::{AugmentedPath, SamplePath, TimeGrid};
use crate::error::{Error, Result};

/// Rows of a path CSV: `t, value, local_time, tau, alive`.
///
/// Floats are written in Rust's shortest round-trip form, so reading the
/// file back reproduces every finite value bit for bit. The lifetime and
/// start, which the columns cannot carry exactly, go in `#` lines above the
/// header.
#[derive(Debug, Clone, PartialEq)]
pub struct PathTable {
    pub t: Vec<f64>,
    pub value: Vec<f64>,
    pub local_time: Vec<f64>,
    pub tau: Vec<f64>,
    pub alive: Vec<bool>,
    pub lifetime: Option<f64>,
    pub start: f64,
}

pub const PATH_HEADER: [&str; 5] = ["t", "value", "local_time", "tau", "alive"];

impl PathTable {
    pub fn from_augmented(aug: &AugmentedPath) -> Self {
        let mut table = Self::from_path(&aug.path);
        table.local_time = aug.local_time.clone();
        if let Some(tau) = &aug.time_change {
            table.tau = tau.clone();
        }
        table
    }

    pub fn from_path(path: &SamplePath) -> Self {
        let n = path.grid.len();
        let t: Vec<f64> = (0..n).map(|i| path.grid.time(i)).collect();
        Self {
            tau: t.clone(),
            alive: (0..n).map(|i| path.alive(i)).collect(),
            t,
            value: path.values.clone(),
            local_time: vec![0.0; n],
            lifetime: path.lifetime,
            start: path.start,
        }
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Format(e.to_string());
        writeln!(out, "# start = {}", self.start).map_err(io)?;
        if let Some(z) = self.lifetime {
            writeln!(out, "# lifetime = {z}").map_err(io)?;
        }
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Format(e.to_string());
        w.write_record(PATH_HEADER).map_err(csv_err)?;
        for i in 0..self.t.len() {
            w.write_record([
                self.t[i].to_string(),
                self.value[i].to_string(),
                self.local_time[i].to_string(),
                self.tau[i].to_string(),
                u8::from(self.alive[i]).to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(io)
    }

    pub fn read<R: Read>(input: R) -> Result<Self> {
        let mut text = String::new();
        let mut input = input;
        input.read_to_string(&mut text).map_err(|e| Error::Format(e.to_string()))?;
        let mut start = None;
        let mut lifetime = None;
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            if let Some((k, v)) = line.trim_start_matches('#').split_once('=') {
                let v: f64 = parse(v.trim())?;
                match k.trim() {
                    "start" => start = Some(v),
                    "lifetime" => lifetime = Some(v),
                    _ => {}
                }
            }
        }
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let header = r.headers().map_err(|e| Error::Format(e.to_string()))?;
        if header.iter().ne(PATH_HEADER) {
            return Err(Error::Format(format!("expected header {}", PATH_HEADER.join(","))));
        }
        let mut table =
            Self { t: vec![], value: vec![], local_time: vec![], tau: vec![], alive: vec![], lifetime, start: 0.0 };
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
            table.t.push(parse(&rec[0])?);
            table.value.push(parse(&rec[1])?);
            table.local_time.push(parse(&rec[2])?);
            table.tau.push(parse(&rec[3])?);
            table.alive.push(match &rec[4] {
                "1" => true,
                "0" => false,
                other => return Err(Error::Format(format!("alive flag {other:?}"))),
            });
        }
        table.start = start.or(table.value.first().copied()).unwrap_or(0.0);
        Ok(table)
    }

    /// Rebuilds the path; the grid is recovered from the last time column.
    pub fn to_augmented(&self) -> Result<AugmentedPath> {
        let n = self.t.len().checked_sub(1).filter(|&n| n > 0).ok_or(Error::Format("fewer than two rows".into()))?;
        let grid = TimeGrid::new(self.t[n], n)?;
        Ok(AugmentedPath {
            path: SamplePath { grid, values: self.value.clone(), lifetime: self.lifetime, start: self.start },
            driving: vec![],
            local_time: self.local_time.clone(),
            time_change: (self.tau != self.t).then(|| self.tau.clone()),
            reflected: None,
        })
    }
}

fn parse(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Format(format!("not a number: {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BoundaryModel;
    use crate::path::build_process;

    #[test]
    fn round_trip_is_bit_exact() {
        let grid = TimeGrid::new(1.0, 500).unwrap();
        for m in [BoundaryModel::sticky(0.7).unwrap(), BoundaryModel::general(4.0, 0.5).unwrap()] {
            for seed in 0..5 {
                let aug = build_process(&m, 0.0, grid, seed).unwrap();
                let table = PathTable::from_augmented(&aug);
                let mut buf = Vec::new();
                table.write(&mut buf).unwrap();
                let back = PathTable::read(buf.as_slice()).unwrap();
                assert_eq!(back, table);
                let again = back.to_augmented().unwrap();
                assert_eq!(again.path, aug.path);
                assert_eq!(again.local_time, aug.local_time);
            }
        }
    }

    #[test]
    fn header_is_mandatory() {
        assert!(PathTable::read("0,1,0,0,1\n".as_bytes()).is_err());
    }
}
