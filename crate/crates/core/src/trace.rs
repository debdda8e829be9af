//! Per-iteration, per-agent trace rows and their CSV form.
//!
//! Header: `iter,agent_id,x,y,uv,fitness,lmate_id` (planar) or
//! `iter,agent_id,x,y,z,uv,fitness,lmate_id` (sphere). Floats are written in
//! scientific notation with 17 significant digits so reading a file back
//! reproduces every value bit for bit.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point;

/// State of one agent at iteration `iter`: its position before moving and
/// the fitness, UV and l-mate computed there.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub agent_id: usize,
    pub position: Point,
    pub uv: f64,
    pub fitness: f64,
    pub lmate_id: usize,
}

const PLANAR: [&str; 7] = ["iter", "agent_id", "x", "y", "uv", "fitness", "lmate_id"];
const SPATIAL: [&str; 8] = [
    "iter", "agent_id", "x", "y", "z", "uv", "fitness", "lmate_id",
];

pub fn header(dim: usize) -> &'static [&'static str] {
    if dim == 3 {
        &SPATIAL
    } else {
        &PLANAR
    }
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line() as usize);
    Error::TraceSchema {
        row,
        column: 0,
        message: e.to_string(),
    }
}

/// Writes `records` as CSV. `dim` (2 or 3) selects the header.
pub fn write_trace<W: Write>(out: W, records: &[TraceRecord], dim: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(dim)).map_err(csv_err)?;
    for r in records {
        let mut row = vec![r.iter.to_string(), r.agent_id.to_string()];
        row.extend(r.position.0[..dim.clamp(2, 3)].iter().map(|&c| float(c)));
        row.extend([float(r.uv), float(r.fitness), r.lmate_id.to_string()]);
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::TraceSchema {
        row: 0,
        column: 0,
        message: e.to_string(),
    })
}

pub fn write_trace_file(path: impl AsRef<Path>, records: &[TraceRecord], dim: usize) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = BufWriter::new(file);
    write_trace(&mut buf, records, dim)?;
    buf.flush().map_err(|e| Error::io(path, e))
}

/// Reads a trace written by [`write_trace`], returning the records and the
/// dimension implied by the header. Rows are numbered from 1 at the header
/// and columns from 1.
pub fn read_trace<R: Read>(input: R) -> Result<(Vec<TraceRecord>, usize)> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let found: Vec<String> = rd
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_owned)
        .collect();
    let dim = if found.len() == SPATIAL.len() { 3 } else { 2 };
    let expected = header(dim);
    if let Some(col) = (0..expected.len().max(found.len()))
        .find(|&k| found.get(k).map(String::as_str) != expected.get(k).copied())
    {
        return Err(Error::TraceSchema {
            row: 1,
            column: col + 1,
            message: format!(
                "expected header {:?}, found {:?}",
                expected.join(","),
                found.join(",")
            ),
        });
    }

    let mut records = Vec::new();
    for (k, row) in rd.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let line = k + 2;
        let field = |col: usize| -> &str { row.get(col).unwrap_or("") };
        let bad = |col: usize, what: &str| Error::TraceSchema {
            row: line,
            column: col + 1,
            message: format!("{what}: {:?}", field(col)),
        };
        let int = |col: usize| {
            field(col)
                .parse::<usize>()
                .map_err(|_| bad(col, "expected an integer"))
        };
        let real = |col: usize| {
            field(col)
                .parse::<f64>()
                .map_err(|_| bad(col, "expected a number"))
        };

        let mut c = [0.0; 3];
        for (axis, v) in c.iter_mut().take(dim).enumerate() {
            *v = real(2 + axis)?;
        }
        let rec = TraceRecord {
            iter: int(0)?,
            agent_id: int(1)?,
            position: Point(c),
            uv: real(2 + dim)?,
            fitness: real(3 + dim)?,
            lmate_id: int(4 + dim)?,
        };
        if records
            .last()
            .is_some_and(|p: &TraceRecord| rec.iter < p.iter)
        {
            return Err(bad(0, "iteration index decreases"));
        }
        records.push(rec);
    }
    Ok((records, dim))
}

pub fn read_trace_file(path: impl AsRef<Path>) -> Result<(Vec<TraceRecord>, usize)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_trace(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_trace_is_header_only() {
        let mut buf = Vec::new();
        write_trace(&mut buf, &[], 2).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "iter,agent_id,x,y,uv,fitness,lmate_id\n"
        );
        assert_eq!(read_trace(&buf[..]).unwrap(), (vec![], 2));
    }

    #[test]
    fn floats_have_seventeen_significant_digits() {
        let rec = TraceRecord {
            iter: 0,
            agent_id: 1,
            position: Point::xy(0.1, -2.5),
            uv: 1.0 / 3.0,
            fitness: 0.0,
            lmate_id: 1,
        };
        let mut buf = Vec::new();
        write_trace(&mut buf, &[rec], 2).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row = text.lines().nth(1).unwrap();
        assert_eq!(
            row,
            "0,1,1.0000000000000001e-1,-2.5000000000000000e0,3.3333333333333331e-1,0.0000000000000000e0,1"
        );
    }

    #[test]
    fn shuffled_columns_are_rejected() {
        let text = "iter,agent_id,y,x,uv,fitness,lmate_id\n0,0,1,2,3,4,0\n";
        match read_trace(text.as_bytes()).unwrap_err() {
            Error::TraceSchema { row, column, .. } => assert_eq!((row, column), (1, 3)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn bad_cells_report_row_and_column() {
        let text = "iter,agent_id,x,y,uv,fitness,lmate_id\n0,0,1,2,3,4,0\n1,0,1,oops,3,4,0\n";
        match read_trace(text.as_bytes()).unwrap_err() {
            Error::TraceSchema { row, column, .. } => assert_eq!((row, column), (3, 4)),
            other => panic!("unexpected {other}"),
        }
        let text = "iter,agent_id,x,y,uv,fitness,lmate_id\n2,0,1,2,3,4,0\n1,0,1,2,3,4,0\n";
        assert!(read_trace(text.as_bytes()).is_err());
        let text = "iter,agent_id,x,y,uv,fitness,lmate_id\n0,0,1,2,3,4\n";
        assert!(read_trace(text.as_bytes()).is_err());
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![
            any::<f64>().prop_filter("finite", |v| v.is_finite()),
            -1e3..1e3f64
        ]
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(
            rows in prop::collection::vec((0usize..50, 0usize..20, finite(), finite(), finite(), finite(), finite(), 0usize..20), 0..40),
            spatial in any::<bool>(),
        ) {
            let dim = if spatial { 3 } else { 2 };
            let mut records: Vec<TraceRecord> = rows
                .into_iter()
                .map(|(iter, agent_id, x, y, z, uv, fitness, lmate_id)| TraceRecord {
                    iter,
                    agent_id,
                    position: Point([x, y, if spatial { z } else { 0.0 }]),
                    uv,
                    fitness,
                    lmate_id,
                })
                .collect();
            records.sort_by_key(|r| r.iter);
            let mut buf = Vec::new();
            write_trace(&mut buf, &records, dim).unwrap();
            let (back, back_dim) = read_trace(&buf[..]).unwrap();
            prop_assert_eq!(back_dim, dim);
            prop_assert_eq!(back.len(), records.len());
            for (a, b) in back.iter().zip(&records) {
                prop_assert_eq!(a.iter, b.iter);
                prop_assert_eq!(a.lmate_id, b.lmate_id);
                for (u, v) in a.position.0.iter().zip(b.position.0.iter()) {
                    prop_assert_eq!(u.to_bits(), v.to_bits());
                }
                prop_assert_eq!(a.uv.to_bits(), b.uv.to_bits());
                prop_assert_eq!(a.fitness.to_bits(), b.fitness.to_bits());
            }
        }
    }
}
