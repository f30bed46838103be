//! Trajectory records as CSV.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so
//! rereading a file reproduces every `f64` bit for bit.

use std::io::{Read, Write};

use super::ParseError;
use crate::error::Result;
use crate::evolve::Trajectory;

pub const CSV_HEADER: &str = "t,sup_norm,l2_norm,mass,cap_hit";

/// One CSV row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRecord {
    pub t: f64,
    pub sup_norm: f64,
    pub l2_norm: f64,
    pub mass: f64,
    pub cap_hit: bool,
}

impl CsvRecord {
    /// Rows of a trajectory; `cap_hit` is set from the cap time on.
    pub fn of_trajectory(tr: &Trajectory) -> Vec<CsvRecord> {
        (0..tr.len())
            .map(|k| CsvRecord {
                t: tr.times[k],
                sup_norm: tr.sup_norms[k],
                l2_norm: tr.l2_norms[k],
                mass: tr.masses[k],
                cap_hit: tr.cap_hit.is_some_and(|tc| tr.times[k] >= tc),
            })
            .collect()
    }
}

pub fn emit_trajectory_csv<W: Write>(tr: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let to_io = |e: csv::Error| -> crate::error::Error {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => io.into(),
            other => ParseError::new(format!("{other:?}")).into(),
        }
    };
    w.write_record(CSV_HEADER.split(',')).map_err(to_io)?;
    for r in CsvRecord::of_trajectory(tr) {
        w.write_record([
            r.t.to_string(),
            r.sup_norm.to_string(),
            r.l2_norm.to_string(),
            r.mass.to_string(),
            if r.cap_hit { "1".into() } else { String::new() },
        ])
        .map_err(to_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Vec<CsvRecord>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input);
    let mut rows = rd.records();
    let header = rows
        .next()
        .ok_or_else(|| ParseError::new("empty CSV: missing header"))?
        .map_err(|e| ParseError::new(e.to_string()))?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(ParseError::at(1, format!("header must be '{CSV_HEADER}'")).into());
    }
    let mut out = Vec::new();
    for (i, row) in rows.enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| ParseError::at(line, e.to_string()))?;
        if row.len() != 5 {
            return Err(ParseError::at(line, format!("expected 5 fields, found {}", row.len())).into());
        }
        let num = |k: usize| -> std::result::Result<f64, ParseError> {
            row[k]
                .parse::<f64>()
                .map_err(|_| ParseError::at(line, format!("bad number '{}'", &row[k])))
        };
        let cap_hit = match &row[4] {
            "" => false,
            "1" => true,
            other => return Err(ParseError::at(line, format!("cap_hit must be empty or 1, found '{other}'")).into()),
        };
        out.push(CsvRecord {
            t: num(0)?,
            sup_norm: num(1)?,
            l2_norm: num(2)?,
            mass: num(3)?,
            cap_hit,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Field, Grid};
    use crate::geometry::DomainSpec;

    fn trajectory(times: &[f64], cap_hit: Option<f64>) -> Trajectory {
        let grid = Grid::new(DomainSpec::unit_square(), 4).unwrap();
        let k = times.len();
        Trajectory {
            times: times.to_vec(),
            sup_norms: (0..k).map(|i| 1.0 / 3.0 + i as f64).collect(),
            l2_norms: (0..k).map(|i| 0.1 * i as f64 + 1e-17).collect(),
            masses: (0..k).map(|i| std::f64::consts::PI * i as f64).collect(),
            snapshots: Vec::new(),
            cap_hit,
            growth_cap: 1e6,
            final_u: Field::zeros(&grid),
        }
    }

    fn emit(tr: &Trajectory) -> String {
        let mut buf = Vec::new();
        emit_trajectory_csv(tr, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn single_record_gives_two_lines() {
        let text = emit(&trajectory(&[0.0], None));
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().next(), Some(CSV_HEADER));
    }

    #[test]
    fn reread_matches_to_full_precision() {
        let tr = trajectory(&[0.0, 0.1, 0.30000000000000004, 1.0 / 7.0 + 1.0], None);
        let rows = read_trajectory_csv(emit(&tr).as_bytes()).unwrap();
        assert_eq!(rows, CsvRecord::of_trajectory(&tr));
        for (r, k) in rows.iter().zip(0..) {
            assert_eq!(r.t.to_bits(), tr.times[k].to_bits());
            assert_eq!(r.sup_norm.to_bits(), tr.sup_norms[k].to_bits());
        }
    }

    #[test]
    fn cap_hit_column_switches_at_cap_time() {
        let tr = trajectory(&[0.0, 0.5, 1.0, 1.5], Some(1.0));
        let text = emit(&tr);
        let flags: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
        assert_eq!(flags, ["", "", "1", "1"]);
    }

    #[test]
    fn output_is_deterministic() {
        let tr = trajectory(&[0.0, 0.25, 0.5], Some(0.5));
        assert_eq!(emit(&tr), emit(&tr));
    }

    #[test]
    fn malformed_rows_name_their_line() {
        let text = format!("{CSV_HEADER}\n0,1,1,1,\n0.1,x,1,1,\n");
        match read_trajectory_csv(text.as_bytes()).unwrap_err() {
            crate::error::Error::Parse(p) => assert_eq!(p.line, Some(3)),
            other => panic!("unexpected {other}"),
        }
        assert!(read_trajectory_csv("a,b\n".as_bytes()).is_err());
    }
}
