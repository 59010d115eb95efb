use super::formal::{Direction, FormalCocycle, FormalSolution};
use crate::cover::Cochain1;
use crate::error::{Error, Result};
use crate::pic0::FlatLineBundle;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Content {
    Cocycle,
    Solution,
}

/// First line of a formal cochain file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormalHeader {
    pub cover: String,
    pub bundle: FlatLineBundle,
    pub direction: Direction,
    pub content: Content,
}

#[derive(Serialize, Deserialize)]
struct Row {
    level: i64,
    id: usize,
    re: f64,
    im: f64,
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidInput(e.to_string())
}

fn write_rows<W: Write>(mut w: W, header: &FormalHeader, rows: impl Iterator<Item = Row>) -> Result<()> {
    let line = serde_json::to_string(header).map_err(io_err)?;
    writeln!(w, "{line}").map_err(io_err)?;
    let mut csv = csv::Writer::from_writer(w);
    for r in rows {
        csv.serialize(r).map_err(io_err)?;
    }
    csv.flush().map_err(io_err)?;
    Ok(())
}

/// Writes `header` and one row per (level, edge).
pub fn write_cocycle<W: Write>(w: W, header: &FormalHeader, g: &FormalCocycle) -> Result<()> {
    let rows = g
        .levels()
        .iter()
        .flat_map(|(&level, c)| c.values.iter().enumerate().map(move |(id, z)| Row { level, id, re: z.re, im: z.im }));
    write_rows(w, header, rows)
}

/// Writes `header` and one row per (level, vertex) with plain values.
pub fn write_solution<W: Write>(w: W, header: &FormalHeader, sol: &FormalSolution) -> Result<()> {
    let rows = sol.levels().iter().flat_map(|(&level, s)| {
        s.f.values().into_iter().enumerate().map(move |(id, z)| Row { level, id, re: z.re, im: z.im })
    });
    write_rows(w, header, rows)
}

/// Reads a cocycle file; edge ids must be dense per level.
pub fn read_cocycle<R: BufRead>(mut r: R) -> Result<(FormalHeader, FormalCocycle)> {
    let mut first = String::new();
    r.read_line(&mut first).map_err(io_err)?;
    let header: FormalHeader = serde_json::from_str(first.trim_end()).map_err(io_err)?;
    if header.content != Content::Cocycle {
        return Err(Error::InvalidInput("file does not hold a cocycle".into()));
    }
    let mut levels: BTreeMap<i64, Vec<(usize, Complex64)>> = BTreeMap::new();
    for row in csv::Reader::from_reader(r).deserialize::<Row>() {
        let row = row.map_err(io_err)?;
        levels.entry(row.level).or_default().push((row.id, Complex64::new(row.re, row.im)));
    }
    let mut out = BTreeMap::new();
    for (level, mut entries) in levels {
        entries.sort_by_key(|e| e.0);
        if entries.iter().enumerate().any(|(i, e)| e.0 != i) {
            return Err(Error::IndexMismatch(format!("edge ids at level {level} are not 0..{}", entries.len())));
        }
        out.insert(level, Cochain1::new(entries.into_iter().map(|e| e.1).collect()));
    }
    let g = FormalCocycle::new(header.direction, out)?;
    Ok((header, g))
}
