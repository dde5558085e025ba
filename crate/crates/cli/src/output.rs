use std::io::Write;
use std::path::Path;

use crate::Failure;

/// Shortest decimal that parses back to the same `f64`, in exponent form
/// for very small or large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// CSV document with `#` metadata lines ahead of the header.
pub struct Table {
    metadata: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(metadata: Vec<String>, header: &[&str]) -> Self {
        Self {
            metadata,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> Result<Vec<u8>, Failure> {
        let mut out = Vec::new();
        for m in &self.metadata {
            writeln!(out, "# {m}").expect("writing to memory");
        }
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Failure::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.into_inner().map_err(|e| Failure::Io(e.to_string()))
    }
}

pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::write(p, bytes)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Io(format!("cannot write to standard output: {e}")))
        }
    }
}
