use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::args::Format;
use crate::error::CliError;

/// Version of the JSON documents; see docs/json-schema.md.
pub const SCHEMA_VERSION: u32 = 1;

/// Rows shared by the text and CSV renderings.
#[derive(Debug, Default)]
pub struct Table {
    /// Lines printed above the table in text mode only.
    pub notes: Vec<String>,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: Vec<&'static str>) -> Self {
        Self { notes: Vec::new(), headers, rows: Vec::new() }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn write_text(&self, out: &mut dyn Write) -> io::Result<()> {
        for n in &self.notes {
            writeln!(out, "{n}")?;
        }
        if self.headers.is_empty() {
            return Ok(());
        }
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &mut dyn Iterator<Item = &str>| -> String {
            let padded: Vec<String> = cells.zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string()
        };
        writeln!(out, "{}", line(&mut self.headers.iter().copied()))?;
        for row in &self.rows {
            writeln!(out, "{}", line(&mut row.iter().map(String::as_str)))?;
        }
        Ok(())
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A command result in both shapes.
pub struct Rendered<T: Serialize> {
    pub json: T,
    pub table: Table,
}

/// JSON envelope common to all commands.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

pub fn emit<T: Serialize>(
    command: &str,
    rendered: &Rendered<T>,
    format: Format,
    path: Option<&Path>,
) -> Result<(), CliError> {
    let mut out: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|source| CliError::Io { path: p.to_path_buf(), source })?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    let io_err = |source| CliError::Io { path: path.map(Path::to_path_buf).unwrap_or_else(|| "<stdout>".into()), source };
    match format {
        Format::Text => rendered.table.write_text(&mut out).map_err(io_err)?,
        Format::Csv => rendered.table.write_csv(&mut out)?,
        Format::Json => {
            let env = Envelope { schema_version: SCHEMA_VERSION, command, body: &rendered.json };
            serde_json::to_writer_pretty(&mut out, &env)?;
            writeln!(out).map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)
}
