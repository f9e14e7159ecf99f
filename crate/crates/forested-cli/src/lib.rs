//! Command-line front end for `forested-core`.
//!
//! Every command produces an [`Artifact`]: a JSON document with a versioned
//! header, or a CSV/text table. Exit statuses: 0 success, 1 a check that was
//! run came out false, 2 bad flags, 3 refusal (scale guard or an unavailable
//! quantity), 4 numeric non-convergence.

pub mod args;
pub mod commands;

use std::io::Write;

use forested_core::error::Error;
use serde_json::{json, Value};

pub use args::{Cli, Command, Format};

/// Bumped whenever the JSON layout changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum Failure {
    BadFlags(String),
    Core(Error),
    Io(std::io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::BadFlags(_) => 2,
            Failure::Core(e) => match e {
                Error::ScaleGuard { .. } | Error::Refused(_) => 3,
                Error::NonConvergence(_) => 4,
                Error::Parse(_) | Error::Invalid(_) | Error::Domain(_) | Error::InsufficientOrder { .. } => 2,
                _ => 1,
            },
            Failure::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::BadFlags(m) => write!(f, "invalid arguments: {m}"),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

pub fn bad(msg: impl Into<String>) -> Failure {
    Failure::BadFlags(msg.into())
}

/// Result of one command.
#[derive(Clone, Debug)]
pub struct Artifact {
    pub quantity: &'static str,
    pub config: Value,
    pub data: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// False when a comparison or check performed by the command failed.
    pub ok: bool,
}

impl Artifact {
    pub fn json(&self) -> Value {
        json!({
            "version": env!("CARGO_PKG_VERSION"),
            "schema_version": SCHEMA_VERSION,
            "quantity": self.quantity,
            "config": self.config,
            "data": self.data,
        })
    }

    pub fn render(&self, format: Format) -> Result<String, Failure> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&self.json()).expect("json values serialize") + "\n"),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).map_err(csv_err)?;
                for r in &self.rows {
                    w.write_record(r).map_err(csv_err)?;
                }
                let bytes = w.into_inner().map_err(|e| Failure::Io(std::io::Error::other(e.to_string())))?;
                Ok(String::from_utf8_lossy(&bytes).into_owned())
            }
            Format::Text => Ok(text_table(&self.header, &self.rows)),
        }
    }
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::Io(std::io::Error::other(e.to_string()))
}

fn text_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            if i < width.len() {
                width[i] = width[i].max(c.chars().count());
            }
        }
    }
    let line = |cells: &[String]| {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            let last = i + 1 == cells.len();
            s.push_str(c);
            if !last {
                let pad = width.get(i).copied().unwrap_or(0).saturating_sub(c.chars().count());
                s.push_str(&" ".repeat(pad + 2));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header);
    out.push_str(&line(&width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
    for r in rows {
        out.push_str(&line(r));
    }
    out
}

/// Run a parsed command and write its artifact; returns the exit status.
pub fn run(cli: &Cli) -> i32 {
    match commands::dispatch(cli) {
        Ok(a) => {
            let format = cli.format.unwrap_or(match cli.command {
                Command::Repro(_) => Format::Text,
                _ => Format::Json,
            });
            let written = a.render(format).and_then(|text| match &cli.output {
                Some(path) => std::fs::write(path, text).map_err(Failure::from),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(Failure::from),
            });
            match written {
                Err(e) => {
                    eprintln!("forested: {e}");
                    e.exit_code()
                }
                Ok(()) if a.ok => 0,
                Ok(()) => 1,
            }
        }
        Err(e) => {
            eprintln!("forested: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(bad("x").exit_code(), 2);
        assert_eq!(Failure::Core(Error::ScaleGuard { estimate: 2, limit: 1 }).exit_code(), 3);
        assert_eq!(Failure::Core(Error::Refused("x".into())).exit_code(), 3);
        assert_eq!(Failure::Core(Error::NonConvergence("x".into())).exit_code(), 4);
    }

    #[test]
    fn text_table_aligns() {
        let t = text_table(&["a".into(), "bb".into()], &[vec!["ccc".into(), "d".into()]]);
        assert_eq!(t, "a    bb\n---  --\nccc  d\n");
    }
}
