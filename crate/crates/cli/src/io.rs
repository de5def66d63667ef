//! Reading and writing commit-record files.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use botminer_core::ingest::{parse_line, serialize, CommitRecord, ParseError, ParseErrorKind};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// What to do with a line that fails to parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum ErrorPolicy {
    /// Drop the line and count it.
    Skip,
    /// Stop at the first bad line.
    #[default]
    Abort,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReadStats {
    pub lines: usize,
    pub records: usize,
    pub skipped: usize,
    /// The first few skipped-line errors, for reporting.
    pub sample_errors: Vec<ParseError>,
}

const KEPT_ERRORS: usize = 10;

/// Opens `path` for reading; `-` or `None` means standard input.
pub fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>> {
    match path {
        None => Ok(Box::new(BufReader::new(io::stdin()))),
        Some(p) if p.as_os_str() == "-" => Ok(Box::new(BufReader::new(io::stdin()))),
        Some(p) => {
            let file = File::open(p).map_err(|e| Error::io(p, e))?;
            Ok(Box::new(BufReader::new(file)))
        }
    }
}

/// Opens `path` for writing; `-` or `None` means standard output.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
        Some(p) if p.as_os_str() == "-" => Ok(Box::new(BufWriter::new(io::stdout()))),
        Some(p) => {
            let file = File::create(p).map_err(|e| Error::io(p, e))?;
            Ok(Box::new(BufWriter::new(file)))
        }
    }
}

pub fn read_to_string(path: &Path) -> Result<String> {
    let mut text = String::new();
    open_input(Some(path))?
        .read_to_string(&mut text)
        .map_err(|e| Error::io(path, e))?;
    Ok(text)
}

/// Splits input into lines without their `\n`. Lines that are not UTF-8
/// come back as `None`.
fn read_lines(mut reader: impl BufRead, name: &Path) -> Result<Vec<Option<String>>> {
    let mut lines = Vec::new();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        let n = reader.read_until(b'\n', &mut buf).map_err(|e| Error::io(name, e))?;
        if n == 0 {
            break;
        }
        if buf.last() == Some(&b'\n') {
            buf.pop();
        }
        lines.push(String::from_utf8(buf.clone()).ok());
    }
    Ok(lines)
}

/// Parses every line of `reader`. Lines are parsed in parallel; results keep
/// input order.
pub fn read_records(
    reader: impl BufRead,
    name: &Path,
    policy: ErrorPolicy,
) -> Result<(Vec<CommitRecord>, ReadStats)> {
    let lines = read_lines(reader, name)?;
    let parsed: Vec<Result<CommitRecord, ParseError>> = lines
        .par_iter()
        .enumerate()
        .map(|(i, line)| match line {
            Some(text) => parse_line(text, i + 1),
            None => Err(ParseError { line: i + 1, kind: ParseErrorKind::MalformedLine }),
        })
        .collect();

    let mut stats = ReadStats { lines: lines.len(), ..ReadStats::default() };
    let mut records = Vec::with_capacity(parsed.len());
    for result in parsed {
        match result {
            Ok(r) => records.push(r),
            Err(e) => match policy {
                ErrorPolicy::Abort => return Err(e.into()),
                ErrorPolicy::Skip => {
                    stats.skipped += 1;
                    if stats.sample_errors.len() < KEPT_ERRORS {
                        stats.sample_errors.push(e);
                    }
                }
            },
        }
    }
    stats.records = records.len();
    Ok((records, stats))
}

/// Reads a record file (`-` for standard input).
pub fn load_records(path: &Path, policy: ErrorPolicy) -> Result<(Vec<CommitRecord>, ReadStats)> {
    read_records(open_input(Some(path))?, path, policy)
}

/// Writes records one per line, each terminated by `\n`.
pub fn write_records<'a>(
    mut out: impl Write,
    records: impl IntoIterator<Item = &'a CommitRecord>,
) -> io::Result<()> {
    for r in records {
        out.write_all(serialize(r).as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
