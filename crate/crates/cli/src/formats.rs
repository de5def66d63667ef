//! CSV layouts shared by the subcommands.
//!
//! | file     | header                                                    |
//! |----------|-----------------------------------------------------------|
//! | features | `author_id` + the six predictor names                     |
//! | labels   | `author_id,label` with label `bot`/`human` (or `1`/`0`)   |
//! | scores   | `author_id,bin,bim,bica,ensemble,verdict[,posterior]`     |
//!
//! Reals are written with six significant digits.

use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use botminer_core::detector::DetectionScores;
use botminer_core::features::{FeatureVector, FEATURE_NAMES};
use botminer_core::forest::{Dataset, Label};

use crate::error::{Error, Result};
use crate::io::open_input;
use crate::numfmt::real;

pub const SCORES_HEADER: [&str; 6] = ["author_id", "bin", "bim", "bica", "ensemble", "verdict"];

fn reader(path: &Path) -> Result<csv::Reader<Box<dyn Read>>> {
    let input: Box<dyn Read> = Box::new(open_input(Some(path))?);
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(input))
}

fn check_header(rdr: &mut csv::Reader<Box<dyn Read>>, path: &Path, expected: &[&str]) -> Result<()> {
    let header = rdr.headers()?.clone();
    let matches = header.len() >= expected.len()
        && expected.iter().zip(header.iter()).all(|(e, h)| e == &h.trim());
    if !matches {
        return Err(Error::format(
            path.display().to_string(),
            1,
            format!("expected header starting with {}", expected.join(",")),
        ));
    }
    Ok(())
}

fn line_of(record: &csv::StringRecord) -> usize {
    record.position().map_or(0, |p| p.line() as usize)
}

fn parse_real(path: &Path, record: &csv::StringRecord, col: usize) -> Result<f64> {
    let text = record.get(col).unwrap_or("").trim();
    text.parse::<f64>().map_err(|_| {
        Error::format(path.display().to_string(), line_of(record), format!("column {}: {text:?} is not a number", col + 1))
    })
}

pub fn write_features(out: impl Write, rows: &[(String, FeatureVector)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["author_id"];
    header.extend(FEATURE_NAMES);
    w.write_record(&header)?;
    for (author, f) in rows {
        let mut record = vec![author.clone()];
        record.extend(f.to_array().iter().map(|v| real(*v)));
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(())
}

pub fn read_features(path: &Path) -> Result<Vec<(String, Vec<f64>)>> {
    let mut rdr = reader(path)?;
    let mut header = vec!["author_id"];
    header.extend(FEATURE_NAMES);
    check_header(&mut rdr, path, &header)?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let values = (1..=FEATURE_NAMES.len())
            .map(|c| parse_real(path, &record, c))
            .collect::<Result<Vec<f64>>>()?;
        rows.push((record[0].to_string(), values));
    }
    Ok(rows)
}

pub fn read_labels(path: &Path) -> Result<HashMap<String, Label>> {
    let mut rdr = reader(path)?;
    check_header(&mut rdr, path, &["author_id", "label"])?;
    let mut labels = HashMap::new();
    for record in rdr.records() {
        let record = record?;
        let label = Label::parse(record.get(1).unwrap_or("")).ok_or_else(|| {
            Error::format(path.display().to_string(), line_of(&record), "label must be bot or human")
        })?;
        labels.insert(record[0].to_string(), label);
    }
    Ok(labels)
}

pub fn write_labels<'a>(out: impl Write, labels: impl IntoIterator<Item = (&'a str, Label)>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["author_id", "label"])?;
    for (author, label) in labels {
        w.write_record([author, label.as_str()])?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(())
}

/// Pairs each row with its label. Returns the dataset, the author ids kept
/// (in row order), and how many rows had no label.
pub fn labeled_dataset(
    rows: &[(String, Vec<f64>)],
    labels: &HashMap<String, Label>,
    dim: usize,
) -> Result<(Dataset, Vec<String>, usize)> {
    let mut data = Dataset::new(dim);
    let mut kept = Vec::new();
    let mut unlabeled = 0;
    for (author, values) in rows {
        match labels.get(author) {
            Some(&label) => {
                data.push(values, label)?;
                kept.push(author.clone());
            }
            None => unlabeled += 1,
        }
    }
    Ok((data, kept, unlabeled))
}

/// Extra per-author column computed from the scores.
pub type ScoreColumn<'a> = &'a dyn Fn(&DetectionScores) -> Option<f64>;

/// Writes detector outputs. `posterior` adds a final column.
pub fn write_scores(out: impl Write, scores: &[DetectionScores], posterior: Option<ScoreColumn<'_>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = SCORES_HEADER.to_vec();
    if posterior.is_some() {
        header.push("posterior");
    }
    w.write_record(&header)?;
    for s in scores {
        let mut record = vec![
            s.author_id.clone(),
            u8::from(s.bin_flag).to_string(),
            real(s.bim_score),
            real(s.bica_prob),
            s.ensemble_prob.map(real).unwrap_or_default(),
            s.verdict.map(|v| v.as_str().to_string()).unwrap_or_default(),
        ];
        if let Some(f) = posterior {
            record.push(f(s).map(real).unwrap_or_default());
        }
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(())
}

pub fn read_scores(path: &Path) -> Result<Vec<DetectionScores>> {
    let mut rdr = reader(path)?;
    check_header(&mut rdr, path, &SCORES_HEADER[..4])?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let bin = match record.get(1).map(str::trim) {
            Some("1") => true,
            Some("0") => false,
            _ => {
                return Err(Error::format(path.display().to_string(), line_of(&record), "bin must be 0 or 1"))
            }
        };
        let optional = |col: usize| -> Result<Option<f64>> {
            match record.get(col).map(str::trim) {
                None | Some("") => Ok(None),
                Some(_) => parse_real(path, &record, col).map(Some),
            }
        };
        out.push(DetectionScores {
            author_id: record[0].to_string(),
            bin_flag: bin,
            bim_score: parse_real(path, &record, 2)?,
            bica_prob: parse_real(path, &record, 3)?,
            ensemble_prob: optional(4)?,
            verdict: record.get(5).and_then(Label::parse),
        });
    }
    Ok(out)
}

/// One author id per line; blank lines ignored.
pub fn read_author_list(path: &Path) -> Result<HashSet<String>> {
    let text = crate::io::read_to_string(path)?;
    Ok(text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim().is_empty())
        .map(String::from)
        .collect())
}
