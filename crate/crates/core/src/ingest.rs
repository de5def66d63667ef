//! Commit records in the semicolon-delimited shared-dataset layout.
//!
//! One record per line:
//!
//! ```text
//! author_id;commit_sha;timestamp;timezone;files;projects;message
//! ```
//!
//! `files` and `projects` are `,`-separated lists (possibly empty). The
//! message is everything after the sixth `;`, so messages may contain `;`.
//! Timestamps are read as Unix seconds (UTC); the dataset itself does not
//! document the epoch, so that is an assumption of this format.
//! Timezones are `±HHMM`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

/// Largest accepted distance from UTC, in minutes.
pub const MAX_TZ_MINUTES: i16 = 14 * 60;

/// Why a line could not be turned into a [`CommitRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    MalformedLine,
    BadHash,
    BadTimestamp,
    BadTimezone,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::MalformedLine => "malformed line",
            ParseErrorKind::BadHash => "bad commit hash",
            ParseErrorKind::BadTimestamp => "bad timestamp",
            ParseErrorKind::BadTimezone => "bad timezone",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based line number, or 0 when the caller did not supply one.
    pub line: usize,
    pub kind: ParseErrorKind,
}

/// A record that cannot be written without breaking the line format.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecordError {
    #[error("author id contains ';' or a line break")]
    AuthorId,
    #[error("commit hash is not 40 lowercase hex characters")]
    Hash,
    #[error("timezone offset {0} minutes is out of range")]
    Timezone(i16),
    #[error("list entry {0:?} is empty or contains a reserved character")]
    ListEntry(String),
    #[error("message contains a line break")]
    Message,
}

/// One commit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CommitRecord {
    /// `"name <email>"`, compared byte for byte.
    pub author_id: String,
    pub commit_hash: String,
    /// Seconds since the Unix epoch, UTC.
    pub timestamp: i64,
    /// Signed minutes east of UTC.
    pub tz_offset: i16,
    pub files: Vec<String>,
    pub projects: Vec<String>,
    pub message: String,
}

impl CommitRecord {
    /// Checks every field against the line format.
    pub fn validate(&self) -> Result<(), RecordError> {
        if self.author_id.contains([';', '\n', '\r']) {
            return Err(RecordError::AuthorId);
        }
        if !is_commit_hash(&self.commit_hash) {
            return Err(RecordError::Hash);
        }
        if self.tz_offset.abs() > MAX_TZ_MINUTES {
            return Err(RecordError::Timezone(self.tz_offset));
        }
        for entry in self.files.iter().chain(&self.projects) {
            if !is_list_entry(entry) {
                return Err(RecordError::ListEntry(entry.clone()));
            }
        }
        if self.message.contains(['\n', '\r']) {
            return Err(RecordError::Message);
        }
        Ok(())
    }
}

fn is_commit_hash(s: &str) -> bool {
    s.len() == 40 && s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
}

fn is_list_entry(s: &str) -> bool {
    !s.is_empty() && !s.contains([',', ';', '\n', '\r'])
}

/// Parses one physical line (without its terminating newline).
///
/// `line_no` is only used to label errors.
pub fn parse_line(line: &str, line_no: usize) -> Result<CommitRecord, ParseError> {
    let err = |kind| ParseError { line: line_no, kind };
    if line.contains('\n') {
        return Err(err(ParseErrorKind::MalformedLine));
    }

    let mut parts = line.splitn(7, ';');
    let mut field = || parts.next().ok_or(err(ParseErrorKind::MalformedLine));
    let author_id = field()?;
    let hash = field()?;
    let timestamp = field()?;
    let timezone = field()?;
    let files = field()?;
    let projects = field()?;
    let message = field()?;

    if author_id.contains('\r') {
        return Err(err(ParseErrorKind::MalformedLine));
    }
    if !is_commit_hash(hash) {
        return Err(err(ParseErrorKind::BadHash));
    }
    let timestamp: i64 = timestamp
        .parse()
        .map_err(|_| err(ParseErrorKind::BadTimestamp))?;
    let tz_offset = parse_timezone(timezone).ok_or(err(ParseErrorKind::BadTimezone))?;
    let files = split_list(files).ok_or(err(ParseErrorKind::MalformedLine))?;
    let projects = split_list(projects).ok_or(err(ParseErrorKind::MalformedLine))?;
    if message.contains('\r') {
        return Err(err(ParseErrorKind::MalformedLine));
    }

    Ok(CommitRecord {
        author_id: author_id.into(),
        commit_hash: hash.into(),
        timestamp,
        tz_offset,
        files,
        projects,
        message: message.into(),
    })
}

fn split_list(field: &str) -> Option<Vec<String>> {
    if field.is_empty() {
        return Some(Vec::new());
    }
    field
        .split(',')
        .map(|entry| (!entry.is_empty()).then(|| String::from(entry)))
        .collect()
}

/// Parses `±HHMM` into signed minutes.
pub fn parse_timezone(text: &str) -> Option<i16> {
    let bytes = text.as_bytes();
    if bytes.len() != 5 || !bytes[1..].iter().all(u8::is_ascii_digit) {
        return None;
    }
    let sign = match bytes[0] {
        b'+' => 1,
        b'-' => -1,
        _ => return None,
    };
    let digit = |i: usize| i16::from(bytes[i] - b'0');
    let hours = digit(1) * 10 + digit(2);
    let minutes = digit(3) * 10 + digit(4);
    if minutes >= 60 {
        return None;
    }
    let total = hours * 60 + minutes;
    (total <= MAX_TZ_MINUTES).then_some(sign * total)
}

/// Renders signed minutes as `±HHMM`; zero is `+0000`.
pub fn format_timezone(minutes: i16) -> String {
    let sign = if minutes < 0 { '-' } else { '+' };
    let abs = minutes.unsigned_abs();
    let mut out = String::with_capacity(5);
    let _ = write!(out, "{sign}{:02}{:02}", abs / 60, abs % 60);
    out
}

/// Writes a record as one line, without the trailing newline.
///
/// Inverse of [`parse_line`] for records that pass [`CommitRecord::validate`].
pub fn serialize(record: &CommitRecord) -> String {
    let mut out = String::with_capacity(
        record.author_id.len() + record.message.len() + 64 + record.files.len() * 16,
    );
    let _ = write!(
        out,
        "{};{};{};{};",
        record.author_id,
        record.commit_hash,
        record.timestamp,
        format_timezone(record.tz_offset)
    );
    push_list(&mut out, &record.files);
    out.push(';');
    push_list(&mut out, &record.projects);
    out.push(';');
    out.push_str(&record.message);
    out
}

fn push_list(out: &mut String, items: &[String]) {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(item);
    }
}

/// All commits of one author id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorActivity {
    author_id: String,
    commits: Vec<CommitRecord>,
}

impl AuthorActivity {
    /// Returns `None` if `commits` is empty or any commit belongs to another id.
    pub fn new(author_id: String, commits: Vec<CommitRecord>) -> Option<Self> {
        if commits.is_empty() || commits.iter().any(|c| c.author_id != author_id) {
            return None;
        }
        Some(Self { author_id, commits })
    }

    pub fn author_id(&self) -> &str {
        &self.author_id
    }

    pub fn commits(&self) -> &[CommitRecord] {
        &self.commits
    }

    pub fn into_commits(self) -> Vec<CommitRecord> {
        self.commits
    }
}

/// Partitions records by exact author id.
///
/// Bundles come out in order of each author's first appearance, and commits
/// keep their input order inside a bundle.
pub fn group_by_author<I>(records: I) -> Vec<AuthorActivity>
where
    I: IntoIterator<Item = CommitRecord>,
{
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut bundles: Vec<AuthorActivity> = Vec::new();
    for record in records {
        match index.get(&record.author_id) {
            Some(&i) => bundles[i].commits.push(record),
            None => {
                index.insert(record.author_id.clone(), bundles.len());
                bundles.push(AuthorActivity {
                    author_id: record.author_id.clone(),
                    commits: alloc::vec![record],
                });
            }
        }
    }
    bundles
}
