//! Activity profiles of bots over the 24 hours of their local day, and the
//! file categories they touch.
//!
//! A profile is classified by three shape metrics, checked in this order:
//!
//! 1. **Spike** when the three busiest hours hold at least 75% of commits.
//! 2. **Continuous** when the normalized Shannon entropy is at least 0.90.
//! 3. **Synchronous** when some 8 consecutive hours (wrapping at midnight)
//!    hold at least 70% of commits.
//! 4. **Other** otherwise.
//!
//! Hours are taken in each commit's own timezone. A bot that sleeps for a
//! few hours and is flat the rest of the day can miss the entropy cut and
//! fall through to Synchronous or Other.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::features::file_extension;
use crate::ingest::AuthorActivity;

pub const HOURS: usize = 24;
const SECONDS_PER_DAY: i64 = 86_400;

/// Bots with fewer commits than this are not profiled by default.
pub const DEFAULT_MIN_COMMITS: u64 = 1000;

const DEFAULT_TABLE: &str = include_str!("../data/languages.tsv");

/// Category for extensions missing from a [`LanguageTable`].
pub const UNKNOWN_CATEGORY: &str = "Unknown";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CharacterizeError {
    #[error("{total} commits is below the minimum of {min}")]
    TooFewCommits { total: u64, min: u64 },
    #[error("language table line {line}: expected `extension<TAB>category`")]
    BadTableLine { line: usize },
}

/// Hour of the commit on its author's local clock.
pub fn local_hour(timestamp: i64, tz_offset_minutes: i16) -> u8 {
    let local = timestamp + 60 * i64::from(tz_offset_minutes);
    (local.rem_euclid(SECONDS_PER_DAY) / 3600) as u8
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BotClass {
    Continuous,
    Synchronous,
    Spike,
    Other,
}

impl BotClass {
    pub const ALL: [BotClass; 4] =
        [BotClass::Continuous, BotClass::Synchronous, BotClass::Spike, BotClass::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            BotClass::Continuous => "Continuous",
            BotClass::Synchronous => "Synchronous",
            BotClass::Spike => "Spike",
            BotClass::Other => "Other",
        }
    }
}

/// Thresholds of the class rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    pub spike_top3: f64,
    pub continuous_entropy: f64,
    pub sync_window8: f64,
    pub min_commits: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            spike_top3: 0.75,
            continuous_entropy: 0.90,
            sync_window8: 0.70,
            min_commits: DEFAULT_MIN_COMMITS,
        }
    }
}

/// Local-hour histogram of one author with its shape metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityProfile {
    pub author_id: String,
    pub bins: [u64; HOURS],
    pub total: u64,
    /// Shannon entropy of the hour shares divided by `ln 24`.
    pub entropy_norm: f64,
    pub top3_share: f64,
    /// Largest share held by 8 consecutive hours, wrapping at midnight.
    pub best_window8_share: f64,
}

impl ActivityProfile {
    /// `None` when every bin is zero.
    pub fn from_bins(author_id: String, bins: [u64; HOURS]) -> Option<Self> {
        let total: u64 = bins.iter().sum();
        if total == 0 {
            return None;
        }
        let t = total as f64;

        let mut sorted = bins;
        sorted.sort_unstable();
        // Summing over sorted counts makes the result independent of bin order.
        let entropy: f64 = sorted
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / t;
                -p * libm::log(p)
            })
            .sum();
        let entropy_norm = (entropy / libm::log(HOURS as f64)).clamp(0.0, 1.0);
        let top3: u64 = sorted[HOURS - 3..].iter().sum();

        let best_window: u64 = (0..HOURS)
            .map(|start| (0..8).map(|k| bins[(start + k) % HOURS]).sum::<u64>())
            .max()
            .unwrap_or(0);

        Some(Self {
            author_id,
            bins,
            total,
            entropy_norm,
            top3_share: top3 as f64 / t,
            best_window8_share: best_window as f64 / t,
        })
    }

    pub fn from_activity(author: &AuthorActivity) -> Self {
        let mut bins = [0u64; HOURS];
        for c in author.commits() {
            bins[usize::from(local_hour(c.timestamp, c.tz_offset))] += 1;
        }
        Self::from_bins(author.author_id().into(), bins)
            .expect("an author has at least one commit")
    }

    pub fn share(&self, hour: usize) -> f64 {
        self.bins[hour] as f64 / self.total as f64
    }

    /// Applies the class rules without the minimum-commit check.
    pub fn class_by_shape(&self, config: &ClassifierConfig) -> BotClass {
        if self.top3_share >= config.spike_top3 {
            BotClass::Spike
        } else if self.entropy_norm >= config.continuous_entropy {
            BotClass::Continuous
        } else if self.best_window8_share >= config.sync_window8 {
            BotClass::Synchronous
        } else {
            BotClass::Other
        }
    }
}

pub fn classify_profile(
    profile: &ActivityProfile,
    config: &ClassifierConfig,
) -> Result<BotClass, CharacterizeError> {
    if profile.total < config.min_commits {
        return Err(CharacterizeError::TooFewCommits {
            total: profile.total,
            min: config.min_commits,
        });
    }
    Ok(profile.class_by_shape(config))
}

/// Extension to category lookup; anything unlisted is [`UNKNOWN_CATEGORY`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageTable {
    map: BTreeMap<String, String>,
}

impl Default for LanguageTable {
    fn default() -> Self {
        Self::parse(DEFAULT_TABLE).expect("bundled language table is well formed")
    }
}

impl LanguageTable {
    /// Reads `extension<TAB>category` lines; blank lines and `#` comments
    /// are skipped. Later lines override earlier ones.
    pub fn parse(text: &str) -> Result<Self, CharacterizeError> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (ext, category) = line
                .split_once('\t')
                .filter(|(e, c)| !e.trim().is_empty() && !c.trim().is_empty())
                .ok_or(CharacterizeError::BadTableLine { line: i + 1 })?;
            map.insert(ext.trim().to_lowercase(), String::from(category.trim()));
        }
        Ok(Self { map })
    }

    pub fn category(&self, extension: &str) -> &str {
        self.map.get(extension).map_or(UNKNOWN_CATEGORY, String::as_str)
    }

    pub fn category_of_path(&self, path: &str) -> &str {
        self.category(&file_extension(path))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Number of distinct authors that touched at least one file of each
/// category.
pub fn file_type_histogram(
    authors: &[AuthorActivity],
    table: &LanguageTable,
) -> BTreeMap<String, usize> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for author in authors {
        let categories: BTreeSet<&str> = author
            .commits()
            .iter()
            .flat_map(|c| c.files.iter())
            .map(|f| table.category_of_path(f))
            .collect();
        for category in categories {
            *counts.entry(String::from(category)).or_default() += 1;
        }
    }
    counts
}

/// Merges two histograms produced by [`file_type_histogram`] over disjoint
/// author sets.
pub fn merge_histograms(mut a: BTreeMap<String, usize>, b: BTreeMap<String, usize>) -> BTreeMap<String, usize> {
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

const SVG_RADIUS: f64 = 100.0;
const WORK_HOURS: core::ops::Range<usize> = 8..16;

/// Polar plot of a profile: one wedge per hour, radius proportional to the
/// hour's share (the busiest hour reaches the full radius), with the
/// 08:00-16:00 sectors shaded.
pub fn render_radial_svg(profile: &ActivityProfile) -> String {
    let mut svg = String::new();
    let size = 2.0 * SVG_RADIUS + 40.0;
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0}" height="{size:.0}" viewBox="{o:.0} {o:.0} {size:.0} {size:.0}">"#,
        o = -size / 2.0
    );
    let _ = writeln!(svg, "<title>{}</title>", xml_escape(&profile.author_id));
    for hour in WORK_HOURS {
        let _ = writeln!(
            svg,
            r##"<path class="work-hours" fill="#fde9b5" d="{}"/>"##,
            wedge(hour, SVG_RADIUS)
        );
    }
    let _ = writeln!(
        svg,
        r##"<circle r="{SVG_RADIUS:.3}" fill="none" stroke="#999999" stroke-width="0.5"/>"##
    );

    let max_share = (0..HOURS).map(|h| profile.share(h)).fold(0.0, f64::max);
    for hour in 0..HOURS {
        let radius = SVG_RADIUS * profile.share(hour) / max_share;
        let _ = writeln!(
            svg,
            r##"<path class="sector" data-hour="{hour}" data-radius="{radius:.3}" fill="#3b6ea5" fill-opacity="0.8" d="{}"/>"##,
            wedge(hour, radius)
        );
    }
    for hour in (0..HOURS).step_by(3) {
        let (x, y) = polar(hour as f64, SVG_RADIUS + 10.0);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.3}" y="{y:.3}" font-size="8" text-anchor="middle" dominant-baseline="middle">{hour}</text>"#
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Point at `radius` for a clock position in hours; 0 is at the top and
/// time runs clockwise.
fn polar(hour: f64, radius: f64) -> (f64, f64) {
    let angle = hour / HOURS as f64 * 2.0 * core::f64::consts::PI;
    let x = radius * libm::sin(angle);
    let y = -radius * libm::cos(angle);
    // Avoid printing "-0.000".
    let tidy = |v: f64| if v.abs() < 5e-4 { 0.0 } else { v };
    (tidy(x), tidy(y))
}

fn wedge(hour: usize, radius: f64) -> String {
    let (x1, y1) = polar(hour as f64, radius);
    let (x2, y2) = polar(hour as f64 + 1.0, radius);
    let mut d = String::new();
    let _ = write!(d, "M0 0 L{x1:.3} {y1:.3} A{radius:.3} {radius:.3} 0 0 1 {x2:.3} {y2:.3} Z");
    d
}

fn xml_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Profiles and classes for every author with enough commits, in input
/// order. Authors below the minimum are skipped.
pub fn characterize_authors(
    authors: &[AuthorActivity],
    config: &ClassifierConfig,
) -> Vec<(ActivityProfile, BotClass)> {
    authors
        .iter()
        .map(ActivityProfile::from_activity)
        .filter_map(|p| classify_profile(&p, config).ok().map(|c| (p, c)))
        .collect()
}
