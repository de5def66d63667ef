//! Seeded synthetic data: commit corpora with known bot/human labels,
//! detector-output tables for the combining forest, and hourly activity
//! profiles of each bot class.
//!
//! None of this reproduces any real dataset. It exists so the pipeline can
//! be exercised end to end without access to one.

use botminer_core::characterize::HOURS;
use botminer_core::detector::DetectionScores;
use botminer_core::forest::Label;
use botminer_core::ingest::CommitRecord;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Geometric, Normal};

pub type SynthRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SynthRng {
    ChaCha8Rng::seed_from_u64(seed)
}

const SYLLABLES: [&str; 24] = [
    "ka", "lo", "mi", "ren", "tor", "sa", "vel", "qu", "an", "dri", "pe", "zo", "lu", "ne", "ba",
    "fi", "gor", "hal", "is", "jun", "ost", "ul", "wy", "xe",
];

const FIRST_NAMES: [&str; 16] = [
    "Alice", "Bruno", "Chen", "Dana", "Emeka", "Farah", "Goran", "Hana", "Ivan", "Jia", "Kofi",
    "Lena", "Mateo", "Nadia", "Omar", "Priya",
];

const LAST_NAMES: [&str; 14] = [
    "Abbot", "Botha", "Novak", "Silva", "Tanaka", "Okafor", "Larsen", "Kumar", "Rossi", "Meyer",
    "Haddad", "Kowalski", "Nguyen", "Dubois",
];

const HUMAN_EXTENSIONS: [&str; 14] = [
    "py", "rs", "js", "java", "c", "h", "go", "md", "yml", "json", "html", "css", "ts", "sh",
];

const BOT_EXTENSION_SETS: [&[&str]; 6] = [
    &["json"],
    &["md"],
    &["html", "js"],
    &["yml"],
    &["lock", "json"],
    &["csv"],
];

const TIMEZONES: [i16; 8] = [0, 60, 120, -300, -420, 330, 480, 540];

/// A pronounceable made-up word.
pub fn word(rng: &mut impl Rng) -> String {
    let n = rng.random_range(2..=3);
    (0..n).map(|_| *SYLLABLES.choose(rng).unwrap()).collect()
}

/// `n` sentences of 5 to 10 random words each.
pub fn sentence_pool(rng: &mut impl Rng, n: usize) -> Vec<String> {
    (0..n)
        .map(|_| {
            let len = rng.random_range(5..=10);
            (0..len).map(|_| word(rng)).collect::<Vec<_>>().join(" ")
        })
        .collect()
}

/// A message template: fixed words with `slots` positions marked `None`.
#[derive(Debug, Clone)]
pub struct MessageTemplate {
    parts: Vec<Option<String>>,
}

impl MessageTemplate {
    pub fn random(rng: &mut impl Rng, slots: usize) -> Self {
        let fixed = rng.random_range(5..=8);
        let mut parts: Vec<Option<String>> = (0..fixed).map(|_| Some(word(rng))).collect();
        for _ in 0..slots {
            let at = rng.random_range(0..=parts.len());
            parts.insert(at, None);
        }
        Self { parts }
    }

    /// Fills every slot with a fresh random token.
    pub fn instantiate(&self, rng: &mut impl Rng) -> String {
        self.parts
            .iter()
            .map(|p| match p {
                Some(w) => w.clone(),
                None => format!("{}{}", word(rng), rng.random_range(0..10_000)),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Messages of a template-driven bot: one template, 1 to 3 slots.
pub fn template_bot_messages(rng: &mut impl Rng, n: usize) -> Vec<String> {
    let slots = rng.random_range(1..=3);
    let template = MessageTemplate::random(rng, slots);
    (0..n).map(|_| template.instantiate(rng)).collect()
}

/// Messages of a human: `n` draws with replacement from `pool`.
pub fn human_messages(rng: &mut impl Rng, pool: &[String], n: usize) -> Vec<String> {
    (0..n).map(|_| pool.choose(rng).unwrap().clone()).collect()
}

fn hash(rng: &mut impl Rng) -> String {
    (0..40).map(|_| char::from_digit(rng.random_range(0..16), 16).unwrap()).collect()
}

/// Parameters of [`corpus`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusConfig {
    pub bots: usize,
    pub humans: usize,
    /// Mean commits per author (geometric, at least 1).
    pub mean_commits: f64,
    pub max_commits: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self { bots: 100, humans: 100, mean_commits: 20.0, max_commits: 200 }
    }
}

/// A labeled synthetic commit corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub records: Vec<CommitRecord>,
    /// One entry per author, in first-appearance order.
    pub labels: Vec<(String, Label)>,
}

const BASE_TIME: i64 = 1_500_000_000;
const YEAR: i64 = 365 * 86_400;

/// Generates bots and humans with overlapping but different habits: bots
/// reuse a message template, touch many files of one or two kinds per
/// commit, and stay in few projects; humans write free-form messages and
/// touch a few files of many kinds.
///
/// About half the bots carry a `bot` token in their id; a few humans carry
/// look-alike names such as `Abbot`.
pub fn corpus(rng: &mut impl Rng, cfg: &CorpusConfig) -> Corpus {
    let pool = sentence_pool(rng, 500);
    let commits = Geometric::new(1.0 / cfg.mean_commits.max(1.0)).unwrap();
    let mut records = Vec::new();
    let mut labels = Vec::new();

    let mut kinds: Vec<bool> = std::iter::repeat_n(true, cfg.bots)
        .chain(std::iter::repeat_n(false, cfg.humans))
        .collect();
    kinds.shuffle(rng);
    for (i, is_bot) in kinds.into_iter().enumerate() {
        let n = (commits.sample(rng) as usize + 1).min(cfg.max_commits);
        let author = if is_bot { bot_id(rng, i) } else { human_id(rng, i) };
        let tz = *TIMEZONES.choose(rng).unwrap();
        let start = BASE_TIME + rng.random_range(0..YEAR);

        if is_bot {
            let slots = rng.random_range(1..=3);
            let template = MessageTemplate::random(rng, slots);
            let exts = *BOT_EXTENSION_SETS.choose(rng).unwrap();
            let projects: Vec<String> = (0..rng.random_range(1..=2)).map(|k| format!("{}/{}", word(rng), k)).collect();
            let hour = rng.random_range(0..24);
            let wide = rng.random_bool(0.2);
            for c in 0..n {
                let files = if wide { rng.random_range(1..=3) } else { rng.random_range(3..=25) };
                let files: Vec<String> = (0..files)
                    .map(|_| format!("data/{}.{}", word(rng), exts.choose(rng).unwrap()))
                    .collect();
                let day = c as i64 * 86_400 / 2;
                let timestamp = start + day + hour * 3600 + rng.random_range(0..600) - 60 * i64::from(tz);
                let message = if rng.random_bool(0.9) { template.instantiate(rng) } else { pool.choose(rng).unwrap().clone() };
                records.push(CommitRecord {
                    author_id: author.clone(),
                    commit_hash: hash(rng),
                    timestamp,
                    tz_offset: tz,
                    files,
                    projects: vec![projects.choose(rng).unwrap().clone()],
                    message,
                });
            }
        } else {
            let kinds = rng.random_range(2..=7);
            let own_exts: Vec<&str> = HUMAN_EXTENSIONS.choose_multiple(rng, kinds).copied().collect();
            let projects: Vec<String> = (0..rng.random_range(1..=5)).map(|k| format!("{}/{}", word(rng), k)).collect();
            let hours = Normal::new(14.0, 3.0).unwrap();
            for c in 0..n {
                let files: Vec<String> = (0..rng.random_range(0..=4))
                    .map(|_| format!("src/{}.{}", word(rng), own_exts.choose(rng).unwrap()))
                    .collect();
                let hour = (hours.sample(rng) as i64).rem_euclid(24);
                let timestamp = start + c as i64 * 3 * 86_400 + hour * 3600 + rng.random_range(0..3600) - 60 * i64::from(tz);
                let mut message = pool.choose(rng).unwrap().clone();
                if rng.random_bool(0.1) {
                    message.push_str("; also ");
                    message.push_str(&word(rng));
                }
                let project_count = if rng.random_bool(0.8) { 1 } else { 2 };
                records.push(CommitRecord {
                    author_id: author.clone(),
                    commit_hash: hash(rng),
                    timestamp,
                    tz_offset: tz,
                    files,
                    projects: projects.choose_multiple(rng, project_count).cloned().collect(),
                    message,
                });
            }
        }
        labels.push((author, if is_bot { Label::Bot } else { Label::Human }));
    }
    Corpus { records, labels }
}

fn bot_id(rng: &mut impl Rng, i: usize) -> String {
    let base = word(rng);
    match rng.random_range(0..4) {
        0 => format!("{base}-bot <{base}-bot{i}@users.example.com>"),
        1 => format!("{base}[bot] <{i}+{base}[bot]@users.example.com>"),
        2 => format!("{} Updater <ci{i}@{base}.example.org>", capitalize(&base)),
        _ => format!("{} Service <{base}{i}@build.example.net>", capitalize(&base)),
    }
}

fn human_id(rng: &mut impl Rng, i: usize) -> String {
    let first = FIRST_NAMES.choose(rng).unwrap();
    let last = LAST_NAMES.choose(rng).unwrap();
    format!("{first} {last} <{}.{}{i}@mail.example.com>", first.to_lowercase(), last.to_lowercase())
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

/// Per-author commit-association features drawn directly: bots touch more
/// files per commit but fewer kinds of file, and work in fewer projects.
/// Both classes overlap; neither feature alone separates them.
pub fn feature_rows(rng: &mut impl Rng, bots: usize, humans: usize) -> Vec<([f64; 6], Label)> {
    let commits = Geometric::new(1.0 / 30.0).unwrap();
    let mut rows = Vec::with_capacity(bots + humans);
    for i in 0..bots + humans {
        let is_bot = i < bots;
        let n = commits.sample(rng) as f64 + 2.0;
        let (mean_files, exts, projects) = if is_bot {
            (
                (Normal::new(2.2, 0.8).unwrap().sample(rng) as f64).exp(),
                rng.random_range(1..=4) as f64,
                rng.random_range(1..=3) as f64,
            )
        } else {
            (
                (Normal::new(0.9, 0.6).unwrap().sample(rng) as f64).exp(),
                rng.random_range(2..=12) as f64,
                rng.random_range(1..=8) as f64,
            )
        };
        let sd = mean_files * rng.random_range(0.2..1.2);
        let total = (mean_files * n).round().max(1.0);
        let median_projects = if projects > 1.0 && rng.random_bool(0.2) { 2.0 } else { 1.0 };
        rows.push((
            [total, exts.min(total), sd, total / n, projects, median_projects],
            if is_bot { Label::Bot } else { Label::Human },
        ));
    }
    rows
}

/// Detector outputs for `bots` bots and `humans` humans, shaped like the
/// outputs of the three detectors: a rare-for-humans name flag, a template
/// score that is usually high for bots, and a forest probability on a
/// 1/100 grid.
pub fn ensemble_rows(rng: &mut impl Rng, bots: usize, humans: usize) -> Vec<(DetectionScores, Label)> {
    let bot_bim = Beta::new(5.0, 2.0).unwrap();
    let human_bim = Beta::new(1.2, 5.0).unwrap();
    let bot_bica = Beta::new(5.0, 1.5).unwrap();
    let human_bica = Beta::new(1.5, 5.0).unwrap();
    let mut rows = Vec::with_capacity(bots + humans);
    for i in 0..bots + humans {
        let is_bot = i < bots;
        let (bin_p, bim, bica): (f64, f64, f64) = if is_bot {
            (0.6, bot_bim.sample(rng), bot_bica.sample(rng))
        } else {
            (0.02, human_bim.sample(rng), human_bica.sample(rng))
        };
        let scores = DetectionScores {
            author_id: format!("author-{i}"),
            bin_flag: rng.random_bool(bin_p),
            bim_score: bim.min(0.999),
            bica_prob: (bica * 100.0).round() / 100.0,
            ensemble_prob: None,
            verdict: None,
        };
        rows.push((scores, if is_bot { Label::Bot } else { Label::Human }));
    }
    rows
}

/// Which activity shape [`profile_bins`] draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileShape {
    /// Every hour equally likely.
    Uniform,
    /// Normal around a random hour, sd 2 hours, so about 95% falls in an
    /// 8-hour window.
    Window,
    /// One to three fixed hours with a little jitter.
    Spikes,
    /// Two moderate peaks 9 to 15 hours apart over a flat background.
    Bimodal,
}

/// `commits` local-hour counts drawn from `shape`.
pub fn profile_bins(rng: &mut impl Rng, shape: ProfileShape, commits: usize) -> [u64; HOURS] {
    let mut bins = [0u64; HOURS];
    let put = |h: i64, bins: &mut [u64; HOURS]| bins[h.rem_euclid(HOURS as i64) as usize] += 1;
    match shape {
        ProfileShape::Uniform => {
            for _ in 0..commits {
                put(rng.random_range(0..24), &mut bins);
            }
        }
        ProfileShape::Window => {
            let center = rng.random_range(0..24) as f64 + 0.5;
            let normal = Normal::new(center, 2.0).unwrap();
            for _ in 0..commits {
                put(normal.sample(rng).floor() as i64, &mut bins);
            }
        }
        ProfileShape::Spikes => {
            let k = rng.random_range(1..=3);
            let hours: Vec<i64> = (0..k).map(|_| rng.random_range(0..24)).collect();
            for _ in 0..commits {
                if rng.random_bool(0.05) {
                    put(rng.random_range(0..24), &mut bins);
                } else {
                    put(*hours.choose(rng).unwrap(), &mut bins);
                }
            }
        }
        ProfileShape::Bimodal => {
            let first = rng.random_range(0..24);
            let second = first + rng.random_range(9..=15);
            let peak = rng.random_range(0.25..0.33);
            for _ in 0..commits {
                let u: f64 = rng.random();
                if u < peak {
                    put(first, &mut bins);
                } else if u < 2.0 * peak {
                    put(second, &mut bins);
                } else {
                    put(rng.random_range(0..24), &mut bins);
                }
            }
        }
    }
    bins
}

/// Commit records whose local hours follow `bins`, for one author.
pub fn records_from_bins(rng: &mut impl Rng, author: &str, bins: &[u64; HOURS]) -> Vec<CommitRecord> {
    let tz = *TIMEZONES.choose(rng).unwrap();
    let mut out = Vec::new();
    let mut day = 0i64;
    for (hour, &count) in bins.iter().enumerate() {
        for _ in 0..count {
            let local = BASE_TIME - BASE_TIME.rem_euclid(86_400) + day * 86_400 + hour as i64 * 3600 + rng.random_range(0..3600);
            day += 1;
            out.push(CommitRecord {
                author_id: author.to_string(),
                commit_hash: hash(rng),
                timestamp: local - 60 * i64::from(tz),
                tz_offset: tz,
                files: vec![format!("site/{}.html", word(rng))],
                projects: vec!["site".into()],
                message: "update site".into(),
            });
        }
    }
    out.sort_by_key(|r| r.timestamp);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use botminer_core::ingest::group_by_author;

    #[test]
    fn corpus_is_seeded_and_labeled() {
        let cfg = CorpusConfig { bots: 7, humans: 5, mean_commits: 4.0, max_commits: 20 };
        let a = corpus(&mut rng(1), &cfg);
        let b = corpus(&mut rng(1), &cfg);
        assert_eq!(a, b);
        assert_eq!(a.labels.len(), 12);
        assert_eq!(a.labels.iter().filter(|l| l.1 == Label::Bot).count(), 7);
        assert!(a.records.iter().all(|r| r.validate().is_ok()));
        let groups = group_by_author(a.records.clone());
        assert_eq!(groups.len(), 12);
        assert_eq!(
            groups.iter().map(|g| g.author_id().to_string()).collect::<Vec<_>>(),
            a.labels.iter().map(|l| l.0.clone()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn profile_generators_fill_bins() {
        let mut r = rng(2);
        for shape in [ProfileShape::Uniform, ProfileShape::Window, ProfileShape::Spikes, ProfileShape::Bimodal] {
            let bins = profile_bins(&mut r, shape, 500);
            assert_eq!(bins.iter().sum::<u64>(), 500);
        }
    }

    #[test]
    fn records_follow_bins() {
        use botminer_core::characterize::local_hour;
        let mut r = rng(3);
        let mut bins = [0u64; HOURS];
        bins[5] = 3;
        bins[17] = 2;
        let recs = records_from_bins(&mut r, "x", &bins);
        let mut seen = [0u64; HOURS];
        for rec in &recs {
            seen[local_hour(rec.timestamp, rec.tz_offset) as usize] += 1;
        }
        assert_eq!(seen, bins);
    }
}
