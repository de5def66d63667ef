//! Commit-message template scoring.
//!
//! Messages are tokenized on whitespace and compared by the percent identity
//! of a token-level alignment. Documents are then greedily grouped: each one
//! joins the first existing template it is more than `k_b` similar to, or
//! becomes a new template. The score is `1 - templates / documents`, so an
//! author whose messages all come from one template scores close to 1.

use alloc::string::String;
use alloc::vec::Vec;

use crate::ingest::AuthorActivity;

/// Similarity threshold a document must exceed to join a template group.
pub const DEFAULT_KB: f64 = 0.40;
/// Per-author message cap before stride subsampling.
pub const DEFAULT_CAP: usize = 1000;
/// Cut-off on the template score for calling an author a bot on BIM alone.
pub const DEFAULT_BIM_THRESHOLD: f64 = 0.51;

const MATCH: i32 = 1;
const MISMATCH: i32 = -1;
const GAP: i32 = -1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TemplateError {
    #[error("no documents to score")]
    EmptyInput,
    #[error("similarity threshold {0} is outside [0, 1)")]
    BadThreshold(f64),
    #[error("message cap must be at least 2, got {0}")]
    BadCap(usize),
}

/// How the global and local alignments are combined into one identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlignmentMode {
    /// Needleman-Wunsch only.
    GlobalOnly,
    /// Global alignment length, with the match count raised to the
    /// Smith-Waterman match count when that is larger.
    #[default]
    Combined,
}

/// A whitespace-tokenized message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenDoc {
    pub tokens: Vec<String>,
    /// Position in the list the document came from.
    pub origin_index: usize,
}

impl TokenDoc {
    pub fn new(message: &str, origin_index: usize) -> Self {
        Self {
            tokens: message.split_whitespace().map(String::from).collect(),
            origin_index,
        }
    }
}

/// Score and match count of the best alignment ending at a cell.
///
/// Ordered lexicographically: score first, matches second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct AlignScore {
    pub score: i32,
    pub matches: u32,
}

impl AlignScore {
    const ZERO: Self = Self { score: 0, matches: 0 };

    fn step(self, score: i32, matched: bool) -> Self {
        Self {
            score: self.score + score,
            matches: self.matches + u32::from(matched),
        }
    }
}

/// Outcome of aligning two token sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alignment {
    /// Best global alignment; among equal scores, the most matches.
    pub global: AlignScore,
    /// Number of aligned columns (including gaps) of that global alignment.
    pub global_len: u32,
    /// Best local alignment under the same tie rule.
    pub local: AlignScore,
}

/// Needleman-Wunsch and Smith-Waterman over tokens with match +1,
/// mismatch -1, gap -1.
pub fn align<T: PartialEq>(a: &[T], b: &[T]) -> Alignment {
    let cols = b.len() + 1;
    let mut g_prev: Vec<AlignScore> = (0..cols)
        .map(|j| AlignScore { score: GAP * j as i32, matches: 0 })
        .collect();
    let mut g_cur = g_prev.clone();
    let mut l_prev = alloc::vec![AlignScore::ZERO; cols];
    let mut l_cur = l_prev.clone();
    let mut best_local = AlignScore::ZERO;

    for (i, x) in a.iter().enumerate() {
        g_cur[0] = AlignScore { score: GAP * (i as i32 + 1), matches: 0 };
        l_cur[0] = AlignScore::ZERO;
        for (j, y) in b.iter().enumerate() {
            let same = x == y;
            let sub = if same { MATCH } else { MISMATCH };

            g_cur[j + 1] = g_prev[j]
                .step(sub, same)
                .max(g_prev[j + 1].step(GAP, false))
                .max(g_cur[j].step(GAP, false));

            let local = l_prev[j]
                .step(sub, same)
                .max(l_prev[j + 1].step(GAP, false))
                .max(l_cur[j].step(GAP, false))
                .max(AlignScore::ZERO);
            l_cur[j + 1] = local;
            best_local = best_local.max(local);
        }
        core::mem::swap(&mut g_prev, &mut g_cur);
        core::mem::swap(&mut l_prev, &mut l_cur);
    }

    let global = g_prev[b.len()];
    // Every column is a match, a mismatch or a gap; with the score and
    // match count fixed this pins the column count.
    let global_len = (2 * global.matches as i32 - global.score) as u32;
    debug_assert!(global_len as usize >= a.len().max(b.len()));
    Alignment { global, global_len, local: best_local }
}

/// Percent identity of two token sequences, in `[0, 1]`.
///
/// Two empty sequences are identical (1.0); an empty sequence against a
/// non-empty one scores 0.
pub fn sequence_identity<T: PartialEq>(a: &[T], b: &[T], mode: AlignmentMode) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let al = align(a, b);
    let matches = match mode {
        AlignmentMode::GlobalOnly => al.global.matches,
        AlignmentMode::Combined => al.global.matches.max(al.local.matches),
    };
    f64::from(matches) / f64::from(al.global_len)
}

pub fn similarity(a: &TokenDoc, b: &TokenDoc, mode: AlignmentMode) -> f64 {
    sequence_identity(&a.tokens, &b.tokens, mode)
}

/// Result of greedy template grouping.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateGrouping {
    pub docs: Vec<TokenDoc>,
    /// Indices into `docs` of the template documents, in creation order.
    pub templates: Vec<usize>,
    /// `groups[g]` lists member indices of template `templates[g]`; the
    /// template is always the first member.
    pub groups: Vec<Vec<usize>>,
    pub k_b: f64,
    pub score: f64,
}

impl TemplateGrouping {
    pub fn template_count(&self) -> usize {
        self.templates.len()
    }
}

pub fn template_score<S: AsRef<str>>(
    messages: &[S],
    k_b: f64,
    mode: AlignmentMode,
) -> Result<TemplateGrouping, TemplateError> {
    let docs = messages
        .iter()
        .enumerate()
        .map(|(i, m)| TokenDoc::new(m.as_ref(), i))
        .collect();
    group_documents(docs, k_b, mode)
}

/// Greedy grouping over already tokenized documents, processed in order.
pub fn group_documents(
    docs: Vec<TokenDoc>,
    k_b: f64,
    mode: AlignmentMode,
) -> Result<TemplateGrouping, TemplateError> {
    if docs.is_empty() {
        return Err(TemplateError::EmptyInput);
    }
    if !(0.0..1.0).contains(&k_b) {
        return Err(TemplateError::BadThreshold(k_b));
    }

    let mut templates: Vec<usize> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (d, doc) in docs.iter().enumerate() {
        let joined = templates
            .iter()
            .position(|&t| similarity(doc, &docs[t], mode) > k_b);
        match joined {
            Some(g) => groups[g].push(d),
            None => {
                templates.push(d);
                groups.push(alloc::vec![d]);
            }
        }
    }

    let score = 1.0 - templates.len() as f64 / docs.len() as f64;
    Ok(TemplateGrouping { docs, templates, groups, k_b, score })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BimConfig {
    pub k_b: f64,
    pub cap: usize,
    pub mode: AlignmentMode,
}

impl Default for BimConfig {
    fn default() -> Self {
        Self { k_b: DEFAULT_KB, cap: DEFAULT_CAP, mode: AlignmentMode::Combined }
    }
}

/// Picks at most `cap` evenly strided indices out of `0..n`.
pub fn stride_sample(n: usize, cap: usize) -> Vec<usize> {
    if n <= cap {
        return (0..n).collect();
    }
    (0..cap).map(|i| i * n / cap).collect()
}

/// The author's messages in chronological order (stable on equal
/// timestamps), stride-subsampled to at most `cap`.
pub fn author_messages(author: &AuthorActivity, cap: usize) -> Vec<&str> {
    let mut commits: Vec<_> = author.commits().iter().collect();
    commits.sort_by_key(|c| c.timestamp);
    stride_sample(commits.len(), cap)
        .into_iter()
        .map(|i| commits[i].message.as_str())
        .collect()
}

/// Template grouping of one author's messages.
pub fn bim_grouping(
    author: &AuthorActivity,
    config: &BimConfig,
) -> Result<TemplateGrouping, TemplateError> {
    if config.cap < 2 {
        return Err(TemplateError::BadCap(config.cap));
    }
    template_score(&author_messages(author, config.cap), config.k_b, config.mode)
}

pub fn bim_score(author: &AuthorActivity, config: &BimConfig) -> Result<f64, TemplateError> {
    bim_grouping(author, config).map(|g| g.score)
}
