//! Bot detection from the author id string alone.
//!
//! An id is bot-named when its name, or the local part of its email, contains
//! `bot` (any case) with a non-alphabetic character or the string edge on both
//! sides. That keeps `Abbot` and `Botha` out while catching `svc-bot`,
//! `[bot]` and `bot42`. The email domain is never scanned, so
//! `hr@future-bot.ai` is not flagged.

/// Where the `bot` token was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchRegion {
    Name,
    EmailLocal,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NameVerdict {
    pub is_bot: bool,
    pub matched_in: MatchRegion,
}

impl NameVerdict {
    fn from_region(matched_in: MatchRegion) -> Self {
        Self {
            is_bot: matched_in != MatchRegion::None,
            matched_in,
        }
    }
}

/// Splits `"name <email>"` at the last `<`.
///
/// The email is the text between that `<` and a terminal `>`. Without such a
/// bracket pair the whole id is the name and the email is empty.
pub fn split_author_id(author_id: &str) -> (&str, &str) {
    let trimmed = author_id.trim_end();
    if let Some(open) = trimmed.rfind('<') {
        if let Some(email) = trimmed[open + 1..].strip_suffix('>') {
            return (trimmed[..open].trim(), email);
        }
    }
    (author_id.trim(), "")
}

/// The part of an email address before its first `@`.
pub fn email_local_part(email: &str) -> &str {
    email.split('@').next().unwrap_or("")
}

/// True if `text` contains `bot` bounded on both sides by non-alphabetic
/// characters or the string edges.
pub fn contains_bot_token(text: &str) -> bool {
    let chars: alloc::vec::Vec<char> = text.chars().collect();
    let bounded = |i: Option<usize>| i.and_then(|i| chars.get(i)).is_none_or(|c| !c.is_alphabetic());
    chars.windows(3).enumerate().any(|(i, w)| {
        w[0].eq_ignore_ascii_case(&'b')
            && w[1].eq_ignore_ascii_case(&'o')
            && w[2].eq_ignore_ascii_case(&'t')
            && bounded(i.checked_sub(1))
            && bounded(Some(i + 3))
    })
}

pub fn is_bot_name(author_id: &str) -> NameVerdict {
    let (name, email) = split_author_id(author_id);
    let region = if contains_bot_token(name) {
        MatchRegion::Name
    } else if contains_bot_token(email_local_part(email)) {
        MatchRegion::EmailLocal
    } else {
        MatchRegion::None
    };
    NameVerdict::from_region(region)
}
