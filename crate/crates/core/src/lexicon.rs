//! Suggestion lists for story slots: object categories and verb synonyms.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

pub const CATEGORY_COUNT: usize = 345;

const BUNDLED: &str = include_str!("../data/lexicon.json");
const OPERATORS: [&str; 7] = ["=", "==", "!=", "<", ">", "<=", ">="];

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon format error: {detail}")]
    Format { detail: String },
    #[error("cannot read lexicon: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown suggestion kind '{kind}'")]
    UnknownKind { kind: String },
    #[error("limit must be at least 1")]
    InvalidLimit,
}

/// What a suggestion list is for, parsed from `object`, `verb`, `verb:<op>`,
/// `action` or `action:<keyword>`. Bare `verb` means the assignment operator
/// and bare `action` means `print`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SuggestKind {
    Object,
    Verb(String),
    Action(String),
}

impl FromStr for SuggestKind {
    type Err = LexiconError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || LexiconError::UnknownKind { kind: s.to_string() };
        match s.split_once(':') {
            None => match s {
                "object" => Ok(SuggestKind::Object),
                "verb" => Ok(SuggestKind::Verb("=".into())),
                "action" => Ok(SuggestKind::Action("print".into())),
                _ => Err(unknown()),
            },
            Some(("verb", op)) if !op.is_empty() => Ok(SuggestKind::Verb(op.into())),
            Some(("action", kw)) if !kw.is_empty() => Ok(SuggestKind::Action(kw.into())),
            _ => Err(unknown()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    /// Sorted, lowercase, unique.
    pub object_categories: Vec<String>,
    /// Operator → verbs, in file order.
    pub verb_sets: BTreeMap<String, Vec<String>>,
    /// Keyword or builtin → verbs, in file order.
    pub keyword_verbs: BTreeMap<String, Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LexiconFile {
    categories: Vec<String>,
    verbs: BTreeMap<String, Vec<String>>,
}

fn format_error(detail: impl Into<String>) -> LexiconError {
    LexiconError::Format { detail: detail.into() }
}

impl Lexicon {
    pub fn bundled() -> Lexicon {
        Lexicon::from_json(BUNDLED).expect("bundled lexicon is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Lexicon, LexiconError> {
        Lexicon::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn from_json(text: &str) -> Result<Lexicon, LexiconError> {
        let file: LexiconFile = serde_json::from_str(text).map_err(|e| format_error(e.to_string()))?;
        if file.categories.len() != CATEGORY_COUNT {
            return Err(format_error(format!(
                "expected {CATEGORY_COUNT} categories, found {}",
                file.categories.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for name in &file.categories {
            if name.trim().is_empty() || name != &name.to_lowercase() {
                return Err(format_error(format!("category '{name}' must be non-empty and lowercase")));
            }
            if !seen.insert(name.as_str()) {
                return Err(format_error(format!("duplicate category '{name}'")));
            }
        }
        let mut verb_sets = BTreeMap::new();
        let mut keyword_verbs = BTreeMap::new();
        for (key, verbs) in file.verbs {
            if verbs.is_empty() {
                return Err(format_error(format!("verb list for '{key}' is empty")));
            }
            let mut seen = BTreeSet::new();
            for verb in &verbs {
                if verb.trim().is_empty() {
                    return Err(format_error(format!("empty verb in list for '{key}'")));
                }
                if !seen.insert(verb.as_str()) {
                    return Err(format_error(format!("duplicate verb '{verb}' for '{key}'")));
                }
            }
            if OPERATORS.contains(&key.as_str()) {
                verb_sets.insert(key, verbs);
            } else {
                keyword_verbs.insert(key, verbs);
            }
        }
        let mut object_categories = file.categories;
        object_categories.sort();
        Ok(Lexicon { object_categories, verb_sets, keyword_verbs })
    }

    /// Suggestions filtered by a case-insensitive prefix and cut to `limit`.
    /// Categories come back alphabetically; verbs keep their curated order.
    /// An operator or keyword without a list yields no suggestions.
    pub fn suggest(&self, kind: &SuggestKind, prefix: Option<&str>, limit: usize) -> Result<Vec<String>, LexiconError> {
        if limit == 0 {
            return Err(LexiconError::InvalidLimit);
        }
        let source: &[String] = match kind {
            SuggestKind::Object => &self.object_categories,
            SuggestKind::Verb(op) => self.verb_sets.get(op).map_or(&[], Vec::as_slice),
            SuggestKind::Action(kw) => self.keyword_verbs.get(kw).map_or(&[], Vec::as_slice),
        };
        let prefix = prefix.unwrap_or("").trim().to_lowercase();
        Ok(source.iter().filter(|s| s.to_lowercase().starts_with(&prefix)).take(limit).cloned().collect())
    }

    pub fn is_category(&self, name: &str) -> bool {
        self.object_categories.binary_search_by(|c| c.as_str().cmp(name)).is_ok()
    }
}
