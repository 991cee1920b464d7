//! Object sketches as normalized polylines, plus built-in glyphs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const STICK_FIGURE: &str = "stick-figure";
pub const BUBBLE: &str = "bubble";
pub const FRAME: &str = "frame";
pub const PLACEHOLDER: &str = "placeholder";

const BUNDLED: &str = include_str!("../data/sprites.ndjson");

pub type Point = [f64; 2];
pub type Stroke = Vec<Point>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sprite {
    pub name: String,
    pub strokes: Vec<Stroke>,
    /// Set on the placeholder returned for a missing category.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Error)]
pub enum SpriteError {
    #[error("sprite format error at record {record}: {detail}")]
    Format { record: usize, detail: String },
    #[error("cannot read sprites: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpriteSet {
    entries: BTreeMap<String, Sprite>,
}

impl Default for SpriteSet {
    fn default() -> Self {
        SpriteSet::builtins()
    }
}

impl SpriteSet {
    /// Only the built-in glyphs.
    pub fn builtins() -> SpriteSet {
        let entries = builtin_sprites().into_iter().map(|s| (s.name.clone(), s)).collect();
        SpriteSet { entries }
    }

    pub fn bundled() -> SpriteSet {
        SpriteSet::from_ndjson(BUNDLED).expect("bundled sprites are valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SpriteSet, SpriteError> {
        SpriteSet::from_ndjson(&std::fs::read_to_string(path)?)
    }

    /// Parses one `{"name", "strokes"}` record per non-blank line. Built-ins
    /// are always present; a record with a built-in name replaces it.
    pub fn from_ndjson(text: &str) -> Result<SpriteSet, SpriteError> {
        let mut set = SpriteSet::builtins();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let record = i + 1;
            let sprite: Sprite =
                serde_json::from_str(line).map_err(|e| SpriteError::Format { record, detail: e.to_string() })?;
            validate(&sprite).map_err(|detail| SpriteError::Format { record, detail })?;
            set.entries.insert(sprite.name.clone(), sprite);
        }
        Ok(set)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact lookup; a miss returns the placeholder labeled with `category`.
    pub fn get(&self, category: &str) -> Sprite {
        match self.entries.get(category) {
            Some(sprite) => sprite.clone(),
            None => self.placeholder(category),
        }
    }

    /// Looks up free text such as a story fill. Tries the exact lowercase
    /// text, then any known category mentioned as whole words in the text
    /// (longest first), then a category whose last word is the text's last
    /// word ("phone" finds "cell phone"). Falls back to the placeholder.
    pub fn resolve(&self, text: &str) -> Sprite {
        let key = text.trim().to_lowercase();
        if let Some(sprite) = self.entries.get(&key) {
            return sprite.clone();
        }
        let words: Vec<&str> =
            key.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()).collect();
        let mentioned = self
            .objects()
            .filter(|name| {
                let parts: Vec<&str> = name.split(' ').collect();
                words.windows(parts.len()).any(|w| w == parts.as_slice())
            })
            .max_by_key(|name| (name.len(), std::cmp::Reverse(*name)));
        if let Some(name) = mentioned {
            return self.entries[name].clone();
        }
        if let Some(last) = words.last() {
            if let Some(name) = self.objects().find(|name| name.rsplit(' ').next() == Some(last)) {
                return self.entries[name].clone();
            }
        }
        self.placeholder(text.trim())
    }

    fn objects(&self) -> impl Iterator<Item = &str> {
        self.names().filter(|n| ![STICK_FIGURE, BUBBLE, FRAME, PLACEHOLDER].contains(n))
    }

    fn placeholder(&self, label: &str) -> Sprite {
        let mut sprite = self.entries[PLACEHOLDER].clone();
        sprite.label = Some(label.to_string());
        sprite
    }
}

fn validate(sprite: &Sprite) -> Result<(), String> {
    if sprite.name.trim().is_empty() {
        return Err("sprite name is empty".into());
    }
    if sprite.name != sprite.name.to_lowercase() {
        return Err(format!("sprite name '{}' must be lowercase", sprite.name));
    }
    if sprite.strokes.is_empty() {
        return Err(format!("sprite '{}' has no strokes", sprite.name));
    }
    for (i, stroke) in sprite.strokes.iter().enumerate() {
        if stroke.len() < 2 {
            return Err(format!("stroke {i} of '{}' has fewer than 2 points", sprite.name));
        }
        if let Some(p) = stroke.iter().find(|p| !p.iter().all(|c| (0.0..=1.0).contains(c))) {
            return Err(format!("point ({}, {}) of '{}' is outside [0,1]", p[0], p[1], sprite.name));
        }
    }
    Ok(())
}

fn circle(cx: f64, cy: f64, r: f64, steps: usize) -> Stroke {
    (0..=steps)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / steps as f64;
            [round3(cx + r * a.cos()), round3(cy + r * a.sin())]
        })
        .collect()
}

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

fn builtin_sprites() -> Vec<Sprite> {
    let sprite = |name: &str, strokes: Vec<Stroke>| Sprite { name: name.into(), strokes, label: None };
    vec![
        sprite(
            STICK_FIGURE,
            vec![
                circle(0.5, 0.18, 0.12, 16),
                vec![[0.5, 0.3], [0.5, 0.65]],
                vec![[0.25, 0.45], [0.5, 0.4], [0.75, 0.45]],
                vec![[0.3, 0.95], [0.5, 0.65], [0.7, 0.95]],
            ],
        ),
        sprite(
            BUBBLE,
            vec![vec![
                [0.1, 0.05],
                [0.9, 0.05],
                [0.95, 0.1],
                [0.95, 0.7],
                [0.9, 0.75],
                [0.35, 0.75],
                [0.2, 0.95],
                [0.25, 0.75],
                [0.1, 0.75],
                [0.05, 0.7],
                [0.05, 0.1],
                [0.1, 0.05],
            ]],
        ),
        sprite(FRAME, vec![vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]]),
        sprite(
            PLACEHOLDER,
            vec![
                vec![[0.15, 0.15], [0.85, 0.15], [0.85, 0.85], [0.15, 0.85], [0.15, 0.15]],
                vec![[0.15, 0.15], [0.85, 0.85]],
                vec![[0.85, 0.15], [0.15, 0.85]],
            ],
        ),
    ]
}
