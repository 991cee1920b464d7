//! End-to-end orchestration shared by the CLI and the HTTP service.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::CodeAst;
use crate::composer::{compose, ComicDoc, ComposeError, ComposeOptions};
use crate::frontend::{parse, ParseError};
use crate::lexicon::{Lexicon, LexiconError};
use crate::render::{render_svg, Layout};
use crate::sprites::{SpriteError, SpriteSet};
use crate::story::{build_story_template, StoryError, StoryTemplate};
use crate::tracer::{trace, ExecutionTrace, TraceLimits, DEFAULT_MAX_EVENTS, DEFAULT_MAX_ITERATIONS};

pub const PROJECT_VERSION: u32 = 1;
pub const DATA_DIR_ENV: &str = "CODETOON_DATA";
pub const LEXICON_FILE: &str = "lexicon.json";
pub const SPRITES_FILE: &str = "sprites.ndjson";
pub const EXAMPLES_FILE: &str = "examples.json";

const BUNDLED_EXAMPLES: &str = include_str!("../data/examples.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example {
    pub concept: String,
    pub title: String,
    pub code: String,
}

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Sprites(#[from] SpriteError),
    #[error("examples: {0}")]
    Examples(String),
}

/// Read-only data shared by every request.
#[derive(Debug, Clone)]
pub struct Resources {
    pub lexicon: Lexicon,
    pub sprites: SpriteSet,
    pub examples: Vec<Example>,
}

impl Resources {
    pub fn bundled() -> Resources {
        Resources {
            lexicon: Lexicon::bundled(),
            sprites: SpriteSet::bundled(),
            examples: serde_json::from_str(BUNDLED_EXAMPLES).expect("bundled examples are valid"),
        }
    }

    /// Loads whichever resource files exist in `dir`, using the bundled copy
    /// for the rest.
    pub fn from_dir(dir: &Path) -> Result<Resources, ResourceError> {
        let mut resources = Resources::bundled();
        let path = dir.join(LEXICON_FILE);
        if path.exists() {
            resources.lexicon = Lexicon::load(&path)?;
        }
        let path = dir.join(SPRITES_FILE);
        if path.exists() {
            resources.sprites = SpriteSet::load(&path)?;
        }
        let path = dir.join(EXAMPLES_FILE);
        if path.exists() {
            let text = std::fs::read_to_string(&path).map_err(|e| ResourceError::Examples(e.to_string()))?;
            resources.examples = serde_json::from_str(&text).map_err(|e| ResourceError::Examples(e.to_string()))?;
        }
        Ok(resources)
    }

    /// Uses `$CODETOON_DATA` when set, otherwise the bundled data.
    pub fn from_env() -> Result<Resources, ResourceError> {
        match std::env::var_os(DATA_DIR_ENV) {
            Some(dir) => Resources::from_dir(&PathBuf::from(dir)),
            None => Ok(Resources::bundled()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error("fill for slot '{slot_id}' is empty")]
    EmptyFill { slot_id: String },
    #[error("invalid request: {detail}")]
    Invalid { detail: String },
}

impl From<StoryError> for PipelineError {
    fn from(e: StoryError) -> Self {
        match e {
            StoryError::UnknownSlot { slot_id } => PipelineError::Compose(ComposeError::StructureChanged {
                detail: format!("slot '{slot_id}' does not exist in the story for this code"),
            }),
            StoryError::EmptyFill { slot_id } => PipelineError::EmptyFill { slot_id },
        }
    }
}

impl PipelineError {
    /// Machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::Parse(e) => e.code(),
            PipelineError::Compose(ComposeError::MismatchedInputs { .. }) => "mismatched_inputs",
            PipelineError::Compose(ComposeError::StructureChanged { .. }) => "structure_changed",
            PipelineError::Compose(ComposeError::InvalidOptions { .. }) => "invalid_options",
            PipelineError::EmptyFill { .. } => "empty_fill",
            PipelineError::Invalid { .. } => "invalid_request",
        }
    }

    /// Offending source line, when there is one.
    pub fn line(&self) -> Option<u32> {
        match self {
            PipelineError::Parse(e) => Some(e.line()),
            _ => None,
        }
    }
}

/// What a `--story` file or request may hold: a full template (its fills are
/// used) or a plain map from slot id to fill.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StoryInput {
    Template(StoryTemplate),
    Fills(BTreeMap<String, String>),
}

impl StoryInput {
    /// Fills to apply to `fresh`, the template built from the current code.
    pub fn fills_for(&self, fresh: &StoryTemplate) -> Result<BTreeMap<String, String>, PipelineError> {
        match self {
            StoryInput::Fills(fills) => Ok(fills.clone()),
            StoryInput::Template(given) if given.same_skeleton(fresh) => Ok(given.fills()),
            StoryInput::Template(_) => Err(PipelineError::Compose(ComposeError::StructureChanged {
                detail: "the story template does not match the code".into(),
            })),
        }
    }
}

/// Saved authoring session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Project {
    pub version: u32,
    pub code: String,
    #[serde(default)]
    pub fills: BTreeMap<String, String>,
    #[serde(default)]
    pub options: ComposeOptions,
}

impl Project {
    pub fn new(code: impl Into<String>) -> Project {
        Project { version: PROJECT_VERSION, code: code.into(), fills: BTreeMap::new(), options: ComposeOptions::default() }
    }

    /// Checks the version, that the code parses and that every fill names a
    /// slot of the code's story.
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.version != PROJECT_VERSION {
            return Err(PipelineError::Invalid {
                detail: format!("unsupported project version {}, expected {PROJECT_VERSION}", self.version),
            });
        }
        let (_, template) = story(&self.code)?;
        template.with_fills(&self.fills)?;
        Ok(())
    }
}

pub fn story(code: &str) -> Result<(CodeAst, StoryTemplate), PipelineError> {
    let ast = parse(code)?;
    let template = build_story_template(&ast);
    Ok((ast, template))
}

/// Trace limits that can feed `options.iterations_shown` iterations.
pub fn limits_for(options: &ComposeOptions) -> TraceLimits {
    let iterations = options.iterations_shown.max(DEFAULT_MAX_ITERATIONS);
    TraceLimits::new(iterations, DEFAULT_MAX_EVENTS).expect("limits are positive")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComicOutput {
    pub template: StoryTemplate,
    pub trace: ExecutionTrace,
    pub doc: ComicDoc,
    pub svg: String,
}

/// Parse, build the story, apply fills, trace, compose and render.
pub fn generate_comic(
    code: &str,
    fills: &BTreeMap<String, String>,
    options: &ComposeOptions,
    sprites: &SpriteSet,
    layout: &Layout,
) -> Result<ComicOutput, PipelineError> {
    layout.validate().map_err(|detail| PipelineError::Invalid { detail })?;
    let (ast, template) = story(code)?;
    let template = template.with_fills(fills)?;
    let trace = trace(&ast, limits_for(options));
    let doc = compose(&ast, &template, &trace, options)?;
    let svg = render_svg(&doc, sprites, layout);
    Ok(ComicOutput { template, trace, doc, svg })
}
