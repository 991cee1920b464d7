//! `storygen` and `comicgen`.

use std::path::{Path, PathBuf};

use codetoon_core::pipeline::{generate_comic, story, PipelineError, StoryInput};
use codetoon_core::{ComposeOptions, Layout, SpriteSet, Unexecuted};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Pipeline(#[from] PipelineError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {detail}")]
    BadStory { path: PathBuf, detail: String },
}

fn read(path: &Path) -> Result<String, CommandError> {
    std::fs::read_to_string(path).map_err(|source| CommandError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, contents: &str) -> Result<(), CommandError> {
    std::fs::write(path, contents).map_err(|source| CommandError::Io { path: path.to_path_buf(), source })
}

/// Story template JSON for the program in `input`.
pub fn storygen(input: &Path) -> Result<String, CommandError> {
    let (_, template) = story(&read(input)?)?;
    let mut json = serde_json::to_string_pretty(&template).expect("template serializes");
    json.push('\n');
    Ok(json)
}

#[derive(Debug, Clone)]
pub struct ComicArgs {
    pub input: PathBuf,
    pub story: Option<PathBuf>,
    pub out: PathBuf,
    pub iterations: u32,
    pub unexecuted: Unexecuted,
}

/// Writes the SVG to `args.out` and the comic description next to it with a
/// `.json` extension. Returns the sidecar path.
pub fn comicgen(args: &ComicArgs, sprites: &SpriteSet, layout: &Layout) -> Result<PathBuf, CommandError> {
    let code = read(&args.input)?;
    let (_, fresh) = story(&code)?;
    let fills = match &args.story {
        Some(path) => {
            let input: StoryInput = serde_json::from_str(&read(path)?)
                .map_err(|e| CommandError::BadStory { path: path.clone(), detail: e.to_string() })?;
            input.fills_for(&fresh)?
        }
        None => Default::default(),
    };
    let options =
        ComposeOptions { show_unexecuted: args.unexecuted, iterations_shown: args.iterations, ..Default::default() };
    let out = generate_comic(&code, &fills, &options, sprites, layout)?;
    write(&args.out, &out.svg)?;
    let sidecar = args.out.with_extension("json");
    let mut doc = serde_json::to_string_pretty(&out.doc).expect("doc serializes");
    doc.push('\n');
    write(&sidecar, &doc)?;
    Ok(sidecar)
}
