//! Code-to-comic engine.
//!
//! A program in a small Python subset is parsed ([`frontend`]), executed with
//! a bounded tracing interpreter ([`tracer`]), turned into a fill-in-the-blank
//! story aligned line by line with the code ([`story`]), composed into a comic
//! description whose rows follow the code structure ([`composer`]) and drawn
//! to SVG ([`render`]). [`pipeline`] wires the stages together for the CLI and
//! the HTTP service.

pub mod ast;
pub mod composer;
pub mod frontend;
pub mod lexicon;
pub mod pipeline;
pub mod render;
pub mod sprites;
pub mod story;
pub mod tracer;

pub use ast::{BinOp, CmpOp, CodeAst, Expr, Stmt, StmtKind};
pub use composer::{compose, update, ComicDoc, ComposeError, ComposeOptions, Element, Panel, PanelKind, Phase, Row, Unexecuted};
pub use frontend::{parse, parse_bytes, parse_with, pretty_print, ParseError, ParseOptions};
pub use lexicon::{Lexicon, LexiconError, SuggestKind};
pub use render::{render_svg, Layout};
pub use sprites::{Sprite, SpriteError, SpriteSet};
pub use story::{build_story_template, fill_slot, render_story_text, SlotKind, StoryError, StoryTemplate};
pub use tracer::{trace, Event, ExecutionTrace, TraceLimits, Value};
