//! Story templates: one prose line per code line, with fillable slots.
//!
//! Every code token that can carry a metaphor becomes a [`Slot`] whose
//! default text is the token itself, so an unfilled template reads like a
//! literal translation of the code ("x is 5") and a filled one like a story
//! ("time is 5 o'clock").

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{CmpOp, CodeAst, Expr, Stmt, StmtKind};
use crate::frontend::{expr_text, quote};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlotKind {
    Object,
    Verb,
    Value,
    Action,
    ConditionPhrase,
    FunctionName,
}

impl SlotKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SlotKind::Object => "object",
            SlotKind::Verb => "verb",
            SlotKind::Value => "value",
            SlotKind::Action => "action",
            SlotKind::ConditionPhrase => "condition-phrase",
            SlotKind::FunctionName => "function-name",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub id: String,
    pub kind: SlotKind,
    pub default: String,
    #[serde(default)]
    pub fill: Option<String>,
}

impl Slot {
    /// The fill if present, otherwise the default.
    pub fn text(&self) -> &str {
        self.fill.as_deref().unwrap_or(&self.default)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Segment {
    Text { text: String },
    Slot(Slot),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoryLine {
    pub code_line: u32,
    pub depth: u32,
    pub segments: Vec<Segment>,
}

impl StoryLine {
    pub fn slots(&self) -> impl Iterator<Item = &Slot> {
        self.segments.iter().filter_map(|s| match s {
            Segment::Slot(slot) => Some(slot),
            Segment::Text { .. } => None,
        })
    }

    pub fn first_slot(&self, kind: SlotKind) -> Option<&Slot> {
        self.slots().find(|s| s.kind == kind)
    }

    /// Prose for this line without indentation.
    pub fn text(&self) -> String {
        self.text_with(|slot| slot.text().to_string())
    }

    /// Prose with a custom rendering for each slot. Empty pieces are skipped
    /// and punctuation attaches to the preceding word.
    pub fn text_with(&self, mut slot_text: impl FnMut(&Slot) -> String) -> String {
        let mut out = String::new();
        for segment in &self.segments {
            let piece = match segment {
                Segment::Text { text } => text.clone(),
                Segment::Slot(slot) => slot_text(slot),
            };
            if piece.is_empty() {
                continue;
            }
            let attaches = piece.starts_with([',', '.', '?', '!', ':', ';']);
            if !out.is_empty() && !attaches {
                out.push(' ');
            }
            out.push_str(&piece);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StoryTemplate {
    /// Hash of the AST the template was built from.
    #[serde(default)]
    pub source_hash: String,
    pub lines: Vec<StoryLine>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum StoryError {
    #[error("unknown slot '{slot_id}'")]
    UnknownSlot { slot_id: String },
    #[error("fill for slot '{slot_id}' is empty")]
    EmptyFill { slot_id: String },
}

impl StoryTemplate {
    pub fn slots(&self) -> impl Iterator<Item = &Slot> {
        self.lines.iter().flat_map(StoryLine::slots)
    }

    pub fn slot(&self, id: &str) -> Option<&Slot> {
        self.slots().find(|s| s.id == id)
    }

    pub fn line(&self, code_line: u32) -> Option<&StoryLine> {
        self.lines.iter().find(|l| l.code_line == code_line)
    }

    /// Current fills keyed by slot id.
    pub fn fills(&self) -> BTreeMap<String, String> {
        self.slots().filter_map(|s| Some((s.id.clone(), s.fill.clone()?))).collect()
    }

    /// Applies every fill in `fills`, failing on the first unknown id or empty text.
    pub fn with_fills<'a, I>(&self, fills: I) -> Result<StoryTemplate, StoryError>
    where
        I: IntoIterator<Item = (&'a String, &'a String)>,
    {
        let mut out = self.clone();
        for (id, text) in fills {
            out = fill_slot(&out, id, text)?;
        }
        Ok(out)
    }

    /// True when both templates have the same lines and slots, ignoring fills.
    pub fn same_skeleton(&self, other: &StoryTemplate) -> bool {
        fn strip(t: &StoryTemplate) -> Vec<StoryLine> {
            let mut lines = t.lines.clone();
            for segment in lines.iter_mut().flat_map(|l| l.segments.iter_mut()) {
                if let Segment::Slot(slot) = segment {
                    slot.fill = None;
                }
            }
            lines
        }
        strip(self) == strip(other)
    }
}

pub fn build_story_template(ast: &CodeAst) -> StoryTemplate {
    let lines = ast
        .walk()
        .map(|stmt| StoryLine { code_line: stmt.line, depth: stmt.depth, segments: LineBuilder::new(stmt.line).build(stmt) })
        .collect();
    StoryTemplate { source_hash: ast.source_hash(), lines }
}

/// Returns a copy of `template` with one slot filled. The text is trimmed.
pub fn fill_slot(template: &StoryTemplate, slot_id: &str, text: &str) -> Result<StoryTemplate, StoryError> {
    let text = text.trim();
    let mut out = template.clone();
    let slot = out
        .lines
        .iter_mut()
        .flat_map(|l| l.segments.iter_mut())
        .find_map(|s| match s {
            Segment::Slot(slot) if slot.id == slot_id => Some(slot),
            _ => None,
        })
        .ok_or_else(|| StoryError::UnknownSlot { slot_id: slot_id.to_string() })?;
    if text.is_empty() {
        return Err(StoryError::EmptyFill { slot_id: slot_id.to_string() });
    }
    slot.fill = Some(text.to_string());
    Ok(out)
}

/// One prose line per story line, indented two spaces per depth level.
pub fn render_story_text(template: &StoryTemplate) -> Vec<String> {
    template.lines.iter().map(|line| format!("{}{}", "  ".repeat(line.depth as usize), line.text())).collect()
}

/// Default verb phrase for a comparison operator.
pub fn comparison_verb(op: CmpOp) -> &'static str {
    match op {
        CmpOp::Eq => "is",
        CmpOp::NotEq => "is not",
        CmpOp::Lt => "is less than",
        CmpOp::Gt => "is greater than",
        CmpOp::LtE => "is at most",
        CmpOp::GtE => "is at least",
    }
}

struct LineBuilder {
    line: u32,
    used: HashMap<SlotKind, u32>,
    segments: Vec<Segment>,
}

impl LineBuilder {
    fn new(line: u32) -> Self {
        LineBuilder { line, used: HashMap::new(), segments: Vec::new() }
    }

    fn text(&mut self, text: &str) {
        self.segments.push(Segment::Text { text: text.to_string() });
    }

    fn slot(&mut self, kind: SlotKind, default: impl Into<String>) {
        let n = self.used.entry(kind).or_insert(0);
        *n += 1;
        let id = match *n {
            1 => format!("L{}-{}", self.line, kind.as_str()),
            n => format!("L{}-{}-{n}", self.line, kind.as_str()),
        };
        self.segments.push(Segment::Slot(Slot { id, kind, default: default.into(), fill: None }));
    }

    fn condition(&mut self, cond: &Expr) {
        match cond {
            Expr::Compare { op, left, right } => {
                self.slot(SlotKind::Object, expr_text(left));
                self.slot(SlotKind::Verb, comparison_verb(*op));
                self.slot(SlotKind::Value, expr_text(right));
            }
            other => self.slot(SlotKind::ConditionPhrase, expr_text(other)),
        }
    }

    fn build(mut self, stmt: &Stmt) -> Vec<Segment> {
        match &stmt.kind {
            StmtKind::Assign { target, value } => {
                self.slot(SlotKind::Object, target.as_str());
                self.slot(SlotKind::Verb, "is");
                self.slot(SlotKind::Value, expr_text(value));
            }
            StmtKind::If { cond, .. } => {
                self.text("if");
                self.condition(cond);
            }
            StmtKind::While { cond, .. } => {
                self.text("while");
                self.condition(cond);
            }
            StmtKind::ForRange { count, .. } => {
                self.text("repeat");
                self.slot(SlotKind::Value, expr_text(count));
                self.text("times");
            }
            StmtKind::FuncDef { name, params, .. } => {
                self.text("to");
                self.slot(SlotKind::FunctionName, name.as_str());
                for param in params {
                    self.slot(SlotKind::Object, param.as_str());
                }
            }
            StmtKind::CallStmt { callee, args } if callee == "print" => {
                // The speaker starts empty so the comic shows the stick figure.
                self.slot(SlotKind::Object, "");
                self.slot(SlotKind::Action, "say");
                self.text(",");
                for arg in args {
                    let default = match arg {
                        Expr::Str { value } => quote(value),
                        other => format!("'{}'", expr_text(other)),
                    };
                    self.slot(SlotKind::Value, default);
                }
            }
            StmtKind::CallStmt { callee, args } => {
                self.slot(SlotKind::FunctionName, callee.as_str());
                for arg in args {
                    self.slot(SlotKind::Value, expr_text(arg));
                }
            }
            StmtKind::Return { value } => {
                self.text("give back");
                self.slot(SlotKind::Value, expr_text(value));
            }
        }
        self.segments
    }
}
