//! Builds a [`ComicDoc`] from code, story and trace.
//!
//! Each statement becomes one row whose panels follow a fixed narrative-phase
//! template for its construct, prefixed by one gray indent panel per depth
//! level. Loops are the exception to one row per line: a loop contributes a
//! header row, then for every shown iteration a slim marker row ("i = 0")
//! followed by the body rows with that iteration's traced values.
//!
//! | construct       | non-indent panels                                   |
//! |-----------------|-----------------------------------------------------|
//! | assignment      | Establisher intro, Initial statement                |
//! | `if`            | Initial question, Prolongation answer               |
//! | loop header     | Establisher statement (+ Release ellipsis)          |
//! | iteration       | Establisher iteration-marker                        |
//! | `def`           | Establisher statement                               |
//! | `print`         | Peak output                                         |
//! | other call      | Initial statement                                   |
//! | `return`        | Release statement                                   |
//!
//! Which elements a panel holds depends on the code and the trace, never on
//! slot fills, so refilling a story only changes texts and sprite categories.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{CodeAst, Expr, Stmt, StmtKind};
use crate::frontend::expr_text;
use crate::sprites::STICK_FIGURE;
use crate::story::{build_story_template, Slot, SlotKind, StoryLine, StoryTemplate};
use crate::tracer::{Event, ExecutionTrace, IterPath, IterStep, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Establisher,
    Initial,
    Prolongation,
    Peak,
    Release,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PanelKind {
    Intro,
    Statement,
    Question,
    Answer,
    Output,
    IterationMarker,
    Indent,
    Ellipsis,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Element {
    Text { content: String },
    /// `speaker` is a sprite category or `stick-figure`.
    SpeechBubble { content: String, speaker: String },
    Sprite {
        category: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Character,
}

impl Element {
    fn text(content: impl Into<String>) -> Element {
        Element::Text { content: content.into() }
    }

    fn discriminant(&self) -> u8 {
        match self {
            Element::Text { .. } => 0,
            Element::SpeechBubble { .. } => 1,
            Element::Sprite { .. } => 2,
            Element::Character => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Panel {
    /// `None` for indent panels, which stand for structure rather than story.
    pub phase: Option<Phase>,
    pub kind: PanelKind,
    pub elements: Vec<Element>,
}

impl Panel {
    fn new(phase: Phase, kind: PanelKind, elements: Vec<Element>) -> Panel {
        Panel { phase: Some(phase), kind, elements }
    }

    fn indent() -> Panel {
        Panel { phase: None, kind: PanelKind::Indent, elements: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub code_line: u32,
    /// Loop iterations enclosing this row, outermost first; empty outside loops.
    pub iteration: IterPath,
    pub executed: bool,
    pub panels: Vec<Panel>,
}

impl Row {
    pub fn indent_count(&self) -> usize {
        self.panels.iter().take_while(|p| p.kind == PanelKind::Indent).count()
    }

    /// Phases of the non-indent panels.
    pub fn phases(&self) -> Vec<Phase> {
        self.panels.iter().filter_map(|p| p.phase).collect()
    }

    pub fn kinds(&self) -> Vec<PanelKind> {
        self.panels.iter().map(|p| p.kind).collect()
    }

    pub fn is_marker(&self) -> bool {
        self.panels.iter().any(|p| p.kind == PanelKind::IterationMarker)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unexecuted {
    Full,
    #[default]
    Dimmed,
    Hidden,
}

impl std::str::FromStr for Unexecuted {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Unexecuted::Full),
            "dimmed" => Ok(Unexecuted::Dimmed),
            "hidden" => Ok(Unexecuted::Hidden),
            other => Err(format!("expected full, dimmed or hidden, got '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ComposeOptions {
    pub show_unexecuted: Unexecuted,
    pub iterations_shown: u32,
    pub ellipsis_on_truncation: bool,
}

impl Default for ComposeOptions {
    fn default() -> Self {
        ComposeOptions { show_unexecuted: Unexecuted::Dimmed, iterations_shown: 3, ellipsis_on_truncation: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComicDoc {
    pub source_hash: String,
    /// How the renderer should treat rows with `executed == false`.
    pub unexecuted: Unexecuted,
    pub rows: Vec<Row>,
}

type PanelShape = (Option<Phase>, PanelKind, Vec<u8>);

/// Everything about a doc except its texts, bubble contents and sprite categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocShape(Vec<(u32, IterPath, bool, Vec<PanelShape>)>);

impl ComicDoc {
    pub fn shape(&self) -> DocShape {
        DocShape(
            self.rows
                .iter()
                .map(|r| {
                    let panels = r
                        .panels
                        .iter()
                        .map(|p| (p.phase, p.kind, p.elements.iter().map(Element::discriminant).collect()))
                        .collect();
                    (r.code_line, r.iteration.clone(), r.executed, panels)
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum ComposeError {
    #[error("mismatched inputs: {detail}")]
    MismatchedInputs { detail: String },
    #[error("structure changed: {detail}")]
    StructureChanged { detail: String },
    #[error("invalid options: {detail}")]
    InvalidOptions { detail: String },
}

pub fn compose(
    ast: &CodeAst,
    template: &StoryTemplate,
    trace: &ExecutionTrace,
    options: &ComposeOptions,
) -> Result<ComicDoc, ComposeError> {
    if options.iterations_shown == 0 {
        return Err(ComposeError::InvalidOptions { detail: "iterations_shown must be at least 1".into() });
    }
    let hash = ast.source_hash();
    let mismatch = |detail: &str| ComposeError::MismatchedInputs { detail: detail.to_string() };
    if template.source_hash != hash {
        return Err(mismatch("story template was built from different code"));
    }
    if trace.source_hash != hash {
        return Err(mismatch("trace was produced from different code"));
    }
    let lines: BTreeMap<u32, &StoryLine> = template.lines.iter().map(|l| (l.code_line, l)).collect();
    if lines.len() != template.lines.len() || !ast.walk().all(|s| lines.contains_key(&s.line)) {
        return Err(mismatch("story template lines do not match the code"));
    }

    let mut events: HashMap<(u32, &[IterStep]), Vec<&Event>> = HashMap::new();
    let mut first_path: HashMap<u32, &[IterStep]> = HashMap::new();
    for event in &trace.events {
        events.entry((event.line(), event.iter_path())).or_default().push(event);
        first_path.entry(event.line()).or_insert(event.iter_path());
    }
    let mut composer = Composer { lines, events, first_path, options, rows: Vec::new() };
    composer.block(&ast.statements, &Vec::new());

    let mut rows = composer.rows;
    if options.show_unexecuted == Unexecuted::Hidden {
        rows.retain(|r| r.executed);
    }
    Ok(ComicDoc { source_hash: hash, unexecuted: options.show_unexecuted, rows })
}

/// Recomposes after fills changed, refusing anything that would alter the
/// row and panel structure of `doc`.
pub fn update(
    doc: &ComicDoc,
    ast: &CodeAst,
    new_template: &StoryTemplate,
    trace: &ExecutionTrace,
    options: &ComposeOptions,
) -> Result<ComicDoc, ComposeError> {
    let changed = |detail: &str| ComposeError::StructureChanged { detail: detail.to_string() };
    if doc.source_hash != ast.source_hash() {
        return Err(changed("the code changed since the comic was composed"));
    }
    if new_template.source_hash != doc.source_hash || !new_template.same_skeleton(&build_story_template(ast)) {
        return Err(changed("the story template's lines or slots differ from the code"));
    }
    let fresh = compose(ast, new_template, trace, options)?;
    if fresh.shape() != doc.shape() {
        return Err(changed("the comic layout would change"));
    }
    Ok(fresh)
}

struct Composer<'a> {
    lines: BTreeMap<u32, &'a StoryLine>,
    events: HashMap<(u32, &'a [IterStep]), Vec<&'a Event>>,
    first_path: HashMap<u32, &'a [IterStep]>,
    options: &'a ComposeOptions,
    rows: Vec<Row>,
}

impl<'a> Composer<'a> {
    fn events_at(&self, line: u32, path: &[IterStep]) -> Vec<&'a Event> {
        self.events.get(&(line, path)).cloned().unwrap_or_default()
    }

    fn push(&mut self, stmt: &Stmt, path: &IterPath, executed: bool, panels: Vec<Panel>) {
        let mut all: Vec<Panel> = (0..stmt.depth).map(|_| Panel::indent()).collect();
        all.extend(panels);
        self.rows.push(Row { code_line: stmt.line, iteration: path.clone(), executed, panels: all });
    }

    fn block(&mut self, stmts: &[Stmt], path: &IterPath) {
        for stmt in stmts {
            self.stmt(stmt, path);
        }
    }

    fn stmt(&mut self, stmt: &Stmt, path: &IterPath) {
        let line = self.lines[&stmt.line];
        let events = self.events_at(stmt.line, path);
        let executed = !events.is_empty();
        match &stmt.kind {
            StmtKind::Assign { target, value } => {
                let traced = events.iter().find_map(|e| match e {
                    Event::Assigned { value, .. } => Some(value),
                    _ => None,
                });
                let object = line.first_slot(SlotKind::Object);
                let mut statement = vec![sprite_for(object), Element::text(with_value(line, value, traced))];
                if let (false, Some(v)) = (value.is_literal(), traced) {
                    statement.push(Element::text(format!("{target} = {}", v.literal_text())));
                }
                let intro = vec![sprite_for(object), Element::text(object.map_or("", Slot::text))];
                let panels =
                    vec![Panel::new(Phase::Establisher, PanelKind::Intro, intro), Panel::new(Phase::Initial, PanelKind::Statement, statement)];
                self.push(stmt, path, executed, panels);
            }
            StmtKind::If { body, .. } => {
                let outcome = events.iter().find_map(|e| match e {
                    Event::CondEvaluated { outcome, .. } => Some(*outcome),
                    _ => None,
                });
                let object = line.first_slot(SlotKind::Object);
                let answer = match outcome {
                    Some(true) => "yes",
                    Some(false) => "no",
                    None => "?",
                };
                let panels = vec![
                    Panel::new(Phase::Initial, PanelKind::Question, vec![sprite_for(object), Element::text(question(line))]),
                    Panel::new(
                        Phase::Prolongation,
                        PanelKind::Answer,
                        vec![
                            Element::Character,
                            Element::SpeechBubble { content: answer.into(), speaker: STICK_FIGURE.into() },
                        ],
                    ),
                ];
                self.push(stmt, path, executed, panels);
                self.block(body, path);
            }
            StmtKind::While { body, .. } | StmtKind::ForRange { body, .. } => self.loop_region(stmt, body, path),
            StmtKind::FuncDef { body, .. } => {
                let panels = vec![Panel::new(
                    Phase::Establisher,
                    PanelKind::Statement,
                    vec![Element::Character, Element::text(line.text())],
                )];
                self.push(stmt, path, executed, panels);
                // The body is drawn once, with values from its first traced run.
                let context = body
                    .first()
                    .and_then(|s| self.first_path.get(&s.line))
                    .map_or_else(|| path.clone(), |p| p.to_vec());
                self.block(body, &context);
            }
            StmtKind::CallStmt { callee, .. } if callee == "print" => {
                let printed = events.iter().find_map(|e| match e {
                    Event::Printed { text, .. } => Some(text.as_str()),
                    _ => None,
                });
                let values: Vec<&Slot> = line.slots().filter(|s| s.kind == SlotKind::Value).collect();
                let joined = values.iter().map(|s| s.text()).collect::<Vec<_>>().join(" ");
                let content = match printed {
                    Some(text) if values.iter().all(|s| s.fill.is_none()) => text.to_string(),
                    _ => joined,
                };
                let speaker = category_for(line.first_slot(SlotKind::Object));
                let elements = vec![
                    Element::Sprite { category: speaker.clone(), label: None },
                    Element::SpeechBubble { content, speaker },
                ];
                self.push(stmt, path, executed, vec![Panel::new(Phase::Peak, PanelKind::Output, elements)]);
            }
            StmtKind::CallStmt { .. } => {
                let elements = vec![Element::Character, Element::text(line.text())];
                self.push(stmt, path, executed, vec![Panel::new(Phase::Initial, PanelKind::Statement, elements)]);
            }
            StmtKind::Return { value } => {
                let traced = events.iter().find_map(|e| match e {
                    Event::Returned { value, .. } => Some(value),
                    _ => None,
                });
                let mut elements = vec![Element::text(with_value(line, value, traced))];
                if let (false, Some(v)) = (value.is_literal(), traced) {
                    elements.push(Element::text(format!("{} = {}", expr_text(value), v.literal_text())));
                }
                self.push(stmt, path, executed, vec![Panel::new(Phase::Release, PanelKind::Statement, elements)]);
            }
        }
    }

    fn loop_region(&mut self, stmt: &Stmt, body: &[Stmt], path: &IterPath) {
        let line = self.lines[&stmt.line];
        let events = self.events_at(stmt.line, path);
        let executed = !events.is_empty();
        let mut traced_count = None;
        let mut iterations = Vec::new();
        let mut capped = false;
        for event in events {
            match event {
                Event::LoopEntered { count, .. } => traced_count = *count,
                Event::IterationBegan { index, loop_var, .. } => iterations.push((*index, loop_var.clone())),
                Event::LoopCapped { .. } => capped = true,
                _ => {}
            }
        }
        let shown = iterations.len().min(self.options.iterations_shown as usize);
        let ellipsis = self.options.ellipsis_on_truncation && (capped || iterations.len() > shown);

        let header_text = match (&stmt.kind, traced_count) {
            (StmtKind::ForRange { count, .. }, Some(n)) => with_value(line, count, Some(&Value::Int(n))),
            _ => line.text(),
        };
        let mut panels = vec![Panel::new(Phase::Establisher, PanelKind::Statement, vec![Element::text(header_text)])];
        if ellipsis {
            panels.push(Panel::new(Phase::Release, PanelKind::Ellipsis, vec![Element::text("…")]));
        }
        self.push(stmt, path, executed, panels);

        if shown == 0 {
            // Never iterated: show the body once so the structure stays visible.
            self.block(body, path);
            return;
        }
        for (index, loop_var) in iterations.into_iter().take(shown) {
            let marker = match loop_var {
                Some(var) => format!("{var} = {index}"),
                None => format!("iteration {}", index + 1),
            };
            let mut inner = path.clone();
            inner.push(IterStep { line: stmt.line, index });
            let panels = vec![Panel::new(Phase::Establisher, PanelKind::IterationMarker, vec![Element::text(marker)])];
            self.push(stmt, &inner, true, panels);
            self.block(body, &inner);
        }
    }
}

fn category_for(object: Option<&Slot>) -> String {
    match object.and_then(|s| s.fill.as_deref()) {
        Some(fill) => fill.to_lowercase(),
        None => STICK_FIGURE.to_string(),
    }
}

fn sprite_for(object: Option<&Slot>) -> Element {
    Element::Sprite { category: category_for(object), label: None }
}

/// Line text where an unfilled value slot for a computed expression shows
/// the traced value instead of the expression.
fn with_value(line: &StoryLine, expr: &Expr, traced: Option<&Value>) -> String {
    let mut done = false;
    line.text_with(|slot| {
        if slot.kind == SlotKind::Value && !done {
            done = true;
            if let (None, false, Some(v)) = (&slot.fill, expr.is_literal(), traced) {
                return v.literal_text();
            }
        }
        slot.text().to_string()
    })
}

/// Condition line re-phrased as a question: "is x True?", "does apple taste good?".
fn question(line: &StoryLine) -> String {
    let (object, verb, value) = match (
        line.first_slot(SlotKind::Object),
        line.first_slot(SlotKind::Verb),
        line.first_slot(SlotKind::Value),
    ) {
        (Some(o), Some(v), Some(val)) => (o.text(), v.text(), val.text()),
        _ => {
            let phrase = line.first_slot(SlotKind::ConditionPhrase).map_or("", Slot::text);
            return format!("{phrase}?");
        }
    };
    let (first, rest) = verb.split_once(' ').unwrap_or((verb, ""));
    let parts: Vec<String> = if first.is_empty() {
        vec![object.into(), value.into()]
    } else if ["is", "are", "am", "was", "were"].contains(&first.to_lowercase().as_str()) {
        vec![first.into(), object.into(), rest.into(), value.into()]
    } else {
        vec!["does".into(), object.into(), base_form(first), rest.into(), value.into()]
    };
    let words: Vec<&str> = parts.iter().map(String::as_str).filter(|p| !p.is_empty()).collect();
    format!("{}?", words.join(" "))
}

/// Third-person singular to base form: "tastes" → "taste", "has" → "have".
fn base_form(verb: &str) -> String {
    let lower = verb.to_lowercase();
    match lower.as_str() {
        "has" => return "have".into(),
        "does" => return "do".into(),
        "goes" => return "go".into(),
        _ => {}
    }
    if let Some(stem) = lower.strip_suffix("ies") {
        if !stem.is_empty() {
            return format!("{}y", &verb[..stem.len()]);
        }
    }
    for suffix in ["sses", "shes", "ches", "xes", "zes"] {
        if lower.ends_with(suffix) {
            return verb[..verb.len() - 2].to_string();
        }
    }
    if lower.ends_with('s') && !lower.ends_with("ss") && lower.len() > 1 {
        return verb[..verb.len() - 1].to_string();
    }
    verb.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;
    use crate::story::fill_slot;
    use crate::tracer::{trace, TraceLimits};

    fn doc_with(src: &str, fills: &[(&str, &str)], options: ComposeOptions) -> ComicDoc {
        let ast = parse(src).unwrap();
        let mut template = build_story_template(&ast);
        for (id, text) in fills {
            template = fill_slot(&template, id, text).unwrap();
        }
        let limits = TraceLimits::with_iterations(options.iterations_shown.max(3)).unwrap();
        compose(&ast, &template, &trace(&ast, limits), &options).unwrap()
    }

    fn doc(src: &str) -> ComicDoc {
        doc_with(src, &[], ComposeOptions::default())
    }

    fn texts(panel: &Panel) -> Vec<&str> {
        panel
            .elements
            .iter()
            .filter_map(|e| match e {
                Element::Text { content } | Element::SpeechBubble { content, .. } => Some(content.as_str()),
                _ => None,
            })
            .collect()
    }

    const CONDITIONAL: &str = "x = True\nif x == True:\n    print(True)";
    const APPLE: [(&str, &str); 6] = [
        ("L1-object", "apple"),
        ("L1-verb", "tastes"),
        ("L1-value", "good"),
        ("L2-object", "apple"),
        ("L2-verb", "tastes"),
        ("L2-value", "good"),
    ];

    #[test]
    fn conditional_program_rows() {
        let d = doc_with(CONDITIONAL, &APPLE, ComposeOptions::default());
        assert_eq!(d.rows.len(), 3);
        use PanelKind::*;
        assert_eq!(d.rows[0].kinds(), vec![Intro, Statement]);
        assert_eq!(d.rows[0].phases(), vec![Phase::Establisher, Phase::Initial]);
        assert_eq!(d.rows[1].kinds(), vec![Question, Answer]);
        assert_eq!(d.rows[1].phases(), vec![Phase::Initial, Phase::Prolongation]);
        assert_eq!(d.rows[2].kinds(), vec![Indent, Output]);
        assert_eq!(texts(&d.rows[0].panels[0]), vec!["apple"]);
        assert_eq!(texts(&d.rows[0].panels[1]), vec!["apple tastes good"]);
        assert_eq!(texts(&d.rows[1].panels[0]), vec!["does apple taste good?"]);
        assert_eq!(texts(&d.rows[1].panels[1]), vec!["yes"]);
        assert_eq!(texts(&d.rows[2].panels[1]), vec!["True"]);
        assert!(matches!(&d.rows[0].panels[0].elements[0], Element::Sprite { category, .. } if category == "apple"));
        assert!(d.rows.iter().all(|r| r.executed));
    }

    #[test]
    fn smallest_program() {
        let d = doc("x = 5");
        assert_eq!(d.rows.len(), 1);
        assert_eq!(texts(&d.rows[0].panels[0]), vec!["x"]);
        assert_eq!(texts(&d.rows[0].panels[1]), vec!["x is 5"]);
        assert!(matches!(&d.rows[0].panels[0].elements[0], Element::Sprite { category, .. } if category == STICK_FIGURE));
    }

    #[test]
    fn loop_rows_with_two_iterations_shown() {
        let options = ComposeOptions { iterations_shown: 2, ..Default::default() };
        let d = doc_with("x = 90\nfor i in range(3):\n    x = x - 10\n    print(x)", &[], options);
        assert_eq!(d.rows.len(), 8);
        let header = &d.rows[1];
        assert_eq!(header.kinds(), vec![PanelKind::Statement, PanelKind::Ellipsis]);
        assert_eq!(texts(&header.panels[0]), vec!["repeat 3 times"]);
        assert_eq!(texts(&d.rows[2].panels[0]), vec!["i = 0"]);
        assert_eq!(texts(&d.rows[3].panels[2]), vec!["x is 80", "x = 80"]);
        assert_eq!(texts(&d.rows[4].panels[1]), vec!["80"]);
        assert_eq!(texts(&d.rows[5].panels[0]), vec!["i = 1"]);
        assert_eq!(texts(&d.rows[6].panels[2]), vec!["x is 70", "x = 70"]);
        assert_eq!(d.rows[6].indent_count(), 1);
        assert_eq!(d.rows[5].indent_count(), 0);
    }

    #[test]
    fn full_loop_has_no_ellipsis() {
        let d = doc("x = 90\nfor i in range(3):\n    x = x - 10");
        assert_eq!(d.rows.len(), 1 + 1 + 3 * 2);
        assert_eq!(d.rows[1].kinds(), vec![PanelKind::Statement]);
    }

    #[test]
    fn capped_while_loop_gets_ellipsis() {
        let d = doc("n = 0\nwhile n < 100:\n    n = n + 1");
        assert_eq!(d.rows.len(), 1 + 1 + 3 * 2);
        assert_eq!(d.rows[1].kinds(), vec![PanelKind::Statement, PanelKind::Ellipsis]);
        assert_eq!(texts(&d.rows[2].panels[0]), vec!["iteration 1"]);
        let off = ComposeOptions { ellipsis_on_truncation: false, ..Default::default() };
        assert_eq!(doc_with("n = 0\nwhile n < 100:\n    n = n + 1", &[], off).rows[1].panels.len(), 1);
    }

    #[test]
    fn unexecuted_rows_are_flagged_or_hidden() {
        let src = "x = 1\nif x > 5:\n    print(x)\n    y = 2";
        let d = doc(src);
        assert_eq!(d.rows.iter().map(|r| r.executed).collect::<Vec<_>>(), vec![true, true, false, false]);
        assert_eq!(texts(&d.rows[1].panels[1]), vec!["no"]);
        let hidden = doc_with(src, &[], ComposeOptions { show_unexecuted: Unexecuted::Hidden, ..Default::default() });
        assert_eq!(hidden.rows.len(), 2);
        assert_eq!(hidden.unexecuted, Unexecuted::Hidden);
    }

    #[test]
    fn functions_render_body_once() {
        let src = "def double(n):\n    return n * 2\nx = double(4)\nshow(x)";
        let d = doc(src);
        assert_eq!(d.rows.len(), 4);
        assert_eq!(d.rows[0].phases(), vec![Phase::Establisher]);
        assert_eq!(d.rows[1].phases(), vec![Phase::Release]);
        assert_eq!(texts(&d.rows[1].panels[1]), vec!["give back 8", "n * 2 = 8"]);
        assert_eq!(d.rows[3].phases(), vec![Phase::Initial]);
        assert!(d.rows[3].executed, "the call is recorded before the undefined function faults");
    }

    #[test]
    fn zero_iteration_loop_shows_body_unexecuted() {
        let d = doc("for i in range(0):\n    print(i)");
        assert_eq!(d.rows.len(), 2);
        assert!(d.rows[0].executed && !d.rows[1].executed);
    }

    #[test]
    fn mismatched_inputs() {
        let ast = parse("x = 1").unwrap();
        let other = parse("x = 2").unwrap();
        let t = build_story_template(&ast);
        let good = trace(&ast, TraceLimits::default());
        let bad = trace(&other, TraceLimits::default());
        let o = ComposeOptions::default();
        assert!(matches!(compose(&ast, &t, &bad, &o), Err(ComposeError::MismatchedInputs { .. })));
        assert!(matches!(compose(&other, &t, &bad, &o), Err(ComposeError::MismatchedInputs { .. })));
        let zero = ComposeOptions { iterations_shown: 0, ..o };
        assert!(matches!(compose(&ast, &t, &good, &zero), Err(ComposeError::InvalidOptions { .. })));
    }

    #[test]
    fn update_swaps_content_only() {
        let src = "x = 90\nfor i in range(3):\n    x = x - 10\n    print(x)";
        let ast = parse(src).unwrap();
        let t = build_story_template(&ast);
        let tr = trace(&ast, TraceLimits::default());
        let o = ComposeOptions::default();
        let before = compose(&ast, &t, &tr, &o).unwrap();
        let refilled = fill_slot(&fill_slot(&t, "L3-object", "BATTERY").unwrap(), "L4-object", "phone").unwrap();
        let after = update(&before, &ast, &refilled, &tr, &o).unwrap();
        assert_eq!(after.shape(), before.shape());
        assert_ne!(after, before);
        assert_eq!(texts(&after.rows[3].panels[2])[0], "BATTERY is 80");
        assert!(matches!(&after.rows[4].panels[1].elements[0], Element::Sprite { category, .. } if category == "phone"));
        assert_eq!(update(&before, &ast, &t, &tr, &o).unwrap(), before);

        let longer = parse(&format!("{src}\ny = 1")).unwrap();
        let t2 = build_story_template(&longer);
        let tr2 = trace(&longer, TraceLimits::default());
        assert!(matches!(update(&before, &longer, &t2, &tr2, &o), Err(ComposeError::StructureChanged { .. })));
        let foreign = build_story_template(&parse("x = 91\nfor i in range(3):\n    x = x - 10\n    print(x)").unwrap());
        assert!(matches!(update(&before, &ast, &foreign, &tr, &o), Err(ComposeError::StructureChanged { .. })));
    }

    #[test]
    fn questions() {
        let line = |src: &str, fills: &[(&str, &str)]| {
            let mut t = build_story_template(&parse(src).unwrap());
            for (id, text) in fills {
                t = fill_slot(&t, id, text).unwrap();
            }
            question(&t.lines[0])
        };
        assert_eq!(line("if x == True:\n    y = 1", &[]), "is x True?");
        assert_eq!(line("if x < 3:\n    y = 1", &[]), "is x less than 3?");
        assert_eq!(line("if x:\n    y = 1", &[]), "x?");
        assert_eq!(line("if x == 1:\n    y = 1", &[("L1-verb", "has")]), "does x have 1?");
        assert_eq!(line("if x == 1:\n    y = 1", &[("L1-verb", "flies to")]), "does x fly to 1?");
        assert_eq!(base_form("watches"), "watch");
        assert_eq!(base_form("pass"), "pass");
        assert_eq!(base_form("feel"), "feel");
    }

    #[test]
    fn doc_json_shape() {
        let v = serde_json::to_value(doc(CONDITIONAL)).unwrap();
        assert_eq!(v["rows"][2]["panels"][0], serde_json::json!({"phase": null, "kind": "indent", "elements": []}));
        assert_eq!(v["rows"][1]["panels"][1]["phase"], "prolongation");
        assert_eq!(v["rows"][1]["panels"][1]["elements"][0], serde_json::json!({"type": "character"}));
        assert_eq!(v["unexecuted"], "dimmed");
    }
}
