//! Lays a [`ComicDoc`] out on a grid and draws it as SVG.
//!
//! Rows stack top to bottom from the left margin, one horizontal band of
//! panels per row. Inside a panel, text sits at the bottom and the figure
//! and speech bubble share the space above it. Output depends only on the
//! inputs: numbers are printed with two decimals and elements are emitted in
//! document order, frame first, then sprites, bubbles and text.

mod text;

pub use text::wrap;

use std::fmt::Write as _;

use crate::composer::{ComicDoc, Element, Panel, PanelKind, Row, Unexecuted};
use crate::sprites::{Sprite, SpriteSet, BUBBLE, PLACEHOLDER, STICK_FIGURE};
use text::escape;

const PADDING: f64 = 6.0;
const MAX_TEXT_LINES: usize = 3;
const CHAR_WIDTH: f64 = 0.6;
const LINE_HEIGHT: f64 = 1.2;
const INDENT_FILL: &str = "#d9d9d9";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layout {
    pub panel_w: f64,
    pub panel_h: f64,
    pub gutter: f64,
    pub margin: f64,
    pub font_size: f64,
    /// Opacity of unexecuted rows when the doc asks for dimming.
    pub dim_opacity: f64,
}

impl Default for Layout {
    fn default() -> Self {
        Layout { panel_w: 160.0, panel_h: 120.0, gutter: 8.0, margin: 16.0, font_size: 14.0, dim_opacity: 0.4 }
    }
}

impl Layout {
    pub fn validate(&self) -> Result<(), String> {
        let sizes = [
            ("panel_w", self.panel_w),
            ("panel_h", self.panel_h),
            ("gutter", self.gutter),
            ("margin", self.margin),
            ("font_size", self.font_size),
        ];
        for (name, value) in sizes {
            if !(value.is_finite() && value > 0.0) {
                return Err(format!("{name} must be positive, got {value}"));
            }
        }
        if !(self.dim_opacity > 0.0 && self.dim_opacity <= 1.0) {
            return Err(format!("dim_opacity must be in (0, 1], got {}", self.dim_opacity));
        }
        Ok(())
    }

    fn line_height(&self) -> f64 {
        self.font_size * LINE_HEIGHT
    }

    fn chars_per_line(&self, width: f64) -> usize {
        ((width / (self.font_size * CHAR_WIDTH)).floor() as usize).max(1)
    }

    /// Marker rows are a third of the normal height.
    pub fn row_height(&self, row: &Row) -> f64 {
        if row.is_marker() {
            self.panel_h / 3.0
        } else {
            self.panel_h
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    fn inset(&self, by: f64) -> Rect {
        let dx = by.min(self.w / 2.0);
        let dy = by.min(self.h / 2.0);
        Rect { x: self.x + dx, y: self.y + dy, w: self.w - 2.0 * dx, h: self.h - 2.0 * dy }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        const EPS: f64 = 1e-9;
        x >= self.x - EPS && x <= self.x + self.w + EPS && y >= self.y - EPS && y <= self.y + self.h + EPS
    }
}

/// Where each part of a panel goes.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelGeometry {
    pub frame: Rect,
    pub content: Rect,
    /// Square box the figure sprite is scaled into.
    pub figure: Option<Rect>,
    pub bubble: Option<Rect>,
    /// Wrapped text lines with their baseline positions.
    pub text: Vec<(String, f64, f64)>,
    pub bubble_text: Vec<(String, f64, f64)>,
}

/// Frame rectangles per row and panel.
pub fn panel_frames(doc: &ComicDoc, layout: &Layout) -> Vec<Vec<Rect>> {
    let mut y = layout.margin;
    doc.rows
        .iter()
        .map(|row| {
            let h = layout.row_height(row);
            let frames = (0..row.panels.len())
                .map(|j| Rect { x: layout.margin + j as f64 * (layout.panel_w + layout.gutter), y, w: layout.panel_w, h })
                .collect();
            y += h + layout.gutter;
            frames
        })
        .collect()
}

/// Width and height of the drawing including margins.
pub fn canvas_size(doc: &ComicDoc, layout: &Layout) -> (f64, f64) {
    let widest = doc.rows.iter().map(|r| r.panels.len()).max().unwrap_or(0) as f64;
    let rows = doc.rows.len() as f64;
    let width = 2.0 * layout.margin + widest * layout.panel_w + (widest - 1.0).max(0.0) * layout.gutter;
    let heights: f64 = doc.rows.iter().map(|r| layout.row_height(r)).sum();
    let height = 2.0 * layout.margin + heights + (rows - 1.0).max(0.0) * layout.gutter;
    (width, height)
}

pub fn panel_geometry(panel: &Panel, frame: Rect, layout: &Layout) -> PanelGeometry {
    let content = frame.inset(PADDING);
    let line_h = layout.line_height();
    let fits = (content.h / line_h).floor().max(0.0) as usize;
    let per_line = layout.chars_per_line(content.w);

    let mut lines: Vec<String> = Vec::new();
    for element in &panel.elements {
        if let Element::Text { content } = element {
            lines.extend(wrap(content, per_line, MAX_TEXT_LINES));
        }
    }
    if lines.len() > fits {
        lines = wrap(&lines.join(" "), per_line, fits);
    }
    let text_h = lines.len() as f64 * line_h;
    let text_top = content.y + content.h - text_h;
    let text = place_lines(lines, content.x + content.w / 2.0, text_top, layout);

    let above = Rect { x: content.x, y: content.y, w: content.w, h: (content.h - text_h).max(0.0) };
    let has_figure = panel.elements.iter().any(|e| matches!(e, Element::Sprite { .. } | Element::Character));
    let bubble_content = panel.elements.iter().find_map(|e| match e {
        Element::SpeechBubble { content, .. } => Some(content.as_str()),
        _ => None,
    });
    let (figure_area, bubble) = match (has_figure, bubble_content.is_some()) {
        (true, true) => {
            let left = Rect { w: above.w * 0.4, ..above };
            let right = Rect { x: above.x + above.w * 0.4, w: above.w * 0.6, ..above };
            (Some(left), Some(right))
        }
        (true, false) => (Some(above), None),
        (false, true) => (None, Some(above)),
        (false, false) => (None, None),
    };
    let figure = figure_area.map(|area| {
        let side = area.w.min(area.h);
        Rect { x: area.x + (area.w - side) / 2.0, y: area.y + (area.h - side) / 2.0, w: side, h: side }
    });
    let bubble_text = match (bubble, bubble_content) {
        (Some(b), Some(content)) => {
            // Text stays within the body of the bubble glyph, above its tail.
            let inner = Rect { x: b.x + b.w * 0.1, y: b.y + b.h * 0.1, w: b.w * 0.8, h: b.h * 0.6 };
            let fits = ((inner.h / line_h).floor() as usize).clamp(1, MAX_TEXT_LINES);
            let lines = wrap(content, layout.chars_per_line(inner.w), fits);
            let top = inner.y + (inner.h - lines.len() as f64 * line_h) / 2.0;
            place_lines(lines, inner.x + inner.w / 2.0, top, layout)
        }
        _ => Vec::new(),
    };
    PanelGeometry { frame, content, figure, bubble, text, bubble_text }
}

fn place_lines(lines: Vec<String>, center_x: f64, top: f64, layout: &Layout) -> Vec<(String, f64, f64)> {
    let line_h = layout.line_height();
    let baseline_offset = (line_h + layout.font_size * 0.7) / 2.0;
    lines
        .into_iter()
        .enumerate()
        .map(|(i, line)| (line, center_x, top + i as f64 * line_h + baseline_offset))
        .collect()
}

/// Maps a sprite's normalized points into `bx`.
pub fn sprite_points(sprite: &Sprite, bx: Rect) -> Vec<Vec<(f64, f64)>> {
    sprite
        .strokes
        .iter()
        .map(|stroke| stroke.iter().map(|p| (bx.x + p[0] * bx.w, bx.y + p[1] * bx.h)).collect())
        .collect()
}

/// Number with exactly two decimals and no negative zero.
fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

fn polyline(out: &mut String, points: &[(f64, f64)], fill: &str, width: f64) {
    let pts: Vec<String> = points.iter().map(|(x, y)| format!("{},{}", num(*x), num(*y))).collect();
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="{fill}" stroke="#000" stroke-width="{}" stroke-linecap="round" stroke-linejoin="round"/>"##,
        pts.join(" "),
        num(width)
    );
}

fn text_lines(out: &mut String, lines: &[(String, f64, f64)], size: f64) {
    for (line, x, y) in lines {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="{}" text-anchor="middle">{}</text>"#,
            num(*x),
            num(*y),
            num(size),
            escape(line)
        );
    }
}

fn figure_sprite(panel: &Panel, sprites: &SpriteSet) -> Option<Sprite> {
    panel.elements.iter().find_map(|e| match e {
        Element::Sprite { category, .. } if category == STICK_FIGURE => Some(sprites.get(STICK_FIGURE)),
        Element::Sprite { category, label } => {
            let mut sprite = sprites.resolve(category);
            if let (Some(label), true) = (label, sprite.name == PLACEHOLDER) {
                sprite.label = Some(label.clone());
            }
            Some(sprite)
        }
        Element::Character => Some(sprites.get(STICK_FIGURE)),
        _ => None,
    })
}

fn draw_panel(out: &mut String, panel: &Panel, frame: Rect, sprites: &SpriteSet, layout: &Layout) {
    let geo = panel_geometry(panel, frame, layout);
    let fill = if panel.kind == PanelKind::Indent { INDENT_FILL } else { "#fff" };
    let phase = panel.phase.map_or("none", |p| match p {
        crate::composer::Phase::Establisher => "establisher",
        crate::composer::Phase::Initial => "initial",
        crate::composer::Phase::Prolongation => "prolongation",
        crate::composer::Phase::Peak => "peak",
        crate::composer::Phase::Release => "release",
    });
    let kind = serde_json::to_value(panel.kind).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
    let _ = writeln!(out, r#"<g class="panel" data-kind="{kind}" data-phase="{phase}">"#);
    let _ = writeln!(
        out,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}" stroke="#000" stroke-width="2.00"/>"##,
        num(frame.x),
        num(frame.y),
        num(frame.w),
        num(frame.h)
    );

    let sprite = figure_sprite(panel, sprites);
    if let (Some(sprite), Some(bx)) = (&sprite, geo.figure) {
        for stroke in sprite_points(sprite, bx) {
            polyline(out, &stroke, "none", 1.5);
        }
    }
    if let Some(bx) = geo.bubble {
        for stroke in sprite_points(&sprites.get(BUBBLE), bx) {
            polyline(out, &stroke, "#fff", 1.5);
        }
    }

    text_lines(out, &geo.bubble_text, layout.font_size);
    if let (Some(label), Some(bx)) = (sprite.as_ref().and_then(|s| s.label.as_ref()), geo.figure) {
        let size = (layout.font_size * 0.75).min(bx.h);
        let lines = wrap(label, ((bx.w / (size * CHAR_WIDTH)).floor() as usize).max(1), 1);
        let placed: Vec<(String, f64, f64)> =
            lines.into_iter().map(|l| (l, bx.x + bx.w / 2.0, bx.y + bx.h / 2.0 + size * 0.35)).collect();
        text_lines(out, &placed, size);
    }
    text_lines(out, &geo.text, layout.font_size);
    out.push_str("</g>\n");
}

/// Draws the doc. Equal inputs give byte-identical output.
pub fn render_svg(doc: &ComicDoc, sprites: &SpriteSet, layout: &Layout) -> String {
    let (width, height) = canvas_size(doc, layout);
    let mut out = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="{f}">"#,
        w = num(width),
        h = num(height),
        f = num(layout.font_size)
    );
    if doc.rows.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    out.push('\n');
    for (row, frames) in doc.rows.iter().zip(panel_frames(doc, layout)) {
        let dim = !row.executed && doc.unexecuted == Unexecuted::Dimmed;
        let opacity = if dim { format!(r#" opacity="{}""#, num(layout.dim_opacity)) } else { String::new() };
        let _ = writeln!(
            out,
            r#"<g class="row" data-line="{}" data-executed="{}"{opacity}>"#,
            row.code_line, row.executed
        );
        for (panel, frame) in row.panels.iter().zip(frames) {
            draw_panel(&mut out, panel, frame, sprites, layout);
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composer::{compose, ComposeOptions, Phase};
    use crate::frontend::parse;
    use crate::story::build_story_template;
    use crate::tracer::{trace, TraceLimits};

    fn doc(src: &str) -> ComicDoc {
        let ast = parse(src).unwrap();
        let t = build_story_template(&ast);
        compose(&ast, &t, &trace(&ast, TraceLimits::default()), &ComposeOptions::default()).unwrap()
    }

    #[test]
    fn empty_doc_is_bare_root() {
        let empty = ComicDoc { source_hash: String::new(), unexecuted: Unexecuted::Dimmed, rows: vec![] };
        let svg = render_svg(&empty, &SpriteSet::builtins(), &Layout::default());
        assert!(svg.starts_with("<svg "));
        assert!(svg.contains(r#"viewBox="0 0 32.00 32.00""#));
        assert!(svg.trim_end().ends_with("\"></svg>"), "{svg}");
        assert_eq!(svg.matches('<').count(), 2);
    }

    #[test]
    fn rows_stack_with_gray_indent() {
        let d = doc("x = True\nif x == True:\n    print(True)");
        let layout = Layout::default();
        let frames = panel_frames(&d, &layout);
        assert_eq!(frames.iter().map(Vec::len).collect::<Vec<_>>(), vec![2, 2, 2]);
        assert_eq!(frames[1][1].x, 16.0 + 168.0);
        assert_eq!(frames[2][0].y, 16.0 + 2.0 * 128.0);
        let svg = render_svg(&d, &SpriteSet::bundled(), &layout);
        assert_eq!(svg.matches(r##"fill="#d9d9d9""##).count(), 1);
        assert_eq!(svg.matches(r#"class="row""#).count(), 3);
        assert_eq!(svg, render_svg(&d, &SpriteSet::bundled(), &layout));
        assert_eq!(canvas_size(&d, &layout), (16.0 * 2.0 + 2.0 * 160.0 + 8.0, 32.0 + 3.0 * 120.0 + 16.0));
    }

    #[test]
    fn dims_unexecuted_rows() {
        let d = doc("x = 1\nif x > 5:\n    y = 2");
        let svg = render_svg(&d, &SpriteSet::bundled(), &Layout::default());
        assert_eq!(svg.matches(r#"opacity="0.40""#).count(), 1);
        let full = ComicDoc { unexecuted: Unexecuted::Full, ..d };
        assert!(!render_svg(&full, &SpriteSet::bundled(), &Layout::default()).contains("opacity"));
    }

    #[test]
    fn z_order_inside_panels() {
        let d = doc("x = True\nif x == True:\n    print(True)");
        let svg = render_svg(&d, &SpriteSet::bundled(), &Layout::default());
        let answer = svg.split(r#"<g class="panel""#).nth(4).unwrap();
        let rect = answer.find("<rect").unwrap();
        let first_poly = answer.find("<polyline").unwrap();
        let fill_poly = answer.find(r##"fill="#fff" stroke="#000" stroke-width="1.50""##).unwrap();
        let text = answer.find("<text").unwrap();
        assert!(rect < first_poly && first_poly < fill_poly && fill_poly < text, "{answer}");
        assert!(answer.contains(">yes</text>"));
    }

    #[test]
    fn marker_rows_are_slim() {
        let d = doc("for i in range(2):\n    x = i");
        let frames = panel_frames(&d, &Layout::default());
        assert_eq!(frames[1][0].h, 40.0);
        assert_eq!(frames[2][1].y, 16.0 + 120.0 + 8.0 + 40.0 + 8.0);
    }

    #[test]
    fn sprites_stay_inside_content_box() {
        let d = doc("x = True\nif x == True:\n    print(True)");
        let layout = Layout::default();
        let sprites = SpriteSet::bundled();
        for (row, frames) in d.rows.iter().zip(panel_frames(&d, &layout)) {
            for (panel, frame) in row.panels.iter().zip(frames) {
                let geo = panel_geometry(panel, frame, &layout);
                if let (Some(s), Some(bx)) = (figure_sprite(panel, &sprites), geo.figure) {
                    for (x, y) in sprite_points(&s, bx).into_iter().flatten() {
                        assert!(geo.content.contains(x, y));
                    }
                }
            }
        }
    }

    #[test]
    fn long_text_is_wrapped_and_ellipsized() {
        let panel = Panel {
            phase: Some(Phase::Initial),
            kind: PanelKind::Statement,
            elements: vec![Element::Text { content: "word ".repeat(40) }],
        };
        let frame = Rect { x: 0.0, y: 0.0, w: 160.0, h: 120.0 };
        let geo = panel_geometry(&panel, frame, &Layout::default());
        assert_eq!(geo.text.len(), 3);
        assert!(geo.text[2].0.ends_with('…'));
    }

    #[test]
    fn layout_validation() {
        assert!(Layout::default().validate().is_ok());
        assert!(Layout { dim_opacity: 0.0, ..Layout::default() }.validate().is_err());
        assert!(Layout { panel_w: -1.0, ..Layout::default() }.validate().is_err());
        assert_eq!(num(-0.001), "0.00");
    }
}
