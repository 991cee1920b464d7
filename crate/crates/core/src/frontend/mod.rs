//! Source text → [`CodeAst`].
//!
//! The accepted language is a small indentation-sensitive Python subset:
//! assignment, `if`, `while`, `for … in range(…)`, `def`, call statements and
//! `return`, over integer, boolean and string literals. Anything else that is
//! valid Python is rejected with [`ParseError::UnsupportedConstruct`] naming
//! the construct; malformed text yields [`ParseError::SyntaxError`].

mod error;
mod lexer;
mod parser;
mod pretty;

pub use error::ParseError;
pub use pretty::{expr_text, pretty_print};
pub(crate) use pretty::quote;

use crate::ast::CodeAst;

pub const DEFAULT_INDENT_UNIT: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// Number of spaces per indentation level.
    pub indent_unit: u32,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { indent_unit: DEFAULT_INDENT_UNIT }
    }
}

/// Parses with the default 4-space indent unit.
pub fn parse(source: &str) -> Result<CodeAst, ParseError> {
    parse_with(source, ParseOptions::default())
}

pub fn parse_with(source: &str, options: ParseOptions) -> Result<CodeAst, ParseError> {
    let unit = options.indent_unit.max(1);
    let lines = lexer::split_lines(source, unit)?;
    let statements = parser::parse_lines(&lines)?;
    Ok(CodeAst { statements })
}

/// Parses raw bytes, reporting invalid UTF-8 as a syntax error at the line
/// where decoding fails.
pub fn parse_bytes(bytes: &[u8]) -> Result<CodeAst, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(text),
        Err(e) => {
            let valid = &bytes[..e.valid_up_to()];
            let line = valid.iter().filter(|&&b| b == b'\n').count() as u32 + 1;
            let line_start = valid.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
            let col = String::from_utf8_lossy(&valid[line_start..]).chars().count() as u32 + 1;
            Err(ParseError::syntax(line, col, "source is not valid UTF-8"))
        }
    }
}
