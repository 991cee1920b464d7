use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {message}")]
    SyntaxError { line: u32, col: u32, message: String },
    #[error("unsupported construct: {construct} at line {line}")]
    UnsupportedConstruct { line: u32, construct: String },
}

impl ParseError {
    pub(crate) fn syntax(line: u32, col: u32, message: impl Into<String>) -> Self {
        ParseError::SyntaxError { line, col, message: message.into() }
    }

    pub(crate) fn unsupported(line: u32, construct: impl Into<String>) -> Self {
        ParseError::UnsupportedConstruct { line, construct: construct.into() }
    }

    pub fn line(&self) -> u32 {
        match self {
            ParseError::SyntaxError { line, .. } | ParseError::UnsupportedConstruct { line, .. } => *line,
        }
    }

    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::SyntaxError { .. } => "syntax_error",
            ParseError::UnsupportedConstruct { .. } => "unsupported_construct",
        }
    }
}
